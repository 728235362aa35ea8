//! Closed-form binary profile families, one per classic windowing scheme.
//!
//! Patterns use long runs (e.g. fifty ones then fifty zeros) rather than
//! alternating entries: rapidly oscillating streams look like a stationary
//! mixture at finite sample sizes.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{AdversarialProfile, Provenance};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn square_wave<S: Scalar>(l: usize, duty: usize, len: usize) -> impl Iterator<Item = S> {
    (0..len).map(move |i| if i % l < duty { S::one() } else { S::zero() })
}

fn balanced_head<S: Scalar, R: Rng + ?Sized>(a: usize, ones: usize, rng: &mut R) -> Vec<S> {
    let mut head: Vec<S> = (0..a).map(|i| if i < ones { S::one() } else { S::zero() }).collect();
    head.shuffle(rng);
    head
}

/// `l`-periodic square wave: `duty` ones then `l - duty` zeros, repeated.
///
/// Hidden from sliding pairs of length `l` and from a fixed reference of
/// length `l` (any window of length `l` holds exactly `duty` ones).
pub fn gen_periodic<S: Scalar>(l: usize, duty: usize, n: usize) -> Result<AdversarialProfile<S>> {
    if !(1 <= duty && duty < l && l <= n) {
        return Err(Error::invalid(format!(
            "periodic profile needs 1 <= duty < l <= n, got duty = {duty}, l = {l}, n = {n}"
        )));
    }
    AdversarialProfile::new(
        square_wave(l, duty, n).collect(),
        Provenance::family("periodic", &[("l", l as f64), ("duty", duty as f64)]),
    )
}

/// Random balanced binary head of length `a`, then the constant `1/2`.
///
/// Hidden from growing and fixed references whose reference length is at
/// least `a`: every reference mean is `1/2`, as is every test window.
pub fn gen_rand_const<S: Scalar, R: Rng + ?Sized>(a: usize, n: usize, rng: &mut R) -> Result<AdversarialProfile<S>> {
    if a == 0 || a >= n {
        return Err(Error::invalid(format!(
            "rand-const profile needs 0 < a < n, got a = {a}, n = {n}"
        )));
    }
    if a % 2 == 1 {
        return Err(Error::OddHead { a });
    }
    let mut v = balanced_head::<S, R>(a, a / 2, rng);
    v.extend(std::iter::repeat_n(S::from_ratio(1, 2), n - a));
    AdversarialProfile::new(v, Provenance::family("rand_const", &[("a", a as f64)]))
}

/// Head count `k` and ones-per-period `m = l*k/a` for a random periodic
/// profile: the feasible `k` in `[1, a)` closest to `a/2`, smaller on ties.
pub fn feasible_head_count(a: usize, l: usize) -> Option<(usize, usize)> {
    (1..a)
        .filter(|k| (l * k).is_multiple_of(a))
        .min_by_key(|&k| ((2 * k).abs_diff(a), k))
        .map(|k| (k, l * k / a))
}

/// Random binary head of length `a` with `k` ones, then an `l`-periodic tail
/// with the same mean (`m` ones followed by `l - m` zeros per period).
///
/// Hidden from a fixed reference of length `a` with test length `l`.
pub fn gen_rand_periodic<S: Scalar, R: Rng + ?Sized>(
    a: usize,
    l: usize,
    n: usize,
    rng: &mut R,
) -> Result<AdversarialProfile<S>> {
    if a == 0 || l == 0 || a >= n || l > n - a {
        return Err(Error::invalid(format!(
            "rand-periodic profile needs 0 < a < n and 0 < l <= n - a, got a = {a}, l = {l}, n = {n}"
        )));
    }
    let (k, m) = feasible_head_count(a, l).ok_or(Error::NoFeasibleDuty { a, l })?;
    let mut v = balanced_head::<S, R>(a, k, rng);
    v.extend(square_wave(l, m, n - a));
    AdversarialProfile::new(
        v,
        Provenance::family("rand_periodic", &[("a", a as f64), ("l", l as f64)]),
    )
}
