use num_traits::Zero;

use super::{AdversarialProfile, Provenance};
use crate::error::{Error, Result};
use crate::linalg::{svd_nullspace, NullSpace, RANK_TOLERANCE};
use crate::windowing::WeightMatrix;
use crate::Rational;

/// Largest difference-row residual accepted from the floating-point solve.
pub const SOLVE_TOLERANCE: f64 = 1e-9;

/// Profiles whose value range is this small are treated as constant.
const DEGENERATE_RANGE: f64 = 1e-12;

/// Largest stream length for which binarization falls back to exhaustive
/// search over all binary vectors.
const EXHAUSTIVE_LIMIT: usize = 16;

/// Find a non-constant profile annihilated by every difference row.
///
/// Solves `W x = 0` including the all-ones row, which rules out constants,
/// then min-max normalizes to `[0, 1]`. Shifting and scaling keep the
/// difference-row residual at zero because those rows annihilate constants.
pub fn solve_nullspace(w: &WeightMatrix<f64>) -> Result<AdversarialProfile<f64>> {
    let ns = svd_nullspace(&w.to_dense(true), w.n(), RANK_TOLERANCE);
    let mut v = ns.basis.into_iter().next().ok_or(Error::NoAdversarialExists)?;

    let (lo, hi) = min_max(&v);
    if hi - lo <= DEGENERATE_RANGE {
        return Err(Error::NoAdversarialExists);
    }
    // Fix the SVD sign so the output is reproducible.
    let scale = lo.abs().max(hi.abs());
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-9 * scale) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    let (lo, hi) = min_max(&v);
    let v: Vec<f64> = v.iter().map(|x| ((x - lo) / (hi - lo)).clamp(0.0, 1.0)).collect();

    let residual = w.max_residual(&v)?;
    if residual > SOLVE_TOLERANCE {
        return Err(Error::InvalidParameter(format!(
            "null-space solve left residual {residual:e} above {SOLVE_TOLERANCE:e}"
        )));
    }
    AdversarialProfile::new(v, Provenance::NullSpaceSolve)
}

/// Null space of the difference rows alone (constants included).
#[derive(Clone, Debug)]
pub struct NullSpaceSummary {
    pub n: usize,
    pub dimension: usize,
    pub basis: Vec<Vec<f64>>,
    /// Whether the space holds more than the constants.
    pub has_nonconstant: bool,
}

pub fn difference_nullspace(w: &WeightMatrix<f64>) -> NullSpaceSummary {
    let NullSpace { basis, .. } = svd_nullspace(&w.to_dense(false), w.n(), RANK_TOLERANCE);
    NullSpaceSummary {
        n: w.n(),
        dimension: basis.len(),
        // Constants always lie in the kernel, so anything beyond one
        // dimension is a non-constant direction.
        has_nonconstant: basis.len() > 1,
        basis,
    }
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    })
}

fn exact_zero_residual(w: &WeightMatrix<Rational>, bits: &[bool]) -> bool {
    let v: Vec<Rational> = bits
        .iter()
        .map(|&b| {
            if b {
                Rational::from_integer(1.into())
            } else {
                Rational::zero()
            }
        })
        .collect();
    w.difference_residuals(&v)
        .map(|r| r.iter().all(Zero::is_zero))
        .unwrap_or(false)
}

fn is_constant_bits(bits: &[bool]) -> bool {
    bits.iter().all(|&b| b == bits[0])
}

/// Turn a profile into a non-constant 0/1 profile with exactly zero residual,
/// changing as few entries of its rounding as the search finds.
///
/// Rounds at one half, then greedily flips the entry that most reduces the
/// total absolute residual. Short streams that the greedy pass cannot repair
/// are searched exhaustively, so there an error means no such binary profile
/// exists at all.
pub fn binarize_profile(profile: &AdversarialProfile<f64>, w: &WeightMatrix<f64>) -> Result<AdversarialProfile<f64>> {
    let n = w.n();
    if profile.n() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: profile.n(),
        });
    }
    let exact_w = w.convert::<Rational>();
    let rounded: Vec<bool> = profile.values().iter().map(|&x| x >= 0.5).collect();
    let fractional = profile.values().iter().filter(|&&x| x.min(1.0 - x) > 1e-9).count();

    let finish = |bits: Vec<bool>| {
        let changed = bits.iter().zip(&rounded).filter(|(a, b)| a != b).count();
        let provenance = if fractional == 0 && changed == 0 {
            profile.provenance().clone()
        } else {
            Provenance::Binarized {
                from: Box::new(profile.provenance().clone()),
                changed,
            }
        };
        AdversarialProfile::new(bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(), provenance)
    };

    if !is_constant_bits(&rounded) && exact_zero_residual(&exact_w, &rounded) {
        return finish(rounded.clone());
    }
    if let Some(bits) = greedy_repair(w, &exact_w, rounded.clone()) {
        return finish(bits);
    }
    if n <= EXHAUSTIVE_LIMIT {
        if let Some(bits) = exhaustive_search(w, &exact_w, &rounded) {
            return finish(bits);
        }
    }
    Err(Error::BinarizationInfeasible { fractional })
}

fn greedy_repair(w: &WeightMatrix<f64>, exact_w: &WeightMatrix<Rational>, mut bits: Vec<bool>) -> Option<Vec<bool>> {
    let n = w.n();
    let rows = w.difference_rows();
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (r, row) in rows.iter().enumerate() {
        for (i, c) in row.nonzeros() {
            columns[i].push((r, c));
        }
    }
    let as_f64: Vec<f64> = bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let mut residual = w.difference_residuals(&as_f64).ok()?;

    for _ in 0..n {
        let total: f64 = residual.iter().map(|r| r.abs()).sum();
        if total <= SOLVE_TOLERANCE {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, col) in columns.iter().enumerate() {
            let d = if bits[i] { -1.0 } else { 1.0 };
            let gain: f64 = col
                .iter()
                .map(|&(r, c)| residual[r].abs() - (residual[r] + d * c).abs())
                .sum();
            if gain > 1e-12 && best.is_none_or(|(_, g)| gain > g) {
                best = Some((i, gain));
            }
        }
        let (i, _) = best?;
        let d = if bits[i] { -1.0 } else { 1.0 };
        for &(r, c) in &columns[i] {
            residual[r] += d * c;
        }
        bits[i] = !bits[i];
    }
    (!is_constant_bits(&bits) && exact_zero_residual(exact_w, &bits)).then_some(bits)
}

fn exhaustive_search(w: &WeightMatrix<f64>, exact_w: &WeightMatrix<Rational>, rounded: &[bool]) -> Option<Vec<bool>> {
    let n = w.n();
    let mut best: Option<(usize, Vec<bool>)> = None;
    let mut v = vec![0.0; n];
    // Skip the two constant vectors.
    for mask in 1u32..(1u32 << n) - 1 {
        for (i, x) in v.iter_mut().enumerate() {
            *x = f64::from((mask >> i) & 1);
        }
        let residual = w.max_residual(&v).ok()?;
        if residual > 1e-12 {
            continue;
        }
        let bits: Vec<bool> = v.iter().map(|&x| x == 1.0).collect();
        let distance = bits.iter().zip(rounded).filter(|(a, b)| a != b).count();
        if best.as_ref().is_none_or(|(d, _)| distance < *d) && exact_zero_residual(exact_w, &bits) {
            best = Some((distance, bits));
        }
    }
    best.map(|(_, bits)| bits)
}
