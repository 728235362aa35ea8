//! Window schemes, the window pairs they induce on a finite stream, and the
//! weight-matrix encoding of those pairs.
//!
//! Sample `i` sits at time `t = i`. All intervals are half-open index ranges.
//! A window pair is encoded as the row vector
//! `w = |W1|^-1 * 1_{W1} - |W2|^-1 * 1_{W2}`, so `w . v = 0` says the mean of
//! `v` over the reference window equals its mean over the test window.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Half-open index interval `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Interval { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, i: usize) -> bool {
        self.start <= i && i < self.end
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

/// Reference window `w1` and test window `w2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WindowPair {
    pub w1: Interval,
    pub w2: Interval,
}

impl WindowPair {
    pub fn new(w1: Interval, w2: Interval) -> Self {
        WindowPair { w1, w2 }
    }

    /// Split time: the first index of the test window.
    pub fn time(&self) -> usize {
        self.w2.start
    }

    /// Ordering key used when reports list pairs in time order.
    pub fn time_key(&self) -> (usize, usize, usize, usize) {
        (self.w2.start, self.w2.end, self.w1.start, self.w1.end)
    }
}

impl fmt::Display for WindowPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.w1, self.w2)
    }
}

fn one() -> usize {
    1
}

fn is_one(x: &usize) -> bool {
    *x == 1
}

/// Which window pairs a two-window detector compares.
///
/// Serialized as a JSON object with a `type` tag, e.g.
/// `{"type":"fixed","a":100,"l":100,"stride":10}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum WindowScheme {
    /// `([t-l, t), [t, t+l))` for `t = l ..= n-l`.
    Sliding {
        l: usize,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        stride: usize,
    },
    /// `([0, a), [t, t+l))` for `t = a ..= n-l`.
    Fixed {
        a: usize,
        l: usize,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        stride: usize,
    },
    /// `([0, t), [t, t+l))` for `t = a ..= n-l`.
    Growing {
        a: usize,
        l: usize,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        stride: usize,
    },
    /// Pairs of `inner` whose split time is a multiple of `c`.
    Chunked { inner: Box<WindowScheme>, c: usize },
    /// Every pair of every member, duplicates removed.
    Union { members: Vec<WindowScheme> },
}

impl WindowScheme {
    pub fn sliding(l: usize) -> Self {
        WindowScheme::Sliding { l, stride: 1 }
    }

    pub fn fixed(a: usize, l: usize) -> Self {
        WindowScheme::Fixed { a, l, stride: 1 }
    }

    pub fn growing(a: usize, l: usize) -> Self {
        WindowScheme::Growing { a, l, stride: 1 }
    }

    pub fn chunked(inner: WindowScheme, c: usize) -> Self {
        WindowScheme::Chunked {
            inner: Box::new(inner),
            c,
        }
    }

    /// Set the evaluation stride of a base scheme. Composite schemes are
    /// returned unchanged; their members carry their own strides.
    pub fn with_stride(self, stride: usize) -> Self {
        match self {
            WindowScheme::Sliding { l, .. } => WindowScheme::Sliding { l, stride },
            WindowScheme::Fixed { a, l, .. } => WindowScheme::Fixed { a, l, stride },
            WindowScheme::Growing { a, l, .. } => WindowScheme::Growing { a, l, stride },
            other => other,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scheme: WindowScheme = serde_json::from_str(text)?;
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("window schemes always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: usize| {
            if x == 0 {
                Err(Error::InvalidScheme(format!("{name} must be at least 1")))
            } else {
                Ok(())
            }
        };
        match self {
            WindowScheme::Sliding { l, stride } => {
                positive("l", *l)?;
                positive("stride", *stride)
            }
            WindowScheme::Fixed { a, l, stride } | WindowScheme::Growing { a, l, stride } => {
                positive("a", *a)?;
                positive("l", *l)?;
                positive("stride", *stride)
            }
            WindowScheme::Chunked { inner, c } => {
                positive("c", *c)?;
                inner.validate()
            }
            WindowScheme::Union { members } => {
                if members.is_empty() {
                    return Err(Error::InvalidScheme("union has no members".into()));
                }
                for m in members {
                    if matches!(m, WindowScheme::Union { .. }) {
                        return Err(Error::InvalidScheme("nested union".into()));
                    }
                    m.validate()?;
                }
                Ok(())
            }
        }
    }

    /// Short human-readable label, e.g. `fixed(150,100)`.
    pub fn label(&self) -> String {
        let strided = |base: String, stride: usize| {
            if stride == 1 {
                base
            } else {
                format!("{base}@{stride}")
            }
        };
        match self {
            WindowScheme::Sliding { l, stride } => strided(format!("sliding({l})"), *stride),
            WindowScheme::Fixed { a, l, stride } => strided(format!("fixed({a},{l})"), *stride),
            WindowScheme::Growing { a, l, stride } => strided(format!("growing({a},{l})"), *stride),
            WindowScheme::Chunked { inner, c } => format!("chunked({},{c})", inner.label()),
            WindowScheme::Union { members } => {
                let parts: Vec<String> = members.iter().map(|m| m.label()).collect();
                format!("union({})", parts.join("+"))
            }
        }
    }
}

fn strided_times(first: usize, last: usize, stride: usize) -> impl Iterator<Item = usize> {
    (first..=last).step_by(stride)
}

fn collect_pairs(scheme: &WindowScheme, n: usize, out: &mut Vec<WindowPair>) {
    match *scheme {
        WindowScheme::Sliding { l, stride } => {
            if n >= 2 * l {
                out.extend(
                    strided_times(l, n - l, stride)
                        .map(|t| WindowPair::new(Interval::new(t - l, t), Interval::new(t, t + l))),
                );
            }
        }
        WindowScheme::Fixed { a, l, stride } => {
            if n >= a + l {
                out.extend(
                    strided_times(a, n - l, stride)
                        .map(|t| WindowPair::new(Interval::new(0, a), Interval::new(t, t + l))),
                );
            }
        }
        WindowScheme::Growing { a, l, stride } => {
            if n >= a + l {
                out.extend(
                    strided_times(a, n - l, stride)
                        .map(|t| WindowPair::new(Interval::new(0, t), Interval::new(t, t + l))),
                );
            }
        }
        WindowScheme::Chunked { ref inner, c } => {
            let mut inner_pairs = Vec::new();
            collect_pairs(inner, n, &mut inner_pairs);
            out.extend(inner_pairs.into_iter().filter(|p| p.time() % c == 0));
        }
        WindowScheme::Union { ref members } => {
            let mut all = Vec::new();
            for m in members {
                collect_pairs(m, n, &mut all);
            }
            let mut seen = HashSet::new();
            out.extend(all.into_iter().filter(|p| seen.insert(*p)));
        }
    }
}

/// All window pairs the scheme compares on a stream of `n` samples.
///
/// Unions list member pairs in member order with later duplicates dropped.
pub fn enumerate_pairs(scheme: &WindowScheme, n: usize) -> Result<Vec<WindowPair>> {
    scheme.validate()?;
    let mut pairs = Vec::new();
    collect_pairs(scheme, n, &mut pairs);
    if pairs.is_empty() {
        return Err(Error::EmptyScheme { n });
    }
    Ok(pairs)
}

/// Combine several schemes into one flat union.
pub fn union_scheme(schemes: &[WindowScheme]) -> Result<WindowScheme> {
    if schemes.is_empty() {
        return Err(Error::InvalidScheme("union of no schemes".into()));
    }
    let mut members = Vec::new();
    for s in schemes {
        match s {
            WindowScheme::Union { members: inner } => members.extend(inner.iter().cloned()),
            other => members.push(other.clone()),
        }
    }
    let scheme = WindowScheme::Union { members };
    scheme.validate()?;
    Ok(scheme)
}

/// One window-pair row in compact form: `+w1_weight` on `pair.w1`,
/// `-w2_weight` on `pair.w2`, zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceRow<S> {
    pub pair: WindowPair,
    pub w1_weight: S,
    pub w2_weight: S,
}

impl<S: Scalar> DifferenceRow<S> {
    fn new(pair: WindowPair) -> Self {
        DifferenceRow {
            pair,
            w1_weight: S::from_ratio(1, pair.w1.len() as i64),
            w2_weight: S::from_ratio(1, pair.w2.len() as i64),
        }
    }

    pub fn entry(&self, i: usize) -> S {
        if self.pair.w1.contains(i) {
            self.w1_weight.clone()
        } else if self.pair.w2.contains(i) {
            -self.w2_weight.clone()
        } else {
            S::zero()
        }
    }

    /// Nonzero entries as `(index, value)`.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, S)> + '_ {
        self.pair
            .w1
            .indices()
            .map(|i| (i, self.w1_weight.clone()))
            .chain(self.pair.w2.indices().map(|i| (i, -self.w2_weight.clone())))
    }

    fn dot_prefix(&self, prefix: &[S]) -> S {
        let sum = |iv: &Interval| prefix[iv.end].clone() - prefix[iv.start].clone();
        sum(&self.pair.w1) * self.w1_weight.clone() - sum(&self.pair.w2) * self.w2_weight.clone()
    }
}

/// Stream-length-indexed weight matrix.
///
/// Row 0 is the all-ones vector; rows `1..` are the window-pair difference
/// vectors in enumeration order.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix<S> {
    n: usize,
    rows: Vec<DifferenceRow<S>>,
}

impl<S: Scalar> WeightMatrix<S> {
    pub fn from_pairs(pairs: &[WindowPair], n: usize) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyScheme { n });
        }
        for p in pairs {
            if p.w1.is_empty() || p.w2.is_empty() || p.w1.end > n || p.w2.end > n {
                return Err(Error::InvalidScheme(format!("pair {p} does not fit into n = {n}")));
            }
            if p.w1.end > p.w2.start && p.w2.end > p.w1.start {
                return Err(Error::InvalidScheme(format!("pair {p} has overlapping windows")));
            }
        }
        Ok(WeightMatrix {
            n,
            rows: pairs.iter().copied().map(DifferenceRow::new).collect(),
        })
    }

    /// Stream length (number of columns).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of rows including the all-ones row.
    pub fn row_count(&self) -> usize {
        self.rows.len() + 1
    }

    pub fn difference_rows(&self) -> &[DifferenceRow<S>] {
        &self.rows
    }

    /// Window pair behind row `r`; `None` for the all-ones row.
    pub fn pair(&self, r: usize) -> Option<&WindowPair> {
        r.checked_sub(1).and_then(|k| self.rows.get(k)).map(|row| &row.pair)
    }

    pub fn entry(&self, r: usize, i: usize) -> S {
        match r {
            0 => S::one(),
            _ => self.rows[r - 1].entry(i),
        }
    }

    pub fn dense_row(&self, r: usize) -> Vec<S> {
        (0..self.n).map(|i| self.entry(r, i)).collect()
    }

    /// Dense matrix, optionally without the all-ones row.
    pub fn to_dense(&self, include_ones: bool) -> Vec<Vec<S>> {
        let first = if include_ones { 0 } else { 1 };
        (first..self.row_count()).map(|r| self.dense_row(r)).collect()
    }

    /// `W_diff . v`, one entry per difference row.
    pub fn difference_residuals(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        let mut prefix = Vec::with_capacity(self.n + 1);
        prefix.push(S::zero());
        for x in v {
            let next = prefix.last().cloned().unwrap() + x.clone();
            prefix.push(next);
        }
        Ok(self.rows.iter().map(|row| row.dot_prefix(&prefix)).collect())
    }

    /// `max_r |W_diff . v|_r`.
    pub fn max_residual(&self, v: &[S]) -> Result<S> {
        Ok(crate::scalar::max_abs(&self.difference_residuals(v)?))
    }

    /// Entry-wise conversion to another scalar type.
    pub fn convert<T: Scalar>(&self) -> WeightMatrix<T> {
        WeightMatrix {
            n: self.n,
            rows: self.rows.iter().map(|r| DifferenceRow::new(r.pair)).collect(),
        }
    }
}

/// Weight matrix of all pairs the scheme compares on `n` samples.
pub fn build_weight_matrix<S: Scalar>(scheme: &WindowScheme, n: usize) -> Result<WeightMatrix<S>> {
    let pairs = enumerate_pairs(scheme, n)?;
    WeightMatrix::from_pairs(&pairs, n)
}

/// Continuous-time window scheme over real time with Lebesgue observation
/// measure, used by the limiting-case verifier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ContinuousScheme {
    /// `([t-l, t], [t, t+l])`, any real `t`.
    Sliding { l: f64 },
    /// `([0, a], [t, t+l])`, `t >= a`.
    Fixed { a: f64, l: f64 },
    /// `([0, t], [t, t+l])`, `t >= a`.
    Growing { a: f64, l: f64 },
}

impl ContinuousScheme {
    /// Reference and test window at split time `t`, or `None` if `t` is not
    /// admissible.
    pub fn windows(&self, t: f64) -> Option<((f64, f64), (f64, f64))> {
        match *self {
            ContinuousScheme::Sliding { l } => Some(((t - l, t), (t, t + l))),
            ContinuousScheme::Fixed { a, l } => (t >= a).then_some(((0.0, a), (t, t + l))),
            ContinuousScheme::Growing { a, l } => (t >= a).then_some(((0.0, t), (t, t + l))),
        }
    }

    /// Smallest admissible split time, if bounded below.
    pub fn first_time(&self) -> Option<f64> {
        match *self {
            ContinuousScheme::Sliding { .. } => None,
            ContinuousScheme::Fixed { a, .. } | ContinuousScheme::Growing { a, .. } => Some(a),
        }
    }

    pub fn test_length(&self) -> f64 {
        match *self {
            ContinuousScheme::Sliding { l }
            | ContinuousScheme::Fixed { l, .. }
            | ContinuousScheme::Growing { l, .. } => l,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        let valid = match *self {
            ContinuousScheme::Sliding { l } => ok(l),
            ContinuousScheme::Fixed { a, l } | ContinuousScheme::Growing { a, l } => ok(a) && ok(l),
        };
        if valid {
            Ok(())
        } else {
            Err(Error::InvalidScheme(format!("{self:?} needs positive finite lengths")))
        }
    }
}

impl TryFrom<&WindowScheme> for ContinuousScheme {
    type Error = Error;

    fn try_from(scheme: &WindowScheme) -> Result<Self> {
        match *scheme {
            WindowScheme::Sliding { l, .. } => Ok(ContinuousScheme::Sliding { l: l as f64 }),
            WindowScheme::Fixed { a, l, .. } => Ok(ContinuousScheme::Fixed {
                a: a as f64,
                l: l as f64,
            }),
            WindowScheme::Growing { a, l, .. } => Ok(ContinuousScheme::Growing {
                a: a as f64,
                l: l as f64,
            }),
            _ => Err(Error::InvalidScheme(format!(
                "{} has no continuous-time counterpart",
                scheme.label()
            ))),
        }
    }
}
