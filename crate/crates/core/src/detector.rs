//! Kernel two-sample machinery and the two-window drift detector.
//!
//! The biased MMD of a window pair is `w^T K w`, where `K` is the kernel
//! matrix over the pooled samples and `w` holds `1/|W1|` on the reference
//! samples and `-1/|W2|` on the test samples. Permutation tests keep `K`
//! fixed and only relabel which pooled samples form each window.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::derived_rng;
use crate::scalar::Real;
use crate::windowing::{enumerate_pairs, union_scheme, WindowPair, WindowScheme};

/// RBF bandwidth policy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    Fixed(f64),
    /// Median of the nonzero pairwise distances among the tested samples.
    Median,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    /// `exp(-|x - y|^2 / (2 h^2))`.
    Rbf { bandwidth: Bandwidth },
    /// `<x, y>`.
    Linear,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::Rbf {
            bandwidth: Bandwidth::Median,
        }
    }
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::Rbf {
                bandwidth: Bandwidth::Fixed(h),
            } if !(h.is_finite() && *h > 0.0) => {
                Err(Error::invalid(format!("RBF bandwidth must be positive, got {h}")))
            }
            _ => Ok(()),
        }
    }
}

/// Dense symmetric kernel matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix<T> {
    n: usize,
    data: Vec<T>,
    bandwidth: Option<T>,
}

impl<T: Real> KernelMatrix<T> {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Bandwidth actually used, for RBF kernels.
    pub fn bandwidth(&self) -> Option<T> {
        self.bandwidth
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }
}

fn check_dimensions<T, P: AsRef<[T]>>(points: &[P]) -> Result<usize> {
    let dim = points
        .first()
        .map(|p| p.as_ref().len())
        .ok_or_else(|| Error::invalid("kernel matrix of an empty sample"))?;
    for (index, p) in points.iter().enumerate() {
        if p.as_ref().len() != dim {
            return Err(Error::DimensionMismatch {
                index,
                expected: dim,
                found: p.as_ref().len(),
            });
        }
    }
    Ok(dim)
}

fn squared_distance<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(a, b)| (*a - *b) * (*a - *b)).sum()
}

fn median<T: Real>(mut values: Vec<T>) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let len = values.len();
    let mid = len / 2;
    let cmp = |a: &T, b: &T| a.partial_cmp(b).expect("distances are finite");
    let (lower, upper, _) = values.select_nth_unstable_by(mid, cmp);
    let upper = *upper;
    if len % 2 == 1 {
        Some(upper)
    } else {
        let below = lower.iter().copied().fold(T::neg_infinity(), T::max);
        Some((below + upper) / T::from_f64(2.0).unwrap())
    }
}

/// Kernel matrix `K_ij = k(x_i, x_j)` over `points`.
pub fn kernel_matrix<T: Real, P: AsRef<[T]>>(points: &[P], spec: &KernelSpec) -> Result<KernelMatrix<T>> {
    spec.validate()?;
    check_dimensions(points)?;
    let n = points.len();
    let mut data = vec![T::zero(); n * n];
    let bandwidth = match spec {
        KernelSpec::Linear => {
            for i in 0..n {
                for j in i..n {
                    let k: T = points[i]
                        .as_ref()
                        .iter()
                        .zip(points[j].as_ref())
                        .map(|(a, b)| *a * *b)
                        .sum();
                    data[i * n + j] = k;
                    data[j * n + i] = k;
                }
            }
            None
        }
        KernelSpec::Rbf { bandwidth } => {
            for i in 0..n {
                for j in i + 1..n {
                    let d2 = squared_distance(points[i].as_ref(), points[j].as_ref());
                    data[i * n + j] = d2;
                    data[j * n + i] = d2;
                }
            }
            let h = match bandwidth {
                Bandwidth::Fixed(h) => T::from_f64(*h).unwrap(),
                Bandwidth::Median => {
                    let distances: Vec<T> = (0..n)
                        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                        .map(|(i, j)| data[i * n + j])
                        .filter(|d2| *d2 > T::zero())
                        .map(T::sqrt)
                        .collect();
                    median(distances).unwrap_or_else(T::one)
                }
            };
            let scale = -T::one() / (T::from_f64(2.0).unwrap() * h * h);
            for x in data.iter_mut() {
                *x = (*x * scale).exp();
            }
            Some(h)
        }
    };
    Ok(KernelMatrix { n, data, bandwidth })
}

/// Difference vector of a split into the first `m1` and last `m2` samples.
pub fn split_weights<T: Real>(m1: usize, m2: usize) -> Vec<T> {
    let a = T::one() / T::from_usize(m1).unwrap();
    let b = T::one() / T::from_usize(m2).unwrap();
    std::iter::repeat_n(a, m1).chain(std::iter::repeat_n(-b, m2)).collect()
}

/// Biased MMD `w^T K w`, clamped at zero.
pub fn mmd2_weighted<T: Real>(w: &[T], k: &KernelMatrix<T>) -> T {
    assert_eq!(w.len(), k.size(), "weight vector does not match kernel matrix");
    let mut acc = T::zero();
    for (i, wi) in w.iter().enumerate() {
        if wi.is_zero() {
            continue;
        }
        let row: T = k.row(i).iter().zip(w).map(|(kij, wj)| *kij * *wj).sum();
        acc = acc + *wi * row;
    }
    acc.max(T::zero())
}

/// Biased MMD of any two-group labelling of the pooled samples in
/// `O(m^2)` for a group of size `m`, from precomputed row sums.
struct SplitStatistic<'a, T> {
    k: &'a KernelMatrix<T>,
    total: T,
    row_sums: Vec<T>,
}

impl<'a, T: Real> SplitStatistic<'a, T> {
    fn new(k: &'a KernelMatrix<T>) -> Self {
        let row_sums: Vec<T> = (0..k.size()).map(|i| k.row(i).iter().copied().sum()).collect();
        let total = row_sums.iter().copied().sum();
        SplitStatistic { k, total, row_sums }
    }

    /// Statistic when `group` (of size `m_b`) forms one window and all other
    /// samples (`m_a` of them) the other.
    fn eval(&self, group: &[usize], m_a: usize) -> T {
        let m_b = group.len();
        let mut s_bb = T::zero();
        let mut r_b = T::zero();
        for &i in group {
            let row = self.k.row(i);
            r_b = r_b + self.row_sums[i];
            s_bb = s_bb + group.iter().map(|&j| row[j]).sum::<T>();
        }
        let s_ab = r_b - s_bb;
        let s_aa = self.total - r_b - s_ab;
        let ma = T::from_usize(m_a).unwrap();
        let mb = T::from_usize(m_b).unwrap();
        let two = T::from_f64(2.0).unwrap();
        (s_aa / (ma * ma) + s_bb / (mb * mb) - two * s_ab / (ma * mb)).max(T::zero())
    }
}

/// Observed statistic and Monte-Carlo p-value of one permutation test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PermutationOutcome<T> {
    pub mmd2: T,
    /// `(1 + #{permuted >= observed}) / (1 + M)`.
    pub p_value: f64,
    pub exceedances: usize,
    pub bandwidth: Option<T>,
}

/// Permutation MMD test of the first `m1` against the last `m2` samples.
///
/// The kernel (and its bandwidth) is fixed once from the pooled samples;
/// each of the `permutations` rounds draws a uniformly random relabelling.
pub fn permutation_test<T: Real, P: AsRef<[T]>, R: Rng + ?Sized>(
    samples: &[P],
    m1: usize,
    m2: usize,
    spec: &KernelSpec,
    permutations: usize,
    rng: &mut R,
) -> Result<PermutationOutcome<T>> {
    if m1 == 0 || m2 == 0 || m1 + m2 != samples.len() {
        return Err(Error::invalid(format!(
            "window sizes {m1} + {m2} do not split {} samples",
            samples.len()
        )));
    }
    if permutations == 0 {
        return Err(Error::invalid("at least one permutation is required"));
    }
    let k = kernel_matrix(samples, spec)?;
    let stat = SplitStatistic::new(&k);
    let n = m1 + m2;
    // Work with the smaller group; the statistic is symmetric.
    let (m_b, m_a) = if m2 <= m1 { (m2, m1) } else { (m1, m2) };
    let canonical: Vec<usize> = if m2 <= m1 { (m1..n).collect() } else { (0..m1).collect() };
    let observed = stat.eval(&canonical, m_a);

    let scale = (k.trace() / T::from_usize(n).unwrap())
        .abs()
        .max(T::min_positive_value());
    let tol = T::epsilon() * T::from_f64(1024.0).unwrap() * scale;
    let mut indices: Vec<usize> = (0..n).collect();
    let mut exceed = 0;
    for _ in 0..permutations {
        let (group, _) = indices.partial_shuffle(rng, m_b);
        if stat.eval(group, m_a) >= observed - tol {
            exceed += 1;
        }
    }
    Ok(PermutationOutcome {
        mmd2: observed,
        p_value: (1 + exceed) as f64 / (1 + permutations) as f64,
        exceedances: exceed,
        bandwidth: k.bandwidth(),
    })
}

/// One tested window pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub pair: WindowPair,
    pub mmd2: f64,
    pub p_value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub scheme: WindowScheme,
    pub kernel: KernelSpec,
    pub permutations: usize,
    pub seed: u64,
}

/// Per-pair results of a detector run over a stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub n: usize,
    pub theta: f64,
    pub min_p: f64,
    pub alarms: Vec<WindowPair>,
    pub results: Vec<TestResult>,
    pub config: DetectorConfig,
}

impl DetectionReport {
    pub fn alerted(&self) -> bool {
        !self.alarms.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// `pair_start,pair_end,mmd2,p` with one row per tested pair.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pair_start,pair_end,mmd2,p\n");
        for r in &self.results {
            let _ = writeln!(out, "{},{},{},{}", r.pair.w1.start, r.pair.w2.end, r.mmd2, r.p_value);
        }
        out
    }
}

/// Substream for one window pair; independent of stride and evaluation order.
fn pair_rng(seed: u64, pair: &WindowPair) -> crate::rng::StreamRng {
    derived_rng(
        seed,
        &[
            pair.w1.start as u64,
            pair.w1.end as u64,
            pair.w2.start as u64,
            pair.w2.end as u64,
        ],
    )
}

/// Test every window pair of `scheme` on `points` and alarm where `p < theta`.
pub fn run_detector<T: Real, P: AsRef<[T]>>(
    points: &[P],
    scheme: &WindowScheme,
    theta: f64,
    kernel: &KernelSpec,
    permutations: usize,
    seed: u64,
) -> Result<DetectionReport> {
    let n = points.len();
    let mut pairs = enumerate_pairs(scheme, n)?;
    pairs.sort_by_key(WindowPair::time_key);

    let mut results = Vec::with_capacity(pairs.len());
    let mut pooled: Vec<&[T]> = Vec::with_capacity(n);
    for pair in &pairs {
        pooled.clear();
        pooled.extend(pair.w1.indices().map(|i| points[i].as_ref()));
        pooled.extend(pair.w2.indices().map(|i| points[i].as_ref()));
        let mut rng = pair_rng(seed, pair);
        let out = permutation_test(&pooled, pair.w1.len(), pair.w2.len(), kernel, permutations, &mut rng)?;
        results.push(TestResult {
            pair: *pair,
            mmd2: out.mmd2.to_f64().unwrap(),
            p_value: out.p_value,
            bandwidth: out.bandwidth.and_then(|h| h.to_f64()),
        });
    }
    let min_p = results.iter().map(|r| r.p_value).fold(1.0, f64::min);
    let alarms = results.iter().filter(|r| r.p_value < theta).map(|r| r.pair).collect();
    Ok(DetectionReport {
        n,
        theta,
        min_p,
        alarms,
        results,
        config: DetectorConfig {
            scheme: scheme.clone(),
            kernel: *kernel,
            permutations,
            seed,
        },
    })
}

/// Run the detector on the union of several schemes.
pub fn run_combined<T: Real, P: AsRef<[T]>>(
    points: &[P],
    schemes: &[WindowScheme],
    theta: f64,
    kernel: &KernelSpec,
    permutations: usize,
    seed: u64,
) -> Result<DetectionReport> {
    run_detector(points, &union_scheme(schemes)?, theta, kernel, permutations, seed)
}
