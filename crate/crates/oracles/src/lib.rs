//! Slow, obviously-correct reference implementations used by the test suites.
//!
//! Nothing here shares code with the main crate: window rows are written
//! out from their definitions, null spaces come from exact Gauss-Jordan
//! elimination over the rationals, and the MMD is the textbook three-term
//! average.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn q_to_f64(x: &Q) -> f64 {
    let n: f64 = x.numer().to_string().parse().unwrap();
    let d: f64 = x.denom().to_string().parse().unwrap();
    n / d
}

/// Difference row `1/|W1| 1_{W1} - 1/|W2| 1_{W2}` for half-open windows.
pub fn difference_row(n: usize, w1: (usize, usize), w2: (usize, usize)) -> Vec<Q> {
    let mut row = vec![Q::zero(); n];
    let a = q(1, (w1.1 - w1.0) as i64);
    let b = q(1, (w2.1 - w2.0) as i64);
    for x in &mut row[w1.0..w1.1] {
        *x += &a;
    }
    for x in &mut row[w2.0..w2.1] {
        *x -= &b;
    }
    row
}

/// Reference and test window as half-open `(start, end)` ranges.
pub type Pair = ((usize, usize), (usize, usize));

/// Window pairs of the three base schemes at every admissible time.
pub fn sliding_pairs(l: usize, n: usize) -> Vec<Pair> {
    let mut out = Vec::new();
    let mut t = l;
    while t + l <= n {
        out.push(((t - l, t), (t, t + l)));
        t += 1;
    }
    out
}

pub fn fixed_pairs(a: usize, l: usize, n: usize) -> Vec<Pair> {
    let mut out = Vec::new();
    let mut t = a;
    while t + l <= n {
        out.push(((0, a), (t, t + l)));
        t += 1;
    }
    out
}

pub fn growing_pairs(a: usize, l: usize, n: usize) -> Vec<Pair> {
    let mut out = Vec::new();
    let mut t = a;
    while t + l <= n {
        out.push(((0, t), (t, t + l)));
        t += 1;
    }
    out
}

pub fn difference_rows(pairs: &[Pair], n: usize) -> Vec<Vec<Q>> {
    pairs.iter().map(|&(w1, w2)| difference_row(n, w1, w2)).collect()
}

/// Reduced row echelon form; returns the nonzero rows and pivot columns.
pub fn rref(rows: &[Vec<Q>], n: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for x in &mut m[r] {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<Q>], n: usize) -> usize {
    rref(rows, n).1.len()
}

/// Exact basis of `{x : rows . x = 0}`, one vector per free column.
pub fn nullspace(rows: &[Vec<Q>], n: usize) -> Vec<Vec<Q>> {
    let (r, pivots) = rref(rows, n);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); n];
            v[f] = Q::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `max_r |row_r . v|`, exactly.
pub fn max_abs_residual(rows: &[Vec<Q>], v: &[Q]) -> Q {
    rows.iter()
        .map(|r| dot(r, v).abs())
        .fold(Q::zero(), |m, x| if x > m { x } else { m })
}

/// Every binary vector of length `n` annihilated by `rows`, as bitmasks.
pub fn binary_kernel_members(rows: &[Vec<Q>], n: usize) -> Vec<u32> {
    assert!(n <= 20, "brute force over 2^{n} vectors");
    (0u32..1 << n)
        .filter(|mask| {
            let v: Vec<Q> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { Q::one() } else { Q::zero() })
                .collect();
            rows.iter().all(|r| dot(r, &v).is_zero())
        })
        .collect()
}

pub fn linear_kernel(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn rbf_kernel(h: f64) -> impl Fn(&[f64], &[f64]) -> f64 {
    move |x, y| {
        let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        (-d2 / (2.0 * h * h)).exp()
    }
}

/// Biased MMD^2: mean k(x, x') + mean k(y, y') - 2 mean k(x, y).
pub fn biased_mmd2<K: Fn(&[f64], &[f64]) -> f64>(xs: &[Vec<f64>], ys: &[Vec<f64>], k: K) -> f64 {
    let mean = |a: &[Vec<f64>], b: &[Vec<f64>]| {
        let mut s = 0.0;
        for u in a {
            for v in b {
                s += k(u, v);
            }
        }
        s / (a.len() * b.len()) as f64
    };
    mean(xs, xs) + mean(ys, ys) - 2.0 * mean(xs, ys)
}

/// Median of all nonzero pairwise distances, by full sort.
pub fn median_distance(points: &[Vec<f64>]) -> Option<f64> {
    let mut d = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d2: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 > 0.0 {
                d.push(d2.sqrt());
            }
        }
    }
    if d.is_empty() {
        return None;
    }
    d.sort_by(f64::total_cmp);
    let m = d.len() / 2;
    Some(if d.len() % 2 == 1 {
        d[m]
    } else {
        (d[m - 1] + d[m]) / 2.0
    })
}
