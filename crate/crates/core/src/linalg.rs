//! Dense null-space computation by singular value decomposition.

use nalgebra::DMatrix;

/// Relative rank tolerance: singular values at or below
/// `RANK_TOLERANCE * sigma_max` count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Orthonormal basis of a numerical null space.
#[derive(Clone, Debug)]
pub struct NullSpace {
    /// Basis vectors, ordered from the smallest singular value upwards.
    pub basis: Vec<Vec<f64>>,
    /// All `n` singular values in decreasing order (zero-padded when the
    /// matrix has fewer rows than columns).
    pub singular_values: Vec<f64>,
    /// Absolute threshold that was applied.
    pub threshold: f64,
}

impl NullSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Null space of the `rows.len() x n` matrix given by `rows`.
///
/// The matrix is padded with zero rows to at least `n` rows so that the SVD
/// yields a full set of right singular vectors.
pub fn svd_nullspace(rows: &[Vec<f64>], n: usize, rel_tol: f64) -> NullSpace {
    assert!(n > 0, "null space of a matrix without columns");
    let m = rows.len().max(n);
    let mut mat = DMatrix::<f64>::zeros(m, n);
    for (r, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), n, "row {r} has the wrong length");
        for (c, &x) in row.iter().enumerate() {
            mat[(r, c)] = x;
        }
    }
    let svd = mat.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let sigma = svd.singular_values;

    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]).then(i.cmp(&j)));
    let sigma_max = order.first().map(|&i| sigma[i]).unwrap_or(0.0);
    let threshold = rel_tol * sigma_max;

    let basis = order
        .iter()
        .rev()
        .take_while(|&&i| sigma[i] <= threshold)
        .map(|&i| v_t.row(i).iter().copied().collect())
        .collect();

    NullSpace {
        basis,
        singular_values: order.iter().map(|&i| sigma[i]).collect(),
        threshold,
    }
}

/// Distance from `x` to the span of the orthonormal vectors in `basis`.
pub fn distance_to_span(x: &[f64], basis: &[Vec<f64>]) -> f64 {
    let mut r = x.to_vec();
    for b in basis {
        let c: f64 = b.iter().zip(&r).map(|(p, q)| p * q).sum();
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri -= c * bi;
        }
    }
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Gram-Schmidt orthonormalization, dropping vectors that are dependent up
/// to `tol`.
pub fn orthonormalize(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        // Two passes for numerical stability.
        for _ in 0..2 {
            for b in &out {
                let c: f64 = b.iter().zip(&r).map(|(p, q)| p * q).sum();
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= c * bi;
                }
            }
        }
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > tol {
            out.push(r.into_iter().map(|x| x / norm).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_matrix_has_two_dimensional_kernel() {
        let rows = vec![vec![1.0, 1.0, 1.0]];
        let ns = svd_nullspace(&rows, 3, RANK_TOLERANCE);
        assert_eq!(ns.dimension(), 2);
        for b in &ns.basis {
            let s: f64 = b.iter().sum();
            assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn full_rank_has_trivial_kernel() {
        let rows = vec![vec![2.0, 0.0], vec![1.0, 3.0]];
        assert_eq!(svd_nullspace(&rows, 2, RANK_TOLERANCE).dimension(), 0);
    }

    #[test]
    fn zero_matrix_is_all_kernel() {
        let rows = vec![vec![0.0; 4]];
        assert_eq!(svd_nullspace(&rows, 4, RANK_TOLERANCE).dimension(), 4);
    }

    #[test]
    fn span_distance() {
        let basis = orthonormalize(&[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]], 1e-12);
        assert_eq!(basis.len(), 1);
        assert!(distance_to_span(&[3.0, 3.0, 0.0], &basis) < 1e-12);
        assert!((distance_to_span(&[0.0, 0.0, 2.0], &basis) - 2.0).abs() < 1e-12);
    }
}
