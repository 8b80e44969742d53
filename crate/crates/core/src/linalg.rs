//! Small dense helpers shared by the geometric pipelines.

use nalgebra::{DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{GeomError, Result};
use crate::taylor::{Scalar, Taylor};

/// Inverse of a square matrix of Taylor polynomials by Gauss-Jordan with
/// partial pivoting on the base-point values.
pub fn taylor_inverse(a: &[Vec<Taylor>]) -> Result<Vec<Vec<Taylor>>> {
    let n = a.len();
    let mut work: Vec<Vec<Taylor>> = a.to_vec();
    let zero = a[0][0].lift(0.0);
    let one = a[0][0].lift(1.0);
    let mut inv: Vec<Vec<Taylor>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { one.clone() } else { zero.clone() })
                .collect()
        })
        .collect();
    let scale = a
        .iter()
        .flat_map(|r| r.iter().map(|t| t.value().abs()))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| {
                work[r][col]
                    .value()
                    .abs()
                    .total_cmp(&work[s][col].value().abs())
            })
            .expect("non-empty pivot range");
        if work[pivot][col].value().abs() <= 1e-14 * scale {
            return Err(GeomError::RankDeficient {
                n,
                sigma_min: work[pivot][col].value().abs(),
            });
        }
        work.swap(col, pivot);
        inv.swap(col, pivot);
        let r = work[col][col].recip();
        for j in 0..n {
            work[col][j] = &work[col][j] * &r;
            inv[col][j] = &inv[col][j] * &r;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = work[row][col].clone();
            if factor.coeffs().iter().all(|c| *c == 0.0) {
                continue;
            }
            for j in 0..n {
                work[row][j] = &work[row][j] - &(&factor * &work[col][j]);
                inv[row][j] = &inv[row][j] - &(&factor * &inv[col][j]);
            }
        }
    }
    Ok(inv)
}

/// Base-point values of a Taylor matrix.
pub fn values(a: &[Vec<Taylor>]) -> DMatrix<f64> {
    DMatrix::from_fn(a.len(), a[0].len(), |i, j| a[i][j].value())
}

pub fn values_vec(a: &[Taylor]) -> DVector<f64> {
    DVector::from_iterator(a.len(), a.iter().map(|t| t.value()))
}

/// Modified Gram-Schmidt in index order under the inner product `ip`.
/// Vectors whose residual norm falls below `tol` times their original norm
/// are reported as a rank failure.
pub fn gram_schmidt(
    vectors: &[DVector<f64>],
    ip: impl Fn(&DVector<f64>, &DVector<f64>) -> f64,
    tol: f64,
) -> Result<Vec<DVector<f64>>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        // two passes keep the result orthonormal to machine precision
        for _ in 0..2 {
            for e in &out {
                let c = ip(&w, e);
                w.axpy(-c, e, 1.0);
            }
        }
        let norm0 = ip(v, v).abs().sqrt();
        let norm = ip(&w, &w).sqrt();
        if !(norm > tol * norm0.max(f64::MIN_POSITIVE)) {
            return Err(GeomError::RankDeficient {
                n: vectors.len(),
                sigma_min: norm,
            });
        }
        out.push(w / norm);
    }
    Ok(out)
}

/// Orthonormal completion of an orthonormal family in `R^m`: repeatedly
/// adds the standard basis vector with the largest residual (lowest index on
/// ties) until the basis is complete.
pub fn complete_basis(frame: &[DVector<f64>], m: usize) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = frame.to_vec();
    let mut added = Vec::new();
    while basis.len() < m {
        let mut best: Option<(f64, DVector<f64>)> = None;
        for k in 0..m {
            let mut w = DVector::zeros(m);
            w[k] = 1.0;
            for _ in 0..2 {
                for e in &basis {
                    let c = w.dot(e);
                    w.axpy(-c, e, 1.0);
                }
            }
            let norm = w.norm();
            if best.as_ref().map_or(true, |(b, _)| norm > *b + 1e-12) {
                best = Some((norm, w));
            }
        }
        let (norm, w) = best.expect("m > 0");
        let v = w / norm;
        basis.push(v.clone());
        added.push(v);
    }
    added
}

/// Inverse of a symmetric positive-definite matrix.
pub fn spd_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    a.clone().cholesky().map(|c| c.inverse()).ok_or_else(|| {
        let eig = symmetric_eigen(a);
        GeomError::RankDeficient {
            n: a.nrows(),
            sigma_min: eig.eigenvalues.min(),
        }
    })
}

/// `g`-orthonormal basis of coordinate space (columns are coordinate vectors).
pub fn orthonormal_coordinate_frame(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    let basis: Vec<DVector<f64>> = (0..n)
        .map(|i| {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            e
        })
        .collect();
    let on = gram_schmidt(&basis, |a, b| (a.transpose() * g * b)[(0, 0)], 1e-12)?;
    Ok(DMatrix::from_columns(&on))
}

/// Eigendecomposition of a symmetric matrix. nalgebra's QR iteration can
/// return eigenvectors that mix eigenspaces when the off-diagonal part is at
/// rounding level (e.g. a shape operator with a triple principal curvature),
/// so the decomposition is delegated to faer.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> SymmetricEigen<f64, Dyn> {
    let n = a.nrows();
    let m = faer::Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let e = m.selfadjoint_eigendecomposition(faer::Side::Lower);
    let (u, s) = (e.u(), e.s().column_vector());
    SymmetricEigen {
        eigenvectors: DMatrix::from_fn(n, n, |i, j| u.read(i, j)),
        eigenvalues: DVector::from_fn(n, |i, _| s.read(i)),
    }
}

/// Max absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, &b| a.max(b.abs()))
}

/// Bilinear form `x^T a y`.
pub fn form(a: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    (x.transpose() * a * y)[(0, 0)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_eigen_separates_a_rounding_level_cluster() {
        // shape operator with a triple eigenvalue and rounding-level coupling
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[
                23.01188186381287, -6.774738177454935e-15, -1.3478889958897234e-15, -1.6847503579248962e-15,
                -6.774738177454935e-15, -1.0015074641420378, 1.9755277647996653e-16, 3.5377070531687423e-16,
                -1.3478889958897234e-15, 1.9755277647996653e-16, -1.001507464142038, -6.685127216633989e-17,
                -1.6847503579248962e-15, 3.5377070531687423e-16, -6.685127216633989e-17, -1.001507464142038,
            ],
        ) * -0.6899732477111353;
        let e = symmetric_eigen(&a);
        let r = &a * &e.eigenvectors - &e.eigenvectors * DMatrix::from_diagonal(&e.eigenvalues);
        assert!(r.amax() < 1e-12, "{}", r.amax());
        let o = e.eigenvectors.transpose() * &e.eigenvectors - DMatrix::identity(4, 4);
        assert!(o.amax() < 1e-14);
    }

    #[test]
    fn taylor_inverse_matches_value_inverse_and_derivatives() {
        let v = Taylor::variables(&[0.4, -0.2], 3);
        let (x, y) = (v[0].clone(), v[1].clone());
        let a = vec![
            vec![x.clone() * x.clone() + 2.0, x.clone() * y.clone()],
            vec![x.clone() * y.clone(), y.exp() + 1.0],
        ];
        let inv = taylor_inverse(&a).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = a[0][0].lift(0.0);
                for k in 0..2 {
                    acc = acc + &a[i][k] * &inv[k][j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                assert!(acc.add_scalar(-target).coeffs().iter().all(|c| c.abs() < 1e-13));
            }
        }
    }

    #[test]
    fn completion_spans_the_complement() {
        let t = DVector::from_vec(vec![1.0, 1.0, 0.0]) / 2f64.sqrt();
        let extra = complete_basis(&[t.clone()], 3);
        assert_eq!(extra.len(), 2);
        for e in &extra {
            assert!(e.dot(&t).abs() < 1e-14);
            assert!((e.norm() - 1.0).abs() < 1e-14);
        }
        assert!(extra[0].dot(&extra[1]).abs() < 1e-14);
    }

    #[test]
    fn gram_schmidt_flags_dependent_vectors() {
        let a = DVector::from_vec(vec![1.0, 0.0]);
        let b = DVector::from_vec(vec![2.0, 0.0]);
        assert!(gram_schmidt(&[a, b], |u, v| u.dot(v), 1e-10).is_err());
    }
}
