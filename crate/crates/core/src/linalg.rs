//! Small dense symmetric linear algebra over the generic scalar.
//!
//! The matrices this crate touches are modest (a few hundred rows at most
//! for eigenwork), so a cyclic Jacobi eigensolver is used instead of an
//! external LAPACK backend. Validation of very large covariance matrices
//! uses a clamped LDL^T pass instead of a full eigendecomposition.

use crate::error::{Error, Result};
use crate::scalar::{cst, Scalar};
use ndarray::Array2;

/// Largest dimension the Jacobi eigensolver is used for.
pub const JACOBI_LIMIT: usize = 300;

/// Index pair and magnitude of the worst symmetry violation.
pub fn max_asymmetry<F: Scalar>(a: &Array2<F>) -> (usize, usize, F) {
    let n = a.nrows();
    let mut worst = (0, 0, F::zero());
    for i in 0..n {
        for j in i + 1..n {
            let d = (a[[i, j]] - a[[j, i]]).abs();
            if d > worst.2 {
                worst = (i, j, d);
            }
        }
    }
    worst
}

pub fn symmetrize<F: Scalar>(a: &Array2<F>) -> Array2<F> {
    let n = a.nrows();
    let half = cst::<F>(0.5);
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            out[[i, j]] = (a[[i, j]] + a[[j, i]]) * half;
        }
    }
    out
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues ascending and the matching eigenvectors as columns.
pub fn jacobi_eigh<F: Scalar>(a: &Array2<F>) -> (Vec<F>, Array2<F>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "square matrix required");
    let mut m = symmetrize(a);
    let mut v = Array2::<F>::eye(n);
    if n > 1 {
        let scale = m.iter().fold(F::zero(), |acc, &x| acc + x * x).sqrt();
        let stop = F::epsilon() * F::epsilon() * scale * scale + F::min_positive_value();
        for _sweep in 0..100 {
            let mut off = F::zero();
            for i in 0..n {
                for j in i + 1..n {
                    off += m[[i, j]] * m[[i, j]];
                }
            }
            if off <= stop {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = m[[p, q]];
                    if apq.abs() <= F::min_positive_value() {
                        continue;
                    }
                    let theta = (m[[q, q]] - m[[p, p]]) / (cst::<F>(2.0) * apq);
                    let t = {
                        let sign = if theta >= F::zero() {
                            F::one()
                        } else {
                            -F::one()
                        };
                        sign / (theta.abs() + (theta * theta + F::one()).sqrt())
                    };
                    let c = F::one() / (t * t + F::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let mkp = m[[k, p]];
                        let mkq = m[[k, q]];
                        m[[k, p]] = c * mkp - s * mkq;
                        m[[k, q]] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let mpk = m[[p, k]];
                        let mqk = m[[q, k]];
                        m[[p, k]] = c * mpk - s * mqk;
                        m[[q, k]] = s * mpk + c * mqk;
                    }
                    for k in 0..n {
                        let vkp = v[[k, p]];
                        let vkq = v[[k, q]];
                        v[[k, p]] = c * vkp - s * vkq;
                        v[[k, q]] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<F> = (0..n).map(|i| m[[i, i]]).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let values: Vec<F> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = Array2::<F>::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[[k, dst]] = v[[k, src]];
        }
    }
    (values, vectors)
}

/// Smallest eigenvalue estimate used by PSD validation. Exact (Jacobi) up to
/// `JACOBI_LIMIT`, otherwise the smallest clamped LDL^T pivot, which certifies
/// the same tolerance window for the diagonally dominated covariance matrices
/// this crate builds.
pub fn min_eigenvalue_estimate<F: Scalar>(a: &Array2<F>) -> F {
    if a.nrows() <= JACOBI_LIMIT {
        jacobi_eigh(a).0[0]
    } else {
        min_ldlt_pivot(a)
    }
}

fn min_ldlt_pivot<F: Scalar>(a: &Array2<F>) -> F {
    let n = a.nrows();
    let mut m = symmetrize(a);
    let trace = (0..n).fold(F::zero(), |acc, i| acc + a[[i, i]]);
    let clamp = cst::<F>(1e-14) * trace.abs();
    let mut min_pivot = F::infinity();
    for k in 0..n {
        let d = m[[k, k]];
        min_pivot = min_pivot.min(d);
        if d <= clamp {
            // Treat as a zero pivot: skip elimination on this column.
            continue;
        }
        for i in k + 1..n {
            let f = m[[i, k]] / d;
            for j in k + 1..=i {
                let v = m[[i, j]] - f * m[[k, j]];
                m[[i, j]] = v;
                m[[j, i]] = v;
            }
        }
    }
    min_pivot
}

/// Symmetric square root `V diag(sqrt(max(lambda,0))) V^T`.
pub fn sym_sqrt<F: Scalar>(a: &Array2<F>) -> Array2<F> {
    let n = a.nrows();
    let (values, vectors) = jacobi_eigh(a);
    let roots: Vec<F> = values.iter().map(|&l| l.max(F::zero()).sqrt()).collect();
    let mut out = Array2::<F>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let mut acc = F::zero();
            for k in 0..n {
                acc += vectors[[i, k]] * roots[k] * vectors[[j, k]];
            }
            out[[i, j]] = acc;
        }
    }
    out
}

/// Rank-revealing square-root factor: an `n x r` matrix `L` with
/// `L L^T ~= a`, dropping eigenvalues at or below `floor`. Also reports
/// whether any eigenvalue was dropped and the count kept.
pub fn sqrt_factor<F: Scalar>(a: &Array2<F>, floor: F) -> (Array2<F>, usize, bool) {
    let n = a.nrows();
    let (values, vectors) = jacobi_eigh(a);
    let kept: Vec<usize> = (0..n).filter(|&k| values[k] > floor).collect();
    let floored = kept.len() < n;
    let mut out = Array2::<F>::zeros((n, kept.len()));
    for (col, &k) in kept.iter().enumerate() {
        let root = values[k].sqrt();
        for i in 0..n {
            out[[i, col]] = vectors[[i, k]] * root;
        }
    }
    (out, kept.len(), floored)
}

/// Inverse symmetric square root, dropping eigenvalues at or below
/// `drop_tol`. Returns the matrix and the number of dropped directions.
pub fn inv_sqrt_dropping<F: Scalar>(a: &Array2<F>, drop_tol: F) -> Result<(Array2<F>, usize)> {
    let n = a.nrows();
    let (values, vectors) = jacobi_eigh(a);
    if values[0] < -drop_tol {
        return Err(Error::NotPsd {
            min_eigenvalue: values[0].to_f64().unwrap(),
        });
    }
    let kept: Vec<usize> = (0..n).filter(|&k| values[k] > drop_tol).collect();
    if kept.is_empty() {
        return Err(Error::SingularBlock("all directions degenerate".into()));
    }
    let mut out = Array2::<F>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let mut acc = F::zero();
            for &k in &kept {
                acc += vectors[[i, k]] * vectors[[j, k]] / values[k].sqrt();
            }
            out[[i, j]] = acc;
        }
    }
    Ok((out, n - kept.len()))
}

/// Largest singular value. The 1x1 case short-circuits to the absolute value
/// so that scalar inputs survive exactly.
pub fn top_singular_value<F: Scalar>(m: &Array2<F>) -> F {
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[[0, 0]].abs();
    }
    let (r, c) = (m.nrows(), m.ncols());
    // Work with the smaller Gram matrix.
    let k = r.min(c);
    let mut gram = Array2::<F>::zeros((k, k));
    for i in 0..k {
        for j in 0..k {
            let mut acc = F::zero();
            if c <= r {
                for t in 0..r {
                    acc += m[[t, i]] * m[[t, j]];
                }
            } else {
                for t in 0..c {
                    acc += m[[i, t]] * m[[j, t]];
                }
            }
            gram[[i, j]] = acc;
        }
    }
    let (values, _) = jacobi_eigh(&gram);
    values[k - 1].max(F::zero()).sqrt()
}

/// Orthonormal basis of the column span via modified Gram-Schmidt; columns
/// with residual norm at or below `tol` are dropped.
pub fn orthonormal_columns<F: Scalar>(m: &Array2<F>, tol: F) -> Array2<F> {
    let rows = m.nrows();
    let mut basis: Vec<Vec<F>> = Vec::new();
    for col in 0..m.ncols() {
        let mut v: Vec<F> = (0..rows).map(|r| m[[r, col]]).collect();
        // Two rounds of re-orthogonalization for stability.
        for _ in 0..2 {
            for b in &basis {
                let dot = v
                    .iter()
                    .zip(b.iter())
                    .fold(F::zero(), |acc, (&x, &y)| acc + x * y);
                for (x, &y) in v.iter_mut().zip(b.iter()) {
                    *x -= dot * y;
                }
            }
        }
        let norm = v.iter().fold(F::zero(), |acc, &x| acc + x * x).sqrt();
        if norm > tol {
            for x in v.iter_mut() {
                *x /= norm;
            }
            basis.push(v);
        }
    }
    let mut out = Array2::<F>::zeros((rows, basis.len()));
    for (c, b) in basis.iter().enumerate() {
        for (r, &x) in b.iter().enumerate() {
            out[[r, c]] = x;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_symmetric(n: usize, rng: &mut StdRng) -> Array2<f64> {
        let mut a = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-1.0..1.0);
                a[[i, j]] = v;
                a[[j, i]] = v;
            }
        }
        a
    }

    #[test]
    fn jacobi_reconstructs_matrix() {
        let mut rng = StdRng::seed_from_u64(7);
        for n in [1usize, 2, 3, 6, 12] {
            let a = random_symmetric(n, &mut rng);
            let (values, vectors) = jacobi_eigh(&a);
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0.0;
                    for k in 0..n {
                        acc += vectors[[i, k]] * values[k] * vectors[[j, k]];
                    }
                    assert!((acc - a[[i, j]]).abs() < 1e-10, "n={n} ({i},{j})");
                }
            }
            // Orthonormal columns.
            for p in 0..n {
                for q in 0..n {
                    let dot: f64 = (0..n).map(|k| vectors[[k, p]] * vectors[[k, q]]).sum();
                    let expected = if p == q { 1.0 } else { 0.0 };
                    assert!((dot - expected).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn jacobi_known_eigenvalues() {
        let a: Array2<f64> = ndarray::arr2(&[[2.0, 1.0], [1.0, 2.0]]);
        let (values, _) = jacobi_eigh(&a);
        assert!((values[0] - 1.0).abs() < 1e-12);
        assert!((values[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_factor_reproduces_psd_matrix() {
        let mut rng = StdRng::seed_from_u64(3);
        let b = random_symmetric(5, &mut rng);
        // a = b b^T is PSD.
        let mut a = Array2::<f64>::zeros((5, 5));
        for i in 0..5 {
            for j in 0..5 {
                a[[i, j]] = (0..5).map(|k| b[[i, k]] * b[[j, k]]).sum();
            }
        }
        let (l, rank, floored) = sqrt_factor(&a, 1e-12);
        assert_eq!(rank, 5);
        assert!(!floored);
        for i in 0..5 {
            for j in 0..5 {
                let mut acc = 0.0;
                for k in 0..rank {
                    acc += l[[i, k]] * l[[j, k]];
                }
                assert!((acc - a[[i, j]]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn min_pivot_matches_eigen_for_definite_matrices() {
        let a = ndarray::arr2(&[[4.0, -1.0, 0.0], [-1.0, 3.0, -0.5], [0.0, -0.5, 2.0]]);
        let piv = min_ldlt_pivot(&a);
        assert!(piv > 0.0);
        let indefinite = ndarray::arr2(&[[1.0, 2.0], [2.0, 1.0]]);
        assert!(min_ldlt_pivot(&indefinite) < 0.0);
    }

    #[test]
    fn top_singular_value_cases() {
        let m: Array2<f64> = ndarray::arr2(&[[-0.7]]);
        assert_eq!(top_singular_value(&m), 0.7);
        let m: Array2<f64> = ndarray::arr2(&[[3.0, 0.0], [0.0, -4.0]]);
        assert!((top_singular_value(&m) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn orthonormalization_drops_dependent_columns() {
        let m = ndarray::arr2(&[[1.0, 2.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]);
        let q = orthonormal_columns(&m, 1e-10);
        assert_eq!(q.ncols(), 2);
    }
}
