//! Gaussian specifications and everything derived from them: validation,
//! seeded sampling, orthant probabilities, threshold laws, linear maximal
//! correlation and tail-projection decay profiles.

mod correlation;
mod orthant;
mod sample;
mod tail;
mod threshold;

pub use correlation::{max_linear_correlation, CcaOutcome};
pub use orthant::{
    bivariate_threshold_cov, orthant_probability, OrthantEstimate, OrthantMethod, OrthantQuery,
    DEFAULT_SAMPLE_CAP,
};
pub use sample::{sample, shard_seed, SampleRun, Sampler};
pub use tail::{tail_projection_profile, TailProfile};
pub use threshold::{
    threshold_covariance, threshold_law, ThresholdOutcome, THRESHOLD_DIMENSION_LIMIT,
};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{cst, Scalar};
use crate::verdict::{Effort, Verdict, Witness};
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

/// Relative symmetry tolerance for covariance inputs.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;
/// A covariance is accepted as PSD when its smallest eigenvalue is at least
/// `-1e-10 * trace`.
pub const PSD_TOLERANCE: f64 = 1e-10;
/// Eigenvalues below `1e-12 * trace` are treated as exact zeros when
/// factorizing, and flag the spec as near-singular.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;
/// Off-diagonal covariances above this fail the Gaussian NA check.
pub const DEFAULT_GAUSSIAN_NA_TOLERANCE: f64 = 1e-12;

/// A finite Gaussian vector `(Z_1..Z_n)` together with thresholds `a_i`
/// defining the Bernoulli vector `X_i = 1{Z_i >= a_i}`.
///
/// Construction validates: dimensions agree, the covariance is symmetric
/// within tolerance (then symmetrized), and it is PSD within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec<F> {
    mean: Array1<F>,
    cov: Array2<F>,
    thresholds: Array1<F>,
    near_singular: bool,
    min_eigenvalue: f64,
}

/// On-disk form; `thresholds` defaults to all-zero when absent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecFile {
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<f64>>,
}

impl<F: Scalar> GaussianSpec<F> {
    pub fn new(mean: Array1<F>, cov: Array2<F>, thresholds: Array1<F>) -> Result<Self> {
        let n = mean.len();
        if n == 0 {
            return Err(Error::InconsistentDimension("dimension 0".into()));
        }
        if cov.nrows() != n || cov.ncols() != n {
            return Err(Error::InconsistentDimension(format!(
                "mean has {n} entries but cov is {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if thresholds.len() != n {
            return Err(Error::InconsistentDimension(format!(
                "mean has {n} entries but thresholds has {}",
                thresholds.len()
            )));
        }
        for v in mean.iter().chain(cov.iter()).chain(thresholds.iter()) {
            if !v.is_finite() {
                return Err(Error::OutOfRange("non-finite entry in spec".into()));
            }
        }
        let scale = cov
            .iter()
            .fold(F::zero(), |acc, &x| acc.max(x.abs()))
            .max(F::one());
        let (i, j, delta) = linalg::max_asymmetry(&cov);
        if delta > cst::<F>(SYMMETRY_TOLERANCE) * scale {
            return Err(Error::AsymmetricCov {
                i,
                j,
                delta: delta.to_f64().unwrap(),
            });
        }
        let cov = linalg::symmetrize(&cov);
        let trace = (0..n).fold(F::zero(), |acc, i| acc + cov[[i, i]]);
        let min_eigenvalue = linalg::min_eigenvalue_estimate(&cov).to_f64().unwrap();
        let trace64 = trace.to_f64().unwrap();
        if min_eigenvalue < -PSD_TOLERANCE * trace64.max(1e-300) {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        let near_singular = min_eigenvalue < EIGENVALUE_FLOOR * trace64;
        Ok(GaussianSpec {
            mean,
            cov,
            thresholds,
            near_singular,
            min_eigenvalue,
        })
    }

    pub fn zero_thresholds(mean: Array1<F>, cov: Array2<F>) -> Result<Self> {
        let n = mean.len();
        Self::new(mean, cov, Array1::zeros(n))
    }

    pub fn n(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &Array1<F> {
        &self.mean
    }

    pub fn cov(&self) -> &Array2<F> {
        &self.cov
    }

    pub fn thresholds(&self) -> &Array1<F> {
        &self.thresholds
    }

    /// Whether an eigenvalue sits below the floor `1e-12 * trace`.
    pub fn near_singular(&self) -> bool {
        self.near_singular
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// Standard deviations, the correlation matrix, and the standardized
    /// thresholds `h_i = (a_i - m_i)/sigma_i` in f64. Coordinates with zero
    /// variance get `h = +-infinity` (the threshold indicator is then
    /// deterministic).
    pub fn standardized(&self) -> (Vec<f64>, Array2<f64>, Vec<f64>) {
        let n = self.n();
        let trace: f64 = (0..n).map(|i| self.cov[[i, i]].to_f64().unwrap()).sum();
        let var_floor = EIGENVALUE_FLOOR * trace.max(1e-300);
        let sigmas: Vec<f64> = (0..n)
            .map(|i| {
                let v = self.cov[[i, i]].to_f64().unwrap();
                if v > var_floor {
                    v.sqrt()
                } else {
                    0.0
                }
            })
            .collect();
        let mut corr = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                if sigmas[i] > 0.0 && sigmas[j] > 0.0 {
                    let r = self.cov[[i, j]].to_f64().unwrap() / (sigmas[i] * sigmas[j]);
                    corr[[i, j]] = r.clamp(-1.0, 1.0);
                } else {
                    corr[[i, j]] = if i == j { 1.0 } else { 0.0 };
                }
            }
        }
        let h: Vec<f64> = (0..n)
            .map(|i| {
                let gap = self.thresholds[i].to_f64().unwrap() - self.mean[i].to_f64().unwrap();
                if sigmas[i] > 0.0 {
                    gap / sigmas[i]
                } else if gap <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        (sigmas, corr, h)
    }

    pub fn to_f64(&self) -> GaussianSpec<f64> {
        GaussianSpec {
            mean: self.mean.mapv(|x| x.to_f64().unwrap()),
            cov: self.cov.mapv(|x| x.to_f64().unwrap()),
            thresholds: self.thresholds.mapv(|x| x.to_f64().unwrap()),
            near_singular: self.near_singular,
            min_eigenvalue: self.min_eigenvalue,
        }
    }

    pub fn to_file(&self) -> SpecFile {
        let n = self.n();
        SpecFile {
            mean: self.mean.iter().map(|x| x.to_f64().unwrap()).collect(),
            cov: (0..n)
                .map(|i| (0..n).map(|j| self.cov[[i, j]].to_f64().unwrap()).collect())
                .collect(),
            thresholds: Some(
                self.thresholds
                    .iter()
                    .map(|x| x.to_f64().unwrap())
                    .collect(),
            ),
        }
    }

    pub fn from_file(file: &SpecFile) -> Result<Self> {
        let n = file.mean.len();
        let mean = Array1::from_iter(file.mean.iter().map(|&x| cst::<F>(x)));
        if file.cov.len() != n || file.cov.iter().any(|row| row.len() != n) {
            return Err(Error::InconsistentDimension(format!(
                "cov must be {n}x{n} to match mean"
            )));
        }
        let mut cov = Array2::<F>::zeros((n, n));
        for (i, row) in file.cov.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                cov[[i, j]] = cst(x);
            }
        }
        let thresholds = match &file.thresholds {
            Some(t) => {
                if t.len() != n {
                    return Err(Error::InconsistentDimension(format!(
                        "thresholds must have {n} entries"
                    )));
                }
                Array1::from_iter(t.iter().map(|&x| cst::<F>(x)))
            }
            None => Array1::zeros(n),
        };
        Self::new(mean, cov, thresholds)
    }
}

/// Re-validate an already constructed spec; the constructor is the primary
/// validation path, this exists for specs assembled field by field.
pub fn validate_spec<F: Scalar>(spec: GaussianSpec<F>) -> Result<GaussianSpec<F>> {
    GaussianSpec::new(spec.mean, spec.cov, spec.thresholds)
}

/// A Gaussian vector is NA exactly when it is negatively correlated: holds
/// iff every off-diagonal covariance is at most `tolerance`.
pub fn gaussian_na_check<F: Scalar>(spec: &GaussianSpec<F>, tolerance: f64) -> Verdict {
    let n = spec.n();
    let mut effort = Effort::default();
    let mut max_positive = f64::NEG_INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            effort.pairs_checked += 1;
            let value = spec.cov[[i, j]].to_f64().unwrap();
            if value > tolerance {
                return Verdict::fails(Witness::PositiveCovariance { i, j, value }, effort);
            }
            max_positive = max_positive.max(value);
        }
    }
    let verdict = Verdict::holds(effort);
    if max_positive > 0.0 {
        verdict.with_note(format!(
            "largest off-diagonal covariance {max_positive:.3e} is positive but within tolerance"
        ))
    } else {
        verdict
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verdict::Status;
    use ndarray::arr2;

    #[test]
    fn identity_cov_is_valid() {
        let spec =
            GaussianSpec::<f64>::zero_thresholds(Array1::zeros(3), Array2::eye(3)).unwrap();
        assert!(!spec.near_singular());
        assert!(spec.min_eigenvalue() > 0.99);
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        // Eigenvalues 1.1 and -0.1.
        let cov = arr2(&[[0.5, 0.6], [0.6, 0.5]]);
        let err = GaussianSpec::<f64>::zero_thresholds(Array1::zeros(2), cov).unwrap_err();
        assert!(matches!(err, Error::NotPsd { .. }));
    }

    #[test]
    fn asymmetric_cov_rejected() {
        let cov = arr2(&[[1.0, 0.2], [0.1, 1.0]]);
        let err = GaussianSpec::<f64>::zero_thresholds(Array1::zeros(2), cov).unwrap_err();
        assert!(matches!(err, Error::AsymmetricCov { .. }));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let err =
            GaussianSpec::<f64>::zero_thresholds(Array1::zeros(3), Array2::eye(2)).unwrap_err();
        assert!(matches!(err, Error::InconsistentDimension(_)));
    }

    #[test]
    fn na_check_on_identity_and_positive_entry() {
        let spec =
            GaussianSpec::<f64>::zero_thresholds(Array1::zeros(3), Array2::eye(3)).unwrap();
        assert!(gaussian_na_check(&spec, DEFAULT_GAUSSIAN_NA_TOLERANCE).is_holds());

        let mut cov = Array2::eye(3);
        cov[[0, 2]] = 0.2;
        cov[[2, 0]] = 0.2;
        let spec = GaussianSpec::<f64>::zero_thresholds(Array1::zeros(3), cov).unwrap();
        let verdict = gaussian_na_check(&spec, DEFAULT_GAUSSIAN_NA_TOLERANCE);
        assert_eq!(verdict.status, Status::Fails);
        assert!(matches!(
            verdict.witness,
            Some(Witness::PositiveCovariance { i: 0, j: 2, .. })
        ));
    }

    #[test]
    fn standardization_handles_degenerate_coordinates() {
        let mut cov = Array2::<f64>::zeros((2, 2));
        cov[[0, 0]] = 4.0;
        let mean = Array1::from(vec![1.0, 2.0]);
        let thresholds = Array1::from(vec![3.0, 0.0]);
        let spec = GaussianSpec::new(mean, cov, thresholds).unwrap();
        let (sigmas, corr, h) = spec.standardized();
        assert_eq!(sigmas[1], 0.0);
        assert_eq!(corr[[1, 1]], 1.0);
        assert!((h[0] - 1.0).abs() < 1e-15);
        // Z_2 is the constant 2 >= 0, so X_2 = 1 deterministically.
        assert_eq!(h[1], f64::NEG_INFINITY);
    }

    #[test]
    fn spec_file_round_trip_with_default_thresholds() {
        let file = SpecFile {
            mean: vec![0.0, 0.0],
            cov: vec![vec![1.0, -0.3], vec![-0.3, 1.0]],
            thresholds: None,
        };
        let spec = GaussianSpec::<f64>::from_file(&file).unwrap();
        assert_eq!(spec.thresholds().len(), 2);
        assert_eq!(spec.thresholds()[0], 0.0);
        let back = spec.to_file();
        assert_eq!(back.mean, file.mean);
    }
}
