//! Orthant probabilities `P(X = pattern)` for thresholded Gaussian vectors,
//! by closed form in low dimension and antithetic Monte Carlo otherwise.

use crate::error::{Error, Result};
use crate::gaussian::{shard_seed, GaussianSpec, Sampler};
use crate::scalar::{cst, Scalar};
use crate::special::{bvn_upper, normal_sf};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Monte Carlo stops with `PrecisionUnreachable` after this many draws.
pub const DEFAULT_SAMPLE_CAP: u64 = 1 << 28;

/// Number of antithetic pairs per deterministic batch.
const BATCH_PAIRS: u64 = 1 << 14;

/// Standardized thresholds at or below this magnitude count as zero for the
/// trivariate closed form.
const ZERO_THRESHOLD_TOLERANCE: f64 = 1e-9;

/// The event `{X = pattern}`: bit `i` set means `Z_i >= a_i`.
#[derive(Debug, Clone)]
pub struct OrthantQuery<F> {
    pub spec: GaussianSpec<F>,
    pub pattern: Vec<bool>,
}

impl<F: Scalar> OrthantQuery<F> {
    pub fn new(spec: GaussianSpec<F>, pattern: Vec<bool>) -> Result<Self> {
        if pattern.len() != spec.n() {
            return Err(Error::WrongDimension {
                expected: spec.n(),
                got: pattern.len(),
            });
        }
        Ok(OrthantQuery { spec, pattern })
    }

    pub fn parse_pattern(spec: GaussianSpec<F>, pattern: &str) -> Result<Self> {
        let bits: Option<Vec<bool>> = pattern
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        let bits = bits.ok_or_else(|| {
            Error::OutOfRange(format!("pattern {pattern:?} is not a 0/1 string"))
        })?;
        Self::new(spec, bits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrthantMethod {
    ClosedForm,
    MonteCarlo,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrthantEstimate<F> {
    pub value: F,
    /// One-sigma standard error; zero for closed forms.
    pub stderr: f64,
    pub samples: u64,
    pub method: OrthantMethod,
}

/// Covariance of the pair `(1{Y1>=0}, 1{Y2>=0})` for standardized jointly
/// Gaussian `(Y1, Y2)` with correlation `rho`: `arcsin(rho)/(2 pi)`.
pub fn bivariate_threshold_cov<F: Scalar>(rho: F) -> Result<F> {
    let slack = cst::<F>(1e-12);
    if rho.abs() > F::one() + slack {
        return Err(Error::OutOfRange(format!(
            "correlation {rho} outside [-1, 1]"
        )));
    }
    let rho = rho.min(F::one()).max(-F::one());
    Ok(rho.asin() / (cst::<F>(2.0) * F::PI()))
}

/// Orthant probability for the query.
///
/// `ClosedForm` supports `n <= 2` with arbitrary thresholds and `n = 3` with
/// (standardized) zero thresholds; everything else needs `MonteCarlo`, which
/// returns an estimate with a one-sigma standard error at most `precision`.
pub fn orthant_probability<F: Scalar>(
    query: &OrthantQuery<F>,
    method: OrthantMethod,
    precision: f64,
    seed: u64,
) -> Result<OrthantEstimate<F>> {
    match method {
        OrthantMethod::ClosedForm => {
            let value = closed_form(query)?;
            Ok(OrthantEstimate {
                value: cst(value),
                stderr: 0.0,
                samples: 0,
                method,
            })
        }
        OrthantMethod::MonteCarlo => monte_carlo(query, precision, seed),
    }
}

fn closed_form<F: Scalar>(query: &OrthantQuery<F>) -> Result<f64> {
    let n = query.spec.n();
    let (_, corr, h) = query.spec.standardized();
    let s = &query.pattern;
    match n {
        1 => Ok(if s[0] { normal_sf(h[0]) } else { 1.0 - normal_sf(h[0]) }),
        2 => {
            let p11 = bvn_upper(h[0], h[1], corr[[0, 1]]);
            let p1 = normal_sf(h[0]);
            let p2 = normal_sf(h[1]);
            let value = match (s[0], s[1]) {
                (true, true) => p11,
                (true, false) => p1 - p11,
                (false, true) => p2 - p11,
                (false, false) => 1.0 - p1 - p2 + p11,
            };
            Ok(value.clamp(0.0, 1.0))
        }
        3 => {
            if h.iter().any(|&x| x.abs() > ZERO_THRESHOLD_TOLERANCE) {
                return Err(Error::ClosedFormUnavailable(
                    "n = 3 closed form needs zero thresholds after standardization".into(),
                ));
            }
            // Flip signs so the query becomes the all-ones orthant.
            let sign = |b: bool| if b { 1.0 } else { -1.0 };
            let mut sum = 0.0;
            for i in 0..3 {
                for j in i + 1..3 {
                    sum += (sign(s[i]) * sign(s[j]) * corr[[i, j]]).clamp(-1.0, 1.0).asin();
                }
            }
            Ok((0.125 + sum / (4.0 * PI)).clamp(0.0, 1.0))
        }
        _ => Err(Error::ClosedFormUnavailable(format!(
            "no closed form for n = {n}; use the Monte Carlo method"
        ))),
    }
}

fn monte_carlo<F: Scalar>(
    query: &OrthantQuery<F>,
    precision: f64,
    seed: u64,
) -> Result<OrthantEstimate<F>> {
    if !(precision > 0.0) {
        return Err(Error::OutOfRange("precision must be positive".into()));
    }
    let sampler = Sampler::new(&query.spec)?;
    let n = query.spec.n();
    let thresholds: Vec<F> = query.spec.thresholds().to_vec();
    let pattern = &query.pattern;

    // Antithetic pairs; per-pair indicator sums are integers, so the
    // stopping rule and the estimate are exact and platform independent.
    let mut pair_count = 0u64;
    let mut sum2w = 0u64; // sum of (2 w) over pairs, 2w in {0, 1, 2}
    let mut sum2w2 = 0u64; // sum of (2 w)^2
    let mut batch = 0u64;
    let mut x = vec![F::zero(); n];
    let mut stderr;
    loop {
        let mut rng = ChaCha8Rng::seed_from_u64(shard_seed(seed, batch));
        for _ in 0..BATCH_PAIRS {
            let mut u = vec![F::zero(); sampler.rank()];
            for v in u.iter_mut() {
                *v = F::standard_normal(&mut rng);
            }
            let mut w2 = 0u64;
            for flip in [false, true] {
                sampler.apply_factor(&u, flip, &mut x);
                let mut inside = true;
                for i in 0..n {
                    let above = x[i] >= thresholds[i];
                    if above != pattern[i] {
                        inside = false;
                        break;
                    }
                }
                if inside {
                    w2 += 1;
                }
            }
            sum2w += w2;
            sum2w2 += w2 * w2;
        }
        pair_count += BATCH_PAIRS;
        batch += 1;

        let m = pair_count as f64;
        let mean_w = sum2w as f64 / (2.0 * m);
        let mean_w2 = sum2w2 as f64 / (4.0 * m);
        let var_w = ((mean_w2 - mean_w * mean_w) * m / (m - 1.0)).max(0.0);
        // Smoothed binomial floor keeps the reported error honest when no
        // hit has been seen yet.
        let p_smooth = (sum2w as f64 / 2.0 + 1.0) / (m + 2.0);
        let var_floor = p_smooth * (1.0 - p_smooth) / m;
        stderr = (var_w.max(var_floor) / m).sqrt();
        if stderr <= precision {
            return Ok(OrthantEstimate {
                value: cst(mean_w),
                stderr,
                samples: 2 * pair_count,
                method: OrthantMethod::MonteCarlo,
            });
        }
        if 2 * (pair_count + BATCH_PAIRS) > DEFAULT_SAMPLE_CAP {
            return Err(Error::PrecisionUnreachable {
                precision,
                cap: DEFAULT_SAMPLE_CAP,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr2, Array1, Array2};

    fn standardized_pair(rho: f64) -> GaussianSpec<f64> {
        GaussianSpec::zero_thresholds(Array1::zeros(2), arr2(&[[1.0, rho], [rho, 1.0]])).unwrap()
    }

    #[test]
    fn arcsin_covariance_values() {
        assert_eq!(bivariate_threshold_cov(0.0f64).unwrap(), 0.0);
        assert!((bivariate_threshold_cov(1.0f64).unwrap() - 0.25).abs() < 1e-15);
        assert!((bivariate_threshold_cov(-1.0f64).unwrap() + 0.25).abs() < 1e-15);
        // arcsin(1/2) = pi/6, so the covariance is 1/12.
        assert!((bivariate_threshold_cov(0.5f64).unwrap() - 1.0 / 12.0).abs() < 1e-16);
        assert!(bivariate_threshold_cov(1.5f64).is_err());
    }

    #[test]
    fn arcsin_covariance_is_odd_and_monotone() {
        let mut prev = f64::NEG_INFINITY;
        let mut rho = -1.0f64;
        while rho <= 1.0 {
            let c = bivariate_threshold_cov(rho).unwrap();
            let c_neg = bivariate_threshold_cov(-rho).unwrap();
            assert!((c + c_neg).abs() < 1e-16);
            assert!(c >= prev);
            prev = c;
            rho += 0.01;
        }
    }

    #[test]
    fn univariate_closed_form() {
        let spec =
            GaussianSpec::<f64>::zero_thresholds(Array1::zeros(1), Array2::eye(1)).unwrap();
        let q = OrthantQuery::parse_pattern(spec, "1").unwrap();
        let est = orthant_probability(&q, OrthantMethod::ClosedForm, 0.0, 0).unwrap();
        assert!((est.value - 0.5).abs() < 1e-15);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn bivariate_closed_form_matches_lemma_arithmetic() {
        // rho = 1/2, pattern "11": 1/4 + arcsin(1/2)/(2 pi) = 1/3.
        let q = OrthantQuery::parse_pattern(standardized_pair(0.5), "11").unwrap();
        let est = orthant_probability(&q, OrthantMethod::ClosedForm, 0.0, 0).unwrap();
        assert!((est.value - 1.0 / 3.0).abs() < 5e-9, "value = {}", est.value);
    }

    #[test]
    fn trivariate_closed_form_against_monte_carlo() {
        let cov = arr2(&[[1.0, -0.3, -0.1], [-0.3, 1.0, -0.25], [-0.1, -0.25, 1.0]]);
        let spec = GaussianSpec::<f64>::zero_thresholds(Array1::zeros(3), cov).unwrap();
        for pattern in ["111", "101", "010", "000"] {
            let q = OrthantQuery::parse_pattern(spec.clone(), pattern).unwrap();
            let exact = orthant_probability(&q, OrthantMethod::ClosedForm, 0.0, 0).unwrap();
            let mc = orthant_probability(&q, OrthantMethod::MonteCarlo, 4e-4, 99).unwrap();
            assert!(
                (exact.value - mc.value).abs() < 3.0 * mc.stderr + 1e-12,
                "pattern {pattern}: exact {} mc {} stderr {}",
                exact.value,
                mc.value,
                mc.stderr
            );
        }
    }

    #[test]
    fn closed_form_unavailable_paths() {
        let cov = Array2::<f64>::eye(4);
        let spec = GaussianSpec::<f64>::zero_thresholds(Array1::zeros(4), cov).unwrap();
        let q = OrthantQuery::parse_pattern(spec, "1111").unwrap();
        assert!(matches!(
            orthant_probability(&q, OrthantMethod::ClosedForm, 0.0, 0),
            Err(Error::ClosedFormUnavailable(_))
        ));

        let spec3 = GaussianSpec::<f64>::new(
            Array1::zeros(3),
            Array2::eye(3),
            Array1::from(vec![0.5, 0.0, 0.0]),
        )
        .unwrap();
        let q3 = OrthantQuery::parse_pattern(spec3, "111").unwrap();
        assert!(matches!(
            orthant_probability(&q3, OrthantMethod::ClosedForm, 0.0, 0),
            Err(Error::ClosedFormUnavailable(_))
        ));
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let q = OrthantQuery::parse_pattern(standardized_pair(-0.4), "10").unwrap();
        let a = orthant_probability(&q, OrthantMethod::MonteCarlo, 1e-3, 5).unwrap();
        let b = orthant_probability(&q, OrthantMethod::MonteCarlo, 1e-3, 5).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.samples, b.samples);
        assert!(a.stderr <= 1e-3);
    }

    #[test]
    fn precision_unreachable_under_cap() {
        let q = OrthantQuery::parse_pattern(standardized_pair(0.0), "11").unwrap();
        assert!(matches!(
            orthant_probability(&q, OrthantMethod::MonteCarlo, 1e-9, 5),
            Err(Error::PrecisionUnreachable { .. })
        ));
    }

    #[test]
    fn orthant_probabilities_sum_to_one() {
        let cov = arr2(&[[1.0, -0.3, -0.1], [-0.3, 1.0, -0.25], [-0.1, -0.25, 1.0]]);
        let spec = GaussianSpec::<f64>::zero_thresholds(Array1::zeros(3), cov).unwrap();
        let mut total = 0.0;
        let mut total_stderr = 0.0;
        for mask in 0..8u32 {
            let bits: Vec<bool> = (0..3).map(|i| mask >> i & 1 == 1).collect();
            let q = OrthantQuery::new(spec.clone(), bits).unwrap();
            let est = orthant_probability(&q, OrthantMethod::MonteCarlo, 1e-3, 17).unwrap();
            total += est.value;
            total_stderr += est.stderr;
        }
        assert!((total - 1.0).abs() < 4.0 * total_stderr + 1e-12);
    }
}
