//! Multiaffine polynomials with subset-indexed coefficients.

use crate::error::{Error, Result};
use crate::law::BernoulliLaw;
use crate::scalar::Scalar;
use crate::table::{SubsetTable, MAX_N};
use num_complex::Complex;

/// Polynomial of degree at most one in each variable; the coefficient on
/// subset `I` multiplies the monomial `prod_{i in I} z_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiaffinePoly<F> {
    n: usize,
    coeffs: SubsetTable<F>,
}

impl<F: Scalar> MultiaffinePoly<F> {
    pub fn new(n: usize, entries: impl IntoIterator<Item = (u32, F)>) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::DimensionTooLarge {
                operation: "polynomial construction",
                n,
                limit: MAX_N,
            });
        }
        let mut coeffs = SubsetTable::<F>::zeros(n);
        for (mask, c) in entries {
            if mask >= 1u32 << n {
                return Err(Error::IndexOutOfRange {
                    index: mask as usize,
                    n,
                });
            }
            coeffs.add(mask, c);
        }
        Ok(MultiaffinePoly { n, coeffs })
    }

    /// Generating polynomial of a law: the coefficient on subset `I` is the
    /// probability of the pattern `I`.
    pub fn from_law(law: &BernoulliLaw<F>) -> Self {
        let mut coeffs = SubsetTable::<F>::zeros(law.n());
        for (mask, p) in law.patterns() {
            if p != F::zero() {
                coeffs.add(mask, p);
            }
        }
        MultiaffinePoly {
            n: law.n(),
            coeffs,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficient(&self, mask: u32) -> F {
        self.coeffs.get(mask)
    }

    /// `(subset, coefficient)` in ascending mask order.
    pub fn coefficients(&self) -> impl Iterator<Item = (u32, F)> + '_ {
        self.coeffs.iter()
    }

    /// Sum of absolute coefficient values.
    pub fn coefficient_scale(&self) -> F {
        self.coefficients()
            .fold(F::zero(), |acc, (_, c)| acc + c.abs())
    }

    pub fn eval_real(&self, x: &[F]) -> F {
        assert_eq!(x.len(), self.n);
        let mut acc = F::zero();
        for (mask, c) in self.coefficients() {
            if c == F::zero() {
                continue;
            }
            let mut term = c;
            let mut bits = mask;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                term *= x[i];
                bits &= bits - 1;
            }
            acc += term;
        }
        acc
    }

    pub fn eval_complex(&self, z: &[Complex<F>]) -> Complex<F> {
        assert_eq!(z.len(), self.n);
        let mut acc = Complex::new(F::zero(), F::zero());
        for (mask, c) in self.coefficients() {
            if c == F::zero() {
                continue;
            }
            let mut term = Complex::new(c, F::zero());
            let mut bits = mask;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                term = term * z[i];
                bits &= bits - 1;
            }
            acc += term;
        }
        acc
    }

    /// Value and the partial derivatives in coordinates `i`, `j` at a real
    /// point: `(f, df/dz_i, df/dz_j, d2f/dz_i dz_j)`.
    pub fn eval_with_partials(&self, x: &[F], i: usize, j: usize) -> (F, F, F, F) {
        assert!(i != j && i < self.n && j < self.n);
        assert_eq!(x.len(), self.n);
        let (mut f, mut fi, mut fj, mut fij) = (F::zero(), F::zero(), F::zero(), F::zero());
        for (mask, c) in self.coefficients() {
            if c == F::zero() {
                continue;
            }
            let mut rest = c;
            let mut bits = mask & !(1 << i) & !(1 << j);
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                rest *= x[k];
                bits &= bits - 1;
            }
            let has_i = mask >> i & 1 == 1;
            let has_j = mask >> j & 1 == 1;
            match (has_i, has_j) {
                (false, false) => f += rest,
                (true, false) => {
                    f += rest * x[i];
                    fi += rest;
                }
                (false, true) => {
                    f += rest * x[j];
                    fj += rest;
                }
                (true, true) => {
                    f += rest * x[i] * x[j];
                    fi += rest * x[j];
                    fj += rest * x[i];
                    fij += rest;
                }
            }
        }
        (f, fi, fj, fij)
    }

    /// Gradient component: `df/dz_i` at a real point.
    pub fn partial(&self, x: &[F], i: usize) -> F {
        assert!(i < self.n && x.len() == self.n);
        let mut acc = F::zero();
        for (mask, c) in self.coefficients() {
            if c == F::zero() || mask >> i & 1 == 0 {
                continue;
            }
            let mut term = c;
            let mut bits = mask & !(1 << i);
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                term *= x[k];
                bits &= bits - 1;
            }
            acc += term;
        }
        acc
    }

    /// Coefficients converted to f64 for the certification kernels.
    pub fn to_f64(&self) -> MultiaffinePoly<f64> {
        let mut coeffs = SubsetTable::<f64>::zeros(self.n);
        for (mask, c) in self.coefficients() {
            let c = c.to_f64().unwrap();
            if c != 0.0 {
                coeffs.add(mask, c);
            }
        }
        MultiaffinePoly { n: self.n, coeffs }
    }
}
