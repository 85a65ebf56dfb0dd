//! Finite Bernoulli laws: explicit probability tables over `{0,1}^n`.

use crate::error::{Error, Result};
use crate::scalar::{cst, Scalar};
use crate::table::{
    extract_bits, mask_to_pattern, pattern_to_mask, SubsetTable, DENSE_LIMIT, MAX_N,
};
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Sum-to-one window for human-written pmf files.
pub const INPUT_SUM_TOLERANCE: f64 = 1e-9;
/// Sum-to-one window for internally constructed laws.
pub const INTERNAL_SUM_TOLERANCE: f64 = 1e-12;
/// Negative inputs above this are clamped to zero; below it they are errors.
pub const NEGATIVE_CLAMP: f64 = -1e-15;

/// Law of a vector of Bernoulli random variables, i.e. of a random subset of
/// the coordinates. Stored dense up to `n = 20`, sparse beyond; `n <= 24`.
///
/// Values are immutable after construction and every operation is a pure
/// function, so laws may be shared freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliLaw<F> {
    n: usize,
    pmf: SubsetTable<F>,
}

/// On-disk form: `{"n": 2, "pmf": {"01": 0.5, "10": 0.5}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LawFile {
    pub n: usize,
    pub pmf: BTreeMap<String, f64>,
}

impl<F: Scalar> BernoulliLaw<F> {
    /// Build a law from pattern-keyed probabilities, applying the input
    /// tolerances: clamp negatives in `[-1e-15, 0]`, renormalize when
    /// `|sum - 1| <= 1e-9`.
    pub fn from_pmf(entries: &BTreeMap<String, f64>) -> Result<Self> {
        let mut n = None;
        for key in entries.keys() {
            let len = key.chars().count();
            match n {
                None => n = Some(len),
                Some(l) if l != len => {
                    return Err(Error::InconsistentDimension(format!(
                        "pmf keys of lengths {l} and {len}"
                    )))
                }
                _ => {}
            }
            if pattern_to_mask(key).is_none() {
                return Err(Error::InconsistentDimension(format!(
                    "pmf key {key:?} is not a 0/1 pattern"
                )));
            }
        }
        let n = n.filter(|&l| l >= 1).ok_or(Error::NonNormalizable { sum: 0.0 })?;
        let masked = entries
            .iter()
            .map(|(k, &p)| (pattern_to_mask(k).unwrap(), p))
            .collect::<Vec<_>>();
        Self::from_masked_f64(n, &masked, INPUT_SUM_TOLERANCE)
    }

    /// Build a law from mask-keyed probabilities at the internal tolerance.
    pub fn from_masks(n: usize, entries: impl IntoIterator<Item = (u32, F)>) -> Result<Self> {
        let masked = entries
            .into_iter()
            .map(|(m, p)| (m, p.to_f64().unwrap_or(f64::NAN)))
            .collect::<Vec<_>>();
        Self::from_masked_f64(n, &masked, INTERNAL_SUM_TOLERANCE)
    }

    fn from_masked_f64(n: usize, entries: &[(u32, f64)], sum_tolerance: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InconsistentDimension("dimension 0".into()));
        }
        if n > MAX_N {
            return Err(Error::DimensionTooLarge {
                operation: "law construction",
                n,
                limit: MAX_N,
            });
        }
        let mut pmf = SubsetTable::<F>::zeros(n);
        let mut sum = 0.0f64;
        for &(mask, p) in entries {
            if mask >= 1u32 << n {
                return Err(Error::IndexOutOfRange {
                    index: mask as usize,
                    n,
                });
            }
            if !(p >= NEGATIVE_CLAMP) {
                return Err(Error::NegativeProbability {
                    pattern: mask_to_pattern(mask, n),
                    value: p,
                });
            }
            let p = p.max(0.0);
            sum += p;
            pmf.add(mask, cst(p));
        }
        if (sum - 1.0).abs() > sum_tolerance {
            return Err(Error::NonNormalizable { sum });
        }
        if sum != 1.0 && sum > 0.0 {
            pmf.scale(cst::<F>(1.0 / sum));
        }
        Ok(BernoulliLaw { n, pmf })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Probability of one pattern.
    pub fn prob(&self, mask: u32) -> F {
        self.pmf.get(mask)
    }

    /// `(pattern, probability)` in ascending mask order. Dense laws yield
    /// zero-probability patterns as well.
    pub fn patterns(&self) -> impl Iterator<Item = (u32, F)> + '_ {
        self.pmf.iter()
    }

    /// `E[X_i]` for every coordinate.
    pub fn means(&self) -> Vec<F> {
        let mut m = vec![F::zero(); self.n];
        for (mask, p) in self.patterns() {
            let mut bits = mask;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                m[i] += p;
                bits &= bits - 1;
            }
        }
        m
    }

    /// Probability that all coordinates of `event_mask` are 1.
    pub fn upper_event_prob(&self, event_mask: u32) -> F {
        let mut s = F::zero();
        for (mask, p) in self.patterns() {
            if mask & event_mask == event_mask {
                s += p;
            }
        }
        s
    }

    /// `cov(X_i, X_j)` for all pairs: `E[X_i X_j] - E[X_i] E[X_j]`.
    pub fn covariance_matrix(&self) -> Array2<F> {
        let n = self.n;
        let means = self.means();
        let mut second = Array2::<F>::zeros((n, n));
        for (mask, p) in self.patterns() {
            if p == F::zero() {
                continue;
            }
            let idx: Vec<usize> = (0..n).filter(|&k| mask >> k & 1 == 1).collect();
            for (a, &i) in idx.iter().enumerate() {
                for &j in &idx[a..] {
                    second[[i, j]] += p;
                }
            }
        }
        let mut cov = Array2::<F>::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let c = second[[i, j]] - means[i] * means[j];
                cov[[i, j]] = c;
                cov[[j, i]] = c;
            }
        }
        cov
    }

    /// Pushforward of the law onto the listed coordinates (0-based,
    /// duplicates ignored; order does not matter — the result is indexed by
    /// the sorted coordinate list).
    pub fn marginal(&self, coords: &[usize]) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyCoordinateSet);
        }
        let mut sorted: Vec<usize> = coords.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&bad) = sorted.iter().find(|&&i| i >= self.n) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                n: self.n,
            });
        }
        let k = sorted.len();
        let mut out = SubsetTable::<F>::zeros(k);
        for (mask, p) in self.patterns() {
            if p == F::zero() {
                continue;
            }
            out.add(extract_bits(mask, &sorted), p);
        }
        Ok(BernoulliLaw { n: k, pmf: out })
    }

    /// Law with coordinates relabeled: new coordinate `i` is old coordinate
    /// `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::WrongDimension {
                expected: self.n,
                got: perm.len(),
            });
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || seen[p] {
                return Err(Error::InconsistentDimension(
                    "not a permutation of the coordinates".into(),
                ));
            }
            seen[p] = true;
        }
        let mut out = SubsetTable::<F>::zeros(self.n);
        for (mask, p) in self.patterns() {
            if p == F::zero() {
                continue;
            }
            let mut new_mask = 0u32;
            for (i, &src) in perm.iter().enumerate() {
                new_mask |= (mask >> src & 1) << i;
            }
            out.add(new_mask, p);
        }
        Ok(BernoulliLaw {
            n: self.n,
            pmf: out,
        })
    }

    /// Law of the coordinates outside `b_positions`, conditioned on the `B`
    /// coordinates showing `assignment` (a local pattern over the sorted `B`
    /// positions). `None` when the conditioning event has probability below
    /// `floor`.
    pub fn conditional_outside(
        &self,
        b_positions: &[usize],
        assignment: u32,
        floor: f64,
    ) -> Result<Option<Self>> {
        let mut sorted = b_positions.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&bad) = sorted.iter().find(|&&i| i >= self.n) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                n: self.n,
            });
        }
        let rest: Vec<usize> = (0..self.n).filter(|i| !sorted.contains(i)).collect();
        if rest.is_empty() {
            return Err(Error::EmptyCoordinateSet);
        }
        let mut mass = F::zero();
        let mut entries: Vec<(u32, F)> = Vec::new();
        for (mask, p) in self.patterns() {
            if p == F::zero() || extract_bits(mask, &sorted) != assignment {
                continue;
            }
            mass += p;
            entries.push((extract_bits(mask, &rest), p));
        }
        if mass.to_f64().unwrap_or(0.0) <= floor {
            return Ok(None);
        }
        let mut pmf = SubsetTable::<F>::zeros(rest.len());
        for (m, p) in entries {
            pmf.add(m, p / mass);
        }
        Ok(Some(BernoulliLaw {
            n: rest.len(),
            pmf,
        }))
    }

    /// Same law with probabilities converted to f64.
    pub fn to_f64(&self) -> BernoulliLaw<f64> {
        let mut pmf = SubsetTable::<f64>::zeros(self.n);
        for (mask, p) in self.patterns() {
            let p = p.to_f64().unwrap();
            if p != 0.0 {
                pmf.add(mask, p);
            }
        }
        BernoulliLaw { n: self.n, pmf }
    }

    pub fn to_file(&self) -> LawFile {
        let mut pmf = BTreeMap::new();
        for (mask, p) in self.patterns() {
            let p = p.to_f64().unwrap();
            if p != 0.0 {
                pmf.insert(mask_to_pattern(mask, self.n), p);
            }
        }
        LawFile { n: self.n, pmf }
    }

    pub fn from_file(file: &LawFile) -> Result<Self> {
        let law = Self::from_pmf(&file.pmf)?;
        if law.n != file.n {
            return Err(Error::InconsistentDimension(format!(
                "declared n = {} but keys have {} bits",
                file.n, law.n
            )));
        }
        Ok(law)
    }

    pub(crate) fn from_parts_unchecked(n: usize, pmf: SubsetTable<F>) -> Self {
        debug_assert!(n >= 1 && n <= MAX_N);
        BernoulliLaw { n, pmf }
    }

    /// True when the law is held in a dense table.
    pub fn is_dense(&self) -> bool {
        self.n <= DENSE_LIMIT
    }
}
