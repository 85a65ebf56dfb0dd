//! Dense/sparse storage for values indexed by subsets of coordinates.
//!
//! A subset of `[n]` is a `u32` mask; bit `k` is coordinate `k` (the
//! `k+1`-st character of a pattern key).

use crate::scalar::Scalar;
use std::collections::BTreeMap;

/// Dense storage up to this many coordinates, sparse beyond.
pub const DENSE_LIMIT: usize = 20;

/// Hard cap on the coordinate count accepted anywhere.
pub const MAX_N: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum SubsetTable<F> {
    Dense(Vec<F>),
    Sparse(BTreeMap<u32, F>),
}

impl<F: Scalar> SubsetTable<F> {
    pub fn zeros(n: usize) -> Self {
        if n <= DENSE_LIMIT {
            SubsetTable::Dense(vec![F::zero(); 1usize << n])
        } else {
            SubsetTable::Sparse(BTreeMap::new())
        }
    }

    pub fn get(&self, mask: u32) -> F {
        match self {
            SubsetTable::Dense(v) => v[mask as usize],
            SubsetTable::Sparse(m) => m.get(&mask).copied().unwrap_or_else(F::zero),
        }
    }

    pub fn add(&mut self, mask: u32, value: F) {
        match self {
            SubsetTable::Dense(v) => v[mask as usize] += value,
            SubsetTable::Sparse(m) => {
                *m.entry(mask).or_insert_with(F::zero) += value;
            }
        }
    }

    pub fn scale(&mut self, factor: F) {
        match self {
            SubsetTable::Dense(v) => v.iter_mut().for_each(|x| *x *= factor),
            SubsetTable::Sparse(m) => m.values_mut().for_each(|x| *x *= factor),
        }
    }

    /// Entries in ascending mask order. Dense tables yield zero entries too.
    pub fn iter(&self) -> Box<dyn Iterator<Item = (u32, F)> + '_> {
        match self {
            SubsetTable::Dense(v) => Box::new(v.iter().enumerate().map(|(m, &p)| (m as u32, p))),
            SubsetTable::Sparse(m) => Box::new(m.iter().map(|(&k, &p)| (k, p))),
        }
    }
}

/// Render a mask as the fixed-width pattern key: character `k` is coordinate
/// `k+1`, left to right.
pub fn mask_to_pattern(mask: u32, n: usize) -> String {
    (0..n)
        .map(|k| if mask >> k & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parse a pattern key; `None` on non-binary characters.
pub fn pattern_to_mask(pattern: &str) -> Option<u32> {
    let mut mask = 0u32;
    for (k, c) in pattern.chars().enumerate() {
        match c {
            '0' => {}
            '1' => mask |= 1 << k,
            _ => return None,
        }
    }
    Some(mask)
}

/// Indices of the set bits of `mask`, ascending.
pub fn mask_to_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|k| mask >> k & 1 == 1).collect()
}

/// Mask with the bits listed in `indices` set.
pub fn indices_to_mask(indices: &[usize]) -> u32 {
    indices.iter().fold(0u32, |m, &i| m | 1 << i)
}

/// Compress the bits of `mask` selected by `positions` into a local pattern:
/// bit `t` of the output is bit `positions[t]` of the input.
#[inline]
pub fn extract_bits(mask: u32, positions: &[usize]) -> u32 {
    let mut out = 0u32;
    for (t, &p) in positions.iter().enumerate() {
        out |= (mask >> p & 1) << t;
    }
    out
}
