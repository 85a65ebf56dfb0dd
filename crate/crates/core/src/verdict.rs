//! Certified checker outcomes.

use crate::coupling::InfeasibilityCut;
use crate::na::NaWitness;
use crate::stable::RootWitness;
use serde::{Deserialize, Serialize};

/// Outcome of a certification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

/// Effort counters accumulated by a checker.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Effort {
    pub pairs_checked: u64,
    pub evaluations: u64,
    pub samples: u64,
    pub starts: u64,
}

impl Effort {
    pub fn absorb(&mut self, other: &Effort) {
        self.pairs_checked += other.pairs_checked;
        self.evaluations += other.evaluations;
        self.samples += other.samples;
        self.starts += other.starts;
    }
}

/// Structured counterexample attached to a failing verdict.
///
/// Every variant is independently re-checkable from the inputs of the
/// checker that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A coordinate pair with positive covariance.
    PositiveCovariance { i: usize, j: usize, value: f64 },
    /// Increasing events on disjoint blocks with positive covariance.
    NegativeAssociation(NaWitness),
    /// A zero of the generating polynomial with every coordinate in the
    /// open upper half-plane.
    Root(RootWitness),
    /// A covariance row violating one of the strong Rayleigh bounds.
    RowBound {
        index: usize,
        inequality: String,
        value: f64,
        bound: f64,
    },
    /// Total absolute covariance above the pairwise bound.
    TotalBound { value: f64, bound: f64 },
    /// Infeasibility certificate for a covering coupling.
    Cut(InfeasibilityCut),
    /// Conditioning pair whose covering coupling is infeasible.
    ScpPair {
        /// Pattern of the smaller conditioning event on B.
        u: String,
        /// Pattern of the larger conditioning event on B.
        v: String,
        cut: InfeasibilityCut,
    },
}

/// Certified outcome: holds, fails with a witness, or inconclusive.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub budget_spent: Effort,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn holds(budget_spent: Effort) -> Self {
        Verdict {
            status: Status::Holds,
            witness: None,
            budget_spent,
            notes: Vec::new(),
        }
    }

    pub fn fails(witness: Witness, budget_spent: Effort) -> Self {
        Verdict {
            status: Status::Fails,
            witness: Some(witness),
            budget_spent,
            notes: Vec::new(),
        }
    }

    pub fn inconclusive(budget_spent: Effort) -> Self {
        Verdict {
            status: Status::Inconclusive,
            witness: None,
            budget_spent,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn is_holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn is_fails(&self) -> bool {
        self.status == Status::Fails
    }
}
