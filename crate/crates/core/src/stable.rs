//! Strong Rayleigh certification of generating polynomials.

use serde::{Deserialize, Serialize};

/// One complex coordinate of a root witness.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

/// A zero of the generating polynomial with every coordinate in the open
/// upper half-plane, refuting real stability.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootWitness {
    pub point: Vec<ComplexValue>,
    pub value: ComplexValue,
    pub imag_parts_positive: bool,
}
