//! Stochastic covering couplings between laws on subsets.

use serde::{Deserialize, Serialize};

/// Hall-type certificate that no covering coupling exists: a family of
/// source patterns whose mass exceeds the mass of everything it may map to.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InfeasibilityCut {
    /// Patterns on the covering side.
    pub family: Vec<String>,
    /// Every pattern the family may be coupled to.
    pub neighborhood: Vec<String>,
    pub family_mass: f64,
    pub neighborhood_mass: f64,
    pub deficit: f64,
}
