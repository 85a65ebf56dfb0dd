//! negdep: executable checks for negative dependence of finite Bernoulli
//! laws and Gaussian threshold processes.
//!
//! The crate certifies negative association and the strong Rayleigh property
//! for explicit probability tables, builds Bernoulli laws by thresholding
//! Gaussian vectors, and computes the covariance-sum bounds, decay profiles
//! and covering couplings that connect the two worlds. Everything is exposed
//! twice: as a library (generic over [`Scalar`]) and through the `negdep`
//! command-line tool, which speaks JSON.

pub mod covdiag;
pub mod coupling;
pub mod error;
pub mod flow;
pub mod gallery;
pub mod gaussian;
pub mod law;
pub mod linalg;
pub mod na;
pub mod poly;
pub mod scalar;
pub mod special;
pub mod stable;
pub mod table;
pub mod verdict;

pub use error::{Error, Result};
pub use law::BernoulliLaw;
pub use poly::MultiaffinePoly;
pub use scalar::Scalar;
pub use verdict::{Effort, Status, Verdict, Witness};

/// Concrete binary64 aliases; the CLI and the JSON formats use these.
pub type Law64 = law::BernoulliLaw<f64>;
pub type Poly64 = poly::MultiaffinePoly<f64>;
pub type Spec64 = gaussian::GaussianSpec<f64>;
pub type Profile64 = covdiag::CovProfile<f64>;
pub type TailProfile64 = gaussian::TailProfile<f64>;
