//! Exact finite-space probability for hidden-variable models.
//!
//! Everything here runs over finite product spaces with exact rational
//! weights, so every identity between measures and every `{0,1}` membership
//! test is decided exactly. The crate provides:
//!
//! * [`rationals`]: the exact scalar type.
//! * [`measure`]: product layouts, finite measures, marginals, conditionals.
//! * [`fiber`]: fiber products of measures and their characterizations.
//! * [`models`]: empirical and hidden-variable models.
//! * [`properties`]: decision procedures for locality, parameter and outcome
//!   independence, λ-independence, and weak/strong determinism.
//! * [`determinize`]: the singleton, empirical and local determinizations.
//! * [`realizability`]: exact local-polytope membership with certificates.
//! * [`quantumgen`]: singlet-state empirical models.
//! * [`sample`]: seeded random instances for property tests.

pub mod determinize;
pub mod error;
pub mod fiber;
pub mod measure;
pub mod models;
pub mod properties;
pub mod quantumgen;
pub mod rationals;
pub mod realizability;
pub mod sample;
mod simplex;

pub use error::{Error, Result};
pub use measure::{Atom, CondProb, Event, FiniteMeasure, FiniteSpace, ProductLayout};
pub use models::{EmpiricalModel, HVModel, MarginalFamily, Party};
pub use properties::{Property, PropertyReport, Witness};
pub use rationals::Rational;
