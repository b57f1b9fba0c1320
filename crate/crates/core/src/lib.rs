//! Computational algebra for bimodule planar algebras: weight functions on
//! fusion systems, trivial perturbation class decisions, perturbation of
//! dimension data, and closure checks under composition.

pub mod error;
pub mod fusion;
pub mod graph;
pub mod weights;
pub mod linalg;
pub mod perturb;
pub mod compose;
pub mod examples;

pub use compose::{cable, compose, generated_subsystem, verify_tpc_closure, Bicategory3};
pub use error::{Error, Result};
pub use fusion::{validate, Completeness, FusionSystem, Multiplicity, SystemBuilder};
pub use graph::{graph_from_system, pf_dimensions, PrincipalGraphPair, Side};
pub use perturb::{modulus_of, perturb_report, spherical_report, Modulus};
pub use weights::{is_tpc, solve_weight_space, SectorScope, TpcVerdict, WeightFunction};

/// Default tolerance for floating point verdicts.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Convergence tolerance for Perron–Frobenius iteration.
pub const PF_TOLERANCE: f64 = 1e-12;

/// Exact integer scalar used throughout the kernel computations.
pub type Int = num_bigint::BigInt;
/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
/// Floating point scalar used by the approximate pipelines.
pub type Real = f64;
/// Dimension data over the default floating point scalar.
pub type Dims = perturb::DimensionData<Real>;
