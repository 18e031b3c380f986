#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod error;
pub mod ifs;
pub mod kernel;
pub mod quadrature;
pub mod runner;
pub mod solver;

pub use analytics::{CapacityEstimate, EquilibriumMeasure, ExponentialFit, PotentialMethod};
pub use error::{Error, Result};
pub use ifs::{AffineMap, BandSystem, GapOrigin, IfsSystem, Interval};
pub use kernel::{GapVariables, KernelEvaluator};
pub use quadrature::QuadratureRule;
pub use runner::RunConfig;
pub use solver::{EquilibriumSolution, SolverConfig};
