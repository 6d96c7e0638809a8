//! Mixed-integer formulations of distributionally robust chance-constrained
//! programs over Wasserstein balls, with left-hand-side uncertainty.
//!
//! The crate builds the Basic, Knapsack and quantile-Improved formulations,
//! computes quantile strengthening and mixing cuts, solves desk-scale models
//! with an embedded simplex plus branch-and-bound, and cross-checks everything
//! against a brute-force enumeration oracle.

pub mod apps;
pub mod error;
pub mod formulation;
pub mod io;
pub mod mixing;
pub mod model;
pub mod oracle;
pub mod quantile;
pub mod solver;

pub use error::{Error, Result};
pub use formulation::{BigMProvenance, BigMVector, MipModel, RowFamily};
pub use model::{Closedness, Domain, DualNormTag, Instance, InstanceKind, Norm, SafetySpec};
pub use quantile::{QuantileMode, QuantileTable};
pub use solver::{LpSolution, LpStatus, SolveReport, SolveStatus};
