//! Embedded LP engine and branch-and-bound over the scenario binaries.

pub mod lp;
pub mod mip;

pub use lp::{LpProblem, LpRow, LpSolution, LpStatus};
pub use mip::{
    gap_percent, root_gap, solve_lp, solve_mip, Limits, Relaxation, SolveReport, SolveStatus,
};

use crate::formulation::{LinearRow, MipModel};

/// Supplies cutting planes at a relaxation point during the root cut loop.
pub trait CutSource {
    /// Rows violated at `values` (one entry per model variable); empty when
    /// nothing is violated.
    fn separate(&mut self, model: &MipModel, values: &[f64]) -> Vec<LinearRow>;

    fn name(&self) -> &'static str {
        "cuts"
    }
}
