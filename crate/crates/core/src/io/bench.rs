//! Benchmark summary tables.
//!
//! Per `(N, θ)` group:
//! - `Slv(Fnd)`: instances solved to optimality, and in parentheses those with
//!   a feasible solution (an upper bound).
//! - `Time(Gap)`: mean time of the solved instances, and in parentheses the
//!   mean final gap `(UB − LB)/LB·100` of the unsolved ones that have an
//!   incumbent. `*` marks an empty average.
//! - `R.time`: mean root time over all instances.
//! - `R.gap(Fnd)`: mean root gap over instances with a root incumbent, and
//!   their count.
//! - `Cuts`: mean number of root cuts added.

use std::fmt::Write as _;

use crate::solver::{gap_percent, SolveReport, SolveStatus};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub theta: f64,
    pub instances: usize,
    pub solved: usize,
    pub found: usize,
    pub time: Option<f64>,
    pub gap: Option<f64>,
    pub root_time: f64,
    pub root_gap: Option<f64>,
    pub root_found: usize,
    pub cuts: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchTable {
    pub label: String,
    pub rows: Vec<BenchRow>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

impl BenchRow {
    pub fn from_reports(n: usize, theta: f64, reports: &[&SolveReport]) -> Self {
        let solved: Vec<&&SolveReport> = reports
            .iter()
            .filter(|r| r.status == SolveStatus::Optimal)
            .collect();
        let unsolved_gaps: Vec<f64> = reports
            .iter()
            .filter(|r| r.status != SolveStatus::Optimal && r.has_incumbent())
            .map(|r| gap_percent(r.objective, r.best_bound))
            .collect();
        let root_gaps: Vec<f64> = reports
            .iter()
            .filter_map(|r| r.root_incumbent.map(|ub| gap_percent(ub, r.root_bound).max(0.0)))
            .collect();
        let root_times: Vec<f64> = reports.iter().map(|r| r.root_time.as_secs_f64()).collect();
        let cuts: Vec<f64> = reports.iter().map(|r| r.cuts_added as f64).collect();
        Self {
            n,
            theta,
            instances: reports.len(),
            solved: solved.len(),
            found: reports.iter().filter(|r| r.has_incumbent()).count(),
            time: mean(
                &solved
                    .iter()
                    .map(|r| r.wall_time.as_secs_f64())
                    .collect::<Vec<_>>(),
            ),
            gap: mean(&unsolved_gaps),
            root_time: mean(&root_times).unwrap_or(0.0),
            root_gap: mean(&root_gaps),
            root_found: root_gaps.len(),
            cuts: mean(&cuts).unwrap_or(0.0),
        }
    }
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "*".into(), |x| format!("{x:.prec$}"))
}

impl BenchTable {
    /// Group raw `(N, θ, report)` records by `(N, θ)` in first-seen order.
    pub fn from_reports(label: &str, records: &[(usize, f64, SolveReport)]) -> Self {
        let mut keys: Vec<(usize, f64)> = Vec::new();
        for &(n, t, _) in records {
            if !keys.iter().any(|&(a, b)| a == n && b == t) {
                keys.push((n, t));
            }
        }
        let rows = keys
            .into_iter()
            .map(|(n, t)| {
                let group: Vec<&SolveReport> = records
                    .iter()
                    .filter(|r| r.0 == n && r.1 == t)
                    .map(|r| &r.2)
                    .collect();
                BenchRow::from_reports(n, t, &group)
            })
            .collect();
        Self {
            label: label.to_string(),
            rows,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.label);
        let _ = writeln!(
            out,
            "{:>6} {:>8} {:>9} {:>16} {:>8} {:>12} {:>8}",
            "N", "theta", "Slv(Fnd)", "Time(Gap)", "R.time", "R.gap(Fnd)", "Cuts"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>6} {:>8} {:>9} {:>16} {:>8.2} {:>12} {:>8.1}",
                r.n,
                format!("{:.4}", r.theta),
                format!("{}({})", r.solved, r.found),
                format!("{}({})", opt(r.time, 2), opt(r.gap, 2)),
                r.root_time,
                format!("{}({})", opt(r.root_gap, 2), r.root_found),
                r.cuts
            );
        }
        out
    }
}
