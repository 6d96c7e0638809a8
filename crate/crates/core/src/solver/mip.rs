//! LP relaxation with supporting-hyperplane cone refinement, and best-bound
//! branch-and-bound on the binaries with a root cut loop.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::time::{Duration, Instant};

use super::lp::{LpProblem, LpRow, LpSolution, LpStatus, Simplex};
use super::CutSource;
use crate::error::{Error, Result};
use crate::formulation::{ConeRow, LinearRow, MipModel, RowFamily, Sense, VarKind};

/// Cone rows count as satisfied once `θ‖u‖ − lhs` is at most this.
pub const CONE_TOL: f64 = 1e-9;
const MAX_CONE_ROUNDS: usize = 2000;

#[derive(Debug, Clone)]
pub struct Limits {
    pub node_limit: usize,
    pub time_limit: Duration,
    pub gap_tol: f64,
    pub int_tol: f64,
    pub root_cut_rounds: usize,
    /// Emit a progress line every this many nodes (0 disables).
    pub log_every: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            node_limit: 1_000_000,
            time_limit: Duration::from_secs(600),
            gap_tol: 1e-6,
            int_tol: 1e-6,
            root_cut_rounds: 50,
            log_every: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    BudgetExhausted,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::BudgetExhausted => "budget",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Incumbent objective (UB); `+∞` when none was found.
    pub objective: f64,
    /// Best bound (LB).
    pub best_bound: f64,
    /// `(UB − LB)/LB · 100`; `+∞` without an incumbent.
    pub gap: f64,
    pub nodes: usize,
    pub cuts_added: usize,
    pub root_bound: f64,
    /// Incumbent known when the root finished, if any.
    pub root_incumbent: Option<f64>,
    pub root_gap: Option<f64>,
    pub root_time: Duration,
    pub wall_time: Duration,
    pub solution: Option<Vec<f64>>,
    pub log: Vec<String>,
}

impl SolveReport {
    pub fn has_incumbent(&self) -> bool {
        self.solution.is_some()
    }

    /// `x` part of the incumbent.
    pub fn x(&self, model: &MipModel) -> Option<Vec<f64>> {
        self.solution
            .as_ref()
            .map(|s| s[..model.index.num_x].to_vec())
    }
}

/// `(UB − LB)/LB · 100`, with `|LB|` floored at `1e-10`.
pub fn gap_percent(ub: f64, lb: f64) -> f64 {
    if !ub.is_finite() || !lb.is_finite() {
        return f64::INFINITY;
    }
    (ub - lb) / lb.abs().max(1e-10) * 100.0
}

/// LP relaxation of a [`MipModel`] kept warm across bound changes and rows.
#[derive(Debug, Clone)]
pub struct Relaxation<'m> {
    model: &'m MipModel,
    engine: Simplex,
    pub cone_cuts: usize,
    pub status: LpStatus,
}

fn lp_row(row: &LinearRow) -> LpRow {
    let (lower, upper) = match row.sense {
        Sense::Ge => (row.rhs, f64::INFINITY),
        Sense::Le => (f64::NEG_INFINITY, row.rhs),
        Sense::Eq => (row.rhs, row.rhs),
    };
    LpRow {
        terms: row.terms.clone(),
        lower,
        upper,
    }
}

/// `lhs − θ gᵀu ≥ 0` as an LP row.
fn cone_cut(cone: &ConeRow, g: &[f64]) -> LpRow {
    let mut terms = cone.lhs.clone();
    let mut rhs = 0.0;
    for (gk, u) in g.iter().zip(&cone.inputs) {
        if *gk == 0.0 {
            continue;
        }
        for &(j, a) in &u.terms {
            terms.push((j, -cone.scale * gk * a));
        }
        rhs += cone.scale * gk * u.constant;
    }
    LpRow {
        terms,
        lower: rhs,
        upper: f64::INFINITY,
    }
}

/// Initial outer approximation of every cone row: `lhs ≥ ±θ u_k` for each
/// input `k`.
pub fn cone_outer_rows(model: &MipModel) -> Vec<LinearRow> {
    let mut out = Vec::new();
    for cone in &model.cone_rows {
        for k in 0..cone.inputs.len() {
            for (s, tag) in [(1.0, "p"), (-1.0, "m")] {
                let mut g = vec![0.0; cone.inputs.len()];
                g[k] = s;
                let row = cone_cut(cone, &g);
                out.push(LinearRow {
                    terms: row.terms,
                    sense: Sense::Ge,
                    rhs: row.lower,
                    label: format!("{}_oa_{k}_{tag}", cone.label),
                    family: RowFamily::Conic,
                });
            }
        }
    }
    out
}

impl<'m> Relaxation<'m> {
    pub fn new(model: &'m MipModel) -> Result<Self> {
        let mut lp = LpProblem::default();
        for v in &model.variables {
            lp.add_col(0.0, v.lower, v.upper);
        }
        for &(j, c) in &model.objective {
            lp.cost[j] += c;
        }
        lp.rows = model.linear_rows.iter().map(lp_row).collect();
        for cone in &model.cone_rows {
            for k in 0..cone.inputs.len() {
                for s in [1.0, -1.0] {
                    let mut g = vec![0.0; cone.inputs.len()];
                    g[k] = s;
                    lp.rows.push(cone_cut(cone, &g));
                }
            }
        }
        Ok(Self {
            model,
            engine: Simplex::new(&lp)?,
            cone_cuts: 0,
            status: LpStatus::Infeasible,
        })
    }

    pub fn model(&self) -> &MipModel {
        self.model
    }

    pub fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        if self.engine.col_bounds(j) != (lo, hi) {
            self.engine.set_col_bounds(j, lo, hi);
        }
    }

    pub fn add_row(&mut self, row: &LinearRow) {
        self.engine.add_row(lp_row(row));
    }

    /// Re-solve, refining cone rows until every violation is at most
    /// [`CONE_TOL`].
    pub fn solve(&mut self) -> Result<LpStatus> {
        let mut status = self.engine.reoptimize()?;
        for _ in 0..MAX_CONE_ROUNDS {
            if status != LpStatus::Optimal {
                break;
            }
            let values = self.engine.primal_values().to_vec();
            let mut added = false;
            for cone in &self.model.cone_rows {
                if cone.violation(&values) > CONE_TOL {
                    let u = cone.input_values(&values);
                    let norm = cone.tag.dual().eval(&u);
                    let g: Vec<f64> = u.iter().map(|v| v / norm).collect();
                    self.engine.add_row(cone_cut(cone, &g));
                    self.cone_cuts += 1;
                    added = true;
                }
            }
            if !added {
                self.status = status;
                return Ok(status);
            }
            status = self.engine.reoptimize()?;
        }
        if status == LpStatus::Optimal {
            return Err(Error::NumericalFailure(
                "cone refinement did not converge".into(),
            ));
        }
        self.status = status;
        Ok(status)
    }

    pub fn values(&self) -> &[f64] {
        self.engine.primal_values()
    }

    pub fn objective(&self) -> f64 {
        self.engine.objective()
    }

    pub fn solution(&self) -> LpSolution {
        let mut sol = self.engine.solution(self.status);
        sol.row_activities.truncate(self.model.linear_rows.len());
        sol
    }
}

/// LP relaxation with binaries relaxed to `[0, 1]`.
pub fn solve_lp(model: &MipModel) -> Result<LpSolution> {
    let mut rel = Relaxation::new(model)?;
    rel.solve()?;
    Ok(rel.solution())
}

#[derive(Debug, Clone)]
struct Node {
    bound: f64,
    id: usize,
    fixings: Vec<(usize, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap: smallest bound first, then oldest node
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

struct Search<'m> {
    rel: Relaxation<'m>,
    binaries: Vec<usize>,
    limits: Limits,
    incumbent: Option<(f64, Vec<f64>)>,
}

impl<'m> Search<'m> {
    fn apply(&mut self, fixings: &[(usize, f64)]) {
        let mut target: Vec<(f64, f64)> = self
            .binaries
            .iter()
            .map(|&j| {
                let v = &self.rel.model.variables[j];
                (v.lower, v.upper)
            })
            .collect();
        for &(pos, val) in fixings {
            target[pos] = (val, val);
        }
        for (pos, &(lo, hi)) in target.iter().enumerate() {
            let j = self.binaries[pos];
            self.rel.set_bounds(j, lo, hi);
        }
    }

    /// Most fractional binary (by position), lowest index on ties.
    fn branching_candidate(&self) -> Option<usize> {
        let values = self.rel.values();
        let mut best: Option<(usize, f64)> = None;
        for (pos, &j) in self.binaries.iter().enumerate() {
            let v = values[j];
            let frac = (v - v.floor()).min(v.ceil() - v);
            if frac > self.limits.int_tol && best.is_none_or(|(_, b)| frac > b + 1e-12) {
                best = Some((pos, frac));
            }
        }
        best.map(|b| b.0)
    }

    fn offer(&mut self, obj: f64, values: &[f64]) {
        if self.incumbent.as_ref().is_none_or(|(ub, _)| obj < *ub) {
            let mut sol = values.to_vec();
            for &j in &self.binaries {
                sol[j] = sol[j].round();
            }
            self.incumbent = Some((obj, sol));
        }
    }

    /// Round the root point in two ways and keep any feasible completion.
    fn rounding_heuristic(&mut self) -> Result<()> {
        let values = self.rel.values().to_vec();
        let cap = self
            .rel
            .model
            .linear_rows
            .iter()
            .find(|r| r.family == RowFamily::Knapsack)
            .map(|r| r.rhs.floor().max(0.0) as usize);
        let mut order: Vec<usize> = (0..self.binaries.len()).collect();
        order.sort_by(|&a, &b| {
            values[self.binaries[b]].total_cmp(&values[self.binaries[a]])
        });
        for cutoff in [0.5, self.limits.int_tol] {
            let mut ones: Vec<usize> = order
                .iter()
                .copied()
                .filter(|&pos| values[self.binaries[pos]] > cutoff)
                .collect();
            if let Some(c) = cap {
                ones.truncate(c);
            }
            let fixings: Vec<(usize, f64)> = (0..self.binaries.len())
                .map(|pos| (pos, if ones.contains(&pos) { 1.0 } else { 0.0 }))
                .collect();
            self.apply(&fixings);
            if self.rel.solve()? == LpStatus::Optimal {
                let obj = self.rel.objective();
                let vals = self.rel.values().to_vec();
                self.offer(obj, &vals);
            }
        }
        self.apply(&[]);
        self.rel.solve()?;
        Ok(())
    }
}

fn log_line(nodes: usize, lb: f64, ub: f64, cuts: usize, t: Duration) -> String {
    format!(
        "nodes={nodes} lb={lb:.9} ub={ub:.9} gap={:.4} cuts={cuts} time={:.3}",
        gap_percent(ub, lb),
        t.as_secs_f64()
    )
}

/// Best-bound branch-and-bound with an optional root cut loop.
pub fn solve_mip(
    model: &MipModel,
    cuts: Option<&mut dyn CutSource>,
    limits: &Limits,
) -> Result<SolveReport> {
    let start = Instant::now();
    let binaries: Vec<usize> = model
        .variables
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(j, _)| j)
        .collect();
    let mut search = Search {
        rel: Relaxation::new(model)?,
        binaries,
        limits: limits.clone(),
        incumbent: None,
    };
    let mut report = SolveReport {
        status: SolveStatus::Infeasible,
        objective: f64::INFINITY,
        best_bound: f64::INFINITY,
        gap: f64::INFINITY,
        nodes: 0,
        cuts_added: 0,
        root_bound: f64::INFINITY,
        root_incumbent: None,
        root_gap: None,
        root_time: Duration::ZERO,
        wall_time: Duration::ZERO,
        solution: None,
        log: Vec::new(),
    };

    let mut status = search.rel.solve()?;
    if status == LpStatus::Optimal {
        if let Some(src) = cuts {
            for _ in 0..limits.root_cut_rounds {
                let values = search.rel.values().to_vec();
                let rows = src.separate(model, &values);
                if rows.is_empty() {
                    break;
                }
                report.cuts_added += rows.len();
                for row in &rows {
                    search.rel.add_row(row);
                }
                status = search.rel.solve()?;
                if status != LpStatus::Optimal {
                    break;
                }
            }
        }
    }
    match status {
        LpStatus::Infeasible => {
            report.root_time = start.elapsed();
            report.wall_time = report.root_time;
            return Ok(report);
        }
        LpStatus::Unbounded => {
            report.status = SolveStatus::Unbounded;
            report.objective = f64::NEG_INFINITY;
            report.best_bound = f64::NEG_INFINITY;
            report.root_bound = f64::NEG_INFINITY;
            report.wall_time = start.elapsed();
            return Ok(report);
        }
        LpStatus::Optimal => {}
    }
    report.root_bound = search.rel.objective();
    if search.branching_candidate().is_none() {
        let (obj, vals) = (search.rel.objective(), search.rel.values().to_vec());
        search.offer(obj, &vals);
    } else {
        search.rounding_heuristic()?;
    }
    report.root_time = start.elapsed();
    report.root_incumbent = search.incumbent.as_ref().map(|i| i.0);
    report.root_gap = report
        .root_incumbent
        .map(|ub| gap_percent(ub, report.root_bound).max(0.0));

    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: report.root_bound,
        id: 0,
        fixings: Vec::new(),
    });
    let mut next_id = 1;
    let mut lb = report.root_bound;
    let mut exhausted = false;
    while let Some(node) = heap.pop() {
        lb = lb.max(node.bound);
        let ub = search.incumbent.as_ref().map_or(f64::INFINITY, |i| i.0);
        if ub.is_finite() && (ub - node.bound <= limits.gap_tol * node.bound.abs().max(1.0)) {
            heap.clear();
            lb = lb.min(ub);
            break;
        }
        if report.nodes >= limits.node_limit || start.elapsed() >= limits.time_limit {
            heap.push(node);
            exhausted = true;
            break;
        }
        report.nodes += 1;
        search.apply(&node.fixings);
        if search.rel.solve()? != LpStatus::Optimal {
            continue;
        }
        let obj = search.rel.objective();
        if obj >= ub - limits.gap_tol * obj.abs().max(1.0) {
            continue;
        }
        match search.branching_candidate() {
            None => {
                let vals = search.rel.values().to_vec();
                search.offer(obj, &vals);
            }
            Some(pos) => {
                for val in [0.0, 1.0] {
                    let mut fixings = node.fixings.clone();
                    fixings.push((pos, val));
                    heap.push(Node {
                        bound: obj.max(node.bound),
                        id: next_id,
                        fixings,
                    });
                    next_id += 1;
                }
            }
        }
        if limits.log_every > 0 && report.nodes.is_multiple_of(limits.log_every) {
            let ub = search.incumbent.as_ref().map_or(f64::INFINITY, |i| i.0);
            report.log.push(log_line(
                report.nodes,
                lb,
                ub,
                report.cuts_added,
                start.elapsed(),
            ));
        }
    }

    report.wall_time = start.elapsed();
    match search.incumbent.take() {
        Some((obj, sol)) => {
            report.objective = obj;
            report.solution = Some(sol);
            if exhausted {
                let open = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
                report.best_bound = lb.max(open.min(obj)).min(obj);
                report.status = SolveStatus::BudgetExhausted;
            } else {
                // exhausted tree: every open node was pruned against the incumbent
                report.best_bound = obj;
                report.status = SolveStatus::Optimal;
            }
            report.gap = gap_percent(report.objective, report.best_bound).max(0.0);
        }
        None => {
            if exhausted {
                report.status = SolveStatus::BudgetExhausted;
                report.best_bound = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
            } else {
                report.status = SolveStatus::Infeasible;
            }
        }
    }
    if limits.log_every > 0 {
        report.log.push(log_line(
            report.nodes,
            report.best_bound,
            report.objective,
            report.cuts_added,
            report.wall_time,
        ));
    }
    Ok(report)
}

/// Root gap in percent after the root cut loop, using `incumbent` or the root
/// rounding heuristic.
pub fn root_gap(
    model: &MipModel,
    cuts: Option<&mut dyn CutSource>,
    incumbent: Option<f64>,
) -> Result<f64> {
    let limits = Limits {
        node_limit: 0,
        ..Limits::default()
    };
    let report = solve_mip(model, cuts, &limits)?;
    let ub = incumbent
        .or(report.root_incumbent)
        .ok_or(Error::NoIncumbent)?;
    Ok(gap_percent(ub, report.root_bound))
}
