//! Dense-tableau bounded-variable simplex.
//!
//! Every row `lo ≤ aᵀx ≤ hi` gets a slack `s = aᵀx` carrying the row bounds,
//! so the constraint system is homogeneous: `[A −I] (x, s) = 0`. The tableau
//! stores `B⁻¹[A −I]` densely. A cold solve runs two phases with artificials
//! only on rows whose starting slack is out of bounds; warm re-solves after
//! bound changes or appended rows use the dual simplex from the last basis.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const PRIMAL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 100;
const STALL_LIMIT: usize = 50;

/// One linear row `lower ≤ Σ coef·x_j ≤ upper`; either side may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub terms: Vec<(usize, f64)>,
    pub lower: f64,
    pub upper: f64,
}

impl LpRow {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

/// `min costᵀx` subject to bounded rows and column bounds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LpProblem {
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<LpRow>,
}

impl LpProblem {
    pub fn num_cols(&self) -> usize {
        self.cost.len()
    }

    pub fn add_col(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.cost.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.cost.len() - 1
    }

    pub fn add_row(&mut self, terms: Vec<(usize, f64)>, lower: f64, upper: f64) {
        self.rows.push(LpRow {
            terms,
            lower,
            upper,
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
    pub row_activities: Vec<f64>,
}

/// Solve an LP from scratch.
pub fn solve(problem: &LpProblem) -> Result<LpSolution> {
    let mut s = Simplex::new(problem)?;
    let status = s.solve()?;
    Ok(s.solution(status))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    Lower,
    Upper,
    /// Nonbasic free column resting at zero.
    Zero,
}

/// Warm-startable simplex engine.
#[derive(Debug, Clone)]
pub struct Simplex {
    n_struct: usize,
    rows: Vec<LpRow>,
    /// Sparse original columns of `[A −I art]`.
    cols: Vec<Vec<(usize, f64)>>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    state: Vec<State>,
    x: Vec<f64>,
    tab: Vec<Vec<f64>>,
    basis: Vec<usize>,
    d: Vec<f64>,
    since_refactor: usize,
    has_basis: bool,
    pub iterations: usize,
}

impl Simplex {
    pub fn new(problem: &LpProblem) -> Result<Self> {
        let n = problem.num_cols();
        if n == 0 {
            return Err(Error::InvalidInstance("LP has no columns".into()));
        }
        if problem.lower.len() != n || problem.upper.len() != n {
            return Err(Error::DimensionMismatch("LP bound vectors".into()));
        }
        for row in &problem.rows {
            if row.terms.iter().any(|&(j, a)| j >= n || !a.is_finite()) {
                return Err(Error::DimensionMismatch(
                    "LP row references an unknown column".into(),
                ));
            }
        }
        let mut s = Self {
            n_struct: n,
            rows: problem.rows.clone(),
            cols: Vec::new(),
            lo: problem.lower.clone(),
            hi: problem.upper.clone(),
            cost: problem.cost.clone(),
            state: Vec::new(),
            x: Vec::new(),
            tab: Vec::new(),
            basis: Vec::new(),
            d: Vec::new(),
            since_refactor: 0,
            has_basis: false,
            iterations: 0,
        };
        s.reset_columns();
        Ok(s)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_structural(&self) -> usize {
        self.n_struct
    }

    fn ncols(&self) -> usize {
        self.cols.len()
    }

    /// Drop artificials and rebuild the column set for the current rows.
    fn reset_columns(&mut self) {
        let n = self.n_struct;
        let m = self.rows.len();
        self.lo.truncate(n);
        self.hi.truncate(n);
        self.cost.truncate(n);
        self.cols = vec![Vec::new(); n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in &row.terms {
                if a != 0.0 {
                    self.cols[j].push((i, a));
                }
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            self.cols.push(vec![(i, -1.0)]);
            self.lo.push(row.lower);
            self.hi.push(row.upper);
            self.cost.push(0.0);
        }
        debug_assert_eq!(self.cols.len(), n + m);
        self.has_basis = false;
    }

    fn slack(&self, i: usize) -> usize {
        self.n_struct + i
    }

    pub fn col_bounds(&self, j: usize) -> (f64, f64) {
        (self.lo[j], self.hi[j])
    }

    /// Change the bounds of a structural column, keeping the basis.
    pub fn set_col_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        assert!(j < self.n_struct);
        self.lo[j] = lo;
        self.hi[j] = hi;
        if !self.has_basis {
            return;
        }
        let new_val = match self.state[j] {
            State::Basic => return,
            _ => self.rest_value(j),
        };
        self.state[j] = self.rest_state(j);
        let delta = new_val - self.x[j];
        if delta != 0.0 {
            self.x[j] = new_val;
            for r in 0..self.basis.len() {
                let a = self.tab[r][j];
                if a != 0.0 {
                    self.x[self.basis[r]] -= a * delta;
                }
            }
        }
    }

    fn rest_state(&self, j: usize) -> State {
        match self.state.get(j) {
            Some(State::Upper) if self.hi[j].is_finite() => State::Upper,
            _ if self.lo[j].is_finite() => State::Lower,
            _ if self.hi[j].is_finite() => State::Upper,
            _ => State::Zero,
        }
    }

    fn rest_value(&self, j: usize) -> f64 {
        match self.rest_state(j) {
            State::Lower => self.lo[j],
            State::Upper => self.hi[j],
            _ => 0.0,
        }
    }

    /// Append a row; the basis stays valid and dual feasible.
    pub fn add_row(&mut self, row: LpRow) {
        let i = self.rows.len();
        for &(j, a) in &row.terms {
            assert!(j < self.n_struct, "row references unknown column");
            if a != 0.0 {
                self.cols[j].push((i, a));
            }
        }
        let slack = self.ncols();
        self.cols.push(vec![(i, -1.0)]);
        self.lo.push(row.lower);
        self.hi.push(row.upper);
        self.cost.push(0.0);
        if !self.has_basis {
            self.rows.push(row);
            return;
        }
        for t in &mut self.tab {
            t.push(0.0);
        }
        self.d.push(0.0);
        let mut dense = vec![0.0; self.ncols()];
        for &(j, a) in &row.terms {
            dense[j] += a;
        }
        let mut new_row: Vec<f64> = dense.iter().map(|v| -v).collect();
        for (r, &b) in self.basis.iter().enumerate() {
            let w = dense[b];
            if w != 0.0 {
                for (o, t) in new_row.iter_mut().zip(&self.tab[r]) {
                    *o += w * t;
                }
            }
        }
        new_row[slack] = 1.0;
        let value = row.activity(&self.x[..self.n_struct]);
        self.rows.push(row);
        self.tab.push(new_row);
        self.basis.push(slack);
        self.state.push(State::Basic);
        self.x.push(value);
    }

    /// Cold two-phase solve from the slack basis.
    pub fn solve(&mut self) -> Result<LpStatus> {
        self.reset_columns();
        let n = self.n_struct;
        let m = self.rows.len();
        self.state = (0..self.ncols()).map(|_| State::Lower).collect();
        self.x = vec![0.0; self.ncols()];
        for j in 0..n {
            self.state[j] = State::Zero;
            self.state[j] = self.rest_state(j);
            self.x[j] = self.rest_value(j);
        }
        self.basis = Vec::with_capacity(m);
        let mut arts = Vec::new();
        for i in 0..m {
            let s = self.slack(i);
            let act = self.rows[i].activity(&self.x[..n]);
            if act < self.lo[s] - PRIMAL_TOL || act > self.hi[s] + PRIMAL_TOL {
                let v = if act < self.lo[s] { self.lo[s] } else { self.hi[s] };
                self.state[s] = if act < self.lo[s] {
                    State::Lower
                } else {
                    State::Upper
                };
                self.x[s] = v;
                let sigma = if v - act >= 0.0 { 1.0 } else { -1.0 };
                arts.push((i, sigma, (v - act).abs()));
                self.basis.push(usize::MAX);
            } else {
                self.state[s] = State::Basic;
                self.x[s] = act;
                self.basis.push(s);
            }
        }
        for &(i, sigma, val) in &arts {
            let j = self.ncols();
            self.cols.push(vec![(i, sigma)]);
            self.lo.push(0.0);
            self.hi.push(f64::INFINITY);
            self.cost.push(0.0);
            self.state.push(State::Basic);
            self.x.push(val);
            self.basis[i] = j;
        }
        let ncols = self.ncols();
        self.tab = vec![vec![0.0; ncols]; m];
        for j in 0..ncols {
            for &(i, a) in &self.cols[j] {
                let b = self.basis[i];
                // diagonal of the starting basis is the basic column's own entry
                let piv = self.cols[b][0].1;
                self.tab[i][j] = a / piv;
            }
        }
        self.has_basis = true;
        self.since_refactor = 0;

        if !arts.is_empty() {
            let phase1: Vec<f64> = (0..ncols)
                .map(|j| if j >= n + m { 1.0 } else { 0.0 })
                .collect();
            self.compute_duals(&phase1);
            let status = self.primal(&phase1)?;
            debug_assert_ne!(status, LpStatus::Unbounded);
            let infeas: f64 = (n + m..ncols).map(|j| self.x[j]).sum();
            let scale = 1.0 + arts.iter().map(|a| a.2).fold(0.0, f64::max);
            if infeas > 1e-9 * scale {
                // artificials are still basic; the next solve must start cold
                self.has_basis = false;
                return Ok(LpStatus::Infeasible);
            }
            for j in n + m..ncols {
                self.lo[j] = 0.0;
                self.hi[j] = 0.0;
                if self.state[j] != State::Basic {
                    self.state[j] = State::Lower;
                    self.x[j] = 0.0;
                }
            }
            self.refactor()?;
        }
        let cost = self.cost.clone();
        self.compute_duals(&cost);
        self.primal(&cost)
    }

    /// Re-solve after bound changes or appended rows.
    pub fn reoptimize(&mut self) -> Result<LpStatus> {
        if !self.has_basis {
            return self.solve();
        }
        match self.warm() {
            Ok(status) => Ok(status),
            Err(_) => self.solve(),
        }
    }

    fn warm(&mut self) -> Result<LpStatus> {
        let cost = self.cost.clone();
        self.compute_duals(&cost);
        if !self.dual_feasible() {
            // fall back to a primal pass; the basis may be primal infeasible
            if !self.primal_feasible() {
                return self.solve();
            }
            return self.primal(&cost);
        }
        match self.dual(&cost)? {
            LpStatus::Optimal => self.primal(&cost),
            other => Ok(other),
        }
    }

    fn dual_feasible(&self) -> bool {
        (0..self.ncols()).all(|j| match self.state[j] {
            State::Basic => true,
            _ if self.lo[j] == self.hi[j] => true,
            State::Lower => self.d[j] >= -DUAL_TOL * 10.0,
            State::Upper => self.d[j] <= DUAL_TOL * 10.0,
            State::Zero => self.d[j].abs() <= DUAL_TOL * 10.0,
        })
    }

    fn primal_feasible(&self) -> bool {
        self.basis.iter().all(|&b| {
            self.x[b] >= self.lo[b] - PRIMAL_TOL && self.x[b] <= self.hi[b] + PRIMAL_TOL
        })
    }

    fn compute_duals(&mut self, cost: &[f64]) {
        let mut d = cost.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (dj, t) in d.iter_mut().zip(&self.tab[r]) {
                    *dj -= cb * t;
                }
            }
        }
        for &b in &self.basis {
            d[b] = 0.0;
        }
        self.d = d;
    }

    fn max_iterations(&self) -> usize {
        50 * (self.ncols() + self.rows.len()) + 10_000
    }

    fn primal(&mut self, cost: &[f64]) -> Result<LpStatus> {
        let limit = self.max_iterations();
        let mut stall = 0usize;
        let mut bland = false;
        for _ in 0..limit {
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                self.compute_duals(cost);
            }
            let Some((q, dir)) = self.price(bland) else {
                return Ok(LpStatus::Optimal);
            };
            self.iterations += 1;
            let (leave, step) = self.ratio_test(q, dir, bland);
            let flip = if self.lo[q].is_finite() && self.hi[q].is_finite() {
                self.hi[q] - self.lo[q]
            } else {
                f64::INFINITY
            };
            let step_len = match leave {
                Some((_, t)) => t.min(flip),
                None => flip,
            };
            if !step_len.is_finite() {
                // a ray is only real if its reduced cost survives the column's scale
                let col_max = (0..self.basis.len())
                    .map(|r| self.tab[r][q].abs())
                    .fold(0.0, f64::max);
                if self.d[q].abs() <= DUAL_TOL * (1.0 + col_max) {
                    self.d[q] = 0.0;
                    continue;
                }
                return Ok(LpStatus::Unbounded);
            }
            if step_len < 1e-12 {
                stall += 1;
                if stall > STALL_LIMIT {
                    bland = true;
                }
            } else {
                stall = 0;
            }
            self.move_entering(q, dir * step_len);
            match leave {
                Some((r, t)) if t <= flip => {
                    let b = self.basis[r];
                    let alpha = self.tab[r][q] * dir;
                    let (st, v) = if alpha > 0.0 {
                        (State::Lower, self.lo[b])
                    } else {
                        (State::Upper, self.hi[b])
                    };
                    self.pivot(r, q);
                    self.state[b] = st;
                    self.x[b] = v;
                }
                _ => {
                    self.state[q] = if dir > 0.0 { State::Upper } else { State::Lower };
                    self.x[q] = if dir > 0.0 { self.hi[q] } else { self.lo[q] };
                }
            }
            let _ = step;
        }
        Err(Error::NumericalFailure(
            "primal simplex iteration limit".into(),
        ))
    }

    fn price(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.ncols() {
            if self.lo[j] == self.hi[j] {
                continue;
            }
            let dj = self.d[j];
            let dir = match self.state[j] {
                State::Basic => continue,
                State::Lower if dj < -DUAL_TOL => 1.0,
                State::Upper if dj > DUAL_TOL => -1.0,
                State::Zero if dj.abs() > DUAL_TOL => -dj.signum(),
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if dj.abs() > best_score {
                best_score = dj.abs();
                best = Some((j, dir));
            }
        }
        best
    }

    /// Harris two-pass ratio test. Returns the blocking row and its exact step.
    fn ratio_test(&self, q: usize, dir: f64, bland: bool) -> (Option<(usize, f64)>, f64) {
        let m = self.basis.len();
        let mut relaxed = f64::INFINITY;
        for r in 0..m {
            let alpha = self.tab[r][q] * dir;
            let b = self.basis[r];
            if alpha > PIVOT_TOL && self.lo[b].is_finite() {
                relaxed = relaxed.min((self.x[b] - self.lo[b] + PRIMAL_TOL) / alpha);
            } else if alpha < -PIVOT_TOL && self.hi[b].is_finite() {
                relaxed = relaxed.min((self.hi[b] - self.x[b] + PRIMAL_TOL) / -alpha);
            }
        }
        if !relaxed.is_finite() {
            return (None, f64::INFINITY);
        }
        let mut pick: Option<(usize, f64)> = None;
        let mut pick_alpha = 0.0;
        for r in 0..m {
            let alpha = self.tab[r][q] * dir;
            let b = self.basis[r];
            let exact = if alpha > PIVOT_TOL && self.lo[b].is_finite() {
                (self.x[b] - self.lo[b]) / alpha
            } else if alpha < -PIVOT_TOL && self.hi[b].is_finite() {
                (self.hi[b] - self.x[b]) / -alpha
            } else {
                continue;
            };
            if exact > relaxed {
                continue;
            }
            let better = match pick {
                None => true,
                Some((pr, _)) if bland => b < self.basis[pr],
                Some(_) => alpha.abs() > pick_alpha,
            };
            if better {
                pick = Some((r, exact.max(0.0)));
                pick_alpha = alpha.abs();
            }
        }
        (pick, relaxed)
    }

    fn move_entering(&mut self, q: usize, delta: f64) {
        if delta == 0.0 {
            return;
        }
        self.x[q] += delta;
        for r in 0..self.basis.len() {
            let a = self.tab[r][q];
            if a != 0.0 {
                self.x[self.basis[r]] -= a * delta;
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let piv = self.tab[r][q];
        {
            let row = &mut self.tab[r];
            for v in row.iter_mut() {
                *v /= piv;
            }
            row[q] = 1.0;
        }
        let pivot_row = std::mem::take(&mut self.tab[r]);
        for (i, row) in self.tab.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[q];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                row[q] = 0.0;
            }
        }
        let dq = self.d[q];
        if dq != 0.0 {
            for (v, p) in self.d.iter_mut().zip(&pivot_row) {
                *v -= dq * p;
            }
            self.d[q] = 0.0;
        }
        self.tab[r] = pivot_row;
        self.state[q] = State::Basic;
        self.basis[r] = q;
        self.since_refactor += 1;
    }

    fn dual(&mut self, cost: &[f64]) -> Result<LpStatus> {
        let limit = self.max_iterations();
        for _ in 0..limit {
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                self.compute_duals(cost);
            }
            // leaving row: largest bound violation
            let mut leave = None;
            let mut worst = PRIMAL_TOL;
            for (r, &b) in self.basis.iter().enumerate() {
                let v = self.x[b];
                let viol = (self.lo[b] - v).max(v - self.hi[b]);
                if viol > worst {
                    worst = viol;
                    leave = Some(r);
                }
            }
            let Some(r) = leave else {
                return Ok(LpStatus::Optimal);
            };
            self.iterations += 1;
            let b = self.basis[r];
            let increase = self.x[b] < self.lo[b];
            let target = if increase { self.lo[b] } else { self.hi[b] };
            let mut best: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            let mut best_alpha = 0.0;
            for j in 0..self.ncols() {
                if self.lo[j] == self.hi[j] && self.state[j] != State::Basic {
                    continue;
                }
                let alpha = self.tab[r][j];
                if alpha.abs() <= PIVOT_TOL {
                    continue;
                }
                // moving x_j by Δ changes x_b by −alpha·Δ
                let ok = match self.state[j] {
                    State::Basic => false,
                    State::Lower => (alpha < 0.0) == increase,
                    State::Upper => (alpha > 0.0) == increase,
                    State::Zero => true,
                };
                if !ok {
                    continue;
                }
                let ratio = self.d[j].abs() / alpha.abs();
                if ratio < best_ratio - 1e-12
                    || (ratio <= best_ratio + 1e-12 && alpha.abs() > best_alpha)
                {
                    best_ratio = ratio.min(best_ratio);
                    best = Some(j);
                    best_alpha = alpha.abs();
                }
            }
            let Some(q) = best else {
                return Ok(LpStatus::Infeasible);
            };
            let delta = (self.x[b] - target) / self.tab[r][q];
            self.move_entering(q, delta);
            self.pivot(r, q);
            self.state[b] = if increase { State::Lower } else { State::Upper };
            self.x[b] = target;
        }
        Err(Error::NumericalFailure("dual simplex iteration limit".into()))
    }

    /// Recompute the tableau from the original columns and current basis.
    fn refactor(&mut self) -> Result<()> {
        let m = self.basis.len();
        let mut bmat = vec![vec![0.0; m]; m];
        for (c, &b) in self.basis.iter().enumerate() {
            for &(i, a) in &self.cols[b] {
                bmat[i][c] = a;
            }
        }
        let inv = invert(bmat).ok_or_else(|| {
            Error::NumericalFailure("basis matrix became singular".into())
        })?;
        let ncols = self.ncols();
        let mut tab = vec![vec![0.0; ncols]; m];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, a) in col {
                for (row, inv_row) in tab.iter_mut().zip(&inv) {
                    let w = inv_row[i];
                    if w != 0.0 {
                        row[j] += w * a;
                    }
                }
            }
        }
        for (r, &b) in self.basis.iter().enumerate() {
            for (j, v) in tab[r].iter_mut().enumerate() {
                if j == b {
                    *v = 1.0;
                }
            }
        }
        self.tab = tab;
        for &b in &self.basis {
            self.x[b] = 0.0;
        }
        for j in 0..ncols {
            if self.state[j] == State::Basic || self.x[j] == 0.0 {
                continue;
            }
            let xj = self.x[j];
            for r in 0..m {
                let a = self.tab[r][j];
                if a != 0.0 {
                    let b = self.basis[r];
                    self.x[b] -= a * xj;
                }
            }
        }
        self.since_refactor = 0;
        Ok(())
    }

    pub fn objective(&self) -> f64 {
        (0..self.n_struct).map(|j| self.cost[j] * self.x[j]).sum()
    }

    pub fn primal_values(&self) -> &[f64] {
        &self.x[..self.n_struct]
    }

    pub fn solution(&self, status: LpStatus) -> LpSolution {
        let primal = if self.has_basis {
            self.primal_values().to_vec()
        } else {
            vec![0.0; self.n_struct]
        };
        let row_activities = self.rows.iter().map(|r| r.activity(&primal)).collect();
        LpSolution {
            status,
            objective: if status == LpStatus::Optimal {
                self.objective()
            } else if status == LpStatus::Infeasible {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            },
            primal,
            row_activities,
        }
    }

    /// Largest absolute row or bound violation at the current point.
    pub fn max_violation(&self) -> f64 {
        let x = self.primal_values();
        let rows = self.rows.iter().map(|r| {
            let a = r.activity(x);
            (r.lower - a).max(a - r.upper).max(0.0)
        });
        let bounds = (0..self.n_struct)
            .map(|j| (self.lo[j] - x[j]).max(x[j] - self.hi[j]).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }
}

/// Gauss-Jordan inverse with partial pivoting.
fn invert(mut a: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, p);
        inv.swap(c, p);
        let piv = a[c][c];
        for v in a[c].iter_mut() {
            *v /= piv;
        }
        for v in inv[c].iter_mut() {
            *v /= piv;
        }
        let (ar, ir) = (a[c].clone(), inv[c].clone());
        for r in 0..n {
            if r == c {
                continue;
            }
            let f = a[r][c];
            if f != 0.0 {
                for (v, p) in a[r].iter_mut().zip(&ar) {
                    *v -= f * p;
                }
                for (v, p) in inv[r].iter_mut().zip(&ir) {
                    *v -= f * p;
                }
            }
        }
    }
    Some(inv)
}
