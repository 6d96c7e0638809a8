//! Problem data for distributionally robust chance-constrained programs with
//! left-hand-side uncertainty.
//!
//! The decision-dependent safety set is
//!
//! ```text
//! S(x) = { ξ : (b − Aᵀx)ᵀ ξ_p + d_p − a_pᵀ x  (> or ≥)  0,  p = 1..P }
//! ```
//!
//! where `ξ = (ξ_1, …, ξ_P)` and every block `ξ_p` has the same length `K_b`.
//! `A` is stored as an `L × K_b` matrix so that `Aᵀx ∈ R^{K_b}` and
//! `Aξ_p ∈ R^L`. Scenario data is stored row-blocked: scenario `i` occupies
//! `P` contiguous blocks of `K_b` values.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// `‖b − Aᵀx‖_*` at or below this value is treated as `b = Aᵀx`.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Slack used when deciding whether a scenario row is violated.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Norm used in the transport cost of the Wasserstein ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn dual(self) -> Norm {
        match self {
            Norm::L1 => Norm::Linf,
            Norm::L2 => Norm::L2,
            Norm::Linf => Norm::L1,
        }
    }

    pub fn eval(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|x| x.abs()).sum(),
            Norm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    pub fn is_linear(self) -> bool {
        !matches!(self, Norm::L2)
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Linf => "linf",
        })
    }
}

impl FromStr for Norm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            "linf" | "l-inf" | "inf" => Ok(Norm::Linf),
            other => Err(Error::InvalidInstance(format!("unknown norm '{other}'"))),
        }
    }
}

/// A transport norm together with the dual norm that appears in the
/// distance-to-unsafe-set formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualNormTag {
    pub norm: Norm,
}

impl DualNormTag {
    pub fn new(norm: Norm) -> Self {
        Self { norm }
    }

    pub fn dual(&self) -> Norm {
        self.norm.dual()
    }

    /// Tag whose primal norm is this tag's dual.
    pub fn flipped(&self) -> DualNormTag {
        DualNormTag::new(self.norm.dual())
    }
}

/// Whether the safety set uses strict (`Open`) or weak (`Closed`) inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Closedness {
    Open,
    Closed,
}

impl fmt::Display for Closedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Closedness::Open => "open",
            Closedness::Closed => "closed",
        })
    }
}

impl FromStr for Closedness {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" => Ok(Closedness::Open),
            "closed" => Ok(Closedness::Closed),
            other => Err(Error::InvalidInstance(format!(
                "unknown closedness '{other}'"
            ))),
        }
    }
}

/// Coefficients of the linear safety set shared by all scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct SafetySpec {
    num_vars: usize,
    block_len: usize,
    /// `A`, row-major `num_vars × block_len`.
    weights: Vec<f64>,
    b: Vec<f64>,
    /// `a_p`, one row of length `num_vars` per safety row.
    a: Vec<Vec<f64>>,
    d: Vec<f64>,
    pub closedness: Closedness,
}

impl SafetySpec {
    pub fn new(
        num_vars: usize,
        block_len: usize,
        weights: Vec<f64>,
        b: Vec<f64>,
        a: Vec<Vec<f64>>,
        d: Vec<f64>,
        closedness: Closedness,
    ) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidInstance("safety set needs P >= 1 rows".into()));
        }
        if weights.len() != num_vars * block_len {
            return Err(Error::DimensionMismatch(format!(
                "A has {} entries, expected {}x{}",
                weights.len(),
                num_vars,
                block_len
            )));
        }
        if b.len() != block_len {
            return Err(Error::DimensionMismatch(format!(
                "b has length {}, expected {block_len}",
                b.len()
            )));
        }
        if a.len() != d.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows in a but {} in d",
                a.len(),
                d.len()
            )));
        }
        if let Some(row) = a.iter().find(|row| row.len() != num_vars) {
            return Err(Error::DimensionMismatch(format!(
                "a_p has length {}, expected {num_vars}",
                row.len()
            )));
        }
        Ok(Self {
            num_vars,
            block_len,
            weights,
            b,
            a,
            d,
            closedness,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// `K_b`, the length of each `ξ_p`.
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn num_rows(&self) -> usize {
        self.a.len()
    }

    pub fn weight(&self, var: usize, k: usize) -> f64 {
        self.weights[var * self.block_len + k]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn a(&self, p: usize) -> &[f64] {
        &self.a[p]
    }

    pub fn d(&self, p: usize) -> f64 {
        self.d[p]
    }

    /// `b − Aᵀx`.
    pub fn direction(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.b.clone();
        for (l, &xl) in x.iter().enumerate() {
            if xl == 0.0 {
                continue;
            }
            let row = &self.weights[l * self.block_len..(l + 1) * self.block_len];
            for (o, w) in out.iter_mut().zip(row) {
                *o -= w * xl;
            }
        }
        out
    }

    /// `−Aξ_p − a_p`, the coefficient vector of `x` in row `p`.
    pub fn coefficients(&self, xi_p: &[f64], p: usize) -> Vec<f64> {
        (0..self.num_vars)
            .map(|l| {
                let row = &self.weights[l * self.block_len..(l + 1) * self.block_len];
                -dot(row, xi_p) - self.a[p][l]
            })
            .collect()
    }

    /// `bᵀξ_p + d_p`.
    pub fn constant(&self, xi_p: &[f64], p: usize) -> f64 {
        dot(&self.b, xi_p) + self.d[p]
    }

    /// `(b − Aᵀx)ᵀξ_p + d_p − a_pᵀx`.
    pub fn row_value(&self, x: &[f64], xi_p: &[f64], p: usize) -> f64 {
        let dir = self.direction(x);
        dot(&dir, xi_p) + self.d[p] - dot(&self.a[p], x)
    }
}

/// Box domain `X = { x : lower ≤ x ≤ upper }`; bounds may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Domain {
    pub fn nonnegative(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn boxed(n: usize, lo: f64, hi: f64) -> Self {
        Self {
            lower: vec![lo; n],
            upper: vec![hi; n],
        }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.iter().chain(&self.upper).all(|v| v.is_finite())
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, hi))| *v >= lo - tol && *v <= hi + tol)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.lower.iter().all(|&l| l >= 0.0)
    }
}

/// Which generator produced an instance; the structured kinds carry the
/// parameters their big-M and quantile rules need.
#[derive(Debug, Clone, PartialEq)]
pub enum InstanceKind {
    Generic,
    /// Single covering row `ξᵀx > w`.
    Portfolio { target: f64 },
    /// `resources` assignment rows followed by `groups` demand rows, in the
    /// shared-constant lifted layout built by [`crate::apps::gen_resource`].
    Resource { resources: usize, groups: usize },
}

/// The coefficient vector and constant of one scenario row:
/// `s_p(x, ξ^i) = coefᵀx + constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRow {
    pub coef: Vec<f64>,
    pub constant: f64,
}

impl ScenarioRow {
    pub fn value(&self, x: &[f64]) -> f64 {
        dot(&self.coef, x) + self.constant
    }
}

#[derive(Debug)]
pub struct Instance {
    pub safety: SafetySpec,
    /// `N · P · K_b` values, scenario-major then row-major.
    scenarios: Vec<f64>,
    num_scenarios: usize,
    pub epsilon: f64,
    pub theta: f64,
    pub norm: Norm,
    pub domain: Domain,
    pub cost: Vec<f64>,
    pub kind: InstanceKind,
    pub seed: Option<u64>,
    rows: OnceLock<Vec<ScenarioRow>>,
}

impl Clone for Instance {
    fn clone(&self) -> Self {
        Self {
            safety: self.safety.clone(),
            scenarios: self.scenarios.clone(),
            num_scenarios: self.num_scenarios,
            epsilon: self.epsilon,
            theta: self.theta,
            norm: self.norm,
            domain: self.domain.clone(),
            cost: self.cost.clone(),
            kind: self.kind.clone(),
            seed: self.seed,
            rows: OnceLock::new(),
        }
    }
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.safety == other.safety
            && self.scenarios == other.scenarios
            && self.num_scenarios == other.num_scenarios
            && self.epsilon == other.epsilon
            && self.theta == other.theta
            && self.norm == other.norm
            && self.domain == other.domain
            && self.cost == other.cost
            && self.kind == other.kind
            && self.seed == other.seed
    }
}

impl Instance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        safety: SafetySpec,
        scenarios: Vec<f64>,
        epsilon: f64,
        theta: f64,
        norm: Norm,
        domain: Domain,
        cost: Vec<f64>,
        kind: InstanceKind,
    ) -> Result<Self> {
        let block = safety.num_rows() * safety.block_len();
        if block == 0 || scenarios.is_empty() || !scenarios.len().is_multiple_of(block) {
            return Err(Error::DimensionMismatch(format!(
                "scenario data of length {} is not a multiple of P*K_b = {block}",
                scenarios.len()
            )));
        }
        let n = scenarios.len() / block;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidInstance(format!(
                "epsilon must lie in (0,1), got {epsilon}"
            )));
        }
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::InvalidInstance(format!(
                "theta must be a finite nonnegative number, got {theta}"
            )));
        }
        if domain.len() != safety.num_vars() || cost.len() != safety.num_vars() {
            return Err(Error::DimensionMismatch(format!(
                "domain has {} and cost {} entries for L = {}",
                domain.len(),
                cost.len(),
                safety.num_vars()
            )));
        }
        if domain
            .lower
            .iter()
            .zip(&domain.upper)
            .any(|(lo, hi)| lo > hi || lo.is_nan() || hi.is_nan())
        {
            return Err(Error::InvalidInstance("domain has an empty interval".into()));
        }
        if scenarios.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInstance("scenario data must be finite".into()));
        }
        if risk_budget(epsilon, n) >= n {
            return Err(Error::InvalidInstance(format!(
                "floor(epsilon*N) must be below N = {n}"
            )));
        }
        Ok(Self {
            safety,
            scenarios,
            num_scenarios: n,
            epsilon,
            theta,
            norm,
            domain,
            cost,
            kind: InstanceKind::Generic,
            seed: None,
            rows: OnceLock::new(),
        }
        .with_kind(kind))
    }

    pub fn with_kind(mut self, kind: InstanceKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    /// Copy with a different Wasserstein radius.
    pub fn with_theta(&self, theta: f64) -> Self {
        let mut out = self.clone();
        out.theta = theta;
        out
    }

    pub fn num_scenarios(&self) -> usize {
        self.num_scenarios
    }

    pub fn num_rows(&self) -> usize {
        self.safety.num_rows()
    }

    pub fn num_vars(&self) -> usize {
        self.safety.num_vars()
    }

    /// `k = ⌊εN⌋`.
    pub fn k(&self) -> usize {
        risk_budget(self.epsilon, self.num_scenarios)
    }

    pub fn scenario_data(&self) -> &[f64] {
        &self.scenarios
    }

    /// All `P` blocks of scenario `i`.
    pub fn scenario(&self, i: usize) -> &[f64] {
        let len = self.num_rows() * self.safety.block_len();
        &self.scenarios[i * len..(i + 1) * len]
    }

    /// `ξ_p^i`.
    pub fn block(&self, i: usize, p: usize) -> &[f64] {
        let kb = self.safety.block_len();
        let start = (i * self.num_rows() + p) * kb;
        &self.scenarios[start..start + kb]
    }

    /// Cached `(−Aξ_p^i − a_p, bᵀξ_p^i + d_p)`.
    pub fn row(&self, i: usize, p: usize) -> &ScenarioRow {
        &self.rows()[i * self.num_rows() + p]
    }

    fn rows(&self) -> &[ScenarioRow] {
        self.rows.get_or_init(|| {
            let mut out = Vec::with_capacity(self.num_scenarios * self.num_rows());
            for i in 0..self.num_scenarios {
                for p in 0..self.num_rows() {
                    let xi = self.block(i, p);
                    out.push(ScenarioRow {
                        coef: self.safety.coefficients(xi, p),
                        constant: self.safety.constant(xi, p),
                    });
                }
            }
            out
        })
    }

    /// `s_p(x, ξ^i)`.
    pub fn row_value(&self, x: &[f64], i: usize, p: usize) -> f64 {
        self.row(i, p).value(x)
    }

    /// `min_p s_p(x, ξ^i)`.
    pub fn scenario_slack(&self, x: &[f64], i: usize) -> f64 {
        (0..self.num_rows())
            .map(|p| self.row_value(x, i, p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        dot(&self.cost, x)
    }

    pub fn dual_tag(&self) -> DualNormTag {
        DualNormTag::new(self.norm)
    }
}

/// `⌊εN⌋`, snapping to the nearest integer when `εN` is within `1e-9` of it.
pub fn risk_budget(epsilon: f64, n: usize) -> usize {
    let v = epsilon * n as f64;
    let r = v.round();
    if (v - r).abs() <= 1e-9 {
        r.max(0.0) as usize
    } else {
        v.floor().max(0.0) as usize
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Distance from scenario `xi` (all `P` blocks) to the unsafe set of `x`:
/// `max{0, min_p ((b−Aᵀx)ᵀξ_p + d_p − a_pᵀx) / ‖b−Aᵀx‖_*}`.
pub fn eval_distance(x: &[f64], xi: &[f64], spec: &SafetySpec, tag: DualNormTag) -> Result<f64> {
    if x.len() != spec.num_vars() || xi.len() != spec.num_rows() * spec.block_len() {
        return Err(Error::DimensionMismatch(
            "decision or scenario length does not match the safety spec".into(),
        ));
    }
    let dir = spec.direction(x);
    let norm = tag.dual().eval(&dir);
    if norm <= DEGENERACY_TOL {
        return Err(Error::DegenerateDirection { norm });
    }
    let kb = spec.block_len();
    let min_row = (0..spec.num_rows())
        .map(|p| dot(&dir, &xi[p * kb..(p + 1) * kb]) + spec.d(p) - dot(spec.a(p), x))
        .fold(f64::INFINITY, f64::min);
    Ok((min_row / norm).max(0.0))
}

/// Number of scenarios outside `S(x)`.
pub fn saa_violation_count(x: &[f64], inst: &Instance) -> usize {
    (0..inst.num_scenarios())
        .filter(|&i| {
            let s = inst.scenario_slack(x, i);
            match inst.safety.closedness {
                Closedness::Closed => s < -MEMBERSHIP_TOL,
                Closedness::Open => s <= MEMBERSHIP_TOL,
            }
        })
        .count()
}

/// One safety row with its own coefficient matrix, prior to lifting.
#[derive(Debug, Clone, PartialEq)]
pub struct RowBlock {
    /// `A_p`, row-major `num_vars × block_len`.
    pub weights: Vec<f64>,
    pub b: Vec<f64>,
    pub a: Vec<f64>,
    pub d: f64,
}

impl RowBlock {
    pub fn block_len(&self) -> usize {
        self.b.len()
    }
}

/// Lift rows with distinct `(A_p, b_p)` into a common-matrix safety set by
/// concatenating `Ã = [A_1 ⋯ A_P]` and `b̃ = (b_1, …, b_P)`. Each lifted block
/// `ξ̃_p` is zero outside the coordinates of row `p` (see [`lift_scenario`]).
pub fn lift_distinct_matrices(rows: &[RowBlock], closedness: Closedness) -> Result<SafetySpec> {
    let first = rows
        .first()
        .ok_or_else(|| Error::InvalidInstance("nothing to lift".into()))?;
    let num_vars = first.a.len();
    for (p, row) in rows.iter().enumerate() {
        if row.a.len() != num_vars || row.weights.len() != num_vars * row.block_len() {
            return Err(Error::DimensionMismatch(format!(
                "row block {p} is inconsistent with L = {num_vars}"
            )));
        }
    }
    let total: usize = rows.iter().map(RowBlock::block_len).sum();
    let mut weights = vec![0.0; num_vars * total];
    let mut b = Vec::with_capacity(total);
    let mut offset = 0;
    for row in rows {
        let kb = row.block_len();
        for l in 0..num_vars {
            for k in 0..kb {
                weights[l * total + offset + k] = row.weights[l * kb + k];
            }
        }
        b.extend_from_slice(&row.b);
        offset += kb;
    }
    SafetySpec::new(
        num_vars,
        total,
        weights,
        b,
        rows.iter().map(|r| r.a.clone()).collect(),
        rows.iter().map(|r| r.d).collect(),
        closedness,
    )
}

/// Embed one scenario's per-row blocks `ξ_p` into the lifted layout.
pub fn lift_scenario(blocks: &[Vec<f64>]) -> Vec<f64> {
    let total: usize = blocks.iter().map(Vec::len).sum();
    let mut out = vec![0.0; blocks.len() * total];
    let mut offset = 0;
    for (p, block) in blocks.iter().enumerate() {
        out[p * total + offset..p * total + offset + block.len()].copy_from_slice(block);
        offset += block.len();
    }
    out
}
