//! Solver-agnostic MIP representation and the Basic, Knapsack and Improved
//! builders.
//!
//! Variable layout is fixed: `x` (L), `z` (N), `r` (N), `t`, then any
//! auxiliary columns introduced by linear norm expansions.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{DualNormTag, Instance, Norm};
use crate::quantile::QuantileTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Ge,
    Le,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Ge => ">=",
            Sense::Le => "<=",
            Sense::Eq => "=",
        })
    }
}

/// Constraint family a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowFamily {
    /// `M(1 − z) ≥ t − r`
    BigM1,
    /// `s + M z ≥ t − r`, or its quantile-reduced form
    BigM2,
    /// `s + M z ≥ 0`
    BigM3,
    Knapsack,
    /// `ε t ≥ θ‖·‖_* + (1/N) Σ r` once the norm is linear
    Conic,
    /// `μᵀx ≥ q`
    Quantile,
    /// Epigraph rows of an expanded polyhedral norm.
    NormEpigraph,
    /// Rows appended by a cut loop.
    Cut,
}

impl RowFamily {
    pub fn name(self) -> &'static str {
        match self {
            RowFamily::BigM1 => "bigM1",
            RowFamily::BigM2 => "bigM2",
            RowFamily::BigM3 => "bigM3",
            RowFamily::Knapsack => "knapsack",
            RowFamily::Conic => "conic",
            RowFamily::Quantile => "quantile",
            RowFamily::NormEpigraph => "norm",
            RowFamily::Cut => "cut",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearRow {
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    pub label: String,
    pub family: RowFamily,
}

impl LinearRow {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * values[j]).sum()
    }

    /// Amount by which `values` violates the row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let a = self.activity(values);
        match self.sense {
            Sense::Ge => (self.rhs - a).max(0.0),
            Sense::Le => (a - self.rhs).max(0.0),
            Sense::Eq => (a - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffineExpr {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl AffineExpr {
    pub fn eval(&self, values: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(j, a)| a * values[j]).sum::<f64>()
    }
}

/// `Σ lhs ≥ scale · ‖inputs‖` where the norm is `tag.dual()`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeRow {
    pub lhs: Vec<(usize, f64)>,
    pub scale: f64,
    pub inputs: Vec<AffineExpr>,
    pub tag: DualNormTag,
    pub label: String,
}

impl ConeRow {
    pub fn input_values(&self, values: &[f64]) -> Vec<f64> {
        self.inputs.iter().map(|e| e.eval(values)).collect()
    }

    /// `scale·‖u‖ − lhs`, positive when violated.
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs: f64 = self.lhs.iter().map(|&(j, a)| a * values[j]).sum();
        self.scale * self.tag.dual().eval(&self.input_values(values)) - lhs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulationKind {
    Basic,
    Knapsack,
    Improved,
}

impl fmt::Display for FormulationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormulationKind::Basic => "basic",
            FormulationKind::Knapsack => "knapsack",
            FormulationKind::Improved => "improved",
        })
    }
}

/// Column positions of the model's named variable groups.
#[derive(Debug, Clone, PartialEq)]
pub struct VarIndex {
    pub num_x: usize,
    pub num_scenarios: usize,
}

impl VarIndex {
    pub fn x(&self, l: usize) -> usize {
        l
    }
    pub fn z(&self, i: usize) -> usize {
        self.num_x + i
    }
    pub fn r(&self, i: usize) -> usize {
        self.num_x + self.num_scenarios + i
    }
    pub fn t(&self) -> usize {
        self.num_x + 2 * self.num_scenarios
    }
    pub fn z_range(&self) -> std::ops::Range<usize> {
        self.num_x..self.num_x + self.num_scenarios
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MipModel {
    pub kind: FormulationKind,
    pub variables: Vec<Variable>,
    pub linear_rows: Vec<LinearRow>,
    pub cone_rows: Vec<ConeRow>,
    /// Minimization objective.
    pub objective: Vec<(usize, f64)>,
    pub index: VarIndex,
    /// Non-fatal notes raised while building, e.g. clamped coefficients.
    pub warnings: Vec<String>,
}

impl MipModel {
    pub fn add_var(&mut self, name: String, kind: VarKind, lower: f64, upper: f64) -> usize {
        self.variables.push(Variable {
            name,
            kind,
            lower,
            upper,
        });
        self.variables.len() - 1
    }

    pub fn add_row(
        &mut self,
        terms: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
        label: String,
        family: RowFamily,
    ) {
        self.linear_rows.push(LinearRow {
            terms,
            sense,
            rhs,
            label,
            family,
        });
    }

    pub fn count(&self, family: RowFamily) -> usize {
        self.linear_rows.iter().filter(|r| r.family == family).count()
    }

    pub fn num_binaries(&self) -> usize {
        self.variables
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .count()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(j, c)| c * values[j]).sum()
    }

    /// Largest violation of rows, cones and bounds at `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let rows = self.linear_rows.iter().map(|r| r.violation(values));
        let cones = self.cone_rows.iter().map(|c| c.violation(values).max(0.0));
        let bounds = self
            .variables
            .iter()
            .zip(values)
            .map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0));
        rows.chain(cones).chain(bounds).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BigMProvenance {
    DomainBound,
    PortfolioRule,
    ResourceRule,
    UserSupplied,
}

impl fmt::Display for BigMProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BigMProvenance::DomainBound => "domain",
            BigMProvenance::PortfolioRule => "portfolio",
            BigMProvenance::ResourceRule => "resource",
            BigMProvenance::UserSupplied => "user",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BigMVector {
    values: Vec<f64>,
    pub provenance: BigMProvenance,
}

impl BigMVector {
    pub fn new(values: Vec<f64>, provenance: BigMProvenance) -> Result<Self> {
        if let Some((i, &v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(Error::InvalidBigM {
                scenario: i,
                value: v,
            });
        }
        Ok(Self { values, provenance })
    }

    pub fn uniform(n: usize, value: f64, provenance: BigMProvenance) -> Result<Self> {
        Self::new(vec![value; n], provenance)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `M^i = max_{x∈X, p} |s_p(x, ξ^i)|` over a finite box, by the closed-form
/// box LP for each sign.
pub fn compute_bigm_domain(inst: &Instance) -> Result<BigMVector> {
    let dom = &inst.domain;
    if let Some(var) = (0..dom.len()).find(|&l| !dom.lower[l].is_finite() || !dom.upper[l].is_finite())
    {
        return Err(Error::UnboundedDomain { var });
    }
    let values = (0..inst.num_scenarios())
        .map(|i| {
            (0..inst.num_rows())
                .map(|p| {
                    let row = inst.row(i, p);
                    let (mut lo, mut hi) = (row.constant, row.constant);
                    for (l, &c) in row.coef.iter().enumerate() {
                        let (a, b) = (c * dom.lower[l], c * dom.upper[l]);
                        lo += a.min(b);
                        hi += a.max(b);
                    }
                    hi.abs().max(lo.abs())
                })
                .fold(0.0, f64::max)
                // any positive value is valid when every row is identically zero
                .max(1e-9)
        })
        .collect();
    BigMVector::new(values, BigMProvenance::DomainBound)
}

fn check_dims(inst: &Instance, m: &BigMVector) -> Result<()> {
    if m.len() != inst.num_scenarios() {
        return Err(Error::DimensionMismatch(format!(
            "{} big-M values for {} scenarios",
            m.len(),
            inst.num_scenarios()
        )));
    }
    Ok(())
}

/// Variables, the conic row with its norm expansion, and `bigM1`.
fn skeleton(inst: &Instance, m: &BigMVector, kind: FormulationKind) -> MipModel {
    let n = inst.num_scenarios();
    let l_dim = inst.num_vars();
    let index = VarIndex {
        num_x: l_dim,
        num_scenarios: n,
    };
    let mut model = MipModel {
        kind,
        variables: Vec::new(),
        linear_rows: Vec::new(),
        cone_rows: Vec::new(),
        objective: Vec::new(),
        index: index.clone(),
        warnings: Vec::new(),
    };
    for l in 0..l_dim {
        model.add_var(
            format!("x{l}"),
            VarKind::Continuous,
            inst.domain.lower[l],
            inst.domain.upper[l],
        );
    }
    for i in 0..n {
        model.add_var(format!("z{i}"), VarKind::Binary, 0.0, 1.0);
    }
    for i in 0..n {
        model.add_var(format!("r{i}"), VarKind::Continuous, 0.0, f64::INFINITY);
    }
    model.add_var("t".into(), VarKind::Continuous, 0.0, f64::INFINITY);
    model.objective = inst
        .cost
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(l, &c)| (l, c))
        .collect();

    // ε t − (1/N) Σ r
    let mut lhs = vec![(index.t(), inst.epsilon)];
    lhs.extend((0..n).map(|i| (index.r(i), -1.0 / n as f64)));

    // b − Aᵀx, coordinatewise
    let safety = &inst.safety;
    let inputs: Vec<AffineExpr> = (0..safety.block_len())
        .map(|k| AffineExpr {
            terms: (0..l_dim)
                .filter_map(|l| {
                    let w = safety.weight(l, k);
                    (w != 0.0).then_some((l, -w))
                })
                .collect(),
            constant: safety.b()[k],
        })
        .filter(|e| !e.terms.is_empty() || e.constant != 0.0)
        .collect();
    let tag = inst.dual_tag();
    let theta = inst.theta;

    if theta == 0.0 || inputs.is_empty() {
        model.add_row(lhs, Sense::Ge, 0.0, "conic".into(), RowFamily::Conic);
    } else {
        match tag.dual() {
            Norm::L2 => model.cone_rows.push(ConeRow {
                lhs,
                scale: theta,
                inputs,
                tag,
                label: "conic".into(),
            }),
            Norm::L1 => {
                // ‖u‖₁ ≤ Σ w_k with w_k ≥ |u_k|
                let mut conic = lhs;
                for (k, u) in inputs.iter().enumerate() {
                    let w = model.add_var(format!("w{k}"), VarKind::Continuous, 0.0, f64::INFINITY);
                    conic.push((w, -theta));
                    push_abs_rows(&mut model, w, u, &format!("norm_{k}"));
                }
                model.add_row(conic, Sense::Ge, 0.0, "conic".into(), RowFamily::Conic);
            }
            Norm::Linf => {
                let s = model.add_var("w".into(), VarKind::Continuous, 0.0, f64::INFINITY);
                for (k, u) in inputs.iter().enumerate() {
                    push_abs_rows(&mut model, s, u, &format!("norm_{k}"));
                }
                let mut conic = lhs;
                conic.push((s, -theta));
                model.add_row(conic, Sense::Ge, 0.0, "conic".into(), RowFamily::Conic);
            }
        }
    }

    for i in 0..n {
        // M(1 − z) ≥ t − r  ⇔  M z + t − r ≤ M
        model.add_row(
            vec![(index.z(i), m.get(i)), (index.t(), 1.0), (index.r(i), -1.0)],
            Sense::Le,
            m.get(i),
            format!("bigM1_{i}"),
            RowFamily::BigM1,
        );
    }
    model
}

/// `w ≥ u` and `w ≥ −u`.
fn push_abs_rows(model: &mut MipModel, w: usize, u: &AffineExpr, label: &str) {
    let mut plus = vec![(w, 1.0)];
    plus.extend(u.terms.iter().map(|&(j, a)| (j, -a)));
    model.add_row(plus, Sense::Ge, u.constant, format!("{label}_p"), RowFamily::NormEpigraph);
    let mut minus = vec![(w, 1.0)];
    minus.extend(u.terms.iter().copied());
    model.add_row(minus, Sense::Ge, -u.constant, format!("{label}_m"), RowFamily::NormEpigraph);
}

/// `coefᵀx + z_coef·z + t_sign·(t − r) ≥ −constant`.
fn push_scenario_row(
    model: &mut MipModel,
    inst: &Instance,
    i: usize,
    p: usize,
    z_coef: f64,
    with_t: bool,
    family: RowFamily,
) {
    let idx = model.index.clone();
    let row = inst.row(i, p);
    let mut terms: Vec<(usize, f64)> = row
        .coef
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(l, &c)| (idx.x(l), c))
        .collect();
    if z_coef != 0.0 {
        terms.push((idx.z(i), z_coef));
    }
    if with_t {
        terms.push((idx.t(), -1.0));
        terms.push((idx.r(i), 1.0));
    }
    model.add_row(
        terms,
        Sense::Ge,
        -row.constant,
        format!("{}_{i}_{p}", family.name()),
        family,
    );
}

/// Basic formulation: conic row, `bigM1` and `bigM2`.
pub fn build_basic(inst: &Instance, m: &BigMVector) -> Result<MipModel> {
    check_dims(inst, m)?;
    let mut model = skeleton(inst, m, FormulationKind::Basic);
    for i in 0..inst.num_scenarios() {
        for p in 0..inst.num_rows() {
            push_scenario_row(&mut model, inst, i, p, m.get(i), true, RowFamily::BigM2);
        }
    }
    Ok(model)
}

/// Adds `Σ z ≤ ⌊εN⌋` to `model`.
pub fn add_knapsack_row(model: &mut MipModel, inst: &Instance) {
    let idx = model.index.clone();
    model.add_row(
        (0..inst.num_scenarios()).map(|i| (idx.z(i), 1.0)).collect(),
        Sense::Le,
        inst.k() as f64,
        "knapsack".into(),
        RowFamily::Knapsack,
    );
}

/// Basic plus the knapsack row and `bigM3`.
pub fn build_knapsack(inst: &Instance, m: &BigMVector) -> Result<MipModel> {
    let mut model = build_basic(inst, m)?;
    model.kind = FormulationKind::Knapsack;
    add_knapsack_row(&mut model, inst);
    for i in 0..inst.num_scenarios() {
        for p in 0..inst.num_rows() {
            push_scenario_row(&mut model, inst, i, p, m.get(i), false, RowFamily::BigM3);
        }
    }
    Ok(model)
}

/// Effective `(z coefficient, quantile rhs)` for `(i, p)`.
///
/// The reduced coefficient is `C = −bᵀξ_p^i − d_p − q_p^i`. It is capped at
/// `M^i` (the quantile then lifts to `−M^i − bᵀξ_p^i − d_p`, implied by
/// `bigM3`), which also absorbs `q = −∞`.
pub fn reduced_coefficient(
    inst: &Instance,
    m: &BigMVector,
    qt: &QuantileTable,
    i: usize,
    p: usize,
) -> Result<(f64, f64)> {
    let q = qt.q(i, p);
    if q.is_nan() || q == f64::INFINITY {
        return Err(Error::InvalidQuantile {
            scenario: i,
            row: p,
            reason: format!("q = {q}"),
        });
    }
    let constant = inst.row(i, p).constant;
    let floor = -m.get(i) - constant;
    let q_eff = q.max(floor);
    Ok((-constant - q_eff, q_eff))
}

/// Knapsack model with `bigM2` replaced by the quantile-reduced rows, plus the
/// quantile rows `μ_p^iᵀx ≥ q_p^i`.
pub fn build_improved(inst: &Instance, m: &BigMVector, qt: &QuantileTable) -> Result<MipModel> {
    check_dims(inst, m)?;
    if qt.num_scenarios() != inst.num_scenarios() || qt.num_rows() != inst.num_rows() {
        return Err(Error::DimensionMismatch(
            "quantile table does not match the instance".into(),
        ));
    }
    if qt.k() != inst.k() {
        return Err(Error::InvalidInstance(format!(
            "quantile table built for k = {} but instance has k = {}",
            qt.k(),
            inst.k()
        )));
    }
    let mut model = skeleton(inst, m, FormulationKind::Improved);
    let (n, pp) = (inst.num_scenarios(), inst.num_rows());
    let mut coeffs = Vec::with_capacity(n * pp);
    let (mut capped, mut negative) = (0usize, 0usize);
    for i in 0..n {
        for p in 0..pp {
            let (c, q) = reduced_coefficient(inst, m, qt, i, p)?;
            if q > qt.q(i, p) {
                capped += 1;
            }
            if c < 0.0 {
                negative += 1;
            }
            coeffs.push((c, q));
        }
    }
    for i in 0..n {
        for p in 0..pp {
            push_scenario_row(&mut model, inst, i, p, coeffs[i * pp + p].0, true, RowFamily::BigM2);
        }
    }
    add_knapsack_row(&mut model, inst);
    for i in 0..n {
        for p in 0..pp {
            push_scenario_row(&mut model, inst, i, p, m.get(i), false, RowFamily::BigM3);
        }
    }
    let idx = model.index.clone();
    for i in 0..n {
        for p in 0..pp {
            let row = inst.row(i, p);
            let terms = row
                .coef
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(l, &c)| (idx.x(l), c))
                .collect();
            model.add_row(
                terms,
                Sense::Ge,
                coeffs[i * pp + p].1,
                format!("quantile_{i}_{p}"),
                RowFamily::Quantile,
            );
        }
    }
    if capped > 0 {
        model.warnings.push(format!(
            "{capped} quantile coefficients exceeded M and were capped at M"
        ));
    }
    if negative > 0 {
        model.warnings.push(format!(
            "{negative} reduced coefficients are negative (quantile above the scenario's own bound)"
        ));
    }
    Ok(model)
}

pub fn build(
    kind: FormulationKind,
    inst: &Instance,
    m: &BigMVector,
    qt: Option<&QuantileTable>,
) -> Result<MipModel> {
    match kind {
        FormulationKind::Basic => build_basic(inst, m),
        FormulationKind::Knapsack => build_knapsack(inst, m),
        FormulationKind::Improved => {
            let qt = qt.ok_or_else(|| {
                Error::InvalidInstance("the improved formulation needs a quantile table".into())
            })?;
            build_improved(inst, m, qt)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Closedness, Domain, InstanceKind, SafetySpec};
    use crate::quantile::{QuantileMode, QuantileTable};

    fn covering(n: usize, theta: f64, norm: Norm, scen: Vec<f64>) -> Instance {
        let spec = SafetySpec::new(
            2,
            2,
            vec![-1.0, 0.0, 0.0, -1.0],
            vec![0.0, 0.0],
            vec![vec![0.0, 0.0]],
            vec![-1.0],
            Closedness::Open,
        )
        .unwrap();
        assert_eq!(scen.len(), 2 * n);
        Instance::new(
            spec,
            scen,
            0.1,
            theta,
            norm,
            Domain::nonnegative(2),
            vec![3.0, 2.0],
            InstanceKind::Portfolio { target: 1.0 },
        )
        .unwrap()
    }

    #[test]
    fn single_scenario_counts() {
        let inst = covering(1, 0.1, Norm::L2, vec![1.0, 1.2]);
        let m = BigMVector::uniform(1, 1.0, BigMProvenance::UserSupplied).unwrap();
        let model = build_basic(&inst, &m).unwrap();
        assert_eq!(model.num_binaries(), 1);
        assert_eq!(model.count(RowFamily::BigM1), 1);
        assert_eq!(model.count(RowFamily::BigM2), 1);
        assert_eq!(model.count(RowFamily::Conic) + model.cone_rows.len(), 1);
        assert_eq!(model.variables.len(), 2 + 1 + 1 + 1);
    }

    #[test]
    fn portfolio_bigm2_row_shape() {
        let inst = covering(2, 0.1, Norm::L2, vec![0.9, 1.4, 1.1, 1.0]);
        let m = BigMVector::uniform(2, 1.0, BigMProvenance::PortfolioRule).unwrap();
        let model = build_basic(&inst, &m).unwrap();
        let row = model
            .linear_rows
            .iter()
            .find(|r| r.label == "bigM2_1_0")
            .unwrap();
        // x·ξ¹ − w + M z¹ ≥ t − r¹
        assert_eq!(row.rhs, 1.0);
        assert_eq!(row.sense, Sense::Ge);
        let idx = &model.index;
        let mut terms = row.terms.clone();
        terms.sort_by_key(|t| t.0);
        assert_eq!(
            terms,
            vec![(0, 1.1), (1, 1.0), (idx.z(1), 1.0), (idx.r(1), 1.0), (idx.t(), -1.0)]
        );
    }

    #[test]
    fn knapsack_row_counts_and_rhs() {
        let scen: Vec<f64> = (0..20).map(|v| 1.0 + v as f64 / 40.0).collect();
        let inst = covering(10, 0.05, Norm::L1, scen);
        let m = BigMVector::uniform(10, 1.0, BigMProvenance::UserSupplied).unwrap();
        let model = build_knapsack(&inst, &m).unwrap();
        assert_eq!(model.count(RowFamily::Knapsack), 1);
        assert_eq!(model.count(RowFamily::BigM3), 10);
        let knap = model
            .linear_rows
            .iter()
            .find(|r| r.family == RowFamily::Knapsack)
            .unwrap();
        assert_eq!(knap.rhs, 1.0);
        assert!(model.cone_rows.is_empty());
        assert_eq!(model.count(RowFamily::Conic), 1);
        // dual of L1 is Linf: one auxiliary, two rows per input coordinate
        assert_eq!(model.count(RowFamily::NormEpigraph), 4);
    }

    #[test]
    fn improved_with_worst_bound_equals_knapsack_coefficients() {
        let scen = vec![0.9, 1.4, 1.1, 1.0, 1.3, 0.8];
        let inst = covering(3, 0.1, Norm::L2, scen);
        let m = BigMVector::uniform(3, 1.0, BigMProvenance::UserSupplied).unwrap();
        let betas: Vec<f64> = (0..3).map(|i| -m.get(i) - inst.row(i, 0).constant).collect();
        let qt = QuantileTable::from_user_bounds(&inst, betas).unwrap();
        assert_eq!(qt.row_modes()[0], QuantileMode::UserBound);
        let improved = build_improved(&inst, &m, &qt).unwrap();
        let knapsack = build_knapsack(&inst, &m).unwrap();
        let z_coef = |model: &MipModel, i: usize| {
            let row = model
                .linear_rows
                .iter()
                .find(|r| r.label == format!("bigM2_{i}_0"))
                .unwrap();
            row.terms.iter().find(|t| t.0 == model.index.z(i)).unwrap().1
        };
        for i in 0..3 {
            assert!((z_coef(&improved, i) - z_coef(&knapsack, i)).abs() < 1e-15);
        }
        assert_eq!(improved.count(RowFamily::Quantile), 3);
    }

    #[test]
    fn improved_portfolio_coefficient_is_w_minus_q() {
        let inst = covering(3, 0.1, Norm::L2, vec![0.9, 1.4, 1.1, 1.0, 1.3, 0.8]);
        let m = BigMVector::uniform(3, 1.0, BigMProvenance::PortfolioRule).unwrap();
        let q = vec![0.7, 0.95, 0.6];
        let qt = QuantileTable::from_user_bounds(&inst, q.clone()).unwrap();
        let model = build_improved(&inst, &m, &qt).unwrap();
        for (i, qi) in q.iter().enumerate() {
            let row = model
                .linear_rows
                .iter()
                .find(|r| r.label == format!("bigM2_{i}_0"))
                .unwrap();
            let c = row.terms.iter().find(|t| t.0 == model.index.z(i)).unwrap().1;
            assert!((c - (1.0 - qi)).abs() < 1e-15);
        }
    }

    #[test]
    fn improved_rejects_nan_quantile() {
        let inst = covering(2, 0.1, Norm::L2, vec![0.9, 1.4, 1.1, 1.0]);
        let m = BigMVector::uniform(2, 1.0, BigMProvenance::PortfolioRule).unwrap();
        let qt = QuantileTable::from_user_bounds(&inst, vec![0.5, f64::NAN]).unwrap();
        assert!(matches!(
            build_improved(&inst, &m, &qt),
            Err(Error::InvalidQuantile { scenario: 1, .. })
        ));
    }

    #[test]
    fn domain_bigm_singleton_and_unbounded() {
        let spec = SafetySpec::new(
            1,
            1,
            vec![-1.0],
            vec![0.0],
            vec![vec![0.0]],
            vec![-2.5],
            Closedness::Closed,
        )
        .unwrap();
        let mut inst = Instance::new(
            spec,
            vec![1.0, 3.0],
            0.4,
            0.1,
            Norm::L2,
            Domain::boxed(1, 0.0, 0.0),
            vec![1.0],
            InstanceKind::Generic,
        )
        .unwrap();
        let m = compute_bigm_domain(&inst).unwrap();
        assert_eq!(m.values(), &[2.5, 2.5]);
        inst.domain = Domain::nonnegative(1);
        assert!(matches!(
            compute_bigm_domain(&inst),
            Err(Error::UnboundedDomain { var: 0 })
        ));
    }

    #[test]
    fn bigm_vector_rejects_nonpositive() {
        assert!(BigMVector::new(vec![1.0, 0.0], BigMProvenance::UserSupplied).is_err());
        assert!(BigMVector::new(vec![f64::INFINITY], BigMProvenance::UserSupplied).is_err());
    }
}
