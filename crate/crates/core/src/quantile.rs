//! Single-scenario subproblem values `h̄^j(μ)`, the `(k+1)`-th largest
//! quantiles `q_p^i` used to shrink big-M coefficients, and closed-form lower
//! bounds for covering/packing rows and the resource-planning structure.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Domain, Instance, InstanceKind};
use crate::solver::lp::{self, LpProblem, LpStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuantileMode {
    ExactJoint,
    ExactIndividual,
    CoveringClosedForm,
    PackingClosedForm,
    ResourceRule,
    UserBound,
}

impl QuantileMode {
    pub fn is_exact(self) -> bool {
        matches!(self, QuantileMode::ExactJoint | QuantileMode::ExactIndividual)
    }
}

impl fmt::Display for QuantileMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuantileMode::ExactJoint => "exact-joint",
            QuantileMode::ExactIndividual => "exact-individual",
            QuantileMode::CoveringClosedForm => "covering",
            QuantileMode::PackingClosedForm => "packing",
            QuantileMode::ResourceRule => "resource",
            QuantileMode::UserBound => "user",
        })
    }
}

impl FromStr for QuantileMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "exact-joint" | "joint" => QuantileMode::ExactJoint,
            "exact-individual" | "individual" => QuantileMode::ExactIndividual,
            "covering" => QuantileMode::CoveringClosedForm,
            "packing" => QuantileMode::PackingClosedForm,
            "resource" => QuantileMode::ResourceRule,
            "user" => QuantileMode::UserBound,
            other => {
                return Err(Error::InvalidInstance(format!(
                    "unknown quantile mode '{other}'"
                )))
            }
        })
    }
}

/// Which scenario rows constrain a subproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSelection {
    Individual(usize),
    Joint,
}

/// The relaxation `X̄ ⊇ X` used by exact subproblems.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainRelax {
    /// `X` itself; domains here are boxes, so this keeps every bound.
    Bounds,
    /// Only the sign pattern of the bounds (`x ≥ 0` where `X` is nonnegative).
    SignOnly,
    Free,
    Custom(Domain),
}

impl DomainRelax {
    pub fn resolve(&self, inst: &Instance) -> Domain {
        let n = inst.num_vars();
        match self {
            DomainRelax::Bounds => inst.domain.clone(),
            DomainRelax::SignOnly => Domain {
                lower: inst
                    .domain
                    .lower
                    .iter()
                    .map(|&l| if l >= 0.0 { 0.0 } else { f64::NEG_INFINITY })
                    .collect(),
                upper: inst
                    .domain
                    .upper
                    .iter()
                    .map(|&u| if u <= 0.0 { 0.0 } else { f64::INFINITY })
                    .collect(),
            },
            DomainRelax::Free => Domain {
                lower: vec![f64::NEG_INFINITY; n],
                upper: vec![f64::INFINITY; n],
            },
            DomainRelax::Custom(d) => d.clone(),
        }
    }
}

/// `min μᵀx` over `X̄` and the selected rows of scenario `j`; `+∞` when
/// infeasible and `−∞` when unbounded.
pub fn subproblem_value(
    mu: &[f64],
    j: usize,
    inst: &Instance,
    rows: RowSelection,
    domain: &Domain,
) -> Result<f64> {
    let mut lp = LpProblem {
        cost: mu.to_vec(),
        lower: domain.lower.clone(),
        upper: domain.upper.clone(),
        rows: Vec::new(),
    };
    let selected: Vec<usize> = match rows {
        RowSelection::Individual(p) => vec![p],
        RowSelection::Joint => (0..inst.num_rows()).collect(),
    };
    for p in selected {
        let row = inst.row(j, p);
        lp.add_row(
            row.coef
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(l, &c)| (l, c))
                .collect(),
            -row.constant,
            f64::INFINITY,
        );
    }
    let sol = lp::solve(&lp)?;
    Ok(match sol.status {
        LpStatus::Optimal => sol.objective,
        LpStatus::Infeasible => f64::INFINITY,
        LpStatus::Unbounded => f64::NEG_INFINITY,
    })
}

/// Scenario indices sorted by non-increasing value; ties keep ascending index.
pub fn sort_desc(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    idx
}

/// The `(k+1)`-th largest of `values`.
pub fn kth_largest(values: &[f64], k: usize) -> Result<f64> {
    if values.iter().all(|v| *v == f64::INFINITY) {
        return Err(Error::AllInfeasible);
    }
    if k >= values.len() {
        return Err(Error::InvalidInstance(format!(
            "k = {k} needs more than {} values",
            values.len()
        )));
    }
    let order = sort_desc(values);
    Ok(values[order[k]])
}

/// `q` for probe direction `mu` over all scenarios.
pub fn quantile(
    mu: &[f64],
    inst: &Instance,
    rows: RowSelection,
    domain: &Domain,
) -> Result<f64> {
    let h = (0..inst.num_scenarios())
        .map(|j| subproblem_value(mu, j, inst, rows, domain))
        .collect::<Result<Vec<_>>>()?;
    kth_largest(&h, inst.k())
}

/// Closed-form `min{c^i_ℓ · rhs_j / c^j_ℓ : ℓ ∈ supp}` for covering or packing
/// rows over the nonnegative orthant.
pub fn covering_packing_bound(i: usize, p: usize, j: usize, inst: &Instance) -> Result<f64> {
    if !inst.domain.is_nonnegative() {
        return Err(Error::InvalidInstance(
            "closed-form bound needs a nonnegative domain".into(),
        ));
    }
    let ci = &inst.row(i, p).coef;
    let cj = &inst.row(j, p).coef;
    let rhs = -inst.row(j, p).constant;
    if ci.iter().zip(cj).any(|(a, b)| (*a != 0.0) != (*b != 0.0)) {
        return Err(Error::SupportMismatch { i, j, row: p });
    }
    let covering = ci.iter().chain(cj).all(|&c| c >= 0.0) && rhs >= 0.0;
    let packing = ci.iter().chain(cj).all(|&c| c <= 0.0) && rhs <= 0.0;
    if !covering && !packing {
        return Err(Error::SignViolation { scenario: j, row: p });
    }
    let mut best = f64::INFINITY;
    let mut any = false;
    for (a, b) in ci.iter().zip(cj) {
        if *b != 0.0 {
            any = true;
            best = best.min(a * rhs / b);
        }
    }
    if !any {
        // no decision enters the row: feasible iff rhs ≤ 0, and μ = 0
        return Ok(if rhs > 0.0 { f64::INFINITY } else { 0.0 });
    }
    Ok(best)
}

/// `(ρ, μ, λ)` of the resource-planning layout for scenario `i`.
#[derive(Debug, Clone, Copy)]
pub struct ResourceView<'a> {
    inst: &'a Instance,
    pub resources: usize,
    pub groups: usize,
}

impl<'a> ResourceView<'a> {
    pub fn new(inst: &'a Instance) -> Result<Self> {
        match inst.kind {
            InstanceKind::Resource { resources, groups } => Ok(Self {
                inst,
                resources,
                groups,
            }),
            _ => Err(Error::InvalidInstance(
                "expected a resource-planning instance".into(),
            )),
        }
    }

    pub fn rho(&self, i: usize, d: usize) -> f64 {
        self.inst.block(i, d)[d]
    }

    pub fn mu(&self, i: usize, d: usize, p: usize) -> f64 {
        self.inst.block(i, self.resources + p)[self.resources + d * self.groups + p]
    }

    pub fn lambda(&self, i: usize, p: usize) -> f64 {
        let d = self.resources;
        self.inst.block(i, d + p)[d + d * self.groups]
    }

    pub fn num_scenarios(&self) -> usize {
        self.inst.num_scenarios()
    }
}

/// `U_dp = max{λ_p^i / μ_dp^i : μ_dp^i > 0}`, or 0 when no scenario has
/// `μ_dp^i > 0`.
pub fn resource_u_bounds(inst: &Instance) -> Result<Vec<Vec<f64>>> {
    let v = ResourceView::new(inst)?;
    Ok((0..v.resources)
        .map(|d| {
            (0..v.groups)
                .map(|p| {
                    (0..v.num_scenarios())
                        .filter(|&i| v.mu(i, d, p) > 0.0)
                        .map(|i| v.lambda(i, p) / v.mu(i, d, p))
                        .fold(0.0, f64::max)
                })
                .collect()
        })
        .collect())
}

/// `L_dp^j`, the least `y_dp` that covers demand `p` in scenario `j` when every
/// other resource runs at its bound.
pub fn resource_l_bound(
    v: &ResourceView<'_>,
    d: usize,
    p: usize,
    j: usize,
    u: &[Vec<f64>],
) -> Result<f64> {
    let others: f64 = (0..v.resources).filter(|&e| e != d).map(|e| u[e][p]).sum();
    let need = v.lambda(j, p) - others;
    let mu = v.mu(j, d, p);
    if mu > 0.0 {
        Ok(need.max(0.0) / mu)
    } else if need > 0.0 {
        Err(Error::InfeasibleScenario {
            scenario: j,
            resource: d,
            group: p,
        })
    } else {
        Ok(0.0)
    }
}

/// Lower bound on `h̄_d^j` for the assignment-row probe of `(d, i)`.
pub fn resource_quantile_bound(
    d: usize,
    i: usize,
    j: usize,
    inst: &Instance,
    u: &[Vec<f64>],
) -> Result<f64> {
    let v = ResourceView::new(inst)?;
    let factor = v.rho(i, d) / v.rho(j, d) - 1.0;
    if factor >= 0.0 {
        let mut sum = 0.0;
        for p in 0..v.groups {
            sum += resource_l_bound(&v, d, p, j, u)?;
        }
        Ok(factor * sum)
    } else {
        Ok(factor * u[d].iter().sum::<f64>())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantileConfig {
    pub mode: QuantileMode,
    pub domain: DomainRelax,
}

impl QuantileConfig {
    pub fn new(mode: QuantileMode) -> Self {
        Self {
            mode,
            domain: DomainRelax::Bounds,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantileTable {
    n: usize,
    p: usize,
    k: usize,
    row_modes: Vec<QuantileMode>,
    /// `q[i·P + p]`
    q: Vec<f64>,
    /// `h[i·P + p]` holds the N values `h̄^j`, or is empty when not computed.
    h: Vec<Vec<f64>>,
}

impl QuantileTable {
    pub fn from_parts(
        inst: &Instance,
        row_modes: Vec<QuantileMode>,
        q: Vec<f64>,
        h: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let (n, p) = (inst.num_scenarios(), inst.num_rows());
        if row_modes.len() != p || q.len() != n * p || h.len() != n * p {
            return Err(Error::DimensionMismatch("quantile table shape".into()));
        }
        if h.iter().any(|v| !v.is_empty() && v.len() != n) {
            return Err(Error::DimensionMismatch("h̄ vector length".into()));
        }
        Ok(Self {
            n,
            p,
            k: inst.k(),
            row_modes,
            q,
            h,
        })
    }

    /// Table of user lower bounds `β_p^i` (row-major `i·P + p`).
    pub fn from_user_bounds(inst: &Instance, betas: Vec<f64>) -> Result<Self> {
        let np = betas.len();
        Self::from_parts(
            inst,
            vec![QuantileMode::UserBound; inst.num_rows()],
            betas,
            vec![Vec::new(); np],
        )
    }

    pub fn q(&self, i: usize, p: usize) -> f64 {
        self.q[i * self.p + p]
    }

    pub fn q_values(&self) -> &[f64] {
        &self.q
    }

    /// `h̄^j(μ_p^i)` for all `j`, if recorded.
    pub fn h_values(&self, i: usize, p: usize) -> Option<&[f64]> {
        let v = &self.h[i * self.p + p];
        (!v.is_empty()).then_some(v.as_slice())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_scenarios(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.p
    }

    pub fn row_modes(&self) -> &[QuantileMode] {
        &self.row_modes
    }
}

/// Mode used for row `p` under configuration mode `mode`.
pub fn row_mode(inst: &Instance, mode: QuantileMode, p: usize) -> QuantileMode {
    match (mode, &inst.kind) {
        (QuantileMode::ResourceRule, InstanceKind::Resource { resources, .. }) if p >= *resources => {
            QuantileMode::CoveringClosedForm
        }
        _ => mode,
    }
}

/// `(q_p^i, [h̄^j(μ_p^i)]_j)` for one probe.
pub fn probe_values(
    inst: &Instance,
    cfg: &QuantileConfig,
    u: Option<&[Vec<f64>]>,
    i: usize,
    p: usize,
) -> Result<(f64, Vec<f64>)> {
    let mode = row_mode(inst, cfg.mode, p);
    let n = inst.num_scenarios();
    let h: Vec<f64> = match mode {
        QuantileMode::ExactIndividual | QuantileMode::ExactJoint => {
            let dom = cfg.domain.resolve(inst);
            let rows = if mode == QuantileMode::ExactJoint {
                RowSelection::Joint
            } else {
                RowSelection::Individual(p)
            };
            let mu = &inst.row(i, p).coef;
            (0..n)
                .map(|j| subproblem_value(mu, j, inst, rows, &dom))
                .collect::<Result<_>>()?
        }
        QuantileMode::CoveringClosedForm | QuantileMode::PackingClosedForm => (0..n)
            .map(|j| covering_packing_bound(i, p, j, inst))
            .collect::<Result<_>>()?,
        QuantileMode::ResourceRule => {
            let u = u.ok_or_else(|| Error::InvalidInstance("missing U bounds".into()))?;
            (0..n)
                .map(|j| match resource_quantile_bound(p, i, j, inst, u) {
                    // scenario j cannot be satisfied: it must be violated
                    Err(Error::InfeasibleScenario { .. }) => Ok(f64::INFINITY),
                    other => other,
                })
                .collect::<Result<_>>()?
        }
        QuantileMode::UserBound => {
            return Err(Error::InvalidInstance(
                "user bounds are supplied, not computed".into(),
            ))
        }
    };
    let q = kth_largest(&h, inst.k())?;
    Ok((q, h))
}

/// Populate the full `N × P` table. Exact modes issue `N` LP solves per probe.
pub fn build_quantile_table(inst: &Instance, cfg: &QuantileConfig) -> Result<QuantileTable> {
    let (n, pp) = (inst.num_scenarios(), inst.num_rows());
    let u = if cfg.mode == QuantileMode::ResourceRule {
        Some(resource_u_bounds(inst)?)
    } else {
        None
    };
    let probes: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..pp).map(move |p| (i, p))).collect();
    let results = probes
        .par_iter()
        .map(|&(i, p)| probe_values(inst, cfg, u.as_deref(), i, p))
        .collect::<Result<Vec<_>>>()?;
    let (q, h): (Vec<f64>, Vec<Vec<f64>>) = results.into_iter().unzip();
    let modes = (0..pp).map(|p| row_mode(inst, cfg.mode, p)).collect();
    QuantileTable::from_parts(inst, modes, q, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Closedness, Norm, SafetySpec};

    fn covering_inst(scen: Vec<f64>, eps: f64) -> Instance {
        let spec = SafetySpec::new(
            2,
            2,
            vec![-1.0, 0.0, 0.0, -1.0],
            vec![0.0, 0.0],
            vec![vec![0.0, 0.0]],
            vec![-4.0],
            Closedness::Closed,
        )
        .unwrap();
        Instance::new(
            spec,
            scen,
            eps,
            0.1,
            Norm::L2,
            Domain::nonnegative(2),
            vec![1.0, 1.0],
            InstanceKind::Generic,
        )
        .unwrap()
    }

    #[test]
    fn kth_largest_examples() {
        assert_eq!(kth_largest(&[9.0, 5.0, 3.0, 1.0], 1).unwrap(), 5.0);
        assert_eq!(kth_largest(&[2.0; 5], 3).unwrap(), 2.0);
        assert_eq!(kth_largest(&[1.0, 7.0, 3.0], 0).unwrap(), 7.0);
        assert_eq!(
            kth_largest(&[f64::NEG_INFINITY, 1.0, f64::NEG_INFINITY], 1).unwrap(),
            f64::NEG_INFINITY
        );
        assert!(matches!(
            kth_largest(&[f64::INFINITY; 3], 1),
            Err(Error::AllInfeasible)
        ));
    }

    #[test]
    fn sort_ties_break_by_index() {
        assert_eq!(sort_desc(&[1.0, 3.0, 1.0, 3.0]), vec![1, 3, 0, 2]);
    }

    #[test]
    fn covering_closed_form_example() {
        // c^i = (2, 4), c^j = (1, 2), rhs_j = 4 → min{8, 8} = 8
        let inst = covering_inst(vec![2.0, 4.0, 1.0, 2.0], 0.4);
        let v = covering_packing_bound(0, 0, 1, &inst).unwrap();
        assert_eq!(v, 8.0);
        let lp = subproblem_value(
            &inst.row(0, 0).coef,
            1,
            &inst,
            RowSelection::Individual(0),
            &Domain::nonnegative(2),
        )
        .unwrap();
        assert!((lp - v).abs() < 1e-9);
        assert_eq!(covering_packing_bound(1, 0, 1, &inst).unwrap(), 4.0);
    }

    #[test]
    fn covering_zero_rhs_and_support_mismatch() {
        let spec = SafetySpec::new(
            2,
            2,
            vec![-1.0, 0.0, 0.0, -1.0],
            vec![0.0, 0.0],
            vec![vec![0.0, 0.0]],
            vec![0.0],
            Closedness::Closed,
        )
        .unwrap();
        let inst = Instance::new(
            spec,
            vec![1.0, 2.0, 3.0, 0.0],
            0.4,
            0.1,
            Norm::L2,
            Domain::nonnegative(2),
            vec![1.0, 1.0],
            InstanceKind::Generic,
        )
        .unwrap();
        assert_eq!(covering_packing_bound(0, 0, 0, &inst).unwrap(), 0.0);
        assert!(matches!(
            covering_packing_bound(0, 0, 1, &inst),
            Err(Error::SupportMismatch { .. })
        ));
    }

    #[test]
    fn mixed_signs_are_rejected() {
        let inst = covering_inst(vec![2.0, -1.0, 1.0, 1.0], 0.4);
        assert!(matches!(
            covering_packing_bound(0, 0, 1, &inst),
            Err(Error::SignViolation { .. })
        ));
    }

    #[test]
    fn own_probe_respects_row_bound() {
        let inst = covering_inst(vec![2.0, 4.0, 1.0, 2.0, 3.0, 0.5], 0.34);
        for i in 0..3 {
            let mu = &inst.row(i, 0).coef;
            let h = subproblem_value(mu, i, &inst, RowSelection::Individual(0), &Domain {
                lower: vec![f64::NEG_INFINITY; 2],
                upper: vec![f64::INFINITY; 2],
            })
            .unwrap();
            assert!((h + inst.row(i, 0).constant).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_direction_is_zero() {
        let inst = covering_inst(vec![2.0, 4.0, 1.0, 2.0], 0.4);
        let v = subproblem_value(&[0.0, 0.0], 1, &inst, RowSelection::Joint, &Domain::nonnegative(2))
            .unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn k_zero_gives_maximum() {
        let scen = vec![2.0, 4.0, 1.0, 2.0, 3.0, 0.5, 1.0, 1.0, 0.7, 2.2, 1.5, 1.5];
        let inst = covering_inst(scen, 0.1);
        assert_eq!(inst.k(), 0);
        let t = build_quantile_table(&inst, &QuantileConfig::new(QuantileMode::CoveringClosedForm))
            .unwrap();
        for i in 0..6 {
            let h = t.h_values(i, 0).unwrap();
            assert_eq!(t.q(i, 0), h.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        }
    }

    #[test]
    fn closed_form_matches_exact_on_orthant() {
        let scen = vec![2.0, 4.0, 1.0, 2.0, 3.0, 0.5, 1.0, 1.0, 0.7, 2.2];
        let inst = covering_inst(scen, 0.2);
        let cf = build_quantile_table(&inst, &QuantileConfig::new(QuantileMode::CoveringClosedForm))
            .unwrap();
        let ex = build_quantile_table(&inst, &QuantileConfig::new(QuantileMode::ExactIndividual))
            .unwrap();
        for i in 0..5 {
            assert!((cf.q(i, 0) - ex.q(i, 0)).abs() < 1e-9);
        }
    }
}
