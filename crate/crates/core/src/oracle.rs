//! Brute-force ground truth for small instances.
//!
//! [`enumerate_optimum`] fixes every admissible `z` and solves the remaining
//! continuous problem in `(x, r, t)` with the disjunction written out
//! directly, so no big-M value enters. A violated scenario (`z^i = 1`) only
//! forces `r^i ≥ t`; a kept scenario forces `s_p(x, ξ^i) ≥ t − r^i` and, when
//! the knapsack row is in play, `s_p(x, ξ^i) ≥ 0`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formulation::{
    self, BigMProvenance, BigMVector, FormulationKind, LinearRow, MipModel, RowFamily, Sense,
};
use crate::model::{
    eval_distance, saa_violation_count, Closedness, Instance, DEGENERACY_TOL, MEMBERSHIP_TOL,
};
use crate::solver::{LpStatus, Relaxation};

pub const MAX_ORACLE_SCENARIOS: usize = 16;

/// Optimal continuous completion for one fixed `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasiblePoint {
    pub objective: f64,
    pub z: Vec<bool>,
    /// Values in the shared model layout (`x`, `z`, `r`, `t`, auxiliaries),
    /// usable directly with models from [`formulation::build`].
    pub values: Vec<f64>,
    num_x: usize,
}

impl FeasiblePoint {
    pub fn x(&self) -> &[f64] {
        &self.values[..self.num_x]
    }

    pub fn z_values(&self) -> Vec<f64> {
        self.z.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}

/// Membership test outcome for points with `b = Aᵀx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extraneous {
    /// Every `d_p > a_pᵀx`: the safe set is all of `R^K`.
    InDR,
    /// Some `d_p = a_pᵀx`, none strict, on an open safety set.
    OpenExtraneous,
    /// Some `d_p < a_pᵀx`: unsafe for both closures.
    ClosedExtraneous,
    /// Some `d_p = a_pᵀx`, none strict, on a closed safety set; the point is
    /// in the DR region there.
    Boundary,
}

fn check_size(inst: &Instance) -> Result<()> {
    let n = inst.num_scenarios();
    if n > MAX_ORACLE_SCENARIOS {
        return Err(Error::TooManyScenarios { n });
    }
    Ok(())
}

/// Variables, objective and the conic row of the shared layout, with no
/// scenario rows.
fn base_model(inst: &Instance) -> Result<MipModel> {
    let m = BigMVector::uniform(inst.num_scenarios(), 1.0, BigMProvenance::UserSupplied)?;
    let mut model = formulation::build_basic(inst, &m)?;
    model
        .linear_rows
        .retain(|r| !matches!(r.family, RowFamily::BigM1 | RowFamily::BigM2));
    Ok(model)
}

fn disjunctive_rows(inst: &Instance, model: &MipModel, z: &[bool], knapsack: bool) -> Vec<LinearRow> {
    let idx = &model.index;
    let mut rows = Vec::new();
    for (i, &violated) in z.iter().enumerate() {
        if violated {
            rows.push(LinearRow {
                terms: vec![(idx.r(i), 1.0), (idx.t(), -1.0)],
                sense: Sense::Ge,
                rhs: 0.0,
                label: format!("drop_{i}"),
                family: RowFamily::BigM1,
            });
            continue;
        }
        for p in 0..inst.num_rows() {
            let row = inst.row(i, p);
            let x_terms: Vec<(usize, f64)> = row
                .coef
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(l, &c)| (idx.x(l), c))
                .collect();
            let mut terms = x_terms.clone();
            terms.push((idx.t(), -1.0));
            terms.push((idx.r(i), 1.0));
            rows.push(LinearRow {
                terms,
                sense: Sense::Ge,
                rhs: -row.constant,
                label: format!("keep_{i}_{p}"),
                family: RowFamily::BigM2,
            });
            if knapsack {
                rows.push(LinearRow {
                    terms: x_terms,
                    sense: Sense::Ge,
                    rhs: -row.constant,
                    label: format!("safe_{i}_{p}"),
                    family: RowFamily::BigM3,
                });
            }
        }
    }
    rows
}

fn solve_fixed(
    inst: &Instance,
    base: &MipModel,
    z: Vec<bool>,
    knapsack: bool,
) -> Result<Option<FeasiblePoint>> {
    let mut model = base.clone();
    for (i, &v) in z.iter().enumerate() {
        let j = model.index.z(i);
        let val = if v { 1.0 } else { 0.0 };
        model.variables[j].lower = val;
        model.variables[j].upper = val;
    }
    model
        .linear_rows
        .extend(disjunctive_rows(inst, &model, &z, knapsack));
    let mut rel = Relaxation::new(&model)?;
    match rel.solve()? {
        LpStatus::Optimal => Ok(Some(FeasiblePoint {
            objective: rel.objective(),
            values: rel.values()[..model.variables.len()].to_vec(),
            z,
            num_x: model.index.num_x,
        })),
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Ok(Some(FeasiblePoint {
            objective: f64::NEG_INFINITY,
            values: rel.values()[..model.variables.len()].to_vec(),
            z,
            num_x: model.index.num_x,
        })),
    }
}

/// All `z` masks the formulation admits, in increasing numeric order.
fn masks(n: usize, limit: Option<usize>) -> Vec<u32> {
    (0u32..(1u32 << n))
        .filter(|m| limit.is_none_or(|k| m.count_ones() as usize <= k))
        .collect()
}

/// Optimal completion for every admissible `z` that has one.
///
/// `Basic` ranges over all of `{0,1}^N`. `Knapsack` and `Improved` keep only
/// `Σz ≤ ⌊εN⌋` and require kept scenarios to be safe; the reduced
/// coefficients and quantile rows of `Improved` are valid on that set, so both
/// share one disjunctive description.
pub fn enumerate_points(inst: &Instance, kind: FormulationKind) -> Result<Vec<FeasiblePoint>> {
    check_size(inst)?;
    let n = inst.num_scenarios();
    let knapsack = kind != FormulationKind::Basic;
    let base = base_model(inst)?;
    let limit = knapsack.then(|| inst.k());
    let results: Vec<Option<FeasiblePoint>> = masks(n, limit)
        .into_par_iter()
        .map(|mask| {
            let z = (0..n).map(|i| mask >> i & 1 == 1).collect();
            solve_fixed(inst, &base, z, knapsack)
        })
        .collect::<Result<_>>()?;
    Ok(results.into_iter().flatten().collect())
}

/// Best point of [`enumerate_points`]; ties keep the lowest mask. `None` when
/// no `z` admits a feasible completion.
pub fn enumerate_optimum(inst: &Instance, kind: FormulationKind) -> Result<Option<FeasiblePoint>> {
    Ok(enumerate_points(inst, kind)?
        .into_iter()
        .fold(None, |best: Option<FeasiblePoint>, p| match best {
            Some(b) if b.objective <= p.objective => Some(b),
            _ => Some(p),
        }))
}

/// Optimum of the nominal (θ = 0) problem.
pub fn enumerate_saa(inst: &Instance) -> Result<Option<FeasiblePoint>> {
    enumerate_optimum(&inst.with_theta(0.0), FormulationKind::Knapsack)
}

/// Enumerate `z` over an already built model (big-M values included), warm
/// starting one relaxation across masks. Masks above the knapsack budget are
/// skipped when the model carries a knapsack row.
pub fn enumerate_model(model: &MipModel) -> Result<Option<FeasiblePoint>> {
    let n = model.index.num_scenarios;
    if n > MAX_ORACLE_SCENARIOS {
        return Err(Error::TooManyScenarios { n });
    }
    let limit = model
        .linear_rows
        .iter()
        .find(|r| r.family == RowFamily::Knapsack)
        .map(|r| r.rhs.floor().max(0.0) as usize);
    let mut rel = Relaxation::new(model)?;
    let mut best: Option<FeasiblePoint> = None;
    for mask in masks(n, limit) {
        for i in 0..n {
            let v = f64::from(mask >> i & 1);
            rel.set_bounds(model.index.z(i), v, v);
        }
        let status = rel.solve()?;
        if status == LpStatus::Infeasible {
            continue;
        }
        let obj = if status == LpStatus::Unbounded {
            f64::NEG_INFINITY
        } else {
            rel.objective()
        };
        if best.as_ref().is_none_or(|b| obj < b.objective) {
            best = Some(FeasiblePoint {
                objective: obj,
                z: (0..n).map(|i| mask >> i & 1 == 1).collect(),
                values: rel.values()[..model.variables.len()].to_vec(),
                num_x: model.index.num_x,
            });
        }
    }
    Ok(best)
}

/// `max_t εt − (1/N) Σ (t − dist_i)_+ − θ`; the DR constraint holds at `x`
/// exactly when this is nonnegative.
///
/// Fails with `DegenerateDirection` when `b = Aᵀx`; see [`classify_extraneous`].
pub fn membership_margin(x: &[f64], inst: &Instance) -> Result<f64> {
    let tag = inst.dual_tag();
    let n = inst.num_scenarios();
    let dist = (0..n)
        .map(|i| eval_distance(x, inst.scenario(i), &inst.safety, tag))
        .collect::<Result<Vec<f64>>>()?;
    // concave piecewise linear in t: the maximum sits at 0 or a breakpoint
    let value = |t: f64| {
        inst.epsilon * t - dist.iter().map(|d| (t - d).max(0.0)).sum::<f64>() / n as f64
    };
    let best = dist
        .iter()
        .copied()
        .chain(std::iter::once(0.0))
        .map(value)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best - inst.theta)
}

/// Whether `x` satisfies the distributionally robust chance constraint.
/// Degenerate points are decided by [`classify_extraneous`]; θ = 0 reduces to
/// counting violated scenarios.
pub fn membership_drccp(x: &[f64], inst: &Instance) -> Result<bool> {
    if inst.theta == 0.0 {
        return Ok(saa_violation_count(x, inst) <= inst.k());
    }
    match membership_margin(x, inst) {
        Ok(m) => Ok(m >= -MEMBERSHIP_TOL * (1.0 + inst.theta)),
        Err(Error::DegenerateDirection { .. }) => Ok(matches!(
            classify_extraneous(x, inst)?,
            Extraneous::InDR | Extraneous::Boundary
        )),
        Err(e) => Err(e),
    }
}

/// Classify a point with `b = Aᵀx`, where `S(x)` is either everything or
/// nothing depending on the signs of `d_p − a_pᵀx`.
pub fn classify_extraneous(x: &[f64], inst: &Instance) -> Result<Extraneous> {
    let spec = &inst.safety;
    let norm = inst.dual_tag().dual().eval(&spec.direction(x));
    if norm > DEGENERACY_TOL {
        return Err(Error::NotDegenerate { norm });
    }
    let slacks: Vec<f64> = (0..spec.num_rows())
        .map(|p| spec.d(p) - crate::model::dot(spec.a(p), x))
        .collect();
    if slacks.iter().any(|&s| s < -MEMBERSHIP_TOL) {
        return Ok(Extraneous::ClosedExtraneous);
    }
    if slacks.iter().any(|&s| s <= MEMBERSHIP_TOL) {
        return Ok(match spec.closedness {
            Closedness::Open => Extraneous::OpenExtraneous,
            Closedness::Closed => Extraneous::Boundary,
        });
    }
    Ok(Extraneous::InDR)
}

/// Scenarios whose big-M value is smaller than `max_p |s_p(x, ξ^i)|`.
pub fn bigm_violations(inst: &Instance, x: &[f64], m: &BigMVector, tol: f64) -> Vec<usize> {
    (0..inst.num_scenarios())
        .filter(|&i| {
            let need = (0..inst.num_rows())
                .map(|p| inst.row_value(x, i, p).abs())
                .fold(0.0, f64::max);
            need > m.get(i) + tol * (1.0 + need)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Domain, InstanceKind, Norm, SafetySpec};
    use crate::solver::{solve_mip, Limits};

    /// `ξᵀx ≥ 1`, `x ∈ [0, 10]^2`.
    fn covering(scen: Vec<f64>, eps: f64, theta: f64, closed: Closedness) -> Instance {
        let spec = SafetySpec::new(
            2,
            2,
            vec![-1.0, 0.0, 0.0, -1.0],
            vec![0.0, 0.0],
            vec![vec![0.0, 0.0]],
            vec![-1.0],
            closed,
        )
        .unwrap();
        Instance::new(
            spec,
            scen,
            eps,
            theta,
            Norm::L1,
            Domain::boxed(2, 0.0, 10.0),
            vec![1.0, 2.0],
            InstanceKind::Generic,
        )
        .unwrap()
    }

    #[test]
    fn single_scenario_theta_zero_is_plain_lp() {
        // min x1 + 2 x2 s.t. 2 x1 + x2 ≥ 1 → x1 = 0.5
        let inst = covering(vec![2.0, 1.0], 0.5, 0.0, Closedness::Closed);
        let best = enumerate_optimum(&inst, FormulationKind::Knapsack)
            .unwrap()
            .unwrap();
        assert!((best.objective - 0.5).abs() < 1e-12);
        assert_eq!(best.z, vec![false]);
    }

    #[test]
    fn knapsack_prunes_masks() {
        assert_eq!(masks(4, Some(1)).len(), 5);
        assert_eq!(masks(4, None).len(), 16);
    }

    #[test]
    fn basic_admits_the_degenerate_origin() {
        let inst = covering(vec![2.0, 1.0, 1.0, 3.0, 0.5, 0.5], 0.4, 0.1, Closedness::Closed);
        let basic = enumerate_optimum(&inst, FormulationKind::Basic).unwrap().unwrap();
        assert!(basic.objective.abs() < 1e-12);
        assert_eq!(
            classify_extraneous(basic.x(), &inst).unwrap(),
            Extraneous::ClosedExtraneous
        );
        assert!(!membership_drccp(basic.x(), &inst).unwrap());
        let knap = enumerate_optimum(&inst, FormulationKind::Knapsack).unwrap().unwrap();
        assert!(knap.objective > 0.1);
        assert!(membership_drccp(knap.x(), &inst).unwrap());
    }

    #[test]
    fn theta_monotone() {
        let scen = vec![2.0, 1.0, 1.0, 3.0, 0.5, 0.5, 1.5, 1.5];
        let mut last = f64::NEG_INFINITY;
        for theta in [0.0, 0.01, 0.05, 0.2] {
            let inst = covering(scen.clone(), 0.3, theta, Closedness::Closed);
            let v = enumerate_optimum(&inst, FormulationKind::Knapsack)
                .unwrap()
                .unwrap()
                .objective;
            assert!(v >= last - 1e-9);
            last = v;
        }
    }

    #[test]
    fn classification_cases() {
        let inst = covering(vec![1.0, 1.0], 0.5, 0.1, Closedness::Open);
        // b − Aᵀx = x, so only x = 0 is degenerate; d − aᵀx = −1 < 0
        assert_eq!(
            classify_extraneous(&[0.0, 0.0], &inst).unwrap(),
            Extraneous::ClosedExtraneous
        );
        assert!(matches!(
            classify_extraneous(&[1.0, 0.0], &inst),
            Err(Error::NotDegenerate { .. })
        ));
        let in_dr = |d: f64, closed| {
            let spec = SafetySpec::new(
                1,
                1,
                vec![0.0],
                vec![0.0],
                vec![vec![0.0]],
                vec![d],
                closed,
            )
            .unwrap();
            let inst = Instance::new(
                spec,
                vec![1.0, 2.0],
                0.5,
                0.1,
                Norm::L2,
                Domain::boxed(1, 0.0, 1.0),
                vec![1.0],
                InstanceKind::Generic,
            )
            .unwrap();
            classify_extraneous(&[0.5], &inst).unwrap()
        };
        assert_eq!(in_dr(1.0, Closedness::Open), Extraneous::InDR);
        assert_eq!(in_dr(0.0, Closedness::Open), Extraneous::OpenExtraneous);
        assert_eq!(in_dr(0.0, Closedness::Closed), Extraneous::Boundary);
        assert_eq!(in_dr(-1.0, Closedness::Closed), Extraneous::ClosedExtraneous);
    }

    #[test]
    fn membership_certificate() {
        // all distances large relative to θ/ε: t = θ/ε with r = 0 works
        let inst = covering(vec![1.0, 1.0, 1.2, 0.9], 0.5, 0.1, Closedness::Closed);
        let x = [5.0, 5.0];
        let margin = membership_margin(&x, &inst).unwrap();
        assert!(margin > 0.0);
        // every scenario violated at distance 0: εt − t ≥ θ impossible
        let x = [0.1, 0.1];
        assert!(!membership_drccp(&x, &inst).unwrap());
    }

    #[test]
    fn model_enumeration_matches_branch_and_bound() {
        let inst = covering(vec![2.0, 1.0, 1.0, 3.0, 0.5, 0.5, 1.5, 1.2], 0.3, 0.05, Closedness::Closed);
        let m = formulation::compute_bigm_domain(&inst).unwrap();
        let model = formulation::build_knapsack(&inst, &m).unwrap();
        let by_model = enumerate_model(&model).unwrap().unwrap();
        let oracle = enumerate_optimum(&inst, FormulationKind::Knapsack).unwrap().unwrap();
        let bb = solve_mip(&model, None, &Limits::default()).unwrap();
        assert!((by_model.objective - oracle.objective).abs() < 1e-9);
        assert!((bb.objective - oracle.objective).abs() < 1e-7);
        assert!(bigm_violations(&inst, oracle.x(), &m, 1e-9).is_empty());
    }
}
