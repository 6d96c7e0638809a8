//! Benchmark generators for the portfolio and resource-planning applications
//! and the wiring of their big-M and quantile rules.
//!
//! Randomness comes from ChaCha8 seeded with the instance seed. Stream 0 draws
//! instance-wide data (costs, sparsity pattern); scenario `i` draws from
//! stream `i + 1`, so a scenario's data does not depend on how many scenarios
//! precede it.

use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::formulation::{self, BigMProvenance, BigMVector, FormulationKind, MipModel};
use crate::mixing::MixingSeparator;
use crate::model::{Closedness, Domain, Instance, InstanceKind, Norm, SafetySpec};
use crate::quantile::{
    build_quantile_table, resource_u_bounds, QuantileConfig, QuantileMode, QuantileTable,
    ResourceView,
};

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioConfig {
    pub assets: usize,
    /// Target return `w`.
    pub target: f64,
    /// Inclusive integer range for costs.
    pub cost_range: (u32, u32),
    pub yield_range: (f64, f64),
    pub n: usize,
    pub epsilon: f64,
    pub theta: f64,
    pub norm: Norm,
    pub seed: u64,
}

impl Default for PortfolioConfig {
    fn default() -> Self {
        Self {
            assets: 50,
            target: 1.0,
            cost_range: (1, 100),
            yield_range: (0.8, 1.5),
            n: 100,
            epsilon: 0.1,
            theta: 0.05,
            norm: Norm::L2,
            seed: 0,
        }
    }
}

impl PortfolioConfig {
    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.yield_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::NonpositiveYield { min: lo });
        }
        if self.assets == 0 || self.cost_range.0 > self.cost_range.1 {
            return Err(Error::InvalidInstance("empty asset set or cost range".into()));
        }
        if self.target.is_nan() || self.target <= 0.0 {
            return Err(Error::InvalidInstance("target return must be positive".into()));
        }
        Ok(())
    }
}

/// Resource-planning generator settings. The distributions are stand-in
/// defaults, configurable per field.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceConfig {
    pub resources: usize,
    pub groups: usize,
    pub n: usize,
    pub epsilon: f64,
    pub theta: f64,
    pub norm: Norm,
    pub seed: u64,
    /// Yield `ρ_d`, must lie in `(0, 1]`.
    pub rho_range: (f64, f64),
    pub mu_range: (f64, f64),
    /// Fraction of `(d, p)` pairs whose `μ_dp` is zero in every scenario.
    pub mu_zero_fraction: f64,
    pub lambda_range: (f64, f64),
    /// Per-unit cost of each resource.
    pub cost_range: (f64, f64),
}

impl Default for ResourceConfig {
    fn default() -> Self {
        Self {
            resources: 10,
            groups: 20,
            n: 100,
            epsilon: 0.1,
            theta: 0.001,
            norm: Norm::L2,
            seed: 0,
            rho_range: (0.7, 1.0),
            mu_range: (0.0, 1.0),
            mu_zero_fraction: 0.2,
            lambda_range: (5.0, 15.0),
            cost_range: (1.0, 10.0),
        }
    }
}

impl ResourceConfig {
    fn validate(&self) -> Result<()> {
        let ok_range = |(lo, hi): (f64, f64)| lo >= 0.0 && hi >= lo && hi.is_finite();
        if self.resources == 0 || self.groups == 0 {
            return Err(Error::InvalidInstance("need D >= 1 and P >= 1".into()));
        }
        if !(self.rho_range.0 > 0.0 && self.rho_range.1 <= 1.0 && ok_range(self.rho_range)) {
            return Err(Error::InvalidInstance("rho must lie in (0, 1]".into()));
        }
        if !(ok_range(self.mu_range) && ok_range(self.lambda_range) && ok_range(self.cost_range)) {
            return Err(Error::InvalidInstance("negative or empty data range".into()));
        }
        if !(0.0..1.0).contains(&self.mu_zero_fraction) {
            return Err(Error::InvalidInstance("mu_zero_fraction must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

fn uniform(range: (f64, f64)) -> Uniform<f64> {
    if range.1 > range.0 {
        Uniform::new(range.0, range.1)
    } else {
        Uniform::new_inclusive(range.0, range.1)
    }
}

/// Portfolio instance: one open covering row `ξᵀx > w` over `x ≥ 0`.
pub fn gen_portfolio(cfg: &PortfolioConfig) -> Result<Instance> {
    cfg.validate()?;
    let k = cfg.assets;
    let mut weights = vec![0.0; k * k];
    for l in 0..k {
        weights[l * k + l] = -1.0;
    }
    let spec = SafetySpec::new(
        k,
        k,
        weights,
        vec![0.0; k],
        vec![vec![0.0; k]],
        vec![-cfg.target],
        Closedness::Open,
    )?;
    let costs = Uniform::new_inclusive(cfg.cost_range.0, cfg.cost_range.1);
    let mut r0 = rng(cfg.seed, 0);
    let cost = (0..k).map(|_| f64::from(costs.sample(&mut r0))).collect();
    let yields = uniform(cfg.yield_range);
    let mut scenarios = Vec::with_capacity(cfg.n * k);
    for i in 0..cfg.n {
        let mut r = rng(cfg.seed, i as u64 + 1);
        scenarios.extend((0..k).map(|_| yields.sample(&mut r)));
    }
    Ok(Instance::new(
        spec,
        scenarios,
        cfg.epsilon,
        cfg.theta,
        cfg.norm,
        Domain::nonnegative(k),
        cost,
        InstanceKind::Portfolio { target: cfg.target },
    )?
    .with_seed(Some(cfg.seed)))
}

/// Resource-planning instance over `(x, y) ≥ 0` with `D` assignment rows
/// `ρ_d x_d − Σ_p y_dp ≥ 0` and `P` demand rows `Σ_d μ_dp y_dp − λ_p ≥ 0`.
///
/// All rows share one lifted block of length `D + DP + 1` holding
/// `(ρ, μ, λ)`: `A` maps `x_d ↔ ρ_d` and `y_dp ↔ μ_dp` with weight −1, and
/// `b` is −1 on the `λ` slot, so `b − Aᵀx = (x, y, −1)`. An assignment block
/// carries only `ρ_d`; a demand block carries `μ_·p` and `λ_p`.
pub fn gen_resource(cfg: &ResourceConfig) -> Result<Instance> {
    cfg.validate()?;
    let (dd, pp) = (cfg.resources, cfg.groups);
    let nvars = dd + dd * pp;
    let kb = dd + dd * pp + 1;
    let y = |d: usize, p: usize| dd + d * pp + p;
    let lam = dd + dd * pp;

    let mut weights = vec![0.0; nvars * kb];
    for d in 0..dd {
        weights[d * kb + d] = -1.0;
        for p in 0..pp {
            weights[y(d, p) * kb + y(d, p)] = -1.0;
        }
    }
    let mut b = vec![0.0; kb];
    b[lam] = -1.0;
    let mut a = Vec::with_capacity(dd + pp);
    for d in 0..dd {
        let mut row = vec![0.0; nvars];
        for p in 0..pp {
            row[y(d, p)] = 1.0;
        }
        a.push(row);
    }
    a.extend((0..pp).map(|_| vec![0.0; nvars]));
    let spec = SafetySpec::new(nvars, kb, weights, b, a, vec![0.0; dd + pp], Closedness::Closed)?;

    let mut r0 = rng(cfg.seed, 0);
    let mut cost = vec![0.0; nvars];
    let costs = uniform(cfg.cost_range);
    for c in cost.iter_mut().take(dd) {
        *c = costs.sample(&mut r0);
    }
    // structural zeros; every group keeps at least one serving resource
    let mut active = vec![vec![true; pp]; dd];
    for p in 0..pp {
        for row in active.iter_mut() {
            row[p] = !r0.gen_bool(cfg.mu_zero_fraction);
        }
        if !active.iter().any(|row| row[p]) {
            let d = r0.gen_range(0..dd);
            active[d][p] = true;
        }
    }

    let (rho_d, mu_d, lam_d) = (
        uniform(cfg.rho_range),
        uniform(cfg.mu_range),
        uniform(cfg.lambda_range),
    );
    let rows = dd + pp;
    let mut scenarios = Vec::with_capacity(cfg.n * rows * kb);
    for i in 0..cfg.n {
        let mut r = rng(cfg.seed, i as u64 + 1);
        let rho: Vec<f64> = (0..dd).map(|_| rho_d.sample(&mut r)).collect();
        let mu: Vec<Vec<f64>> = (0..dd)
            .map(|d| {
                (0..pp)
                    .map(|p| {
                        let v = mu_d.sample(&mut r);
                        if active[d][p] {
                            v
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        let lambda: Vec<f64> = (0..pp).map(|_| lam_d.sample(&mut r)).collect();
        for (d, &rho_val) in rho.iter().enumerate() {
            let mut block = vec![0.0; kb];
            block[d] = rho_val;
            scenarios.extend(block);
        }
        for p in 0..pp {
            let mut block = vec![0.0; kb];
            for d in 0..dd {
                block[y(d, p)] = mu[d][p];
            }
            block[lam] = lambda[p];
            scenarios.extend(block);
        }
    }
    Ok(Instance::new(
        spec,
        scenarios,
        cfg.epsilon,
        cfg.theta,
        cfg.norm,
        Domain::nonnegative(nvars),
        cost,
        InstanceKind::Resource {
            resources: dd,
            groups: pp,
        },
    )?
    .with_seed(Some(cfg.seed)))
}

/// `M^i = max{w, (ξ_max/ξ_min − 1)·w}` over every sampled coordinate.
pub fn portfolio_bigm(inst: &Instance) -> Result<BigMVector> {
    let w = match inst.kind {
        InstanceKind::Portfolio { target } => target,
        _ => {
            return Err(Error::InvalidInstance(
                "expected a portfolio instance".into(),
            ))
        }
    };
    let data = inst.scenario_data();
    let lo = data.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo.is_nan() || lo <= 0.0 {
        return Err(Error::NonpositiveYield { min: lo });
    }
    let m = w.max((hi / lo - 1.0) * w);
    BigMVector::uniform(inst.num_scenarios(), m, BigMProvenance::PortfolioRule)
}

/// `M^i` as the larger of the demand-side and assignment-side bounds built
/// from `U_dp` and the extreme yields `ρ_d^max`, `ρ_d^min`.
pub fn resource_bigm(inst: &Instance) -> Result<BigMVector> {
    let v = ResourceView::new(inst)?;
    let u = resource_u_bounds(inst)?;
    let n = v.num_scenarios();
    let (dd, pp) = (v.resources, v.groups);
    let rho_max: Vec<f64> = (0..dd)
        .map(|d| (0..n).map(|i| v.rho(i, d)).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let rho_min: Vec<f64> = (0..dd)
        .map(|d| (0..n).map(|i| v.rho(i, d)).fold(f64::INFINITY, f64::min))
        .collect();
    let values = (0..n)
        .map(|i| {
            let demand = (0..pp)
                .map(|p| {
                    let lam = v.lambda(i, p);
                    let cover: f64 = (0..dd).map(|d| v.mu(i, d, p) * u[d][p]).sum();
                    lam.max(cover - lam)
                })
                .fold(0.0, f64::max);
            let assign = (0..dd)
                .map(|d| {
                    let r = v.rho(i, d);
                    let gap = (1.0 - r / rho_max[d]).max(r / rho_min[d] - 1.0);
                    gap * u[d].iter().sum::<f64>()
                })
                .fold(0.0, f64::max);
            demand.max(assign)
        })
        .collect();
    BigMVector::new(values, BigMProvenance::ResourceRule)
}

/// The four compared formulations; `Mixing` is `Improved` plus root mixing
/// cuts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    Basic,
    Knapsack,
    Improved,
    Mixing,
}

impl Formulation {
    pub fn model_kind(self) -> FormulationKind {
        match self {
            Formulation::Basic => FormulationKind::Basic,
            Formulation::Knapsack => FormulationKind::Knapsack,
            Formulation::Improved | Formulation::Mixing => FormulationKind::Improved,
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::Basic => "basic",
            Formulation::Knapsack => "knapsack",
            Formulation::Improved => "improved",
            Formulation::Mixing => "mixing",
        })
    }
}

impl FromStr for Formulation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "basic" => Formulation::Basic,
            "knapsack" => Formulation::Knapsack,
            "improved" => Formulation::Improved,
            "mixing" => Formulation::Mixing,
            other => {
                return Err(Error::InvalidInstance(format!(
                    "unknown formulation '{other}'"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AppConfig {
    Portfolio(PortfolioConfig),
    Resource(ResourceConfig),
}

impl AppConfig {
    pub fn generate(&self) -> Result<Instance> {
        match self {
            AppConfig::Portfolio(c) => gen_portfolio(c),
            AppConfig::Resource(c) => gen_resource(c),
        }
    }
}

/// Everything `solve_mip` needs for one instance and formulation.
#[derive(Debug, Clone)]
pub struct Assembled {
    pub instance: Instance,
    pub model: MipModel,
    pub quantiles: QuantileTable,
    pub bigm: BigMVector,
    pub formulation: Formulation,
}

impl Assembled {
    /// Root cut source for `Mixing`; `None` for the other formulations.
    pub fn separator(&self) -> Result<Option<MixingSeparator>> {
        if self.formulation != Formulation::Mixing {
            return Ok(None);
        }
        MixingSeparator::from_table(&self.instance, &self.quantiles).map(Some)
    }
}

/// Big-M rule matching the instance kind; generic instances fall back to the
/// domain bound.
pub fn default_bigm(inst: &Instance) -> Result<BigMVector> {
    match inst.kind {
        InstanceKind::Portfolio { .. } => portfolio_bigm(inst),
        InstanceKind::Resource { .. } => resource_bigm(inst),
        InstanceKind::Generic => formulation::compute_bigm_domain(inst),
    }
}

/// Quantile mode matching the instance kind.
pub fn default_quantile_mode(inst: &Instance) -> QuantileMode {
    match inst.kind {
        InstanceKind::Portfolio { .. } => QuantileMode::CoveringClosedForm,
        InstanceKind::Resource { .. } => QuantileMode::ResourceRule,
        InstanceKind::Generic => QuantileMode::ExactIndividual,
    }
}

/// Build the model for an existing instance with the application rules.
///
/// `Basic` gets the knapsack row for portfolio instances (without it `x = 0`
/// is feasible at cost zero) and whenever θ = 0, where every scenario may be
/// dropped at no cost.
pub fn assemble(
    inst: Instance,
    formulation: Formulation,
    mode: Option<QuantileMode>,
) -> Result<Assembled> {
    let bigm = default_bigm(&inst)?;
    let cfg = QuantileConfig::new(mode.unwrap_or_else(|| default_quantile_mode(&inst)));
    let quantiles = build_quantile_table(&inst, &cfg)?;
    let mut model = formulation::build(formulation.model_kind(), &inst, &bigm, Some(&quantiles))?;
    if formulation == Formulation::Basic
        && (inst.theta == 0.0 || matches!(inst.kind, InstanceKind::Portfolio { .. }))
    {
        formulation::add_knapsack_row(&mut model, &inst);
    }
    Ok(Assembled {
        instance: inst,
        model,
        quantiles,
        bigm,
        formulation,
    })
}

pub fn assemble_benchmark(cfg: &AppConfig, formulation: Formulation) -> Result<Assembled> {
    assemble(cfg.generate()?, formulation, None)
}
