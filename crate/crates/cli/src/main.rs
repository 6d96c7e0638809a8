use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use drccp::apps::{self, AppConfig, Assembled, Formulation, PortfolioConfig, ResourceConfig};
use drccp::formulation::FormulationKind;
use drccp::io::{self, BenchTable, ExportStyle};
use drccp::mixing::MixingSeparator;
use drccp::oracle;
use drccp::quantile::{build_quantile_table, QuantileConfig};
use drccp::solver::{solve_lp, solve_mip, CutSource, Limits, LpStatus, SolveReport};
use drccp::{Instance, Norm, QuantileMode};

#[derive(Parser)]
#[command(name = "drccp", version, about = "Build, strengthen and solve Wasserstein DR chance-constrained programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark instance file.
    Generate(GenerateArgs),
    /// Build a formulation; writes the model text and the quantile cache.
    Build(BuildArgs),
    /// Compute the quantile table and write it as a cache file.
    Strengthen(StrengthenArgs),
    /// Run one mixing separation round at the root relaxation and dump the cuts.
    Separate(SeparateArgs),
    /// Solve an instance and print the report.
    Solve(SolveArgs),
    /// Sweep an (N, theta) grid and print the summary table.
    Bench(BenchArgs),
    /// Write the model in the external text format.
    Export(ExportArgs),
    /// Cross-check an instance (N <= 16) against the enumeration oracle.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum App {
    Portfolio,
    Resource,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Basic,
    Knapsack,
    Improved,
    Mixing,
}

impl From<FormArg> for Formulation {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Basic => Formulation::Basic,
            FormArg::Knapsack => Formulation::Knapsack,
            FormArg::Improved => Formulation::Improved,
            FormArg::Mixing => Formulation::Mixing,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    L1,
    L2,
    Linf,
}

impl From<NormArg> for Norm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::L1 => Norm::L1,
            NormArg::L2 => Norm::L2,
            NormArg::Linf => Norm::Linf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    ExactJoint,
    ExactIndividual,
    Covering,
    Packing,
    Resource,
}

impl From<ModeArg> for QuantileMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::ExactJoint => QuantileMode::ExactJoint,
            ModeArg::ExactIndividual => QuantileMode::ExactIndividual,
            ModeArg::Covering => QuantileMode::CoveringClosedForm,
            ModeArg::Packing => QuantileMode::PackingClosedForm,
            ModeArg::Resource => QuantileMode::ResourceRule,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    Linearized,
    Conic,
}

#[derive(Args, Clone)]
struct GenParams {
    #[arg(long, value_enum, default_value = "portfolio")]
    app: App,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "l2")]
    norm: NormArg,
    /// Portfolio assets K.
    #[arg(long, default_value_t = 50)]
    assets: usize,
    /// Resource count D.
    #[arg(long, default_value_t = 10)]
    resources: usize,
    /// Customer groups P.
    #[arg(long, default_value_t = 20)]
    groups: usize,
}

impl GenParams {
    fn config(&self, n: usize, theta: Option<f64>, seed: u64) -> AppConfig {
        match self.app {
            App::Portfolio => {
                let d = PortfolioConfig::default();
                AppConfig::Portfolio(PortfolioConfig {
                    assets: self.assets,
                    n,
                    epsilon: self.epsilon,
                    theta: theta.unwrap_or(d.theta),
                    norm: self.norm.into(),
                    seed,
                    ..d
                })
            }
            App::Resource => {
                let d = ResourceConfig::default();
                AppConfig::Resource(ResourceConfig {
                    resources: self.resources,
                    groups: self.groups,
                    n,
                    epsilon: self.epsilon,
                    theta: theta.unwrap_or(d.theta),
                    norm: self.norm.into(),
                    seed,
                    ..d
                })
            }
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    params: GenParams,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ModelParams {
    /// Instance file.
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "improved")]
    formulation: FormArg,
    /// Defaults to the instance kind's rule.
    #[arg(long, value_enum)]
    quantile_mode: Option<ModeArg>,
    /// Override the instance's Wasserstein radius.
    #[arg(long)]
    theta: Option<f64>,
}

impl ModelParams {
    fn load(&self) -> Result<Instance> {
        let inst = read_instance(&self.instance)?;
        Ok(match self.theta {
            Some(t) => inst.with_theta(t),
            None => inst,
        })
    }

    fn assemble(&self) -> Result<Assembled> {
        Ok(apps::assemble(
            self.load()?,
            self.formulation.into(),
            self.quantile_mode.map(Into::into),
        )?)
    }
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    model: ModelParams,
    #[arg(long, value_enum, default_value = "linearized")]
    style: StyleArg,
    /// Model text output.
    #[arg(short, long)]
    output: PathBuf,
    /// Quantile cache output.
    #[arg(long)]
    quantiles: PathBuf,
}

#[derive(Args)]
struct StrengthenArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    quantile_mode: Option<ModeArg>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct SeparateArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Reuse a quantile cache instead of recomputing.
    #[arg(long)]
    quantiles: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct LimitParams {
    /// Seconds.
    #[arg(long, default_value_t = 600.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 1_000_000)]
    node_limit: usize,
    /// Progress line every this many nodes (0 = off).
    #[arg(long, default_value_t = 0)]
    log_every: usize,
}

impl LimitParams {
    fn limits(&self) -> Limits {
        Limits {
            node_limit: self.node_limit,
            time_limit: Duration::from_secs_f64(self.time_limit),
            log_every: self.log_every,
            ..Limits::default()
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelParams,
    #[command(flatten)]
    limits: LimitParams,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    params: GenParams,
    /// Comma-separated N values.
    #[arg(long = "ns", value_delimiter = ',', default_value = "20")]
    ns: Vec<usize>,
    /// Comma-separated theta values; defaults to the application's grid.
    #[arg(long = "thetas", value_delimiter = ',')]
    thetas: Vec<f64>,
    /// Instances per grid cell (seeds seed..seed+count).
    #[arg(long, default_value_t = 5)]
    count: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "basic,improved,mixing")]
    formulations: Vec<FormArg>,
    #[command(flatten)]
    limits: LimitParams,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    model: ModelParams,
    #[arg(long, value_enum, default_value = "linearized")]
    style: StyleArg,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    limits: LimitParams,
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    io::parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => io::write_atomic(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn style(s: StyleArg) -> ExportStyle {
    match s {
        StyleArg::Linearized => ExportStyle::LinearizedText,
        StyleArg::Conic => ExportStyle::ConicAnnotatedText,
    }
}

fn run_solve(asm: &Assembled, limits: &Limits) -> Result<SolveReport> {
    let mut sep = asm.separator()?;
    let cuts = sep.as_mut().map(|s| s as &mut dyn CutSource);
    Ok(solve_mip(&asm.model, cuts, limits)?)
}

fn report_text(asm: &Assembled, r: &SolveReport) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |x| format!("{x:.9}"));
    let mut out = format!(
        "formulation={} status={} objective={:.9} bound={:.9} gap={:.6} nodes={} cuts={}\n\
         root_bound={:.9} root_incumbent={} root_gap={} root_time={:.3} wall_time={:.3}\n",
        asm.formulation,
        r.status,
        r.objective,
        r.best_bound,
        r.gap,
        r.nodes,
        r.cuts_added,
        r.root_bound,
        opt(r.root_incumbent),
        opt(r.root_gap),
        r.root_time.as_secs_f64(),
        r.wall_time.as_secs_f64()
    );
    for w in &asm.model.warnings {
        out.push_str(&format!("warning={w}\n"));
    }
    for line in &r.log {
        out.push_str(line);
        out.push('\n');
    }
    if let Some(x) = r.x(&asm.model) {
        let xs: Vec<String> = x.iter().map(|v| format!("{v:.9}")).collect();
        out.push_str(&format!("x={}\n", xs.join(",")));
    }
    out
}

fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    let inst = a.params.config(a.params.n, a.params.theta, a.params.seed).generate()?;
    emit(a.output.as_deref(), &io::write_instance(&inst))
}

fn cmd_build(a: &BuildArgs) -> Result<()> {
    let asm = a.model.assemble()?;
    let model = io::export_model(&asm.model, style(a.style), &[]);
    let cache = io::write_quantiles(&asm.instance, &asm.quantiles);
    // write both before reporting success; each write is atomic on its own
    io::write_atomic(&a.output, &model)?;
    io::write_atomic(&a.quantiles, &cache)?;
    eprintln!(
        "built {} model: {} variables, {} rows, {} cones",
        asm.formulation,
        asm.model.variables.len(),
        asm.model.linear_rows.len(),
        asm.model.cone_rows.len()
    );
    Ok(())
}

fn cmd_strengthen(a: &StrengthenArgs) -> Result<()> {
    let inst = read_instance(&a.instance)?;
    let mode = a
        .quantile_mode
        .map(Into::into)
        .unwrap_or_else(|| apps::default_quantile_mode(&inst));
    let qt = build_quantile_table(&inst, &QuantileConfig::new(mode))?;
    io::write_atomic(&a.output, &io::write_quantiles(&inst, &qt))?;
    Ok(())
}

fn cmd_separate(a: &SeparateArgs) -> Result<()> {
    let inst = read_instance(&a.instance)?;
    let mut asm = apps::assemble(inst, Formulation::Improved, None)?;
    if let Some(path) = &a.quantiles {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        asm.quantiles = io::parse_quantiles(&text, &asm.instance)?;
        asm.model = drccp::formulation::build_improved(&asm.instance, &asm.bigm, &asm.quantiles)?;
    }
    let lp = solve_lp(&asm.model)?;
    if lp.status != LpStatus::Optimal {
        bail!("root relaxation is {:?}", lp.status);
    }
    let mut sep = MixingSeparator::from_table(&asm.instance, &asm.quantiles)?;
    let rows = sep.separate(&asm.model, &lp.primal);
    emit(a.output.as_deref(), &io::write_cuts(&asm.model, &rows))
}

fn cmd_solve(a: &SolveArgs) -> Result<()> {
    let asm = a.model.assemble()?;
    let r = run_solve(&asm, &a.limits.limits())?;
    emit(a.output.as_deref(), &report_text(&asm, &r))
}

fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let thetas = if a.thetas.is_empty() {
        match a.params.app {
            App::Portfolio => std::iter::once(0.001)
                .chain((1..=9).map(|j| 0.02 * j as f64))
                .collect(),
            App::Resource => std::iter::once(0.0001)
                .chain((1..=9).map(|j| 0.001 * j as f64))
                .collect(),
        }
    } else {
        a.thetas.clone()
    };
    let limits = a.limits.limits();
    let mut jobs = Vec::new();
    for &n in &a.ns {
        for &theta in &thetas {
            for s in 0..a.count {
                jobs.push((n, theta, a.params.seed + s));
            }
        }
    }
    let mut out = String::new();
    for &f in &a.formulations {
        let records = jobs
            .par_iter()
            .map(|&(n, theta, seed)| {
                let inst = a.params.config(n, Some(theta), seed).generate()?;
                let asm = apps::assemble(inst, f.into(), None)?;
                Ok((n, theta, run_solve(&asm, &limits)?))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push_str(&BenchTable::from_reports(&Formulation::from(f).to_string(), &records).render());
    }
    emit(a.output.as_deref(), &out)
}

fn cmd_export(a: &ExportArgs) -> Result<()> {
    let asm = a.model.assemble()?;
    emit(a.output.as_deref(), &io::export_model(&asm.model, style(a.style), &[]))
}

/// Prints one PASS/FAIL line per check; fails if any check fails.
fn cmd_verify(a: &VerifyArgs) -> Result<()> {
    let inst = read_instance(&a.instance)?;
    let limits = a.limits.limits();
    let oracle_opt = oracle::enumerate_optimum(&inst, FormulationKind::Knapsack)?
        .context("oracle found no feasible point")?;
    let tol = |a: f64, b: f64| (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1.0);
    let mut failed = 0;
    let mut check = |name: &str, ok: bool, detail: String| {
        println!("{} {name} {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed += 1;
        }
    };

    let knap = apps::assemble(inst.clone(), Formulation::Knapsack, None)?;
    let imp = apps::assemble(inst.clone(), Formulation::Improved, None)?;
    let rk = run_solve(&knap, &limits)?;
    let ri = run_solve(&imp, &limits)?;
    check(
        "knapsack-improved-equality",
        tol(ri.objective, rk.objective) && tol(ri.objective, oracle_opt.objective),
        format!(
            "oracle={:.9} knapsack={:.9} improved={:.9}",
            oracle_opt.objective, rk.objective, ri.objective
        ),
    );
    let mix = apps::assemble(inst.clone(), Formulation::Mixing, None)?;
    let rm = run_solve(&mix, &limits)?;
    check(
        "mixing-equality",
        tol(rm.objective, oracle_opt.objective),
        format!("oracle={:.9} mixing={:.9} cuts={}", oracle_opt.objective, rm.objective, rm.cuts_added),
    );
    if let Some(x) = ri.x(&imp.model) {
        let member = oracle::membership_drccp(&x, &inst)?;
        check("membership", member, "improved optimum is DR-feasible".into());
    }
    let viol = oracle::bigm_violations(&inst, oracle_opt.x(), &imp.bigm, 1e-9);
    check(
        "bigm-validity",
        viol.is_empty(),
        format!("{} of {} scenarios exceed M at the oracle optimum", viol.len(), inst.num_scenarios()),
    );
    if failed > 0 {
        bail!("{failed} check(s) failed");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Build(a) => cmd_build(a),
        Command::Strengthen(a) => cmd_strengthen(a),
        Command::Separate(a) => cmd_separate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Export(a) => cmd_export(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
