use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use cosparse::certify::{first_order_certificate, noise_theorem_parameters, small_noise_window, CertificateReport};
use cosparse::cosparse::{build_decomposition, d_support, CosparseDecomposition, SignVector};
use cosparse::criteria::{compute_arc, compute_ic, compute_warc, DrConfig, DEFAULT_ARC_CAP};
use cosparse::experiments::{run_experiment, with_thread_pool, ExperimentName, ExperimentSpec, DEFAULT_SEED};
use cosparse::linalg::Vector;
use cosparse::solvers::{solve_denoise_dual, solve_lasso, SolveConfig, SolverReport};

use crate::exit::{CliError, CliResult};
use crate::instance::{InstanceSpec, LambdaSpec, NoiseSpec, PhiSpec, Resolved};

#[derive(Debug, Parser)]
#[command(name = "cosparse", version, about = "ℓ1-analysis regularization: solvers, recovery criteria and certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the analysis Lasso on an instance.
    Solve(SolveArgs),
    /// Check a solve report against the first-order optimality conditions.
    Certify(CertifyArgs),
    /// Identifiability criterion of the signal's sign pattern.
    Ic(CriterionArgs),
    /// Analysis recovery criterion of the signal's D-support.
    Arc(ArcArgs),
    /// Upper bound on ARC from the operator norm.
    Warc(CriterionArgs),
    /// Run a named numerical study and write its CSV table.
    Experiment(ExperimentArgs),
    /// Print the version.
    Version,
}

#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    /// Forward operator: id, blur:sigma=S or gauss:q=Q,seed=K.
    #[arg(long)]
    pub phi: Option<String>,
    /// Dictionary: tv, id, haar:jmax=J,tau=T or fused:eps=E.
    #[arg(long)]
    pub dict: Option<String>,
    /// Ground truth: boxcar:n=N,eta=E, staircase:n=N, two-boxcar:n=N,eta=E,rho=R or a CSV path.
    #[arg(long)]
    pub signal: Option<String>,
    /// Noise: none, gaussian:sigma=S,seed=K or file:PATH.
    #[arg(long)]
    pub noise: Option<String>,
    /// Regularization: a number, auto-small or auto-noise(RHO).
    #[arg(long)]
    pub lambda: Option<String>,
    /// Observations CSV, replacing Phi x0 + w.
    #[arg(long)]
    pub y: Option<PathBuf>,
    /// Signal length when neither --signal nor --y fixes it.
    #[arg(long)]
    pub n: Option<usize>,
    /// Resolved instance JSON, as printed by --print-resolved. Other instance flags override it.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Print the resolved instance as JSON and exit.
    #[arg(long)]
    pub print_resolved: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverChoice {
    /// Dual FISTA when Phi = Id, primal-dual otherwise.
    Auto,
    PrimalDual,
    DenoiseDual,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, value_enum, default_value_t = SolverChoice::Auto)]
    pub solver: SolverChoice,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Skip the support-based refinement.
    #[arg(long)]
    pub no_polish: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Solve report JSON. Its instance is used unless instance flags are given.
    #[arg(long)]
    pub report: PathBuf,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CriterionArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ArcArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Largest support size for exhaustive vertex enumeration.
    #[arg(long, default_value_t = DEFAULT_ARC_CAP)]
    pub cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// tv_staircase, haar_deconv or fused_cs.
    pub name: String,
    /// Parameter override key=value; lists as a;b;c or start:step:stop.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Merge flags over an optional base instance.
pub fn parse_instance(args: &InstanceArgs, base: Option<InstanceSpec>) -> CliResult<InstanceSpec> {
    let base = match (&args.instance, base) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
            Some(serde_json::from_str::<InstanceSpec>(&text).map_err(|e| {
                CliError::usage(format!("{} is not a resolved instance: {e}", path.display()))
            })?)
        }
        (None, base) => base,
    };
    fn parse_err(flag: &'static str) -> impl Fn(cosparse::Error) -> CliError {
        move |e| CliError::usage(format!("--{flag}: {e}"))
    }
    let dict = match (&args.dict, &base) {
        (Some(d), _) => d.parse().map_err(parse_err("dict"))?,
        (None, Some(b)) => b.dict,
        (None, None) => return Err(CliError::usage("missing --dict (e.g. --dict tv)".into())),
    };
    let phi = match (&args.phi, &base) {
        (Some(p), _) => p.parse().map_err(parse_err("phi"))?,
        (None, Some(b)) => b.phi,
        (None, None) => PhiSpec::Identity,
    };
    let signal = match (&args.signal, &base) {
        (Some(s), _) => Some(s.parse().map_err(parse_err("signal"))?),
        (None, Some(b)) => b.signal.clone(),
        (None, None) => None,
    };
    let noise = match (&args.noise, &base) {
        (Some(s), _) => s.parse().map_err(parse_err("noise"))?,
        (None, Some(b)) => b.noise.clone(),
        (None, None) => NoiseSpec::None,
    };
    let lambda = match (&args.lambda, &base) {
        (Some(s), _) => s.parse().map_err(parse_err("lambda"))?,
        (None, Some(b)) => b.lambda,
        (None, None) => LambdaSpec::AutoSmall,
    };
    let y = args.y.clone().or_else(|| base.as_ref().and_then(|b| b.y.clone()));
    let n = args.n.or_else(|| base.as_ref().and_then(|b| b.n));
    if signal.is_none() && y.is_none() {
        return Err(CliError::usage("need --signal or --y".into()));
    }
    Ok(InstanceSpec { phi, dict, signal, noise, lambda, y, n })
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn ground_truth<'a>(res: &'a Resolved, what: &str) -> CliResult<&'a Vector> {
    res.x0
        .as_ref()
        .ok_or_else(|| CliError::usage(format!("{what} needs the ground truth: pass --signal")))
}

fn decomposition_at(res: &Resolved, x0: &Vector) -> CliResult<(SignVector, CosparseDecomposition)> {
    let s = d_support(x0, &res.dict, None);
    let dec = build_decomposition(&res.dict, &*res.phi, &s.cosupport())?;
    Ok((s, dec))
}

/// How the regularization weight was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaChoice {
    pub value: f64,
    pub mode: String,
    /// Criterion value behind an automatic choice (IC or ARC).
    pub criterion: Option<f64>,
    /// Admissible interval for `auto-small`.
    pub window: Option<(f64, f64)>,
    /// Predicted ℓ2 error bound for `auto-noise`.
    pub error_bound: Option<f64>,
}

pub fn resolve_lambda(spec: LambdaSpec, res: &Resolved) -> CliResult<LambdaChoice> {
    let w_norm = res.w.as_ref().map_or(0.0, |w| w.norm());
    match spec {
        LambdaSpec::Value(v) => Ok(LambdaChoice {
            value: v,
            mode: "fixed".into(),
            criterion: None,
            window: None,
            error_bound: None,
        }),
        LambdaSpec::AutoSmall => {
            let x0 = ground_truth(res, "--lambda auto-small")?;
            let (s, dec) = decomposition_at(res, x0)?;
            if s.support().is_empty() {
                return Err(CliError::precondition("auto-small: the signal has an empty D-support".into()));
            }
            let ic = compute_ic(&dec, &s, &DrConfig::default())?.value;
            if !(ic < 1.0) {
                return Err(CliError::precondition(format!(
                    "IC ≥ 1 (IC = {ic:.6}): auto-small needs IC < 1"
                )));
            }
            let window = small_noise_window(&dec, x0, ic, w_norm)?;
            if window.is_empty() {
                return Err(CliError::precondition(format!(
                    "auto-small: noise too large, the admissible window ({:.6e}, {:.6e}) is empty",
                    window.lower, window.upper
                )));
            }
            Ok(LambdaChoice {
                value: window.midpoint(),
                mode: "auto-small".into(),
                criterion: Some(ic),
                window: Some((window.lower, window.upper)),
                error_bound: None,
            })
        }
        LambdaSpec::AutoNoise(rho) => {
            let x0 = ground_truth(res, "--lambda auto-noise")?;
            let (_, dec) = decomposition_at(res, x0)?;
            let arc = with_thread_pool(|| compute_arc(&dec, DEFAULT_ARC_CAP, &DrConfig::default()))??
                .criterion
                .value;
            if !(arc < 1.0) {
                return Err(CliError::precondition(format!(
                    "ARC ≥ 1 (ARC = {arc:.6}): auto-noise needs ARC < 1"
                )));
            }
            if w_norm == 0.0 {
                return Err(CliError::precondition(
                    "auto-noise needs nonzero noise; use a fixed small lambda instead".into(),
                ));
            }
            let (value, bound) = noise_theorem_parameters(&dec, arc, w_norm, rho)?;
            Ok(LambdaChoice {
                value,
                mode: format!("auto-noise({rho:?})"),
                criterion: Some(arc),
                window: None,
                error_bound: Some(bound),
            })
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveOutput {
    pub instance: InstanceSpec,
    pub lambda: LambdaChoice,
    pub solver: String,
    pub report: SolverReport,
}

pub fn solve(args: &SolveArgs) -> CliResult<()> {
    let spec = parse_instance(&args.instance, None)?;
    if args.instance.print_resolved {
        return write_output(None, &(spec.to_json() + "\n"));
    }
    let res = spec.resolve()?;
    let lambda = resolve_lambda(spec.lambda, &res)?;
    let defaults = SolveConfig::default();
    let cfg = SolveConfig {
        lambda: lambda.value,
        max_iters: args.max_iters.unwrap_or(defaults.max_iters),
        tol: args.tol.unwrap_or(defaults.tol),
        polish: !args.no_polish,
        ..defaults
    };
    let denoise = match args.solver {
        SolverChoice::Auto => spec.phi == PhiSpec::Identity,
        SolverChoice::DenoiseDual if spec.phi != PhiSpec::Identity => {
            return Err(CliError::usage("--solver denoise-dual needs --phi id".into()))
        }
        SolverChoice::DenoiseDual => true,
        SolverChoice::PrimalDual => false,
    };
    let report = if denoise {
        solve_denoise_dual(&res.dict, &res.y, &cfg)?
    } else {
        solve_lasso(&*res.phi, &res.dict, &res.y, &cfg)?
    };
    let output = SolveOutput {
        instance: spec,
        lambda,
        solver: if denoise { "denoise-dual" } else { "primal-dual" }.into(),
        report,
    };
    write_output(args.out.as_deref(), &to_json(&output))
}

pub fn certify(args: &CertifyArgs) -> CliResult<()> {
    let text = fs::read_to_string(&args.report)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", args.report.display())))?;
    let report: SolveOutput = serde_json::from_str(&text)
        .map_err(|e| CliError::data(format!("{} is not a solve report: {e}", args.report.display())))?;
    let spec = parse_instance(&args.instance, Some(report.instance.clone()))?;
    if args.instance.print_resolved {
        return write_output(None, &(spec.to_json() + "\n"));
    }
    let res = spec.resolve()?;
    let x = report.report.solution_vector();
    if x.len() != res.n {
        return Err(CliError::data(format!(
            "report solution has {} entries, the instance has n = {}",
            x.len(),
            res.n
        )));
    }
    let lambda = report.lambda.value;
    if !(lambda > 0.0) {
        return Err(CliError::precondition("certificates need lambda > 0".into()));
    }
    let mut cert: CertificateReport = first_order_certificate(&*res.phi, &res.dict, &res.y, lambda, &x)?;
    if let Some(x0) = &res.x0 {
        cert = cert.compare_with(&d_support(x0, &res.dict, None));
    }
    write_output(args.out.as_deref(), &to_json(&cert))
}

/// JSON emitted by `ic`, `arc` and `warc`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutput {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    /// D-support of the signal, 1-based.
    #[serde(with = "cosparse::cosparse::one_based_indices")]
    pub support: Vec<usize>,
    pub cosupport_dim: usize,
    /// Maximizing sign pattern on the support (ARC only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub vertex: Option<Vec<i8>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Ic,
    Arc { cap: usize },
    Warc,
}

pub fn criterion(which: Criterion, instance: &InstanceArgs, out: Option<&Path>) -> CliResult<()> {
    let spec = parse_instance(instance, None)?;
    if instance.print_resolved {
        return write_output(None, &(spec.to_json() + "\n"));
    }
    let res = spec.resolve()?;
    let x0 = ground_truth(&res, "criteria")?;
    let (s, dec) = decomposition_at(&res, x0)?;
    let support = s.support();
    let cosupport_dim = s.cosupport().len();
    let output = match which {
        Criterion::Ic => {
            let r = compute_ic(&dec, &s, &DrConfig::default())?;
            CriterionOutput {
                value: r.value,
                converged: r.converged,
                iterations: r.iterations,
                support,
                cosupport_dim,
                vertex: None,
            }
        }
        Criterion::Arc { cap } => {
            let r = with_thread_pool(|| compute_arc(&dec, cap, &DrConfig::default()))??;
            CriterionOutput {
                value: r.criterion.value,
                converged: r.criterion.converged,
                iterations: r.criterion.iterations,
                support,
                cosupport_dim,
                vertex: Some(r.vertex),
            }
        }
        Criterion::Warc => CriterionOutput {
            value: compute_warc(&dec),
            converged: true,
            iterations: 0,
            support,
            cosupport_dim,
            vertex: None,
        },
    };
    write_output(out, &to_json(&output))
}

pub fn experiment(args: &ExperimentArgs) -> CliResult<()> {
    let name: ExperimentName = args.name.parse().map_err(CliError::usage_from)?;
    let mut parameters = BTreeMap::new();
    for item in &args.params {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("--param expects KEY=VALUE, got '{item}'")))?;
        if parameters.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(CliError::usage(format!("--param '{}' given twice", k.trim())));
        }
    }
    let spec = ExperimentSpec {
        name,
        parameters,
        seed: args.seed,
        output_path: args.out.as_ref().map(|p| p.display().to_string()),
    };
    let table = run_experiment(&spec)?;
    write_output(args.out.as_deref(), &table.to_csv()?)
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Certify(a) => certify(a),
        Command::Ic(a) => criterion(Criterion::Ic, &a.instance, a.out.as_deref()),
        Command::Arc(a) => criterion(Criterion::Arc { cap: a.cap }, &a.instance, a.out.as_deref()),
        Command::Warc(a) => criterion(Criterion::Warc, &a.instance, a.out.as_deref()),
        Command::Experiment(a) => experiment(a),
        Command::Version => write_output(None, &format!("cosparse {}\n", env!("CARGO_PKG_VERSION"))),
    }
}
