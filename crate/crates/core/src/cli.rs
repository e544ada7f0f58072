//! Command-line runner: one subcommand per experiment, each writing
//! `report.csv` and `report.json` plus any instance or result files.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::allocation::{evaluate_welfare, AllocationInstance, Objective, Welfare};
use crate::boolean_functions::{EfronSteinDecomposition, FunctionDocument, FunctionTable};
use crate::constants::{self, *};
use crate::distributions::TupleDistribution;
use crate::error::{Error, Result};
use crate::gadgets::{soundness_constant, DictatorTestInstance};
use crate::limits::Caps;
use crate::rational::Rational;
use crate::reduction::{
    gap_no_formula, mean_identity, polynomial_grid_min, stationary_point, theorem_ratios, GapInstance,
    MetaInstance,
};
use crate::report::{params, Report};
use crate::solvers::solve_exact;
use crate::unique_games::{decode_labeling, Labeling, UgInstance};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BAD_CONFIG: i32 = 3;
pub const EXIT_CAP: i32 = 4;
pub const EXIT_IO: i32 = 5;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "ALLOC_HARDNESS_OUT";

#[derive(Debug, Parser)]
#[command(name = "alloc-hardness", version, about = "Exact experiments on allocation hardness gadgets")]
pub struct Cli {
    /// Directory for report.csv, report.json and other outputs.
    #[arg(long, global = true, env = OUT_ENV, default_value = "out")]
    pub out: PathBuf,

    /// JSON run configuration; replaces the subcommand and its flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub caps: CapArgs,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CapArgs {
    /// Leaves of an exact support enumeration.
    #[arg(long, global = true)]
    pub cap_enumeration: Option<u128>,
    /// Largest R for the Efron-Stein decomposition.
    #[arg(long, global = true)]
    pub cap_decomposition_r: Option<usize>,
    /// Assignments scanned by the brute-force solver.
    #[arg(long, global = true)]
    pub cap_solver: Option<u128>,
    /// |B|·δ_B^4 for reduction evaluators.
    #[arg(long, global = true)]
    pub cap_neighbourhoods: Option<u128>,
    /// Largest R for reduction evaluators.
    #[arg(long, global = true)]
    pub cap_reduction_r: Option<usize>,
}

impl CapArgs {
    fn apply(&self, mut caps: Caps) -> Caps {
        if let Some(v) = self.cap_enumeration {
            caps.enumeration_leaves = v;
        }
        if let Some(v) = self.cap_decomposition_r {
            caps.decomposition_max_r = v;
        }
        if let Some(v) = self.cap_solver {
            caps.solver_assignments = v;
        }
        if let Some(v) = self.cap_neighbourhoods {
            caps.reduction_neighbourhoods = v;
        }
        if let Some(v) = self.cap_reduction_r {
            caps.reduction_max_r = v;
        }
        caps
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Balance, pairwise independence and zero mass of η_q and its noisy version.
    Distributions(DistributionsArgs),
    /// Efron-Stein decomposition and low-degree influences of one function.
    Decompose(DecomposeArgs),
    /// χ-rule utilities of agents holding no large good.
    GadgetCompleteness(CompletenessArgs),
    /// Soundness values, exhaustively or over seeded random functions.
    GadgetSoundness(SoundnessArgs),
    /// Random biregular unique-games instance, optionally with a planted labeling.
    BuildUg(BuildUgArgs),
    /// Labeling decoded from per-node functions.
    Decode(DecodeArgs),
    /// Allocation instance of the reduction and its membership checks.
    BuildReduction(ReductionArgs),
    /// Utilities of the YES-case allocation.
    YesCase(YesArgs),
    /// Exact NO-case ceiling for the allocation encoded by functions.
    NoBound(NoBoundArgs),
    /// GAP welfare constants and, with a UG file, the GAP instance.
    GapInstance(GapArgs),
    /// Ratio lower bounds and their inequality chains.
    Ratios(RatiosArgs),
    /// Exhaustive optimum of an explicit instance.
    Solve(SolveArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ReductionParams {
    #[arg(long, default_value = "1/10")]
    pub eps: Rational,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value = "1/10")]
    pub tau: Rational,
}

#[derive(Debug, Clone, Args)]
pub struct DistributionsArgs {
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    /// Noise levels; repeat the flag for several.
    #[arg(long, default_values = ["1/10"])]
    pub eps: Vec<Rational>,
}

#[derive(Debug, Clone, Args)]
pub struct DecomposeArgs {
    /// Function document (JSON); a seeded random function otherwise.
    #[arg(long)]
    pub function: Option<PathBuf>,
    #[arg(long = "R", visible_alias = "r", default_value_t = 2)]
    pub r: usize,
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    /// Boolean function with this mean; otherwise values on a 1/12 grid.
    #[arg(long)]
    pub mean: Option<Rational>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Degrees paired with `--tau` in order.
    #[arg(long, default_values = ["1", "2"])]
    pub d: Vec<usize>,
    #[arg(long, default_values = ["1/4", "1/8"])]
    pub tau: Vec<Rational>,
}

#[derive(Debug, Clone, Args)]
pub struct CompletenessArgs {
    #[arg(long = "R", visible_alias = "r", default_values = ["1", "2", "3"])]
    pub r: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    #[arg(long, default_value = "1/10")]
    pub eps: Rational,
}

#[derive(Debug, Clone, Args)]
pub struct SoundnessArgs {
    #[arg(long = "R", visible_alias = "r", default_value_t = 2)]
    pub r: usize,
    #[arg(long, default_value = "0")]
    pub eps: Rational,
    /// Every {0,1} function of mean q/(q+1); otherwise random samples.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, default_value_t = 200)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Influence degree; 1 when exhaustive, 2 when sampled.
    #[arg(long)]
    pub d: Option<usize>,
    /// Influence threshold; 1/20 when exhaustive, 1/10 when sampled.
    #[arg(long)]
    pub tau: Option<Rational>,
    /// Allowed excess over the soundness constant.
    #[arg(long, default_value = "1/10")]
    pub slack: Rational,
}

#[derive(Debug, Clone, Args)]
pub struct BuildUgArgs {
    #[arg(long, default_value_t = 2)]
    pub a: usize,
    #[arg(long, default_value_t = 2)]
    pub b: usize,
    #[arg(long, default_value_t = 2)]
    pub delta_b: usize,
    #[arg(long = "R", visible_alias = "r", default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Plant a labeling satisfying every edge and write labeling.json.
    #[arg(long)]
    pub planted: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub ug: PathBuf,
    /// JSON array of function documents, one per node of A.
    #[arg(long, conflicts_with = "labeling")]
    pub functions: Option<PathBuf>,
    /// Use the dictators 1{x_Λ(a) > 0} of this labeling.
    #[arg(long)]
    pub labeling: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value = "1/10")]
    pub tau: Rational,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ReductionArgs {
    #[arg(long)]
    pub ug: PathBuf,
    #[command(flatten)]
    pub params: ReductionParams,
}

#[derive(Debug, Clone, Args)]
pub struct YesArgs {
    #[arg(long)]
    pub ug: PathBuf,
    #[arg(long)]
    pub labeling: PathBuf,
    /// Nodes of A′ (0-based); every node of A when omitted.
    #[arg(long, value_delimiter = ',')]
    pub a_prime: Option<Vec<usize>>,
    #[command(flatten)]
    pub params: ReductionParams,
}

#[derive(Debug, Clone, Args)]
pub struct NoBoundArgs {
    #[arg(long)]
    pub ug: PathBuf,
    /// JSON array of function documents; seeded random mean-2/3 functions otherwise.
    #[arg(long)]
    pub functions: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub params: ReductionParams,
}

#[derive(Debug, Clone, Args)]
pub struct GapArgs {
    #[arg(long)]
    pub ug: Option<PathBuf>,
    /// Planted labeling for the realized YES welfare.
    #[arg(long, requires = "ug")]
    pub labeling: Option<PathBuf>,
    #[arg(long, default_value = "1/100")]
    pub eps: Rational,
    #[arg(long, default_value = "32/27")]
    pub c: Rational,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value = "1/10")]
    pub tau: Rational,
    /// Grid x = k/steps for the polynomial minimum.
    #[arg(long, default_value_t = 3000)]
    pub grid: u32,
}

#[derive(Debug, Clone, Args)]
pub struct RatiosArgs {
    #[arg(long, default_value = "1/100")]
    pub eps: Rational,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value = "nash")]
    pub objective: Objective,
}

/// JSON run configuration: `{"command": "...", "params": {...}, "out_dir": ..., "caps": {...}}`.
///
/// Each `params` entry becomes the flag `--key`; `true` is a bare flag, arrays
/// repeat the flag and other values are passed as text.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub caps: Option<Caps>,
}

impl RunConfig {
    pub fn to_args(&self) -> std::result::Result<Vec<String>, String> {
        let mut args = vec!["alloc-hardness".to_string(), self.command.clone()];
        for (key, value) in &self.params {
            let flag = format!("--{key}");
            let scalar = |v: &serde_json::Value| match v {
                serde_json::Value::String(s) => Ok(s.clone()),
                serde_json::Value::Number(n) => Ok(n.to_string()),
                other => Err(format!("parameter {key:?} has unsupported value {other}")),
            };
            match value {
                serde_json::Value::Bool(true) => args.push(flag),
                serde_json::Value::Bool(false) | serde_json::Value::Null => {}
                serde_json::Value::Array(items) => {
                    for item in items {
                        args.push(flag.clone());
                        args.push(scalar(item)?);
                    }
                }
                other => {
                    args.push(flag);
                    args.push(scalar(other)?);
                }
            }
        }
        Ok(args)
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ResourceLimit { .. } => EXIT_CAP,
        Error::Io(_) => EXIT_IO,
        Error::Invariant(_) => EXIT_CHECKS_FAILED,
        _ => EXIT_BAD_CONFIG,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// status. Progress goes to `stdout`, diagnostics to `stderr`.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    let mut caps = cli.caps.apply(Caps::default());
    let mut out = cli.out.clone();
    let command = match (&cli.config, cli.command) {
        (Some(path), _) => {
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    let _ = writeln!(stderr, "cannot read {}: {e}", path.display());
                    return EXIT_IO;
                }
            };
            let parsed = serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| e.to_string())
                .and_then(|cfg| {
                    let args = cfg.to_args()?;
                    let inner = Cli::try_parse_from(args).map_err(|e| e.render().to_string())?;
                    Ok((cfg, inner))
                });
            match parsed {
                Ok((cfg, inner)) => {
                    if let Some(c) = cfg.caps {
                        caps = cli.caps.apply(c);
                    }
                    if let Some(dir) = cfg.out_dir {
                        out = dir;
                    }
                    match inner.command {
                        Some(c) => c,
                        None => {
                            let _ = writeln!(stderr, "malformed run configuration: no command");
                            return EXIT_BAD_CONFIG;
                        }
                    }
                }
                Err(msg) => {
                    let _ = writeln!(stderr, "malformed run configuration: {msg}");
                    return EXIT_BAD_CONFIG;
                }
            }
        }
        (None, Some(c)) => c,
        (None, None) => {
            let _ = writeln!(stderr, "a subcommand or --config is required (see --help)");
            return EXIT_USAGE;
        }
    };
    match execute(&command, &out, &caps) {
        Ok(report) => {
            let failed = report.failures().count();
            let written = report.write(&out);
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return exit_code(&e);
            }
            let _ = writeln!(
                stdout,
                "{} rows, {failed} failed; report written to {}",
                report.rows.len(),
                out.display()
            );
            for row in report.failures() {
                let _ = writeln!(stdout, "FAIL {} [{}] {} = {}", row.experiment, row.params, row.quantity, row.decimal);
            }
            if failed == 0 {
                EXIT_OK
            } else {
                EXIT_CHECKS_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main_with_env() -> i32 {
    let stdout = &mut std::io::stdout();
    let stderr = &mut std::io::stderr();
    run_from(std::env::args_os(), stdout, stderr)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn write_json<T: Serialize + ?Sized>(dir: &Path, name: &str, value: &T) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn read_functions(path: &Path) -> Result<Vec<FunctionTable>> {
    let docs: Vec<FunctionDocument> = read_json(path)?;
    docs.into_iter().map(FunctionTable::from_document).collect()
}

pub fn execute(command: &Command, out: &Path, caps: &Caps) -> Result<Report> {
    match command {
        Command::Distributions(a) => distributions(a),
        Command::Decompose(a) => decompose(a, caps),
        Command::GadgetCompleteness(a) => completeness(a, caps),
        Command::GadgetSoundness(a) => soundness(a, caps),
        Command::BuildUg(a) => build_ug(a, out),
        Command::Decode(a) => decode(a, out, caps),
        Command::BuildReduction(a) => build_reduction(a, out, caps),
        Command::YesCase(a) => yes_case(a, out, caps),
        Command::NoBound(a) => no_bound(a, caps),
        Command::GapInstance(a) => gap_instance(a, out, caps),
        Command::Ratios(a) => ratios(a),
        Command::Solve(a) => solve(a, out, caps),
    }
}

fn distributions(a: &DistributionsArgs) -> Result<Report> {
    let mut report = Report::new();
    let exp = "distributions";
    let q = a.q;
    let eta = TupleDistribution::eta(q)?;
    let p = params(&[("q", q.to_string())]);
    let base = eta.analyze();
    report.check_flag(exp, &p, "eta balanced", base.balanced, base.balanced, TAG_GENERAL_TEST);
    report.check_flag(
        exp,
        &p,
        "eta pairwise independent",
        base.pairwise_independent,
        base.pairwise_independent,
        TAG_GENERAL_TEST,
    );
    report.check(exp, &p, "eta prob some zero", &base.prob_some_zero, base.prob_some_zero.is_one(), TAG_ETA);
    let sc = soundness_constant(q);
    report.info(exp, &p, "soundness constant", &sc);
    let points = Rational::from_integer(eta.table().len() as i64);
    let all_nonzero = Rational::new(q as i64, q as i64 + 1).pow(q as u32 + 2);
    for eps in &a.eps {
        let p = params(&[("q", q.to_string()), ("eps", eps.to_string())]);
        let noisy = eta.add_noise(eps)?.analyze();
        report.check_flag(exp, &p, "noisy balanced", noisy.balanced, noisy.balanced, TAG_ETA_PRIME);
        report.check_flag(
            exp,
            &p,
            "noisy pairwise independent",
            noisy.pairwise_independent,
            noisy.pairwise_independent,
            TAG_ETA_PRIME,
        );
        let floor = eps / &points;
        report.check(
            exp,
            &p,
            "noisy min probability",
            &noisy.min_probability,
            noisy.min_probability == floor,
            TAG_ETA_PRIME,
        );
        let expected = Rational::one() - eps * &all_nonzero;
        let ok = noisy.prob_some_zero == expected && noisy.prob_some_zero >= Rational::one() - eps;
        report.check(exp, &p, "noisy prob some zero", &noisy.prob_some_zero, ok, TAG_ETA_PRIME);
    }
    Ok(report)
}

fn decompose(a: &DecomposeArgs, caps: &Caps) -> Result<Report> {
    let f = match (&a.function, &a.mean) {
        (Some(path), _) => FunctionTable::from_document(read_json(path)?)?,
        (None, Some(mean)) => FunctionTable::random_with_mean(a.r, a.q, mean, a.seed)?,
        (None, None) => FunctionTable::random_grid(a.r, a.q, 12, a.seed)?,
    };
    if a.d.len() != a.tau.len() {
        return Err(Error::InvalidParameter("--d and --tau must be given the same number of times".into()));
    }
    let mut report = Report::new();
    let exp = "decompose";
    let p = params(&[("R", f.r().to_string()), ("q", f.q().to_string()), ("seed", a.seed.to_string())]);
    let es = EfronSteinDecomposition::new(&f, caps)?;
    let rebuilt = es.reconstruct();
    report.check_flag(exp, &p, "reconstruction", rebuilt == f.values(), rebuilt == f.values(), TAG_ORTHOGONAL);
    let support = es.support();
    let mut orthogonal = true;
    for (i, &s) in support.iter().enumerate() {
        for &t in &support[i + 1..] {
            orthogonal &= es.inner(s, t).is_zero();
        }
    }
    report.check_flag(exp, &p, "pairwise orthogonality", orthogonal, orthogonal, TAG_ORTHOGONAL);
    let total: Rational = es.weights().iter().sum();
    let second: Rational =
        f.values().iter().map(|v| v * v).sum::<Rational>() / Rational::from_integer(f.values().len() as i64);
    report.check(exp, &p, "parseval (sum of weights)", &total, total == second, TAG_ORTHOGONAL);
    for (&d, tau) in a.d.iter().zip(&a.tau) {
        let profile = es.influence_profile(d)?;
        let pd = format!("{p};d={d};tau={tau}");
        for (i, inf) in profile.low_degree_influence.iter().enumerate() {
            report.info(exp, &pd, &format!("low-degree influence {}", i + 1), inf);
        }
        let count = profile.at_least(tau).len();
        let bound = Rational::from_integer(d as i64) / tau;
        let count_r = Rational::from_integer(count as i64);
        report.check(exp, &pd, "coordinates with influence >= tau", &count_r, count_r <= bound, TAG_LOW_DEGREE);
    }
    Ok(report)
}

fn completeness(a: &CompletenessArgs, caps: &Caps) -> Result<Report> {
    let mut report = Report::new();
    for &r in &a.r {
        let inst = DictatorTestInstance::new(r, a.q, a.eps.clone())?;
        for i in 1..=r {
            let res = inst.completeness_utilities(i, caps)?;
            let p = params(&[
                ("R", r.to_string()),
                ("q", a.q.to_string()),
                ("eps", a.eps.to_string()),
                ("i", i.to_string()),
                ("bound", res.bound.to_string()),
            ]);
            report.check("gadget-completeness", &p, "min non-large utility", &res.min_non_large, res.holds, TAG_COMPLETENESS);
        }
    }
    Ok(report)
}

fn soundness(a: &SoundnessArgs, caps: &Caps) -> Result<Report> {
    let q = 2;
    let inst = DictatorTestInstance::new(a.r, q, a.eps.clone())?;
    let constant = soundness_constant(q);
    let mut report = Report::new();
    let exp = "gadget-soundness";
    if a.exhaustive {
        let d = a.d.unwrap_or(1);
        let tau = a.tau.clone().unwrap_or_else(|| Rational::new(1, 20));
        let threshold = &constant + &a.slack;
        let entries = inst.soundness_landscape(d, caps)?;
        let max = entries.iter().map(|e| e.value.clone()).max().unwrap_or_else(Rational::zero);
        for (k, e) in entries.iter().enumerate() {
            let low = e.low_degree_influence.iter().all(|inf| *inf <= tau);
            let at_max = e.value == max;
            let p = params(&[
                ("R", a.r.to_string()),
                ("eps", a.eps.to_string()),
                ("d", d.to_string()),
                ("tau", tau.to_string()),
                ("ones", format!("{:?}", e.ones).replace(", ", " ")),
                ("dictator", e.dictator.map_or("-".into(), |i| i.to_string())),
            ]);
            let quantity = format!("soundness value #{k}");
            if low || at_max {
                let ok = (!low || e.value <= threshold) && (!at_max || e.dictator.is_some());
                report.check(exp, &p, &quantity, &e.value, ok, TAG_SOUNDNESS);
            } else {
                report.info(exp, &p, &quantity, &e.value);
            }
        }
    } else {
        let d = a.d.unwrap_or(2);
        let tau = a.tau.clone().unwrap_or_else(|| Rational::new(1, 10));
        let margin = Rational::new(1, 20);
        let lo = &constant - &margin;
        let hi = &constant + &a.eps + &margin;
        let mean = Rational::new(q as i64, q as i64 + 1);
        let mut inside = 0u64;
        for i in 0..a.samples {
            let seed = a.seed + i;
            let f = FunctionTable::random_with_mean(a.r, q, &mean, seed)?;
            let value = inst.soundness_value(&f, caps)?;
            let max_inf = crate::boolean_functions::influence_profile(&f, d, caps)?.max_low_degree();
            inside += u64::from(value >= lo && value <= hi);
            let p = params(&[
                ("R", a.r.to_string()),
                ("eps", a.eps.to_string()),
                ("seed", seed.to_string()),
            ]);
            report.info(exp, &p, "soundness value", &value);
            let pi = format!("{p};d={d};tau={tau}");
            report.check(exp, &pi, "max low-degree influence", &max_inf, max_inf < tau, TAG_LOW_DEGREE);
        }
        let frac = Rational::new(inside as i64, a.samples.max(1) as i64);
        let p = params(&[
            ("R", a.r.to_string()),
            ("eps", a.eps.to_string()),
            ("window", format!("[{lo}, {hi}]")),
            ("samples", a.samples.to_string()),
        ]);
        report.check(exp, &p, "fraction inside window", &frac, frac >= Rational::new(19, 20), TAG_SOUNDNESS);
    }
    Ok(report)
}

fn build_ug(a: &BuildUgArgs, out: &Path) -> Result<Report> {
    let mut report = Report::new();
    let exp = "build-ug";
    let p = params(&[
        ("A", a.a.to_string()),
        ("B", a.b.to_string()),
        ("delta_B", a.delta_b.to_string()),
        ("R", a.r.to_string()),
        ("seed", a.seed.to_string()),
    ]);
    let ug = if a.planted {
        let (ug, lab) = UgInstance::planted(a.a, a.b, a.delta_b, a.r, a.seed)?;
        let sat = ug.satisfaction(&lab)?;
        report.check(exp, &p, "planted labeling satisfaction", &sat, sat.is_one(), TAG_META_YES);
        write_json(out, "labeling.json", &lab)?;
        ug
    } else {
        UgInstance::random(a.a, a.b, a.delta_b, a.r, a.seed)?
    };
    report.note(exp, &p, "edges", ug.edges().len());
    report.note(exp, &p, "degree of A", ug.degree_a());
    write_json(out, "ug.json", &ug)?;
    Ok(report)
}

fn decode(a: &DecodeArgs, out: &Path, caps: &Caps) -> Result<Report> {
    let ug: UgInstance = read_json(&a.ug)?;
    let (fs, planted) = match (&a.functions, &a.labeling) {
        (Some(path), _) => (read_functions(path)?, None),
        (None, Some(path)) => {
            let lab: Labeling = read_json(path)?;
            lab.check(&ug)?;
            let fs = (0..ug.a_count())
                .map(|x| FunctionTable::dictator(ug.r(), lab.a_label(x) + 1, 2))
                .collect::<Result<Vec<_>>>()?;
            (fs, Some(lab))
        }
        (None, None) => return Err(Error::InvalidParameter("decode needs --functions or --labeling".into())),
    };
    let res = decode_labeling(&ug, &fs, a.d, &a.tau, a.seed, caps)?;
    let mut report = Report::new();
    let exp = "decode";
    let p = params(&[("d", a.d.to_string()), ("tau", a.tau.to_string()), ("seed", a.seed.to_string())]);
    let bound = &res.candidate_bound;
    for (b, s) in res.b_candidates.iter().enumerate() {
        let n = Rational::from_integer(s.len() as i64);
        report.check(exp, &format!("{p};b={b}"), "candidate set size", &n, n <= *bound, TAG_DECODER);
    }
    for (x, s) in res.a_candidates.iter().enumerate() {
        let n = Rational::from_integer(s.len() as i64);
        report.check(exp, &format!("{p};a={x}"), "candidate set size", &n, n <= *bound, TAG_DECODER);
    }
    let sat = ug.satisfaction(&res.labeling)?;
    if planted.is_some() {
        report.check(exp, &p, "decoded satisfaction", &sat, sat.is_one(), TAG_DECODER);
    } else {
        report.info(exp, &p, "decoded satisfaction", &sat);
    }
    write_json(out, "decoded_labeling.json", &res.labeling)?;
    Ok(report)
}

fn reduction_params(ug: &UgInstance, rp: &ReductionParams) -> String {
    params(&[
        ("A", ug.a_count().to_string()),
        ("B", ug.b_count().to_string()),
        ("R", ug.r().to_string()),
        ("eps", rp.eps.to_string()),
        ("d", rp.d.to_string()),
        ("tau", rp.tau.to_string()),
    ])
}

fn build_reduction(a: &ReductionArgs, out: &Path, caps: &Caps) -> Result<Report> {
    let ug: UgInstance = read_json(&a.ug)?;
    let p = reduction_params(&ug, &a.params);
    let rp = &a.params;
    let meta = MetaInstance::new(ug, rp.eps.clone(), rp.d, rp.tau.clone())?;
    let mut report = Report::new();
    let exp = "build-reduction";
    report.note(exp, &p, "agents", meta.n_agents());
    report.note(exp, &p, "large goods", meta.ug().a_count() * meta.large_per_group());
    report.note(exp, &p, "dummy goods", meta.dummy_count());
    report.info(exp, &p, "delta", meta.delta());
    let dummy = meta.dummy_total();
    let ok = dummy <= *meta.delta() && meta.delta() <= meta.eps();
    report.check(exp, &p, "dummy total value", &dummy, ok, TAG_META_NO);
    let mass = meta.small_good_mass(caps)?;
    report.check(exp, &p, "small-good mass", &mass, mass.is_one(), TAG_META_YES);
    let family = meta.validate(caps)?;
    let detail = family.clause.map_or("valid".to_string(), |c| c.to_string());
    report.check_flag(exp, &p, "grouped family membership", detail, family.valid, TAG_FAMILY2);
    if meta.r() == 1 {
        let inst = meta.materialize(caps)?;
        report.note(exp, &p, "explicit goods", inst.n_goods());
        write_json(out, "instance.json", &inst)?;
    }
    Ok(report)
}

fn yes_case(a: &YesArgs, out: &Path, caps: &Caps) -> Result<Report> {
    let ug: UgInstance = read_json(&a.ug)?;
    let lab: Labeling = read_json(&a.labeling)?;
    let p = reduction_params(&ug, &a.params);
    let rp = &a.params;
    let mut mask = vec![a.a_prime.is_none(); ug.a_count()];
    for &x in a.a_prime.iter().flatten() {
        if x >= mask.len() {
            return Err(Error::InvalidParameter(format!("node {x} of A′ outside 0..{}", mask.len())));
        }
        mask[x] = true;
    }
    let meta = MetaInstance::new(ug, rp.eps.clone(), rp.d, rp.tau.clone())?;
    let yes = meta.yes_allocation(&lab, &mask, caps)?;
    let mut report = Report::new();
    let exp = "yes-case";
    let p = format!("{p};bound={}", yes.bound);
    report.check(exp, &p, "min non-large utility", &yes.min_non_large, yes.holds, TAG_META_YES);
    report.check(exp, &p, "small utility allocated", &yes.small_total, yes.small_total.is_one(), TAG_META_YES);
    report.note(exp, &p, "dummy goods used", yes.dummy_used);

    fs::create_dir_all(out)?;
    let mut w = csv::Writer::from_path(out.join("utilities.csv"))?;
    w.write_record(["agent", "a", "code", "large", "utility", "decimal"])?;
    for (u, util) in yes.utilities.iter().enumerate() {
        w.write_record([
            u.to_string(),
            (u / meta.points()).to_string(),
            (u % meta.points()).to_string(),
            yes.large_holders[u].to_string(),
            util.to_string(),
            util.to_decimal(crate::report::DECIMAL_DIGITS),
        ])?;
    }
    w.flush()?;
    Ok(report)
}

fn no_bound(a: &NoBoundArgs, caps: &Caps) -> Result<Report> {
    let ug: UgInstance = read_json(&a.ug)?;
    let p = reduction_params(&ug, &a.params);
    let rp = &a.params;
    let fs = match &a.functions {
        Some(path) => read_functions(path)?,
        None => (0..ug.a_count())
            .map(|x| FunctionTable::random_with_mean(ug.r(), 2, &Rational::new(2, 3), a.seed + x as u64))
            .collect::<Result<Vec<_>>>()?,
    };
    let (b_side, a_side) = mean_identity(&ug, &fs)?;
    let meta = MetaInstance::new(ug, rp.eps.clone(), rp.d, rp.tau.clone())?;
    let bound = meta.no_case_bound(&fs, caps)?;
    let mut report = Report::new();
    let exp = "no-bound";
    let p = format!("{p};seed={}", a.seed);
    report.info(exp, &p, "non-large utility ceiling", &bound);
    report.check(exp, &p, "mean over B", &b_side, b_side == a_side, TAG_MEAN_IDENTITY);
    Ok(report)
}

fn gap_instance(a: &GapArgs, out: &Path, caps: &Caps) -> Result<Report> {
    let mut report = Report::new();
    let exp = "gap-instance";
    let p = params(&[("eps", a.eps.to_string()), ("c", a.c.to_string())]);
    let standard = a.c == constants::gap_c();
    let yes = Rational::one() - &a.eps + &a.c * Rational::new(2, 3);
    if standard {
        let ok = yes == constants::gap_yes_limit() - &a.eps;
        report.check(exp, &p, "yes welfare", &yes, ok, TAG_GAP);
    } else {
        report.info(exp, &p, "yes welfare", &yes);
    }
    let (x, v) = polynomial_grid_min(&a.c, a.grid);
    let pg = format!("{p};grid={}", a.grid);
    if standard {
        report.check(exp, &pg, "grid minimizer", &x, x == Rational::new(2, 3), TAG_GAP);
        report.check(exp, &pg, "grid minimum", &v, v == -constants::gap_polynomial_min(), TAG_GAP);
    } else {
        report.info(exp, &pg, "grid minimizer", &x);
        report.info(exp, &pg, "grid minimum", &v);
    }
    match stationary_point(&a.c) {
        Some((sx, sv)) => {
            report.check(exp, &p, "stationary point", &sx, Rational::from_integer(4) * sx.pow(3) == a.c, TAG_GAP);
            report.check(exp, &p, "stationary value", &sv, sv <= v, TAG_GAP);
        }
        None => report.note(exp, &p, "stationary point", "irrational"),
    }
    let no = gap_no_formula(&a.eps);
    report.check(exp, &p, "no-side bound (1+4ε)+48/81", &no.lhs, no.holds, TAG_GAP);

    if let Some(path) = &a.ug {
        let ug: UgInstance = read_json(path)?;
        let gap = GapInstance::with_c(ug, a.eps.clone(), a.d, a.tau.clone(), a.c.clone())?;
        let pu = format!("{p};A={};R={}", gap.meta().ug().a_count(), gap.meta().r());
        report.info(exp, &pu, "large-good value", &gap.large_value());
        if let Some(size) = gap.small_size() {
            report.info(exp, &pu, "small-good size", &size);
        }
        if let Some(lp) = &a.labeling {
            let lab: Labeling = read_json(lp)?;
            let all = vec![true; gap.meta().ug().a_count()];
            let realized = gap.realized_yes_usw(&lab, &all, caps)?;
            report.check(exp, &pu, "realized yes welfare", &realized, realized >= gap.yes_usw(), TAG_GAP);
        }
        if gap.meta().r() == 1 {
            write_json(out, "gap_instance.json", &gap.materialize(caps)?)?;
        }
    }
    Ok(report)
}

fn ratios(a: &RatiosArgs) -> Result<Report> {
    let bounds = theorem_ratios(&a.eps)?;
    let mut report = Report::new();
    let p = params(&[("eps", a.eps.to_string())]);
    for e in &bounds.entries {
        match (&e.exact, e.check) {
            (Some(v), Some(ok)) => report.check("ratios", &p, &e.name, v, ok, e.tag),
            (Some(v), None) => report.info("ratios", &p, &e.name, v),
            (None, _) => report.float("ratios", &p, &e.name, e.decimal, None, e.tag),
        }
    }
    Ok(report)
}

fn solve(a: &SolveArgs, out: &Path, caps: &Caps) -> Result<Report> {
    let inst: AllocationInstance = read_json(&a.instance)?;
    let res = solve_exact(&inst, a.objective, caps)?;
    let mut report = Report::new();
    let p = params(&[
        ("objective", a.objective.to_string()),
        ("agents", inst.n_agents().to_string()),
        ("goods", inst.n_goods().to_string()),
    ]);
    report.info("solve", &p, "best value", &res.best_value);
    report.note("solve", &p, "assignments explored", res.explored);
    let again = evaluate_welfare(&inst, &res.best_allocation, a.objective)?;
    let ok = again == Welfare::Value(res.best_value.clone());
    report.check_flag("solve", &p, "re-evaluated optimum", again, ok, TAG_SOLVER);
    write_json(out, "solve.json", &res)?;
    Ok(report)
}
