//! The `mstd` command line: argument parsing, config files, run manifests.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::enumerate::{build_polynomial, enumerate_mstd_pairs, grid_search_max, MstdPolynomial, DEFAULT_ENUM_CAP};
use crate::error::{Error, Result};
use crate::fringe::{
    estimate_fringe_limit, is_minimal_fringe, is_mstd_fringe, is_weak_mstd_fringe, lower_bound_p, richness_feasible,
    search_fringes, FringeTuple, LowerBoundConfig, MAX_EXHAUSTIVE_K,
};
use crate::minimal::{search_size, structure_report, triple_witness, SizeClass, DEFAULT_SEARCH_BUDGET};
use crate::phase::{parse_n_list, phase_scan, rows_to_csv, DecaySpec, Regime, CSV_HEADER};
use crate::prob::RhoVector;
use crate::sampler::{estimate_p_n, estimate_sum_diff_stats, Parallelism};
use crate::sets::{is_mstd_pair, IntSet, SumDiffStats};
use crate::verify::{verify_formulas, VerifyConfig};

/// Environment variable supplying the default `--seed`.
pub const SEED_ENV: &str = "MSTD_SEED";

#[derive(Parser, Debug, Serialize)]
#[command(name = "mstd", version, about = "Sum-dominant correlated set pairs", args_override_self = true)]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the run manifest here instead of to stderr.
    #[arg(long, global = true)]
    #[serde(skip)]
    manifest: Option<PathBuf>,
    /// TOML file whose keys supply default flag values.
    #[arg(long, global = true)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Monte-Carlo estimate of P_n(rho) with a Wilson interval.
    Mc(McArgs),
    /// Moments of |A+B|, |±(A−B)| and their complements.
    Stats(StatsArgs),
    /// Exhaustive MSTD catalog over {0..n} and its polynomial.
    Enumerate(EnumerateArgs),
    /// Evaluate a saved polynomial.
    EvalPoly(EvalPolyArgs),
    /// Grid maximum of a saved polynomial.
    GridMax(GridMaxArgs),
    /// Fringe tuples: checks, estimates, lower bounds, search.
    #[command(subcommand)]
    Fringe(FringeCommand),
    /// Decaying-density scan.
    Phase(PhaseArgs),
    /// Exhaustive MSTD pairs of a given size.
    Minimal(MinimalArgs),
    /// Closed-form probabilities against sampled frequencies.
    VerifyFormulas(VerifyArgs),
    /// Three-representation test and collision structure of a pair.
    VerifyTriple(TripleArgs),
    /// Re-run a manifest and compare output digests.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args, Debug, Serialize)]
struct Rho {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    rho1: f64,
    #[arg(long)]
    rho2: f64,
}

impl Rho {
    fn vector(&self) -> Result<RhoVector> {
        RhoVector::new(self.p, self.rho1, self.rho2)
    }
}

#[derive(Args, Debug, Serialize)]
struct McArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    rho: Rho,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug, Serialize)]
struct StatsArgs {
    #[arg(long)]
    n: usize,
    /// Required unless --regime is given.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    rho1: f64,
    #[arg(long)]
    rho2: f64,
    /// Take p from a decay regime at N = n (fixed:<p>, pow:<alpha>, chat:<c>).
    #[arg(long)]
    regime: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug, Serialize)]
struct EnumerateArgs {
    #[arg(long)]
    n: usize,
    /// Catalog file; without it the catalog goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Polynomial JSON file.
    #[arg(long)]
    poly: Option<PathBuf>,
    /// Largest n accepted.
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
    cap: usize,
}

#[derive(Args, Debug, Serialize)]
struct EvalPolyArgs {
    #[arg(long)]
    poly: PathBuf,
    #[command(flatten)]
    rho: Rho,
}

#[derive(Args, Debug, Serialize)]
struct GridMaxArgs {
    #[arg(long)]
    poly: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FringeCommand {
    /// Fringe predicates for one tuple.
    Check(FringeCheckArgs),
    /// Profile probability times sampled richness.
    Estimate(FringeEstimateArgs),
    /// Lower bound on the limiting MSTD probability.
    LowerBound(LowerBoundArgs),
    /// All minimal fringe tuples of one order.
    Search(FringeSearchArgs),
}

#[derive(Args, Debug, Serialize)]
struct FringeCheckArgs {
    #[arg(long = "L", default_value = "")]
    l: String,
    #[arg(long = "Lp", default_value = "")]
    lp: String,
    #[arg(long = "R", default_value = "")]
    r: String,
    #[arg(long = "Rp", default_value = "")]
    rp: String,
    #[arg(long)]
    k: usize,
    /// Report minimality with respect to the weak predicate.
    #[arg(long)]
    weak: bool,
}

#[derive(Args, Debug, Serialize)]
struct FringeEstimateArgs {
    #[arg(long)]
    tuple_file: PathBuf,
    #[command(flatten)]
    rho: Rho,
    /// Universe {0..n}; defaults to max(20k+100, 200).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 20_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
struct LowerBoundArgs {
    #[command(flatten)]
    rho: Rho,
    #[arg(long, default_value_t = 12)]
    k_cap: usize,
    #[arg(long, default_value_t = 12)]
    max_terms: usize,
    #[arg(long, default_value_t = 20_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
struct FringeSearchArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    weak: bool,
}

#[derive(Args, Debug, Serialize)]
struct PhaseArgs {
    /// fixed:<p>, pow:<alpha> (p̂ = N^-alpha) or chat:<c> (p̂ = c/N).
    #[arg(long)]
    regime: String,
    #[arg(long)]
    rho1: f64,
    #[arg(long)]
    rho2: f64,
    /// Comma-separated sizes, e.g. 1e3,1e4.
    #[arg(long = "N")]
    ns: String,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Smallest admissible N·p.
    #[arg(long)]
    min_np: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug, Serialize)]
struct MinimalArgs {
    /// Sizes as <|A|>x<|B|>.
    #[arg(long)]
    size: String,
    /// Search window [0, nmax]; defaults to 25 when |A|+|B| <= 7, else 12.
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
    budget: u128,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
struct TripleArgs {
    #[arg(long = "A")]
    a: String,
    #[arg(long = "B")]
    b: String,
}

#[derive(Args, Debug, Serialize)]
struct ReplayArgs {
    /// A manifest written by an earlier run.
    manifest_file: PathBuf,
}

/// Everything needed to reproduce a run and check its output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub started_unix_ms: u128,
    pub wall_clock_ms: u128,
    /// SHA-256 of stdout followed by every written file, in order.
    pub output_digest: String,
    pub exit_code: i32,
}

/// Primary outputs of one run, written only after the run succeeds.
#[derive(Default)]
struct Emitted {
    stdout: String,
    files: Vec<(PathBuf, String)>,
    status: i32,
}

impl Emitted {
    fn text(stdout: String) -> Self {
        Emitted {
            stdout,
            ..Emitted::default()
        }
    }

    fn json<T: Serialize>(value: &T) -> Result<Self> {
        Ok(Emitted::text(json_text(value)?))
    }

    fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.stdout.as_bytes());
        for (_, body) in &self.files {
            h.update(body.as_bytes());
        }
        hex::encode(h.finalize())
    }
}

fn json_text<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::usage(format!("{SEED_ENV}={v:?} is not an unsigned 64-bit integer"))),
        Err(_) => Ok(0),
    }
}

fn parse_set(text: &str) -> Result<IntSet> {
    IntSet::parse_literal(text, None)
}

/// Parses two literals into a shared universe.
fn parse_pair(a: &str, b: &str) -> Result<(IntSet, IntSet)> {
    let (a, b) = (parse_set(a)?, parse_set(b)?);
    let u = a.universe_size().max(b.universe_size());
    Ok((a.rebase(u)?, b.rebase(u)?))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_poly(path: &Path) -> Result<MstdPolynomial> {
    MstdPolynomial::from_json(&read(path)?)
}

const GLOBAL_VALUE_FLAGS: [&str; 3] = ["--threads", "--manifest", "--config"];

/// Splits off the `--config` value and locates the subcommand words.
fn scan_argv(argv: &[String]) -> (Option<String>, Vec<usize>) {
    let mut config = None;
    let mut path = Vec::new();
    let mut i = 1;
    while i < argv.len() {
        let a = &argv[i];
        if let Some(v) = a.strip_prefix("--config=") {
            config = Some(v.to_string());
        } else if GLOBAL_VALUE_FLAGS.contains(&a.as_str()) {
            if a == "--config" {
                config = argv.get(i + 1).cloned();
            }
            i += 1;
        } else if a.starts_with('-') {
            if !path.is_empty() {
                break;
            }
        } else {
            path.push(i);
            if argv[path[0]] != "fringe" || path.len() == 2 {
                break;
            }
        }
        i += 1;
    }
    (config, path)
}

fn toml_flag_value(v: &toml::Value) -> Result<String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Array(items) => items.iter().map(toml_flag_value).collect::<Result<Vec<_>>>()?.join(","),
        other => return Err(Error::usage(format!("unsupported config value {other}"))),
    })
}

fn push_flags(table: &toml::Table, out: &mut Vec<String>) -> Result<()> {
    for (k, v) in table {
        if v.is_table() {
            continue;
        }
        match v {
            toml::Value::Boolean(true) => out.push(format!("--{k}")),
            toml::Value::Boolean(false) => {}
            _ => {
                out.push(format!("--{k}"));
                out.push(toml_flag_value(v)?);
            }
        }
    }
    Ok(())
}

/// Inserts config-file defaults ahead of the command-line flags so that
/// explicit flags win. Top-level keys are global flags; a `[mc]` or
/// `[fringe.estimate]` table supplies that subcommand's flags.
fn expand_config(argv: &[String]) -> Result<Vec<String>> {
    let (config, path) = scan_argv(argv);
    let Some(config) = config else {
        return Ok(argv.to_vec());
    };
    let text = read(Path::new(&config))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| Error::usage(format!("config {config}: {e}")))?;
    let mut global = Vec::new();
    push_flags(&table, &mut global)?;
    let mut local = Vec::new();
    let mut node = Some(&table);
    for &i in &path {
        node = node.and_then(|t| t.get(&argv[i])).and_then(|v| v.as_table());
        if i == *path.last().expect("nonempty") {
            if let Some(t) = node {
                push_flags(t, &mut local)?;
            }
        }
    }
    let insert_at = path.last().map_or(argv.len(), |&i| i + 1);
    let mut out = vec![argv[0].clone()];
    out.extend(global);
    out.extend_from_slice(&argv[1..insert_at]);
    out.extend(local);
    out.extend_from_slice(&argv[insert_at..]);
    Ok(out)
}

/// Drops the flags that only steer where side outputs go.
fn replayable_argv(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
            continue;
        }
        if a == "--manifest" || a == "--config" {
            skip = true;
            continue;
        }
        if a.starts_with("--manifest=") || a.starts_with("--config=") {
            continue;
        }
        out.push(a.clone());
    }
    out
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Mc(_) => "mc",
        Command::Stats(_) => "stats",
        Command::Enumerate(_) => "enumerate",
        Command::EvalPoly(_) => "eval-poly",
        Command::GridMax(_) => "grid-max",
        Command::Fringe(FringeCommand::Check(_)) => "fringe check",
        Command::Fringe(FringeCommand::Estimate(_)) => "fringe estimate",
        Command::Fringe(FringeCommand::LowerBound(_)) => "fringe lower-bound",
        Command::Fringe(FringeCommand::Search(_)) => "fringe search",
        Command::Phase(_) => "phase",
        Command::Minimal(_) => "minimal",
        Command::VerifyFormulas(_) => "verify-formulas",
        Command::VerifyTriple(_) => "verify-triple",
        Command::Replay(_) => "replay",
    }
}

fn command_seed(c: &Command) -> Option<Option<u64>> {
    match c {
        Command::Mc(a) => Some(a.seed),
        Command::Stats(a) => Some(a.seed),
        Command::Fringe(FringeCommand::Estimate(a)) => Some(a.seed),
        Command::Fringe(FringeCommand::LowerBound(a)) => Some(a.seed),
        Command::Phase(a) => Some(a.seed),
        Command::VerifyFormulas(a) => Some(a.seed),
        _ => None,
    }
}

/// Runs `mstd` with `argv` (including the program name), writing primary
/// output to `out` and diagnostics and the manifest to `err`. Returns the
/// process exit code.
pub fn dispatch(argv: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let argv = match expand_config(&argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let started = Instant::now();
    let started_unix_ms = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis());
    let seed = match command_seed(&cli.command).map(resolve_seed).transpose() {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    let par = Parallelism { threads: cli.threads };
    let result = run(&cli.command, seed.unwrap_or(0), &par, err);
    let emitted = match result {
        Ok(e) => e,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    for (path, body) in &emitted.files {
        if let Err(e) = std::fs::write(path, body) {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return 1;
        }
    }
    if out.write_all(emitted.stdout.as_bytes()).is_err() {
        return 1;
    }
    let manifest = RunManifest {
        subcommand: command_name(&cli.command).to_string(),
        argv: replayable_argv(&argv),
        params: serde_json::to_value(&cli).unwrap_or(serde_json::Value::Null),
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix_ms,
        wall_clock_ms: started.elapsed().as_millis(),
        output_digest: emitted.digest(),
        exit_code: emitted.status,
    };
    let written = match &cli.manifest {
        Some(path) => json_text(&manifest).and_then(|t| Ok(std::fs::write(path, t)?)),
        None => serde_json::to_string(&manifest)
            .map_err(Error::from)
            .and_then(|t| Ok(writeln!(err, "manifest: {t}")?)),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return 1;
    }
    emitted.status
}

fn run(cmd: &Command, seed: u64, par: &Parallelism, err: &mut dyn Write) -> Result<Emitted> {
    match cmd {
        Command::Mc(a) => run_mc(a, seed, par),
        Command::Stats(a) => run_stats(a, seed, par),
        Command::Enumerate(a) => run_enumerate(a, par),
        Command::EvalPoly(a) => {
            let poly = load_poly(&a.poly)?;
            let r = a.rho.vector()?;
            Emitted::json(&serde_json::json!({
                "n": poly.n,
                "p": r.p,
                "rho1": r.rho1,
                "rho2": r.rho2,
                "value": poly.evaluate(&r),
            }))
        }
        Command::GridMax(a) => Emitted::json(&grid_search_max(&load_poly(&a.poly)?, a.step)?),
        Command::Fringe(f) => run_fringe(f, seed, par),
        Command::Phase(a) => run_phase(a, seed, par),
        Command::Minimal(a) => run_minimal(a, par),
        Command::VerifyFormulas(a) => {
            let cfg = VerifyConfig {
                n: a.n,
                trials: a.trials,
                seed,
                ..VerifyConfig::default()
            };
            if a.trials == 0 {
                return Err(Error::usage("trials must be at least 1"));
            }
            let report = verify_formulas(&cfg, par)?;
            let mut e = Emitted::json(&report)?;
            if !report.all_pass {
                writeln!(err, "{} formula checks failed", report.failures().count())?;
                e.status = 1;
            }
            Ok(e)
        }
        Command::VerifyTriple(a) => {
            let (x, y) = parse_pair(&a.a, &a.b)?;
            let witness = triple_witness(&x, &y)?;
            let stats = SumDiffStats::of(&x, &y)?;
            Emitted::json(&serde_json::json!({
                "A": x.to_string(),
                "B": y.to_string(),
                "triple": witness.is_some(),
                "witness": witness,
                "is_mstd": stats.is_mstd(),
                "sum_size": stats.sum_size,
                "diff_size": stats.diff_size,
                "structure": structure_report(&x, &y)?,
            }))
        }
        Command::Replay(a) => run_replay(a, err),
    }
}

fn run_mc(a: &McArgs, seed: u64, par: &Parallelism) -> Result<Emitted> {
    let r = a.rho.vector()?;
    let est = estimate_p_n(a.n, &r, a.trials, seed, par)?;
    Ok(Emitted::text(match a.format {
        Format::Json => json_text(&est)?,
        Format::Csv => format!(
            "n,p,rho1,rho2,trials,successes,point,ci_low,ci_high,seed\n{},{},{},{},{},{},{},{},{},{}\n",
            est.n, r.p, r.rho1, r.rho2, est.trials, est.successes, est.point, est.ci_low, est.ci_high, est.seed
        ),
        Format::Table => format!(
            "n={} p={:.6} rho1={:.6} rho2={:.6} seed={}\ntrials     {}\nsuccesses  {}\nestimate   {:.6}\n95% CI     [{:.6}, {:.6}]\n",
            est.n, r.p, r.rho1, r.rho2, est.seed, est.trials, est.successes, est.point, est.ci_low, est.ci_high
        ),
    }))
}

fn run_stats(a: &StatsArgs, seed: u64, par: &Parallelism) -> Result<Emitted> {
    let r = match (&a.regime, a.p) {
        (Some(reg), None) => DecaySpec::new(reg.parse::<Regime>()?, a.rho1, a.rho2)?.resolve(a.n)?,
        (None, Some(p)) => RhoVector::new(p, a.rho1, a.rho2)?,
        _ => return Err(Error::usage("give exactly one of --p and --regime")),
    };
    let s = estimate_sum_diff_stats(a.n, &r, a.trials, seed, par)?;
    Ok(Emitted::text(match a.format {
        Format::Json => json_text(&s)?,
        Format::Csv => format!(
            "n,p,rho1,rho2,trials,seed,mean_s,sd_s,mean_d,sd_d,mean_sc,sd_sc,mean_dc,sd_dc,ratio_of_means,mean_ratio,mstd_freq\n\
             {},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.n,
            r.p,
            r.rho1,
            r.rho2,
            s.trials,
            s.seed,
            s.sum_size.mean,
            s.sum_size.std_dev,
            s.diff_size.mean,
            s.diff_size.std_dev,
            s.sum_complement.mean,
            s.sum_complement.std_dev,
            s.diff_complement.mean,
            s.diff_complement.std_dev,
            s.ratio_of_means,
            s.mean_ratio,
            s.mstd_frequency
        ),
        Format::Table => {
            let mut t = format!(
                "n={} p={:.6} rho1={:.6} rho2={:.6} trials={} seed={}\n{:<8}{:>16}{:>16}\n",
                s.n, r.p, r.rho1, r.rho2, s.trials, s.seed, "", "mean", "std dev"
            );
            for (name, m) in [
                ("S", s.sum_size),
                ("D", s.diff_size),
                ("S^c", s.sum_complement),
                ("D^c", s.diff_complement),
            ] {
                t += &format!("{name:<8}{:>16.6}{:>16.6}\n", m.mean, m.std_dev);
            }
            t += &format!("mean D/S {:.6}\nMSTD     {:.6}\n", s.mean_ratio, s.mstd_frequency);
            t
        }
    }))
}

fn run_enumerate(a: &EnumerateArgs, par: &Parallelism) -> Result<Emitted> {
    let catalog = enumerate_mstd_pairs(a.n, a.cap, par)?;
    let poly = build_polynomial(&catalog)?;
    let mut e = Emitted::default();
    match &a.out {
        Some(path) => e.files.push((path.clone(), catalog.to_text())),
        None => e.stdout += &catalog.to_text(),
    }
    if let Some(path) = &a.poly {
        e.files.push((path.clone(), poly.to_json()));
    }
    if a.out.is_some() {
        e.stdout += &json_text(&serde_json::json!({
            "n": a.n,
            "pairs": catalog.len(),
            "signatures": poly.terms.len(),
        }))?;
    }
    Ok(e)
}

fn run_fringe(f: &FringeCommand, seed: u64, par: &Parallelism) -> Result<Emitted> {
    match f {
        FringeCommand::Check(a) => {
            let t = FringeTuple::from_literals(&a.l, &a.lp, &a.r, &a.rp, a.k)?;
            let (lhs, rhs) = t.sides();
            Emitted::json(&serde_json::json!({
                "tuple": t,
                "lhs": lhs,
                "rhs": rhs,
                "mstd_fringe": is_mstd_fringe(&t),
                "weak_mstd_fringe": is_weak_mstd_fringe(&t),
                "minimal": is_minimal_fringe(&t, a.weak),
                "richness_feasible": richness_feasible(&t),
            }))
        }
        FringeCommand::Estimate(a) => {
            let t: FringeTuple = serde_json::from_str(&read(&a.tuple_file)?)?;
            Emitted::json(&estimate_fringe_limit(&t, &a.rho.vector()?, a.n, a.trials, seed, par)?)
        }
        FringeCommand::LowerBound(a) => {
            let cfg = LowerBoundConfig {
                k_cap: a.k_cap,
                trials: a.trials,
                seed,
                max_terms: a.max_terms,
            };
            Emitted::json(&lower_bound_p(&a.rho.vector()?, &cfg, par)?)
        }
        FringeCommand::Search(a) => {
            if a.k > MAX_EXHAUSTIVE_K {
                return Err(Error::Budget {
                    what: format!("fringe search at k={}", a.k),
                    cost: 1u128 << (4 * (a.k + 1)),
                    cap: 1u128 << (4 * (MAX_EXHAUSTIVE_K + 1)),
                });
            }
            let found = search_fringes(a.k, a.weak)?;
            Emitted::json(&serde_json::json!({
                "k": a.k,
                "weak": a.weak,
                "count": found.len(),
                "tuples": found,
            }))
        }
    }
}

fn run_phase(a: &PhaseArgs, seed: u64, par: &Parallelism) -> Result<Emitted> {
    let mut spec = DecaySpec::new(a.regime.parse()?, a.rho1, a.rho2)?;
    if let Some(m) = a.min_np {
        spec.min_np = m;
    }
    let ns = parse_n_list(&a.ns)?;
    let rows = phase_scan(&spec, &ns, a.trials, seed, par)?;
    Ok(Emitted::text(match a.format {
        Format::Csv => rows_to_csv(&rows),
        Format::Json => json_text(&serde_json::json!({ "spec": spec, "seed": seed, "rows": rows }))?,
        Format::Table => {
            let cols: Vec<&str> = CSV_HEADER.split(',').collect();
            let mut t = format!("# {} rho1={:.6} rho2={:.6} seed={seed}\n", spec.regime, a.rho1, a.rho2);
            t += &cols.iter().map(|c| format!("{c:>14}")).collect::<String>();
            t.push('\n');
            for line in rows_to_csv(&rows).lines().skip(1) {
                for (i, cell) in line.split(',').enumerate() {
                    let v: f64 = cell.parse().unwrap_or(f64::NAN);
                    if matches!(cols[i], "N" | "trials") {
                        t += &format!("{cell:>14}");
                    } else {
                        t += &format!("{v:>14.6}");
                    }
                }
                t.push('\n');
            }
            t
        }
    }))
}

fn run_minimal(a: &MinimalArgs, par: &Parallelism) -> Result<Emitted> {
    let size: SizeClass = a.size.parse()?;
    let n_max = a
        .nmax
        .unwrap_or(if size.size_a + size.size_b <= 7 { 25 } else { 12 });
    let found = search_size(size, n_max, a.budget, par)?;
    let mut rows = Vec::new();
    for c in &found {
        let (x, y) = c.sets();
        rows.push(serde_json::json!({
            "A": x.to_string(),
            "B": y.to_string(),
            "original_A": c.original_a,
            "original_B": c.original_b,
            "shift": c.shift,
            "scale": c.scale,
            "reflected": c.reflected,
            "mstd": is_mstd_pair(&x, &y)?,
            "triple": triple_witness(&x, &y)?.is_some(),
        }));
    }
    let window = format!("exhaustive over [0, {n_max}] only; larger ranges not examined");
    Ok(Emitted::text(match a.format {
        Format::Json => json_text(&serde_json::json!({
            "size": size.to_string(),
            "n_max": n_max,
            "window": window,
            "classes": found.len(),
            "pairs": rows,
        }))?,
        _ => {
            let mut t = format!("# size {size}: {} canonical classes ({window})\n", found.len());
            for r in &rows {
                t += &format!("{} | {}\n", r["A"].as_str().unwrap_or(""), r["B"].as_str().unwrap_or(""));
            }
            t
        }
    }))
}

fn run_replay(a: &ReplayArgs, err: &mut dyn Write) -> Result<Emitted> {
    let m: RunManifest = serde_json::from_str(&read(&a.manifest_file)?)?;
    if m.subcommand == "replay" {
        return Err(Error::usage("cannot replay a replay manifest"));
    }
    let cli = Cli::try_parse_from(&m.argv).map_err(|e| Error::usage(e.to_string()))?;
    let seed = command_seed(&cli.command).map(resolve_seed).transpose()?;
    if seed != m.seed {
        return Err(Error::usage(format!("manifest seed {:?} differs from resolved seed {seed:?}", m.seed)));
    }
    let par = Parallelism { threads: cli.threads };
    let mut e = run(&cli.command, seed.unwrap_or(0), &par, err)?;
    let digest = e.digest();
    if digest != m.output_digest {
        writeln!(err, "digest mismatch: manifest {} vs replay {digest}", m.output_digest)?;
        e.status = 1;
    } else {
        writeln!(err, "digest match: {digest}")?;
    }
    Ok(e)
}
