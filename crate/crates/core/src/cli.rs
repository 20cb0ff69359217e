//! `symlik` command line: aggregation, fitting, simulation studies,
//! five-number-summary estimates and likelihood oracle checks.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 numerical failure (including non-convergence and failed checks).

use crate::data::DataMatrix;
use crate::distributions::{Family, FamilyKind};
use crate::error::Error;
use crate::estimation::{fit_mle, meta_mean_luo, meta_sd_shi, meta_sd_wan, meta_symbolic, FitOptions, FitResult, MetaMethod};
use crate::likelihood::RectLikelihood;
use crate::simulation::oracle::{default_bivariate, MIN_SIMS};
use crate::simulation::{
    default_suite, mc_density_oracle, mc_density_oracle_with, resolve_iter_seg_convention, run_experiment,
    run_meta_bias_study, run_rmse_study, ExperimentConfig, MetaBiasConfig, OracleEntry, OracleReport, RmseConfig,
    SymbolSpec,
};
use crate::symbols::Symbol;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Experiment cells with more rows per class than this need `--expensive`.
pub const EXPENSIVE_N_C: usize = 100;

#[derive(Debug, Parser)]
#[command(name = "symlik", version, about = "Symbolic likelihood inference for aggregated data")]
pub struct Cli {
    /// Cap on worker threads used by simulations.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Aggregate a CSV of micro-data into one symbol per class.
    Aggregate(AggregateArgs),
    /// Fit a family to a JSON list of symbols by maximum likelihood.
    Fit(FitArgs),
    /// Run a simulation study described by a config file.
    Simulate(SimulateArgs),
    /// Estimate a sample mean and sd from a five-number summary.
    Meta(MetaArgs),
    /// Check likelihoods against simulated symbols.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// TOML file with a `[symbol]` table.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Symbol JSON written by `aggregate`.
    #[arg(long)]
    pub input: PathBuf,
    /// TOML file naming the family, starting point and options.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Master seed; every random stream is derived from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub output: PathBuf,
    /// Multiplies the replicate count.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Allow cells with large classes.
    #[arg(long)]
    pub expensive: bool,
}

#[derive(Debug, Args)]
pub struct MetaArgs {
    /// q0,q1,q2,q3,q4 (minimum, quartiles, median, maximum).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub quantiles: Vec<f64>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_value = "luo,wan,shi,symbolic_normal,symbolic_lognormal")]
    pub methods: Vec<String>,
    /// Optional CSV copy of the printed table.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// TOML suite; the built-in suite is used when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
    /// Multiplies the number of simulated symbols (never below the minimum).
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Evaluate the interval likelihood with n + 1, to see the check fail.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

/// Error carrying the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
    fn data(message: impl Into<String>) -> Self {
        Self { code: EXIT_DATA, message: message.into() }
    }
    fn numerical(message: impl Into<String>) -> Self {
        Self { code: EXIT_NUMERICAL, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::InvalidParameter(_) => EXIT_USAGE,
            Error::Numerical(_) | Error::ZeroLikelihoodStart => EXIT_NUMERICAL,
            _ => EXIT_DATA,
        };
        Self { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::data(format!("{}: {e}", path.display()))
}

fn read_to_string(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the same directory and renames it.
fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::numerical(e.to_string()))?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(vec![]);
    let csv_err = |e: csv::Error| CliError::numerical(e.to_string());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::numerical(e.to_string()))?;
    write_atomic(path, &bytes)
}

fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

fn git_describe() -> String {
    std::process::Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .map(|o| String::from_utf8_lossy(&o.stdout).trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

/// Record of one command run, written after all of its outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub master_seed: Option<u64>,
    pub version: String,
    pub git_describe: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub notes: serde_json::Value,
}

struct Run {
    command: &'static str,
    started: f64,
    clock: Instant,
}

impl Run {
    fn start(command: &'static str) -> Self {
        Self { command, started: unix_now(), clock: Instant::now() }
    }

    fn finish(
        self,
        path: &Path,
        config: serde_json::Value,
        seed: Option<u64>,
        outputs: &[PathBuf],
        notes: serde_json::Value,
    ) -> CliResult<()> {
        for o in outputs {
            if !o.exists() {
                return Err(CliError::numerical(format!("expected output {} is missing", o.display())));
            }
        }
        let m = RunManifest {
            command: self.command.into(),
            config,
            master_seed: seed,
            version: env!("CARGO_PKG_VERSION").into(),
            git_describe: git_describe(),
            started_unix: self.started,
            finished_unix: unix_now(),
            wall_time_s: self.clock.elapsed().as_secs_f64(),
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            notes,
        };
        write_json(path, &m)
    }
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

// ---------------------------------------------------------------- aggregate

fn default_class_column() -> String {
    "class".into()
}

/// `aggregate` configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AggregateConfig {
    pub symbol: SymbolSpec,
    /// Value columns; every non-class column when empty.
    #[serde(default)]
    pub columns: Vec<String>,
    #[serde(default = "default_class_column")]
    pub class_column: String,
}

/// Micro-data rows grouped by class label in order of first appearance.
pub fn read_classes(path: &Path, cfg: &AggregateConfig) -> CliResult<Vec<(String, DataMatrix)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| io_err(path, e))?;
    let header = rdr.headers().map_err(|e| io_err(path, e))?.clone();
    let class_idx = header.iter().position(|h| h == cfg.class_column);
    let value_idx: Vec<usize> = if cfg.columns.is_empty() {
        (0..header.len()).filter(|&i| Some(i) != class_idx).collect()
    } else {
        cfg.columns
            .iter()
            .map(|c| {
                header
                    .iter()
                    .position(|h| h == c)
                    .ok_or_else(|| CliError::usage(format!("column '{c}' is not in the header of {}", path.display())))
            })
            .collect::<CliResult<_>>()?
    };
    if value_idx.is_empty() {
        return Err(CliError::data(format!("{} has no value columns", path.display())));
    }
    let mut order: Vec<String> = vec![];
    let mut values: Vec<Vec<f64>> = vec![];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let label = class_idx.map(|i| rec.get(i).unwrap_or("").to_string()).unwrap_or_default();
        let slot = match order.iter().position(|c| *c == label) {
            Some(s) => s,
            None => {
                order.push(label);
                values.push(vec![]);
                order.len() - 1
            }
        };
        for &i in &value_idx {
            let raw = rec.get(i).unwrap_or("");
            let v: f64 = raw.parse().map_err(|_| {
                CliError::data(format!("{} line {line}: column '{}': cannot parse '{raw}'", path.display(), &header[i]))
            })?;
            if !v.is_finite() {
                return Err(CliError::data(format!("{} line {line}: non-finite value '{raw}'", path.display())));
            }
            values[slot].push(v);
        }
    }
    order
        .into_iter()
        .zip(values)
        .map(|(c, v)| Ok((c, DataMatrix::new(v, value_idx.len())?)))
        .collect()
}

pub fn cmd_aggregate(args: &AggregateArgs) -> CliResult<()> {
    let run = Run::start("aggregate");
    let cfg: AggregateConfig = read_toml(&args.config)?;
    let classes = read_classes(&args.input, &cfg)?;
    cfg.symbol.check_dim(classes[0].1.d()).map_err(CliError::from)?;
    let mut symbols: Vec<Symbol> = vec![];
    let mut kept: Vec<String> = vec![];
    let mut skipped: Vec<(String, String)> = vec![];
    for (label, x) in &classes {
        match cfg.symbol.build(x) {
            Ok(s) => {
                symbols.push(s);
                kept.push(label.clone());
            }
            Err(e) => {
                eprintln!("class '{label}': {e}");
                skipped.push((label.clone(), e.to_string()));
            }
        }
    }
    write_json(&args.output, &symbols)?;
    let manifest = manifest_path(&args.output);
    let notes = serde_json::json!({ "classes": kept, "skipped": skipped });
    run.finish(&manifest, to_value(&cfg), None, std::slice::from_ref(&args.output), notes)?;
    println!("{} symbols written to {}", symbols.len(), args.output.display());
    if !skipped.is_empty() {
        return Err(CliError::data(format!("{} class(es) skipped", skipped.len())));
    }
    Ok(())
}

fn manifest_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
    output.with_file_name(format!("{stem}.manifest.json"))
}

// ---------------------------------------------------------------- fit

fn default_true() -> bool {
    true
}

/// `fit` configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub family: FamilyKind,
    pub theta0: Vec<f64>,
    #[serde(default)]
    pub rect: RectLikelihood,
    #[serde(default)]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default = "default_true")]
    pub stderr: bool,
}

pub fn read_symbols(path: &Path) -> CliResult<Vec<Symbol>> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

pub fn cmd_fit(args: &FitArgs) -> CliResult<FitResult> {
    let run = Run::start("fit");
    let cfg: FitConfig = read_toml(&args.config)?;
    let symbols = read_symbols(&args.input)?;
    let defaults = FitOptions::default();
    let opts = FitOptions {
        max_iter: cfg.max_iter.unwrap_or(defaults.max_iter),
        tol: cfg.tol.unwrap_or(defaults.tol),
        rect: cfg.rect,
        compute_stderr: cfg.stderr,
        ..defaults
    };
    let fit = fit_mle(&symbols, cfg.family, &cfg.theta0, &opts)?;
    println!("{:<10} {:>22} {:>14}", "parameter", "estimate", "stderr");
    for (j, name) in fit.param_names.iter().enumerate() {
        let se = fit.stderr.as_ref().map(|s| format!("{:.6e}", s[j])).unwrap_or_else(|| "-".into());
        println!("{name:<10} {:>22.15e} {se:>14}", fit.theta_hat[j]);
    }
    println!("loglik {:.15e}  iterations {}  converged {}", fit.loglik_at_max, fit.iterations, fit.converged);
    if let Some(note) = &fit.stderr_note {
        println!("stderr unavailable: {note}");
    }
    if let Some(out) = &args.output {
        write_json(out, &fit)?;
        run.finish(&manifest_path(out), to_value(&cfg), None, std::slice::from_ref(out), serde_json::Value::Null)?;
    }
    if !fit.converged {
        return Err(CliError::numerical("the optimiser did not converge"));
    }
    Ok(fit)
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    Experiment,
    Rmse,
    MetaBias,
}

/// `simulate` configuration; `study` selects which table is read.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub study: Study,
    #[serde(default)]
    pub experiment: Option<ExperimentConfig>,
    #[serde(default)]
    pub rmse: Option<RmseConfig>,
    #[serde(default)]
    pub meta_bias: Option<MetaBiasConfig>,
}

fn missing(section: &str) -> CliError {
    CliError::usage(format!("config has no [{section}] table"))
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let run = Run::start("simulate");
    let seed = args.seed.ok_or_else(|| CliError::usage("simulate needs --seed"))?;
    if args.scale.is_nan() || args.scale <= 0.0 {
        return Err(CliError::usage("--scale must be positive"));
    }
    let cfg: SimulateConfig = read_toml(&args.config)?;
    fs::create_dir_all(&args.output).map_err(|e| io_err(&args.output, e))?;
    let dir = &args.output;
    let mut outputs = vec![];
    let mut notes = serde_json::Value::Null;
    let echo;
    let mut failed_checks = 0;
    match cfg.study {
        Study::Experiment => {
            let mut c = cfg.experiment.clone().ok_or_else(|| missing("experiment"))?.scaled(args.scale);
            c.master_seed = seed;
            c.validate()?;
            if c.n_c > EXPENSIVE_N_C && !args.expensive {
                return Err(CliError::usage(format!("n_c = {} exceeds {EXPENSIVE_N_C}; pass --expensive", c.n_c)));
            }
            let s = run_experiment(&c)?;
            let names = &s.param_names;
            let rows: Vec<Vec<String>> = names
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    vec![
                        p.clone(),
                        num(s.mean[j]),
                        s.sd.as_ref().map(|v| num(v[j])).unwrap_or_default(),
                        s.used.to_string(),
                        s.failures.to_string(),
                        s.replicates.to_string(),
                    ]
                })
                .collect();
            let path = dir.join("summary.csv");
            write_csv(&path, &["param", "mean", "sd", "used", "failures", "replicates"], &rows)?;
            outputs.push(path);

            let mut header = vec!["replicate", "converged", "loglik"];
            header.extend(names.iter().map(String::as_str));
            header.push("error");
            let rows: Vec<Vec<String>> = s
                .outcomes
                .iter()
                .map(|o| {
                    let mut r = vec![o.index.to_string(), o.converged.to_string(), o.loglik.map(num).unwrap_or_default()];
                    match &o.theta_hat {
                        Some(t) => r.extend(t.iter().map(|v| num(*v))),
                        None => r.extend(names.iter().map(|_| String::new())),
                    }
                    r.push(o.error.clone().unwrap_or_default());
                    r
                })
                .collect();
            let path = dir.join("replicates.csv");
            write_csv(&path, &header, &rows)?;
            outputs.push(path);

            if !c.expect.is_empty() {
                let mut rows = vec![];
                for e in &c.expect {
                    let k = s.check(&c, e)?;
                    let (lo, hi) = k.sd_band.unwrap_or((f64::NAN, f64::NAN));
                    println!(
                        "{} {}: mean {:.4} (target {} +/- {:.4}), sd {} (band [{lo:.4}, {hi:.4}])",
                        if k.passed { "PASS" } else { "FAIL" },
                        k.param,
                        k.mean,
                        k.target_mean,
                        k.mean_tolerance,
                        k.sd.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into())
                    );
                    if !k.passed {
                        failed_checks += 1;
                    }
                    rows.push(vec![
                        k.param,
                        num(k.target_mean),
                        num(k.mean),
                        num(k.mean_tolerance),
                        num(k.target_sd),
                        k.sd.map(num).unwrap_or_default(),
                        num(lo),
                        num(hi),
                        k.passed.to_string(),
                    ]);
                }
                let path = dir.join("checks.csv");
                write_csv(
                    &path,
                    &["param", "target_mean", "mean", "mean_tolerance", "target_sd", "sd", "sd_lower", "sd_upper", "passed"],
                    &rows,
                )?;
                outputs.push(path);
            }
            for (j, p) in names.iter().enumerate() {
                println!("{p:<8} mean {:.6}  sd {}", s.mean[j], s.sd.as_ref().map(|v| format!("{:.6}", v[j])).unwrap_or_else(|| "-".into()));
            }
            println!("{} of {} replicates used, {:.1} s", s.used, s.replicates, s.wall_time_s);
            notes = serde_json::json!({ "replicates": c.replicates, "failures": s.failures, "study_wall_time_s": s.wall_time_s });
            echo = to_value(&c);
        }
        Study::Rmse => {
            let mut c = cfg.rmse.clone().ok_or_else(|| missing("rmse"))?.scaled(args.scale);
            c.master_seed = seed;
            let curve = run_rmse_study(&c)?;
            let rows: Vec<Vec<String>> = curve
                .rows
                .iter()
                .map(|r| {
                    vec![
                        to_value(&r.kind).as_str().unwrap_or_default().to_string(),
                        r.i.to_string(),
                        num(r.q),
                        num(r.rmse_mu),
                        num(r.rmse_sigma),
                        r.used.to_string(),
                    ]
                })
                .collect();
            let path = dir.join("rmse.csv");
            write_csv(&path, &["kind", "i", "q", "rmse_mu", "rmse_sigma", "used"], &rows)?;
            outputs.push(path);
            println!("{} rows written for n = {}, {} replicates", rows.len(), c.n, c.replicates);
            echo = to_value(&c);
        }
        Study::MetaBias => {
            let mut c = cfg.meta_bias.clone().ok_or_else(|| missing("meta_bias"))?.scaled(args.scale);
            c.master_seed = seed;
            let table = run_meta_bias_study(&c)?;
            let rows: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.method.name().to_string(),
                        to_value(&r.statistic).as_str().unwrap_or_default().to_string(),
                        num(r.bias),
                        num(r.se),
                        num(r.lower),
                        num(r.upper),
                        r.used.to_string(),
                    ]
                })
                .collect();
            let path = dir.join("meta_bias.csv");
            write_csv(&path, &["n", "method", "statistic", "bias", "se", "lower", "upper", "used"], &rows)?;
            outputs.push(path);
            println!("{} rows written, {} replicates per n", rows.len(), c.replicates);
            echo = to_value(&c);
        }
    }
    run.finish(&dir.join("manifest.json"), echo, Some(seed), &outputs, notes)?;
    if failed_checks > 0 {
        return Err(CliError::numerical(format!("{failed_checks} expectation check(s) failed")));
    }
    Ok(())
}

// ---------------------------------------------------------------- meta

/// One printed row: estimates the method does not produce are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetaRow {
    pub method: MetaMethod,
    pub mean_hat: Option<f64>,
    pub sd_hat: Option<f64>,
}

pub fn meta_rows(q: &[f64; 5], n: usize, methods: &[MetaMethod]) -> CliResult<Vec<MetaRow>> {
    methods
        .iter()
        .map(|&method| {
            let (mean_hat, sd_hat) = match method {
                MetaMethod::Luo => (Some(meta_mean_luo(q, n)?), None),
                MetaMethod::Wan => (None, Some(meta_sd_wan(q, n)?)),
                MetaMethod::Shi => (None, Some(meta_sd_shi(q, n)?)),
                MetaMethod::SymbolicNormal => {
                    let e = meta_symbolic(q, n, FamilyKind::Normal1D)?;
                    (e.mean_hat, e.sd_hat)
                }
                MetaMethod::SymbolicLogNormal => {
                    let e = meta_symbolic(q, n, FamilyKind::LogNormal1D)?;
                    (e.mean_hat, e.sd_hat)
                }
            };
            Ok(MetaRow { method, mean_hat, sd_hat })
        })
        .collect()
}

pub fn cmd_meta(args: &MetaArgs) -> CliResult<Vec<MetaRow>> {
    let q: [f64; 5] = args
        .quantiles
        .as_slice()
        .try_into()
        .map_err(|_| CliError::usage("--quantiles needs exactly five values"))?;
    let methods: Vec<MetaMethod> = args.methods.iter().map(|m| MetaMethod::parse(m)).collect::<Result<_, _>>()?;
    let rows = meta_rows(&q, args.n, &methods)?;
    let cell = |v: Option<f64>| v.map(|x| format!("{x:.10}")).unwrap_or_else(|| "-".into());
    println!("{:<20} {:>18} {:>18}", "method", "mean", "sd");
    for r in &rows {
        println!("{:<20} {:>18} {:>18}", r.method.name(), cell(r.mean_hat), cell(r.sd_hat));
    }
    if let Some(out) = &args.output {
        let csv_rows: Vec<Vec<String>> = rows
            .iter()
            .map(|r| vec![r.method.name().into(), r.mean_hat.map(num).unwrap_or_default(), r.sd_hat.map(num).unwrap_or_default()])
            .collect();
        write_csv(out, &["method", "mean_hat", "sd_hat"], &csv_rows)?;
    }
    Ok(rows)
}

// ---------------------------------------------------------------- oracle-check

fn default_n_sims() -> usize {
    1_000_000
}

/// `oracle-check` configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_n_sims")]
    pub n_sims: usize,
    #[serde(default = "default_true")]
    pub resolve_convention: bool,
    #[serde(default, rename = "case")]
    pub cases: Vec<OracleEntry>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { n_sims: default_n_sims(), resolve_convention: true, cases: default_suite() }
    }
}

pub fn cmd_oracle_check(args: &OracleArgs) -> CliResult<Vec<OracleReport>> {
    let run = Run::start("oracle-check");
    let cfg = match &args.config {
        Some(p) => read_toml::<OracleConfig>(p)?,
        None => OracleConfig::default(),
    };
    if cfg.cases.is_empty() && !cfg.resolve_convention {
        return Err(CliError::usage("nothing to check"));
    }
    let n_sims = ((cfg.n_sims as f64 * args.scale).round() as usize).max(MIN_SIMS);
    let mut reports = vec![];
    let mut rows = vec![];
    for (i, entry) in cfg.cases.iter().enumerate() {
        let fam = entry.family()?;
        let seed = args.seed.wrapping_add(i as u64);
        let r = if args.inject_fault {
            mc_density_oracle_with(&entry.case, &fam, n_sims, seed, &off_by_one)?
        } else {
            mc_density_oracle(&entry.case, &fam, n_sims, seed)?
        };
        println!("{} {:<24} max |z| {:.2}", if r.passed { "PASS" } else { "FAIL" }, entry.label, r.max_abs_z);
        rows.push(vec![
            entry.label.clone(),
            r.case.clone(),
            r.n_sims.to_string(),
            (r.probes.len() + r.cells.len()).to_string(),
            num(r.max_abs_z),
            r.passed.to_string(),
        ]);
        reports.push(r);
    }
    let mut notes = serde_json::Value::Null;
    let mut convention_ok = true;
    if cfg.resolve_convention {
        let res = resolve_iter_seg_convention(&default_bivariate(), n_sims, args.seed.wrapping_add(1000))?;
        println!(
            "iterative segmentation upper index: from bottom max |z| {:.2}, from top max |z| {:.2}, resolved {:?}",
            res.from_bottom.max_abs_z, res.from_top.max_abs_z, res.resolved
        );
        convention_ok = res.resolved == Some(crate::symbols::ITER_SEG_UPPER_INDEX);
        notes = serde_json::json!({
            "iter_seg_convention": res.resolved,
            "iter_seg_from_bottom_max_abs_z": res.from_bottom.max_abs_z,
            "iter_seg_from_top_max_abs_z": res.from_top.max_abs_z,
        });
        for r in [&res.from_bottom, &res.from_top] {
            rows.push(vec![
                "iter_seg_convention".into(),
                r.case.clone(),
                r.n_sims.to_string(),
                (r.probes.len() + r.cells.len()).to_string(),
                num(r.max_abs_z),
                r.passed.to_string(),
            ]);
        }
        reports.push(res.from_bottom);
        reports.push(res.from_top);
    }
    fs::create_dir_all(&args.output).map_err(|e| io_err(&args.output, e))?;
    let json = args.output.join("oracle.json");
    write_json(&json, &reports)?;
    let csv_path = args.output.join("oracle.csv");
    write_csv(&csv_path, &["label", "case", "n_sims", "checks", "max_abs_z", "passed"], &rows)?;
    run.finish(&args.output.join("manifest.json"), to_value(&cfg), Some(args.seed), &[json, csv_path], notes)?;
    let failed = reports.iter().take(cfg.cases.len()).filter(|r| !r.passed).count();
    if failed > 0 || !convention_ok {
        return Err(CliError::numerical(format!(
            "{failed} case(s) failed{}",
            if convention_ok { "" } else { "; convention not resolved" }
        )));
    }
    Ok(reports)
}

// interval likelihood with the upper-tail exponent raised by one
fn off_by_one(s: &Symbol, f: &Family) -> crate::error::Result<f64> {
    match s {
        Symbol::Interval(iv) => {
            crate::likelihood::loglik_interval(&crate::symbols::IntervalSymbol { n: iv.n + 1, ..iv.clone() }, f)
        }
        other => crate::likelihood::symbol_loglik(other, f, RectLikelihood::Full),
    }
}

// ---------------------------------------------------------------- entry point

fn dispatch(cli: &Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        // fails only when a pool already exists, e.g. on a second call in one process
        if rayon::ThreadPoolBuilder::new().num_threads(t).build_global().is_err() {
            log::warn!("worker pool already initialised; --threads ignored");
        }
    }
    match &cli.command {
        Command::Aggregate(a) => cmd_aggregate(a),
        Command::Fit(a) => cmd_fit(a).map(|_| ()),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Meta(a) => cmd_meta(a).map(|_| ()),
        Command::OracleCheck(a) => cmd_oracle_check(a).map(|_| ()),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kinds_map_to_exit_codes() {
        assert_eq!(CliError::from(Error::Config("x".into())).code, EXIT_USAGE);
        assert_eq!(CliError::from(Error::InvalidParameter("x".into())).code, EXIT_USAGE);
        assert_eq!(CliError::from(Error::Data("x".into())).code, EXIT_DATA);
        assert_eq!(CliError::from(Error::Constraint("x".into())).code, EXIT_DATA);
        assert_eq!(CliError::from(Error::Numerical("x".into())).code, EXIT_NUMERICAL);
        assert_eq!(CliError::from(Error::ZeroLikelihoodStart).code, EXIT_NUMERICAL);
    }

    #[test]
    fn parse_failures_are_usage_errors() {
        assert_eq!(run(["symlik", "nope"]), EXIT_USAGE);
        assert_eq!(run(["symlik", "meta", "--n", "9"]), EXIT_USAGE);
        assert_eq!(run(["symlik", "meta", "--quantiles", "1,2,3,4,5", "--n", "9"]), EXIT_OK);
    }

    #[test]
    fn meta_rows_follow_the_requested_methods() {
        let q = [1.0, 2.0, 3.0, 4.0, 5.0];
        let rows = meta_rows(&q, 9, &[MetaMethod::Shi, MetaMethod::Luo]).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].method, MetaMethod::Shi);
        assert!(rows[0].mean_hat.is_none() && rows[0].sd_hat.unwrap() > 0.0);
        assert_eq!(rows[1].mean_hat, Some(3.0));
    }

    #[test]
    fn classes_keep_first_appearance_order() {
        let dir = tempfile::TempDir::new().unwrap();
        let path = dir.path().join("d.csv");
        fs::write(&path, "x,class,y\n1,b,10\n2,a,20\n3,b,30\n").unwrap();
        let cfg: AggregateConfig = toml::from_str("symbol = { type = \"rect_minmax\" }").unwrap();
        let classes = read_classes(&path, &cfg).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].0, "b");
        assert_eq!(classes[0].1.values(), &[1.0, 10.0, 3.0, 30.0]);
        let cfg: AggregateConfig = toml::from_str("columns = [\"z\"]\nsymbol = { type = \"range\" }").unwrap();
        assert_eq!(read_classes(&path, &cfg).unwrap_err().code, EXIT_USAGE);
    }

    #[test]
    fn atomic_writes_leave_no_temporary_files() {
        let dir = tempfile::TempDir::new().unwrap();
        let out = dir.path().join("nested/out.json");
        write_json(&out, &vec![1.5, 2.5]).unwrap();
        write_json(&out, &vec![3.5]).unwrap();
        assert_eq!(fs::read_to_string(&out).unwrap(), "[\n  3.5\n]\n");
        let names: Vec<_> = fs::read_dir(out.parent().unwrap()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
        assert_eq!(manifest_path(&out), dir.path().join("nested/out.manifest.json"));
    }

    #[test]
    fn simulate_config_requires_its_section() {
        let cfg: SimulateConfig = toml::from_str("study = \"rmse\"").unwrap();
        assert!(cfg.rmse.is_none());
        assert!(toml::from_str::<SimulateConfig>("study = \"sweep\"").is_err());
    }
}
