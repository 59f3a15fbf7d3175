//! Command-line front end.
//!
//! Exit codes: 0 success, 1 runtime error (I/O, malformed input),
//! 2 usage error, 3 exclusion unsatisfiable, 4 inconsistent system.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::benchgen::{self, GraphModel, InstanceConfig};
use crate::disentangle::{
    disentangle_finite_samples, disentangle_oracle_report, DisentangleError, ExactMixture, FiniteParams, DEFAULT_DELTA,
    DEFAULT_EPSILON,
};
use crate::estimate::{ancestral_sample, mixture_sample, mle_cpds, SampleSet, SampleSource};
use crate::intervene::check_exclusion;
use crate::io;
use crate::manifest::{manifest_path_for, RunManifest};
use crate::scalar::Rational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EXCLUSION: i32 = 3;
pub const EXIT_INCONSISTENT: i32 = 4;

pub const SEED_ENV: &str = "DISENTANGLE_SEED";

#[derive(Debug, Parser)]
#[command(name = "disentangle", version, about = "Recover mixtures of interventions on causal Bayesian networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random network and tuple set.
    Gen(GenArgs),
    /// Draw samples from a network or a mixture of interventions.
    Sample(SampleArgs),
    /// Recover the tuple set behind a mixture.
    Disentangle(DisentangleArgs),
    /// Run the benchmark sweep.
    Bench(BenchArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub nodes: u64,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(2..))]
    pub cardinality: u64,
    #[arg(long, value_enum, default_value_t = GraphModel::ScaleFree)]
    pub model: GraphModel,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory; receives net.json, tuples.json and manifest.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub net: PathBuf,
    /// Sample from this mixture instead of the observational distribution.
    #[arg(long)]
    pub tuples: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Oracle,
    Finite,
}

#[derive(Debug, Args, Serialize)]
pub struct DisentangleArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Network JSON. In finite mode only its graph is used.
    #[arg(long)]
    pub net: PathBuf,
    /// Oracle mode: tuple set defining the mixture.
    #[arg(long, conflicts_with = "mixture_table")]
    pub tuples: Option<PathBuf>,
    /// Oracle mode: explicit mixture probability table.
    #[arg(long)]
    pub mixture_table: Option<PathBuf>,
    /// Finite mode: observational samples (CSV).
    #[arg(long)]
    pub net_samples: Option<PathBuf>,
    /// Finite mode: mixture samples (CSV).
    #[arg(long)]
    pub mix_samples: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    /// Cells such as `4x2^10`, `4,8,12x2^4..2^20` or `full`.
    #[arg(long, default_value = "full")]
    pub grid: String,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub instances: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, value_enum, default_value_t = GraphModel::ScaleFree)]
    pub model: GraphModel,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(2..))]
    pub cardinality: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn error(message: impl Into<String>) -> Self {
        Failure { code: EXIT_ERROR, message: message.into() }
    }
}

impl From<DisentangleError> for Failure {
    fn from(e: DisentangleError) -> Self {
        let code = match &e {
            DisentangleError::ExclusionUnsatisfiable { .. } => EXIT_EXCLUSION,
            e if e.is_inconsistency() => EXIT_INCONSISTENT,
            _ => EXIT_ERROR,
        };
        Failure { code, message: e.to_string() }
    }
}

macro_rules! runtime_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::error(e.to_string())
            }
        }
    )*};
}

runtime_errors!(
    std::io::Error,
    io::FormatError,
    crate::estimate::EstimateError,
    csv::Error,
    benchgen::ConfigError,
    rayon::ThreadPoolBuildError
);

type CliResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::error(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| Failure::error(format!("{}: {e}", path.display())))
}

fn seed_override(seed: &mut u64) -> CliResult {
    if let Some(raw) = std::env::var_os(SEED_ENV) {
        let raw = raw.to_string_lossy();
        *seed =
            raw.trim().parse().map_err(|_| Failure::usage(format!("{SEED_ENV}={raw} is not an unsigned integer")))?;
    }
    Ok(())
}

fn cmd_gen(mut args: GenArgs) -> CliResult {
    seed_override(&mut args.seed)?;
    let cfg = InstanceConfig {
        nodes: args.nodes as usize,
        model: args.model,
        cardinality: args.cardinality as usize,
        seed: args.seed,
        ..InstanceConfig::default()
    };
    cfg.validate()?;
    let instance = benchgen::generate_instance(&cfg);
    fs::create_dir_all(&args.out)?;
    let (net_path, tuples_path) = (args.out.join("net.json"), args.out.join("tuples.json"));
    write(&net_path, &io::net_to_json(&instance.net))?;
    write(&tuples_path, &io::tuples_to_json(&instance.tuples))?;

    let mut manifest = RunManifest::start("gen", &args, Some(args.seed));
    manifest.output(&net_path).output(&tuples_path);
    manifest.finish(args.out.join("manifest.json"))?;
    Ok(())
}

fn cmd_sample(mut args: SampleArgs) -> CliResult {
    seed_override(&mut args.seed)?;
    let net = io::net_from_json::<f64>(&read(&args.net)?)?;
    let m = args.samples as usize;
    let mut manifest = RunManifest::start("sample", &args, Some(args.seed));
    manifest.input(&args.net);
    let samples = match &args.tuples {
        Some(path) => {
            let tuples = io::tuples_from_json::<f64>(&read(path)?, Some(net.dag()))?;
            manifest.input(path);
            mixture_sample(&net, &tuples, args.seed, m)
        }
        None => ancestral_sample(&net, args.seed, m),
    };
    samples.write_csv(BufWriter::new(File::create(&args.out)?))?;
    manifest.output(&args.out);
    manifest.finish(manifest_path_for(&args.out))?;
    Ok(())
}

fn read_samples(path: &Path, dag: &crate::cbn::Dag, source: SampleSource) -> Result<SampleSet, Failure> {
    let file = File::open(path).map_err(|e| Failure::error(format!("{}: {e}", path.display())))?;
    Ok(SampleSet::read_csv(BufReader::new(file), dag, source)?)
}

fn cmd_disentangle(args: DisentangleArgs) -> CliResult {
    let mut manifest = RunManifest::start("disentangle", &args, None);
    manifest.input(&args.net);
    let report = match args.mode {
        Mode::Oracle => {
            let net = io::net_from_json::<Rational>(&read(&args.net)?)?;
            match (&args.tuples, &args.mixture_table) {
                (Some(path), None) => {
                    manifest.input(path);
                    let tuples = io::tuples_from_json::<Rational>(&read(path)?, Some(net.dag()))?;
                    check_exclusion(&tuples, net.dag())
                        .map_err(|e| Failure { code: EXIT_EXCLUSION, message: format!("{}: {e}", path.display()) })?;
                    io::report_to_json(&disentangle_oracle_report(&net, &ExactMixture::new(&net, &tuples))?)
                }
                (None, Some(path)) => {
                    manifest.input(path);
                    let table = io::mixture_table_from_json::<Rational>(&read(path)?, net.dag())?;
                    io::report_to_json(&disentangle_oracle_report(&net, &table)?)
                }
                _ => return Err(Failure::usage("oracle mode needs exactly one of --tuples or --mixture-table")),
            }
        }
        Mode::Finite => {
            let (Some(obs_path), Some(mix_path)) = (&args.net_samples, &args.mix_samples) else {
                return Err(Failure::usage("finite mode needs --net-samples and --mix-samples"));
            };
            if ![args.epsilon, args.delta].iter().all(|&x| x > 0.0) {
                return Err(Failure::usage("--epsilon and --delta must be positive"));
            }
            let net = io::net_from_json::<f64>(&read(&args.net)?)?;
            let obs = read_samples(obs_path, net.dag(), SampleSource::Observational)?;
            let mix = read_samples(mix_path, net.dag(), SampleSource::Mixture)?;
            manifest.input(obs_path).input(mix_path);
            let net_hat = mle_cpds(&obs, net.dag(), args.delta)?;
            io::report_to_json(&disentangle_finite_samples(&net_hat, &mix, args.epsilon)?)
        }
    };
    write(&args.out, &report)?;
    manifest.output(&args.out);
    manifest.finish(manifest_path_for(&args.out))?;
    Ok(())
}

#[derive(Serialize)]
struct BenchSnapshot<'a> {
    #[serde(flatten)]
    args: &'a BenchArgs,
    cells: &'a [(usize, usize)],
}

fn cmd_bench(mut args: BenchArgs) -> CliResult {
    seed_override(&mut args.seed)?;
    let cells = benchgen::parse_grid(&args.grid).map_err(|e| Failure::usage(e.to_string()))?;
    if ![args.epsilon, args.delta].iter().all(|&x| x > 0.0) {
        return Err(Failure::usage("--epsilon and --delta must be positive"));
    }
    let template = InstanceConfig {
        model: args.model,
        cardinality: args.cardinality as usize,
        seed: args.seed,
        ..InstanceConfig::default()
    };
    let params = FiniteParams { epsilon: args.epsilon, delta: args.delta };
    let workers = if args.workers == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        args.workers
    };

    let mut partial_name = args.out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    partial_name.push(".partial");
    let partial_path = args.out.with_file_name(partial_name);
    let partial = Mutex::new(csv::Writer::from_writer(File::create(&partial_path)?));
    let rows = benchgen::sweep(&cells, args.instances as usize, &template, params, workers, |row| {
        let mut w = partial.lock().expect("writer lock");
        if w.serialize(row).and_then(|_| w.flush().map_err(csv::Error::from)).is_err() {
            eprintln!("warning: could not append to {}", partial_path.display());
        }
    })?;
    drop(partial);

    let mut out = BufWriter::new(File::create(&args.out)?);
    benchgen::write_rows_csv(&rows, &mut out)?;
    out.flush()?;
    fs::remove_file(&partial_path)?;

    let mut manifest = RunManifest::start("bench", &BenchSnapshot { args: &args, cells: &cells }, Some(args.seed));
    manifest.output(&args.out);
    manifest.finish(manifest_path_for(&args.out))?;
    Ok(())
}

pub fn execute(cli: Cli) -> CliResult {
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Disentangle(a) => cmd_disentangle(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

/// Parses `args` and runs the command, printing any error; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
