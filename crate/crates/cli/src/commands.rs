//! Subcommands of the `sweep` binary.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sweep_core::diagnostics::{feasibility_report, ladder_report, check_ladder, ConvergenceReport};
use sweep_core::fbm::{FbmMethod, FbmSampler, FbmSpec, RNG_DESCRIPTION};
use sweep_core::path::{one_variation, p_variation_full};
use sweep_core::SweepingRun;

use crate::config::{DriverSpec, ExperimentConfig};
use crate::csvio;
use crate::error::{invalid, CliError};
use crate::problem::{self, Problem};

#[derive(Debug, Parser)]
#[command(name = "sweep", version, about = "Sweeping processes driven by Young and rough signals")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Treat Picard non-convergence as a solver error.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Omit timestamps from metadata.
    #[arg(long, global = true)]
    pub repro: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scheme and write the trajectory.
    Simulate,
    /// Run a nested grid ladder on one driver realization.
    Converge {
        /// Grid sizes, each dividing the next.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
    },
    /// Sample fractional Brownian motion.
    Fbm(FbmArgs),
    /// p-variation of the columns of a CSV file.
    Pvar {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        p: f64,
        /// Columns to use; all but `t` by default.
        #[arg(long, value_delimiter = ',')]
        columns: Option<Vec<String>>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct FbmArgs {
    #[arg(long)]
    pub hurst: f64,
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub dims: usize,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, value_enum, default_value_t = Method::Hosking)]
    pub method: Method,
    /// Output file name inside `--out`.
    #[arg(long, default_value = "fbm.csv")]
    pub file: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Hosking,
    Cholesky,
}

impl From<Method> for FbmMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Hosking => FbmMethod::Hosking,
            Method::Cholesky => FbmMethod::Cholesky,
        }
    }
}

/// Process environment consulted by the commands.
#[derive(Debug, Clone, Default)]
pub struct Env {
    /// Value of `SWEEP_PROJ_TOL`.
    pub proj_tol: Option<String>,
}

impl Env {
    pub fn from_process() -> Self {
        Self { proj_tol: std::env::var("SWEEP_PROJ_TOL").ok() }
    }
}

pub fn execute(cli: &Cli, env: &Env, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate => simulate(&cli.global, env, stdout),
        Command::Converge { n_list } => converge(&cli.global, env, n_list, stdout),
        Command::Fbm(args) => fbm(&cli.global, args, stdout),
        Command::Pvar { input, p, columns } => pvar(input, *p, columns.as_deref(), stdout),
    }
}

fn say(stdout: &mut dyn Write, text: std::fmt::Arguments) -> Result<(), CliError> {
    stdout
        .write_fmt(text)
        .and_then(|_| stdout.write_all(b"\n"))
        .map_err(|source| CliError::Output { path: "<stdout>".into(), source })
}

fn load_config(global: &GlobalArgs, env: &Env) -> Result<(ExperimentConfig, PathBuf), CliError> {
    let path = global.config.as_ref().ok_or_else(|| CliError::config("--config <path> is required"))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = global.seed {
        cfg.seed = seed;
    }
    cfg.override_proj_tol(env.proj_tol.as_deref())?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, base))
}

fn common_metadata(cfg: &ExperimentConfig, global: &GlobalArgs) -> Vec<String> {
    let mut meta = vec![
        format!("sweep {}", env!("CARGO_PKG_VERSION")),
        format!("config={}", cfg.to_json()),
        format!("seed={}", cfg.seed),
        format!("scheme={}", cfg.scheme().name()),
    ];
    if matches!(cfg.driver, Some(DriverSpec::Fbm { .. })) {
        meta.push(format!("rng={RNG_DESCRIPTION}"));
    }
    if !global.repro {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        meta.push(format!("generated_unix={secs}"));
    }
    meta
}

fn check_converged(run: &SweepingRun, strict: bool) -> Result<(), CliError> {
    if run.converged {
        return Ok(());
    }
    if strict {
        return Err(CliError::NoConvergence { iterations: run.iterations, gap: run.last_gap });
    }
    eprintln!(
        "sweep: warning: no convergence after {} sweeps (last gap {:e})",
        run.iterations, run.last_gap
    );
    Ok(())
}

pub fn simulate(global: &GlobalArgs, env: &Env, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (cfg, base) = load_config(global, env)?;
    let problem = Problem::from_config(cfg, &base)?;
    let run = problem.solve()?;
    let cfg = &problem.config;
    let feasibility = feasibility_report(&run, &problem.set).map_err(problem::classify)?;
    let y_var = one_variation(&run.y);
    let mut meta = common_metadata(cfg, global);
    meta.extend([
        format!("iterations={}", run.iterations),
        format!("converged={}", run.converged),
        format!("feasibility_max={}", feasibility.max_violation),
        format!("y_1var={y_var}"),
    ]);
    let path = global.out.join(&cfg.output.trajectory);
    csvio::write_atomic(&path, &csvio::render_run(&run, &meta))?;
    say(
        stdout,
        format_args!(
            "{}: n={} iterations={} converged={} feasibility_max={:e} y_1var={} -> {}",
            cfg.scheme().name(),
            run.grid().steps(),
            run.iterations,
            run.converged,
            feasibility.max_violation,
            y_var,
            path.display()
        ),
    )?;
    check_converged(&run, global.strict)
}

/// Runs every ladder member on strides of one driver sampled at the finest size.
pub fn run_ladder(problem: &Problem, n_list: &[usize]) -> Result<Vec<SweepingRun>, CliError> {
    check_ladder(n_list).map_err(invalid)?;
    let finest = *n_list.last().expect("non-empty ladder");
    if problem.steps() != finest {
        return Err(CliError::config(format!(
            "driver has {} steps, the finest ladder size is {finest}",
            problem.steps()
        )));
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> =
            n_list.iter().map(|&n| scope.spawn(move || problem.solve_strided(finest / n))).collect();
        handles.into_iter().map(|h| h.join().expect("ladder worker panicked")).collect()
    })
}

pub fn converge_report(problem: &Problem, n_list: &[usize]) -> Result<(ConvergenceReport, Vec<SweepingRun>), CliError> {
    let runs = run_ladder(problem, n_list)?;
    let report = ladder_report(n_list, &runs, problem::theory_order(&problem.config)).map_err(invalid)?;
    Ok((report, runs))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

pub fn converge(global: &GlobalArgs, env: &Env, n_list: &[usize], stdout: &mut dyn Write) -> Result<(), CliError> {
    let (cfg, base) = load_config(global, env)?;
    check_ladder(n_list).map_err(invalid)?;
    let finest = *n_list.last().expect("non-empty ladder");
    let problem = Problem::new(cfg, finest, &base)?;
    let (report, runs) = converge_report(&problem, n_list)?;
    let cfg = &problem.config;
    let mut meta = common_metadata(cfg, global);
    meta.push(format!("n_list={}", n_list.iter().map(usize::to_string).collect::<Vec<_>>().join(",")));
    let summary = format!(
        "empirical_order={} theory_order={}",
        fmt_opt(report.empirical_order),
        report.theory_order
    );
    meta.push(summary.clone());
    let mut w = csv::Writer::from_writer(Vec::new());
    let write = |w: &mut csv::Writer<Vec<u8>>, rec: &[String]| w.write_record(rec).expect("write to memory");
    write(&mut w, &["n".into(), "sup_gap".into(), "ratio".into()]);
    for i in 0..report.sup_gaps.len() {
        let ratio = report.ratios[i].map(csvio::fmt_f64).unwrap_or_default();
        write(&mut w, &[report.grid_sizes[i].to_string(), csvio::fmt_f64(report.sup_gaps[i]), ratio]);
    }
    let mut bytes: Vec<u8> = meta.iter().flat_map(|m| format!("# {m}\n").into_bytes()).collect();
    bytes.extend(w.into_inner().expect("flush to memory"));
    let path = global.out.join(&cfg.output.report);
    csvio::write_atomic(&path, &bytes)?;
    for (i, gap) in report.sup_gaps.iter().enumerate() {
        say(stdout, format_args!("n={} sup_gap={gap:e} ratio={}", report.grid_sizes[i], fmt_opt(report.ratios[i])))?;
    }
    say(stdout, format_args!("{summary} -> {}", path.display()))?;
    match runs.iter().find(|r| !r.converged) {
        Some(run) => check_converged(run, global.strict),
        None => Ok(()),
    }
}

pub fn fbm(global: &GlobalArgs, args: &FbmArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let seed = global.seed.unwrap_or(0);
    let spec = FbmSpec::new(args.hurst, args.horizon, args.n, args.dims, seed).map_err(invalid)?;
    let sampler = FbmSampler::new(spec, args.method.into()).map_err(invalid)?;
    let path = sampler.sample();
    let meta = [format!(
        "fbm hurst={} horizon={} n={} dims={} seed={} method={} rng={}",
        spec.hurst,
        spec.horizon,
        spec.n,
        spec.dims,
        spec.seed,
        sampler.method().name(),
        RNG_DESCRIPTION
    )];
    let out = global.out.join(&args.file);
    csvio::write_atomic(&out, &csvio::render_path(&path, "B", &meta))?;
    say(stdout, format_args!("{} -> {}", meta[0], out.display()))
}

pub fn pvar(input: &Path, p: f64, columns: Option<&[String]>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let path = csvio::read_path(input, columns)?;
    let v = p_variation_full(&path, p, 0, path.len() - 1).map_err(invalid)?;
    say(stdout, format_args!("{}", v.value))?;
    let indices: Vec<String> = v.dissection.iter().map(usize::to_string).collect();
    say(stdout, format_args!("dissection: {}", indices.join(" ")))
}
