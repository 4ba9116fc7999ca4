#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ppdepth::{run_and_emit, ExperimentConfig, ExperimentKind, Format, HarnessError};
use ppdepth_core::depth::DepthResult;
use ppdepth_core::io::DepthBatch;

#[derive(Parser)]
#[command(name = "ppdepth", version, about = "Monte Carlo studies of empirical intensity measures and half-space depth")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the master seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "PPDEPTH_THREADS")]
    threads: Option<usize>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Overrides the output format of the config.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Decay of the supremum deviation with n.
    Ulln(RunArgs),
    /// Covariance and normality of the scaled fluctuations.
    Clt(RunArgs),
    /// Exceedance frequencies against the deviation bound.
    Bound(RunArgs),
    /// Convergence of empirical half-space depth.
    Depth(RunArgs),
    /// Estimators on branching random walks.
    Brw(RunArgs),
    /// Symmetrization inequalities.
    Diag(RunArgs),
    /// Dump raw samples and trees.
    Simulate(RunArgs),
    /// Evaluate a batch of depth queries and print CSV.
    DepthQuery {
        /// JSON file with points, optional weights and scale, queries and method.
        #[arg(long)]
        input: PathBuf,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run_experiment(kind: ExperimentKind, args: RunArgs) -> Result<bool, HarnessError> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if cfg.experiment != kind {
        return Err(HarnessError::Config(format!(
            "config is for `{}`, not `{}`",
            cfg.experiment.name(),
            kind.name()
        )));
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    cfg.validate()?;
    let threads = cfg.resolved_threads();
    let (report, paths) = run_and_emit(&cfg, threads, &args.out)?;
    for c in &report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", c.name, c.detail);
    }
    for p in paths.iter().take(8) {
        log::info!("wrote {}", p.display());
    }
    Ok(report.passed())
}

fn depth_rows(batch: &DepthBatch<f64>, results: &[DepthResult<f64>]) -> Result<Vec<u8>, HarnessError> {
    let d = batch.points.first().map_or(0, Vec::len);
    let mut header: Vec<String> = (1..=d).map(|k| format!("x{k}")).collect();
    header.push("depth".into());
    header.extend((1..=d).map(|k| format!("dir{k}")));
    header.extend(["exact".into(), "tie_count".into()]);
    let err = |e: csv::Error| HarnessError::Output(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).map_err(err)?;
    for (q, r) in batch.queries.iter().zip(results) {
        let mut row: Vec<String> = q.iter().map(f64::to_string).collect();
        row.push(r.depth.to_string());
        row.extend(r.direction.iter().map(f64::to_string));
        row.resize(2 * d + 1, String::new());
        row.push(r.exact.to_string());
        row.push(r.tie_count.to_string());
        w.write_record(&row).map_err(err)?;
    }
    w.into_inner().map_err(|e| HarnessError::Output(e.to_string()))
}

fn depth_query(input: PathBuf, out: Option<PathBuf>) -> Result<bool, HarnessError> {
    let text = std::fs::read_to_string(&input).map_err(|e| HarnessError::io(&input, e))?;
    let batch: DepthBatch<f64> = serde_json::from_str(&text).map_err(|e| HarnessError::Config(e.to_string()))?;
    let results = batch.evaluate()?;
    let bytes = depth_rows(&batch, &results)?;
    match out {
        Some(p) => ppdepth::emit::write_atomic(&p, &bytes)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(|e| HarnessError::io(std::path::Path::new("<stdout>"), e))?
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Ulln(a) => run_experiment(ExperimentKind::Ulln, a),
        Command::Clt(a) => run_experiment(ExperimentKind::Clt, a),
        Command::Bound(a) => run_experiment(ExperimentKind::Bound, a),
        Command::Depth(a) => run_experiment(ExperimentKind::Depth, a),
        Command::Brw(a) => run_experiment(ExperimentKind::Brw, a),
        Command::Diag(a) => run_experiment(ExperimentKind::Diag, a),
        Command::Simulate(a) => run_experiment(ExperimentKind::Simulate, a),
        Command::DepthQuery { input, out } => depth_query(input, out),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
