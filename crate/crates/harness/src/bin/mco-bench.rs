use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mco_core::Scenario;
use mco_harness::config::{ExperimentConfig, SolverKind};
use mco_harness::export::{export, read_records, ExportFormat};
use mco_harness::generator::generate_instance;
use mco_harness::plot::{plot_summary, summarize};
use mco_harness::{run_experiment, Result};

/// Benchmark runner for the mission capability allocation solvers.
#[derive(Parser)]
#[command(name = "mco-bench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write random instances as JSON documents, one file per instance.
    Generate(GenerateArgs),
    /// Run the solvers on random instances and export per-run records.
    Run(RunArgs),
    /// Draw summary charts from an exported record file.
    Plot(PlotArgs),
}

#[derive(Args)]
struct InstanceArgs {
    /// JSON experiment config; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<Scenario>,
    #[arg(long)]
    instances: Option<usize>,
    /// Largest number of assignment qubits per instance.
    #[arg(long)]
    max_qubits: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    common: InstanceArgs,
    #[arg(long, default_value = "instances")]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: InstanceArgs,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    reads: Option<usize>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_evals: Option<usize>,
    /// Comma separated subset of BF,SA,QAOA,QAOAH.
    #[arg(long, value_delimiter = ',')]
    solvers: Option<Vec<SolverKind>>,
    /// Use the scenario 2 mixer with column swaps.
    #[arg(long)]
    full_mixer: bool,
    /// Record wall times (exports are then no longer reproducible byte for byte).
    #[arg(long)]
    timings: bool,
    /// Run instances one after another instead of on the thread pool.
    #[arg(long)]
    serial: bool,
    #[arg(long, default_value = "csv")]
    format: ExportFormat,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    /// Record file written by `run` (.csv or .jsonl).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "plots")]
    out: PathBuf,
}

fn base_config(args: &InstanceArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = args.scenario {
        cfg.scenario = s;
    }
    if let Some(n) = args.instances {
        cfg.instance_count = n;
    }
    if let Some(q) = args.max_qubits {
        cfg.qubit_budget = q;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn generate(args: GenerateArgs) -> Result<()> {
    let cfg = base_config(&args.common)?;
    std::fs::create_dir_all(&args.out)?;
    for i in 0..cfg.instance_count {
        let seed = mco_harness::experiment::instance_seed(cfg.seed, i);
        let problem = generate_instance(cfg.scenario, cfg.qubit_budget, seed)?;
        std::fs::write(args.out.join(format!("instance_{i:04}.json")), problem.to_json())?;
    }
    println!("wrote {} instances to {}", cfg.instance_count, args.out.display());
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = base_config(&args.common)?;
    if let Some(v) = args.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = args.p {
        cfg.p = v;
    }
    if let Some(v) = args.reads {
        cfg.reads = v;
    }
    if let Some(v) = args.shots {
        cfg.shots = v;
    }
    if let Some(v) = args.restarts {
        cfg.restarts = v;
    }
    if let Some(v) = args.max_evals {
        cfg.max_evals = v;
    }
    if let Some(v) = args.solvers {
        cfg.solvers = v;
    }
    cfg.full_s2_mixer |= args.full_mixer;
    cfg.record_wall_time |= args.timings;
    if args.serial {
        cfg.parallel = false;
    }
    let records = run_experiment(&cfg)?;
    std::fs::create_dir_all(&args.out)?;
    let path = args.out.join(format!("records.{}", args.format.extension()));
    export(&records, &path, args.format)?;
    std::fs::write(args.out.join("config.json"), cfg.to_json())?;

    println!("{:<6} {:<6} {:>6} {:>5} {:>10} {:>10} {:>9}", "scen", "solver", "qubits", "runs", "rel_cost", "violations", "feasible");
    for r in summarize(&records) {
        println!(
            "{:<6} {:<6} {:>6} {:>5} {:>10.4} {:>10.3} {:>9.3}",
            r.scenario, r.solver, r.qubits, r.runs, r.mean_relative_cost, r.mean_violations, r.feasible_fraction
        );
    }
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        eprintln!("{failed} runs failed; see the status column");
    }
    println!("records: {}", path.display());
    Ok(())
}

fn plot(args: PlotArgs) -> Result<()> {
    let records = read_records(&args.input)?;
    for p in plot_summary(&records, &args.out)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Run(a) => run(a),
        Command::Plot(a) => plot(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
