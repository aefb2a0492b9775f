use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use msn_core::harness::{
    self, DataSource, ExperimentConfig, ExperimentRecord, OptimizerConfig, OutputFormat, TaskConfig, TrialRecord,
};
use msn_core::objectives::{Domain, FUNCTIONS};
use msn_core::{Error, NetworkSpec, Result};

#[derive(Parser)]
#[command(name = "msn", version, about = "Multiple Search Neuroevolution experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Repeated trials on a 2-D benchmark function.
    Bench(BenchArgs),
    /// Train a classifier on IDX files or synthetic digits.
    Train(TrainArgs),
    /// Run several optimizers on one function and print a speedup table.
    Compare(CompareArgs),
    /// List the benchmark functions.
    Functions,
}

#[derive(Args)]
struct Common {
    /// Trials per optimizer.
    #[arg(long)]
    reps: Option<usize>,
    /// Step cap per trial.
    #[arg(long)]
    max_steps: Option<usize>,
    /// Base seed; trial i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluate each pool on all cores.
    #[arg(long)]
    parallel: bool,
}

impl Common {
    fn apply(&self, config: &mut ExperimentConfig) {
        if let Some(r) = self.reps {
            config.repetitions = r;
        }
        if let Some(m) = self.max_steps {
            config.termination.max_steps = m;
        }
        if let Some(s) = self.seed {
            config.base_seed = s;
        }
        config.parallel |= self.parallel;
    }
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    function: Option<String>,
    /// msn, random_search, simulated_annealing or evolution_strategies.
    #[arg(long)]
    optimizer: Option<String>,
    /// Allowed distance from the optimum value.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Evaluate outside the function's bounds instead of clamping.
    #[arg(long)]
    unbounded: bool,
    /// Experiment config (TOML or JSON); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Results file; `.json` writes JSON, anything else CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, requires = "train_labels")]
    train_images: Option<PathBuf>,
    #[arg(long, requires = "train_images")]
    train_labels: Option<PathBuf>,
    /// Random training subset per trial.
    #[arg(long)]
    subset_size: Option<usize>,
    /// Stop once the training loss is at or below this.
    #[arg(long, default_value_t = harness::DEFAULT_TARGET_LOSS)]
    target_loss: f64,
    /// Also stop once training accuracy reaches this.
    #[arg(long)]
    target_accuracy: Option<f64>,
    /// Without IDX files: number of synthetic digits to generate.
    #[arg(long, default_value_t = 500)]
    synthetic: usize,
    #[arg(long, default_value_t = 0.1)]
    noise: f64,
    /// Network spec as JSON.
    #[arg(long)]
    network: Option<PathBuf>,
    #[arg(long, default_value = "msn")]
    optimizer: String,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    function: String,
    /// Repeat for each optimizer; the first is the reference.
    #[arg(long = "optimizer", required = true, num_args = 1)]
    optimizers: Vec<String>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Evaluate outside the function's bounds instead of clamping.
    #[arg(long)]
    unbounded: bool,
    /// Writes every record and the table as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

fn progress(t: &TrialRecord) {
    let reward = t.final_reward.map_or("-".to_string(), |r| format!("{r:.6}"));
    let mut line = format!(
        "trial {} seed {}: {} after {} steps, reward {}",
        t.trial,
        t.seed,
        t.cause.as_str(),
        t.steps,
        reward
    );
    if let Some(acc) = t.final_accuracy {
        line.push_str(&format!(", accuracy {acc:.4}"));
    }
    if let Some(e) = &t.error {
        line.push_str(&format!(" ({e})"));
    }
    eprintln!("{line}");
}

fn summarize(record: &ExperimentRecord) {
    let a = &record.aggregate;
    let show = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.1}"));
    println!(
        "{} on {}: {}/{} converged, median steps {}, mean steps (converged) {}",
        record.optimizer,
        record.task,
        a.successes,
        a.trials,
        show(a.median_steps),
        show(a.mean_steps_converged)
    );
}

fn finish(record: &ExperimentRecord, out: Option<&PathBuf>) -> Result<ExitCode> {
    summarize(record);
    if let Some(path) = out {
        harness::emit_results(record, OutputFormat::from_path(path), path)?;
    }
    Ok(if record.any_failed() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn bench(args: BenchArgs) -> Result<ExitCode> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => {
            let function = args
                .function
                .clone()
                .ok_or_else(|| Error::Argument("--function or --config is required".into()))?;
            ExperimentConfig::new(OptimizerConfig::default(), TaskConfig::benchmark(&function))
        }
    };
    match &mut config.task {
        TaskConfig::Benchmark { function, domain, .. } => {
            if let Some(f) = &args.function {
                *function = f.clone();
            }
            if args.unbounded {
                *domain = Domain::Unbounded;
            }
        }
        TaskConfig::Classification { .. } => {
            return Err(Error::Argument("bench needs a benchmark task; use train".into()))
        }
    }
    if let Some(name) = &args.optimizer {
        if config.optimizer.name() != OptimizerConfig::by_name(name)?.name() {
            config.optimizer = OptimizerConfig::by_name(name)?;
        }
    }
    if let Some(t) = args.tolerance {
        config.termination.target_tolerance = Some(t);
    }
    args.common.apply(&mut config);
    let record = harness::run_experiment_with(&config, progress)?;
    finish(&record, args.out.as_ref())
}

fn train(args: TrainArgs) -> Result<ExitCode> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => {
            let data = match (&args.train_images, &args.train_labels) {
                (Some(images), Some(labels)) => DataSource::Idx {
                    images: images.clone(),
                    labels: labels.clone(),
                },
                _ => DataSource::Synthetic {
                    n: args.synthetic,
                    image_size: 8,
                    num_classes: 10,
                    noise: args.noise,
                    seed: args.common.seed.unwrap_or(0),
                },
            };
            let network = match &args.network {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                        path: path.clone(),
                        source: e,
                    })?;
                    Some(NetworkSpec::from_json(&text)?)
                }
                None => None,
            };
            let mut c = ExperimentConfig::new(
                OptimizerConfig::by_name(&args.optimizer)?,
                TaskConfig::Classification {
                    data,
                    subset_size: args.subset_size,
                    network,
                    target_loss: Some(args.target_loss),
                    target_accuracy: args.target_accuracy,
                },
            );
            c.repetitions = 1;
            c
        }
    };
    args.common.apply(&mut config);
    let record = harness::run_experiment_with(&config, progress)?;
    finish(&record, args.out.as_ref())
}

fn compare(args: CompareArgs) -> Result<ExitCode> {
    let mut configs = Vec::new();
    for name in &args.optimizers {
        let mut task = TaskConfig::benchmark(&args.function);
        if let (true, TaskConfig::Benchmark { domain, .. }) = (args.unbounded, &mut task) {
            *domain = Domain::Unbounded;
        }
        let mut c = ExperimentConfig::new(OptimizerConfig::by_name(name)?, task);
        if let Some(t) = args.tolerance {
            c.termination.target_tolerance = Some(t);
        }
        args.common.apply(&mut c);
        configs.push(c);
    }
    if configs.len() < 2 {
        return Err(Error::Argument("pass --optimizer at least twice".into()));
    }
    let mut records = Vec::new();
    for c in &configs {
        eprintln!("== {}", c.optimizer.name());
        records.push(harness::run_experiment_with(c, progress)?);
    }
    let failed = records.iter().any(ExperimentRecord::any_failed);
    let table = harness::comparison_table(records);
    print!("{table}");
    if let Some(path) = &args.out {
        let text = serde_json::to_string_pretty(&table)?;
        std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    Ok(if failed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bench(a) => bench(a),
        Command::Train(a) => train(a),
        Command::Compare(a) => compare(a),
        Command::Functions => {
            for f in &FUNCTIONS {
                println!(
                    "{:<12} optimum {:>10.4} at ({:.4}, {:.4})",
                    f.name, f.optimum_value, f.optimum_location.0, f.optimum_location.1
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
