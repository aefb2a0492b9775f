//! Repeated-trial experiments, comparisons and result files.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines::{AnnealingConfig, BaselineConfig, EsConfig, RandomSearchConfig};
use crate::data::{self, Dataset};
use crate::error::{Error, Result};
use crate::msn::{Msn, MsnConfig};
use crate::network::{Network, NetworkSpec};
use crate::objectives::{
    make_classification_objective, make_task1_objective, BenchmarkFunction, ClassificationObjective, DirectObjective,
    Domain, Objective, Task1Objective,
};
use crate::optimizer::{drive, Control, Optimizer, RunResult, TerminationCause, TerminationRule};

pub const SCHEMA_VERSION: u32 = 1;

/// Default loss at which classification runs stop.
pub const DEFAULT_TARGET_LOSS: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OptimizerConfig {
    Msn(MsnConfig),
    RandomSearch(RandomSearchConfig),
    SimulatedAnnealing(AnnealingConfig),
    EvolutionStrategies(EsConfig),
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig::Msn(MsnConfig::default())
    }
}

impl OptimizerConfig {
    /// Default configuration for a name or common abbreviation
    /// (`msn`, `rs`, `sa`, `es`, ...).
    pub fn by_name(name: &str) -> Result<Self> {
        let key = name.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Ok(match key.as_str() {
            "msn" => OptimizerConfig::Msn(MsnConfig::default()),
            "random_search" | "random" | "rs" => OptimizerConfig::RandomSearch(RandomSearchConfig::default()),
            "simulated_annealing" | "annealing" | "sa" => OptimizerConfig::SimulatedAnnealing(AnnealingConfig::default()),
            "evolution_strategies" | "evolution_strategy" | "es" => {
                OptimizerConfig::EvolutionStrategies(EsConfig::default())
            }
            _ => {
                return Err(Error::Unknown {
                    kind: "optimizer",
                    name: name.to_string(),
                })
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            OptimizerConfig::Msn(_) => "msn",
            OptimizerConfig::RandomSearch(_) => "random_search",
            OptimizerConfig::SimulatedAnnealing(_) => "simulated_annealing",
            OptimizerConfig::EvolutionStrategies(_) => "evolution_strategies",
        }
    }

    pub fn pool_size(&self) -> usize {
        match self {
            OptimizerConfig::Msn(c) => c.pool_size,
            other => other.baseline().map_or(0, |b| b.pool_size()),
        }
    }

    pub fn is_msn(&self) -> bool {
        matches!(self, OptimizerConfig::Msn(_))
    }

    fn baseline(&self) -> Option<BaselineConfig> {
        match self {
            OptimizerConfig::Msn(_) => None,
            OptimizerConfig::RandomSearch(c) => Some(BaselineConfig::RandomSearch(c.clone())),
            OptimizerConfig::SimulatedAnnealing(c) => Some(BaselineConfig::SimulatedAnnealing(c.clone())),
            OptimizerConfig::EvolutionStrategies(c) => Some(BaselineConfig::EvolutionStrategies(c.clone())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OptimizerConfig::Msn(c) => c.validate(),
            other => other.baseline().expect("not msn").validate(),
        }
    }

    pub fn build(&self, objective: &dyn Objective, seed: u64, parallel: bool) -> Result<Box<dyn Optimizer>> {
        match self {
            OptimizerConfig::Msn(c) => {
                c.validate()?;
                Ok(Box::new(Msn::new(c.clone(), objective, seed)?.parallel(parallel)))
            }
            other => other.baseline().expect("not msn").build(objective, seed, parallel),
        }
    }
}

/// How a benchmark function is searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameterization {
    /// MSN evolves network weights; baselines search `(x, y)` directly.
    #[default]
    Auto,
    /// Network weights, for every optimizer.
    Network,
    /// `(x, y)`, for every optimizer.
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    Idx {
        images: PathBuf,
        labels: PathBuf,
    },
    Synthetic {
        #[serde(default = "default_synthetic_n")]
        n: usize,
        #[serde(default = "default_image_size")]
        image_size: usize,
        #[serde(default = "default_num_classes")]
        num_classes: usize,
        #[serde(default = "default_noise")]
        noise: f64,
        #[serde(default)]
        seed: u64,
    },
}

fn default_synthetic_n() -> usize {
    500
}
fn default_image_size() -> usize {
    8
}
fn default_num_classes() -> usize {
    10
}
fn default_noise() -> f64 {
    0.1
}
fn default_target_loss() -> Option<f64> {
    Some(DEFAULT_TARGET_LOSS)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskConfig {
    Benchmark {
        function: String,
        /// Defaults to the 2-128-2 network.
        #[serde(default)]
        network: Option<NetworkSpec>,
        #[serde(default)]
        parameterization: Parameterization,
        #[serde(default)]
        domain: Domain,
    },
    Classification {
        data: DataSource,
        /// Random training subset drawn per trial; the whole set when absent.
        #[serde(default)]
        subset_size: Option<usize>,
        /// Defaults to the CNN for 28x28 inputs and a 32-unit hidden layer
        /// otherwise.
        #[serde(default)]
        network: Option<NetworkSpec>,
        #[serde(default = "default_target_loss")]
        target_loss: Option<f64>,
        /// Also stop once the elite's training accuracy reaches this value.
        #[serde(default)]
        target_accuracy: Option<f64>,
    },
}

impl TaskConfig {
    pub fn benchmark(function: &str) -> Self {
        TaskConfig::Benchmark {
            function: function.to_string(),
            network: None,
            parameterization: Parameterization::Auto,
            domain: Domain::default(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            TaskConfig::Benchmark { function, .. } => function.clone(),
            TaskConfig::Classification { data, .. } => match data {
                DataSource::Idx { images, .. } => format!("classification:{}", images.display()),
                DataSource::Synthetic { .. } => "classification:synthetic".to_string(),
            },
        }
    }
}

fn default_repetitions() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    pub task: TaskConfig,
    #[serde(default)]
    pub termination: TerminationRule,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Evaluate each pool concurrently.
    #[serde(default)]
    pub parallel: bool,
}

impl ExperimentConfig {
    pub fn new(optimizer: OptimizerConfig, task: TaskConfig) -> Self {
        ExperimentConfig {
            optimizer,
            task,
            termination: TerminationRule::default(),
            repetitions: 5,
            base_seed: 0,
            parallel: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if let Some(t) = self.termination.target_tolerance {
            if !(t >= 0.0) {
                return Err(Error::Config(format!("target_tolerance must be >= 0, got {t}")));
            }
        }
        self.optimizer.validate()?;
        if let TaskConfig::Benchmark { function, .. } = &self.task {
            BenchmarkFunction::by_name(function)?;
        }
        Ok(())
    }

    /// Parses and validates.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Parses and validates.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Parses by extension (`.toml` or `.json`); anything else is tried as
    /// JSON, then TOML.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml_str(&text),
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_json_str(&text).or_else(|_| Self::from_toml_str(&text)),
        }
    }

    pub fn seed_for(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialCause {
    TargetReached,
    AccuracyReached,
    MaxSteps,
    Failed,
}

impl TrialCause {
    pub fn converged(self) -> bool {
        matches!(self, TrialCause::TargetReached | TrialCause::AccuracyReached)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TrialCause::TargetReached => "target_reached",
            TrialCause::AccuracyReached => "accuracy_reached",
            TrialCause::MaxSteps => "max_steps",
            TrialCause::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub steps: usize,
    pub evaluations: usize,
    pub cause: TrialCause,
    /// Reward of the sample that met the target, or of the elite otherwise.
    pub final_reward: Option<f64>,
    /// Benchmark tasks: where the final sample lands.
    pub final_point: Option<[f64; 2]>,
    /// Classification tasks: training accuracy of the final sample.
    pub final_accuracy: Option<f64>,
    /// Classification tasks: label counts of the training subset.
    pub class_counts: Option<BTreeMap<usize, usize>>,
    pub wall_time_secs: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: usize,
    pub successes: usize,
    pub failures: usize,
    /// Over every trial that did not fail; unconverged trials count with
    /// their full step count.
    pub mean_steps: Option<f64>,
    pub median_steps: Option<f64>,
    pub mean_steps_converged: Option<f64>,
    pub median_steps_converged: Option<f64>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    Some(if n % 2 == 1 { s[n / 2] } else { (s[n / 2 - 1] + s[n / 2]) / 2.0 })
}

impl Aggregate {
    pub fn from_trials(trials: &[TrialRecord]) -> Self {
        let completed: Vec<f64> = trials
            .iter()
            .filter(|t| t.cause != TrialCause::Failed)
            .map(|t| t.steps as f64)
            .collect();
        let converged: Vec<f64> = trials
            .iter()
            .filter(|t| t.cause.converged())
            .map(|t| t.steps as f64)
            .collect();
        Aggregate {
            trials: trials.len(),
            successes: converged.len(),
            failures: trials.iter().filter(|t| t.cause == TrialCause::Failed).count(),
            mean_steps: mean(&completed),
            median_steps: median(&completed),
            mean_steps_converged: mean(&converged),
            median_steps_converged: median(&converged),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema_version: u32,
    pub optimizer: String,
    pub task: String,
    pub pool_size: usize,
    pub trials: Vec<TrialRecord>,
    pub aggregate: Aggregate,
}

impl ExperimentRecord {
    pub fn new(optimizer: &str, task: &str, pool_size: usize, trials: Vec<TrialRecord>) -> Self {
        ExperimentRecord {
            schema_version: SCHEMA_VERSION,
            optimizer: optimizer.to_string(),
            task: task.to_string(),
            pool_size,
            aggregate: Aggregate::from_trials(&trials),
            trials,
        }
    }

    pub fn any_failed(&self) -> bool {
        self.trials.iter().any(|t| t.cause == TrialCause::Failed)
    }
}

enum TrialObjective {
    Network(Task1Objective),
    Direct(DirectObjective),
    Classification(ClassificationObjective),
}

impl TrialObjective {
    fn as_dyn(&self) -> &dyn Objective {
        match self {
            TrialObjective::Network(o) => o,
            TrialObjective::Direct(o) => o,
            TrialObjective::Classification(o) => o,
        }
    }
}

/// Builds the objective for one trial. Datasets are loaded once and shared.
struct TaskFactory {
    task: TaskConfig,
    uses_network: bool,
    dataset: Option<Dataset>,
    network: Option<Network>,
}

fn default_classifier(data: &Dataset) -> NetworkSpec {
    if data.input_shape == [1, 28, 28] || data.input_shape == [28, 28] {
        NetworkSpec::mnist_cnn()
    } else {
        NetworkSpec::mlp(data.input_len(), 32, data.num_classes)
    }
}

impl TaskFactory {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        match &config.task {
            TaskConfig::Benchmark {
                function,
                network,
                parameterization,
                ..
            } => {
                BenchmarkFunction::by_name(function)?;
                let uses_network = match parameterization {
                    Parameterization::Auto => config.optimizer.is_msn(),
                    Parameterization::Network => true,
                    Parameterization::Direct => false,
                };
                let network = if uses_network {
                    Some(Network::build(network.as_ref().unwrap_or(&NetworkSpec::task1()))?)
                } else {
                    None
                };
                Ok(TaskFactory {
                    task: config.task.clone(),
                    uses_network,
                    dataset: None,
                    network,
                })
            }
            TaskConfig::Classification { data, network, .. } => {
                let dataset = match data {
                    DataSource::Idx { images, labels } => Dataset::load_idx_pair(images, labels)?,
                    DataSource::Synthetic {
                        n,
                        image_size,
                        num_classes,
                        noise,
                        seed,
                    } => data::synthetic_digits(*n, *image_size, *num_classes, *noise, *seed)?,
                };
                let spec = network.clone().unwrap_or_else(|| default_classifier(&dataset));
                Ok(TaskFactory {
                    task: config.task.clone(),
                    uses_network: true,
                    network: Some(Network::build(&spec)?),
                    dataset: Some(dataset),
                })
            }
        }
    }

    fn make(&self, seed: u64) -> Result<TrialObjective> {
        match &self.task {
            TaskConfig::Benchmark { function, domain, .. } => {
                let f = BenchmarkFunction::by_name(function)?;
                if self.uses_network {
                    let net = self.network.clone().expect("built with network");
                    Ok(TrialObjective::Network(make_task1_objective(f, net, seed)?.with_domain(*domain)))
                } else {
                    Ok(TrialObjective::Direct(DirectObjective::new(f).with_domain(*domain)))
                }
            }
            TaskConfig::Classification {
                subset_size,
                target_loss,
                ..
            } => {
                let full = self.dataset.as_ref().expect("loaded");
                let train = match subset_size {
                    Some(n) => data::subsample(full, *n, seed)?,
                    None => full.clone(),
                };
                let mut obj = make_classification_objective(self.network.clone().expect("built"), train)?;
                if let Some(loss) = target_loss {
                    obj = obj.with_target_loss(*loss);
                }
                Ok(TrialObjective::Classification(obj))
            }
        }
    }
}

/// Slack allowed when re-evaluating a sample that reportedly met the target.
const RECHECK_SLACK: f64 = 1e-9;

fn run_trial(config: &ExperimentConfig, factory: &TaskFactory, trial: usize) -> TrialRecord {
    let seed = config.seed_for(trial);
    let started = Instant::now();
    let mut record = TrialRecord {
        trial,
        seed,
        steps: 0,
        evaluations: 0,
        cause: TrialCause::Failed,
        final_reward: None,
        final_point: None,
        final_accuracy: None,
        class_counts: None,
        wall_time_secs: 0.0,
        error: None,
    };
    if let Err(e) = run_trial_inner(config, factory, seed, &mut record) {
        record.cause = TrialCause::Failed;
        record.error = Some(e.to_string());
    }
    record.wall_time_secs = started.elapsed().as_secs_f64();
    record
}

fn run_trial_inner(config: &ExperimentConfig, factory: &TaskFactory, seed: u64, record: &mut TrialRecord) -> Result<()> {
    let objective = factory.make(seed)?;
    let obj = objective.as_dyn();
    let mut optimizer = config.optimizer.build(obj, seed, config.parallel)?;

    let mut rule = config.termination;
    let mut target_accuracy = None;
    if let TrialObjective::Classification(c) = &objective {
        // the loss target is exact; tolerances only apply to benchmark optima
        rule.target_tolerance = None;
        record.class_counts = Some(c.dataset().class_counts());
        if let TaskConfig::Classification { target_accuracy: t, .. } = &config.task {
            target_accuracy = *t;
        }
    }

    let mut observer_error = None;
    let result: RunResult = drive(optimizer.as_mut(), obj, &rule, |_, opt| {
        let (Some(goal), TrialObjective::Classification(c)) = (target_accuracy, &objective) else {
            return Control::Continue;
        };
        match opt.elite().map(|(p, _)| c.accuracy(p)) {
            Some(Ok(acc)) if acc >= goal => Control::Stop,
            Some(Err(e)) => {
                observer_error = Some(e);
                Control::Stop
            }
            _ => Control::Continue,
        }
    })?;
    if let Some(e) = observer_error {
        return Err(e);
    }

    record.steps = result.steps;
    record.evaluations = result.evaluations;
    record.cause = match result.cause {
        TerminationCause::TargetReached => TrialCause::TargetReached,
        TerminationCause::Stopped => TrialCause::AccuracyReached,
        TerminationCause::MaxSteps => TrialCause::MaxSteps,
    };
    let final_sample = match (result.cause, &result.hit, &result.elite) {
        (TerminationCause::TargetReached, Some(hit), _) => Some(hit.clone()),
        (_, _, Some(elite)) => Some(elite.clone()),
        _ => None,
    };
    let Some((params, reward)) = final_sample else {
        return Ok(());
    };
    record.final_reward = Some(reward);

    let recheck = obj.evaluate(&params)?;
    if (recheck - reward).abs() > RECHECK_SLACK * reward.abs().max(1.0) {
        return Err(Error::Evaluation { slot: 0, value: recheck });
    }
    match &objective {
        TrialObjective::Network(t) => {
            let (x, y) = t.point(&params)?;
            record.final_point = Some([x, y]);
        }
        TrialObjective::Direct(d) => {
            let (x, y) = d.point(&params)?;
            record.final_point = Some([x, y]);
        }
        TrialObjective::Classification(c) => record.final_accuracy = Some(c.accuracy(&params)?),
    }
    if record.cause == TrialCause::TargetReached {
        let target = obj.target().expect("target reached implies a target");
        if !target.reached(recheck, rule.target_tolerance) {
            return Err(Error::Evaluation { slot: 0, value: recheck });
        }
    }
    Ok(())
}

/// Run `repetitions` trials with seeds `base_seed + i`. A trial whose
/// objective errors is recorded as failed; the remaining trials still run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentRecord> {
    run_experiment_with(config, |_| {})
}

/// [`run_experiment`] with a callback after each trial.
pub fn run_experiment_with(config: &ExperimentConfig, mut on_trial: impl FnMut(&TrialRecord)) -> Result<ExperimentRecord> {
    config.validate()?;
    let factory = TaskFactory::new(config)?;
    let trials = (0..config.repetitions)
        .map(|i| {
            let t = run_trial(config, &factory, i);
            on_trial(&t);
            t
        })
        .collect();
    Ok(ExperimentRecord::new(
        config.optimizer.name(),
        &config.task.label(),
        config.optimizer.pool_size(),
        trials,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Speedup {
    Value(f64),
    /// This entry never converged.
    NoConvergence,
    /// The reference never converged.
    Undefined,
}

impl fmt::Display for Speedup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Speedup::Value(v) => write!(f, "{v:.2}x"),
            Speedup::NoConvergence => f.write_str("no convergence"),
            Speedup::Undefined => f.write_str("undefined"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub optimizer: String,
    pub successes: usize,
    pub trials: usize,
    pub mean_steps_converged: Option<f64>,
    /// `mean_steps(this) / mean_steps(reference)` over converged trials.
    pub speedup: Speedup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub task: String,
    pub reference: String,
    pub rows: Vec<ComparisonRow>,
    pub records: Vec<ExperimentRecord>,
}

/// Run every config and tabulate speedups against the first.
pub fn compare(configs: &[ExperimentConfig]) -> Result<Comparison> {
    if configs.len() < 2 {
        return Err(Error::arg("compare needs at least two configurations"));
    }
    if configs.iter().any(|c| c.task != configs[0].task) {
        return Err(Error::arg("compared configurations must share one task"));
    }
    let records = configs.iter().map(run_experiment).collect::<Result<Vec<_>>>()?;
    Ok(comparison_table(records))
}

/// Speedup table for already-run experiments; the first is the reference.
pub fn comparison_table(records: Vec<ExperimentRecord>) -> Comparison {
    let reference = records.first().and_then(|r| r.aggregate.mean_steps_converged);
    let rows = records
        .iter()
        .map(|r| {
            let own = r.aggregate.mean_steps_converged;
            let speedup = match (own, reference) {
                (None, _) => Speedup::NoConvergence,
                (Some(_), None) => Speedup::Undefined,
                (Some(a), Some(b)) => Speedup::Value(a / b),
            };
            ComparisonRow {
                optimizer: r.optimizer.clone(),
                successes: r.aggregate.successes,
                trials: r.aggregate.trials,
                mean_steps_converged: own,
                speedup,
            }
        })
        .collect();
    Comparison {
        task: records.first().map(|r| r.task.clone()).unwrap_or_default(),
        reference: records.first().map(|r| r.optimizer.clone()).unwrap_or_default(),
        rows,
        records,
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "task: {}  (speedup relative to {})", self.task, self.reference)?;
        writeln!(f, "{:<24} {:>9} {:>12} {:>16}", "optimizer", "converged", "mean steps", "speedup")?;
        for row in &self.rows {
            let steps = row.mean_steps_converged.map_or("-".to_string(), |s| format!("{s:.1}"));
            writeln!(
                f,
                "{:<24} {:>9} {:>12} {:>16}",
                row.optimizer,
                format!("{}/{}", row.successes, row.trials),
                steps,
                row.speedup.to_string()
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    /// `.json` selects JSON; anything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

pub const CSV_COLUMNS: [&str; 12] = [
    "trial",
    "seed",
    "steps",
    "evaluations",
    "cause",
    "final_reward",
    "final_x",
    "final_y",
    "final_accuracy",
    "wall_time_secs",
    "optimizer",
    "error",
];

/// One row per trial under a fixed header, then `# key=value` footer lines
/// with the aggregate. A record without trials is header-only.
pub fn write_csv<W: Write>(record: &ExperimentRecord, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for t in &record.trials {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            t.trial.to_string(),
            t.seed.to_string(),
            t.steps.to_string(),
            t.evaluations.to_string(),
            t.cause.as_str().to_string(),
            opt(t.final_reward),
            opt(t.final_point.map(|p| p[0])),
            opt(t.final_point.map(|p| p[1])),
            opt(t.final_accuracy),
            t.wall_time_secs.to_string(),
            record.optimizer.clone(),
            t.error.clone().unwrap_or_default(),
        ])?;
    }
    let mut out = w.into_inner().map_err(|e| Error::io("<csv>", e.into_error()))?;
    if !record.trials.is_empty() {
        let a = &record.aggregate;
        let opt = |v: Option<f64>| v.map_or("na".to_string(), |x| x.to_string());
        let footer = format!(
            "# schema_version={}\n# task={}\n# pool_size={}\n# trials={}\n# successes={}\n# failures={}\n\
             # mean_steps={}\n# median_steps={}\n# mean_steps_converged={}\n# median_steps_converged={}\n",
            record.schema_version,
            record.task,
            record.pool_size,
            a.trials,
            a.successes,
            a.failures,
            opt(a.mean_steps),
            opt(a.median_steps),
            opt(a.mean_steps_converged),
            opt(a.median_steps_converged),
        );
        out.write_all(footer.as_bytes()).map_err(|e| Error::io("<csv>", e))?;
    }
    out.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn write_json<W: Write>(record: &ExperimentRecord, out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, record)?;
    Ok(())
}

pub fn emit_results(record: &ExperimentRecord, format: OutputFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut buf = std::io::BufWriter::new(file);
    match format {
        OutputFormat::Csv => write_csv(record, &mut buf),
        OutputFormat::Json => write_json(record, &mut buf),
    }
    .map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })?;
    buf.flush().map_err(|e| Error::io(path, e))
}
