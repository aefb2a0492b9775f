//! The generation loop shared by MSN and the baselines.
//!
//! An [`Optimizer`] evaluates exactly `pool_size` candidates per step, so a
//! run of `s` steps costs `s * pool_size` objective evaluations regardless of
//! the method.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::vecmath::ParameterVector;

/// Stopping rule. `target_tolerance` overrides the objective's own tolerance;
/// objectives without a target only stop at `max_steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TerminationRule {
    pub target_tolerance: Option<f64>,
    pub max_steps: usize,
}

impl TerminationRule {
    pub fn max_steps(max_steps: usize) -> Self {
        TerminationRule {
            target_tolerance: None,
            max_steps,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.target_tolerance = Some(tolerance);
        self
    }
}

impl Default for TerminationRule {
    fn default() -> Self {
        TerminationRule {
            target_tolerance: Some(crate::objectives::DEFAULT_TOLERANCE),
            max_steps: 5000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminationCause {
    TargetReached,
    MaxSteps,
    Stopped,
}

/// Optional per-generation internals, reported by optimizers that have them.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Diagnostics {
    pub integrity: Option<f64>,
    pub num_anchors: Option<usize>,
    pub effective_lr: Option<f64>,
}

/// Candidates evaluated in one step, in slot order.
#[derive(Debug, Clone)]
pub struct Evaluated {
    pub samples: Vec<ParameterVector>,
    pub rewards: Vec<f64>,
}

pub trait Optimizer {
    fn name(&self) -> &'static str;

    fn pool_size(&self) -> usize;

    /// Evaluate the current candidates and advance one generation.
    fn step(&mut self, objective: &dyn Objective) -> Result<Evaluated>;

    /// Best sample seen so far.
    fn elite(&self) -> Option<(&ParameterVector, f64)>;

    /// State after the most recent step.
    fn diagnostics(&self) -> Diagnostics {
        Diagnostics::default()
    }
}

/// Evaluate every sample, in parallel when requested. Results are gathered
/// positionally so the schedule never affects the outcome.
pub fn evaluate_pool(objective: &dyn Objective, samples: &[ParameterVector], parallel: bool) -> Result<Vec<f64>> {
    let eval = |(slot, p): (usize, &ParameterVector)| -> Result<f64> {
        let v = objective.evaluate(p)?;
        if !v.is_finite() {
            return Err(Error::Evaluation { slot, value: v });
        }
        Ok(v)
    };
    if parallel {
        samples.par_iter().enumerate().map(eval).collect()
    } else {
        samples.iter().enumerate().map(eval).collect()
    }
}

/// One row of the per-generation trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_reward: f64,
    pub elite_reward: f64,
    pub integrity: Option<f64>,
    pub num_anchors: Option<usize>,
    pub effective_lr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub trace: Vec<GenerationRecord>,
    /// Generations evaluated.
    pub steps: usize,
    pub cause: TerminationCause,
    pub evaluations: usize,
    pub elite: Option<(ParameterVector, f64)>,
    /// The sample that met the target, when `cause` is `TargetReached`.
    pub hit: Option<(ParameterVector, f64)>,
}

impl RunResult {
    /// Writes the trace as CSV with columns
    /// `generation,best_reward,elite_reward,integrity,num_anchors,effective_lr`.
    /// `integrity`, `num_anchors` and `effective_lr` are the optimizer state
    /// after the generation and are blank for optimizers without them.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "generation",
            "best_reward",
            "elite_reward",
            "integrity",
            "num_anchors",
            "effective_lr",
        ])?;
        for row in &self.trace {
            w.serialize((
                row.generation,
                row.best_reward,
                row.elite_reward,
                row.integrity,
                row.num_anchors,
                row.effective_lr,
            ))?;
        }
        w.flush().map_err(|e| Error::io("<trace>", e))?;
        Ok(())
    }

    pub fn save_trace_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_trace_csv(file)
    }
}

/// Returned by run observers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Loop `step` until the target is met, `max_steps` generations have run,
/// or `observer` asks to stop. The target is checked against the evaluated
/// sample closest to it in each generation.
pub fn drive<O, F>(
    optimizer: &mut O,
    objective: &dyn Objective,
    rule: &TerminationRule,
    mut observer: F,
) -> Result<RunResult>
where
    O: Optimizer + ?Sized,
    F: FnMut(&GenerationRecord, &O) -> Control,
{
    let target = objective.target();
    let mut trace = Vec::new();
    let mut cause = TerminationCause::MaxSteps;
    let mut hit = None;
    let mut evaluations = 0;

    for generation in 0..rule.max_steps {
        let Evaluated { samples, rewards } = optimizer
            .step(objective)
            .map_err(|e| Error::Generation {
                generation,
                source: Box::new(e),
            })?;
        evaluations += rewards.len();
        let best_reward = rewards.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let diag = optimizer.diagnostics();
        let record = GenerationRecord {
            generation,
            best_reward,
            elite_reward: optimizer.elite().map_or(best_reward, |(_, r)| r),
            integrity: diag.integrity,
            num_anchors: diag.num_anchors,
            effective_lr: diag.effective_lr,
        };
        let control = observer(&record, optimizer);
        trace.push(record);

        if let Some(t) = target {
            let closest = rewards
                .iter()
                .enumerate()
                .min_by(|a, b| t.gap(*a.1).total_cmp(&t.gap(*b.1)).then(a.0.cmp(&b.0)))
                .map(|(i, &r)| (i, r));
            if let Some((slot, reward)) = closest {
                if t.reached(reward, rule.target_tolerance) {
                    cause = TerminationCause::TargetReached;
                    hit = Some((samples[slot].clone(), reward));
                    break;
                }
            }
        }
        if control == Control::Stop {
            cause = TerminationCause::Stopped;
            break;
        }
    }

    let steps = trace.len();
    Ok(RunResult {
        trace,
        steps,
        cause,
        evaluations,
        elite: optimizer.elite().map(|(p, r)| (p.clone(), r)),
        hit,
    })
}
