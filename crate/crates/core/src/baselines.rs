//! Comparator optimizers: random search, simulated annealing and a (μ+λ)
//! evolution strategy. Every step costs `pool_size` objective evaluations,
//! the same as one MSN generation.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::optimizer::{evaluate_pool, Evaluated, Optimizer};
use crate::vecmath::{ParameterVector, RngHandle};

const INIT_TAG: u64 = 0x696e_6974;
const STEP_TAG: u64 = 0x7374_6570;

fn default_pool_size() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSearchConfig {
    #[serde(default = "default_pool_size")]
    pub pool_size: usize,
}

impl Default for RandomSearchConfig {
    fn default() -> Self {
        RandomSearchConfig { pool_size: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealingConfig {
    pub pool_size: usize,
    pub initial_temperature: f64,
    /// Multiplied into the temperature once per optimization step.
    pub cooling_rate: f64,
    pub proposal_std: f64,
}

impl Default for AnnealingConfig {
    fn default() -> Self {
        AnnealingConfig {
            pool_size: 50,
            initial_temperature: 1.0,
            cooling_rate: 0.995,
            proposal_std: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EsConfig {
    pub pool_size: usize,
    pub mu: usize,
    pub lambda_offspring: usize,
    pub sigma_init: f64,
    pub sigma_decay: f64,
}

impl Default for EsConfig {
    fn default() -> Self {
        EsConfig {
            pool_size: 50,
            mu: 10,
            lambda_offspring: 40,
            sigma_init: 0.5,
            sigma_decay: 0.999,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaselineConfig {
    RandomSearch(RandomSearchConfig),
    SimulatedAnnealing(AnnealingConfig),
    EvolutionStrategies(EsConfig),
}

impl BaselineConfig {
    pub fn pool_size(&self) -> usize {
        match self {
            BaselineConfig::RandomSearch(c) => c.pool_size,
            BaselineConfig::SimulatedAnnealing(c) => c.pool_size,
            BaselineConfig::EvolutionStrategies(c) => c.pool_size,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pool_size() == 0 {
            return Err(Error::Config("pool_size must be at least 1".into()));
        }
        match self {
            BaselineConfig::RandomSearch(_) => {}
            BaselineConfig::SimulatedAnnealing(c) => {
                if !(c.initial_temperature > 0.0) {
                    return Err(Error::Config("initial_temperature must be positive".into()));
                }
                if !(c.cooling_rate > 0.0 && c.cooling_rate <= 1.0) {
                    return Err(Error::Config("cooling_rate must be in (0, 1]".into()));
                }
                if !(c.proposal_std >= 0.0) {
                    return Err(Error::Config("proposal_std must be >= 0".into()));
                }
            }
            BaselineConfig::EvolutionStrategies(c) => {
                if c.mu == 0 || c.mu > c.lambda_offspring {
                    return Err(Error::Config(format!(
                        "need 1 <= mu <= lambda_offspring, got mu={} lambda={}",
                        c.mu, c.lambda_offspring
                    )));
                }
                if c.mu > c.pool_size {
                    return Err(Error::Config("mu cannot exceed pool_size".into()));
                }
                if !(c.sigma_init >= 0.0 && c.sigma_decay > 0.0) {
                    return Err(Error::Config("sigma_init must be >= 0 and sigma_decay > 0".into()));
                }
            }
        }
        Ok(())
    }

    /// `parallel` enables concurrent pool evaluation for the population
    /// methods; annealing proposals are inherently sequential.
    pub fn build(&self, objective: &dyn Objective, seed: u64, parallel: bool) -> Result<Box<dyn Optimizer>> {
        self.validate()?;
        Ok(match self {
            BaselineConfig::RandomSearch(c) => Box::new(RandomSearch::new(c.clone(), seed).parallel(parallel)),
            BaselineConfig::SimulatedAnnealing(c) => Box::new(SimulatedAnnealing::new(c.clone(), objective, seed)),
            BaselineConfig::EvolutionStrategies(c) => {
                Box::new(EvolutionStrategies::new(c.clone(), objective, seed).parallel(parallel))
            }
        })
    }
}

fn keep_best(best: &mut Option<(ParameterVector, f64)>, samples: &[ParameterVector], rewards: &[f64]) {
    for (p, &r) in samples.iter().zip(rewards) {
        if best.as_ref().is_none_or(|(_, b)| r > *b) {
            *best = Some((p.clone(), r));
        }
    }
}

/// Fresh draws from the objective's initialization scheme every step.
#[derive(Debug, Clone)]
pub struct RandomSearch {
    config: RandomSearchConfig,
    rng: RngHandle,
    step: u64,
    best: Option<(ParameterVector, f64)>,
    parallel: bool,
}

impl RandomSearch {
    pub fn new(config: RandomSearchConfig, seed: u64) -> Self {
        RandomSearch {
            config,
            rng: RngHandle::from_seed(seed),
            step: 0,
            best: None,
            parallel: false,
        }
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }
}

pub fn random_search_step(state: &mut RandomSearch, objective: &dyn Objective) -> Result<Evaluated> {
    let gen = state.rng.child(STEP_TAG).child(state.step);
    let samples: Vec<ParameterVector> = (0..state.config.pool_size)
        .map(|i| objective.initial_params(gen.child(i as u64)))
        .collect();
    let rewards = evaluate_pool(objective, &samples, state.parallel)?;
    keep_best(&mut state.best, &samples, &rewards);
    state.step += 1;
    Ok(Evaluated { samples, rewards })
}

impl Optimizer for RandomSearch {
    fn name(&self) -> &'static str {
        "random_search"
    }

    fn pool_size(&self) -> usize {
        self.config.pool_size
    }

    fn step(&mut self, objective: &dyn Objective) -> Result<Evaluated> {
        random_search_step(self, objective)
    }

    fn elite(&self) -> Option<(&ParameterVector, f64)> {
        self.best.as_ref().map(|(p, r)| (p, *r))
    }
}

/// Metropolis acceptance probability of a move changing the reward by
/// `delta` at temperature `temperature`.
pub fn acceptance_probability(delta: f64, temperature: f64) -> f64 {
    if delta >= 0.0 {
        1.0
    } else if temperature <= 0.0 {
        0.0
    } else {
        (delta / temperature).exp()
    }
}

pub fn metropolis_accept(delta: f64, temperature: f64, rng: &mut impl Rng) -> bool {
    delta > 0.0 || rng.random::<f64>() < acceptance_probability(delta, temperature)
}

/// Single-solution annealing. One step makes `pool_size` sequential
/// proposals (the first step spends one of them on the starting point).
#[derive(Debug, Clone)]
pub struct SimulatedAnnealing {
    config: AnnealingConfig,
    rng: RngHandle,
    step: u64,
    current: ParameterVector,
    current_reward: Option<f64>,
    pub temperature: f64,
    best: Option<(ParameterVector, f64)>,
}

impl SimulatedAnnealing {
    pub fn new(config: AnnealingConfig, objective: &dyn Objective, seed: u64) -> Self {
        let rng = RngHandle::from_seed(seed);
        let current = objective.initial_params(rng.child(INIT_TAG));
        SimulatedAnnealing {
            temperature: config.initial_temperature,
            config,
            rng,
            step: 0,
            current,
            current_reward: None,
            best: None,
        }
    }

    pub fn current(&self) -> (&ParameterVector, Option<f64>) {
        (&self.current, self.current_reward)
    }
}

fn checked_eval(objective: &dyn Objective, p: &ParameterVector, slot: usize) -> Result<f64> {
    let v = objective.evaluate(p)?;
    if !v.is_finite() {
        return Err(Error::Evaluation { slot, value: v });
    }
    Ok(v)
}

pub fn simulated_annealing_step(state: &mut SimulatedAnnealing, objective: &dyn Objective) -> Result<Evaluated> {
    let mut rng = state.rng.child(STEP_TAG).child(state.step).rng();
    let normal = Normal::new(0.0, state.config.proposal_std).map_err(|e| Error::Config(e.to_string()))?;
    let mut samples = Vec::with_capacity(state.config.pool_size);
    let mut rewards = Vec::with_capacity(state.config.pool_size);

    if state.current_reward.is_none() {
        let r = checked_eval(objective, &state.current, 0)?;
        state.current_reward = Some(r);
        samples.push(state.current.clone());
        rewards.push(r);
    }
    while samples.len() < state.config.pool_size {
        let mut proposal = state.current.clone();
        for v in proposal.as_mut_slice() {
            *v += normal.sample(&mut rng);
        }
        let r = checked_eval(objective, &proposal, samples.len())?;
        let current = state.current_reward.expect("set above");
        if metropolis_accept(r - current, state.temperature, &mut rng) {
            state.current = proposal.clone();
            state.current_reward = Some(r);
        }
        samples.push(proposal);
        rewards.push(r);
    }
    keep_best(&mut state.best, &samples, &rewards);
    state.temperature *= state.config.cooling_rate;
    state.step += 1;
    Ok(Evaluated { samples, rewards })
}

impl Optimizer for SimulatedAnnealing {
    fn name(&self) -> &'static str {
        "simulated_annealing"
    }

    fn pool_size(&self) -> usize {
        self.config.pool_size
    }

    fn step(&mut self, objective: &dyn Objective) -> Result<Evaluated> {
        simulated_annealing_step(self, objective)
    }

    fn elite(&self) -> Option<(&ParameterVector, f64)> {
        self.best.as_ref().map(|(p, r)| (p, *r))
    }
}

/// (μ+λ) evolution strategy with isotropic Gaussian mutation and a
/// geometrically decaying step size.
#[derive(Debug, Clone)]
pub struct EvolutionStrategies {
    config: EsConfig,
    rng: RngHandle,
    step: u64,
    population: Vec<ParameterVector>,
    pub sigma: f64,
    best: Option<(ParameterVector, f64)>,
    parallel: bool,
}

impl EvolutionStrategies {
    pub fn new(config: EsConfig, objective: &dyn Objective, seed: u64) -> Self {
        let rng = RngHandle::from_seed(seed);
        let init = rng.child(INIT_TAG);
        let population = (0..config.pool_size)
            .map(|i| objective.initial_params(init.child(i as u64)))
            .collect();
        EvolutionStrategies {
            sigma: config.sigma_init,
            config,
            rng,
            step: 0,
            population,
            best: None,
            parallel: false,
        }
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn population(&self) -> &[ParameterVector] {
        &self.population
    }
}

pub fn evolution_strategies_step(state: &mut EvolutionStrategies, objective: &dyn Objective) -> Result<Evaluated> {
    let rewards = evaluate_pool(objective, &state.population, state.parallel)?;
    keep_best(&mut state.best, &state.population, &rewards);

    let mut order: Vec<usize> = (0..rewards.len()).collect();
    order.sort_by(|&a, &b| rewards[b].total_cmp(&rewards[a]).then(a.cmp(&b)));
    let parents: Vec<ParameterVector> = order[..state.config.mu].iter().map(|&i| state.population[i].clone()).collect();

    // offspring fill the pool after the parents; λ only matters when μ + λ
    // exceeds pool_size, in which case the surplus is never drawn
    let mut rng = state.rng.child(STEP_TAG).child(state.step).rng();
    let normal = Normal::new(0.0, state.sigma.max(0.0)).map_err(|e| Error::Config(e.to_string()))?;
    let mut next = parents.clone();
    let mut j = 0;
    while next.len() < state.config.pool_size {
        let mut child = parents[j % parents.len()].clone();
        if state.sigma > 0.0 {
            for v in child.as_mut_slice() {
                *v += normal.sample(&mut rng);
            }
        }
        next.push(child);
        j += 1;
    }

    let samples = std::mem::replace(&mut state.population, next);
    state.sigma *= state.config.sigma_decay;
    state.step += 1;
    Ok(Evaluated { samples, rewards })
}

impl Optimizer for EvolutionStrategies {
    fn name(&self) -> &'static str {
        "evolution_strategies"
    }

    fn pool_size(&self) -> usize {
        self.config.pool_size
    }

    fn step(&mut self, objective: &dyn Objective) -> Result<Evaluated> {
        evolution_strategies_step(self, objective)
    }

    fn elite(&self) -> Option<(&ParameterVector, f64)> {
        self.best.as_ref().map(|(p, r)| (p, *r))
    }
}
