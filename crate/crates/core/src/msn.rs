//! Multiple Search Neuroevolution.
//!
//! Each generation the pool is rebuilt from:
//!
//! * the **elite**, the best sample ever seen, copied unchanged;
//! * up to `N` **anchors**, the best samples of the generation that are at
//!   least `min_distance` apart (Canberra);
//! * `M` **probes** per anchor, clones with a few coordinates perturbed;
//! * **blends** filling every remaining slot, each a random anchor with some
//!   coordinates copied from another pool member.
//!
//! A scalar *integrity* in `[0, 1]` sets both how far probes move
//! ([`search_radius`]) and how many coordinates they touch
//! ([`num_selections`]). It drops by `step_size` whenever a generation fails
//! to improve on the elite by `min_entropy` (relative), and resets to 1 with
//! the elite forced back in as an anchor after `patience` consecutive
//! failures. When fewer than `N` anchors can be admitted the effective
//! learning rate and `alpha` grow by `expansion_factor`.
//!
//! Rewards are maximized.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Network;
use crate::objectives::Objective;
use crate::optimizer::{drive, evaluate_pool, Control, Diagnostics, Evaluated, GenerationRecord, Optimizer, RunResult, TerminationRule};
use crate::vecmath::{canberra_distance, choose_indices_with, ParameterVector, RngHandle};

/// Floor on `|elite reward|` when computing relative improvement.
pub const IMPROVEMENT_EPS: f64 = 1e-8;

const INIT_TAG: u64 = 0x696e_6974;
const GEN_TAG: u64 = 0x0067_656e;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// `Uniform(-radius, radius)`
    #[default]
    Uniform,
    /// `Normal(0, radius)`
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MsnConfig {
    pub pool_size: usize,
    pub num_anchors: usize,
    pub probes_per_anchor: usize,
    /// Integrity decrement after an insufficient generation.
    pub step_size: f64,
    /// Minimum relative improvement that keeps integrity unchanged.
    pub min_entropy: f64,
    pub lr: f64,
    pub lambda: f64,
    /// Ceiling of the perturbed fraction of parameters.
    pub alpha: f64,
    pub beta: f64,
    /// Minimum Canberra distance between anchors.
    pub min_distance: f64,
    pub patience: usize,
    pub expansion_factor: f64,
    /// Radial expansion never pushes the learning rate above
    /// `lr * lr_cap_factor`.
    pub lr_cap_factor: f64,
    pub noise: NoiseKind,
}

impl Default for MsnConfig {
    fn default() -> Self {
        MsnConfig {
            pool_size: 50,
            num_anchors: 4,
            probes_per_anchor: 8,
            step_size: 0.05,
            min_entropy: 1e-4,
            lr: 0.5,
            lambda: 10.0,
            alpha: 0.05,
            beta: 0.29,
            min_distance: 3.0,
            patience: 10,
            expansion_factor: 1.1,
            lr_cap_factor: 100.0,
            noise: NoiseKind::Gaussian,
        }
    }
}

impl MsnConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.num_anchors == 0 || self.probes_per_anchor == 0 {
            return bad("num_anchors and probes_per_anchor must be positive".into());
        }
        if self.pool_size < self.num_anchors * self.probes_per_anchor + 1 {
            return bad(format!(
                "pool_size {} is below num_anchors * probes_per_anchor + 1 = {}",
                self.pool_size,
                self.num_anchors * self.probes_per_anchor + 1
            ));
        }
        if !(self.step_size > 0.0 && self.step_size <= 1.0) {
            return bad(format!("step_size must be in (0, 1], got {}", self.step_size));
        }
        if !(self.min_entropy >= 0.0) {
            return bad(format!("min_entropy must be >= 0, got {}", self.min_entropy));
        }
        for (name, v) in [("lr", self.lr), ("lambda", self.lambda), ("beta", self.beta), ("min_distance", self.min_distance)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha must be in (0, 1], got {}", self.alpha));
        }
        if self.patience == 0 {
            return bad("patience must be positive".into());
        }
        if !(self.expansion_factor > 1.0 && self.expansion_factor.is_finite()) {
            return bad(format!("expansion_factor must be > 1, got {}", self.expansion_factor));
        }
        if !(self.lr_cap_factor >= 1.0) {
            return bad(format!("lr_cap_factor must be >= 1, got {}", self.lr_cap_factor));
        }
        Ok(())
    }

    pub fn lr_cap(&self) -> f64 {
        self.lr * self.lr_cap_factor
    }
}

/// Perturbation magnitude: `(tanh(λ·p − 2.5) + 1) · lr` with `p = 1 − integrity`.
pub fn search_radius(integrity: f64, lambda: f64, effective_lr: f64) -> f64 {
    let p = 1.0 - integrity;
    ((lambda * p - 2.5).tanh() + 1.0) * effective_lr
}

/// Fraction of parameters to touch: `α / (1 + β/p)`, zero at `p = 0`.
pub fn selection_fraction(integrity: f64, alpha: f64, beta: f64) -> f64 {
    let p = 1.0 - integrity;
    if p <= 0.0 {
        0.0
    } else {
        alpha / (1.0 + beta / p)
    }
}

/// Number of coordinates to perturb or replace; never less than one nor
/// more than `n_params`.
pub fn num_selections(integrity: f64, alpha: f64, beta: f64, n_params: usize) -> usize {
    let k = (selection_fraction(integrity, alpha, beta) * n_params as f64).round() as usize;
    k.clamp(1, n_params.max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoleTag {
    /// Drawn by the initialization scheme (first generation only).
    Initial,
    Elite,
    Anchor,
    Probe(usize),
    Blend,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pool {
    pub members: Vec<ParameterVector>,
    pub roles: Vec<RoleTag>,
}

impl Pool {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn count(&self, pred: impl Fn(&RoleTag) -> bool) -> usize {
        self.roles.iter().filter(|r| pred(r)).count()
    }
}

/// Independent Xavier-normal networks, one substream per slot.
pub fn init_pool(config: &MsnConfig, net: &Network, rng: RngHandle) -> Result<Pool> {
    init_pool_with(config, rng, |h| net.init_params(h))
}

pub fn init_pool_with(config: &MsnConfig, rng: RngHandle, init: impl Fn(RngHandle) -> ParameterVector) -> Result<Pool> {
    config.validate()?;
    let root = rng.child(INIT_TAG);
    Ok(Pool {
        members: (0..config.pool_size).map(|i| init(root.child(i as u64))).collect(),
        roles: vec![RoleTag::Initial; config.pool_size],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Anchor {
    pub params: ParameterVector,
    /// Slot of the pool it was taken from, if any.
    pub slot: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Elite {
    pub params: ParameterVector,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MsnState {
    pub integrity: f64,
    pub elite: Option<Elite>,
    pub anchors: Vec<Anchor>,
    pub effective_lr: f64,
    pub effective_alpha: f64,
    /// Consecutive generations of insufficient improvement.
    pub fail_count: usize,
    pub generation: usize,
    pub rng: RngHandle,
    /// Set by [`backtrack`]; consumed when the next anchors are chosen.
    pub reinsert_elite: bool,
}

impl MsnState {
    pub fn new(config: &MsnConfig, rng: RngHandle) -> Self {
        MsnState {
            integrity: 1.0,
            elite: None,
            anchors: Vec::new(),
            effective_lr: config.lr,
            effective_alpha: config.alpha,
            fail_count: 0,
            generation: 0,
            rng,
            reinsert_elite: false,
        }
    }
}

/// Greedy anchor choice: visit samples by descending reward (ties to the
/// lower index), admit the first, then admit each sample whose Canberra
/// distance to every admitted anchor is at least `min_distance`. Returns
/// pool indices in admission order.
pub fn select_anchors(samples: &[ParameterVector], rewards: &[f64], n: usize, min_distance: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..samples.len().min(rewards.len())).collect();
    order.sort_by(|&a, &b| rewards[b].total_cmp(&rewards[a]).then(a.cmp(&b)));
    let mut admitted: Vec<usize> = Vec::with_capacity(n);
    for i in order {
        if admitted.len() == n {
            break;
        }
        let far = admitted.iter().all(|&j| {
            canberra_distance(&samples[i], &samples[j]).expect("pool vectors share a length") >= min_distance
        });
        if far {
            admitted.push(i);
        }
    }
    admitted
}

fn noise_sample(noise: NoiseKind, radius: f64, rng: &mut impl Rng) -> f64 {
    match noise {
        NoiseKind::Uniform => loop {
            // open interval (-radius, radius)
            let u: f64 = rng.random_range(-1.0..1.0);
            if u != -1.0 {
                break u * radius;
            }
        },
        NoiseKind::Gaussian => Normal::new(0.0, radius).map_or(0.0, |d| d.sample(rng)),
    }
}

/// Clone of `anchor` with exactly `k` distinct coordinates shifted by noise
/// of scale `radius`.
pub fn spawn_probe(anchor: &ParameterVector, radius: f64, k: usize, noise: NoiseKind, rng: RngHandle) -> ParameterVector {
    let mut rng = rng.rng();
    let mut probe = anchor.clone();
    let k = k.min(probe.len());
    let idx = choose_indices_with(probe.len(), k, &mut rng).expect("k clamped to length");
    let values = probe.as_mut_slice();
    for i in idx {
        values[i] += noise_sample(noise, radius, &mut rng);
    }
    probe
}

/// Crossover: clone a random anchor, then copy `k` random coordinates from a
/// random pool member other than the anchor's own slot.
pub fn make_blend(anchors: &[Anchor], pool: &[ParameterVector], k: usize, rng: RngHandle) -> Result<ParameterVector> {
    if anchors.is_empty() {
        return Err(Error::arg("blend needs at least one anchor"));
    }
    if pool.len() < 2 {
        return Err(Error::arg("blend needs a pool of at least two members"));
    }
    let mut rng = rng.rng();
    let basis = &anchors[rng.random_range(0..anchors.len())];
    let second = match basis.slot {
        Some(s) if s < pool.len() => {
            let j = rng.random_range(0..pool.len() - 1);
            if j >= s {
                j + 1
            } else {
                j
            }
        }
        _ => rng.random_range(0..pool.len()),
    };
    let donor = &pool[second];
    if donor.len() != basis.params.len() {
        return Err(Error::Dimension {
            expected: basis.params.len(),
            found: donor.len(),
        });
    }
    let mut blend = basis.params.clone();
    let k = k.min(blend.len());
    let values = blend.as_mut_slice();
    for i in choose_indices_with(values.len(), k, &mut rng)? {
        values[i] = donor[i];
    }
    Ok(blend)
}

/// Relative improvement of `gen_best` over the elite. The first generation
/// (no elite yet) always counts as an improvement.
pub fn improvement_ratio(elite_reward: Option<f64>, gen_best: f64) -> f64 {
    match elite_reward {
        None => f64::INFINITY,
        Some(e) => (gen_best - e) / e.abs().max(IMPROVEMENT_EPS),
    }
}

pub fn update_integrity(config: &MsnConfig, state: &MsnState, gen_best_reward: f64) -> MsnState {
    let mut next = state.clone();
    let r = improvement_ratio(state.elite.as_ref().map(|e| e.reward), gen_best_reward);
    if r >= config.min_entropy {
        next.fail_count = 0;
    } else {
        next.integrity = (state.integrity - config.step_size).max(0.0);
        next.fail_count += 1;
    }
    next
}

/// Reset integrity and schedule the elite for reinsertion as first anchor.
pub fn backtrack(config: &MsnConfig, state: &MsnState) -> MsnState {
    debug_assert!(state.fail_count >= config.patience, "backtrack before patience ran out");
    let mut next = state.clone();
    next.integrity = 1.0;
    next.fail_count = 0;
    next.reinsert_elite = true;
    next
}

/// Grow `effective_lr` and `effective_alpha` when fewer than `n` anchors were
/// admitted; otherwise relax them one step back toward the configured values.
pub fn radial_expansion(config: &MsnConfig, state: &MsnState, admitted: usize, n: usize) -> MsnState {
    let mut next = state.clone();
    let f = config.expansion_factor;
    if admitted < n {
        next.effective_lr = (state.effective_lr * f).min(config.lr_cap());
        next.effective_alpha = (state.effective_alpha * f).min(1.0);
    } else {
        next.effective_lr = (state.effective_lr / f).max(config.lr);
        next.effective_alpha = (state.effective_alpha / f).max(config.alpha);
    }
    next
}

fn argmax(rewards: &[f64]) -> usize {
    let mut best = 0;
    for (i, &r) in rewards.iter().enumerate().skip(1) {
        if r > rewards[best] {
            best = i;
        }
    }
    best
}

/// One generation: consume the rewards of `pool` and build the next pool.
pub fn step(config: &MsnConfig, state: &MsnState, pool: &Pool, rewards: &[f64]) -> Result<(MsnState, Pool)> {
    if pool.is_empty() {
        return Err(Error::arg("empty pool"));
    }
    if rewards.len() != pool.len() {
        return Err(Error::Argument(format!(
            "{} rewards for a pool of {}",
            rewards.len(),
            pool.len()
        )));
    }
    if let Some(slot) = rewards.iter().position(|r| !r.is_finite()) {
        return Err(Error::Evaluation {
            slot,
            value: rewards[slot],
        });
    }

    let best = argmax(rewards);
    let gen_best = rewards[best];

    let mut next = update_integrity(config, state, gen_best);
    if next.elite.as_ref().is_none_or(|e| gen_best > e.reward) {
        next.elite = Some(Elite {
            params: pool.members[best].clone(),
            reward: gen_best,
        });
    }
    if next.fail_count >= config.patience {
        next = backtrack(config, &next);
    }

    let admitted = select_anchors(&pool.members, rewards, config.num_anchors, config.min_distance);
    let mut anchors: Vec<Anchor> = admitted
        .iter()
        .map(|&i| Anchor {
            params: pool.members[i].clone(),
            slot: Some(i),
        })
        .collect();
    if next.reinsert_elite {
        let elite = next.elite.as_ref().expect("elite exists after the first generation");
        anchors.retain(|a| a.params != elite.params);
        let slot = pool.members.iter().position(|m| *m == elite.params);
        anchors.insert(
            0,
            Anchor {
                params: elite.params.clone(),
                slot,
            },
        );
        anchors.truncate(config.num_anchors);
        next.reinsert_elite = false;
    }

    next = radial_expansion(config, &next, admitted.len(), config.num_anchors);

    let n_params = pool.members[0].len();
    let radius = search_radius(next.integrity, config.lambda, next.effective_lr);
    let k = num_selections(next.integrity, next.effective_alpha, config.beta, n_params);
    let gen_rng = state.rng.child(GEN_TAG).child(state.generation as u64);

    let mut members = Vec::with_capacity(config.pool_size);
    let mut roles = Vec::with_capacity(config.pool_size);
    members.push(next.elite.as_ref().expect("elite set above").params.clone());
    roles.push(RoleTag::Elite);
    for a in &anchors {
        members.push(a.params.clone());
        roles.push(RoleTag::Anchor);
    }
    'probes: for (ai, a) in anchors.iter().enumerate() {
        for _ in 0..config.probes_per_anchor {
            if members.len() == config.pool_size {
                break 'probes;
            }
            let slot = members.len() as u64;
            members.push(spawn_probe(&a.params, radius, k, config.noise, gen_rng.child(slot)));
            roles.push(RoleTag::Probe(ai));
        }
    }
    while members.len() < config.pool_size {
        let slot = members.len() as u64;
        members.push(make_blend(&anchors, &pool.members, k, gen_rng.child(slot))?);
        roles.push(RoleTag::Blend);
    }

    next.anchors = anchors;
    next.generation += 1;
    Ok((next, Pool { members, roles }))
}

/// Ask/tell wrapper around [`step`].
#[derive(Debug, Clone)]
pub struct Msn {
    config: MsnConfig,
    state: MsnState,
    pool: Pool,
    parallel: bool,
    last_admitted: Option<usize>,
}

impl Msn {
    /// Pool drawn from the objective's initialization scheme.
    pub fn new(config: MsnConfig, objective: &dyn Objective, seed: u64) -> Result<Self> {
        let rng = RngHandle::from_seed(seed);
        let pool = init_pool_with(&config, rng, |h| objective.initial_params(h))?;
        Ok(Self::with_pool(config, pool, rng))
    }

    pub fn with_pool(config: MsnConfig, pool: Pool, rng: RngHandle) -> Self {
        let state = MsnState::new(&config, rng);
        Msn {
            config,
            state,
            pool,
            parallel: false,
            last_admitted: None,
        }
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn config(&self) -> &MsnConfig {
        &self.config
    }

    pub fn state(&self) -> &MsnState {
        &self.state
    }

    pub fn pool(&self) -> &Pool {
        &self.pool
    }

    /// Feed externally computed rewards for the current pool. Returns the
    /// pool that was evaluated.
    pub fn tell(&mut self, rewards: &[f64]) -> Result<Pool> {
        let (state, pool) = step(&self.config, &self.state, &self.pool, rewards)?;
        self.last_admitted = Some(state.anchors.len());
        self.state = state;
        Ok(std::mem::replace(&mut self.pool, pool))
    }
}

impl Optimizer for Msn {
    fn name(&self) -> &'static str {
        "msn"
    }

    fn pool_size(&self) -> usize {
        self.config.pool_size
    }

    fn step(&mut self, objective: &dyn Objective) -> Result<Evaluated> {
        let rewards = evaluate_pool(objective, &self.pool.members, self.parallel)?;
        let evaluated = self.tell(&rewards)?;
        Ok(Evaluated {
            samples: evaluated.members,
            rewards,
        })
    }

    fn elite(&self) -> Option<(&ParameterVector, f64)> {
        self.state.elite.as_ref().map(|e| (&e.params, e.reward))
    }

    fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            integrity: Some(self.state.integrity),
            num_anchors: self.last_admitted,
            effective_lr: Some(self.state.effective_lr),
        }
    }
}

/// Optimize `objective` from a fresh pool until `termination` fires.
pub fn run(objective: &dyn Objective, config: &MsnConfig, termination: &TerminationRule, seed: u64) -> Result<RunResult> {
    run_with(objective, config, termination, seed, false, |_, _| Control::Continue)
}

/// [`run`] with optional parallel pool evaluation and a per-generation
/// observer that may stop the run early.
pub fn run_with<F>(
    objective: &dyn Objective,
    config: &MsnConfig,
    termination: &TerminationRule,
    seed: u64,
    parallel: bool,
    observer: F,
) -> Result<RunResult>
where
    F: FnMut(&GenerationRecord, &Msn) -> Control,
{
    let mut msn = Msn::new(config.clone(), objective, seed)?.parallel(parallel);
    drive(&mut msn, objective, termination, observer)
}
