//! Objectives: benchmark functions, the network-wrapped benchmark task and
//! the classification task.
//!
//! Every objective reports a *reward* to be maximized. Minimization problems
//! are wrapped as `reward = -value`.

use std::f64::consts::{E, PI};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::network::{accuracy, cross_entropy, Network};
use crate::vecmath::{ParameterVector, RngHandle};

/// Stream used to draw the frozen origin of a benchmark task.
const ORIGIN_STREAM: u64 = 0x6f72_6967_696e;

/// Success threshold on the distance to a benchmark's optimum value.
pub const DEFAULT_TOLERANCE: f64 = 0.06;

/// Target reward for termination checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub reward: f64,
    pub tolerance: f64,
    /// When set, success requires `|reward - target| <= tolerance`;
    /// otherwise `reward >= target - tolerance`.
    pub two_sided: bool,
}

impl Target {
    pub fn reached(&self, reward: f64, tolerance: Option<f64>) -> bool {
        let tol = tolerance.unwrap_or(self.tolerance);
        if self.two_sided {
            (reward - self.reward).abs() <= tol
        } else {
            reward >= self.reward - tol
        }
    }

    /// How far `reward` is from satisfying the target; zero or less means
    /// reached. Used to pick the sample closest to the target.
    pub fn gap(&self, reward: f64) -> f64 {
        if self.two_sided {
            (reward - self.reward).abs()
        } else {
            self.reward - reward
        }
    }
}

/// Maps a parameter vector to a scalar reward.
pub trait Objective: Sync {
    fn dim(&self) -> usize;

    fn evaluate(&self, params: &[f64]) -> Result<f64>;

    /// A fresh starting point drawn from the objective's initialization
    /// scheme.
    fn initial_params(&self, rng: RngHandle) -> ParameterVector;

    fn target(&self) -> Option<Target> {
        None
    }
}

/// Closure-backed objective, initialized from a standard normal.
pub struct FnObjective<F> {
    dim: usize,
    f: F,
    target: Option<Target>,
}

impl<F> FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnObjective { dim, f, target: None }
    }

    pub fn with_target(mut self, target: Target) -> Self {
        self.target = Some(target);
        self
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, params: &[f64]) -> Result<f64> {
        check_dim(self.dim, params)?;
        Ok((self.f)(params))
    }

    fn initial_params(&self, rng: RngHandle) -> ParameterVector {
        let mut rng = rng.rng();
        ParameterVector::new(
            (0..self.dim)
                .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                .collect(),
        )
    }

    fn target(&self) -> Option<Target> {
        self.target
    }
}

fn check_dim(dim: usize, params: &[f64]) -> Result<()> {
    if params.len() != dim {
        return Err(Error::Dimension {
            expected: dim,
            found: params.len(),
        });
    }
    Ok(())
}

/// Box in which origins are sampled: `(x_min, x_max, y_min, y_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    const fn symmetric(limit: f64) -> Self {
        Bounds {
            x_min: -limit,
            x_max: limit,
            y_min: -limit,
            y_max: limit,
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }

    /// Nearest point of the box.
    pub fn clamp(&self, x: f64, y: f64) -> (f64, f64) {
        (x.clamp(self.x_min, self.x_max), y.clamp(self.y_min, self.y_max))
    }

    fn sample(&self, rng: &mut impl Rng) -> (f64, f64) {
        (
            rng.random_range(self.x_min..=self.x_max),
            rng.random_range(self.y_min..=self.y_max),
        )
    }
}

/// Where a benchmark function may be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Points outside the bounds are evaluated at the nearest point inside,
    /// plus their L1 distance to it.
    #[default]
    Penalize,
    /// Points outside the bounds are moved to the nearest point inside.
    Clamp,
    /// Evaluate wherever the point lands. Schwefel and Eggholder are
    /// unbounded below off their domain, so their optimum stops being the
    /// best reward.
    Unbounded,
}

impl Domain {
    /// The point actually evaluated.
    pub fn apply(self, bounds: &Bounds, x: f64, y: f64) -> (f64, f64) {
        match self {
            Domain::Penalize | Domain::Clamp => bounds.clamp(x, y),
            Domain::Unbounded => (x, y),
        }
    }

    /// Function value at `(x, y)` under this policy.
    pub fn value(self, function: &BenchmarkFunction, x: f64, y: f64) -> f64 {
        let (cx, cy) = self.apply(&function.bounds, x, y);
        let v = function.evaluate(cx, cy);
        match self {
            Domain::Penalize => v + (x - cx).abs() + (y - cy).abs(),
            Domain::Clamp | Domain::Unbounded => v,
        }
    }
}

/// A two-dimensional test function with its known global minimum.
#[derive(Clone, Copy)]
pub struct BenchmarkFunction {
    pub name: &'static str,
    pub eval: fn(f64, f64) -> f64,
    pub bounds: Bounds,
    pub optimum_value: f64,
    pub optimum_location: (f64, f64),
}

impl fmt::Debug for BenchmarkFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BenchmarkFunction")
            .field("name", &self.name)
            .field("bounds", &self.bounds)
            .field("optimum_value", &self.optimum_value)
            .field("optimum_location", &self.optimum_location)
            .finish()
    }
}

// Ackley constants
const ACKLEY_A: f64 = 20.0;
const ACKLEY_B: f64 = 0.2;
const ACKLEY_C: f64 = 2.0 * PI;

pub fn ackley(x: f64, y: f64) -> f64 {
    let r = (0.5 * (x * x + y * y)).sqrt();
    let c = 0.5 * ((ACKLEY_C * x).cos() + (ACKLEY_C * y).cos());
    -ACKLEY_A * (-ACKLEY_B * r).exp() - c.exp() + ACKLEY_A + E
}

pub fn rastrigin(x: f64, y: f64) -> f64 {
    20.0 + (x * x - 10.0 * (2.0 * PI * x).cos()) + (y * y - 10.0 * (2.0 * PI * y).cos())
}

pub fn rosenbrock(x: f64, y: f64) -> f64 {
    100.0 * (y - x * x).powi(2) + (x - 1.0).powi(2)
}

pub fn schwefel(x: f64, y: f64) -> f64 {
    418.9829 * 2.0 - x * x.abs().sqrt().sin() - y * y.abs().sqrt().sin()
}

pub fn bukin6(x: f64, y: f64) -> f64 {
    100.0 * (y - 0.01 * x * x).abs().sqrt() + 0.01 * (x + 10.0).abs()
}

pub fn easom(x: f64, y: f64) -> f64 {
    -x.cos() * y.cos() * (-(x - PI).powi(2) - (y - PI).powi(2)).exp()
}

pub fn eggholder(x: f64, y: f64) -> f64 {
    -(y + 47.0) * (y + x / 2.0 + 47.0).abs().sqrt().sin() - x * (x - (y + 47.0)).abs().sqrt().sin()
}

pub const FUNCTIONS: [BenchmarkFunction; 7] = [
    BenchmarkFunction {
        name: "ackley",
        eval: ackley,
        bounds: Bounds::symmetric(5.0),
        optimum_value: 0.0,
        optimum_location: (0.0, 0.0),
    },
    BenchmarkFunction {
        name: "rastrigin",
        eval: rastrigin,
        bounds: Bounds::symmetric(5.2),
        optimum_value: 0.0,
        optimum_location: (0.0, 0.0),
    },
    BenchmarkFunction {
        name: "rosenbrock",
        eval: rosenbrock,
        bounds: Bounds::symmetric(2.0),
        optimum_value: 0.0,
        optimum_location: (1.0, 1.0),
    },
    BenchmarkFunction {
        name: "schwefel",
        eval: schwefel,
        bounds: Bounds::symmetric(500.0),
        optimum_value: 0.0,
        optimum_location: (420.9687, 420.9687),
    },
    BenchmarkFunction {
        name: "bukin6",
        eval: bukin6,
        bounds: Bounds {
            x_min: -15.0,
            x_max: -5.0,
            y_min: -3.0,
            y_max: 3.0,
        },
        optimum_value: 0.0,
        optimum_location: (-10.0, 1.0),
    },
    BenchmarkFunction {
        name: "easom",
        eval: easom,
        bounds: Bounds::symmetric(20.0),
        optimum_value: -1.0,
        optimum_location: (PI, PI),
    },
    BenchmarkFunction {
        name: "eggholder",
        eval: eggholder,
        bounds: Bounds::symmetric(512.0),
        optimum_value: -959.6407,
        optimum_location: (512.0, 404.2319),
    },
];

impl BenchmarkFunction {
    /// Looks up a function by name (case-insensitive; `bukin`, `bukin_n6`
    /// and `bukin6` all resolve to Bukin N.6).
    pub fn by_name(name: &str) -> Result<&'static BenchmarkFunction> {
        let key = name.to_ascii_lowercase().replace(['-', ' ', '.'], "_");
        let key = match key.as_str() {
            "bukin" | "bukin_n6" | "bukin_n_6" | "bukin_6" => "bukin6",
            other => other,
        };
        FUNCTIONS.iter().find(|f| f.name == key).ok_or_else(|| Error::Unknown {
            kind: "benchmark function",
            name: name.to_string(),
        })
    }

    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    pub fn target(&self) -> Target {
        Target {
            reward: -self.optimum_value,
            tolerance: DEFAULT_TOLERANCE,
            two_sided: true,
        }
    }
}

pub fn eval_function(f: &BenchmarkFunction, x: f64, y: f64) -> f64 {
    f.evaluate(x, y)
}

/// A network fed a frozen origin `(x0, y0)`; its two outputs are the point at
/// which the benchmark function is evaluated.
#[derive(Debug, Clone)]
pub struct Task1Objective {
    function: &'static BenchmarkFunction,
    network: Network,
    origin: (f64, f64),
    domain: Domain,
}

impl Task1Objective {
    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    pub fn function(&self) -> &'static BenchmarkFunction {
        self.function
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    /// Raw network output for the given parameters.
    pub fn output(&self, params: &[f64]) -> Result<(f64, f64)> {
        let out = self.network.forward(params, &[self.origin.0, self.origin.1])?;
        Ok((out[0], out[1]))
    }

    /// Where the function is evaluated for the given parameters.
    pub fn point(&self, params: &[f64]) -> Result<(f64, f64)> {
        let (x, y) = self.output(params)?;
        Ok(self.domain.apply(&self.function.bounds, x, y))
    }
}

pub fn make_task1_objective(
    function: &'static BenchmarkFunction,
    network: Network,
    origin_seed: u64,
) -> Result<Task1Objective> {
    if network.input_len() != 2 || network.output_len() != 2 {
        return Err(Error::Build {
            layer: 0,
            reason: format!(
                "benchmark task needs a 2-in/2-out network, got {}-in/{}-out",
                network.input_len(),
                network.output_len()
            ),
        });
    }
    let origin = function.bounds.sample(&mut RngHandle::new(origin_seed, ORIGIN_STREAM).rng());
    Ok(Task1Objective {
        function,
        network,
        origin,
        domain: Domain::default(),
    })
}

impl Objective for Task1Objective {
    fn dim(&self) -> usize {
        self.network.parameter_count()
    }

    fn evaluate(&self, params: &[f64]) -> Result<f64> {
        let (x, y) = self.output(params)?;
        Ok(-self.domain.value(self.function, x, y))
    }

    fn initial_params(&self, rng: RngHandle) -> ParameterVector {
        self.network.init_params(rng)
    }

    fn target(&self) -> Option<Target> {
        Some(self.function.target())
    }
}

/// The benchmark function searched directly over `(x, y)`, starting from
/// points drawn uniformly within its bounds.
#[derive(Debug, Clone, Copy)]
pub struct DirectObjective {
    function: &'static BenchmarkFunction,
    domain: Domain,
}

impl DirectObjective {
    pub fn new(function: &'static BenchmarkFunction) -> Self {
        DirectObjective {
            function,
            domain: Domain::default(),
        }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn point(&self, params: &[f64]) -> Result<(f64, f64)> {
        check_dim(2, params)?;
        Ok(self.domain.apply(&self.function.bounds, params[0], params[1]))
    }
}

impl Objective for DirectObjective {
    fn dim(&self) -> usize {
        2
    }

    fn evaluate(&self, params: &[f64]) -> Result<f64> {
        check_dim(2, params)?;
        Ok(-self.domain.value(self.function, params[0], params[1]))
    }

    fn initial_params(&self, rng: RngHandle) -> ParameterVector {
        let (x, y) = self.function.bounds.sample(&mut rng.rng());
        ParameterVector::new(vec![x, y])
    }

    fn target(&self) -> Option<Target> {
        Some(self.function.target())
    }
}

/// Full-batch classification: reward is minus the mean cross-entropy over
/// the whole dataset.
#[derive(Debug, Clone)]
pub struct ClassificationObjective {
    network: Network,
    data: Dataset,
    target_loss: Option<f64>,
}

impl ClassificationObjective {
    pub fn with_target_loss(mut self, loss: f64) -> Self {
        self.target_loss = Some(loss);
        self
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn dataset(&self) -> &Dataset {
        &self.data
    }

    pub fn logits(&self, params: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.network.forward_batch(params, &self.data.inputs)
    }

    pub fn loss(&self, params: &[f64]) -> Result<f64> {
        cross_entropy(&self.logits(params)?, &self.data.labels)
    }

    pub fn accuracy(&self, params: &[f64]) -> Result<f64> {
        accuracy(&self.logits(params)?, &self.data.labels)
    }

    /// Accuracy of `params` on another dataset of the same shape.
    pub fn accuracy_on(&self, params: &[f64], data: &Dataset) -> Result<f64> {
        accuracy(&self.network.forward_batch(params, &data.inputs)?, &data.labels)
    }
}

pub fn make_classification_objective(network: Network, train_subset: Dataset) -> Result<ClassificationObjective> {
    if train_subset.is_empty() {
        return Err(Error::arg("classification dataset is empty"));
    }
    if network.output_len() != train_subset.num_classes {
        return Err(Error::Dimension {
            expected: train_subset.num_classes,
            found: network.output_len(),
        });
    }
    if network.input_len() != train_subset.input_len() {
        return Err(Error::Dimension {
            expected: network.input_len(),
            found: train_subset.input_len(),
        });
    }
    Ok(ClassificationObjective {
        network,
        data: train_subset,
        target_loss: None,
    })
}

impl Objective for ClassificationObjective {
    fn dim(&self) -> usize {
        self.network.parameter_count()
    }

    fn evaluate(&self, params: &[f64]) -> Result<f64> {
        Ok(-self.loss(params)?)
    }

    fn initial_params(&self, rng: RngHandle) -> ParameterVector {
        self.network.init_params(rng)
    }

    fn target(&self) -> Option<Target> {
        self.target_loss.map(|loss| Target {
            reward: -loss,
            tolerance: 0.0,
            two_sided: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::network::{LayerSpec, NetworkSpec};

    fn f(name: &str) -> &'static BenchmarkFunction {
        BenchmarkFunction::by_name(name).unwrap()
    }

    #[test]
    fn optima_evaluate_to_stored_values() {
        for func in &FUNCTIONS {
            let (x, y) = func.optimum_location;
            let v = func.evaluate(x, y);
            assert!((v - func.optimum_value).abs() <= 1e-3, "{}: {v}", func.name);
        }
    }

    #[test]
    fn reference_values() {
        assert_abs_diff_eq!(ackley(0.0, 0.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rastrigin(0.0, 0.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rosenbrock(1.0, 1.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(easom(PI, PI), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bukin6(-10.0, 1.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eggholder(512.0, 404.2319), -959.6407, epsilon = 1e-3);
        assert_abs_diff_eq!(schwefel(420.9687, 420.9687), 0.0, epsilon = 1e-3);
    }

    #[test]
    fn bounds_are_the_published_limits() {
        let expect = [
            ("ackley", (-5.0, 5.0, -5.0, 5.0)),
            ("rastrigin", (-5.2, 5.2, -5.2, 5.2)),
            ("rosenbrock", (-2.0, 2.0, -2.0, 2.0)),
            ("schwefel", (-500.0, 500.0, -500.0, 500.0)),
            ("bukin6", (-15.0, -5.0, -3.0, 3.0)),
            ("easom", (-20.0, 20.0, -20.0, 20.0)),
            ("eggholder", (-512.0, 512.0, -512.0, 512.0)),
        ];
        for (name, (a, b, c, d)) in expect {
            let bnd = f(name).bounds;
            assert_eq!((bnd.x_min, bnd.x_max, bnd.y_min, bnd.y_max), (a, b, c, d), "{name}");
        }
    }

    #[test]
    fn registry_lookup() {
        assert_eq!(f("Ackley").name, "ackley");
        assert_eq!(f("bukin_n6").name, "bukin6");
        assert!(matches!(BenchmarkFunction::by_name("sphere"), Err(Error::Unknown { .. })));
    }

    fn task1(name: &str, seed: u64) -> Task1Objective {
        make_task1_objective(f(name), Network::build(&NetworkSpec::task1()).unwrap(), seed).unwrap()
    }

    #[test]
    fn origins_are_frozen_and_in_bounds() {
        let a = task1("ackley", 1);
        let b = task1("ackley", 2);
        assert_ne!(a.origin(), b.origin());
        for o in [a.origin(), b.origin()] {
            assert!(f("ackley").bounds.contains(o.0, o.1));
        }
        assert_eq!(task1("ackley", 1).origin(), a.origin());
        let bukin = task1("bukin6", 3);
        assert!(f("bukin6").bounds.contains(bukin.origin().0, bukin.origin().1));
    }

    #[test]
    fn clamped_domain_caps_the_reward() {
        let obj = task1("eggholder", 4);
        let far = params_pointing_at(&obj, (2000.0, -3000.0));
        assert_eq!(obj.point(&far).unwrap(), (512.0, -512.0));
        assert_eq!(obj.output(&far).unwrap(), (2000.0, -3000.0));
        let unbounded = task1("eggholder", 4).with_domain(Domain::Unbounded);
        assert_eq!(unbounded.point(&far).unwrap(), (2000.0, -3000.0));

        // off-domain Schwefel beats its in-domain optimum unless clamped
        let s = DirectObjective::new(f("schwefel")).with_domain(Domain::Clamp);
        let raw = DirectObjective::new(f("schwefel")).with_domain(Domain::Unbounded);
        let p = [5000.0, 5000.0];
        assert!(raw.evaluate(&p).unwrap() > 0.0);
        assert!(s.evaluate(&p).unwrap() <= -f("schwefel").optimum_value + 1e-3);

        let pen = DirectObjective::new(f("schwefel"));
        let edge = pen.evaluate(&[500.0, 500.0]).unwrap();
        assert!((pen.evaluate(&p).unwrap() - (edge - 9000.0)).abs() < 1e-9);
        assert_eq!(pen.evaluate(&[1.0, 2.0]).unwrap(), s.evaluate(&[1.0, 2.0]).unwrap());
    }

    /// Zero every weight and set the output biases to the optimum location.
    fn params_pointing_at(obj: &Task1Objective, point: (f64, f64)) -> Vec<f64> {
        let mut p = vec![0.0; obj.dim()];
        let n = p.len();
        p[n - 2] = point.0;
        p[n - 1] = point.1;
        p
    }

    #[test]
    fn hitting_the_optimum_gives_target_reward() {
        for name in ["ackley", "easom", "rosenbrock"] {
            let obj = task1(name, 9);
            let func = f(name);
            let p = params_pointing_at(&obj, func.optimum_location);
            let reward = obj.evaluate(&p).unwrap();
            assert_abs_diff_eq!(reward, -func.optimum_value, epsilon = 1e-9);
            assert!(obj.target().unwrap().reached(reward, None));
            // reward bounded by -optimum elsewhere
            let q = params_pointing_at(&obj, (0.3, -0.7));
            assert!(obj.evaluate(&q).unwrap() <= -func.optimum_value);
        }
    }

    #[test]
    fn task1_rejects_wrong_arity() {
        let net = Network::build(&NetworkSpec::mlp(3, 4, 2)).unwrap();
        assert!(matches!(make_task1_objective(f("ackley"), net, 0), Err(Error::Build { .. })));
    }

    #[test]
    fn target_semantics() {
        let band = Target {
            reward: 0.0,
            tolerance: 0.06,
            two_sided: true,
        };
        assert!(band.reached(-0.06, None));
        assert!(!band.reached(-0.0601, None));
        assert!(!band.reached(0.07, None));
        assert!(band.reached(-0.5, Some(1.0)));
        let floor = Target {
            reward: -0.15,
            tolerance: 0.0,
            two_sided: false,
        };
        assert!(floor.reached(-0.1, None));
        assert!(!floor.reached(-0.2, None));
    }

    fn tiny_dataset() -> Dataset {
        Dataset::new(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]], vec![0, 1, 2], 3, vec![2]).unwrap()
    }

    #[test]
    fn constant_logits_give_log_num_classes() {
        let net = Network::build(&NetworkSpec {
            input_shape: vec![2],
            layers: vec![LayerSpec::dense(2, 3)],
        })
        .unwrap();
        let obj = make_classification_objective(net, tiny_dataset()).unwrap();
        let params = vec![0.0; obj.dim()];
        assert_abs_diff_eq!(obj.evaluate(&params).unwrap(), -(3.0f64).ln(), epsilon = 1e-12);
        assert_eq!(obj.evaluate(&params).unwrap(), obj.evaluate(&params).unwrap());
    }

    #[test]
    fn saturated_single_sample_loss_vanishes() {
        let net = Network::build(&NetworkSpec {
            input_shape: vec![1],
            layers: vec![LayerSpec::dense(1, 2)],
        })
        .unwrap();
        let data = Dataset::new(vec![vec![1.0]], vec![1], 2, vec![1]).unwrap();
        let obj = make_classification_objective(net, data).unwrap();
        // weights [w0, w1], biases [b0, b1]
        let reward = obj.evaluate(&[0.0, 0.0, 0.0, 50.0]).unwrap();
        assert!(reward <= 0.0 && reward > -1e-20);
        assert_eq!(obj.accuracy(&[0.0, 0.0, 0.0, 50.0]).unwrap(), 1.0);
    }

    #[test]
    fn classification_shape_checks() {
        let net = Network::build(&NetworkSpec::mlp(2, 4, 5)).unwrap();
        assert!(matches!(
            make_classification_objective(net, tiny_dataset()),
            Err(Error::Dimension { expected: 3, found: 5 })
        ));
    }
}
