//! Multiple Search Neuroevolution: a derivative-free optimizer for the
//! weights of fixed-topology networks, with benchmark objectives, baseline
//! optimizers and an experiment harness.
//!
//! ```
//! use msn_core::{msn, objectives::FnObjective, MsnConfig, TerminationRule};
//!
//! let sphere = FnObjective::new(3, |x: &[f64]| -x.iter().map(|v| v * v).sum::<f64>());
//! let result = msn::run(&sphere, &MsnConfig::default(), &TerminationRule::max_steps(20), 7).unwrap();
//! assert_eq!(result.steps, 20);
//! ```

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod data;
pub mod error;
pub mod harness;
pub mod msn;
pub mod network;
pub mod objectives;
pub mod optimizer;
pub mod vecmath;

pub use baselines::BaselineConfig;
pub use data::Dataset;
pub use error::{Error, Result};
pub use harness::{ExperimentConfig, ExperimentRecord, OptimizerConfig, TaskConfig};
pub use msn::{Msn, MsnConfig};
pub use network::{Network, NetworkSpec};
pub use objectives::{BenchmarkFunction, Objective};
pub use optimizer::{Optimizer, RunResult, TerminationRule};
pub use vecmath::{ParameterVector, RngHandle};
