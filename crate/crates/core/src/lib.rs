//! Global optimization with non-local quasi-Newton steps.
//!
//! Gradients are sampled in a σ-sized neighborhood of the iterate, a
//! quadratic model is fitted to them by least squares, and the iterate moves
//! along the model's minimizer and its linear term. The crate also ships a
//! restarted BFGS baseline, benchmark objectives with analytic gradients,
//! and the experiment drivers used to compare them.

pub mod baselines;
pub mod eval;
pub mod experiments;
pub mod linalg;
pub mod objectives;
pub mod optimizer;
pub mod output;
pub mod quadfit;

pub use eval::{EvalCounter, Evaluator};
pub use linalg::{Matrix, SymmetricMatrix, Vector};
pub use objectives::{by_name, Objective};
pub use optimizer::{nlqn_run, NlqnConfig, NlqnResult};
pub use quadfit::{direction, fit, QuadraticModel, SampleBatch, SearchDirections};
