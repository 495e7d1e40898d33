pub mod bits;
pub mod error;
pub mod exact;
pub mod exec;
pub mod lpsolve;
pub mod oracle;
pub mod pipeline;
pub mod poly;
pub mod problems;
pub mod relax;
pub mod rounding;

pub use error::{Error, Result};
pub use exec::Execution;
pub use oracle::{perturb, Oracle, Prediction};
pub use pipeline::{
    exact_solve, solve, solve_constrained, solve_with_backend, Instance, SolveConfig, SolveReport,
};
pub use poly::Polynomial;
pub use rounding::Strategy;
