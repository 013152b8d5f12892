//! Stancu-type q-Favard-Szász operators generated by q-Appell series.
//!
//! `T(f;q;x) = sum_k w_k f(x + ([k]_q + alpha) / ([n]_q + beta))` with
//! weights `E_q^{-y} P_k(q; y) / (A(1) [k]_q!)`, `y = [n]_q t`. The crate
//! evaluates the operator by truncated summation with a certified tail, checks
//! closed-form moments against that summation, and runs the smoothness and
//! statistical-convergence experiments exposed by the `qszasz` binary.

pub mod cli;
pub mod config;
pub mod error;
pub mod functions;
pub mod operator;
pub mod qcore;
pub mod series;
pub mod smoothness;
pub mod statconv;

pub use error::{Error, Result};
pub use operator::{Operator, OperatorParams};
pub use qcore::QValue;
pub use series::{AppellWeights, PowerSeries};
