//! Numerical laboratory for the mean-square error term of the Riemann
//! zeta-function on the critical line, its divisor-problem analogue, and the
//! Gaussian-smoothed short-interval moments built on them.
//!
//! The crate is organised bottom-up:
//!
//! * [`zeta`]: Hardy's `Z(t)` by Riemann–Siegel, with an Euler–Maclaurin oracle.
//! * [`divisor`]: `d(n)`, `D(x)`, `Δ(x)`, `Δ*(x)` and short-interval divisor sums.
//! * [`error_terms`]: `E(T)` by cumulative Gauss–Legendre quadrature, then
//!   `E*(t)` and `R(T)`, with binary persistence.
//! * [`smoothing`]: the smoothed moment `J_k(t, G)` and its `E*`-representation.
//! * [`moments`] and [`verify`]: window moments, exponent fits and the
//!   verification reports.
//! * [`pipeline`]: caching orchestration and CSV/JSON export.

// `!(x >= a)` guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dd;
pub mod divisor;
pub mod error;
pub mod error_terms;
pub mod moments;
pub mod pipeline;
pub mod quadrature;
pub mod smoothing;
pub mod verify;
pub mod zeta;

pub use error::{Error, Result};
