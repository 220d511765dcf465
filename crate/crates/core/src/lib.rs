//! Operator-controlled frame analysis on finite-dimensional models.
//!
//! The crate realizes wave packet systems `{D_a T_{bk} E_c ψ}` on a cyclic
//! sampling grid and checks, with explicit numerical tolerances, the frame
//! inequalities whose lower and upper sides are controlled by a bounded
//! operator Θ, together with the operator theory behind them: hyponormality,
//! relative hyponormality, Douglas factorization and the Moore–Penrose
//! hyponormality criterion.

pub mod error;
pub mod frame;
pub mod json;
pub mod models;
pub mod numerics;
pub mod operator_theory;
pub mod random;
pub mod signal;
pub mod suites;
pub mod theta;
pub mod wavepacket;

pub use error::{Error, Result};
pub use numerics::{Operator, Tolerance};

/// Complex double-precision scalar.
pub type C64 = num_complex::Complex64;
