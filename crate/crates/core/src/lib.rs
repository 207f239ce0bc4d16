//! Control-landscape structure for single-qubit phase-shift gate generation.
//!
//! The crate studies the objective `J_W[f] = ¼|Tr(U_T W†)|²` for a qubit with
//! drift `σ_z` and coupling `v_x σ_x + v_y σ_y`, driven by a real control `f`.
//! At the special control `f₀ = 0` the gradient vanishes and the Hessian is an
//! integral operator with kernel `−2v² cos φ · cos(2|t−s| + φ)`, `φ = −(φ_W+T)`.
//!
//! Two independent routes to its spectrum are provided:
//!
//! * [`spectral`] discretizes the kernel (Nyström) and diagonalizes it;
//! * [`analytic`] reduces the eigenproblem to transcendental characteristic
//!   equations and brackets their roots.
//!
//! [`verify`] cross-validates the two over parameter grids, and [`optimize`]
//! probes the landscape empirically (gradient ascent, saddle probes).

// `!(x > 0.0)` guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod objective;
pub mod optimize;
pub mod quadrature;
pub mod roots;
pub mod spectral;
pub mod su2;
pub mod verify;

pub use error::{Error, Result};
pub use objective::SystemConfig;
pub use su2::{PiecewiseControl, Su2Matrix};
