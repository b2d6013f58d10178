//! Numerical laboratory for global gradient estimates of
//! `u_t = a(x, t, u) Δ(F(u)) + H`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checker;
pub mod cli;
pub mod config;
pub mod cutoffs;
pub mod error;
pub mod estimator;
pub mod fields;
pub mod geometry;
pub mod nonlinearity;
pub mod quadrature;
pub mod report;
pub mod runner;
pub mod scenario;
pub mod stencil;

pub use error::{LabError, Result};
