//! Finite-volume solvers for one-dimensional hyperbolic conservation laws and
//! a-posteriori L¹ error certificates for their output.
//!
//! The pipeline is: pick a [`models::FluxModel`], advance initial data with
//! one of the [`schemes`], check the weak-form hypotheses with
//! [`residuals`], then trace shocks and cover the smooth part with
//! trapezoids in [`postprocess`] and assemble the bound in [`certify`].

pub mod certify;
pub mod error;
pub mod grid;
pub mod models;
pub mod pipeline;
pub mod postprocess;
pub mod quad;
pub mod residuals;
pub mod schemes;

pub use error::{Error, Result};
pub use grid::{GridFunction, Mesh, SchemeId, SolutionHistory, Trapezoid};
