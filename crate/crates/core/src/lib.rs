//! Numerical toolkit for the kinetic Cucker–Smale equation
//!
//! ```text
//! ∂t f + v·∇x f + ∇v·(L[f] f) = σ Δv f,   L[f] = b(x) − a(x) v,
//! a = ∫ φ(|x−y|) f(y,w) dy dw,   b = ∫ φ(|x−y|) w f(y,w) dy dw.
//! ```
//!
//! Two discretisations share one model layer: a Strang-split finite-volume
//! solver on a 1+1 dimensional phase grid ([`grid`]) and a weighted particle
//! system in up to three dimensions ([`particle`]). [`diagnostics`] turns
//! either into time series of moments and weighted norms, and [`experiments`]
//! drives stability, vanishing-noise and cross-validation studies on top.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar for callers who do not care.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
mod scalar;

pub mod diagnostics;
pub mod experiments;
pub mod grid;
pub mod io;
pub mod model;
pub mod particle;

pub use error::{Error, Result};
pub use scalar::{Axis, Real};

pub type KernelSpec64 = model::KernelSpec<f64>;
pub type WeightSpec64 = model::WeightSpec<f64>;
pub type SimParams64 = model::SimParams<f64>;
pub type FieldPair64 = model::FieldPair<f64>;
pub type PhaseGrid64 = grid::PhaseGrid<f64>;
pub type GridSolver64 = grid::GridSolver<f64>;
pub type ParticleEnsemble64 = particle::ParticleEnsemble<f64>;
pub type DiagnosticsSeries64 = diagnostics::DiagnosticsSeries<f64>;
pub type Scenario64 = experiments::Scenario<f64>;

pub type KernelSpec32 = model::KernelSpec<f32>;
pub type WeightSpec32 = model::WeightSpec<f32>;
pub type SimParams32 = model::SimParams<f32>;
pub type PhaseGrid32 = grid::PhaseGrid<f32>;
pub type GridSolver32 = grid::GridSolver<f32>;
pub type ParticleEnsemble32 = particle::ParticleEnsemble<f32>;
pub type DiagnosticsSeries32 = diagnostics::DiagnosticsSeries<f32>;
