//! Expanding-background semilinear field evolution: closed-form backgrounds,
//! split-step pseudospectral solver, identity diagnostics and regime
//! classification.

pub mod classifier;
pub mod cosmology;
pub mod diagnostics;
pub mod error;
pub mod extended;
pub mod grid;
pub mod initial;
pub mod quadrature;
pub mod scale_factor;
pub mod solver;

pub use error::{Error, Result};
pub use extended::Extended;
pub use grid::{GridSpec, Spectral};
pub use initial::InitialCondition;
pub use scale_factor::{ScaleFactor, ScaleFactorParams};
pub use solver::{FieldState, Nonlinearity, Safeguards, Sign, Solver, SolverConfig, Status};
