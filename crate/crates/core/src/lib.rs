//! Pseudo-spectral solver and verification harness for fractional Mean Field
//! Games on the flat torus.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod field;
pub mod fokker_planck;
pub mod grid;
pub mod hjb;
pub mod io;
pub mod mfg;
pub mod model;
pub mod report;
pub mod semigroup;
pub mod spaces;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{apply_multiplier, FourierSymbol, SpectralField, VectorField};
pub use grid::{make_grid, PeriodicGrid};
pub use report::InequalityReport;
pub use semigroup::{EvolutionOperator, Integrator, Trajectory};
