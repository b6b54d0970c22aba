//! Conformal maps of the disk onto one-tooth gears and pregears, built from
//! rational Schwarzian derivatives.

pub mod analysis;
pub mod elliptic;
pub mod error;
pub mod gear_geometry;
pub mod geometry;
pub mod mapping;
pub mod ode;
mod poly;
pub mod quadrature;
pub mod schwarzian;

pub use error::{GearError, Result};
pub use gear_geometry::{Classification, GearParams, PregearDescription};
pub use geometry::{GeneralizedCircle, Mobius};
pub use mapping::{MapSolution, SolverConfig};
pub use schwarzian::{PreverticesPair, RationalSchwarzian, SymmetricParams};
