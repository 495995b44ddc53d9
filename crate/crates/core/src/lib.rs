//! Sheaves on the projective plane: exact Chern-character arithmetic,
//! exceptional bundles, Gaeta resolutions, cone edges of Hilbert schemes
//! of points, and finite-field cohomology checks.

pub mod chern;
pub mod cones;
pub mod error;
pub mod exceptional;
pub mod gaeta;
pub mod gradecoh;
pub mod quadratic;
pub mod rational;

pub use chern::{ChernCharacter, LogChern};
pub use error::{Error, Result};
pub use quadratic::QuadraticExt;
pub use rational::Rational;
