//! Numerical laboratory for Kempf distortion functions, TYCZ expansions and
//! related invariants of radial and Reinhardt Kähler metrics.

pub mod error;
pub mod acceptance;
pub mod bergman;
pub mod expr;
pub mod geometry;
pub mod potentials;
pub mod projectivity;
pub mod psi;
pub mod quad;
pub mod series;
pub mod special;
pub mod szego;

pub use error::{Error, Result};
