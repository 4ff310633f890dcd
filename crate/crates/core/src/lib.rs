//! Two-elliptic coordinates: separated angular and radial equations, the
//! Bloch discriminant of the piecewise angular problem, characteristic curves
//! (stability charts) and stitched angular eigenfunctions.

mod dop853;
pub mod discriminant;
pub mod eigenfun;
pub mod error;
pub mod export;
pub mod geometry;
pub mod hill;
pub mod ode;
pub mod oracle;
pub mod quadrature;
mod roots;
pub mod spectrum;

pub use error::{Error, Result};
