//! Explicit GL(2) Voronoi summation with its local p-adic and archimedean
//! ingredients, plus numerical harnesses that evaluate both sides.
//!
//! Layout follows the dependency order: [`padic`] and [`characters`] at the
//! bottom, [`mellin`] and [`localdata`] for the local theory at finite places,
//! [`hankel`] for the archimedean kernels, [`newforms`] for coefficient tables,
//! and [`voronoi`] / [`depthlab`] on top. [`suite`] bundles the numbered
//! acceptance checks used by the CLI and the acceptance test target.

pub mod characters;
pub mod depthlab;
mod error;
pub mod hankel;
pub mod localdata;
pub mod mellin;
pub mod newforms;
pub mod padic;
pub mod report;
pub mod suite;
pub mod voronoi;

pub use error::{Error, Result};
pub use num_complex::Complex64;
