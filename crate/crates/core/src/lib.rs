//! Minimal sections in the homogeneous spaces E(κ+4H², H), their boundary
//! contours, a discrete Plateau solver and curve-level sister audits.

pub mod base;
pub mod chart;
pub mod contours;
pub mod curve;
pub mod diagnostics;
pub mod error;
pub mod extend;
pub mod io;
pub mod isometry;
pub mod ladder;
pub mod mesh;
pub mod metric;
pub mod patch;
pub mod plateau;
pub mod polygon;
pub mod quadrature;
pub mod reference;
pub mod sister;
pub mod solver;
pub mod space;

pub use error::{Error, Result};
pub use space::{Model, ModelPoint, SpaceParams};
