#![allow(clippy::needless_range_loop)]

pub mod chains;
pub mod cohomology;
pub mod complex;
pub mod deform;
pub mod embed;
pub mod error;
pub mod fixtures;
pub mod flat_norm;
pub mod geometry;
pub mod limits;
pub mod linalg;
pub mod lp;
pub mod modp;
pub mod polytope;
pub mod rational;
pub mod snf;
pub mod steenrod;

pub use error::{Error, Result};
