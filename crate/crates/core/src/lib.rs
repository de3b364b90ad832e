//! Bredon–Illman cohomology with equivariant local coefficients over `Z/p`
//! for one-vertex G-simplicial sets, its cup product, and Steenrod reduced
//! power operations built from an effective acyclic-models construction.

#![allow(clippy::needless_range_loop)]

pub mod bredon;
pub mod chains;
pub mod cover;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod orbit;
pub mod selftest;
pub mod simplex;
pub mod sparse;
pub mod steenrod;
pub mod suites;

pub use error::{Error, Result};
