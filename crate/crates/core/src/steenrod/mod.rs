//! Steenrod reduced powers from an explicit equivariant diagonal.

pub mod w;
pub mod ops;
pub mod phi;
