//! Exact chain complexes for finite covers of tori and nilmanifolds,
//! chain-level rebuildings with measured quality, and torsion bounds.

pub mod chain;
pub mod circle;
pub mod cli;
pub mod exact_linalg;
pub mod farber;
pub mod nilpotent;
pub mod rebuild;
pub mod stack;
pub mod text;

pub use chain::{ChainComplex, ChainError, GradedMap};
pub use exact_linalg::{Caps, IntMatrix, LinalgError};
pub use rebuild::{Rebuilding, RebuildError};
