//! Sprouting constructions, motion plans and swept-area measurement for
//! moving a unit circular arc through small area.

pub mod area;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod horn;
pub mod lemmas;
pub mod motion;
pub mod render;
pub mod scalar;
pub mod sprouting;

pub use error::{KakeyaError, Result};
pub use scalar::{Precision, Scalar};
