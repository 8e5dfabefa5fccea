//! Diagrammatic logics at desk scale.
//!
//! Logics are presented by finite limit sketches; specifications are finite
//! realizations; inference rules are fractions applied by pushout.

pub mod effects;
pub mod engine;
pub mod error;
pub mod fraction;
pub mod logic;
pub mod sketch;
pub mod syntax;

pub use error::{Error, Result};
