//! Linearization of torus actions on free associative algebras.

pub mod algebra;
pub mod cli;
pub mod differentials;
pub mod endomorphism;
pub mod error;
pub mod generic;
mod groebner;
pub mod json;
pub mod lift2;
pub mod linalg;
pub mod parse;
pub mod rees;
pub mod torus;
mod uni;

pub use error::{Error, Result};
