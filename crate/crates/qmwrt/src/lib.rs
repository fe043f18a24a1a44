//! Exact Witten–Reshetikhin–Turaev invariants of Seifert fibered rational
//! homology spheres, false theta functions, and executable checks of their
//! quantum modular behaviour.

pub mod cli;
pub mod cyclotomic;
pub mod error;
pub mod false_theta;
pub mod gauss_sums;
pub mod matrix;
pub mod number_theory;
pub mod qmod;
pub mod seifert;
pub mod wrt;

pub use error::{Error, Result};
