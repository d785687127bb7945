//! Deep discriminant analysis for binary segmentation.
//!
//! This crate trains small networks to project inputs into a sigmoid-bounded
//! space where the two classes separate, using Fisher-criterion style losses
//! (`losses`), batch class statistics with exact gradients (`stats`), a
//! closed-form linear discriminant baseline (`lda`), threshold search and
//! confusion metrics (`eval`), synthetic data generation and PNM image I/O
//! (`data`), and a deterministic training loop with a lambda sweep
//! (`trainer`). Finite-difference verification of every analytic gradient
//! lives in `gradcheck`.

pub mod data;
pub mod error;
pub mod eval;
pub mod gradcheck;
pub mod lda;
pub mod losses;
pub mod matrix;
pub mod network;
pub mod rng;
pub mod stats;
pub mod trainer;

pub use error::{DdaError, Result};
