//! Deformed elliptic Ruijsenaars difference operators.
//!
//! The crate builds the operators `H_{m,r}^{(k)}` together with the companion
//! families `Ĥ`, `D`, `D̂`, their multiplicative forms, and checks the identities
//! they satisfy (commutativity, Wronski relations, kernel functions, source
//! identities, algebraic independence, Poincaré relations) numerically at
//! random generic points.

pub mod cli;
pub mod error;
pub mod identities;
pub mod independence;
pub mod operators;
pub mod physics;
pub mod shiftalg;
pub mod specialfn;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
