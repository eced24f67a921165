//! Internal equilibria of random d-player n-strategy evolutionary games.
//!
//! The equilibria of an asymmetric game with independent payoff differences
//! are the positive roots of a Kostlan-Shub-Smale random polynomial system.
//! This crate builds those systems from payoff tensors, samples them, counts
//! their positive roots exactly, and runs the Monte Carlo and quadrature
//! experiments that check the resulting statistical laws.

pub mod error;
pub mod experiment;
pub mod game_model;
pub mod polysolve;
pub mod quadrature;
pub mod sampling;
pub mod statistics;

pub use error::{Error, Result};
