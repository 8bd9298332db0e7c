//! Type inference for lambda terms in propositional elementary affine
//! logic without sharing, by reduction to exact rational linear
//! programming.
//!
//! The pipeline: principal simple typing, parameter decoration of the term
//! and its assignment, linear constraint generation, exact feasibility
//! over the rationals, integer scaling, instantiation to a box-decorated
//! pseudo-term, and full re-verification including a machine-checked
//! derivation.

pub mod constraints;
pub mod decorate;
pub mod derivation;
pub mod pipeline;
pub mod pseudo;
pub mod schemes;
pub mod simple;
pub mod solver;
pub mod syntax;
