//! Exact combinatorial engine for configuration spaces of global quotient
//! orbifolds.
//!
//! The crate builds finite simplicial and cellular models for unordered and
//! ordered configuration spaces of a quotient X = M/G, computes their
//! homology with exact integer and rational arithmetic, and checks the
//! structural identities these spaces satisfy: stabilisation, transfer
//! relations, twisted duality, and Euler characteristic additivity over the
//! singular strata.

pub mod chain;
pub mod comma;
pub mod config;
pub mod duality;
pub mod equivariant;
pub mod error;
pub mod groups;
pub mod linalg;
pub mod maps;
pub mod orbifold;
pub mod poset;
pub mod simplicial;
pub mod strata;

pub use error::{Error, Result};
