//! Shifts of finite type over finitely generated groups.
//!
//! The crate works with four group backends that all have an exact word
//! problem (free abelian, free, finite, discrete Heisenberg), finite-index
//! subgroups given by coset tables, and SFTs given by finite forbidden
//! pattern sets. On top of that it provides the pattern-set transformations
//! that recode an SFT across a subgroup or quotient (higher block shifts,
//! products, locked shifts, induced shifts, pullbacks) and searches for
//! periodic configurations whose results are returned as certificates that
//! can be re-verified independently of the search that produced them.

pub mod constructions;
pub mod coset;
pub mod error;
pub mod group;
pub mod hom;
pub mod lattice;
pub mod model;
pub mod report;
pub mod shift;
pub mod solvers;

pub use error::{Error, Result};
pub use group::{GroupContext, GroupElement};
