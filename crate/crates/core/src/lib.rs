//! Exact computations for predimension constructions on finite relational
//! structures: predimension, self-sufficient closure, dimension, the induced
//! pregeometries, and the structure-rewriting algorithms built on them.

pub mod closure;
pub mod embedding;
pub mod error;
pub mod exec;
pub mod genesis;
pub mod mincut;
pub mod pclass;
pub mod pregeom;
pub mod random;
pub mod signature;
pub mod structure;
pub mod suites;
pub mod text;
pub mod transforms;

#[cfg(test)]
pub(crate) mod test_fixtures;

pub use error::{Error, Result};
pub use embedding::EmbeddingMap;
pub use exec::Exec;
pub use pregeom::{IsoMode, Pregeometry};
pub use signature::{Signature, Symbol};
pub use structure::{Point, RelStructure, Subset};

/// Default cap on universes that need exhaustive subset enumeration.
pub const DEFAULT_CAP: usize = 20;

/// The universe cap, honoring the `HRUSH_CAP` environment variable.
pub fn default_cap() -> usize {
    std::env::var("HRUSH_CAP").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_CAP)
}
