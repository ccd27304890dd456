//! Exact decision procedures for purity, 2-purity and n-purity of submodules
//! of finitely generated modules over `Z` and `Z/mZ`.
//!
//! The lattice engine ([`lattice`]) stores every submodule in canonical HNF so
//! that submodule equality is basis equality. [`purity`] builds the predicates
//! on top of it, and [`oracle`] recomputes them from explicit element sets
//! along a path that shares no lattice code.

pub mod enumerate;
pub mod lattice;
pub mod matrix;
pub mod module;
pub mod oracle;
pub mod purity;
pub mod ring;
pub mod scan;

pub use lattice::{hnf, lattice_contains, lattice_intersect, lattice_sum, snf, LatticeBasis, LatticeError};
pub use matrix::ExactMatrix;
pub use module::{
    Cardinality, Localization, ModuleElement, ModuleError, ModulePresentation, Submodule, DEFAULT_ELEMENT_BUDGET,
};
pub use ring::{proper_ideals, Ideal, Modulus, QuantificationPolicy, Ring, RingError};
