//! Exact-arithmetic toolkit for reflective hyperbolic lattices of rank 4.
//!
//! The library classifies integral quadratic lattices of signature (3,1) by
//! reflectivity: candidate Gram matrices are generated from a finite case
//! table, filtered by p-adic anisotropy, extended to maximal lattices, and
//! each maximal lattice is run through Vinberg's algorithm.  The resulting
//! Coxeter polyhedron is tested for finite volume and the group generated by
//! reflections of norm outside {1,2} is tested for finiteness.
//!
//! All arithmetic is exact: `BigInt` for lattice data, `BigRational` for
//! derived quantities.  No floating point is used anywhere.

pub mod coxeter;
pub mod enumeration;
pub mod error;
pub mod geom;
pub mod io;
pub mod lattice;
pub mod local;
mod mat;
pub mod pipeline;
pub mod vinberg;

pub use error::Error;
pub use geom::{FacetRelation, LatticeVector, Root};
pub use lattice::{InvariantFactors, QuadraticLattice, Signature};
pub use local::{DiagonalForm, Prime};
pub use vinberg::{RunStatus, VinbergConfig, VinbergRun};
