//! Exact-arithmetic engine for rational Cherednik algebras.
//!
//! The crate builds small complex reflection groups with explicit
//! irreducibles, realizes standard, simple and baby Verma modules as graded
//! block systems over cyclotomic fields, and computes Koszul-type Lie
//! algebra (co)homology and Dirac cohomology as exact group-module
//! decompositions, together with the structural identities that tie them
//! together (Hodge decompositions, Casselman-Osborne compatibility, and
//! Calogero-Moser cell partitions at t = 0).

pub mod cells;
pub mod clifford;
pub mod cohomology;
pub mod error;
pub mod groups;
pub mod linalg;
pub mod modules;
pub mod scalars;
pub mod vogan;

pub use error::{Error, Result};
pub use linalg::{ExactMatrix, Subspace};
pub use scalars::{CycScalar, Rat, Sign, SqrtConvention};
