//! Word-level decision procedures for free groups and the infinite dihedral
//! group, Scott sentences as computable infinitary formulas with complexity
//! classification, descriptors for finitely generated abelian groups and
//! subgroups of the rationals, and stage-driven simulators for index-set
//! hardness constructions.

pub mod arith;
pub mod cli;
pub mod dihedral;
pub mod error;
pub mod fgab;
pub mod formula;
pub mod limitsim;
pub mod rank1;
pub mod selftest;
pub mod words;

pub use error::{Error, Result};
