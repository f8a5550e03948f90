//! Exact-arithmetic toolkit for blocks of Category O of rational Cherednik
//! algebras: decomposition matrices, graded characters, supports, defect-one
//! blocks, induction/restriction on Grothendieck groups and a constraint
//! solver that completes partially known decomposition matrices.

// Matrix code reads best with explicit row and column indices.
#![allow(clippy::needless_range_loop)]

pub mod cato;
pub mod charpoly;
pub mod defect1;
pub mod error;
pub mod functors;
pub mod rational;
pub mod repdata;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
