//! Sparse Gröbner bases over semigroup algebras of polytopes and a
//! multihomogeneous Macaulay-matrix solver.

pub mod error;
pub mod fglm;
pub mod field;
pub mod io;
pub mod m2;
pub mod macaulay;
pub mod multihom;
pub mod oracle;
pub mod orders;
pub mod poly;
pub mod semigroup;
pub mod validation;

pub use error::{Error, Result};
