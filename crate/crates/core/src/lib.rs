//! Algebras on three imaginary units with scalar anticommutators, their real
//! representations, and the geometry of triangles of complex structures they describe.

pub mod error;
pub mod fibers;
pub mod hcore;
pub mod linalg;
pub mod periods;
pub mod rational;
pub mod repio;
pub mod reps;
pub mod scalar;
pub mod selftest;
pub mod sigforms;

pub use error::{Error, Result};
pub use hcore::{AlgebraParams, Basis, HElement, StructureTable};
pub use linalg::{Mat, Signature};
pub use scalar::{Rational, Scalar, ScalarMode};
