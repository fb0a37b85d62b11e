//! Exact integer linear algebra: Smith form, linear solving over `Z` and
//! `Z/m`, abelian group presentations and finite coset enumeration.

mod coset;
mod group;
mod linear;
mod matrix;
pub mod modp;
mod snf;

pub use coset::{modular_solution_coset, AffineCoset, CosetIter, Overflow};
pub use group::{cokernel, FgAbelianGroup};
pub use linear::{insolubility_modulus, lattice_basis, solve_linear, LinearSolution};
pub use matrix::IntMatrix;
pub use snf::{snf, SmithDecomposition};

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("modulus must be at least 2, got {0}")]
    Modulus(BigInt),
}
