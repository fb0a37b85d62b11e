//! Bounded complexes of free modules over `Z`, `Z/m` and `F_p`, and the
//! homotopy-category operations on them.

mod complex;
mod hom;
mod map;
mod ops;
mod ring;
pub(crate) mod system;

pub use complex::Complex;
pub use hom::{hom_group, HomGroupPresentation};
pub use map::{ChainMap, Homotopy};
pub use ops::{
    cone, homology, homotopic, is_acyclic_mod_p, is_contractible, is_equivalence_fast, is_homotopy_equivalence, Cone,
    EquivalenceWitness,
};
pub use ring::{is_prime, prime_divisors, Ring};

pub(crate) use hom::boundary_image;

use crate::lattice::LatticeError;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("d o d != 0 starting in degree {degree}")]
    NotAComplex { degree: i64 },
    #[error("chain condition fails in degree {degree}")]
    NotAChainMap { degree: i64 },
    #[error("homotopy witness equation fails in degree {degree}")]
    BadHomotopy { degree: i64 },
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("ring: {0}")]
    Ring(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}
