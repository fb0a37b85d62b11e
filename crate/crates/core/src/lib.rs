//! Exact verification of homotopy-cartesian squares in the homotopy
//! category of bounded complexes of free modules over `Z`, `Z/m` and `F_p`.
//!
//! The crate is layered bottom-up:
//!
//! * [`lattice`]: integer matrices, Smith normal form, solving over `Z`
//!   and `Z/m`, finite coset enumeration.
//! * [`complexes`]: complexes, chain maps, cones, homotopy decisions,
//!   homology and Hom groups in the homotopy category.
//! * [`triangles`]: standard triangles, rotation, witnessed
//!   distinguishedness, triangle morphisms.
//! * [`squares`]: the homotopy-cartesian decision procedure and the
//!   vertical-isomorphism fit, both returning a [`squares::Verdict`].
//! * [`unit_lemma`]: units of the form `1 + e + a e^2` in finite algebras,
//!   residue rings and `Z`.
//! * [`paper`]: the worked counterexample datasets, report generation,
//!   the proof replay and the diagram fuzzer.

pub mod complexes;
pub mod io;
pub mod lattice;
pub mod paper;
pub mod squares;
pub mod triangles;
pub mod unit_lemma;
