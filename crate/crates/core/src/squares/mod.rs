//! Commutative squares in the homotopy category, the homotopy-cartesian
//! decision and the vertical-isomorphism fit.

mod search;

pub use search::{
    find_compatible_equivalence, modular_check, Constraint, ModularOutcome, Problem, Refutation, RefutationRoute,
    SearchConfig, UnknownRecord, Verdict, YesWitness,
};

use serde_json::{json, Value};

use crate::complexes::{cone, homotopic, ChainMap, Complex, ComplexError, Homotopy};
use crate::io::{self, Env, IoError};
use crate::lattice::IntMatrix;
use crate::triangles::{Triangle, TriangleError};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SquareError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("square does not commute up to homotopy")]
    NotCommutative,
    #[error("b and c do not occupy matching positions in their triangles")]
    PositionMismatch,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Triangle(#[from] TriangleError),
    #[error(transparent)]
    Lattice(#[from] crate::lattice::LatticeError),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// ```text
///   B --g--> C
///   |b       |c
///   B' -g'-> C'
/// ```
/// with a stored homotopy `c g ~ g' b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutativeSquare {
    pub g: ChainMap,
    pub gp: ChainMap,
    pub b: ChainMap,
    pub c: ChainMap,
    pub homotopy: Homotopy,
}

impl CommutativeSquare {
    fn check_shapes(g: &ChainMap, gp: &ChainMap, b: &ChainMap, c: &ChainMap) -> Result<(), SquareError> {
        let ok = g.source() == b.source() && g.target() == c.source() && b.target() == gp.source() && gp.target() == c.target();
        if !ok {
            return Err(SquareError::Shape("square maps do not fit together".into()));
        }
        Ok(())
    }

    /// Builds a square, solving for the commuting homotopy.
    pub fn new(g: ChainMap, gp: ChainMap, b: ChainMap, c: ChainMap) -> Result<Self, SquareError> {
        Self::check_shapes(&g, &gp, &b, &c)?;
        let homotopy = homotopic(&c.compose(&g)?, &gp.compose(&b)?)?.ok_or(SquareError::NotCommutative)?;
        Ok(Self { g, gp, b, c, homotopy })
    }

    /// Builds a square with a given homotopy `c g ~ g' b` (checked).
    pub fn with_homotopy(
        g: ChainMap,
        gp: ChainMap,
        b: ChainMap,
        c: ChainMap,
        comps: impl IntoIterator<Item = (i64, IntMatrix)>,
    ) -> Result<Self, SquareError> {
        Self::check_shapes(&g, &gp, &b, &c)?;
        let homotopy = Homotopy::new(&c.compose(&g)?, &gp.compose(&b)?, comps)?;
        Ok(Self { g, gp, b, c, homotopy })
    }

    pub fn b_obj(&self) -> &Complex {
        self.g.source()
    }

    pub fn c_obj(&self) -> &Complex {
        self.g.target()
    }

    pub fn bp_obj(&self) -> &Complex {
        self.gp.source()
    }

    pub fn cp_obj(&self) -> &Complex {
        self.gp.target()
    }

    pub fn commutes_strictly(&self) -> Result<bool, SquareError> {
        Ok(self.c.compose(&self.g)? == self.gp.compose(&self.b)?)
    }

    pub fn diagonal(&self) -> Result<DiagonalSequence, SquareError> {
        let (b, c, bp, cp) = (self.b_obj(), self.c_obj(), self.bp_obj(), self.cp_obj());
        let mid = bp.direct_sum(c)?;
        let first = ChainMap::new(
            b,
            &mid,
            b.degrees().map(|(i, _)| (i, IntMatrix::vstack(&self.b.component(i), &self.g.component(i)))),
        )?;
        let second = ChainMap::new(
            &mid,
            cp,
            mid.degrees().map(|(i, _)| (i, IntMatrix::hstack(&self.gp.component(i), &-&self.c.component(i)))),
        )?;
        let comp = second.compose(&first)?;
        let zero = ChainMap::zero(b, cp)?;
        let null = Homotopy::new(&comp, &zero, self.homotopy.components().map(|(i, m)| (i, -m)))?;
        Ok(DiagonalSequence { first, second, null })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "B": io::complex_to_json(self.b_obj()),
            "C": io::complex_to_json(self.c_obj()),
            "Bp": io::complex_to_json(self.bp_obj()),
            "Cp": io::complex_to_json(self.cp_obj()),
            "g": io::chain_map_to_json(&self.g),
            "gp": io::chain_map_to_json(&self.gp),
            "b": io::chain_map_to_json(&self.b),
            "c": io::chain_map_to_json(&self.c),
            "homotopy": io::homotopy_to_json(&self.homotopy),
        })
    }

    pub fn from_json(v: &Value, env: &Env) -> Result<Self, IoError> {
        let bo = io::complex_field(v, "B", env)?;
        let co = io::complex_field(v, "C", env)?;
        let bp = io::complex_field(v, "Bp", env)?;
        let cp = io::complex_field(v, "Cp", env)?;
        let g = io::map_field(v, "g", &bo, &co, env)?;
        let gp = io::map_field(v, "gp", &bp, &cp, env)?;
        let b = io::map_field(v, "b", &bo, &bp, env)?;
        let c = io::map_field(v, "c", &co, &cp, env)?;
        let sq = match v.get("homotopy") {
            Some(h) => {
                let lhs = c.compose(&g).map_err(IoError::Complex)?;
                let rhs = gp.compose(&b).map_err(IoError::Complex)?;
                let h = io::homotopy_from_json(h, &lhs, &rhs, env)?;
                CommutativeSquare { g, gp, b, c, homotopy: h }
            }
            None => CommutativeSquare::new(g, gp, b, c).map_err(|e| IoError::Format(e.to_string()))?,
        };
        Ok(sq)
    }
}

/// `B --(b; g)--> B' + C --(g', -c)--> C'` with a null-homotopy of the
/// composite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalSequence {
    pub first: ChainMap,
    pub second: ChainMap,
    pub null: Homotopy,
}

/// The cone-functoriality map `cone(b; g) -> C'`, `(g', -c, -W)` with `W`
/// the commuting homotopy. It restricts to `(g', -c)` on `B' + C` strictly.
pub fn functorial_candidate(sq: &CommutativeSquare) -> Result<ChainMap, SquareError> {
    let diag = sq.diagonal()?;
    let cn = cone(&diag.first);
    let comps: Vec<(i64, IntMatrix)> = cn
        .complex
        .degrees()
        .map(|(i, _)| (i, IntMatrix::hstack(&diag.second.component(i), &-&sq.homotopy.component(i + 1))))
        .collect();
    Ok(ChainMap::new(&cn.complex, sq.cp_obj(), comps)?)
}

/// Is the diagonal sequence part of a distinguished triangle? Decided as:
/// is there an equivalence `cone(b; g) -> C'` restricting to `(g', -c)` up
/// to homotopy.
pub fn is_homotopy_cartesian(sq: &CommutativeSquare, config: &SearchConfig) -> Result<Verdict, SquareError> {
    let diag = sq.diagonal()?;
    let cn = cone(&diag.first);
    let problem = Problem::new(
        &cn.complex,
        sq.cp_obj(),
        vec![Constraint::Pre { with: cn.inclusion.clone(), required: diag.second.clone() }],
    )?;
    let cand = functorial_candidate(sq)?;
    search::search(&problem, &[cand], config)
}

/// Independent re-check of a cartesianness witness: `phi: cone(b; g) -> C'`
/// is an equivalence and `phi o inclusion ~ (g', -c)`.
pub fn check_cartesian_witness(sq: &CommutativeSquare, phi: &ChainMap) -> Result<bool, SquareError> {
    let diag = sq.diagonal()?;
    let cn = cone(&diag.first);
    if *phi.source() != cn.complex || phi.target() != sq.cp_obj() {
        return Ok(false);
    }
    Ok(crate::complexes::is_homotopy_equivalence(phi)?.is_some()
        && homotopic(&phi.compose(&cn.inclusion)?, &diag.second)?.is_some())
}

/// Position (1, 2 or 3) of `b` in `t_b` and `c` in `t_c`.
pub fn matching_position(sq: &CommutativeSquare, t_b: &Triangle, t_c: &Triangle) -> Option<usize> {
    let mb = [&t_b.f, &t_b.g, &t_b.h];
    let mc = [&t_c.f, &t_c.g, &t_c.h];
    (0..3).find(|&k| *mb[k] == sq.b && *mc[k] == sq.c).map(|k| k + 1)
}

/// Can the square's `(g, g')` be completed by an isomorphism on the third
/// objects to a morphism from `t_b` to `t_c`?
pub fn fits_vertical_iso(
    sq: &CommutativeSquare,
    t_b: &Triangle,
    t_c: &Triangle,
    config: &SearchConfig,
) -> Result<Verdict, SquareError> {
    let pos = matching_position(sq, t_b, t_c).ok_or(SquareError::PositionMismatch)?;
    fit_problem(sq, t_b, t_c, pos).and_then(|p| search::search(&p, &[], config))
}

/// The constrained problem for `fits_vertical_iso` with `b`, `c` in the
/// given position.
pub fn fit_problem(sq: &CommutativeSquare, t_b: &Triangle, t_c: &Triangle, pos: usize) -> Result<Problem, SquareError> {
    let (g, gp) = (&sq.g, &sq.gp);
    match pos {
        // (B, B', O; b, g_b, h_b) -> (C, C', O'; c, g_c, h_c) via (g, g', phi)
        1 => Problem::new(
            t_b.z(),
            t_c.z(),
            vec![
                Constraint::Pre { with: t_b.g.clone(), required: t_c.g.compose(gp)? },
                Constraint::Post { with: t_c.h.clone(), required: g.shift(1).compose(&t_b.h)? },
            ],
        ),
        // (O, B, B'; f_b, b, h_b) -> (O', C, C'; f_c, c, h_c) via (phi, g, g')
        2 => Problem::new(
            t_b.x(),
            t_c.x(),
            vec![
                Constraint::Post { with: t_c.f.clone(), required: g.compose(&t_b.f)? },
                Constraint::Pre { with: t_b.h.shift(-1), required: t_c.h.compose(gp)?.shift(-1) },
            ],
        ),
        // (X, O, B; f_b, g_b, b) -> (X', O', C; f_c, g_c, c) via (g'[-1], phi, g)
        3 => Problem::new(
            t_b.y(),
            t_c.y(),
            vec![
                Constraint::Pre { with: t_b.f.clone(), required: t_c.f.compose(&gp.shift(-1))? },
                Constraint::Post { with: t_c.g.clone(), required: g.compose(&t_b.g)? },
            ],
        ),
        _ => Err(SquareError::PositionMismatch),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::Ring;
    use crate::triangles::standard_triangle;

    fn z() -> Ring {
        Ring::Integers
    }

    #[test]
    fn diagonal_blocks() {
        let x = Complex::concentrated(z(), 0, 1);
        let id = ChainMap::identity(&x);
        let b = id.scale(&5.into());
        let sq = CommutativeSquare::new(id.clone(), id.clone(), b.clone(), b).unwrap();
        let d = sq.diagonal().unwrap();
        assert_eq!(d.first.component(0), IntMatrix::from_i64(&[&[5], &[1]]));
        assert_eq!(d.second.component(0), IntMatrix::from_i64(&[&[1, -5]]));
    }

    #[test]
    fn cone_square_is_cartesian_with_identity() {
        // B = [Z^1] -> B' = [Z --3--> Z], C = [Z]; C' := cone(b; g)
        let bo = Complex::concentrated(z(), 1, 1);
        let bp = Complex::new(z(), [(0, 1), (1, 1)], [(0, IntMatrix::from_i64(&[&[3]]))]).unwrap();
        let co = Complex::concentrated(z(), 1, 2);
        let b = ChainMap::new(&bo, &bp, [(1, IntMatrix::from_i64(&[&[2]]))]).unwrap();
        let g = ChainMap::new(&bo, &co, [(1, IntMatrix::from_i64(&[&[1], &[4]]))]).unwrap();
        let mid = bp.direct_sum(&co).unwrap();
        let first = ChainMap::new(
            &bo,
            &mid,
            [(1, IntMatrix::vstack(&b.component(1), &g.component(1)))],
        )
        .unwrap();
        let cn = cone(&first);
        let iota = cn.inclusion;
        let gp = ChainMap::new(&bp, &cn.complex, bp.degrees().map(|(i, r)| {
            let m = iota.component(i);
            (i, m.submatrix(0, 0, m.rows(), r))
        }))
        .unwrap();
        let c = ChainMap::new(&co, &cn.complex, co.degrees().map(|(i, r)| {
            let m = iota.component(i);
            (i, -&m.submatrix(0, bp.rank(i), m.rows(), r))
        }))
        .unwrap();
        // canonical homotopy: the B-coordinate of the cone
        let w: Vec<(i64, IntMatrix)> = bo
            .degrees()
            .map(|(i, r)| {
                let rows = cn.complex.rank(i - 1);
                let mut m = IntMatrix::zeros(rows, r);
                for k in 0..r {
                    m.set(rows - r + k, k, (-1).into());
                }
                (i, m)
            })
            .collect();
        let sq = CommutativeSquare::with_homotopy(g, gp, b, c, w).unwrap();
        assert_eq!(functorial_candidate(&sq).unwrap(), ChainMap::identity(&cn.complex));
        match is_homotopy_cartesian(&sq, &SearchConfig::default()).unwrap() {
            Verdict::Yes(w) => assert_eq!(w.phi, ChainMap::identity(&cn.complex)),
            v => panic!("expected yes, got {v:?}"),
        }
    }

    #[test]
    fn identity_fit() {
        let x = Complex::new(z(), [(0, 1), (1, 1)], [(0, IntMatrix::from_i64(&[&[4]]))]).unwrap();
        let y = Complex::concentrated(z(), 0, 1);
        let b = ChainMap::new(&x, &y, [(0, IntMatrix::from_i64(&[&[1]]))]).unwrap();
        let t = standard_triangle(&b);
        let sq = CommutativeSquare::new(ChainMap::identity(&x), ChainMap::identity(&y), b.clone(), b).unwrap();
        let v = fits_vertical_iso(&sq, &t, &t, &SearchConfig::default()).unwrap();
        assert!(v.is_yes());
    }

    #[test]
    fn empty_constraints_identity() {
        let x = Complex::new(z(), [(0, 1), (1, 1)], [(0, IntMatrix::from_i64(&[&[4]]))]).unwrap();
        let v = find_compatible_equivalence(&x, &x, vec![], &SearchConfig::default()).unwrap();
        match v {
            Verdict::Yes(w) => assert_eq!(w.phi, ChainMap::identity(&x)),
            v => panic!("expected yes, got {v:?}"),
        }
    }

    #[test]
    fn insoluble_constraint_is_refuted() {
        // phi: [Z] -> [Z] with phi o 3 ~ 1 is impossible; mod 3 certifies
        let x = Complex::concentrated(z(), 0, 1);
        let id = ChainMap::identity(&x);
        let three = id.scale(&3.into());
        let v = find_compatible_equivalence(&x, &x, vec![Constraint::Pre { with: three, required: id }], &SearchConfig::default())
            .unwrap();
        assert_eq!(v.modulus(), Some(&3.into()));
    }
}
