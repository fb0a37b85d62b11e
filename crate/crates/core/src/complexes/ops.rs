use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use super::map::degree_window;
use super::system::{boundary_equations, Layout, System};
use super::{ChainMap, Complex, ComplexError, Homotopy, Ring};
use crate::lattice::{modp, snf, FgAbelianGroup, IntMatrix};

/// Mapping cone with its structure maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub complex: Complex,
    /// `Y -> cone`, `(1; 0)`.
    pub inclusion: ChainMap,
    /// `cone -> X[1]`, `(0 1)`.
    pub projection: ChainMap,
}

/// `cone^i = Y^i + X^{i+1}` with differential `[[d_Y, f], [0, -d_X]]`.
pub fn cone(f: &ChainMap) -> Cone {
    let (x, y) = (f.source(), f.target());
    let degs = degree_window(&[x, y]);
    let ranks: Vec<(i64, usize)> = degs.iter().map(|&i| (i, y.rank(i) + x.rank(i + 1))).collect();
    let diffs: Vec<(i64, IntMatrix)> = degs
        .iter()
        .map(|&i| {
            let d = IntMatrix::block2(
                &y.differential(i),
                &f.component(i + 1),
                &IntMatrix::zeros(x.rank(i + 2), y.rank(i)),
                &-&x.differential(i + 1),
            );
            (i, d)
        })
        .collect();
    let c = Complex::new_unchecked(x.ring().clone(), ranks, diffs).expect("cone shapes");
    let xs = x.shift(1);
    let inc: Vec<(i64, IntMatrix)> = y
        .degrees()
        .map(|(i, r)| (i, IntMatrix::vstack(&IntMatrix::identity(r), &IntMatrix::zeros(x.rank(i + 1), r))))
        .collect();
    let proj: Vec<(i64, IntMatrix)> = xs
        .degrees()
        .map(|(i, r)| (i, IntMatrix::hstack(&IntMatrix::zeros(r, y.rank(i)), &IntMatrix::identity(r))))
        .collect();
    let inclusion = ChainMap::new_unchecked(y, &c, inc).expect("inclusion shapes");
    let projection = ChainMap::new_unchecked(&c, &xs, proj).expect("projection shapes");
    Cone { complex: c, inclusion, projection }
}

/// A verified homotopy `f ~ g`, if one exists over the ring.
pub fn homotopic(f: &ChainMap, g: &ChainMap) -> Result<Option<Homotopy>, ComplexError> {
    let diff = f.sub(g)?;
    let (s, t) = (f.source(), f.target());
    let hl = Layout::maps(s, t, -1, 0);
    let mut sys = System::new(hl.len());
    let eqs = boundary_equations(&mut sys, &hl, s, t);
    for (&i, &eq) in &eqs {
        sys.constant(eq, &diff.component(i), 1);
    }
    let Some(sol) = sys.solve(s.ring())? else {
        return Ok(None);
    };
    Homotopy::new(f, g, hl.unpack(&sol.particular)).map(Some)
}

/// Contracting homotopy `id ~ 0`, built degree by degree from the bottom.
///
/// At each degree `s^{i+1} d^i = 1 - d^{i-1} s^i` is solved; when the
/// complex is contractible every choice of earlier solutions extends, so
/// failure at any step proves non-contractibility.
pub fn is_contractible(c: &Complex) -> Result<Option<Homotopy>, ComplexError> {
    let id = ChainMap::identity(c);
    let zero = ChainMap::zero(c, c)?;
    let Some((lo, hi)) = c.support() else {
        return Ok(Some(Homotopy::zero(&id)));
    };
    let ring = c.ring();
    let mut s: BTreeMap<i64, IntMatrix> = BTreeMap::new();
    for i in lo..=hi {
        let n = c.rank(i);
        let prev = s.get(&i).cloned().unwrap_or_else(|| IntMatrix::zeros(c.rank(i - 1), n));
        let e = ring.normalize_matrix(&(&IntMatrix::identity(n) - &(&c.differential(i - 1) * &prev)));
        let m = c.rank(i + 1);
        if m == 0 {
            if e.is_zero() {
                continue;
            }
            return Ok(None);
        }
        // unknown S = s^{i+1} (n x m): S d^i = E
        let layout_block = super::system::Block { degree: i + 1, rows: n, cols: m, offset: 0 };
        let mut sys = System::new(n * m);
        let eq = sys.equation(n, n);
        sys.term(eq, &layout_block, None, Some(&c.differential(i)), 1);
        sys.constant(eq, &e, 1);
        let Some(sol) = sys.solve(ring)? else {
            return Ok(None);
        };
        let mat = IntMatrix::from_vec(n, m, sol.particular).expect("block size");
        s.insert(i + 1, ring.normalize_matrix(&mat));
    }
    Homotopy::new(&id, &zero, s).map(Some)
}

/// Certificate that a chain map is a homotopy equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub cone: Cone,
    pub contraction: Homotopy,
}

/// `f` is an equivalence iff its cone is contractible.
pub fn is_homotopy_equivalence(f: &ChainMap) -> Result<Option<EquivalenceWitness>, ComplexError> {
    let cn = cone(f);
    Ok(is_contractible(&cn.complex)?.map(|contraction| EquivalenceWitness { cone: cn, contraction }))
}

/// Witness-free equivalence test.
///
/// Over `Z` the cone is contractible iff it is exact. Over `Z/m` a bounded
/// free complex is contractible iff it is acyclic modulo every prime divisor
/// of `m` (contractibility is local, and over `Z/p^k` Nakayama reduces it to
/// the residue field).
pub fn is_equivalence_fast(f: &ChainMap) -> Result<bool, ComplexError> {
    let c = cone(f).complex;
    match c.ring() {
        Ring::Integers => Ok(homology(&c)?.values().all(FgAbelianGroup::is_trivial)),
        ring => Ok(ring.prime_divisors().into_iter().all(|p| is_acyclic_mod_p(&c, p))),
    }
}

/// Exactness of the reduction of `c` modulo the prime `p`.
pub fn is_acyclic_mod_p(c: &Complex, p: u64) -> bool {
    let rank_of = |i: i64| -> usize {
        let d = c.differential(i);
        if d.is_empty() {
            return 0;
        }
        let rows: Vec<modp::Row> = (0..d.rows()).map(|r| modp::lift_vec(d.row(r), p)).collect();
        modp::rank(&rows, d.cols(), p)
    };
    c.degrees().all(|(i, n)| rank_of(i) + rank_of(i - 1) == n)
}

/// Cohomology groups over `Z`; degrees with trivial cohomology are included
/// for every degree in the support.
pub fn homology(c: &Complex) -> Result<BTreeMap<i64, FgAbelianGroup>, ComplexError> {
    if *c.ring() != Ring::Integers {
        return Err(ComplexError::Ring(format!("homology is computed over Z only, got {}", c.ring())));
    }
    let mut out = BTreeMap::new();
    for (i, n) in c.degrees() {
        let out_rank = snf(&c.differential(i)).rank();
        let inv = snf(&c.differential(i - 1)).invariant_factors();
        let image_rank = inv.len();
        let torsion: Vec<BigInt> = inv.into_iter().filter(|d| !d.is_one()).collect();
        out.insert(i, FgAbelianGroup { free_rank: n - out_rank - image_rank, invariant_factors: torsion });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Ring {
        Ring::Integers
    }

    fn single(d: i64) -> Complex {
        Complex::new(z(), [(0, 1), (1, 1)], [(0, IntMatrix::from_i64(&[&[d]]))]).unwrap()
    }

    #[test]
    fn cone_of_identity_is_contractible() {
        let x = Complex::concentrated(z(), 0, 1);
        let c = cone(&ChainMap::identity(&x));
        assert_eq!(c.complex, Complex::new(z(), [(-1, 1), (0, 1)], [(-1, IntMatrix::identity(1))]).unwrap());
        assert!(is_contractible(&c.complex).unwrap().is_some());
        assert!(c.projection.compose(&c.inclusion).unwrap().is_zero());
    }

    #[test]
    fn cone_of_lemma_map() {
        let a2 = 9;
        let x = Complex::new(z(), [(1, 1), (2, 1)], [(1, IntMatrix::from_i64(&[&[-a2]]))]).unwrap();
        let y = Complex::concentrated(z(), 1, 1);
        let b = 5;
        let f = ChainMap::new(&x, &y, [(1, IntMatrix::from_i64(&[&[b]]))]).unwrap();
        let c = cone(&f).complex;
        let want = Complex::new(z(), [(0, 1), (1, 2)], [(0, IntMatrix::from_i64(&[&[b], &[a2]]))]).unwrap();
        assert_eq!(c, want);
    }

    #[test]
    fn cone_of_zero_splits() {
        let x = Complex::concentrated(z(), 0, 1);
        let c = cone(&ChainMap::zero(&x, &x).unwrap()).complex;
        assert_eq!(c, x.direct_sum(&x.shift(1)).unwrap());
        assert!(is_contractible(&c).unwrap().is_none());
    }

    #[test]
    fn homotopic_examples() {
        let x = Complex::concentrated(z(), 0, 1);
        let id = ChainMap::identity(&x);
        assert!(homotopic(&id, &id).unwrap().is_some());
        assert!(homotopic(&id, &ChainMap::zero(&x, &x).unwrap()).unwrap().is_none());
    }

    #[test]
    fn homology_examples() {
        let h = homology(&Complex::concentrated(z(), 3, 1)).unwrap();
        assert_eq!(h[&3], FgAbelianGroup::free(1));
        let h = homology(&single(9)).unwrap();
        assert!(h[&0].is_trivial());
        assert_eq!(h[&1].to_string(), "Z/9");
        let x = Complex::concentrated(z(), 0, 2);
        let h = homology(&cone(&ChainMap::identity(&x)).complex).unwrap();
        assert!(h.values().all(FgAbelianGroup::is_trivial));
    }

    #[test]
    fn contractibility_over_residue_rings() {
        // [Z/9 --3--> Z/9] is acyclic mod nothing: not contractible
        let c = single(3).reduce_mod(&BigInt::from(9)).unwrap();
        assert!(is_contractible(&c).unwrap().is_none());
        assert!(!is_acyclic_mod_p(&c, 3));
        // [Z/6 --5--> Z/6] is contractible
        let c = single(5).reduce_mod(&BigInt::from(6)).unwrap();
        assert!(is_contractible(&c).unwrap().is_some());
        assert!(is_acyclic_mod_p(&c, 2) && is_acyclic_mod_p(&c, 3));
    }

    #[test]
    fn equivalence_tests_agree() {
        let x = single(9);
        let two = ChainMap::new(&x, &x, [(0, IntMatrix::scalar(1, 2)), (1, IntMatrix::scalar(1, 2))]).unwrap();
        assert!(is_homotopy_equivalence(&two).unwrap().is_some());
        assert!(is_equivalence_fast(&two).unwrap());
        let three = two.add(&ChainMap::identity(&x)).unwrap();
        assert!(is_homotopy_equivalence(&three).unwrap().is_none());
        assert!(!is_equivalence_fast(&three).unwrap());
    }
}
