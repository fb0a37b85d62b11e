use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use super::modp::{self, Echelon};
use super::{lattice_basis, snf, IntMatrix, SmithDecomposition};

/// Set of vectors `particular + span(generators)` in `Z^n`, considered
/// modulo `span(relations)` (and `m Z^n` when a modulus is set).
///
/// Construction computes a presentation of the class group as cyclic
/// generators with orders; enumeration then walks one representative per
/// class, so it never yields duplicates.
#[derive(Clone, Debug)]
pub struct AffineCoset {
    dim: usize,
    modulus: Option<BigInt>,
    particular: Vec<BigInt>,
    class_generators: Vec<Vec<BigInt>>,
    /// Cyclic order of each class generator; zero means infinite.
    orders: Vec<BigInt>,
    locator: Locator,
}

#[derive(Clone, Debug)]
enum Locator {
    Smith {
        outer: SmithDecomposition,
        lattice_factors: Vec<BigInt>,
        inner_u: IntMatrix,
        /// Leading inner factors equal to 1 (trivial classes).
        skip: usize,
    },
    Prime {
        p: u64,
        /// Class generators followed by a basis of the relation space.
        columns: Vec<modp::Row>,
    },
}

/// Returned when the number of classes exceeds the enumeration cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overflow {
    /// `None` when the class set is infinite.
    pub cardinality: Option<BigInt>,
}

impl AffineCoset {
    /// `use_prime_field` selects word-sized elimination; it is only valid
    /// when `modulus` is a prime.
    pub fn new(
        dim: usize,
        modulus: Option<BigInt>,
        particular: Vec<BigInt>,
        generators: &[Vec<BigInt>],
        relations: &[Vec<BigInt>],
        use_prime_field: bool,
    ) -> Self {
        assert_eq!(particular.len(), dim, "particular solution has wrong length");
        match (&modulus, use_prime_field) {
            (Some(p), true) => Self::new_prime(dim, p, particular, generators, relations),
            _ => Self::new_smith(dim, modulus, particular, generators, relations),
        }
    }

    fn new_prime(
        dim: usize,
        p: &BigInt,
        particular: Vec<BigInt>,
        generators: &[Vec<BigInt>],
        relations: &[Vec<BigInt>],
    ) -> Self {
        let pw = p.to_u64().expect("prime modulus fits in u64");
        let mut ech = Echelon::new(dim, pw);
        let mut rel_basis = Vec::new();
        for r in relations {
            let r = modp::lift_vec(r, pw);
            if ech.insert(&r) {
                rel_basis.push(r);
            }
        }
        let mut ext = Vec::new();
        for g in generators {
            let g = modp::lift_vec(g, pw);
            if ech.insert(&g) {
                ext.push(g);
            }
        }
        let class_generators = ext.iter().map(|g| modp::to_bigint(g)).collect();
        let orders = vec![p.clone(); ext.len()];
        let mut columns = ext;
        columns.extend(rel_basis);
        Self {
            dim,
            modulus: Some(p.clone()),
            particular: particular.iter().map(|x| x.mod_floor(p)).collect(),
            class_generators,
            orders,
            locator: Locator::Prime { p: pw, columns },
        }
    }

    fn new_smith(
        dim: usize,
        modulus: Option<BigInt>,
        particular: Vec<BigInt>,
        generators: &[Vec<BigInt>],
        relations: &[Vec<BigInt>],
    ) -> Self {
        let mut sub: Vec<Vec<BigInt>> = relations.to_vec();
        if let Some(m) = &modulus {
            for j in 0..dim {
                let mut e = vec![BigInt::zero(); dim];
                e[j] = m.clone();
                sub.push(e);
            }
        }
        let mut all = generators.to_vec();
        all.extend(sub.iter().cloned());
        let outer = snf(&IntMatrix::from_columns(dim, &all));
        let lattice_factors = outer.invariant_factors();
        let r = lattice_factors.len();
        // coordinates of the relation lattice inside the full lattice
        let sub_coords: Vec<Vec<BigInt>> = sub
            .iter()
            .map(|v| {
                lattice_coords(&outer, &lattice_factors, v)
                    .expect("relations lie inside the spanned lattice")
            })
            .collect();
        let inner = snf(&IntMatrix::from_columns(r, &sub_coords));
        let inner_factors = inner.invariant_factors();
        let skip = inner_factors.iter().take_while(|d| d.is_one()).count();
        let mut class_generators = Vec::new();
        let mut orders = Vec::new();
        for j in 0..r {
            let order = inner_factors.get(j).cloned().unwrap_or_else(BigInt::zero);
            if order.is_one() {
                continue;
            }
            // column j of LB * inner.u_inv, with LB = outer.u_inv[:, :r] * diag(factors)
            let coeffs: Vec<BigInt> = (0..r)
                .map(|k| inner.u_inv.get(k, j) * &lattice_factors[k])
                .collect();
            let mut g = vec![BigInt::zero(); dim];
            for (k, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (i, gi) in g.iter_mut().enumerate() {
                    *gi += outer.u_inv.get(i, k) * c;
                }
            }
            if let Some(m) = &modulus {
                g.iter_mut().for_each(|x| *x = x.mod_floor(m));
            }
            class_generators.push(g);
            orders.push(order);
        }
        let particular = match &modulus {
            Some(m) => particular.iter().map(|x| x.mod_floor(m)).collect(),
            None => particular,
        };
        Self {
            dim,
            modulus,
            particular,
            class_generators,
            orders,
            locator: Locator::Smith { outer, lattice_factors, inner_u: inner.u, skip },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modulus(&self) -> Option<&BigInt> {
        self.modulus.as_ref()
    }

    pub fn particular(&self) -> &[BigInt] {
        &self.particular
    }

    pub fn class_generators(&self) -> &[Vec<BigInt>] {
        &self.class_generators
    }

    pub fn orders(&self) -> &[BigInt] {
        &self.orders
    }

    pub fn free_rank(&self) -> usize {
        self.orders.iter().filter(|o| o.is_zero()).count()
    }

    /// Number of classes, `None` if infinite.
    pub fn cardinality(&self) -> Option<BigInt> {
        if self.free_rank() > 0 {
            return None;
        }
        Some(self.orders.iter().product())
    }

    /// The member with the given generator coefficients.
    pub fn element(&self, coeffs: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(coeffs.len(), self.class_generators.len());
        let mut v = self.particular.clone();
        for (c, g) in coeffs.iter().zip(&self.class_generators) {
            if c.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(g) {
                *x += c * y;
            }
        }
        if let Some(m) = &self.modulus {
            v.iter_mut().for_each(|x| *x = x.mod_floor(m));
        }
        v
    }

    /// Class coordinates of a vector `v` of the linear part (i.e. a
    /// difference of two members); `None` if `v` is not in it.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        match &self.locator {
            Locator::Smith { outer, lattice_factors, inner_u, skip } => {
                let y = lattice_coords(outer, lattice_factors, v)?;
                let c = inner_u.mul_vec(&y);
                Some(
                    (*skip..lattice_factors.len())
                        .map(|j| {
                            let o = &self.orders[j - skip];
                            if o.is_zero() {
                                c[j].clone()
                            } else {
                                c[j].mod_floor(o)
                            }
                        })
                        .collect(),
                )
            }
            Locator::Prime { p, columns } => {
                let rows: Vec<modp::Row> = (0..self.dim)
                    .map(|i| columns.iter().map(|c| c[i]).collect())
                    .collect();
                let rhs = modp::lift_vec(v, *p);
                let (x, _) = modp::solve(&rows, &rhs, columns.len(), *p)?;
                Some(x[..self.class_generators.len()].iter().map(|&c| BigInt::from(c)).collect())
            }
        }
    }

    /// All classes, one representative each, if there are at most `cap`.
    pub fn enumerate(&self, cap: u64) -> Result<CosetIter<'_>, Overflow> {
        let card = self.cardinality();
        match &card {
            Some(c) if *c <= BigInt::from(cap) => Ok(CosetIter::new(self, None)),
            _ => Err(Overflow { cardinality: card }),
        }
    }

    /// Like [`enumerate`](Self::enumerate) but free generators range over
    /// `-bound..=bound`.
    pub fn enumerate_bounded(&self, bound: u32, cap: u64) -> Result<CosetIter<'_>, Overflow> {
        let width = BigInt::from(2 * bound as u64 + 1);
        let count: BigInt = self
            .orders
            .iter()
            .map(|o| if o.is_zero() { width.clone() } else { o.clone() })
            .product();
        if count > BigInt::from(cap) {
            return Err(Overflow { cardinality: self.cardinality() });
        }
        Ok(CosetIter::new(self, Some(bound)))
    }

    /// A uniformly random class (free generators drawn from `-bound..=bound`).
    pub fn sample<R: Rng>(&self, rng: &mut R, bound: u32) -> Vec<BigInt> {
        let coeffs: Vec<BigInt> = self
            .orders
            .iter()
            .map(|o| {
                if o.is_zero() {
                    BigInt::from(rng.gen_range(-(bound as i64)..=bound as i64))
                } else {
                    let o = o.to_u64().unwrap_or(u64::MAX);
                    BigInt::from(rng.gen_range(0..o))
                }
            })
            .collect();
        self.element(&coeffs)
    }
}

/// Coordinates of `v` w.r.t. the lattice basis `u_inv[:, :r] * diag(d)`.
fn lattice_coords(s: &SmithDecomposition, factors: &[BigInt], v: &[BigInt]) -> Option<Vec<BigInt>> {
    let w = s.u.mul_vec(v);
    let mut y = Vec::with_capacity(factors.len());
    for (i, wi) in w.iter().enumerate() {
        if i < factors.len() {
            let (q, r) = wi.div_rem(&factors[i]);
            if !r.is_zero() {
                return None;
            }
            y.push(q);
        } else if !wi.is_zero() {
            return None;
        }
    }
    Some(y)
}

/// Odometer over class coefficients.
pub struct CosetIter<'a> {
    coset: &'a AffineCoset,
    lows: Vec<BigInt>,
    highs: Vec<BigInt>,
    current: Option<Vec<BigInt>>,
}

impl<'a> CosetIter<'a> {
    fn new(coset: &'a AffineCoset, bound: Option<u32>) -> Self {
        let b = BigInt::from(bound.unwrap_or(0));
        let (lows, highs): (Vec<BigInt>, Vec<BigInt>) = coset
            .orders
            .iter()
            .map(|o| {
                if o.is_zero() {
                    (-b.clone(), b.clone())
                } else {
                    (BigInt::zero(), o - 1)
                }
            })
            .unzip();
        let current = Some(lows.clone());
        Self { coset, lows, highs, current }
    }
}

impl Iterator for CosetIter<'_> {
    type Item = Vec<BigInt>;

    fn next(&mut self) -> Option<Vec<BigInt>> {
        let cur = self.current.take()?;
        let out = self.coset.element(&cur);
        let mut next = cur;
        let mut i = 0;
        loop {
            if i == next.len() {
                break;
            }
            if next[i] < self.highs[i] {
                next[i] += 1;
                self.current = Some(next);
                break;
            }
            next[i] = self.lows[i].clone();
            i += 1;
        }
        Some(out)
    }
}

/// Convenience wrapper: solution coset of `A x = b (mod m)` with no extra
/// relations.
pub fn modular_solution_coset(particular: Vec<BigInt>, kernel: &[Vec<BigInt>], m: &BigInt) -> AffineCoset {
    let dim = particular.len();
    let basis = lattice_basis(dim, kernel);
    AffineCoset::new(dim, Some(m.abs()), particular, &basis, &[], false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn empty_generators_yield_particular() {
        let c = AffineCoset::new(2, Some(BigInt::from(5)), v(&[1, 7]), &[], &[], false);
        let all: Vec<_> = c.enumerate(10).unwrap().collect();
        assert_eq!(all, vec![v(&[1, 2])]);
    }

    #[test]
    fn order_two_generator_mod_four() {
        let c = AffineCoset::new(1, Some(BigInt::from(4)), v(&[1]), &[v(&[2])], &[], false);
        let all: HashSet<_> = c.enumerate(10).unwrap().collect();
        assert_eq!(all, [v(&[1]), v(&[3])].into_iter().collect());
    }

    #[test]
    fn overflow_signal() {
        let c = AffineCoset::new(2, Some(BigInt::from(3)), v(&[0, 0]), &[v(&[1, 0]), v(&[0, 1])], &[], false);
        assert_eq!(c.cardinality(), Some(BigInt::from(9)));
        assert!(c.enumerate(5).is_err());
        let p = AffineCoset::new(2, Some(BigInt::from(3)), v(&[0, 0]), &[v(&[1, 0]), v(&[0, 1])], &[], true);
        assert_eq!(p.cardinality(), Some(BigInt::from(9)));
        assert!(p.enumerate(5).is_err());
    }

    #[test]
    fn relations_collapse_classes() {
        // Z^2 modulo the diagonal: one free class generator
        let c = AffineCoset::new(2, None, v(&[0, 0]), &[v(&[1, 0]), v(&[0, 1])], &[v(&[1, 1])], false);
        assert_eq!(c.free_rank(), 1);
        let a = c.coordinates(&v(&[3, 1])).unwrap();
        let b = c.coordinates(&v(&[2, 0])).unwrap();
        assert_eq!(a, b);
        // Z modulo 9Z
        let c = AffineCoset::new(1, None, v(&[0]), &[v(&[1])], &[v(&[9])], false);
        assert_eq!(c.orders(), &[BigInt::from(9)]);
        assert_eq!(c.coordinates(&v(&[10])), c.coordinates(&v(&[1])));
        assert_ne!(c.coordinates(&v(&[2])), c.coordinates(&v(&[1])));
    }

    #[test]
    fn prime_and_smith_paths_agree_on_counts() {
        let gens = [v(&[1, 1, 0]), v(&[0, 2, 2]), v(&[1, 0, 1])];
        let rels = [v(&[1, 1, 0])];
        let a = AffineCoset::new(3, Some(BigInt::from(2)), v(&[0, 0, 0]), &gens, &rels, false);
        let b = AffineCoset::new(3, Some(BigInt::from(2)), v(&[0, 0, 0]), &gens, &rels, true);
        assert_eq!(a.cardinality(), b.cardinality());
        assert_eq!(a.cardinality(), Some(BigInt::from(2)));
    }
}
