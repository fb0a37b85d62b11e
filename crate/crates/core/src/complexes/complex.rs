use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::{ComplexError, Ring};
use crate::lattice::IntMatrix;

/// Bounded cochain complex of finitely generated free modules.
///
/// Differentials raise degree: `differential(i)` maps degree `i` to
/// `i + 1` and has shape `rank(i + 1) x rank(i)`. Only nonzero ranks and
/// nonzero differentials are stored, so structural equality is canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Complex {
    ring: Ring,
    ranks: BTreeMap<i64, usize>,
    diffs: BTreeMap<i64, IntMatrix>,
}

impl Complex {
    /// Builds and validates (`d o d = 0`) a complex.
    pub fn new(
        ring: Ring,
        ranks: impl IntoIterator<Item = (i64, usize)>,
        diffs: impl IntoIterator<Item = (i64, IntMatrix)>,
    ) -> Result<Self, ComplexError> {
        let c = Self::new_unchecked(ring, ranks, diffs)?;
        c.validate()?;
        Ok(c)
    }

    /// Builds with shape checks only; `validate` reports `d o d != 0`.
    pub fn new_unchecked(
        ring: Ring,
        ranks: impl IntoIterator<Item = (i64, usize)>,
        diffs: impl IntoIterator<Item = (i64, IntMatrix)>,
    ) -> Result<Self, ComplexError> {
        let ranks: BTreeMap<i64, usize> = ranks.into_iter().filter(|&(_, r)| r > 0).collect();
        let mut stored = BTreeMap::new();
        for (i, d) in diffs {
            let want = (rank_in(&ranks, i + 1), rank_in(&ranks, i));
            if d.shape() != want {
                return Err(ComplexError::Shape(format!(
                    "differential in degree {i} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    want.0,
                    want.1
                )));
            }
            let d = ring.normalize_matrix(&d);
            if !d.is_zero() {
                stored.insert(i, d);
            }
        }
        Ok(Self { ring, ranks, diffs: stored })
    }

    pub fn zero(ring: Ring) -> Self {
        Self { ring, ranks: BTreeMap::new(), diffs: BTreeMap::new() }
    }

    /// `R^rank` concentrated in one degree.
    pub fn concentrated(ring: Ring, degree: i64, rank: usize) -> Self {
        Self::new_unchecked(ring, [(degree, rank)], []).expect("no differentials")
    }

    /// Checks `d(i+1) d(i) = 0` everywhere, reporting the first failing degree.
    pub fn validate(&self) -> Result<(), ComplexError> {
        for (&i, d) in &self.diffs {
            if let Some(next) = self.diffs.get(&(i + 1)) {
                let comp = self.ring.normalize_matrix(&(next * d));
                if !comp.is_zero() {
                    return Err(ComplexError::NotAComplex { degree: i });
                }
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rank(&self, i: i64) -> usize {
        rank_in(&self.ranks, i)
    }

    pub fn differential(&self, i: i64) -> IntMatrix {
        self.diffs
            .get(&i)
            .cloned()
            .unwrap_or_else(|| IntMatrix::zeros(self.rank(i + 1), self.rank(i)))
    }

    /// Degrees with nonzero rank, ascending.
    pub fn degrees(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        self.ranks.iter().map(|(&i, &r)| (i, r))
    }

    pub fn differentials(&self) -> impl Iterator<Item = (i64, &IntMatrix)> + '_ {
        self.diffs.iter().map(|(&i, d)| (i, d))
    }

    /// Smallest and largest degree with nonzero rank.
    pub fn support(&self) -> Option<(i64, i64)> {
        Some((*self.ranks.keys().next()?, *self.ranks.keys().next_back()?))
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.is_empty()
    }

    /// `c[n]`: rank `i` is rank `i + n` of `c`, differential `(-1)^n d(i + n)`.
    pub fn shift(&self, n: i64) -> Self {
        let sign = if n.rem_euclid(2) == 1 { -1 } else { 1 };
        let ranks = self.ranks.iter().map(|(&i, &r)| (i - n, r));
        let diffs = self.diffs.iter().map(|(&i, d)| {
            (i - n, if sign < 0 { -d } else { d.clone() })
        });
        Self::new_unchecked(self.ring.clone(), ranks, diffs).expect("shift keeps shapes")
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self, ComplexError> {
        same_ring(&self.ring, &other.ring)?;
        let degrees = union_degrees(&[self, other]);
        let ranks = degrees.iter().map(|&i| (i, self.rank(i) + other.rank(i)));
        let diffs: Vec<(i64, IntMatrix)> = degrees
            .iter()
            .map(|&i| (i, IntMatrix::direct_sum(&self.differential(i), &other.differential(i))))
            .collect();
        Self::new(self.ring.clone(), ranks, diffs)
    }

    /// Entrywise reduction of an integral complex to `Z/m`.
    pub fn reduce_mod(&self, m: &BigInt) -> Result<Self, ComplexError> {
        if self.ring != Ring::Integers {
            return Err(ComplexError::Ring(format!("reduce_mod expects a complex over Z, got {}", self.ring)));
        }
        let ring = Ring::modulo(m.clone())?;
        Self::new(
            ring,
            self.ranks.iter().map(|(&i, &r)| (i, r)),
            self.diffs.iter().map(|(&i, d)| (i, d.clone())),
        )
    }

    /// Same data read over another ring (entries are renormalised).
    pub fn with_ring(&self, ring: Ring) -> Result<Self, ComplexError> {
        Self::new(
            ring,
            self.ranks.iter().map(|(&i, &r)| (i, r)),
            self.diffs.iter().map(|(&i, d)| (i, d.clone())),
        )
    }
}

fn rank_in(ranks: &BTreeMap<i64, usize>, i: i64) -> usize {
    ranks.get(&i).copied().unwrap_or(0)
}

pub(crate) fn same_ring(a: &Ring, b: &Ring) -> Result<(), ComplexError> {
    if a != b {
        return Err(ComplexError::RingMismatch(a.to_string(), b.to_string()));
    }
    Ok(())
}

/// Sorted union of all degrees carrying a nonzero module.
pub(crate) fn union_degrees(cs: &[&Complex]) -> Vec<i64> {
    let mut v: Vec<i64> = cs.iter().flat_map(|c| c.ranks.keys().copied()).collect();
    v.sort_unstable();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Ring {
        Ring::Integers
    }

    #[test]
    fn middle_square_source_validates() {
        let a = 3i64;
        let b = Complex::new(
            z(),
            [(0, 1), (1, 2)],
            [(0, IntMatrix::from_i64(&[&[-a * a * a], &[a * a]]))],
        );
        assert!(b.is_ok());
        assert!(Complex::concentrated(z(), 4, 1).validate().is_ok());
    }

    #[test]
    fn composable_identities_fail_at_joint_degree() {
        let one = IntMatrix::identity(1);
        let c = Complex::new_unchecked(z(), [(0, 1), (1, 1), (2, 1)], [(0, one.clone()), (1, one)])
            .unwrap();
        assert_eq!(c.validate(), Err(ComplexError::NotAComplex { degree: 0 }));
    }

    #[test]
    fn shift_signs() {
        let a2 = 9;
        let x = Complex::new(z(), [(1, 1), (2, 1)], [(1, IntMatrix::from_i64(&[&[-a2]]))]).unwrap();
        let s = x.shift(1);
        assert_eq!(s.rank(0), 1);
        assert_eq!(s.rank(1), 1);
        assert_eq!(s.differential(0), IntMatrix::from_i64(&[&[a2]]));
        let ss = x.shift(2);
        assert_eq!(ss.differential(-1), x.differential(1));
        assert_eq!(ss.shift(-2), x);
        assert!(Complex::zero(z()).shift(1).is_zero());
    }

    #[test]
    fn bad_shape_rejected() {
        let r = Complex::new(z(), [(0, 1), (1, 2)], [(0, IntMatrix::zeros(1, 1))]);
        assert!(matches!(r, Err(ComplexError::Shape(_))));
    }
}
