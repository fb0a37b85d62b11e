use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::complex::{same_ring, union_degrees};
use super::{Complex, ComplexError, Ring};
use crate::lattice::IntMatrix;

/// Degreewise morphism of complexes; `component(i)` is
/// `rank_target(i) x rank_source(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChainMap {
    source: Complex,
    target: Complex,
    comps: BTreeMap<i64, IntMatrix>,
}

impl ChainMap {
    /// Builds a chain map, checking shapes and the chain condition.
    pub fn new(
        source: &Complex,
        target: &Complex,
        comps: impl IntoIterator<Item = (i64, IntMatrix)>,
    ) -> Result<Self, ComplexError> {
        let f = Self::new_unchecked(source, target, comps)?;
        f.check()?;
        Ok(f)
    }

    /// Shape checks only.
    pub fn new_unchecked(
        source: &Complex,
        target: &Complex,
        comps: impl IntoIterator<Item = (i64, IntMatrix)>,
    ) -> Result<Self, ComplexError> {
        same_ring(source.ring(), target.ring())?;
        let ring = source.ring();
        let mut stored = BTreeMap::new();
        for (i, m) in comps {
            let want = (target.rank(i), source.rank(i));
            if m.shape() != want {
                return Err(ComplexError::Shape(format!(
                    "map component in degree {i} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    want.0,
                    want.1
                )));
            }
            let m = ring.normalize_matrix(&m);
            if !m.is_zero() {
                stored.insert(i, m);
            }
        }
        Ok(Self { source: source.clone(), target: target.clone(), comps: stored })
    }

    /// Checks `d_T f = f d_S` in every degree.
    pub fn check(&self) -> Result<(), ComplexError> {
        let ring = self.ring();
        for i in degree_window(&[&self.source, &self.target]) {
            let lhs = &self.target.differential(i) * &self.component(i);
            let rhs = &self.component(i + 1) * &self.source.differential(i);
            if !ring.normalize_matrix(&(&lhs - &rhs)).is_zero() {
                return Err(ComplexError::NotAChainMap { degree: i });
            }
        }
        Ok(())
    }

    pub fn identity(c: &Complex) -> Self {
        let comps = c.degrees().map(|(i, r)| (i, IntMatrix::identity(r)));
        Self::new_unchecked(c, c, comps).expect("identity shapes")
    }

    pub fn zero(source: &Complex, target: &Complex) -> Result<Self, ComplexError> {
        Self::new_unchecked(source, target, [])
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn ring(&self) -> &Ring {
        self.source.ring()
    }

    pub fn component(&self, i: i64) -> IntMatrix {
        self.comps
            .get(&i)
            .cloned()
            .unwrap_or_else(|| IntMatrix::zeros(self.target.rank(i), self.source.rank(i)))
    }

    /// Nonzero components.
    pub fn components(&self) -> impl Iterator<Item = (i64, &IntMatrix)> + '_ {
        self.comps.iter().map(|(&i, m)| (i, m))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &ChainMap) -> Result<ChainMap, ComplexError> {
        if inner.target != self.source {
            return Err(ComplexError::Shape("composition of non-composable maps".into()));
        }
        let comps: Vec<(i64, IntMatrix)> = inner
            .source
            .degrees()
            .map(|(i, _)| (i, &self.component(i) * &inner.component(i)))
            .collect();
        Self::new_unchecked(&inner.source, &self.target, comps)
    }

    fn parallel(&self, other: &ChainMap) -> Result<(), ComplexError> {
        if self.source != other.source || self.target != other.target {
            return Err(ComplexError::Shape("maps are not parallel".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap, ComplexError> {
        self.parallel(other)?;
        let comps: Vec<(i64, IntMatrix)> = self
            .source
            .degrees()
            .map(|(i, _)| (i, &self.component(i) + &other.component(i)))
            .collect();
        Self::new_unchecked(&self.source, &self.target, comps)
    }

    pub fn sub(&self, other: &ChainMap) -> Result<ChainMap, ComplexError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ChainMap {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, c: &BigInt) -> ChainMap {
        let comps: Vec<(i64, IntMatrix)> = self.comps.iter().map(|(&i, m)| (i, m.scale(c))).collect();
        Self::new_unchecked(&self.source, &self.target, comps).expect("same shapes")
    }

    /// `f[n]`: component `i` is `f(i + n)`; no sign.
    pub fn shift(&self, n: i64) -> ChainMap {
        let comps: Vec<(i64, IntMatrix)> = self.comps.iter().map(|(&i, m)| (i - n, m.clone())).collect();
        Self::new_unchecked(&self.source.shift(n), &self.target.shift(n), comps).expect("same shapes")
    }

    pub fn reduce_mod(&self, m: &BigInt) -> Result<ChainMap, ComplexError> {
        let s = self.source.reduce_mod(m)?;
        let t = self.target.reduce_mod(m)?;
        Self::new(&s, &t, self.comps.iter().map(|(&i, c)| (i, c.clone())))
    }

    /// Same components read over another ring.
    pub fn with_ring(&self, ring: &Ring) -> Result<ChainMap, ComplexError> {
        let s = self.source.with_ring(ring.clone())?;
        let t = self.target.with_ring(ring.clone())?;
        Self::new(&s, &t, self.comps.iter().map(|(&i, c)| (i, c.clone())))
    }

    /// Same components between other (shape-compatible) complexes.
    pub fn retarget(&self, source: &Complex, target: &Complex) -> Result<ChainMap, ComplexError> {
        Self::new(source, target, self.comps.iter().map(|(&i, c)| (i, c.clone())))
    }
}

/// Null-homotopy data for `f - g`; `component(i)` maps degree `i` of the
/// source to degree `i - 1` of the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homotopy {
    f: ChainMap,
    g: ChainMap,
    comps: BTreeMap<i64, IntMatrix>,
}

impl Homotopy {
    /// Builds a homotopy and checks `f - g = d h + h d`.
    pub fn new(
        f: &ChainMap,
        g: &ChainMap,
        comps: impl IntoIterator<Item = (i64, IntMatrix)>,
    ) -> Result<Self, ComplexError> {
        f.parallel(g)?;
        let (s, t) = (f.source(), f.target());
        let ring = s.ring();
        let mut stored = BTreeMap::new();
        for (i, m) in comps {
            let want = (t.rank(i - 1), s.rank(i));
            if m.shape() != want {
                return Err(ComplexError::Shape(format!(
                    "homotopy component in degree {i} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    want.0,
                    want.1
                )));
            }
            let m = ring.normalize_matrix(&m);
            if !m.is_zero() {
                stored.insert(i, m);
            }
        }
        let h = Self { f: f.clone(), g: g.clone(), comps: stored };
        let bd = h.boundary();
        for (i, _) in s.degrees() {
            let diff = &f.component(i) - &g.component(i);
            if !ring.normalize_matrix(&(&diff - &bd.component(i))).is_zero() {
                return Err(ComplexError::BadHomotopy { degree: i });
            }
        }
        Ok(h)
    }

    pub fn zero(f: &ChainMap) -> Self {
        Self { f: f.clone(), g: f.clone(), comps: BTreeMap::new() }
    }

    pub fn from_map(&self) -> &ChainMap {
        &self.f
    }

    pub fn to_map(&self) -> &ChainMap {
        &self.g
    }

    pub fn component(&self, i: i64) -> IntMatrix {
        self.comps
            .get(&i)
            .cloned()
            .unwrap_or_else(|| IntMatrix::zeros(self.f.target().rank(i - 1), self.f.source().rank(i)))
    }

    pub fn components(&self) -> impl Iterator<Item = (i64, &IntMatrix)> + '_ {
        self.comps.iter().map(|(&i, m)| (i, m))
    }

    /// The chain map `d h + h d`.
    pub fn boundary(&self) -> ChainMap {
        let (s, t) = (self.f.source(), self.f.target());
        let comps: Vec<(i64, IntMatrix)> = s
            .degrees()
            .map(|(i, _)| {
                let a = &t.differential(i - 1) * &self.component(i);
                let b = &self.component(i + 1) * &s.differential(i);
                (i, &a + &b)
            })
            .collect();
        ChainMap::new_unchecked(s, t, comps).expect("boundary shapes")
    }

    pub fn reduce_mod(&self, m: &BigInt) -> Result<Homotopy, ComplexError> {
        let f = self.f.reduce_mod(m)?;
        let g = self.g.reduce_mod(m)?;
        Homotopy::new(&f, &g, self.comps.iter().map(|(&i, c)| (i, c.clone())))
    }
}

/// All degrees touched by the given complexes, padded by one on each side.
pub(crate) fn degree_window(cs: &[&Complex]) -> Vec<i64> {
    let d = union_degrees(cs);
    match (d.first(), d.last()) {
        (Some(&lo), Some(&hi)) => (lo - 1..=hi + 1).collect(),
        _ => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(a: i64) -> (Complex, Complex) {
        let x = Complex::new(Ring::Integers, [(1, 1), (2, 1)], [(1, IntMatrix::from_i64(&[&[-a * a]]))])
            .unwrap();
        let y = Complex::concentrated(Ring::Integers, 1, 1);
        (x, y)
    }

    #[test]
    fn chain_condition() {
        let (x, y) = sq(3);
        assert!(ChainMap::new(&x, &y, [(1, IntMatrix::from_i64(&[&[1]]))]).is_ok());
        let bad = ChainMap::new(&y, &x, [(1, IntMatrix::from_i64(&[&[1]]))]);
        assert_eq!(bad, Err(ComplexError::NotAChainMap { degree: 1 }));
    }

    #[test]
    fn homotopy_witness_checked() {
        let (x, _) = sq(3);
        // degree-2 endomorphism 9 on x is null-homotopic via h^2 = -1
        let f = ChainMap::new(&x, &x, [(1, IntMatrix::from_i64(&[&[9]])), (2, IntMatrix::from_i64(&[&[9]]))])
            .unwrap();
        let z = ChainMap::zero(&x, &x).unwrap();
        assert!(Homotopy::new(&f, &z, [(2, IntMatrix::from_i64(&[&[-1]]))]).is_ok());
        assert_eq!(
            Homotopy::new(&f, &z, [(2, IntMatrix::from_i64(&[&[1]]))]),
            Err(ComplexError::BadHomotopy { degree: 1 })
        );
    }

    #[test]
    fn shift_and_compose() {
        let (x, y) = sq(2);
        let f = ChainMap::new(&x, &y, [(1, IntMatrix::from_i64(&[&[1]]))]).unwrap();
        let fs = f.shift(1);
        assert_eq!(fs.component(0), IntMatrix::from_i64(&[&[1]]));
        assert!(fs.check().is_ok());
        let id = ChainMap::identity(&y);
        assert_eq!(id.compose(&f).unwrap(), f);
    }
}
