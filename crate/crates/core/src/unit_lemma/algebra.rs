//! Fields and finite-dimensional associative algebras over them.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::UnitLemmaError;

pub trait Field: Clone + Debug {
    type E: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn from_i64(&self, v: i64) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    /// `None` for zero.
    fn inv(&self, a: &Self::E) -> Option<Self::E>;

    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E {
        self.add(a, &self.neg(b))
    }

    fn is_zero(&self, a: &Self::E) -> bool {
        *a == self.zero()
    }
}

/// `F_p` with elements in `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, UnitLemmaError> {
        if !crate::complexes::is_prime(&p.into()) {
            return Err(UnitLemmaError::Unsupported(format!("{p} is not prime")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn reduce(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
}

impl Field for PrimeField {
    type E = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.p
    }

    fn from_i64(&self, v: i64) -> u64 {
        self.reduce(v)
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.p as u128) as u64
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }

    fn neg(&self, a: &u64) -> u64 {
        (self.p - a % self.p) % self.p
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        if a.is_multiple_of(self.p) {
            None
        } else {
            Some(crate::lattice::modp::inv(*a, self.p))
        }
    }
}

/// The rationals with exact arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type E = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
}

/// A finite-dimensional associative unital algebra; elements are
/// coordinate vectors over the base field.
pub trait Algebra {
    type F: Field;

    fn field(&self) -> &Self::F;
    fn dim(&self) -> usize;
    fn one(&self) -> Vec<<Self::F as Field>::E>;
    fn mul(&self, a: &[<Self::F as Field>::E], b: &[<Self::F as Field>::E]) -> Vec<<Self::F as Field>::E>;

    fn zero(&self) -> Vec<<Self::F as Field>::E> {
        vec![self.field().zero(); self.dim()]
    }

    fn add(&self, a: &[<Self::F as Field>::E], b: &[<Self::F as Field>::E]) -> Vec<<Self::F as Field>::E> {
        let f = self.field();
        a.iter().zip(b).map(|(x, y)| f.add(x, y)).collect()
    }

    fn scale(&self, c: &<Self::F as Field>::E, a: &[<Self::F as Field>::E]) -> Vec<<Self::F as Field>::E> {
        let f = self.field();
        a.iter().map(|x| f.mul(c, x)).collect()
    }

    fn is_zero(&self, a: &[<Self::F as Field>::E]) -> bool {
        let f = self.field();
        a.iter().all(|x| f.is_zero(x))
    }

    fn pow(&self, a: &[<Self::F as Field>::E], n: usize) -> Vec<<Self::F as Field>::E> {
        let mut acc = self.one();
        for _ in 0..n {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// `sum_j coeffs[j] x^j`.
    fn eval_poly(&self, coeffs: &[<Self::F as Field>::E], x: &[<Self::F as Field>::E]) -> Vec<<Self::F as Field>::E> {
        // Horner
        let mut acc = self.zero();
        for c in coeffs.iter().rev() {
            acc = self.mul(&acc, x);
            acc = self.add(&acc, &self.scale(c, &self.one()));
        }
        acc
    }
}

/// `k x k` matrices, row-major coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixAlgebra<F: Field> {
    field: F,
    k: usize,
}

impl<F: Field> MatrixAlgebra<F> {
    pub fn new(field: F, k: usize) -> Self {
        Self { field, k }
    }

    pub fn size(&self) -> usize {
        self.k
    }

    pub fn transpose(&self, a: &[F::E]) -> Vec<F::E> {
        let k = self.k;
        (0..k * k).map(|idx| a[(idx % k) * k + idx / k].clone()).collect()
    }
}

impl<F: Field> Algebra for MatrixAlgebra<F> {
    type F = F;

    fn field(&self) -> &F {
        &self.field
    }

    fn dim(&self) -> usize {
        self.k * self.k
    }

    fn one(&self) -> Vec<F::E> {
        let k = self.k;
        (0..k * k).map(|idx| if idx / k == idx % k { self.field.one() } else { self.field.zero() }).collect()
    }

    fn mul(&self, a: &[F::E], b: &[F::E]) -> Vec<F::E> {
        let (k, f) = (self.k, &self.field);
        let mut out = vec![f.zero(); k * k];
        for i in 0..k {
            for l in 0..k {
                let x = &a[i * k + l];
                if f.is_zero(x) {
                    continue;
                }
                for j in 0..k {
                    out[i * k + j] = f.add(&out[i * k + j], &f.mul(x, &b[l * k + j]));
                }
            }
        }
        out
    }
}

/// An `F_p`-algebra given by structure constants: `e_i e_j = sum_k
/// table[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureAlgebra {
    field: PrimeField,
    table: Vec<Vec<Vec<u64>>>,
    identity: Vec<u64>,
}

impl StructureAlgebra {
    /// Checks shapes, associativity on basis triples, and that `identity`
    /// is a two-sided unit.
    pub fn new(field: PrimeField, table: Vec<Vec<Vec<u64>>>, identity: Vec<u64>) -> Result<Self, UnitLemmaError> {
        let n = identity.len();
        let shape_ok = table.len() == n && table.iter().all(|r| r.len() == n && r.iter().all(|v| v.len() == n));
        if !shape_ok {
            return Err(UnitLemmaError::Unsupported("structure constants have the wrong shape".into()));
        }
        let table = table.into_iter().map(|r| r.into_iter().map(|v| v.into_iter().map(|x| x % field.p).collect()).collect()).collect();
        let identity: Vec<u64> = identity.into_iter().map(|x| x % field.p).collect();
        let alg = Self { field, table, identity };
        let basis = |i: usize| -> Vec<u64> { (0..n).map(|j| u64::from(i == j)).collect() };
        for i in 0..n {
            let ei = basis(i);
            if alg.mul(&alg.identity, &ei) != ei || alg.mul(&ei, &alg.identity) != ei {
                return Err(UnitLemmaError::NotAnAlgebra(format!("identity fails on basis vector {i}")));
            }
            for j in 0..n {
                let eij = alg.mul(&ei, &basis(j));
                for k in 0..n {
                    let ek = basis(k);
                    if alg.mul(&eij, &ek) != alg.mul(&ei, &alg.mul(&basis(j), &ek)) {
                        return Err(UnitLemmaError::NotAnAlgebra(format!("associativity fails at ({i}, {j}, {k})")));
                    }
                }
            }
        }
        Ok(alg)
    }

    pub fn table(&self) -> &[Vec<Vec<u64>>] {
        &self.table
    }

    /// Structure constants of the opposite algebra.
    pub fn opposite(&self) -> Self {
        let n = self.dim();
        let table = (0..n).map(|i| (0..n).map(|j| self.table[j][i].clone()).collect()).collect();
        Self { field: self.field, table, identity: self.identity.clone() }
    }
}

impl Algebra for StructureAlgebra {
    type F = PrimeField;

    fn field(&self) -> &PrimeField {
        &self.field
    }

    fn dim(&self) -> usize {
        self.identity.len()
    }

    fn one(&self) -> Vec<u64> {
        self.identity.clone()
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let f = &self.field;
        let n = self.dim();
        let mut out = vec![0u64; n];
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                if b[j] == 0 {
                    continue;
                }
                let c = f.mul(&a[i], &b[j]);
                for (k, t) in self.table[i][j].iter().enumerate() {
                    out[k] = f.add(&out[k], &f.mul(&c, t));
                }
            }
        }
        out
    }
}

/// The opposite algebra of any [`Algebra`].
pub struct Opposite<'a, A: Algebra>(pub &'a A);

impl<A: Algebra> Algebra for Opposite<'_, A> {
    type F = A::F;

    fn field(&self) -> &A::F {
        self.0.field()
    }

    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn one(&self) -> Vec<<A::F as Field>::E> {
        self.0.one()
    }

    fn mul(&self, a: &[<A::F as Field>::E], b: &[<A::F as Field>::E]) -> Vec<<A::F as Field>::E> {
        self.0.mul(b, a)
    }
}

/// Solves for the first linear dependence of `vecs.last()` on the earlier
/// vectors, assuming those are independent: returns `c` with
/// `vecs.last() = sum c_j vecs[j]`.
pub(crate) fn express_in_span<F: Field>(f: &F, vecs: &[Vec<F::E>]) -> Option<Vec<F::E>> {
    let n = vecs.len() - 1;
    let dim = vecs[0].len();
    // augmented rows: one row per coordinate, columns = vecs[0..n] | target
    let mut rows: Vec<Vec<F::E>> = (0..dim).map(|r| (0..=n).map(|c| vecs[c][r].clone()).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(pr) = (r..dim).find(|&i| !f.is_zero(&rows[i][c])) else { continue };
        rows.swap(r, pr);
        let inv = f.inv(&rows[r][c]).expect("nonzero pivot");
        rows[r] = rows[r].iter().map(|x| f.mul(&inv, x)).collect();
        for i in 0..dim {
            if i != r && !f.is_zero(&rows[i][c]) {
                let factor = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x = f.sub(x, &f.mul(&factor, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !f.is_zero(&row[n])) {
        return None;
    }
    let mut coeffs = vec![f.zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        coeffs[c] = rows[i][n].clone();
    }
    Some(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f2_matrix_product() {
        let alg = MatrixAlgebra::new(PrimeField::new(2).unwrap(), 2);
        let n = vec![0, 1, 0, 0];
        assert!(alg.is_zero(&alg.mul(&n, &n)));
        assert_eq!(alg.mul(&alg.one(), &n), n);
    }

    #[test]
    fn bad_structure_constants() {
        let f = PrimeField::new(3).unwrap();
        // e0 e0 = e1, e1 = identity: identity law fails for e0 e0
        let table = vec![vec![vec![0, 1], vec![1, 0]], vec![vec![1, 0], vec![1, 0]]];
        assert!(StructureAlgebra::new(f, table, vec![0, 1]).is_err());
    }

    #[test]
    fn dual_numbers() {
        let f = PrimeField::new(5).unwrap();
        // basis 1, t with t^2 = 0
        let table = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![0, 0]]];
        let alg = StructureAlgebra::new(f, table, vec![1, 0]).unwrap();
        assert_eq!(alg.mul(&[0, 1], &[0, 1]), vec![0, 0]);
        assert_eq!(alg.opposite(), alg);
    }

    #[test]
    fn span_solver() {
        let q = Rationals;
        let v = |xs: &[i64]| xs.iter().map(|&x| q.from_i64(x)).collect::<Vec<_>>();
        let c = express_in_span(&q, &[v(&[1, 0]), v(&[1, 1]), v(&[3, 2])]).unwrap();
        assert_eq!(c, v(&[1, 2]));
        assert!(express_in_span(&q, &[v(&[1, 0]), v(&[0, 1])]).is_none());
    }
}
