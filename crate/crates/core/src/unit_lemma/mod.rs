//! Units of the form `1 + e + a e^2` and `1 + e + e^2 b`.
//!
//! Over a field algebra the construction is explicit: if the minimal
//! polynomial of `e`, scaled so its lowest coefficient is 1, reads
//! `X^m + X^(m+1) s(X)`, then `a = s(e)` makes `e + a e^2` nilpotent of
//! order at most `m + 1`. Residue rings `Z/m` are handled prime by prime;
//! over `Z` the only units are `1` and `-1`, so a divisibility test decides.

mod algebra;

pub use algebra::{Algebra, Field, MatrixAlgebra, Opposite, PrimeField, Rationals, StructureAlgebra};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::complexes::prime_divisors;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum UnitLemmaError {
    #[error("unsupported representation: {0}")]
    Unsupported(String),
    #[error("not an associative unital algebra: {0}")]
    NotAnAlgebra(String),
    #[error("malformed element: {0}")]
    Parse(String),
    #[error("certificate check failed: {0}")]
    Internal(String),
}

/// `e` is a root of `X^m + X^(m+1) s(X)`; `s` is stored lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialRelation<E> {
    pub m: usize,
    pub s: Vec<E>,
}

impl<E: Clone> PolynomialRelation<E> {
    /// Coefficients of `X^m + X^(m+1) s(X)`, lowest degree first.
    pub fn polynomial<F: Field<E = E>>(&self, f: &F) -> Vec<E> {
        let mut p = vec![f.zero(); self.m];
        p.push(f.one());
        p.extend(self.s.iter().cloned());
        p
    }
}

/// Minimal polynomial of `eps` by linear dependence of its powers,
/// normalized to lowest coefficient 1. Re-verified by evaluation.
pub fn polynomial_relation<A: Algebra>(
    alg: &A,
    eps: &[<A::F as Field>::E],
) -> Result<PolynomialRelation<<A::F as Field>::E>, UnitLemmaError> {
    let f = alg.field();
    if eps.len() != alg.dim() {
        return Err(UnitLemmaError::Parse(format!("expected {} coordinates, got {}", alg.dim(), eps.len())));
    }
    let mut powers = vec![alg.one()];
    let minimal = loop {
        let next = alg.mul(powers.last().unwrap(), eps);
        powers.push(next);
        if let Some(c) = algebra::express_in_span(f, &powers) {
            let mut q: Vec<_> = c.iter().map(|x| f.neg(x)).collect();
            q.push(f.one());
            break q;
        }
        if powers.len() > alg.dim() + 1 {
            return Err(UnitLemmaError::Internal("powers stayed independent beyond the dimension".into()));
        }
    };
    let m = minimal.iter().position(|c| !f.is_zero(c)).expect("monic");
    let inv = f.inv(&minimal[m]).expect("nonzero");
    let s = minimal[m + 1..].iter().map(|c| f.mul(&inv, c)).collect();
    let rel = PolynomialRelation { m, s };
    if !alg.is_zero(&alg.eval_poly(&rel.polynomial(f), eps)) {
        return Err(UnitLemmaError::Internal("relation does not vanish at the element".into()));
    }
    Ok(rel)
}

/// Certificate inside a field algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCertificate<E> {
    pub relation: PolynomialRelation<E>,
    pub alpha: Vec<E>,
    pub unit: Vec<E>,
    pub inverse: Vec<E>,
    /// Least `n` with `(e + a e^2)^n = 0`.
    pub nilpotency: usize,
}

/// `a = s(e)`; the inverse of `1 + x`, `x = e + a e^2`, is the finite
/// geometric series in `-x`.
pub fn find_alpha_in<A: Algebra>(
    alg: &A,
    eps: &[<A::F as Field>::E],
) -> Result<FieldCertificate<<A::F as Field>::E>, UnitLemmaError> {
    let f = alg.field();
    let relation = polynomial_relation(alg, eps)?;
    let alpha = alg.eval_poly(&relation.s, eps);
    let eps2 = alg.mul(eps, eps);
    let x = alg.add(eps, &alg.mul(&alpha, &eps2));
    let mut nilpotency = None;
    let mut power = alg.one();
    let mut inverse = alg.zero();
    let neg_x = alg.scale(&f.neg(&f.one()), &x);
    for n in 0..=relation.m + 1 {
        if alg.is_zero(&power) {
            nilpotency = Some(n);
            break;
        }
        inverse = alg.add(&inverse, &power);
        power = alg.mul(&power, &neg_x);
    }
    let nilpotency =
        nilpotency.ok_or_else(|| UnitLemmaError::Internal("(e + a e^2)^(m+1) is not zero".into()))?;
    let unit = alg.add(&alg.one(), &x);
    if alg.mul(&unit, &inverse) != alg.one() || alg.mul(&inverse, &unit) != alg.one() {
        return Err(UnitLemmaError::Internal("inverse check failed".into()));
    }
    Ok(FieldCertificate { relation, alpha, unit, inverse, nilpotency })
}

/// `b` with `1 + e + e^2 b` a unit: the `a` of the opposite algebra.
pub fn find_beta_in<A: Algebra>(
    alg: &A,
    eps: &[<A::F as Field>::E],
) -> Result<FieldCertificate<<A::F as Field>::E>, UnitLemmaError> {
    find_alpha_in(&Opposite(alg), eps)
}

/// `a` with `1 + e + a e^2` a unit modulo `m`: per prime `p | m` pick
/// `a_p` in `{0, 1}` making the value nonzero mod `p`, then combine by CRT.
pub fn find_alpha_residue(modulus: &BigInt, eps: &BigInt) -> Result<(BigInt, BigInt, BigInt), UnitLemmaError> {
    if *modulus < BigInt::from(2) {
        return Err(UnitLemmaError::Unsupported(format!("modulus {modulus} < 2")));
    }
    let eps = eps.mod_floor(modulus);
    let value = |a: &BigInt| (BigInt::one() + &eps + a * &eps * &eps).mod_floor(modulus);
    let mut alpha = BigInt::zero();
    let mut acc_mod = BigInt::one();
    for p in prime_divisors(modulus) {
        let p = BigInt::from(p);
        let a_p = [BigInt::zero(), BigInt::one()]
            .into_iter()
            .find(|a| !(BigInt::one() + &eps + a * &eps * &eps).mod_floor(&p).is_zero())
            .ok_or_else(|| UnitLemmaError::Internal(format!("no choice works modulo {p}")))?;
        // alpha = alpha (mod acc_mod), alpha = a_p (mod p)
        let t = ((&a_p - &alpha) * modinv(&acc_mod, &p)).mod_floor(&p);
        alpha += &acc_mod * t;
        acc_mod *= &p;
    }
    let alpha = alpha.mod_floor(modulus);
    let unit = value(&alpha);
    let inverse = if modulus.is_one() { BigInt::zero() } else { modinv(&unit, modulus) };
    if (&unit * &inverse).mod_floor(modulus) != BigInt::one() {
        return Err(UnitLemmaError::Internal(format!("{unit} is not a unit modulo {modulus}")));
    }
    Ok((alpha, unit, inverse))
}

fn modinv(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    e.x.mod_floor(m)
}

/// `a` with `1 + e + a e^2` in `{1, -1}`, if any.
pub fn find_alpha_over_z(eps: &BigInt) -> Option<BigInt> {
    if eps.is_zero() {
        return Some(BigInt::zero());
    }
    let sq = eps * eps;
    for target in [BigInt::one(), -BigInt::one()] {
        let need = target - BigInt::one() - eps;
        if need.is_multiple_of(&sq) {
            return Some(need / &sq);
        }
    }
    None
}

/// The element `e` together with the ring it lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingElementRep {
    MatrixFp { p: u64, k: usize, entries: Vec<u64> },
    MatrixQ { k: usize, entries: Vec<BigRational> },
    Residue { modulus: BigInt, value: BigInt },
    Integer(BigInt),
    Algebra { algebra: StructureAlgebra, coords: Vec<u64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// `1 + e + a e^2`
    Alpha,
    /// `1 + e + e^2 b`
    Beta,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitCertificate {
    pub variant: Variant,
    pub alpha: RingElementRep,
    pub unit: RingElementRep,
    pub inverse: RingElementRep,
    /// `m` of the polynomial relation, for field algebras.
    pub m: Option<usize>,
    pub nilpotency: Option<usize>,
}

impl RingElementRep {
    /// Parses a CLI ring descriptor (`z`, `zmod:m`, `matf:p:k`, `matq:k`)
    /// and an element payload (integer, or matrix rows).
    pub fn parse(descriptor: &str, payload: &Value) -> Result<Self, UnitLemmaError> {
        let parts: Vec<&str> = descriptor.split(':').collect();
        let bad = || UnitLemmaError::Parse(format!("bad ring descriptor {descriptor:?}"));
        let num = |s: &str| s.parse::<BigInt>().map_err(|_| bad());
        let size = |s: &str| s.parse::<usize>().map_err(|_| bad());
        match parts.as_slice() {
            ["z"] => Ok(RingElementRep::Integer(parse_int(payload)?)),
            ["zmod", m] => {
                let modulus = num(m)?;
                if modulus < BigInt::from(2) {
                    return Err(bad());
                }
                let value = parse_int(payload)?.mod_floor(&modulus);
                Ok(RingElementRep::Residue { modulus, value })
            }
            ["matf", p, k] => {
                let p: u64 = p.parse().map_err(|_| bad())?;
                PrimeField::new(p).map_err(|_| bad())?;
                let k = size(k)?;
                let rows = parse_rows(payload, k, |v| {
                    let x = parse_int(v)?;
                    Ok(x.mod_floor(&BigInt::from(p)).try_into().expect("reduced below p"))
                })?;
                Ok(RingElementRep::MatrixFp { p, k, entries: rows })
            }
            ["matq", k] => {
                let k = size(k)?;
                let entries = parse_rows(payload, k, parse_rational)?;
                Ok(RingElementRep::MatrixQ { k, entries })
            }
            _ => Err(bad()),
        }
    }

    fn with_entries_like(&self, coords: Vec<u64>) -> Self {
        match self {
            RingElementRep::MatrixFp { p, k, .. } => RingElementRep::MatrixFp { p: *p, k: *k, entries: coords },
            RingElementRep::Algebra { algebra, .. } => RingElementRep::Algebra { algebra: algebra.clone(), coords },
            _ => unreachable!("only F_p representations carry u64 coordinates"),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            RingElementRep::MatrixFp { k, entries, .. } => {
                json!(entries.chunks(*k.max(&1)).map(|r| r.to_vec()).collect::<Vec<_>>())
            }
            RingElementRep::MatrixQ { k, entries } => json!(entries
                .chunks(*k.max(&1))
                .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>()),
            RingElementRep::Residue { value, .. } | RingElementRep::Integer(value) => json!(value.to_string()),
            RingElementRep::Algebra { coords, .. } => json!(coords),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            RingElementRep::MatrixFp { k, entries, .. } => matrix_text(*k, entries),
            RingElementRep::MatrixQ { k, entries } => matrix_text(*k, entries),
            RingElementRep::Residue { value, .. } | RingElementRep::Integer(value) => value.to_string(),
            RingElementRep::Algebra { coords, .. } => format!("{coords:?}"),
        }
    }
}

fn matrix_text<T: std::fmt::Display>(k: usize, entries: &[T]) -> String {
    let rows: Vec<String> = entries
        .chunks(k.max(1))
        .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
        .collect();
    format!("[{}]", rows.join("; "))
}

fn parse_int(v: &Value) -> Result<BigInt, UnitLemmaError> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string().parse().expect("integer literal")),
        Value::String(s) => s.trim().parse().map_err(|_| UnitLemmaError::Parse(format!("not an integer: {s:?}"))),
        _ => Err(UnitLemmaError::Parse(format!("not an integer: {v}"))),
    }
}

fn parse_rational(v: &Value) -> Result<BigRational, UnitLemmaError> {
    match v {
        Value::String(s) => s.trim().parse().map_err(|_| UnitLemmaError::Parse(format!("not a rational: {s:?}"))),
        _ => parse_int(v).map(BigRational::from_integer),
    }
}

fn parse_rows<T>(v: &Value, k: usize, entry: impl Fn(&Value) -> Result<T, UnitLemmaError>) -> Result<Vec<T>, UnitLemmaError> {
    let rows = v.as_array().ok_or_else(|| UnitLemmaError::Parse("matrix must be an array of rows".into()))?;
    if rows.len() != k {
        return Err(UnitLemmaError::Parse(format!("expected {k} rows, got {}", rows.len())));
    }
    let mut out = Vec::with_capacity(k * k);
    for r in rows {
        let r = r.as_array().filter(|r| r.len() == k).ok_or_else(|| UnitLemmaError::Parse(format!("each row needs {k} entries")))?;
        for x in r {
            out.push(entry(x)?);
        }
    }
    Ok(out)
}

/// Finds a unit certificate for the requested variant.
pub fn find_unit(eps: &RingElementRep, variant: Variant) -> Result<UnitCertificate, UnitLemmaError> {
    fn wrap<E>(
        c: FieldCertificate<E>,
        variant: Variant,
        mk: impl Fn(Vec<E>) -> RingElementRep,
    ) -> UnitCertificate {
        UnitCertificate {
            variant,
            m: Some(c.relation.m),
            nilpotency: Some(c.nilpotency),
            alpha: mk(c.alpha),
            unit: mk(c.unit),
            inverse: mk(c.inverse),
        }
    }
    match eps {
        RingElementRep::MatrixFp { p, k, entries } => {
            let alg = MatrixAlgebra::new(PrimeField::new(*p)?, *k);
            let c = match variant {
                Variant::Alpha => find_alpha_in(&alg, entries)?,
                Variant::Beta => find_beta_in(&alg, entries)?,
            };
            Ok(wrap(c, variant, |v| eps.with_entries_like(v)))
        }
        RingElementRep::Algebra { algebra, coords } => {
            let c = match variant {
                Variant::Alpha => find_alpha_in(algebra, coords)?,
                Variant::Beta => find_beta_in(algebra, coords)?,
            };
            Ok(wrap(c, variant, |v| eps.with_entries_like(v)))
        }
        RingElementRep::MatrixQ { k, entries } => {
            let alg = MatrixAlgebra::new(Rationals, *k);
            let c = match variant {
                Variant::Alpha => find_alpha_in(&alg, entries)?,
                Variant::Beta => find_beta_in(&alg, entries)?,
            };
            Ok(wrap(c, variant, |v| RingElementRep::MatrixQ { k: *k, entries: v }))
        }
        RingElementRep::Residue { modulus, value } => {
            // commutative: both variants coincide
            let (a, u, inv) = find_alpha_residue(modulus, value)?;
            let mk = |v: BigInt| RingElementRep::Residue { modulus: modulus.clone(), value: v };
            Ok(UnitCertificate { variant, alpha: mk(a), unit: mk(u), inverse: mk(inv), m: None, nilpotency: None })
        }
        RingElementRep::Integer(_) => Err(UnitLemmaError::Unsupported(
            "Z is not head-finite; use find_alpha_over_z".into(),
        )),
    }
}

pub fn find_alpha(eps: &RingElementRep) -> Result<UnitCertificate, UnitLemmaError> {
    find_unit(eps, Variant::Alpha)
}

pub fn find_beta(eps: &RingElementRep) -> Result<UnitCertificate, UnitLemmaError> {
    find_unit(eps, Variant::Beta)
}

impl UnitCertificate {
    /// Recomputes the unit from `eps` and the coefficient and checks the
    /// inverse on both sides.
    pub fn verify(&self, eps: &RingElementRep) -> bool {
        fn check<A: Algebra>(
            alg: &A,
            variant: Variant,
            e: &[<A::F as Field>::E],
            a: &[<A::F as Field>::E],
            unit: &[<A::F as Field>::E],
            inv: &[<A::F as Field>::E],
            nil: Option<usize>,
        ) -> bool {
            let e2 = alg.mul(e, e);
            let x = match variant {
                Variant::Alpha => alg.add(e, &alg.mul(a, &e2)),
                Variant::Beta => alg.add(e, &alg.mul(&e2, a)),
            };
            let u = alg.add(&alg.one(), &x);
            let nil_ok = nil.is_none_or(|n| alg.is_zero(&alg.pow(&x, n)));
            u == unit && alg.mul(&u, inv) == alg.one() && alg.mul(inv, &u) == alg.one() && nil_ok
        }
        use RingElementRep as R;
        match (eps, &self.alpha, &self.unit, &self.inverse) {
            (R::MatrixFp { p, k, entries }, R::MatrixFp { entries: a, .. }, R::MatrixFp { entries: u, .. }, R::MatrixFp { entries: i, .. }) => {
                let Ok(f) = PrimeField::new(*p) else { return false };
                check(&MatrixAlgebra::new(f, *k), self.variant, entries, a, u, i, self.nilpotency)
            }
            (R::MatrixQ { k, entries }, R::MatrixQ { entries: a, .. }, R::MatrixQ { entries: u, .. }, R::MatrixQ { entries: i, .. }) => {
                check(&MatrixAlgebra::new(Rationals, *k), self.variant, entries, a, u, i, self.nilpotency)
            }
            (R::Algebra { algebra, coords }, R::Algebra { coords: a, .. }, R::Algebra { coords: u, .. }, R::Algebra { coords: i, .. }) => {
                check(algebra, self.variant, coords, a, u, i, self.nilpotency)
            }
            (R::Residue { modulus, value }, R::Residue { value: a, .. }, R::Residue { value: u, .. }, R::Residue { value: i, .. }) => {
                let v = (BigInt::one() + value + a * value * value).mod_floor(modulus);
                v == *u && (u * i).mod_floor(modulus) == BigInt::one() % modulus
            }
            _ => false,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "variant": match self.variant { Variant::Alpha => "alpha", Variant::Beta => "beta" },
            "coefficient": self.alpha.to_json(),
            "unit": self.unit.to_json(),
            "inverse": self.inverse.to_json(),
            "m": self.m,
            "nilpotency": self.nilpotency,
        })
    }

    pub fn to_text(&self) -> String {
        let name = match self.variant {
            Variant::Alpha => "alpha",
            Variant::Beta => "beta",
        };
        let mut s = format!(
            "{name} = {}\nunit = {}\ninverse = {}\n",
            self.alpha.to_text(),
            self.unit.to_text(),
            self.inverse.to_text()
        );
        if let (Some(m), Some(n)) = (self.m, self.nilpotency) {
            s.push_str(&format!("m = {m}, nilpotency = {n}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp_mat(p: u64, rows: &[&[i64]]) -> RingElementRep {
        let k = rows.len();
        let entries = rows.iter().flat_map(|r| r.iter().map(|&x| x.rem_euclid(p as i64) as u64)).collect();
        RingElementRep::MatrixFp { p, k, entries }
    }

    #[test]
    fn square_zero_relation() {
        let alg = MatrixAlgebra::new(PrimeField::new(2).unwrap(), 2);
        let rel = polynomial_relation(&alg, &[0, 1, 0, 0]).unwrap();
        assert_eq!(rel, PolynomialRelation { m: 2, s: vec![] });
    }

    #[test]
    fn idempotent_relation_and_alpha() {
        let alg = MatrixAlgebra::new(Rationals, 2);
        let q = |x: i64| Rationals.from_i64(x);
        let e = vec![q(1), q(0), q(0), q(0)];
        let rel = polynomial_relation(&alg, &e).unwrap();
        assert_eq!(rel, PolynomialRelation { m: 1, s: vec![q(-1)] });
        let c = find_alpha_in(&alg, &e).unwrap();
        assert_eq!(c.alpha, alg.scale(&q(-1), &alg.one()));
        assert_eq!(c.unit, alg.one());
        let b = find_beta_in(&alg, &e).unwrap();
        assert_eq!(b.alpha, alg.scale(&q(-1), &alg.one()));
    }

    #[test]
    fn scalar_three_over_q() {
        let alg = MatrixAlgebra::new(Rationals, 1);
        let three = vec![Rationals.from_i64(3)];
        let rel = polynomial_relation(&alg, &three).unwrap();
        assert_eq!(rel.m, 0);
        assert_eq!(rel.s, vec![BigRational::new((-1).into(), 3.into())]);
        let c = find_alpha_in(&alg, &three).unwrap();
        // 1 + 3 - 9/3 = 1
        assert_eq!(c.unit, alg.one());
    }

    #[test]
    fn nilpotent_alpha_zero() {
        let e = fp_mat(2, &[&[0, 1], &[0, 0]]);
        let c = find_alpha(&e).unwrap();
        assert_eq!(c.alpha, fp_mat(2, &[&[0, 0], &[0, 0]]));
        assert!(c.verify(&e));
        let b = find_beta(&e).unwrap();
        assert_eq!(b.alpha, fp_mat(2, &[&[0, 0], &[0, 0]]));
        assert!(b.verify(&e));
    }

    #[test]
    fn residue_three_mod_nine() {
        let e = RingElementRep::Residue { modulus: 9.into(), value: 3.into() };
        let c = find_alpha(&e).unwrap();
        assert_eq!(c.alpha, RingElementRep::Residue { modulus: 9.into(), value: 0.into() });
        assert!(c.verify(&e));
    }

    #[test]
    fn residue_all_small_moduli() {
        for m in 2..60i64 {
            for e in 0..m {
                let (a, u, inv) = find_alpha_residue(&m.into(), &e.into()).unwrap();
                assert_eq!((BigInt::from(1 + e) + &a * e * e).mod_floor(&m.into()), u);
                assert_eq!((u * inv).mod_floor(&m.into()), BigInt::one());
            }
        }
    }

    #[test]
    fn integers() {
        assert_eq!(find_alpha_over_z(&3.into()), None);
        assert_eq!(find_alpha_over_z(&0.into()), Some(0.into()));
        assert_eq!(find_alpha_over_z(&(-2).into()), Some(0.into()));
        assert_eq!(find_alpha_over_z(&1.into()), Some((-1).into()));
        assert!(find_alpha(&RingElementRep::Integer(3.into())).is_err());
    }

    #[test]
    fn noncommuting_alpha_is_allowed() {
        // over F_3: e = [[1,1],[0,0]] is idempotent but not symmetric
        let e = fp_mat(3, &[&[1, 1], &[0, 0]]);
        let a = find_alpha(&e).unwrap();
        let b = find_beta(&e).unwrap();
        assert!(a.verify(&e) && b.verify(&e));
    }

    #[test]
    fn parse_descriptors() {
        let e = RingElementRep::parse("matf:2:2", &json!([[0, 1], [0, 0]])).unwrap();
        assert_eq!(e, fp_mat(2, &[&[0, 1], &[0, 0]]));
        let q = RingElementRep::parse("matq:1", &json!([["1/3"]])).unwrap();
        assert!(matches!(q, RingElementRep::MatrixQ { k: 1, .. }));
        assert!(RingElementRep::parse("zmod:1", &json!(3)).is_err());
        assert!(RingElementRep::parse("matf:4:2", &json!([[0, 1], [0, 0]])).is_err());
        assert!(RingElementRep::parse("matf:2:2", &json!([[0, 1]])).is_err());
        assert_eq!(RingElementRep::parse("z", &json!("3")).unwrap(), RingElementRep::Integer(3.into()));
    }
}
