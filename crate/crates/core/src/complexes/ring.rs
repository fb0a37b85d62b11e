use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::ComplexError;
use crate::lattice::IntMatrix;

/// Coefficient ring of a complex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ring {
    Integers,
    /// `Z/m`, `m >= 2`; `prime` flags the field case.
    Mod { modulus: BigInt, prime: bool },
}

impl Ring {
    pub fn modulo(m: impl Into<BigInt>) -> Result<Self, ComplexError> {
        let m = m.into();
        if m < BigInt::from(2) {
            return Err(ComplexError::Ring(format!("modulus must be at least 2, got {m}")));
        }
        let prime = is_prime(&m);
        Ok(Ring::Mod { modulus: m, prime })
    }

    pub fn prime_field(p: u64) -> Result<Self, ComplexError> {
        let r = Self::modulo(p)?;
        if !r.is_prime_field() {
            return Err(ComplexError::Ring(format!("{p} is not prime")));
        }
        Ok(r)
    }

    pub fn modulus(&self) -> Option<&BigInt> {
        match self {
            Ring::Integers => None,
            Ring::Mod { modulus, .. } => Some(modulus),
        }
    }

    pub fn is_prime_field(&self) -> bool {
        matches!(self, Ring::Mod { prime: true, .. })
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            Ring::Mod { modulus, prime: true } => modulus.to_u64(),
            _ => None,
        }
    }

    pub fn normalize(&self, x: &BigInt) -> BigInt {
        match self {
            Ring::Integers => x.clone(),
            Ring::Mod { modulus, .. } => x.mod_floor(modulus),
        }
    }

    pub fn normalize_matrix(&self, m: &IntMatrix) -> IntMatrix {
        match self {
            Ring::Integers => m.clone(),
            Ring::Mod { modulus, .. } => m.reduce_mod(modulus),
        }
    }

    /// Distinct prime divisors of the modulus; empty for `Z`.
    pub fn prime_divisors(&self) -> Vec<u64> {
        match self {
            Ring::Integers => Vec::new(),
            Ring::Mod { modulus, .. } => prime_divisors(modulus),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::Mod { modulus, prime: true } => write!(f, "F_{modulus}"),
            Ring::Mod { modulus, .. } => write!(f, "Z/{modulus}"),
        }
    }
}

pub fn is_prime(n: &BigInt) -> bool {
    let Some(n) = n.to_u64() else {
        // large moduli never occur at desk scale; treat as composite
        return false;
    };
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    let mut n = n.to_u64().expect("modulus fits in u64");
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
