use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{snf, IntMatrix};

/// `Z^free_rank + Z/d_1 + ... + Z/d_k` with `d_1 | ... | d_k`, all `d_i >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FgAbelianGroup {
    pub free_rank: usize,
    #[serde(serialize_with = "crate::io::ser_bigint_vec")]
    pub invariant_factors: Vec<BigInt>,
}

impl FgAbelianGroup {
    pub fn trivial() -> Self {
        Self { free_rank: 0, invariant_factors: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        Self { free_rank: rank, invariant_factors: Vec::new() }
    }

    /// Normalises a list of cyclic orders (0 meaning infinite cyclic) into
    /// invariant-factor form.
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        let free_rank = orders.iter().filter(|d| d.is_zero()).count();
        let finite: Vec<BigInt> = orders.iter().filter(|d| !d.is_zero()).cloned().collect();
        let n = finite.len();
        let mut diag = IntMatrix::zeros(n, n);
        for (i, d) in finite.into_iter().enumerate() {
            diag.set(i, i, d);
        }
        let invariant_factors = snf(&diag)
            .invariant_factors()
            .into_iter()
            .filter(|d| !d.is_one())
            .collect();
        Self { free_rank, invariant_factors }
    }

    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion_order())
    }

    /// Largest invariant factor (1 for torsion-free groups).
    pub fn exponent(&self) -> BigInt {
        self.invariant_factors.last().cloned().unwrap_or_else(BigInt::one)
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.invariant_factors.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// Cokernel `Z^rows / im(a)` as an abstract group.
pub fn cokernel(a: &IntMatrix) -> FgAbelianGroup {
    let s = snf(a);
    let factors = s.invariant_factors();
    FgAbelianGroup {
        free_rank: a.rows() - factors.len(),
        invariant_factors: factors.into_iter().filter(|d| !d.is_one()).collect(),
    }
}
