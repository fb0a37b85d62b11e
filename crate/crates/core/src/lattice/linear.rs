use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{snf, IntMatrix, LatticeError};

/// All solutions of a linear system: `particular + span(kernel)`, plus
/// `m * Z^n` for a system taken modulo `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSolution {
    pub particular: Vec<BigInt>,
    pub kernel: Vec<Vec<BigInt>>,
}

fn check_dims(a: &IntMatrix, b: &[BigInt]) -> Result<(), LatticeError> {
    if a.rows() != b.len() {
        return Err(LatticeError::Shape(format!(
            "system has {} equations but right-hand side has {} entries",
            a.rows(),
            b.len()
        )));
    }
    Ok(())
}

fn augment_modulus(a: &IntMatrix, m: &BigInt) -> IntMatrix {
    IntMatrix::hstack(a, &IntMatrix::scalar(a.rows(), m.clone()))
}

/// Solves `a x = b` over `Z`, or modulo `m` when given.
///
/// The modular case augments `a` with `m * I` and solves over `Z`; the
/// returned kernel is then a basis of the full lattice `{x : a x = 0 mod m}`.
pub fn solve_linear(
    a: &IntMatrix,
    b: &[BigInt],
    modulus: Option<&BigInt>,
) -> Result<Option<LinearSolution>, LatticeError> {
    check_dims(a, b)?;
    match modulus {
        None => Ok(solve_integer(a, b)),
        Some(m) => {
            if *m < BigInt::from(2) {
                return Err(LatticeError::Modulus(m.clone()));
            }
            let n = a.cols();
            let aug = augment_modulus(a, m);
            let Some(sol) = solve_integer(&aug, b) else {
                return Ok(None);
            };
            let particular: Vec<BigInt> =
                sol.particular[..n].iter().map(|x| x.mod_floor(m)).collect();
            let gens: Vec<Vec<BigInt>> = sol.kernel.iter().map(|k| k[..n].to_vec()).collect();
            let basis = lattice_basis(n, &gens);
            Ok(Some(LinearSolution { particular, kernel: basis }))
        }
    }
}

fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<LinearSolution> {
    let s = snf(a);
    let y = s.u.mul_vec(b);
    let factors = s.invariant_factors();
    let r = factors.len();
    let mut z = vec![BigInt::zero(); a.cols()];
    for (i, yi) in y.iter().enumerate() {
        if i < r {
            let (q, rem) = yi.div_rem(&factors[i]);
            if !rem.is_zero() {
                return None;
            }
            z[i] = q;
        } else if !yi.is_zero() {
            return None;
        }
    }
    let particular = s.v.mul_vec(&z);
    let kernel = (r..a.cols()).map(|j| s.v.column(j)).collect();
    Some(LinearSolution { particular, kernel })
}

/// A modulus `m >= 2` such that `a x = b` has no solution modulo `m`, or
/// `None` when the system is solvable over `Z`.
pub fn insolubility_modulus(a: &IntMatrix, b: &[BigInt]) -> Result<Option<BigInt>, LatticeError> {
    check_dims(a, b)?;
    let s = snf(a);
    let y = s.u.mul_vec(b);
    let factors = s.invariant_factors();
    for (i, yi) in y.iter().enumerate() {
        if i < factors.len() {
            if !yi.is_multiple_of(&factors[i]) {
                return Ok(Some(factors[i].clone()));
            }
        } else if !yi.is_zero() {
            return Ok(Some(yi.abs() + BigInt::one()));
        }
    }
    Ok(None)
}

/// A basis (as column vectors) of the lattice spanned by `gens` in `Z^n`.
pub fn lattice_basis(n: usize, gens: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if gens.is_empty() {
        return Vec::new();
    }
    let m = IntMatrix::from_columns(n, gens);
    let s = snf(&m);
    s.invariant_factors()
        .iter()
        .enumerate()
        .map(|(j, d)| s.u_inv.column(j).iter().map(|x| x * d).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn two_x_equals_four() {
        let a = IntMatrix::from_i64(&[&[2]]);
        let sol = solve_linear(&a, &v(&[4]), None).unwrap().unwrap();
        assert_eq!(sol.particular, v(&[2]));
        assert!(sol.kernel.is_empty());
    }

    #[test]
    fn nine_x_minus_three_is_insoluble() {
        let a = IntMatrix::from_i64(&[&[9]]);
        assert!(solve_linear(&a, &v(&[-3]), None).unwrap().is_none());
        assert!(solve_linear(&a, &v(&[-3]), Some(&BigInt::from(9))).unwrap().is_none());
        // brute force over residues mod 9
        assert!((0..9).all(|x| (9 * x + 3) % 9 != 0));
        assert_eq!(insolubility_modulus(&a, &v(&[-3])).unwrap(), Some(BigInt::from(9)));
    }

    #[test]
    fn three_x_six_mod_nine() {
        let a = IntMatrix::from_i64(&[&[3]]);
        let m = BigInt::from(9);
        let sol = solve_linear(&a, &v(&[6]), Some(&m)).unwrap().unwrap();
        let brute: Vec<i64> = (0..9).filter(|x| (3 * x - 6) % 9 == 0).collect();
        assert_eq!(brute, vec![2, 5, 8]);
        // kernel lattice is 3Z, so the residues are particular + 3k
        assert_eq!(sol.kernel.len(), 1);
        assert_eq!(sol.kernel[0][0].abs(), BigInt::from(3));
        let mut got: Vec<BigInt> =
            (0..3i64).map(|k: i64| (&sol.particular[0] + &sol.kernel[0][0] * k).mod_floor(&m)).collect();
        got.sort();
        assert_eq!(got, v(&[2, 5, 8]));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = IntMatrix::zeros(2, 2);
        assert!(solve_linear(&a, &v(&[1]), None).is_err());
    }

    #[test]
    fn zero_rhs_row_of_zero_matrix() {
        let a = IntMatrix::zeros(1, 2);
        assert!(solve_linear(&a, &v(&[1]), None).unwrap().is_none());
        assert_eq!(insolubility_modulus(&a, &v(&[1])).unwrap(), Some(BigInt::from(2)));
        let sol = solve_linear(&a, &v(&[0]), None).unwrap().unwrap();
        assert_eq!(sol.kernel.len(), 2);
    }
}
