use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// `u * a * v == d` with `u`, `v` unimodular and `d` in Smith form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `u`, accumulated alongside it.
    pub u_inv: IntMatrix,
    /// Inverse of `v`, accumulated alongside it.
    pub v_inv: IntMatrix,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries `d_1 | d_2 | ... | d_r`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

struct Workspace {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Workspace {
    fn row_add(&mut self, target: usize, source: usize, c: &BigInt) {
        self.a.add_row_multiple(target, source, c);
        self.u.add_row_multiple(target, source, c);
        self.u_inv.add_col_multiple(source, target, &-c);
    }

    fn col_add(&mut self, target: usize, source: usize, c: &BigInt) {
        self.a.add_col_multiple(target, source, c);
        self.v.add_col_multiple(target, source, c);
        self.v_inv.add_row_multiple(source, target, &-c);
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    fn row_negate(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    /// Smallest nonzero |entry| in the trailing block, ties broken by
    /// lowest (row, col).
    fn pivot(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in k..self.a.rows() {
            for j in k..self.a.cols() {
                let x = self.a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let ax = x.abs();
                if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                    best = Some((i, j, ax));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }
}

/// Smith normal form with transformation matrices.
///
/// Pivoting always takes the nonzero entry of minimal absolute value,
/// lowest (row, col) first, so the returned `u`, `v` are reproducible.
pub fn snf(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = a.shape();
    let mut w = Workspace {
        a: a.clone(),
        u: IntMatrix::identity(m),
        u_inv: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
        v_inv: IntMatrix::identity(n),
    };
    for k in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = w.pivot(k) else {
                return finish(w);
            };
            w.row_swap(k, pi);
            w.col_swap(k, pj);
            let p = w.a.get(k, k).clone();
            let mut clean = true;
            for i in k + 1..m {
                let q = w.a.get(i, k) / &p;
                w.row_add(i, k, &-q);
                clean &= w.a.get(i, k).is_zero();
            }
            for j in k + 1..n {
                let q = w.a.get(k, j) / &p;
                w.col_add(j, k, &-q);
                clean &= w.a.get(k, j).is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (k + 1..m)
                .find(|&i| (k + 1..n).any(|j| !(w.a.get(i, j) % &p).is_zero()));
            match offender {
                Some(i) => w.row_add(k, i, &BigInt::from(1)),
                None => break,
            }
        }
        if w.a.get(k, k).is_negative() {
            w.row_negate(k);
        }
    }
    finish(w)
}

fn finish(w: Workspace) -> SmithDecomposition {
    SmithDecomposition { u: w.u, d: w.a, v: w.v, u_inv: w.u_inv, v_inv: w.v_inv }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn check(a: &IntMatrix) -> SmithDecomposition {
        let s = snf(a);
        assert_eq!(&(&s.u * a) * &s.v, s.d);
        assert_eq!(&s.u * &s.u_inv, IntMatrix::identity(a.rows()));
        assert_eq!(&s.v * &s.v_inv, IntMatrix::identity(a.cols()));
        assert!(s.d.is_diagonal());
        let f = s.invariant_factors();
        for w in f.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        s
    }

    #[test]
    fn identity_and_zero() {
        let s = check(&IntMatrix::identity(2));
        assert_eq!(s.d, IntMatrix::identity(2));
        let s = check(&IntMatrix::zeros(2, 2));
        assert!(s.d.is_zero());
    }

    #[test]
    fn two_four_six_eight() {
        // d1 = gcd(2,4,6,8) = 2 and d1*d2 = |2*8 - 4*6| = 8.
        let s = check(&IntMatrix::from_i64(&[&[2, 4], &[6, 8]]));
        assert_eq!(s.invariant_factors(), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn rectangular_and_empty() {
        check(&IntMatrix::zeros(0, 3));
        check(&IntMatrix::zeros(2, 0));
        let s = check(&IntMatrix::from_i64(&[&[-9], &[3]]));
        assert_eq!(s.invariant_factors(), vec![BigInt::from(3)]);
        let s = check(&IntMatrix::from_i64(&[&[-6, 111, -36, 6], &[5, -672, 210, 74], &[0, -255, 81, 24], &[-7, 255, -81, -10]]));
        let want: Vec<BigInt> = [1, 3, 21].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(s.invariant_factors(), want);
    }
}
