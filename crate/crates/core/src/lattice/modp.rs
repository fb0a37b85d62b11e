//! Dense linear algebra over a prime field `F_p` with machine words.
//!
//! Used as the fast path whenever the coefficient ring is a prime field;
//! the general path goes through the integer Smith form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

pub type Row = Vec<u64>;

pub fn inv(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow(a, p - 2, p)
}

pub fn pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

pub fn lift(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits in u64")
}

pub fn lift_vec(v: &[BigInt], p: u64) -> Row {
    v.iter().map(|x| lift(x, p)).collect()
}

pub fn to_bigint(v: &[u64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Incrementally built row-echelon basis of a subspace of `F_p^n`.
#[derive(Clone, Debug)]
pub struct Echelon {
    p: u64,
    n: usize,
    /// Rows normalised to leading coefficient 1, with their pivot column.
    rows: Vec<(usize, Row)>,
}

impl Echelon {
    pub fn new(n: usize, p: u64) -> Self {
        Self { p, n, rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn reduce(&self, v: &[u64]) -> Row {
        let p = self.p;
        let mut w = v.to_vec();
        for (piv, r) in &self.rows {
            let c = w[*piv];
            if c != 0 {
                for (x, y) in w.iter_mut().zip(r) {
                    *x = (*x + (p - c) * y) % p;
                }
            }
        }
        w
    }

    /// Adds `v`; returns whether the span grew.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let w = self.reduce(v);
        let Some(piv) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let p = self.p;
        let s = inv(w[piv], p);
        let w: Row = w.iter().map(|x| x * s % p).collect();
        for (_, r) in self.rows.iter_mut() {
            let c = r[piv];
            if c != 0 {
                for (x, y) in r.iter_mut().zip(&w) {
                    *x = (*x + (p - c) * y) % p;
                }
            }
        }
        self.rows.push((piv, w));
        true
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Row], ncols: usize, p: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(i) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, i);
        let s = inv(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = *x * s % p;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0 {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Row], ncols: usize, p: u64) -> usize {
    let mut w = m.to_vec();
    rref(&mut w, ncols, p).len()
}

/// Solves `a x = b` over `F_p`; `a` is given by rows of length `n`.
/// Returns a particular solution and a basis of the null space.
pub fn solve(a: &[Row], b: &[u64], n: usize, p: u64) -> Option<(Row, Vec<Row>)> {
    assert_eq!(a.len(), b.len(), "rhs length mismatch");
    let mut aug: Vec<Row> = a
        .iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut row = r.clone();
            row.push(bi % p);
            row
        })
        .collect();
    let pivots = rref(&mut aug, n + 1, p);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![0; n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][n];
    }
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; n];
        for &c in &pivots {
            v[c] = true;
        }
        v
    };
    let mut kernel = Vec::new();
    for free in (0..n).filter(|&c| !is_pivot[c]) {
        let mut k = vec![0; n];
        k[free] = 1;
        for (r, &c) in pivots.iter().enumerate() {
            k[c] = (p - aug[r][free]) % p;
        }
        kernel.push(k);
    }
    Some((x, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_small_system_mod_5() {
        // x + 2y = 3, 2x + 4y = 2 is inconsistent mod 5 (2 * 3 = 1).
        assert!(solve(&[vec![1, 2], vec![2, 4]], &[3, 2], 2, 5).is_none());
        let (x, k) = solve(&[vec![1, 2]], &[3], 2, 5).unwrap();
        assert_eq!((x[0] + 2 * x[1]) % 5, 3);
        assert_eq!(k.len(), 1);
        assert_eq!((k[0][0] + 2 * k[0][1]) % 5, 0);
    }

    #[test]
    fn echelon_spans() {
        let mut e = Echelon::new(3, 2);
        assert!(e.insert(&[1, 1, 0]));
        assert!(e.insert(&[0, 1, 1]));
        assert!(!e.insert(&[1, 0, 1]));
        assert!(e.contains(&[1, 0, 1]));
        assert!(!e.contains(&[1, 0, 0]));
        assert_eq!(e.dim(), 2);
    }
}
