//! Block-structured linear systems whose unknowns are matrix families
//! (map or homotopy components) and whose equations are matrix identities.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{Complex, ComplexError, Ring};
use crate::lattice::{modp, solve_linear, IntMatrix, LinearSolution};

#[derive(Clone, Debug)]
pub(crate) struct Block {
    pub degree: i64,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

/// Unknown matrices `X^i -> Y^{i + shift}` laid out row-major in a vector.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    blocks: Vec<Block>,
    index: BTreeMap<i64, usize>,
    pub start: usize,
    pub end: usize,
}

impl Layout {
    pub fn maps(source: &Complex, target: &Complex, shift: i64, start: usize) -> Self {
        let mut blocks = Vec::new();
        let mut index = BTreeMap::new();
        let mut off = start;
        for (i, c) in source.degrees() {
            let r = target.rank(i + shift);
            if r == 0 {
                continue;
            }
            index.insert(i, blocks.len());
            blocks.push(Block { degree: i, rows: r, cols: c, offset: off });
            off += r * c;
        }
        Self { blocks, index, start, end: off }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn block(&self, degree: i64) -> Option<&Block> {
        self.index.get(&degree).map(|&k| &self.blocks[k])
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Reads this layout's blocks out of a full solution vector.
    pub fn unpack(&self, x: &[BigInt]) -> Vec<(i64, IntMatrix)> {
        self.blocks
            .iter()
            .map(|b| {
                let data = x[b.offset..b.offset + b.rows * b.cols].to_vec();
                (b.degree, IntMatrix::from_vec(b.rows, b.cols, data).expect("block size"))
            })
            .collect()
    }

    /// Writes matrices into a vector of length `self.len()`.
    pub fn pack(&self, get: impl Fn(i64) -> IntMatrix) -> Vec<BigInt> {
        let mut v = Vec::with_capacity(self.len());
        for b in &self.blocks {
            v.extend(get(b.degree).entries().iter().cloned());
        }
        v
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Equation {
    offset: usize,
    rows: usize,
    cols: usize,
}

/// Sparse linear system `A x = b` in `nvars` unknowns.
#[derive(Clone, Debug)]
pub(crate) struct System {
    nvars: usize,
    rows: Vec<BTreeMap<usize, BigInt>>,
    rhs: Vec<BigInt>,
}

impl System {
    pub fn new(nvars: usize) -> Self {
        Self { nvars, rows: Vec::new(), rhs: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn equation(&mut self, rows: usize, cols: usize) -> Equation {
        let offset = self.rows.len();
        for _ in 0..rows * cols {
            self.rows.push(BTreeMap::new());
            self.rhs.push(BigInt::zero());
        }
        Equation { offset, rows, cols }
    }

    /// Adds `sign * L X R` to the left side of `eq`, where `X` is an unknown
    /// block and `None` stands for an identity factor.
    pub fn term(&mut self, eq: Equation, x: &Block, left: Option<&IntMatrix>, right: Option<&IntMatrix>, sign: i64) {
        let lrows = left.map_or(x.rows, |l| l.rows());
        let rcols = right.map_or(x.cols, |r| r.cols());
        assert_eq!((lrows, rcols), (eq.rows, eq.cols), "term shape");
        let lentries = |r: usize| -> Vec<(usize, BigInt)> {
            match left {
                None => vec![(r, BigInt::from(1))],
                Some(l) => (0..l.cols()).filter(|&a| !l.get(r, a).is_zero()).map(|a| (a, l.get(r, a).clone())).collect(),
            }
        };
        let rentries = |c: usize| -> Vec<(usize, BigInt)> {
            match right {
                None => vec![(c, BigInt::from(1))],
                Some(m) => (0..m.rows()).filter(|&b| !m.get(b, c).is_zero()).map(|b| (b, m.get(b, c).clone())).collect(),
            }
        };
        let rcache: Vec<Vec<(usize, BigInt)>> = (0..eq.cols).map(rentries).collect();
        for r in 0..eq.rows {
            let ls = lentries(r);
            if ls.is_empty() {
                continue;
            }
            for (c, rs) in rcache.iter().enumerate() {
                let row = &mut self.rows[eq.offset + r * eq.cols + c];
                for (a, la) in &ls {
                    for (b, rb) in rs {
                        let var = x.offset + a * x.cols + b;
                        let coef = la * rb * sign;
                        let e = row.entry(var).or_insert_with(BigInt::zero);
                        *e += coef;
                    }
                }
            }
        }
    }

    /// Adds `sign * m` to the right side of `eq`.
    pub fn constant(&mut self, eq: Equation, m: &IntMatrix, sign: i64) {
        assert_eq!(m.shape(), (eq.rows, eq.cols), "constant shape");
        for r in 0..eq.rows {
            for c in 0..eq.cols {
                self.rhs[eq.offset + r * eq.cols + c] += m.get(r, c) * sign;
            }
        }
    }

    pub fn matrix(&self) -> IntMatrix {
        let mut a = IntMatrix::zeros(self.rows.len(), self.nvars);
        for (i, row) in self.rows.iter().enumerate() {
            for (&j, v) in row {
                a.set(i, j, v.clone());
            }
        }
        a
    }

    pub fn rhs(&self) -> &[BigInt] {
        &self.rhs
    }

    fn rows_mod_p(&self, p: u64) -> Vec<modp::Row> {
        self.rows
            .iter()
            .map(|row| {
                let mut v = vec![0u64; self.nvars];
                for (&j, x) in row {
                    v[j] = modp::lift(x, p);
                }
                v
            })
            .collect()
    }

    /// Solution set over the ring. For `Z/m` with composite `m` the kernel
    /// is a basis of the full solution lattice (containing `m Z^n`).
    pub fn solve(&self, ring: &Ring) -> Result<Option<LinearSolution>, ComplexError> {
        if self.nvars == 0 {
            let ok = self.rhs.iter().all(|b| ring.normalize(b).is_zero());
            return Ok(ok.then(|| LinearSolution { particular: Vec::new(), kernel: Vec::new() }));
        }
        match ring {
            Ring::Integers => Ok(solve_linear(&self.matrix(), &self.rhs, None)?),
            Ring::Mod { modulus, prime: true } => {
                let p = modulus.to_u64().expect("prime fits in u64");
                let rows = self.rows_mod_p(p);
                let b = modp::lift_vec(&self.rhs, p);
                Ok(modp::solve(&rows, &b, self.nvars, p).map(|(x, k)| LinearSolution {
                    particular: modp::to_bigint(&x),
                    kernel: k.iter().map(|v| modp::to_bigint(v)).collect(),
                }))
            }
            Ring::Mod { modulus, .. } => Ok(solve_linear(&self.matrix(), &self.rhs, Some(modulus))?),
        }
    }
}

/// Adds the chain-condition equations `d_T phi - phi d_S = 0` for the map
/// unknowns in `layout` (shift 0).
pub(crate) fn chain_equations(sys: &mut System, layout: &Layout, s: &Complex, t: &Complex) {
    for (i, _) in s.degrees() {
        let (rows, cols) = (t.rank(i + 1), s.rank(i));
        if rows == 0 || cols == 0 {
            continue;
        }
        let eq = sys.equation(rows, cols);
        if let Some(b) = layout.block(i) {
            sys.term(eq, b, Some(&t.differential(i)), None, 1);
        }
        if let Some(b) = layout.block(i + 1) {
            sys.term(eq, b, None, Some(&s.differential(i)), -1);
        }
    }
}

/// Equation blocks `E^i` (one per degree with `S^i, T^i` nonzero) with the
/// terms `d_T h + h d_S` for homotopy unknowns `h` in `hl` (shift -1).
pub(crate) fn boundary_equations(
    sys: &mut System,
    hl: &Layout,
    s: &Complex,
    t: &Complex,
) -> BTreeMap<i64, Equation> {
    let mut eqs = BTreeMap::new();
    for (i, c) in s.degrees() {
        let r = t.rank(i);
        if r == 0 {
            continue;
        }
        let eq = sys.equation(r, c);
        if let Some(b) = hl.block(i) {
            sys.term(eq, b, Some(&t.differential(i - 1)), None, 1);
        }
        if let Some(b) = hl.block(i + 1) {
            sys.term(eq, b, None, Some(&s.differential(i)), 1);
        }
        eqs.insert(i, eq);
    }
    eqs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_term_system() {
        // 2 X = 4 with X 1x1
        let mut sys = System::new(1);
        let eq = sys.equation(1, 1);
        let b = Block { degree: 0, rows: 1, cols: 1, offset: 0 };
        sys.term(eq, &b, Some(&IntMatrix::from_i64(&[&[2]])), None, 1);
        sys.constant(eq, &IntMatrix::from_i64(&[&[4]]), 1);
        let sol = sys.solve(&Ring::Integers).unwrap().unwrap();
        assert_eq!(sol.particular, vec![BigInt::from(2)]);
        assert!(sys.solve(&Ring::modulo(2).unwrap()).unwrap().unwrap().kernel.len() == 1);
    }

    #[test]
    fn term_places_coefficients() {
        // L X R with L = [1 2], X 2x2, R = [[3],[0]] gives 3 x00 + 6 x10
        let mut sys = System::new(4);
        let eq = sys.equation(1, 1);
        let b = Block { degree: 0, rows: 2, cols: 2, offset: 0 };
        sys.term(eq, &b, Some(&IntMatrix::from_i64(&[&[1, 2]])), Some(&IntMatrix::from_i64(&[&[3], &[0]])), 1);
        assert_eq!(sys.matrix(), IntMatrix::from_i64(&[&[3, 0, 6, 0]]));
    }
}
