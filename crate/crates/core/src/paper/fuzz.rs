//! Random morphisms of standard triangles `(1, b, c)` over `F_p`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::PaperError;
use crate::complexes::{hom_group, homotopic, ChainMap, Complex, ComplexError, Ring};
use crate::lattice::{modp, IntMatrix};
use crate::squares::{
    check_cartesian_witness, fits_vertical_iso, is_homotopy_cartesian, CommutativeSquare, SearchConfig, Verdict,
};
use crate::triangles::{standard_triangle, verify_triangle_morphism, Triangle, TriangleMorphism};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    pub p: u64,
    /// Largest rank in any degree.
    pub max_rank: usize,
    /// Complexes live in degrees `0..degrees`.
    pub degrees: usize,
    pub seed: u64,
    /// Attempts at a perturbation `c = c~ - psi h` before falling back to `c~`.
    pub perturb_attempts: usize,
}

impl FuzzConfig {
    pub fn new(p: u64, seed: u64) -> Self {
        Self { p, max_rank: 3, degrees: 4, seed, perturb_attempts: 4 }
    }
}

/// Two standard rows on `f: A -> B` and `f' = b f: A -> B'` with vertical
/// maps `(1, b, c)`; `c_tilde` is the cone-functoriality map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prop2Diagram {
    pub upper: Triangle,
    pub lower: Triangle,
    pub b: ChainMap,
    pub c: ChainMap,
    pub c_tilde: ChainMap,
}

impl Prop2Diagram {
    /// Builds the diagram with `c = c~`.
    pub fn standard(f: &ChainMap, b: &ChainMap) -> Result<Self, PaperError> {
        let upper = standard_triangle(f);
        let lower = standard_triangle(&b.compose(f)?);
        let c_tilde = cone_functoriality(b, &upper, &lower)?;
        Ok(Self { upper, lower, b: b.clone(), c: c_tilde.clone(), c_tilde })
    }

    pub fn morphism(&self) -> Result<TriangleMorphism, PaperError> {
        Ok(TriangleMorphism::new(
            self.upper.clone(),
            self.lower.clone(),
            ChainMap::identity(self.upper.x()),
            self.b.clone(),
            self.c.clone(),
        )?)
    }

    /// The middle square `(g, g', b, c)`.
    pub fn square(&self) -> Result<CommutativeSquare, PaperError> {
        Ok(CommutativeSquare::new(self.upper.g.clone(), self.lower.g.clone(), self.b.clone(), self.c.clone())?)
    }
}

/// `cone(f) -> cone(b f)`, `diag(b, 1)` in each degree.
fn cone_functoriality(b: &ChainMap, upper: &Triangle, lower: &Triangle) -> Result<ChainMap, PaperError> {
    let a = upper.x();
    let comps: Vec<(i64, IntMatrix)> = upper
        .z()
        .degrees()
        .map(|(i, _)| (i, IntMatrix::direct_sum(&b.component(i), &IntMatrix::identity(a.rank(i + 1)))))
        .collect();
    Ok(ChainMap::new(upper.z(), lower.z(), comps)?)
}

fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, p: u64) -> IntMatrix {
    let data = (0..rows * cols).map(|_| BigInt::from(rng.gen_range(0..p))).collect();
    IntMatrix::from_vec(rows, cols, data).expect("shape")
}

/// Random complex over `F_p` in degrees `0..degrees`, ranks at most
/// `max_rank`; each differential has rows in the left kernel of the
/// previous one.
pub fn random_complex<R: Rng>(rng: &mut R, p: u64, degrees: usize, max_rank: usize) -> Result<Complex, PaperError> {
    let ring = Ring::prime_field(p)?;
    let ranks: BTreeMap<i64, usize> = (0..degrees as i64).map(|i| (i, rng.gen_range(0..=max_rank))).collect();
    let mut diffs: Vec<(i64, IntMatrix)> = Vec::new();
    let mut prev: Option<IntMatrix> = None;
    for i in 0..degrees as i64 - 1 {
        let (rows, cols) = (ranks[&(i + 1)], ranks[&i]);
        let d = match &prev {
            None => random_matrix(rng, rows, cols, p),
            Some(prev) => {
                // rows v with v prev = 0, i.e. prev^T v^T = 0
                let t: Vec<modp::Row> = (0..prev.cols()).map(|j| modp::lift_vec(&prev.column(j), p)).collect();
                let kernel = modp::solve(&t, &vec![0; t.len()], cols, p).expect("homogeneous").1;
                let coeffs = random_matrix(rng, rows, kernel.len(), p);
                let basis = IntMatrix::from_rows(kernel.iter().map(|r| modp::to_bigint(r)).collect(), cols).map_err(ComplexError::from)?;
                (&coeffs * &basis).reduce_mod(&BigInt::from(p))
            }
        };
        prev = Some(d.clone());
        diffs.push((i, d));
    }
    Ok(Complex::new(ring, ranks, diffs)?)
}

/// Random chain map: a random combination of Hom-class representatives
/// plus a random null-homotopic map `d h + h d`.
pub fn random_map<R: Rng>(rng: &mut R, x: &Complex, y: &Complex) -> Result<ChainMap, PaperError> {
    let p = x.ring().prime().ok_or_else(|| PaperError::Replay("random maps need a prime field".into()))?;
    let hom = hom_group(x, y)?;
    let coeffs: Vec<BigInt> = hom.orders().iter().map(|_| BigInt::from(rng.gen_range(0..p))).collect();
    let base = hom.element(&coeffs);
    let degs: Vec<i64> = x.degrees().map(|(i, _)| i).collect();
    let h: BTreeMap<i64, IntMatrix> = degs.iter().map(|&i| (i, random_matrix(rng, y.rank(i - 1), x.rank(i), p))).collect();
    let get = |i: i64| h.get(&i).cloned().unwrap_or_else(|| IntMatrix::zeros(y.rank(i - 1), x.rank(i)));
    let comps: Vec<(i64, IntMatrix)> = degs
        .iter()
        .map(|&i| {
            let m = &(&base.component(i) + &(&y.differential(i - 1) * &get(i))) + &(&get(i + 1) * &x.differential(i));
            (i, m.reduce_mod(&BigInt::from(p)))
        })
        .collect();
    Ok(ChainMap::new(x, y, comps)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzRecord {
    pub index: u64,
    pub diagram: Prop2Diagram,
    /// `c` differs from `c~` by a nonzero `psi h`.
    pub perturbed: bool,
    /// Perturbations rejected because the third square stopped commuting.
    pub discarded: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FuzzStats {
    pub generated: usize,
    pub perturbed: usize,
    pub discarded: usize,
}

/// Diagram number `index` of the stream for `config`; deterministic in
/// `(seed, index)`.
pub fn fuzz_one(config: &FuzzConfig, index: u64) -> Result<FuzzRecord, PaperError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index);
    let (p, deg, mr) = (config.p, config.degrees, config.max_rank);
    let a = random_complex(&mut rng, p, deg, mr)?;
    let b_obj = random_complex(&mut rng, p, deg, mr)?;
    let bp_obj = random_complex(&mut rng, p, deg, mr)?;
    let f = random_map(&mut rng, &a, &b_obj)?;
    let b = random_map(&mut rng, &b_obj, &bp_obj)?;
    let mut diagram = Prop2Diagram::standard(&f, &b)?;
    let mut discarded = 0;
    let mut perturbed = false;
    let x1 = diagram.upper.h.target().clone();
    for _ in 0..config.perturb_attempts {
        let psi = random_map(&mut rng, &x1, diagram.lower.z())?;
        let shift = psi.compose(&diagram.upper.h)?;
        if shift.is_zero() {
            continue;
        }
        let c = diagram.c_tilde.sub(&shift)?;
        if homotopic(&diagram.lower.h.compose(&c)?, &diagram.upper.h)?.is_some() {
            diagram.c = c;
            perturbed = true;
            break;
        }
        discarded += 1;
    }
    verify_triangle_morphism(&diagram.morphism()?)?;
    Ok(FuzzRecord { index, diagram, perturbed, discarded })
}

/// The first `trials` diagrams of the stream, with aggregate counts.
pub fn fuzz_prop2(config: &FuzzConfig, trials: u64) -> Result<(Vec<FuzzRecord>, FuzzStats), PaperError> {
    let mut out = Vec::new();
    let mut stats = FuzzStats::default();
    for index in 0..trials {
        let r = fuzz_one(config, index)?;
        stats.generated += 1;
        stats.perturbed += usize::from(r.perturbed);
        stats.discarded += r.discarded;
        out.push(r);
    }
    Ok((out, stats))
}

/// Result of running every check on one fuzzed diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub index: u64,
    pub perturbed: bool,
    pub discarded: usize,
    /// Label of the cartesianness verdict.
    pub cartesian: &'static str,
    /// The returned witness passes the independent re-check.
    pub witness_ok: bool,
    /// Label of the vertical-fit verdict for the standard triangles on `b`, `c`.
    pub fit: &'static str,
    pub replay_ok: bool,
}

impl TrialOutcome {
    pub fn passed(&self) -> bool {
        self.cartesian == "yes" && self.witness_ok && self.fit == "yes" && self.replay_ok
    }
}

pub fn run_trial(record: &FuzzRecord, config: &SearchConfig) -> Result<TrialOutcome, PaperError> {
    let sq = record.diagram.square()?;
    let v = is_homotopy_cartesian(&sq, config)?;
    let witness_ok = match &v {
        Verdict::Yes(w) => check_cartesian_witness(&sq, &w.phi)?,
        _ => false,
    };
    let fit = fits_vertical_iso(&sq, &standard_triangle(&sq.b), &standard_triangle(&sq.c), config)?;
    let replay_ok = super::prop2_replay(&record.diagram)?.ok();
    Ok(TrialOutcome {
        index: record.index,
        perturbed: record.perturbed,
        discarded: record.discarded,
        cartesian: v.label(),
        witness_ok,
        fit: fit.label(),
        replay_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::cone;

    #[test]
    fn random_complexes_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in [2, 3, 5] {
            for _ in 0..30 {
                let c = random_complex(&mut rng, p, 4, 3).unwrap();
                c.validate().unwrap();
            }
        }
    }

    #[test]
    fn deterministic_stream() {
        let cfg = FuzzConfig::new(2, 42);
        let a = fuzz_prop2(&cfg, 5).unwrap();
        let b = fuzz_prop2(&cfg, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn emitted_diagrams_are_morphisms() {
        let cfg = FuzzConfig::new(3, 7);
        for index in 0..5 {
            let r = fuzz_one(&cfg, index).unwrap();
            verify_triangle_morphism(&r.diagram.morphism().unwrap()).unwrap();
            assert_eq!(r.diagram.lower.h.compose(&r.diagram.c_tilde).unwrap(), r.diagram.upper.h);
        }
    }

    #[test]
    fn functoriality_map_commutes_strictly() {
        let cfg = FuzzConfig::new(2, 3);
        let r = fuzz_one(&cfg, 0).unwrap();
        let d = &r.diagram;
        let ct = &d.c_tilde;
        assert_eq!(ct.compose(&d.upper.g).unwrap(), d.lower.g.compose(&d.b).unwrap());
        assert!(cone(&d.upper.f).complex == *d.upper.z());
    }
}
