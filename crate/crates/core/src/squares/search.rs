//! Search for a homotopy equivalence `phi: D -> T` subject to
//! homotopy-commutativity constraints, with modular refutation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::SquareError;
use crate::complexes::system::{chain_equations, Layout, System};
use crate::complexes::{
    boundary_image, hom_group, homology, homotopic, is_equivalence_fast, is_homotopy_equivalence, ChainMap, Complex,
    EquivalenceWitness, Homotopy, Ring,
};
use crate::io;
use crate::lattice::{insolubility_modulus, AffineCoset};

/// A homotopy-commutativity requirement on the unknown `phi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// `phi o with ~ required`, with `with: S -> D`, `required: S -> T`.
    Pre { with: ChainMap, required: ChainMap },
    /// `with o phi ~ required`, with `with: T -> S`, `required: D -> S`.
    Post { with: ChainMap, required: ChainMap },
}

impl Constraint {
    fn reduce_mod(&self, m: &BigInt) -> Result<Self, SquareError> {
        Ok(match self {
            Constraint::Pre { with, required } => {
                Constraint::Pre { with: with.reduce_mod(m)?, required: required.reduce_mod(m)? }
            }
            Constraint::Post { with, required } => {
                Constraint::Post { with: with.reduce_mod(m)?, required: required.reduce_mod(m)? }
            }
        })
    }

    /// The two maps that must be homotopic for a given `phi`.
    fn sides(&self, phi: &ChainMap) -> Result<(ChainMap, ChainMap), SquareError> {
        Ok(match self {
            Constraint::Pre { with, required } => (phi.compose(with)?, required.clone()),
            Constraint::Post { with, required } => (with.compose(phi)?, required.clone()),
        })
    }

    fn complexes(&self) -> [&Complex; 2] {
        match self {
            Constraint::Pre { with, .. } => [with.source(), with.target()],
            Constraint::Post { with, .. } => [with.source(), with.target()],
        }
    }
}

/// Search bounds and the extra modulus schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Range `-bound..=bound` for free Hom-class coordinates over `Z`.
    pub coeff_bound: u32,
    /// Largest coset that is enumerated exhaustively.
    pub coset_cap: u64,
    /// Moduli tried after the homology-derived ones.
    pub moduli: Vec<BigInt>,
    /// Random coset members tried before exhaustive enumeration.
    pub samples: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { coeff_bound: 2, coset_cap: 1 << 20, moduli: Vec::new(), samples: 64, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefutationRoute {
    /// The constraint system itself has no solution modulo `m`.
    Insoluble,
    /// Every class of the constraint-satisfying coset mod `m` was tested.
    CosetExhausted,
    /// All equivalences `D -> T` up to homotopy were listed over `Z`
    /// (an automorphism orbit of one of them) and each fails mod `m`.
    AutomorphismOrbit,
}

impl RefutationRoute {
    pub fn as_str(&self) -> &'static str {
        match self {
            RefutationRoute::Insoluble => "insoluble",
            RefutationRoute::CosetExhausted => "coset-exhausted",
            RefutationRoute::AutomorphismOrbit => "automorphism-orbit",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YesWitness {
    pub phi: ChainMap,
    pub equivalence: EquivalenceWitness,
    /// One homotopy per constraint, in order.
    pub constraint_homotopies: Vec<Homotopy>,
    pub route: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    pub modulus: BigInt,
    pub route: RefutationRoute,
    /// Classes examined: coset cardinality, or number of orbit candidates.
    pub examined: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownRecord {
    pub reason: String,
    pub moduli_tried: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes(Box<YesWitness>),
    NoCertified(Refutation),
    Unknown(UnknownRecord),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn modulus(&self) -> Option<&BigInt> {
        match self {
            Verdict::NoCertified(r) => Some(&r.modulus),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Yes(_) => "yes",
            Verdict::NoCertified(_) => "no",
            Verdict::Unknown(_) => "unknown",
        }
    }

    /// Exit-code convention: 0 yes, 1 certified no, 2 unknown.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Yes(_) => 0,
            Verdict::NoCertified(_) => 1,
            Verdict::Unknown(_) => 2,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Verdict::Yes(w) => json!({
                "verdict": "yes",
                "modulus": null,
                "witness": {
                    "route": w.route,
                    "phi": io::chain_map_to_json(&w.phi),
                    "constraint_homotopies": w.constraint_homotopies.iter().map(io::homotopy_to_json).collect::<Vec<_>>(),
                },
            }),
            Verdict::NoCertified(r) => json!({
                "verdict": "no",
                "modulus": r.modulus.to_string(),
                "witness": { "route": r.route.as_str(), "examined": r.examined.to_string() },
            }),
            Verdict::Unknown(u) => json!({
                "verdict": "unknown",
                "modulus": null,
                "witness": {
                    "reason": u.reason,
                    "moduli_tried": u.moduli_tried.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                },
            }),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Verdict::Yes(w) => format!("yes (via {})", w.route),
            Verdict::NoCertified(r) => {
                format!("no, certified modulo {} ({}, {} classes)", r.modulus, r.route.as_str(), r.examined)
            }
            Verdict::Unknown(u) => format!("unknown ({})", u.reason),
        }
    }
}

/// Source, target and constraints of one search.
#[derive(Clone, Debug)]
pub struct Problem {
    pub source: Complex,
    pub target: Complex,
    pub constraints: Vec<Constraint>,
}

/// Outcome of solving the constraint system.
enum ClassSet {
    /// No solution; the modulus witnesses it.
    Insoluble(BigInt),
    Coset { coset: AffineCoset, layout: Layout },
}

impl Problem {
    pub fn new(source: &Complex, target: &Complex, constraints: Vec<Constraint>) -> Result<Self, SquareError> {
        if source.ring() != target.ring() {
            return Err(SquareError::Shape("source and target rings differ".into()));
        }
        for (k, c) in constraints.iter().enumerate() {
            let ok = match c {
                Constraint::Pre { with, required } => {
                    with.target() == source && required.source() == with.source() && required.target() == target
                }
                Constraint::Post { with, required } => {
                    with.source() == target && required.source() == source && required.target() == with.target()
                }
            };
            if !ok {
                return Err(SquareError::Shape(format!("constraint {k} is not composable with phi")));
            }
        }
        Ok(Self { source: source.clone(), target: target.clone(), constraints })
    }

    pub fn ring(&self) -> &Ring {
        self.source.ring()
    }

    pub fn reduce_mod(&self, m: &BigInt) -> Result<Self, SquareError> {
        Ok(Self {
            source: self.source.reduce_mod(m)?,
            target: self.target.reduce_mod(m)?,
            constraints: self.constraints.iter().map(|c| c.reduce_mod(m)).collect::<Result<_, _>>()?,
        })
    }

    /// Constraint homotopies for a fixed `phi`, if all exist.
    pub fn satisfies(&self, phi: &ChainMap) -> Result<Option<Vec<Homotopy>>, SquareError> {
        let mut out = Vec::with_capacity(self.constraints.len());
        for c in &self.constraints {
            let (lhs, rhs) = c.sides(phi)?;
            match homotopic(&lhs, &rhs)? {
                Some(h) => out.push(h),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    /// The linear system in `phi` (unless fixed) and one homotopy per
    /// constraint.
    fn system(&self, fixed: Option<&ChainMap>) -> (System, Layout) {
        let (d, t) = (&self.source, &self.target);
        let phi_layout = Layout::maps(d, t, 0, 0);
        let mut off = if fixed.is_some() { 0 } else { phi_layout.len() };
        let mut h_layouts = Vec::new();
        for c in &self.constraints {
            let hl = match c {
                Constraint::Pre { with, .. } => Layout::maps(with.source(), t, -1, off),
                Constraint::Post { with, .. } => Layout::maps(d, with.target(), -1, off),
            };
            off = hl.end;
            h_layouts.push(hl);
        }
        let mut sys = System::new(off);
        if fixed.is_none() {
            chain_equations(&mut sys, &phi_layout, d, t);
        }
        for (c, hl) in self.constraints.iter().zip(&h_layouts) {
            match c {
                Constraint::Pre { with, required } => {
                    let s = with.source();
                    for (i, cols) in s.degrees() {
                        let rows = t.rank(i);
                        if rows == 0 {
                            continue;
                        }
                        let eq = sys.equation(rows, cols);
                        match fixed {
                            None => {
                                if let Some(b) = phi_layout.block(i) {
                                    sys.term(eq, b, None, Some(&with.component(i)), 1);
                                }
                            }
                            Some(phi) => sys.constant(eq, &(&phi.component(i) * &with.component(i)), -1),
                        }
                        if let Some(b) = hl.block(i) {
                            sys.term(eq, b, Some(&t.differential(i - 1)), None, -1);
                        }
                        if let Some(b) = hl.block(i + 1) {
                            sys.term(eq, b, None, Some(&s.differential(i)), -1);
                        }
                        sys.constant(eq, &required.component(i), 1);
                    }
                }
                Constraint::Post { with, required } => {
                    let s = with.target();
                    for (i, cols) in d.degrees() {
                        let rows = s.rank(i);
                        if rows == 0 {
                            continue;
                        }
                        let eq = sys.equation(rows, cols);
                        match fixed {
                            None => {
                                if let Some(b) = phi_layout.block(i) {
                                    sys.term(eq, b, Some(&with.component(i)), None, 1);
                                }
                            }
                            Some(phi) => sys.constant(eq, &(&with.component(i) * &phi.component(i)), -1),
                        }
                        if let Some(b) = hl.block(i) {
                            sys.term(eq, b, Some(&s.differential(i - 1)), None, -1);
                        }
                        if let Some(b) = hl.block(i + 1) {
                            sys.term(eq, b, None, Some(&d.differential(i)), -1);
                        }
                        sys.constant(eq, &required.component(i), 1);
                    }
                }
            }
        }
        (sys, phi_layout)
    }

    /// Homotopy classes of chain maps satisfying all constraints.
    fn class_set(&self) -> Result<ClassSet, SquareError> {
        let ring = self.ring();
        let (sys, layout) = self.system(None);
        let Some(sol) = sys.solve(ring)? else {
            let m = match ring.modulus() {
                Some(m) => m.clone(),
                None => insolubility_modulus(&sys.matrix(), sys.rhs())?.expect("insoluble over Z"),
            };
            return Ok(ClassSet::Insoluble(m));
        };
        let n = layout.len();
        let particular = sol.particular[..n].to_vec();
        let kernel: Vec<Vec<_>> =
            sol.kernel.iter().map(|k| k[..n].to_vec()).filter(|k| k.iter().any(|x| !x.is_zero())).collect();
        let relations = boundary_image(&self.source, &self.target, &layout)?;
        let coset = AffineCoset::new(n, ring.modulus().cloned(), particular, &kernel, &relations, ring.is_prime_field());
        Ok(ClassSet::Coset { coset, layout })
    }

    /// Modulus witnessing that `phi` violates the constraints over `Z`.
    fn obstruction(&self, phi: &ChainMap) -> Result<Option<BigInt>, SquareError> {
        let (sys, _) = self.system(Some(phi));
        if sys.nvars() == 0 {
            return Ok(sys.rhs().iter().find(|x| !x.is_zero()).map(|x| num_traits::Signed::abs(x) + 1));
        }
        Ok(insolubility_modulus(&sys.matrix(), sys.rhs())?)
    }

    fn map_from(&self, layout: &Layout, v: &[BigInt]) -> Result<ChainMap, SquareError> {
        Ok(ChainMap::new(&self.source, &self.target, layout.unpack(v))?)
    }

    /// Full re-verification of a candidate into a Yes-witness.
    fn confirm(&self, phi: ChainMap, route: &'static str) -> Result<Option<Verdict>, SquareError> {
        let Some(equivalence) = is_homotopy_equivalence(&phi)? else {
            return Ok(None);
        };
        let Some(constraint_homotopies) = self.satisfies(&phi)? else {
            return Ok(None);
        };
        Ok(Some(Verdict::Yes(Box::new(YesWitness { phi, equivalence, constraint_homotopies, route }))))
    }

    /// Lcm of the torsion exponents of the homology of every complex involved.
    fn homology_modulus(&self) -> Result<Option<BigInt>, SquareError> {
        if *self.ring() != Ring::Integers {
            return Ok(None);
        }
        let mut all: Vec<&Complex> = vec![&self.source, &self.target];
        for c in &self.constraints {
            all.extend(c.complexes());
        }
        let mut m = BigInt::one();
        for c in all {
            for g in homology(c)?.values() {
                m = m.lcm(&g.exponent());
            }
        }
        Ok((m > BigInt::one()).then_some(m))
    }

    fn schedule(&self, config: &SearchConfig) -> Result<Vec<BigInt>, SquareError> {
        let mut out: Vec<BigInt> = Vec::new();
        let extra = config.moduli.iter().cloned();
        for m in self.homology_modulus()?.into_iter().chain(extra) {
            if m >= BigInt::from(2) && !out.contains(&m) {
                out.push(m);
            }
        }
        Ok(out)
    }
}

/// Looks for an equivalence `D -> T` satisfying every constraint.
pub fn find_compatible_equivalence(
    source: &Complex,
    target: &Complex,
    constraints: Vec<Constraint>,
    config: &SearchConfig,
) -> Result<Verdict, SquareError> {
    let p = Problem::new(source, target, constraints)?;
    search(&p, &[], config)
}

/// Modular outcome for one modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModularOutcome {
    Refuted(Refutation),
    /// A class mod `m` that is an equivalence and satisfies the constraints.
    Witness(ChainMap),
    /// Coset too large to exhaust.
    Overflow,
}

/// Reduces an integral problem mod `m` and exhausts the coset of
/// constraint-satisfying classes.
pub fn modular_check(p: &Problem, m: &BigInt, config: &SearchConfig) -> Result<ModularOutcome, SquareError> {
    let reduced = p.reduce_mod(m)?;
    match reduced.class_set()? {
        ClassSet::Insoluble(_) => Ok(ModularOutcome::Refuted(Refutation {
            modulus: m.clone(),
            route: RefutationRoute::Insoluble,
            examined: BigInt::zero(),
        })),
        ClassSet::Coset { coset, layout } => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            for _ in 0..config.samples {
                let phi = reduced.map_from(&layout, &coset.sample(&mut rng, 0))?;
                if is_equivalence_fast(&phi)? {
                    return Ok(ModularOutcome::Witness(phi));
                }
            }
            let Ok(iter) = coset.enumerate(config.coset_cap) else {
                return Ok(ModularOutcome::Overflow);
            };
            for v in iter {
                let phi = reduced.map_from(&layout, &v)?;
                if is_equivalence_fast(&phi)? {
                    return Ok(ModularOutcome::Witness(phi));
                }
            }
            Ok(ModularOutcome::Refuted(Refutation {
                modulus: m.clone(),
                route: RefutationRoute::CosetExhausted,
                examined: coset.cardinality().expect("finite coset"),
            }))
        }
    }
}

pub(crate) fn search(p: &Problem, candidates: &[ChainMap], config: &SearchConfig) -> Result<Verdict, SquareError> {
    let (coset, layout) = match p.class_set()? {
        ClassSet::Insoluble(m) => {
            return Ok(Verdict::NoCertified(Refutation {
                modulus: m,
                route: RefutationRoute::Insoluble,
                examined: BigInt::zero(),
            }))
        }
        ClassSet::Coset { coset, layout } => (coset, layout),
    };

    let mut cands: Vec<ChainMap> = Vec::new();
    if p.source == p.target {
        cands.push(ChainMap::identity(&p.source));
    }
    cands.extend(candidates.iter().cloned());
    for c in cands {
        if is_equivalence_fast(&c)? {
            if let Some(v) = p.confirm(c, "candidate")? {
                return Ok(v);
            }
        }
    }

    let try_vec = |v: &[BigInt], route: &'static str| -> Result<Option<Verdict>, SquareError> {
        let phi = p.map_from(&layout, v)?;
        if !is_equivalence_fast(&phi)? {
            return Ok(None);
        }
        match p.confirm(phi, route)? {
            Some(v) => Ok(Some(v)),
            None => Err(SquareError::Internal("fast equivalence test disagrees with the contraction".into())),
        }
    };
    if let Some(v) = try_vec(coset.particular(), "particular")? {
        return Ok(v);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.samples {
        if let Some(v) = try_vec(&coset.sample(&mut rng, config.coeff_bound), "sampled")? {
            return Ok(v);
        }
    }

    if let Some(m) = p.ring().modulus() {
        let Ok(iter) = coset.enumerate(config.coset_cap) else {
            return Ok(Verdict::Unknown(UnknownRecord {
                reason: format!("coset of size {} exceeds the cap", display_card(&coset)),
                moduli_tried: Vec::new(),
            }));
        };
        for v in iter {
            if let Some(v) = try_vec(&v, "enumerated")? {
                return Ok(v);
            }
        }
        return Ok(Verdict::NoCertified(Refutation {
            modulus: m.clone(),
            route: RefutationRoute::CosetExhausted,
            examined: coset.cardinality().expect("finite coset"),
        }));
    }

    // over Z: bounded enumeration
    if let Ok(iter) = coset.enumerate_bounded(config.coeff_bound, config.coset_cap) {
        for v in iter {
            if let Some(v) = try_vec(&v, "enumerated")? {
                return Ok(v);
            }
        }
    }

    let schedule = p.schedule(config)?;
    for m in &schedule {
        if let ModularOutcome::Refuted(r) = modular_check(p, m, config)? {
            return Ok(Verdict::NoCertified(r));
        }
    }

    match orbit_refutation(p, &schedule, config)? {
        Orbit::Verdict(v) => Ok(v),
        Orbit::Unknown(reason) => Ok(Verdict::Unknown(UnknownRecord { reason, moduli_tried: schedule })),
    }
}

fn display_card(c: &AffineCoset) -> String {
    c.cardinality().map_or_else(|| "infinite".to_string(), |n| n.to_string())
}

enum Orbit {
    Verdict(Verdict),
    Unknown(String),
}

/// Lists every equivalence `D -> T` up to homotopy as `u o psi` with `u`
/// running over `Aut_K(T)`, then refutes each candidate modulo a common
/// modulus. Complete when `End_K(T)` has free rank at most one: its image
/// in `End_K(T) (x) Q = Q` is then a subring containing 1, hence `Z`, and
/// units map to `+-1`.
fn orbit_refutation(p: &Problem, schedule: &[BigInt], config: &SearchConfig) -> Result<Orbit, SquareError> {
    let free = Problem::new(&p.source, &p.target, Vec::new())?;
    let ClassSet::Coset { coset, layout } = free.class_set()? else {
        return Ok(Orbit::Unknown("unconstrained system insoluble".into()));
    };
    let mut psi = None;
    if let Ok(iter) = coset.enumerate_bounded(config.coeff_bound, config.coset_cap) {
        for v in iter {
            let phi = free.map_from(&layout, &v)?;
            if is_equivalence_fast(&phi)? {
                psi = Some(phi);
                break;
            }
        }
    }
    let Some(psi) = psi else {
        return Ok(Orbit::Unknown("no equivalence between source and target within the coefficient bound".into()));
    };

    let end = hom_group(&p.target, &p.target)?;
    let free_rank = end.group().free_rank;
    if free_rank > 1 {
        return Ok(Orbit::Unknown(format!("End of the target has free rank {free_rank}")));
    }
    let iter = if free_rank == 0 {
        end.coset().enumerate(config.coset_cap)
    } else {
        end.coset().enumerate_bounded(1, config.coset_cap)
    };
    let Ok(iter) = iter else {
        return Ok(Orbit::Unknown("End of the target too large to enumerate".into()));
    };
    let mut units = Vec::new();
    for v in iter {
        let u = ChainMap::new(&p.target, &p.target, layout_for_end(&end, &v))?;
        if is_equivalence_fast(&u)? {
            units.push(u);
        }
    }
    let candidates: Vec<ChainMap> = units.iter().map(|u| u.compose(&psi)).collect::<Result<_, _>>()?;
    for c in &candidates {
        if p.satisfies(c)?.is_some() {
            if let Some(v) = p.confirm(c.clone(), "automorphism-orbit")? {
                return Ok(Orbit::Verdict(v));
            }
        }
    }
    let examined = BigInt::from(candidates.len());
    for m in schedule {
        let reduced = p.reduce_mod(m)?;
        let mut all_fail = true;
        for c in &candidates {
            if reduced.satisfies(&c.reduce_mod(m)?)?.is_some() {
                all_fail = false;
                break;
            }
        }
        if all_fail {
            return Ok(Orbit::Verdict(Verdict::NoCertified(Refutation {
                modulus: m.clone(),
                route: RefutationRoute::AutomorphismOrbit,
                examined,
            })));
        }
    }
    let mut m = BigInt::one();
    for c in &candidates {
        match p.obstruction(c)? {
            Some(o) => m = m.lcm(&o),
            None => return Err(SquareError::Internal("candidate both satisfies and violates the constraints".into())),
        }
    }
    Ok(Orbit::Verdict(Verdict::NoCertified(Refutation {
        modulus: m,
        route: RefutationRoute::AutomorphismOrbit,
        examined,
    })))
}

fn layout_for_end(end: &crate::complexes::HomGroupPresentation, v: &[BigInt]) -> Vec<(i64, crate::lattice::IntMatrix)> {
    let t = end.target();
    Layout::maps(t, t, 0, 0).unpack(v)
}
