//! Replays the unit-lemma argument: from `c` and the cone-functoriality
//! map `c~` build an automorphism `1 + e + a e^2` of `C'` carrying `c` to
//! `c~` and fixing `g'`.

use super::{PaperError, Prop2Diagram};
use crate::complexes::{hom_group, homotopic, is_homotopy_equivalence, ChainMap, HomGroupPresentation};
use crate::lattice::modp;
use crate::unit_lemma::{find_alpha_in, PrimeField, StructureAlgebra};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prop2Replay {
    /// `psi: A[1] -> C'` with `psi h ~ c~ - c`.
    pub psi: ChainMap,
    /// `psi h'`.
    pub epsilon: ChainMap,
    pub alpha: ChainMap,
    /// `1 + e + a e^2`.
    pub theta: ChainMap,
    pub dim_end: usize,
    /// `theta c ~ c~`.
    pub moves_c: bool,
    /// `theta g' ~ g'`.
    pub fixes_gp: bool,
    pub is_equivalence: bool,
}

impl Prop2Replay {
    pub fn ok(&self) -> bool {
        self.moves_c && self.fixes_gp && self.is_equivalence
    }
}

fn coords(h: &HomGroupPresentation, f: &ChainMap, p: u64) -> Result<Vec<u64>, PaperError> {
    Ok(modp::lift_vec(&h.lookup(f)?, p))
}

/// Solves `psi h ~ c~ - c` in `Hom_K(A[1], C')`, builds `End_K(C')` as a
/// structure-constant algebra and applies the unit lemma to `psi h'`.
pub fn prop2_replay(d: &Prop2Diagram) -> Result<Prop2Replay, PaperError> {
    let p = d
        .c
        .ring()
        .prime()
        .ok_or_else(|| PaperError::Replay("the replay needs a prime field".into()))?;
    let (h, hp, gp) = (&d.upper.h, &d.lower.h, &d.lower.g);
    let a1 = h.target();
    let cp = d.lower.z();

    let from = hom_group(a1, cp)?;
    let to = hom_group(d.upper.z(), cp)?;
    let columns: Vec<Vec<u64>> =
        from.representatives().iter().map(|r| coords(&to, &r.compose(h)?, p)).collect::<Result<_, _>>()?;
    let rows: Vec<modp::Row> = (0..to.orders().len()).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    let rhs = coords(&to, &d.c_tilde.sub(&d.c)?, p)?;
    let (x, _) = modp::solve(&rows, &rhs, columns.len(), p)
        .ok_or_else(|| PaperError::Replay("c~ - c does not factor through h".into()))?;
    let psi = from.element(&modp::to_bigint(&x));
    if homotopic(&psi.compose(h)?, &d.c_tilde.sub(&d.c)?)?.is_none() {
        return Err(PaperError::Replay("psi h is not homotopic to c~ - c".into()));
    }
    let epsilon = psi.compose(hp)?;

    let end = hom_group(cp, cp)?;
    let reps = end.representatives();
    let n = reps.len();
    let mut table = vec![vec![Vec::new(); n]; n];
    for (i, ri) in reps.iter().enumerate() {
        for (j, rj) in reps.iter().enumerate() {
            table[i][j] = coords(&end, &ri.compose(rj)?, p)?;
        }
    }
    let id = ChainMap::identity(cp);
    let alg = StructureAlgebra::new(PrimeField::new(p)?, table, coords(&end, &id, p)?)?;
    let cert = find_alpha_in(&alg, &coords(&end, &epsilon, p)?)?;
    let alpha = end.element(&modp::to_bigint(&cert.alpha));

    let eps2 = epsilon.compose(&epsilon)?;
    let theta = id.add(&epsilon)?.add(&alpha.compose(&eps2)?)?;
    let moves_c = homotopic(&theta.compose(&d.c)?, &d.c_tilde)?.is_some();
    let fixes_gp = homotopic(&theta.compose(gp)?, gp)?.is_some();
    let is_equivalence = is_homotopy_equivalence(&theta)?.is_some();
    Ok(Prop2Replay { psi, epsilon, alpha, theta, dim_end: n, moves_c, fixes_gp, is_equivalence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paper::fuzz::{fuzz_one, FuzzConfig};

    #[test]
    fn unperturbed_gives_identity() {
        let cfg = FuzzConfig::new(2, 11);
        let mut r = fuzz_one(&cfg, 0).unwrap();
        r.diagram.c = r.diagram.c_tilde.clone();
        let rep = prop2_replay(&r.diagram).unwrap();
        assert!(rep.ok());
        assert!(homotopic(&rep.theta, &ChainMap::identity(r.diagram.lower.z())).unwrap().is_some());
        assert!(homotopic(&rep.epsilon, &ChainMap::zero(rep.epsilon.source(), rep.epsilon.target()).unwrap())
            .unwrap()
            .is_some());
    }

    #[test]
    fn perturbed_identities_hold() {
        for p in [2, 3] {
            let cfg = FuzzConfig::new(p, 5);
            for index in 0..6 {
                let r = fuzz_one(&cfg, index).unwrap();
                let rep = prop2_replay(&r.diagram).unwrap();
                assert!(rep.ok(), "p = {p}, index {index}: {rep:?}");
            }
        }
    }
}
