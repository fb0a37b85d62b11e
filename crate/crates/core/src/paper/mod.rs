//! The worked counterexample: the four distinguished triangles, the
//! morphism of triangles built from two of their rotations, the middle
//! square of that morphism and the two refutations, plus the replay of the
//! unit-lemma argument on fuzzed diagrams over finite fields.

mod fuzz;
mod prop2;

pub use fuzz::{
    fuzz_one, fuzz_prop2, random_complex, random_map, run_trial, FuzzConfig, FuzzRecord, FuzzStats, Prop2Diagram,
    TrialOutcome,
};
pub use prop2::{prop2_replay, Prop2Replay};

use std::path::PathBuf;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::complexes::{homotopic, ChainMap, ComplexError};
use crate::io::{self, Env, IoError};
use crate::squares::{fits_vertical_iso, is_homotopy_cartesian, CommutativeSquare, SearchConfig, SquareError, Verdict};
use crate::triangles::{
    rotate, rotate_witness, standard_triangle, verify_distinguished_with_witness, verify_triangle_morphism,
    DistinguishedWitness, Triangle, TriangleError, TriangleMorphism,
};
use crate::unit_lemma::UnitLemmaError;

#[derive(Debug, thiserror::Error)]
pub enum PaperError {
    #[error("dataset {file}: {source}")]
    Data { file: String, source: IoError },
    #[error("cannot read dataset {file}: {msg}")]
    Read { file: String, msg: String },
    #[error("transcription mismatch: {0}")]
    Transcription(String),
    #[error("lemma index {0} is not in 1..=4")]
    Index(u8),
    #[error(transparent)]
    Triangle(#[from] TriangleError),
    #[error(transparent)]
    Square(#[from] SquareError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    UnitLemma(#[from] UnitLemmaError),
    #[error("{0}")]
    Replay(String),
}

/// Dataset directory: `$HOCART_DATA_DIR`, else the crate's `data/`.
pub fn data_dir() -> PathBuf {
    std::env::var_os("HOCART_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"))
}

fn load(name: &str) -> Result<Value, PaperError> {
    let path = data_dir().join(name);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| PaperError::Read { file: path.display().to_string(), msg: e.to_string() })?;
    serde_json::from_str(&text)
        .map_err(|e| PaperError::Read { file: path.display().to_string(), msg: e.to_string() })
}

fn data_err(file: &str) -> impl Fn(IoError) -> PaperError + '_ {
    move |source| PaperError::Data { file: file.to_string(), source }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma2Instance {
    pub k: u8,
    pub a: i64,
    pub b: i64,
    pub triangle: Triangle,
    /// `u: cone(f) -> Z`.
    pub u: ChainMap,
}

impl Lemma2Instance {
    pub fn verify(&self) -> Result<DistinguishedWitness, TriangleError> {
        verify_distinguished_with_witness(&self.triangle, &self.u)
    }
}

/// Loads triangle `k` of the lemma and its witness for parameters `a`, `b`.
pub fn lemma2(k: u8, a: i64, b: i64) -> Result<Lemma2Instance, PaperError> {
    if !(1..=4).contains(&k) {
        return Err(PaperError::Index(k));
    }
    let file = format!("lemma2-{k}.json");
    let v = load(&file)?;
    let env = io::env(&[("a", a), ("b", b)]);
    let err = data_err(&file);
    let tv = v.get("triangle").ok_or_else(|| err(IoError::Format("missing triangle".into())))?;
    let triangle = Triangle::from_json(tv, &env).map_err(&err)?;
    let cone = crate::complexes::cone(&triangle.f);
    let u = match v.get("u") {
        Some(Value::String(s)) if s == "identity" => {
            if standard_triangle(&triangle.f) != triangle {
                return Err(PaperError::Transcription(format!("{file}: marked standard but is not")));
            }
            ChainMap::identity(triangle.z())
        }
        Some(u) => io::chain_map_from_json(u, &cone.complex, triangle.z(), &env).map_err(&err)?,
        None => return Err(err(IoError::Format("missing u".into()))),
    };
    Ok(Lemma2Instance { k, a, b, triangle, u })
}

/// The morphism of triangles `(1, b, c, 1)` between the rotated rows, and
/// its middle square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarDiagram {
    pub a: i64,
    pub upper: Triangle,
    pub lower: Triangle,
    pub morphism: TriangleMorphism,
    pub middle: CommutativeSquare,
}

/// Loads the transcribed diagram and checks it entry by entry against the
/// rotations of lemma triangles (2) and (1) with `b = -a`.
pub fn build_star(a: i64) -> Result<StarDiagram, PaperError> {
    let file = "star.json";
    let v = load(file)?;
    let env: Env = io::env(&[("a", a)]);
    let err = data_err(file);
    let get = |k: &str| v.get(k).ok_or_else(|| err(IoError::Format(format!("missing {k}"))));
    let upper = Triangle::from_json(get("upper")?, &env).map_err(&err)?;
    let lower = Triangle::from_json(get("lower")?, &env).map_err(&err)?;
    if upper != rotate(&lemma2(2, a, 0)?.triangle) {
        return Err(PaperError::Transcription("upper row differs from the rotation of triangle (2)".into()));
    }
    if lower != rotate(&rotate(&lemma2(1, a, -a)?.triangle)) {
        return Err(PaperError::Transcription("lower row differs from the double rotation of triangle (1)".into()));
    }
    let vert = get("vertical")?;
    let p = io::map_field(vert, "p", upper.x(), lower.x(), &env).map_err(&err)?;
    let q = io::map_field(vert, "q", upper.y(), lower.y(), &env).map_err(&err)?;
    let r = io::map_field(vert, "r", upper.z(), lower.z(), &env).map_err(&err)?;
    let morphism = TriangleMorphism::new(upper.clone(), lower.clone(), p, q, r)?;
    let middle = CommutativeSquare::from_json(get("middle_square")?, &env).map_err(&err)?;
    let fits = middle.g == morphism.source.g
        && middle.gp == morphism.target.g
        && middle.b == morphism.q
        && middle.c == morphism.r;
    if !fits {
        return Err(PaperError::Transcription("middle square is not the middle square of the morphism".into()));
    }
    Ok(StarDiagram { a, upper, lower, morphism, middle })
}

/// The triangles inserted vertically for the second claim: rotations of
/// (1) with `b = -a^3` and of (4), carrying `b` and `c` as their second map.
pub fn vertical_triangles(a: i64) -> Result<(Triangle, Triangle), PaperError> {
    let cube = a.checked_pow(3).ok_or_else(|| PaperError::Replay(format!("a = {a} too large")))?;
    Ok((rotate(&lemma2(1, a, -cube)?.triangle), rotate(&lemma2(4, a, 0)?.triangle)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma2Check {
    pub k: u8,
    pub a: i64,
    pub b: i64,
    pub error: Option<String>,
}

impl Lemma2Check {
    pub fn run(k: u8, a: i64, b: i64) -> Self {
        let error = match lemma2(k, a, b) {
            Ok(inst) => inst.verify().err().map(|e| e.to_string()),
            Err(e) => Some(e.to_string()),
        };
        Self { k, a, b, error }
    }

    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

/// All four triangles for every `(a, b)` in the square `range x range`.
pub fn lemma2_grid(range: std::ops::RangeInclusive<i64>) -> Vec<Lemma2Check> {
    let mut out = Vec::new();
    for a in range.clone() {
        for b in range.clone() {
            for k in 1..=4 {
                out.push(Lemma2Check::run(k, a, b));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareCheck {
    /// 1, 2, 3: the squares of the morphism of triangles, left to right.
    pub index: usize,
    pub homotopy_commutes: bool,
    /// Strict commutativity per degree of the square's source corner.
    pub strict: Vec<(i64, bool)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarCheck {
    pub rows_distinguished: [bool; 2],
    pub squares: Vec<SquareCheck>,
    /// `(c g - g' b)^0` and the value of the stored homotopy on it.
    pub middle_defect: (BigInt, BigInt),
}

impl StarCheck {
    pub fn ok(&self) -> bool {
        self.rows_distinguished.iter().all(|&b| b)
            && self.squares.iter().all(|s| s.homotopy_commutes)
            && self.middle_defect.0 == self.middle_defect.1
    }
}

/// Distinguishedness of both rows (via rotated lemma witnesses) and
/// homotopy-commutativity of every square.
pub fn check_star(star: &StarDiagram) -> Result<StarCheck, PaperError> {
    let a = star.a;
    let w2 = lemma2(2, a, 0)?;
    let up = rotate_witness(&w2.triangle, &w2.verify()?).is_ok();
    let w1 = lemma2(1, a, -a)?;
    let once = rotate_witness(&w1.triangle, &w1.verify()?)?;
    let low = rotate_witness(&rotate(&w1.triangle), &once).is_ok();
    let witness = verify_triangle_morphism(&star.morphism).ok();
    let pairs = star.morphism.squares()?;
    let mut squares = Vec::new();
    for (k, (x, y)) in pairs.iter().enumerate() {
        let homotopy_commutes = match &witness {
            Some(_) => true,
            None => homotopic(x, y)?.is_some(),
        };
        let strict = x.source().degrees().map(|(i, _)| (i, x.component(i) == y.component(i))).collect();
        squares.push(SquareCheck { index: k + 1, homotopy_commutes, strict });
    }
    let sq = &star.middle;
    let defect = sq.c.compose(&sq.g)?.sub(&sq.gp.compose(&sq.b)?)?.component(0);
    let via_h = &sq.homotopy.component(1) * &sq.b_obj().differential(0);
    Ok(StarCheck {
        rows_distinguished: [up, low],
        squares,
        middle_defect: (defect.get(0, 0).clone(), via_h.get(0, 0).clone()),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaperReport {
    pub a: i64,
    pub lemma2: Vec<Lemma2Check>,
    pub star: Result<StarCheck, String>,
    pub claim1: Result<Verdict, String>,
    pub claim2: Result<Verdict, String>,
}

impl PaperReport {
    pub fn expected_modulus(&self) -> BigInt {
        BigInt::from(self.a) * self.a
    }

    fn refuted_at_square(v: &Result<Verdict, String>, m: &BigInt) -> bool {
        matches!(v, Ok(Verdict::NoCertified(r)) if r.modulus == *m)
    }

    pub fn claim1_ok(&self) -> bool {
        Self::refuted_at_square(&self.claim1, &self.expected_modulus())
    }

    pub fn claim2_ok(&self) -> bool {
        Self::refuted_at_square(&self.claim2, &self.expected_modulus())
    }

    /// A cartesian square always fits, so a refuted fit must come with a
    /// non-yes for cartesianness.
    pub fn implication_ok(&self) -> bool {
        match (&self.claim1, &self.claim2) {
            (Ok(c1), Ok(c2)) => !(c1.is_yes() && matches!(c2, Verdict::NoCertified(_))),
            _ => false,
        }
    }

    pub fn lemma2_ok(&self) -> bool {
        self.lemma2.iter().all(Lemma2Check::ok)
    }

    pub fn star_ok(&self) -> bool {
        self.star.as_ref().is_ok_and(StarCheck::ok)
    }

    pub fn passed(&self) -> bool {
        self.lemma2_ok() && self.star_ok() && self.claim1_ok() && self.claim2_ok() && self.implication_ok()
    }

    pub fn to_json(&self) -> Value {
        let verdict = |v: &Result<Verdict, String>| match v {
            Ok(v) => v.to_json(),
            Err(e) => json!({ "error": e }),
        };
        let star = match &self.star {
            Ok(s) => json!({
                "rows_distinguished": s.rows_distinguished,
                "squares": s.squares.iter().map(|q| json!({
                    "square": q.index,
                    "homotopy_commutes": q.homotopy_commutes,
                    "strict": q.strict.iter().map(|(i, b)| json!({ "degree": i, "strict": b })).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
                "middle_defect_degree0": s.middle_defect.0.to_string(),
                "middle_homotopy_value": s.middle_defect.1.to_string(),
                "ok": s.ok(),
            }),
            Err(e) => json!({ "error": e }),
        };
        json!({
            "a": self.a,
            "lemma2": self.lemma2.iter().map(|c| json!({
                "k": c.k, "a": c.a, "b": c.b, "ok": c.ok(), "error": c.error,
            })).collect::<Vec<_>>(),
            "star": star,
            "claim1_not_homotopy_cartesian": verdict(&self.claim1),
            "claim2_no_vertical_fit": verdict(&self.claim2),
            "expected_modulus": self.expected_modulus().to_string(),
            "implication_ok": self.implication_ok(),
            "passed": self.passed(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("a = {}\n", self.a);
        s.push_str("parameterised triangles:\n");
        for c in &self.lemma2 {
            let status = c.error.as_deref().unwrap_or("distinguished");
            s.push_str(&format!("  ({}) a = {}, b = {}: {status}\n", c.k, c.a, c.b));
        }
        match &self.star {
            Ok(st) => {
                s.push_str(&format!(
                    "diagram: rows distinguished {} / {}\n",
                    st.rows_distinguished[0], st.rows_distinguished[1]
                ));
                for q in &st.squares {
                    let strict: Vec<String> = q.strict.iter().map(|(i, b)| format!("{i}:{}", if *b { "=" } else { "~" })).collect();
                    s.push_str(&format!(
                        "  square {}: homotopy-commutes {} (degrees {})\n",
                        q.index,
                        q.homotopy_commutes,
                        strict.join(" ")
                    ));
                }
                s.push_str(&format!(
                    "  middle square defect in degree 0: {} (homotopy gives {})\n",
                    st.middle_defect.0, st.middle_defect.1
                ));
            }
            Err(e) => s.push_str(&format!("diagram: error: {e}\n")),
        }
        let text = |v: &Result<Verdict, String>| match v {
            Ok(v) => v.to_text(),
            Err(e) => format!("error: {e}"),
        };
        s.push_str(&format!("claim 1 (middle square homotopy cartesian?): {}\n", text(&self.claim1)));
        s.push_str(&format!("claim 2 (vertical fit with an isomorphism?): {}\n", text(&self.claim2)));
        s.push_str(&format!("expected refutation modulus: {}\n", self.expected_modulus()));
        s.push_str(&format!("claim 2 no implies claim 1 no: {}\n", self.implication_ok()));
        s.push_str(&format!("result: {}\n", if self.passed() { "pass" } else { "FAIL" }));
        s
    }
}

/// Runs every check for one value of `a`. Sub-failures are recorded in
/// the report, never raised.
pub fn verify_paper(a: i64, config: &SearchConfig) -> PaperReport {
    let cube = a.saturating_pow(3);
    let lemma = vec![
        Lemma2Check::run(1, a, -a),
        Lemma2Check::run(1, a, -cube),
        Lemma2Check::run(2, a, 0),
        Lemma2Check::run(3, a, 0),
        Lemma2Check::run(4, a, 0),
    ];
    let star = build_star(a);
    let star_check = star.as_ref().map_err(|e| e.to_string()).and_then(|s| check_star(s).map_err(|e| e.to_string()));
    let claim1 = star
        .as_ref()
        .map_err(|e| e.to_string())
        .and_then(|s| is_homotopy_cartesian(&s.middle, config).map_err(|e| e.to_string()));
    let claim2 = star.as_ref().map_err(|e| e.to_string()).and_then(|s| {
        let (tb, tc) = vertical_triangles(a).map_err(|e| e.to_string())?;
        fits_vertical_iso(&s.middle, &tb, &tc, config).map_err(|e| e.to_string())
    });
    PaperReport { a, lemma2: lemma, star: star_check, claim1, claim2 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_triangles_verify() {
        for k in 1..=4 {
            let inst = lemma2(k, 3, -27).unwrap();
            inst.verify().unwrap_or_else(|e| panic!("triangle ({k}): {e}"));
        }
    }

    #[test]
    fn triangle_one_is_standard() {
        let inst = lemma2(1, 4, 7).unwrap();
        assert_eq!(inst.triangle, standard_triangle(&inst.triangle.f));
    }

    #[test]
    fn star_builds_and_commutes() {
        for a in [3, 4, 7] {
            let star = build_star(a).unwrap();
            let check = check_star(&star).unwrap();
            assert!(check.ok(), "a = {a}: {check:?}");
            assert_eq!(check.middle_defect.0, BigInt::from(a * a));
        }
    }

    #[test]
    fn vertical_triangles_carry_b_and_c() {
        let star = build_star(3).unwrap();
        let (tb, tc) = vertical_triangles(3).unwrap();
        assert_eq!(tb.g, star.middle.b);
        assert_eq!(tc.g, star.middle.c);
    }

    #[test]
    fn bad_index() {
        assert!(matches!(lemma2(5, 1, 1), Err(PaperError::Index(5))));
    }
}
