//! Candidate triangles `X -> Y -> Z -> X[1]`, standard triangles on a
//! map, TR2 rotation and witnessed distinguishedness.

use serde_json::{json, Value};

use crate::complexes::{
    cone, homotopic, is_homotopy_equivalence, ChainMap, Complex, ComplexError, EquivalenceWitness, Homotopy,
};
use crate::io::{self, Env, IoError};
use crate::lattice::IntMatrix;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TriangleError {
    #[error("triangle maps are not composable: {0}")]
    Shape(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("witness is not a homotopy equivalence")]
    NotEquivalence,
    #[error("g is not homotopic to u o inclusion")]
    GCheck,
    #[error("projection is not homotopic to h o u")]
    HCheck,
    #[error("composite {0} is not null-homotopic")]
    Composite(&'static str),
    #[error("square {0} of the triangle morphism does not homotopy-commute")]
    Square(usize),
}

/// `X --f--> Y --g--> Z --h--> X[1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub f: ChainMap,
    pub g: ChainMap,
    pub h: ChainMap,
}

impl Triangle {
    pub fn new(f: ChainMap, g: ChainMap, h: ChainMap) -> Result<Self, TriangleError> {
        if f.target() != g.source() {
            return Err(TriangleError::Shape("target(f) != source(g)".into()));
        }
        if g.target() != h.source() {
            return Err(TriangleError::Shape("target(g) != source(h)".into()));
        }
        if *h.target() != f.source().shift(1) {
            return Err(TriangleError::Shape("target(h) != source(f)[1]".into()));
        }
        Ok(Self { f, g, h })
    }

    pub fn x(&self) -> &Complex {
        self.f.source()
    }

    pub fn y(&self) -> &Complex {
        self.g.source()
    }

    pub fn z(&self) -> &Complex {
        self.h.source()
    }

    /// Null-homotopies of `g f`, `h g` and `f[1] h`.
    pub fn check_composites(&self) -> Result<[Homotopy; 3], TriangleError> {
        let null = |m: ChainMap, name: &'static str| -> Result<Homotopy, TriangleError> {
            let z = ChainMap::zero(m.source(), m.target())?;
            homotopic(&m, &z)?.ok_or(TriangleError::Composite(name))
        };
        Ok([
            null(self.g.compose(&self.f)?, "g o f")?,
            null(self.h.compose(&self.g)?, "h o g")?,
            null(self.f.shift(1).compose(&self.h)?, "f[1] o h")?,
        ])
    }

    /// `t[n]` with the three maps shifted (no sign change).
    pub fn shift(&self, n: i64) -> Self {
        Self { f: self.f.shift(n), g: self.g.shift(n), h: self.h.shift(n) }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "x": io::complex_to_json(self.x()),
            "y": io::complex_to_json(self.y()),
            "z": io::complex_to_json(self.z()),
            "f": io::chain_map_to_json(&self.f),
            "g": io::chain_map_to_json(&self.g),
            "h": io::chain_map_to_json(&self.h),
        })
    }

    pub fn from_json(v: &Value, env: &Env) -> Result<Self, IoError> {
        let x = io::complex_field(v, "x", env)?;
        let y = io::complex_field(v, "y", env)?;
        let z = io::complex_field(v, "z", env)?;
        let x1 = x.shift(1);
        if let Some(xs) = v.get("x_shifted") {
            if io::complex_from_json(xs, env)? != x1 {
                return Err(IoError::Format("x_shifted is not x[1]".into()));
            }
        }
        let f = io::map_field(v, "f", &x, &y, env)?;
        let g = io::map_field(v, "g", &y, &z, env)?;
        let h = io::map_field(v, "h", &z, &x1, env)?;
        Triangle::new(f, g, h).map_err(|e| IoError::Format(e.to_string()))
    }
}

/// `(X, Y, cone(f); f, inclusion, projection)`.
pub fn standard_triangle(f: &ChainMap) -> Triangle {
    let c = cone(f);
    Triangle { f: f.clone(), g: c.inclusion, h: c.projection }
}

/// TR2: `(Y, Z, X[1]; g, h, -f[1])`.
pub fn rotate(t: &Triangle) -> Triangle {
    Triangle { f: t.g.clone(), g: t.h.clone(), h: t.f.shift(1).neg() }
}

/// Evidence that `t` is isomorphic to the standard triangle on `f(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinguishedWitness {
    /// `u: cone(f) -> Z`.
    pub u: ChainMap,
    pub equivalence: EquivalenceWitness,
    /// `g ~ u o inclusion`.
    pub g_homotopy: Homotopy,
    /// `h o u ~ projection`.
    pub h_homotopy: Homotopy,
}

/// Checks that `u: cone(f) -> Z` is an equivalence with `g ~ u o inclusion`
/// and `h o u ~ projection`.
pub fn verify_distinguished_with_witness(t: &Triangle, u: &ChainMap) -> Result<DistinguishedWitness, TriangleError> {
    let c = cone(&t.f);
    if *u.source() != c.complex || u.target() != t.z() {
        return Err(TriangleError::Shape("u must map cone(f) to Z".into()));
    }
    let equivalence = is_homotopy_equivalence(u)?.ok_or(TriangleError::NotEquivalence)?;
    let g_homotopy = homotopic(&t.g, &u.compose(&c.inclusion)?)?.ok_or(TriangleError::GCheck)?;
    let h_homotopy = homotopic(&t.h.compose(u)?, &c.projection)?.ok_or(TriangleError::HCheck)?;
    Ok(DistinguishedWitness { u: u.clone(), equivalence, g_homotopy, h_homotopy })
}

/// Witness for `rotate(t)` built from a witness for `t`, then verified.
///
/// With `H: g ~ u i` and `K: h u ~ p`, the map `cone(g) -> X[1]` is
/// `(h, N)` where `N = h H + K i` null-homotopes `h g`.
pub fn rotate_witness(t: &Triangle, w: &DistinguishedWitness) -> Result<DistinguishedWitness, TriangleError> {
    let r = rotate(t);
    let cg = cone(&t.g);
    let ci = cone(&t.f);
    let y = t.y();
    let x1 = t.x().shift(1);
    let comps: Vec<(i64, IntMatrix)> = cg
        .complex
        .degrees()
        .map(|(i, _)| {
            // N^{i+1}: Y^{i+1} -> X[1]^i
            let hh = &t.h.component(i) * &w.g_homotopy.component(i + 1);
            let ki = &w.h_homotopy.component(i + 1) * &ci.inclusion.component(i + 1);
            let n = &hh + &ki;
            debug_assert_eq!(n.shape(), (x1.rank(i), y.rank(i + 1)));
            (i, IntMatrix::hstack(&t.h.component(i), &n))
        })
        .collect();
    let u = ChainMap::new(&cg.complex, &x1, comps)?;
    verify_distinguished_with_witness(&r, &u)
}

/// `(p, q, r)` from one triangle to another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleMorphism {
    pub source: Triangle,
    pub target: Triangle,
    pub p: ChainMap,
    pub q: ChainMap,
    pub r: ChainMap,
}

impl TriangleMorphism {
    pub fn new(source: Triangle, target: Triangle, p: ChainMap, q: ChainMap, r: ChainMap) -> Result<Self, TriangleError> {
        let ok = p.source() == source.x()
            && p.target() == target.x()
            && q.source() == source.y()
            && q.target() == target.y()
            && r.source() == source.z()
            && r.target() == target.z();
        if !ok {
            return Err(TriangleError::Shape("morphism components do not match the corners".into()));
        }
        Ok(Self { source, target, p, q, r })
    }

    pub fn identity(t: &Triangle) -> Self {
        Self {
            source: t.clone(),
            target: t.clone(),
            p: ChainMap::identity(t.x()),
            q: ChainMap::identity(t.y()),
            r: ChainMap::identity(t.z()),
        }
    }

    /// The three squares as `(upper-right path, lower-left path)`:
    /// `q f` vs `f' p`, `r g` vs `g' q`, `p[1] h` vs `h' r`.
    pub fn squares(&self) -> Result<[(ChainMap, ChainMap); 3], TriangleError> {
        let (s, t) = (&self.source, &self.target);
        Ok([
            (self.q.compose(&s.f)?, t.f.compose(&self.p)?),
            (self.r.compose(&s.g)?, t.g.compose(&self.q)?),
            (self.p.shift(1).compose(&s.h)?, t.h.compose(&self.r)?),
        ])
    }

    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "p": io::chain_map_to_json(&self.p),
            "q": io::chain_map_to_json(&self.q),
            "r": io::chain_map_to_json(&self.r),
        })
    }

    pub fn from_json(v: &Value, env: &Env) -> Result<Self, IoError> {
        let field = |k: &str| v.get(k).ok_or_else(|| IoError::Format(format!("missing field {k:?}")));
        let s = Triangle::from_json(field("source")?, env)?;
        let t = Triangle::from_json(field("target")?, env)?;
        let p = io::map_field(v, "p", s.x(), t.x(), env)?;
        let q = io::map_field(v, "q", s.y(), t.y(), env)?;
        let r = io::map_field(v, "r", s.z(), t.z(), env)?;
        TriangleMorphism::new(s, t, p, q, r).map_err(|e| IoError::Format(e.to_string()))
    }
}

/// Homotopies for the three squares, plus whether each commutes strictly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismWitness {
    pub homotopies: [Homotopy; 3],
    pub strict: [bool; 3],
}

pub fn verify_triangle_morphism(m: &TriangleMorphism) -> Result<MorphismWitness, TriangleError> {
    let sq = m.squares()?;
    let mut hs = Vec::with_capacity(3);
    let mut strict = [false; 3];
    for (k, (a, b)) in sq.iter().enumerate() {
        strict[k] = a == b;
        hs.push(homotopic(a, b)?.ok_or(TriangleError::Square(k + 1))?);
    }
    let homotopies: [Homotopy; 3] = hs.try_into().expect("three squares");
    Ok(MorphismWitness { homotopies, strict })
}
