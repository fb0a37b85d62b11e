//! JSON formats and the small expression language used by dataset templates.
//!
//! Matrices are arrays of rows; entries are decimal strings (plain JSON
//! integers are accepted on input). In templates an entry may also be an
//! integer expression in named parameters, e.g. `"-a^3"` or `"1+a"`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serializer;
use serde_json::{json, Map, Value};

use crate::complexes::{ChainMap, Complex, ComplexError, Homotopy, Ring};
use crate::lattice::IntMatrix;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("format error: {0}")]
    Format(String),
    #[error("expression error in {expr:?}: {msg}")]
    Expr { expr: String, msg: String },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

fn fmt_err(msg: impl Into<String>) -> IoError {
    IoError::Format(msg.into())
}

pub fn ser_bigint_vec<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

pub fn ser_bigint<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn ser_opt_bigint<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

/// Parameter bindings for template evaluation.
pub type Env = BTreeMap<String, BigInt>;

pub fn env(pairs: &[(&str, i64)]) -> Env {
    pairs.iter().map(|(k, v)| (k.to_string(), BigInt::from(*v))).collect()
}

// ---------------------------------------------------------------- expressions

/// Evaluates an integer expression with `+ - * ^`, parentheses, decimal
/// literals and parameters from `env`.
pub fn eval_expr(expr: &str, env: &Env) -> Result<BigInt, IoError> {
    let mut p = Parser { src: expr.as_bytes(), pos: 0, env, expr };
    let v = p.sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    env: &'a Env,
    expr: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> IoError {
        IoError::Expr { expr: self.expr.to_string(), msg: format!("{msg} at offset {}", self.pos) }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<BigInt, IoError> {
        let mut v = self.product()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let r = self.product()?;
            v = if c == b'+' { v + r } else { v - r };
        }
        Ok(v)
    }

    fn product(&mut self) -> Result<BigInt, IoError> {
        let mut v = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            v *= self.unary()?;
        }
        Ok(v)
    }

    fn unary(&mut self) -> Result<BigInt, IoError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<BigInt, IoError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.unary()?;
            let e = e.to_u32().filter(|&e| e <= 4096).ok_or_else(|| self.err("bad exponent"))?;
            return Ok(num_traits::pow(base, e as usize));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<BigInt, IoError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                Ok(s.parse().expect("digits"))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                self.env.get(name).cloned().ok_or_else(|| self.err(&format!("unbound parameter {name}")))
            }
            _ => Err(self.err("expected a number, parameter or '('")),
        }
    }
}

// ------------------------------------------------------------------ matrices

fn entry_from_json(v: &Value, env: &Env) -> Result<BigInt, IoError> {
    match v {
        Value::String(s) => eval_expr(s, env),
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| fmt_err(format!("non-integer matrix entry {n}"))),
        other => Err(fmt_err(format!("matrix entry must be a string or integer, got {other}"))),
    }
}

pub fn matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|x| Value::String(x.to_string())).collect()))
            .collect(),
    )
}

/// Parses a matrix of known shape. A zero-row matrix may be written `[]`;
/// an `r x 0` matrix as `r` empty rows or `[]`.
pub fn matrix_from_json(v: &Value, rows: usize, cols: usize, env: &Env) -> Result<IntMatrix, IoError> {
    let arr = v.as_array().ok_or_else(|| fmt_err("matrix must be an array of rows"))?;
    if arr.is_empty() && (rows == 0 || cols == 0) {
        return Ok(IntMatrix::zeros(rows, cols));
    }
    if arr.len() != rows {
        return Err(fmt_err(format!("matrix has {} rows, expected {rows}", arr.len())));
    }
    let mut out = IntMatrix::zeros(rows, cols);
    for (i, row) in arr.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| fmt_err("matrix row must be an array"))?;
        if row.len() != cols {
            return Err(fmt_err(format!("matrix row {i} has {} entries, expected {cols}", row.len())));
        }
        for (j, e) in row.iter().enumerate() {
            out.set(i, j, entry_from_json(e, env)?);
        }
    }
    Ok(out)
}

/// Parses a matrix whose shape is read off the data (rows must be
/// nonempty and rectangular).
pub fn matrix_from_json_free(v: &Value, env: &Env) -> Result<IntMatrix, IoError> {
    let arr = v.as_array().ok_or_else(|| fmt_err("matrix must be an array of rows"))?;
    let rows = arr.len();
    let cols = arr.first().and_then(Value::as_array).map_or(0, Vec::len);
    matrix_from_json(v, rows, cols, env)
}

// ----------------------------------------------------------- complexes, maps

fn degree_key(k: &str) -> Result<i64, IoError> {
    k.trim().parse().map_err(|_| fmt_err(format!("degree key {k:?} is not an integer")))
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, IoError> {
    v.as_object().ok_or_else(|| fmt_err(format!("{what} must be a JSON object")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, IoError> {
    v.get(key).ok_or_else(|| fmt_err(format!("missing field {key:?}")))
}

pub fn ring_to_json(r: &Ring) -> Value {
    match r {
        Ring::Integers => json!("Z"),
        Ring::Mod { modulus, .. } => json!({ "mod": modulus.to_string() }),
    }
}

pub fn ring_from_json(v: &Value, env: &Env) -> Result<Ring, IoError> {
    match v {
        Value::String(s) if s == "Z" => Ok(Ring::Integers),
        Value::Object(o) => {
            let m = o.get("mod").ok_or_else(|| fmt_err("ring object needs \"mod\""))?;
            Ok(Ring::modulo(entry_from_json(m, env)?)?)
        }
        other => Err(fmt_err(format!("unknown ring {other}"))),
    }
}

pub fn complex_to_json(c: &Complex) -> Value {
    let degrees: Map<String, Value> = c.degrees().map(|(i, r)| (i.to_string(), json!(r))).collect();
    let diffs: Map<String, Value> = c.differentials().map(|(i, d)| (i.to_string(), matrix_to_json(d))).collect();
    json!({ "ring": ring_to_json(c.ring()), "degrees": degrees, "differentials": diffs })
}

pub fn complex_from_json(v: &Value, env: &Env) -> Result<Complex, IoError> {
    let ring = match v.get("ring") {
        Some(r) => ring_from_json(r, env)?,
        None => Ring::Integers,
    };
    let mut ranks = BTreeMap::new();
    if let Some(d) = v.get("degrees") {
        for (k, r) in object(d, "degrees")? {
            let r = r
                .as_u64()
                .or_else(|| r.as_str().and_then(|s| s.parse().ok()))
                .ok_or_else(|| fmt_err(format!("rank in degree {k} must be a non-negative integer")))?;
            ranks.insert(degree_key(k)?, r as usize);
        }
    }
    let rank = |i: i64| ranks.get(&i).copied().unwrap_or(0);
    let mut diffs = Vec::new();
    if let Some(d) = v.get("differentials") {
        for (k, m) in object(d, "differentials")? {
            let i = degree_key(k)?;
            diffs.push((i, matrix_from_json(m, rank(i + 1), rank(i), env)?));
        }
    }
    Ok(Complex::new(ring, ranks.clone(), diffs)?)
}

fn components_to_json<'a>(it: impl Iterator<Item = (i64, &'a IntMatrix)>) -> Value {
    Value::Object(it.map(|(i, m)| (i.to_string(), matrix_to_json(m))).collect())
}

pub fn chain_map_to_json(f: &ChainMap) -> Value {
    json!({ "components": components_to_json(f.components()) })
}

/// Parses `{"components": {...}}` (or a bare component object) as a map
/// between the given complexes.
pub fn chain_map_from_json(v: &Value, source: &Complex, target: &Complex, env: &Env) -> Result<ChainMap, IoError> {
    let comps = v.get("components").unwrap_or(v);
    let mut out = Vec::new();
    for (k, m) in object(comps, "components")? {
        let i = degree_key(k)?;
        out.push((i, matrix_from_json(m, target.rank(i), source.rank(i), env)?));
    }
    Ok(ChainMap::new(source, target, out)?)
}

pub fn homotopy_to_json(h: &Homotopy) -> Value {
    json!({ "components": components_to_json(h.components()) })
}

pub fn homotopy_from_json(v: &Value, f: &ChainMap, g: &ChainMap, env: &Env) -> Result<Homotopy, IoError> {
    let comps = v.get("components").unwrap_or(v);
    let (s, t) = (f.source(), f.target());
    let mut out = Vec::new();
    for (k, m) in object(comps, "components")? {
        let i = degree_key(k)?;
        out.push((i, matrix_from_json(m, t.rank(i - 1), s.rank(i), env)?));
    }
    Ok(Homotopy::new(f, g, out)?)
}

/// Required field parsed as a complex.
pub fn complex_field(v: &Value, key: &str, env: &Env) -> Result<Complex, IoError> {
    complex_from_json(field(v, key)?, env).map_err(|e| fmt_err(format!("{key}: {e}")))
}

/// Required field parsed as a chain map.
pub fn map_field(v: &Value, key: &str, s: &Complex, t: &Complex, env: &Env) -> Result<ChainMap, IoError> {
    chain_map_from_json(field(v, key)?, s, t, env).map_err(|e| fmt_err(format!("{key}: {e}")))
}
