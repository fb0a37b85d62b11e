use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use hocart::complexes::{cone, homology};
use hocart::io::{self, Env};
use hocart::paper::{fuzz_one, run_trial, verify_paper, FuzzConfig};
use hocart::squares::{find_compatible_equivalence, is_homotopy_cartesian, CommutativeSquare, Constraint, SearchConfig};
use hocart::triangles::{verify_distinguished_with_witness, Triangle};
use hocart::unit_lemma::{find_alpha_over_z, find_unit, RingElementRep, Variant};

const USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "hocart", version, about = "Exact checks for homotopy-cartesian squares of chain complexes")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Largest coset enumerated exhaustively.
    #[arg(long, global = true, default_value_t = 1 << 20)]
    max_enum: u64,
    /// Coefficient bound for free Hom coordinates over Z.
    #[arg(long, global = true, default_value_t = 2)]
    coeff_bound: u32,
    /// Extra moduli for the modular check, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    moduli: Vec<BigInt>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Checks of the worked counterexample.
    Paper {
        #[command(subcommand)]
        cmd: PaperCmd,
    },
    /// Decides whether a commutative square is homotopy cartesian.
    Square {
        #[command(subcommand)]
        cmd: SquareCmd,
    },
    /// Homology of a complex over Z.
    Complex {
        #[command(subcommand)]
        cmd: ComplexCmd,
    },
    /// Distinguishedness of a triangle.
    Triangle {
        #[command(subcommand)]
        cmd: TriangleCmd,
    },
    /// Finds `a` with `1 + e + a e^2` a unit.
    UnitLemma {
        /// Ring descriptor: z, zmod:M, matf:P:K or matq:K.
        #[arg(long)]
        ring: String,
        /// Element as JSON: an integer or a matrix.
        #[arg(long, allow_hyphen_values = true)]
        eps: String,
        #[arg(long, value_enum, default_value_t = VariantArg::Alpha)]
        variant: VariantArg,
    },
    /// Random diagram checks.
    Fuzz {
        #[command(subcommand)]
        cmd: FuzzCmd,
    },
}

#[derive(Subcommand)]
enum PaperCmd {
    Verify {
        #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
        a_min: i64,
        #[arg(long, default_value_t = 12, allow_hyphen_values = true)]
        a_max: i64,
        /// Permit parameters below 3.
        #[arg(long)]
        allow_unclaimed: bool,
    },
}

#[derive(Subcommand)]
enum SquareCmd {
    Check { file: PathBuf },
}

#[derive(Subcommand)]
enum ComplexCmd {
    Homology { file: PathBuf },
}

#[derive(Subcommand)]
enum TriangleCmd {
    Verify { file: PathBuf },
}

#[derive(Subcommand)]
enum FuzzCmd {
    Prop2 {
        #[arg(long)]
        field: u64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Alpha,
    Beta,
}

/// Error carrying the exit code.
struct Fail(u8, String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(USAGE, e.to_string())
    }
}

type Res = Result<u8, Fail>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Res {
    let o = &cli.opts;
    let config = SearchConfig {
        coeff_bound: o.coeff_bound,
        coset_cap: o.max_enum,
        moduli: o.moduli.clone(),
        seed: o.seed,
        ..SearchConfig::default()
    };
    match cli.cmd {
        Cmd::Paper { cmd: PaperCmd::Verify { a_min, a_max, allow_unclaimed } } => {
            paper_verify(a_min, a_max, allow_unclaimed, &config, o.format)
        }
        Cmd::Square { cmd: SquareCmd::Check { file } } => square_check(&file, &config, o.format),
        Cmd::Complex { cmd: ComplexCmd::Homology { file } } => complex_homology(&file, o.format),
        Cmd::Triangle { cmd: TriangleCmd::Verify { file } } => triangle_verify(&file, &config, o.format),
        Cmd::UnitLemma { ring, eps, variant } => unit_lemma(&ring, &eps, variant, o.format),
        Cmd::Fuzz { cmd: FuzzCmd::Prop2 { field, trials } } => fuzz(field, trials, o.seed, &config, o.format),
    }
}

fn emit(format: Format, text: &str, v: &Value) {
    let out = match format {
        Format::Text => text.trim_end().to_string(),
        Format::Json => serde_json::to_string_pretty(v).expect("serializable"),
    };
    // a closed pipe is not an error
    let _ = writeln!(std::io::stdout(), "{out}");
}

/// Reads a JSON file and its optional `"parameters": {"a": 3}` bindings.
fn read_input(path: &Path) -> Result<(Value, Env), Fail> {
    let text = std::fs::read_to_string(path).map_err(|e| Fail(USAGE, format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Fail(USAGE, format!("{}: {e}", path.display())))?;
    let mut env = Env::new();
    if let Some(Value::Object(ps)) = v.get("parameters") {
        for (k, x) in ps {
            let n = match x {
                Value::Number(n) => n.to_string().parse::<BigInt>().ok(),
                Value::String(s) => s.parse().ok(),
                _ => None,
            }
            .ok_or_else(|| Fail(USAGE, format!("parameter {k} is not an integer")))?;
            env.insert(k.clone(), n);
        }
    }
    Ok((v, env))
}

fn paper_verify(a_min: i64, a_max: i64, allow_unclaimed: bool, config: &SearchConfig, format: Format) -> Res {
    if a_min > a_max {
        return Err(Fail(USAGE, format!("empty range {a_min}..={a_max}")));
    }
    if a_min < 3 && !allow_unclaimed {
        return Err(Fail(USAGE, "a below 3 is outside the claimed range; pass --allow-unclaimed".into()));
    }
    let mut reports = Vec::new();
    let mut text = String::new();
    for a in a_min..=a_max {
        let r = verify_paper(a, config);
        text.push_str(&r.to_text());
        text.push('\n');
        reports.push(r);
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    let unknown = reports.iter().any(|r| {
        [&r.claim1, &r.claim2].iter().any(|c| matches!(c, Ok(v) if v.label() == "unknown"))
    });
    text.push_str(&format!("summary: {passed}/{} passed", reports.len()));
    let v = json!({
        "reports": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        "passed": passed,
        "total": reports.len(),
    });
    emit(format, &text, &v);
    Ok(if passed == reports.len() {
        0
    } else if unknown {
        2
    } else {
        1
    })
}

fn square_check(file: &Path, config: &SearchConfig, format: Format) -> Res {
    let (v, env) = read_input(file)?;
    let sq = CommutativeSquare::from_json(&v, &env)?;
    let verdict = is_homotopy_cartesian(&sq, config)?;
    emit(format, &verdict.to_text(), &verdict.to_json());
    Ok(verdict.exit_code() as u8)
}

fn complex_homology(file: &Path, format: Format) -> Res {
    let (v, env) = read_input(file)?;
    let c = io::complex_from_json(v.get("complex").unwrap_or(&v), &env)?;
    let h = homology(&c)?;
    let text = h.iter().map(|(i, g)| format!("H^{i} = {g}")).collect::<Vec<_>>().join("\n");
    let v: serde_json::Map<String, Value> =
        h.iter().map(|(i, g)| (i.to_string(), serde_json::to_value(g).expect("serializable"))).collect();
    emit(format, &text, &json!({ "homology": v }));
    Ok(0)
}

fn triangle_verify(file: &Path, config: &SearchConfig, format: Format) -> Res {
    let (v, env) = read_input(file)?;
    let t = Triangle::from_json(v.get("triangle").unwrap_or(&v), &env)?;
    let c = cone(&t.f);
    if let Some(u) = v.get("u") {
        let u = io::chain_map_from_json(u, &c.complex, t.z(), &env)?;
        let (text, out, code) = match verify_distinguished_with_witness(&t, &u) {
            Ok(_) => ("distinguished (witness checked)".to_string(), json!({ "verdict": "yes" }), 0),
            Err(e) => (format!("witness rejected: {e}"), json!({ "verdict": "rejected", "reason": e.to_string() }), 1),
        };
        emit(format, &text, &out);
        return Ok(code);
    }
    let constraints = vec![
        Constraint::Pre { with: c.inclusion.clone(), required: t.g.clone() },
        Constraint::Post { with: t.h.clone(), required: c.projection.clone() },
    ];
    let verdict = find_compatible_equivalence(&c.complex, t.z(), constraints, config)?;
    emit(format, &verdict.to_text(), &verdict.to_json());
    Ok(verdict.exit_code() as u8)
}

fn unit_lemma(ring: &str, eps: &str, variant: VariantArg, format: Format) -> Res {
    let payload: Value = serde_json::from_str(eps).map_err(|e| Fail(USAGE, format!("--eps: {e}")))?;
    let rep = RingElementRep::parse(ring, &payload)?;
    let variant = match variant {
        VariantArg::Alpha => Variant::Alpha,
        VariantArg::Beta => Variant::Beta,
    };
    if let RingElementRep::Integer(e) = &rep {
        return Ok(match find_alpha_over_z(e) {
            Some(a) => {
                let unit = BigInt::from(1) + e + &a * e * e;
                emit(format, &format!("alpha = {a}\nunit = {unit}"), &json!({ "alpha": a.to_string(), "unit": unit.to_string() }));
                0
            }
            None => {
                emit(format, "no solution", &json!({ "alpha": null }));
                1
            }
        });
    }
    let cert = find_unit(&rep, variant)?;
    if !cert.verify(&rep) {
        return Err(Fail(USAGE, "internal error: certificate failed verification".into()));
    }
    emit(format, &cert.to_text(), &cert.to_json());
    Ok(0)
}

fn fuzz(p: u64, trials: u64, seed: u64, config: &SearchConfig, format: Format) -> Res {
    if !hocart::complexes::is_prime(&BigInt::from(p)) {
        return Err(Fail(USAGE, format!("--field {p} is not prime")));
    }
    if trials == 0 {
        eprintln!("warning: zero trials, nothing checked");
    }
    let fc = FuzzConfig::new(p, seed);
    let (mut passed, mut perturbed, mut discarded, mut unknown) = (0u64, 0u64, 0usize, false);
    let mut failures = Vec::new();
    for index in 0..trials {
        let start = Instant::now();
        let rec = fuzz_one(&fc, index)?;
        let out = run_trial(&rec, config)?;
        eprintln!("trial {index}: {} in {:.1} ms", if out.passed() { "pass" } else { "FAIL" }, start.elapsed().as_secs_f64() * 1e3);
        perturbed += u64::from(out.perturbed);
        discarded += out.discarded;
        unknown |= out.cartesian == "unknown" || out.fit == "unknown";
        if out.passed() {
            passed += 1;
        } else {
            failures.push(index);
        }
    }
    let attempts = perturbed as usize + discarded;
    let rate = if attempts == 0 { 0.0 } else { discarded as f64 / attempts as f64 };
    let text = format!(
        "field F_{p}, seed {seed}: {passed}/{trials} passed, {perturbed} perturbed, {discarded} perturbations discarded (rate {rate:.3})"
    );
    let v = json!({
        "field": p, "seed": seed, "trials": trials, "passed": passed,
        "perturbed": perturbed, "discarded": discarded, "discard_rate": rate, "failures": failures,
    });
    emit(format, &text, &v);
    Ok(if passed == trials {
        0
    } else if unknown {
        2
    } else {
        1
    })
}
