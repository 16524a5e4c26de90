//! The `freelin` command line. Every command prints one JSON report; the
//! exit code is 0 for a verified or true result, 1 for a definite negative,
//! 2 when a bounded procedure gave up and 3 for unusable input.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algebra::{Field, Laurent, Scalar};
use crate::differentials::{jacobi_endomorphism, jacobian, jacobian_invert_bounded, JacobianInversion};
use crate::error::Error;
use crate::generic::{amitsur_levitzki, linearize_positive_root, reduce_endo, DEFAULT_SIZES};
use crate::json::{self, as_i64_vec, as_usize, get};
use crate::lift2::{abelianize_aut, jvdk_decompose, lift, linearize_kstar_f2};
use crate::parse::{parse_many, ParseOptions};
use crate::rees::{build_rees_action, cancellation_pair, check_grading, rees_presentation};
use crate::torus::{action_weights, average_linearize_with, is_effective, validate_action, LinearizationReport};
use crate::torus::LinearizationStatus;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "freelin", version, about = "Torus actions on free associative algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Inversion cutoff for linearization, or the grading check depth for `rees`.
    #[arg(long, global = true)]
    pub max_degree: Option<usize>,
    /// Matrix size for `reduce` and `al-check`.
    #[arg(long = "N", global = true)]
    pub size: Option<usize>,
    /// Degree cutoff for inverting a Jacobian.
    #[arg(long, global = true)]
    pub invert: Option<usize>,
    /// Recorded in the report; no command draws random numbers.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Ground field, overriding the input: Q or Fp:<p>.
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Include wall-clock time in the report (makes it nondeterministic).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Check the action axioms.
    Validate { input: PathBuf },
    /// Linearize by zero-weight averaging.
    Linearize { input: PathBuf },
    /// Decide effectiveness from the weight lattice.
    Effective { input: PathBuf },
    /// Free Jacobian matrix, optionally inverted up to --invert.
    Jacobian { input: PathBuf },
    /// The Jacobi endomorphism on doubled variables.
    JacobiEndo { input: PathBuf },
    /// Reduce to --N generic matrices.
    Reduce { input: PathBuf },
    /// Check the standard identity S_2N on N×N generic matrices.
    AlCheck,
    /// Linearize a positive-root action.
    PosrootLinearize { input: PathBuf },
    /// Factor a plane automorphism into affine and elementary maps.
    Jvdk { input: PathBuf },
    /// Lift a plane automorphism to the free algebra on two generators.
    Lift2 { input: PathBuf },
    /// Linearize a K^× action on two generators through the commutative quotient.
    Kstar2 { input: PathBuf },
    /// Presentation of the extended Rees algebra of an ideal.
    Rees { input: PathBuf },
    /// Graded torus action on a Rees algebra with extra variables.
    ReesAction { input: PathBuf },
    /// Cancellation pair over K[t].
    CancelPair { input: PathBuf },
    /// Canonical JSON for expressions.
    Parse {
        exprs: Vec<String>,
        /// Number of generators; inferred when omitted.
        #[arg(long, default_value_t = 0)]
        n: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Linearize { .. } => "linearize",
            Command::Effective { .. } => "effective",
            Command::Jacobian { .. } => "jacobian",
            Command::JacobiEndo { .. } => "jacobi-endo",
            Command::Reduce { .. } => "reduce",
            Command::AlCheck => "al-check",
            Command::PosrootLinearize { .. } => "posroot-linearize",
            Command::Jvdk { .. } => "jvdk",
            Command::Lift2 { .. } => "lift2",
            Command::Kstar2 { .. } => "kstar2",
            Command::Rees { .. } => "rees",
            Command::ReesAction { .. } => "rees-action",
            Command::CancelPair { .. } => "cancel-pair",
            Command::Parse { .. } => "parse",
        }
    }

    fn input(&self) -> Option<&PathBuf> {
        match self {
            Command::Validate { input }
            | Command::Linearize { input }
            | Command::Effective { input }
            | Command::Jacobian { input }
            | Command::JacobiEndo { input }
            | Command::Reduce { input }
            | Command::PosrootLinearize { input }
            | Command::Jvdk { input }
            | Command::Lift2 { input }
            | Command::Kstar2 { input }
            | Command::Rees { input }
            | Command::ReesAction { input }
            | Command::CancelPair { input } => Some(input),
            Command::AlCheck | Command::Parse { .. } => None,
        }
    }
}

/// Outcome of a command before it is wrapped into a report.
struct Outcome {
    code: i32,
    status: &'static str,
    output: Value,
}

fn outcome(code: i32, output: Value) -> Outcome {
    let status = match code {
        EXIT_OK => "verified",
        EXIT_NEGATIVE => "negative",
        EXIT_INCONCLUSIVE => "inconclusive",
        _ => "error",
    };
    Outcome { code, status, output }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::Json(_) => EXIT_INPUT,
        Error::TermLimitExceeded(_) => EXIT_INCONCLUSIVE,
        _ => EXIT_NEGATIVE,
    }
}

fn linearization(r: &LinearizationReport) -> Outcome {
    let code = match r.status {
        LinearizationStatus::Verified => EXIT_OK,
        LinearizationStatus::Failed { .. } => EXIT_NEGATIVE,
        LinearizationStatus::Inconclusive { .. } => EXIT_INCONCLUSIVE,
    };
    outcome(code, json::linearization_report_to_json(r))
}

fn boolean(ok: bool, output: Value) -> Outcome {
    outcome(if ok { EXIT_OK } else { EXIT_NEGATIVE }, output)
}

fn need(v: Option<usize>, flag: &str) -> crate::Result<usize> {
    v.ok_or_else(|| Error::InvalidInput(format!("this command needs --{flag}")))
}

fn execute(cli: &Cli, input: &Value) -> crate::Result<Outcome> {
    let action = || json::action_from_json(input, "");
    let endo = || json::endo_from_json(input, "");
    let comm = || json::comm_endo_from_json(input, "");
    Ok(match &cli.command {
        Command::Validate { .. } => {
            let ok = validate_action(&action()?)?;
            boolean(ok, json!({"valid": ok}))
        }
        Command::Linearize { .. } => linearization(&average_linearize_with(&action()?, cli.max_degree.unwrap_or(0))?),
        Command::Effective { .. } => {
            let w = action_weights(&action()?)?;
            let ok = is_effective(&w);
            boolean(ok, json!({"effective": ok, "weights": json::weights_to_json(&w)}))
        }
        Command::Jacobian { .. } => {
            let j = jacobian(&endo()?);
            let mut out = json!({"jacobian": json::jacobian_to_json(&j)});
            match cli.invert {
                None => outcome(EXIT_OK, out),
                Some(cutoff) => {
                    let (status, inv) = jacobian_invert_bounded(&j, cutoff)?;
                    let (code, name) = match status {
                        JacobianInversion::Invertible => (EXIT_OK, "Invertible"),
                        JacobianInversion::NotInvertibleAtCutoff => (EXIT_NEGATIVE, "NotInvertibleAtCutoff"),
                        JacobianInversion::Inconclusive => (EXIT_INCONCLUSIVE, "Inconclusive"),
                    };
                    out["inversion"] = json!({
                        "status": name,
                        "cutoff": cutoff,
                        "inverse": inv.as_ref().map(json::jacobian_to_json),
                    });
                    outcome(code, out)
                }
            }
        }
        Command::JacobiEndo { .. } => outcome(EXIT_OK, json::endo_to_json(&jacobi_endomorphism(&endo()?))),
        Command::Reduce { .. } => {
            let c = reduce_endo(&endo()?, need(cli.size, "N")?)?;
            outcome(EXIT_OK, json::coeff_map_to_json(&c))
        }
        Command::AlCheck => {
            let size = need(cli.size, "N")?;
            let field = input_field(cli)?;
            let s = amitsur_levitzki(size, field)?;
            let zero = s.is_zero();
            let message = if zero {
                format!("S_{} vanishes identically", 2 * size)
            } else {
                format!("S_{} does not vanish", 2 * size)
            };
            boolean(zero, json!({"N": size, "vanishes": zero, "message": message}))
        }
        Command::PosrootLinearize { .. } => {
            let sizes = cli.size.map_or(DEFAULT_SIZES.to_vec(), |k| (1..=k).collect());
            linearization(&linearize_positive_root(&action()?, &sizes, cli.max_degree.unwrap_or(0))?)
        }
        Command::Jvdk { .. } => {
            let phi = comm()?;
            let fact = jvdk_decompose(&phi)?;
            let ok = fact.recompose(phi.field())? == phi;
            boolean(ok, json!({"factorization": json::factorization_to_json(&fact), "recomposes": ok}))
        }
        Command::Lift2 { .. } => {
            let phi = comm()?;
            let fact = jvdk_decompose(&phi)?;
            let lifted = lift(&fact, phi.field())?;
            let ok = abelianize_aut(&lifted)? == phi;
            boolean(
                ok,
                json!({
                    "factorization": json::factorization_to_json(&fact),
                    "lift": json::endo_to_json(&lifted),
                    "abelianizes_back": ok,
                }),
            )
        }
        Command::Kstar2 { .. } => linearization(&linearize_kstar_f2(&action()?)?),
        Command::Rees { .. } => {
            let g = rees_presentation(&json::ideal_from_json(input, "")?)?;
            let depth = cli.max_degree.unwrap_or(6);
            let ok = check_grading(&g, depth) && g.model_is_sound()?;
            boolean(ok, json!({"presentation": json::presentation_to_json(&g), "grading_checked_to": depth, "graded": ok}))
        }
        Command::ReesAction { .. } => {
            let ideal = json::ideal_from_json(get(input, "ideal", "")?, "/ideal")?;
            let t_degree = as_i64_vec(get(input, "t_degree", "")?, "/t_degree")?;
            let ys = json::as_array(get(input, "y_degrees", "")?, "/y_degrees")?
                .iter()
                .enumerate()
                .map(|(i, y)| as_i64_vec(y, &format!("/y_degrees/{i}")))
                .collect::<crate::Result<Vec<_>>>()?;
            let s = match input.get("s") {
                Some(s) => as_usize(s, "/s")?,
                None => 0,
            };
            let a = build_rees_action(&ideal, s, &t_degree, &ys)?;
            outcome(
                EXIT_OK,
                json!({
                    "presentation": json::presentation_to_json(&a.presentation),
                    "action": json::action_to_json(&a.action),
                    "s": a.s,
                    "trace": a.trace,
                }),
            )
        }
        Command::CancelPair { .. } => {
            let field = json::field_from_json(input, "")?;
            let f = json::scalars_from_json(get(input, "f", "")?, field, "/f")?;
            let g = json::scalars_from_json(get(input, "g", "")?, field, "/g")?;
            let witness = match input.get("witness") {
                None | Some(Value::Null) => None,
                Some(w) => Some(json::scalars_from_json(w, field, "/witness")?),
            };
            let bound = match input.get("degree_bound") {
                Some(b) => as_usize(b, "/degree_bound")?,
                None => cli.max_degree.unwrap_or(4),
            };
            let pair = cancellation_pair(&f, &g, witness.as_deref(), bound)?;
            outcome(
                EXIT_OK,
                json!({
                    "witness": json::scalars_to_json(&pair.witness),
                    "witness_inverse": json::scalars_to_json(&pair.witness_inverse),
                    "degree_bound": pair.degree_bound,
                    "isomorphism": json::iso_to_json(&pair.iso),
                }),
            )
        }
        Command::Parse { exprs, n } => {
            let field = input_field(cli)?;
            let texts: Vec<&str> = exprs.iter().map(String::as_str).collect();
            let polys = parse_many(&texts, ParseOptions { field, n: *n, r: 0 })?;
            let r = polys.first().map_or(0, |p| p.ring().r);
            let out: Vec<Value> = if r == 0 {
                polys
                    .iter()
                    .map(|p| json::poly_to_json::<Scalar>(&p.map_coeffs(&field, |c| c.constant_term())))
                    .collect()
            } else {
                polys.iter().map(json::poly_to_json::<Laurent>).collect()
            };
            outcome(EXIT_OK, json!({"field": json::field_to_json(field), "r": r, "polys": out}))
        }
    })
}

fn input_field(cli: &Cli) -> crate::Result<Field> {
    cli.field.as_deref().map_or(Ok(Field::Rational), Field::parse)
}

/// Applies --field to the input, including a nested ideal.
fn override_field(cli: &Cli, v: &mut Value) -> crate::Result<()> {
    let Some(f) = &cli.field else { return Ok(()) };
    Field::parse(f)?;
    if let Some(obj) = v.as_object_mut() {
        obj.insert("field".into(), Value::String(f.clone()));
        if let Some(ideal) = obj.get_mut("ideal").and_then(Value::as_object_mut) {
            ideal.insert("field".into(), Value::String(f.clone()));
        }
    }
    Ok(())
}

fn read_input(path: &PathBuf) -> crate::Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::Read::read_to_end(&mut std::io::stdin(), &mut buf)
            .map_err(|e| Error::InvalidInput(format!("stdin: {e}")))?;
        return Ok(buf);
    }
    std::fs::read(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

/// Runs a parsed command and returns the exit code and the report text.
pub fn run(cli: &Cli) -> (i32, String) {
    let start = Instant::now();
    let bytes = match cli.command.input() {
        Some(p) => read_input(p),
        None => Ok(Vec::new()),
    };
    let digest = match &bytes {
        Ok(b) => format!("{:x}", Sha256::digest(b)),
        Err(_) => String::new(),
    };
    let result = bytes.and_then(|b| {
        let mut v: Value = if b.is_empty() && cli.command.input().is_none() {
            Value::Null
        } else {
            serde_json::from_slice(&b)?
        };
        override_field(cli, &mut v)?;
        execute(cli, &v)
    });
    let (code, mut report) = match result {
        Ok(o) => (
            o.code,
            json!({"status": o.status, "output": o.output}),
        ),
        Err(e) => {
            let code = error_code(&e);
            let status = if code == EXIT_INPUT { "error" } else { outcome(code, Value::Null).status };
            (code, json!({"status": status, "error": e.to_string(), "output": null}))
        }
    };
    report["command"] = json!(cli.command.name());
    report["input_digest"] = json!(digest);
    report["exit_code"] = json!(code);
    report["config"] = json!({
        "max_degree": cli.max_degree,
        "N": cli.size,
        "invert": cli.invert,
        "seed": cli.seed,
        "field": cli.field,
    });
    if cli.timing {
        report["timing_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    let text = serde_json::to_string_pretty(&report).unwrap_or_else(|_| "{}".into());
    (code, text + "\n")
}

/// Parses arguments, runs, and writes the report; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (code, text) = run(&cli);
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => print!("{text}"),
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FreePoly;

    fn poly(text: &str, n: usize) -> crate::Result<FreePoly<Scalar>> {
        crate::parse::parse_poly(text, Field::Rational, n)
    }

    fn run_on(args: &[&str], input: &str) -> (i32, Value) {
        let dir = std::env::temp_dir().join(format!("freelin-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("{}.json", args.join("_").replace(['/', ' ', ':'], "-")));
        std::fs::write(&path, input).unwrap();
        let mut full = vec!["freelin".to_string()];
        full.extend(args.iter().map(|s| s.to_string()));
        if !input.is_empty() {
            full.push(path.display().to_string());
        }
        let cli = Cli::try_parse_from(full).unwrap();
        let (code, text) = run(&cli);
        (code, serde_json::from_str(&text).unwrap())
    }

    #[test]
    fn linearize_fixture() {
        let (code, r) = run_on(&["linearize"], r#"{"images": ["t*z1", "t^3*z2 + (t^2 - t^3)*z1^2"]}"#);
        assert_eq!(code, EXIT_OK, "{r}");
        let beta = json::endo_from_json(&r["output"]["beta"], "").unwrap();
        assert_eq!(beta.images()[1], poly("z2 + z1^2", 2).unwrap());
    }

    #[test]
    fn al_check_and_jacobian() {
        let (code, r) = run_on(&["al-check", "--N", "2"], "");
        assert_eq!(code, EXIT_OK);
        assert_eq!(r["output"]["message"], "S_4 vanishes identically");
        let (code, r) = run_on(&["jacobian", "--invert", "4"], r#"{"images": ["z1^2", "z2"]}"#);
        assert_eq!(code, EXIT_NEGATIVE);
        assert_eq!(r["output"]["inversion"]["status"], "NotInvertibleAtCutoff");
    }

    #[test]
    fn input_errors_exit_3_with_pointer() {
        let (code, r) = run_on(&["validate"], r#"{"r": 1, "images": ["t*z1", 5]}"#);
        assert_eq!(code, EXIT_INPUT);
        assert!(r["error"].as_str().unwrap().contains("/images/1"), "{r}");
        let (code, _) = run_on(&["validate"], "{not json");
        assert_eq!(code, EXIT_INPUT);
    }

    #[test]
    fn reports_are_deterministic() {
        let input = r#"{"images": ["t*z1", "t^3*z2 + (t^2 - t^3)*z1^2"]}"#;
        let a = run_on(&["linearize"], input);
        let b = run_on(&["linearize"], input);
        assert_eq!(a.1.to_string(), b.1.to_string());
        assert!(a.1.get("timing_ms").is_none());
    }
}
