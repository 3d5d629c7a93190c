//! Batch command line: one verb per operation, text or JSON reports.
//!
//! Exit codes: 0 on success, 1 when a verification finds violations or a
//! query answers no (not distinguished, no filler, not nullhomotopic), 2 on
//! usage or input errors.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::freemod::normal_form;
use crate::json::{
    elem_to_json, homotopy_to_json, matrix_from_json, matrix_to_json, morphism_from_json, morphism_to_json,
    payload_ring, triangle_from_json, triangle_to_json, SCHEMA,
};
use crate::rings::Ring;
use crate::scalars::FieldElem;
use crate::structure::{
    classify_with, count_triangulations, equivalence_classes, verify_premises, Case, LocalStructure,
    TriangulationDescriptor,
};
use crate::triangulated::{
    axiom_suite, complete_morphism, fill_square, homotopy_solve, is_distinguished, mapping_cone, nullhomotopy_solve,
    DistinguishedClass, DistinguishedWitness, SuiteConfig, TriangleError, TriangleMorphism,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "trilocal",
    version,
    about = "Triangulations of free modules over finite local rings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ring summary and premise checks.
    Ring(Common),
    /// Case, generator, admissible residues and obstructions.
    Classify(Common),
    /// Number of triangulations.
    Count(Common),
    /// Triangulations grouped into equivalence classes.
    Classes(Common),
    /// Normal form of a matrix given with --input.
    NormalForm(Common),
    /// Mapping cone of a morphism given with --input.
    Cone(Common),
    /// Nullhomotopy of a triangle, or homotopy to zero of a morphism.
    Contract(Common),
    /// Completes a matrix to a distinguished triangle.
    Complete(Common),
    /// Fills a commuting square {source, target, alpha, beta}.
    Fill(Common),
    /// Decides whether a triangle is distinguished.
    Distinguished(Common),
    /// Runs the axiom checks.
    Axioms(Common),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Ring spec such as `w2(4)`, `gf(8)` or `skewpoly(64; frob^2)`.
    #[arg(long)]
    ring: Option<String>,
    /// Residue element (decimal index) selecting the triangulation.
    #[arg(long)]
    r: Option<u32>,
    /// Second residue whose generating triangles are added to the class.
    #[arg(long)]
    mixed_with: Option<u32>,
    #[arg(long, default_value_t = 2)]
    max_rank: usize,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rank bound for membership tests.
    #[arg(long, default_value_t = 8)]
    budget: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// JSON payload file; `-` reads standard input.
    #[arg(long)]
    input: Option<String>,
}

struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

struct Outcome {
    ring: Option<Arc<Ring>>,
    result: Value,
    code: i32,
}

/// Exit code of a yes/no query.
fn verdict(yes: bool) -> i32 {
    if yes {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn ok(ring: &Arc<Ring>, result: Value) -> Outcome {
    Outcome {
        ring: Some(ring.clone()),
        result,
        code: EXIT_OK,
    }
}

fn verb_name(c: &Command) -> &'static str {
    match c {
        Command::Ring(_) => "ring",
        Command::Classify(_) => "classify",
        Command::Count(_) => "count",
        Command::Classes(_) => "classes",
        Command::NormalForm(_) => "normal-form",
        Command::Cone(_) => "cone",
        Command::Contract(_) => "contract",
        Command::Complete(_) => "complete",
        Command::Fill(_) => "fill",
        Command::Distinguished(_) => "distinguished",
        Command::Axioms(_) => "axioms",
    }
}

fn common(c: &Command) -> &Common {
    match c {
        Command::Ring(a)
        | Command::Classify(a)
        | Command::Count(a)
        | Command::Classes(a)
        | Command::NormalForm(a)
        | Command::Cone(a)
        | Command::Contract(a)
        | Command::Complete(a)
        | Command::Fill(a)
        | Command::Distinguished(a)
        | Command::Axioms(a) => a,
    }
}

/// Parses `argv` (program name first), runs the command and writes the report.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let args = common(&cli.command).clone();
    let verb = verb_name(&cli.command);
    let started = Instant::now();
    let outcome = match dispatch(&cli.command, &args) {
        Ok(o) => o,
        Err(Usage(msg)) => {
            let _ = writeln!(err, "trilocal {verb}: {msg}");
            return EXIT_USAGE;
        }
    };
    let report = json!({
        "schema": SCHEMA,
        "command": command_echo(verb, &args),
        "ring": outcome.ring.as_ref().map(|r| ring_summary(r)).unwrap_or(Value::Null),
        "seed": args.seed,
        "result": outcome.result,
        "timing_ms": started.elapsed().as_millis() as u64,
    });
    let written = match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable")),
        Format::Text => write_text(out, &report),
    };
    if written.is_err() {
        let _ = writeln!(err, "trilocal: cannot write the report");
        return EXIT_USAGE;
    }
    outcome.code
}

fn command_echo(verb: &str, a: &Common) -> Value {
    json!({
        "verb": verb,
        "ring": a.ring,
        "r": a.r,
        "mixed_with": a.mixed_with,
        "max_rank": a.max_rank,
        "samples": a.samples,
        "budget": a.budget,
        "input": a.input,
    })
}

fn ring_summary(ring: &Ring) -> Value {
    json!({
        "spec": ring.spec().to_string(),
        "size": ring.size(),
        "characteristic": ring.characteristic(),
        "residue_order": ring.base().order(),
        "generator": ring.generator().map(|x| elem_to_json(ring, x)),
    })
}

fn write_text(out: &mut dyn Write, report: &Value) -> std::io::Result<()> {
    let mut lines = Vec::new();
    flatten("", report, &mut lines);
    for (k, v) in lines {
        writeln!(out, "{k}: {v}")?;
    }
    Ok(())
}

/// Dotted keys for objects; arrays of scalars stay inline.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(&key(k), child, out);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object()) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), child, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn ring_arg(a: &Common) -> Result<Arc<Ring>, Usage> {
    let spec = a.ring.as_deref().ok_or_else(|| Usage("--ring is required".into()))?;
    Ok(Ring::parse(spec)?)
}

fn read_input(a: &Common) -> Result<Value, Usage> {
    let path = a.input.as_deref().ok_or_else(|| Usage("--input is required".into()))?;
    let text = if path == "-" {
        std::io::read_to_string(std::io::stdin())?
    } else {
        std::fs::read_to_string(path).map_err(|e| Usage(format!("{path}: {e}")))?
    };
    Ok(serde_json::from_str(&text)?)
}

/// Ring from --ring, else from the payload.
fn ring_for_payload(a: &Common, payload: &Value) -> Result<Arc<Ring>, Usage> {
    match &a.ring {
        Some(_) => ring_arg(a),
        None => Ok(payload_ring(payload)?),
    }
}

fn local(ring: &Arc<Ring>) -> Result<Arc<LocalStructure>, Usage> {
    Ok(Arc::new(LocalStructure::new(ring)?))
}

fn residue(ls: &LocalStructure, r: u32) -> Result<FieldElem, Usage> {
    let t = FieldElem(r);
    if !ls.d().contains(t) {
        return Err(Usage(format!(
            "residue {r} outside a field of order {}",
            ls.d().order()
        )));
    }
    Ok(t)
}

fn class_for(a: &Common, ls: Arc<LocalStructure>) -> Result<DistinguishedClass, Usage> {
    let primary = match a.r {
        Some(r) => TriangulationDescriptor::new(&ls, residue(&ls, r)?)?,
        None => TriangulationDescriptor::canonical(&ls)?,
    };
    match a.mixed_with {
        None => Ok(DistinguishedClass::standard(ls, &primary)),
        Some(r2) => {
            if ls.x().is_none() {
                return Err(Usage("--mixed-with needs a ring with a nonzero maximal ideal".into()));
            }
            let r2 = residue(&ls, r2)?;
            Ok(DistinguishedClass::mixed(ls, vec![primary.r, r2]))
        }
    }
}

fn d_list(v: &[FieldElem]) -> Value {
    json!(v.iter().map(|t| t.0).collect::<Vec<_>>())
}

fn witness_json(w: &DistinguishedWitness) -> Value {
    json!({
        "shape": {
            "identity_blocks": w.shape.m,
            "generating_residues": d_list(&w.shape.deltas),
            "contractible_v": w.shape.v,
            "contractible_w": w.shape.w,
        },
        "iso": morphism_to_json(&w.iso),
    })
}

fn membership(class: &DistinguishedClass, t: &crate::triangulated::Triangle, budget: usize) -> Result<Value, Usage> {
    Ok(match is_distinguished(class, t, budget) {
        Ok(Some(w)) => json!({ "distinguished": true, "witness": witness_json(&w) }),
        Ok(None) => json!({ "distinguished": false }),
        Err(TriangleError::BudgetExceeded { rank, budget }) => {
            json!({ "distinguished": Value::Null, "budget_exceeded": { "rank": rank, "budget": budget } })
        }
        Err(e) => return Err(e.into()),
    })
}

fn dispatch(cmd: &Command, a: &Common) -> Result<Outcome, Usage> {
    match cmd {
        Command::Ring(_) => {
            let ring = ring_arg(a)?;
            let report = verify_premises(&ring);
            let code = verdict(report.all_passed());
            let result = json!({ "premises_hold": report.all_passed(), "checks": report.checks });
            Ok(Outcome {
                ring: Some(ring),
                result,
                code,
            })
        }
        Command::Classify(_) => {
            let ring = ring_arg(a)?;
            let ls = local(&ring)?;
            let c = classify_with(&ls);
            let count = count_triangulations(&ls)?;
            let obstruction = c.obstruction.as_ref().map(|o| {
                json!({
                    "failed": o.failed,
                    "premise_failure": o.premise_failure,
                    "sign_witness": o.sign_witness.map(|(x, nx)| json!([elem_to_json(&ring, x), elem_to_json(&ring, nx)])),
                    "residue_witnesses": o.residue_witnesses.iter().map(|(r, t)| json!({ "r": r.0, "t": t.0 })).collect::<Vec<_>>(),
                    "detail": o.detail,
                })
            });
            let result = json!({
                "case": c.case,
                "x": c.x.map(|x| elem_to_json(&ring, x)),
                "admissible_r": d_list(&c.admissible_r),
                "triangulations": count,
                "obstruction": obstruction,
            });
            Ok(ok(&ring, result))
        }
        Command::Count(_) => {
            let ring = ring_arg(a)?;
            let ls = local(&ring)?;
            Ok(ok(&ring, json!({ "triangulations": count_triangulations(&ls)? })))
        }
        Command::Classes(_) => {
            let ring = ring_arg(a)?;
            let ls = local(&ring)?;
            let count = count_triangulations(&ls)?;
            let classes: Vec<Value> = match classify_with(&ls).case {
                Case::None => Vec::new(),
                Case::Semisimple => vec![json!([])],
                _ => equivalence_classes(&ls)?.iter().map(|c| d_list(c)).collect(),
            };
            Ok(ok(
                &ring,
                json!({ "triangulations": count, "class_count": classes.len(), "classes": classes }),
            ))
        }
        Command::NormalForm(_) => {
            let payload = read_input(a)?;
            let ring = ring_for_payload(a, &payload)?;
            let ls = local(&ring)?;
            let m = matrix_from_json(&ring, &payload)?;
            let nf = normal_form(&ls, &m)?;
            let result = json!({
                "unit_rank": nf.unit_rank,
                "x_rank": nf.x_rank,
                "u": matrix_to_json(&nf.u),
                "v": matrix_to_json(&nf.v),
                "diagonal": matrix_to_json(&nf.diagonal(&ls)),
            });
            Ok(ok(&ring, result))
        }
        Command::Cone(_) => {
            let payload = read_input(a)?;
            let ring = ring_for_payload(a, &payload)?;
            let class = class_for(a, local(&ring)?)?;
            let phi = morphism_from_json(&ring, &payload)?;
            let cone = mapping_cone(&phi)?;
            let member = membership(&class, &cone, a.budget)?;
            let code = verdict(member["distinguished"] == json!(true));
            let result = json!({ "cone": triangle_to_json(&cone), "membership": member });
            Ok(Outcome {
                ring: Some(ring),
                result,
                code,
            })
        }
        Command::Contract(_) => {
            let payload = read_input(a)?;
            let ring = ring_for_payload(a, &payload)?;
            let ls = local(&ring)?;
            let hom = if payload.get("source").is_some() {
                let phi = morphism_from_json(&ring, &payload)?;
                homotopy_solve(&ls, &phi, &TriangleMorphism::zero(&phi.source, &phi.target))?
            } else {
                nullhomotopy_solve(&ls, &triangle_from_json(&ring, &payload)?)?
            };
            let result = json!({
                "nullhomotopic": hom.is_some(),
                "homotopy": hom.as_ref().map(homotopy_to_json),
            });
            Ok(Outcome {
                ring: Some(ring),
                result,
                code: verdict(hom.is_some()),
            })
        }
        Command::Complete(_) => {
            let payload = read_input(a)?;
            let ring = ring_for_payload(a, &payload)?;
            let class = class_for(a, local(&ring)?)?;
            let f = matrix_from_json(&ring, &payload)?;
            let (t, w) = complete_morphism(&class, &f)?;
            let member = membership(&class, &t, a.budget)?;
            let code = verdict(member["distinguished"] == json!(true));
            let result = json!({ "triangle": triangle_to_json(&t), "witness": witness_json(&w), "membership": member });
            Ok(Outcome {
                ring: Some(ring),
                result,
                code,
            })
        }
        Command::Fill(_) => {
            let payload = read_input(a)?;
            let ring = ring_for_payload(a, &payload)?;
            let class = class_for(a, local(&ring)?)?;
            let part = |k: &str| payload.get(k).ok_or_else(|| Usage(format!("payload lacks \"{k}\"")));
            let t1 = triangle_from_json(&ring, part("source")?)?;
            let t2 = triangle_from_json(&ring, part("target")?)?;
            let alpha = matrix_from_json(&ring, part("alpha")?)?;
            let beta = matrix_from_json(&ring, part("beta")?)?;
            match fill_square(&class, &t1, &t2, &alpha, &beta, a.budget) {
                Ok(phi) => {
                    let cone = mapping_cone(&phi)?;
                    let member = membership(&class, &cone, a.budget)?;
                    let code = verdict(member["distinguished"] == json!(true));
                    let result =
                        json!({ "filled": true, "morphism": morphism_to_json(&phi), "cone_membership": member });
                    Ok(Outcome {
                        ring: Some(ring),
                        result,
                        code,
                    })
                }
                Err(e @ (TriangleError::NoFiller | TriangleError::NotDistinguished)) => Ok(Outcome {
                    ring: Some(ring),
                    result: json!({ "filled": false, "reason": e.to_string() }),
                    code: EXIT_VIOLATION,
                }),
                Err(e) => Err(e.into()),
            }
        }
        Command::Distinguished(_) => {
            let payload = read_input(a)?;
            let ring = ring_for_payload(a, &payload)?;
            let class = class_for(a, local(&ring)?)?;
            let t = triangle_from_json(&ring, &payload)?;
            let member = membership(&class, &t, a.budget)?;
            let code = verdict(member["distinguished"] == json!(true));
            Ok(Outcome {
                ring: Some(ring),
                result: member,
                code,
            })
        }
        Command::Axioms(_) => {
            let ring = ring_arg(a)?;
            let class = class_for(a, local(&ring)?)?;
            let cfg = SuiteConfig {
                max_rank: a.max_rank,
                samples: a.samples,
                seed: a.seed,
                budget: a.budget,
            };
            let report = axiom_suite(&class, cfg);
            let code = verdict(report.passed());
            let mut result = Map::new();
            result.insert("violations".into(), json!(report.violations()));
            result.insert("cases".into(), json!(report.cases()));
            result.insert("report".into(), serde_json::to_value(&report)?);
            Ok(Outcome {
                ring: Some(ring),
                result: Value::Object(result),
                code,
            })
        }
    }
}
