use std::io::Read;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::{DiffForm, VolumeForm};
use crate::nambu::{
    fi_bruteforce, hamiltonian_vf, is_integrable_1form, modular, modular_properties,
    nambu_conditions, verify_type_2r,
};
use crate::normalform::{classify_linear_part, normal_form, p2_factor, reduce_p, verify_pullback};
use crate::poly::TruncatedPoly;
use crate::quadratic::classify_quadratic;
use crate::report::Verdict;

use super::dsl::{parse, DslDocument};

/// Exact checks and normal forms for Nambu tensors and integrable 1-forms.
///
/// Exit codes: 0 when the verdict holds or the computation succeeds and
/// certifies, 1 when a verdict or certificate fails, 2 on parse errors,
/// unknown names and failed preconditions.
#[derive(Parser, Debug)]
#[command(name = "nambu", version)]
pub struct Cli {
    /// Document file; `-` reads standard input.
    #[arg(long, short, default_value = "-", global = true)]
    pub doc: String,
    /// Emit the structured report as JSON (sorted keys).
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// w ^ dw = 0.
    CheckIntegrable { form: String },
    /// The covariant Nambu conditions for the standard volume.
    CheckNambu { mv: String },
    /// Brute-force fundamental identity on test functions up to a degree.
    FiCheck {
        mv: String,
        #[arg(long)]
        deg: u32,
    },
    /// Modular tensor for the standard volume.
    Modular { mv: String },
    /// P ^ L = 0 and [P, L] = 0 for P = i_{dg_1^..^dg_s} DL.
    ModularProps {
        mv: String,
        #[arg(long, value_delimiter = ',')]
        g: Vec<String>,
    },
    /// Type 2.r certificate for commuting fields independent at 0.
    Type2r {
        mv: String,
        #[arg(long, value_delimiter = ',', required = true)]
        fields: Vec<String>,
    },
    /// Hamiltonian vector field of r-1 functions.
    Hamiltonian {
        mv: String,
        #[arg(long, value_delimiter = ',', required = true)]
        funcs: Vec<String>,
    },
    /// Type of the linear part of an (n-1)-vector vanishing at 0.
    ClassifyLinear { mv: String },
    /// Formal normal form {x_1..x_{n-1}} = y with potentials f, g.
    NormalForm {
        mv: String,
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Reduction of y^p dy + sum A_i dx_i to y-degree <= p.
    ReduceP {
        form: String,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        cap: Option<u32>,
    },
    /// a1 = dg, a2 = dh, a0 = dk + h dg for a reduced p = 2 form.
    P2Factor { form: String },
    /// unit * w = phi^* target with phi = (h, x_n); target uses x1, x2 only.
    VerifyPullback {
        form: String,
        #[arg(long)]
        h: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        unit: String,
    },
    /// Classification of a quadratic integrable 1-form.
    ClassifyQuadratic { form: String },
    /// Print the document in canonical form.
    Print,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckIntegrable { .. } => "check-integrable",
            Command::CheckNambu { .. } => "check-nambu",
            Command::FiCheck { .. } => "fi-check",
            Command::Modular { .. } => "modular",
            Command::ModularProps { .. } => "modular-props",
            Command::Type2r { .. } => "type2r",
            Command::Hamiltonian { .. } => "hamiltonian",
            Command::ClassifyLinear { .. } => "classify-linear",
            Command::NormalForm { .. } => "normal-form",
            Command::ReduceP { .. } => "reduce-p",
            Command::P2Factor { .. } => "p2-factor",
            Command::VerifyPullback { .. } => "verify-pullback",
            Command::ClassifyQuadratic { .. } => "classify-quadratic",
            Command::Print => "print",
        }
    }
}

/// Result of a successful command: whether its verdict or certificate
/// holds, plus the report.
#[derive(Clone, Debug)]
pub struct Report {
    pub ok: bool,
    pub body: Value,
    pub text: String,
}

impl Report {
    fn verdict(v: Verdict) -> Report {
        Report {
            ok: v.holds(),
            text: v.to_string(),
            body: v.to_json(),
        }
    }

    fn value(body: Value) -> Report {
        let ok = body
            .get("certificate")
            .and_then(|c| c.get("holds"))
            .and_then(Value::as_bool)
            .unwrap_or(true);
        Report {
            ok,
            text: render(&body),
            body,
        }
    }
}

fn render(v: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(m) = v {
        for (k, val) in m {
            if k == "certificate" {
                continue;
            }
            match val {
                Value::String(s) => out.push_str(&format!("{}: {}\n", k, s)),
                other => out.push_str(&format!("{}: {}\n", k, other)),
            }
        }
        if let Some(c) = m.get("certificate") {
            out.push_str(&format!(
                "certificate: {}\n",
                if c.get("holds").and_then(Value::as_bool).unwrap_or(false) {
                    "true"
                } else {
                    "false"
                }
            ));
            if let Some(Value::Array(cs)) = c.get("checks") {
                for ch in cs {
                    let id = ch.get("id").and_then(Value::as_str).unwrap_or("");
                    let holds = ch.get("holds").and_then(Value::as_bool).unwrap_or(false);
                    out.push_str(&format!(
                        "  {}: {}\n",
                        id,
                        if holds { "ok" } else { "FAILS" }
                    ));
                }
            }
        }
    } else {
        out.push_str(&format!("{}\n", v));
    }
    out
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::ShapeMismatch { .. } => "shape_mismatch",
        Error::IndexOutOfRange { .. } => "index_out_of_range",
        Error::NonzeroConstantTerm { .. } => "nonzero_constant_term",
        Error::SingularLinearPart => "singular_linear_part",
        Error::NotUnit => "not_unit",
        Error::DegreeOutOfRange { .. } => "degree_out_of_range",
        Error::KindMismatch(_) => "kind_mismatch",
        Error::NotClosed { .. } => "not_closed",
        Error::Precondition(_) => "precondition",
        Error::NotIntegrable(_) => "not_integrable",
        Error::Invariant(_) => "invariant",
        Error::Elimination(_) => "elimination",
        Error::Unsupported(_) => "unsupported",
        Error::Parse { .. } => "parse",
    }
}

fn polys(doc: &DslDocument, names: &[String]) -> Result<Vec<TruncatedPoly>> {
    names.iter().map(|n| doc.poly(n).cloned()).collect()
}

/// A polynomial by name, or a rational literal.
fn poly_or_literal(doc: &DslDocument, s: &str) -> Result<TruncatedPoly> {
    if let Ok(c) = s.parse::<crate::poly::Rational>() {
        return Ok(TruncatedPoly::constant(c, doc.n_vars, doc.cap));
    }
    doc.poly(s).cloned()
}

fn in_two_vars(w: &DiffForm, name: &str) -> Result<DiffForm> {
    let mut terms = Vec::new();
    for (idx, c) in w.terms() {
        if idx.iter().any(|&i| i > 1) {
            return Err(Error::Precondition(format!(
                "target '{}' must only use x1, x2 (found dx{})",
                name,
                idx.iter().max().expect("nonempty") + 1
            )));
        }
        terms.push((
            idx.clone(),
            c.restrict(&[0, 1]).map_err(|_| {
                Error::Precondition(format!("target '{}' must only use x1, x2", name))
            })?,
        ));
    }
    Ok(DiffForm::from_terms(2, w.cap(), w.degree(), terms))
}

/// Runs one command on a parsed document.
pub fn execute(cmd: &Command, doc: &DslDocument) -> Result<Report> {
    let vol = VolumeForm::standard(doc.n_vars, doc.cap);
    Ok(match cmd {
        Command::CheckIntegrable { form } => Report::verdict(is_integrable_1form(doc.form(form)?)?),
        Command::CheckNambu { mv } => Report::verdict(nambu_conditions(doc.mv(mv)?, &vol)?),
        Command::FiCheck { mv, deg } => Report::verdict(fi_bruteforce(doc.mv(mv)?, *deg)?),
        Command::Modular { mv } => {
            let d = modular(doc.mv(mv)?, &vol)?;
            Report::value(json!({"modular": d.to_canonical_string(), "degree": d.degree()}))
        }
        Command::ModularProps { mv, g } => {
            Report::verdict(modular_properties(doc.mv(mv)?, &vol, &polys(doc, g)?)?)
        }
        Command::Type2r { mv, fields } => {
            let xs = fields
                .iter()
                .map(|f| doc.mv(f).cloned())
                .collect::<Result<Vec<_>>>()?;
            Report::verdict(verify_type_2r(doc.mv(mv)?, &xs)?)
        }
        Command::Hamiltonian { mv, funcs } => {
            let x = hamiltonian_vf(doc.mv(mv)?, &polys(doc, funcs)?)?;
            Report::value(json!({"field": x.to_canonical_string()}))
        }
        Command::ClassifyLinear { mv } => {
            let c = classify_linear_part(doc.mv(mv)?)?;
            let matrix: Vec<Vec<String>> = c
                .matrix
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect())
                .collect();
            let nf0 = c.nf0.as_ref().map(|m| {
                m.components()
                    .iter()
                    .map(|p| p.to_canonical_string())
                    .collect::<Vec<_>>()
            });
            Report::value(json!({"class": c.class.to_json(), "matrix": matrix, "nf0": nf0}))
        }
        Command::NormalForm { mv, cap } => {
            Report::value(normal_form(doc.mv(mv)?, cap.unwrap_or(doc.cap))?.to_json())
        }
        Command::ReduceP { form, p, cap } => {
            Report::value(reduce_p(doc.form(form)?, *p, cap.unwrap_or(doc.cap))?.to_json())
        }
        Command::P2Factor { form } => Report::value(p2_factor(doc.form(form)?)?.to_json()),
        Command::VerifyPullback {
            form,
            h,
            target,
            unit,
        } => {
            let w2 = in_two_vars(doc.form(target)?, target)?;
            Report::verdict(verify_pullback(
                doc.form(form)?,
                doc.poly(h)?,
                &w2,
                &poly_or_literal(doc, unit)?,
            )?)
        }
        Command::ClassifyQuadratic { form } => {
            Report::value(classify_quadratic(doc.form(form)?)?.to_json())
        }
        Command::Print => Report {
            ok: true,
            text: doc.to_canonical_string(),
            body: json!({"document": doc.to_canonical_string()}),
        },
    })
}

/// Output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn failure(command: &str, json_mode: bool, e: &Error) -> Outcome {
    if json_mode {
        let v = json!({
            "command": command,
            "exit_code": 2,
            "error": {"kind": error_kind(e), "message": e.to_string()},
        });
        Outcome {
            stdout: format!("{}\n", v),
            stderr: String::new(),
            code: 2,
        }
    } else {
        Outcome {
            stdout: String::new(),
            stderr: format!("error: {}\n", e),
            code: 2,
        }
    }
}

/// Parses arguments, reads the document and runs the command.
pub fn run<I, S>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if !e.use_stderr() {
                return Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code: 0,
                };
            }
            if args.iter().skip(1).any(|a| a == "--json") {
                let v = json!({
                    "command": Value::Null,
                    "exit_code": 2,
                    "error": {"kind": "usage", "message": e.kind().to_string()},
                });
                return Outcome {
                    stdout: format!("{}\n", v),
                    stderr: text,
                    code: 2,
                };
            }
            return Outcome {
                stdout: String::new(),
                stderr: text,
                code: 2,
            };
        }
    };
    let name = cli.cmd.name();
    let text = if cli.doc == "-" {
        let mut s = String::new();
        stdin
            .read_to_string(&mut s)
            .map(|_| s)
            .map_err(|e| Error::Precondition(format!("cannot read standard input: {}", e)))
    } else {
        std::fs::read_to_string(&cli.doc)
            .map_err(|e| Error::Precondition(format!("cannot read '{}': {}", cli.doc, e)))
    };
    let result = text
        .and_then(|t| parse(&t))
        .and_then(|doc| execute(&cli.cmd, &doc));
    match result {
        Err(e) => failure(name, cli.json, &e),
        Ok(r) => {
            let code = if r.ok { 0 } else { 1 };
            let stdout = if cli.json {
                format!(
                    "{}\n",
                    json!({"command": name, "exit_code": code, "ok": r.ok, "report": r.body})
                )
            } else {
                format!(
                    "{}: {}\n{}",
                    name,
                    if r.ok { "ok" } else { "FAILS" },
                    r.text
                )
            };
            Outcome {
                stdout,
                stderr: String::new(),
                code,
            }
        }
    }
}
