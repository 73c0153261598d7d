//! The six `relconv` subcommands.
//!
//! Exit codes: `0` — command succeeded and every applicable check passed;
//! `1` — a check failed (axiom violation, failed theorem, associativity
//! witness, non-convergent norm); `2` — the input was unusable (parse
//! error, unresolved label, bad fraction, missing section or function).
//!
//! `verify` distinguishes three kinds of lines. *Theorems* must hold for
//! every valid input and fail the run. *Classifications* (`l2-invariant`,
//! `split`, `strongly-split`) describe the supplied Haar system; a FAIL is
//! informative, not an error. An associativity failure is an *expected
//! finding* when the system is not strongly split — only strongly split
//! systems guarantee an associative convolution — but it is a genuine
//! failure when strong splitness held, and on an invariant system the
//! induced quotient convolution must stay associative either way.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::Zero;
use serde_json::json;

use relconv_core::convolution::{
    check_associativity, check_associativity_groupoid, check_l2conv_lemma, convolve,
    delta, reduce_algebra, verify_ideal, ConvolutionError,
};
use relconv_core::groupoid::{
    check_action_composition, check_fiber_left_translation, check_fiber_partition,
    check_fiber_translation, check_fibers_in_constraint,
};
use relconv_core::haar::{
    check_l2_invariant, check_relational_haar, induced_quotient_haar, split_structure,
    strongly_split_structure, RelationalHaarSystem, SplitFailure,
};
use relconv_core::reduction::{constraint_set, quotient_groupoid, verify_q_morphism, QuotientData};
use relconv_core::representation::reduced_norm;
use relconv_core::RelationalGroupoid;

use crate::schema::{self, value_string, ResolvedFile, SchemaError};

#[derive(Parser)]
#[command(name = "relconv", version, about = "Exact checks and convolution algebra \
computations for finite relational groupoids, driven by JSON definition files.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check the structure axioms and report each with a witness.
    Check(CommonArgs),
    /// Run the full theorem suite against the file's Haar system.
    Verify(CommonArgs),
    /// Compute and print the quotient groupoid.
    Reduce(CommonArgs),
    /// Convolve two named functions and print the exact result.
    Convolve {
        #[command(flatten)]
        common: CommonArgs,
        /// Left factor (a name from the `functions` section).
        #[arg(long = "f")]
        f: String,
        /// Right factor (a name from the `functions` section).
        #[arg(long = "g")]
        g: String,
    },
    /// Exhaustively scan the convolution for associativity.
    Assoc(CommonArgs),
    /// Reduced operator norm of a named invariant function.
    Norm {
        #[command(flatten)]
        common: CommonArgs,
        /// The function whose norm to compute.
        #[arg(long = "f")]
        f: String,
    },
}

#[derive(Args)]
pub struct CommonArgs {
    /// Definition file (JSON).
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// What a command produced: the text to print and whether checks passed.
pub struct Outcome {
    pub output: String,
    pub passed: bool,
}

/// Parses argv, runs the command, prints, and returns the exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.output);
            if outcome.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Runs one subcommand against its definition file.
pub fn execute(command: &Command) -> Result<Outcome, SchemaError> {
    match command {
        Command::Check(c) => {
            let (_, r) = schema::load(&c.file)?;
            Ok(cmd_check(&r, c.format))
        }
        Command::Verify(c) => {
            let (_, r) = schema::load(&c.file)?;
            cmd_verify(&r, c.format)
        }
        Command::Reduce(c) => {
            let (_, r) = schema::load(&c.file)?;
            Ok(cmd_reduce(&r, c.format))
        }
        Command::Convolve { common, f, g } => {
            let (_, r) = schema::load(&common.file)?;
            cmd_convolve(&r, f, g, common.format)
        }
        Command::Assoc(c) => {
            let (_, r) = schema::load(&c.file)?;
            cmd_assoc(&r, c.format)
        }
        Command::Norm { common, f } => {
            let (_, r) = schema::load(&common.file)?;
            cmd_norm(&r, f, common.format)
        }
    }
}

fn require_haar<'a>(r: &'a ResolvedFile, cmd: &str) -> Result<&'a RelationalHaarSystem, SchemaError> {
    r.haar
        .as_ref()
        .ok_or_else(|| SchemaError::Invalid(format!("{cmd} requires a `haar` section")))
}

fn require_function<'a>(
    r: &'a ResolvedFile,
    name: &str,
) -> Result<&'a Vec<relconv_core::CRat>, SchemaError> {
    r.functions
        .get(name)
        .ok_or_else(|| SchemaError::Invalid(format!("unknown function `{name}`")))
}

fn name_of(g: &RelationalGroupoid, e: usize) -> String {
    g.carrier().label(e).to_string()
}

fn names(g: &RelationalGroupoid, elems: &[usize]) -> String {
    elems
        .iter()
        .map(|&e| name_of(g, e))
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_check(r: &ResolvedFile, format: Format) -> Outcome {
    let report = r.groupoid.check_axioms();
    let passed = report.all_passed();
    let output = match format {
        Format::Text => report.to_string(),
        Format::Json => {
            let axioms: Vec<_> = report
                .entries
                .iter()
                .map(|e| {
                    json!({
                        "name": e.axiom.name(),
                        "passed": e.passed,
                        "witness": e.witness.as_ref().map(|w| json!({
                            "equation": w.equation,
                            "tuple": w.tuple,
                            "missing": w.missing,
                        })),
                    })
                })
                .collect();
            pretty(json!({"command": "check", "passed": passed, "axioms": axioms}))
        }
    };
    Outcome { output, passed }
}

/// One line of a `verify` report.
struct CheckLine {
    name: &'static str,
    passed: bool,
    /// Classifications describe the system; their failures do not fail
    /// the run.
    classification: bool,
    /// Set on associativity when strong splitness does not hold, making
    /// a failure an expected finding.
    expected: bool,
    witness: Option<String>,
}

impl CheckLine {
    fn theorem(name: &'static str, witness: Option<String>) -> Self {
        CheckLine {
            name,
            passed: witness.is_none(),
            classification: false,
            expected: false,
            witness,
        }
    }

    fn classification(name: &'static str, witness: Option<String>) -> Self {
        CheckLine { classification: true, ..Self::theorem(name, witness) }
    }

    fn counts_against_run(&self) -> bool {
        !self.passed && !self.classification && !self.expected
    }
}

fn render_verify(lines: &[CheckLine], format: Format) -> Outcome {
    let passed = !lines.iter().any(CheckLine::counts_against_run);
    let output = match format {
        Format::Text => {
            let mut out = String::new();
            for l in lines {
                out.push_str(l.name);
                out.push_str(": ");
                if l.passed {
                    out.push_str("PASS");
                } else {
                    out.push_str("FAIL (");
                    if l.expected {
                        out.push_str("expected; ");
                    } else if l.classification {
                        out.push_str("classification; ");
                    }
                    out.push_str(l.witness.as_deref().unwrap_or("no witness"));
                    out.push(')');
                }
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let checks: Vec<_> = lines
                .iter()
                .map(|l| {
                    json!({
                        "name": l.name,
                        "passed": l.passed,
                        "kind": if l.classification { "classification" } else { "theorem" },
                        "expected": l.expected,
                        "witness": l.witness,
                    })
                })
                .collect();
            pretty(json!({"command": "verify", "passed": passed, "checks": checks}))
        }
    };
    Outcome { output, passed }
}

fn cmd_verify(r: &ResolvedFile, format: Format) -> Result<Outcome, SchemaError> {
    let g = &r.groupoid;
    let sys = require_haar(r, "verify")?;
    let mut lines: Vec<CheckLine> = Vec::new();

    let report = g.check_axioms();
    lines.push(CheckLine::theorem(
        "axioms",
        report.first_failure().map(|bad| {
            let detail = bad
                .witness
                .as_ref()
                .map(|w| format!(" at ({})", w.tuple.join(",")))
                .unwrap_or_default();
            format!("{}{detail}", bad.axiom.name())
        }),
    ));
    if !report.all_passed() {
        return Ok(render_verify(&lines, format));
    }

    lines.push(CheckLine::theorem(
        "constraint-set",
        constraint_set(g).err().map(|e| e.to_string()),
    ));

    let qd: QuotientData = match quotient_groupoid(g) {
        Err(e) => {
            lines.push(CheckLine::theorem("quotient", Some(e.to_string())));
            return Ok(render_verify(&lines, format));
        }
        Ok(qd) => qd,
    };
    lines.push(CheckLine::theorem(
        "quotient",
        (!verify_q_morphism(g, qd.quotient(), qd.assignment()))
            .then(|| "class map is not a relational morphism".to_string()),
    ));

    let haar_report = check_relational_haar(g, &qd, sys);
    for entry in &haar_report.entries {
        let name: &'static str = match entry.name {
            "pushforward-agreement" => "haar-pushforward-agreement",
            "quotient-right-haar" => "haar-quotient-right-haar",
            _ => "haar-disintegration",
        };
        lines.push(CheckLine::theorem(name, entry.witness.clone()));
    }
    if !haar_report.all_passed() {
        return Ok(render_verify(&lines, format));
    }

    lines.push(CheckLine::classification(
        "l2-invariant",
        check_l2_invariant(g, sys)
            .err()
            .map(|(h, k)| format!("measures differ at {}", names(g, &[h, k]))),
    ));

    lines.push(CheckLine::classification(
        "split",
        split_structure(g, &qd, sys).err().map(|e| split_witness(g, &qd, &e)),
    ));
    let strongly = strongly_split_structure(g, &qd, sys);
    lines.push(CheckLine::classification(
        "strongly-split",
        strongly.as_ref().err().map(|e| match e {
            Ok(w) => format!(
                "marginals of {} and {} differ on class {}",
                name_of(g, w.g1),
                name_of(g, w.g2),
                qd.quotient().morphisms().label(w.class)
            ),
            Err(split) => split_witness(g, &qd, split),
        }),
    ));
    let is_strong = strongly.is_ok();

    match check_associativity(g, sys) {
        Ok(()) => lines.push(CheckLine::theorem("associativity", None)),
        Err((a, b, c)) => lines.push(CheckLine {
            name: "associativity",
            passed: false,
            classification: false,
            expected: !is_strong,
            witness: Some(format!("witness {}", names(g, &[a, b, c]))),
        }),
    }

    let induced = induced_quotient_haar(&qd, sys)
        .expect("quotient-right-haar passed, so the induced system exists");
    let qt = qd.quotient();
    lines.push(CheckLine::theorem(
        "quotient-associativity",
        check_associativity_groupoid(qt, &induced)
            .err()
            .map(|(a, b, c)| {
                format!(
                    "witness {},{},{}",
                    qt.morphisms().label(a),
                    qt.morphisms().label(b),
                    qt.morphisms().label(c)
                )
            }),
    ));

    lines.push(CheckLine::theorem("l2-conv-lemma", lemma_witness(g, &qd, sys)));

    lines.push(CheckLine::theorem(
        "vanishing-ideal",
        verify_ideal(g, sys)
            .err()
            .map(|(x, y)| format!("a fiber measure charges ({})", names(g, &[x, y]))),
    ));

    lines.push(CheckLine::theorem(
        "reduction-theorem",
        reduction_witness(g, &qd, sys, &induced),
    ));

    lines.push(CheckLine::theorem(
        "fiber-partition",
        check_fiber_partition(g).err().map(|(a, b)| {
            format!("fibers of {} and {} overlap without matching", names(g, &[a]), names(g, &[b]))
        }),
    ));
    lines.push(CheckLine::theorem(
        "fiber-translation",
        check_fiber_translation(g)
            .err()
            .map(|(a, b, c)| format!("witness {}", names(g, &[a, b, c]))),
    ));
    lines.push(CheckLine::theorem(
        "fiber-left-translation",
        check_fiber_left_translation(g)
            .err()
            .map(|(a, b)| format!("witness {}", names(g, &[a, b]))),
    ));
    lines.push(CheckLine::theorem(
        "action-composition",
        check_action_composition(g)
            .err()
            .map(|(a, b)| format!("witness {}", names(g, &[a, b]))),
    ));
    lines.push(CheckLine::theorem(
        "convolution-support",
        check_fibers_in_constraint(g)
            .err()
            .map(|e| format!("the fiber of {} leaves the constraint set", name_of(g, e))),
    ));

    Ok(render_verify(&lines, format))
}

fn split_witness(g: &RelationalGroupoid, qd: &QuotientData, e: &SplitFailure) -> String {
    let class_label = |c: usize| qd.quotient().morphisms().label(c).to_string();
    match e {
        SplitFailure::NotProduct { g: elem, classes, pair } => format!(
            "conditional of {} on cell ({},{}) is not a product at ({})",
            name_of(g, *elem),
            class_label(classes.0),
            class_label(classes.1),
            names(g, &[pair.0, pair.1])
        ),
        SplitFailure::InconsistentMarginal { g: elem, class } => format!(
            "conditionals of {} induce two marginals on class {}",
            name_of(g, *elem),
            class_label(*class)
        ),
    }
}

fn lemma_witness(
    g: &RelationalGroupoid,
    qd: &QuotientData,
    sys: &RelationalHaarSystem,
) -> Option<String> {
    let red = reduce_algebra(g, qd);
    let basis = red.invariant_basis();
    let class_label = |c: usize| qd.quotient().morphisms().label(c).to_string();
    for (i, f1) in basis.iter().enumerate() {
        for (j, f2) in basis.iter().enumerate() {
            match check_l2conv_lemma(g, qd, sys, f1, f2) {
                Ok(true) => {}
                Ok(false) => {
                    return Some(format!(
                        "fails on basis pair ({},{})",
                        class_label(i),
                        class_label(j)
                    ))
                }
                Err(e) => return Some(e.to_string()),
            }
        }
    }
    None
}

fn reduction_witness(
    g: &RelationalGroupoid,
    qd: &QuotientData,
    sys: &RelationalHaarSystem,
    induced: &relconv_core::haar::RightHaarSystem,
) -> Option<String> {
    let red = reduce_algebra(g, qd);
    let basis = red.invariant_basis();
    let qt = qd.quotient();
    let m = qt.morphisms().len();
    let class_label = |c: usize| qt.morphisms().label(c).to_string();
    for (i, b) in basis.iter().enumerate() {
        let image = match red.phi(b) {
            Ok(v) => v,
            Err(e) => return Some(e.to_string()),
        };
        if image != delta(m, i) {
            return Some(format!("Φ does not map the {} indicator to its delta", class_label(i)));
        }
        match red.phi_inverse(&image) {
            Ok(back) if back == *b => {}
            _ => return Some(format!("Φ is not invertible on {}", class_label(i))),
        }
    }
    for (i, f1) in basis.iter().enumerate() {
        for (j, f2) in basis.iter().enumerate() {
            let check = || -> Result<bool, ConvolutionError> {
                let product = convolve(g, sys, f1, f2)?;
                let lhs = red.phi(&product)?;
                let rhs = relconv_core::convolution::convolve_groupoid(
                    qt,
                    induced,
                    &red.phi(f1)?,
                    &red.phi(f2)?,
                )?;
                Ok(lhs == rhs)
            };
            match check() {
                Ok(true) => {}
                Ok(false) => {
                    return Some(format!(
                        "Φ not multiplicative on pair ({},{})",
                        class_label(i),
                        class_label(j)
                    ))
                }
                Err(e) => return Some(e.to_string()),
            }
        }
    }
    None
}

fn cmd_reduce(r: &ResolvedFile, format: Format) -> Outcome {
    let g = &r.groupoid;
    let qd = match quotient_groupoid(g) {
        Err(e) => {
            let output = match format {
                Format::Text => format!("reduction failed: {e}\n"),
                Format::Json => pretty(json!({
                    "command": "reduce", "ok": false, "error": e.to_string(),
                })),
            };
            return Outcome { output, passed: false };
        }
        Ok(qd) => qd,
    };
    let qt = qd.quotient();
    let class_label = |c: usize| qt.morphisms().label(c).to_string();
    let members = |c: usize| -> Vec<String> {
        qd.classes()[c].iter().map(|&e| name_of(g, e)).collect()
    };
    let mult: Vec<(String, String, String)> = qt
        .composable_pairs()
        .into_iter()
        .map(|(a, b)| {
            let c = qt.compose(a, b).expect("listed pairs compose");
            (class_label(a), class_label(b), class_label(c))
        })
        .collect();
    let output = match format {
        Format::Text => {
            let mut out = String::from("classes:\n");
            for c in 0..qt.morphisms().len() {
                out.push_str(&format!(
                    "  {} = {{{}}}  source {}  target {}\n",
                    class_label(c),
                    members(c).join(", "),
                    qt.objects().label(qt.source(c)),
                    qt.objects().label(qt.target(c)),
                ));
            }
            out.push_str(&format!("objects: {}\n", qt.objects().labels().join(", ")));
            out.push_str("mult:\n");
            for (a, b, c) in &mult {
                out.push_str(&format!("  {a} * {b} = {c}\n"));
            }
            out
        }
        Format::Json => {
            let classes: Vec<_> = (0..qt.morphisms().len())
                .map(|c| {
                    json!({
                        "label": class_label(c),
                        "members": members(c),
                        "source": qt.objects().label(qt.source(c)),
                        "target": qt.objects().label(qt.target(c)),
                    })
                })
                .collect();
            let mult: Vec<_> = mult.iter().map(|(a, b, c)| json!([a, b, c])).collect();
            pretty(json!({
                "command": "reduce",
                "ok": true,
                "objects": qt.objects().labels(),
                "classes": classes,
                "mult": mult,
            }))
        }
    };
    Outcome { output, passed: true }
}

fn cmd_convolve(
    r: &ResolvedFile,
    f_name: &str,
    g_name: &str,
    format: Format,
) -> Result<Outcome, SchemaError> {
    let sys = require_haar(r, "convolve")?;
    let f1 = require_function(r, f_name)?;
    let f2 = require_function(r, g_name)?;
    let result = convolve(&r.groupoid, sys, f1, f2)
        .map_err(|e| SchemaError::Invalid(e.to_string()))?;
    let carrier = r.groupoid.carrier();
    let nonzero: Vec<(String, &relconv_core::CRat)> = result
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(e, v)| (carrier.label(e).to_string(), v))
        .collect();
    let output = match format {
        Format::Text => {
            if nonzero.is_empty() {
                "0\n".to_string()
            } else {
                nonzero
                    .iter()
                    .map(|(l, v)| format!("{l}: {}", value_string(v)))
                    .collect::<Vec<_>>()
                    .join(", ")
                    + "\n"
            }
        }
        Format::Json => {
            let entries: Vec<_> = nonzero
                .iter()
                .map(|(l, v)| json!([l, v.re.to_string(), v.im.to_string()]))
                .collect();
            pretty(json!({"command": "convolve", "f": f_name, "g": g_name, "result": entries}))
        }
    };
    Ok(Outcome { output, passed: true })
}

fn cmd_assoc(r: &ResolvedFile, format: Format) -> Result<Outcome, SchemaError> {
    let sys = require_haar(r, "assoc")?;
    let verdict = check_associativity(&r.groupoid, sys);
    let passed = verdict.is_ok();
    let output = match format {
        Format::Text => match verdict {
            Ok(()) => "associative\n".to_string(),
            Err((a, b, c)) => format!("witness: {}\n", names(&r.groupoid, &[a, b, c])),
        },
        Format::Json => pretty(json!({
            "command": "assoc",
            "associative": passed,
            "witness": verdict.err().map(|(a, b, c)| {
                vec![name_of(&r.groupoid, a), name_of(&r.groupoid, b), name_of(&r.groupoid, c)]
            }),
        })),
    };
    Ok(Outcome { output, passed })
}

fn cmd_norm(r: &ResolvedFile, f_name: &str, format: Format) -> Result<Outcome, SchemaError> {
    let g = &r.groupoid;
    let sys = require_haar(r, "norm")?;
    let f = require_function(r, f_name)?;
    let qd = match quotient_groupoid(g) {
        Err(e) => {
            return Ok(Outcome {
                output: format!("reduction failed: {e}\n"),
                passed: false,
            })
        }
        Ok(qd) => qd,
    };
    let red = reduce_algebra(g, &qd);
    let image = red.phi(f).map_err(|e| match e {
        ConvolutionError::NotInvariant { element } => SchemaError::Invalid(format!(
            "function `{f_name}` is not constant on classes (differs at {}); \
             the reduced norm is defined for invariant functions",
            name_of(g, element)
        )),
        other => SchemaError::Invalid(other.to_string()),
    })?;
    let induced = match induced_quotient_haar(&qd, sys) {
        Err(e) => {
            return Ok(Outcome {
                output: format!("no induced quotient Haar system: {e}\n"),
                passed: false,
            })
        }
        Ok(s) => s,
    };
    match reduced_norm(qd.quotient(), &induced, &image) {
        Err(e) => Ok(Outcome { output: format!("{e}\n"), passed: false }),
        Ok(v) => {
            let rendered = format_significant(v, 12);
            let output = match format {
                Format::Text => format!("{rendered}\n"),
                Format::Json => pretty(json!({"command": "norm", "f": f_name, "norm": rendered})),
            };
            Ok(Outcome { output, passed: true })
        }
    }
}

/// Formats to the given number of significant digits, trimming trailing
/// zeros: `0.5`, `2`, `0.333333333333`.
fn format_significant(v: f64, digits: i32) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let precision = (digits - 1 - magnitude).max(0) as usize;
    let s = format!("{v:.precision$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn pretty(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("reports serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::format_significant;

    #[test]
    fn significant_digit_formatting_trims() {
        assert_eq!(format_significant(0.5, 12), "0.5");
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(2.0, 12), "2");
        assert_eq!(format_significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_significant(1234.5, 12), "1234.5");
    }
}
