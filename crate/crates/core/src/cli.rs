//! Command-line interface: one subcommand tree over every operation.
//!
//! Payloads go to stdout as JSON with sorted keys (or LaTeX with
//! `--latex`); diagnostics go to stderr. Exit codes: 0 success, 1 domain
//! error or malformed input, 2 usage error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Read;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::dihedral::{self, DihedralWord};
use crate::fgab::{self, FgAbelianDesc, FiniteGroupTable};
use crate::formula::{classify, evaluate_exact, render, FiniteStructure, Formula, RenderFormat, Signature};
use crate::limitsim::{self, ConstructionTrace, StageReport, VerificationReport};
use crate::rank1::{self, parse_rational, Rank1Char};
use crate::selftest;
use crate::words::{is_primitive, nielsen_reduce, FreeWord, WordTuple};

#[derive(Debug, Parser)]
#[command(name = "scott", version, about = "Word problems, Scott sentences and construction simulators for groups")]
struct Cli {
    /// Emit JSON payloads (the default).
    #[arg(long, global = true, conflicts_with = "latex")]
    json: bool,
    /// Render formulas as LaTeX instead of JSON.
    #[arg(long, global = true)]
    latex: bool,
    /// Run the acceptance suite and print a pass/fail table.
    #[arg(long)]
    selftest: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Free-group words and Nielsen moves.
    #[command(subcommand)]
    Words(WordsCmd),
    /// The infinite dihedral group.
    #[command(subcommand)]
    Dinf(DinfCmd),
    /// Finitely generated abelian groups.
    #[command(subcommand)]
    Fgab(FgabCmd),
    /// Torsion-free abelian groups of rank 1, given by characteristics.
    #[command(subcommand)]
    Q(QCmd),
    /// Infinitary formulas.
    #[command(subcommand)]
    Formula(FormulaCmd),
    /// Limit-construction simulators.
    #[command(subcommand)]
    Sim(SimCmd),
}

#[derive(Debug, Subcommand)]
enum WordsCmd {
    /// Freely reduce a word.
    Reduce {
        #[arg(long)]
        rank: usize,
        word: String,
    },
    /// Decide whether an n-tuple is a basis of the free group of rank n.
    Primitive {
        #[arg(long)]
        rank: usize,
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Nielsen-reduce an n-tuple, printing the moves used.
    NielsenReduce {
        #[arg(long)]
        rank: usize,
        #[arg(required = true)]
        words: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
enum DinfCmd {
    /// Normal form of a word over {a, b}.
    Normalize { word: String },
    /// Decide whether two words generate the group.
    Genpair {
        w1: String,
        w2: String,
        /// Include the shortening steps.
        #[arg(long)]
        steps: bool,
    },
    /// Decide whether a pair is primitive.
    Primitive { w1: String, w2: String },
    /// The Scott sentence.
    Scott {
        /// Emit the Σ₃ sentence instead of the d-Σ₂ one.
        #[arg(long)]
        sigma3: bool,
        #[command(flatten)]
        render: RenderArgs,
    },
}

#[derive(Debug, Subcommand)]
enum FgabCmd {
    /// Invariant factors of a product of cyclic groups.
    Normalize {
        #[arg(required = true)]
        orders: Vec<u64>,
    },
    /// Scott sentence of ℤⁿ ⊕ T.
    Scott {
        #[arg(long)]
        rank: usize,
        /// Cyclic orders of the torsion part.
        #[arg(long, value_delimiter = ',')]
        torsion: Vec<u64>,
        /// Emit the Σ₃ sentence instead of the d-Σ₂ one.
        #[arg(long)]
        sigma3: bool,
        #[command(flatten)]
        render: RenderArgs,
    },
    /// Scott sentence of a finite group given by a table (JSON, path or `-`).
    ScottFinite {
        table: String,
        #[command(flatten)]
        render: RenderArgs,
    },
}

#[derive(Debug, Subcommand)]
enum QCmd {
    /// Membership of a rational in the group.
    Member { char: String, rational: String },
    /// Isomorphism of two groups.
    Iso { c1: String, c2: String },
    /// Case, bounds and recommended sentence form.
    Classify { char: String },
    /// The Scott sentence recommended by `classify`, or a chosen form.
    Scott {
        char: String,
        #[arg(long, conflicts_with = "dsigma2")]
        sigma3: bool,
        #[arg(long)]
        dsigma2: bool,
        #[command(flatten)]
        render: RenderArgs,
    },
}

#[derive(Debug, Subcommand)]
enum FormulaCmd {
    /// Complexity class of a formula.
    Classify { formula: String },
    /// Exact evaluation on a finite structure.
    Eval {
        formula: String,
        structure: String,
        #[arg(long, default_value_t = 64)]
        bound: usize,
    },
    /// Render as text, or LaTeX with `--latex`.
    Render {
        formula: String,
        #[command(flatten)]
        render: RenderArgs,
    },
}

#[derive(Debug, Args)]
struct RenderArgs {
    /// Family members shown before the ellipsis.
    #[arg(long, default_value_t = 3)]
    family_bound: usize,
    /// Use multiplicative notation.
    #[arg(long)]
    multiplicative: bool,
}

#[derive(Debug, Args)]
struct SimArgs {
    /// Trace as JSON, a path, or `-` for stdin.
    #[arg(long)]
    trace: String,
    #[arg(long, default_value_t = 2)]
    growth: usize,
    /// Skip the verification report.
    #[arg(long)]
    no_verify: bool,
}

#[derive(Debug, Subcommand)]
enum SimCmd {
    /// Guess between Z^(k-1), Z^k and Z^(k+1) along a trace.
    Abelian {
        /// Base number of generators.
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Guess between the infinite dihedral group and its finite fragments.
    Dihedral {
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Guess between a rank-1 group and its p-extension or q-restriction.
    Rank1 {
        /// Characteristic as JSON, a path, or `-` for stdin.
        #[arg(long)]
        char: String,
        /// Prime with finite exponent, made infinite on the H branch.
        #[arg(long)]
        p: u64,
        /// Prime with infinite exponent, killed on the K branch.
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Lower a window of prime exponents and test isomorphism.
    Cof {
        /// Characteristic as JSON, a path, or `-` for stdin.
        #[arg(long)]
        char: String,
        /// Window length.
        #[arg(long)]
        m: usize,
        /// Enumerated members of W, comma separated.
        #[arg(long, value_delimiter = ',')]
        w: Vec<usize>,
        /// Largest prime allowed in the window.
        #[arg(long)]
        bound: u64,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Payload {
    Json(Value),
    Lines(Vec<Value>),
    Text(String),
}

fn domain(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Parses `argv` (including the program name) and runs the command.
pub fn dispatch<I, T>(argv: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            return CommandOutcome { exit_code: code, stdout, stderr };
        }
    };
    let outcome = if cli.selftest {
        Ok(run_selftest())
    } else if let Some(command) = cli.command {
        run(command, cli.latex)
    } else {
        return CommandOutcome { exit_code: 2, stdout: String::new(), stderr: "no subcommand given (try --help)\n".into() };
    };
    match outcome {
        Ok((payload, code)) => {
            let stdout = match payload {
                Payload::Json(v) => format!("{v}\n"),
                Payload::Lines(lines) => lines.iter().map(|v| format!("{v}\n")).collect(),
                Payload::Text(t) => format!("{t}\n"),
            };
            CommandOutcome { exit_code: code, stdout, stderr: String::new() }
        }
        Err(msg) => CommandOutcome { exit_code: 1, stdout: String::new(), stderr: format!("error: {msg}\n") },
    }
}

fn run_selftest() -> (Payload, i32) {
    let results = selftest::run_all();
    let lines: Vec<String> = results
        .iter()
        .map(|r| format!("{} {}. {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.id, r.name, r.detail))
        .collect();
    let code = if results.iter().all(|r| r.passed) { 0 } else { 1 };
    (Payload::Text(lines.join("\n")), code)
}

/// Reads a JSON argument given inline, as a path, or as `-` for stdin.
fn read_json(arg: &str) -> Result<Value, String> {
    let text = if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(domain)?;
        s
    } else if arg.trim_start().starts_with(['{', '[', '"']) {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| format!("cannot read {arg}: {e}"))?
    };
    serde_json::from_str(&text).map_err(|e| format!("malformed JSON: {e}"))
}

fn parse_as<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T, String> {
    serde_json::from_value(read_json(arg)?).map_err(|e| format!("invalid {what}: {e}"))
}

fn words(rank: usize, raw: &[String]) -> Result<WordTuple, String> {
    let parts: Vec<&str> = raw.iter().map(String::as_str).collect();
    WordTuple::parse(rank, &parts).map_err(domain)
}

fn dword(s: &str) -> Result<DihedralWord, String> {
    DihedralWord::parse(s).map_err(domain)
}

fn sentence(f: Formula, args: &RenderArgs, latex: bool, default: Signature) -> Payload {
    let signature = if args.multiplicative { Signature::Multiplicative } else { default };
    if latex {
        return Payload::Text(render(&f, RenderFormat::Latex, args.family_bound, signature));
    }
    Payload::Json(json!({
        "class": classify(&f).to_string(),
        "formula": serde_json::to_value(&f).expect("formulas serialize"),
        "text": render(&f, RenderFormat::Text, args.family_bound, signature),
    }))
}

fn sim_payload(reports: &[StageReport], summary: Value, verification: &VerificationReport, verify: bool) -> (Payload, i32) {
    let mut lines: Vec<Value> = reports.iter().map(|r| serde_json::to_value(r).expect("reports serialize")).collect();
    let mut summary = summary;
    let mut code = 0;
    if verify {
        summary["verification"] = serde_json::to_value(verification).expect("reports serialize");
        if !verification.passed {
            code = 1;
        }
    }
    lines.push(summary);
    (Payload::Lines(lines), code)
}

fn run(command: Command, latex: bool) -> Result<(Payload, i32), String> {
    let ok = |p: Payload| Ok((p, 0));
    match command {
        Command::Words(cmd) => match cmd {
            WordsCmd::Reduce { rank, word } => {
                let w = FreeWord::parse(&word, rank).map_err(domain)?;
                ok(Payload::Json(json!({ "word": w.to_string(), "length": w.len() })))
            }
            WordsCmd::Primitive { rank, words: raw } => {
                let t = words(rank, &raw)?;
                ok(Payload::Json(json!({ "primitive": is_primitive(&t).map_err(domain)? })))
            }
            WordsCmd::NielsenReduce { rank, words: raw } => {
                let t = words(rank, &raw)?;
                let (reduced, moves) = nielsen_reduce(&t).map_err(domain)?;
                let texts: Vec<String> = reduced.words().iter().map(|w| w.to_string()).collect();
                ok(Payload::Json(json!({ "reduced": texts, "total_length": reduced.total_length(), "moves": moves })))
            }
        },
        Command::Dinf(cmd) => match cmd {
            DinfCmd::Normalize { word } => ok(Payload::Json(serde_json::to_value(dword(&word)?).map_err(domain)?)),
            DinfCmd::Genpair { w1, w2, steps } => {
                let run = dihedral::benois(&dword(&w1)?, &dword(&w2)?);
                let mut out = json!({ "generating": run.generating });
                if steps {
                    out["base_case"] = serde_json::to_value(run.base_case).map_err(domain)?;
                    out["steps"] = serde_json::to_value(&run.steps).map_err(domain)?;
                }
                ok(Payload::Json(out))
            }
            DinfCmd::Primitive { w1, w2 } => {
                ok(Payload::Json(json!({ "primitive": dihedral::is_primitive_pair(&dword(&w1)?, &dword(&w2)?) })))
            }
            DinfCmd::Scott { sigma3, render } => {
                let f = if sigma3 { dihedral::scott_sentence_sigma3() } else { dihedral::scott_sentence() };
                ok(sentence(f, &render, latex, Signature::Multiplicative))
            }
        },
        Command::Fgab(cmd) => match cmd {
            FgabCmd::Normalize { orders } => {
                ok(Payload::Json(json!({ "torsion": fgab::normalize_torsion(&orders).map_err(domain)? })))
            }
            FgabCmd::Scott { rank, torsion, sigma3, render } => {
                let d = FgAbelianDesc::from_cyclic(rank, &torsion).map_err(domain)?;
                let f = if sigma3 {
                    fgab::scott_sentence_sigma3(&d)
                } else if d.rank() == 0 {
                    fgab::scott_sentence_finite(&d.torsion_table())
                } else if d.torsion().is_empty() {
                    fgab::scott_sentence_zn(d.rank()).map_err(domain)?
                } else {
                    fgab::scott_sentence_fg_abelian(&d).map_err(domain)?
                };
                ok(sentence(f, &render, latex, Signature::Additive))
            }
            FgabCmd::ScottFinite { table, render } => {
                let t: FiniteGroupTable = parse_as(&table, "group table")?;
                ok(sentence(fgab::scott_sentence_finite(&t), &render, latex, Signature::Multiplicative))
            }
        },
        Command::Q(cmd) => match cmd {
            QCmd::Member { char, rational } => {
                let c: Rank1Char = parse_as(&char, "characteristic")?;
                let q = parse_rational(&rational).map_err(domain)?;
                ok(Payload::Json(json!({ "member": c.contains(&q) })))
            }
            QCmd::Iso { c1, c2 } => {
                let (a, b): (Rank1Char, Rank1Char) = (parse_as(&c1, "characteristic")?, parse_as(&c2, "characteristic")?);
                let m = a.isomorphism_multiplier(&b);
                ok(Payload::Json(json!({ "isomorphic": m.is_some(), "multiplier": m.map(|m| m.to_string()) })))
            }
            QCmd::Classify { char } => {
                let c: Rank1Char = parse_as(&char, "characteristic")?;
                let k = c.classify();
                ok(Payload::Json(json!({ "row": k.tag.row.to_json(), "lower": k.lower.name(), "upper": k.upper.name() })))
            }
            QCmd::Scott { char, sigma3, dsigma2, render } => {
                let c: Rank1Char = parse_as(&char, "characteristic")?;
                let f = if sigma3 {
                    rank1::scott_sentence_sigma3(&c)
                } else if dsigma2 {
                    rank1::scott_sentence_dsigma2(&c).map_err(domain)?
                } else {
                    c.scott_sentence()
                };
                ok(sentence(f, &render, latex, Signature::Additive))
            }
        },
        Command::Formula(cmd) => match cmd {
            FormulaCmd::Classify { formula } => {
                let f = Formula::from_json(&read_json(&formula)?).map_err(domain)?;
                ok(Payload::Json(json!({ "class": classify(&f).to_string(), "complexity": classify(&f) })))
            }
            FormulaCmd::Eval { formula, structure, bound } => {
                let f = Formula::from_json(&read_json(&formula)?).map_err(domain)?;
                let s: FiniteStructure = parse_as(&structure, "structure")?;
                let e = evaluate_exact(&f, &s, bound).map_err(domain)?;
                ok(Payload::Json(json!({ "truth": e.truth, "exact": e.exact })))
            }
            FormulaCmd::Render { formula, render: args } => {
                let f = Formula::from_json(&read_json(&formula)?).map_err(domain)?;
                let signature = if args.multiplicative { Signature::Multiplicative } else { Signature::Additive };
                let format = if latex { RenderFormat::Latex } else { RenderFormat::Text };
                ok(Payload::Text(render(&f, format, args.family_bound, signature)))
            }
        },
        Command::Sim(cmd) => run_sim(cmd),
    }
}

fn run_sim(cmd: SimCmd) -> Result<(Payload, i32), String> {
    let trace = |sim: &SimArgs| parse_as::<ConstructionTrace>(&sim.trace, "trace");
    Ok(match cmd {
        SimCmd::Abelian { k, sim } => {
            let run = limitsim::run_abelian(k, &trace(&sim)?, sim.growth).map_err(domain)?;
            sim_payload(&run.reports, json!({ "final_tag": run.final_tag() }), &run.verification, !sim.no_verify)
        }
        SimCmd::Dihedral { sim } => {
            let run = limitsim::run_dihedral(&trace(&sim)?, sim.growth).map_err(domain)?;
            let summary = json!({ "final_tag": run.final_tag, "depth": run.depth });
            sim_payload(&run.reports, summary, &run.verification, !sim.no_verify)
        }
        SimCmd::Rank1 { char, p, q, sim } => {
            let c: Rank1Char = parse_as(&char, "characteristic")?;
            let run = limitsim::run_rank1(&c, p, q, &trace(&sim)?, sim.growth).map_err(domain)?;
            let summary = json!({ "final_tag": run.final_tag, "final_char": run.final_char });
            sim_payload(&run.reports, summary, &run.verification, !sim.no_verify)
        }
        SimCmd::Cof { char, m, w, bound } => {
            let c: Rank1Char = parse_as(&char, "characteristic")?;
            let w: BTreeSet<usize> = w.into_iter().collect();
            let run = limitsim::run_cofinality(&c, m, &w, bound).map_err(domain)?;
            let code = i32::from(!run.verification.passed);
            (Payload::Json(serde_json::to_value(&run).map_err(domain)?), code)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> CommandOutcome {
        dispatch(std::iter::once("scott").chain(args.iter().copied()))
    }

    #[test]
    fn spec_examples() {
        assert_eq!(call(&["words", "primitive", "--rank", "2", "ab", "b"]).stdout, "{\"primitive\":true}\n");
        assert_eq!(call(&["dinf", "genpair", "aba", "bab"]).stdout, "{\"generating\":false}\n");
        let c = r#"{"default":{"linear":[1,0]}}"#;
        assert_eq!(call(&["q", "classify", c]).stdout, "{\"lower\":\"Sigma03\",\"row\":2,\"upper\":\"Sigma03\"}\n");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["nope"]).exit_code, 2);
        assert_eq!(call(&[]).exit_code, 2);
        assert_eq!(call(&["words", "primitive", "--rank", "2", "ab"]).exit_code, 1);
        assert_eq!(call(&["q", "classify", "{"]).exit_code, 1);
        assert_eq!(call(&["--help"]).exit_code, 0);
    }
}
