//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 invalid input, 2 inconsistent relations,
//! 3 underdetermined, 64 IO or usage error. A batch run exits with the most
//! severe code among its inputs, ranked 64, 1, 2, 3, 0.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num::Zero;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::cover::{parse_surgery, py_linking, SurgeryPresentation};
use crate::diagram::{
    DiagramError,
    parse_diagram, sublink_diagram, underlying_graph, validate_diagram, weak_euler_numbers, GraphDiagram, LinkDiagram,
};
use crate::exactlinalg::{format_rational, parse_rational, Rational};
use crate::kleingraph::{is_three_hamiltonian, parse_graph, validate_klein, ColorPair, GraphError, GraphViolation, KleinGraph};
use crate::movie::{load_movie, summarize, validate_movie, MovieError};
use crate::pipeline::{read_file, run_pipeline, InputPaths, PipelineError, PipelineInputs, PipelineOutput};
use crate::signature::link_signature;
use crate::solver::{format_report, parse_relations, Quantity, Status};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_INCONSISTENT: u8 = 2;
pub const EXIT_UNDERDETERMINED: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// JSON; rationals are strings `p/q` (integers without denominator).
    Machine,
}

#[derive(Debug, Parser)]
#[command(name = "kleinsig", version, about = "Signature invariants of knotted Klein graphs")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Treat warnings (even H1 order, multi-clasp lifts) as errors.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Run the command on every input in DIR (subdirectories for `invariants`).
    #[arg(long, value_name = "DIR", global = true)]
    pub batch: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Validate graph (.kg), diagram (.kd) or movie (.km) files.
    Validate { paths: Vec<PathBuf> },
    /// Measure, solve and check the invariants of one input set.
    Invariants {
        #[arg(long)]
        diagram: Option<PathBuf>,
        #[arg(long)]
        movie: Option<PathBuf>,
        #[arg(long)]
        lift: Option<PathBuf>,
        /// Relations file with `known` and `symmetry` lines.
        #[arg(long)]
        relations: Option<PathBuf>,
        /// Extra symmetry, e.g. `xi_a = xi_b = xi_c`.
        #[arg(long)]
        symmetry: Vec<String>,
        /// Extra known value, e.g. `e_ab = -4`.
        #[arg(long)]
        known: Vec<String>,
        /// Leave a measured quantity out of the system.
        #[arg(long)]
        drop: Vec<String>,
    },
    /// Signature of a link diagram, or of the sub-links of a graph diagram.
    Signature {
        path: Option<PathBuf>,
        #[arg(long)]
        pair: Option<String>,
    },
    /// Weak Euler numbers of a diagram's framing boxes or of a movie.
    Euler { path: Option<PathBuf> },
    /// Linking number after surgery: `lk0 - v G^-1 w`.
    Py {
        /// Surgery coefficient of each component (diagonal of G).
        #[arg(long, allow_hyphen_values = true)]
        g: Vec<String>,
        /// Surgery presentation file; replaces --g.
        #[arg(long)]
        surgery: Option<PathBuf>,
        /// Linking of the first knot with each surgery component.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        v: Vec<String>,
        /// Linking of the second knot with each component (defaults to --v).
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        w: Vec<String>,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        lk0: String,
    },
    /// Whether a graph (or a diagram's graph) is 3-Hamiltonian.
    Hamiltonian { path: Option<PathBuf> },
}

/// Result of one command on one input.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: u8,
    pub text: String,
    pub machine: Value,
}

impl Outcome {
    fn ok(text: String, machine: Value) -> Outcome {
        Outcome { code: EXIT_OK, text, machine }
    }

    fn fail(code: u8, msg: impl Into<String>) -> Outcome {
        let msg = msg.into();
        Outcome {
            code,
            text: format!("error: {msg}\n"),
            machine: json!({ "error": msg, "exit": code }),
        }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Machine => {
                let mut s = serde_json::to_string_pretty(&self.machine).expect("json");
                s.push('\n');
                s
            }
        }
    }
}

fn severity(code: u8) -> u8 {
    match code {
        EXIT_USAGE => 4,
        EXIT_INVALID => 3,
        EXIT_INCONSISTENT => 2,
        EXIT_UNDERDETERMINED => 1,
        _ => 0,
    }
}

/// Most severe of several exit codes.
pub fn combine_codes(codes: impl IntoIterator<Item = u8>) -> u8 {
    codes.into_iter().max_by_key(|&c| severity(c)).unwrap_or(EXIT_OK)
}

fn r(v: &Rational) -> Value {
    Value::String(format_rational(v))
}

fn pipeline_failure(e: &PipelineError) -> Outcome {
    Outcome::fail(if e.is_io() { EXIT_USAGE } else { EXIT_INVALID }, e.to_string())
}

fn graph_violation_kind(v: &GraphViolation) -> &'static str {
    match v {
        GraphViolation::NotTrivalent { .. } => "NotTrivalent",
        GraphViolation::ColorClash(_) => "ColorClash",
        GraphViolation::UnknownVertex { .. } => "UnknownVertex",
        GraphViolation::Duplicate(_) => "Duplicate",
    }
}

fn diagram_error_kind(e: &DiagramError) -> &'static str {
    match e {
        DiagramError::Syntax { .. } => "Syntax",
        DiagramError::DanglingArc(_) => "DanglingArc",
        DiagramError::DuplicateEnd(_) => "DuplicateEnd",
        DiagramError::NonPlanar { .. } => "NonPlanar",
        DiagramError::ColorClash(_) => "ColorClash",
        DiagramError::NotAVertex(_) => "NotAVertex",
        DiagramError::MixedColorStrand(_) => "MixedColorStrand",
        DiagramError::ClosedStrand(_) => "ClosedStrand",
        DiagramError::Graph(_) => "Graph",
    }
}

fn issues_outcome(path: &Path, issues: Vec<(&'static str, String)>) -> Outcome {
    let mut text = format!("{}: invalid\n", path.display());
    for (kind, msg) in &issues {
        let _ = writeln!(text, "  {kind}: {msg}");
    }
    let list: Vec<Value> = issues.iter().map(|(k, m)| json!({ "kind": k, "message": m })).collect();
    Outcome {
        code: EXIT_INVALID,
        text,
        machine: json!({ "input": path.display().to_string(), "valid": false, "issues": list }),
    }
}

fn graph_issues(e: &GraphError) -> Vec<(&'static str, String)> {
    match e {
        GraphError::Syntax { .. } => vec![("Syntax", e.to_string())],
        GraphError::Invalid(vs) => vs.iter().map(|v| (graph_violation_kind(v), v.to_string())).collect(),
    }
}

fn extension(path: &Path) -> &str {
    path.extension().and_then(|e| e.to_str()).unwrap_or("")
}

fn read(path: &Path) -> Result<String, Outcome> {
    read_file(path).map_err(|e| Outcome::fail(EXIT_USAGE, e.to_string()))
}

fn load_checked_diagram(path: &Path) -> Result<GraphDiagram, Outcome> {
    let text = read(path)?;
    let d = parse_diagram(&text).map_err(|e| issues_outcome(path, vec![(diagram_error_kind(&e), e.to_string())]))?;
    let report = validate_diagram(&d);
    if !report.is_valid() {
        let issues = report.issues.iter().map(|e| (diagram_error_kind(e), e.to_string())).collect();
        return Err(issues_outcome(path, issues));
    }
    Ok(d)
}

fn load_checked_graph(path: &Path) -> Result<KleinGraph, Outcome> {
    let text = read(path)?;
    parse_graph(&text)
        .and_then(validate_klein)
        .map_err(|e| issues_outcome(path, graph_issues(&e)))
}

fn graph_of_diagram(path: &Path, d: &GraphDiagram) -> Result<KleinGraph, Outcome> {
    underlying_graph(d).map_err(|e| match e {
        DiagramError::Graph(g) => issues_outcome(path, graph_issues(&g)),
        e => issues_outcome(path, vec![(diagram_error_kind(&e), e.to_string())]),
    })
}

fn movie_failure(path: &Path, e: MovieError) -> Outcome {
    match e {
        MovieError::Io { .. } => Outcome::fail(EXIT_USAGE, e.to_string()),
        e => issues_outcome(path, vec![("Movie", e.to_string())]),
    }
}

pub fn cmd_validate(path: &Path) -> Outcome {
    let shown = path.display().to_string();
    let result = match extension(path) {
        "kg" => load_checked_graph(path).map(|g| {
            let h = is_three_hamiltonian(&g);
            Outcome::ok(
                format!(
                    "{shown}: valid Klein graph, {} vertices, {} edges, 3-Hamiltonian: {h}\n",
                    g.vertices().len(),
                    g.edges().len()
                ),
                json!({ "input": shown, "valid": true, "kind": "graph", "vertices": g.vertices().len(),
                        "edges": g.edges().len(), "three_hamiltonian": h }),
            )
        }),
        "kd" => load_checked_diagram(path).and_then(|d| {
            if d.vertex_count() > 0 {
                graph_of_diagram(path, &d)?;
            }
            Ok(Outcome::ok(
                format!(
                    "{shown}: valid diagram, {} vertices, {} crossings, {} arcs\n",
                    d.vertex_count(),
                    d.crossing_count(),
                    d.arc_count()
                ),
                json!({ "input": shown, "valid": true, "kind": "diagram", "vertices": d.vertex_count(),
                        "crossings": d.crossing_count(), "arcs": d.arc_count() }),
            ))
        }),
        "km" => load_movie(path)
            .and_then(|m| validate_movie(&m).map(|data| (m, data)))
            .map_err(|e| movie_failure(path, e))
            .map(|(m, data)| {
                Outcome::ok(
                    format!(
                        "{shown}: valid movie, {} moves, {} closed components, {} clasps\n",
                        m.moves.len(),
                        data.closed.len(),
                        data.clasps.len()
                    ),
                    json!({ "input": shown, "valid": true, "kind": "movie", "moves": m.moves.len(),
                            "closed_components": data.closed.len(), "clasps": data.clasps.len() }),
                )
            }),
        other => Err(Outcome::fail(EXIT_USAGE, format!("{shown}: unknown input kind `.{other}` (expected .kg, .kd or .km)"))),
    };
    result.unwrap_or_else(|o| o)
}

/// Extra command-line relations and dropped quantities for `invariants`.
#[derive(Debug, Clone, Default)]
pub struct Extras {
    pub symmetry: Vec<String>,
    pub known: Vec<String>,
    pub drop: Vec<String>,
}

impl Extras {
    fn apply(&self, inputs: &mut PipelineInputs) -> Result<(), Outcome> {
        let usage = |e: String| Outcome::fail(EXIT_USAGE, e);
        for s in &self.symmetry {
            let more = parse_relations(&format!("symmetry {s}")).map_err(|e| usage(format!("--symmetry {s}: {e}")))?;
            inputs.relations.merge(&more);
        }
        for k in &self.known {
            let more = parse_relations(&format!("known {k}")).map_err(|e| usage(format!("--known {k}: {e}")))?;
            inputs.relations.merge(&more);
        }
        for d in &self.drop {
            let q = d.parse::<Quantity>().map_err(|e| usage(format!("--drop {d}: {e}")))?;
            inputs.dropped.push(q);
        }
        Ok(())
    }
}

fn values_map(values: impl IntoIterator<Item = (Quantity, Rational)>) -> Value {
    let mut m = Map::new();
    for (q, v) in values {
        m.insert(q.to_string(), r(&v));
    }
    Value::Object(m)
}

fn invariants_outcome(label: &str, out: &PipelineOutput) -> Outcome {
    let report = &out.report;
    let code = match &report.status {
        Status::Solved if out.verdict.pass => EXIT_OK,
        Status::Solved | Status::Inconsistent { .. } => EXIT_INCONSISTENT,
        Status::Underdetermined { .. } => EXIT_UNDERDETERMINED,
    };

    let mut text = String::new();
    if !label.is_empty() {
        let _ = writeln!(text, "== {label}");
    }
    text.push_str("measured:\n");
    for (q, v) in &out.measured.knowns {
        let _ = writeln!(text, "  {:<12} {}", q.to_string(), format_rational(v));
    }
    for s in &out.strong {
        let closed: Vec<String> = s.closed_contribs.iter().map(format_rational).collect();
        let _ = writeln!(
            text,
            "  strong euler {}: closed [{}], boundary lk {}, |H1| {}",
            s.color,
            closed.join(", "),
            format_rational(&s.boundary_lk),
            s.h1_order
        );
    }
    for w in &out.warnings {
        let _ = writeln!(text, "warning: {w}");
    }
    text.push_str("invariants:\n");
    for line in format_report(report).lines() {
        let _ = writeln!(text, "  {line}");
    }
    if report.is_solved() {
        let _ = writeln!(text, "consistency: {}", if out.verdict.pass { "pass" } else { "FAIL" });
        for (rel, res) in out.verdict.residuals.iter().filter(|(_, res)| !res.is_zero()) {
            let _ = writeln!(text, "  residual {} in {rel}", format_rational(res));
        }
    }

    let status = match &report.status {
        Status::Solved => json!({ "kind": "solved" }),
        Status::Underdetermined { closing } => json!({
            "kind": "underdetermined",
            "free": report.undetermined.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
            "closing": closing.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
        }),
        Status::Inconsistent { witness, residual } => json!({
            "kind": "inconsistent",
            "residual": r(residual),
            "witness": witness.iter().map(|(rel, c)| json!({ "relation": rel.to_string(), "coefficient": r(c) })).collect::<Vec<_>>(),
        }),
    };
    let strong: Map<String, Value> = out
        .strong
        .iter()
        .map(|s| {
            (
                s.color.to_string(),
                json!({
                    "closed": s.closed_contribs.iter().map(r).collect::<Vec<_>>(),
                    "boundary_lk": r(&s.boundary_lk),
                    "h1_order": s.h1_order.to_string(),
                    "value": r(&s.value),
                }),
            )
        })
        .collect();
    let mut machine = json!({
        "measured": values_map(out.measured.knowns.iter().cloned()),
        "strong_euler": strong,
        "warnings": out.warnings,
        "values": values_map(report.values.iter().map(|(q, v)| (*q, v.clone()))),
        "status": status,
        "consistency": {
            "pass": out.verdict.pass,
            "residuals": out.verdict.residuals.iter().map(|(rel, res)| json!({ "relation": rel.to_string(), "residual": r(res) })).collect::<Vec<_>>(),
        },
        "exit": code,
    });
    if !label.is_empty() {
        machine["input"] = Value::String(label.to_string());
    }
    Outcome { code, text, machine }
}

pub fn cmd_invariants(label: &str, paths: &InputPaths, extras: &Extras, strict: bool) -> Outcome {
    let mut inputs = match PipelineInputs::load(paths) {
        Ok(i) => i,
        Err(e) => return pipeline_failure(&e),
    };
    if let Err(o) = extras.apply(&mut inputs) {
        return o;
    }
    match run_pipeline(&inputs, strict) {
        Ok(out) => invariants_outcome(label, &out),
        Err(e) => pipeline_failure(&e),
    }
}

pub fn cmd_signature(path: &Path, pair: Option<&str>) -> Outcome {
    let shown = path.display().to_string();
    let d = match load_checked_diagram(path) {
        Ok(d) => d,
        Err(o) => return o,
    };
    if d.vertex_count() == 0 {
        return match LinkDiagram::from_diagram(d) {
            Ok(l) => {
                let s = link_signature(&l);
                Outcome::ok(format!("{s}\n"), json!({ "input": shown, "signature": s }))
            }
            Err(e) => issues_outcome(path, vec![(diagram_error_kind(&e), e.to_string())]),
        };
    }
    let pairs: Vec<ColorPair> = match pair {
        Some(p) => match p.parse::<ColorPair>() {
            Ok(p) => vec![p],
            Err(_) => return Outcome::fail(EXIT_USAGE, format!("bad color pair `{p}`")),
        },
        None => ColorPair::ALL.to_vec(),
    };
    let mut text = String::new();
    let mut m = Map::new();
    for p in &pairs {
        let s = link_signature(&sublink_diagram(&d, *p));
        if pairs.len() == 1 {
            let _ = writeln!(text, "{s}");
        } else {
            let _ = writeln!(text, "sigma_{p} {s}");
        }
        m.insert(format!("sigma_{p}"), json!(s));
    }
    Outcome::ok(text, json!({ "input": shown, "signatures": m }))
}

pub fn cmd_euler(path: &Path) -> Outcome {
    let shown = path.display().to_string();
    let (weak, closed) = match extension(path) {
        "kd" => match load_checked_diagram(path) {
            Ok(d) => (weak_euler_numbers(&d), None),
            Err(o) => return o,
        },
        "km" => match load_movie(path).and_then(|m| validate_movie(&m)).and_then(|d| summarize(&d)) {
            Ok(s) => (s.weak.clone(), Some(s.closed_contribs)),
            Err(e) => return movie_failure(path, e),
        },
        other => return Outcome::fail(EXIT_USAGE, format!("{shown}: expected a .kd or .km file, got `.{other}`")),
    };
    let mut text = String::new();
    let mut m = Map::new();
    for p in ColorPair::ALL {
        let _ = writeln!(text, "e_{p} {}", format_rational(weak.get(p)));
        m.insert(format!("e_{p}"), r(weak.get(p)));
    }
    let mut machine = json!({ "input": shown, "weak": m });
    if let Some(closed) = closed {
        let mut cm = Map::new();
        for (c, vs) in &closed {
            let shown: Vec<String> = vs.iter().map(format_rational).collect();
            let _ = writeln!(text, "closed {c} [{}]", shown.join(", "));
            cm.insert(c.to_string(), Value::Array(vs.iter().map(r).collect()));
        }
        machine["closed"] = Value::Object(cm);
    }
    Outcome::ok(text, machine)
}

fn rationals(flag: &str, xs: &[String]) -> Result<Vec<Rational>, Outcome> {
    xs.iter()
        .map(|x| parse_rational(x).map_err(|e| Outcome::fail(EXIT_USAGE, format!("{flag} {x}: {e}"))))
        .collect()
}

pub fn cmd_py(g: &[String], surgery: Option<&Path>, v: &[String], w: &[String], lk0: &str) -> Outcome {
    let run = || -> Result<Outcome, Outcome> {
        let sp = match surgery {
            Some(p) => parse_surgery(&read(p)?).map_err(|e| issues_outcome(p, vec![("Surgery", e.to_string())]))?,
            None => {
                let mut sp = SurgeryPresentation::default();
                for (i, c) in rationals("--g", g)?.into_iter().enumerate() {
                    sp.push(&format!("J{}", i + 1), c);
                }
                sp
            }
        };
        let v = rationals("--v", v)?;
        let w = if w.is_empty() { v.clone() } else { rationals("--w", w)? };
        if v.len() != sp.len() || w.len() != sp.len() {
            return Err(Outcome::fail(
                EXIT_USAGE,
                format!("{} surgery components but {} and {} linking numbers", sp.len(), v.len(), w.len()),
            ));
        }
        let lk0 = parse_rational(lk0).map_err(|e| Outcome::fail(EXIT_USAGE, format!("--lk0 {lk0}: {e}")))?;
        let lk = py_linking(&v, &w, &lk0, &sp.linking_matrix()).map_err(|e| Outcome::fail(EXIT_INVALID, e.to_string()))?;
        Ok(Outcome::ok(format!("{}\n", format_rational(&lk)), json!({ "linking": r(&lk) })))
    };
    run().unwrap_or_else(|o| o)
}

pub fn cmd_hamiltonian(path: &Path) -> Outcome {
    let shown = path.display().to_string();
    let g = match extension(path) {
        "kg" => load_checked_graph(path),
        "kd" => load_checked_diagram(path).and_then(|d| graph_of_diagram(path, &d)),
        other => Err(Outcome::fail(EXIT_USAGE, format!("{shown}: expected a .kg or .kd file, got `.{other}`"))),
    };
    match g {
        Ok(g) => {
            let h = is_three_hamiltonian(&g);
            Outcome::ok(format!("{h}\n"), json!({ "input": shown, "three_hamiltonian": h }))
        }
        Err(o) => o,
    }
}

fn dir_entries(dir: &Path, keep: impl Fn(&Path) -> bool) -> Result<Vec<PathBuf>, Outcome> {
    let rd = std::fs::read_dir(dir).map_err(|e| Outcome::fail(EXIT_USAGE, format!("{}: {e}", dir.display())))?;
    let mut out: Vec<PathBuf> = rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| keep(p)).collect();
    out.sort();
    Ok(out)
}

fn with_extension(exts: &'static [&'static str]) -> impl Fn(&Path) -> bool {
    move |p: &Path| p.is_file() && exts.contains(&extension(p))
}

/// Runs `f` on every input concurrently; results keep the input order.
fn batch<T: Sync>(items: &[T], f: impl Fn(&T) -> Outcome + Sync + Send) -> Vec<Outcome> {
    items.par_iter().map(f).collect()
}

fn one_path(path: &Option<PathBuf>, batch_dir: &Option<PathBuf>, what: &str) -> Result<Option<PathBuf>, Outcome> {
    match (path, batch_dir) {
        (Some(_), Some(_)) => Err(Outcome::fail(EXIT_USAGE, format!("give either a {what} or --batch, not both"))),
        (None, None) => Err(Outcome::fail(EXIT_USAGE, format!("missing {what}"))),
        (p, _) => Ok(p.clone()),
    }
}

/// Outcomes of one invocation, one per input.
pub fn execute(cli: &Cli) -> Vec<Outcome> {
    let go = || -> Result<Vec<Outcome>, Outcome> {
        let b = &cli.batch;
        Ok(match &cli.command {
            Command::Validate { paths } => {
                let mut all = paths.clone();
                if let Some(dir) = b {
                    all.extend(dir_entries(dir, with_extension(&["kg", "kd", "km"]))?);
                }
                if all.is_empty() {
                    return Err(Outcome::fail(EXIT_USAGE, "nothing to validate"));
                }
                batch(&all, |p| cmd_validate(p))
            }
            Command::Invariants {
                diagram,
                movie,
                lift,
                relations,
                symmetry,
                known,
                drop,
            } => {
                let extras = Extras {
                    symmetry: symmetry.clone(),
                    known: known.clone(),
                    drop: drop.clone(),
                };
                match b {
                    Some(dir) => {
                        if diagram.is_some() || movie.is_some() || lift.is_some() || relations.is_some() {
                            return Err(Outcome::fail(EXIT_USAGE, "input files and --batch are exclusive"));
                        }
                        let sets = dir_entries(dir, |p| p.is_dir())?;
                        batch(&sets, |d| {
                            let label = d.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                            match InputPaths::from_dir(d) {
                                Ok(paths) => cmd_invariants(&label, &paths, &extras, cli.strict),
                                Err(e) => pipeline_failure(&e),
                            }
                        })
                    }
                    None => {
                        let paths = InputPaths {
                            diagram: diagram.clone(),
                            movie: movie.clone(),
                            lift: lift.clone(),
                            relations: relations.clone(),
                        };
                        vec![cmd_invariants("", &paths, &extras, cli.strict)]
                    }
                }
            }
            Command::Signature { path, pair } => match one_path(path, b, "diagram")? {
                Some(p) => vec![cmd_signature(&p, pair.as_deref())],
                None => batch(&dir_entries(b.as_ref().expect("batch"), with_extension(&["kd"]))?, |p| {
                    cmd_signature(p, pair.as_deref())
                }),
            },
            Command::Euler { path } => match one_path(path, b, "diagram or movie")? {
                Some(p) => vec![cmd_euler(&p)],
                None => batch(&dir_entries(b.as_ref().expect("batch"), with_extension(&["kd", "km"]))?, |p| cmd_euler(p)),
            },
            Command::Hamiltonian { path } => match one_path(path, b, "graph")? {
                Some(p) => vec![cmd_hamiltonian(&p)],
                None => batch(&dir_entries(b.as_ref().expect("batch"), with_extension(&["kg", "kd"]))?, |p| {
                    cmd_hamiltonian(p)
                }),
            },
            Command::Py { g, surgery, v, w, lk0 } => {
                if b.is_some() {
                    return Err(Outcome::fail(EXIT_USAGE, "py does not take --batch"));
                }
                vec![cmd_py(g, surgery.as_deref(), v, w, lk0)]
            }
        })
    };
    go().unwrap_or_else(|o| vec![o])
}

/// Captured result of a whole invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> RunResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => RunResult {
                    code: EXIT_OK,
                    stdout: shown,
                    stderr: String::new(),
                },
                _ => RunResult {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: shown,
                },
            };
        }
    };
    let outcomes = execute(&cli);
    let code = combine_codes(outcomes.iter().map(|o| o.code));
    let stdout = match (cli.format, outcomes.as_slice()) {
        (Format::Machine, [_, _, ..]) => {
            let arr = Value::Array(outcomes.iter().map(|o| o.machine.clone()).collect());
            let mut s = serde_json::to_string_pretty(&arr).expect("json");
            s.push('\n');
            s
        }
        (f, _) => outcomes.iter().map(|o| o.render(f)).collect(),
    };
    RunResult {
        code,
        stdout,
        stderr: String::new(),
    }
}
