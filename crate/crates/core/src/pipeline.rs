//! End-to-end computation: measure what the inputs determine, then solve.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::cover::{parse_lift, CoverError, LiftData, StrongEuler};
use crate::diagram::{isomorphism, load_diagram, validate_diagram, DiagramError, FramingCheck, GraphDiagram, WeakEuler};
use crate::exactlinalg::Rational;
use crate::kleingraph::{Color, ColorPair};
use crate::movie::{accumulate_foam_data, load_movie, FoamSummary, Movie, MovieError};
use crate::signature::{sublink_signatures, SublinkSignatures};
use crate::solver::{
    build_relation_system, check_consistency, parse_relations, solve_invariants, Inputs, InvariantReport, Quantity,
    SolverError, Verdict,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("{path}: {source}")]
    Diagram { path: String, source: DiagramError },
    #[error("{path}: {source}")]
    Movie { path: String, source: MovieError },
    #[error("{path}: {source}")]
    Lift { path: String, source: CoverError },
    #[error("{path}: {source}")]
    Relations { path: String, source: SolverError },
    #[error("{0}")]
    Invalid(String),
    #[error("warning treated as error: {0}")]
    Strict(String),
}

impl PipelineError {
    /// IO and usage problems, as opposed to bad input content.
    pub fn is_io(&self) -> bool {
        matches!(self, PipelineError::Io { .. })
            || matches!(self, PipelineError::Movie { source: MovieError::Io { .. }, .. })
    }
}

pub fn read_file(path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path).map_err(|e| PipelineError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

fn shown(path: &Path) -> String {
    path.display().to_string()
}

/// One input set.
#[derive(Debug, Clone, Default)]
pub struct PipelineInputs {
    pub diagram: Option<GraphDiagram>,
    pub movie: Option<Movie>,
    pub lift: Option<LiftData>,
    pub relations: Inputs,
    /// Measured quantities to leave out of the system.
    pub dropped: Vec<Quantity>,
}

/// Input file paths, loaded by [`PipelineInputs::load`].
#[derive(Debug, Clone, Default)]
pub struct InputPaths {
    pub diagram: Option<PathBuf>,
    pub movie: Option<PathBuf>,
    pub lift: Option<PathBuf>,
    pub relations: Option<PathBuf>,
}

impl InputPaths {
    /// The conventional file set of a directory: `*.kd`, `*.km`, `*.kl`, `*.kr`,
    /// at most one of each.
    pub fn from_dir(dir: &Path) -> Result<InputPaths, PipelineError> {
        let mut paths = InputPaths::default();
        let entries = std::fs::read_dir(dir).map_err(|e| PipelineError::Io {
            path: shown(dir),
            msg: e.to_string(),
        })?;
        let mut files: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
        files.sort();
        for f in files {
            let slot = match f.extension().and_then(|e| e.to_str()) {
                Some("kd") => &mut paths.diagram,
                Some("km") => &mut paths.movie,
                Some("kl") => &mut paths.lift,
                Some("kr") => &mut paths.relations,
                _ => continue,
            };
            if slot.is_some() {
                return Err(PipelineError::Invalid(format!("{}: more than one input of the same kind", shown(dir))));
            }
            *slot = Some(f);
        }
        Ok(paths)
    }
}

impl PipelineInputs {
    pub fn load(paths: &InputPaths) -> Result<PipelineInputs, PipelineError> {
        let mut inputs = PipelineInputs::default();
        if let Some(p) = &paths.diagram {
            let d = load_diagram(&read_file(p)?).map_err(|source| PipelineError::Diagram { path: shown(p), source })?;
            inputs.diagram = Some(d);
        }
        if let Some(p) = &paths.movie {
            inputs.movie = Some(load_movie(p).map_err(|source| PipelineError::Movie { path: shown(p), source })?);
        }
        if let Some(p) = &paths.lift {
            inputs.lift = Some(parse_lift(&read_file(p)?).map_err(|source| PipelineError::Lift { path: shown(p), source })?);
        }
        if let Some(p) = &paths.relations {
            inputs.relations =
                parse_relations(&read_file(p)?).map_err(|source| PipelineError::Relations { path: shown(p), source })?;
        }
        Ok(inputs)
    }
}

/// Everything measured and solved for one input set.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub signatures: Option<SublinkSignatures>,
    pub foam: Option<FoamSummary>,
    pub weak: Option<WeakEuler>,
    pub strong: Vec<StrongEuler>,
    /// Measured values fed to the solver, before declared relations.
    pub measured: Inputs,
    pub warnings: Vec<String>,
    pub report: InvariantReport,
    pub verdict: Verdict,
}

/// The diagram whose sub-link signatures are measured: the given diagram,
/// else the movie's last frame.
fn boundary_diagram(inputs: &PipelineInputs) -> Result<Option<GraphDiagram>, PipelineError> {
    let last = match &inputs.movie {
        Some(m) => Some(m.last_frame().map_err(|source| PipelineError::Movie {
            path: "movie".into(),
            source,
        })?),
        None => None,
    };
    match (&inputs.diagram, last) {
        (Some(d), Some(l)) => {
            if isomorphism(&l, d, FramingCheck::Ignore).is_none() {
                return Err(PipelineError::Invalid(
                    "the movie's last frame is not isomorphic to the given diagram".into(),
                ));
            }
            Ok(Some(d.clone()))
        }
        (Some(d), None) => Ok(Some(d.clone())),
        (None, l) => Ok(l),
    }
}

pub fn run_pipeline(inputs: &PipelineInputs, strict: bool) -> Result<PipelineOutput, PipelineError> {
    let mut measured = Inputs::default();
    let mut warnings = Vec::new();

    let boundary = boundary_diagram(inputs)?;
    if let Some(d) = &boundary {
        let report = validate_diagram(d);
        if !report.is_valid() {
            let msgs: Vec<String> = report.issues.iter().map(|e| e.to_string()).collect();
            return Err(PipelineError::Invalid(msgs.join("; ")));
        }
    }
    let signatures = boundary.as_ref().map(sublink_signatures);
    if let Some(s) = &signatures {
        for p in ColorPair::ALL {
            measured.set(Quantity::Sigma(p), Rational::from_integer(s.get(p).into()));
        }
    }

    let foam = match &inputs.movie {
        Some(m) => Some(accumulate_foam_data(m).map_err(|source| PipelineError::Movie {
            path: "movie".into(),
            source,
        })?),
        None => None,
    };
    let weak = foam.as_ref().map(|f| f.weak.clone());
    if let Some(w) = &weak {
        for p in ColorPair::ALL {
            measured.set(Quantity::Euler(p), w.get(p).clone());
        }
    }

    let lift = match (&inputs.lift, &foam) {
        (Some(l), Some(f)) => Some(f.lift_data(l)),
        (Some(l), None) => Some(l.clone()),
        (None, Some(f)) => Some(f.lift_data(&LiftData::default())),
        (None, None) => None,
    };
    let mut strong = Vec::new();
    if let Some(lift) = &lift {
        for c in Color::ALL {
            let closed = foam.as_ref().map(|f| f.closed_for(c)).unwrap_or(&[]);
            let se = lift.strong_euler(c, closed).map_err(|source| PipelineError::Lift {
                path: "lift".into(),
                source,
            })?;
            if let Some(se) = se {
                warnings.extend(se.warnings.iter().cloned());
                measured.set(Quantity::StrongEuler(c), se.value.clone());
                strong.push(se);
            }
        }
    }

    if strict {
        if let Some(w) = warnings.first() {
            return Err(PipelineError::Strict(w.clone()));
        }
    }

    measured.knowns.retain(|(q, _)| !inputs.dropped.contains(q));
    let mut all = measured.clone();
    all.merge(&inputs.relations);
    let system = build_relation_system(&all).map_err(|source| PipelineError::Relations {
        path: "relations".into(),
        source,
    })?;
    let report = solve_invariants(&system);
    let verdict = check_consistency(&report);
    Ok(PipelineOutput {
        signatures,
        foam,
        weak,
        strong,
        measured,
        warnings,
        report,
        verdict,
    })
}

pub fn run_paths(paths: &InputPaths, dropped: &[Quantity], strict: bool) -> Result<PipelineOutput, PipelineError> {
    let mut inputs = PipelineInputs::load(paths)?;
    inputs.dropped = dropped.to_vec();
    run_pipeline(&inputs, strict)
}
