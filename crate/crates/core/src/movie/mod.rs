//! Movie presentations of spanning foams.
//!
//! A movie is an initial diagram plus a list of elementary moves. Frames are
//! recomputed by replaying the moves; validation tracks which arcs sweep out
//! the same foam component and collects the data the Euler number and
//! surgery computations need.

pub mod apply;
pub mod moves;
pub mod parse;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use apply::{apply, Applied, ClaspRecord, Event, MoveError};
pub use moves::{Frame, Move, Side};
pub use parse::{load_movie, movie_to_text, parse_movie, parse_movie_in, parse_movie_with};

use crate::cover::LiftData;
use crate::diagram::{isomorphism, sublink_diagram, weak_euler_numbers, DiagramError, FramingCheck, GraphDiagram, NodeKind, WeakEuler};
use crate::exactlinalg::Rational;
use crate::kleingraph::{Color, ColorPair};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MovieError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("{which} frame: {source}")]
    Diagram { which: String, source: DiagramError },
    #[error("move {step}: unknown entity {id}")]
    UnknownEntity { step: usize, id: String },
    #[error("move {step}: {kind} not applicable at {location}: {reason}")]
    NotApplicable {
        step: usize,
        kind: &'static str,
        location: String,
        reason: String,
    },
    #[error("the last frame does not match the declared final frame")]
    FinalFrameMismatch,
    #[error("the first movie's last frame does not match the second movie's initial frame")]
    FrameMismatch,
    #[error("closed foam component of color(s) {colors} through arc {arc} needs an annotate move")]
    UnannotatedClosedComponent { colors: String, arc: String },
}

fn at_step(step: usize, e: MoveError) -> MovieError {
    match e {
        MoveError::UnknownEntity(id) => MovieError::UnknownEntity { step, id },
        MoveError::NotApplicable { kind, location, reason } => MovieError::NotApplicable {
            step,
            kind,
            location,
            reason,
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Movie {
    pub initial: GraphDiagram,
    pub moves: Vec<Move>,
    pub final_frame: Option<GraphDiagram>,
}

impl Movie {
    pub fn identity(d: GraphDiagram) -> Movie {
        Movie {
            initial: d,
            moves: Vec::new(),
            final_frame: None,
        }
    }

    /// Number of frames, counting the initial one.
    pub fn frame_count(&self) -> usize {
        self.moves.len() + 1
    }

    /// Every frame, recomputed from the initial one.
    pub fn frames(&self) -> Result<Vec<GraphDiagram>, MovieError> {
        let mut f = Frame::new(self.initial.clone());
        let mut out = vec![f.diagram.clone()];
        for (i, m) in self.moves.iter().enumerate() {
            apply(&mut f, m).map_err(|e| at_step(i + 1, e))?;
            out.push(f.diagram.clone());
        }
        Ok(out)
    }

    pub fn last_frame(&self) -> Result<GraphDiagram, MovieError> {
        let mut f = Frame::new(self.initial.clone());
        for (i, m) in self.moves.iter().enumerate() {
            apply(&mut f, m).map_err(|e| at_step(i + 1, e))?;
        }
        Ok(f.diagram)
    }

    /// Replays the moves, reporting only references to missing entities.
    pub(crate) fn check_references(&self) -> Result<(), MovieError> {
        let mut f = Frame::new(self.initial.clone());
        for (i, m) in self.moves.iter().enumerate() {
            match apply(&mut f, m) {
                Ok(_) => {}
                Err(e @ MoveError::UnknownEntity(_)) => return Err(at_step(i + 1, e)),
                Err(MoveError::NotApplicable { .. }) => break,
            }
        }
        Ok(())
    }

    /// The same foam in the mirror: every frame mirrored.
    pub fn mirrored(&self) -> Movie {
        Movie {
            initial: self.initial.mirror(),
            moves: self.moves.iter().map(Move::mirrored).collect(),
            final_frame: self.final_frame.as_ref().map(GraphDiagram::mirror),
        }
    }

    /// The movie played backwards, starting from its last frame. Fails when
    /// a move has no inverse (merging saddles).
    pub fn reversed(&self) -> Result<Movie, MovieError> {
        let mut f = Frame::new(self.initial.clone());
        let mut inverses = Vec::new();
        for (i, m) in self.moves.iter().enumerate() {
            let applied = apply(&mut f, m).map_err(|e| at_step(i + 1, e))?;
            let inv = applied.inverse.ok_or_else(|| MovieError::NotApplicable {
                step: i + 1,
                kind: m.keyword(),
                location: m.to_string(),
                reason: "move has no recorded inverse".into(),
            })?;
            inverses.push(inv);
        }
        inverses.reverse();
        Ok(Movie {
            initial: f.diagram,
            moves: inverses,
            final_frame: Some(self.initial.clone()),
        })
    }
}

/// Where a closed foam component's Euler contribution comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosedOrigin {
    /// The sphere of a clasp move.
    ClaspSphere { crossing: String, sign: i64 },
    /// A circle born and killed with nothing else happening to it.
    TrivialSphere,
    Annotated,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedComponent {
    pub colors: BTreeSet<Color>,
    /// An arc of the component (the clasp crossing for clasp spheres).
    pub witness: String,
    pub euler: Option<Rational>,
    pub origin: ClosedOrigin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoamData {
    pub boundary: GraphDiagram,
    pub closed: Vec<ClosedComponent>,
    pub clasps: Vec<ClaspRecord>,
    /// Per color pair (ab, bc, ca), the number of components of the surface
    /// `F_ij` that reach the boundary frame.
    pub boundary_components: [usize; 3],
}

struct Dsu {
    parent: BTreeMap<String, String>,
}

impl Dsu {
    fn new() -> Dsu {
        Dsu { parent: BTreeMap::new() }
    }

    fn find(&mut self, x: &str) -> String {
        let p = self.parent.entry(x.to_string()).or_insert_with(|| x.to_string()).clone();
        if p == x {
            return p;
        }
        let root = self.find(&p);
        self.parent.insert(x.to_string(), root.clone());
        root
    }

    fn union(&mut self, a: &str, b: &str) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent.insert(rb, ra);
        }
    }
}

/// Union-find over arcs for the whole foam and for each color-pair surface.
struct Tracker {
    foam: Dsu,
    pairs: [Dsu; 3],
    colors: BTreeMap<String, Color>,
}

impl Tracker {
    fn new() -> Tracker {
        Tracker {
            foam: Dsu::new(),
            pairs: [Dsu::new(), Dsu::new(), Dsu::new()],
            colors: BTreeMap::new(),
        }
    }

    fn observe(&mut self, d: &GraphDiagram) {
        for a in d.arcs() {
            self.colors.insert(a.id.clone(), a.color);
            self.foam.find(&a.id);
            for p in &mut self.pairs {
                p.find(&a.id);
            }
        }
        for n in d.nodes().filter(|n| n.kind == NodeKind::Vertex) {
            let arcs: Vec<&String> = n.slots.iter().map(|s| &s.arc).collect();
            for w in arcs.windows(2) {
                self.foam.union(w[0], w[1]);
            }
            for (k, pair) in ColorPair::ALL.iter().enumerate() {
                let (i, j) = pair.colors();
                let pick = |c: Color| arcs.iter().find(|a| d.arcs[a.as_str()].color == c).copied();
                if let (Some(x), Some(y)) = (pick(i), pick(j)) {
                    self.pairs[k].union(x, y);
                }
            }
        }
    }

    fn union(&mut self, a: &str, b: &str) {
        self.foam.union(a, b);
        for p in &mut self.pairs {
            p.union(a, b);
        }
    }
}

/// Replays the movie and extracts its foam data.
pub fn validate_movie(mv: &Movie) -> Result<FoamData, MovieError> {
    let mut f = Frame::new(mv.initial.clone());
    let mut tracker = Tracker::new();
    tracker.observe(&f.diagram);
    let mut clasps = Vec::new();
    let mut annotations: Vec<(String, Rational)> = Vec::new();
    let mut births = BTreeSet::new();
    let mut deaths = BTreeSet::new();
    let mut touched: BTreeSet<String> = BTreeSet::new();
    for (i, m) in mv.moves.iter().enumerate() {
        let seen = f.unions.len();
        let before: BTreeSet<String> = f.diagram.arcs().map(|a| a.id.clone()).collect();
        let applied = apply(&mut f, m).map_err(|e| at_step(i + 1, e))?;
        let after: BTreeSet<String> = f.diagram.arcs().map(|a| a.id.clone()).collect();
        for (a, b) in f.unions[seen..].to_vec() {
            tracker.union(&a, &b);
            touched.insert(a);
            touched.insert(b);
        }
        tracker.observe(&f.diagram);
        match applied.event {
            Event::Birth(a) => {
                births.insert(a);
            }
            Event::Death(a) => {
                deaths.insert(a);
            }
            Event::Clasp(c) => clasps.push(c),
            Event::Annotate { arc, euler } => annotations.push((arc, euler)),
            Event::None => {
                touched.extend(before.symmetric_difference(&after).cloned());
                touched.extend(referenced_arcs(m));
            }
        }
    }
    if let Some(want) = &mv.final_frame {
        if isomorphism(&f.diagram, want, FramingCheck::PerStrand).is_none() {
            return Err(MovieError::FinalFrameMismatch);
        }
    }
    let boundary = f.diagram;
    let live: Vec<String> = boundary.arcs().map(|a| a.id.clone()).collect();
    let live_roots: BTreeSet<String> = live.iter().map(|a| tracker.foam.find(a)).collect();

    let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let all: Vec<String> = tracker.colors.keys().cloned().collect();
    for a in &all {
        let r = tracker.foam.find(a);
        if !live_roots.contains(&r) {
            groups.entry(r).or_default().push(a.clone());
        }
    }
    let mut annotated: BTreeMap<String, Rational> = BTreeMap::new();
    for (arc, v) in annotations {
        *annotated.entry(tracker.foam.find(&arc)).or_default() += v;
    }
    let mut closed: Vec<ClosedComponent> = clasps
        .iter()
        .map(|c: &ClaspRecord| ClosedComponent {
            colors: [c.sphere_color].into(),
            witness: c.crossing.clone(),
            euler: Some(Rational::from_integer((2 * c.sign).into())),
            origin: ClosedOrigin::ClaspSphere {
                crossing: c.crossing.clone(),
                sign: c.sign,
            },
        })
        .collect();
    for (root, arcs) in groups {
        let colors: BTreeSet<Color> = arcs.iter().map(|a| tracker.colors[a]).collect();
        let trivial = arcs.len() == 1 && births.contains(&arcs[0]) && deaths.contains(&arcs[0]) && !touched.contains(&arcs[0]);
        let (euler, origin) = match annotated.get(&root) {
            Some(v) => (Some(v.clone()), ClosedOrigin::Annotated),
            None if trivial => (Some(Rational::from_integer(0.into())), ClosedOrigin::TrivialSphere),
            None => (None, ClosedOrigin::Unknown),
        };
        closed.push(ClosedComponent {
            colors,
            witness: arcs[0].clone(),
            euler,
            origin,
        });
    }
    let mut boundary_components = [0; 3];
    for (k, pair) in ColorPair::ALL.iter().enumerate() {
        let (i, j) = pair.colors();
        let roots: BTreeSet<String> = boundary
            .arcs()
            .filter(|a| a.color == i || a.color == j)
            .map(|a| tracker.pairs[k].find(&a.id))
            .collect();
        boundary_components[k] = roots.len();
    }
    Ok(FoamData {
        boundary,
        closed,
        clasps,
        boundary_components,
    })
}

fn referenced_arcs(m: &Move) -> Vec<String> {
    match m {
        Move::R1Add { arc, .. } => vec![arc.clone()],
        Move::R2Add { finger, target, .. } => vec![finger.clone(), target.clone()],
        Move::Zip { arcs, .. } | Move::Saddle { arcs, .. } => arcs.to_vec(),
        Move::TransferBox { from, to, .. } => vec![from.clone(), to.clone()],
        Move::Relabel { from, to } => vec![from.clone(), to.clone()],
        Move::Clasp { strands: Some(s), .. } => s.to_vec(),
        _ => Vec::new(),
    }
}

/// Euler data accumulated over a movie.
#[derive(Debug, Clone, PartialEq)]
pub struct FoamSummary {
    pub weak: WeakEuler,
    /// Closed-component contributions to each color's strong Euler number.
    pub closed_contribs: BTreeMap<Color, Vec<Rational>>,
    pub clasps: Vec<ClaspRecord>,
}

impl FoamSummary {
    pub fn closed_for(&self, c: Color) -> &[Rational] {
        self.closed_contribs.get(&c).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Lift data declared on the movie's clasps, merged under `declared`
    /// (whose own clasp records win when present).
    pub fn lift_data(&self, declared: &LiftData) -> LiftData {
        let mut out = declared.clone();
        if out.clasps.is_empty() {
            out.clasps = self.clasps.iter().filter_map(|c| c.lift.clone()).collect();
        }
        out
    }
}

/// Weak Euler numbers on the boundary frame, closed contributions per color
/// and the clasp records.
pub fn accumulate_foam_data(mv: &Movie) -> Result<FoamSummary, MovieError> {
    let data = validate_movie(mv)?;
    summarize(&data)
}

pub fn summarize(data: &FoamData) -> Result<FoamSummary, MovieError> {
    let mut closed_contribs: BTreeMap<Color, Vec<Rational>> = BTreeMap::new();
    for c in &data.closed {
        let v = c.euler.clone().ok_or_else(|| MovieError::UnannotatedClosedComponent {
            colors: c.colors.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(""),
            arc: c.witness.clone(),
        })?;
        if c.colors.len() == 1 {
            let color = *c.colors.iter().next().expect("one color");
            closed_contribs.entry(color).or_default().push(v);
        } else if !v.is_integer() || v != Rational::from_integer(0.into()) {
            // Multi-colored closed pieces feed every one of their colors.
            for color in &c.colors {
                closed_contribs.entry(*color).or_default().push(v.clone());
            }
        }
    }
    Ok(FoamSummary {
        weak: weak_euler_numbers(&data.boundary),
        closed_contribs,
        clasps: data.clasps.clone(),
    })
}

/// Concatenation of two movies whose frames meet up to isomorphism. The
/// second movie's moves are rewritten into the first one's names.
pub fn compose_movies(m1: &Movie, m2: &Movie) -> Result<Movie, MovieError> {
    let mut fc = Frame::new(m1.initial.clone());
    for (i, m) in m1.moves.iter().enumerate() {
        apply(&mut fc, m).map_err(|e| at_step(i + 1, e))?;
    }
    let iso = isomorphism(&m2.initial, &fc.diagram, FramingCheck::PerStrand).ok_or(MovieError::FrameMismatch)?;
    let mut sigma: BTreeMap<String, String> = iso.nodes.into_iter().chain(iso.arcs).collect();
    let mut f2 = Frame::new(m2.initial.clone());
    let mut moves = m1.moves.clone();
    let offset = m1.moves.len();
    for (i, m) in m2.moves.iter().enumerate() {
        let step = offset + i + 1;
        let mut mm = m.map_ids(|id| sigma.get(id).cloned().unwrap_or_else(|| id.to_string()));
        let new_name = |fc: &Frame, want: &str| {
            let mut name = want.to_string();
            let mut k = 0;
            while fc.is_used(&name) {
                k += 1;
                name = format!("{want}_{k}");
            }
            name
        };
        match &mut mm {
            Move::Birth { arc: Some(a), .. } | Move::Relabel { to: a, .. } => {
                let name = new_name(&fc, a);
                sigma.insert(a.clone(), name.clone());
                *a = name;
            }
            _ => {}
        }
        let (c2, cc) = (f2.created.len(), fc.created.len());
        apply(&mut f2, m).map_err(|e| at_step(i + 1, e))?;
        apply(&mut fc, &mm).map_err(|e| at_step(step, e))?;
        for (a, b) in f2.created[c2..].iter().zip(&fc.created[cc..]) {
            sigma.insert(a.clone(), b.clone());
        }
        moves.push(mm);
    }
    Ok(Movie {
        initial: m1.initial.clone(),
        moves,
        final_frame: m2.final_frame.clone(),
    })
}

/// Number of components of each color-pair sublink of a diagram.
pub fn sublink_component_counts(d: &GraphDiagram) -> [usize; 3] {
    let mut out = [0; 3];
    for (k, p) in ColorPair::ALL.iter().enumerate() {
        out[k] = sublink_diagram(d, *p).components.len();
    }
    out
}
