//! Planar diagrams of knotted Klein graphs.
//!
//! A diagram is a combinatorial map: every node (crossing or trivalent
//! vertex) lists its arc-ends in counterclockwise order, and every arc joins
//! two node slots. Arcs carry a color and a framing box in `½ℤ`. Arcs with
//! no ends are closed circles without crossings.
//!
//! Text format, one declaration per line, `#` starts a comment:
//!
//! ```text
//! X <id> (e1,e2,e3,e4) over=(e1,e3)      # crossing, arcs counterclockwise
//! V <id> (e1,e2,e3)                      # trivalent vertex
//! A <id> color=<a|b|c> [from=<node>.<slot> to=<node>.<slot>]
//! B <arc id> <p/q>                       # framing box, summed per arc
//! ```

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use num::Zero;
use thiserror::Error;

use crate::exactlinalg::{format_rational, int, parse_rational, Rational};
use crate::kleingraph::{validate_klein, Color, ColorPair, Edge, GraphError, KleinGraph, RawGraph};

/// Which pair of opposite slots carries the over strand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Over {
    /// slots 0 and 2
    Even,
    /// slots 1 and 3
    Odd,
}

impl Over {
    pub fn of_slot(slot: usize) -> Over {
        if slot % 2 == 0 {
            Over::Even
        } else {
            Over::Odd
        }
    }

    pub fn flipped(self) -> Over {
        match self {
            Over::Even => Over::Odd,
            Over::Odd => Over::Even,
        }
    }

    pub fn is_over(self, slot: usize) -> bool {
        Over::of_slot(slot) == self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Crossing(Over),
    Vertex,
}

/// One end of an arc: a slot of a node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct End {
    pub node: String,
    pub slot: usize,
}

impl End {
    pub fn new(node: &str, slot: usize) -> End {
        End {
            node: node.to_string(),
            slot,
        }
    }
}

/// Contents of a node slot: an arc and which of its two ends sits here.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SlotRef {
    pub arc: String,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub slots: Vec<SlotRef>,
}

impl Node {
    pub fn degree(&self) -> usize {
        self.slots.len()
    }

    pub fn is_crossing(&self) -> bool {
        matches!(self.kind, NodeKind::Crossing(_))
    }

    pub fn over(&self) -> Option<Over> {
        match self.kind {
            NodeKind::Crossing(o) => Some(o),
            NodeKind::Vertex => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub id: String,
    pub color: Color,
    /// `None` for a closed circle with no nodes.
    pub ends: Option<[End; 2]>,
    pub framing: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("arc {0} is dangling or undeclared")]
    DanglingArc(String),
    #[error("arc end of {0} is used more than once")]
    DuplicateEnd(String),
    #[error("diagram is not planar (component of {component} has Euler characteristic {euler})")]
    NonPlanar { component: String, euler: i64 },
    #[error("vertex {0} carries a repeated color")]
    ColorClash(String),
    #[error("strand through crossing {0} changes color")]
    MixedColorStrand(String),
    #[error("{0} is not a vertex")]
    NotAVertex(String),
    #[error("diagram has a closed strand ({0}) with no vertex")]
    ClosedStrand(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A planar diagram of a knotted Klein graph (or of a link, when it has no vertices).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphDiagram {
    pub(crate) nodes: BTreeMap<String, Node>,
    pub(crate) arcs: BTreeMap<String, Arc>,
}

/// Outgoing half-edge at a node slot.
pub type Dart = (String, usize);

impl GraphDiagram {
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn arcs(&self) -> impl Iterator<Item = &Arc> {
        self.arcs.values()
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn arc(&self, id: &str) -> Option<&Arc> {
        self.arcs.get(id)
    }

    pub fn crossing_count(&self) -> usize {
        self.nodes.values().filter(|n| n.is_crossing()).count()
    }

    pub fn vertex_count(&self) -> usize {
        self.nodes.values().filter(|n| !n.is_crossing()).count()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn framing(&self, arc: &str) -> Rational {
        self.arcs.get(arc).map(|a| a.framing.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn total_framing(&self) -> Rational {
        self.arcs.values().map(|a| a.framing.clone()).sum()
    }

    pub(crate) fn slot(&self, node: &str, slot: usize) -> &SlotRef {
        &self.nodes[node].slots[slot]
    }

    /// The node slot at the far end of the arc leaving `(node, slot)`.
    pub fn opposite(&self, node: &str, slot: usize) -> End {
        let r = self.slot(node, slot);
        let arc = &self.arcs[&r.arc];
        arc.ends.as_ref().expect("attached arc")[1 - r.end].clone()
    }

    /// Face traversal: leave through `(node, slot)`, arrive at the far end and
    /// turn to the clockwise-next slot. Each orbit is one face, which lies to
    /// the left of every dart in it.
    pub fn next_dart(&self, d: &Dart) -> Dart {
        let far = self.opposite(&d.0, d.1);
        let deg = self.nodes[&far.node].degree();
        (far.node, (far.slot + deg - 1) % deg)
    }

    pub fn faces(&self) -> Vec<Vec<Dart>> {
        let mut seen = BTreeSet::new();
        let mut faces = Vec::new();
        for n in self.nodes.values() {
            for s in 0..n.degree() {
                let start = (n.id.clone(), s);
                if seen.contains(&start) {
                    continue;
                }
                let mut face = Vec::new();
                let mut d = start.clone();
                loop {
                    seen.insert(d.clone());
                    face.push(d.clone());
                    d = self.next_dart(&d);
                    if d == start {
                        break;
                    }
                }
                faces.push(face);
            }
        }
        faces
    }

    /// Connected components of the map, as sorted node-id lists. Closed
    /// circles are not included.
    pub fn node_components(&self) -> Vec<Vec<String>> {
        let mut seen = BTreeSet::new();
        let mut comps = Vec::new();
        for id in self.nodes.keys() {
            if seen.contains(id) {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([id.clone()]);
            seen.insert(id.clone());
            while let Some(n) = queue.pop_front() {
                comp.push(n.clone());
                for s in 0..self.nodes[&n].degree() {
                    let far = self.opposite(&n, s);
                    if seen.insert(far.node.clone()) {
                        queue.push_back(far.node);
                    }
                }
            }
            comp.sort();
            comps.push(comp);
        }
        comps
    }

    pub fn free_circles(&self) -> impl Iterator<Item = &Arc> {
        self.arcs.values().filter(|a| a.ends.is_none())
    }

    /// Restriction to one map component (plus nothing else).
    pub fn restrict(&self, nodes: &[String]) -> GraphDiagram {
        let keep: BTreeSet<&String> = nodes.iter().collect();
        let mut d = GraphDiagram::default();
        for id in nodes {
            d.nodes.insert(id.clone(), self.nodes[id].clone());
        }
        for a in self.arcs.values() {
            if let Some(ends) = &a.ends {
                if keep.contains(&ends[0].node) {
                    d.arcs.insert(a.id.clone(), a.clone());
                }
            }
        }
        d
    }

    /// Reverses every crossing and negates every box.
    pub fn mirror(&self) -> GraphDiagram {
        let mut d = self.clone();
        for n in d.nodes.values_mut() {
            if let NodeKind::Crossing(o) = n.kind {
                n.kind = NodeKind::Crossing(o.flipped());
            }
        }
        for a in d.arcs.values_mut() {
            a.framing = -a.framing.clone();
        }
        d
    }

    /// Canonical text rendering, parseable by [`parse_diagram`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for n in self.nodes.values() {
            let arcs: Vec<&str> = n.slots.iter().map(|r| r.arc.as_str()).collect();
            match n.kind {
                NodeKind::Crossing(o) => {
                    let p = if o == Over::Even { 0 } else { 1 };
                    let (x, y) = (arcs[p], arcs[p + 2]);
                    let other = (arcs[1 - p], arcs[3 - p]);
                    let ambiguous = {
                        let mut a = [x, y];
                        let mut b = [other.0, other.1];
                        a.sort();
                        b.sort();
                        a == b
                    };
                    let over = if ambiguous {
                        format!("{}{}", p, p + 2)
                    } else {
                        format!("({x},{y})")
                    };
                    let _ = writeln!(s, "X {} ({}) over={}", n.id, arcs.join(","), over);
                }
                NodeKind::Vertex => {
                    let _ = writeln!(s, "V {} ({})", n.id, arcs.join(","));
                }
            }
        }
        for a in self.arcs.values() {
            match &a.ends {
                Some([f, t]) => {
                    let _ = writeln!(
                        s,
                        "A {} color={} from={}.{} to={}.{}",
                        a.id, a.color, f.node, f.slot, t.node, t.slot
                    );
                }
                None => {
                    let _ = writeln!(s, "A {} color={}", a.id, a.color);
                }
            }
        }
        for a in self.arcs.values() {
            if !a.framing.is_zero() {
                let _ = writeln!(s, "B {} {}", a.id, format_rational(&a.framing));
            }
        }
        s
    }

    // ---- low-level surgery used by sub-link extraction and the movie engine ----

    pub(crate) fn set_slot(&mut self, end: &End, r: SlotRef) {
        self.nodes.get_mut(&end.node).expect("node").slots[end.slot] = r;
    }

    /// Merges the arcs sitting at slots `p` and `q` into one arc. The slots
    /// themselves are left stale; the caller removes their node(s). The kept
    /// arc is the one at `p`; framings add.
    pub(crate) fn join(&mut self, p: &End, q: &End) -> String {
        let rp = self.slot(&p.node, p.slot).clone();
        let rq = self.slot(&q.node, q.slot).clone();
        if rp.arc == rq.arc {
            let a = self.arcs.get_mut(&rp.arc).expect("arc");
            a.ends = None;
            return rp.arc;
        }
        let aq = self.arcs.remove(&rq.arc).expect("arc");
        let q_far = aq.ends.as_ref().expect("attached")[1 - rq.end].clone();
        let p_far = self.arcs[&rp.arc].ends.as_ref().expect("attached")[1 - rp.end].clone();
        {
            let a = self.arcs.get_mut(&rp.arc).expect("arc");
            a.framing += aq.framing;
            a.ends = Some([p_far.clone(), q_far.clone()]);
        }
        self.set_slot(&p_far, SlotRef { arc: rp.arc.clone(), end: 0 });
        self.set_slot(&q_far, SlotRef { arc: rp.arc.clone(), end: 1 });
        rp.arc
    }

    /// The maximal runs of arcs that go straight through crossings. Runs that
    /// end at vertices are graph edges; the others are closed strands.
    pub fn strands(&self) -> Vec<Strand> {
        let mut used = BTreeSet::new();
        let mut out = Vec::new();
        // Open strands first, started from vertex slots.
        for n in self.nodes.values().filter(|n| !n.is_crossing()) {
            for s in 0..n.degree() {
                let start = self.slot(&n.id, s).clone();
                if used.contains(&start.arc) {
                    continue;
                }
                let (arcs, last) = self.walk(&n.id, s);
                for a in &arcs {
                    used.insert(a.clone());
                }
                out.push(Strand {
                    arcs,
                    ends: Some([End::new(&n.id, s), last]),
                });
            }
        }
        for a in self.arcs.values() {
            if used.contains(&a.id) {
                continue;
            }
            let arcs = match &a.ends {
                None => vec![a.id.clone()],
                Some(ends) => self.walk(&ends[0].node, ends[0].slot).0,
            };
            for x in &arcs {
                used.insert(x.clone());
            }
            out.push(Strand { arcs, ends: None });
        }
        out
    }

    /// Walks from slot `(node, slot)` straight through crossings until a
    /// vertex is reached or the walk closes up.
    fn walk(&self, node: &str, slot: usize) -> (Vec<String>, End) {
        let mut arcs = Vec::new();
        let start = End::new(node, slot);
        let mut cur = start.clone();
        loop {
            let r = self.slot(&cur.node, cur.slot);
            arcs.push(r.arc.clone());
            let far = self.opposite(&cur.node, cur.slot);
            let n = &self.nodes[&far.node];
            if !n.is_crossing() {
                return (arcs, far);
            }
            cur = End::new(&far.node, (far.slot + 2) % 4);
            if cur == start {
                return (arcs, far);
            }
        }
    }
}

/// A run of arcs joined straight through crossings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strand {
    pub arcs: Vec<String>,
    /// Vertex slots at both ends; `None` for a closed strand.
    pub ends: Option<[End; 2]>,
}

fn syntax(line: usize, msg: impl Into<String>) -> DiagramError {
    DiagramError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_list(tok: &str) -> Option<Vec<String>> {
    let inner = tok.strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(|s| s.trim().to_string()).collect())
}

fn parse_end(s: &str) -> Option<End> {
    let (n, k) = s.rsplit_once('.')?;
    Some(End::new(n, k.parse().ok()?))
}

/// Parses the extended planar-diagram text format.
pub fn parse_diagram(text: &str) -> Result<GraphDiagram, DiagramError> {
    struct PendingArc {
        color: Color,
        ends: Option<(End, End)>,
        line: usize,
    }
    let mut nodes: Vec<(usize, Node, Option<String>)> = Vec::new();
    let mut arcs: BTreeMap<String, PendingArc> = BTreeMap::new();
    let mut boxes: Vec<(usize, String, Rational)> = Vec::new();
    let mut ids = BTreeSet::new();

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "X" | "V" => {
                if toks.len() < 3 {
                    return Err(syntax(line, "node needs an id and an arc list"));
                }
                let id = toks[1].to_string();
                if !ids.insert(id.clone()) {
                    return Err(syntax(line, format!("duplicate id {id}")));
                }
                let list = parse_list(toks[2]).ok_or_else(|| syntax(line, "bad arc list"))?;
                let slots = list
                    .into_iter()
                    .map(|arc| SlotRef { arc, end: 0 })
                    .collect::<Vec<_>>();
                if toks[0] == "X" {
                    if slots.len() != 4 || toks.len() != 4 {
                        return Err(syntax(line, "crossing needs 4 arcs and over=..."));
                    }
                    let over = toks[3]
                        .strip_prefix("over=")
                        .ok_or_else(|| syntax(line, "expected over=(x,y)"))?
                        .to_string();
                    nodes.push((
                        line,
                        Node {
                            id,
                            kind: NodeKind::Crossing(Over::Even),
                            slots,
                        },
                        Some(over),
                    ));
                } else {
                    if slots.len() != 3 || toks.len() != 3 {
                        return Err(syntax(line, "vertex needs exactly 3 arcs"));
                    }
                    nodes.push((
                        line,
                        Node {
                            id,
                            kind: NodeKind::Vertex,
                            slots,
                        },
                        None,
                    ));
                }
            }
            "A" => {
                if toks.len() < 3 {
                    return Err(syntax(line, "arc needs an id and a color"));
                }
                let id = toks[1].to_string();
                if !ids.insert(id.clone()) {
                    return Err(syntax(line, format!("duplicate id {id}")));
                }
                let mut color = None;
                let mut from = None;
                let mut to = None;
                for t in &toks[2..] {
                    if let Some(c) = t.strip_prefix("color=") {
                        color = Some(c.parse::<Color>().map_err(|e| syntax(line, e))?);
                    } else if let Some(e) = t.strip_prefix("from=") {
                        from = Some(parse_end(e).ok_or_else(|| syntax(line, "bad from="))?);
                    } else if let Some(e) = t.strip_prefix("to=") {
                        to = Some(parse_end(e).ok_or_else(|| syntax(line, "bad to="))?);
                    } else {
                        return Err(syntax(line, format!("unexpected `{t}`")));
                    }
                }
                let color = color.ok_or_else(|| syntax(line, "missing color="))?;
                let ends = match (from, to) {
                    (Some(f), Some(t)) => Some((f, t)),
                    (None, None) => None,
                    _ => return Err(syntax(line, "from= and to= must be given together")),
                };
                arcs.insert(id, PendingArc { color, ends, line });
            }
            "B" => {
                if toks.len() != 3 {
                    return Err(syntax(line, "box needs an arc id and a value"));
                }
                let v = parse_rational(toks[2]).map_err(|e| syntax(line, e.to_string()))?;
                if !(&v * int(2)).is_integer() {
                    return Err(syntax(line, "box values must be integers or half-integers"));
                }
                boxes.push((line, toks[1].to_string(), v));
            }
            other => return Err(syntax(line, format!("unknown declaration `{other}`"))),
        }
    }

    // Resolve over= now that slot contents are known.
    let mut d = GraphDiagram::default();
    for (line, mut node, over) in nodes {
        if let Some(over) = over {
            let o = if over == "02" {
                Over::Even
            } else if over == "13" {
                Over::Odd
            } else {
                let pair = parse_list(&over).ok_or_else(|| syntax(line, "bad over="))?;
                if pair.len() != 2 {
                    return Err(syntax(line, "over= names two arcs"));
                }
                let mut want = [pair[0].as_str(), pair[1].as_str()];
                want.sort();
                let matches: Vec<Over> = [Over::Even, Over::Odd]
                    .into_iter()
                    .filter(|o| {
                        let p = if *o == Over::Even { 0 } else { 1 };
                        let mut got = [node.slots[p].arc.as_str(), node.slots[p + 2].arc.as_str()];
                        got.sort();
                        got == want
                    })
                    .collect();
                match matches.as_slice() {
                    [o] => *o,
                    [] => return Err(syntax(line, "over= does not name a strand of this crossing")),
                    _ => return Err(syntax(line, "over= is ambiguous; use over=02 or over=13")),
                }
            };
            node.kind = NodeKind::Crossing(o);
        }
        d.nodes.insert(node.id.clone(), node);
    }

    let mut occurrences: BTreeMap<String, Vec<End>> = BTreeMap::new();
    for n in d.nodes.values() {
        for (s, r) in n.slots.iter().enumerate() {
            occurrences.entry(r.arc.clone()).or_default().push(End::new(&n.id, s));
        }
    }
    for arc in occurrences.keys() {
        if !arcs.contains_key(arc) {
            return Err(DiagramError::DanglingArc(arc.clone()));
        }
    }
    for (id, p) in &arcs {
        let occ = occurrences.get(id).cloned().unwrap_or_default();
        let ends = match occ.len() {
            0 => {
                if p.ends.is_some() {
                    return Err(DiagramError::DanglingArc(id.clone()));
                }
                None
            }
            1 => return Err(DiagramError::DanglingArc(id.clone())),
            2 => {
                let mut ends = [occ[0].clone(), occ[1].clone()];
                if let Some((f, t)) = &p.ends {
                    let mut want = [f.clone(), t.clone()];
                    want.sort();
                    let mut got = ends.clone();
                    got.sort();
                    if want != got {
                        return Err(syntax(p.line, format!("from=/to= of {id} disagree with node slots")));
                    }
                    ends = [f.clone(), t.clone()];
                }
                Some(ends)
            }
            _ => return Err(DiagramError::DuplicateEnd(id.clone())),
        };
        if let Some(ends) = &ends {
            for (k, e) in ends.iter().enumerate() {
                d.nodes.get_mut(&e.node).expect("node").slots[e.slot] = SlotRef {
                    arc: id.clone(),
                    end: k,
                };
            }
        }
        d.arcs.insert(
            id.clone(),
            Arc {
                id: id.clone(),
                color: p.color,
                ends,
                framing: Rational::zero(),
            },
        );
    }
    for (_line, arc, v) in boxes {
        match d.arcs.get_mut(&arc) {
            Some(a) => a.framing += v,
            None => return Err(DiagramError::DanglingArc(arc)),
        }
    }
    Ok(d)
}

/// Every invariant violation found in a diagram.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<DiagramError>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Coloring checks plus genus 0 for every map component (V − E + F = 2).
pub fn validate_diagram(d: &GraphDiagram) -> ValidationReport {
    let mut issues = Vec::new();
    for n in d.nodes.values() {
        let colors: Vec<Color> = n.slots.iter().map(|r| d.arcs[&r.arc].color).collect();
        match n.kind {
            NodeKind::Vertex => {
                let set: BTreeSet<_> = colors.iter().collect();
                if set.len() != 3 {
                    issues.push(DiagramError::ColorClash(n.id.clone()));
                }
            }
            NodeKind::Crossing(_) => {
                if colors[0] != colors[2] || colors[1] != colors[3] {
                    issues.push(DiagramError::MixedColorStrand(n.id.clone()));
                }
            }
        }
    }
    issues.extend(planarity_issues(d));
    ValidationReport { issues }
}

pub(crate) fn planarity_issues(d: &GraphDiagram) -> Vec<DiagramError> {
    let faces = d.faces();
    let mut out = Vec::new();
    for comp in d.node_components() {
        let set: BTreeSet<&String> = comp.iter().collect();
        let v = comp.len() as i64;
        let e = d
            .arcs
            .values()
            .filter(|a| a.ends.as_ref().is_some_and(|x| set.contains(&x[0].node)))
            .count() as i64;
        let f = faces.iter().filter(|f| set.contains(&f[0].0)).count() as i64;
        if v - e + f != 2 {
            out.push(DiagramError::NonPlanar {
                component: comp[0].clone(),
                euler: v - e + f,
            });
        }
    }
    out
}

pub fn load_diagram(text: &str) -> Result<GraphDiagram, DiagramError> {
    let d = parse_diagram(text)?;
    let report = validate_diagram(&d);
    match report.issues.into_iter().next() {
        Some(e) => Err(e),
        None => Ok(d),
    }
}

/// The abstract Klein graph underneath a diagram.
pub fn underlying_graph(d: &GraphDiagram) -> Result<KleinGraph, DiagramError> {
    let mut raw = RawGraph::default();
    for n in d.nodes.values().filter(|n| !n.is_crossing()) {
        raw.vertices.push(n.id.clone());
    }
    for s in d.strands() {
        let Some([p, q]) = &s.ends else {
            return Err(DiagramError::ClosedStrand(s.arcs[0].clone()));
        };
        let id = s.arcs.iter().min().expect("nonempty strand").clone();
        raw.edges.push(Edge {
            id,
            ends: [p.node.clone(), q.node.clone()],
            color: d.arcs[&s.arcs[0]].color,
        });
    }
    raw.edges.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(validate_klein(raw)?)
}

/// One pass of a link component through a crossing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pass {
    pub crossing: String,
    pub in_slot: usize,
    pub out_slot: usize,
}

/// A closed, canonically oriented component of a link diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkComponent {
    /// Arc ids in traversal order, starting from the smallest id.
    pub arcs: Vec<String>,
    pub passes: Vec<Pass>,
}

/// A diagram with no trivalent vertices, together with its components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkDiagram {
    pub diagram: GraphDiagram,
    pub components: Vec<LinkComponent>,
}

impl LinkDiagram {
    pub fn from_diagram(d: GraphDiagram) -> Result<LinkDiagram, DiagramError> {
        if let Some(v) = d.nodes.values().find(|n| !n.is_crossing()) {
            return Err(DiagramError::Syntax {
                line: 0,
                msg: format!("link diagram contains vertex {}", v.id),
            });
        }
        let mut used = BTreeSet::new();
        let mut components = Vec::new();
        for a in d.arcs.values() {
            if used.contains(&a.id) {
                continue;
            }
            let mut comp = LinkComponent {
                arcs: Vec::new(),
                passes: Vec::new(),
            };
            match &a.ends {
                None => comp.arcs.push(a.id.clone()),
                Some(ends) => {
                    // Leave through ends[0]'s far side: travel from ends[0] to ends[1].
                    let mut arc = a.id.clone();
                    let mut arrive = ends[1].clone();
                    loop {
                        comp.arcs.push(arc.clone());
                        let out = (arrive.slot + 2) % 4;
                        comp.passes.push(Pass {
                            crossing: arrive.node.clone(),
                            in_slot: arrive.slot,
                            out_slot: out,
                        });
                        let r = d.slot(&arrive.node, out).clone();
                        if r.arc == a.id && r.end == 0 {
                            break;
                        }
                        let next = &d.arcs[&r.arc];
                        arrive = next.ends.as_ref().expect("attached")[1 - r.end].clone();
                        arc = r.arc;
                    }
                }
            }
            for x in &comp.arcs {
                used.insert(x.clone());
            }
            components.push(comp);
        }
        Ok(LinkDiagram {
            diagram: d,
            components,
        })
    }

    pub fn component_of_arc(&self, arc: &str) -> Option<usize> {
        self.components.iter().position(|c| c.arcs.iter().any(|a| a == arc))
    }

    /// Signs of every crossing under the canonical component orientations.
    pub fn crossing_signs(&self) -> BTreeMap<String, i64> {
        let mut passes: BTreeMap<&str, Vec<&Pass>> = BTreeMap::new();
        for c in &self.components {
            for p in &c.passes {
                passes.entry(p.crossing.as_str()).or_default().push(p);
            }
        }
        passes
            .into_iter()
            .map(|(x, ps)| {
                let over = self.diagram.nodes[x].over().expect("crossing");
                let (o, u) = if over.is_over(ps[0].out_slot) { (ps[0], ps[1]) } else { (ps[1], ps[0]) };
                (x.to_string(), crossing_sign(o.out_slot, u.out_slot))
            })
            .collect()
    }

    pub fn writhe(&self) -> i64 {
        self.crossing_signs().values().sum()
    }
}

/// `+1` when the under strand leaves counterclockwise-next to the over strand.
pub fn crossing_sign(over_out: usize, under_out: usize) -> i64 {
    if under_out == (over_out + 1) % 4 {
        1
    } else {
        -1
    }
}

/// Deletes the third color, absorbs vertices and erases crossings that lose a strand.
pub fn sublink_diagram(d: &GraphDiagram, pair: ColorPair) -> LinkDiagram {
    let k = pair.missing();
    let mut out = d.clone();
    let doomed: Vec<String> = out.arcs.values().filter(|a| a.color == k).map(|a| a.id.clone()).collect();
    let mut holes: BTreeSet<End> = BTreeSet::new();
    for id in &doomed {
        if let Some(a) = out.arcs.remove(id) {
            if let Some(ends) = a.ends {
                holes.extend(ends);
            }
        }
    }
    let node_ids: Vec<String> = out.nodes.keys().cloned().collect();
    for id in node_ids {
        let n = out.nodes[&id].clone();
        let hole = |s: usize| holes.contains(&End::new(&id, s));
        match n.kind {
            NodeKind::Vertex => {
                let live: Vec<usize> = (0..3).filter(|&s| !hole(s)).collect();
                if live.len() == 2 {
                    out.join(&End::new(&id, live[0]), &End::new(&id, live[1]));
                }
                out.nodes.remove(&id);
            }
            NodeKind::Crossing(_) => {
                let dead: Vec<usize> = (0..4).filter(|&s| hole(s)).collect();
                if dead.is_empty() {
                    continue;
                }
                for s in 0..2 {
                    if !hole(s) && !hole(s + 2) {
                        out.join(&End::new(&id, s), &End::new(&id, s + 2));
                    }
                }
                out.nodes.remove(&id);
            }
        }
    }
    LinkDiagram::from_diagram(out).expect("no vertices remain")
}

/// Per component: sum of boxes on its arcs plus the signed self-crossings.
pub fn component_selflinking(ld: &LinkDiagram) -> Vec<Rational> {
    let signs = ld.crossing_signs();
    ld.components
        .iter()
        .map(|c| {
            let boxes: Rational = c.arcs.iter().map(|a| ld.diagram.arcs[a].framing.clone()).sum();
            let mut count: BTreeMap<&str, usize> = BTreeMap::new();
            for p in &c.passes {
                *count.entry(p.crossing.as_str()).or_default() += 1;
            }
            let writhe: i64 = count
                .into_iter()
                .filter(|(_, n)| *n == 2)
                .map(|(x, _)| signs[x])
                .sum();
            boxes + int(writhe)
        })
        .collect()
}

/// Weak normal Euler numbers read off a boundary frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakEuler {
    pub ab: Rational,
    pub bc: Rational,
    pub ca: Rational,
}

impl WeakEuler {
    pub fn get(&self, p: ColorPair) -> &Rational {
        match p {
            ColorPair::AB => &self.ab,
            ColorPair::BC => &self.bc,
            _ => &self.ca,
        }
    }

    pub fn total(&self) -> Rational {
        &self.ab + &self.bc + &self.ca
    }

    pub fn neg(&self) -> WeakEuler {
        WeakEuler {
            ab: -self.ab.clone(),
            bc: -self.bc.clone(),
            ca: -self.ca.clone(),
        }
    }

    pub fn add(&self, o: &WeakEuler) -> WeakEuler {
        WeakEuler {
            ab: &self.ab + &o.ab,
            bc: &self.bc + &o.bc,
            ca: &self.ca + &o.ca,
        }
    }
}

/// `e_ij = −Σ selflinking` over the components of each sub-link.
pub fn weak_euler_numbers(d: &GraphDiagram) -> WeakEuler {
    let e = |p| -component_selflinking(&sublink_diagram(d, p)).into_iter().sum::<Rational>();
    WeakEuler {
        ab: e(ColorPair::AB),
        bc: e(ColorPair::BC),
        ca: e(ColorPair::CA),
    }
}

/// How framings are compared by [`isomorphism`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FramingCheck {
    Ignore,
    /// Box sums must agree on every strand (edge or closed strand).
    PerStrand,
}

/// An orientation-preserving combinatorial isomorphism `d1 → d2`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Relabeling {
    pub nodes: BTreeMap<String, String>,
    pub arcs: BTreeMap<String, String>,
}

fn strand_sums(d: &GraphDiagram) -> BTreeMap<String, Rational> {
    let mut out = BTreeMap::new();
    for s in d.strands() {
        let sum: Rational = s.arcs.iter().map(|a| d.arcs[a].framing.clone()).sum();
        for a in s.arcs {
            out.insert(a, sum.clone());
        }
    }
    out
}

/// Finds an isomorphism of planar maps preserving colors, crossing data and
/// (optionally) per-strand framings.
pub fn isomorphism(d1: &GraphDiagram, d2: &GraphDiagram, check: FramingCheck) -> Option<Relabeling> {
    if d1.nodes.len() != d2.nodes.len() || d1.arcs.len() != d2.arcs.len() {
        return None;
    }
    let sums1 = strand_sums(d1);
    let sums2 = strand_sums(d2);
    let comps1 = d1.node_components();
    let comps2 = d2.node_components();
    if comps1.len() != comps2.len() {
        return None;
    }
    let mut used = vec![false; comps2.len()];
    let mut map = Relabeling::default();
    if !match_components(d1, d2, &comps1, &comps2, 0, &mut used, &mut map, &sums1, &sums2, check) {
        return None;
    }
    // Closed circles: pair greedily by (color, framing).
    let mut c2: Vec<&Arc> = d2.free_circles().collect();
    for a in d1.free_circles() {
        let pos = c2.iter().position(|b| {
            b.color == a.color && (check == FramingCheck::Ignore || b.framing == a.framing)
        })?;
        let b = c2.remove(pos);
        map.arcs.insert(a.id.clone(), b.id.clone());
    }
    if !c2.is_empty() {
        return None;
    }
    Some(map)
}

#[allow(clippy::too_many_arguments)]
fn match_components(
    d1: &GraphDiagram,
    d2: &GraphDiagram,
    comps1: &[Vec<String>],
    comps2: &[Vec<String>],
    i: usize,
    used: &mut [bool],
    map: &mut Relabeling,
    sums1: &BTreeMap<String, Rational>,
    sums2: &BTreeMap<String, Rational>,
    check: FramingCheck,
) -> bool {
    if i == comps1.len() {
        return true;
    }
    let root = &comps1[i][0];
    let rn = &d1.nodes[root];
    for j in 0..comps2.len() {
        if used[j] || comps2[j].len() != comps1[i].len() {
            continue;
        }
        for cand in &comps2[j] {
            let cn = &d2.nodes[cand];
            if cn.degree() != rn.degree() || cn.is_crossing() != rn.is_crossing() {
                continue;
            }
            for rot in 0..rn.degree() {
                let mut trial = map.clone();
                if propagate(d1, d2, root, cand, rot, &mut trial, sums1, sums2, check) {
                    used[j] = true;
                    let saved = std::mem::replace(map, trial);
                    if match_components(d1, d2, comps1, comps2, i + 1, used, map, sums1, sums2, check) {
                        return true;
                    }
                    *map = saved;
                    used[j] = false;
                }
            }
        }
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn propagate(
    d1: &GraphDiagram,
    d2: &GraphDiagram,
    n1: &str,
    n2: &str,
    rot: usize,
    map: &mut Relabeling,
    sums1: &BTreeMap<String, Rational>,
    sums2: &BTreeMap<String, Rational>,
    check: FramingCheck,
) -> bool {
    let mut rots: BTreeMap<String, usize> = BTreeMap::new();
    let mut arc_end: BTreeMap<String, (String, usize, usize)> = BTreeMap::new();
    let mut queue = VecDeque::new();
    rots.insert(n1.to_string(), rot);
    map.nodes.insert(n1.to_string(), n2.to_string());
    queue.push_back((n1.to_string(), n2.to_string(), rot));
    while let Some((a, b, r)) = queue.pop_front() {
        let na = &d1.nodes[&a];
        let nb = &d2.nodes[&b];
        if na.degree() != nb.degree() || na.is_crossing() != nb.is_crossing() {
            return false;
        }
        let deg = na.degree();
        for s in 0..deg {
            let t = (s + r) % deg;
            if let (Some(oa), Some(ob)) = (na.over(), nb.over()) {
                if oa.is_over(s) != ob.is_over(t) {
                    return false;
                }
            }
            let ra = &na.slots[s];
            let rb = &nb.slots[t];
            let (arc_a, arc_b) = (&d1.arcs[&ra.arc], &d2.arcs[&rb.arc]);
            if arc_a.color != arc_b.color {
                return false;
            }
            if check == FramingCheck::PerStrand && sums1[&ra.arc] != sums2[&rb.arc] {
                return false;
            }
            match arc_end.get(&ra.arc) {
                Some((mapped, ea, eb)) => {
                    // Already matched: either the same end (revisit) or the opposite end.
                    let ok = mapped == &rb.arc
                        && ((*ea == ra.end && *eb == rb.end) || (*ea != ra.end && *eb != rb.end));
                    if !ok {
                        return false;
                    }
                }
                None => {
                    if let Some(prev) = map.arcs.get(&ra.arc) {
                        if prev != &rb.arc {
                            return false;
                        }
                    }
                    if map.arcs.iter().any(|(k, v)| v == &rb.arc && k != &ra.arc) {
                        return false;
                    }
                    arc_end.insert(ra.arc.clone(), (rb.arc.clone(), ra.end, rb.end));
                    map.arcs.insert(ra.arc.clone(), rb.arc.clone());
                }
            }
            let fa = d1.opposite(&a, s);
            let fb = d2.opposite(&b, t);
            let da = d1.nodes[&fa.node].degree();
            if d2.nodes[&fb.node].degree() != da {
                return false;
            }
            let fr = (fb.slot + da - fa.slot) % da;
            match map.nodes.get(&fa.node) {
                Some(m) => {
                    if m != &fb.node || rots.get(&fa.node) != Some(&fr) {
                        return false;
                    }
                }
                None => {
                    if map.nodes.values().any(|v| v == &fb.node) {
                        return false;
                    }
                    map.nodes.insert(fa.node.clone(), fb.node.clone());
                    rots.insert(fa.node.clone(), fr);
                    queue.push_back((fa.node, fb.node, fr));
                }
            }
        }
    }
    true
}

/// Closure of a braid word on `strands` strands, drawn upward with the
/// closing arcs on the right. Letter `i` (1-based) is a positive crossing of
/// strands `i` and `i+1`, `-i` a negative one. Positions never touched by a
/// crossing become closed circles.
pub fn braid_closure(strands: usize, word: &[i32], color: Color) -> GraphDiagram {
    let mut d = GraphDiagram::default();
    let mut start: Vec<Option<End>> = vec![None; strands];
    let mut first: Vec<Option<End>> = vec![None; strands];
    let mut arc_no = 0;
    let add_arc = |d: &mut GraphDiagram, n: &mut usize, from: End, to: End| {
        *n += 1;
        let id = format!("e{n}");
        d.arcs.insert(
            id.clone(),
            Arc {
                id: id.clone(),
                color,
                ends: Some([from.clone(), to.clone()]),
                framing: Rational::zero(),
            },
        );
        d.set_slot(&from, SlotRef { arc: id.clone(), end: 0 });
        d.set_slot(&to, SlotRef { arc: id, end: 1 });
    };
    for (t, &letter) in word.iter().enumerate() {
        let i = letter.unsigned_abs() as usize - 1;
        assert!(i + 1 < strands, "braid letter out of range");
        let x = format!("x{}", t + 1);
        // Slots: 0 = NE, 1 = NW, 2 = SW, 3 = SE; strands run SW→NE and SE→NW.
        let over = if letter > 0 { Over::Even } else { Over::Odd };
        let blank = SlotRef { arc: String::new(), end: 0 };
        d.nodes.insert(
            x.clone(),
            Node {
                id: x.clone(),
                kind: NodeKind::Crossing(over),
                slots: vec![blank; 4],
            },
        );
        for (pos, slot_in, slot_out) in [(i, 2, 1), (i + 1, 3, 0)] {
            let here = End::new(&x, slot_in);
            match start[pos].take() {
                Some(from) => add_arc(&mut d, &mut arc_no, from, here),
                None => first[pos] = Some(here),
            }
            start[pos] = Some(End::new(&x, slot_out));
        }
    }
    for pos in 0..strands {
        match (start[pos].take(), first[pos].take()) {
            (Some(from), Some(to)) => add_arc(&mut d, &mut arc_no, from, to),
            _ => {
                arc_no += 1;
                let id = format!("e{arc_no}");
                d.arcs.insert(
                    id.clone(),
                    Arc {
                        id,
                        color,
                        ends: None,
                        framing: Rational::zero(),
                    },
                );
            }
        }
    }
    d
}

impl GraphDiagram {
    /// The same spatial graph seen from below: the plane is reflected and
    /// every crossing changed, which reverses all cyclic orders.
    pub fn turned_over(&self) -> GraphDiagram {
        let mut d = self.clone();
        let degree: BTreeMap<String, usize> = d.nodes.values().map(|n| (n.id.clone(), n.degree())).collect();
        for n in d.nodes.values_mut() {
            n.slots.reverse();
        }
        for a in d.arcs.values_mut() {
            if let Some(ends) = &mut a.ends {
                for e in ends.iter_mut() {
                    e.slot = degree[&e.node] - 1 - e.slot;
                }
            }
        }
        d
    }

    fn prefixed(&self, tag: &str) -> GraphDiagram {
        let p = |s: &str| format!("{tag}:{s}");
        let mut d = GraphDiagram::default();
        for n in self.nodes.values() {
            let slots = n.slots.iter().map(|r| SlotRef { arc: p(&r.arc), end: r.end }).collect();
            d.nodes.insert(p(&n.id), Node { id: p(&n.id), kind: n.kind, slots });
        }
        for a in self.arcs.values() {
            let ends = a.ends.as_ref().map(|[x, y]| [End::new(&p(&x.node), x.slot), End::new(&p(&y.node), y.slot)]);
            d.arcs.insert(
                p(&a.id),
                Arc {
                    id: p(&a.id),
                    color: a.color,
                    ends,
                    framing: a.framing.clone(),
                },
            );
        }
        d
    }

    fn vertex_colors(&self, v: &str) -> Option<Vec<Color>> {
        let n = self.nodes.get(v).filter(|n| !n.is_crossing())?;
        Some(n.slots.iter().map(|r| self.arcs[&r.arc].color).collect())
    }
}

/// Connected sum of two diagrams along a vertex of each. The second diagram
/// is turned over when its cyclic color order at `v2` does not mirror the
/// one at `v1`. Ids are prefixed `1:` / `2:`; joined arcs keep the first
/// diagram's id and add their framings.
pub fn diagram_vertex_connected_sum(
    d1: &GraphDiagram,
    v1: &str,
    d2: &GraphDiagram,
    v2: &str,
) -> Result<GraphDiagram, DiagramError> {
    let c1 = d1.vertex_colors(v1).ok_or_else(|| DiagramError::NotAVertex(v1.into()))?;
    let c2 = d2.vertex_colors(v2).ok_or_else(|| DiagramError::NotAVertex(v2.into()))?;
    let same_rotation = (0..3).any(|r| (0..3).all(|i| c1[i] == c2[(i + r) % 3]));
    let d2 = if same_rotation { d2.turned_over() } else { d2.clone() };
    let mut d = d1.prefixed("1");
    let other = d2.prefixed("2");
    let (v1, v2) = (format!("1:{v1}"), format!("2:{v2}"));
    d.nodes.extend(other.nodes);
    d.arcs.extend(other.arcs);
    let hanging = |d: &GraphDiagram, v: &str| -> Vec<(Color, String, End)> {
        let n = &d.nodes[v];
        (0..n.degree())
            .map(|s| (d.arcs[&n.slots[s].arc].color, n.slots[s].arc.clone(), d.opposite(v, s)))
            .collect()
    };
    let h1 = hanging(&d, &v1);
    let h2 = hanging(&d, &v2);
    for (color, arc1, far1) in h1 {
        let (_, arc2, far2) = h2.iter().find(|h| h.0 == color).expect("three colors at each vertex").clone();
        let gone = d.arcs.remove(&arc2).expect("arc");
        let a = d.arcs.get_mut(&arc1).expect("arc");
        a.framing += gone.framing;
        let end1 = a.ends.as_ref().expect("attached").iter().position(|e| *e == far1).expect("far end");
        a.ends = Some(if end1 == 0 { [far1.clone(), far2.clone()] } else { [far2.clone(), far1.clone()] });
        d.set_slot(&far2, SlotRef { arc: arc1.clone(), end: 1 - end1 });
    }
    d.nodes.remove(&v1);
    d.nodes.remove(&v2);
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlinalg::rat;

    pub(crate) const THETA: &str = "\
V u (ea,eb,ec)
V v (ec,eb,ea)
A ea color=a
A eb color=b
A ec color=c
";

    #[test]
    fn theta_parses() {
        let d = load_diagram(THETA).unwrap();
        assert_eq!(d.vertex_count(), 2);
        assert_eq!(d.arc_count(), 3);
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.faces().len(), 3);
        let g = underlying_graph(&d).unwrap();
        assert!(crate::kleingraph::is_three_hamiltonian(&g));
    }

    #[test]
    fn duplicate_end() {
        let t = "V u (ea,eb,ec)\nV v (ec,eb,ea)\nV w (ea,eb,ec)\nA ea color=a\nA eb color=b\nA ec color=c\n";
        assert_eq!(parse_diagram(t), Err(DiagramError::DuplicateEnd("ea".into())));
    }

    #[test]
    fn dangling_arc() {
        let t = "V u (ea,eb,ec)\nA ea color=a\nA eb color=b\n";
        assert_eq!(parse_diagram(t), Err(DiagramError::DanglingArc("ec".into())));
    }

    #[test]
    fn half_integer_boxes_only() {
        let t = format!("{THETA}B ea 1/3\n");
        assert!(matches!(parse_diagram(&t), Err(DiagramError::Syntax { line: 6, .. })));
        let t = format!("{THETA}B ea 1/2\nB ea 1\n");
        assert_eq!(parse_diagram(&t).unwrap().framing("ea"), rat(3, 2));
    }

    #[test]
    fn genus_one_map_is_rejected() {
        let t = "X x (e1,e2,e1,e2) over=02\nA e1 color=a\nA e2 color=a\n";
        let d = parse_diagram(t).unwrap();
        assert!(validate_diagram(&d)
            .issues
            .iter()
            .any(|e| matches!(e, DiagramError::NonPlanar { euler: 0, .. })));
    }

    #[test]
    fn mixed_color_strand() {
        let t = "X x (e1,e2,e3,e4) over=(e1,e3)\nA e1 color=a\nA e2 color=b\nA e3 color=b\nA e4 color=a\n\
                 X y (e3,e2,e1,e4) over=(e3,e1)\n";
        let d = parse_diagram(t).unwrap();
        assert!(validate_diagram(&d).issues.contains(&DiagramError::MixedColorStrand("x".into())));
    }

    #[test]
    fn theta_sublinks_are_unknots() {
        let d = load_diagram(THETA).unwrap();
        for p in ColorPair::ALL {
            let l = sublink_diagram(&d, p);
            assert_eq!(l.components.len(), 1);
            assert_eq!(l.diagram.crossing_count(), 0);
        }
    }

    #[test]
    fn box_on_free_circle() {
        let d = parse_diagram("A o color=a\nB o 3/2\n").unwrap();
        let l = LinkDiagram::from_diagram(d).unwrap();
        assert_eq!(component_selflinking(&l), vec![rat(3, 2)]);
    }

    #[test]
    fn boxes_shift_weak_euler() {
        let d = load_diagram(THETA).unwrap();
        assert_eq!(weak_euler_numbers(&d).total(), Rational::zero());
        let boxed = parse_diagram(&format!("{THETA}B ea 1\n")).unwrap();
        let w = weak_euler_numbers(&boxed);
        assert_eq!(w.ab, int(-1));
        assert_eq!(w.ca, int(-1));
        assert_eq!(w.bc, int(0));
    }

    #[test]
    fn text_round_trip() {
        let d = parse_diagram(&format!("{THETA}B eb -5/2\n")).unwrap();
        let again = parse_diagram(&d.to_text()).unwrap();
        assert_eq!(d, again);
    }

    #[test]
    fn isomorphism_ignores_names() {
        let d = load_diagram(THETA).unwrap();
        let renamed = load_diagram("V p (x,y,z)\nV q (z,y,x)\nA x color=a\nA y color=b\nA z color=c\n").unwrap();
        assert!(isomorphism(&d, &renamed, FramingCheck::PerStrand).is_some());
        // Exchanging the two vertices swaps the rotation senses.
        let swapped = load_diagram("V p (y,x,z)\nV q (z,x,y)\nA x color=a\nA y color=b\nA z color=c\n").unwrap();
        assert!(isomorphism(&d, &swapped, FramingCheck::Ignore).is_some());
        let boxed = parse_diagram("V p (x,y,z)\nV q (z,y,x)\nA x color=a\nA y color=b\nA z color=c\nB x 1\n").unwrap();
        assert!(isomorphism(&d, &boxed, FramingCheck::Ignore).is_some());
        assert!(isomorphism(&d, &boxed, FramingCheck::PerStrand).is_none());
    }

    #[test]
    fn braid_closure_writhe() {
        let d = braid_closure(2, &[1, 1, 1], Color::A);
        assert!(validate_diagram(&d).is_valid());
        let l = LinkDiagram::from_diagram(d).unwrap();
        assert_eq!(l.components.len(), 1);
        assert_eq!(l.writhe(), 3);
        let d = braid_closure(3, &[1, -2, 1, -2], Color::A);
        assert!(validate_diagram(&d).is_valid());
        assert_eq!(LinkDiagram::from_diagram(d).unwrap().writhe(), 0);
        let hopf = LinkDiagram::from_diagram(braid_closure(2, &[-1, -1], Color::B)).unwrap();
        assert_eq!(hopf.components.len(), 2);
        assert_eq!(hopf.writhe(), -2);
        let split = braid_closure(3, &[1], Color::A);
        assert_eq!(split.free_circles().count(), 1);
    }

    #[test]
    fn turning_over_keeps_writhe() {
        let d = braid_closure(2, &[1, 1, 1], Color::A);
        let t = d.turned_over();
        assert!(validate_diagram(&t).is_valid());
        assert_eq!(LinkDiagram::from_diagram(t).unwrap().writhe(), 3);
        assert_eq!(LinkDiagram::from_diagram(d.mirror()).unwrap().writhe(), -3);
    }

    #[test]
    fn theta_sum_theta_is_theta() {
        let d = load_diagram(THETA).unwrap();
        for (v1, v2) in [("u", "u"), ("u", "v"), ("v", "v")] {
            let s = diagram_vertex_connected_sum(&d, v1, &d, v2).unwrap();
            assert!(validate_diagram(&s).is_valid(), "{v1} {v2}");
            assert!(isomorphism(&s, &d, FramingCheck::PerStrand).is_some(), "{v1} {v2}");
        }
        assert!(matches!(
            diagram_vertex_connected_sum(&d, "u", &d, "ea"),
            Err(DiagramError::NotAVertex(_))
        ));
    }
}
