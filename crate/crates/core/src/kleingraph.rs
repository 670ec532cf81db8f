//! Abstract Klein graphs: trivalent multigraphs with a proper edge coloring by
//! the three non-trivial elements `a`, `b`, `c` of the Klein four-group.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    A,
    B,
    C,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::A, Color::B, Color::C];

    /// The color different from both `i` and `j`; `None` when `i == j`.
    pub fn complement(i: Color, j: Color) -> Option<Color> {
        if i == j {
            return None;
        }
        Color::ALL.into_iter().find(|&k| k != i && k != j)
    }

    pub fn letter(self) -> char {
        match self {
            Color::A => 'a',
            Color::B => 'b',
            Color::C => 'c',
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Color {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "a" | "A" => Ok(Color::A),
            "b" | "B" => Ok(Color::B),
            "c" | "C" => Ok(Color::C),
            other => Err(format!("unknown color `{other}`")),
        }
    }
}

/// Unordered pair of distinct colors, written `ab`, `bc` or `ca`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorPair(Color, Color);

impl ColorPair {
    pub const AB: ColorPair = ColorPair(Color::A, Color::B);
    pub const BC: ColorPair = ColorPair(Color::B, Color::C);
    pub const CA: ColorPair = ColorPair(Color::C, Color::A);
    pub const ALL: [ColorPair; 3] = [Self::AB, Self::BC, Self::CA];

    pub fn new(i: Color, j: Color) -> Option<ColorPair> {
        let k = Color::complement(i, j)?;
        Some(Self::opposite(k))
    }

    /// The pair not containing `k`.
    pub fn opposite(k: Color) -> ColorPair {
        match k {
            Color::A => Self::BC,
            Color::B => Self::CA,
            Color::C => Self::AB,
        }
    }

    pub fn colors(self) -> (Color, Color) {
        (self.0, self.1)
    }

    pub fn contains(self, c: Color) -> bool {
        self.0 == c || self.1 == c
    }

    pub fn missing(self) -> Color {
        Color::complement(self.0, self.1).expect("pair colors are distinct")
    }
}

impl fmt::Display for ColorPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

impl FromStr for ColorPair {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cs: Vec<char> = s.trim().chars().collect();
        if cs.len() != 2 {
            return Err(format!("color pair `{s}` must have two letters"));
        }
        let i: Color = cs[0].to_string().parse()?;
        let j: Color = cs[1].to_string().parse()?;
        ColorPair::new(i, j).ok_or_else(|| format!("color pair `{s}` repeats a color"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub ends: [String; 2],
    pub color: Color,
}

/// Unvalidated graph data as read from a file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphViolation {
    #[error("vertex {vertex} has degree {degree}, expected 3")]
    NotTrivalent { vertex: String, degree: usize },
    #[error("vertex {0} carries a repeated color")]
    ColorClash(String),
    #[error("edge {edge} references unknown vertex {vertex}")]
    UnknownVertex { edge: String, vertex: String },
    #[error("duplicate identifier {0}")]
    Duplicate(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid Klein graph: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<GraphViolation>),
}

/// A validated Klein graph. Construct through [`validate_klein`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KleinGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

impl KleinGraph {
    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge ids at `v`, one per color in `a, b, c` order.
    pub fn incident(&self, v: &str) -> BTreeMap<Color, &Edge> {
        self.edges
            .iter()
            .filter(|e| e.ends[0] == v || e.ends[1] == v)
            .map(|e| (e.color, e))
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            s.push_str(&format!("vertex {v}\n"));
        }
        for e in &self.edges {
            s.push_str(&format!(
                "edge {} {} {} color={}\n",
                e.id, e.ends[0], e.ends[1], e.color
            ));
        }
        s
    }
}

/// Checks trivalence and the proper coloring; reports every violation found.
pub fn validate_klein(raw: RawGraph) -> Result<KleinGraph, GraphError> {
    let mut violations = Vec::new();
    let mut seen = BTreeSet::new();
    for v in &raw.vertices {
        if !seen.insert(format!("v:{v}")) {
            violations.push(GraphViolation::Duplicate(v.clone()));
        }
    }
    for e in &raw.edges {
        if !seen.insert(format!("e:{}", e.id)) {
            violations.push(GraphViolation::Duplicate(e.id.clone()));
        }
    }
    let mut ends: BTreeMap<&str, Vec<Color>> =
        raw.vertices.iter().map(|v| (v.as_str(), Vec::new())).collect();
    for e in &raw.edges {
        for end in &e.ends {
            match ends.get_mut(end.as_str()) {
                Some(list) => list.push(e.color),
                None => violations.push(GraphViolation::UnknownVertex {
                    edge: e.id.clone(),
                    vertex: end.clone(),
                }),
            }
        }
    }
    for v in &raw.vertices {
        let colors = &ends[v.as_str()];
        if colors.len() != 3 {
            violations.push(GraphViolation::NotTrivalent {
                vertex: v.clone(),
                degree: colors.len(),
            });
        }
        let distinct: BTreeSet<_> = colors.iter().collect();
        if distinct.len() != colors.len() {
            violations.push(GraphViolation::ColorClash(v.clone()));
        }
    }
    if violations.is_empty() {
        Ok(KleinGraph {
            vertices: raw.vertices,
            edges: raw.edges,
        })
    } else {
        Err(GraphError::Invalid(violations))
    }
}

/// Parses the line format `vertex <id>` / `edge <id> <v1> <v2> color=<c>`.
pub fn parse_graph(text: &str) -> Result<RawGraph, GraphError> {
    let mut raw = RawGraph::default();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |msg: &str| GraphError::Syntax {
            line: line_no,
            msg: msg.to_string(),
        };
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "vertex" if toks.len() == 2 => raw.vertices.push(toks[1].to_string()),
            "edge" if toks.len() == 5 => {
                let color = toks[4]
                    .strip_prefix("color=")
                    .ok_or_else(|| syntax("expected color=<a|b|c>"))?
                    .parse::<Color>()
                    .map_err(|e| syntax(&e))?;
                raw.edges.push(Edge {
                    id: toks[1].to_string(),
                    ends: [toks[2].to_string(), toks[3].to_string()],
                    color,
                });
            }
            _ => return Err(syntax(&format!("cannot parse `{content}`"))),
        }
    }
    Ok(raw)
}

pub fn load_graph(text: &str) -> Result<KleinGraph, GraphError> {
    validate_klein(parse_graph(text)?)
}

/// The edges of colors `i` and `j`, grouped into their cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BicolorSubgraph {
    pub pair: (Color, Color),
    /// Each cycle lists edge ids in traversal order.
    pub cycles: Vec<Vec<String>>,
    /// Vertex degrees inside the sub-graph.
    pub degrees: BTreeMap<String, usize>,
}

pub fn bicolor_subgraph(g: &KleinGraph, i: Color, j: Color) -> BicolorSubgraph {
    let edges: Vec<&Edge> = g
        .edges
        .iter()
        .filter(|e| e.color == i || e.color == j)
        .collect();
    let mut degrees: BTreeMap<String, usize> = BTreeMap::new();
    let mut at: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (k, e) in edges.iter().enumerate() {
        for end in &e.ends {
            *degrees.entry(end.clone()).or_default() += 1;
            at.entry(end.as_str()).or_default().push(k);
        }
    }
    let mut used = vec![false; edges.len()];
    let mut cycles = Vec::new();
    for start in 0..edges.len() {
        if used[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut cur = start;
        let mut from = edges[start].ends[0].as_str();
        loop {
            used[cur] = true;
            cycle.push(edges[cur].id.clone());
            let e = edges[cur];
            let to = if e.ends[0] == from { e.ends[1].as_str() } else { e.ends[0].as_str() };
            match at[to].iter().find(|&&k| !used[k]) {
                Some(&next) => {
                    cur = next;
                    from = to;
                }
                None => break,
            }
        }
        cycles.push(cycle);
    }
    BicolorSubgraph {
        pair: (i, j),
        cycles,
        degrees,
    }
}

/// True iff every bicolored sub-graph is a single cycle. Vacuous for the empty graph.
pub fn is_three_hamiltonian(g: &KleinGraph) -> bool {
    if g.vertices.is_empty() {
        return true;
    }
    ColorPair::ALL.iter().all(|p| {
        let (i, j) = p.colors();
        bicolor_subgraph(g, i, j).cycles.len() == 1
    })
}

/// Connected sum along `v1 ∈ g1` and `v2 ∈ g2`: both vertices are removed and
/// the hanging ends are joined color to color. Ids are prefixed `1:` / `2:`.
pub fn vertex_connected_sum(
    g1: &KleinGraph,
    v1: &str,
    g2: &KleinGraph,
    v2: &str,
) -> Result<KleinGraph, GraphError> {
    let missing = |v: &str| {
        GraphError::Invalid(vec![GraphViolation::UnknownVertex {
            edge: "-".into(),
            vertex: v.into(),
        }])
    };
    if !g1.vertices.iter().any(|v| v == v1) {
        return Err(missing(v1));
    }
    if !g2.vertices.iter().any(|v| v == v2) {
        return Err(missing(v2));
    }
    let mut raw = RawGraph::default();
    raw.vertices.extend(g1.vertices.iter().filter(|v| *v != v1).map(|v| format!("1:{v}")));
    raw.vertices.extend(g2.vertices.iter().filter(|v| *v != v2).map(|v| format!("2:{v}")));
    for (tag, g, cut) in [("1", g1, v1), ("2", g2, v2)] {
        for e in &g.edges {
            if e.ends[0] != cut && e.ends[1] != cut {
                raw.edges.push(Edge {
                    id: format!("{tag}:{}", e.id),
                    ends: [format!("{tag}:{}", e.ends[0]), format!("{tag}:{}", e.ends[1])],
                    color: e.color,
                });
            }
        }
    }
    let inc1 = g1.incident(v1);
    let inc2 = g2.incident(v2);
    for c in Color::ALL {
        let (Some(e1), Some(e2)) = (inc1.get(&c), inc2.get(&c)) else {
            continue;
        };
        let far = |e: &Edge, cut: &str| {
            if e.ends[0] == cut { e.ends[1].clone() } else { e.ends[0].clone() }
        };
        raw.edges.push(Edge {
            id: format!("1:{}+2:{}", e1.id, e2.id),
            ends: [format!("1:{}", far(e1, v1)), format!("2:{}", far(e2, v2))],
            color: c,
        });
    }
    validate_klein(raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    const THETA: &str = "vertex u\nvertex v\nedge ea u v color=a\nedge eb u v color=b\nedge ec u v color=c\n";

    #[test]
    fn theta_is_valid_and_hamiltonian() {
        let g = load_graph(THETA).unwrap();
        assert!(is_three_hamiltonian(&g));
        let s = bicolor_subgraph(&g, Color::A, Color::B);
        assert_eq!(s.cycles.len(), 1);
        assert_eq!(s.cycles[0].len(), 2);
    }

    #[test]
    fn color_clash_is_reported() {
        let raw = parse_graph(
            "vertex u\nvertex v\nedge e1 u v color=a\nedge e2 u v color=a\nedge e3 u v color=b\n",
        )
        .unwrap();
        match validate_klein(raw) {
            Err(GraphError::Invalid(v)) => {
                assert!(v.contains(&GraphViolation::ColorClash("u".into())));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn loop_is_rejected() {
        let raw = parse_graph("vertex u\nvertex v\nedge l u u color=a\nedge e u v color=b\nedge f v v color=c\n")
            .unwrap();
        assert!(validate_klein(raw).is_err());
    }

    #[test]
    fn non_trivalent_vertex() {
        let raw = parse_graph("vertex u\nvertex v\nedge e1 u v color=a\nedge e2 u v color=b\n").unwrap();
        match validate_klein(raw) {
            Err(GraphError::Invalid(v)) => assert!(v.iter().any(|x| matches!(x, GraphViolation::NotTrivalent { .. }))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_graph_is_vacuously_hamiltonian() {
        let g = validate_klein(RawGraph::default()).unwrap();
        assert!(is_three_hamiltonian(&g));
    }

    #[test]
    fn disjoint_thetas_fail() {
        let two = format!(
            "{THETA}vertex x\nvertex y\nedge fa x y color=a\nedge fb x y color=b\nedge fc x y color=c\n"
        );
        let g = load_graph(&two).unwrap();
        assert!(!is_three_hamiltonian(&g));
    }

    #[test]
    fn theta_sum_theta() {
        let g = load_graph(THETA).unwrap();
        let s = vertex_connected_sum(&g, "u", &g, "u").unwrap();
        assert_eq!(s.vertices().len(), 2);
        assert_eq!(s.edges().len(), 3);
        assert!(is_three_hamiltonian(&s));
    }

    #[test]
    fn syntax_error_has_line() {
        assert_eq!(
            parse_graph("vertex u\nedge e u\n"),
            Err(GraphError::Syntax { line: 2, msg: "cannot parse `edge e u`".into() })
        );
    }

    #[test]
    fn pairs_parse() {
        assert_eq!("ab".parse::<ColorPair>().unwrap(), ColorPair::AB);
        assert_eq!("ac".parse::<ColorPair>().unwrap(), ColorPair::CA);
        assert!("aa".parse::<ColorPair>().is_err());
        assert_eq!(ColorPair::AB.missing(), Color::C);
    }
}
