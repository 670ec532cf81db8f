//! Elementary moves between movie frames and the surgery that performs them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::Zero;

use crate::cover::ClaspLift;
use crate::diagram::{Arc, End, GraphDiagram, Node, NodeKind, Over, SlotRef};
use crate::exactlinalg::{format_rational, Rational};
use crate::kleingraph::Color;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flipped(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// One elementary move. Creation and removal variants of a Reidemeister
/// move share a keyword in the text format and differ by their parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Move {
    /// Kink on `arc`, on the given side; `sign` is the crossing's writhe.
    R1Add { arc: String, side: Side, sign: i64 },
    R1Remove { crossing: String },
    /// Push a finger of `finger` across `target`, through the face on `side`
    /// of `finger` (and on `target_side` of `target` when they lie in
    /// different map components). The finger passes over when `finger_over`.
    R2Add {
        finger: String,
        target: String,
        side: Side,
        target_side: Side,
        finger_over: bool,
    },
    R2Remove { crossings: [String; 2] },
    /// Slide a strand across the crossing opposite it in a triangular face.
    R3 { crossings: [String; 3] },
    /// Twist the edges at slots `slot` and `slot+1` of `vertex` around each other.
    Rv1Add { vertex: String, slot: usize, sign: i64 },
    /// Untwist `crossing` against the vertex it forms a bigon with; `vertex`
    /// picks one when both ends of the twisted pair qualify.
    Rv1Remove { crossing: String, vertex: Option<String> },
    /// Move the strand crossing an edge at `crossing` across `vertex`.
    Rv2Push { vertex: String, crossing: String },
    Rv2Pull { vertex: String, crossings: [String; 2] },
    /// Bicolor crossing change through a clasp sphere.
    Clasp {
        crossing: Option<String>,
        strands: Option<[String; 2]>,
        sign: i64,
        box_to: Option<String>,
        lift: Option<ClaspLift>,
    },
    /// Remove an edge and its two end vertices, reconnecting the remaining edges.
    Unzip { edge: String },
    /// Inverse of unzip: a new `color` edge bridging `arcs` across a face.
    Zip {
        arcs: [String; 2],
        color: Color,
        sides: [Side; 2],
        framing: Rational,
    },
    Birth { color: Color, arc: Option<String> },
    Death { arc: String },
    Saddle { arcs: [String; 2], sides: [Side; 2] },
    Relabel { from: String, to: String },
    TransferBox { from: String, to: String, amount: Option<Rational> },
    /// Declares the Euler contribution of the closed foam component through `arc`.
    Annotate { arc: String, euler: Rational },
}

fn sign_str(s: i64) -> &'static str {
    if s > 0 {
        "+"
    } else {
        "-"
    }
}

impl Move {
    pub fn keyword(&self) -> &'static str {
        match self {
            Move::R1Add { .. } | Move::R1Remove { .. } => "r1",
            Move::R2Add { .. } | Move::R2Remove { .. } => "r2",
            Move::R3 { .. } => "r3",
            Move::Rv1Add { .. } | Move::Rv1Remove { .. } => "rv1",
            Move::Rv2Push { .. } | Move::Rv2Pull { .. } => "rv2",
            Move::Clasp { .. } => "clasp",
            Move::Unzip { .. } => "unzip",
            Move::Zip { .. } => "zip",
            Move::Birth { .. } => "birth",
            Move::Death { .. } => "death",
            Move::Saddle { .. } => "saddle",
            Move::Relabel { .. } => "relabel",
            Move::TransferBox { .. } => "transfer-box",
            Move::Annotate { .. } => "annotate",
        }
    }

    /// Renames every reference to an existing node or arc. Names the move
    /// introduces (a born arc, a relabel target) are left alone.
    pub fn map_ids<F: Fn(&str) -> String>(&self, f: F) -> Move {
        let mut m = self.clone();
        let one = |s: &mut String| *s = f(s);
        match &mut m {
            Move::R1Add { arc, .. } | Move::Death { arc } | Move::Annotate { arc, .. } => one(arc),
            Move::R1Remove { crossing } => one(crossing),
            Move::Rv1Remove { crossing, vertex } => {
                one(crossing);
                vertex.iter_mut().for_each(one);
            }
            Move::R2Add { finger, target, .. } => {
                one(finger);
                one(target);
            }
            Move::R2Remove { crossings } => crossings.iter_mut().for_each(one),
            Move::R3 { crossings } => crossings.iter_mut().for_each(one),
            Move::Rv1Add { vertex, .. } => one(vertex),
            Move::Rv2Push { vertex, crossing } => {
                one(vertex);
                one(crossing);
            }
            Move::Rv2Pull { vertex, crossings } => {
                one(vertex);
                crossings.iter_mut().for_each(one);
            }
            Move::Clasp {
                crossing,
                strands,
                box_to,
                ..
            } => {
                crossing.iter_mut().for_each(one);
                strands.iter_mut().flatten().for_each(one);
                box_to.iter_mut().for_each(one);
            }
            Move::Unzip { edge } => one(edge),
            Move::Zip { arcs, .. } | Move::Saddle { arcs, .. } => arcs.iter_mut().for_each(one),
            Move::Birth { .. } => {}
            Move::Relabel { from, .. } => one(from),
            Move::TransferBox { from, to, .. } => {
                one(from);
                one(to);
            }
        }
        m
    }

    /// The same move seen in the mirror image: crossings and boxes flip.
    pub fn mirrored(&self) -> Move {
        let mut m = self.clone();
        match &mut m {
            Move::R1Add { sign, .. } | Move::Rv1Add { sign, .. } => *sign = -*sign,
            Move::R2Add { finger_over, .. } => *finger_over = !*finger_over,
            Move::Clasp { sign, lift, .. } => {
                *sign = -*sign;
                if let Some(l) = lift {
                    l.sign = -l.sign;
                    l.framing = -l.framing;
                }
            }
            Move::Zip { framing, .. } => *framing = -framing.clone(),
            Move::TransferBox { amount: Some(a), .. } => *a = -a.clone(),
            Move::Annotate { euler, .. } => *euler = -euler.clone(),
            _ => {}
        }
        m
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.keyword())?;
        match self {
            Move::R1Add { arc, side, sign } => write!(f, " arc={arc} side={side} sign={}", sign_str(*sign)),
            Move::R1Remove { crossing } => write!(f, " crossing={crossing}"),
            Move::Rv1Remove { crossing, vertex } => {
                write!(f, " crossing={crossing}")?;
                match vertex {
                    Some(v) => write!(f, " vertex={v}"),
                    None => Ok(()),
                }
            }
            Move::R2Add {
                finger,
                target,
                side,
                target_side,
                finger_over,
            } => {
                if *finger_over {
                    write!(f, " over={finger} under={target}")?;
                } else {
                    write!(f, " under={finger} over={target} finger=under")?;
                }
                write!(f, " side={side} other_side={target_side}")
            }
            Move::R2Remove { crossings: [x, y] } => write!(f, " crossings=({x},{y})"),
            Move::R3 { crossings: [x, y, z] } => write!(f, " crossings=({x},{y},{z})"),
            Move::Rv1Add { vertex, slot, sign } => {
                write!(f, " vertex={vertex} slot={slot} sign={}", sign_str(*sign))
            }
            Move::Rv2Push { vertex, crossing } => write!(f, " vertex={vertex} crossing={crossing}"),
            Move::Rv2Pull {
                vertex,
                crossings: [x, y],
            } => write!(f, " vertex={vertex} crossings=({x},{y})"),
            Move::Clasp {
                crossing,
                strands,
                sign,
                box_to,
                lift,
            } => {
                if let Some(x) = crossing {
                    write!(f, " crossing={x}")?;
                }
                if let Some([p, q]) = strands {
                    write!(f, " strands=({p},{q})")?;
                }
                write!(f, " sign={}", sign_str(*sign))?;
                if let Some(b) = box_to {
                    write!(f, " box_to={b}")?;
                }
                if let Some(l) = lift {
                    write!(f, " lift: framing={} lk={}", l.framing, l.lk_with_branch)?;
                    if let Some(c) = l.color {
                        write!(f, " color={c}")?;
                    }
                }
                Ok(())
            }
            Move::Unzip { edge } => write!(f, " edge={edge}"),
            Move::Zip {
                arcs: [p, q],
                color,
                sides: [s, t],
                framing,
            } => {
                write!(f, " arcs=({p},{q}) color={color} sides=({s},{t})")?;
                if !framing.is_zero() {
                    write!(f, " box={}", format_rational(framing))?;
                }
                Ok(())
            }
            Move::Birth { color, arc } => {
                write!(f, " color={color}")?;
                if let Some(a) = arc {
                    write!(f, " arc={a}")?;
                }
                Ok(())
            }
            Move::Death { arc } => write!(f, " arc={arc}"),
            Move::Saddle {
                arcs: [p, q],
                sides: [s, t],
            } => write!(f, " arcs=({p},{q}) sides=({s},{t})"),
            Move::Relabel { from, to } => write!(f, " from={from} to={to}"),
            Move::TransferBox { from, to, amount } => {
                write!(f, " from={from} to={to}")?;
                if let Some(a) = amount {
                    write!(f, " amount={}", format_rational(a))?;
                }
                Ok(())
            }
            Move::Annotate { arc, euler } => write!(f, " arc={arc} euler={}", format_rational(euler)),
        }
    }
}

/// A diagram under surgery, with an id allocator that never reuses a name
/// and a log of arcs that sweep out the same foam facet.
#[derive(Debug, Clone)]
pub struct Frame {
    pub diagram: GraphDiagram,
    used: BTreeSet<String>,
    counters: BTreeMap<String, usize>,
    /// Pairs of arc ids lying on one facet (continuations and merges).
    pub unions: Vec<(String, String)>,
    /// Ids handed out by [`Frame::fresh`], in order.
    pub created: Vec<String>,
}

impl Frame {
    pub fn new(diagram: GraphDiagram) -> Frame {
        let mut used = BTreeSet::new();
        used.extend(diagram.nodes.keys().cloned());
        used.extend(diagram.arcs.keys().cloned());
        Frame {
            diagram,
            used,
            counters: BTreeMap::new(),
            unions: Vec::new(),
            created: Vec::new(),
        }
    }

    /// Marks names as taken (e.g. every id that ever appears in a movie).
    pub fn reserve<I: IntoIterator<Item = String>>(&mut self, ids: I) {
        self.used.extend(ids);
    }

    pub fn is_used(&self, id: &str) -> bool {
        self.used.contains(id)
    }

    /// Next unused `prefix<n>`, counting separately per prefix.
    pub fn fresh(&mut self, prefix: &str) -> String {
        let counter = self.counters.entry(prefix.to_string()).or_insert(0);
        loop {
            *counter += 1;
            let id = format!("{prefix}{counter}");
            if self.used.insert(id.clone()) {
                self.created.push(id.clone());
                return id;
            }
        }
    }

    pub(crate) fn claim(&mut self, id: &str) -> bool {
        self.used.insert(id.to_string())
    }

    pub(crate) fn new_node(&mut self, kind: NodeKind, degree: usize) -> String {
        let prefix = if kind == NodeKind::Vertex { "v" } else { "x" };
        let id = self.fresh(prefix);
        let blank = SlotRef {
            arc: String::new(),
            end: 0,
        };
        self.diagram.nodes.insert(
            id.clone(),
            Node {
                id: id.clone(),
                kind,
                slots: vec![blank; degree],
            },
        );
        id
    }

    pub(crate) fn new_arc(&mut self, color: Color, from: End, to: End) -> String {
        let id = self.fresh("e");
        self.diagram.arcs.insert(
            id.clone(),
            Arc {
                id: id.clone(),
                color,
                ends: Some([from.clone(), to.clone()]),
                framing: Rational::zero(),
            },
        );
        self.diagram.set_slot(&from, SlotRef { arc: id.clone(), end: 0 });
        self.diagram.set_slot(&to, SlotRef { arc: id.clone(), end: 1 });
        id
    }

    pub(crate) fn add_framing(&mut self, arc: &str, v: &Rational) {
        let a = self.diagram.arcs.get_mut(arc).expect("arc");
        a.framing += v;
    }

    pub(crate) fn color(&self, arc: &str) -> Color {
        self.diagram.arcs[arc].color
    }

    /// Merges the arcs at two slots (see [`GraphDiagram::join`]), logging the merge.
    pub(crate) fn join(&mut self, p: &End, q: &End) -> String {
        let a = self.diagram.slot(&p.node, p.slot).arc.clone();
        let b = self.diagram.slot(&q.node, q.slot).arc.clone();
        let kept = self.diagram.join(p, q);
        if a != b {
            self.unions.push((a, b));
        }
        kept
    }

    /// Removes a crossing, joining each strand's two arcs.
    pub(crate) fn erase_crossing(&mut self, id: &str) {
        self.join(&End::new(id, 0), &End::new(id, 2));
        self.join(&End::new(id, 1), &End::new(id, 3));
        self.diagram.nodes.remove(id);
    }

    /// Moves whatever arc end sits at `from` to the (blank) slot `to`.
    pub(crate) fn relocate(&mut self, from: &End, to: &End) {
        let r = self.diagram.slot(&from.node, from.slot).clone();
        let arc = self.diagram.arcs.get_mut(&r.arc).expect("arc");
        if let Some(ends) = &mut arc.ends {
            ends[r.end] = to.clone();
        }
        self.diagram.set_slot(to, r);
    }

    /// The arc's ends in traversal order (`forward` = stored direction).
    pub(crate) fn oriented(&self, arc: &str, forward: bool) -> Option<(End, End)> {
        let [a, b] = self.diagram.arcs[arc].ends.clone()?;
        Some(if forward { (a, b) } else { (b, a) })
    }

    /// Cuts `arc` at the given stops, each a pair (slot the traversal enters,
    /// slot it leaves from) of new nodes. Returns the pieces in traversal
    /// order; `pieces[i]` runs into stop `i` and the last piece leaves the
    /// last stop (for a closed circle it is the first piece again). The
    /// original id and framing stay on the first piece in stored direction.
    pub(crate) fn subdivide(&mut self, arc: &str, forward: bool, stops: &[(End, End)]) -> Vec<String> {
        assert!(!stops.is_empty());
        let fwd: Vec<(End, End)> = if forward {
            stops.to_vec()
        } else {
            stops.iter().rev().map(|(i, o)| (o.clone(), i.clone())).collect()
        };
        let color = self.color(arc);
        let n = fwd.len();
        let mut pieces = vec![arc.to_string()];
        match self.diagram.arcs[arc].ends.clone() {
            Some([s, t]) => {
                self.set_ends(arc, s, fwd[0].0.clone());
                for i in 1..n {
                    pieces.push(self.new_arc(color, fwd[i - 1].1.clone(), fwd[i].0.clone()));
                }
                pieces.push(self.new_arc(color, fwd[n - 1].1.clone(), t));
            }
            None => {
                self.diagram.arcs.get_mut(arc).expect("arc").ends = Some([fwd[n - 1].1.clone(), fwd[0].0.clone()]);
                self.diagram.set_slot(&fwd[n - 1].1, SlotRef { arc: arc.to_string(), end: 0 });
                self.diagram.set_slot(&fwd[0].0, SlotRef { arc: arc.to_string(), end: 1 });
                for i in 1..n {
                    pieces.push(self.new_arc(color, fwd[i - 1].1.clone(), fwd[i].0.clone()));
                }
                pieces.push(arc.to_string());
            }
        }
        for p in &pieces[1..] {
            if p != arc {
                self.unions.push((arc.to_string(), p.clone()));
            }
        }
        if !forward {
            pieces.reverse();
        }
        pieces
    }

    fn set_ends(&mut self, arc: &str, from: End, to: End) {
        self.diagram.arcs.get_mut(arc).expect("arc").ends = Some([from.clone(), to.clone()]);
        self.diagram.set_slot(&from, SlotRef { arc: arc.to_string(), end: 0 });
        self.diagram.set_slot(&to, SlotRef { arc: arc.to_string(), end: 1 });
    }

    pub(crate) fn set_over(&mut self, node: &str, over: Over) {
        self.diagram.nodes.get_mut(node).expect("node").kind = NodeKind::Crossing(over);
    }
}
