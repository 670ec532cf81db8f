//! Applying moves to a frame.

use std::collections::BTreeMap;

use num::Zero;
use thiserror::Error;

use super::moves::{Frame, Move, Side};
use crate::cover::ClaspLift;
use crate::diagram::{isomorphism, sublink_diagram, Dart, End, FramingCheck, GraphDiagram, NodeKind, Over, SlotRef};
use crate::exactlinalg::{rat, Rational};
use crate::kleingraph::{Color, ColorPair};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("{kind} not applicable at {location}: {reason}")]
    NotApplicable {
        kind: &'static str,
        location: String,
        reason: String,
    },
    #[error("unknown entity {0}")]
    UnknownEntity(String),
}

fn na(m: &Move, location: &str, reason: impl Into<String>) -> MoveError {
    MoveError::NotApplicable {
        kind: m.keyword(),
        location: location.to_string(),
        reason: reason.into(),
    }
}

/// A clasp performed during a movie.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaspRecord {
    pub crossing: String,
    pub sign: i64,
    pub pair: ColorPair,
    /// Color of the clasp sphere (the color absent from `pair`).
    pub sphere_color: Color,
    pub lift: Option<ClaspLift>,
}

/// Side effects of a move on the foam beyond the diagram change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    None,
    Birth(String),
    Death(String),
    Clasp(ClaspRecord),
    Annotate { arc: String, euler: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Applied {
    /// A move undoing this one, when the kind is invertible.
    pub inverse: Option<Move>,
    pub event: Event,
}

impl Applied {
    fn plain(inverse: Move) -> Applied {
        Applied {
            inverse: Some(inverse),
            event: Event::None,
        }
    }
}

fn node_exists(f: &Frame, id: &str) -> Result<(), MoveError> {
    if f.diagram.nodes.contains_key(id) {
        Ok(())
    } else {
        Err(MoveError::UnknownEntity(id.to_string()))
    }
}

fn arc_exists(f: &Frame, id: &str) -> Result<(), MoveError> {
    if f.diagram.arcs.contains_key(id) {
        Ok(())
    } else {
        Err(MoveError::UnknownEntity(id.to_string()))
    }
}

fn crossing_over(f: &Frame, id: &str) -> Option<Over> {
    f.diagram.nodes.get(id).and_then(|n| n.over())
}

/// The face (as a dart orbit) to the given side of an attached arc.
fn side_dart(d: &GraphDiagram, arc: &str, side: Side) -> Option<Dart> {
    let ends = d.arcs[arc].ends.as_ref()?;
    let e = match side {
        Side::Left => &ends[0],
        Side::Right => &ends[1],
    };
    Some((e.node.clone(), e.slot))
}

fn face_of(d: &GraphDiagram, start: &Dart) -> Vec<Dart> {
    let mut out = vec![start.clone()];
    let mut cur = d.next_dart(start);
    while &cur != start {
        out.push(cur.clone());
        cur = d.next_dart(&cur);
    }
    out
}

fn component_of(d: &GraphDiagram, arc: &str) -> Option<String> {
    let node = d.arcs[arc].ends.as_ref()?[0].node.clone();
    d.node_components().into_iter().find(|c| c.contains(&node)).map(|c| c[0].clone())
}

/// Traversal directions (`true` = stored direction) for two arcs so that a
/// common face lies to the left of both.
fn facing(f: &Frame, m: &Move, x: &str, y: &str, sx: Side, sy: Side) -> Result<(bool, bool), MoveError> {
    let d = &f.diagram;
    let fx = sx == Side::Left;
    let (cx, cy) = (component_of(d, x), component_of(d, y));
    if cx.is_none() || cy.is_none() || cx != cy {
        return Ok((fx, sy == Side::Left));
    }
    let face = face_of(d, &side_dart(d, x, sx).expect("attached"));
    let ends = d.arcs[y].ends.clone().expect("attached");
    let fwd = face.contains(&(ends[0].node.clone(), ends[0].slot));
    let bwd = face.contains(&(ends[1].node.clone(), ends[1].slot));
    match (fwd, bwd) {
        (true, true) => Ok((fx, sy == Side::Left)),
        (true, false) => Ok((fx, true)),
        (false, true) => Ok((fx, false)),
        (false, false) => Err(na(m, &format!("{x}/{y}"), "arcs do not share the chosen face")),
    }
}

/// Follows merges in the union log to the arc that now carries `id`.
fn resolve(f: &Frame, id: &str) -> String {
    let mut cur = id.to_string();
    while !f.diagram.arcs.contains_key(&cur) {
        match f.unions.iter().rev().find(|(_, b)| *b == cur) {
            Some((a, _)) => cur = a.clone(),
            None => break,
        }
    }
    cur
}

fn search_inverse(after: &Frame, before: &GraphDiagram, candidates: Vec<Move>) -> Option<Move> {
    candidates.into_iter().find(|c| {
        let mut trial = after.clone();
        apply(&mut trial, c).is_ok() && isomorphism(&trial.diagram, before, FramingCheck::PerStrand).is_some()
    })
}

const SIDES: [Side; 2] = [Side::Left, Side::Right];

fn side_pairs() -> impl Iterator<Item = (Side, Side)> {
    SIDES.into_iter().flat_map(|a| SIDES.into_iter().map(move |b| (a, b)))
}

/// Applies one move in place.
pub fn apply(f: &mut Frame, m: &Move) -> Result<Applied, MoveError> {
    match m {
        Move::R1Add { arc, side, sign } => r1_add(f, arc, *side, *sign),
        Move::R1Remove { crossing } => r1_remove(f, m, crossing),
        Move::R2Add {
            finger,
            target,
            side,
            target_side,
            finger_over,
        } => r2_add(f, m, finger, target, *side, *target_side, *finger_over),
        Move::R2Remove { crossings } => r2_remove(f, m, crossings),
        Move::R3 { crossings } => r3(f, m, crossings),
        Move::Rv1Add { vertex, slot, sign } => rv1_add(f, m, vertex, *slot, *sign),
        Move::Rv1Remove { crossing, vertex } => rv1_remove(f, m, crossing, vertex.as_deref()),
        Move::Rv2Push { vertex, crossing } => rv2_push(f, m, vertex, crossing),
        Move::Rv2Pull { vertex, crossings } => rv2_pull(f, m, vertex, crossings),
        Move::Clasp {
            crossing,
            strands,
            sign,
            box_to,
            lift,
        } => clasp(f, m, crossing.as_deref(), strands.as_ref(), *sign, box_to.as_deref(), lift.as_ref()),
        Move::Unzip { edge } => unzip(f, m, edge),
        Move::Zip {
            arcs,
            color,
            sides,
            framing,
        } => zip(f, m, arcs, *color, *sides, framing),
        Move::Birth { color, arc } => birth(f, m, *color, arc.as_deref()),
        Move::Death { arc } => death(f, m, arc),
        Move::Saddle { arcs, sides } => saddle(f, m, arcs, *sides),
        Move::Relabel { from, to } => relabel(f, m, from, to),
        Move::TransferBox { from, to, amount } => transfer_box(f, m, from, to, amount.as_ref()),
        Move::Annotate { arc, euler } => {
            arc_exists(f, arc)?;
            Ok(Applied {
                inverse: Some(Move::Annotate {
                    arc: arc.clone(),
                    euler: -euler.clone(),
                }),
                event: Event::Annotate {
                    arc: arc.clone(),
                    euler: euler.clone(),
                },
            })
        }
    }
}

fn over_for_sign(sign: i64) -> Over {
    if sign > 0 {
        Over::Odd
    } else {
        Over::Even
    }
}

fn r1_add(f: &mut Frame, arc: &str, side: Side, sign: i64) -> Result<Applied, MoveError> {
    arc_exists(f, arc)?;
    let color = f.color(arc);
    let k = f.new_node(NodeKind::Crossing(over_for_sign(sign)), 4);
    let e = |s| End::new(&k, s);
    let (loop_arc, stop) = match side {
        Side::Left => (f.new_arc(color, e(0), e(1)), (e(2), e(3))),
        Side::Right => (f.new_arc(color, e(1), e(0)), (e(3), e(2))),
    };
    f.unions.push((arc.to_string(), loop_arc));
    f.subdivide(arc, true, &[stop]);
    f.add_framing(arc, &Rational::from_integer((-sign).into()));
    Ok(Applied::plain(Move::R1Remove { crossing: k }))
}

fn r1_remove(f: &mut Frame, m: &Move, k: &str) -> Result<Applied, MoveError> {
    let over = crossing_over(f, k).ok_or_else(|| MoveError::UnknownEntity(k.to_string()))?;
    let d = &f.diagram;
    let j = (0..4)
        .find(|&j| {
            d.slot(k, j).arc == d.slot(k, (j + 1) % 4).arc && d.next_dart(&(k.to_string(), j)) == (k.to_string(), j)
        })
        .ok_or_else(|| na(m, k, "no monogon at this crossing"))?;
    let sign = if over.is_over(j + 1) { 1 } else { -1 };
    let entry = d.opposite(k, (j + 2) % 4);
    f.join(&End::new(k, (j + 2) % 4), &End::new(k, j));
    let r = f.join(&End::new(k, (j + 3) % 4), &End::new(k, (j + 1) % 4));
    f.diagram.nodes.remove(k);
    f.add_framing(&r, &Rational::from_integer(sign.into()));
    // The kink sits on the left when the merged arc runs in through slot j+2.
    let side = match &f.diagram.arcs[&r].ends {
        Some([start, _]) if *start != entry => Side::Right,
        _ => Side::Left,
    };
    Ok(Applied::plain(Move::R1Add { arc: r, side, sign }))
}

fn r2_add(f: &mut Frame, m: &Move, x: &str, y: &str, sx: Side, sy: Side, x_over: bool) -> Result<Applied, MoveError> {
    arc_exists(f, x)?;
    arc_exists(f, y)?;
    if x == y {
        return Err(na(m, x, "an arc cannot pass over itself"));
    }
    let (fx, fy) = facing(f, m, x, y, sx, sy)?;
    let over = if x_over { Over::Odd } else { Over::Even };
    let p = f.new_node(NodeKind::Crossing(over), 4);
    let q = f.new_node(NodeKind::Crossing(over), 4);
    let (pe, qe) = (|s| End::new(&p, s), |s| End::new(&q, s));
    f.subdivide(x, fx, &[(pe(3), pe(1)), (qe(1), qe(3))]);
    f.subdivide(y, fy, &[(qe(0), qe(2)), (pe(0), pe(2))]);
    Ok(Applied::plain(Move::R2Remove { crossings: [p, q] }))
}

fn r2_remove(f: &mut Frame, m: &Move, [p, q]: &[String; 2]) -> Result<Applied, MoveError> {
    let op = crossing_over(f, p).ok_or_else(|| MoveError::UnknownEntity(p.clone()))?;
    let oq = crossing_over(f, q).ok_or_else(|| MoveError::UnknownEntity(q.clone()))?;
    if p == q {
        return Err(na(m, p, "needs two distinct crossings"));
    }
    let before = f.diagram.clone();
    let d = &f.diagram;
    let mut found = None;
    for s in 0..4 {
        let d0 = (p.clone(), s);
        let d1 = d.next_dart(&d0);
        if &d1.0 == q && d.next_dart(&d1) == d0 {
            let arrive = d.opposite(p, s).slot;
            if op.is_over(s) == oq.is_over(arrive) && d.slot(p, s).arc != d.slot(q, d1.1).arc {
                found = Some(s);
                break;
            }
        }
    }
    let s = found.ok_or_else(|| na(m, &format!("{p}/{q}"), "crossings do not bound an R2 bigon"))?;
    // External arcs of the two strands at p, to recover their merged names.
    let over_slot = if op.is_over(s) { s } else { (s + 1) % 4 };
    let ext_over = d.slot(p, (over_slot + 2) % 4).arc.clone();
    let ext_under = d.slot(p, (over_slot + 3) % 4).arc.clone();
    f.erase_crossing(p);
    f.erase_crossing(q);
    let (o, u) = (resolve(f, &ext_over), resolve(f, &ext_under));
    let cands = side_pairs()
        .flat_map(|(a, b)| {
            [(o.clone(), u.clone(), true), (u.clone(), o.clone(), false)].map(|(finger, target, finger_over)| Move::R2Add {
                finger,
                target,
                side: a,
                target_side: b,
                finger_over,
            })
        })
        .collect();
    Ok(Applied {
        inverse: search_inverse(f, &before, cands),
        event: Event::None,
    })
}

fn r3(f: &mut Frame, m: &Move, xs: &[String; 3]) -> Result<Applied, MoveError> {
    for x in xs {
        crossing_over(f, x).ok_or_else(|| MoveError::UnknownEntity(x.clone()))?;
    }
    let d = &f.diagram;
    let mut tri = None;
    'search: for s in 0..4 {
        let d0 = (xs[0].clone(), s);
        let d1 = d.next_dart(&d0);
        let d2 = d.next_dart(&d1);
        if d.next_dart(&d2) != d0 {
            continue;
        }
        let mut names = [d0.0.clone(), d1.0.clone(), d2.0.clone()];
        names.sort();
        let mut want = xs.clone();
        want.sort();
        if names == want {
            tri = Some([d0, d1, d2]);
            break 'search;
        }
    }
    let tri = tri.ok_or_else(|| na(m, &xs.join("/"), "crossings do not bound a triangular face"))?;
    // Side i leaves tri[i] and arrives at tri[i+1] one slot after its dart.
    let sides: Vec<(String, usize, String, usize)> = (0..3)
        .map(|i| {
            let (a, s) = tri[i].clone();
            let (b, t) = tri[(i + 1) % 3].clone();
            (a, s, b, (t + 1) % 4)
        })
        .collect();
    let top = sides.iter().any(|(a, s, b, t)| {
        let oa = d.nodes[a].over().expect("crossing").is_over(*s);
        let ob = d.nodes[b].over().expect("crossing").is_over(*t);
        oa && ob
    });
    if !top {
        return Err(na(m, &xs.join("/"), "no strand passes over both of its crossings"));
    }
    let mut moves: Vec<(End, End)> = Vec::new();
    for (a, s, b, t) in &sides {
        moves.push((End::new(a, *s), End::new(a, (s + 2) % 4)));
        moves.push((End::new(b, *t), End::new(b, (t + 2) % 4)));
        moves.push((End::new(a, (s + 2) % 4), End::new(b, *t)));
        moves.push((End::new(b, (t + 2) % 4), End::new(a, *s)));
    }
    let snapshot: Vec<SlotRef> = moves.iter().map(|(from, _)| d.slot(&from.node, from.slot).clone()).collect();
    for ((_, to), r) in moves.iter().zip(snapshot) {
        if let Some(ends) = &mut f.diagram.arcs.get_mut(&r.arc).expect("arc").ends {
            ends[r.end] = to.clone();
        }
        f.diagram.set_slot(to, r);
    }
    Ok(Applied::plain(Move::R3 { crossings: xs.clone() }))
}

fn vertex_check(f: &Frame, v: &str) -> Result<(), MoveError> {
    node_exists(f, v)?;
    if f.diagram.nodes[v].kind != NodeKind::Vertex {
        return Err(MoveError::UnknownEntity(format!("vertex {v}")));
    }
    Ok(())
}

fn rv1_add(f: &mut Frame, m: &Move, u: &str, slot: usize, sign: i64) -> Result<Applied, MoveError> {
    vertex_check(f, u)?;
    if slot > 2 {
        return Err(na(m, u, "vertex slots are 0, 1, 2"));
    }
    let (i, j, k) = (slot, (slot + 1) % 3, (slot + 2) % 3);
    let p = f.diagram.slot(u, i).arc.clone();
    let q = f.diagram.slot(u, j).arc.clone();
    let third = f.diagram.slot(u, k).arc.clone();
    let (cp, cq) = (f.color(&p), f.color(&q));
    let x = f.new_node(NodeKind::Crossing(over_for_sign(sign)), 4);
    f.relocate(&End::new(u, i), &End::new(&x, 0));
    f.relocate(&End::new(u, j), &End::new(&x, 1));
    let p_near = f.new_arc(cp, End::new(&x, 2), End::new(u, j));
    let q_near = f.new_arc(cq, End::new(&x, 3), End::new(u, i));
    f.unions.push((p.clone(), p_near));
    f.unions.push((q.clone(), q_near));
    let half = rat(sign, 2);
    f.add_framing(&p, &-half.clone());
    f.add_framing(&q, &-half.clone());
    f.add_framing(&third, &half);
    Ok(Applied::plain(Move::Rv1Remove {
        crossing: x,
        vertex: Some(u.to_string()),
    }))
}

fn rv1_remove(f: &mut Frame, m: &Move, x: &str, at: Option<&str>) -> Result<Applied, MoveError> {
    let over = crossing_over(f, x).ok_or_else(|| MoveError::UnknownEntity(x.to_string()))?;
    let d = &f.diagram;
    let mut found = None;
    for xs in 0..4 {
        let d0 = (x.to_string(), xs);
        let d1 = d.next_dart(&d0);
        if d.nodes[&d1.0].kind == NodeKind::Vertex && d.next_dart(&d1) == d0 && at.is_none_or(|v| v == d1.0) {
            found = Some((xs, d1.0.clone(), d1.1));
            break;
        }
    }
    let (xs, u, i) = found.ok_or_else(|| na(m, x, "no bigon between this crossing and a vertex"))?;
    let j = (i + 1) % 3;
    let a1 = d.slot(&u, i).arc.clone();
    let a2 = d.slot(&u, j).arc.clone();
    let third = d.slot(&u, (i + 2) % 3).arc.clone();
    let sign = if over.is_over(xs + 1) { 1 } else { -1 };
    let f2 = d.slot(x, (xs + 2) % 4).arc.clone();
    let f1 = d.slot(x, (xs + 3) % 4).arc.clone();
    f.relocate(&End::new(x, (xs + 2) % 4), &End::new(&u, i));
    f.relocate(&End::new(x, (xs + 3) % 4), &End::new(&u, j));
    for (near, far) in [(&a2, &f2), (&a1, &f1)] {
        let gone = f.diagram.arcs.remove(near).expect("arc");
        f.add_framing(far, &gone.framing);
        f.unions.push((far.clone(), near.clone()));
    }
    f.diagram.nodes.remove(x);
    let half = rat(sign, 2);
    f.add_framing(&f1, &half);
    f.add_framing(&f2, &half);
    f.add_framing(&third, &-half);
    Ok(Applied::plain(Move::Rv1Add {
        vertex: u,
        slot: i,
        sign,
    }))
}

fn rv2_push(f: &mut Frame, m: &Move, u: &str, z: &str) -> Result<Applied, MoveError> {
    vertex_check(f, u)?;
    let oz = crossing_over(f, z).ok_or_else(|| MoveError::UnknownEntity(z.to_string()))?;
    let d = &f.diagram;
    let hits: Vec<(usize, usize)> = (0..3)
        .filter_map(|k| {
            let far = d.opposite(u, k);
            (far.node == z).then_some((k, far.slot))
        })
        .collect();
    let [(k, mz)] = hits.as_slice() else {
        return Err(na(m, z, "crossing must meet exactly one edge of the vertex directly"));
    };
    let (k, mz) = (*k, *mz);
    let s_arc = d.slot(z, (mz + 1) % 4).arc.clone();
    let (cs, cq, cp) = (
        f.color(&s_arc),
        f.color(&d.slot(u, (k + 1) % 3).arc.clone()),
        f.color(&d.slot(u, (k + 2) % 3).arc.clone()),
    );
    let q = d.slot(u, (k + 1) % 3).arc.clone();
    let p = d.slot(u, (k + 2) % 3).arc.clone();
    let s_over = oz.is_over(mz + 1);
    let x = f.new_node(NodeKind::Crossing(if s_over { Over::Even } else { Over::Odd }), 4);
    let y = f.new_node(NodeKind::Crossing(if s_over { Over::Odd } else { Over::Even }), 4);
    f.relocate(&End::new(z, (mz + 3) % 4), &End::new(&y, 3));
    f.relocate(&End::new(z, (mz + 1) % 4), &End::new(&x, 2));
    let s_mid = f.new_arc(cs, End::new(&y, 1), End::new(&x, 0));
    f.relocate(&End::new(u, (k + 1) % 3), &End::new(&y, 0));
    let q_near = f.new_arc(cq, End::new(&y, 2), End::new(u, (k + 1) % 3));
    f.relocate(&End::new(u, (k + 2) % 3), &End::new(&x, 1));
    let p_near = f.new_arc(cp, End::new(&x, 3), End::new(u, (k + 2) % 3));
    f.unions.push((s_arc, s_mid));
    f.unions.push((q, q_near));
    f.unions.push((p, p_near));
    f.join(&End::new(z, mz), &End::new(z, (mz + 2) % 4));
    f.diagram.nodes.remove(z);
    Ok(Applied::plain(Move::Rv2Pull {
        vertex: u.to_string(),
        crossings: [x, y],
    }))
}

fn rv2_pull(f: &mut Frame, m: &Move, u: &str, [x, y]: &[String; 2]) -> Result<Applied, MoveError> {
    vertex_check(f, u)?;
    let ox = crossing_over(f, x).ok_or_else(|| MoveError::UnknownEntity(x.clone()))?;
    let oy = crossing_over(f, y).ok_or_else(|| MoveError::UnknownEntity(y.clone()))?;
    let d = &f.diagram;
    let mut found = None;
    for k in 0..3 {
        let qy = d.opposite(u, (k + 1) % 3);
        let px = d.opposite(u, (k + 2) % 3);
        if &qy.node != y || &px.node != x {
            continue;
        }
        let (j, i) = (qy.slot, px.slot);
        let mid = d.opposite(y, (j + 3) % 4);
        if &mid.node == x && mid.slot == (i + 1) % 4 && ox.is_over(i + 1) == oy.is_over(j + 3) {
            found = Some((k, i, j));
            break;
        }
    }
    let (k, i, j) = found.ok_or_else(|| na(m, &format!("{x}/{y}"), "crossings do not straddle the vertex"))?;
    let s_over = ox.is_over(i + 1);
    let q_near = d.slot(u, (k + 1) % 3).arc.clone();
    let p_near = d.slot(u, (k + 2) % 3).arc.clone();
    let s_mid = d.slot(y, (j + 3) % 4).arc.clone();
    let q_far = d.slot(y, (j + 2) % 4).arc.clone();
    let p_far = d.slot(x, (i + 2) % 4).arc.clone();
    let s_left = d.slot(x, (i + 3) % 4).arc.clone();
    let r = d.slot(u, k).arc.clone();
    let r_forward = d.arcs[&r].ends.as_ref().expect("attached")[0] == End::new(u, k);
    let z = f.new_node(NodeKind::Crossing(if s_over { Over::Odd } else { Over::Even }), 4);
    f.subdivide(&r, r_forward, &[(End::new(&z, 0), End::new(&z, 2))]);
    f.relocate(&End::new(x, (i + 3) % 4), &End::new(&z, 1));
    f.relocate(&End::new(y, (j + 1) % 4), &End::new(&z, 3));
    f.relocate(&End::new(y, (j + 2) % 4), &End::new(u, (k + 1) % 3));
    f.relocate(&End::new(x, (i + 2) % 4), &End::new(u, (k + 2) % 3));
    for (near, far) in [(&q_near, &q_far), (&p_near, &p_far), (&s_mid, &s_left)] {
        let gone = f.diagram.arcs.remove(near).expect("arc");
        f.add_framing(far, &gone.framing);
        f.unions.push((far.clone(), near.clone()));
    }
    f.diagram.nodes.remove(x);
    f.diagram.nodes.remove(y);
    Ok(Applied::plain(Move::Rv2Push {
        vertex: u.to_string(),
        crossing: z,
    }))
}

#[allow(clippy::too_many_arguments)]
fn clasp(
    f: &mut Frame,
    m: &Move,
    crossing: Option<&str>,
    strands: Option<&[String; 2]>,
    sign: i64,
    box_to: Option<&str>,
    lift: Option<&ClaspLift>,
) -> Result<Applied, MoveError> {
    let d = &f.diagram;
    let x = match (crossing, strands) {
        (Some(x), _) => x.to_string(),
        (None, Some([p, q])) => {
            let hits: Vec<&String> = d
                .nodes
                .values()
                .filter(|n| n.is_crossing())
                .filter(|n| {
                    let a = |s: usize| &n.slots[s].arc;
                    let on = |arc: &String, par: usize| a(par) == arc || a(par + 2) == arc;
                    (on(p, 0) && on(q, 1)) || (on(p, 1) && on(q, 0))
                })
                .map(|n| &n.id)
                .collect();
            match hits.as_slice() {
                [x] => (*x).clone(),
                [] => return Err(na(m, &format!("{p}/{q}"), "strands do not cross")),
                _ => return Err(na(m, &format!("{p}/{q}"), "strands cross more than once; name the crossing")),
            }
        }
        (None, None) => return Err(na(m, "?", "needs crossing= or strands=")),
    };
    let over = crossing_over(f, &x).ok_or_else(|| MoveError::UnknownEntity(x.clone()))?;
    let a0 = d.slot(&x, 0).arc.clone();
    let a1 = d.slot(&x, 1).arc.clone();
    let (c0, c1) = (f.color(&a0), f.color(&a1));
    let pair = ColorPair::new(c0, c1).ok_or_else(|| na(m, &x, "a clasp needs strands of two different colors"))?;
    let k = pair.missing();
    let current = sublink_diagram(d, pair).crossing_signs()[&x];
    if current != -sign {
        return Err(na(m, &x, format!("crossing sign is {current:+}; a clasp of sign {sign:+} needs {:+}", -sign)));
    }
    let target = match box_to {
        Some(b) => {
            arc_exists(f, b)?;
            if f.color(b) != k {
                return Err(na(m, b, format!("box_to must be an arc of color {k}")));
            }
            b.to_string()
        }
        None => d
            .arcs
            .values()
            .find(|a| a.color == k)
            .map(|a| a.id.clone())
            .ok_or_else(|| na(m, &x, format!("no arc of color {k} to receive the box")))?,
    };
    f.set_over(&x, over.flipped());
    let s = Rational::from_integer(sign.into());
    f.add_framing(&a0, &s);
    f.add_framing(&a1, &s);
    f.add_framing(&target, &-s);
    let lift = lift.cloned().map(|mut l| {
        l.color.get_or_insert(k);
        l
    });
    Ok(Applied {
        inverse: Some(Move::Clasp {
            crossing: Some(x.clone()),
            strands: None,
            sign: -sign,
            box_to: Some(target),
            lift: None,
        }),
        event: Event::Clasp(ClaspRecord {
            crossing: x,
            sign,
            pair,
            sphere_color: k,
            lift,
        }),
    })
}

fn unzip(f: &mut Frame, m: &Move, e: &str) -> Result<Applied, MoveError> {
    arc_exists(f, e)?;
    let before = f.diagram.clone();
    let d = &f.diagram;
    let Some([eu, ev]) = d.arcs[e].ends.clone() else {
        return Err(na(m, e, "edge is a closed circle"));
    };
    let (u, v) = (eu.node.clone(), ev.node.clone());
    if u == v || d.nodes[&u].kind != NodeKind::Vertex || d.nodes[&v].kind != NodeKind::Vertex {
        return Err(na(m, e, "edge must join two distinct vertices"));
    }
    let (k, kk) = (eu.slot, ev.slot);
    let color = |s: &SlotRef| d.arcs[&s.arc].color;
    let x = d.slot(&u, (k + 1) % 3).clone();
    let y = d.slot(&u, (k + 2) % 3).clone();
    let x2 = d.slot(&v, (kk + 1) % 3).clone();
    let y2 = d.slot(&v, (kk + 2) % 3).clone();
    if color(&y) != color(&x2) || color(&x) != color(&y2) {
        return Err(na(m, e, "colors do not match across the edge"));
    }
    let ecolor = d.arcs[e].color;
    let fe = d.arcs[e].framing.clone();
    let bottom = f.join(&End::new(&u, (k + 2) % 3), &End::new(&v, (kk + 1) % 3));
    let top = f.join(&End::new(&u, (k + 1) % 3), &End::new(&v, (kk + 2) % 3));
    f.diagram.arcs.remove(e);
    f.diagram.nodes.remove(&u);
    f.diagram.nodes.remove(&v);
    let half = fe.clone() / Rational::from_integer(2.into());
    f.add_framing(&bottom, &half);
    f.add_framing(&top, &half);
    let cands = side_pairs()
        .map(|(a, b)| Move::Zip {
            arcs: [top.clone(), bottom.clone()],
            color: ecolor,
            sides: [a, b],
            framing: fe.clone(),
        })
        .collect();
    Ok(Applied {
        inverse: search_inverse(f, &before, cands),
        event: Event::None,
    })
}

fn zip(f: &mut Frame, m: &Move, [t, b]: &[String; 2], k: Color, [st, sb]: [Side; 2], fe: &Rational) -> Result<Applied, MoveError> {
    arc_exists(f, t)?;
    arc_exists(f, b)?;
    let (ct, cb) = (f.color(t), f.color(b));
    if t == b || ct == cb || ct == k || cb == k {
        return Err(na(m, t, "zip needs two arcs of distinct colors, both different from the new edge"));
    }
    let (ft, fb) = facing(f, m, t, b, st, sb)?;
    let u = f.new_node(NodeKind::Vertex, 3);
    let v = f.new_node(NodeKind::Vertex, 3);
    f.subdivide(t, ft, &[(End::new(&v, 2), End::new(&u, 1))]);
    f.subdivide(b, fb, &[(End::new(&u, 2), End::new(&v, 1))]);
    let e = f.new_arc(k, End::new(&u, 0), End::new(&v, 0));
    let half = fe.clone() / Rational::from_integer(2.into());
    f.add_framing(&e, fe);
    f.add_framing(t, &-half.clone());
    f.add_framing(b, &-half);
    Ok(Applied::plain(Move::Unzip { edge: e }))
}

fn birth(f: &mut Frame, m: &Move, color: Color, arc: Option<&str>) -> Result<Applied, MoveError> {
    let id = match arc {
        Some(a) => {
            if f.diagram.arcs.contains_key(a) || f.diagram.nodes.contains_key(a) || !f.claim(a) {
                return Err(na(m, a, "id already used in this movie"));
            }
            a.to_string()
        }
        None => f.fresh("e"),
    };
    f.diagram.arcs.insert(
        id.clone(),
        crate::diagram::Arc {
            id: id.clone(),
            color,
            ends: None,
            framing: Rational::zero(),
        },
    );
    Ok(Applied {
        inverse: Some(Move::Death { arc: id.clone() }),
        event: Event::Birth(id),
    })
}

fn death(f: &mut Frame, m: &Move, arc: &str) -> Result<Applied, MoveError> {
    arc_exists(f, arc)?;
    let a = &f.diagram.arcs[arc];
    if a.ends.is_some() {
        return Err(na(m, arc, "only a crossingless closed circle can die"));
    }
    if !a.framing.is_zero() {
        return Err(na(m, arc, "circle carries a box; transfer it before the death"));
    }
    let color = a.color;
    f.diagram.arcs.remove(arc);
    Ok(Applied {
        inverse: Some(Move::Birth { color, arc: None }),
        event: Event::Death(arc.to_string()),
    })
}

fn saddle(f: &mut Frame, m: &Move, [x, y]: &[String; 2], [sx, sy]: [Side; 2]) -> Result<Applied, MoveError> {
    arc_exists(f, x)?;
    arc_exists(f, y)?;
    if x == y || f.color(x) != f.color(y) {
        return Err(na(m, x, "saddle needs two distinct arcs of one color"));
    }
    let before = f.diagram.clone();
    let (ox, oy) = (f.diagram.arcs[x].ends.is_some(), f.diagram.arcs[y].ends.is_some());
    f.unions.push((x.clone(), y.clone()));
    match (ox, oy) {
        (true, true) => {
            let (fx, fy) = facing(f, m, x, y, sx, sy)?;
            let (p0, p1) = f.oriented(x, fx).expect("attached");
            let (q0, q1) = f.oriented(y, fy).expect("attached");
            for (arc, from, to) in [(x, p0, q1), (y, q0, p1)] {
                f.diagram.arcs.get_mut(arc).expect("arc").ends = Some([from.clone(), to.clone()]);
                f.diagram.set_slot(&from, SlotRef { arc: arc.clone(), end: 0 });
                f.diagram.set_slot(&to, SlotRef { arc: arc.clone(), end: 1 });
            }
            let cands = side_pairs()
                .map(|(a, b)| Move::Saddle {
                    arcs: [x.clone(), y.clone()],
                    sides: [a, b],
                })
                .collect();
            Ok(Applied {
                inverse: search_inverse(f, &before, cands),
                event: Event::None,
            })
        }
        _ => {
            // A closed circle merges into the other arc.
            let (keep, gone) = if ox { (x, y) } else { (y, x) };
            let g = f.diagram.arcs.remove(gone).expect("arc");
            f.add_framing(keep, &g.framing);
            Ok(Applied {
                inverse: None,
                event: Event::None,
            })
        }
    }
}

fn relabel(f: &mut Frame, m: &Move, from: &str, to: &str) -> Result<Applied, MoveError> {
    if f.diagram.nodes.contains_key(to) || f.diagram.arcs.contains_key(to) {
        return Err(na(m, to, "target id is in use"));
    }
    f.claim(to);
    if let Some(mut n) = f.diagram.nodes.remove(from) {
        n.id = to.to_string();
        for (s, r) in n.slots.iter().enumerate() {
            if let Some(ends) = &mut f.diagram.arcs.get_mut(&r.arc).expect("arc").ends {
                for e in ends.iter_mut() {
                    if e.node == from && e.slot == s {
                        e.node = to.to_string();
                    }
                }
            }
        }
        f.diagram.nodes.insert(to.to_string(), n);
    } else if let Some(mut a) = f.diagram.arcs.remove(from) {
        a.id = to.to_string();
        if let Some(ends) = &a.ends {
            for e in ends {
                let r = &mut f.diagram.nodes.get_mut(&e.node).expect("node").slots[e.slot];
                r.arc = to.to_string();
            }
        }
        f.diagram.arcs.insert(to.to_string(), a);
        f.unions.push((to.to_string(), from.to_string()));
    } else {
        return Err(MoveError::UnknownEntity(from.to_string()));
    }
    Ok(Applied::plain(Move::Relabel {
        from: to.to_string(),
        to: from.to_string(),
    }))
}

fn transfer_box(f: &mut Frame, m: &Move, from: &str, to: &str, amount: Option<&Rational>) -> Result<Applied, MoveError> {
    arc_exists(f, from)?;
    arc_exists(f, to)?;
    if f.color(from) != f.color(to) {
        return Err(na(m, from, "boxes move only between arcs of one color"));
    }
    let v = amount.cloned().unwrap_or_else(|| f.diagram.arcs[from].framing.clone());
    if !(&v * Rational::from_integer(2.into())).is_integer() {
        return Err(na(m, from, "box amounts are half-integers"));
    }
    f.add_framing(from, &-v.clone());
    f.add_framing(to, &v);
    Ok(Applied::plain(Move::TransferBox {
        from: to.to_string(),
        to: from.to_string(),
        amount: Some(v),
    }))
}

/// Renames to apply so that `a` matches `b` when `a ≅ b`.
pub fn frame_relabeling(a: &GraphDiagram, b: &GraphDiagram) -> Option<BTreeMap<String, String>> {
    let iso = isomorphism(a, b, FramingCheck::PerStrand)?;
    let mut map: BTreeMap<String, String> = iso.nodes;
    map.extend(iso.arcs);
    Some(map)
}
