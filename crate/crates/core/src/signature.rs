//! Link signatures and determinants from Goeritz forms.
//!
//! For a checkerboard shading of a connected link diagram, the Goeritz form
//! lives on the white regions; the signature is its congruence signature
//! minus the correction `μ = Σ η(c)` over crossings of type II.

use std::collections::{BTreeMap, VecDeque};

use num::{BigInt, Signed, Zero};

use crate::diagram::{sublink_diagram, Dart, GraphDiagram, LinkDiagram};
use crate::exactlinalg::{congruence_signature, int, Rational, SymMatrix};
use crate::kleingraph::ColorPair;

/// Which face class is white: the class of the first traced face, or the other one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shading {
    FirstFaceWhite,
    FirstFaceBlack,
}

/// Sign of η at a crossing whose white corner sits just after an over slot.
const ETA_OVER_FIRST: i64 = -1;
/// Type II crossings are those whose outgoing strands bound a white corner.
const TYPE_II_WHITE_CORNER: bool = false;

/// Reduced Goeritz matrix with its Gordon–Litherland correction term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoeritzForm {
    pub matrix: SymMatrix,
    pub mu: i64,
    /// Face indices of the white regions; the first one is deleted from the matrix.
    pub white_regions: Vec<usize>,
}

impl GoeritzForm {
    pub fn signature(&self) -> i64 {
        congruence_signature(&self.matrix).0 - self.mu
    }

    pub fn determinant(&self) -> BigInt {
        self.matrix.determinant().abs().to_integer()
    }
}

/// Faces of a link diagram's map with a checkerboard coloring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkerboard {
    pub faces: Vec<Vec<Dart>>,
    pub white: Vec<bool>,
    pub face_of: BTreeMap<Dart, usize>,
}

/// Two-colors the faces so that the two sides of every arc differ. The first
/// traced face plays the role of the unbounded face.
pub fn checkerboard_regions(ld: &LinkDiagram, shading: Shading) -> Checkerboard {
    let d = &ld.diagram;
    let faces = d.faces();
    let mut face_of: BTreeMap<Dart, usize> = BTreeMap::new();
    for (i, f) in faces.iter().enumerate() {
        for dart in f {
            face_of.insert(dart.clone(), i);
        }
    }
    let mut color: Vec<Option<bool>> = vec![None; faces.len()];
    let mut queue = VecDeque::new();
    if !faces.is_empty() {
        color[0] = Some(shading == Shading::FirstFaceWhite);
        queue.push_back(0);
    }
    while let Some(f) = queue.pop_front() {
        let c = color[f].expect("colored");
        for (n, s) in &faces[f] {
            let far = d.opposite(n, *s);
            let g = face_of[&(far.node, far.slot)];
            match color[g] {
                None => {
                    color[g] = Some(!c);
                    queue.push_back(g);
                }
                Some(cg) => debug_assert!(cg != c, "faces of a 4-valent planar map are 2-colorable"),
            }
        }
    }
    Checkerboard {
        white: color.into_iter().map(|c| c == Some(true)).collect(),
        faces,
        face_of,
    }
}

/// Goeritz form of a link diagram whose map is connected. The first white
/// region's row and column are deleted.
pub fn goeritz_form(ld: &LinkDiagram, shading: Shading) -> GoeritzForm {
    let d = &ld.diagram;
    let board = checkerboard_regions(ld, shading);
    let (faces, face_of) = (&board.faces, &board.face_of);
    let color: Vec<Option<bool>> = board.white.iter().map(|&w| Some(w)).collect();
    let white: Vec<usize> = (0..faces.len()).filter(|&f| color[f] == Some(true)).collect();
    let index: BTreeMap<usize, usize> = white.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let m = white.len();
    let mut full = vec![vec![0i64; m]; m];
    let mut correction = 0;

    let mut outs: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for c in &ld.components {
        for p in &c.passes {
            outs.entry(p.crossing.as_str()).or_default().push(p.out_slot);
        }
    }
    for n in d.nodes() {
        let over = n.over().expect("link diagrams have only crossings");
        let corner = |k: usize| face_of[&(n.id.clone(), k)];
        let w = if color[corner(0)] == Some(true) { 0 } else { 1 };
        let eta = if over.is_over(w) { ETA_OVER_FIRST } else { -ETA_OVER_FIRST };
        let (i, j) = (index[&corner(w)], index[&corner(w + 2)]);
        if i != j {
            full[i][j] -= eta;
            full[j][i] -= eta;
            full[i][i] += eta;
            full[j][j] += eta;
        }
        let o = &outs[n.id.as_str()];
        let between = if o[1] == (o[0] + 1) % 4 { o[0] } else { o[1] };
        let white_between = between % 2 == w;
        if white_between == TYPE_II_WHITE_CORNER {
            correction += eta;
        }
    }
    let reduced: Vec<Vec<i64>> = full.iter().skip(1).map(|r| r[1..].to_vec()).collect();
    GoeritzForm {
        matrix: SymMatrix::from_integers(&reduced).expect("symmetric by construction"),
        mu: correction,
        white_regions: white,
    }
}

fn connected_parts(ld: &LinkDiagram) -> Vec<LinkDiagram> {
    ld.diagram
        .node_components()
        .into_iter()
        .map(|c| LinkDiagram::from_diagram(ld.diagram.restrict(&c)).expect("restriction of a link"))
        .collect()
}

/// Signature of an oriented link (components oriented canonically).
pub fn link_signature(ld: &LinkDiagram) -> i64 {
    connected_parts(ld)
        .iter()
        .map(|p| goeritz_form(p, Shading::FirstFaceWhite).signature())
        .sum()
}

/// `|det|` of the link; zero for split diagrams.
pub fn link_determinant(ld: &LinkDiagram) -> BigInt {
    let parts = connected_parts(ld);
    let circles = ld.diagram.free_circles().count();
    match (parts.len(), circles) {
        (0, 1) => BigInt::from(1),
        (1, 0) => goeritz_form(&parts[0], Shading::FirstFaceWhite).determinant(),
        _ => BigInt::zero(),
    }
}

/// Signatures of the three two-colored sub-links.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SublinkSignatures {
    pub ab: i64,
    pub bc: i64,
    pub ca: i64,
}

impl SublinkSignatures {
    pub fn get(&self, p: ColorPair) -> i64 {
        match p {
            ColorPair::AB => self.ab,
            ColorPair::BC => self.bc,
            _ => self.ca,
        }
    }

    pub fn total(&self) -> i64 {
        self.ab + self.bc + self.ca
    }

    pub fn as_rationals(&self) -> [Rational; 3] {
        [int(self.ab), int(self.bc), int(self.ca)]
    }
}

pub fn sublink_signatures(d: &GraphDiagram) -> SublinkSignatures {
    let s = |p| link_signature(&sublink_diagram(d, p));
    SublinkSignatures {
        ab: s(ColorPair::AB),
        bc: s(ColorPair::BC),
        ca: s(ColorPair::CA),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::braid_closure;
    use crate::kleingraph::Color;

    fn link(strands: usize, word: &[i32]) -> LinkDiagram {
        LinkDiagram::from_diagram(braid_closure(strands, word, Color::A)).unwrap()
    }

    fn both(ld: &LinkDiagram) -> (i64, i64) {
        (
            goeritz_form(ld, Shading::FirstFaceWhite).signature(),
            goeritz_form(ld, Shading::FirstFaceBlack).signature(),
        )
    }

    #[test]
    fn positive_trefoil() {
        let t = link(2, &[1, 1, 1]);
        assert_eq!(both(&t), (-2, -2));
        assert_eq!(link_determinant(&t), BigInt::from(3));
        let g = goeritz_form(&t, Shading::FirstFaceWhite);
        assert_eq!(g.white_regions.len(), g.matrix.dim() + 1);
        assert_eq!(checkerboard_regions(&t, Shading::FirstFaceWhite).faces.len(), 5);
    }

    #[test]
    fn figure_eight() {
        let f = link(3, &[1, -2, 1, -2]);
        assert_eq!(both(&f), (0, 0));
        assert_eq!(link_determinant(&f), BigInt::from(5));
    }

    #[test]
    fn torus_knot_three_five_mirror() {
        let word: Vec<i32> = [-1, -2].repeat(5);
        let k = link(3, &word);
        assert_eq!(both(&k), (8, 8));
        assert_eq!(link_determinant(&k), BigInt::from(1));
    }

    #[test]
    fn hopf_links() {
        assert_eq!(link_signature(&link(2, &[1, 1])), -1);
        assert_eq!(link_signature(&link(2, &[-1, -1])), 1);
        assert_eq!(link_determinant(&link(2, &[1, 1])), BigInt::from(2));
    }

    #[test]
    fn unknots_and_split_links() {
        assert_eq!(link_signature(&link(2, &[1])), 0);
        assert_eq!(link_determinant(&link(2, &[1])), BigInt::from(1));
        assert_eq!(link_determinant(&link(3, &[1])), BigInt::zero());
        assert_eq!(link_signature(&link(4, &[1, 1, 1, 3, 3, 3])), -4);
    }
}
