//! Independent oracles for the diagram signature and determinant: a Seifert
//! form built from braid closures and the Fox coloring matrix, both
//! evaluated in floating point.

use std::collections::BTreeMap;

mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;

use common::{float_det, seifert_signature, seifert_symmetric};

use kleinsig::diagram::{braid_closure, load_diagram, GraphDiagram, LinkDiagram};
use kleinsig::kleingraph::Color;
use kleinsig::signature::{link_determinant, link_signature};

/// Fox coloring matrix: one column per over-arc, one row per crossing
/// (`2·over − under − under`); any (c−1)-minor is the determinant.
fn fox_determinant(d: &GraphDiagram) -> i64 {
    let mut parent: BTreeMap<String, String> = d.arcs().map(|a| (a.id.clone(), a.id.clone())).collect();
    fn find(p: &mut BTreeMap<String, String>, x: &str) -> String {
        let q = p[x].clone();
        if q == x {
            return q;
        }
        let r = find(p, &q);
        p.insert(x.to_string(), r.clone());
        r
    }
    let crossings: Vec<_> = d.nodes().filter(|n| n.is_crossing()).collect();
    for x in &crossings {
        let o = x.over().unwrap();
        let over: Vec<usize> = (0..4).filter(|&s| o.is_over(s)).collect();
        let (p, q) = (find(&mut parent, &x.slots[over[0]].arc), find(&mut parent, &x.slots[over[1]].arc));
        parent.insert(p, q);
    }
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let ids: Vec<String> = d.arcs().map(|a| a.id.clone()).collect();
    for id in &ids {
        let r = find(&mut parent, id);
        let k = index.len();
        index.entry(r).or_insert(k);
    }
    let c = crossings.len();
    let mut m = DMatrix::<f64>::zeros(c, index.len());
    for (row, x) in crossings.iter().enumerate() {
        let o = x.over().unwrap();
        for s in 0..4 {
            let col = index[&find(&mut parent, &x.slots[s].arc)];
            m[(row, col)] += if o.is_over(s) { 1.0 } else { -1.0 };
        }
    }
    float_det(m.view((0, 0), (c - 1, c - 1)).into_owned())
}

fn is_knot(strands: usize, word: &[i32]) -> bool {
    let mut perm: Vec<usize> = (0..strands).collect();
    for &l in word {
        let i = l.unsigned_abs() as usize - 1;
        perm.swap(i, i + 1);
    }
    let mut seen = 1;
    let mut k = perm[0];
    while k != 0 {
        k = perm[k];
        seen += 1;
    }
    seen == strands
}

fn closure(strands: usize, word: &[i32]) -> LinkDiagram {
    LinkDiagram::from_diagram(braid_closure(strands, word, Color::A)).unwrap()
}

#[test]
fn seifert_oracle_matches_torus_knot_table() {
    let torus = |p: usize, q: usize| -> Vec<i32> {
        (0..q).flat_map(|_| (1..p as i32).collect::<Vec<_>>()).collect()
    };
    for (p, q, sig, det) in [(2, 3, -2, 3), (2, 5, -4, 5), (3, 4, -6, 3), (3, 5, -8, 1), (2, 7, -6, 7)] {
        let w = torus(p, q);
        assert_eq!(seifert_signature(p, &w), sig, "T({p},{q})");
        assert_eq!(float_det(seifert_symmetric(p, &w)), det, "T({p},{q})");
    }
    let fig8 = [1, -2, 1, -2];
    assert_eq!(seifert_signature(3, &fig8), 0);
    assert_eq!(float_det(seifert_symmetric(3, &fig8)), 5);
}

#[test]
fn fox_oracle_matches_known_determinants() {
    assert_eq!(fox_determinant(&braid_closure(2, &[1, 1, 1], Color::A)), 3);
    assert_eq!(fox_determinant(&braid_closure(3, &[1, -2, 1, -2], Color::A)), 5);
    assert_eq!(fox_determinant(&braid_closure(2, &[1], Color::A)), 1);
}

#[test]
fn goeritz_route_agrees_on_trefoil_and_figure_eight() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/diagrams");
    for (file, strands, word) in [("trefoil.kd", 2, vec![1, 1, 1]), ("figure_eight.kd", 3, vec![1, -2, 1, -2])] {
        let d = load_diagram(&std::fs::read_to_string(dir.join(file)).unwrap()).unwrap();
        let l = LinkDiagram::from_diagram(d.clone()).unwrap();
        assert_eq!(link_signature(&l), seifert_signature(strands, &word), "{file}");
        assert_eq!(link_determinant(&l), fox_determinant(&d).into(), "{file}");
    }
}

fn braid_knot() -> impl Strategy<Value = (usize, Vec<i32>)> {
    (2usize..=4)
        .prop_flat_map(|n| {
            let letter = (1..n as i32).prop_flat_map(|i| prop_oneof![Just(i), Just(-i)]);
            (Just(n), prop::collection::vec(letter, 1..12))
        })
        .prop_filter("closure is a knot using every generator", |(n, w)| {
            is_knot(*n, w) && (1..*n as i32).all(|g| w.iter().any(|l| l.abs() == g))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn goeritz_matches_seifert_on_random_braid_knots((n, w) in braid_knot()) {
        let l = closure(n, &w);
        prop_assert_eq!(link_signature(&l), seifert_signature(n, &w));
        prop_assert_eq!(link_determinant(&l), float_det(seifert_symmetric(n, &w)).into());
    }

    #[test]
    fn fox_matches_goeritz_determinant((n, w) in braid_knot()) {
        let d = braid_closure(n, &w, Color::A);
        let l = LinkDiagram::from_diagram(d.clone()).unwrap();
        prop_assert_eq!(link_determinant(&l), fox_determinant(&d).into());
    }

    #[test]
    fn mirror_negates_signature((n, w) in braid_knot()) {
        let l = closure(n, &w);
        let m = LinkDiagram::from_diagram(braid_closure(n, &w, Color::A).mirror()).unwrap();
        prop_assert_eq!(link_signature(&m), -link_signature(&l));
    }
}
