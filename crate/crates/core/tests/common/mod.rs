#![allow(dead_code)]

//! Seifert-form signature oracle for braid closures, shared by the oracle
//! and acceptance tests.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};

/// Symmetrized Seifert form `V + Vᵀ` of the braid-closure surface: one disk per
/// strand, one band per letter, one loop per pair of consecutive bands
/// between the same two strands.
pub fn seifert_symmetric(strands: usize, word: &[i32]) -> DMatrix<f64> {
    let mut loops: Vec<(usize, usize, usize)> = Vec::new();
    let mut by_gen: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (t, &l) in word.iter().enumerate() {
        by_gen.entry(l.unsigned_abs() as usize).or_default().push(t);
    }
    for (&g, ts) in &by_gen {
        for w in ts.windows(2) {
            loops.push((g, w[0], w[1]));
        }
    }
    assert!(by_gen.len() == strands - 1, "every generator must occur");
    let sign = |t: usize| word[t].signum() as f64;
    let n = loops.len();
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        let (g, a, b) = loops[i];
        s[(i, i)] = -(sign(a) + sign(b));
        for j in 0..n {
            if i == j {
                continue;
            }
            let (h, c, d) = loops[j];
            if g == h && b == c {
                s[(i, j)] = sign(b);
                s[(j, i)] = sign(b);
            } else if h == g + 1 {
                let v = if a < c && c < b && b < d {
                    1.0
                } else if c < a && a < d && d < b {
                    -1.0
                } else {
                    0.0
                };
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
    }
    s
}

pub fn float_signature(m: DMatrix<f64>) -> i64 {
    if m.nrows() == 0 {
        return 0;
    }
    let e = SymmetricEigen::new(m);
    e.eigenvalues.iter().map(|&x| if x > 1e-7 { 1 } else if x < -1e-7 { -1 } else { 0 }).sum()
}

pub fn float_det(m: DMatrix<f64>) -> i64 {
    if m.nrows() == 0 {
        return 1;
    }
    m.determinant().round().abs() as i64
}

pub fn seifert_signature(strands: usize, word: &[i32]) -> i64 {
    float_signature(seifert_symmetric(strands, word))
}

