//! Exact rational linear algebra: congruence signatures, linear solving and
//! the `v G⁻¹ wᵀ` pairing used by the surgery linking formula.
//!
//! Everything here is dense and arbitrary precision. Matrices in this crate
//! stay well below 50×50, so no attempt is made at fraction-free elimination.

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational number, always normalized (denominator ≥ 1, lowest terms).
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("ragged matrix: row {0} has the wrong length")]
    Ragged(usize),
    #[error("cannot parse rational `{0}`")]
    BadRational(String),
}

/// Builds `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p`, `-p`, `+p` or `p/q` into a normalized rational.
pub fn parse_rational(s: &str) -> Result<Rational, LinalgError> {
    let t = s.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    let bad = || LinalgError::BadRational(s.to_string());
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = t.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
    }
}

/// Canonical `p/q` rendering; integers render without a denominator.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Square symmetric matrix with rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymMatrix {
    n: usize,
    entries: Vec<Vec<Rational>>,
}

impl SymMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(LinalgError::Ragged(i));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rows[i][j] != rows[j][i] {
                    return Err(LinalgError::NotSymmetric(i, j));
                }
            }
        }
        Ok(SymMatrix { n, entries: rows })
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self, LinalgError> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            entries: vec![vec![Rational::zero(); n]; n],
        }
    }

    pub fn diagonal(d: &[Rational]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, x) in d.iter().enumerate() {
            m.entries[i][i] = x.clone();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i][j] = v.clone();
        self.entries[j][i] = v;
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn neg(&self) -> Self {
        SymMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|x| -x).collect())
                .collect(),
        }
    }

    /// Block diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &SymMatrix) -> Self {
        let n = self.n + other.n;
        let mut m = Self::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.entries[i][j] = self.entries[i][j].clone();
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                m.entries[self.n + i][self.n + j] = other.entries[i][j].clone();
            }
        }
        m
    }

    /// `P · self · Pᵀ` for a square `P` of matching size.
    pub fn congruent(&self, p: &[Vec<Rational>]) -> Result<Self, LinalgError> {
        if p.len() != self.n {
            return Err(LinalgError::DimensionMismatch {
                expected: self.n,
                got: p.len(),
            });
        }
        let pm = mat_mul(p, &self.entries);
        let pt = transpose(p);
        SymMatrix::new(mat_mul(&pm, &pt))
    }

    pub fn determinant(&self) -> Rational {
        determinant(&self.entries)
    }
}

impl fmt::Display for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(format_rational).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = Rational::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc += &row[k] * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn transpose(a: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| a.iter().map(|r| r[j].clone()).collect())
        .collect()
}

/// Counts of positive, negative and zero entries of a diagonalized form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub nullity: usize,
}

impl Inertia {
    pub fn signature(&self) -> i64 {
        self.positive as i64 - self.negative as i64
    }
}

/// Sylvester inertia by exact congruence diagonalization.
pub fn inertia(m: &SymMatrix) -> Inertia {
    let n = m.n;
    let mut a = m.entries.clone();
    let mut out = Inertia::default();
    let mut k = 0;
    while k < n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                swap_sym(&mut a, k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // Zero diagonal block [[0, b], [b, 0]]: split off a hyperbolic plane.
                swap_sym(&mut a, k + 1, j);
                let b = a[k][k + 1].clone();
                for i in (k + 2)..n {
                    let x = a[i][k].clone();
                    let y = a[i][k + 1].clone();
                    if x.is_zero() && y.is_zero() {
                        continue;
                    }
                    let alpha = &y / &b;
                    let beta = &x / &b;
                    for c in 0..n {
                        let v = &alpha * &a[k][c] + &beta * &a[k + 1][c];
                        a[i][c] -= v;
                    }
                    for r in 0..n {
                        let v = &alpha * &a[r][k] + &beta * &a[r][k + 1];
                        a[r][i] -= v;
                    }
                }
                out.positive += 1;
                out.negative += 1;
                k += 2;
                continue;
            } else {
                out.nullity += 1;
                k += 1;
                continue;
            }
        }
        let p = a[k][k].clone();
        for i in (k + 1)..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for c in k..n {
                let v = &f * &a[k][c];
                a[i][c] -= v;
            }
            for r in k..n {
                let v = &f * &a[r][k];
                a[r][i] -= v;
            }
        }
        if p.is_positive() {
            out.positive += 1;
        } else {
            out.negative += 1;
        }
        k += 1;
    }
    out
}

/// Returns `(signature, nullity)`.
pub fn congruence_signature(m: &SymMatrix) -> (i64, usize) {
    let i = inertia(m);
    (i.signature(), i.nullity)
}

fn swap_sym(a: &mut [Vec<Rational>], i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// Exact determinant by Gaussian elimination. The empty matrix has determinant 1.
pub fn determinant(rows: &[Vec<Rational>]) -> Rational {
    let n = rows.len();
    let mut a = rows.to_vec();
    let mut det = Rational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Rational::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let pivot = a[k][k].clone();
        det *= &pivot;
        for i in (k + 1)..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &pivot;
            for c in k..n {
                let v = &f * &a[k][c];
                a[i][c] -= v;
            }
        }
    }
    det
}

/// Outcome of [`solve_linear`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Rational>),
    /// `particular + Σ tᵢ kernel[i]`; `free` lists the free column of each kernel vector.
    Parametric {
        particular: Vec<Rational>,
        free: Vec<usize>,
        kernel: Vec<Vec<Rational>>,
    },
    /// Coefficients `c` over the input rows with `cᵀA = 0` and `cᵀb ≠ 0`.
    Inconsistent {
        combination: Vec<Rational>,
        residual: Rational,
    },
}

impl Solution {
    /// Whether column `j` takes the same value on every solution.
    pub fn is_determined(&self, j: usize) -> bool {
        match self {
            Solution::Unique(_) => true,
            Solution::Parametric { kernel, .. } => kernel.iter().all(|v| v[j].is_zero()),
            Solution::Inconsistent { .. } => false,
        }
    }
}

/// Solves `a · x = b` exactly.
pub fn solve_linear(a: &[Vec<Rational>], b: &[Rational]) -> Result<Solution, LinalgError> {
    let m = a.len();
    if b.len() != m {
        return Err(LinalgError::DimensionMismatch {
            expected: m,
            got: b.len(),
        });
    }
    let n = a.first().map_or(0, |r| r.len());
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(LinalgError::Ragged(i));
        }
    }
    // [A | b | I] so row operations carry their combination of input rows.
    let width = n + 1 + m;
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(width);
            row.extend(a[i].iter().cloned());
            row.push(b[i].clone());
            row.extend((0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();

    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !t[i][c].is_zero()) else {
            continue;
        };
        t.swap(p, r);
        let inv = t[r][c].recip();
        for x in t[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m {
            if i != r && !t[i][c].is_zero() {
                let f = t[i][c].clone();
                for k in 0..width {
                    let v = &f * &t[r][k];
                    t[i][k] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }

    if let Some(row) = t[r..].iter().find(|row| !row[n].is_zero()) {
        return Ok(Solution::Inconsistent {
            combination: row[n + 1..].to_vec(),
            residual: row[n].clone(),
        });
    }

    let mut particular = vec![Rational::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        particular[c] = t[i][n].clone();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    if free.is_empty() {
        return Ok(Solution::Unique(particular));
    }
    let kernel = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = -t[i][f].clone();
            }
            v
        })
        .collect();
    Ok(Solution::Parametric {
        particular,
        free,
        kernel,
    })
}

/// Exact inverse of a square matrix.
pub fn inverse(m: &SymMatrix) -> Result<SymMatrix, LinalgError> {
    let n = m.n;
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<Rational> = (0..n)
            .map(|i| if i == j { Rational::one() } else { Rational::zero() })
            .collect();
        match solve_linear(&m.entries, &e)? {
            Solution::Unique(x) => cols.push(x),
            _ => return Err(LinalgError::SingularMatrix),
        }
    }
    // Inverse of a symmetric matrix is symmetric; columns double as rows.
    SymMatrix::new(cols)
}

/// `v · G⁻¹ · wᵀ`.
pub fn quadratic_pairing(
    v: &[Rational],
    w: &[Rational],
    g: &SymMatrix,
) -> Result<Rational, LinalgError> {
    for len in [v.len(), w.len()] {
        if len != g.n {
            return Err(LinalgError::DimensionMismatch {
                expected: g.n,
                got: len,
            });
        }
    }
    // Solving G x = wᵀ avoids forming the inverse.
    let x = match solve_linear(&g.entries, w)? {
        Solution::Unique(x) => x,
        _ => return Err(LinalgError::SingularMatrix),
    };
    if g.n > 0 && g.determinant().is_zero() {
        return Err(LinalgError::SingularMatrix);
    }
    Ok(v.iter().zip(&x).map(|(a, b)| a * b).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: &[Vec<i64>]) -> SymMatrix {
        SymMatrix::from_integers(rows).unwrap()
    }

    #[test]
    fn small_signatures() {
        assert_eq!(congruence_signature(&sym(&[vec![2]])), (1, 0));
        assert_eq!(congruence_signature(&sym(&[vec![0, 1], vec![1, 0]])), (0, 0));
        assert_eq!(
            congruence_signature(&sym(&[vec![1, 0, 0], vec![0, -1, 0], vec![0, 0, 0]])),
            (0, 1)
        );
        assert_eq!(congruence_signature(&SymMatrix::zeros(0)), (0, 0));
    }

    #[test]
    fn hyperbolic_split_with_tail() {
        // Zero diagonal everywhere forces the hyperbolic path.
        let m = sym(&[vec![0, 1, 2], vec![1, 0, 3], vec![2, 3, 0]]);
        let i = inertia(&m);
        assert_eq!(i.positive + i.negative + i.nullity, 3);
        // det = 12 > 0 with trace 0: one positive, two negative.
        assert_eq!((i.positive, i.negative, i.nullity), (1, 2, 0));
    }

    #[test]
    fn solve_examples() {
        let a = vec![vec![int(1), int(1)], vec![int(1), int(-1)]];
        assert_eq!(
            solve_linear(&a, &[int(2), int(0)]).unwrap(),
            Solution::Unique(vec![int(1), int(1)])
        );
        match solve_linear(&[vec![int(1), int(1)]], &[int(1)]).unwrap() {
            Solution::Parametric { free, .. } => assert_eq!(free, vec![1]),
            other => panic!("{other:?}"),
        }
        match solve_linear(&[vec![int(1)], vec![int(1)]], &[int(1), int(2)]).unwrap() {
            Solution::Inconsistent { combination, residual } => {
                // combination applied to b must equal the residual
                let r: Rational = combination[0].clone() * int(1) + combination[1].clone() * int(2);
                assert_eq!(r, residual);
                assert!(!residual.is_zero());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pairing_examples() {
        let g = SymMatrix::new(vec![vec![rat(1, 2)]]).unwrap();
        assert_eq!(quadratic_pairing(&[int(3)], &[int(3)], &g).unwrap(), int(18));
        let g2 = sym(&[vec![2, 1], vec![1, 2]]);
        // adjugate route: G⁻¹ = (1/3)[[2,-1],[-1,2]], G⁻¹w = (1, 0), v·(1, 0) = 1
        assert_eq!(
            quadratic_pairing(&[int(1), int(2)], &[int(2), int(1)], &g2).unwrap(),
            int(1)
        );
        assert_eq!(
            quadratic_pairing(&[int(0), int(0)], &[int(5), int(1)], &g2).unwrap(),
            int(0)
        );
        let sing = sym(&[vec![1, 1], vec![1, 1]]);
        assert_eq!(
            quadratic_pairing(&[int(1), int(0)], &[int(1), int(0)], &sing),
            Err(LinalgError::SingularMatrix)
        );
    }

    #[test]
    fn rational_text_round_trip() {
        for s in ["0", "-4", "3/2", "-5/2", "14/3"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(parse_rational("+6/4").unwrap(), rat(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn determinant_matches_adjugate_2x2() {
        let m = sym(&[vec![2, 1], vec![1, 2]]);
        assert_eq!(m.determinant(), int(3));
        assert_eq!(determinant(&[]), int(1));
    }
}
