//! Linking numbers in rational homology spheres presented by surgery, clasp
//! surgery coefficients and strong normal Euler numbers.
//!
//! Surgery file:
//!
//! ```text
//! J <id> coeff=<p/q>
//! lk <id1> <id2> <int>
//! ```
//!
//! Lift file (one `clasp` line per clasp, in movie order):
//!
//! ```text
//! clasp sign=<+|-> framing=<int> lk_with_branch=<int> [color=<c>]
//! clasp_lk <i> <j> <int>          # linking of lifted curves i, j (1-based)
//! closed_euler <p/q> [color=<c>]
//! boundary_lk0 <p/q> color=<c>    # lifted boundary knot vs. its parallel, before surgery
//! ```
//!
//! A color's strong Euler number is known only when some clasp lifts to its
//! cover or its `boundary_lk0` is declared.

use std::collections::BTreeMap;

use num::{BigInt, Integer, One, Signed, Zero};
use thiserror::Error;

use crate::exactlinalg::{int, parse_rational, quadratic_pairing, LinalgError, Rational, SymMatrix};
use crate::kleingraph::Color;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoverError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown surgery component {0}")]
    UnknownComponent(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("clasp lift {0} has no color and none could be inferred")]
    MissingColor(usize),
    #[error("{0}")]
    Strict(String),
}

/// Framed surgery link given purely by linking data.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SurgeryPresentation {
    pub ids: Vec<String>,
    pub coeffs: Vec<Rational>,
    /// Off-diagonal linking numbers, keyed by index pairs `(i, j)` with `i < j`.
    pub lk: BTreeMap<(usize, usize), BigInt>,
}

impl SurgeryPresentation {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn push(&mut self, id: &str, coeff: Rational) -> usize {
        self.ids.push(id.to_string());
        self.coeffs.push(coeff);
        self.ids.len() - 1
    }

    pub fn set_lk(&mut self, i: usize, j: usize, v: BigInt) {
        let key = if i < j { (i, j) } else { (j, i) };
        self.lk.insert(key, v);
    }

    /// `g_ij = lk(J_i, J_j)` off the diagonal, `g_ii = r_i`.
    pub fn linking_matrix(&self) -> SymMatrix {
        let n = self.len();
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, self.coeffs[i].clone());
        }
        for (&(i, j), v) in &self.lk {
            m.set(i, j, Rational::from_integer(v.clone()));
        }
        m
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> CoverError {
    CoverError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_int(line: usize, s: &str) -> Result<BigInt, CoverError> {
    s.parse::<BigInt>().map_err(|_| syntax(line, format!("expected an integer, got `{s}`")))
}

pub fn parse_surgery(text: &str) -> Result<SurgeryPresentation, CoverError> {
    let mut sp = SurgeryPresentation::default();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks.as_slice() {
            ["J", id, coeff] => {
                let c = coeff
                    .strip_prefix("coeff=")
                    .ok_or_else(|| syntax(line, "expected coeff=<p/q>"))?;
                let c = parse_rational(c).map_err(|e| syntax(line, e.to_string()))?;
                if index.contains_key(*id) {
                    return Err(syntax(line, format!("duplicate component {id}")));
                }
                index.insert(id.to_string(), sp.push(id, c));
            }
            ["lk", a, b, v] => {
                let i = *index.get(*a).ok_or_else(|| CoverError::UnknownComponent(a.to_string()))?;
                let j = *index.get(*b).ok_or_else(|| CoverError::UnknownComponent(b.to_string()))?;
                if i == j {
                    return Err(syntax(line, "self-linking is given by coeff="));
                }
                sp.set_lk(i, j, parse_int(line, v)?);
            }
            _ => return Err(syntax(line, format!("cannot parse `{content}`"))),
        }
    }
    Ok(sp)
}

/// `lk_M(K1, K2) = lk0 − v1 G⁻¹ v2ᵀ` after surgery with linking matrix `g`.
pub fn py_linking(v1: &[Rational], v2: &[Rational], lk0: &Rational, g: &SymMatrix) -> Result<Rational, LinalgError> {
    if v1.iter().all(Zero::is_zero) || v2.iter().all(Zero::is_zero) {
        if v1.len() != g.dim() || v2.len() != g.dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: g.dim(),
                got: v1.len().max(v2.len()),
            });
        }
        return Ok(lk0.clone());
    }
    Ok(lk0 - quadratic_pairing(v1, v2, g)?)
}

/// Surgery coefficient of a lifted clasp curve in the standard basis, given
/// its framing `f`: `(−sign + 2f)/2`.
pub fn clasp_surgery_coefficient(sign: i64, framing: i64) -> Rational {
    Rational::new(BigInt::from(2 * framing - sign), BigInt::from(2))
}

/// Order of the first homology of the surgered manifold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct H1Order {
    pub order: BigInt,
}

impl H1Order {
    pub fn is_odd(&self) -> bool {
        self.order.is_odd()
    }
}

/// `|det|` of the linking matrix with row `i` scaled by the denominator of `r_i`.
pub fn h1_order(sp: &SurgeryPresentation) -> Result<H1Order, LinalgError> {
    let g = sp.linking_matrix();
    let n = g.dim();
    let rows: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let scale = Rational::from_integer(sp.coeffs[i].denom().clone());
            (0..n).map(|j| g.get(i, j) * &scale).collect()
        })
        .collect();
    let det = crate::exactlinalg::determinant(&rows);
    if det.is_zero() {
        return Err(LinalgError::SingularMatrix);
    }
    Ok(H1Order {
        order: det.abs().to_integer(),
    })
}

/// `ẽ = Σ closed contributions − ℓ`, with `ℓ` the boundary linking number.
pub fn strong_euler_number(closed_contribs: &[Rational], boundary_lk: &Rational) -> Rational {
    closed_contribs.iter().cloned().sum::<Rational>() - boundary_lk
}

/// Declared lift of one clasp into the double branched cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaspLift {
    pub sign: i64,
    pub framing: i64,
    /// Linking of the lifted curve with the lifted boundary knot.
    pub lk_with_branch: i64,
    /// Color whose strong Euler number this clasp corrects.
    pub color: Option<Color>,
}

impl ClaspLift {
    pub fn coefficient(&self) -> Rational {
        clasp_surgery_coefficient(self.sign, self.framing)
    }
}

/// Everything declared about the branched-cover lifts of a movie.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LiftData {
    pub clasps: Vec<ClaspLift>,
    /// Mutual linkings of lifted clasp curves (0-based indices, `i < j`).
    pub clasp_lk: BTreeMap<(usize, usize), i64>,
    pub closed_euler: Vec<(Option<Color>, Rational)>,
    /// Linking of each color's lifted boundary knot with its parallel before surgery.
    pub boundary_lk0: BTreeMap<Color, Rational>,
}

fn parse_sign(line: usize, s: &str) -> Result<i64, CoverError> {
    match s {
        "+" | "+1" | "1" => Ok(1),
        "-" | "-1" => Ok(-1),
        _ => Err(syntax(line, format!("bad sign `{s}`"))),
    }
}

fn parse_small(line: usize, s: &str) -> Result<i64, CoverError> {
    s.parse::<i64>().map_err(|_| syntax(line, format!("expected an integer, got `{s}`")))
}

/// Parses one `clasp` record's `key=value` fields.
pub fn parse_clasp_fields(line: usize, fields: &[&str]) -> Result<ClaspLift, CoverError> {
    let mut sign = None;
    let mut framing = None;
    let mut lk = None;
    let mut color = None;
    for f in fields {
        let (k, v) = f.split_once('=').ok_or_else(|| syntax(line, format!("expected key=value, got `{f}`")))?;
        match k {
            "sign" => sign = Some(parse_sign(line, v)?),
            "framing" => framing = Some(parse_small(line, v)?),
            "lk_with_branch" | "lk" => lk = Some(parse_small(line, v)?),
            "color" => color = Some(v.parse::<Color>().map_err(|e| syntax(line, e))?),
            _ => return Err(syntax(line, format!("unknown field `{k}`"))),
        }
    }
    Ok(ClaspLift {
        sign: sign.unwrap_or(1),
        framing: framing.ok_or_else(|| syntax(line, "missing framing="))?,
        lk_with_branch: lk.ok_or_else(|| syntax(line, "missing lk_with_branch="))?,
        color,
    })
}

pub fn parse_lift(text: &str) -> Result<LiftData, CoverError> {
    let mut data = LiftData::default();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "clasp" => data.clasps.push(parse_clasp_fields(line, &toks[1..])?),
            "clasp_lk" => {
                let [_, i, j, v] = toks.as_slice() else {
                    return Err(syntax(line, "clasp_lk <i> <j> <int>"));
                };
                let (i, j) = (parse_small(line, i)?, parse_small(line, j)?);
                if i < 1 || j < 1 || i == j {
                    return Err(syntax(line, "clasp indices are distinct and 1-based"));
                }
                let (i, j) = ((i.min(j) - 1) as usize, (i.max(j) - 1) as usize);
                data.clasp_lk.insert((i, j), parse_small(line, v)?);
            }
            "closed_euler" => {
                let v = toks.get(1).ok_or_else(|| syntax(line, "closed_euler <p/q>"))?;
                let v = parse_rational(v).map_err(|e| syntax(line, e.to_string()))?;
                let mut color = None;
                for t in &toks[2..] {
                    let c = t.strip_prefix("color=").ok_or_else(|| syntax(line, format!("unexpected `{t}`")))?;
                    color = Some(c.parse::<Color>().map_err(|e| syntax(line, e))?);
                }
                data.closed_euler.push((color, v));
            }
            "boundary_lk0" => {
                let [_, v, c] = toks.as_slice() else {
                    return Err(syntax(line, "boundary_lk0 <p/q> color=<c>"));
                };
                let v = parse_rational(v).map_err(|e| syntax(line, e.to_string()))?;
                let c = c.strip_prefix("color=").ok_or_else(|| syntax(line, "expected color=<c>"))?;
                let c = c.parse::<Color>().map_err(|e| syntax(line, e))?;
                data.boundary_lk0.insert(c, v);
            }
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
    }
    Ok(data)
}

/// Strong Euler data for one color, with diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongEuler {
    pub color: Color,
    pub boundary_lk: Rational,
    pub closed_contribs: Vec<Rational>,
    pub value: Rational,
    pub h1_order: BigInt,
    pub warnings: Vec<String>,
}

impl LiftData {
    /// Surgery presentation of the double cover branched along the boundary
    /// knot of `color`, one component per clasp of that color.
    pub fn surgery_for(&self, color: Color) -> (SurgeryPresentation, Vec<usize>) {
        let picked: Vec<usize> = (0..self.clasps.len()).filter(|&i| self.clasps[i].color == Some(color)).collect();
        let mut sp = SurgeryPresentation::default();
        for &i in &picked {
            sp.push(&format!("clasp{}", i + 1), self.clasps[i].coefficient());
        }
        for (a, &i) in picked.iter().enumerate() {
            for (b, &j) in picked.iter().enumerate().skip(a + 1) {
                if let Some(v) = self.clasp_lk.get(&(i.min(j), i.max(j))) {
                    sp.set_lk(a, b, BigInt::from(*v));
                }
            }
        }
        (sp, picked)
    }

    /// Whether anything pins down the strong Euler number of `color`.
    pub fn determines(&self, color: Color) -> bool {
        self.boundary_lk0.contains_key(&color) || self.clasps.iter().any(|c| c.color == Some(color))
    }

    /// `ẽ_color` from the declared lifts plus extra closed contributions (for
    /// example clasp spheres found by the movie engine); `None` when the
    /// lift data say nothing about this color.
    pub fn strong_euler(&self, color: Color, extra_closed: &[Rational]) -> Result<Option<StrongEuler>, CoverError> {
        if !self.determines(color) {
            return Ok(None);
        }
        let (sp, picked) = self.surgery_for(color);
        let mut warnings = Vec::new();
        let v: Vec<Rational> = picked.iter().map(|&i| int(self.clasps[i].lk_with_branch)).collect();
        let lk0 = self.boundary_lk0.get(&color).cloned().unwrap_or_else(Rational::zero);
        let (boundary_lk, order) = if picked.is_empty() {
            (lk0, BigInt::one())
        } else {
            let g = sp.linking_matrix();
            (py_linking(&v, &v, &lk0, &g)?, h1_order(&sp)?.order)
        };
        if picked.len() > 1 {
            warnings.push(format!(
                "{} clasps lift to the {color}-cover; multi-clasp linking data is uncalibrated",
                picked.len()
            ));
        }
        if order.is_even() {
            warnings.push(format!("H1 of the {color}-cover has even order {order}"));
        }
        let mut closed: Vec<Rational> = extra_closed.to_vec();
        closed.extend(
            self.closed_euler
                .iter()
                .filter(|(c, _)| *c == Some(color))
                .map(|(_, v)| v.clone()),
        );
        let value = strong_euler_number(&closed, &boundary_lk);
        Ok(Some(StrongEuler {
            color,
            boundary_lk,
            closed_contribs: closed,
            value,
            h1_order: order,
            warnings,
        }))
    }

    /// Mirror image: clasp signs, framings and pre-surgery linkings change sign.
    pub fn mirror(&self) -> LiftData {
        let mut m = self.clone();
        for c in &mut m.clasps {
            c.sign = -c.sign;
            c.framing = -c.framing;
        }
        for v in m.clasp_lk.values_mut() {
            *v = -*v;
        }
        for (_, v) in &mut m.closed_euler {
            *v = -v.clone();
        }
        for v in m.boundary_lk0.values_mut() {
            *v = -v.clone();
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlinalg::rat;

    #[test]
    fn clasp_coefficients() {
        assert_eq!(clasp_surgery_coefficient(1, 1), rat(1, 2));
        assert_eq!(clasp_surgery_coefficient(1, 0), rat(-1, 2));
        assert_eq!(clasp_surgery_coefficient(-1, 0), rat(1, 2));
        assert_eq!(clasp_surgery_coefficient(1, -1), rat(-3, 2));
    }

    #[test]
    fn half_surgery_linking() {
        let g = SymMatrix::diagonal(&[rat(1, 2)]);
        assert_eq!(py_linking(&[int(3)], &[int(3)], &int(0), &g).unwrap(), int(-18));
        assert_eq!(py_linking(&[int(0)], &[int(5)], &rat(7, 3), &g).unwrap(), rat(7, 3));
        let zero = SymMatrix::diagonal(&[int(0)]);
        assert_eq!(py_linking(&[int(1)], &[int(1)], &int(0), &zero), Err(LinalgError::SingularMatrix));
    }

    #[test]
    fn h1_orders() {
        let sp = parse_surgery("J g coeff=1/2\n").unwrap();
        assert_eq!(h1_order(&sp).unwrap().order, BigInt::from(1));
        let sp = parse_surgery("J g coeff=3\n").unwrap();
        assert_eq!(h1_order(&sp).unwrap().order, BigInt::from(3));
        let sp = parse_surgery("J g coeff=0\n").unwrap();
        assert_eq!(h1_order(&sp), Err(LinalgError::SingularMatrix));
        // Hopf link with framings 2, 2: det [[2,1],[1,2]] = 3.
        let sp = parse_surgery("J x coeff=2\nJ y coeff=2\nlk x y 1\n").unwrap();
        assert_eq!(h1_order(&sp).unwrap().order, BigInt::from(3));
    }

    #[test]
    fn strong_euler_arithmetic() {
        assert_eq!(strong_euler_number(&[int(2)], &int(-18)), int(20));
        assert_eq!(strong_euler_number(&[], &int(0)), int(0));
        assert_eq!(strong_euler_number(&[int(2), int(2)], &int(4)), int(0));
    }

    #[test]
    fn lift_file_strong_euler() {
        let lift = parse_lift("clasp sign=+ framing=1 lk_with_branch=3 color=c\n").unwrap();
        let e = lift.strong_euler(Color::C, &[int(2)]).unwrap().unwrap();
        assert_eq!(e.boundary_lk, int(-18));
        assert_eq!(e.value, int(20));
        assert!(e.warnings.is_empty());
        assert_eq!(lift.strong_euler(Color::A, &[]).unwrap(), None);
        let m = lift.mirror().strong_euler(Color::C, &[int(-2)]).unwrap().unwrap();
        assert_eq!(m.value, int(-20));
    }

    #[test]
    fn lens_space_lift() {
        let lift = parse_lift("clasp sign=+ framing=-1 lk_with_branch=1 color=a\nboundary_lk0 -4 color=b\n").unwrap();
        assert_eq!(lift.strong_euler(Color::B, &[]).unwrap().unwrap().value, int(4));
        let e = lift.strong_euler(Color::A, &[int(2)]).unwrap().unwrap();
        assert_eq!(e.boundary_lk, rat(2, 3));
        assert_eq!(e.value, rat(4, 3));
        assert_eq!(e.h1_order, BigInt::from(3));
    }

    #[test]
    fn multi_clasp_is_flagged() {
        let lift = parse_lift(
            "clasp sign=+ framing=1 lk=1 color=c\nclasp sign=- framing=0 lk=1 color=c\nclasp_lk 1 2 1\n",
        )
        .unwrap();
        let e = lift.strong_euler(Color::C, &[]).unwrap().unwrap();
        assert!(e.warnings.iter().any(|w| w.contains("uncalibrated")));
        // G = [[1/2, 1], [1, 1/2]]: the entries of G⁻¹ sum to 4/3.
        assert_eq!(e.boundary_lk, rat(-4, 3));
    }
}
