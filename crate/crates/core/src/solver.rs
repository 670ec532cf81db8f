//! The linear relations tying sub-link signatures, Euler numbers and the
//! graph invariants together, and their exact solution.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::exactlinalg::{format_rational, parse_rational, rat, solve_linear, Rational, Solution};
use crate::kleingraph::{Color, ColorPair};

/// One named quantity of the relation system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantity {
    /// Signature of the two-colored sub-link.
    Sigma(ColorPair),
    /// Weak normal Euler number of the two-colored surface.
    Euler(ColorPair),
    /// Strong normal Euler number of the lifted branch surface.
    StrongEuler(Color),
    /// Signature of the lifted knot in the double branched cover.
    Xi(Color),
    SigmaTotal,
    SigmaTilde,
    Delta,
    DeltaPair(ColorPair),
}

impl Quantity {
    pub const ALL: [Quantity; 18] = [
        Quantity::Sigma(ColorPair::AB),
        Quantity::Sigma(ColorPair::BC),
        Quantity::Sigma(ColorPair::CA),
        Quantity::Euler(ColorPair::AB),
        Quantity::Euler(ColorPair::BC),
        Quantity::Euler(ColorPair::CA),
        Quantity::StrongEuler(Color::A),
        Quantity::StrongEuler(Color::B),
        Quantity::StrongEuler(Color::C),
        Quantity::Xi(Color::A),
        Quantity::Xi(Color::B),
        Quantity::Xi(Color::C),
        Quantity::SigmaTotal,
        Quantity::SigmaTilde,
        Quantity::Delta,
        Quantity::DeltaPair(ColorPair::AB),
        Quantity::DeltaPair(ColorPair::BC),
        Quantity::DeltaPair(ColorPair::CA),
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&q| q == self).expect("listed")
    }

    /// Quantities of the same kind may be declared equal by symmetry.
    pub fn kind(self) -> &'static str {
        match self {
            Quantity::Sigma(_) => "sigma_ij",
            Quantity::Euler(_) => "e_ij",
            Quantity::StrongEuler(_) => "e_tilde_i",
            Quantity::Xi(_) => "xi_i",
            Quantity::DeltaPair(_) => "delta_ij",
            Quantity::SigmaTotal | Quantity::SigmaTilde | Quantity::Delta => "global",
        }
    }

    /// Whether the quantity is measured from diagrams, movies or lifts
    /// (as opposed to derived through the relations).
    pub fn is_measurable(self) -> bool {
        matches!(self, Quantity::Sigma(_) | Quantity::Euler(_) | Quantity::StrongEuler(_))
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Sigma(p) => write!(f, "sigma_{p}"),
            Quantity::Euler(p) => write!(f, "e_{p}"),
            Quantity::StrongEuler(c) => write!(f, "e_tilde_{c}"),
            Quantity::Xi(c) => write!(f, "xi_{c}"),
            Quantity::SigmaTotal => f.write_str("sigma"),
            Quantity::SigmaTilde => f.write_str("sigma_tilde"),
            Quantity::Delta => f.write_str("delta"),
            Quantity::DeltaPair(p) => write!(f, "delta_{p}"),
        }
    }
}

impl FromStr for Quantity {
    type Err = SolverError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || SolverError::UnknownName(s.to_string());
        let s = s.trim();
        let pair = |p: &str| p.parse::<ColorPair>().map_err(|_| unknown());
        let color = |c: &str| c.parse::<Color>().map_err(|_| unknown());
        Ok(match s {
            "sigma" => Quantity::SigmaTotal,
            "sigma_tilde" => Quantity::SigmaTilde,
            "delta" => Quantity::Delta,
            _ => {
                if let Some(c) = s.strip_prefix("e_tilde_") {
                    Quantity::StrongEuler(color(c)?)
                } else if let Some(p) = s.strip_prefix("e_") {
                    Quantity::Euler(pair(p)?)
                } else if let Some(p) = s.strip_prefix("sigma_") {
                    Quantity::Sigma(pair(p)?)
                } else if let Some(p) = s.strip_prefix("delta_") {
                    Quantity::DeltaPair(pair(p)?)
                } else if let Some(c) = s.strip_prefix("xi_") {
                    Quantity::Xi(color(c)?)
                } else {
                    return Err(unknown());
                }
            }
        })
    }
}

/// Where an equation comes from; used to name inconsistencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relation {
    SignatureSum,
    SigmaTildeSum,
    DeltaViaXi(ColorPair),
    DeltaViaEuler(ColorPair),
    DeltaDifference,
    DeltaSum,
    Known(Quantity),
    Symmetry(Quantity, Quantity),
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::SignatureSum => f.write_str("sigma = sigma_ab + sigma_bc + sigma_ca"),
            Relation::SigmaTildeSum => f.write_str("sigma_tilde = xi_a + xi_b + xi_c"),
            Relation::DeltaViaXi(p) => {
                let (i, j) = p.colors();
                write!(f, "delta_{p} = xi_{i}/2 + xi_{j}/2 - sigma_{p}")
            }
            Relation::DeltaViaEuler(p) => {
                let (i, j) = p.colors();
                write!(f, "delta_{p} = e_tilde_{i}/4 + e_tilde_{j}/4 - e_{p}/2")
            }
            Relation::DeltaDifference => f.write_str("delta = sigma_tilde - sigma"),
            Relation::DeltaSum => f.write_str("delta = delta_ab + delta_bc + delta_ca"),
            Relation::Known(q) => write!(f, "known {q}"),
            Relation::Symmetry(p, q) => write!(f, "symmetry {p} = {q}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("unknown quantity `{0}`")]
    UnknownName(String),
    #[error("malformed relation: {0}")]
    Malformed(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// `Σ coeffs[q]·q = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
    pub relation: Relation,
}

impl Equation {
    fn new(terms: &[(Quantity, Rational)], rhs: Rational, relation: Relation) -> Equation {
        let mut coeffs = vec![Rational::zero(); Quantity::ALL.len()];
        for (q, c) in terms {
            coeffs[q.index()] += c;
        }
        Equation { coeffs, rhs, relation }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RelationSystem {
    pub equations: Vec<Equation>,
}

/// Declared inputs: known values and symmetry classes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Inputs {
    pub knowns: Vec<(Quantity, Rational)>,
    pub symmetries: Vec<Vec<Quantity>>,
}

impl Inputs {
    pub fn set(&mut self, q: Quantity, v: Rational) {
        self.knowns.retain(|(k, _)| *k != q);
        self.knowns.push((q, v));
    }

    pub fn get(&self, q: Quantity) -> Option<&Rational> {
        self.knowns.iter().rev().find(|(k, _)| *k == q).map(|(_, v)| v)
    }

    pub fn merge(&mut self, other: &Inputs) {
        self.knowns.extend(other.knowns.iter().cloned());
        self.symmetries.extend(other.symmetries.iter().cloned());
    }
}

/// The structural relations plus one equation per known value and per
/// symmetry equality.
pub fn build_relation_system(inputs: &Inputs) -> Result<RelationSystem, SolverError> {
    use Quantity::*;
    let one = Rational::one;
    let half = || rat(1, 2);
    let quarter = || rat(1, 4);
    let mut eqs = vec![Equation::new(
        &[
            (SigmaTotal, one()),
            (Sigma(ColorPair::AB), -one()),
            (Sigma(ColorPair::BC), -one()),
            (Sigma(ColorPair::CA), -one()),
        ],
        Rational::zero(),
        Relation::SignatureSum,
    )];
    eqs.push(Equation::new(
        &[
            (SigmaTilde, one()),
            (Xi(Color::A), -one()),
            (Xi(Color::B), -one()),
            (Xi(Color::C), -one()),
        ],
        Rational::zero(),
        Relation::SigmaTildeSum,
    ));
    for p in ColorPair::ALL {
        let (i, j) = p.colors();
        eqs.push(Equation::new(
            &[(DeltaPair(p), one()), (Xi(i), -half()), (Xi(j), -half()), (Sigma(p), one())],
            Rational::zero(),
            Relation::DeltaViaXi(p),
        ));
        eqs.push(Equation::new(
            &[
                (DeltaPair(p), one()),
                (StrongEuler(i), -quarter()),
                (StrongEuler(j), -quarter()),
                (Euler(p), half()),
            ],
            Rational::zero(),
            Relation::DeltaViaEuler(p),
        ));
    }
    eqs.push(Equation::new(
        &[(Delta, one()), (SigmaTilde, -one()), (SigmaTotal, one())],
        Rational::zero(),
        Relation::DeltaDifference,
    ));
    eqs.push(Equation::new(
        &[
            (Delta, one()),
            (DeltaPair(ColorPair::AB), -one()),
            (DeltaPair(ColorPair::BC), -one()),
            (DeltaPair(ColorPair::CA), -one()),
        ],
        Rational::zero(),
        Relation::DeltaSum,
    ));
    for (q, v) in &inputs.knowns {
        eqs.push(Equation::new(&[(*q, one())], v.clone(), Relation::Known(*q)));
    }
    for class in &inputs.symmetries {
        let Some((first, rest)) = class.split_first() else { continue };
        for q in rest {
            if q.kind() != first.kind() {
                return Err(SolverError::Malformed(format!("{first} and {q} are different kinds of quantity")));
            }
            if q == first {
                continue;
            }
            eqs.push(Equation::new(&[(*first, one()), (*q, -one())], Rational::zero(), Relation::Symmetry(*first, *q)));
        }
    }
    Ok(RelationSystem { equations: eqs })
}

/// Parses `known NAME = VALUE` and `symmetry NAME = NAME [= NAME ...]` lines.
pub fn parse_relations(text: &str) -> Result<Inputs, SolverError> {
    let mut inputs = Inputs::default();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |msg: String| SolverError::Syntax { line, msg };
        let (head, rest) = content.split_once(char::is_whitespace).ok_or_else(|| syntax(format!("cannot parse `{content}`")))?;
        let sides: Vec<&str> = rest.split('=').map(str::trim).collect();
        let name = |s: &str| -> Result<Quantity, SolverError> {
            if s.is_empty() || s.contains(char::is_whitespace) || s.contains(['+', '*', '/']) {
                return Err(SolverError::Malformed(format!("line {line}: `{s}` is not a quantity name")));
            }
            s.parse()
        };
        match head {
            "known" => {
                let [q, v] = sides.as_slice() else {
                    return Err(syntax("known NAME = VALUE".into()));
                };
                let v = parse_rational(v).map_err(|e| syntax(e.to_string()))?;
                inputs.knowns.push((name(q)?, v));
            }
            "symmetry" => {
                if sides.len() < 2 {
                    return Err(syntax("symmetry NAME = NAME".into()));
                }
                let class = sides.iter().map(|s| name(s)).collect::<Result<Vec<_>, _>>()?;
                if class.iter().skip(1).all(|q| *q == class[0]) {
                    return Err(SolverError::Malformed(format!("line {line}: symmetry relates a quantity only to itself")));
                }
                inputs.symmetries.push(class);
            }
            other => return Err(syntax(format!("unknown directive `{other}`"))),
        }
    }
    Ok(inputs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Solved,
    /// Some quantities are not pinned down; `closing` lists measurable
    /// quantities any one of which would determine everything.
    Underdetermined { closing: Vec<Quantity> },
    /// A combination of relations reads `0 = residual`.
    Inconsistent { witness: Vec<(Relation, Rational)>, residual: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantReport {
    /// Every quantity the relations determine.
    pub values: BTreeMap<Quantity, Rational>,
    pub undetermined: Vec<Quantity>,
    pub status: Status,
}

impl InvariantReport {
    pub fn get(&self, q: Quantity) -> Option<&Rational> {
        self.values.get(&q)
    }

    pub fn is_solved(&self) -> bool {
        self.status == Status::Solved
    }

    /// The report of the mirror image.
    pub fn negated(&self) -> InvariantReport {
        let mut r = self.clone();
        for v in r.values.values_mut() {
            *v = -v.clone();
        }
        r
    }
}

fn kernel_dim(a: &[Vec<Rational>], b: &[Rational]) -> Option<usize> {
    match solve_linear(a, b).expect("rectangular system") {
        Solution::Unique(_) => Some(0),
        Solution::Parametric { kernel, .. } => Some(kernel.len()),
        Solution::Inconsistent { .. } => None,
    }
}

pub fn solve_invariants(system: &RelationSystem) -> InvariantReport {
    let a: Vec<Vec<Rational>> = system.equations.iter().map(|e| e.coeffs.clone()).collect();
    let b: Vec<Rational> = system.equations.iter().map(|e| e.rhs.clone()).collect();
    let sol = solve_linear(&a, &b).expect("rectangular system");
    let mut values = BTreeMap::new();
    let mut undetermined = Vec::new();
    let status = match &sol {
        Solution::Inconsistent { combination, residual } => Status::Inconsistent {
            witness: combination
                .iter()
                .zip(&system.equations)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, e)| (e.relation.clone(), c.clone()))
                .collect(),
            residual: residual.clone(),
        },
        Solution::Unique(x) | Solution::Parametric { particular: x, .. } => {
            for (j, q) in Quantity::ALL.iter().enumerate() {
                if sol.is_determined(j) {
                    values.insert(*q, x[j].clone());
                } else {
                    undetermined.push(*q);
                }
            }
            if undetermined.is_empty() {
                Status::Solved
            } else {
                let closing = undetermined
                    .iter()
                    .filter(|q| q.is_measurable())
                    .filter(|q| {
                        let mut a2 = a.clone();
                        let mut row = vec![Rational::zero(); Quantity::ALL.len()];
                        row[q.index()] = Rational::one();
                        a2.push(row);
                        let mut b2 = b.clone();
                        b2.push(Rational::zero());
                        kernel_dim(&a2, &b2) == Some(0)
                    })
                    .copied()
                    .collect();
                Status::Underdetermined { closing }
            }
        }
    };
    InvariantReport {
        values,
        undetermined,
        status,
    }
}

/// Residuals of the two global identities and of both expressions for each
/// `δ_ij`, evaluated on a report's values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub pass: bool,
    /// `(relation, right side minus left side)` for every checkable relation.
    pub residuals: Vec<(Relation, Rational)>,
}

pub fn check_consistency(report: &InvariantReport) -> Verdict {
    use Quantity::*;
    let v = |q: Quantity| report.values.get(&q).cloned();
    let mut residuals = Vec::new();
    let mut push = |rel: Relation, lhs: Option<Rational>, rhs: Option<Rational>| {
        if let (Some(l), Some(r)) = (lhs, rhs) {
            residuals.push((rel, r - l));
        }
    };
    let sum = |qs: &[Quantity]| -> Option<Rational> { qs.iter().map(|&q| v(q)).sum() };
    push(
        Relation::DeltaDifference,
        v(Delta),
        v(SigmaTilde).zip(v(SigmaTotal)).map(|(t, s)| t - s),
    );
    push(
        Relation::DeltaSum,
        v(Delta),
        sum(&[DeltaPair(ColorPair::AB), DeltaPair(ColorPair::BC), DeltaPair(ColorPair::CA)]),
    );
    push(
        Relation::SignatureSum,
        v(SigmaTotal),
        sum(&[Sigma(ColorPair::AB), Sigma(ColorPair::BC), Sigma(ColorPair::CA)]),
    );
    push(Relation::SigmaTildeSum, v(SigmaTilde), sum(&[Xi(Color::A), Xi(Color::B), Xi(Color::C)]));
    for p in ColorPair::ALL {
        let (i, j) = p.colors();
        let via_xi = (|| Some(rat(1, 2) * v(Xi(i))? + rat(1, 2) * v(Xi(j))? - v(Sigma(p))?))();
        push(Relation::DeltaViaXi(p), v(DeltaPair(p)), via_xi);
        let via_e = (|| Some(rat(1, 4) * v(StrongEuler(i))? + rat(1, 4) * v(StrongEuler(j))? - rat(1, 2) * v(Euler(p))?))();
        push(Relation::DeltaViaEuler(p), v(DeltaPair(p)), via_e);
    }
    Verdict {
        pass: residuals.iter().all(|(_, r)| r.is_zero()),
        residuals,
    }
}

/// Invariants of a vertex connected sum from the two summands' reports:
/// every quantity adds.
pub fn connected_sum_report(r1: &InvariantReport, r2: &InvariantReport) -> Inputs {
    let mut inputs = Inputs::default();
    for q in Quantity::ALL.iter().filter(|q| q.is_measurable()) {
        if let (Some(x), Some(y)) = (r1.get(*q), r2.get(*q)) {
            inputs.knowns.push((*q, x + y));
        }
    }
    inputs
}

/// Human-readable table of a report.
pub fn format_report(r: &InvariantReport) -> String {
    let mut out = String::new();
    for q in Quantity::ALL {
        let v = r.values.get(&q).map_or_else(|| "?".to_string(), format_rational);
        out.push_str(&format!("{:<12} {v}\n", q.to_string()));
    }
    match &r.status {
        Status::Solved => out.push_str("status: solved\n"),
        Status::Underdetermined { closing } => {
            out.push_str("status: underdetermined\n");
            let names: Vec<String> = r.undetermined.iter().map(|q| q.to_string()).collect();
            out.push_str(&format!("free: {}\n", names.join(", ")));
            if !closing.is_empty() {
                let names: Vec<String> = closing.iter().map(|q| q.to_string()).collect();
                out.push_str(&format!("any one of these would close the system: {}\n", names.join(", ")));
            }
        }
        Status::Inconsistent { witness, residual } => {
            out.push_str(&format!("status: inconsistent (combination gives 0 = {})\n", format_rational(residual)));
            for (rel, c) in witness {
                out.push_str(&format!("  {:>6} x  {rel}\n", format_rational(c)));
            }
        }
    }
    out
}

/// Magnitude of the largest residual, for reporting.
pub fn max_residual(v: &Verdict) -> Rational {
    v.residuals.iter().map(|(_, r)| r.abs()).max().unwrap_or_else(Rational::zero)
}
