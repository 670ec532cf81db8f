//! Text format for movies.
//!
//! ```text
//! initial theta.kd
//! move r1 arc=ec side=left sign=+
//! move clasp crossing=x2 sign=+ box_to=e4 lift: framing=1 lk=3
//! final kinoshita.kd
//! ```
//!
//! A diagram may also be given inline between `initial {` (or `final {`) and
//! a line holding a single `}`.

use std::path::Path;

use super::moves::{Move, Side};
use super::{Movie, MovieError};
use crate::cover::parse_clasp_fields;
use crate::diagram::{load_diagram, GraphDiagram};
use crate::exactlinalg::{parse_rational, Rational};
use crate::kleingraph::Color;

fn syntax(line: usize, msg: impl Into<String>) -> MovieError {
    MovieError::Syntax { line, msg: msg.into() }
}

/// Splits on whitespace, keeping parenthesized groups together.
fn tokens(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0usize;
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            c if c.is_whitespace() && depth == 0 => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c if c.is_whitespace() => {}
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

struct Fields<'a> {
    line: usize,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Fields<'a> {
    fn new(line: usize, toks: &'a [String]) -> Result<Fields<'a>, MovieError> {
        let pairs = toks
            .iter()
            .map(|t| t.split_once('=').ok_or_else(|| syntax(line, format!("expected key=value, got `{t}`"))))
            .collect::<Result<_, _>>()?;
        Ok(Fields { line, pairs })
    }

    fn has(&self, key: &str) -> bool {
        self.pairs.iter().any(|(k, _)| *k == key)
    }

    fn opt(&self, key: &str) -> Option<&'a str> {
        self.pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn req(&self, key: &str) -> Result<&'a str, MovieError> {
        self.opt(key).ok_or_else(|| syntax(self.line, format!("missing {key}=")))
    }

    fn only(&self, allowed: &[&str]) -> Result<(), MovieError> {
        match self.pairs.iter().find(|(k, _)| !allowed.contains(k)) {
            Some((k, _)) => Err(syntax(self.line, format!("unexpected field `{k}`"))),
            None => Ok(()),
        }
    }

    fn id(&self, key: &str) -> Result<String, MovieError> {
        Ok(self.req(key)?.to_string())
    }

    fn tuple<const N: usize>(&self, key: &str) -> Result<[String; N], MovieError> {
        let v = self.req(key)?;
        let inner = v
            .strip_prefix('(')
            .and_then(|v| v.strip_suffix(')'))
            .ok_or_else(|| syntax(self.line, format!("{key}= takes a parenthesized list")))?;
        let items: Vec<String> = inner.split(',').map(|s| s.trim().to_string()).collect();
        items
            .try_into()
            .map_err(|_| syntax(self.line, format!("{key}= takes {N} entries")))
    }

    fn sign(&self, key: &str) -> Result<i64, MovieError> {
        match self.req(key)? {
            "+" | "+1" | "1" => Ok(1),
            "-" | "-1" => Ok(-1),
            s => Err(syntax(self.line, format!("bad sign `{s}`"))),
        }
    }

    fn side_of(&self, s: &str) -> Result<Side, MovieError> {
        match s {
            "left" | "l" => Ok(Side::Left),
            "right" | "r" => Ok(Side::Right),
            _ => Err(syntax(self.line, format!("bad side `{s}`"))),
        }
    }

    fn side(&self, key: &str) -> Result<Side, MovieError> {
        self.opt(key).map_or(Ok(Side::Left), |s| self.side_of(s))
    }

    fn sides(&self, key: &str) -> Result<[Side; 2], MovieError> {
        if !self.has(key) {
            return Ok([Side::Left, Side::Left]);
        }
        let [a, b] = self.tuple::<2>(key)?;
        Ok([self.side_of(&a)?, self.side_of(&b)?])
    }

    fn color(&self, key: &str) -> Result<Color, MovieError> {
        self.req(key)?.parse::<Color>().map_err(|e| syntax(self.line, e))
    }

    fn rational(&self, key: &str) -> Result<Option<Rational>, MovieError> {
        self.opt(key)
            .map(|v| parse_rational(v).map_err(|e| syntax(self.line, e.to_string())))
            .transpose()
    }
}

/// Parses the parameters of one `move` line (everything after `move`).
pub fn parse_move(line: usize, rest: &str) -> Result<Move, MovieError> {
    let (head, lift) = match rest.split_once("lift:") {
        Some((h, l)) => (h, Some(l)),
        None => (rest, None),
    };
    let toks = tokens(head);
    let (kind, params) = toks.split_first().ok_or_else(|| syntax(line, "missing move kind"))?;
    let f = Fields::new(line, params)?;
    if lift.is_some() && kind != "clasp" {
        return Err(syntax(line, "only clasps carry lift data"));
    }
    let m = match kind.as_str() {
        "r1" if f.has("crossing") => {
            f.only(&["crossing"])?;
            Move::R1Remove { crossing: f.id("crossing")? }
        }
        "r1" => {
            f.only(&["arc", "side", "sign"])?;
            Move::R1Add {
                arc: f.id("arc")?,
                side: f.side("side")?,
                sign: f.sign("sign")?,
            }
        }
        "r2" if f.has("crossings") => {
            f.only(&["crossings"])?;
            Move::R2Remove { crossings: f.tuple("crossings")? }
        }
        "r2" => {
            f.only(&["over", "under", "side", "other_side", "finger"])?;
            let finger_over = match f.opt("finger").unwrap_or("over") {
                "over" => true,
                "under" => false,
                s => return Err(syntax(line, format!("finger= is over or under, not `{s}`"))),
            };
            let (over, under) = (f.id("over")?, f.id("under")?);
            let (finger, target) = if finger_over { (over, under) } else { (under, over) };
            Move::R2Add {
                finger,
                target,
                side: f.side("side")?,
                target_side: f.side("other_side")?,
                finger_over,
            }
        }
        "r3" => {
            f.only(&["crossings"])?;
            Move::R3 { crossings: f.tuple("crossings")? }
        }
        "rv1" if f.has("crossing") => {
            f.only(&["crossing", "vertex"])?;
            Move::Rv1Remove {
                crossing: f.id("crossing")?,
                vertex: f.opt("vertex").map(str::to_string),
            }
        }
        "rv1" => {
            f.only(&["vertex", "slot", "sign"])?;
            let slot = f.req("slot")?.parse().map_err(|_| syntax(line, "slot= takes 0, 1 or 2"))?;
            Move::Rv1Add {
                vertex: f.id("vertex")?,
                slot,
                sign: f.sign("sign")?,
            }
        }
        "rv2" if f.has("crossings") => {
            f.only(&["vertex", "crossings"])?;
            Move::Rv2Pull {
                vertex: f.id("vertex")?,
                crossings: f.tuple("crossings")?,
            }
        }
        "rv2" => {
            f.only(&["vertex", "crossing"])?;
            Move::Rv2Push {
                vertex: f.id("vertex")?,
                crossing: f.id("crossing")?,
            }
        }
        "clasp" => {
            f.only(&["crossing", "strands", "sign", "box_to"])?;
            let sign = f.sign("sign")?;
            let lift = match lift {
                Some(l) => {
                    let toks: Vec<&str> = l.split_whitespace().collect();
                    let mut parsed = parse_clasp_fields(line, &toks).map_err(|e| syntax(line, e.to_string()))?;
                    parsed.sign = sign;
                    Some(parsed)
                }
                None => None,
            };
            let strands = if f.has("strands") { Some(f.tuple("strands")?) } else { None };
            Move::Clasp {
                crossing: f.opt("crossing").map(str::to_string),
                strands,
                sign,
                box_to: f.opt("box_to").map(str::to_string),
                lift,
            }
        }
        "unzip" => {
            f.only(&["edge"])?;
            Move::Unzip { edge: f.id("edge")? }
        }
        "zip" => {
            f.only(&["arcs", "color", "sides", "box"])?;
            Move::Zip {
                arcs: f.tuple("arcs")?,
                color: f.color("color")?,
                sides: f.sides("sides")?,
                framing: f.rational("box")?.unwrap_or_default(),
            }
        }
        "birth" => {
            f.only(&["color", "arc"])?;
            Move::Birth {
                color: f.color("color")?,
                arc: f.opt("arc").map(str::to_string),
            }
        }
        "death" => {
            f.only(&["arc"])?;
            Move::Death { arc: f.id("arc")? }
        }
        "saddle" => {
            f.only(&["arcs", "sides"])?;
            Move::Saddle {
                arcs: f.tuple("arcs")?,
                sides: f.sides("sides")?,
            }
        }
        "relabel" => {
            f.only(&["from", "to"])?;
            Move::Relabel {
                from: f.id("from")?,
                to: f.id("to")?,
            }
        }
        "transfer-box" => {
            f.only(&["from", "to", "amount"])?;
            Move::TransferBox {
                from: f.id("from")?,
                to: f.id("to")?,
                amount: f.rational("amount")?,
            }
        }
        "annotate" => {
            f.only(&["arc", "euler"])?;
            Move::Annotate {
                arc: f.id("arc")?,
                euler: f.rational("euler")?.ok_or_else(|| syntax(line, "missing euler="))?,
            }
        }
        other => return Err(syntax(line, format!("unknown move `{other}`"))),
    };
    Ok(m)
}

/// Parses a movie, reading referenced diagram files through `read`.
pub fn parse_movie_with<F>(text: &str, mut read: F) -> Result<Movie, MovieError>
where
    F: FnMut(&str) -> Result<String, String>,
{
    let mut initial: Option<GraphDiagram> = None;
    let mut final_frame = None;
    let mut moves = Vec::new();
    let mut lines = text.lines().enumerate().map(|(n, l)| (n + 1, l));
    while let Some((line, raw)) = lines.next() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        let rest = rest.trim();
        match key {
            "initial" | "final" => {
                let src = if rest == "{" {
                    let mut block = String::new();
                    loop {
                        let (_, l) = lines.next().ok_or_else(|| syntax(line, "unterminated inline diagram"))?;
                        if l.trim() == "}" {
                            break;
                        }
                        block.push_str(l);
                        block.push('\n');
                    }
                    block
                } else if rest.is_empty() {
                    return Err(syntax(line, format!("{key} needs a diagram file")));
                } else {
                    read(rest).map_err(|msg| MovieError::Io {
                        path: rest.to_string(),
                        msg,
                    })?
                };
                let d = load_diagram(&src).map_err(|e| MovieError::Diagram {
                    which: key.to_string(),
                    source: e,
                })?;
                let slot = if key == "initial" { &mut initial } else { &mut final_frame };
                if slot.replace(d).is_some() {
                    return Err(syntax(line, format!("duplicate {key}")));
                }
            }
            "move" => {
                if initial.is_none() {
                    return Err(syntax(line, "moves must follow the initial frame"));
                }
                moves.push(parse_move(line, rest)?);
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }
    let initial = initial.ok_or_else(|| syntax(0, "missing initial frame"))?;
    let movie = Movie {
        initial,
        moves,
        final_frame,
    };
    movie.check_references()?;
    Ok(movie)
}

/// Parses a movie whose diagram paths are relative to `base`.
pub fn parse_movie_in(text: &str, base: &Path) -> Result<Movie, MovieError> {
    parse_movie_with(text, |p| std::fs::read_to_string(base.join(p)).map_err(|e| e.to_string()))
}

/// Parses a movie with inline diagrams only.
pub fn parse_movie(text: &str) -> Result<Movie, MovieError> {
    parse_movie_with(text, |p| Err(format!("cannot read `{p}` without a base directory")))
}

pub fn load_movie(path: &Path) -> Result<Movie, MovieError> {
    let text = std::fs::read_to_string(path).map_err(|e| MovieError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    parse_movie_in(&text, path.parent().unwrap_or(Path::new(".")))
}

/// Text form of a movie with inline diagrams.
pub fn movie_to_text(m: &Movie) -> String {
    let mut out = String::from("initial {\n");
    out.push_str(&m.initial.to_text());
    out.push_str("}\n");
    for mv in &m.moves {
        out.push_str(&format!("move {mv}\n"));
    }
    if let Some(f) = &m.final_frame {
        out.push_str("final {\n");
        out.push_str(&f.to_text());
        out.push_str("}\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_keep_groups() {
        assert_eq!(tokens("r2 crossings=(x1, x2) a=b"), vec!["r2", "crossings=(x1,x2)", "a=b"]);
    }

    #[test]
    fn moves_round_trip_through_text() {
        let lines = [
            "r1 arc=e3 side=left sign=+",
            "r1 crossing=x1",
            "r2 over=a under=b side=right other_side=left",
            "r2 under=a over=b finger=under side=left other_side=left",
            "r2 crossings=(x1,x2)",
            "r3 crossings=(x1,x2,x3)",
            "rv1 vertex=u slot=1 sign=-",
            "rv2 vertex=u crossings=(x1,x2)",
            "clasp crossing=x sign=+ box_to=e7 lift: framing=1 lk=3 color=c",
            "clasp strands=(p,q) sign=-",
            "zip arcs=(p,q) color=c sides=(left,right) box=1/2",
            "birth color=a arc=o",
            "saddle arcs=(p,q) sides=(left,left)",
            "transfer-box from=p to=q amount=-1/2",
            "annotate arc=o euler=2",
        ];
        for l in lines {
            let m = parse_move(1, l).unwrap();
            assert_eq!(m.to_string(), l);
            assert_eq!(parse_move(1, &m.to_string()).unwrap(), m);
        }
    }

    #[test]
    fn bad_lines() {
        assert!(matches!(parse_move(4, "r1 arc=e side=up sign=+"), Err(MovieError::Syntax { line: 4, .. })));
        assert!(parse_move(1, "warp arc=e").is_err());
        assert!(parse_move(1, "unzip edge=e lift: framing=1 lk=1").is_err());
        assert!(parse_move(1, "r3 crossings=(x,y)").is_err());
    }
}
