//! Plain-text file formats for germs, curves and maps. Every rational is
//! written as `num/den`, so files round-trip bit-exactly.
//!
//! ```text
//! phi k=4 W=12            map k=4 W=12          curve order=3
//! 4 0 0 1/16 0/1          f 1 0 1/1 0/1         z 1 0/1 1/1
//! 3 1 0 1/4 0/1           g 0 1 1/1 0/1         w 1 1/1 0/1
//! ```
//!
//! Germ lines are `a b m re im` (coefficient of `z^a z̄^b u^m`, or `w̄^m` for
//! `theta`); map lines are `f|g a m re im` (coefficient of `z^a w^m`); curve
//! lines are `z|w j re im` (coefficient of `t^j`). `#` starts a comment.

use std::collections::BTreeMap;

use crate::curve::CurveJet;
use crate::error::{Error, Result};
use crate::map::MapJet;
use crate::scalar::{parse_rational, Scalar};
use crate::series::{Grading, MultiIndex, Vars, WSeries};
use crate::surface::{theta_to_phi, GermPhi, GermTheta};

/// A parsed germ file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GermFile {
    Phi(GermPhi),
    Theta(GermTheta),
}

impl GermFile {
    /// The real defining function, converting from `Θ` when necessary.
    pub fn to_phi(&self) -> Result<GermPhi> {
        match self {
            GermFile::Phi(g) => Ok(g.clone()),
            GermFile::Theta(t) => theta_to_phi(t),
        }
    }
}

struct Line<'a> {
    number: usize,
    text: &'a str,
    tokens: Vec<(usize, &'a str)>,
}

impl<'a> Line<'a> {
    fn err(&self, col: usize, msg: impl std::fmt::Display) -> Error {
        Error::Parse(format!("line {}, column {}: {msg}", self.number, col))
    }

    fn err_at(&self, token: usize, msg: impl std::fmt::Display) -> Error {
        let col = self.tokens.get(token).map(|t| t.0).unwrap_or(self.text.len() + 1);
        self.err(col, msg)
    }

    fn expect_len(&self, n: usize) -> Result<()> {
        if self.tokens.len() != n {
            return Err(self.err_at(self.tokens.len().min(n), format!("expected {n} fields, found {}", self.tokens.len())));
        }
        Ok(())
    }

    fn uint(&self, i: usize) -> Result<u32> {
        self.tokens[i].1.parse::<u32>().map_err(|_| self.err_at(i, format!("expected a nonnegative integer, found `{}`", self.tokens[i].1)))
    }

    fn rational(&self, i: usize) -> Result<crate::scalar::Rational> {
        parse_rational(self.tokens[i].1).map_err(|e| self.err_at(i, e.to_string().trim_start_matches("parse error: ")))
    }

    fn scalar(&self, i: usize) -> Result<Scalar> {
        Ok(Scalar::new(self.rational(i)?, self.rational(i + 1)?))
    }

    /// `key=<uint>` at token `i`.
    fn keyed(&self, i: usize, key: &str) -> Result<u32> {
        let tok = self.tokens.get(i).ok_or_else(|| self.err_at(i, format!("missing `{key}=`")))?.1;
        let v = tok.strip_prefix(key).and_then(|r| r.strip_prefix('=')).ok_or_else(|| self.err_at(i, format!("expected `{key}=<int>`, found `{tok}`")))?;
        v.parse::<u32>().map_err(|_| self.err_at(i, format!("bad value in `{tok}`")))
    }
}

/// Splits into non-empty, comment-stripped lines with 1-based columns.
fn lines(src: &str) -> Vec<Line<'_>> {
    src.lines()
        .enumerate()
        .filter_map(|(n, raw)| {
            let text = raw.split('#').next().unwrap_or("");
            let mut tokens = vec![];
            let mut start = None;
            for (i, ch) in text.char_indices() {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some(i),
                    (true, Some(s)) => {
                        tokens.push((s + 1, &text[s..i]));
                        start = None;
                    }
                    _ => {}
                }
            }
            if let Some(s) = start {
                tokens.push((s + 1, &text[s..]));
            }
            (!tokens.is_empty()).then_some(Line { number: n + 1, text, tokens })
        })
        .collect()
}

fn header<'a>(ls: &'a [Line<'a>], what: &str) -> Result<&'a Line<'a>> {
    ls.first().ok_or_else(|| Error::Parse(format!("line 1, column 1: empty {what} file")))
}

fn grading(line: &Line<'_>, k: u32) -> Result<Grading> {
    Grading::new(k).map_err(|e| line.err_at(1, e))
}

/// Parses a germ file.
pub fn parse_germ(src: &str) -> Result<GermFile> {
    let ls = lines(src);
    let head = header(&ls, "germ")?;
    let vars = match head.tokens[0].1 {
        "phi" => Vars::Phi,
        "theta" => Vars::Theta,
        other => return Err(head.err_at(0, format!("expected `phi` or `theta`, found `{other}`"))),
    };
    head.expect_len(3)?;
    let k = head.keyed(1, "k")?;
    let w = head.keyed(2, "W")?;
    let g = grading(head, k)?;
    let mut terms: BTreeMap<MultiIndex, Scalar> = BTreeMap::new();
    for line in &ls[1..] {
        line.expect_len(5)?;
        let idx = MultiIndex::new(line.uint(0)?, line.uint(1)?, line.uint(2)?);
        if g.weight(&idx) > w {
            return Err(line.err_at(0, format!("term of weight {} exceeds W={w}", g.weight(&idx))));
        }
        let c = line.scalar(3)?;
        if terms.insert(idx, c).is_some() {
            return Err(line.err_at(0, format!("duplicate index {} {} {}", idx.a, idx.b, idx.m)));
        }
    }
    let s = WSeries::from_terms(g, w, vars, terms.into_iter().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i.a, i.b, i.m, c)));
    let at_head = |e: Error| Error::Parse(format!("line {}, column 1: {e}", head.number));
    Ok(match vars {
        Vars::Phi => GermFile::Phi(GermPhi::new(s).map_err(at_head)?),
        _ => GermFile::Theta(GermTheta::new(s).map_err(at_head)?),
    })
}

fn write_terms(out: &mut String, s: &WSeries) {
    for (i, c) in s.terms() {
        out.push_str(&format!("{} {} {} {}\n", i.a, i.b, i.m, c.to_file_string()));
    }
}

pub fn write_germ_phi(g: &GermPhi) -> String {
    let mut out = format!("phi k={} W={}\n", g.k(), g.trunc());
    write_terms(&mut out, g.series());
    out
}

pub fn write_germ_theta(g: &GermTheta) -> String {
    let mut out = format!("theta k={} W={}\n", g.k(), g.trunc());
    write_terms(&mut out, g.series());
    out
}

pub fn write_germ(g: &GermFile) -> String {
    match g {
        GermFile::Phi(p) => write_germ_phi(p),
        GermFile::Theta(t) => write_germ_theta(t),
    }
}

/// Parses a curve file.
pub fn parse_curve(src: &str) -> Result<CurveJet> {
    let ls = lines(src);
    let head = header(&ls, "curve")?;
    if head.tokens[0].1 != "curve" {
        return Err(head.err_at(0, format!("expected `curve`, found `{}`", head.tokens[0].1)));
    }
    head.expect_len(2)?;
    let order = head.keyed(1, "order")? as usize;
    let mut alpha = vec![Scalar::zero(); order + 1];
    let mut beta = vec![Scalar::zero(); order + 1];
    let mut seen = std::collections::BTreeSet::new();
    for line in &ls[1..] {
        line.expect_len(4)?;
        let var = line.tokens[0].1;
        let j = line.uint(1)? as usize;
        if j > order {
            return Err(line.err_at(1, format!("power {j} exceeds order={order}")));
        }
        let c = line.scalar(2)?;
        let slot = match var {
            "z" => &mut alpha,
            "w" => &mut beta,
            other => return Err(line.err_at(0, format!("expected `z` or `w`, found `{other}`"))),
        };
        if !seen.insert((var, j)) {
            return Err(line.err_at(0, format!("duplicate coefficient {var} {j}")));
        }
        slot[j] = c;
    }
    CurveJet::new(alpha, beta).map_err(|e| Error::Parse(format!("line {}, column 1: {e}", head.number)))
}

pub fn write_curve(c: &CurveJet) -> String {
    let mut out = format!("curve order={}\n", c.degree());
    for (name, v) in [("z", &c.alpha), ("w", &c.beta)] {
        for (j, x) in v.iter().enumerate() {
            if !x.is_zero() {
                out.push_str(&format!("{name} {j} {}\n", x.to_file_string()));
            }
        }
    }
    out
}

/// Parses a map file.
pub fn parse_map(src: &str) -> Result<MapJet> {
    let ls = lines(src);
    let head = header(&ls, "map")?;
    if head.tokens[0].1 != "map" {
        return Err(head.err_at(0, format!("expected `map`, found `{}`", head.tokens[0].1)));
    }
    head.expect_len(3)?;
    let k = head.keyed(1, "k")?;
    let w = head.keyed(2, "W")?;
    let g = grading(head, k)?;
    let mut f_terms = BTreeMap::new();
    let mut g_terms = BTreeMap::new();
    for line in &ls[1..] {
        line.expect_len(5)?;
        let comp = match line.tokens[0].1 {
            "f" => &mut f_terms,
            "g" => &mut g_terms,
            other => return Err(line.err_at(0, format!("expected `f` or `g`, found `{other}`"))),
        };
        let idx = MultiIndex::new(line.uint(1)?, 0, line.uint(2)?);
        if g.weight(&idx) > w {
            return Err(line.err_at(1, format!("term of weight {} exceeds W={w}", g.weight(&idx))));
        }
        if comp.insert(idx, line.scalar(3)?).is_some() {
            return Err(line.err_at(0, format!("duplicate coefficient {} {} {}", line.tokens[0].1, idx.a, idx.m)));
        }
    }
    let series = |t: BTreeMap<MultiIndex, Scalar>| WSeries::from_terms(g, w, Vars::Map, t.into_iter().map(|(i, c)| (i.a, 0, i.m, c)));
    MapJet::new(series(f_terms), series(g_terms)).map_err(|e| Error::Parse(format!("line {}, column 1: {e}", head.number)))
}

pub fn write_map(m: &MapJet) -> String {
    let mut out = format!("map k={} W={}\n", m.k(), m.trunc());
    for (name, s) in [("f", &m.f), ("g", &m.g)] {
        for (i, c) in s.terms() {
            out.push_str(&format!("{name} {} {} {}\n", i.a, i.m, c.to_file_string()));
        }
    }
    out
}
