//! Text formats for instances and solver witnesses.
//!
//! Instance:
//!
//! ```text
//! c optional comment
//! p csp <n> <d> <m> [k]
//! v1 c1 v2 c2 ... 0        (m lines, pair (v,c) is the literal x_v != c)
//! ```
//!
//! The trailing `k` is only written when the formula's width bound differs
//! from the inferred one (widest constraint, at least 2).
//!
//! Witness: `s SATISFIABLE` then `v c1 .. cn`, or `s UNSATISFIABLE`.

use std::fmt::{self, Write as _};

use thiserror::Error;

use super::{inferred_width, Assignment, Constraint, Formula, FormulaError, Literal};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("missing `p csp` header")]
    MissingHeader,
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("invalid token `{0}`")]
    InvalidToken(String),
    #[error("constraint is not terminated by 0")]
    MissingTerminator,
    #[error("literal for variable {0} has no color")]
    DanglingVariable(usize),
    #[error("unexpected tokens after the terminating 0")]
    TokensAfterTerminator,
    #[error("variable {var} out of range for n = {n}")]
    VariableOutOfRange { var: usize, n: usize },
    #[error("color {color} out of range for d = {d}")]
    ColorOutOfRange { color: u32, d: u32 },
    #[error("constraint has {width} literals, more than k = {k}")]
    TooWide { width: usize, k: usize },
    #[error("expected {expected} constraints, found {found}")]
    MissingConstraints { expected: usize, found: usize },
    #[error("trailing garbage after the last constraint")]
    TrailingGarbage,
    #[error("malformed witness: {0}")]
    MalformedWitness(String),
    #[error(transparent)]
    Invalid(#[from] FormulaError),
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn is_skippable(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t == "c" || t.starts_with("c ")
}

fn number<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| err(line, ParseErrorKind::InvalidToken(tok.to_string())))
}

struct Header {
    n: usize,
    d: u32,
    m: usize,
    k: Option<usize>,
}

fn parse_header(text: &str, line: usize) -> Result<Header, ParseError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.len() < 2 || toks[0] != "p" || toks[1] != "csp" {
        return Err(err(line, ParseErrorKind::MissingHeader));
    }
    if !(5..=6).contains(&toks.len()) {
        return Err(err(
            line,
            ParseErrorKind::MalformedHeader(format!(
                "expected `p csp <n> <d> <m> [k]`, got {} fields",
                toks.len()
            )),
        ));
    }
    let field = |i: usize, name: &str| -> Result<u64, ParseError> {
        toks[i].parse().map_err(|_| {
            err(
                line,
                ParseErrorKind::MalformedHeader(format!("{name} `{}` is not a number", toks[i])),
            )
        })
    };
    let n = field(2, "n")? as usize;
    let d = u32::try_from(field(3, "d")?)
        .map_err(|_| err(line, ParseErrorKind::MalformedHeader("d too large".into())))?;
    let m = field(4, "m")? as usize;
    let k = if toks.len() == 6 {
        Some(field(5, "k")? as usize)
    } else {
        None
    };
    if d < 2 {
        return Err(err(
            line,
            ParseErrorKind::MalformedHeader(format!("d must be at least 2, got {d}")),
        ));
    }
    if k == Some(0) {
        return Err(err(
            line,
            ParseErrorKind::MalformedHeader("k must be at least 1".into()),
        ));
    }
    Ok(Header { n, d, m, k })
}

fn parse_constraint(text: &str, line: usize, h: &Header) -> Result<Constraint, ParseError> {
    let mut toks = text.split_whitespace();
    let mut literals = Vec::new();
    loop {
        let var: usize = match toks.next() {
            Some(t) => number(t, line)?,
            None => return Err(err(line, ParseErrorKind::MissingTerminator)),
        };
        if var == 0 {
            break;
        }
        let color: u32 = match toks.next() {
            Some(t) => number(t, line)?,
            None => return Err(err(line, ParseErrorKind::DanglingVariable(var))),
        };
        if color == 0 {
            return Err(err(line, ParseErrorKind::DanglingVariable(var)));
        }
        if var > h.n {
            return Err(err(
                line,
                ParseErrorKind::VariableOutOfRange { var, n: h.n },
            ));
        }
        if color > h.d {
            return Err(err(line, ParseErrorKind::ColorOutOfRange { color, d: h.d }));
        }
        literals.push(Literal::new(var, color));
    }
    if toks.next().is_some() {
        return Err(err(line, ParseErrorKind::TokensAfterTerminator));
    }
    if let Some(k) = h.k {
        if literals.len() > k {
            return Err(err(
                line,
                ParseErrorKind::TooWide {
                    width: literals.len(),
                    k,
                },
            ));
        }
    }
    Ok(Constraint::new(literals))
}

/// Parses an instance file, keeping constraint and literal order.
pub fn parse_instance(text: &str) -> Result<Formula, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut last_line = 0;
    let header = loop {
        match lines.next() {
            Some((no, l)) => {
                last_line = no;
                if !is_skippable(l) {
                    break parse_header(l, no)?;
                }
            }
            None => return Err(err(last_line.max(1), ParseErrorKind::MissingHeader)),
        }
    };
    let header_line = last_line;
    let mut constraints = Vec::with_capacity(header.m);
    for (no, l) in lines {
        last_line = no;
        if is_skippable(l) {
            continue;
        }
        if constraints.len() == header.m {
            return Err(err(no, ParseErrorKind::TrailingGarbage));
        }
        constraints.push(parse_constraint(l, no, &header)?);
    }
    if constraints.len() < header.m {
        return Err(err(
            last_line,
            ParseErrorKind::MissingConstraints {
                expected: header.m,
                found: constraints.len(),
            },
        ));
    }
    let k = header.k.unwrap_or_else(|| inferred_width(&constraints));
    Formula::new(header.n, header.d, k, constraints).map_err(|e| err(header_line, e.into()))
}

/// Writes the instance format; `parse_instance` inverts it exactly.
pub fn serialize_instance(f: &Formula) -> String {
    let mut out = String::new();
    write!(out, "p csp {} {} {}", f.num_vars(), f.num_colors(), f.len()).unwrap();
    if f.width() != inferred_width(f.constraints()) {
        write!(out, " {}", f.width()).unwrap();
    }
    out.push('\n');
    for c in f.constraints() {
        for lit in &c.literals {
            write!(out, "{} {} ", lit.var, lit.color).unwrap();
        }
        out.push_str("0\n");
    }
    out
}

/// Solver answer as printed on standard output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Satisfiable(Assignment),
    Unsatisfiable,
    /// A randomized search that gave up; not a proof of anything.
    Unknown,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Satisfiable(a) if a.is_empty() => writeln!(f, "s SATISFIABLE\nv"),
            Witness::Satisfiable(a) => writeln!(f, "s SATISFIABLE\nv {a}"),
            Witness::Unsatisfiable => writeln!(f, "s UNSATISFIABLE"),
            Witness::Unknown => writeln!(f, "s UNKNOWN"),
        }
    }
}

pub fn format_witness(w: &Witness) -> String {
    w.to_string()
}

pub fn parse_witness(text: &str) -> Result<Witness, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !is_skippable(l));
    let malformed =
        |line: usize, msg: &str| err(line, ParseErrorKind::MalformedWitness(msg.into()));
    let (no, status) = lines.next().ok_or_else(|| malformed(1, "empty"))?;
    let witness = match status {
        "s UNSATISFIABLE" => Witness::Unsatisfiable,
        "s UNKNOWN" => Witness::Unknown,
        "s SATISFIABLE" => {
            let (vno, values) = lines
                .next()
                .ok_or_else(|| malformed(no, "missing `v` line"))?;
            let mut toks = values.split_whitespace();
            if toks.next() != Some("v") {
                return Err(malformed(vno, "expected `v` line"));
            }
            let colors = toks
                .map(|t| number::<u32>(t, vno))
                .collect::<Result<Vec<_>, _>>()?;
            Witness::Satisfiable(Assignment::new(colors))
        }
        _ => return Err(malformed(no, "unknown status line")),
    };
    if let Some((extra, _)) = lines.next() {
        return Err(err(extra, ParseErrorKind::TrailingGarbage));
    }
    Ok(witness)
}
