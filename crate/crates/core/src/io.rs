//! Chain files, grid-function files and line-oriented reports.
//!
//! Chain files are JSON documents:
//!
//! ```json
//! {
//!   "ambient_dim": 2,
//!   "dim": 1,
//!   "group": "circle",
//!   "complex": { "type": "kuhn", "n": 2 },
//!   "simplices": [ { "vertices": [["0", "0"], ["1/2", "0"]], "coeff": "1/2" } ]
//! }
//! ```
//!
//! Coordinates and coefficients are rational strings (`p/q`, integers or
//! finite decimals); integer coefficients may also be JSON numbers. The
//! optional `complex` marks a chain living on the Kuhn grid of resolution `n`.
//!
//! A grid-function file starts with `d n` followed by `n^d` rationals in
//! row-major order; `#` starts a comment. The function is zero outside
//! `[0,1]^d`.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chains::PolyChain;
use crate::coarea::GridFunction;
use crate::error::{Error, Result};
use crate::geometry::Simplex;
use crate::grid::GridComplex;
use crate::groups::GroupTag;
use crate::{parse_rational, Rational};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainDoc {
    ambient_dim: usize,
    dim: usize,
    group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    complex: Option<ComplexDoc>,
    simplices: Vec<SimplexDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexDoc {
    #[serde(rename = "type")]
    kind: String,
    n: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimplexDoc {
    vertices: Vec<Vec<String>>,
    coeff: CoeffDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffDoc {
    Int(i64),
    Text(String),
}

/// Parse a chain file. Errors carry the JSON line and column or the index
/// of the offending simplex.
pub fn parse_chain(text: &str) -> Result<PolyChain> {
    let doc: ChainDoc = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    let group: GroupTag = doc.group.parse()?;
    let mut chain = PolyChain::zero(group, doc.ambient_dim, doc.dim);
    for (i, s) in doc.simplices.iter().enumerate() {
        let at = |e: Error| Error::Parse(format!("simplices[{i}]: {e}"));
        let vertices = s
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(at)?;
        let simplex = Simplex::new(vertices).map_err(at)?;
        let coeff = match &s.coeff {
            CoeffDoc::Int(v) => Rational::from_integer((*v).into()),
            CoeffDoc::Text(t) => parse_rational(t).map_err(at)?,
        };
        chain.push(simplex, coeff).map_err(at)?;
    }
    match doc.complex {
        None => Ok(chain),
        Some(c) if c.kind == "kuhn" => chain.on_grid(&GridComplex::kuhn(doc.ambient_dim, c.n)?),
        Some(c) => Err(Error::Parse(format!("unknown complex type {:?}", c.kind))),
    }
}

/// Serialize a chain; `parse_chain(&emit_chain(c)) == c`.
pub fn emit_chain(c: &PolyChain) -> String {
    let doc = ChainDoc {
        ambient_dim: c.ambient_dim(),
        dim: c.dim(),
        group: c.group().to_string(),
        complex: c.grid().map(|g| ComplexDoc {
            kind: "kuhn".into(),
            n: g.n,
        }),
        simplices: c
            .terms()
            .map(|(s, g)| SimplexDoc {
                vertices: s
                    .vertices()
                    .iter()
                    .map(|v| v.iter().map(ToString::to_string).collect())
                    .collect(),
                coeff: CoeffDoc::Text(g.to_string()),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("chain documents always serialize");
    out.push('\n');
    out
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_chain(path: &Path) -> Result<PolyChain> {
    parse_chain(&read_text(path)?).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write_chain(path: &Path, c: &PolyChain) -> Result<()> {
    write_text(path, &emit_chain(c))
}

/// Parse `d n` followed by `n^d` rationals.
pub fn parse_grid_function(text: &str) -> Result<GridFunction> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    let mut header = |what: &str| -> Result<usize> {
        let t = tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what} in grid-function header")))?;
        t.parse()
            .map_err(|_| Error::Parse(format!("{what} = {t:?} is not a nonnegative integer")))
    };
    let d = header("d")?;
    let n = header("n")?;
    let values = tokens
        .enumerate()
        .map(|(i, t)| parse_rational(t).map_err(|e| Error::Parse(format!("value {i}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(d, n, values)
}

pub fn emit_grid_function(u: &GridFunction) -> String {
    let mut out = format!("{} {}\n", u.d(), u.n());
    for row in u.values().chunks(u.n()) {
        let line: Vec<String> = row.iter().map(ToString::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// `key = value` lines closed by a `VERDICT` line.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    lines: Vec<(String, String)>,
    checks: Vec<(String, bool)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.lines.push((key.into(), value.to_string()));
    }

    pub fn extend(&mut self, lines: impl IntoIterator<Item = (String, String)>) {
        self.lines.extend(lines);
    }

    /// Record an asserted bound; the verdict passes only if all checks do.
    pub fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push((name.into(), ok));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(out, "{k} = {v}");
        }
        for (k, ok) in &self.checks {
            let _ = writeln!(out, "check.{k} = {}", if *ok { "PASS" } else { "FAIL" });
        }
        let _ = writeln!(out, "VERDICT = {}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}
