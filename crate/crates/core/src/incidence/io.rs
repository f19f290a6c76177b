//! Text and JSON formats for incidence graphs.
//!
//! Text: a header line `n_v n_e m`, then one `v e` line per ∈-edge
//! (0-indexed, repeated for multiplicity). Blank lines and `#` comments are
//! ignored.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IncidenceGraph;
use crate::error::{Error, Result};

/// JSON mirror of the text format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceFile {
    pub n_v: usize,
    pub n_e: usize,
    pub m: usize,
    pub inc: Vec<(usize, usize)>,
}

impl From<&IncidenceGraph> for IncidenceFile {
    fn from(g: &IncidenceGraph) -> Self {
        IncidenceFile {
            n_v: g.n_v(),
            n_e: g.n_e(),
            m: g.m(),
            inc: g.pairs().collect(),
        }
    }
}

impl IncidenceFile {
    pub fn into_graph(self) -> Result<IncidenceGraph> {
        if self.inc.len() != self.m {
            return Err(Error::InvalidGraph(format!(
                "header declares {} ∈-edges but {} are listed",
                self.m,
                self.inc.len()
            )));
        }
        IncidenceGraph::new(self.n_v, self.n_e, self.inc)
    }
}

pub fn to_text(g: &IncidenceGraph) -> String {
    let mut out = format!("{} {} {}\n", g.n_v(), g.n_e(), g.m());
    for (v, e) in g.pairs() {
        out.push_str(&format!("{v} {e}\n"));
    }
    out
}

fn parse_lines(text: &str) -> Result<(usize, usize, Vec<(usize, usize)>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse("line 1", "missing header `n_v n_e m`"))?;
    let nums = |line: usize, s: &str, want: usize| -> Result<Vec<usize>> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        if parts.len() != want {
            return Err(Error::parse(
                format!("line {line}"),
                format!("expected {want} integers, found {}", parts.len()),
            ));
        }
        parts
            .iter()
            .map(|p| {
                p.parse::<usize>()
                    .map_err(|e| Error::parse(format!("line {line}"), format!("`{p}`: {e}")))
            })
            .collect()
    };
    let h = nums(hline, header, 3)?;
    let (n_v, n_e, m) = (h[0], h[1], h[2]);
    let mut pairs = Vec::with_capacity(m);
    for (line, s) in lines {
        let p = nums(line, s, 2)?;
        pairs.push((p[0], p[1]));
    }
    if pairs.len() != m {
        return Err(Error::parse(
            format!("line {hline}"),
            format!("header declares {m} ∈-edges but {} are listed", pairs.len()),
        ));
    }
    Ok((n_v, n_e, pairs))
}

/// Parses an incidence graph; every edge node needs degree ≥ 2.
pub fn parse_text(text: &str) -> Result<IncidenceGraph> {
    let (n_v, n_e, pairs) = parse_lines(text)?;
    IncidenceGraph::new(n_v, n_e, pairs)
}

/// Parses a fragment (no edge-size constraint).
pub fn parse_fragment_text(text: &str) -> Result<IncidenceGraph> {
    let (n_v, n_e, pairs) = parse_lines(text)?;
    IncidenceGraph::fragment(n_v, n_e, pairs)
}

/// Reads `.json` files as [`IncidenceFile`] and anything else as text.
pub fn read_file(path: &Path) -> Result<IncidenceGraph> {
    let text = fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        let file: IncidenceFile = serde_json::from_str(&text)?;
        file.into_graph()
    } else {
        parse_text(&text)
    }
}

pub fn write_file(path: &Path, g: &IncidenceGraph) -> Result<()> {
    if path.extension().is_some_and(|e| e == "json") {
        fs::write(path, serde_json::to_string_pretty(&IncidenceFile::from(g))?)?;
    } else {
        fs::write(path, to_text(g))?;
    }
    Ok(())
}
