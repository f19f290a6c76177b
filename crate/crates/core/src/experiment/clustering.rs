//! Local clustering in the vertex graph (`a ∼ b` when `a` and `b` share an
//! edge node).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::degree_model::LimitDistribution;
use crate::incidence::IncidenceGraph;
use crate::Result;

/// Counts behind `C(v)` for one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalClustering {
    /// Distinct vertices sharing an edge node with `v`.
    pub neighbours: usize,
    /// `M(v)`: pairs of distinct neighbours.
    pub pairs: u64,
    /// `M'(v)`: neighbour pairs that share an edge node.
    pub connected: u64,
    /// `Σ_{e ∋ v} (|e| - 1)` over distinct incident edge nodes.
    pub formula_m: u64,
    /// `Σ_{e ∋ v} C(|e| - 1, 2)`.
    pub formula_connected: u64,
}

fn choose2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

impl LocalClustering {
    /// `M'(v) / M(v)`, or `None` for vertices with fewer than two neighbours.
    pub fn set_value(&self) -> Option<f64> {
        (self.pairs > 0).then(|| self.connected as f64 / self.pairs as f64)
    }

    /// The per-edge formula, counting neighbours with multiplicity over
    /// incident edge nodes.
    pub fn formula_value(&self) -> Option<f64> {
        let pairs = choose2(self.formula_m);
        (pairs > 0).then(|| self.formula_connected as f64 / pairs as f64)
    }
}

pub fn local_clustering(g: &IncidenceGraph, v: usize) -> LocalClustering {
    let mut neighbours: Vec<usize> = g
        .v_neighbors(v)
        .iter()
        .flat_map(|&(e, _)| g.e_neighbors(e).iter().map(|&(u, _)| u))
        .filter(|&u| u != v)
        .collect();
    neighbours.sort_unstable();
    neighbours.dedup();
    let member: HashSet<usize> = neighbours.iter().copied().collect();
    let mut connected: HashSet<(usize, usize)> = HashSet::new();
    for &a in &neighbours {
        for &(e, _) in g.v_neighbors(a) {
            for &(b, _) in g.e_neighbors(e) {
                if b > a && member.contains(&b) {
                    connected.insert((a, b));
                }
            }
        }
    }
    let (mut formula_m, mut formula_connected) = (0, 0);
    for &(e, _) in g.v_neighbors(v) {
        let others = g.e_neighbors(e).len() as u64 - 1;
        formula_m += others;
        formula_connected += choose2(others);
    }
    let k = neighbours.len() as u64;
    LocalClustering {
        neighbours: neighbours.len(),
        pairs: choose2(k),
        connected: connected.len() as u64,
        formula_m,
        formula_connected,
    }
}

/// Averages over the vertices of one graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusteringSummary {
    /// Mean set-based `C(v)` over included vertices.
    pub mean_set: Option<f64>,
    /// Mean formula value over vertices where it is defined.
    pub mean_formula: Option<f64>,
    pub included: usize,
    /// Vertices with fewer than two distinct neighbours.
    pub excluded: usize,
}

pub fn clustering_study(g: &IncidenceGraph) -> ClusteringSummary {
    let (mut set_sum, mut included, mut excluded) = (0.0, 0, 0);
    let (mut formula_sum, mut formula_count) = (0.0, 0usize);
    for v in 0..g.n_v() {
        let c = local_clustering(g, v);
        match c.set_value() {
            Some(x) => {
                set_sum += x;
                included += 1;
            }
            None => excluded += 1,
        }
        if let Some(x) = c.formula_value() {
            formula_sum += x;
            formula_count += 1;
        }
    }
    ClusteringSummary {
        mean_set: (included > 0).then(|| set_sum / included as f64),
        mean_formula: (formula_count > 0).then(|| formula_sum / formula_count as f64),
        included,
        excluded,
    }
}

/// Reference value `E dᵛ · E C(X, 2) / E C(M, 2)`, where `X` is the
/// size-biased edge size minus one and `M` is a sum of `dᵛ` independent
/// copies of `X`.
pub fn reference_clustering(vdist: &LimitDistribution, edist: &LimitDistribution) -> Result<f64> {
    let x = edist.size_biased()?;
    let (ex, ex2) = (x.mean()?, x.raw_moment(2)?);
    let (ed, ed2) = (vdist.mean()?, vdist.raw_moment(2)?);
    let numerator = ed * x.falling_moment(2)? / 2.0;
    let em = ed * ex;
    let em2 = ed * (ex2 - ex * ex) + ed2 * ex * ex;
    let denominator = (em2 - em) / 2.0;
    Ok(if denominator > 0.0 { numerator / denominator } else { 0.0 })
}
