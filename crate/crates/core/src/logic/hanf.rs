//! Hanf locality: capped counts of rooted ball types.
//!
//! Two structures whose radius-`3^q` ball types occur equally often, counting
//! up to `q`, agree on every sentence of quantifier depth at most `q`. The
//! test is sufficient, not necessary.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::incidence::{canonical_type, IncidenceGraph, RootedType};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereSignature {
    pub q: usize,
    pub radius: usize,
    /// Occurrences of each type over all nodes, capped at `q`.
    pub counts: BTreeMap<RootedType, usize>,
}

/// Uncapped number of nodes whose radius ball has each type (cap-`q` types).
pub fn sphere_counts(g: &IncidenceGraph, q: usize, radius: usize) -> BTreeMap<RootedType, usize> {
    let mut counts = BTreeMap::new();
    for node in g.nodes() {
        let ball = g.ball(node, radius).expect("node belongs to the graph");
        *counts.entry(canonical_type(&ball, Some(q))).or_insert(0) += 1;
    }
    counts
}

pub fn sphere_signature(g: &IncidenceGraph, q: usize, radius: usize) -> SphereSignature {
    let counts = sphere_counts(g, q, radius)
        .into_iter()
        .map(|(t, c)| (t, c.min(q)))
        .filter(|&(_, c)| c > 0)
        .collect();
    SphereSignature { q, radius, counts }
}

/// `3^q`.
pub fn hanf_radius(q: usize) -> usize {
    3usize.pow(q as u32)
}

/// Signature agreement at radius `3^q` with threshold `q`.
pub fn hanf_equivalent(g1: &IncidenceGraph, g2: &IncidenceGraph, q: usize) -> bool {
    hanf_equivalent_at(g1, g2, q, hanf_radius(q))
}

/// Signature agreement at an explicit radius, e.g. `(3^q - 1) / 2`.
pub fn hanf_equivalent_at(g1: &IncidenceGraph, g2: &IncidenceGraph, q: usize, radius: usize) -> bool {
    sphere_signature(g1, q, radius) == sphere_signature(g2, q, radius)
}
