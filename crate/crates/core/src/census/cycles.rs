//! Cycle counts by length.

use std::collections::BTreeMap;

use crate::incidence::IncidenceGraph;

/// Cycles of the bipartite multigraph by node count, up to
/// `max_cycle_nodes`. A pair joined by `M` parallel ∈-edges contributes
/// `C(M, 2)` cycles of size 2; longer cycles are weighted by the product of
/// their multiplicities.
pub fn unicyclic_cycle_census(g: &IncidenceGraph, max_cycle_nodes: usize) -> BTreeMap<usize, u64> {
    let mut out = BTreeMap::new();
    if max_cycle_nodes >= 2 {
        let twos: u64 = g
            .incidences()
            .iter()
            .map(|t| t.2 as u64 * (t.2 as u64 - 1) / 2)
            .sum();
        if twos > 0 {
            out.insert(2, twos);
        }
    }
    let n = g.n_nodes();
    let adj: Vec<Vec<(usize, u64)>> = (0..n)
        .map(|i| g.neighbors(g.node(i)).map(|(y, k)| (g.index(y), k as u64)).collect())
        .collect();
    let mut on_path = vec![false; n];
    let mut path = Vec::new();
    // Each cycle is found from its smallest node, once per direction.
    let mut twice: BTreeMap<usize, u64> = BTreeMap::new();
    for s in 0..n {
        on_path[s] = true;
        path.push(s);
        extend(s, s, 1, &adj, max_cycle_nodes, &mut on_path, &mut path, &mut twice);
        path.pop();
        on_path[s] = false;
    }
    for (len, c) in twice {
        *out.entry(len).or_default() += c / 2;
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn extend(
    start: usize,
    at: usize,
    weight: u64,
    adj: &[Vec<(usize, u64)>],
    max: usize,
    on_path: &mut [bool],
    path: &mut Vec<usize>,
    found: &mut BTreeMap<usize, u64>,
) {
    for &(y, k) in &adj[at] {
        if y == start && path.len() >= 4 {
            *found.entry(path.len()).or_default() += weight * k;
        } else if y > start && !on_path[y] && path.len() < max {
            on_path[y] = true;
            path.push(y);
            extend(start, y, weight * k, adj, max, on_path, path, found);
            path.pop();
            on_path[y] = false;
        }
    }
}
