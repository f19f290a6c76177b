//! Canonical forms for (rooted) incidence fragments.
//!
//! Hanging trees are peeled off and encoded AHU-style; what remains (the
//! root for trees, otherwise the 2-core plus the path to the root) is
//! canonised by colour refinement and individualisation. Sides are always
//! preserved.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{IncidenceGraph, Node, RootedBall, Side};

/// Isomorphism class of a rooted ball.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootedType {
    pub canonical_key: Vec<u8>,
    pub is_tree: bool,
    pub excess: i64,
}

impl RootedType {
    pub fn key_hex(&self) -> String {
        self.canonical_key.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Type of a ball. With `cap = Some(q)`, sibling hanging subtrees of equal
/// type beyond `q` copies are dropped before canonisation.
pub fn canonical_type(ball: &RootedBall, cap: Option<usize>) -> RootedType {
    let g = &ball.subgraph;
    RootedType {
        canonical_key: canonical_form(g, Some(ball.root), cap),
        is_tree: g.is_connected() && g.excess() == -1,
        excess: g.excess(),
    }
}

/// Isomorphism-invariant bytes for `g`, optionally rooted and capped.
pub fn canonical_form(g: &IncidenceGraph, root: Option<Node>, cap: Option<usize>) -> Vec<u8> {
    canonical_form_labeled(g, root, None, cap)
}

/// As [`canonical_form`], additionally preserving a per-node label (indexed
/// by dense node index).
pub fn canonical_form_labeled(
    g: &IncidenceGraph,
    root: Option<Node>,
    labels: Option<&[u64]>,
    cap: Option<usize>,
) -> Vec<u8> {
    let mut canon = Canon::new(g, labels, cap);
    let comps = g.components();
    if comps.len() == 1 {
        return canon.component_key(&comps[0], root);
    }
    let mut rooted = None;
    let mut others = Vec::new();
    for comp in &comps {
        let r = root.filter(|r| comp.contains(r));
        let key = canon.component_key(comp, r);
        if r.is_some() {
            rooted = Some(key);
        } else {
            others.push(key);
        }
    }
    others.sort();
    let mut out = vec![b'M'];
    if let Some(key) = rooted {
        out.push(b'r');
        push_block(&mut out, &key);
    }
    for key in others {
        push_block(&mut out, &key);
    }
    out
}

fn push_block(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
    out.extend_from_slice(bytes);
}

struct Canon<'a> {
    g: &'a IncidenceGraph,
    labels: Option<&'a [u64]>,
    cap: Option<usize>,
    rem: Vec<usize>,
    alive: Vec<bool>,
    hanging: Vec<Vec<Vec<u8>>>,
}

impl<'a> Canon<'a> {
    fn new(g: &'a IncidenceGraph, labels: Option<&'a [u64]>, cap: Option<usize>) -> Self {
        let n = g.n_nodes();
        Canon {
            g,
            labels,
            cap,
            rem: vec![0; n],
            alive: vec![false; n],
            hanging: vec![Vec::new(); n],
        }
    }

    fn code(&mut self, idx: usize, is_root: bool) -> Vec<u8> {
        let node = self.g.node(idx);
        let mut children = std::mem::take(&mut self.hanging[idx]);
        children.sort_unstable();
        if let Some(q) = self.cap {
            let mut kept: Vec<Vec<u8>> = Vec::with_capacity(children.len());
            let mut run = 0;
            for c in children {
                if kept.last() == Some(&c) {
                    run += 1;
                } else {
                    run = 1;
                }
                if run <= q {
                    kept.push(c);
                }
            }
            children = kept;
        }
        let mut out = vec![b'('];
        if is_root {
            out.push(b'*');
        }
        out.push(match node.side() {
            Side::V => b'v',
            Side::E => b'e',
        });
        if let Some(labels) = self.labels {
            out.push(b'#');
            out.extend_from_slice(&labels[idx].to_le_bytes());
        }
        for c in &children {
            out.extend_from_slice(c);
        }
        out.push(b')');
        out
    }

    fn component_key(&mut self, comp: &[Node], root: Option<Node>) -> Vec<u8> {
        let g = self.g;
        let idx: Vec<usize> = comp.iter().map(|&x| g.index(x)).collect();
        for &i in &idx {
            self.alive[i] = true;
            self.rem[i] = g.degree(g.node(i));
        }
        let root_idx = root.map(|r| g.index(r));
        let is_tree = g_component_edges(g, comp) + 1 == comp.len();
        let mut alive_count = comp.len();
        let mut leaves: Vec<usize> = idx
            .iter()
            .copied()
            .filter(|&i| self.rem[i] == 1 && Some(i) != root_idx)
            .collect();
        while !leaves.is_empty() {
            if root_idx.is_none() && is_tree && alive_count <= 2 {
                break;
            }
            let mut next = Vec::new();
            let codes: Vec<(usize, Vec<u8>)> = leaves.iter().map(|&i| (i, self.code(i, false))).collect();
            for (i, code) in codes {
                self.alive[i] = false;
                alive_count -= 1;
                let parent = g
                    .neighbors(g.node(i))
                    .map(|(y, _)| g.index(y))
                    .find(|&j| self.alive[j])
                    .expect("a leaf keeps one live neighbour");
                self.hanging[parent].push(code);
                self.rem[parent] -= 1;
                if self.rem[parent] == 1 && Some(parent) != root_idx {
                    next.push(parent);
                }
            }
            leaves = next;
        }
        let core: Vec<usize> = idx.iter().copied().filter(|&i| self.alive[i]).collect();
        if core.len() == 1 {
            let i = core[0];
            let mut out = vec![b'T'];
            out.extend(self.code(i, Some(i) == root_idx));
            self.alive[i] = false;
            return out;
        }
        let labels: Vec<Vec<u8>> = core
            .iter()
            .map(|&i| self.code(i, Some(i) == root_idx))
            .collect();
        let pos: HashMap<usize, usize> = core.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let adj: Vec<Vec<(usize, u32)>> = core
            .iter()
            .map(|&i| {
                let mut list: Vec<(usize, u32)> = g
                    .neighbors(g.node(i))
                    .filter_map(|(y, k)| pos.get(&g.index(y)).map(|&p| (p, k)))
                    .collect();
                list.sort_unstable();
                list
            })
            .collect();
        for &i in &core {
            self.alive[i] = false;
        }
        core_certificate(&labels, &adj)
    }
}

fn g_component_edges(g: &IncidenceGraph, comp: &[Node]) -> usize {
    comp.iter()
        .filter(|x| x.side() == Side::V)
        .map(|&x| g.degree(x))
        .sum()
}

fn core_certificate(labels: &[Vec<u8>], adj: &[Vec<(usize, u32)>]) -> Vec<u8> {
    let mut distinct: Vec<&Vec<u8>> = labels.iter().collect();
    distinct.sort();
    distinct.dedup();
    let colors: Vec<u32> = labels
        .iter()
        .map(|l| distinct.binary_search(&l).unwrap() as u32)
        .collect();
    let colors = refine(colors, adj);
    let mut best: Option<Vec<u32>> = None;
    search(&colors, adj, &mut best);
    let best = best.expect("search visits at least one leaf");
    // Labels in canonical position order; refinement never reorders classes,
    // so every leaf agrees on this sequence.
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by_key(|&i| colors[i]);
    let mut out = vec![b'G'];
    for &i in &order {
        push_block(&mut out, &labels[i]);
    }
    out.push(b'|');
    for x in best {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

/// Equitable refinement; class order is preserved.
fn refine(mut colors: Vec<u32>, adj: &[Vec<(usize, u32)>]) -> Vec<u32> {
    let mut count = count_colors(&colors);
    loop {
        let sigs: Vec<(u32, Vec<(u32, u32)>)> = (0..colors.len())
            .map(|i| {
                let mut nb: Vec<(u32, u32)> = adj[i].iter().map(|&(j, k)| (colors[j], k)).collect();
                nb.sort_unstable();
                (colors[i], nb)
            })
            .collect();
        let mut distinct: Vec<&(u32, Vec<(u32, u32)>)> = sigs.iter().collect();
        distinct.sort();
        distinct.dedup();
        let next: Vec<u32> = sigs
            .iter()
            .map(|s| distinct.binary_search(&s).unwrap() as u32)
            .collect();
        let next_count = distinct.len();
        colors = next;
        if next_count == count {
            return colors;
        }
        count = next_count;
    }
}

fn count_colors(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn search(colors: &[u32], adj: &[Vec<(usize, u32)>], best: &mut Option<Vec<u32>>) {
    let n = colors.len();
    let mut sizes: HashMap<u32, usize> = HashMap::new();
    for &c in colors {
        *sizes.entry(c).or_default() += 1;
    }
    let target = sizes.iter().filter(|(_, &s)| s > 1).map(|(&c, _)| c).min();
    let Some(target) = target else {
        let cert = certificate(colors, adj);
        if best.as_ref().is_none_or(|b| cert < *b) {
            *best = Some(cert);
        }
        return;
    };
    let cell: Vec<usize> = (0..n).filter(|&i| colors[i] == target).collect();
    // Twins (same neighbourhood) are interchangeable; try one of each.
    let mut tried: Vec<&Vec<(usize, u32)>> = Vec::new();
    for &v in &cell {
        if tried.contains(&&adj[v]) {
            continue;
        }
        tried.push(&adj[v]);
        let split: Vec<u32> = colors
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if c > target || (c == target && i != v) {
                    c + 1
                } else {
                    c
                }
            })
            .collect();
        search(&refine(split, adj), adj, best);
    }
}

fn certificate(colors: &[u32], adj: &[Vec<(usize, u32)>]) -> Vec<u32> {
    let mut edges: Vec<(u32, u32, u32)> = Vec::new();
    for (i, list) in adj.iter().enumerate() {
        for &(j, k) in list {
            let (a, b) = (colors[i], colors[j]);
            if a < b {
                edges.push((a, b, k));
            }
        }
    }
    edges.sort_unstable();
    edges.into_iter().flat_map(|(a, b, k)| [a, b, k]).collect()
}
