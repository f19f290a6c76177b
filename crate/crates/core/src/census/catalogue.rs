//! Named patterns and the catalogue of excess-1 cores.

use std::collections::BTreeSet;

use super::Pattern;
use crate::incidence::{IncidenceGraph, Side};

/// Builds a pattern from sided nodes and undirected links between them.
struct Builder {
    sides: Vec<Side>,
    links: Vec<(usize, usize)>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            sides: Vec::new(),
            links: Vec::new(),
        }
    }

    fn node(&mut self, side: Side) -> usize {
        self.sides.push(side);
        self.sides.len() - 1
    }

    /// Path of `len` links from `from` to `to`, creating `len - 1` inner nodes.
    fn path(&mut self, from: usize, to: usize, len: usize) {
        let mut prev = from;
        for _ in 1..len {
            let side = self.sides[prev].other();
            let next = self.node(side);
            self.links.push((prev, next));
            prev = next;
        }
        self.links.push((prev, to));
    }

    fn build(self, id: String) -> Pattern {
        let mut local = Vec::with_capacity(self.sides.len());
        let (mut nv, mut ne) = (0, 0);
        for side in &self.sides {
            match side {
                Side::V => {
                    local.push(nv);
                    nv += 1;
                }
                Side::E => {
                    local.push(ne);
                    ne += 1;
                }
            }
        }
        let pairs = self.links.iter().map(|&(a, b)| {
            assert_ne!(self.sides[a], self.sides[b], "links join opposite sides");
            if self.sides[a] == Side::V {
                (local[a], local[b])
            } else {
                (local[b], local[a])
            }
        });
        let g = IncidenceGraph::fragment(nv, ne, pairs).expect("builder indices are in range");
        Pattern::new(id, g).expect("builder patterns are connected")
    }
}

fn side_tag(side: Side) -> &'static str {
    match side {
        Side::V => "v",
        Side::E => "e",
    }
}

/// One ∈-edge.
pub fn single_incidence() -> Pattern {
    Pattern::from_pairs("incidence", 1, 1, [(0, 0)]).unwrap()
}

/// Two vertices sharing an edge node.
pub fn vev_path() -> Pattern {
    Pattern::from_pairs("path-vev", 2, 1, [(0, 0), (1, 0)]).unwrap()
}

/// A vertex twice in the same edge node.
pub fn loop_pattern() -> Pattern {
    Pattern::from_pairs("loop", 1, 1, [(0, 0), (0, 0)]).unwrap()
}

/// Bipartite 4-cycle: two edge nodes on the same two vertices.
pub fn double_edge() -> Pattern {
    cycle(2).with_id("double-edge")
}

/// Bipartite cycle through `k` vertices and `k` edge nodes (`k ≥ 2`).
pub fn cycle(k: usize) -> Pattern {
    assert!(k >= 2, "a bipartite cycle needs at least 2 nodes per side");
    Pattern::from_pairs(
        format!("cycle-{}", 2 * k),
        k,
        k,
        (0..k).flat_map(|i| [(i, i), ((i + 1) % k, i)]),
    )
    .unwrap()
}

/// Two branch nodes joined by three internally disjoint paths of lengths
/// `a ≤ b ≤ c` (all of one parity, at most one of length 1). `side` is the
/// side of the first branch node.
pub fn theta(a: usize, b: usize, c: usize, side: Side) -> Pattern {
    let mut lens = [a, b, c];
    lens.sort_unstable();
    let [a, b, c] = lens;
    assert!(a >= 1 && b >= 2, "at most one path of length 1");
    assert!(a % 2 == b % 2 && b % 2 == c % 2, "path lengths share a parity");
    let mut g = Builder::new();
    let u = g.node(side);
    let w = g.node(if a % 2 == 1 { side.other() } else { side });
    for len in lens {
        g.path(u, w, len);
    }
    g.build(format!("theta-{a}-{b}-{c}-{}", side_tag(side)))
}

/// Cycles of `c1` and `c2` nodes (even, at least 4) joined by a path of
/// `len ≥ 1` links. `side` is the side of the attachment node on the first
/// cycle.
pub fn dumbbell(c1: usize, c2: usize, len: usize, side: Side) -> Pattern {
    assert!(c1 >= 4 && c2 >= 4 && c1 % 2 == 0 && c2 % 2 == 0 && len >= 1);
    let mut g = Builder::new();
    let u = g.node(side);
    let w = g.node(if len % 2 == 1 { side.other() } else { side });
    g.path(u, u, c1);
    g.path(w, w, c2);
    g.path(u, w, len);
    g.build(format!("dumbbell-{c1}-{c2}-{len}-{}", side_tag(side)))
}

/// Cycles of `c1` and `c2` nodes sharing one node of the given side.
pub fn figure_eight(c1: usize, c2: usize, side: Side) -> Pattern {
    assert!(c1 >= 4 && c2 >= 4 && c1 % 2 == 0 && c2 % 2 == 0);
    let mut g = Builder::new();
    let u = g.node(side);
    g.path(u, u, c1);
    g.path(u, u, c2);
    g.build(format!("eight-{c1}-{c2}-{}", side_tag(side)))
}

/// Patterns the census commands count by default.
pub fn standard_patterns() -> Vec<Pattern> {
    vec![
        single_incidence(),
        vev_path(),
        loop_pattern(),
        double_edge(),
        cycle(3),
        cycle(4),
    ]
}

/// Connected excess-1 cores (minimum degree 2, no repeated ∈-edge) with at
/// most `max_nodes` nodes, one per isomorphism class.
///
/// Every such core is a theta, a dumbbell or a figure-eight.
pub fn excess_catalogue(max_nodes: usize) -> Vec<Pattern> {
    let mut out = Vec::new();
    let sides = [Side::V, Side::E];
    for a in 1..=max_nodes {
        for b in a.max(2)..=max_nodes {
            for c in b..=max_nodes {
                if a + b + c > max_nodes + 1 || a % 2 != b % 2 || b % 2 != c % 2 {
                    continue;
                }
                out.extend(sides.map(|s| theta(a, b, c, s)));
            }
        }
    }
    for c1 in (4..=max_nodes).step_by(2) {
        for c2 in (c1..=max_nodes).step_by(2) {
            for len in 1..=max_nodes {
                if c1 + c2 + len > max_nodes + 1 {
                    break;
                }
                out.extend(sides.map(|s| dumbbell(c1, c2, len, s)));
            }
            if c1 + c2 <= max_nodes + 1 {
                out.extend(sides.map(|s| figure_eight(c1, c2, s)));
            }
        }
    }
    let mut seen = BTreeSet::new();
    out.retain(|p| seen.insert(p.graph().canonical_form()));
    out.sort_by_key(|p| p.graph().n_nodes());
    out
}
