//! Incidence graphs of hyper-multigraphs.
//!
//! Vertex nodes (`V`) and hyper-edge nodes (`E`) live on separate sides with
//! dense indices. ∈-edges carry a multiplicity so that collapsed
//! configurations, which may repeat a (v, e) pair, are representable.

mod canon;
mod io;

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use canon::{canonical_form, canonical_type, RootedType};
pub use io::{parse_fragment_text, parse_text, read_file, to_text, write_file, IncidenceFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    V,
    E,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::V => Side::E,
            Side::E => Side::V,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::V => "v",
            Side::E => "e",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Node {
    V(usize),
    E(usize),
}

impl Node {
    pub fn side(self) -> Side {
        match self {
            Node::V(_) => Side::V,
            Node::E(_) => Side::E,
        }
    }

    pub fn id(self) -> usize {
        match self {
            Node::V(i) | Node::E(i) => i,
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.side(), self.id())
    }
}

/// Bipartite incidence graph `(V, E, ∈)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceGraph {
    n_v: usize,
    n_e: usize,
    /// Distinct (v, e) pairs in lexicographic order with their multiplicity.
    inc: Vec<(usize, usize, u32)>,
    v_adj: Vec<Vec<(usize, u32)>>,
    e_adj: Vec<Vec<(usize, u32)>>,
    m: usize,
    simple: bool,
}

impl IncidenceGraph {
    /// Builds an incidence graph; every edge node must have degree at least 2.
    pub fn new(n_v: usize, n_e: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let g = Self::fragment(n_v, n_e, pairs)?;
        if let Some(e) = (0..n_e).find(|&e| g.e_degree(e) < 2) {
            return Err(Error::InvalidGraph(format!(
                "edge node {e} has degree {} (minimum is 2)",
                g.e_degree(e)
            )));
        }
        Ok(g)
    }

    /// Builds a fragment: like [`IncidenceGraph::new`] without the edge-size
    /// constraint. Balls and patterns are fragments.
    pub fn fragment(n_v: usize, n_e: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list: Vec<(usize, usize)> = pairs.into_iter().collect();
        if let Some(&(v, e)) = list.iter().find(|&&(v, e)| v >= n_v || e >= n_e) {
            return Err(Error::InvalidGraph(format!(
                "∈-edge ({v}, {e}) references a missing node (n_v = {n_v}, n_e = {n_e})"
            )));
        }
        list.sort_unstable();
        let mut inc: Vec<(usize, usize, u32)> = Vec::with_capacity(list.len());
        for (v, e) in list.iter().copied() {
            match inc.last_mut() {
                Some(last) if last.0 == v && last.1 == e => last.2 += 1,
                _ => inc.push((v, e, 1)),
            }
        }
        Ok(Self::from_runs(n_v, n_e, inc, list.len()))
    }

    /// Builds from distinct pairs with multiplicities.
    pub fn from_multiplicities(
        n_v: usize,
        n_e: usize,
        triples: impl IntoIterator<Item = (usize, usize, u32)>,
    ) -> Result<Self> {
        let mut merged: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for (v, e, k) in triples {
            if v >= n_v || e >= n_e {
                return Err(Error::InvalidGraph(format!("∈-edge ({v}, {e}) references a missing node")));
            }
            if k > 0 {
                *merged.entry((v, e)).or_default() += k;
            }
        }
        let m = merged.values().map(|&k| k as usize).sum();
        let inc = merged.into_iter().map(|((v, e), k)| (v, e, k)).collect();
        Ok(Self::from_runs(n_v, n_e, inc, m))
    }

    fn from_runs(n_v: usize, n_e: usize, inc: Vec<(usize, usize, u32)>, m: usize) -> Self {
        let mut v_adj = vec![Vec::new(); n_v];
        let mut e_adj = vec![Vec::new(); n_e];
        for &(v, e, k) in &inc {
            v_adj[v].push((e, k));
            e_adj[e].push((v, k));
        }
        let simple = inc.iter().all(|t| t.2 == 1);
        IncidenceGraph {
            n_v,
            n_e,
            inc,
            v_adj,
            e_adj,
            m,
            simple,
        }
    }

    pub fn empty(n_v: usize) -> Self {
        Self::from_runs(n_v, 0, Vec::new(), 0)
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn n_e(&self) -> usize {
        self.n_e
    }

    pub fn n_nodes(&self) -> usize {
        self.n_v + self.n_e
    }

    /// Number of ∈-edges counted with multiplicity.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Distinct (v, e, multiplicity) triples.
    pub fn incidences(&self) -> &[(usize, usize, u32)] {
        &self.inc
    }

    /// Every ∈-edge, repeated by multiplicity, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.inc
            .iter()
            .flat_map(|&(v, e, k)| std::iter::repeat_n((v, e), k as usize))
    }

    pub fn is_simple_incidence(&self) -> bool {
        self.simple
    }

    pub fn v_neighbors(&self, v: usize) -> &[(usize, u32)] {
        &self.v_adj[v]
    }

    pub fn e_neighbors(&self, e: usize) -> &[(usize, u32)] {
        &self.e_adj[e]
    }

    /// Neighbours of `node` with ∈-edge multiplicities.
    pub fn neighbors(&self, node: Node) -> impl Iterator<Item = (Node, u32)> + '_ {
        let (list, wrap): (&[(usize, u32)], fn(usize) -> Node) = match node {
            Node::V(v) => (&self.v_adj[v], Node::E),
            Node::E(e) => (&self.e_adj[e], Node::V),
        };
        list.iter().map(move |&(x, k)| (wrap(x), k))
    }

    pub fn v_degree(&self, v: usize) -> usize {
        self.v_adj[v].iter().map(|p| p.1 as usize).sum()
    }

    pub fn e_degree(&self, e: usize) -> usize {
        self.e_adj[e].iter().map(|p| p.1 as usize).sum()
    }

    /// Degree counted with multiplicity.
    pub fn degree(&self, node: Node) -> usize {
        match node {
            Node::V(v) => self.v_degree(v),
            Node::E(e) => self.e_degree(e),
        }
    }

    /// Number of distinct neighbours.
    pub fn distinct_degree(&self, node: Node) -> usize {
        match node {
            Node::V(v) => self.v_adj[v].len(),
            Node::E(e) => self.e_adj[e].len(),
        }
    }

    pub fn multiplicity(&self, v: usize, e: usize) -> u32 {
        self.v_adj[v]
            .binary_search_by_key(&e, |p| p.0)
            .map_or(0, |i| self.v_adj[v][i].1)
    }

    pub fn contains(&self, node: Node) -> bool {
        match node {
            Node::V(v) => v < self.n_v,
            Node::E(e) => e < self.n_e,
        }
    }

    /// Dense index with vertex nodes first.
    pub fn index(&self, node: Node) -> usize {
        match node {
            Node::V(v) => v,
            Node::E(e) => self.n_v + e,
        }
    }

    pub fn node(&self, index: usize) -> Node {
        if index < self.n_v {
            Node::V(index)
        } else {
            Node::E(index - self.n_v)
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = Node> {
        (0..self.n_v).map(Node::V).chain((0..self.n_e).map(Node::E))
    }

    /// |∈| − (|V| + |E|), counting ∈-edges with multiplicity.
    pub fn excess(&self) -> i64 {
        self.m as i64 - self.n_nodes() as i64
    }

    /// Degree histograms of the V side and the E side.
    pub fn degree_census(&self) -> (BTreeMap<usize, u64>, BTreeMap<usize, u64>) {
        let mut vs = BTreeMap::new();
        for v in 0..self.n_v {
            *vs.entry(self.v_degree(v)).or_default() += 1;
        }
        let mut es = BTreeMap::new();
        for e in 0..self.n_e {
            *es.entry(self.e_degree(e)).or_default() += 1;
        }
        (vs, es)
    }

    /// Connected components as lists of nodes, each in BFS order.
    pub fn components(&self) -> Vec<Vec<Node>> {
        let mut seen = vec![false; self.n_nodes()];
        let mut out = Vec::new();
        for start in self.nodes() {
            if seen[self.index(start)] {
                continue;
            }
            seen[self.index(start)] = true;
            let mut comp = vec![start];
            let mut head = 0;
            while head < comp.len() {
                let x = comp[head];
                head += 1;
                for (y, _) in self.neighbors(x) {
                    let iy = self.index(y);
                    if !seen[iy] {
                        seen[iy] = true;
                        comp.push(y);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n_nodes() <= 1 || self.components().len() == 1
    }

    /// Subgraph induced by `nodes`, with local indices in the given order per
    /// side. Returns the fragment and the local→global node map.
    pub fn induced(&self, nodes: &[Node]) -> (IncidenceGraph, Vec<Node>) {
        let mut v_local = BTreeMap::new();
        let mut e_local = BTreeMap::new();
        let mut v_list = Vec::new();
        let mut e_list = Vec::new();
        for &x in nodes {
            match x {
                Node::V(v) if !v_local.contains_key(&v) => {
                    v_local.insert(v, v_list.len());
                    v_list.push(v);
                }
                Node::E(e) if !e_local.contains_key(&e) => {
                    e_local.insert(e, e_list.len());
                    e_list.push(e);
                }
                _ => {}
            }
        }
        let mut triples = Vec::new();
        for (lv, &v) in v_list.iter().enumerate() {
            for &(e, k) in &self.v_adj[v] {
                if let Some(&le) = e_local.get(&e) {
                    triples.push((lv, le, k));
                }
            }
        }
        let m = triples.iter().map(|t| t.2 as usize).sum();
        triples.sort_unstable();
        let g = IncidenceGraph::from_runs(v_list.len(), e_list.len(), triples, m);
        let map = v_list
            .into_iter()
            .map(Node::V)
            .chain(e_list.into_iter().map(Node::E))
            .collect();
        (g, map)
    }

    /// Breadth-first distances from `root`, up to `radius`.
    pub fn distances_from(&self, root: Node, radius: usize) -> Vec<(Node, usize)> {
        let mut dist: std::collections::HashMap<Node, usize> = std::collections::HashMap::new();
        dist.insert(root, 0);
        let mut order = vec![(root, 0)];
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            let d = dist[&x];
            if d == radius {
                continue;
            }
            for (y, _) in self.neighbors(x) {
                if let std::collections::hash_map::Entry::Vacant(slot) = dist.entry(y) {
                    slot.insert(d + 1);
                    order.push((y, d + 1));
                    queue.push_back(y);
                }
            }
        }
        order
    }

    /// Induced ball of `radius` around `root`.
    pub fn ball(&self, root: Node, radius: usize) -> Result<RootedBall> {
        if !self.contains(root) {
            return Err(Error::InvalidGraph(format!("root {root} is not in the graph")));
        }
        let order: Vec<Node> = self.distances_from(root, radius).into_iter().map(|p| p.0).collect();
        let (subgraph, global) = self.induced(&order);
        let local_root = match root {
            Node::V(_) => Node::V(0),
            Node::E(_) => Node::E(0),
        };
        Ok(RootedBall {
            root: local_root,
            radius,
            subgraph,
            global,
        })
    }

    /// No repeated (v, e) pair and no two edge nodes with the same vertex set.
    pub fn is_hypergraph(&self) -> bool {
        if !self.simple {
            return false;
        }
        let mut seen: HashSet<&[(usize, u32)]> = HashSet::with_capacity(self.n_e);
        self.e_adj.iter().all(|adj| seen.insert(adj.as_slice()))
    }

    /// A simple graph: a hypergraph whose edges all have size 2.
    pub fn is_graph(&self) -> bool {
        (0..self.n_e).all(|e| self.e_degree(e) == 2) && self.is_hypergraph()
    }

    /// Inverse of [`HyperMultigraph::to_incidence`].
    pub fn to_hypergraph(&self) -> Result<HyperMultigraph> {
        if !self.simple {
            return Err(Error::NotAHypergraph);
        }
        HyperMultigraph::new(
            self.n_v,
            self.e_adj.iter().map(|adj| adj.iter().map(|p| p.0).collect()),
        )
    }

    /// Canonical form of the whole graph (isomorphism-invariant bytes).
    pub fn canonical_form(&self) -> Vec<u8> {
        canonical_form(self, None, None)
    }
}

/// Ball of a given radius around a root, as a fragment with local indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedBall {
    /// Root in local indices (always the first node of its side).
    pub root: Node,
    pub radius: usize,
    pub subgraph: IncidenceGraph,
    /// Local node (V first, then E, by dense index) → node of the host graph.
    pub global: Vec<Node>,
}

impl RootedBall {
    pub fn global_node(&self, local: Node) -> Node {
        self.global[self.subgraph.index(local)]
    }
}

/// Hyper-multigraph `(V, M)`: each edge is a vertex set of size ≥ 2 with a
/// multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperMultigraph {
    n: usize,
    edges: BTreeMap<Vec<usize>, u32>,
}

impl HyperMultigraph {
    /// Each item is one edge copy; repeated items raise the multiplicity.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        let mut map: BTreeMap<Vec<usize>, u32> = BTreeMap::new();
        for mut edge in edges {
            edge.sort_unstable();
            if edge.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("edge {edge:?} repeats a vertex")));
            }
            if edge.len() < 2 {
                return Err(Error::InvalidGraph(format!("edge {edge:?} has fewer than 2 vertices")));
            }
            if edge.last().is_some_and(|&v| v >= n) {
                return Err(Error::InvalidGraph(format!("edge {edge:?} references a missing vertex")));
            }
            *map.entry(edge).or_default() += 1;
        }
        Ok(HyperMultigraph { n, edges: map })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Distinct edges with multiplicities.
    pub fn edges(&self) -> &BTreeMap<Vec<usize>, u32> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.values().map(|&k| k as usize).sum()
    }

    /// One edge node per edge copy.
    pub fn to_incidence(&self) -> IncidenceGraph {
        let mut pairs = Vec::new();
        let mut e = 0;
        for (edge, &mult) in &self.edges {
            for _ in 0..mult {
                pairs.extend(edge.iter().map(|&v| (v, e)));
                e += 1;
            }
        }
        IncidenceGraph::new(self.n, e, pairs).expect("edges have size at least 2")
    }
}

pub fn to_incidence(h: &HyperMultigraph) -> IncidenceGraph {
    h.to_incidence()
}

pub fn from_incidence(g: &IncidenceGraph) -> Result<HyperMultigraph> {
    g.to_hypergraph()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Incidence graph of a double edge {v1, v2} and a hyper-edge {v2, v3, v4}.
    pub(crate) fn double_edge_and_triangle() -> HyperMultigraph {
        HyperMultigraph::new(4, [vec![0, 1], vec![0, 1], vec![1, 2, 3]]).unwrap()
    }

    #[test]
    fn bijection_examples() {
        let h = double_edge_and_triangle();
        let g = h.to_incidence();
        assert_eq!((g.n_v(), g.n_e(), g.m()), (4, 3, 7));
        assert_eq!(from_incidence(&g).unwrap(), h);

        let single = HyperMultigraph::new(2, [vec![0, 1]]).unwrap().to_incidence();
        assert_eq!((single.n_v(), single.n_e(), single.m()), (2, 1, 2));

        let empty = HyperMultigraph::new(3, []).unwrap().to_incidence();
        assert_eq!((empty.n_v(), empty.n_e(), empty.m()), (3, 0, 0));
    }

    #[test]
    fn from_incidence_rejects_repeated_pairs() {
        let g = IncidenceGraph::new(2, 1, [(0, 0), (0, 0), (1, 0)]).unwrap();
        assert!(!g.is_simple_incidence());
        assert!(matches!(from_incidence(&g), Err(Error::NotAHypergraph)));
    }

    #[test]
    fn four_cycle_is_a_double_edge() {
        let g = IncidenceGraph::new(2, 2, [(0, 0), (1, 0), (0, 1), (1, 1)]).unwrap();
        let h = from_incidence(&g).unwrap();
        assert_eq!(h.edges(), &BTreeMap::from([(vec![0, 1], 2)]));
        assert!(!g.is_hypergraph());
    }

    #[test]
    fn excess_examples() {
        let path = IncidenceGraph::fragment(2, 2, [(0, 0), (1, 0), (1, 1)]).unwrap();
        assert_eq!(path.excess(), -1);
        let square = IncidenceGraph::new(2, 2, [(0, 0), (1, 0), (0, 1), (1, 1)]).unwrap();
        assert_eq!(square.excess(), 0);
        let triple = IncidenceGraph::new(2, 3, (0..3).flat_map(|e| [(0, e), (1, e)])).unwrap();
        assert_eq!(triple.excess(), 1);
    }

    #[test]
    fn ball_examples() {
        let g = double_edge_and_triangle().to_incidence();
        let b0 = g.ball(Node::V(1), 0).unwrap();
        assert_eq!((b0.subgraph.n_v(), b0.subgraph.n_e(), b0.subgraph.m()), (1, 0, 0));
        let b1 = g.ball(Node::V(1), 1).unwrap();
        assert_eq!((b1.subgraph.n_v(), b1.subgraph.n_e(), b1.subgraph.m()), (1, 3, 3));
        assert_eq!(b1.global_node(b1.root), Node::V(1));
        let whole = g.ball(Node::V(0), 10).unwrap();
        assert_eq!(whole.subgraph.n_nodes(), g.n_nodes());
        assert_eq!(whole.subgraph.m(), g.m());
        assert!(g.ball(Node::E(7), 1).is_err());
    }

    #[test]
    fn degree_census_examples() {
        // v1 ∈ e2, v2 ∈ e1, e2, v3 ∈ e1, e2
        let g = IncidenceGraph::new(3, 2, [(1, 0), (2, 0), (0, 1), (1, 1), (2, 1)]).unwrap();
        let (vs, es) = g.degree_census();
        assert_eq!(vs, BTreeMap::from([(1, 1), (2, 2)]));
        assert_eq!(es, BTreeMap::from([(2, 1), (3, 1)]));
        let (vs, es) = IncidenceGraph::empty(5).degree_census();
        assert_eq!(vs, BTreeMap::from([(0, 5)]));
        assert!(es.is_empty());
        let star = HyperMultigraph::new(4, [vec![0, 1, 2, 3]]).unwrap().to_incidence();
        assert_eq!(star.degree_census(), (BTreeMap::from([(1, 4)]), BTreeMap::from([(4, 1)])));
    }

    #[test]
    fn construction_errors() {
        assert!(IncidenceGraph::new(2, 1, [(0, 0)]).is_err());
        assert!(IncidenceGraph::fragment(2, 1, [(0, 0)]).is_ok());
        assert!(IncidenceGraph::fragment(1, 1, [(1, 0)]).is_err());
        assert!(HyperMultigraph::new(3, [vec![0]]).is_err());
        assert!(HyperMultigraph::new(3, [vec![0, 0]]).is_err());
        assert!(HyperMultigraph::new(3, [vec![0, 3]]).is_err());
    }

    #[test]
    fn hypergraph_and_graph_predicates() {
        let tri = HyperMultigraph::new(3, [vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap().to_incidence();
        assert!(tri.is_graph());
        let hyper = HyperMultigraph::new(3, [vec![0, 1, 2], vec![0, 1]]).unwrap().to_incidence();
        assert!(hyper.is_hypergraph() && !hyper.is_graph());
    }

    /// Random fragment with up to `max_v` vertices and `max_e` edge nodes.
    pub(crate) fn arb_fragment(max_v: usize, max_e: usize, max_m: usize) -> impl Strategy<Value = IncidenceGraph> {
        (1..=max_v, 1..=max_e).prop_flat_map(move |(nv, ne)| {
            prop::collection::vec((0..nv, 0..ne), 0..=max_m)
                .prop_map(move |pairs| IncidenceGraph::fragment(nv, ne, pairs).unwrap())
        })
    }

    /// Floyd–Warshall over the unified index.
    fn all_pairs(g: &IncidenceGraph) -> Vec<Vec<usize>> {
        let n = g.n_nodes();
        let inf = usize::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        for &(v, e, _) in g.incidences() {
            let (a, b) = (v, g.n_v() + e);
            d[a][b] = 1;
            d[b][a] = 1;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        d
    }

    /// Cycle detection by union-find, independent of the excess count.
    fn has_cycle(g: &IncidenceGraph) -> bool {
        let mut parent: Vec<usize> = (0..g.n_nodes()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for (v, e) in g.pairs() {
            let (a, b) = (find(&mut parent, v), find(&mut parent, g.n_v() + e));
            if a == b {
                return true;
            }
            parent[a] = b;
        }
        false
    }

    proptest! {
        #[test]
        fn ball_matches_all_pairs_oracle(g in arb_fragment(5, 5, 10), r in 0usize..5, pick in 0usize..100) {
            let root = g.node(pick % g.n_nodes());
            let ball = g.ball(root, r).unwrap();
            let d = all_pairs(&g);
            let expected: std::collections::BTreeSet<Node> = g
                .nodes()
                .filter(|&x| d[g.index(root)][g.index(x)] <= r)
                .collect();
            let got: std::collections::BTreeSet<Node> = ball.global.iter().copied().collect();
            prop_assert_eq!(&got, &expected);
            let (induced, _) = g.induced(&expected.iter().copied().collect::<Vec<_>>());
            prop_assert_eq!(ball.subgraph.m(), induced.m());
        }

        #[test]
        fn connected_excess_bound(g in arb_fragment(5, 5, 10)) {
            for comp in g.components() {
                let (sub, _) = g.induced(&comp);
                prop_assert!(sub.excess() >= -1);
                prop_assert_eq!(sub.excess() == -1, !has_cycle(&sub));
            }
        }

        #[test]
        fn census_sums_match(g in arb_fragment(6, 6, 14)) {
            let (vs, es) = g.degree_census();
            let sv: u64 = vs.iter().map(|(k, c)| *k as u64 * c).sum();
            let se: u64 = es.iter().map(|(k, c)| *k as u64 * c).sum();
            prop_assert_eq!(sv, g.m() as u64);
            prop_assert_eq!(se, g.m() as u64);
        }

        #[test]
        fn round_trip_is_isomorphic(n in 2usize..7, masks in prop::collection::vec(any::<u8>(), 0..7)) {
            let edges: Vec<Vec<usize>> = masks
                .iter()
                .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>())
                .filter(|e| e.len() >= 2)
                .collect();
            let h = HyperMultigraph::new(n, edges).unwrap();
            let g = h.to_incidence();
            // Shuffle edge-node order so the round trip is not the identity.
            let k = g.n_e();
            let g = IncidenceGraph::new(n, k, g.pairs().map(|(v, e)| (v, k - 1 - e))).unwrap();
            let back = from_incidence(&g).unwrap();
            prop_assert_eq!(&back, &h);
            prop_assert_eq!(back.to_incidence().canonical_form(), g.canonical_form());
        }
    }
}
