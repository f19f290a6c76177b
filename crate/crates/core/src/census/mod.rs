//! Realisation counts of small connected patterns and their expected values
//! in the configuration model.
//!
//! A realisation is an image of an injective, side-preserving homomorphism
//! (embeddings divided by automorphisms). Pattern ∈-edges of multiplicity
//! `k` mapped onto a host pair of multiplicity `M` contribute `C(M, k)`
//! choices, so counts are taken in the configuration multigraph.

mod catalogue;
mod cycles;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::degree_model::{falling_factorial, LimitDistribution};
use crate::error::{Error, Result};
use crate::incidence::{IncidenceGraph, Node, Side};

pub use catalogue::{
    cycle, double_edge, excess_catalogue, figure_eight, loop_pattern, single_incidence, standard_patterns, theta,
    dumbbell, vev_path,
};
pub use cycles::unicyclic_cycle_census;

/// Small connected fragment, optionally with exact-degree decorations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PatternFile", into = "PatternFile")]
pub struct Pattern {
    id: String,
    graph: IncidenceGraph,
    /// Required host degree per node (dense index), if any.
    exact_degree: Vec<Option<usize>>,
}

/// Serialised form of a [`Pattern`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternFile {
    pub id: String,
    pub k_v: usize,
    pub k_e: usize,
    pub inc: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exact_degree: Vec<(Node, usize)>,
}

impl TryFrom<PatternFile> for Pattern {
    type Error = Error;

    fn try_from(f: PatternFile) -> Result<Self> {
        let graph = IncidenceGraph::fragment(f.k_v, f.k_e, f.inc)?;
        let mut exact = vec![None; graph.n_nodes()];
        for (node, k) in f.exact_degree {
            if !graph.contains(node) {
                return Err(Error::InvalidGraph(format!("decoration on missing node {node}")));
            }
            exact[graph.index(node)] = Some(k);
        }
        Pattern::decorated(f.id, graph, exact)
    }
}

impl From<Pattern> for PatternFile {
    fn from(p: Pattern) -> Self {
        PatternFile {
            k_v: p.graph.n_v(),
            k_e: p.graph.n_e(),
            inc: p.graph.pairs().collect(),
            exact_degree: p
                .exact_degree
                .iter()
                .enumerate()
                .filter_map(|(i, d)| d.map(|k| (p.graph.node(i), k)))
                .collect(),
            id: p.id,
        }
    }
}

impl Pattern {
    pub fn new(id: impl Into<String>, graph: IncidenceGraph) -> Result<Self> {
        let n = graph.n_nodes();
        Self::decorated(id, graph, vec![None; n])
    }

    pub fn decorated(id: impl Into<String>, graph: IncidenceGraph, exact_degree: Vec<Option<usize>>) -> Result<Self> {
        if graph.n_nodes() == 0 {
            return Err(Error::InvalidGraph("empty pattern".into()));
        }
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        if exact_degree.len() != graph.n_nodes() {
            return Err(Error::InvalidGraph("one decoration slot per node is required".into()));
        }
        Ok(Pattern {
            id: id.into(),
            graph,
            exact_degree,
        })
    }

    pub fn from_pairs(
        id: impl Into<String>,
        k_v: usize,
        k_e: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        Self::new(id, IncidenceGraph::fragment(k_v, k_e, pairs)?)
    }

    /// Same pattern with node `node` required to have host degree `k`.
    pub fn with_exact_degree(mut self, node: Node, k: usize) -> Self {
        let i = self.graph.index(node);
        self.exact_degree[i] = Some(k);
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn graph(&self) -> &IncidenceGraph {
        &self.graph
    }

    pub fn k_v(&self) -> usize {
        self.graph.n_v()
    }

    pub fn k_e(&self) -> usize {
        self.graph.n_e()
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    pub fn excess(&self) -> i64 {
        self.graph.excess()
    }

    pub fn exact_degree(&self, node: Node) -> Option<usize> {
        self.exact_degree[self.graph.index(node)]
    }

    pub fn is_decorated(&self) -> bool {
        self.exact_degree.iter().any(Option::is_some)
    }

    /// Some edge node has degree below 2, so the pattern is a raw bipartite
    /// fragment rather than a hyper-edge neighbourhood.
    pub fn is_raw(&self) -> bool {
        (0..self.graph.n_e()).any(|e| self.graph.e_degree(e) < 2)
    }

    /// Π k! over ∈-edge multiplicities k.
    fn multi_edge_factor(&self) -> u64 {
        self.graph
            .incidences()
            .iter()
            .map(|t| (1..=t.2 as u64).product::<u64>())
            .product()
    }
}

/// Side-preserving automorphism counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomorphismCount {
    /// Order of the permutation group induced on vertex nodes.
    pub c_v: u64,
    /// Order of the permutation group induced on edge nodes.
    pub c_e: u64,
    /// Order of the node automorphism group.
    pub total: u64,
    /// Π k! over ∈-edge multiplicities k (permutations of parallel ∈-edges).
    pub parallel: u64,
}

impl AutomorphismCount {
    /// Denominator used for expected counts: `total · parallel`.
    pub fn denominator(&self) -> u64 {
        self.total * self.parallel
    }

    /// `c_v · c_e` differs from the group order.
    pub fn product_differs(&self) -> bool {
        self.c_v * self.c_e != self.total
    }
}

/// Node order and per-node constraints for the backtracking matcher.
struct Plan {
    order: Vec<usize>,
    /// For each position: earlier positions adjacent in the pattern, with multiplicity.
    back: Vec<Vec<(usize, u32)>>,
}

/// Shortest cycle of at least 4 nodes, as dense indices in cycle order.
fn shortest_cycle(adj: &[Vec<(usize, u32)>]) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut best: Option<Vec<usize>> = None;
    for x in 0..n {
        for &(y, _) in &adj[x] {
            if y < x {
                continue;
            }
            // Shortest x → y path avoiding the link x–y itself.
            let mut prev = vec![usize::MAX; n];
            prev[x] = x;
            let mut queue = std::collections::VecDeque::from([x]);
            while let Some(a) = queue.pop_front() {
                for &(b, _) in &adj[a] {
                    if (a == x && b == y) || prev[b] != usize::MAX {
                        continue;
                    }
                    prev[b] = a;
                    queue.push_back(b);
                }
            }
            if prev[y] == usize::MAX {
                continue;
            }
            let mut path = vec![y];
            while *path.last().unwrap() != x {
                path.push(prev[*path.last().unwrap()]);
            }
            if best.as_ref().is_none_or(|b| path.len() < b.len()) {
                best = Some(path);
            }
        }
    }
    best
}

fn plan(p: &IncidenceGraph) -> Plan {
    let n = p.n_nodes();
    let adj: Vec<Vec<(usize, u32)>> = (0..n)
        .map(|i| p.neighbors(p.node(i)).map(|(y, k)| (p.index(y), k)).collect())
        .collect();
    let deg = |i: usize| p.degree(p.node(i));
    let mut placed = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    // Close the shortest cycle first, starting from its highest-degree node.
    let seed: Vec<usize> = match shortest_cycle(&adj) {
        Some(mut c) => {
            let top = (0..c.len()).max_by_key(|&i| (deg(c[i]), std::cmp::Reverse(i))).unwrap();
            c.rotate_left(top);
            c
        }
        None => vec![(0..n).max_by_key(|&i| (deg(i), std::cmp::Reverse(i))).unwrap()],
    };
    for i in seed {
        placed[i] = order.len();
        order.push(i);
    }
    while order.len() < n {
        let next = (0..n)
            .filter(|&i| placed[i] == usize::MAX)
            .filter(|&i| adj[i].iter().any(|&(j, _)| placed[j] != usize::MAX))
            .max_by_key(|&i| {
                let mapped: Vec<usize> = adj[i]
                    .iter()
                    .filter(|&&(j, _)| placed[j] != usize::MAX)
                    .map(|&(j, _)| placed[j])
                    .collect();
                (mapped.len(), mapped.iter().max().copied(), deg(i), std::cmp::Reverse(i))
            })
            .expect("pattern is connected");
        placed[next] = order.len();
        order.push(next);
    }
    let back = order
        .iter()
        .enumerate()
        .map(|(pos, &i)| {
            let mut b: Vec<(usize, u32)> = adj[i]
                .iter()
                .filter(|&&(j, _)| placed[j] < pos)
                .map(|&(j, k)| (placed[j], k))
                .collect();
            b.sort_unstable();
            b
        })
        .collect();
    Plan { order, back }
}

fn binomial(m: u32, k: u32) -> u128 {
    if k > m {
        return 0;
    }
    (0..k as u128).fold(1u128, |acc, i| acc * (m as u128 - i) / (i + 1))
}

struct Matcher<'a, C, F> {
    plan: Plan,
    sides: Vec<Side>,
    g: &'a IncidenceGraph,
    compat: C,
    visit: F,
    map: Vec<Node>,
    used: Vec<bool>,
    total: u128,
}

impl<C: Fn(usize, Node) -> bool, F: FnMut(&[Node])> Matcher<'_, C, F> {
    fn rec(&mut self, pos: usize, weight: u128) {
        if pos == self.sides.len() {
            self.total += weight;
            (self.visit)(&self.map);
            return;
        }
        let g = self.g;
        match self.plan.back[pos].first() {
            None => {
                let count = match self.sides[pos] {
                    Side::V => g.n_v(),
                    Side::E => g.n_e(),
                };
                for i in 0..count {
                    let h = match self.sides[pos] {
                        Side::V => Node::V(i),
                        Side::E => Node::E(i),
                    };
                    self.try_node(pos, weight, h);
                }
            }
            Some(_) => {
                // Anchor on the mapped neighbour with the fewest host neighbours.
                let anchor = self.plan.back[pos]
                    .iter()
                    .map(|&(q, _)| self.map[q])
                    .min_by_key(|&x| g.distinct_degree(x))
                    .unwrap();
                match anchor {
                    Node::V(v) => {
                        for &(e, _) in g.v_neighbors(v) {
                            self.try_node(pos, weight, Node::E(e));
                        }
                    }
                    Node::E(e) => {
                        for &(v, _) in g.e_neighbors(e) {
                            self.try_node(pos, weight, Node::V(v));
                        }
                    }
                }
            }
        }
    }

    fn try_node(&mut self, pos: usize, weight: u128, h: Node) {
        let hi = self.g.index(h);
        if self.used[hi] || !(self.compat)(self.plan.order[pos], h) {
            return;
        }
        let mut w = weight;
        for &(q, k) in &self.plan.back[pos] {
            let m = match (h, self.map[q]) {
                (Node::V(v), Node::E(e)) | (Node::E(e), Node::V(v)) => self.g.multiplicity(v, e),
                _ => 0,
            };
            let c = binomial(m, k);
            if c == 0 {
                return;
            }
            w *= c;
        }
        self.used[hi] = true;
        self.map.push(h);
        self.rec(pos + 1, w);
        self.map.pop();
        self.used[hi] = false;
    }
}

/// Sums, over injective side-preserving maps accepted by `compat`, the
/// product of `C(M, k)` over pattern ∈-edges. `visit` sees every full map
/// (indexed by the plan order returned alongside).
fn for_each_embedding<C, F>(p: &IncidenceGraph, g: &IncidenceGraph, compat: C, visit: F) -> (u128, Vec<usize>)
where
    C: Fn(usize, Node) -> bool,
    F: FnMut(&[Node]),
{
    let plan = plan(p);
    let sides = plan.order.iter().map(|&i| p.node(i).side()).collect();
    let order = plan.order.clone();
    let mut m = Matcher {
        plan,
        sides,
        g,
        compat,
        visit,
        map: Vec::with_capacity(p.n_nodes()),
        used: vec![false; g.n_nodes()],
        total: 0,
    };
    m.rec(0, 1);
    (m.total, order)
}

/// Number of realisations of `h` in `g`.
pub fn count_embeddings(h: &Pattern, g: &IncidenceGraph) -> u128 {
    count_embeddings_with(h, g, &automorphisms(h))
}

/// As [`count_embeddings`] with a precomputed automorphism count.
pub fn count_embeddings_with(h: &Pattern, g: &IncidenceGraph, aut: &AutomorphismCount) -> u128 {
    let p = &h.graph;
    let compat = |pi: usize, x: Node| {
        let px = p.node(pi);
        g.degree(x) >= p.degree(px)
            && g.distinct_degree(x) >= p.distinct_degree(px)
            && h.exact_degree[pi].is_none_or(|k| g.degree(x) == k)
    };
    let (maps, _) = for_each_embedding(p, g, compat, |_| {});
    maps / aut.total as u128
}

/// Raw injective-homomorphism count (before dividing by automorphisms).
pub fn count_injective_maps(h: &Pattern, g: &IncidenceGraph) -> u128 {
    let p = &h.graph;
    let compat = |pi: usize, x: Node| h.exact_degree[pi].is_none_or(|k| g.degree(x) == k);
    for_each_embedding(p, g, compat, |_| {}).0
}

/// Automorphisms preserving sides, multiplicities and decorations.
pub fn automorphisms(h: &Pattern) -> AutomorphismCount {
    let p = &h.graph;
    let compat = |pi: usize, x: Node| {
        let xi = p.index(x);
        h.exact_degree[pi] == h.exact_degree[xi] && p.degree(p.node(pi)) == p.degree(x)
    };
    let plan_order = plan(p).order;
    let mut on_v: HashSet<Vec<usize>> = HashSet::new();
    let mut on_e: HashSet<Vec<usize>> = HashSet::new();
    let mut total = 0u64;
    for_each_embedding(p, p, compat, |map| {
        total += 1;
        let mut image = vec![0usize; p.n_nodes()];
        for (pos, &x) in map.iter().enumerate() {
            image[plan_order[pos]] = x.id();
        }
        on_v.insert(image[..p.n_v()].to_vec());
        on_e.insert(image[p.n_v()..].to_vec());
    });
    AutomorphismCount {
        c_v: on_v.len() as u64,
        c_e: on_e.len() as u64,
        total,
        parallel: h.multi_edge_factor(),
    }
}

/// Expected realisation count in the configuration model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedCount {
    pub value: f64,
    pub excess: i64,
    /// Instance size the value refers to; `None` when the excess is 0 and the
    /// value is the limit.
    pub n: Option<usize>,
    pub automorphisms: AutomorphismCount,
}

fn node_factor(dist: &LimitDistribution, deg: usize, exact: Option<usize>) -> Result<f64> {
    Ok(match exact {
        Some(j) => falling_factorial(j, deg) * dist.pmf(j),
        None => dist.falling_moment(deg)?,
    })
}

fn vertex_factor(h: &Pattern, vdist: &LimitDistribution) -> Result<f64> {
    let g = &h.graph;
    let mut f = 1.0;
    for v in 0..g.n_v() {
        f *= node_factor(vdist, g.v_degree(v), h.exact_degree(Node::V(v)))?;
    }
    let mean = vdist.mean()?;
    Ok(f / mean.powi((g.m() - g.n_e()) as i32))
}

fn edge_factor(h: &Pattern, edist: &LimitDistribution) -> Result<f64> {
    let g = &h.graph;
    let mean = edist.mean()?;
    let mut f = 1.0;
    for e in 0..g.n_e() {
        f *= node_factor(edist, g.e_degree(e), h.exact_degree(Node::E(e)))? / mean;
    }
    Ok(f)
}

fn assemble(h: &Pattern, vf: f64, ef: f64, n: usize) -> ExpectedCount {
    let aut = automorphisms(h);
    let exc = h.excess();
    let scale = (n as f64).powi(-exc as i32);
    ExpectedCount {
        value: scale * vf * ef / aut.denominator() as f64,
        excess: exc,
        n: (exc != 0).then_some(n),
        automorphisms: aut,
    }
}

/// `n^-exc · Π E[(dᵛ)_deg] · Π E[(dᵉ)_deg] / (|Aut| · (E dᵛ)^(m-k_e) · (E dᵉ)^k_e)`.
///
/// Decorated nodes use `(j)_deg · d(j)` in place of the falling moment.
pub fn expected_realisations(
    h: &Pattern,
    vdist: &LimitDistribution,
    edist: &LimitDistribution,
    n: usize,
) -> Result<ExpectedCount> {
    let vf = vertex_factor(h, vdist)?;
    let ef = edge_factor(h, edist)?;
    Ok(assemble(h, vf, ef, n))
}

/// Graph case: every edge node has size 2 and the edge factor is exactly 1.
pub fn graph_case_reduction(h: &Pattern, vdist: &LimitDistribution, n: usize) -> Result<ExpectedCount> {
    let g = &h.graph;
    if (0..g.n_e()).any(|e| g.e_degree(e) != 2) {
        return Err(Error::Precondition("graph case needs every edge node of degree 2".into()));
    }
    let vf = vertex_factor(h, vdist)?;
    Ok(assemble(h, vf, 1.0, n))
}

/// Mean number of double hyper-edges:
/// `E[(dᵛ)₂]² E[(dᵉ)₂]² / (4 (E dᵛ)² (E dᵉ)²)`.
pub fn lambda_hypergraph(vdist: &LimitDistribution, edist: &LimitDistribution) -> Result<f64> {
    let (v2, e2) = (vdist.falling_moment(2)?, edist.falling_moment(2)?);
    let (v1, e1) = (vdist.mean()?, edist.mean()?);
    Ok(v2 * v2 * e2 * e2 / (4.0 * v1 * v1 * e1 * e1))
}

/// Mean number of repeated (v, e) pairs: `E[(dᵛ)₂] E[(dᵉ)₂] / (2 E dᵛ E dᵉ)`.
pub fn lambda_loops(vdist: &LimitDistribution, edist: &LimitDistribution) -> Result<f64> {
    let (v2, e2) = (vdist.falling_moment(2)?, edist.falling_moment(2)?);
    let (v1, e1) = (vdist.mean()?, edist.mean()?);
    Ok(v2 * e2 / (2.0 * v1 * e1))
}

/// Limit probability of no double hyper-edge, `exp(-λ)`.
pub fn prob_hypergraph(vdist: &LimitDistribution, edist: &LimitDistribution) -> Result<f64> {
    Ok((-lambda_hypergraph(vdist, edist)?).exp())
}
