//! Limit theories: the axiom schemes X, Y, Z, contiguity, distinguishing
//! sentences and limiting probabilities of unicyclic events.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eval::CompiledSentence;
use super::formula::{var, Formula};
use crate::bgw::{BgwTree, TreeNode};
use crate::census::{double_edge, expected_realisations, Pattern};
use crate::degree_model::{pair_sequences_or_drop, DegreeSet, LimitDistribution};
use crate::incidence::{IncidenceGraph, Node, Side};
use crate::rng::SeedTree;
use crate::sampler::{ConfigurationSampler, SampleOptions};
use crate::stats::binomial_std_error;
use crate::{Error, Result};

/// The pair of supports a limit theory depends on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LimitTheorySpec {
    pub supp_v: DegreeSet,
    pub supp_e: DegreeSet,
}

impl LimitTheorySpec {
    pub fn new(supp_v: DegreeSet, supp_e: DegreeSet) -> Result<Self> {
        if supp_e.min().is_some_and(|k| k < 2) {
            return Err(Error::InvalidDistribution(format!(
                "edge support {supp_e} contains a size below 2"
            )));
        }
        Ok(LimitTheorySpec { supp_v, supp_e })
    }

    pub fn from_distributions(vdist: &LimitDistribution, edist: &LimitDistribution) -> Result<Self> {
        Self::new(vdist.support(), edist.support())
    }

    pub fn supports(&self, side: Side) -> &DegreeSet {
        match side {
            Side::V => &self.supp_v,
            Side::E => &self.supp_e,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axiom {
    pub name: String,
    pub scheme: Scheme,
    pub formula: Formula,
}

#[derive(Debug, Clone, Default)]
pub struct AxiomBounds {
    /// Z axioms for all `r + s ≤ z_total`.
    pub z_total: usize,
    /// Y axioms for excluded degrees up to this bound.
    pub y_max_degree: usize,
    /// Trees for X axioms, each with `m = 1..=x_max_m`.
    pub trees: Vec<BgwTree>,
    pub x_max_m: usize,
}

/// `Z_{r,s}`: no `r` vertices and `s` edges carry `r + s + 1` ∈-edges.
pub fn z_axiom(r: usize, s: usize) -> Formula {
    let xs: Vec<String> = (0..r).map(|i| format!("x{i}")).collect();
    let ys: Vec<String> = (0..s).map(|j| format!("y{j}")).collect();
    let mut parts: Vec<Formula> = xs.iter().map(|x| Formula::IsVertex(x.clone())).collect();
    parts.extend(ys.iter().map(|y| Formula::IsEdge(y.clone())));
    for group in [&xs, &ys] {
        for (i, a) in group.iter().enumerate() {
            for b in &group[i + 1..] {
                parts.push(Formula::ne(a, b));
            }
        }
    }
    let cells: Vec<(usize, usize)> = (0..r).flat_map(|i| (0..s).map(move |j| (i, j))).collect();
    let need = r + s + 1;
    let mut options = Vec::new();
    for_each_subset(cells.len(), need, &mut |subset| {
        options.push(Formula::And(
            subset
                .iter()
                .map(|&c| Formula::is_in(&xs[cells[c].0], &ys[cells[c].1]))
                .collect(),
        ));
    });
    parts.push(Formula::Or(options));
    let names: Vec<&str> = xs.iter().chain(&ys).map(String::as_str).collect();
    Formula::exists_all(&names, Formula::And(parts)).not()
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    if k <= n {
        rec(0, n, k, &mut Vec::new(), f);
    }
}

/// `Y_k` on `side`: no node of that side has exactly `k` ∈-neighbours.
pub fn y_axiom(side: Side, k: usize) -> Formula {
    let kind = match side {
        Side::V => Formula::IsVertex(var("x")),
        Side::E => Formula::IsEdge(var("x")),
    };
    Formula::exists("x", Formula::And(vec![kind, Formula::Deg(var("x"), k)])).not()
}

/// Whether every degree of the complete tree lies in the supports.
pub fn tree_in_theory(t: &BgwTree, spec: &LimitTheorySpec) -> bool {
    !t.truncated
        && t
            .degrees()
            .into_iter()
            .all(|(side, d)| spec.supports(side).contains(d))
}

/// `X^T_m`: at least `m` node-disjoint exact realisations of the complete
/// tree `t` (every node with exactly its degree in `t`).
pub fn x_axiom(t: &BgwTree, m: usize) -> Result<Formula> {
    if t.truncated {
        return Err(Error::Unscoreable(t.max_depth.unwrap_or(0)));
    }
    // Preorder nodes with parent index and degree.
    let mut nodes: Vec<(Side, Option<usize>, usize)> = Vec::new();
    fn walk(node: &TreeNode, parent: Option<usize>, out: &mut Vec<(Side, Option<usize>, usize)>) {
        let me = out.len();
        out.push((node.side, parent, node.children.len() + usize::from(parent.is_some())));
        for c in &node.children {
            walk(c, Some(me), out);
        }
    }
    walk(&t.root, None, &mut nodes);
    let name = |copy: usize, i: usize| format!("t{copy}_{i}");
    let mut chain: Vec<(String, Vec<Formula>)> = Vec::new();
    for copy in 0..m {
        for (i, &(side, parent, degree)) in nodes.iter().enumerate() {
            let x = name(copy, i);
            let mut cs = Vec::new();
            if let Some(p) = parent {
                let px = name(copy, p);
                cs.push(match side {
                    Side::V => Formula::is_in(&x, &px),
                    Side::E => Formula::is_in(&px, &x),
                });
            }
            cs.push(match side {
                Side::V => Formula::IsVertex(x.clone()),
                Side::E => Formula::IsEdge(x.clone()),
            });
            cs.push(Formula::Deg(x.clone(), degree));
            for (j, &(other, _, _)) in nodes[..i].iter().enumerate() {
                if other == side {
                    cs.push(Formula::ne(&x, &name(copy, j)));
                }
            }
            if i == 0 {
                for earlier in 0..copy {
                    for j in 0..nodes.len() {
                        cs.push(Formula::ne(&x, &name(earlier, j)));
                    }
                }
            }
            chain.push((x, cs));
        }
    }
    Ok(chain.into_iter().rev().fold(Formula::True, |inner, (x, mut cs)| {
        cs.push(inner);
        Formula::Exists(x, Box::new(Formula::And(cs)))
    }))
}

/// Concrete instances of the three schemes within `bounds`.
pub fn instantiate_axioms(spec: &LimitTheorySpec, bounds: &AxiomBounds) -> Result<Vec<Axiom>> {
    let mut out = Vec::new();
    for total in 0..=bounds.z_total {
        for r in 0..=total {
            let s = total - r;
            out.push(Axiom {
                name: format!("Z_{r}_{s}"),
                scheme: Scheme::Z,
                formula: z_axiom(r, s),
            });
        }
    }
    for side in [Side::V, Side::E] {
        let from = if side == Side::E { 2 } else { 0 };
        for k in from..=bounds.y_max_degree {
            if !spec.supports(side).contains(k) {
                let tag = if side == Side::V { "v" } else { "e" };
                out.push(Axiom {
                    name: format!("Y{tag}_{k}"),
                    scheme: Scheme::Y,
                    formula: y_axiom(side, k),
                });
            }
        }
    }
    for (i, t) in bounds.trees.iter().enumerate() {
        if !tree_in_theory(t, spec) {
            return Err(Error::NotInTheory(format!(
                "tree {i} has a degree outside the supports or is truncated"
            )));
        }
        for m in 1..=bounds.x_max_m {
            out.push(Axiom {
                name: format!("X_{i}_{m}"),
                scheme: Scheme::X,
                formula: x_axiom(t, m)?,
            });
        }
    }
    Ok(out)
}

/// Structural check of `Y_k` on `side`, matching the sentence: nodes without
/// members count as vertices.
pub fn y_holds(g: &IncidenceGraph, side: Side, k: usize) -> bool {
    let vertex_like = (0..g.n_v())
        .map(|v| g.v_neighbors(v).len())
        .chain((0..g.n_e()).filter(|&e| g.e_neighbors(e).is_empty()).map(|_| 0));
    match side {
        Side::V => vertex_like.into_iter().all(|d| d != k),
        Side::E => (0..g.n_e())
            .map(|e| g.e_neighbors(e).len())
            .filter(|&d| d > 0)
            .all(|d| d != k),
    }
}

/// Structural check of `Z_{r,s}`: searches connected node sets with at most
/// `r` vertices and `s` edges and more distinct ∈-pairs than nodes. A
/// violating set extends to one with exactly `r` vertices and `s` edges
/// whenever the graph has that many, and any violating set has a violating
/// component.
pub fn z_holds(g: &IncidenceGraph, r: usize, s: usize) -> bool {
    // Memberless edge nodes satisfy neither v(x) nor e(x) as intended: they
    // count as vertices in the sentence.
    let edges = (0..g.n_e()).filter(|&e| !g.e_neighbors(e).is_empty()).count();
    let vertices = g.n_v() + (g.n_e() - edges);
    if vertices < r || edges < s {
        return true;
    }
    let n = g.n_nodes();
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|i| g.neighbors(g.node(i)).map(|(y, _)| g.index(y)).collect())
        .collect();
    let nv = g.n_v();
    let mut in_set = vec![false; n];
    let mut near = vec![0u32; n];
    let caps = [r, s];
    for start in 0..n {
        let side = usize::from(start >= nv);
        if caps[side] == 0 {
            continue;
        }
        let mut counts = [0usize; 2];
        counts[side] = 1;
        in_set[start] = true;
        for &u in &neighbours[start] {
            near[u] += 1;
        }
        let ext: Vec<usize> = neighbours[start].iter().copied().filter(|&u| u > start).collect();
        let found = esu(&neighbours, nv, start, &mut in_set, &mut near, ext, counts, 0, caps);
        for &u in &neighbours[start] {
            near[u] -= 1;
        }
        in_set[start] = false;
        if found {
            return false;
        }
    }
    true
}

/// Enumerates connected extensions of the current set (each once); returns
/// whether one has more pairs than nodes.
#[allow(clippy::too_many_arguments)]
fn esu(
    nb: &[Vec<usize>],
    nv: usize,
    start: usize,
    in_set: &mut [bool],
    near: &mut [u32],
    mut ext: Vec<usize>,
    counts: [usize; 2],
    pairs: usize,
    caps: [usize; 2],
) -> bool {
    if pairs > counts[0] + counts[1] {
        return true;
    }
    while let Some(w) = ext.pop() {
        let side = usize::from(w >= nv);
        if counts[side] == caps[side] {
            continue;
        }
        let added = near[w] as usize;
        // Exclusive neighbourhood of w: not in the set, not adjacent to it.
        let mut next = ext.clone();
        next.extend(nb[w].iter().copied().filter(|&u| u > start && !in_set[u] && near[u] == 0));
        in_set[w] = true;
        for &u in &nb[w] {
            near[u] += 1;
        }
        let mut c = counts;
        c[side] += 1;
        let found = esu(nb, nv, start, in_set, near, next, c, pairs + added, caps);
        for &u in &nb[w] {
            near[u] -= 1;
        }
        in_set[w] = false;
        if found {
            return true;
        }
    }
    false
}

/// First-order contiguity: equal support pairs.
pub fn contiguous(a: &LimitTheorySpec, b: &LimitTheorySpec) -> bool {
    a == b
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonPrediction {
    pub lambda: f64,
    pub p_at_least_one: f64,
}

/// Limiting mean and probability of at least one realisation of a
/// unicyclic (possibly decorated) pattern.
pub fn poisson_prediction(
    h: &Pattern,
    vdist: &LimitDistribution,
    edist: &LimitDistribution,
) -> Result<PoissonPrediction> {
    if h.excess() != 0 {
        return Err(Error::NotUnicyclic(h.excess()));
    }
    let lambda = expected_realisations(h, vdist, edist, 1)?.value;
    Ok(PoissonPrediction {
        lambda,
        p_at_least_one: 1.0 - (-lambda).exp(),
    })
}

/// Sentence separating two limit laws, with its predicted limiting
/// probabilities under each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distinguisher {
    pub formula: Formula,
    pub description: String,
    pub mu_first: f64,
    pub mu_second: f64,
}

fn same_law(a: &LimitDistribution, b: &LimitDistribution) -> bool {
    first_difference(a, b, 0).is_none()
}

/// Degrees `>= from` at which the masses differ, in increasing order.
fn differences(a: &LimitDistribution, b: &LimitDistribution, from: usize) -> Vec<usize> {
    let bound = match (a.support().max(), b.support().max()) {
        (Some(x), Some(y)) => x.max(y),
        _ => {
            let mut k = 0;
            let (mut ca, mut cb) = (0.0, 0.0);
            while (ca < 1.0 - 1e-13 || cb < 1.0 - 1e-13) && k < 100_000 {
                ca += a.pmf(k);
                cb += b.pmf(k);
                k += 1;
            }
            k
        }
    };
    (from..=bound)
        .filter(|&k| {
            let (p, q) = (a.pmf(k), b.pmf(k));
            (p - q).abs() > 1e-12 * p.max(q).max(f64::MIN_POSITIVE)
        })
        .collect()
}

fn first_difference(a: &LimitDistribution, b: &LimitDistribution, from: usize) -> Option<usize> {
    differences(a, b, from).into_iter().next()
}

/// Two edges on the same two vertices, with one node of `side` of exact
/// degree `k`.
fn decorated_double_edge(side: Side, k: usize) -> (Pattern, Formula) {
    let pattern = match side {
        Side::V => double_edge().with_exact_degree(Node::V(0), k),
        Side::E => double_edge().with_exact_degree(Node::E(0), k),
    };
    let formula = match side {
        Side::V => double_edge_sentence(Some(k), None),
        Side::E => double_edge_sentence(None, Some(k)),
    };
    (pattern, formula)
}

/// `∃` two distinct edges `e`, `f` sharing distinct vertices `a`, `b`, with
/// optional exact degrees on `a` and on `e`.
pub fn double_edge_sentence(vertex_degree: Option<usize>, edge_degree: Option<usize>) -> Formula {
    let inner_f = Formula::exists(
        "f",
        Formula::And(vec![Formula::is_in("a", "f"), Formula::is_in("b", "f"), Formula::ne("f", "e")]),
    );
    let inner_b = Formula::exists(
        "b",
        Formula::And(vec![Formula::is_in("b", "e"), Formula::ne("b", "a"), inner_f]),
    );
    let mut e_parts = vec![Formula::is_in("a", "e")];
    if let Some(k) = edge_degree {
        e_parts.push(Formula::Deg(var("e"), k));
    }
    e_parts.push(inner_b);
    let inner_e = Formula::exists("e", Formula::And(e_parts));
    let mut a_parts = vec![Formula::IsVertex(var("a"))];
    if let Some(k) = vertex_degree {
        a_parts.push(Formula::Deg(var("a"), k));
    }
    a_parts.push(inner_e);
    Formula::exists("a", Formula::And(a_parts))
}

/// A sentence whose limiting probabilities differ between the two pairs of
/// laws, or `None` when the pairs are equal.
///
/// Different supports give a `Y` axiom (limits 1 and 0). Equal supports give
/// a double edge decorated with an exact degree at which the laws differ,
/// whose realisation count is asymptotically Poisson with different means.
/// Pairs whose vertex laws live on `{0, 1}` have no cycles in the limit and
/// are rejected when they differ.
pub fn distinguishing_formula(
    vdist1: &LimitDistribution,
    edist1: &LimitDistribution,
    vdist2: &LimitDistribution,
    edist2: &LimitDistribution,
) -> Result<Option<Distinguisher>> {
    let s1 = LimitTheorySpec::from_distributions(vdist1, edist1)?;
    let s2 = LimitTheorySpec::from_distributions(vdist2, edist2)?;
    for (side, a, b) in [(Side::V, &s1.supp_v, &s2.supp_v), (Side::E, &s1.supp_e, &s2.supp_e)] {
        let bound = a.agreement_bound(b);
        if let Some(&k) = a.symmetric_difference_up_to(b, bound).first() {
            let in_first = a.contains(k);
            let tag = if side == Side::V { "vertex" } else { "edge" };
            return Ok(Some(Distinguisher {
                formula: y_axiom(side, k),
                description: format!("no {tag} of degree {k}"),
                mu_first: if in_first { 0.0 } else { 1.0 },
                mu_second: if in_first { 1.0 } else { 0.0 },
            }));
        }
    }
    if same_law(vdist1, vdist2) && same_law(edist1, edist2) {
        return Ok(None);
    }
    let mut candidates: Vec<(Side, Option<usize>)> = Vec::new();
    candidates.extend(differences(vdist1, vdist2, 2).into_iter().map(|k| (Side::V, Some(k))));
    candidates.extend(differences(edist1, edist2, 2).into_iter().map(|k| (Side::E, Some(k))));
    candidates.push((Side::V, None));
    for (side, k) in candidates {
        let (pattern, formula) = match k {
            Some(k) => decorated_double_edge(side, k),
            None => (double_edge(), double_edge_sentence(None, None)),
        };
        let p1 = poisson_prediction(&pattern, vdist1, edist1);
        let p2 = poisson_prediction(&pattern, vdist2, edist2);
        let (Ok(p1), Ok(p2)) = (p1, p2) else { continue };
        if (p1.lambda - p2.lambda).abs() > 1e-9 * p1.lambda.max(p2.lambda) {
            let description = match k {
                Some(k) => format!(
                    "double edge with a {} of degree exactly {k}",
                    if side == Side::V { "vertex" } else { "edge" }
                ),
                None => "double edge".to_string(),
            };
            return Ok(Some(Distinguisher {
                formula,
                description,
                mu_first: p1.p_at_least_one,
                mu_second: p2.p_at_least_one,
            }));
        }
    }
    Err(Error::Precondition(
        "the laws differ but no cycle event separates them (vertex degrees at most 1)".into(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub n: usize,
    pub samples: usize,
    pub successes: usize,
    pub mean: f64,
    pub std_error: f64,
}

/// Monte Carlo estimate of `P(G_n ⊨ f)` for each `n`. Size `i` uses seed
/// subtree `i`; sample `j` uses index `j` below it.
pub fn estimate_limiting_probability(
    f: &Formula,
    vdist: &LimitDistribution,
    edist: &LimitDistribution,
    n_list: &[usize],
    samples: usize,
    opts: &SampleOptions,
) -> Result<Vec<ProbabilityEstimate>> {
    let sentence = CompiledSentence::new(f)?;
    let root = SeedTree::new(opts.seed);
    n_list
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let pair = pair_sequences_or_drop(vdist, edist, n)?;
            let sampler = ConfigurationSampler::new(&pair)?;
            let tree = root.child(i as u64);
            let hits: Vec<bool> = (0..samples as u64)
                .into_par_iter()
                .map(|j| {
                    let s = sampler.sample_at(&tree, j, opts.conditioning, opts.max_rejections)?;
                    Ok(sentence.evaluate(&s.graph))
                })
                .collect::<Result<_>>()?;
            let successes = hits.iter().filter(|&&h| h).count();
            let mean = successes as f64 / samples.max(1) as f64;
            Ok(ProbabilityEstimate {
                n,
                samples,
                successes,
                mean,
                std_error: binomial_std_error(mean, samples as u64),
            })
        })
        .collect()
}

/// Frequency of `f` among graphs satisfying `condition`, computed both by
/// filtering and as the ratio of joint to marginal counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalFrequency {
    pub filtered: Option<f64>,
    pub ratio: Option<f64>,
}

pub fn conditional_frequency(f: &Formula, condition: &Formula, graphs: &[IncidenceGraph]) -> Result<ConditionalFrequency> {
    let fs = CompiledSentence::new(f)?;
    let cs = CompiledSentence::new(condition)?;
    let joint_sentence = CompiledSentence::new(&Formula::And(vec![f.clone(), condition.clone()]))?;
    let kept: Vec<&IncidenceGraph> = graphs.iter().filter(|g| cs.evaluate(g)).collect();
    let filtered = (!kept.is_empty())
        .then(|| kept.iter().filter(|g| fs.evaluate(g)).count() as f64 / kept.len() as f64);
    let joint = graphs.iter().filter(|g| joint_sentence.evaluate(g)).count() as f64 / graphs.len().max(1) as f64;
    let marginal = kept.len() as f64 / graphs.len().max(1) as f64;
    let ratio = (marginal > 0.0).then(|| joint / marginal);
    Ok(ConditionalFrequency { filtered, ratio })
}

/// Complete paths `V - E - V - ... - V` with `vertices` vertices, rooted at
/// one end.
pub fn vertex_path(vertices: usize) -> BgwTree {
    assert!(vertices >= 1);
    let mut node = TreeNode::leaf(Side::V);
    for _ in 1..vertices {
        node = TreeNode::with_children(Side::V, vec![TreeNode::with_children(Side::E, vec![node])]);
    }
    BgwTree::complete(node).expect("paths alternate")
}

/// Degrees `k ≤ bound` outside the support, for reporting.
pub fn excluded_degrees(set: &DegreeSet, from: usize, bound: usize) -> BTreeSet<usize> {
    (from..=bound).filter(|&k| !set.contains(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::tests::arb_fragment;
    use crate::logic::eval::evaluate;
    use crate::logic::sentences::{double_hyperedge, phi_graph};
    use crate::census::theta;
    use crate::sampler::{sample_incidence, Conditioning};
    use proptest::prelude::*;

    fn spec(v: &[usize], e: &[usize]) -> LimitTheorySpec {
        LimitTheorySpec::new(DegreeSet::finite(v.iter().copied()), DegreeSet::finite(e.iter().copied())).unwrap()
    }

    #[test]
    fn edge_support_below_two_is_rejected() {
        assert!(LimitTheorySpec::new(DegreeSet::finite([1]), DegreeSet::finite([1, 2])).is_err());
    }

    #[test]
    fn y_axioms_cover_the_complement() {
        let axioms = instantiate_axioms(
            &spec(&[3], &[2]),
            &AxiomBounds {
                y_max_degree: 5,
                ..Default::default()
            },
        )
        .unwrap();
        let names: Vec<&str> = axioms
            .iter()
            .filter(|a| a.scheme == Scheme::Y)
            .map(|a| a.name.as_str())
            .collect();
        assert_eq!(names, ["Yv_0", "Yv_1", "Yv_2", "Yv_4", "Yv_5", "Ye_3", "Ye_4", "Ye_5"]);
        assert_eq!(axioms.iter().filter(|a| a.scheme == Scheme::Z).count(), 1);
    }

    #[test]
    fn x_axiom_rejects_unrealisable_trees() {
        let bounds = AxiomBounds {
            trees: vec![vertex_path(1)],
            x_max_m: 1,
            ..Default::default()
        };
        assert!(matches!(
            instantiate_axioms(&spec(&[3], &[2]), &bounds),
            Err(Error::NotInTheory(_))
        ));
        let ok = spec(&[0, 1, 2], &[2]);
        let bounds = AxiomBounds {
            trees: vec![vertex_path(1), vertex_path(2), vertex_path(3)],
            x_max_m: 2,
            ..Default::default()
        };
        assert_eq!(instantiate_axioms(&ok, &bounds).unwrap().len(), 1 + 6);
    }

    #[test]
    fn x_axiom_counts_components() {
        // Two isolated edges, a path with two edges, one isolated vertex.
        let g = IncidenceGraph::new(8, 4, [(0, 0), (1, 0), (2, 1), (3, 1), (4, 2), (5, 2), (5, 3), (6, 3)]).unwrap();
        let holds = |t: &BgwTree, m: usize| evaluate(&x_axiom(t, m).unwrap(), &g).unwrap();
        assert!(holds(&vertex_path(1), 1));
        assert!(!holds(&vertex_path(1), 2));
        assert!(holds(&vertex_path(2), 2));
        assert!(!holds(&vertex_path(2), 3));
        assert!(holds(&vertex_path(3), 1));
        assert!(!holds(&vertex_path(3), 2));
        assert!(!holds(&vertex_path(4), 1));
        // Rooting the same path in the middle gives the same sentence truth.
        let mid = BgwTree::complete(TreeNode::with_children(
            Side::V,
            vec![
                TreeNode::with_children(Side::E, vec![TreeNode::leaf(Side::V)]),
                TreeNode::with_children(Side::E, vec![TreeNode::leaf(Side::V)]),
            ],
        ))
        .unwrap();
        assert!(holds(&mid, 1));
        assert!(!holds(&mid, 2));
    }

    #[test]
    fn z_axioms_of_small_size_are_valid() {
        // Relational ∈ on r vertices and s edges has at most r·s pairs.
        for r in 0..=4 {
            for s in 0..=4 - r {
                let f = z_axiom(r, s);
                assert!(f.is_sentence());
                for g in [IncidenceGraph::empty(3), crate::incidence::tests::double_edge_and_triangle().to_incidence()] {
                    assert!(evaluate(&f, &g).unwrap(), "Z_{r},{s}");
                    assert!(z_holds(&g, r, s));
                }
            }
        }
        // K_{2,3}: two vertices in three common edges.
        let theta = IncidenceGraph::new(2, 3, [(0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (1, 2)]).unwrap();
        assert!(!evaluate(&z_axiom(2, 3), &theta).unwrap());
        assert!(!z_holds(&theta, 2, 3));
        assert!(z_holds(&theta, 3, 2));
        assert!(evaluate(&z_axiom(3, 2), &theta).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(80))]
        #[test]
        fn structural_checks_match_sentences(g in arb_fragment(4, 3, 10)) {
            for k in 0..=4 {
                for side in [Side::V, Side::E] {
                    prop_assert_eq!(y_holds(&g, side, k), evaluate(&y_axiom(side, k), &g).unwrap());
                }
            }
            for r in 0..=3 {
                for s in 0..=3 - r / 2 {
                    prop_assert_eq!(z_holds(&g, r, s), evaluate(&z_axiom(r, s), &g).unwrap(), "Z_{},{}", r, s);
                }
            }
        }

        #[test]
        fn contiguity_is_an_equivalence(a in 0usize..4, b in 0usize..4, c in 0usize..4) {
            let specs = [spec(&[3], &[2]), spec(&[2, 3], &[2]), spec(&[3], &[2]), spec(&[1, 3], &[2, 3])];
            let (x, y, z) = (&specs[a], &specs[b], &specs[c]);
            prop_assert!(contiguous(x, x));
            prop_assert_eq!(contiguous(x, y), contiguous(y, x));
            if contiguous(x, y) && contiguous(y, z) {
                prop_assert!(contiguous(x, z));
            }
        }
    }

    #[test]
    fn contiguity_examples() {
        let e = LimitDistribution::dirac(2);
        let p2 = LimitTheorySpec::from_distributions(&LimitDistribution::poisson(2.0), &e).unwrap();
        let p7 = LimitTheorySpec::from_distributions(&LimitDistribution::poisson(7.0), &e).unwrap();
        assert!(contiguous(&p2, &p7));
        assert!(!contiguous(&spec(&[3], &[2]), &spec(&[2, 3], &[2])));
        assert!(contiguous(&spec(&[3], &[2]), &spec(&[3], &[2])));
    }

    #[test]
    fn poisson_prediction_examples() {
        let c4 = double_edge();
        let p = poisson_prediction(&c4, &LimitDistribution::dirac(3), &LimitDistribution::dirac(2)).unwrap();
        assert!((p.lambda - 1.0).abs() < 1e-12);
        assert!((p.p_at_least_one - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        let p = poisson_prediction(&c4, &LimitDistribution::dirac(2), &LimitDistribution::dirac(2)).unwrap();
        assert!((p.lambda - 0.25).abs() < 1e-12);
        let theta = theta(2, 2, 2, Side::V);
        assert!(matches!(
            poisson_prediction(&theta, &LimitDistribution::dirac(3), &LimitDistribution::dirac(2)),
            Err(Error::NotUnicyclic(1))
        ));
    }

    #[test]
    fn distinguishing_examples() {
        let (d3, d2) = (LimitDistribution::dirac(3), LimitDistribution::dirac(2));
        assert!(distinguishing_formula(&d3, &d2, &d3, &d2).unwrap().is_none());

        let mixed = LimitDistribution::finite([(2, 0.5), (3, 0.5)]);
        let d = distinguishing_formula(&d3, &d2, &mixed, &d2).unwrap().unwrap();
        assert_eq!(d.formula, y_axiom(Side::V, 2));
        assert_eq!((d.mu_first, d.mu_second), (1.0, 0.0));

        let other = LimitDistribution::finite([(2, 0.25), (3, 0.75)]);
        let d = distinguishing_formula(&mixed, &d2, &other, &d2).unwrap().unwrap();
        assert!(d.description.contains("degree exactly 2"), "{}", d.description);
        // Oracle: decorated double edge, vertex a of degree 2.
        // λ = [2·1·p(2)] · E[(d)_2] / (2 · (E d)^2), since the edge factors are 1.
        let lam = |p2: f64, p3: f64| {
            let mean = 2.0 * p2 + 3.0 * p3;
            let fm2 = 2.0 * p2 + 6.0 * p3;
            (2.0 * p2) * fm2 / (2.0 * mean * mean)
        };
        let (l1, l2) = (lam(0.5, 0.5), lam(0.25, 0.75));
        assert!((d.mu_first - (1.0 - (-l1).exp())).abs() < 1e-12);
        assert!((d.mu_second - (1.0 - (-l2).exp())).abs() < 1e-12);
        assert!(d.formula.is_sentence());

        let t1 = LimitDistribution::finite([(0, 0.5), (1, 0.5)]);
        let t2 = LimitDistribution::finite([(0, 0.3), (1, 0.7)]);
        assert!(distinguishing_formula(&t1, &d2, &t2, &d2).is_err());
    }

    #[test]
    fn double_edge_sentence_matches_structure() {
        let g = crate::incidence::tests::double_edge_and_triangle().to_incidence();
        assert!(evaluate(&double_edge_sentence(None, None), &g).unwrap());
        assert!(evaluate(&double_edge_sentence(Some(3), None), &g).unwrap());
        assert!(!evaluate(&double_edge_sentence(Some(1), None), &g).unwrap());
        assert!(!evaluate(&double_edge_sentence(None, Some(3)), &g).unwrap());
        assert!(evaluate(&double_edge_sentence(None, Some(2)), &g).unwrap());
    }

    #[test]
    fn estimate_examples() {
        let (d3, d2) = (LimitDistribution::dirac(3), LimitDistribution::dirac(2));
        let opts = SampleOptions::new(5, Conditioning::None);
        let est = estimate_limiting_probability(&crate::logic::sentences::tautology(), &d3, &d2, &[50, 100], 20, &opts)
            .unwrap();
        assert!(est.iter().all(|e| e.mean == 1.0 && e.std_error == 0.0));
        let z = estimate_limiting_probability(&z_axiom(1, 1), &d3, &d2, &[200], 20, &opts).unwrap();
        assert_eq!(z[0].mean, 1.0);
        let a = estimate_limiting_probability(&double_hyperedge(), &d3, &d2, &[400], 30, &opts).unwrap();
        let b = estimate_limiting_probability(&double_hyperedge(), &d3, &d2, &[400], 30, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn subclass_conditioning_identity() {
        let (d3, d2) = (LimitDistribution::dirac(3), LimitDistribution::dirac(2));
        let pair = pair_sequences_or_drop(&d3, &d2, 30).unwrap();
        let graphs: Vec<IncidenceGraph> = (0..200)
            .map(|s| sample_incidence(&pair, &SampleOptions::new(s, Conditioning::None)).unwrap().graph)
            .collect();
        for f in [double_hyperedge(), crate::logic::sentences::isolated_vertex(), y_axiom(Side::V, 3)] {
            let c = conditional_frequency(&f, &phi_graph(), &graphs).unwrap();
            assert!(c.filtered.is_some());
            assert_eq!(c.filtered, c.ratio);
        }
    }
}
