//! Two-sorted Galton–Watson process: the local limit of the model seen from
//! a uniform root.
//!
//! The root draws its number of children from the plain law of its side;
//! every other node draws from the size-biased law `d*` of its side, so its
//! degree is one more than its number of children.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degree_model::{DegreeSampler, LimitDistribution};
use crate::incidence::{canonical_type, IncidenceGraph, Node, RootedBall, RootedType, Side};
use crate::rng::SeedTree;
use crate::stats::frequencies;
use crate::{Error, Result};

/// Laws of the process rooted on `root_side`.
#[derive(Debug, Clone)]
pub struct BgwSpec {
    vdist: LimitDistribution,
    edist: LimitDistribution,
    root_side: Side,
    v_star: Option<LimitDistribution>,
    e_star: Option<LimitDistribution>,
}

impl BgwSpec {
    pub fn new(vdist: LimitDistribution, edist: LimitDistribution, root_side: Side) -> Result<Self> {
        vdist.validate()?;
        edist.validate()?;
        let star = |d: &LimitDistribution| match d.mean() {
            Ok(m) if m > 0.0 => d.size_biased().map(Some),
            Ok(_) => Ok(None),
            Err(e) => Err(e),
        };
        let v_star = star(&vdist)?;
        let e_star = star(&edist)?;
        if e_star.is_none() || (root_side == Side::E && v_star.is_none()) {
            return Err(Error::Degenerate(
                "an offspring law reachable from the root has mean 0".into(),
            ));
        }
        Ok(BgwSpec {
            vdist,
            edist,
            root_side,
            v_star,
            e_star,
        })
    }

    pub fn vdist(&self) -> &LimitDistribution {
        &self.vdist
    }

    pub fn edist(&self) -> &LimitDistribution {
        &self.edist
    }

    pub fn root_side(&self) -> Side {
        self.root_side
    }

    /// Plain degree law of `side`.
    pub fn degree_law(&self, side: Side) -> &LimitDistribution {
        match side {
            Side::V => &self.vdist,
            Side::E => &self.edist,
        }
    }

    /// Law of the number of children of a node on `side`.
    pub fn offspring_law(&self, side: Side, is_root: bool) -> Option<&LimitDistribution> {
        match (side, is_root) {
            (_, true) => Some(self.degree_law(side)),
            (Side::V, false) => self.v_star.as_ref(),
            (Side::E, false) => self.e_star.as_ref(),
        }
    }

    /// Probability that a node on `side` has `children` children.
    fn offspring_pmf(&self, side: Side, is_root: bool, children: usize) -> f64 {
        self.offspring_law(side, is_root).map_or(if children == 0 { 1.0 } else { 0.0 }, |d| {
            d.pmf(children)
        })
    }
}

/// Node of a plane tree; children sit on the other side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub side: Side,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn leaf(side: Side) -> Self {
        TreeNode {
            side,
            children: Vec::new(),
        }
    }

    /// Node on `side` whose children are the given subtrees.
    pub fn with_children(side: Side, children: Vec<TreeNode>) -> Self {
        TreeNode { side, children }
    }

    fn visit<'a>(&'a self, depth: usize, f: &mut impl FnMut(&'a TreeNode, usize)) {
        f(self, depth);
        for c in &self.children {
            c.visit(depth + 1, f);
        }
    }
}

/// Sampled or hand-built tree. `truncated` is set when a node at
/// `max_depth` had offspring that were not generated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BgwTree {
    pub root: TreeNode,
    pub max_depth: Option<usize>,
    pub truncated: bool,
}

impl BgwTree {
    /// Fully explored tree.
    pub fn complete(root: TreeNode) -> Result<Self> {
        let t = BgwTree {
            root,
            max_depth: None,
            truncated: false,
        };
        t.check_sides()?;
        Ok(t)
    }

    fn check_sides(&self) -> Result<()> {
        let mut ok = true;
        self.root.visit(0, &mut |node, _| {
            ok &= node.children.iter().all(|c| c.side == node.side.other());
        });
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidGraph("tree sides do not alternate".into()))
        }
    }

    pub fn node_count(&self) -> usize {
        let mut count = 0;
        self.root.visit(0, &mut |_, _| count += 1);
        count
    }

    pub fn depth(&self) -> usize {
        let mut depth = 0;
        self.root.visit(0, &mut |_, d| depth = depth.max(d));
        depth
    }

    /// Degree of every node, with its side, in preorder.
    pub fn degrees(&self) -> Vec<(Side, usize)> {
        let mut out = Vec::new();
        self.root.visit(0, &mut |node, depth| {
            out.push((node.side, node.children.len() + usize::from(depth > 0)));
        });
        out
    }

    /// The tree as an incidence fragment; the root becomes the first node of
    /// its side.
    pub fn to_fragment(&self) -> RootedBall {
        let mut counters = [0usize; 2];
        let mut pairs = Vec::new();
        let mut global = Vec::new();
        fn walk(
            node: &TreeNode,
            parent: Option<usize>,
            counters: &mut [usize; 2],
            pairs: &mut Vec<(usize, usize)>,
            global: &mut Vec<Node>,
        ) {
            let slot = match node.side {
                Side::V => 0,
                Side::E => 1,
            };
            let id = counters[slot];
            counters[slot] += 1;
            global.push(match node.side {
                Side::V => Node::V(id),
                Side::E => Node::E(id),
            });
            if let Some(p) = parent {
                pairs.push(match node.side {
                    Side::V => (id, p),
                    Side::E => (p, id),
                });
            }
            for c in &node.children {
                walk(c, Some(id), counters, pairs, global);
            }
        }
        walk(&self.root, None, &mut counters, &mut pairs, &mut global);
        let subgraph = IncidenceGraph::fragment(counters[0], counters[1], pairs)
            .expect("tree pairs reference existing nodes");
        // Local order is V first, then E, each by id, which is the identity here.
        let mut ordered: Vec<Node> = global;
        ordered.sort_by_key(|&x| (x.side() == Side::E, x.id()));
        let root = match self.root.side {
            Side::V => Node::V(0),
            Side::E => Node::E(0),
        };
        RootedBall {
            root,
            radius: self.max_depth.unwrap_or_else(|| self.depth()),
            subgraph,
            global: ordered,
        }
    }

    /// Canonical rooted type of the tree.
    pub fn rooted_type(&self, cap: Option<usize>) -> RootedType {
        canonical_type(&self.to_fragment(), cap)
    }
}

struct Samplers {
    root: DegreeSampler,
    v_star: Option<DegreeSampler>,
    e_star: Option<DegreeSampler>,
}

impl Samplers {
    fn new(spec: &BgwSpec) -> Result<Self> {
        Ok(Samplers {
            root: spec.degree_law(spec.root_side).sampler()?,
            v_star: spec.v_star.as_ref().map(|d| d.sampler()).transpose()?,
            e_star: spec.e_star.as_ref().map(|d| d.sampler()).transpose()?,
        })
    }

    fn draw<R: Rng + ?Sized>(&self, side: Side, is_root: bool, rng: &mut R) -> usize {
        let s = if is_root {
            Some(&self.root)
        } else {
            match side {
                Side::V => self.v_star.as_ref(),
                Side::E => self.e_star.as_ref(),
            }
        };
        s.map_or(0, |s| s.sample(rng))
    }
}

fn grow<R: Rng + ?Sized>(
    samplers: &Samplers,
    side: Side,
    depth: usize,
    max_depth: usize,
    rng: &mut R,
    truncated: &mut bool,
) -> TreeNode {
    let k = samplers.draw(side, depth == 0, rng);
    if depth == max_depth {
        *truncated |= k > 0;
        return TreeNode::leaf(side);
    }
    let children = (0..k)
        .map(|_| grow(samplers, side.other(), depth + 1, max_depth, rng, truncated))
        .collect();
    TreeNode { side, children }
}

fn sample_with<R: Rng + ?Sized>(samplers: &Samplers, spec: &BgwSpec, max_depth: usize, rng: &mut R) -> BgwTree {
    let mut truncated = false;
    let root = grow(samplers, spec.root_side, 0, max_depth, rng, &mut truncated);
    BgwTree {
        root,
        max_depth: Some(max_depth),
        truncated,
    }
}

/// One tree explored to `max_depth`, drawn from the stream `[0]` of `seed`.
pub fn sample_tree(spec: &BgwSpec, max_depth: usize, seed: u64) -> Result<BgwTree> {
    let samplers = Samplers::new(spec)?;
    Ok(sample_with(&samplers, spec, max_depth, &mut SeedTree::new(seed).rng(&[0])))
}

/// Probability of a fully explored plane tree: the product of the offspring
/// masses of its nodes.
pub fn tree_probability(t: &BgwTree, spec: &BgwSpec) -> Result<f64> {
    if t.truncated {
        return Err(Error::Unscoreable(t.max_depth.unwrap_or(0)));
    }
    Ok(product_above(t, spec, usize::MAX))
}

/// Probability that the process explored to `max_depth` equals `t`: nodes
/// at the cut depth are not scored. Sums to 1 over all plane trees of that
/// depth.
pub fn ball_probability(t: &BgwTree, spec: &BgwSpec) -> Result<f64> {
    let cut = t
        .max_depth
        .ok_or_else(|| Error::Precondition("ball probability needs a depth limit".into()))?;
    Ok(product_above(t, spec, cut))
}

fn product_above(t: &BgwTree, spec: &BgwSpec, cut: usize) -> f64 {
    if t.root.side != spec.root_side {
        return 0.0;
    }
    let mut p = 1.0;
    t.root.visit(0, &mut |node, depth| {
        if depth < cut {
            p *= spec.offspring_pmf(node.side, depth == 0, node.children.len());
        }
    });
    p
}

/// Whether every degree in the fully explored tree lies in the support of its
/// side.
pub fn realisable_tree(t: &BgwTree, spec: &BgwSpec) -> Result<bool> {
    if t.truncated {
        return Err(Error::Unscoreable(t.max_depth.unwrap_or(0)));
    }
    let (sv, se) = (spec.vdist.support(), spec.edist.support());
    Ok(t.degrees().into_iter().all(|(side, d)| match side {
        Side::V => sv.contains(d),
        Side::E => se.contains(d),
    }))
}

/// Empirical distribution of rooted types of `n_samples` trees explored to
/// `radius`. Sample `i` uses stream `[i]` of `seed`.
pub fn ball_type_distribution(
    spec: &BgwSpec,
    radius: usize,
    n_samples: usize,
    seed: u64,
) -> Result<BTreeMap<RootedType, f64>> {
    if n_samples == 0 {
        return Err(Error::Precondition("n_samples must be at least 1".into()));
    }
    let samplers = Samplers::new(spec)?;
    let tree = SeedTree::new(seed);
    let types: Vec<RootedType> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| sample_with(&samplers, spec, radius, &mut tree.rng(&[i])).rooted_type(None))
        .collect();
    let mut counts = BTreeMap::new();
    for t in types {
        *counts.entry(t).or_insert(0u64) += 1;
    }
    Ok(frequencies(&counts))
}

/// Distribution of rooted ball types over every node of `side` in `g`.
pub fn graph_ball_distribution(
    g: &IncidenceGraph,
    radius: usize,
    side: Side,
) -> Result<BTreeMap<RootedType, f64>> {
    let count = match side {
        Side::V => g.n_v(),
        Side::E => g.n_e(),
    };
    if count == 0 {
        return Err(Error::Precondition(format!("graph has no {side:?} nodes")));
    }
    let types: Vec<RootedType> = (0..count)
        .into_par_iter()
        .map(|i| {
            let root = match side {
                Side::V => Node::V(i),
                Side::E => Node::E(i),
            };
            g.ball(root, radius).map(|b| canonical_type(&b, None))
        })
        .collect::<Result<_>>()?;
    let mut counts = BTreeMap::new();
    for t in types {
        *counts.entry(t).or_insert(0u64) += 1;
    }
    Ok(frequencies(&counts))
}
