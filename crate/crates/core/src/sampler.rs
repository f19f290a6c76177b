//! Uniform configurations of the bipartite configuration model, their
//! collapse to incidence graphs, and rejection sampling under conditioning.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degree_model::SequencePair;
use crate::error::{Error, Result};
use crate::incidence::IncidenceGraph;
use crate::rng::SeedTree;
use crate::stats::binomial_std_error;

pub const DEFAULT_MAX_REJECTIONS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conditioning {
    /// Accept every configuration, repeated (v, e) pairs included.
    None,
    /// No repeated (v, e) pair.
    SimpleIncidence,
    /// Simple incidence and no two edge nodes on the same vertex set.
    Hypergraph,
    /// Hypergraph whose edges all have size 2.
    Graph,
}

impl Conditioning {
    pub fn accepts(self, g: &IncidenceGraph) -> bool {
        match self {
            Conditioning::None => true,
            Conditioning::SimpleIncidence => g.is_simple_incidence(),
            Conditioning::Hypergraph => g.is_hypergraph(),
            Conditioning::Graph => g.is_graph(),
        }
    }

    fn check_pair(self, pair: &SequencePair) -> Result<()> {
        if self == Conditioning::Graph && !pair.is_graph_like() {
            return Err(Error::Precondition(
                "graph conditioning needs every edge node to have size 2".into(),
            ));
        }
        Ok(())
    }
}

impl std::str::FromStr for Conditioning {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Conditioning::None),
            "simple_incidence" => Ok(Conditioning::SimpleIncidence),
            "hypergraph" => Ok(Conditioning::Hypergraph),
            "graph" => Ok(Conditioning::Graph),
            other => Err(Error::Precondition(format!("unknown conditioning `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleOptions {
    pub seed: u64,
    pub conditioning: Conditioning,
    pub max_rejections: u64,
}

impl SampleOptions {
    pub fn new(seed: u64, conditioning: Conditioning) -> Self {
        SampleOptions {
            seed,
            conditioning,
            max_rejections: DEFAULT_MAX_REJECTIONS,
        }
    }

    pub fn with_max_rejections(mut self, max_rejections: u64) -> Self {
        self.max_rejections = max_rejections;
        self
    }
}

/// Stub partitions plus a matching of vertex stubs to edge stubs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    v_owner: Vec<usize>,
    e_owner: Vec<usize>,
    /// `matching[i]` is the edge stub matched with vertex stub `i`.
    matching: Vec<usize>,
    n_v: usize,
    n_e: usize,
}

impl Configuration {
    /// Checks the partitions and that `matching` is a permutation.
    pub fn from_parts(
        n_v: usize,
        n_e: usize,
        v_owner: Vec<usize>,
        e_owner: Vec<usize>,
        matching: Vec<usize>,
    ) -> Result<Self> {
        let s = v_owner.len();
        if e_owner.len() != s || matching.len() != s {
            return Err(Error::Precondition("stub arrays have different lengths".into()));
        }
        if v_owner.iter().any(|&v| v >= n_v) || e_owner.iter().any(|&e| e >= n_e) {
            return Err(Error::Precondition("stub owner out of range".into()));
        }
        let mut seen = vec![false; s];
        for &j in &matching {
            if j >= s || std::mem::replace(&mut seen[j], true) {
                return Err(Error::Precondition("matching is not a permutation".into()));
            }
        }
        Ok(Configuration {
            v_owner,
            e_owner,
            matching,
            n_v,
            n_e,
        })
    }

    pub fn stubs(&self) -> usize {
        self.v_owner.len()
    }

    pub fn matching(&self) -> &[usize] {
        &self.matching
    }

    pub fn v_owner(&self) -> &[usize] {
        &self.v_owner
    }

    pub fn e_owner(&self) -> &[usize] {
        &self.e_owner
    }

    /// Merges stubs by owner; matched stub pairs become ∈-edges.
    pub fn collapse(&self) -> IncidenceGraph {
        collapse_parts(self.n_v, self.n_e, &self.v_owner, &self.e_owner, &self.matching)
    }
}

fn collapse_parts(n_v: usize, n_e: usize, v_owner: &[usize], e_owner: &[usize], matching: &[usize]) -> IncidenceGraph {
    IncidenceGraph::fragment(
        n_v,
        n_e,
        matching.iter().enumerate().map(|(i, &j)| (v_owner[i], e_owner[j])),
    )
    .expect("owners are in range")
}

pub fn collapse(c: &Configuration) -> IncidenceGraph {
    c.collapse()
}

/// Stub layout of a sequence pair, reused across samples. Node ids follow
/// ascending degree on each side.
#[derive(Debug, Clone)]
pub struct ConfigurationSampler {
    n_v: usize,
    n_e: usize,
    v_owner: Vec<usize>,
    e_owner: Vec<usize>,
    graph_like: bool,
}

fn owners(degrees: impl Iterator<Item = usize>) -> Vec<usize> {
    degrees
        .enumerate()
        .flat_map(|(node, k)| std::iter::repeat_n(node, k))
        .collect()
}

/// One accepted sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sampled {
    pub graph: IncidenceGraph,
    /// Configurations drawn, the accepted one included.
    pub attempts: u64,
}

impl ConfigurationSampler {
    pub fn new(pair: &SequencePair) -> Result<Self> {
        if pair.vertex_side.stubs() != pair.edge_side.stubs() {
            return Err(Error::Precondition("stub counts differ".into()));
        }
        Ok(ConfigurationSampler {
            n_v: pair.n_vertices(),
            n_e: pair.n_edges(),
            v_owner: owners(pair.vertex_side.degrees()),
            e_owner: owners(pair.edge_side.degrees()),
            graph_like: pair.is_graph_like(),
        })
    }

    pub fn stubs(&self) -> usize {
        self.v_owner.len()
    }

    pub fn configuration<R: Rng + ?Sized>(&self, rng: &mut R) -> Configuration {
        let mut matching: Vec<usize> = (0..self.stubs()).collect();
        matching.shuffle(rng);
        Configuration {
            v_owner: self.v_owner.clone(),
            e_owner: self.e_owner.clone(),
            matching,
            n_v: self.n_v,
            n_e: self.n_e,
        }
    }

    /// Collapsed graph of a fresh uniform matching.
    pub fn incidence<R: Rng + ?Sized>(&self, rng: &mut R) -> IncidenceGraph {
        let mut matching: Vec<usize> = (0..self.stubs()).collect();
        matching.shuffle(rng);
        collapse_parts(self.n_v, self.n_e, &self.v_owner, &self.e_owner, &matching)
    }

    /// Sample `index` of the stream `seeds`: attempt `k` uses path `[index, k]`.
    pub fn sample_at(&self, seeds: &SeedTree, index: u64, conditioning: Conditioning, max_rejections: u64) -> Result<Sampled> {
        if conditioning == Conditioning::Graph && !self.graph_like {
            return Err(Error::Precondition(
                "graph conditioning needs every edge node to have size 2".into(),
            ));
        }
        let max_rejections = max_rejections.max(1);
        for attempt in 0..max_rejections {
            let mut rng = seeds.rng(&[index, attempt]);
            let graph = self.incidence(&mut rng);
            if conditioning.accepts(&graph) {
                return Ok(Sampled {
                    graph,
                    attempts: attempt + 1,
                });
            }
        }
        Err(Error::ConditioningTooRare {
            attempts: max_rejections,
            acceptance_upper: 3.0 / max_rejections as f64,
        })
    }

    /// `count` independent samples in parallel, in index order.
    pub fn sample_many(&self, opts: &SampleOptions, count: u64) -> Result<Vec<Sampled>> {
        let seeds = SeedTree::new(opts.seed);
        (0..count)
            .into_par_iter()
            .map(|i| self.sample_at(&seeds, i, opts.conditioning, opts.max_rejections))
            .collect()
    }
}

/// Uniform configuration for `pair`, determined by `seed`.
pub fn sample_configuration(pair: &SequencePair, seed: u64) -> Result<Configuration> {
    let sampler = ConfigurationSampler::new(pair)?;
    Ok(sampler.configuration(&mut SeedTree::new(seed).rng(&[0, 0])))
}

/// Rejection sample under `opts.conditioning`; sample index 0 of the seed.
pub fn sample_incidence(pair: &SequencePair, opts: &SampleOptions) -> Result<Sampled> {
    opts.conditioning.check_pair(pair)?;
    let sampler = ConfigurationSampler::new(pair)?;
    sampler.sample_at(&SeedTree::new(opts.seed), 0, opts.conditioning, opts.max_rejections)
}

/// Conditioning event whose frequency an [`AcceptanceEstimate`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    /// Frequency among raw configurations.
    Raw,
    /// Frequency among simple-incidence samples.
    SimpleIncidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceEstimate {
    pub conditioning: Conditioning,
    pub baseline: Baseline,
    /// Samples drawn from the baseline law.
    pub trials: u64,
    pub accepted: u64,
    pub frequency: f64,
    /// 95% normal-approximation interval.
    pub interval: (f64, f64),
    /// Raw configurations consumed, the baseline rejections included.
    pub raw_attempts: u64,
    /// `accepted / raw_attempts`.
    pub raw_frequency: f64,
}

/// Acceptance frequency of the conditioning predicate.
///
/// `simple_incidence` is measured on raw configurations. `hypergraph` and
/// `graph` are measured on simple-incidence samples, so the frequency is the
/// probability of no repeated hyper-edge given simple incidence; the
/// unconditional rate is reported as `raw_frequency`.
pub fn acceptance_estimate(pair: &SequencePair, opts: &SampleOptions, trials: u64) -> Result<AcceptanceEstimate> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    opts.conditioning.check_pair(pair)?;
    let sampler = ConfigurationSampler::new(pair)?;
    let seeds = SeedTree::new(opts.seed);
    let (baseline, accepted, raw_attempts) = match opts.conditioning {
        Conditioning::None => (Baseline::Raw, trials, trials),
        Conditioning::SimpleIncidence => {
            let hits: u64 = (0..trials)
                .into_par_iter()
                .map(|i| {
                    let g = sampler.incidence(&mut seeds.rng(&[i, 0]));
                    u64::from(g.is_simple_incidence())
                })
                .sum();
            (Baseline::Raw, hits, trials)
        }
        cond @ (Conditioning::Hypergraph | Conditioning::Graph) => {
            let outcomes: Vec<(u64, u64)> = (0..trials)
                .into_par_iter()
                .map(|i| {
                    let s = sampler.sample_at(&seeds, i, Conditioning::SimpleIncidence, opts.max_rejections)?;
                    Ok((u64::from(cond.accepts(&s.graph)), s.attempts))
                })
                .collect::<Result<_>>()?;
            let hits = outcomes.iter().map(|o| o.0).sum();
            let raw = outcomes.iter().map(|o| o.1).sum();
            (Baseline::SimpleIncidence, hits, raw)
        }
    };
    let frequency = accepted as f64 / trials as f64;
    let half = 1.96 * binomial_std_error(frequency, trials);
    Ok(AcceptanceEstimate {
        conditioning: opts.conditioning,
        baseline,
        trials,
        accepted,
        frequency,
        interval: ((frequency - half).max(0.0), (frequency + half).min(1.0)),
        raw_attempts,
        raw_frequency: accepted as f64 / raw_attempts as f64,
    })
}
