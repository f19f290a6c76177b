//! Poisson-degree configuration graphs against Erdős–Rényi graphs.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::census::{count_embeddings, cycle};
use crate::degree_model::{pair_sequences_or_drop, LimitDistribution};
use crate::incidence::IncidenceGraph;
use crate::logic::sentences::{isolated_vertex, phi_graph};
use crate::logic::{CompiledSentence, Formula};
use crate::rng::SeedTree;
use crate::sampler::{Conditioning, ConfigurationSampler, DEFAULT_MAX_REJECTIONS};
use crate::stats::{frequencies, total_variation, Running};
use crate::{Error, Result};

/// `G(n, p)` as an incidence graph with one size-2 edge node per edge,
/// sampled by geometric skipping over the pairs `i < j`.
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> IncidenceGraph {
    let mut pairs = Vec::new();
    if n >= 2 && p > 0.0 {
        let log_q = (1.0 - p.min(1.0)).ln();
        let (mut v, mut w) = (1usize, usize::MAX);
        while v < n {
            let skip = if p >= 1.0 {
                0
            } else {
                let u: f64 = 1.0 - rng.random::<f64>();
                (u.ln() / log_q).floor() as usize
            };
            w = w.wrapping_add(1).saturating_add(skip);
            while w >= v && v < n {
                w -= v;
                v += 1;
            }
            if v < n {
                let e = pairs.len() / 2;
                pairs.push((w, e));
                pairs.push((v, e));
            }
        }
    }
    let m = pairs.len() / 2;
    IncidenceGraph::new(n, m, pairs).expect("indices are in range")
}

/// A triangle in a graph, guarded so each quantifier ranges over neighbours.
pub fn triangle_sentence() -> Formula {
    let g = Formula::exists(
        "g",
        Formula::And(vec![
            Formula::is_in("c", "g"),
            Formula::is_in("a", "g"),
            Formula::ne("g", "f"),
            Formula::ne("g", "e"),
        ]),
    );
    let c = Formula::exists(
        "c",
        Formula::And(vec![Formula::is_in("c", "f"), Formula::ne("c", "b"), Formula::ne("c", "a"), g]),
    );
    let f = Formula::exists("f", Formula::And(vec![Formula::is_in("b", "f"), Formula::ne("f", "e"), c]));
    let b = Formula::exists("b", Formula::And(vec![Formula::is_in("b", "e"), Formula::ne("b", "a"), f]));
    let e = Formula::exists("e", Formula::And(vec![Formula::is_in("a", "e"), b]));
    Formula::exists("a", Formula::And(vec![Formula::IsVertex("a".into()), e]))
}

/// Sentences evaluated on both models.
pub fn sentence_battery() -> Vec<(&'static str, Formula)> {
    let degree_four = Formula::exists(
        "x",
        Formula::And(vec![Formula::IsVertex("x".into()), Formula::Deg("x".into(), 4)]),
    );
    vec![
        ("exists-isolated-vertex", isolated_vertex()),
        ("exists-degree-4-vertex", degree_four),
        ("exists-triangle", triangle_sentence()),
        ("is-graph", phi_graph()),
    ]
}

/// One compared quantity at one size. For `degree-tv` only `gap` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErRow {
    pub metric: String,
    pub seed: u64,
    pub n: usize,
    pub samples: u64,
    pub configuration: Option<f64>,
    pub configuration_std_error: Option<f64>,
    pub erdos_renyi: Option<f64>,
    pub erdos_renyi_std_error: Option<f64>,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErReport {
    pub mean: f64,
    pub rows: Vec<ErRow>,
}

impl ErReport {
    pub fn row(&self, metric: &str, n: usize) -> Option<&ErRow> {
        self.rows.iter().find(|r| r.metric == metric && r.n == n)
    }
}

struct Measured {
    degrees: BTreeMap<usize, u64>,
    mean_degree: f64,
    triangles: f64,
    two_paths: f64,
    sentences: Vec<bool>,
}

fn measure(g: &IncidenceGraph, battery: &[CompiledSentence], triangle: &crate::census::Pattern) -> Measured {
    let mut degrees = BTreeMap::new();
    let mut two_paths = 0u64;
    for v in 0..g.n_v() {
        let d = g.v_neighbors(v).len();
        *degrees.entry(d).or_insert(0) += 1;
        two_paths += (d * d.saturating_sub(1) / 2) as u64;
    }
    Measured {
        degrees,
        mean_degree: 2.0 * g.n_e() as f64 / g.n_v().max(1) as f64,
        triangles: count_embeddings(triangle, g) as f64,
        two_paths: two_paths as f64,
        sentences: battery.iter().map(|s| s.evaluate(g)).collect(),
    }
}

fn pooled(ms: &[Measured]) -> BTreeMap<usize, f64> {
    let mut total = BTreeMap::new();
    for m in ms {
        for (&d, &c) in &m.degrees {
            *total.entry(d).or_insert(0) += c;
        }
    }
    frequencies(&total)
}

/// Compares Poisson(`c`) / dirac(2) configuration graphs conditioned to be
/// simple with `G(n, c/n)`. Size `i` uses seed subtree `n`; the configuration
/// side uses stream 0 below it and the Erdős–Rényi side stream 1.
pub fn er_correspondence_study(c: f64, n_list: &[usize], samples: u64, seed: u64) -> Result<ErReport> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Precondition(format!("mean degree must be positive, got {c}")));
    }
    if samples == 0 {
        return Err(Error::Precondition("samples must be at least 1".into()));
    }
    let vdist = LimitDistribution::poisson(c);
    let edist = LimitDistribution::dirac(2);
    let battery_src = sentence_battery();
    let battery: Vec<CompiledSentence> = battery_src
        .iter()
        .map(|(_, f)| CompiledSentence::new(f))
        .collect::<Result<_>>()?;
    let triangle = cycle(3);
    let root = SeedTree::new(seed);
    let mut rows = Vec::new();
    for &n in n_list {
        let tree = root.child(n as u64);
        let pair = pair_sequences_or_drop(&vdist, &edist, n)?;
        let sampler = ConfigurationSampler::new(&pair)?;
        let config_tree = tree.child(0);
        let configuration: Vec<Measured> = (0..samples)
            .into_par_iter()
            .map(|j| {
                let s = sampler.sample_at(&config_tree, j, Conditioning::Graph, DEFAULT_MAX_REJECTIONS)?;
                Ok(measure(&s.graph, &battery, &triangle))
            })
            .collect::<Result<_>>()?;
        let er_tree = tree.child(1);
        let p = (c / n as f64).min(1.0);
        let er: Vec<Measured> = (0..samples)
            .into_par_iter()
            .map(|j| measure(&erdos_renyi(n, p, &mut er_tree.rng(&[j])), &battery, &triangle))
            .collect();
        let row = |metric: &str, a: Option<(f64, f64)>, b: Option<(f64, f64)>, gap: f64| ErRow {
            metric: metric.to_string(),
            seed,
            n,
            samples,
            configuration: a.map(|x| x.0),
            configuration_std_error: a.map(|x| x.1),
            erdos_renyi: b.map(|x| x.0),
            erdos_renyi_std_error: b.map(|x| x.1),
            gap,
        };
        let stat = |ms: &[Measured], f: &dyn Fn(&Measured) -> f64| {
            let r: Running = ms.iter().map(f).collect();
            (r.mean(), r.std_error())
        };
        rows.push(row("degree-tv", None, None, total_variation(&pooled(&configuration), &pooled(&er))));
        let metrics: [(&str, &dyn Fn(&Measured) -> f64); 3] = [
            ("mean-degree", &|m| m.mean_degree),
            ("triangles", &|m| m.triangles),
            ("two-paths-per-vertex", &|m| m.two_paths / n as f64),
        ];
        for (name, f) in metrics {
            let (a, b) = (stat(&configuration, f), stat(&er, f));
            rows.push(row(name, Some(a), Some(b), (a.0 - b.0).abs()));
        }
        for (i, (name, _)) in battery_src.iter().enumerate() {
            let f = |m: &Measured| f64::from(u8::from(m.sentences[i]));
            let (a, b) = (stat(&configuration, &f), stat(&er, &f));
            rows.push(row(name, Some(a), Some(b), (a.0 - b.0).abs()));
        }
    }
    Ok(ErReport { mean: c, rows })
}
