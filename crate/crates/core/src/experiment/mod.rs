//! Batch experiments: a JSON configuration in, seeded CSV tables and a JSON
//! manifest out.
//!
//! Task `t` at size `n` draws from seed subtree `child(t).child(n)` of the
//! configured seed, so tables do not depend on the other tasks or sizes
//! listed. Rows are written in sample-index order whatever the completion
//! order, and two runs of the same configuration give byte-identical CSVs.

mod clustering;
mod config;
mod er;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use clustering::{clustering_study, local_clustering, reference_clustering, ClusteringSummary, LocalClustering};
pub use config::{ExperimentConfig, Task, TaskOptions};
pub use er::{er_correspondence_study, erdos_renyi, sentence_battery, triangle_sentence, ErReport, ErRow};

use crate::bgw::{ball_type_distribution, graph_ball_distribution, BgwSpec};
use crate::census::{
    automorphisms, count_embeddings_with, expected_realisations, lambda_hypergraph, lambda_loops, standard_patterns,
};
use crate::degree_model::{
    check_admissibility, pair_sequences, pair_sequences_or_drop, AdmissibilityReport, LimitDistribution, SequencePair,
};
use crate::incidence::{IncidenceGraph, Side};
use crate::logic::theory::{
    estimate_limiting_probability, instantiate_axioms, tree_in_theory, vertex_path, z_holds, AxiomBounds, LimitTheorySpec, Scheme,
};
use crate::logic::CompiledSentence;
use crate::rng::SeedTree;
use crate::sampler::{Conditioning, ConfigurationSampler, SampleOptions};
use crate::stats::{binomial_std_error, total_variation, Running};
use crate::{Error, Result};

/// Summary of a finished run, also written as `manifest.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub wall_time_secs: f64,
    /// Written tables, relative to the output directory, in write order.
    pub files: Vec<String>,
    pub clustering_definitions: Option<String>,
    pub admissibility: Option<AdmissibilityReport>,
}

/// Member-set duplicate among edge nodes, ignoring multiplicities.
pub fn has_double_hyperedge(g: &IncidenceGraph) -> bool {
    let mut sets: Vec<Vec<usize>> = (0..g.n_e())
        .map(|e| g.e_neighbors(e).iter().map(|p| p.0).collect())
        .filter(|s: &Vec<usize>| !s.is_empty())
        .collect();
    sets.sort_unstable();
    sets.windows(2).any(|w| w[0] == w[1])
}

#[derive(Debug, Serialize)]
struct CensusRow<'a> {
    pattern: &'a str,
    excess: i64,
    seed: u64,
    n: usize,
    samples: u64,
    dropped_stub: bool,
    mean: f64,
    std_error: f64,
    expected: Option<f64>,
}

#[derive(Debug, Serialize)]
struct BgwRow {
    root_side: &'static str,
    radius: usize,
    bgw_samples: usize,
    seed: u64,
    n: usize,
    samples: u64,
    mean_tv: f64,
    std_error: f64,
}

#[derive(Debug, Serialize)]
struct AxiomRow<'a> {
    axiom: &'a str,
    scheme: &'static str,
    method: &'static str,
    seed: u64,
    n: usize,
    samples: u64,
    holds: u64,
    frequency: f64,
    std_error: f64,
}

#[derive(Debug, Serialize)]
struct EstimateRow<'a> {
    formula: &'a str,
    seed: u64,
    n: usize,
    samples: u64,
    successes: u64,
    mean: f64,
    std_error: f64,
}

/// One row of the clustering table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringRow {
    pub seed: u64,
    pub n: usize,
    pub samples: u64,
    pub mean_set: f64,
    pub std_error_set: f64,
    pub mean_formula: f64,
    pub std_error_formula: f64,
    pub mean_excluded: f64,
    pub std_error_excluded: f64,
    pub reference: Option<f64>,
}

/// Clustering series over the configured sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringReport {
    pub rows: Vec<ClusteringRow>,
    pub reference: Option<f64>,
    pub definitions: String,
}

pub const CLUSTERING_DEFINITIONS: &str = "C(v) = M'(v)/M(v). M(v): pairs of distinct vertices sharing an edge node \
with v. M'(v): those pairs that share an edge node. Vertices with M(v) = 0 are excluded and counted. formula: \
sum over edge nodes e of v of C(|e|-1, 2) / C(M, 2), M = sum of (|e|-1), counting with multiplicity. reference: \
E[dv] E[C(X,2)] / E[C(M,2)] with X the size-biased edge size minus one and M a sum of dv copies of X.";

#[derive(Debug, Serialize)]
struct SimplicityRow {
    event: &'static str,
    seed: u64,
    n: usize,
    samples: u64,
    successes: u64,
    frequency: f64,
    std_error: f64,
    prediction: Option<f64>,
}

#[derive(Debug, Serialize)]
struct AdmissibilityRow {
    side: &'static str,
    degree: usize,
    n: usize,
    count: u64,
    empirical: f64,
    limit: f64,
}

struct Runner<'a> {
    config: &'a ExperimentConfig,
    /// Tables are only collected, not written, without a directory.
    out: Option<&'a Path>,
    files: Vec<String>,
}

impl Runner<'_> {
    fn write<T: Serialize>(&mut self, name: String, rows: &[T]) -> Result<()> {
        if let Some(out) = self.out {
            let mut w = csv::Writer::from_path(out.join(&name))?;
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        self.files.push(name);
        Ok(())
    }

    fn seeds(&self, task: Task, n: usize) -> SeedTree {
        SeedTree::new(self.config.seed).child(task.seed_index()).child(n as u64)
    }

    fn pair(&self, n: usize) -> Result<SequencePair> {
        pair_sequences_or_drop(&self.config.vdist, &self.config.edist, n)
    }

    /// Per-sample results at size `n`, in sample order.
    fn per_sample<T: Send>(
        &self,
        task: Task,
        n: usize,
        pair: &SequencePair,
        f: impl Fn(&IncidenceGraph) -> T + Sync,
    ) -> Result<Vec<T>> {
        let sampler = ConfigurationSampler::new(pair)?;
        let tree = self.seeds(task, n);
        let c = self.config;
        (0..c.samples)
            .into_par_iter()
            .map(|j| {
                let s = sampler.sample_at(&tree, j, c.conditioning, c.options.max_rejections)?;
                Ok(f(&s.graph))
            })
            .collect()
    }

    fn census(&mut self) -> Result<()> {
        let c = self.config;
        let patterns = standard_patterns();
        let auts: Vec<_> = patterns.iter().map(automorphisms).collect();
        for &n in &c.sizes {
            let pair = self.pair(n)?;
            let counts = self.per_sample(Task::Census, n, &pair, |g| {
                patterns
                    .iter()
                    .zip(&auts)
                    .map(|(h, a)| count_embeddings_with(h, g, a) as f64)
                    .collect::<Vec<f64>>()
            })?;
            let rows: Vec<CensusRow> = patterns
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    let r: Running = counts.iter().map(|x| x[i]).collect();
                    CensusRow {
                        pattern: h.id(),
                        excess: h.excess(),
                        seed: c.seed,
                        n,
                        samples: c.samples,
                        dropped_stub: pair.dropped_stub,
                        mean: r.mean(),
                        std_error: r.std_error(),
                        expected: expected_realisations(h, &c.vdist, &c.edist, n).ok().map(|e| e.value),
                    }
                })
                .collect();
            self.write(format!("census_n{n}.csv"), &rows)?;
        }
        Ok(())
    }

    fn bgw_compare(&mut self) -> Result<()> {
        let c = self.config;
        let (radius, bgw_samples) = (c.options.bgw_radius, c.options.bgw_samples);
        let root = SeedTree::new(c.seed).child(Task::BgwCompare.seed_index());
        let mut limits = Vec::new();
        for (i, side) in [Side::V, Side::E].into_iter().enumerate() {
            let spec = BgwSpec::new(c.vdist.clone(), c.edist.clone(), side)?;
            limits.push(ball_type_distribution(&spec, radius, bgw_samples, root.child(u64::MAX - i as u64).seed())?);
        }
        for &n in &c.sizes {
            let pair = self.pair(n)?;
            let tvs = self.per_sample(Task::BgwCompare, n, &pair, |g| {
                [Side::V, Side::E].map(|side| graph_ball_distribution(g, radius, side).ok())
            })?;
            let mut rows = Vec::new();
            for (i, tag) in ["v", "e"].into_iter().enumerate() {
                let r: Running = tvs
                    .iter()
                    .filter_map(|t| t[i].as_ref())
                    .map(|d| total_variation(d, &limits[i]))
                    .collect();
                rows.push(BgwRow {
                    root_side: tag,
                    radius,
                    bgw_samples,
                    seed: c.seed,
                    n,
                    samples: c.samples,
                    mean_tv: r.mean(),
                    std_error: r.std_error(),
                });
            }
            self.write(format!("bgw-compare_n{n}.csv"), &rows)?;
        }
        Ok(())
    }

    fn axioms(&mut self) -> Result<()> {
        let c = self.config;
        let spec = LimitTheorySpec::from_distributions(&c.vdist, &c.edist)?;
        let trees = (1..=c.options.axiom_path_vertices)
            .map(vertex_path)
            .filter(|t| tree_in_theory(t, &spec))
            .collect();
        let bounds = AxiomBounds {
            z_total: c.options.axiom_z_total,
            y_max_degree: c.options.axiom_max_degree,
            trees,
            x_max_m: c.options.axiom_copies,
        };
        let axioms = instantiate_axioms(&spec, &bounds)?;
        let compiled: Vec<Option<CompiledSentence>> = axioms
            .iter()
            .map(|a| match a.scheme {
                Scheme::Z => Ok(None),
                _ => CompiledSentence::new(&a.formula).map(Some),
            })
            .collect::<Result<_>>()?;
        let z_params: Vec<Option<(usize, usize)>> = axioms
            .iter()
            .map(|a| {
                let mut parts = a.name.strip_prefix("Z_")?.split('_').map(|x| x.parse::<usize>().ok());
                Some((parts.next()??, parts.next()??))
            })
            .collect();
        for &n in &c.sizes {
            let pair = self.pair(n)?;
            let results = self.per_sample(Task::Axioms, n, &pair, |g| {
                compiled
                    .iter()
                    .zip(&z_params)
                    .map(|(s, z)| match (s, z) {
                        (Some(s), _) => s.evaluate(g),
                        (None, Some((r, s))) => z_holds(g, *r, *s),
                        (None, None) => unreachable!("Z axioms carry their parameters"),
                    })
                    .collect::<Vec<bool>>()
            })?;
            let rows: Vec<AxiomRow> = axioms
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let holds = results.iter().filter(|r| r[i]).count() as u64;
                    let frequency = holds as f64 / c.samples as f64;
                    AxiomRow {
                        axiom: &a.name,
                        scheme: match a.scheme {
                            Scheme::X => "X",
                            Scheme::Y => "Y",
                            Scheme::Z => "Z",
                        },
                        method: if a.scheme == Scheme::Z { "structural" } else { "sentence" },
                        seed: c.seed,
                        n,
                        samples: c.samples,
                        holds,
                        frequency,
                        std_error: binomial_std_error(frequency, c.samples),
                    }
                })
                .collect();
            self.write(format!("axioms_n{n}.csv"), &rows)?;
        }
        Ok(())
    }

    fn estimate(&mut self) -> Result<()> {
        let c = self.config;
        let f = c.formula()?;
        let text = f.to_sexpr();
        for &n in &c.sizes {
            let opts = SampleOptions::new(self.seeds(Task::Estimate, n).seed(), c.conditioning)
                .with_max_rejections(c.options.max_rejections);
            let est = estimate_limiting_probability(&f, &c.vdist, &c.edist, &[n], c.samples as usize, &opts)?;
            let rows: Vec<EstimateRow> = est
                .iter()
                .map(|e| EstimateRow {
                    formula: &text,
                    seed: c.seed,
                    n,
                    samples: e.samples as u64,
                    successes: e.successes as u64,
                    mean: e.mean,
                    std_error: e.std_error,
                })
                .collect();
            self.write(format!("estimate_n{n}.csv"), &rows)?;
        }
        Ok(())
    }

    fn clustering(&mut self) -> Result<ClusteringReport> {
        let c = self.config;
        let reference = reference_clustering(&c.vdist, &c.edist).ok();
        let mut report_rows = Vec::new();
        for &n in &c.sizes {
            let pair = self.pair(n)?;
            let summaries = self.per_sample(Task::Clustering, n, &pair, clustering_study)?;
            let set: Running = summaries.iter().map(|s| s.mean_set.unwrap_or(0.0)).collect();
            let formula: Running = summaries.iter().map(|s| s.mean_formula.unwrap_or(0.0)).collect();
            let excluded: Running = summaries.iter().map(|s| s.excluded as f64).collect();
            let row = ClusteringRow {
                seed: c.seed,
                n,
                samples: c.samples,
                mean_set: set.mean(),
                std_error_set: set.std_error(),
                mean_formula: formula.mean(),
                std_error_formula: formula.std_error(),
                mean_excluded: excluded.mean(),
                std_error_excluded: excluded.std_error(),
                reference,
            };
            self.write(format!("clustering_n{n}.csv"), std::slice::from_ref(&row))?;
            report_rows.push(row);
        }
        Ok(ClusteringReport {
            rows: report_rows,
            reference,
            definitions: CLUSTERING_DEFINITIONS.to_string(),
        })
    }

    fn simplicity(&mut self) -> Result<()> {
        let c = self.config;
        let hyp = lambda_hypergraph(&c.vdist, &c.edist).ok();
        let loops = lambda_loops(&c.vdist, &c.edist).ok();
        let (p_simple, p_hyper) = match c.conditioning {
            Conditioning::None => (loops.map(|l| (-l).exp()), hyp.map(|l| (-l).exp())),
            Conditioning::SimpleIncidence => (Some(1.0), hyp.map(|l| (-l).exp())),
            Conditioning::Hypergraph | Conditioning::Graph => (Some(1.0), Some(1.0)),
        };
        for &n in &c.sizes {
            let pair = self.pair(n)?;
            let outcomes = self.per_sample(Task::Simplicity, n, &pair, |g| {
                (g.is_simple_incidence(), !has_double_hyperedge(g))
            })?;
            let row = |event, successes: u64, prediction| {
                let frequency = successes as f64 / c.samples as f64;
                SimplicityRow {
                    event,
                    seed: c.seed,
                    n,
                    samples: c.samples,
                    successes,
                    frequency,
                    std_error: binomial_std_error(frequency, c.samples),
                    prediction,
                }
            };
            let rows = [
                row("simple-incidence", outcomes.iter().filter(|o| o.0).count() as u64, p_simple),
                row("no-double-hyperedge", outcomes.iter().filter(|o| o.1).count() as u64, p_hyper),
            ];
            self.write(format!("simplicity_n{n}.csv"), &rows)?;
        }
        Ok(())
    }

    fn admissibility(&mut self) -> Result<AdmissibilityReport> {
        let c = self.config;
        let report = check_admissibility(
            &c.vdist,
            &c.edist,
            |n| pair_sequences(&c.vdist, &c.edist, n).or_else(|_| pair_sequences_or_drop(&c.vdist, &c.edist, n)),
            &c.sizes,
            c.options.admissibility_tolerance,
        )?;
        for &n in &c.sizes {
            let pair = self.pair(n)?;
            let mut rows = Vec::new();
            for (tag, seq, dist) in [
                ("v", &pair.vertex_side, &c.vdist),
                ("e", &pair.edge_side, &c.edist),
            ] {
                let total = seq.len().max(1) as f64;
                for degree in 0..=seq.max_degree().unwrap_or(0) {
                    let count = seq.count(degree);
                    rows.push(AdmissibilityRow {
                        side: tag,
                        degree,
                        n,
                        count,
                        empirical: count as f64 / total,
                        limit: dist.pmf(degree),
                    });
                }
            }
            self.write(format!("admissibility_n{n}.csv"), &rows)?;
        }
        Ok(report)
    }
}

/// Runs every task of `config`, writing tables and `manifest.json` under the
/// output directory.
pub fn run(config: &ExperimentConfig) -> Result<Manifest> {
    config.validate()?;
    let start = Instant::now();
    let out = config.output_dir.clone();
    fs::create_dir_all(&out)?;
    let mut runner = Runner {
        config,
        out: Some(&out),
        files: Vec::new(),
    };
    let mut clustering_definitions = None;
    let mut admissibility = None;
    let mut done = Vec::new();
    for &task in &config.tasks {
        if done.contains(&task) {
            continue;
        }
        done.push(task);
        match task {
            Task::Census => runner.census()?,
            Task::BgwCompare => runner.bgw_compare()?,
            Task::Axioms => runner.axioms()?,
            Task::Estimate => runner.estimate()?,
            Task::Clustering => clustering_definitions = Some(runner.clustering()?.definitions),
            Task::Simplicity => runner.simplicity()?,
            Task::Admissibility => admissibility = Some(runner.admissibility()?),
        }
    }
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        config: config.clone(),
        wall_time_secs: start.elapsed().as_secs_f64(),
        files: runner.files,
        clustering_definitions,
        admissibility,
    };
    fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

/// Clustering series without writing files.
pub fn clustering_series(config: &ExperimentConfig) -> Result<ClusteringReport> {
    config.validate()?;
    Runner {
        config,
        out: None,
        files: Vec::new(),
    }
    .clustering()
}

/// Runs [`er_correspondence_study`] with the configured sizes, samples and
/// seed, writing `er-compare.csv` and `manifest.json`. The vertex law must be
/// Poisson; its mean is the Erdős–Rényi mean degree.
pub fn run_er_compare(config: &ExperimentConfig) -> Result<ErReport> {
    config.validate()?;
    let LimitDistribution::Poisson { mean } = config.vdist else {
        return Err(Error::config("vdist", "er-compare needs a Poisson vertex law"));
    };
    let start = Instant::now();
    let report = er_correspondence_study(mean, &config.sizes, config.samples, config.seed)?;
    fs::create_dir_all(&config.output_dir)?;
    let mut runner = Runner {
        config,
        out: Some(&config.output_dir),
        files: Vec::new(),
    };
    runner.write("er-compare.csv".to_string(), &report.rows)?;
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        config: config.clone(),
        wall_time_secs: start.elapsed().as_secs_f64(),
        files: runner.files,
        clustering_definitions: None,
        admissibility: None,
    };
    fs::write(config.output_dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(report)
}

/// Writes `samples` graphs per size as text files `graph_n{n}_{j}.txt`.
pub fn generate(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    config.validate()?;
    fs::create_dir_all(&config.output_dir)?;
    let mut paths = Vec::new();
    for &n in &config.sizes {
        let pair = pair_sequences_or_drop(&config.vdist, &config.edist, n)?;
        let sampler = ConfigurationSampler::new(&pair)?;
        let tree = SeedTree::new(config.seed).child(u64::MAX).child(n as u64);
        for j in 0..config.samples {
            let s = sampler.sample_at(&tree, j, config.conditioning, config.options.max_rejections)?;
            let path = config.output_dir.join(format!("graph_n{n}_{j}.txt"));
            crate::incidence::write_file(&path, &s.graph)?;
            paths.push(path);
        }
    }
    Ok(paths)
}
