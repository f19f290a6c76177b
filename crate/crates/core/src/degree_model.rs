//! Limit degree distributions, finite degree sequences and the admissibility
//! checks that tie the two together.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probability tables must sum to one within this tolerance.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

/// Set of degrees: a finite part plus an optional infinite tail `[from, ∞)`.
///
/// Finite and cofinite supports are both representable, and the representation
/// is normalised so that structural equality is set equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeSet {
    finite: BTreeSet<usize>,
    tail_from: Option<usize>,
}

impl DegreeSet {
    pub fn empty() -> Self {
        DegreeSet {
            finite: BTreeSet::new(),
            tail_from: None,
        }
    }

    pub fn finite(items: impl IntoIterator<Item = usize>) -> Self {
        Self::new(items, None)
    }

    /// All degrees `>= from`.
    pub fn from_degree(from: usize) -> Self {
        Self::new([], Some(from))
    }

    pub fn new(items: impl IntoIterator<Item = usize>, tail_from: Option<usize>) -> Self {
        let mut finite: BTreeSet<usize> = items.into_iter().collect();
        let mut tail_from = tail_from;
        if let Some(mut from) = tail_from {
            finite.retain(|&k| k < from);
            while from > 0 && finite.remove(&(from - 1)) {
                from -= 1;
            }
            tail_from = Some(from);
        }
        DegreeSet { finite, tail_from }
    }

    pub fn contains(&self, k: usize) -> bool {
        self.finite.contains(&k) || self.tail_from.is_some_and(|from| k >= from)
    }

    pub fn is_finite(&self) -> bool {
        self.tail_from.is_none()
    }

    pub fn min(&self) -> Option<usize> {
        match (self.finite.first(), self.tail_from) {
            (Some(&a), _) => Some(a),
            (None, t) => t,
        }
    }

    /// Largest element, `None` when the set is empty or infinite.
    pub fn max(&self) -> Option<usize> {
        if self.tail_from.is_some() {
            None
        } else {
            self.finite.last().copied()
        }
    }

    pub fn tail_from(&self) -> Option<usize> {
        self.tail_from
    }

    /// Elements up to and including `bound`.
    pub fn elements_up_to(&self, bound: usize) -> Vec<usize> {
        (0..=bound).filter(|&k| self.contains(k)).collect()
    }

    /// Every degree that lies in exactly one of the two sets, up to `bound`.
    pub fn symmetric_difference_up_to(&self, other: &DegreeSet, bound: usize) -> Vec<usize> {
        (0..=bound)
            .filter(|&k| self.contains(k) != other.contains(k))
            .collect()
    }

    /// A bound past which the two sets agree (both contain everything or nothing).
    pub fn agreement_bound(&self, other: &DegreeSet) -> usize {
        let last = |s: &DegreeSet| {
            s.finite
                .last()
                .copied()
                .unwrap_or(0)
                .max(s.tail_from.unwrap_or(0))
        };
        last(self).max(last(other)) + 1
    }

    pub fn is_subset_of_0_1(&self) -> bool {
        self.tail_from.is_none() && self.finite.iter().all(|&k| k <= 1)
    }
}

impl fmt::Display for DegreeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.finite.iter().map(|k| k.to_string()).collect();
        write!(f, "{{{}", items.join(","))?;
        if let Some(from) = self.tail_from {
            if !items.is_empty() {
                write!(f, ",")?;
            }
            write!(f, "{from}..")?;
        }
        write!(f, "}}")
    }
}

/// Asymptotic degree distribution on ℕ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitDistribution {
    Dirac {
        k: usize,
    },
    Finite {
        probs: BTreeMap<usize, f64>,
    },
    Poisson {
        mean: f64,
    },
    /// Mass proportional to `k^-exponent` on `min_degree..=max_degree`. Without
    /// `max_degree` the limit law has infinite support and realised sequences
    /// are cut at `n^(1/(exponent-1))`.
    #[serde(rename = "powerlaw")]
    PowerLaw {
        exponent: f64,
        min_degree: usize,
        #[serde(default)]
        max_degree: Option<usize>,
    },
    /// Size-biased offspring law of `base`, for bases with no closed form.
    SizeBiased {
        base: Box<LimitDistribution>,
    },
}

// Euler-Maclaurin remainder coefficients B_2j / (2j)!.
const BERNOULLI_OVER_FACTORIAL: [f64; 5] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
];

/// Hurwitz zeta ζ(s, a) = Σ_{x ≥ a} x^-s for s > 1 and integer a ≥ 1.
pub(crate) fn hurwitz_zeta(s: f64, a: usize) -> f64 {
    debug_assert!(s > 1.0 && a >= 1);
    let cut = a.max(128);
    let direct: f64 = (a..cut).map(|x| (x as f64).powf(-s)).sum();
    let n = cut as f64;
    let mut tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // rising(s, 2j-1) * n^(-s-2j+1)
    let mut rising = s;
    let mut power = n.powf(-s - 1.0);
    for (j, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if j > 0 {
            let base = s + (2 * j - 1) as f64;
            rising *= base * (base + 1.0);
            power /= n * n;
        }
        tail += coeff * rising * power;
    }
    direct + tail
}

/// Falling factorial (x)_k as a float.
pub fn falling_factorial(x: usize, k: usize) -> f64 {
    if k > x {
        return 0.0;
    }
    (0..k).map(|i| (x - i) as f64).product()
}

/// Signed Stirling numbers of the first kind s(k, j), j = 0..=k.
fn stirling_first(k: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for n in 0..k {
        let mut next = vec![0.0; row.len() + 1];
        for (j, &c) in row.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= n as f64 * c;
        }
        row = next;
    }
    row
}

impl LimitDistribution {
    pub fn dirac(k: usize) -> Self {
        LimitDistribution::Dirac { k }
    }

    pub fn poisson(mean: f64) -> Self {
        LimitDistribution::Poisson { mean }
    }

    pub fn finite(probs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        LimitDistribution::Finite {
            probs: probs.into_iter().collect(),
        }
    }

    pub fn power_law(exponent: f64, min_degree: usize, max_degree: Option<usize>) -> Self {
        LimitDistribution::PowerLaw {
            exponent,
            min_degree,
            max_degree,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LimitDistribution::Dirac { .. } => Ok(()),
            LimitDistribution::Finite { probs } => {
                if probs.is_empty() {
                    return Err(Error::InvalidDistribution("empty probability table".into()));
                }
                if let Some((k, p)) = probs.iter().find(|(_, p)| !(p.is_finite() && **p >= 0.0)) {
                    return Err(Error::InvalidDistribution(format!(
                        "probability {p} at degree {k} is not a nonnegative number"
                    )));
                }
                let total: f64 = probs.values().sum();
                if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
                    return Err(Error::InvalidDistribution(format!(
                        "probabilities sum to {total}, not 1"
                    )));
                }
                Ok(())
            }
            LimitDistribution::Poisson { mean } => {
                if mean.is_finite() && *mean >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidDistribution(format!(
                        "Poisson mean must be finite and nonnegative, got {mean}"
                    )))
                }
            }
            LimitDistribution::PowerLaw {
                exponent,
                min_degree,
                max_degree,
            } => {
                if !(exponent.is_finite() && *exponent > 1.0) {
                    return Err(Error::InvalidDistribution(format!(
                        "power-law exponent must exceed 1, got {exponent}"
                    )));
                }
                if *min_degree == 0 {
                    return Err(Error::InvalidDistribution(
                        "power-law min_degree must be at least 1".into(),
                    ));
                }
                if max_degree.is_some_and(|m| m < *min_degree) {
                    return Err(Error::InvalidDistribution(
                        "power-law max_degree is below min_degree".into(),
                    ));
                }
                Ok(())
            }
            LimitDistribution::SizeBiased { base } => {
                base.validate()?;
                let mean = base.mean()?;
                if mean <= 0.0 {
                    return Err(Error::Degenerate("size-biasing a law with zero mean".into()));
                }
                Ok(())
            }
        }
    }

    /// Checks the extra constraint on hyper-edge sizes: no mass on 0 or 1.
    pub fn validate_edge_side(&self) -> Result<()> {
        self.validate()?;
        let support = self.support();
        if support.contains(0) || support.contains(1) {
            return Err(Error::InvalidDistribution(
                "edge-size distribution puts mass on sizes 0 or 1".into(),
            ));
        }
        Ok(())
    }

    fn power_law_normaliser(exponent: f64, min_degree: usize, max_degree: Option<usize>) -> f64 {
        match max_degree {
            Some(max) => (min_degree..=max).map(|k| (k as f64).powf(-exponent)).sum(),
            None => hurwitz_zeta(exponent, min_degree),
        }
    }

    pub fn pmf(&self, k: usize) -> f64 {
        match self {
            LimitDistribution::Dirac { k: d } => {
                if k == *d {
                    1.0
                } else {
                    0.0
                }
            }
            LimitDistribution::Finite { probs } => probs.get(&k).copied().unwrap_or(0.0),
            LimitDistribution::Poisson { mean } => {
                if *mean == 0.0 {
                    return if k == 0 { 1.0 } else { 0.0 };
                }
                let log = k as f64 * mean.ln() - mean - (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
                log.exp()
            }
            LimitDistribution::PowerLaw {
                exponent,
                min_degree,
                max_degree,
            } => {
                if k < *min_degree || max_degree.is_some_and(|m| k > m) {
                    return 0.0;
                }
                (k as f64).powf(-exponent)
                    / Self::power_law_normaliser(*exponent, *min_degree, *max_degree)
            }
            LimitDistribution::SizeBiased { base } => match base.mean() {
                Ok(mean) if mean > 0.0 && mean.is_finite() => {
                    (k + 1) as f64 * base.pmf(k + 1) / mean
                }
                _ => 0.0,
            },
        }
    }

    pub fn support(&self) -> DegreeSet {
        match self {
            LimitDistribution::Dirac { k } => DegreeSet::finite([*k]),
            LimitDistribution::Finite { probs } => {
                DegreeSet::finite(probs.iter().filter(|(_, p)| **p > 0.0).map(|(k, _)| *k))
            }
            LimitDistribution::Poisson { mean } => {
                if *mean == 0.0 {
                    DegreeSet::finite([0])
                } else {
                    DegreeSet::from_degree(0)
                }
            }
            LimitDistribution::PowerLaw {
                min_degree,
                max_degree,
                ..
            } => match max_degree {
                Some(max) => DegreeSet::finite(*min_degree..=*max),
                None => DegreeSet::from_degree(*min_degree),
            },
            LimitDistribution::SizeBiased { base } => {
                let s = base.support();
                let finite = s.finite.iter().filter(|&&k| k >= 1).map(|k| k - 1);
                DegreeSet::new(finite, s.tail_from.map(|f| f.saturating_sub(1)))
            }
        }
    }

    /// Largest degree with positive mass, `None` for infinite support.
    pub fn max_degree(&self) -> Option<usize> {
        self.support().max()
    }

    pub fn mean(&self) -> Result<f64> {
        self.falling_moment(1)
    }

    /// E[(d)_k], the k-th falling-factorial moment.
    pub fn falling_moment(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Ok(1.0);
        }
        match self {
            LimitDistribution::Dirac { k: d } => Ok(falling_factorial(*d, k)),
            LimitDistribution::Finite { probs } => Ok(probs
                .iter()
                .map(|(&x, &p)| p * falling_factorial(x, k))
                .sum()),
            LimitDistribution::Poisson { mean } => Ok(mean.powi(k as i32)),
            LimitDistribution::PowerLaw {
                exponent,
                min_degree,
                max_degree,
            } => {
                let z = Self::power_law_normaliser(*exponent, *min_degree, *max_degree);
                if let Some(max) = max_degree {
                    let s: f64 = (*min_degree..=*max)
                        .map(|x| falling_factorial(x, k) * (x as f64).powf(-exponent))
                        .sum();
                    return Ok(s / z);
                }
                if *exponent - k as f64 <= 1.0 {
                    return Err(Error::NonSummable {
                        what: format!("power law with exponent {exponent} and no cutoff"),
                        order: k,
                    });
                }
                // Direct sum below the cut, Stirling expansion of (x)_k above it.
                let cut = (*min_degree).max(1024);
                let direct: f64 = (*min_degree..cut)
                    .map(|x| falling_factorial(x, k) * (x as f64).powf(-exponent))
                    .sum();
                let tail: f64 = stirling_first(k)
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c != 0.0)
                    .map(|(j, c)| c * hurwitz_zeta(exponent - j as f64, cut))
                    .sum();
                Ok((direct + tail) / z)
            }
            LimitDistribution::SizeBiased { base } => {
                let mean = base.falling_moment(1)?;
                if mean <= 0.0 {
                    return Err(Error::Degenerate("size-biasing a law with zero mean".into()));
                }
                Ok(base.falling_moment(k + 1)? / mean)
            }
        }
    }

    /// Plain moment E[d^k], computed from falling moments.
    pub fn raw_moment(&self, k: usize) -> Result<f64> {
        // x^k = Σ_j S(k, j) (x)_j with Stirling numbers of the second kind.
        let mut second = vec![vec![0.0f64; k + 1]; k + 1];
        second[0][0] = 1.0;
        for n in 1..=k {
            for j in 1..=n {
                second[n][j] = j as f64 * second[n - 1][j] + second[n - 1][j - 1];
            }
        }
        let mut total = 0.0;
        for j in 0..=k {
            if second[k][j] != 0.0 {
                total += second[k][j] * self.falling_moment(j)?;
            }
        }
        Ok(total)
    }

    /// Offspring law of a non-root node in the local limit:
    /// d*(x) = (x + 1) d(x + 1) / E[d].
    pub fn size_biased(&self) -> Result<LimitDistribution> {
        let mean = self.mean()?;
        if mean <= 0.0 {
            return Err(Error::Degenerate(
                "all mass at degree 0; no size-biased law".into(),
            ));
        }
        Ok(match self {
            LimitDistribution::Dirac { k } => LimitDistribution::Dirac { k: k - 1 },
            LimitDistribution::Finite { probs } => LimitDistribution::Finite {
                probs: probs
                    .iter()
                    .filter(|(&x, &p)| x >= 1 && p > 0.0)
                    .map(|(&x, &p)| (x - 1, x as f64 * p / mean))
                    .collect(),
            },
            LimitDistribution::Poisson { mean } => LimitDistribution::Poisson { mean: *mean },
            LimitDistribution::PowerLaw {
                min_degree,
                max_degree: Some(max),
                ..
            } => LimitDistribution::Finite {
                probs: (*min_degree..=*max)
                    .map(|x| (x - 1, x as f64 * self.pmf(x) / mean))
                    .collect(),
            },
            _ => LimitDistribution::SizeBiased {
                base: Box::new(self.clone()),
            },
        })
    }

    /// Degrees and probabilities kept when realising a sequence of `n` nodes.
    ///
    /// Finite supports are kept whole. Infinite power laws are cut at
    /// `n^(1/(α-1))`; other infinite laws at the first degree whose upper tail
    /// holds less than `1/(2n)` of the mass. `cap` truncates further.
    pub fn truncated_table(&self, n: usize, cap: Option<usize>) -> Vec<(usize, f64)> {
        let support = self.support();
        let upper = match (support.max(), self) {
            (Some(max), _) => max,
            (
                None,
                LimitDistribution::PowerLaw {
                    exponent,
                    min_degree,
                    ..
                },
            ) => {
                let cut = (n.max(1) as f64).powf(1.0 / (exponent - 1.0)).floor() as usize;
                cut.max(*min_degree)
            }
            (None, _) => {
                let threshold = 0.5 / n.max(1) as f64;
                let mut cumulative = 0.0;
                let mut k = 0usize;
                loop {
                    cumulative += self.pmf(k);
                    if 1.0 - cumulative < threshold || k > 1_000_000 {
                        break k;
                    }
                    k += 1;
                }
            }
        };
        let upper = cap.map_or(upper, |c| upper.min(c));
        (0..=upper)
            .filter(|&k| support.contains(k))
            .map(|k| (k, self.pmf(k)))
            .filter(|(_, p)| *p > 0.0)
            .collect()
    }

    /// Sampler for repeated draws.
    pub fn sampler(&self) -> Result<DegreeSampler> {
        self.validate()?;
        Ok(match self {
            LimitDistribution::Dirac { k } => DegreeSampler::Constant(*k),
            LimitDistribution::Poisson { mean } if *mean > 0.0 => DegreeSampler::Poisson(
                Poisson::new(*mean).map_err(|e| Error::InvalidDistribution(e.to_string()))?,
            ),
            LimitDistribution::Poisson { .. } => DegreeSampler::Constant(0),
            _ => {
                let mut table = Vec::new();
                let mut cumulative = 0.0;
                let support = self.support();
                let finite_max = support.max();
                let mut k = 0usize;
                loop {
                    if finite_max.is_some_and(|m| k > m) {
                        break;
                    }
                    let p = self.pmf(k);
                    if p > 0.0 {
                        cumulative += p;
                        table.push((k, cumulative));
                    }
                    if finite_max.is_none() && (1.0 - cumulative < 1e-13 || k >= 4_000_000) {
                        break;
                    }
                    k += 1;
                }
                DegreeSampler::Table(table)
            }
        })
    }
}

/// Pre-built sampler for a [`LimitDistribution`].
#[derive(Debug, Clone)]
pub enum DegreeSampler {
    Constant(usize),
    Poisson(Poisson<f64>),
    /// (degree, cumulative probability) in increasing degree order.
    Table(Vec<(usize, f64)>),
}

impl DegreeSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self {
            DegreeSampler::Constant(k) => *k,
            DegreeSampler::Poisson(p) => p.sample(rng) as usize,
            DegreeSampler::Table(table) => {
                let total = table.last().map_or(1.0, |e| e.1);
                let u: f64 = rng.random::<f64>() * total;
                let idx = table.partition_point(|&(_, c)| c <= u);
                table[idx.min(table.len() - 1)].0
            }
        }
    }
}

/// Finite degree sequence: number of nodes of each degree.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DegreeSequence {
    counts: BTreeMap<usize, u64>,
}

impl DegreeSequence {
    pub fn new(counts: impl IntoIterator<Item = (usize, u64)>) -> Self {
        DegreeSequence {
            counts: counts.into_iter().filter(|(_, c)| *c > 0).collect(),
        }
    }

    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    pub fn count(&self, degree: usize) -> u64 {
        self.counts.get(&degree).copied().unwrap_or(0)
    }

    /// Number of nodes.
    pub fn len(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total stub count S = Σ k·count(k).
    pub fn stubs(&self) -> u64 {
        self.counts.iter().map(|(&k, &c)| k as u64 * c).sum()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.counts.keys().last().copied()
    }

    /// Σ k^power · count(k) / len.
    pub fn empirical_moment(&self, power: i32) -> f64 {
        let n = self.len();
        if n == 0 {
            return 0.0;
        }
        self.counts
            .iter()
            .map(|(&k, &c)| (k as f64).powi(power) * c as f64)
            .sum::<f64>()
            / n as f64
    }

    /// Degrees in increasing order, one entry per node.
    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts
            .iter()
            .flat_map(|(&k, &c)| std::iter::repeat_n(k, c as usize))
    }

    pub(crate) fn adjust(&mut self, degree: usize, delta: i64) -> bool {
        let current = self.count(degree) as i64;
        if current + delta < 0 {
            return false;
        }
        let next = (current + delta) as u64;
        if next == 0 {
            self.counts.remove(&degree);
        } else {
            self.counts.insert(degree, next);
        }
        true
    }
}

/// One step of the stub-count repair: `delta` nodes of `degree` added (or removed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairMove {
    pub degree: usize,
    pub delta: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequencePair {
    pub vertex_side: DegreeSequence,
    pub edge_side: DegreeSequence,
    /// Changes applied to the edge side to equalise stub counts.
    #[serde(default)]
    pub repair: Vec<RepairMove>,
    /// Whether one vertex stub was dropped after a parity failure.
    #[serde(default)]
    pub dropped_stub: bool,
}

impl SequencePair {
    pub fn new(vertex_side: DegreeSequence, edge_side: DegreeSequence) -> Result<Self> {
        if vertex_side.stubs() != edge_side.stubs() {
            return Err(Error::Precondition(format!(
                "stub counts differ: vertex side {} vs edge side {}",
                vertex_side.stubs(),
                edge_side.stubs()
            )));
        }
        Ok(SequencePair {
            vertex_side,
            edge_side,
            repair: Vec::new(),
            dropped_stub: false,
        })
    }

    pub fn stubs(&self) -> u64 {
        self.vertex_side.stubs()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_side.len() as usize
    }

    pub fn n_edges(&self) -> usize {
        self.edge_side.len() as usize
    }

    pub fn is_graph_like(&self) -> bool {
        self.edge_side.counts().keys().all(|&k| k == 2)
    }

    /// Drops one vertex-side stub from a vertex of largest degree. This is the
    /// documented fallback after a parity failure; it may leave the support.
    pub fn drop_vertex_stub(vertex_side: &mut DegreeSequence) -> bool {
        match vertex_side.max_degree() {
            Some(k) if k > 0 => {
                vertex_side.adjust(k, -1);
                vertex_side.adjust(k - 1, 1);
                true
            }
            _ => false,
        }
    }
}

/// Largest-remainder rounding of `n · p(k)` over a probability table.
fn largest_remainder(table: &[(usize, f64)], n: usize) -> DegreeSequence {
    let total: f64 = table.iter().map(|(_, p)| p).sum();
    if table.is_empty() || total <= 0.0 {
        return DegreeSequence::default();
    }
    let quotas: Vec<(usize, f64)> = table
        .iter()
        .map(|&(k, p)| (k, n as f64 * p / total))
        .collect();
    let mut counts: Vec<(usize, u64)> = quotas.iter().map(|&(k, q)| (k, q.floor() as u64)).collect();
    let assigned: u64 = counts.iter().map(|(_, c)| c).sum();
    let mut missing = (n as u64).saturating_sub(assigned);
    let mut order: Vec<usize> = (0..quotas.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a].1 - quotas[a].1.floor();
        let rb = quotas[b].1 - quotas[b].1.floor();
        rb.total_cmp(&ra).then(quotas[a].0.cmp(&quotas[b].0))
    });
    for idx in order.into_iter().cycle() {
        if missing == 0 {
            break;
        }
        counts[idx].1 += 1;
        missing -= 1;
    }
    DegreeSequence::new(counts)
}

/// Deterministic degree sequence of `n` nodes approximating `dist`.
pub fn realize_sequence(dist: &LimitDistribution, n: usize) -> Result<DegreeSequence> {
    realize_sequence_capped(dist, n, None)
}

/// As [`realize_sequence`], with the support additionally truncated at `cap`.
pub fn realize_sequence_capped(
    dist: &LimitDistribution,
    n: usize,
    cap: Option<usize>,
) -> Result<DegreeSequence> {
    if n == 0 {
        return Err(Error::Precondition("node count must be at least 1".into()));
    }
    dist.validate()?;
    Ok(largest_remainder(&dist.truncated_table(n, cap), n))
}

/// Quantile discretisation: node `i` gets the smallest degree `k` with
/// `F(k) >= (i + 1/2) / n` over the truncated table. Unlike largest-remainder
/// rounding this represents tail degrees down to mass about `1/n`.
pub fn realize_sequence_quantile(dist: &LimitDistribution, n: usize) -> Result<DegreeSequence> {
    if n == 0 {
        return Err(Error::Precondition("node count must be at least 1".into()));
    }
    dist.validate()?;
    let table = dist.truncated_table(n, None);
    let total: f64 = table.iter().map(|(_, p)| p).sum();
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    let mut cumulative = 0.0;
    let mut idx = 0usize;
    for &(k, p) in &table {
        cumulative += p / total;
        let upto = ((cumulative * n as f64 - 0.5).floor() as i64 + 1).clamp(0, n as i64) as usize;
        if upto > idx {
            counts.insert(k, (upto - idx) as u64);
            idx = upto;
        }
    }
    if idx < n {
        let last = table.last().map_or(0, |e| e.0);
        *counts.entry(last).or_default() += (n - idx) as u64;
    }
    Ok(DegreeSequence::new(counts))
}

/// Vertex and edge sequences with equal stub counts.
pub fn pair_sequences(
    vdist: &LimitDistribution,
    edist: &LimitDistribution,
    n: usize,
) -> Result<SequencePair> {
    edist.validate_edge_side()?;
    pair_with_vertex_side(realize_sequence(vdist, n)?, edist)
}

/// [`pair_sequences`], falling back once to
/// [`SequencePair::drop_vertex_stub`] on a parity failure.
pub fn pair_sequences_or_drop(
    vdist: &LimitDistribution,
    edist: &LimitDistribution,
    n: usize,
) -> Result<SequencePair> {
    match pair_sequences(vdist, edist, n) {
        Err(Error::ParityFailure { .. }) => {
            let mut vertex_side = realize_sequence(vdist, n)?;
            SequencePair::drop_vertex_stub(&mut vertex_side);
            let mut pair = pair_with_vertex_side(vertex_side, edist)?;
            pair.dropped_stub = true;
            Ok(pair)
        }
        other => other,
    }
}

fn pair_with_vertex_side(vertex_side: DegreeSequence, edist: &LimitDistribution) -> Result<SequencePair> {
    let target = vertex_side.stubs();
    if target == 0 {
        return Ok(SequencePair {
            vertex_side,
            edge_side: DegreeSequence::default(),
            repair: Vec::new(),
            dropped_stub: false,
        });
    }
    let edge_mean = edist.mean()?;
    let m = ((target as f64 / edge_mean).ceil() as usize).max(1);
    let table = edist.truncated_table(m, None);
    let mut edge_side = largest_remainder(&table, m);
    let allowed: Vec<usize> = table.iter().map(|&(k, _)| k).collect();
    let repair = repair_stubs(&mut edge_side, &allowed, target)?;
    Ok(SequencePair {
        vertex_side,
        edge_side,
        repair,
        dropped_stub: false,
    })
}

fn repair_stubs(seq: &mut DegreeSequence, allowed: &[usize], target: u64) -> Result<Vec<RepairMove>> {
    let mut moves = Vec::new();
    let diff = target as i64 - seq.stubs() as i64;
    if diff == 0 {
        return Ok(moves);
    }
    let smallest = *allowed.first().ok_or_else(|| Error::ParityFailure {
        vertex_stubs: target,
        detail: "edge side has an empty support".into(),
    })? as i64;
    let bulk = diff.div_euclid(smallest);
    let residual = diff.rem_euclid(smallest);
    if bulk != 0 {
        if !seq.adjust(smallest as usize, bulk) {
            return Err(Error::ParityFailure {
                vertex_stubs: target,
                detail: format!("would remove {} nodes of size {smallest}", -bulk),
            });
        }
        moves.push(RepairMove {
            degree: smallest as usize,
            delta: bulk,
        });
    }
    if residual == 0 {
        return Ok(moves);
    }
    // Signed single-node moves, smallest degrees and additions first.
    let candidates: Vec<(usize, i64)> = allowed
        .iter()
        .flat_map(|&k| [(k, 1i64), (k, -1i64)])
        .collect();
    let feasible = |combo: &[usize], seq: &DegreeSequence| {
        let mut net: BTreeMap<usize, i64> = BTreeMap::new();
        for &i in combo {
            *net.entry(candidates[i].0).or_default() += candidates[i].1;
        }
        net.iter().all(|(&k, &d)| seq.count(k) as i64 + d >= 0)
            && combo
                .iter()
                .map(|&i| candidates[i].0 as i64 * candidates[i].1)
                .sum::<i64>()
                == residual
    };
    for size in 1..=3usize {
        let mut combo = vec![0usize; size];
        loop {
            if feasible(&combo, seq) {
                for &i in &combo {
                    let (k, d) = candidates[i];
                    seq.adjust(k, d);
                    moves.push(RepairMove { degree: k, delta: d });
                }
                return Ok(moves);
            }
            // next non-decreasing combination
            let mut pos = size;
            while pos > 0 && combo[pos - 1] == candidates.len() - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            combo[pos - 1] += 1;
            let v = combo[pos - 1];
            for c in combo.iter_mut().skip(pos) {
                *c = v;
            }
        }
    }
    // Undo the bulk step so the caller sees the unrepaired sequence in errors.
    if bulk != 0 {
        seq.adjust(smallest as usize, -bulk);
    }
    Err(Error::ParityFailure {
        vertex_stubs: target,
        detail: format!(
            "residual of {residual} stubs cannot be made from sizes {allowed:?}"
        ),
    })
}

/// Verdicts for one side of a sequence family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideVerdicts {
    /// sup_k |count(k)/n - d(k)| per probe.
    pub sup_distance: Vec<f64>,
    /// Degrees outside the limit support, per probe.
    pub off_support: Vec<Vec<usize>>,
    /// Σ k² count(k)/n per probe.
    pub second_moment: Vec<f64>,
    /// Σ k⁴ count(k)/n divided by n, per probe.
    pub fourth_moment_ratio: Vec<f64>,
    pub weak_convergence: bool,
    pub support: bool,
    pub bounded_second_moment: bool,
    pub sublinear_fourth_moment: bool,
}

/// Finite-n evidence for the admissibility conditions. The conditions are
/// asymptotic, so every verdict here is advisory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub probe_sizes: Vec<usize>,
    pub tolerance: f64,
    pub vertex: SideVerdicts,
    pub edge: SideVerdicts,
    pub weak_convergence: bool,
    pub support: bool,
    pub bounded_second_moment: bool,
    pub sublinear_fourth_moment: bool,
    /// supp(vertex law) ⊆ {0, 1}.
    pub trivial: bool,
    pub advisory: bool,
}

impl AdmissibilityReport {
    pub fn all_pass(&self) -> bool {
        self.weak_convergence && self.support && self.bounded_second_moment && self.sublinear_fourth_moment
    }
}

fn side_verdicts(dist: &LimitDistribution, seqs: &[&DegreeSequence], tol: f64) -> SideVerdicts {
    let support = dist.support();
    let mut sup_distance = Vec::new();
    let mut off_support: Vec<Vec<usize>> = Vec::new();
    let mut second_moment = Vec::new();
    let mut fourth_moment_ratio = Vec::new();
    for seq in seqs {
        let n = seq.len().max(1) as f64;
        let top = seq.max_degree().unwrap_or(0).max(dist.max_degree().unwrap_or(0));
        let d = (0..=top)
            .map(|k| (seq.count(k) as f64 / n - dist.pmf(k)).abs())
            .fold(0.0, f64::max);
        sup_distance.push(d);
        off_support.push(
            seq.counts()
                .keys()
                .copied()
                .filter(|&k| !support.contains(k))
                .collect(),
        );
        second_moment.push(seq.empirical_moment(2));
        fourth_moment_ratio.push(seq.empirical_moment(4) / n);
    }
    let last = seqs.len() - 1;
    let weak_convergence = sup_distance[last] <= tol;
    let support_ok = off_support.iter().skip(1).all(|v| v.is_empty());
    let (a, b) = (second_moment[last - 1], second_moment[last]);
    let bounded_second_moment = (b - a).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    let sublinear_fourth_moment = fourth_moment_ratio.windows(2).all(|w| w[1] < w[0]);
    SideVerdicts {
        sup_distance,
        off_support,
        second_moment,
        fourth_moment_ratio,
        weak_convergence,
        support: support_ok,
        bounded_second_moment: bounded_second_moment || b == a,
        sublinear_fourth_moment,
    }
}

/// Probes a family of sequence pairs at increasing sizes.
///
/// `family(n)` builds the pair for vertex count `n`; `tolerance` is the
/// relative tolerance for convergence verdicts (1e-2 by default upstream).
pub fn check_admissibility<F>(
    vdist: &LimitDistribution,
    edist: &LimitDistribution,
    family: F,
    probe_sizes: &[usize],
    tolerance: f64,
) -> Result<AdmissibilityReport>
where
    F: Fn(usize) -> Result<SequencePair>,
{
    if probe_sizes.len() < 3 {
        return Err(Error::Precondition("need at least 3 probe sizes".into()));
    }
    if probe_sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("probe sizes must be increasing".into()));
    }
    let pairs: Vec<SequencePair> = probe_sizes.iter().map(|&n| family(n)).collect::<Result<_>>()?;
    let vseqs: Vec<&DegreeSequence> = pairs.iter().map(|p| &p.vertex_side).collect();
    let eseqs: Vec<&DegreeSequence> = pairs.iter().map(|p| &p.edge_side).collect();
    let vertex = side_verdicts(vdist, &vseqs, tolerance);
    let edge = side_verdicts(edist, &eseqs, tolerance);
    Ok(AdmissibilityReport {
        probe_sizes: probe_sizes.to_vec(),
        tolerance,
        weak_convergence: vertex.weak_convergence && edge.weak_convergence,
        support: vertex.support && edge.support,
        bounded_second_moment: vertex.bounded_second_moment && edge.bounded_second_moment,
        sublinear_fourth_moment: vertex.sublinear_fourth_moment && edge.sublinear_fourth_moment,
        trivial: vdist.support().is_subset_of_0_1(),
        advisory: true,
        vertex,
        edge,
    })
}
