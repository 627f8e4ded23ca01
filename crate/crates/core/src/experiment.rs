//! Monte Carlo harness: run-averaged payoff curves, cooperation thresholds,
//! sweeps over the cheater count and over a set of graphs, and the
//! threshold-versus-clustering regression.
//!
//! Runs execute in parallel but are reduced in run-index order, and every run
//! draws from its own stream keyed by `(master_seed, run_index)`, so results
//! are bit-identical for any number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{new_state, type_average_payoffs, Dynamics, PayoffMatrix, TypeMeans};
use crate::graphs::{random_k_regular_connected, CanonicalKey, Graph, GraphSetEntry};

/// Default horizon in plays per agent.
pub const DEFAULT_HORIZON: f64 = 50.0;

/// Runs are reduced in blocks of this size; bounds memory for large run counts.
const BLOCK: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Vanilla,
    Gossip,
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Model::Vanilla => "vanilla",
            Model::Gossip => "gossip",
        })
    }
}

/// Where the interaction network comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphSource {
    /// Everyone may meet everyone.
    Complete,
    /// A fresh connected k-regular graph for every run.
    RandomPerRun,
    /// A caller-supplied graph, shared by all runs.
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: Model,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub payoffs: PayoffMatrix,
    /// Plays per agent to simulate.
    pub horizon_r: f64,
    pub runs: usize,
    pub master_seed: u64,
    pub graph_source: GraphSource,
}

impl RunConfig {
    pub fn vanilla(n: usize, m: usize) -> Self {
        RunConfig {
            model: Model::Vanilla,
            n,
            k: n.saturating_sub(1),
            m,
            payoffs: PayoffMatrix::default(),
            horizon_r: DEFAULT_HORIZON,
            runs: 1000,
            master_seed: 0,
            graph_source: GraphSource::Complete,
        }
    }

    pub fn gossip_random(n: usize, k: usize, m: usize) -> Self {
        RunConfig {
            model: Model::Gossip,
            k,
            graph_source: GraphSource::RandomPerRun,
            ..RunConfig::vanilla(n, m)
        }
    }

    /// Number of recorded steps: `ceil(horizon_r * n / 2)`.
    pub fn steps(&self) -> usize {
        (self.horizon_r * self.n as f64 / 2.0).ceil() as usize
    }

    pub fn validate(&self, graph: Option<&Graph>) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("group size n must be at least 2"));
        }
        if self.m > self.n {
            return Err(Error::invalid(format!("m={} exceeds n={}", self.m, self.n)));
        }
        if !(self.horizon_r.is_finite() && self.horizon_r > 0.0) {
            return Err(Error::invalid(
                "horizon must be a positive number of plays per agent",
            ));
        }
        if self.runs == 0 {
            return Err(Error::invalid("runs must be at least 1"));
        }
        self.payoffs.validate()?;
        match (self.graph_source, graph) {
            (GraphSource::Fixed, None) => Err(Error::invalid("a fixed graph source needs a graph")),
            (GraphSource::Fixed, Some(g)) if g.node_count() != self.n => Err(Error::invalid(
                format!("graph has {} nodes but n={}", g.node_count(), self.n),
            )),
            (GraphSource::Fixed, Some(g)) if g.edge_count() == 0 => {
                Err(Error::invalid("the interaction graph has no edges"))
            }
            (GraphSource::Fixed, Some(_)) => Ok(()),
            (_, Some(_)) => Err(Error::invalid(
                "a graph was supplied but the graph source is not fixed",
            )),
            (GraphSource::RandomPerRun, None) => {
                if self.k == 0 || self.k >= self.n || !(self.n * self.k).is_multiple_of(2) {
                    Err(Error::invalid(format!(
                        "no connected {}-regular graph on {} nodes",
                        self.k, self.n
                    )))
                } else {
                    Ok(())
                }
            }
            (GraphSource::Complete, None) => Ok(()),
        }
    }
}

/// Per-run random stream for `(master_seed, run_index)`.
pub fn seed_schedule(master_seed: u64, run_index: u64) -> ChaCha8Rng {
    SeedSchedule::new(master_seed).stream(run_index)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedSchedule {
    master: u64,
}

impl SeedSchedule {
    pub fn new(master: u64) -> Self {
        SeedSchedule { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    pub fn stream(&self, run_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(run_index);
        rng
    }

    /// An independent schedule for a labelled sub-experiment.
    pub fn derive(&self, label: u64) -> SeedSchedule {
        SeedSchedule::new(splitmix64(
            self.master ^ splitmix64(label.wrapping_add(0x5eed)),
        ))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Running mean and variance for one curve at one step (Welford updates).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MeanAccumulator {
    pub count: usize,
    mean: f64,
    m2: f64,
}

impl MeanAccumulator {
    fn push(&mut self, x: Option<f64>) {
        if let Some(x) = x {
            self.count += 1;
            let delta = x - self.mean;
            self.mean += delta / self.count as f64;
            self.m2 += delta * (x - self.mean);
        }
    }

    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then_some(self.mean)
    }

    /// Standard error of the mean; `None` with fewer than two samples.
    pub fn std_error(&self) -> Option<f64> {
        if self.count < 2 {
            return None;
        }
        let c = self.count as f64;
        let var = (self.m2 / (c - 1.0)).max(0.0);
        Some((var / c).sqrt())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    /// 1-based step index.
    pub step: usize,
    /// Plays per agent, `2 * step / n`.
    pub r: f64,
    pub coop: MeanAccumulator,
    pub cheat: MeanAccumulator,
}

impl CurvePoint {
    pub fn coop_mean(&self) -> Option<f64> {
        self.coop.mean()
    }

    pub fn cheat_mean(&self) -> Option<f64> {
        self.cheat.mean()
    }
}

/// Run-averaged per-interaction payoffs by type after every step.
#[derive(Clone, Debug, PartialEq)]
pub struct PayoffCurves {
    pub n: usize,
    /// Cheaters per run.
    pub m: usize,
    pub runs: usize,
    pub points: Vec<CurvePoint>,
}

impl PayoffCurves {
    fn empty(n: usize, m: usize, steps: usize) -> Self {
        PayoffCurves {
            n,
            m,
            runs: 0,
            points: (1..=steps)
                .map(|step| CurvePoint {
                    step,
                    r: plays_per_agent(step, n),
                    coop: MeanAccumulator::default(),
                    cheat: MeanAccumulator::default(),
                })
                .collect(),
        }
    }

    fn add_run(&mut self, run: &[TypeMeans]) {
        for (p, means) in self.points.iter_mut().zip(run) {
            p.coop.push(means.coop);
            p.cheat.push(means.cheat);
        }
        self.runs += 1;
    }

    /// Builds curves from explicit means, one entry per step (for synthetic input).
    pub fn from_means(n: usize, m: usize, means: &[TypeMeans]) -> Self {
        let mut c = PayoffCurves::empty(n, m, means.len());
        c.add_run(means);
        c
    }
}

pub fn plays_per_agent(step: usize, n: usize) -> f64 {
    2.0 * step as f64 / n as f64
}

/// Simulates one run and returns the type means after each step.
fn simulate_run(
    cfg: &RunConfig,
    fixed: Option<&Graph>,
    run_index: u64,
    steps: usize,
) -> Result<Vec<TypeMeans>> {
    let mut rng = seed_schedule(cfg.master_seed, run_index);
    let owned;
    let complete;
    let graph: Option<&Graph> = match cfg.graph_source {
        GraphSource::Fixed => fixed,
        GraphSource::RandomPerRun => {
            owned = random_k_regular_connected(cfg.n, cfg.k, &mut rng)?;
            Some(&owned)
        }
        GraphSource::Complete => match cfg.model {
            Model::Vanilla => None,
            Model::Gossip => {
                complete = Graph::complete(cfg.n)?;
                Some(&complete)
            }
        },
    };
    let dynamics = match (cfg.model, graph) {
        (Model::Vanilla, None) => Dynamics::vanilla(),
        (Model::Vanilla, Some(g)) => Dynamics::vanilla_on_edges(g)?,
        (Model::Gossip, Some(g)) => Dynamics::gossip(g)?,
        (Model::Gossip, None) => unreachable!("gossip always has a graph"),
    };
    let mut state = new_state(cfg.n, cfg.m, &mut rng)?;
    dynamics.check_state(&state)?;
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        dynamics.step_unchecked(&mut state, &cfg.payoffs, &mut rng);
        out.push(type_average_payoffs(&state));
    }
    Ok(out)
}

/// Averages `cfg.runs` independent runs pointwise, each curve over the runs where it is defined.
pub fn run_curves(cfg: &RunConfig, graph: Option<&Graph>) -> Result<PayoffCurves> {
    cfg.validate(graph)?;
    let steps = cfg.steps();
    let mut curves = PayoffCurves::empty(cfg.n, cfg.m, steps);
    let mut start = 0;
    while start < cfg.runs {
        let end = (start + BLOCK).min(cfg.runs);
        let block: Vec<Vec<TypeMeans>> = (start..end)
            .into_par_iter()
            .map(|run| simulate_run(cfg, graph, run as u64, steps))
            .collect::<Result<_>>()?;
        for run in &block {
            curves.add_run(run);
        }
        start = end;
    }
    Ok(curves)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdResult {
    /// Step of the first crossing.
    pub step: Option<usize>,
    /// Plays per agent at the first crossing.
    pub r_star: Option<f64>,
}

impl ThresholdResult {
    pub const NONE: ThresholdResult = ThresholdResult {
        step: None,
        r_star: None,
    };
}

/// First recorded point where both means are defined and `coop >= cheat`.
///
/// Without cheaters there is nothing to beat and the first step counts.
pub fn threshold_from_curves(curves: &PayoffCurves) -> ThresholdResult {
    curves
        .points
        .iter()
        .find(|p| match (p.coop_mean(), p.cheat_mean()) {
            (Some(c), Some(d)) => c >= d,
            (Some(_), None) => curves.m == 0,
            _ => false,
        })
        .map_or(ThresholdResult::NONE, |p| ThresholdResult {
            step: Some(p.step),
            r_star: Some(p.r),
        })
}

/// Threshold for each cheater count; each `m` gets its own derived seed schedule.
pub fn sweep_m(
    template: &RunConfig,
    m_values: &[usize],
    graph: Option<&Graph>,
) -> Result<Vec<(usize, ThresholdResult)>> {
    for &m in m_values {
        if m == 0 || m >= template.n {
            return Err(Error::invalid(format!("m={m} outside 1..{}", template.n)));
        }
    }
    let schedule = SeedSchedule::new(template.master_seed);
    m_values
        .iter()
        .map(|&m| {
            let cfg = RunConfig {
                m,
                master_seed: schedule.derive(m as u64).master(),
                ..template.clone()
            };
            Ok((m, threshold_from_curves(&run_curves(&cfg, graph)?)))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub graph_id: CanonicalKey,
    pub chi: f64,
    pub m: usize,
    pub threshold: ThresholdResult,
}

/// Checks that every graph has `n` nodes and degree `k` everywhere.
pub fn validate_graph_set(entries: &[GraphSetEntry]) -> Result<(usize, usize)> {
    let first = entries
        .first()
        .ok_or_else(|| Error::Validation("the graph set is empty".into()))?;
    let n = first.graph.node_count();
    let k = first.graph.regular_degree().ok_or_else(|| {
        Error::Validation(format!("graph {} is not regular", first.canonical_key))
    })?;
    for e in entries {
        if e.graph.node_count() != n || e.graph.regular_degree() != Some(k) {
            return Err(Error::Validation(format!(
                "graph {} is not {k}-regular on {n} nodes",
                e.canonical_key
            )));
        }
    }
    Ok((n, k))
}

/// One threshold per graph, with cheaters re-drawn in every run.
///
/// All graphs share the template's seed schedule, so run `i` draws from the
/// same stream on every graph.
pub fn sweep_clustering(
    graph_set: &[GraphSetEntry],
    m: usize,
    template: &RunConfig,
) -> Result<Vec<SweepRecord>> {
    let (n, k) = validate_graph_set(graph_set)?;
    if m == 0 || m >= n {
        return Err(Error::invalid(format!("m={m} outside 1..{n}")));
    }
    let cfg = RunConfig {
        n,
        k,
        m,
        graph_source: GraphSource::Fixed,
        ..template.clone()
    };
    graph_set
        .par_iter()
        .map(|e| {
            let curves = run_curves(&cfg, Some(&e.graph))?;
            Ok(SweepRecord {
                graph_id: e.canonical_key.clone(),
                chi: e.chi,
                m,
                threshold: threshold_from_curves(&curves),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares of y on x.
///
/// When every y is equal the fit is exact and `r_squared` is 1.
pub fn ols_fit(points: &[(f64, f64)]) -> Result<OlsFit> {
    if points.len() < 2 {
        return Err(Error::invalid("regression needs at least two points"));
    }
    let c = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / c;
    let my = points.iter().map(|p| p.1).sum::<f64>() / c;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateRegression);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(OlsFit {
        slope,
        intercept,
        r_squared,
        points: points.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdFit {
    pub m: usize,
    pub fit: OlsFit,
    /// Records left out because no crossing occurred within the horizon.
    pub excluded: usize,
}

/// Regresses r_star on chi over the records with a crossing.
pub fn fit_thresholds(records: &[SweepRecord]) -> Result<ThresholdFit> {
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| r.threshold.r_star.map(|y| (r.chi, y)))
        .collect();
    let fit = ols_fit(&points)?;
    Ok(ThresholdFit {
        m: records.first().map_or(0, |r| r.m),
        fit,
        excluded: records.len() - points.len(),
    })
}
