//! Monte Carlo experiments: seeded trial runs with per-run invariant checks,
//! reproductions of the two adversarial claims, concentration-tail checks,
//! and the verification suites.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classic::{diameter_bound, exp_clock_ldd, mpx_cluster, sparse_cover};
use crate::covering::approx_cover_run;
use crate::error::{ensure, Error, Result};
use crate::graph::{
    generate, validate_decomposition, Decomposition, DiameterMode, Distance, FamilySpec, Graph, Hypergraph, MpxLayout,
};
use crate::ilp::{brute_force_opt, local_restrict, weight, Constraint, FixedState, IlpInstance, Rational, Sense};
use crate::packing::approx_pack_run;
use crate::sim::{ConstantProfile, SimContext, Topology};
use crate::whp::{refine_clusters, refine_radius_bound, whp_run, ClusterKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    ExpClock,
    Mpx,
    Whp,
    WhpRefined,
    SparseCover,
    Pack,
    Cover,
}

impl Algorithm {
    fn needs_lambda(self) -> bool {
        matches!(self, Algorithm::ExpClock | Algorithm::Mpx | Algorithm::SparseCover)
    }

    fn needs_eps(self) -> bool {
        matches!(self, Algorithm::Whp | Algorithm::WhpRefined | Algorithm::Pack | Algorithm::Cover)
    }
}

/// What an experiment runs on. Families are regenerated from each trial's
/// seed (only `gnp` depends on it).
#[derive(Debug, Clone)]
pub enum Input {
    Family(FamilySpec),
    Graph(Graph),
    Hypergraph(Hypergraph),
    Ilp(IlpInstance),
}

impl Input {
    pub fn describe(&self) -> String {
        match self {
            Input::Family(f) => f.to_string(),
            Input::Graph(g) => format!("graph(n={},m={})", g.vertex_count(), g.edge_count()),
            Input::Hypergraph(h) => format!("hypergraph(n={},m={})", h.vertex_count(), h.edge_count()),
            Input::Ilp(i) => format!(
                "{}(n={},m={})",
                match i.sense() {
                    Sense::Packing => "packing",
                    Sense::Covering => "covering",
                },
                i.var_count(),
                i.constraints().len()
            ),
        }
    }

    fn vertex_count(&self) -> Result<usize> {
        Ok(match self {
            Input::Family(f) => generate(f, 0)?.vertex_count(),
            Input::Graph(g) => g.vertex_count(),
            Input::Hypergraph(h) => h.vertex_count(),
            Input::Ilp(i) => i.var_count(),
        })
    }

    fn topology(&self, seed: u64) -> Result<Topology> {
        Ok(match self {
            Input::Family(f) => Topology::Graph(generate(f, seed)?),
            Input::Graph(g) => Topology::Graph(g.clone()),
            Input::Hypergraph(h) => Topology::Hypergraph(h.clone()),
            Input::Ilp(i) => Topology::Hypergraph(i.associated_hypergraph()),
        })
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub algorithm: Algorithm,
    pub input: Input,
    pub eps: Option<f64>,
    pub lambda: Option<f64>,
    /// Defaults to the vertex count, or for ILPs to `max(n, total weight)`.
    pub n_tilde: Option<usize>,
    pub profile: ConstantProfile,
    pub seed: u64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEcho {
    pub algorithm: Algorithm,
    pub input: String,
    pub eps: Option<f64>,
    pub lambda: Option<f64>,
    pub n_tilde: usize,
    pub profile: ConstantProfile,
    pub seed: u64,
    pub trials: usize,
    /// Brute-forced optimum of an ILP input, when within the cap.
    pub reference_opt: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Aggregate {
    pub count: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub q05: f64,
    pub median: f64,
    pub q95: f64,
    pub max: f64,
    /// Normal-approximation 95% half-width of the mean.
    pub ci95: f64,
}

impl Aggregate {
    pub fn of(values: &[f64]) -> Aggregate {
        let n = values.len();
        if n == 0 {
            return Aggregate { count: 0, mean: 0.0, std_dev: 0.0, min: 0.0, q05: 0.0, median: 0.0, q95: 0.0, max: 0.0, ci95: 0.0 };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 { values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q = |p: f64| sorted[((p * n as f64).ceil() as usize).clamp(1, n) - 1];
        let std_dev = var.sqrt();
        Aggregate {
            count: n,
            mean,
            std_dev,
            min: sorted[0],
            q05: q(0.05),
            median: q(0.5),
            q95: q(0.95),
            max: sorted[n - 1],
            ci95: 1.96 * std_dev / (n as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialReport {
    pub config: ConfigEcho,
    pub records: Vec<TrialRecord>,
    pub aggregates: BTreeMap<String, Aggregate>,
}

impl TrialReport {
    pub fn aggregate(records: &[TrialRecord]) -> BTreeMap<String, Aggregate> {
        let mut by_metric: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for r in records {
            for (k, &v) in &r.metrics {
                by_metric.entry(k.clone()).or_default().push(v);
            }
        }
        by_metric.into_iter().map(|(k, v)| (k, Aggregate::of(&v))).collect()
    }

    /// Checks the record layout and that the aggregates equal a recomputation.
    pub fn validate(&self) -> Result<()> {
        let c = &self.config;
        ensure!(self.records.len() == c.trials, "{} records for {} trials", self.records.len(), c.trials);
        for (i, r) in self.records.iter().enumerate() {
            ensure!(r.trial == i && r.seed == c.seed.wrapping_add(i as u64), "record {i} has the wrong trial or seed");
            ensure!(r.metrics.values().all(|v| v.is_finite()), "record {i} has a non-finite metric");
        }
        ensure!(Self::aggregate(&self.records) == self.aggregates, "aggregates differ from the records");
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Parses and validates a report.
    pub fn from_json(text: &str) -> Result<Self> {
        let r: TrialReport = serde_json::from_str(text).map_err(|e| Error::Parameter(format!("bad report: {e}")))?;
        r.validate()?;
        Ok(r)
    }

    /// One row per (trial, metric): `trial,seed,metric,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,seed,metric,value\n");
        for r in &self.records {
            for (k, v) in &r.metrics {
                writeln!(out, "{},{},{},{}", r.trial, r.seed, k, v).unwrap();
            }
        }
        out
    }

    /// Fraction of trials whose `metric` is nonzero.
    pub fn frequency(&self, metric: &str) -> f64 {
        let hits = self.records.iter().filter(|r| r.metrics.get(metric).is_some_and(|&v| v != 0.0)).count();
        hits as f64 / self.records.len().max(1) as f64
    }
}

fn default_n_tilde(input: &Input) -> Result<usize> {
    let n = input.vertex_count()?.max(1);
    Ok(match input {
        Input::Ilp(i) => n.max(i.total_weight() as usize),
        _ => n,
    })
}

fn reference_opt(spec: &ExperimentSpec) -> Option<u64> {
    let Input::Ilp(inst) = &spec.input else { return None };
    let all: Vec<usize> = (0..inst.var_count()).collect();
    let local = local_restrict(inst, &all);
    brute_force_opt(&local, &FixedState::all_free(inst.var_count()), spec.profile.brute_force_cap)
        .ok()
        .map(|a| local.weight_of(&a))
}

/// Runs `trials` independent seeded trials (seed of trial `i` is
/// `seed + i`), validating every run. Any invariant violation aborts with
/// the offending seed.
pub fn run_trials(spec: &ExperimentSpec) -> Result<TrialReport> {
    ensure!(spec.trials >= 1, "at least one trial is needed");
    spec.profile.validate()?;
    if spec.algorithm.needs_lambda() && spec.lambda.is_none() {
        return Err(Error::Parameter(format!("{:?} needs lambda", spec.algorithm)));
    }
    if spec.algorithm.needs_eps() && spec.eps.is_none() {
        return Err(Error::Parameter(format!("{:?} needs eps", spec.algorithm)));
    }
    let ilp_algo = matches!(spec.algorithm, Algorithm::Pack | Algorithm::Cover);
    if ilp_algo != matches!(spec.input, Input::Ilp(_)) {
        return Err(Error::Parameter("pack and cover run on ILP inputs, and only they do".into()));
    }
    if spec.algorithm == Algorithm::SparseCover && !matches!(spec.input, Input::Hypergraph(_)) {
        return Err(Error::NotHypergraph);
    }
    let n_tilde = match spec.n_tilde {
        Some(n) => n,
        None => default_n_tilde(&spec.input)?,
    };
    let opt = reference_opt(spec);
    let records: Vec<Result<TrialRecord>> = (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = spec.seed.wrapping_add(trial as u64);
            run_one(spec, n_tilde, opt, seed)
                .map(|metrics| TrialRecord { trial, seed, metrics })
                .map_err(|e| Error::Trial { seed, error: Box::new(e) })
        })
        .collect();
    let records = records.into_iter().collect::<Result<Vec<_>>>()?;
    let config = ConfigEcho {
        algorithm: spec.algorithm,
        input: spec.input.describe(),
        eps: spec.eps,
        lambda: spec.lambda,
        n_tilde,
        profile: spec.profile.clone(),
        seed: spec.seed,
        trials: spec.trials,
        reference_opt: opt,
    };
    let aggregates = TrialReport::aggregate(&records);
    Ok(TrialReport { config, records, aggregates })
}

fn finite(d: Distance) -> Option<usize> {
    d.finite()
}

fn ldd_metrics(g: &Graph, d: &Decomposition, m: &mut BTreeMap<String, f64>) -> Result<crate::graph::ValidationReport> {
    let report = validate_decomposition(g, d, 1.0, usize::MAX)?;
    ensure!(report.non_adjacent_ok, "two clusters are adjacent");
    m.insert("deleted_fraction".into(), report.deleted_fraction);
    m.insert("clusters".into(), d.cluster_count() as f64);
    if let Some(w) = finite(report.max_weak_diameter) {
        m.insert("max_weak_diameter".into(), w as f64);
    }
    if let Some(s) = finite(report.max_strong_diameter) {
        m.insert("max_strong_diameter".into(), s as f64);
    }
    Ok(report)
}

fn run_one(spec: &ExperimentSpec, n_tilde: usize, opt: Option<u64>, seed: u64) -> Result<BTreeMap<String, f64>> {
    let topology = spec.input.topology(seed)?;
    let mut ctx = SimContext::new(topology, n_tilde, seed, spec.profile.clone())?;
    let mut m = BTreeMap::new();
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    match spec.algorithm {
        Algorithm::ExpClock => {
            let lambda = spec.lambda.expect("checked");
            let d = exp_clock_ldd(&mut ctx, lambda)?;
            let report = ldd_metrics(ctx.graph(), &d, &mut m)?;
            let bound = diameter_bound(&ctx, lambda).ceil() as usize;
            ensure!(
                report.max_strong_diameter <= Distance::Finite(bound),
                "strong diameter {:?} exceeds {bound}",
                report.max_strong_diameter
            );
        }
        Algorithm::Mpx => {
            let lambda = spec.lambda.expect("checked");
            let out = mpx_cluster(&mut ctx, lambda)?;
            let d = Decomposition::from_labels(&out.centre.iter().map(|&c| Some(c)).collect::<Vec<_>>());
            let bound = diameter_bound(&ctx, lambda).ceil() as usize;
            for c in d.clusters() {
                let s = ctx.graph().set_diameter(&c, DiameterMode::Strong)?;
                ensure!(s <= Distance::Finite(bound), "mpx cluster strong diameter {s:?} exceeds {bound}");
            }
            let edges = ctx.graph().edge_count();
            m.insert("cut_edges".into(), out.cut_edges.len() as f64);
            m.insert("cut_fraction".into(), if edges == 0 { 0.0 } else { out.cut_edges.len() as f64 / edges as f64 });
            m.insert("clusters".into(), d.cluster_count() as f64);
        }
        Algorithm::Whp | Algorithm::WhpRefined => {
            let eps = spec.eps.expect("checked");
            let run_eps = if spec.algorithm == Algorithm::WhpRefined { eps / 2.0 } else { eps };
            let run = whp_run(&mut ctx, run_eps)?;
            let g = ctx.graph().clone();
            let lambda3 = run_eps / ctx.profile().phase3_lambda_divisor;
            let (t, r) = (run.params.t, run.params.r);
            for (kind, members) in &run.clusters {
                let w = g.set_diameter(members, DiameterMode::Weak)?;
                let bound = match kind {
                    ClusterKind::Ball { .. } => 2 * (t + 2) * r,
                    ClusterKind::Clock { .. } => diameter_bound(&ctx, lambda3).ceil() as usize,
                };
                ensure!(w <= Distance::Finite(bound), "cluster weak diameter {w:?} exceeds {bound}");
            }
            let rounds = ctx.ledger().cumulative_excluding("whp/nv");
            ensure!(rounds <= run.round_bound, "ledger {rounds} exceeds the round bound {}", run.round_bound);
            m.insert("rounds".into(), rounds as f64);
            m.insert("round_bound".into(), run.round_bound as f64);
            m.insert("t".into(), t as f64);
            m.insert("r".into(), r as f64);
            let d = if spec.algorithm == Algorithm::WhpRefined {
                let refined = refine_clusters(&g, &run.decomposition, eps)?;
                let bound = 2.0 * refine_radius_bound(g.vertex_count().max(1), eps / 2.0);
                for c in refined.decomposition.clusters() {
                    let s = g.set_diameter(&c, DiameterMode::Strong)?;
                    ensure!(s.finite().is_some_and(|s| s as f64 <= bound), "refined cluster strong diameter {s:?} exceeds {bound}");
                }
                refined.decomposition
            } else {
                run.decomposition
            };
            let report = ldd_metrics(&g, &d, &mut m)?;
            m.insert("deleted_within_eps".into(), flag(report.deleted_fraction <= eps));
        }
        Algorithm::SparseCover => {
            let lambda = spec.lambda.expect("checked");
            let cover = sparse_cover(&mut ctx, lambda)?;
            let n = cover.multiplicity.len().max(1) as f64;
            let x = &cover.multiplicity;
            m.insert("mean_multiplicity".into(), x.iter().sum::<usize>() as f64 / n);
            m.insert("max_multiplicity".into(), x.iter().copied().max().unwrap_or(0) as f64);
            m.insert("fraction_multiplicity_ge3".into(), x.iter().filter(|&&k| k >= 3).count() as f64 / n);
            m.insert("clusters".into(), cover.clusters.len() as f64);
        }
        Algorithm::Pack | Algorithm::Cover => {
            let Input::Ilp(inst) = &spec.input else { unreachable!("checked") };
            let eps = spec.eps.expect("checked");
            let w = if spec.algorithm == Algorithm::Pack {
                approx_pack_run(&mut ctx, inst, eps)?.weight
            } else {
                approx_cover_run(&mut ctx, inst, eps)?.weight
            };
            m.insert("weight".into(), w as f64);
            if let Some(opt) = opt {
                m.insert("opt".into(), opt as f64);
                let within = match spec.algorithm {
                    Algorithm::Pack => w as f64 >= (1.0 - eps) * opt as f64,
                    _ => w as f64 <= (1.0 + eps) * opt as f64,
                };
                m.insert("within_eps".into(), flag(within));
            }
        }
    }
    m.insert("rounds_total".into(), ctx.ledger().cumulative() as f64);
    Ok(m)
}

/// A frequency estimate against an analytic lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimEstimate {
    pub trials: usize,
    pub hits: usize,
    pub estimate: f64,
    /// `sqrt(p̂(1 - p̂) / trials)`.
    pub sigma: f64,
    pub bound: f64,
}

impl ClaimEstimate {
    fn new(trials: usize, hits: usize, bound: f64) -> Self {
        let estimate = hits as f64 / trials.max(1) as f64;
        let sigma = (estimate * (1.0 - estimate) / trials.max(1) as f64).sqrt();
        ClaimEstimate { trials, hits, estimate, sigma, bound }
    }

    /// `estimate >= bound - tolerance`.
    pub fn meets(&self, tolerance: f64) -> bool {
        self.estimate >= self.bound - tolerance
    }
}

/// Clique claim: on `K_n`, the exponential-clock decomposition with rate
/// `eps` deletes at least `n - 1` vertices with probability at least
/// `1 - e^{-eps}`.
pub fn claim_clique(n: usize, eps: f64, trials: usize, seed: u64) -> Result<ClaimEstimate> {
    ensure!(n >= 3, "clique claim needs n >= 3");
    let g = generate(&FamilySpec::Clique(n), 0)?;
    let base = SimContext::new(Topology::Graph(g), n, seed, ConstantProfile::desk())?;
    let hits: Vec<Result<bool>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut ctx = base.reseeded(seed.wrapping_add(i as u64));
            Ok(exp_clock_ldd(&mut ctx, eps)?.deleted_count() + 1 >= n)
        })
        .collect();
    let hits = hits.into_iter().collect::<Result<Vec<_>>>()?.into_iter().filter(|&h| h).count();
    Ok(ClaimEstimate::new(trials, hits, 1.0 - (-eps).exp()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpxClaim {
    pub t: usize,
    pub eps: f64,
    /// Frequency of the witnessing event against its analytic lower bound.
    pub event: ClaimEstimate,
    /// Frequency of cutting at least a `t²/(t²+4t)` fraction of the edges.
    pub cut: ClaimEstimate,
    /// Trials with the event but without the cut; must be 0.
    pub implication_violations: usize,
    /// Exact event probability: `(t/(4t+2))(t/(4t+1)) e^{-4 eps} (1 - e^{-eps})`.
    pub exact_event_probability: f64,
}

/// The analytic lower bound `(t/(4t+2))(t/(4t+1)) e^{-2 eps} (1 - e^{-eps})` on the witnessing event.
pub fn mpx_paper_bound(t: usize, eps: f64) -> f64 {
    let t = t as f64;
    t / (4.0 * t + 2.0) * (t / (4.0 * t + 1.0)) * (-2.0 * eps).exp() * (1.0 - (-eps).exp())
}

/// Exact witnessing-event probability. The gap between the largest and the
/// second-largest of i.i.d. `Exp(eps)` clocks is `Exp(eps)`, and the gap
/// between the second and third is `Exp(2 eps)`, independent of the gap
/// above and of which vertices hold the ranks.
pub fn mpx_exact_event_probability(t: usize, eps: f64) -> f64 {
    let t = t as f64;
    t / (4.0 * t + 2.0) * (t / (4.0 * t + 1.0)) * (-4.0 * eps).exp() * (1.0 - (-eps).exp())
}

/// Clustering claim on `mpx_adversarial(t)`: records both the witnessing
/// event (computed from the clocks) and the heavy cut, and checks that the
/// event implies the cut.
pub fn claim_mpx(t: usize, eps: f64, trials: usize, seed: u64) -> Result<MpxClaim> {
    ensure!(t >= 2, "mpx claim needs t >= 2");
    let g = generate(&FamilySpec::MpxAdversarial(t), 0)?;
    let n = g.vertex_count();
    let lay = MpxLayout { t };
    let base = SimContext::new(Topology::Graph(g), n, seed, ConstantProfile::desk())?;
    let outcomes: Vec<Result<(bool, bool)>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut ctx = base.reseeded(seed.wrapping_add(i as u64));
            let out = mpx_cluster(&mut ctx, eps)?;
            let clocks = &out.clocks.clocks;
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| clocks[b].total_cmp(&clocks[a]).then(a.cmp(&b)));
            let (w1, w2, w3) = (order[0], order[1], order[2]);
            let event = lay.s_left().contains(&w1)
                && lay.s_right().contains(&w2)
                && clocks[w2] > clocks[w3] + 2.0
                && clocks[w1] < clocks[w2] + 1.0;
            Ok((event, out.cut_edges.len() >= t * t))
        })
        .collect();
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let event_hits = outcomes.iter().filter(|o| o.0).count();
    let cut_hits = outcomes.iter().filter(|o| o.1).count();
    let implication_violations = outcomes.iter().filter(|o| o.0 && !o.1).count();
    let bound = mpx_paper_bound(t, eps);
    Ok(MpxClaim {
        t,
        eps,
        event: ClaimEstimate::new(trials, event_hits, bound),
        cut: ClaimEstimate::new(trials, cut_hits, event_hits as f64 / trials.max(1) as f64),
        implication_violations,
        exact_event_probability: mpx_exact_event_probability(t, eps),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "dist")]
pub enum TailSpec {
    /// Sum of `n` independent Bernoulli(`p`); tails at `(1 ± delta) mu`.
    BernoulliSum { n: u64, p: f64, delta: f64 },
    /// Sum of `n` independent geometric(`p`) on `{1, 2, ...}`; tail at `mu + delta n`.
    GeometricSum { n: u64, p: f64, delta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailLine {
    pub name: String,
    pub threshold: f64,
    pub empirical: f64,
    pub bound: f64,
    /// Standard error of the empirical frequency if the true tail equalled the bound.
    pub sigma: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub spec: TailSpec,
    pub samples: usize,
    pub lines: Vec<TailLine>,
}

impl TailCheck {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }
}

fn tail_line(name: &str, threshold: f64, hits: usize, samples: usize, bound: f64) -> TailLine {
    let empirical = hits as f64 / samples as f64;
    let b = bound.min(1.0);
    let sigma = (b * (1.0 - b) / samples as f64).sqrt();
    TailLine { name: name.into(), threshold, empirical, bound, sigma, passed: empirical <= bound + 3.0 * sigma }
}

/// Samples the sum and compares its empirical tail with the analytic bound
/// (passes when within `3 sigma`).
pub fn tail_check(spec: TailSpec, samples: usize, seed: u64) -> Result<TailCheck> {
    ensure!(samples >= 1, "at least one sample is needed");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bad = |what: &str| Error::Parameter(format!("tail check: {what}"));
    let lines = match spec {
        TailSpec::BernoulliSum { n, p, delta } => {
            if !(p > 0.0 && p <= 1.0) || n == 0 || !(delta > 0.0) {
                return Err(bad("need n >= 1, 0 < p <= 1, delta > 0"));
            }
            let dist = Binomial::new(n, p).map_err(|e| bad(&e.to_string()))?;
            let mu = n as f64 * p;
            let (hi, lo) = ((1.0 + delta) * mu, (1.0 - delta) * mu);
            let (mut upper, mut lower) = (0, 0);
            for _ in 0..samples {
                let x = dist.sample(&mut rng) as f64;
                upper += (x >= hi) as usize;
                lower += (x <= lo) as usize;
            }
            let mut lines = vec![tail_line("upper", hi, upper, samples, (-delta * delta * mu / (2.0 + delta)).exp())];
            if delta < 1.0 {
                lines.push(tail_line("lower", lo, lower, samples, (-delta * delta * mu / 2.0).exp()));
            }
            lines
        }
        TailSpec::GeometricSum { n, p, delta } => {
            if !(p > 0.0 && p <= 1.0) || n == 0 {
                return Err(bad("need n >= 1 and 0 < p <= 1"));
            }
            if !(delta > 1.0 / p - 1.0) {
                return Err(bad(&format!("delta = {delta} must exceed 1/p - 1 = {}", 1.0 / p - 1.0)));
            }
            let dist = Geometric::new(p).map_err(|e| bad(&e.to_string()))?;
            let mu = n as f64 / p;
            let threshold = mu + delta * n as f64;
            let mut hits = 0;
            for _ in 0..samples {
                let x: u64 = (0..n).map(|_| dist.sample(&mut rng) + 1).sum();
                hits += (x as f64 > threshold) as usize;
            }
            vec![tail_line("upper", threshold, hits, samples, (-p * p * delta * n as f64 / 6.0).exp())]
        }
    };
    Ok(TailCheck { spec, samples, lines })
}

/// A random instance on `n >= 2` variables and `m` constraints: supports
/// of 2 to 4 variables, coefficients in `{1/2, 1, 3/2, 2}`, weights 1 to 5.
/// Packing bounds are 1 to 3; covering bounds are at most the row sum, so
/// the all-ones assignment is feasible.
pub fn random_instance(sense: Sense, n: usize, m: usize, seed: u64) -> IlpInstance {
    assert!(n >= 2, "random instances need two variables");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = (0..n).map(|_| rng.gen_range(1..=5)).collect();
    let rows = (0..m)
        .map(|_| {
            let k = rng.gen_range(2..=n.min(4));
            let vars = rand::seq::index::sample(&mut rng, n, k).into_vec();
            let coeffs: Vec<Rational> = (0..k).map(|_| Rational::new(rng.gen_range(1..=4), 2)).collect();
            let bound = match sense {
                Sense::Packing => rng.gen_range(1..=3),
                Sense::Covering => {
                    let sum: Rational = coeffs.iter().sum();
                    rng.gen_range(1..=sum.to_integer().max(1))
                }
            };
            Constraint::new(vars, coeffs, Rational::from_integer(bound))
        })
        .collect();
    IlpInstance::new(sense, weights, rows).expect("generated rows are well formed")
}

/// Minimum vertex cover as a covering program.
pub fn vertex_cover_instance(g: &Graph) -> IlpInstance {
    let rows = g.edges().map(|(u, v)| Constraint::unit(vec![u, v], 1)).collect();
    IlpInstance::new(Sense::Covering, vec![1; g.vertex_count()], rows).expect("edges are valid")
}

/// Minimum dominating set as a covering program.
pub fn dominating_set_instance(g: &Graph) -> IlpInstance {
    let rows = (0..g.vertex_count())
        .map(|v| {
            let mut vars = vec![v];
            vars.extend_from_slice(g.neighbors(v));
            Constraint::unit(vars, 1)
        })
        .collect();
    IlpInstance::new(Sense::Covering, vec![1; g.vertex_count()], rows).expect("neighbourhoods are valid")
}

/// Maximum independent set as a packing program.
pub fn independent_set_instance(g: &Graph) -> IlpInstance {
    let rows = g.edges().map(|(u, v)| Constraint::unit(vec![u, v], 1)).collect();
    IlpInstance::new(Sense::Packing, vec![1; g.vertex_count()], rows).expect("edges are valid")
}

/// Exact global optimum weight (brute force with the default cap).
pub fn exact_optimum(inst: &IlpInstance) -> Result<u64> {
    let all: Vec<usize> = (0..inst.var_count()).collect();
    let local = local_restrict(inst, &all);
    let sol = brute_force_opt(&local, &FixedState::all_free(inst.var_count()), crate::ilp::DEFAULT_BRUTE_FORCE_CAP)?;
    Ok(local.weight_of(&sol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Observations,
    Tails,
    Claims,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub lines: Vec<CheckLine>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }
}

/// Local-versus-global optimum chains on random small instances.
/// Packing: `W(P*, S) <= W(P^local_S, S) <= W(P*, N¹(S))`.
/// Covering: `W(Q^local_S, S) <= W(Q*, S) <= W(Q*, V)`.
pub fn verify_observations(instances: usize, subsets: usize, seed: u64) -> Result<SuiteReport> {
    let results: Vec<Result<(bool, usize, Vec<String>)>> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x0b5e_7a71);
            let n = rng.gen_range(4..=12);
            let m = rng.gen_range(1..=2 * n);
            let packing = i % 2 == 0;
            let sense = if packing { Sense::Packing } else { Sense::Covering };
            let inst = random_instance(sense, n, m, s);
            let all: Vec<usize> = (0..n).collect();
            let global = local_restrict(&inst, &all);
            let free = FixedState::all_free(n);
            let star = global.lift(&brute_force_opt(&global, &free, 28)?, n);
            let gaifman = inst.associated_hypergraph().gaifman_graph();
            let w = inst.weights();
            let mut failures = Vec::new();
            for _ in 0..subsets {
                let k = rng.gen_range(1..=n.min(6));
                let mut set = rand::seq::index::sample(&mut rng, n, k).into_vec();
                set.sort_unstable();
                let local = local_restrict(&inst, &set);
                let local_w = local.weight_of(&brute_force_opt(&local, &free, 28)?);
                let ok = if packing {
                    let dist = gaifman.bfs_distances(&set, 1);
                    let closed: Vec<usize> = (0..n).filter(|&v| dist[v] != usize::MAX).collect();
                    weight(&star, &set, w) <= local_w && local_w <= weight(&star, &closed, w)
                } else {
                    local_w <= weight(&star, &set, w) && weight(&star, &set, w) <= weight(&star, &all, w)
                };
                if !ok {
                    failures.push(format!("instance seed {s}, S = {set:?}"));
                }
            }
            Ok((packing, subsets, failures))
        })
        .collect();
    let mut lines = Vec::new();
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    for (packing, name) in [(true, "packing local/global chain"), (false, "covering local/global chain")] {
        let (count, checks, failures) = results.iter().filter(|r| r.0 == packing).fold((0, 0, Vec::new()), |mut acc, r| {
            acc.0 += 1;
            acc.1 += r.1;
            acc.2.extend(r.2.iter().cloned());
            acc
        });
        let detail = match failures.first() {
            None => format!("{count} instances, {checks} subsets, 0 violations"),
            Some(f) => format!("{} violations, first: {f}", failures.len()),
        };
        lines.push(CheckLine { name: name.into(), passed: failures.is_empty(), detail });
    }
    Ok(SuiteReport { suite: Suite::Observations, lines })
}

pub fn verify_tails(samples: usize, seed: u64) -> Result<SuiteReport> {
    let mut lines = Vec::new();
    let specs = [
        ("bernoulli sum p=0.5 n=1000 delta=0.2", TailSpec::BernoulliSum { n: 1000, p: 0.5, delta: 0.2 }),
        ("geometric sum p=0.5 n=100 delta=1.5", TailSpec::GeometricSum { n: 100, p: 0.5, delta: 1.5 }),
    ];
    for (k, (name, spec)) in specs.into_iter().enumerate() {
        let check = tail_check(spec, samples, seed.wrapping_add(k as u64))?;
        for l in &check.lines {
            lines.push(CheckLine {
                name: format!("{name} ({})", l.name),
                passed: l.passed,
                detail: format!("empirical {:.3e} vs bound {:.3e} + 3σ ({:.1e})", l.empirical, l.bound, l.sigma),
            });
        }
    }
    let edge = tail_check(TailSpec::GeometricSum { n: 100, p: 0.5, delta: 1.0 }, 1, seed);
    lines.push(CheckLine {
        name: "geometric sum rejects delta = 1/p - 1".into(),
        passed: edge.is_err(),
        detail: match edge {
            Err(e) => e.to_string(),
            Ok(_) => "accepted".into(),
        },
    });
    Ok(SuiteReport { suite: Suite::Tails, lines })
}

pub fn verify_claims(trials: usize, seed: u64) -> Result<SuiteReport> {
    let clique = claim_clique(60, 0.2, trials, seed)?;
    let mpx = claim_mpx(20, 0.2, trials, seed)?;
    let lines = vec![
        CheckLine {
            name: "clique: Pr[>= n-1 deleted] >= 1 - e^-eps - 3σ".into(),
            passed: clique.meets(3.0 * clique.sigma),
            detail: format!("estimate {:.4} (σ {:.4}) vs bound {:.4}", clique.estimate, clique.sigma, clique.bound),
        },
        CheckLine {
            name: "mpx: witnessing event >= analytic bound - 3σ".into(),
            passed: mpx.event.meets(3.0 * mpx.event.sigma),
            detail: format!(
                "estimate {:.5} (σ {:.5}) vs bound {:.5}; exact probability {:.5}",
                mpx.event.estimate, mpx.event.sigma, mpx.event.bound, mpx.exact_event_probability
            ),
        },
        CheckLine {
            name: "mpx: heavy cut >= event - 3σ".into(),
            passed: mpx.cut.meets(3.0 * mpx.cut.sigma),
            detail: format!("cut frequency {:.5} vs event frequency {:.5}", mpx.cut.estimate, mpx.cut.bound),
        },
        CheckLine {
            name: "mpx: event implies heavy cut".into(),
            passed: mpx.implication_violations == 0,
            detail: format!("{} violations", mpx.implication_violations),
        },
    ];
    Ok(SuiteReport { suite: Suite::Claims, lines })
}

/// Runs a suite with its default sizes.
pub fn verify(suite: Suite, seed: u64) -> Result<SuiteReport> {
    match suite {
        Suite::Observations => verify_observations(200, 50, seed),
        Suite::Tails => verify_tails(100_000, seed),
        Suite::Claims => verify_claims(5000, seed),
    }
}
