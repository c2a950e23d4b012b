//! Communication accounting for the server-assisted protocol.
//!
//! The primary metric is `C(T)`, the number of distinct element embeddings
//! uploaded to the server. Per-iteration sub-vector uploads and broadcasts
//! are logged as well but do not count towards `C(T)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::algorithms::{top_k, RunTrace};
use crate::error::{Error, Result};
use crate::ground::GroundSet;

/// Floor applied to vanishing partition variabilities.
pub const SIGMA_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    EmbeddingUpload,
    XUpload,
    Broadcast,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommEvent {
    pub t: usize,
    pub kind: EventKind,
    pub agent: usize,
    pub element: Option<usize>,
    pub payload_units: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommLedger {
    pub events: Vec<CommEvent>,
    /// `cum_embeddings[t]` is `C(t + 1)`, the uploads through iteration `t`.
    pub cum_embeddings: Vec<usize>,
    /// Uploads of the first iteration, kept apart from the later ones.
    pub initial_batch: usize,
    /// Per-partition union of the continuous greedy picks along the same
    /// gradient sequence, when the trace carries gradients.
    pub counterfactual_cg_union: Option<Vec<BTreeSet<usize>>>,
}

impl CommLedger {
    pub fn total_embeddings(&self) -> usize {
        self.cum_embeddings.last().copied().unwrap_or(0)
    }

    /// Uploads after the first iteration.
    pub fn later_embeddings(&self) -> usize {
        self.total_embeddings() - self.initial_batch
    }
}

fn trace_ground(trace: &RunTrace) -> Result<GroundSet> {
    GroundSet::new(&trace.config.partition_sizes)
        .map_err(|e| Error::format(None, format!("trace partition layout: {e}")))
}

/// Rebuilds the protocol's event log from a run trace.
pub fn ledger_from_trace(trace: &RunTrace) -> Result<CommLedger> {
    let ground = trace_ground(trace)?;
    let n = ground.len();
    let agents = ground.num_partitions();
    let mut seen = vec![false; n];
    let mut events = Vec::new();
    let mut cum_embeddings = Vec::with_capacity(trace.records.len());
    let mut total = 0usize;
    let mut last_updates = 0usize;
    let mut last_uploads = 0usize;
    for (expected_t, r) in trace.records.iter().enumerate() {
        if r.t != expected_t {
            return Err(Error::format(None, format!("record {expected_t} carries t = {}", r.t)));
        }
        for i in 0..agents {
            events.push(CommEvent {
                t: r.t,
                kind: EventKind::Broadcast,
                agent: i,
                element: None,
                payload_units: last_updates + last_uploads,
            });
        }
        let mut updates = vec![0usize; agents];
        for &j in &r.selected {
            if j >= n {
                return Err(Error::format(None, format!("selected element {j} out of range at t = {}", r.t)));
            }
            updates[ground.partition_of(j)] += 1;
        }
        for &j in &r.activated {
            if j >= n || seen[j] {
                return Err(Error::format(
                    None,
                    format!("element {j} uploaded twice or out of range at t = {}", r.t),
                ));
            }
            seen[j] = true;
            events.push(CommEvent {
                t: r.t,
                kind: EventKind::EmbeddingUpload,
                agent: ground.partition_of(j),
                element: Some(j),
                payload_units: 1,
            });
        }
        for (i, &u) in updates.iter().enumerate() {
            events.push(CommEvent {
                t: r.t,
                kind: EventKind::XUpload,
                agent: i,
                element: None,
                payload_units: u,
            });
        }
        total += r.activated.len();
        if total != r.cumulative_embeddings {
            return Err(Error::format(
                None,
                format!(
                    "cumulative count {} disagrees with {} uploads through t = {}",
                    r.cumulative_embeddings, total, r.t
                ),
            ));
        }
        cum_embeddings.push(total);
        last_updates = r.selected.len();
        last_uploads = r.activated.len();
    }
    let initial_batch = trace.records.first().map_or(0, |r| r.activated.len());
    let counterfactual_cg_union = trace
        .has_gradients()
        .then(|| counterfactual_cg_prefixes(trace, &ground).map(|p| p.last().cloned().unwrap_or_default()))
        .transpose()?;
    Ok(CommLedger {
        events,
        cum_embeddings,
        initial_batch,
        counterfactual_cg_union,
    })
}

/// For each prefix `t`, the per-partition union of `Top_κ` over `P_i` of the
/// recorded gradients `g(0), …, g(t)`.
fn counterfactual_cg_prefixes(trace: &RunTrace, ground: &GroundSet) -> Result<Vec<Vec<BTreeSet<usize>>>> {
    let mut union = vec![BTreeSet::new(); ground.num_partitions()];
    let mut prefixes = Vec::with_capacity(trace.records.len());
    for r in &trace.records {
        let g = r
            .gradient
            .as_ref()
            .ok_or_else(|| Error::Capability(format!("no gradient snapshot at t = {}", r.t)))?;
        if g.len() != ground.len() {
            return Err(Error::format(None, format!("gradient length {} at t = {}", g.len(), r.t)));
        }
        for (i, range) in ground.partitions().iter().enumerate() {
            let all: Vec<usize> = range.clone().collect();
            union[i].extend(top_k(g, &all, trace.config.budgets[i]));
        }
        prefixes.push(union.clone());
    }
    Ok(prefixes)
}

/// Checks, for every prefix `t`, that each active set lies inside the union
/// of the continuous greedy picks made on the same gradients, so that
/// `C_ATCG(t) ≤ C_CG(t)`.
pub fn dominance_check(trace: &RunTrace) -> Result<bool> {
    if !trace.has_gradients() {
        return Err(Error::Capability("trace does not carry gradient snapshots".into()));
    }
    let ground = trace_ground(trace)?;
    let prefixes = counterfactual_cg_prefixes(trace, &ground)?;
    let mut active = vec![BTreeSet::new(); ground.num_partitions()];
    for (r, cg) in trace.records.iter().zip(&prefixes) {
        for &j in &r.activated {
            active[ground.partition_of(j)].insert(j);
        }
        let c_atcg: usize = active.iter().map(BTreeSet::len).sum();
        let c_cg: usize = cg.iter().map(BTreeSet::len).sum();
        if c_atcg > c_cg || active.iter().zip(cg).any(|(a, u)| !a.is_subset(u)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Counterfactual `C_CG(t)` along the trace's gradients.
pub fn counterfactual_cg_counts(trace: &RunTrace) -> Result<Vec<usize>> {
    let ground = trace_ground(trace)?;
    Ok(counterfactual_cg_prefixes(trace, &ground)?
        .iter()
        .map(|u| u.iter().map(BTreeSet::len).sum())
        .collect())
}

/// Standard normal CDF.
pub fn gaussian_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Nominal progress ratios `η̄_i(t)` and per-partition spread `σ_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaStats {
    /// `eta_bar[i][t]`.
    pub eta_bar: Vec<Vec<f64>>,
    pub sigma: Vec<f64>,
    /// Partitions whose measured spread was zero and got [`SIGMA_FLOOR`].
    pub floored: Vec<usize>,
}

impl EtaStats {
    pub fn new(eta_bar: Vec<Vec<f64>>, sigma: Vec<f64>) -> Result<Self> {
        if eta_bar.len() != sigma.len() || eta_bar.is_empty() {
            return Err(Error::param("eta statistics need one sigma per partition"));
        }
        let horizon = eta_bar[0].len();
        if eta_bar.iter().any(|row| row.len() != horizon) {
            return Err(Error::param("eta statistics rows differ in length"));
        }
        if eta_bar.iter().flatten().any(|e| !e.is_finite()) {
            return Err(Error::param("eta statistics must be finite"));
        }
        if let Some(s) = sigma.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::param(format!("sigma must be positive, got {s}")));
        }
        Ok(Self {
            eta_bar,
            sigma,
            floored: Vec::new(),
        })
    }

    pub fn num_partitions(&self) -> usize {
        self.sigma.len()
    }

    pub fn horizon(&self) -> usize {
        self.eta_bar[0].len()
    }
}

/// `N + Σ_{t=1}^{T−1} Σ_i Φ((τ − η̄_i(t)) / σ_i)`.
pub fn expected_comm_bound(stats: &EtaStats, tau: f64, horizon: usize, n_agents: usize) -> Result<f64> {
    if horizon <= 1 {
        return Err(Error::param("the expected-communication bound needs T > 1"));
    }
    if n_agents != stats.num_partitions() {
        return Err(Error::Dimension {
            expected: stats.num_partitions(),
            got: n_agents,
        });
    }
    if horizon > stats.horizon() {
        return Err(Error::param(format!(
            "statistics cover {} iterations, T = {horizon} requested",
            stats.horizon()
        )));
    }
    let mut expansions = 0.0;
    for t in 1..horizon {
        for (row, &sigma) in stats.eta_bar.iter().zip(&stats.sigma) {
            expansions += gaussian_cdf((tau - row[t]) / sigma);
        }
    }
    Ok(n_agents as f64 + expansions)
}

/// The full bound `min{E[C_CG(T)], …}` when an estimate of the first term
/// is available.
pub fn expected_comm_bound_with_cg(
    stats: &EtaStats,
    tau: f64,
    horizon: usize,
    n_agents: usize,
    expected_cg: Option<f64>,
) -> Result<f64> {
    let gaussian = expected_comm_bound(stats, tau, horizon, n_agents)?;
    Ok(expected_cg.map_or(gaussian, |cg| cg.min(gaussian)))
}

/// Empirical `η̄_i(t)` (mean over runs) and pooled per-partition standard
/// deviation over `t ≥ 1` (all `t` for single-iteration runs).
pub fn eta_stats_from_traces(traces: &[RunTrace]) -> Result<EtaStats> {
    if traces.len() < 2 {
        return Err(Error::param("eta statistics need at least two traces"));
    }
    let first = &traces[0];
    if !first.algorithm.is_thresholded() {
        return Err(Error::param("eta statistics need thresholded runs"));
    }
    for tr in &traces[1..] {
        if tr.algorithm != first.algorithm || !tr.config.same_experiment(&first.config) {
            return Err(Error::param("traces differ in more than their seed"));
        }
    }
    let horizon = first.records.len();
    let partitions = first.config.partition_sizes.len();
    let runs = traces.len() as f64;
    let mut eta_bar = vec![vec![0.0; horizon]; partitions];
    for tr in traces {
        if tr.records.len() != horizon || tr.records.iter().any(|r| r.eta.len() != partitions) {
            return Err(Error::format(None, "trace is missing progress ratios"));
        }
        for (t, r) in tr.records.iter().enumerate() {
            for i in 0..partitions {
                eta_bar[i][t] += r.eta[i];
            }
        }
    }
    for v in eta_bar.iter_mut().flatten() {
        *v /= runs;
    }
    let pooled_from = if horizon > 1 { 1 } else { 0 };
    let mut sigma = vec![0.0; partitions];
    let mut floored = Vec::new();
    for i in 0..partitions {
        let mut ss = 0.0;
        for tr in traces {
            for t in pooled_from..horizon {
                ss += (tr.records[t].eta[i] - eta_bar[i][t]).powi(2);
            }
        }
        let dof = (horizon - pooled_from) as f64 * (runs - 1.0);
        let s = (ss / dof).sqrt();
        if s >= SIGMA_FLOOR {
            sigma[i] = s;
        } else {
            sigma[i] = SIGMA_FLOOR;
            floored.push(i);
        }
    }
    let mut stats = EtaStats::new(eta_bar, sigma)?;
    stats.floored = floored;
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{atcg, continuous_greedy, RunConfig};
    use crate::ground::{GroundSet, PartitionMatroid};
    use crate::objectives::{Embeddings, FacilityLocation, ModularObjective};

    fn modular() -> (ModularObjective, PartitionMatroid) {
        (
            ModularObjective::new(vec![3.0, 1.0, 2.0, 1.0]).unwrap(),
            PartitionMatroid::unit(GroundSet::new(&[2, 2]).unwrap()),
        )
    }

    fn fixture_b() -> (FacilityLocation, PartitionMatroid) {
        let emb = Embeddings::from_rows(&[vec![0.0], vec![0.1], vec![1.0], vec![1.1]]).unwrap();
        (
            FacilityLocation::from_embeddings(&emb, 0.5).unwrap(),
            PartitionMatroid::unit(GroundSet::new(&[2, 2]).unwrap()),
        )
    }

    #[test]
    fn ledger_examples() {
        let (f, m) = modular();
        let a = atcg(&f, &m, &RunConfig::exact(10, 0.3)).unwrap();
        let ledger = ledger_from_trace(&a).unwrap();
        assert_eq!(ledger.total_embeddings(), 2);
        assert_eq!(ledger.initial_batch, 2);
        assert_eq!(ledger.later_embeddings(), 0);
        assert_eq!(ledger.total_embeddings(), a.total_active());

        let c = continuous_greedy(&f, &m, &RunConfig::exact(10, 0.3)).unwrap();
        assert_eq!(ledger_from_trace(&c).unwrap().total_embeddings(), 2);

        let mut empty = a.clone();
        empty.records.clear();
        let ledger = ledger_from_trace(&empty).unwrap();
        assert!(ledger.events.is_empty());
        assert_eq!(ledger.total_embeddings(), 0);
    }

    #[test]
    fn ledger_event_counts() {
        let (f, m) = fixture_b();
        let trace = atcg(&f, &m, &RunConfig::exact(5, 0.9)).unwrap();
        let ledger = ledger_from_trace(&trace).unwrap();
        let count = |k| ledger.events.iter().filter(|e| e.kind == k).count();
        assert_eq!(count(EventKind::Broadcast), 10);
        assert_eq!(count(EventKind::XUpload), 10);
        assert_eq!(count(EventKind::EmbeddingUpload), trace.final_embeddings());
        assert!(ledger.cum_embeddings.windows(2).all(|w| w[0] <= w[1]));
        let union = ledger.counterfactual_cg_union.unwrap();
        assert!(union.iter().all(|u| !u.is_empty()));
    }

    #[test]
    fn malformed_traces_rejected() {
        let (f, m) = fixture_b();
        let trace = atcg(&f, &m, &RunConfig::exact(5, 0.9)).unwrap();
        let mut dup = trace.clone();
        let j = dup.records[0].activated[0];
        dup.records[1].activated.push(j);
        assert!(matches!(ledger_from_trace(&dup), Err(Error::Format { .. })));
        let mut skewed = trace.clone();
        skewed.records[2].t = 7;
        assert!(ledger_from_trace(&skewed).is_err());
        let mut miscount = trace;
        miscount.records[0].cumulative_embeddings += 1;
        assert!(ledger_from_trace(&miscount).is_err());
    }

    #[test]
    fn dominance_on_fixtures() {
        let (f, m) = fixture_b();
        for tau in [0.2, 0.5, 0.9, 1.0] {
            let trace = atcg(&f, &m, &RunConfig::exact(20, tau)).unwrap();
            assert!(dominance_check(&trace).unwrap());
        }
        for seed in 0..20 {
            let trace = atcg(&f, &m, &RunConfig::monte_carlo(20, 0.7, 10, seed)).unwrap();
            assert!(dominance_check(&trace).unwrap());
        }
    }

    #[test]
    fn tau_one_active_sets_equal_cg_union() {
        let (f, m) = fixture_b();
        for seed in 0..5 {
            let trace = atcg(&f, &m, &RunConfig::monte_carlo(25, 1.0, 8, seed)).unwrap();
            let union = ledger_from_trace(&trace).unwrap().counterfactual_cg_union.unwrap();
            for (a, u) in trace.active_sets.iter().zip(&union) {
                assert_eq!(&a.iter().copied().collect::<BTreeSet<_>>(), u);
            }
        }
    }

    #[test]
    fn dominance_needs_gradients() {
        let (f, m) = fixture_b();
        let mut cfg = RunConfig::exact(5, 0.5);
        cfg.record_gradients = false;
        let trace = atcg(&f, &m, &cfg).unwrap();
        assert!(matches!(dominance_check(&trace), Err(Error::Capability(_))));
        assert!(ledger_from_trace(&trace).unwrap().counterfactual_cg_union.is_none());
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(gaussian_cdf(0.0), 0.5);
        assert!((gaussian_cdf(1.959_964) - 0.975).abs() < 1e-6);
        assert!(gaussian_cdf(-8.0) < 1e-14);
        assert!(gaussian_cdf(-8.0) > 0.0);
    }

    #[test]
    fn bound_examples() {
        let stats = EtaStats::new(vec![vec![1.0; 10]; 2], vec![0.1; 2]).unwrap();
        let b = expected_comm_bound(&stats, 0.3, 10, 2).unwrap();
        assert!((b - (2.0 + 18.0 * gaussian_cdf(-7.0))).abs() < 1e-9);
        assert!((b - 2.0).abs() < 1e-9);

        let stats = EtaStats::new(vec![vec![0.4; 10]; 3], vec![0.2; 3]).unwrap();
        let b = expected_comm_bound(&stats, 0.4, 10, 3).unwrap();
        assert!((b - (3.0 + 9.0 * 3.0 * 0.5)).abs() < 1e-9);

        let stats = EtaStats::new(vec![vec![0.9; 10]; 2], vec![1e-9; 2]).unwrap();
        assert!((expected_comm_bound(&stats, 0.3, 10, 2).unwrap() - 2.0).abs() < 1e-9);

        assert!(expected_comm_bound(&stats, 0.3, 1, 2).is_err());
        assert!(expected_comm_bound(&stats, 0.3, 11, 2).is_err());
        assert!(expected_comm_bound(&stats, 0.3, 5, 3).is_err());
        assert_eq!(expected_comm_bound_with_cg(&stats, 0.3, 10, 2, Some(1.5)).unwrap(), 1.5);
        assert!(EtaStats::new(vec![vec![1.0]], vec![0.0]).is_err());
    }

    #[test]
    fn stats_from_identical_traces_are_floored() {
        let (f, m) = fixture_b();
        let traces: Vec<_> = (0..3).map(|_| atcg(&f, &m, &RunConfig::exact(6, 0.5)).unwrap()).collect();
        let stats = eta_stats_from_traces(&traces).unwrap();
        assert_eq!(stats.sigma, vec![SIGMA_FLOOR; 2]);
        assert_eq!(stats.floored, vec![0, 1]);
    }

    #[test]
    fn stats_from_mc_traces() {
        let (f, m) = fixture_b();
        let traces: Vec<_> = (0..20)
            .map(|s| atcg(&f, &m, &RunConfig::monte_carlo(15, 0.8, 10, s)).unwrap())
            .collect();
        let stats = eta_stats_from_traces(&traces).unwrap();
        assert_eq!(stats.horizon(), 15);
        assert!(stats.sigma.iter().all(|s| s.is_finite() && *s > 0.0));
        assert!(stats.eta_bar.iter().flatten().all(|e| (0.0..=1.0 + 1e-9).contains(e)));
    }

    #[test]
    fn stats_input_validation() {
        let (f, m) = fixture_b();
        let a = atcg(&f, &m, &RunConfig::exact(6, 0.5)).unwrap();
        let b = atcg(&f, &m, &RunConfig::exact(6, 0.6)).unwrap();
        assert!(eta_stats_from_traces(std::slice::from_ref(&a)).is_err());
        assert!(eta_stats_from_traces(&[a, b]).is_err());
    }
}
