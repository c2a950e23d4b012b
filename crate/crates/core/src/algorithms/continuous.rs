//! Continuous greedy and its thresholded variants, in the server-assisted
//! form: every iteration the server holds `x` and the embedding set `𝓔`,
//! each partition's agent estimates its block of `∇F(x)` by sampling over
//! `𝓔`, picks its ascent coordinates, and uploads the embedding of any newly
//! admitted element.

use std::ops::Range;

use super::select::{argmax, progress_ratio, progress_ratio_kappa, same_top_values, top_k};
use super::trace::{IterationRecord, RunTrace, TraceConfig};
use super::{round_topk, Algorithm, GradientMode, RunConfig};
use crate::error::{Error, Result};
use crate::ground::{MembershipVector, PartitionMatroid};
use crate::multilinear::{exact_gradient, exact_value, mc_gradient, SampleConfig, EXACT_LIMIT};
use crate::objectives::SubmodularOracle;
use crate::rng::{derive_seed, Stream};

/// Continuous greedy: top-`κ_i` of the full partition gradient each step.
pub fn continuous_greedy<F: SubmodularOracle + ?Sized>(
    f: &F,
    m: &PartitionMatroid,
    cfg: &RunConfig,
) -> Result<RunTrace> {
    run(f, m, cfg, Algorithm::ContinuousGreedy)
}

/// Thresholded continuous greedy for unit budgets.
///
/// Delegates to [`atcg_general`] when some `κ_i > 1`.
pub fn atcg<F: SubmodularOracle + ?Sized>(
    f: &F,
    m: &PartitionMatroid,
    cfg: &RunConfig,
) -> Result<RunTrace> {
    if m.budgets().iter().any(|&k| k != 1) {
        return atcg_general(f, m, cfg);
    }
    run(f, m, cfg, Algorithm::Atcg)
}

/// Thresholded continuous greedy for arbitrary budgets, with the inner
/// expansion loop.
pub fn atcg_general<F: SubmodularOracle + ?Sized>(
    f: &F,
    m: &PartitionMatroid,
    cfg: &RunConfig,
) -> Result<RunTrace> {
    run(f, m, cfg, Algorithm::AtcgGeneral)
}

struct Step {
    eta: f64,
    eta_after: f64,
    added: Vec<usize>,
    selected: Vec<usize>,
}

/// One unit-budget ATCG step on a single partition.
fn unit_step(g: &[f64], range: Range<usize>, active: &mut Vec<usize>, tau: f64) -> Step {
    let eta = progress_ratio(g, active, range.clone());
    let best = argmax(g, range.clone()).expect("partitions are nonempty");
    // active oracle already attains the partition maximum: nothing to restore
    let exact = argmax(g, active.iter().copied()).is_some_and(|a| g[a] == g[best]);
    let mut added = Vec::new();
    if eta < tau && !exact && active.len() < range.len() {
        let j = argmax(g, range.clone().filter(|j| active.binary_search(j).is_err()))
            .expect("inactive elements remain");
        insert_sorted(active, j);
        added.push(j);
    }
    let eta_after = progress_ratio(g, active, range);
    let selected = argmax(g, active.iter().copied()).into_iter().collect();
    Step {
        eta,
        eta_after,
        added,
        selected,
    }
}

/// One general-budget ATCG step: expand until the active top-`κ` oracle
/// covers a `τ` fraction of the partition's, then move mass onto it.
fn kappa_step(g: &[f64], range: Range<usize>, kappa: usize, active: &mut Vec<usize>, tau: f64) -> Step {
    let all: Vec<usize> = range.clone().collect();
    let eta = progress_ratio_kappa(g, active, range.clone(), kappa);
    let mut eta_now = eta;
    let mut added = Vec::new();
    while active.len() < all.len() {
        let enough = active.len() >= kappa
            && (eta_now >= tau || same_top_values(g, active, &all, kappa));
        if enough {
            break;
        }
        let j = argmax(g, all.iter().copied().filter(|j| active.binary_search(j).is_err()))
            .expect("inactive elements remain");
        insert_sorted(active, j);
        added.push(j);
        eta_now = progress_ratio_kappa(g, active, range.clone(), kappa);
    }
    let selected = top_k(g, active, kappa);
    Step {
        eta,
        eta_after: eta_now,
        added,
        selected,
    }
}

fn insert_sorted(v: &mut Vec<usize>, j: usize) {
    if let Err(pos) = v.binary_search(&j) {
        v.insert(pos, j);
    }
}

fn current_x(counts: &[usize], horizon: usize) -> MembershipVector {
    let t = horizon as f64;
    MembershipVector::new(counts.iter().map(|&c| c as f64 / t).collect())
        .expect("counts never exceed the horizon")
}

fn run<F: SubmodularOracle + ?Sized>(
    f: &F,
    m: &PartitionMatroid,
    cfg: &RunConfig,
    algorithm: Algorithm,
) -> Result<RunTrace> {
    cfg.validate(algorithm.is_thresholded())?;
    let ground = m.ground();
    let n = ground.len();
    if f.ground_size() != n {
        return Err(Error::Dimension {
            expected: n,
            got: f.ground_size(),
        });
    }
    if cfg.gradient_mode == GradientMode::Exact && n > EXACT_LIMIT {
        return Err(Error::Capacity {
            what: format!("exact gradients over n = {n} elements"),
            limit: format!("n <= {EXACT_LIMIT}; use monte_carlo"),
        });
    }
    let horizon = cfg.horizon;
    let mut counts = vec![0usize; n];
    let mut active: Vec<Vec<usize>> = vec![Vec::new(); ground.num_partitions()];
    let mut embedded = vec![false; n];
    let mut embedding_set: Vec<usize> = Vec::new();
    let mut records = Vec::with_capacity(horizon);

    for t in 0..horizon {
        let x = current_x(&counts, horizon);
        let g = match cfg.gradient_mode {
            GradientMode::Exact => exact_gradient(&x, f)?,
            GradientMode::MonteCarlo => {
                let sample = SampleConfig::new(
                    cfg.sample.samples,
                    derive_seed(cfg.sample.seed, Stream::MonteCarlo, t as u64),
                );
                mc_gradient(&x, f, &sample, Some(&embedding_set))?
            }
        };
        let g = g.values;

        let mut eta = Vec::new();
        let mut eta_after = Vec::new();
        let mut activated = Vec::new();
        let mut selected = Vec::new();
        let mut degenerate = Vec::new();
        for (i, range) in ground.partitions().iter().enumerate() {
            if g[range.clone()].iter().all(|&v| v <= 0.0) {
                degenerate.push(i);
            }
            let kappa = m.budget(i);
            match algorithm {
                Algorithm::ContinuousGreedy => {
                    let all: Vec<usize> = range.clone().collect();
                    for j in top_k(&g, &all, kappa) {
                        if counts[j] == 0 {
                            insert_sorted(&mut active[i], j);
                            activated.push(j);
                        }
                        selected.push(j);
                    }
                }
                Algorithm::Atcg | Algorithm::AtcgGeneral => {
                    let step = if algorithm == Algorithm::Atcg {
                        unit_step(&g, range.clone(), &mut active[i], cfg.tau)
                    } else {
                        kappa_step(&g, range.clone(), kappa, &mut active[i], cfg.tau)
                    };
                    eta.push(step.eta);
                    eta_after.push(step.eta_after);
                    activated.extend(step.added);
                    selected.extend(step.selected);
                }
                Algorithm::SequentialGreedy => unreachable!("not a continuous method"),
            }
        }

        // barrier: all agents uploaded, server assembles x(t + 1/T) and 𝓔
        for &j in &selected {
            counts[j] += 1;
        }
        for &j in &activated {
            debug_assert!(!embedded[j]);
            embedded[j] = true;
            insert_sorted(&mut embedding_set, j);
        }
        let x_next = current_x(&counts, horizon);
        let f_value = if n <= EXACT_LIMIT {
            exact_value(&x_next, f)?
        } else {
            f.eval(round_topk(&x_next, m)?.members())
        };
        records.push(IterationRecord {
            t,
            f_value,
            cumulative_embeddings: embedding_set.len(),
            total_active: active.iter().map(Vec::len).sum(),
            eta,
            eta_after,
            activated,
            selected,
            degenerate,
            gradient: cfg.record_gradients.then_some(g),
            x: cfg.record_x.then(|| x_next.values().to_vec()),
        });
    }

    let x_final = current_x(&counts, horizon);
    let rounded_set = round_topk(&x_final, m)?;
    let rounded_value = f.eval(rounded_set.members());
    Ok(RunTrace {
        algorithm,
        config: TraceConfig {
            horizon,
            tau: cfg.tau,
            samples: match cfg.gradient_mode {
                GradientMode::Exact => 0,
                GradientMode::MonteCarlo => cfg.sample.samples,
            },
            seed: cfg.sample.seed,
            gradient_mode: cfg.gradient_mode,
            partition_sizes: ground.partition_sizes(),
            budgets: m.budgets().to_vec(),
        },
        records,
        x_final: x_final.values().to_vec(),
        rounded_set,
        rounded_value,
        active_sets: active,
    })
}
