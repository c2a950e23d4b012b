use super::trace::{IterationRecord, RunTrace, TraceConfig};
use super::{Algorithm, GradientMode};
use crate::error::Result;
use crate::ground::{FeasibleSet, PartitionMatroid};
use crate::objectives::SubmodularOracle;

/// Picks, one element at a time, the feasible element of largest marginal
/// gain (lowest index on ties) until no feasible element gains anything.
pub fn sequential_greedy<F: SubmodularOracle + ?Sized>(f: &F, m: &PartitionMatroid) -> FeasibleSet {
    greedy_order(f, m).into_iter().map(|(j, _)| j).collect()
}

fn greedy_order<F: SubmodularOracle + ?Sized>(f: &F, m: &PartitionMatroid) -> Vec<(usize, f64)> {
    let ground = m.ground();
    let mut used = vec![0usize; ground.num_partitions()];
    let mut chosen: Vec<usize> = Vec::new();
    let mut order = Vec::new();
    loop {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..ground.len() {
            let i = ground.partition_of(j);
            if used[i] >= m.budget(i) || chosen.contains(&j) {
                continue;
            }
            let gain = f.gain(&chosen, j);
            if gain > 0.0 && best.is_none_or(|(_, b)| gain > b) {
                best = Some((j, gain));
            }
        }
        let Some((j, gain)) = best else { break };
        used[ground.partition_of(j)] += 1;
        chosen.push(j);
        order.push((j, gain));
    }
    order
}

/// Sequential greedy reported as a trace: one record per selection, each
/// chosen element counted as one uploaded embedding.
pub fn sequential_greedy_trace<F: SubmodularOracle + ?Sized>(
    f: &F,
    m: &PartitionMatroid,
) -> Result<RunTrace> {
    let ground = m.ground();
    let order = greedy_order(f, m);
    let mut chosen = Vec::new();
    let mut active = vec![Vec::new(); ground.num_partitions()];
    let mut records = Vec::new();
    for (t, &(j, _)) in order.iter().enumerate() {
        chosen.push(j);
        active[ground.partition_of(j)].push(j);
        records.push(IterationRecord {
            t,
            f_value: f.eval(&chosen),
            cumulative_embeddings: t + 1,
            total_active: t + 1,
            eta: Vec::new(),
            eta_after: Vec::new(),
            activated: vec![j],
            selected: vec![j],
            degenerate: Vec::new(),
            gradient: None,
            x: None,
        });
    }
    for a in &mut active {
        a.sort_unstable();
    }
    let set = FeasibleSet::new(chosen);
    let mut x = vec![0.0; ground.len()];
    for &j in set.members() {
        x[j] = 1.0;
    }
    Ok(RunTrace {
        algorithm: Algorithm::SequentialGreedy,
        config: TraceConfig {
            horizon: records.len(),
            tau: 0.0,
            samples: 0,
            seed: 0,
            gradient_mode: GradientMode::Exact,
            partition_sizes: ground.partition_sizes(),
            budgets: m.budgets().to_vec(),
        },
        records,
        x_final: x,
        rounded_value: f.eval(set.members()),
        rounded_set: set,
        active_sets: active,
    })
}
