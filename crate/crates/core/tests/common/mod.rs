#![allow(dead_code)]

use atcg_core::algorithms::{argmax, top_k};
use atcg_core::io::{gen_synthetic, SyntheticSpec};
use atcg_core::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture_b() -> (FacilityLocation, PartitionMatroid) {
    let emb = Embeddings::from_rows(&[vec![0.0], vec![0.1], vec![1.0], vec![1.1]]).unwrap();
    let f = FacilityLocation::from_embeddings(&emb, 0.5).unwrap();
    (f, PartitionMatroid::unit(GroundSet::new(&[2, 2]).unwrap()))
}

/// Random block sizes summing to `n`, at most `max_parts` blocks.
pub fn random_sizes(rng: &mut ChaCha8Rng, n: usize, max_parts: usize) -> Vec<usize> {
    let parts = rng.random_range(1..=max_parts.min(n));
    let mut sizes = vec![1; parts];
    for _ in parts..n {
        sizes[rng.random_range(0..parts)] += 1;
    }
    sizes
}

pub fn random_embeddings(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Embeddings {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    Embeddings::from_rows(&rows).unwrap()
}

pub fn random_facility(rng: &mut ChaCha8Rng, n: usize) -> FacilityLocation {
    let emb = random_embeddings(rng, n, 2);
    let sigma = rng.random_range(0.3..1.2);
    FacilityLocation::from_embeddings(&emb, sigma).unwrap()
}

pub fn random_coverage(rng: &mut ChaCha8Rng, n: usize) -> WeightedCoverage {
    let items = rng.random_range(n..3 * n);
    let weights = (0..items).map(|_| rng.random_range(0.1..2.0)).collect();
    let covers = (0..n)
        .map(|_| (0..items).filter(|_| rng.random_bool(0.3)).collect())
        .collect();
    WeightedCoverage::new(weights, covers).unwrap()
}

pub fn random_rating(rng: &mut ChaCha8Rng, n: usize) -> RatingObjective {
    let users = rng.random_range(3..12);
    let ratings: Vec<f64> = (0..users * n)
        .map(|_| if rng.random_bool(0.4) { rng.random_range(1..=5) as f64 } else { 0.0 })
        .collect();
    RatingObjective::new(users, n, &ratings).unwrap()
}

pub fn random_modular(rng: &mut ChaCha8Rng, n: usize) -> ModularObjective {
    ModularObjective::new((0..n).map(|_| rng.random_range(0.1..5.0)).collect()).unwrap()
}

/// A mix of objective families for instance `k`.
pub fn random_instance(seed: u64, k: usize, n_range: std::ops::RangeInclusive<usize>) -> (Box<dyn SubmodularOracle>, PartitionMatroid) {
    let mut r = rng(seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let n = r.random_range(n_range);
    let f: Box<dyn SubmodularOracle> = match k % 3 {
        0 => Box::new(random_facility(&mut r, n)),
        1 => Box::new(random_coverage(&mut r, n)),
        _ => Box::new(random_rating(&mut r, n)),
    };
    let sizes = random_sizes(&mut r, n, 4);
    (f, PartitionMatroid::unit(GroundSet::new(&sizes).unwrap()))
}

/// The 6-cluster synthetic instance used by the trade-off experiments.
pub const SYNTH_SPEC: SyntheticSpec = SyntheticSpec {
    clusters: 6,
    points_per_cluster: 30,
    dim: 2,
    cluster_spread: 1.0,
    inter_cluster_distance: 1.54,
    seed: 3,
};
pub const SYNTH_SIGMA: f64 = 1.65;

pub fn synthetic(points_per_cluster: usize) -> (FacilityLocation, PartitionMatroid) {
    let spec = SyntheticSpec {
        points_per_cluster,
        ..SYNTH_SPEC
    };
    let emb = gen_synthetic(&spec).unwrap();
    let f = FacilityLocation::from_embeddings(&emb, SYNTH_SIGMA).unwrap();
    (f, PartitionMatroid::unit(GroundSet::new(&spec.partition_sizes()).unwrap()))
}

/// Brute-force curvature over every `S ⊆ V ∖ {p}`, restricted to `elements`.
pub fn brute_curvature(f: &dyn SubmodularOracle, elements: impl Iterator<Item = usize>) -> f64 {
    let n = f.ground_size();
    let mut worst = f64::INFINITY;
    for p in elements {
        let single = f.eval(&[p]);
        if single <= 0.0 {
            continue;
        }
        let others: Vec<usize> = (0..n).filter(|&q| q != p).collect();
        for mask in 0u32..(1 << others.len()) {
            let s: Vec<usize> = others
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &q)| q)
                .collect();
            let mut with = s.clone();
            with.push(p);
            with.sort_unstable();
            worst = worst.min((f.eval(&with) - f.eval(&s)) / single);
        }
    }
    1.0 - worst
}

/// Post-expansion coverage: for every thresholded record and partition,
/// `η_after ≥ τ`, or `A_i = P_i`, or the active top values already equal
/// the partition's. For unit budgets an added element must also attain the
/// partition maximum.
pub fn coverage_restored(trace: &RunTrace) -> Result<(), String> {
    let ground = GroundSet::new(&trace.config.partition_sizes).unwrap();
    let tau = trace.config.tau;
    let mut active = vec![Vec::<usize>::new(); ground.num_partitions()];
    for r in &trace.records {
        let g = r.gradient.as_ref().ok_or("trace lacks gradients")?;
        for &j in &r.activated {
            active[ground.partition_of(j)].push(j);
        }
        for (i, range) in ground.partitions().iter().enumerate() {
            let kappa = trace.config.budgets[i];
            let all: Vec<usize> = range.clone().collect();
            let top_a: Vec<f64> = top_k(g, &active[i], kappa).iter().map(|&j| g[j]).collect();
            let top_p: Vec<f64> = top_k(g, &all, kappa).iter().map(|&j| g[j]).collect();
            let covered = r.eta_after[i] >= tau || active[i].len() == range.len() || top_a == top_p;
            if !covered {
                return Err(format!("t = {}, partition {i}: eta_after {}", r.t, r.eta_after[i]));
            }
            if kappa == 1 {
                let best = g[argmax(g, range.clone()).unwrap()];
                for &j in r.activated.iter().filter(|&&j| range.contains(&j)) {
                    if g[j] != best {
                        return Err(format!("t = {}: added {j} is not the partition argmax", r.t));
                    }
                }
            }
        }
    }
    Ok(())
}
