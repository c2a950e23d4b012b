use std::cmp::Ordering;
use std::ops::Range;

/// Regularizer added to every progress-ratio denominator.
pub const RATIO_EPS: f64 = 1e-12;

/// Lowest-index maximizer of `g` over `candidates`.
pub fn argmax(g: &[f64], candidates: impl IntoIterator<Item = usize>) -> Option<usize> {
    let mut best: Option<usize> = None;
    for j in candidates {
        match best {
            Some(b) if rank(g, j, b) != Ordering::Less => {}
            _ => best = Some(j),
        }
    }
    best
}

// Less means `a` ranks ahead of `b`: larger value, then lower index.
fn rank(g: &[f64], a: usize, b: usize) -> Ordering {
    g[b].total_cmp(&g[a]).then(a.cmp(&b))
}

/// The `k` best candidates by value (ties to the lowest index), best first.
pub fn top_k(g: &[f64], candidates: &[usize], k: usize) -> Vec<usize> {
    let mut ranked = candidates.to_vec();
    ranked.sort_by(|&a, &b| rank(g, a, b));
    ranked.truncate(k);
    ranked
}

pub(crate) fn top_k_sum(g: &[f64], candidates: &[usize], k: usize) -> f64 {
    top_k(g, candidates, k).iter().map(|&j| g[j]).sum()
}

/// Value sequences of the two top-`k` lists coincide.
pub(crate) fn same_top_values(g: &[f64], active: &[usize], partition: &[usize], k: usize) -> bool {
    let a = top_k(g, active, k);
    let p = top_k(g, partition, k);
    a.len() == p.len() && a.iter().zip(&p).all(|(&x, &y)| g[x] == g[y])
}

/// `max_{A} g / (max_{P} g + 1e-12)`, and 0 for an empty active set.
pub fn progress_ratio(g: &[f64], active: &[usize], partition: Range<usize>) -> f64 {
    let Some(a) = argmax(g, active.iter().copied()) else {
        return 0.0;
    };
    let p = argmax(g, partition).expect("partitions are nonempty");
    g[a] / (g[p] + RATIO_EPS)
}

/// Top-`κ` sum within the active set over the top-`κ` sum within the
/// partition (regularized like [`progress_ratio`]).
pub fn progress_ratio_kappa(g: &[f64], active: &[usize], partition: Range<usize>, kappa: usize) -> f64 {
    let all: Vec<usize> = partition.collect();
    top_k_sum(g, active, kappa) / (top_k_sum(g, &all, kappa) + RATIO_EPS)
}
