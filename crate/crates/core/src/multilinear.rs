//! The multilinear extension `F(x) = E[f(R(x))]` and its gradient.
//!
//! `R(x)` contains each element `j` independently with probability `x_j`.
//! The gradient entry `j` is `E[f(R ∪ {j}) − f(R ∖ {j})]`. Both are available
//! exactly (enumeration over the fractional coordinates of `x`) for small
//! ground sets, and the gradient by Monte Carlo sampling at any size.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::MembershipVector;
use crate::objectives::SubmodularOracle;
use crate::rng::sample_rng;

/// Largest ground set accepted by the enumeration routines.
pub const EXACT_LIMIT: usize = 20;

/// Samples per deterministic reduction chunk.
const CHUNK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            samples: 100,
            seed: 0,
        }
    }
}

impl SampleConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientEstimate {
    pub values: Vec<f64>,
    /// Zero for exact computation.
    pub samples_used: usize,
    pub seed: Option<u64>,
}

impl GradientEstimate {
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn check_dims<F: SubmodularOracle + ?Sized>(x: &MembershipVector, f: &F) -> Result<()> {
    if x.len() != f.ground_size() {
        return Err(Error::Dimension {
            expected: f.ground_size(),
            got: x.len(),
        });
    }
    Ok(())
}

fn check_capacity(n: usize) -> Result<()> {
    if n > EXACT_LIMIT {
        return Err(Error::Capacity {
            what: format!("exact enumeration over n = {n} elements"),
            limit: format!("n <= {EXACT_LIMIT}; use the Monte Carlo estimator"),
        });
    }
    Ok(())
}

/// Calls `visit(probability, set)` for every outcome of `R(x)` with nonzero
/// probability. Coordinates at 0 or 1 are fixed, so only the fractional
/// ones are enumerated.
fn for_each_outcome(x: &[f64], mut visit: impl FnMut(f64, &[usize])) {
    let always: Vec<usize> = (0..x.len()).filter(|&j| x[j] >= 1.0).collect();
    let fractional: Vec<usize> = (0..x.len()).filter(|&j| x[j] > 0.0 && x[j] < 1.0).collect();
    let mut set = Vec::with_capacity(always.len() + fractional.len());
    for mask in 0u64..(1u64 << fractional.len()) {
        set.clear();
        set.extend_from_slice(&always);
        let mut p = 1.0;
        for (bit, &j) in fractional.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                p *= x[j];
                set.push(j);
            } else {
                p *= 1.0 - x[j];
            }
        }
        set.sort_unstable();
        visit(p, &set);
    }
}

/// `F(x)` by enumeration.
pub fn exact_value<F: SubmodularOracle + ?Sized>(x: &MembershipVector, f: &F) -> Result<f64> {
    check_dims(x, f)?;
    check_capacity(x.len())?;
    let mut total = 0.0;
    for_each_outcome(x.values(), |p, set| total += p * f.eval(set));
    Ok(total)
}

/// `∇F(x)` by enumeration.
pub fn exact_gradient<F: SubmodularOracle + ?Sized>(
    x: &MembershipVector,
    f: &F,
) -> Result<GradientEstimate> {
    check_dims(x, f)?;
    check_capacity(x.len())?;
    let n = x.len();
    let targets: Vec<usize> = (0..n).collect();
    let mut g = vec![0.0; n];
    let mut term = vec![0.0; n];
    for_each_outcome(x.values(), |p, set| {
        f.toggle_marginals(set, &targets, &mut term);
        for (gj, tj) in g.iter_mut().zip(&term) {
            *gj += p * tj;
        }
    });
    Ok(GradientEstimate {
        values: g,
        samples_used: 0,
        seed: None,
    })
}

/// Monte Carlo estimate of `∇F(x)` from `cfg.samples` draws of `R(x)`.
///
/// Sample `s` uses its own ChaCha stream derived from `(cfg.seed, s)`, and
/// draws one uniform per ground element whether or not that element is in
/// `support`. With `support` given, `R` only contains support elements; when
/// the support covers every coordinate with positive mass this produces the
/// same draws as unrestricted sampling. Output is bit-identical regardless of
/// the number of worker threads.
pub fn mc_gradient<F: SubmodularOracle + ?Sized>(
    x: &MembershipVector,
    f: &F,
    cfg: &SampleConfig,
    support: Option<&[usize]>,
) -> Result<GradientEstimate> {
    check_dims(x, f)?;
    if cfg.samples == 0 {
        return Err(Error::param("Monte Carlo sample count must be at least 1"));
    }
    let n = x.len();
    let mut eligible = vec![support.is_none(); n];
    if let Some(s) = support {
        for &j in s {
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
            eligible[j] = true;
        }
    }
    let xv = x.values();
    let targets: Vec<usize> = (0..n).collect();

    let chunk_sums: Vec<Vec<f64>> = (0..cfg.samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut sum = vec![0.0; n];
            let mut term = vec![0.0; n];
            let mut set = Vec::new();
            for s in c * CHUNK..((c + 1) * CHUNK).min(cfg.samples) {
                let mut rng = sample_rng(cfg.seed, s as u64);
                set.clear();
                for j in 0..n {
                    let u: f64 = rng.random();
                    if eligible[j] && u < xv[j] {
                        set.push(j);
                    }
                }
                f.toggle_marginals(&set, &targets, &mut term);
                for (a, t) in sum.iter_mut().zip(&term) {
                    *a += t;
                }
            }
            sum
        })
        .collect();

    let mut g = vec![0.0; n];
    for chunk in &chunk_sums {
        for (a, c) in g.iter_mut().zip(chunk) {
            *a += c;
        }
    }
    let k = cfg.samples as f64;
    for a in &mut g {
        *a /= k;
    }
    Ok(GradientEstimate {
        values: g,
        samples_used: cfg.samples,
        seed: Some(cfg.seed),
    })
}
