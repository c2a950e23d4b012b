//! Greedy algorithms over a partition matroid.
//!
//! * [`sequential_greedy`]: discrete greedy on marginal gains.
//! * [`continuous_greedy`]: discretized continuous greedy; each step moves
//!   `1/T` mass onto the top-`κ_i` gradient entries of every partition.
//! * [`atcg`] and [`atcg_general`]: the same ascent restricted to per-partition
//!   active sets that grow only when the progress ratio falls below `τ`.
//!
//! Ties are broken towards the lowest element index everywhere.

mod continuous;
mod exhaustive;
mod rounding;
mod select;
mod sequential;
mod trace;

pub use continuous::{atcg, atcg_general, continuous_greedy};
pub use exhaustive::{brute_force_optimum, BruteForceOptimum, BRUTE_FORCE_LIMIT};
pub use rounding::round_topk;
pub use select::{argmax, progress_ratio, progress_ratio_kappa, top_k, RATIO_EPS};
pub use sequential::{sequential_greedy, sequential_greedy_trace};
pub use trace::{IterationRecord, RunTrace, TraceConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multilinear::SampleConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[serde(rename = "sg")]
    SequentialGreedy,
    #[serde(rename = "cg")]
    ContinuousGreedy,
    Atcg,
    AtcgGeneral,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::SequentialGreedy => "sg",
            Algorithm::ContinuousGreedy => "cg",
            Algorithm::Atcg => "atcg",
            Algorithm::AtcgGeneral => "atcg_general",
        }
    }

    pub fn is_thresholded(self) -> bool {
        matches!(self, Algorithm::Atcg | Algorithm::AtcgGeneral)
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sg" => Ok(Algorithm::SequentialGreedy),
            "cg" => Ok(Algorithm::ContinuousGreedy),
            "atcg" => Ok(Algorithm::Atcg),
            "atcg_general" => Ok(Algorithm::AtcgGeneral),
            other => Err(Error::param(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMode {
    Exact,
    MonteCarlo,
}

impl std::str::FromStr for GradientMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(GradientMode::Exact),
            "monte_carlo" => Ok(GradientMode::MonteCarlo),
            other => Err(Error::param(format!("unknown gradient mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Iteration horizon `T`; every step moves `1/T` mass per budget unit.
    pub horizon: usize,
    /// Expansion threshold `τ ∈ (0, 1]`; ignored by continuous greedy.
    pub tau: f64,
    pub sample: SampleConfig,
    pub gradient_mode: GradientMode,
    /// Keep the per-iteration gradient vectors (needed for dominance audits).
    pub record_gradients: bool,
    /// Keep a copy of `x` after every iteration.
    pub record_x: bool,
}

impl RunConfig {
    pub fn exact(horizon: usize, tau: f64) -> Self {
        Self {
            horizon,
            tau,
            sample: SampleConfig::default(),
            gradient_mode: GradientMode::Exact,
            record_gradients: true,
            record_x: false,
        }
    }

    pub fn monte_carlo(horizon: usize, tau: f64, samples: usize, seed: u64) -> Self {
        Self {
            horizon,
            tau,
            sample: SampleConfig::new(samples, seed),
            gradient_mode: GradientMode::MonteCarlo,
            record_gradients: true,
            record_x: false,
        }
    }

    pub(crate) fn validate(&self, uses_tau: bool) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::param("horizon T must be at least 1"));
        }
        if uses_tau && !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::param(format!("threshold tau must lie in (0, 1], got {}", self.tau)));
        }
        if self.gradient_mode == GradientMode::MonteCarlo && self.sample.samples == 0 {
            return Err(Error::param("Monte Carlo sample count K must be at least 1"));
        }
        Ok(())
    }
}
