use serde::{Deserialize, Serialize};

use super::{Algorithm, GradientMode};
use crate::ground::FeasibleSet;

/// Run parameters echoed into every trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    pub horizon: usize,
    pub tau: f64,
    pub samples: usize,
    pub seed: u64,
    pub gradient_mode: GradientMode,
    pub partition_sizes: Vec<usize>,
    pub budgets: Vec<usize>,
}

impl TraceConfig {
    /// Equal in everything but the seed.
    pub fn same_experiment(&self, other: &Self) -> bool {
        self.horizon == other.horizon
            && self.tau == other.tau
            && self.samples == other.samples
            && self.gradient_mode == other.gradient_mode
            && self.partition_sizes == other.partition_sizes
            && self.budgets == other.budgets
    }
}

/// State after iteration `t`, i.e. after `x(t)` has moved to `x(t + 1/T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: usize,
    /// `F(x)` exactly for small ground sets, else `f` of the rounded `x`.
    pub f_value: f64,
    pub cumulative_embeddings: usize,
    pub total_active: usize,
    /// Per-partition progress ratio before expansion; empty for CG.
    pub eta: Vec<f64>,
    /// Per-partition progress ratio after expansion; empty for CG.
    pub eta_after: Vec<f64>,
    /// Elements whose embedding was uploaded this iteration, in order.
    pub activated: Vec<usize>,
    /// Coordinates that received `1/T` mass.
    pub selected: Vec<usize>,
    /// Partitions whose gradient entries were all `<= 0`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degenerate: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub algorithm: Algorithm,
    pub config: TraceConfig,
    pub records: Vec<IterationRecord>,
    pub x_final: Vec<f64>,
    pub rounded_set: FeasibleSet,
    pub rounded_value: f64,
    /// Final per-partition active sets (activated coordinates for CG).
    pub active_sets: Vec<Vec<usize>>,
}

impl RunTrace {
    /// `C(T)`: distinct embeddings uploaded over the run.
    pub fn final_embeddings(&self) -> usize {
        self.records.last().map_or(0, |r| r.cumulative_embeddings)
    }

    pub fn final_value(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.f_value)
    }

    pub fn total_active(&self) -> usize {
        self.active_sets.iter().map(Vec::len).sum()
    }

    pub fn has_gradients(&self) -> bool {
        !self.records.is_empty() && self.records.iter().all(|r| r.gradient.is_some())
    }

    /// Records, final point and rounding agree exactly.
    pub fn same_trajectory(&self, other: &Self) -> bool {
        self.records == other.records
            && self.x_final == other.x_final
            && self.rounded_set == other.rounded_set
            && self.rounded_value == other.rounded_value
            && self.active_sets == other.active_sets
    }
}
