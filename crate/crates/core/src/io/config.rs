use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::SyntheticSpec;
use crate::algorithms::{Algorithm, GradientMode, RunConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// Facility location with an RBF kernel over embeddings.
    FacilityRbf,
    /// Facility location over a user-item rating matrix.
    FacilityRating,
    Modular,
    /// Unit-weight coverage of points within `coverage_radius`.
    Coverage,
}

impl std::str::FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::param(format!("unknown objective {s:?}")))
    }
}

fn default_horizon() -> usize {
    100
}

fn default_tau() -> f64 {
    0.5
}

fn default_samples() -> usize {
    100
}

fn default_sigma() -> f64 {
    1.0
}

fn default_algorithm() -> Algorithm {
    Algorithm::Atcg
}

fn default_gradient_mode() -> GradientMode {
    GradientMode::MonteCarlo
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// A single flat JSON object describing one experiment.
///
/// The data source is either `data_path` (embeddings CSV, or ratings CSV for
/// `facility_rating`), the synthetic fields `clusters`, `points_per_cluster`,
/// `dim`, `cluster_spread`, `inter_cluster_distance` (and optionally
/// `data_seed`, which defaults to `seed`), or `weights` for `modular`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub objective: ObjectiveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clusters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_per_cluster: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_spread: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inter_cluster_distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_seed: Option<u64>,
    /// Defaults to one partition per synthetic cluster.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition_sizes: Option<Vec<usize>>,
    /// Defaults to `κ_i = 1` everywhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<Vec<usize>>,
    #[serde(default = "default_algorithm")]
    pub algorithm: Algorithm,
    #[serde(rename = "T", default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(rename = "K", default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_gradient_mode")]
    pub gradient_mode: GradientMode,
    /// RBF bandwidth for `facility_rbf`.
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage_radius: Option<f64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    /// Parses and validates.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::File {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn synthetic(&self) -> Option<SyntheticSpec> {
        Some(SyntheticSpec {
            clusters: self.clusters?,
            points_per_cluster: self.points_per_cluster?,
            dim: self.dim?,
            cluster_spread: self.cluster_spread?,
            inter_cluster_distance: self.inter_cluster_distance?,
            seed: self.data_seed.unwrap_or(self.seed),
        })
    }

    fn has_synthetic_fields(&self) -> bool {
        self.clusters.is_some()
            || self.points_per_cluster.is_some()
            || self.dim.is_some()
            || self.cluster_spread.is_some()
            || self.inter_cluster_distance.is_some()
            || self.data_seed.is_some()
    }

    pub fn run_config(&self) -> RunConfig {
        let mut rc = match self.gradient_mode {
            GradientMode::Exact => RunConfig::exact(self.horizon, self.tau),
            GradientMode::MonteCarlo => RunConfig::monte_carlo(self.horizon, self.tau, self.samples, self.seed),
        };
        rc.record_gradients = false;
        rc.sample.seed = self.seed;
        rc.sample.samples = self.samples;
        rc
    }

    /// Checks field domains and the data source. Does not read data files.
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::param("T must be at least 1"));
        }
        if self.algorithm.is_thresholded() && !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::param(format!("tau must lie in (0, 1], got {}", self.tau)));
        }
        if self.gradient_mode == GradientMode::MonteCarlo && self.samples == 0 {
            return Err(Error::param("K must be at least 1"));
        }
        let synthetic = self.synthetic();
        if self.has_synthetic_fields() && synthetic.is_none() {
            return Err(Error::param(
                "synthetic data needs clusters, points_per_cluster, dim, cluster_spread and inter_cluster_distance",
            ));
        }
        if let Some(s) = &synthetic {
            s.validate()?;
        }
        let sources = [self.data_path.is_some(), synthetic.is_some(), self.weights.is_some()];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(Error::param("give exactly one of data_path, the synthetic fields, or weights"));
        }
        match self.objective {
            ObjectiveKind::Modular if self.weights.is_none() => {
                return Err(Error::param("the modular objective needs weights"));
            }
            ObjectiveKind::FacilityRating if self.data_path.is_none() => {
                return Err(Error::param("facility_rating needs a ratings data_path"));
            }
            ObjectiveKind::FacilityRbf | ObjectiveKind::Coverage if self.weights.is_some() => {
                return Err(Error::param("weights only apply to the modular objective"));
            }
            _ => {}
        }
        if self.objective == ObjectiveKind::FacilityRbf && !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::param(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.objective == ObjectiveKind::Coverage {
            match self.coverage_radius {
                Some(r) if r.is_finite() && r >= 0.0 => {}
                _ => return Err(Error::param("coverage needs a nonnegative coverage_radius")),
            }
        }
        if synthetic.is_none() && self.partition_sizes.is_none() {
            return Err(Error::param("partition_sizes is required unless the data is synthetic"));
        }
        if let Some(p) = &self.data_path {
            if !p.is_file() {
                return Err(Error::param(format!("data_path {} does not exist", p.display())));
            }
        }
        Ok(())
    }
}
