use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::Embeddings;
use crate::rng::{derive_seed, Stream};

/// Gaussian blobs around well-separated centres. Points are emitted cluster
/// by cluster, so cluster `k` occupies rows `k·m..(k+1)·m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub clusters: usize,
    pub points_per_cluster: usize,
    pub dim: usize,
    pub cluster_spread: f64,
    pub inter_cluster_distance: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.clusters == 0 || self.points_per_cluster == 0 || self.dim == 0 {
            return Err(Error::param("synthetic clusters, points_per_cluster and dim must be positive"));
        }
        if !(self.cluster_spread.is_finite() && self.cluster_spread >= 0.0) {
            return Err(Error::param("cluster_spread must be finite and nonnegative"));
        }
        if !(self.inter_cluster_distance.is_finite() && self.inter_cluster_distance > 0.0) {
            return Err(Error::param("inter_cluster_distance must be positive"));
        }
        Ok(())
    }

    /// Partition sizes matching the cluster layout.
    pub fn partition_sizes(&self) -> Vec<usize> {
        vec![self.points_per_cluster; self.clusters]
    }

    pub fn centers(&self) -> Vec<Vec<f64>> {
        let d = self.inter_cluster_distance;
        if self.clusters <= self.dim {
            // scaled simplex: distinct basis vectors are exactly d apart
            let s = d / std::f64::consts::SQRT_2;
            (0..self.clusters)
                .map(|k| {
                    let mut c = vec![0.0; self.dim];
                    c[k] = s;
                    c
                })
                .collect()
        } else {
            // grid with spacing d; distinct nodes are at least d apart
            let side = (2..).find(|s: &usize| s.pow(self.dim as u32) >= self.clusters).unwrap();
            (0..self.clusters)
                .map(|mut k| {
                    (0..self.dim)
                        .map(|_| {
                            let coord = k % side;
                            k /= side;
                            coord as f64 * d
                        })
                        .collect()
                })
                .collect()
        }
    }
}

pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<Embeddings> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, Stream::DataGen, 0));
    let noise = Normal::new(0.0, spec.cluster_spread).map_err(|e| Error::param(e.to_string()))?;
    let mut data = Vec::with_capacity(spec.clusters * spec.points_per_cluster * spec.dim);
    for c in spec.centers() {
        for _ in 0..spec.points_per_cluster {
            data.extend(c.iter().map(|v| v + noise.sample(&mut rng)));
        }
    }
    Embeddings::new(spec.clusters * spec.points_per_cluster, spec.dim, data)
}
