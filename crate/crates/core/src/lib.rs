//! Monotone submodular maximization over partition matroids.
//!
//! The crate provides the ground-set model, a handful of submodular oracles,
//! exact and Monte Carlo evaluation of the multilinear extension, the
//! continuous greedy family of algorithms (including the adaptive thresholded
//! variant that restricts each partition to a growing active set), curvature
//! analysis, and the communication accounting used to compare the
//! server-assisted realizations.
//!
//! ```
//! use atcg_core::prelude::*;
//!
//! let ground = GroundSet::new(&[2, 2]).unwrap();
//! let matroid = PartitionMatroid::new(ground, vec![1, 1]).unwrap();
//! let f = ModularObjective::new(vec![3.0, 1.0, 2.0, 1.0]).unwrap();
//! let cfg = RunConfig::exact(10, 0.3);
//! let trace = atcg(&f, &matroid, &cfg).unwrap();
//! assert_eq!(trace.rounded_set.members(), &[0, 2]);
//! assert_eq!(trace.final_embeddings(), 2);
//! ```

pub mod algorithms;
pub mod comm;
pub mod curvature;
pub mod error;
pub mod ground;
pub mod io;
pub mod multilinear;
pub mod objectives;
pub mod rng;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::algorithms::{
        atcg, atcg_general, brute_force_optimum, continuous_greedy, progress_ratio,
        progress_ratio_kappa, round_topk, sequential_greedy, Algorithm, GradientMode,
        IterationRecord, RunConfig, RunTrace,
    };
    pub use crate::comm::{
        dominance_check, eta_stats_from_traces, expected_comm_bound, gaussian_cdf,
        ledger_from_trace, CommLedger, EtaStats,
    };
    pub use crate::curvature::{effective_rate, partition_curvature, total_curvature};
    pub use crate::error::{Error, Result};
    pub use crate::ground::{FeasibleSet, GroundSet, MembershipVector, PartitionMatroid};
    pub use crate::multilinear::{
        exact_gradient, exact_value, mc_gradient, GradientEstimate, SampleConfig,
    };
    pub use crate::objectives::{
        marginal_gain, rbf_kernel, Embeddings, FacilityLocation, KernelMatrix,
        ModularObjective, RatingObjective, SubmodularOracle, WeightedCoverage,
    };
}
