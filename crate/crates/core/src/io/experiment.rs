use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{create, gen_synthetic, load_embeddings, load_ratings, ExperimentConfig, ObjectiveKind};
use crate::algorithms::{atcg, atcg_general, continuous_greedy, sequential_greedy_trace, Algorithm, RunTrace};
use crate::curvature::{total_curvature, CurvatureReport};
use crate::error::{Error, Result};
use crate::ground::{GroundSet, PartitionMatroid};
use crate::objectives::{Embeddings, FacilityLocation, ModularObjective, SubmodularOracle, WeightedCoverage};

/// Ground sets above this size skip the curvature report in `summary.json`.
pub const CURVATURE_CAP: usize = 5000;

pub struct Instance {
    pub objective: Box<dyn SubmodularOracle>,
    pub matroid: PartitionMatroid,
}

fn embeddings(cfg: &ExperimentConfig) -> Result<Embeddings> {
    match (&cfg.data_path, cfg.synthetic()) {
        (Some(p), _) => load_embeddings(p),
        (None, Some(spec)) => gen_synthetic(&spec),
        (None, None) => Err(Error::param("no embedding source configured")),
    }
}

/// Loads or generates the data and builds the objective and matroid.
pub fn build_instance(cfg: &ExperimentConfig) -> Result<Instance> {
    cfg.validate()?;
    let objective: Box<dyn SubmodularOracle> = match cfg.objective {
        ObjectiveKind::FacilityRbf => Box::new(FacilityLocation::from_embeddings(&embeddings(cfg)?, cfg.sigma)?),
        ObjectiveKind::Coverage => Box::new(WeightedCoverage::from_embeddings(
            &embeddings(cfg)?,
            cfg.coverage_radius.unwrap_or_default(),
        )?),
        ObjectiveKind::FacilityRating => {
            let path = cfg.data_path.as_ref().expect("validated");
            Box::new(load_ratings(path)?.objective)
        }
        ObjectiveKind::Modular => Box::new(ModularObjective::new(cfg.weights.clone().expect("validated"))?),
    };
    let sizes = match (&cfg.partition_sizes, cfg.synthetic()) {
        (Some(sizes), _) => sizes.clone(),
        (None, Some(spec)) => spec.partition_sizes(),
        (None, None) => return Err(Error::param("partition_sizes is required")),
    };
    let ground = GroundSet::new(&sizes)?;
    if ground.len() != objective.ground_size() {
        return Err(Error::param(format!(
            "partition sizes cover {} elements but the data has {}",
            ground.len(),
            objective.ground_size()
        )));
    }
    let budgets = cfg.budgets.clone().unwrap_or_else(|| vec![1; sizes.len()]);
    let matroid = PartitionMatroid::new(ground, budgets)?;
    Ok(Instance { objective, matroid })
}

/// Runs the configured algorithm.
pub fn run_trace(cfg: &ExperimentConfig, inst: &Instance) -> Result<RunTrace> {
    let f = inst.objective.as_ref();
    let m = &inst.matroid;
    let rc = cfg.run_config();
    match cfg.algorithm {
        Algorithm::SequentialGreedy => sequential_greedy_trace(f, m),
        Algorithm::ContinuousGreedy => continuous_greedy(f, m, &rc),
        Algorithm::Atcg => atcg(f, m, &rc),
        Algorithm::AtcgGeneral => atcg_general(f, m, &rc),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    #[serde(rename = "final_F")]
    pub final_f: f64,
    pub rounded_set: Vec<usize>,
    pub rounded_value: f64,
    #[serde(rename = "C_T")]
    pub c_t: usize,
    pub tau: f64,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "K")]
    pub samples: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_total: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_partition: Option<Vec<f64>>,
}

impl Summary {
    pub fn new(cfg: &ExperimentConfig, trace: &RunTrace, curvature: Option<&CurvatureReport>) -> Self {
        Self {
            final_f: trace.final_value(),
            rounded_set: trace.rounded_set.members().to_vec(),
            rounded_value: trace.rounded_value,
            c_t: trace.final_embeddings(),
            tau: cfg.tau,
            horizon: cfg.horizon,
            samples: cfg.samples,
            seed: cfg.seed,
            c_total: curvature.map(|c| c.c_total),
            c_partition: curvature.map(|c| c.c_partition.clone()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: RunTrace,
    pub summary: Summary,
}

fn write_csv(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> Result<()> {
    let mut out = std::io::BufWriter::new(create(path)?);
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `trajectory.csv`, `communication.csv`, `active.csv` and
/// `summary.json` for a finished trace. Rows are indexed by the number of
/// completed iterations `t = 1, 2, …`.
pub fn write_outputs(dir: &Path, trace: &RunTrace, summary: &Summary) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::File {
        path: dir.to_path_buf(),
        source,
    })?;
    let recs = &trace.records;
    write_csv(
        &dir.join("trajectory.csv"),
        "t,F_value",
        recs.iter().map(|r| format!("{},{:?}", r.t + 1, r.f_value)),
    )?;
    write_csv(
        &dir.join("communication.csv"),
        "t,cum_embeddings",
        recs.iter().map(|r| format!("{},{}", r.t + 1, r.cumulative_embeddings)),
    )?;
    write_csv(
        &dir.join("active.csv"),
        "t,total_active,eta_min",
        recs.iter().map(|r| {
            let eta_min = r.eta.iter().copied().reduce(f64::min).map(|e| format!("{e:?}")).unwrap_or_default();
            format!("{},{},{}", r.t + 1, r.total_active, eta_min)
        }),
    )?;
    let mut out = create(&dir.join("summary.json"))?;
    serde_json::to_writer_pretty(&mut out, summary)?;
    writeln!(out)?;
    Ok(())
}

/// Builds the instance, runs it and writes the outputs to `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let inst = build_instance(cfg)?;
    let trace = run_trace(cfg, &inst)?;
    let curvature = if inst.matroid.ground().len() <= CURVATURE_CAP {
        total_curvature(inst.objective.as_ref(), inst.matroid.ground()).ok()
    } else {
        None
    };
    let summary = Summary::new(cfg, &trace, curvature.as_ref());
    write_outputs(&cfg.output_dir, &trace, &summary)?;
    Ok(RunOutput { trace, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modular_fixture_summary() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::from_json(
            r#"{"objective": "modular", "weights": [3, 1, 2, 1], "partition_sizes": [2, 2],
                "T": 10, "tau": 0.3, "gradient_mode": "exact"}"#,
        )
        .unwrap();
        cfg.output_dir = dir.path().to_path_buf();
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.summary.rounded_value, 5.0);
        assert_eq!(out.summary.c_t, 2);
        assert_eq!(out.summary.rounded_set, vec![0, 2]);
        assert_eq!(out.summary.c_total, Some(0.0));
        let text = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
        let back: Summary = serde_json::from_str(&text).unwrap();
        assert_eq!(back, out.summary);
        let traj = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
        assert_eq!(traj.lines().count(), 11);
    }

    #[test]
    fn size_mismatch_is_reported() {
        let cfg = ExperimentConfig::from_json(
            r#"{"objective": "modular", "weights": [3, 1, 2], "partition_sizes": [2, 2]}"#,
        )
        .unwrap();
        assert!(build_instance(&cfg).is_err());
    }
}
