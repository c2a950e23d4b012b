//! Total and partition curvature.
//!
//! `c = 1 − min_{S, p∉S} [f(S ∪ {p}) − f(S)] / f({p})`. Diminishing returns
//! puts the inner minimum at `S = 𝓟 ∖ {p}`, so the curvature needs one
//! batched marginal pass plus `n` singleton evaluations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::GroundSet;
use crate::objectives::SubmodularOracle;

/// Values this close outside `[0, 1]` are float noise and are snapped.
const SNAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureWitness {
    pub element: usize,
    /// Size of the minimizing set `S` (always `n − 1`).
    pub set_size: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub c_total: f64,
    pub c_partition: Vec<f64>,
    pub tau_star: f64,
    pub witness: CurvatureWitness,
    pub partition_witnesses: Vec<Option<CurvatureWitness>>,
    /// Elements with `f({p}) = 0`, left out of the minimization.
    pub skipped: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveRate {
    pub tau_eff: f64,
    /// `1 − e^{−τ_eff}`.
    pub bound: f64,
}

struct Ratios {
    ratio: Vec<Option<f64>>,
    set_size: usize,
}

fn ratios<F: SubmodularOracle + ?Sized>(f: &F, ground: &GroundSet) -> Result<Ratios> {
    let n = ground.len();
    if f.ground_size() != n {
        return Err(Error::Dimension {
            expected: n,
            got: f.ground_size(),
        });
    }
    let everything: Vec<usize> = (0..n).collect();
    let mut last = vec![0.0; n];
    f.toggle_marginals(&everything, &everything, &mut last);
    let ratio: Vec<Option<f64>> = (0..n)
        .map(|p| {
            let single = f.eval(&[p]);
            (single > 0.0).then(|| last[p] / single)
        })
        .collect();
    if ratio.iter().all(Option::is_none) {
        return Err(Error::DegenerateObjective("every singleton value is zero".into()));
    }
    Ok(Ratios {
        ratio,
        set_size: n - 1,
    })
}

fn minimize(r: &Ratios, elements: impl Iterator<Item = usize>) -> Option<CurvatureWitness> {
    let mut best: Option<CurvatureWitness> = None;
    for p in elements {
        if let Some(ratio) = r.ratio[p] {
            if best.as_ref().is_none_or(|b| ratio < b.ratio) {
                best = Some(CurvatureWitness {
                    element: p,
                    set_size: r.set_size,
                    ratio,
                });
            }
        }
    }
    best
}

fn curvature_of(ratio: f64) -> Result<f64> {
    let c = 1.0 - ratio;
    if c < -SNAP_TOL || c > 1.0 + SNAP_TOL || !c.is_finite() {
        return Err(Error::DegenerateObjective(format!(
            "curvature {c} outside [0, 1]; objective is not monotone submodular"
        )));
    }
    Ok(c.clamp(0.0, 1.0))
}

/// Total curvature together with every partition curvature.
pub fn total_curvature<F: SubmodularOracle + ?Sized>(f: &F, ground: &GroundSet) -> Result<CurvatureReport> {
    let r = ratios(f, ground)?;
    let witness = minimize(&r, 0..ground.len()).expect("some singleton is positive");
    let c_total = curvature_of(witness.ratio)?;
    let mut c_partition = Vec::with_capacity(ground.num_partitions());
    let mut partition_witnesses = Vec::with_capacity(ground.num_partitions());
    for range in ground.partitions() {
        let w = minimize(&r, range.clone());
        // a partition of zero-valued elements constrains nothing
        c_partition.push(match &w {
            Some(w) => curvature_of(w.ratio)?,
            None => 0.0,
        });
        partition_witnesses.push(w);
    }
    let skipped = (0..ground.len()).filter(|&p| r.ratio[p].is_none()).collect();
    Ok(CurvatureReport {
        c_total,
        tau_star: 1.0 - c_total,
        c_partition,
        witness,
        partition_witnesses,
        skipped,
    })
}

/// Curvature with the element restricted to partition `i`.
pub fn partition_curvature<F: SubmodularOracle + ?Sized>(f: &F, ground: &GroundSet, i: usize) -> Result<f64> {
    if i >= ground.num_partitions() {
        return Err(Error::param(format!(
            "partition {i} does not exist (N = {})",
            ground.num_partitions()
        )));
    }
    let r = ratios(f, ground)?;
    match minimize(&r, ground.partition(i)) {
        Some(w) => curvature_of(w.ratio),
        None => Ok(0.0),
    }
}

/// `τ_eff = max{τ, 1 − c}` and the guarantee `1 − e^{−τ_eff}`.
pub fn effective_rate(tau: f64, c: f64) -> Result<EffectiveRate> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::param(format!("tau must lie in (0, 1], got {tau}")));
    }
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::param(format!("curvature must lie in [0, 1], got {c}")));
    }
    let tau_eff = tau.max(1.0 - c);
    Ok(EffectiveRate {
        tau_eff,
        bound: 1.0 - (-tau_eff).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{Embeddings, FacilityLocation, ModularObjective, WeightedCoverage};

    fn fixture_b() -> FacilityLocation {
        let emb = Embeddings::from_rows(&[vec![0.0], vec![0.1], vec![1.0], vec![1.1]]).unwrap();
        FacilityLocation::from_embeddings(&emb, 0.5).unwrap()
    }

    #[test]
    fn modular_has_zero_curvature() {
        let f = ModularObjective::new(vec![0.1, 0.2, 0.3, 0.7]).unwrap();
        let g = GroundSet::new(&[2, 2]).unwrap();
        let report = total_curvature(&f, &g).unwrap();
        assert_eq!(report.c_total, 0.0);
        assert_eq!(report.c_partition, vec![0.0, 0.0]);
        assert_eq!(report.tau_star, 1.0);
        assert_eq!(partition_curvature(&f, &g, 1).unwrap(), 0.0);
    }

    #[test]
    fn duplicate_elements_are_fully_curved() {
        let emb = Embeddings::from_rows(&[vec![0.0], vec![0.0], vec![3.0]]).unwrap();
        let f = FacilityLocation::from_embeddings(&emb, 0.5).unwrap();
        let g = GroundSet::new(&[2, 1]).unwrap();
        let report = total_curvature(&f, &g).unwrap();
        assert_eq!(report.c_total, 1.0);
        assert_eq!(report.c_partition[0], 1.0);
        assert!(report.c_partition[1] < 1.0);
        assert_eq!(report.witness.element, 0);
        assert_eq!(report.witness.set_size, 2);
    }

    #[test]
    fn fixture_b_golden() {
        let g = GroundSet::new(&[2, 2]).unwrap();
        let report = total_curvature(&fixture_b(), &g).unwrap();
        assert!((report.c_total - 0.991_440_716_182_041_5).abs() < 1e-12);
        for c in &report.c_partition {
            assert!((c - 0.991_440_716_182_041_5).abs() < 1e-12);
            assert!(*c <= report.c_total);
        }
    }

    #[test]
    fn zero_singletons_are_skipped() {
        let f = WeightedCoverage::new(vec![1.0, 1.0], vec![vec![0], vec![], vec![1]]).unwrap();
        let report = total_curvature(&f, &GroundSet::new(&[1, 2]).unwrap()).unwrap();
        assert_eq!(report.skipped, vec![1]);
        let all_zero = ModularObjective::new(vec![0.0; 3]).unwrap();
        assert!(matches!(
            total_curvature(&all_zero, &GroundSet::new(&[3]).unwrap()),
            Err(Error::DegenerateObjective(_))
        ));
    }

    #[test]
    fn effective_rate_examples() {
        let r = effective_rate(0.3, 0.0).unwrap();
        assert_eq!(r.tau_eff, 1.0);
        assert!((r.bound - 0.632_121).abs() < 1e-6);
        let r = effective_rate(0.3, 0.5).unwrap();
        assert_eq!(r.tau_eff, 0.5);
        assert!((r.bound - 0.393_469).abs() < 1e-6);
        assert_eq!(effective_rate(1.0, 0.9).unwrap().tau_eff, 1.0);
        assert!(effective_rate(0.0, 0.5).is_err());
        assert!(effective_rate(0.5, 1.5).is_err());
    }
}
