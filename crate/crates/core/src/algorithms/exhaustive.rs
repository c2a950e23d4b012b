use crate::error::{Error, Result};
use crate::ground::{FeasibleSet, PartitionMatroid};
use crate::objectives::SubmodularOracle;

/// Largest number of independent sets [`brute_force_optimum`] will visit.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceOptimum {
    pub set: FeasibleSet,
    /// `max f(S)` over independent sets; for monotone submodular `f` this
    /// also equals the maximum of `F` over the matroid polytope.
    pub value: f64,
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Number of independent sets of `m`, saturating.
pub fn independent_set_count(m: &PartitionMatroid) -> u128 {
    m.ground()
        .partitions()
        .iter()
        .zip(m.budgets())
        .map(|(r, &k)| (0..=k).map(|j| binomial(r.len(), j)).sum::<u128>())
        .fold(1u128, |acc, c| acc.saturating_mul(c))
}

/// Exhaustive search over every independent set. The first maximizer in
/// enumeration order wins.
pub fn brute_force_optimum<F: SubmodularOracle + ?Sized>(
    f: &F,
    m: &PartitionMatroid,
) -> Result<BruteForceOptimum> {
    let count = independent_set_count(m);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::Capacity {
            what: format!("exhaustive search over {count} independent sets"),
            limit: BRUTE_FORCE_LIMIT.to_string(),
        });
    }
    let mut best = BruteForceOptimum {
        set: FeasibleSet::empty(),
        value: f.eval(&[]),
    };
    let mut current = Vec::new();
    search(f, m, 0, &mut current, &mut best);
    Ok(best)
}

fn search<F: SubmodularOracle + ?Sized>(
    f: &F,
    m: &PartitionMatroid,
    partition: usize,
    current: &mut Vec<usize>,
    best: &mut BruteForceOptimum,
) {
    if partition == m.ground().num_partitions() {
        let value = f.eval(current);
        if value > best.value {
            *best = BruteForceOptimum {
                set: FeasibleSet::new(current.clone()),
                value,
            };
        }
        return;
    }
    let range = m.ground().partition(partition);
    choose(f, m, partition, range.start, range.end, m.budget(partition), current, best);
}

#[allow(clippy::too_many_arguments)]
fn choose<F: SubmodularOracle + ?Sized>(
    f: &F,
    m: &PartitionMatroid,
    partition: usize,
    from: usize,
    end: usize,
    left: usize,
    current: &mut Vec<usize>,
    best: &mut BruteForceOptimum,
) {
    search(f, m, partition + 1, current, best);
    if left == 0 {
        return;
    }
    for j in from..end {
        current.push(j);
        choose(f, m, partition, j + 1, end, left - 1, current, best);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::GroundSet;
    use crate::objectives::{Embeddings, FacilityLocation, ModularObjective};

    #[test]
    fn modular_optimum() {
        let f = ModularObjective::new(vec![3.0, 1.0, 2.0, 1.0]).unwrap();
        let m = PartitionMatroid::unit(GroundSet::new(&[2, 2]).unwrap());
        let opt = brute_force_optimum(&f, &m).unwrap();
        assert_eq!(opt.set.members(), &[0, 2]);
        assert_eq!(opt.value, 5.0);
    }

    #[test]
    fn fixture_b_optimum() {
        let emb = Embeddings::from_rows(&[vec![0.0], vec![0.1], vec![1.0], vec![1.1]]).unwrap();
        let f = FacilityLocation::from_embeddings(&emb, 0.5).unwrap();
        let m = PartitionMatroid::unit(GroundSet::new(&[2, 2]).unwrap());
        let opt = brute_force_optimum(&f, &m).unwrap();
        // 2 + 2·exp(-0.02); every cross pair attains it
        assert!((opt.value - 3.960_397_346_613_510_7).abs() < 1e-12);
        assert_eq!(opt.set.len(), 2);
        assert!(m.feasibility_check(&opt.set).unwrap());
    }

    #[test]
    fn full_budget_takes_everything() {
        let f = ModularObjective::new(vec![1.0, 0.5, 2.0]).unwrap();
        let m = PartitionMatroid::new(GroundSet::new(&[2, 1]).unwrap(), vec![2, 1]).unwrap();
        let opt = brute_force_optimum(&f, &m).unwrap();
        assert_eq!(opt.set.members(), &[0, 1, 2]);
        assert_eq!(opt.value, f.eval(&[0, 1, 2]));
    }

    #[test]
    fn counts_and_capacity() {
        let m = PartitionMatroid::new(GroundSet::new(&[3, 2]).unwrap(), vec![2, 1]).unwrap();
        assert_eq!(independent_set_count(&m), 7 * 3);
        let big = PartitionMatroid::new(GroundSet::new(&[40, 40]).unwrap(), vec![5, 5]).unwrap();
        let f = ModularObjective::new(vec![1.0; 80]).unwrap();
        assert!(matches!(brute_force_optimum(&f, &big), Err(Error::Capacity { .. })));
    }
}
