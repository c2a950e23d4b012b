//! Partitioned ground sets, partition matroids and fractional membership vectors.
//!
//! Elements are the indices `0..n`. Each partition occupies a contiguous range
//! of indices, so a partition block is always a plain slice of any length-`n`
//! vector.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute slack allowed on the per-partition sum constraints.
pub const POLYTOPE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundSet {
    partitions: Vec<Range<usize>>,
    partition_of: Vec<usize>,
}

impl GroundSet {
    /// Builds contiguous partitions with the given sizes, in order.
    pub fn new(partition_sizes: &[usize]) -> Result<Self> {
        if partition_sizes.is_empty() {
            return Err(Error::Construction("no partitions given".into()));
        }
        if let Some(i) = partition_sizes.iter().position(|&s| s == 0) {
            return Err(Error::Construction(format!("partition {i} is empty")));
        }
        let mut partitions = Vec::with_capacity(partition_sizes.len());
        let mut partition_of = Vec::new();
        let mut start = 0;
        for (i, &size) in partition_sizes.iter().enumerate() {
            partitions.push(start..start + size);
            partition_of.extend(std::iter::repeat_n(i, size));
            start += size;
        }
        Ok(Self {
            partitions,
            partition_of,
        })
    }

    /// Number of elements `n`.
    pub fn len(&self) -> usize {
        self.partition_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partition_of.is_empty()
    }

    pub fn num_partitions(&self) -> usize {
        self.partitions.len()
    }

    pub fn partition(&self, i: usize) -> Range<usize> {
        self.partitions[i].clone()
    }

    pub fn partitions(&self) -> &[Range<usize>] {
        &self.partitions
    }

    pub fn partition_of(&self, element: usize) -> usize {
        self.partition_of[element]
    }

    pub fn partition_sizes(&self) -> Vec<usize> {
        self.partitions.iter().map(|r| r.len()).collect()
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index,
                n: self.len(),
            })
        }
    }
}

/// A partition matroid: at most `budgets[i]` elements from partition `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionMatroid {
    ground: GroundSet,
    budgets: Vec<usize>,
}

impl PartitionMatroid {
    pub fn new(ground: GroundSet, budgets: Vec<usize>) -> Result<Self> {
        if budgets.len() != ground.num_partitions() {
            return Err(Error::Dimension {
                expected: ground.num_partitions(),
                got: budgets.len(),
            });
        }
        for (i, (&k, range)) in budgets.iter().zip(ground.partitions()).enumerate() {
            if k == 0 || k > range.len() {
                return Err(Error::Construction(format!(
                    "budget {k} for partition {i} must lie in 1..={}",
                    range.len()
                )));
            }
        }
        Ok(Self { ground, budgets })
    }

    /// Unit budget on every partition.
    pub fn unit(ground: GroundSet) -> Self {
        let budgets = vec![1; ground.num_partitions()];
        Self { ground, budgets }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn budgets(&self) -> &[usize] {
        &self.budgets
    }

    pub fn budget(&self, i: usize) -> usize {
        self.budgets[i]
    }

    pub fn total_budget(&self) -> usize {
        self.budgets.iter().sum()
    }

    /// Matroid polytope membership: box constraints plus per-partition sums,
    /// each within [`POLYTOPE_TOL`].
    pub fn polytope_check(&self, x: &MembershipVector) -> Result<bool> {
        if x.len() != self.ground.len() {
            return Err(Error::Dimension {
                expected: self.ground.len(),
                got: x.len(),
            });
        }
        let v = x.values();
        if v
            .iter()
            .any(|&xj| !(-POLYTOPE_TOL..=1.0 + POLYTOPE_TOL).contains(&xj))
        {
            return Ok(false);
        }
        Ok(self
            .ground
            .partitions()
            .iter()
            .zip(&self.budgets)
            .all(|(range, &k)| v[range.clone()].iter().sum::<f64>() <= k as f64 + POLYTOPE_TOL))
    }

    /// Independence test: per-partition cardinality caps.
    pub fn feasibility_check(&self, set: &FeasibleSet) -> Result<bool> {
        let mut counts = vec![0usize; self.ground.num_partitions()];
        for &j in set.members() {
            self.ground.check_index(j)?;
            counts[self.ground.partition_of(j)] += 1;
        }
        Ok(counts.iter().zip(&self.budgets).all(|(c, k)| c <= k))
    }
}

/// A point of `[0,1]^n`, interpreted as independent selection probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MembershipVector {
    values: Vec<f64>,
}

impl MembershipVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(j) = values
            .iter()
            .position(|v| !v.is_finite() || !(0.0..=1.0).contains(v))
        {
            return Err(Error::param(format!(
                "membership value {} at coordinate {j} is outside [0, 1]",
                values[j]
            )));
        }
        Ok(Self { values })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
        }
    }

    pub fn indicator(n: usize, set: &FeasibleSet) -> Result<Self> {
        let mut values = vec![0.0; n];
        for &j in set.members() {
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
            values[j] = 1.0;
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Indices with strictly positive mass.
    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(j, _)| j)
            .collect()
    }
}

/// A sorted, duplicate-free list of element indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeasibleSet {
    members: Vec<usize>,
}

impl FeasibleSet {
    pub fn new(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.members.binary_search(&j).is_ok()
    }

    pub fn insert(&mut self, j: usize) -> bool {
        match self.members.binary_search(&j) {
            Ok(_) => false,
            Err(pos) => {
                self.members.insert(pos, j);
                true
            }
        }
    }
}

impl FromIterator<usize> for FeasibleSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matroid(sizes: &[usize], budgets: &[usize]) -> PartitionMatroid {
        PartitionMatroid::new(GroundSet::new(sizes).unwrap(), budgets.to_vec()).unwrap()
    }

    fn mv(v: &[f64]) -> MembershipVector {
        MembershipVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn contiguous_partitions() {
        let g = GroundSet::new(&[2, 2]).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.partition(0), 0..2);
        assert_eq!(g.partition(1), 2..4);

        let g = GroundSet::new(&[1]).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.partition(0), 0..1);

        let g = GroundSet::new(&[3, 1, 2]).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.num_partitions(), 3);
        assert_eq!(g.partition(2), 4..6);
    }

    #[test]
    fn rejects_empty_layouts() {
        assert!(matches!(GroundSet::new(&[]), Err(Error::Construction(_))));
        assert!(matches!(GroundSet::new(&[2, 0]), Err(Error::Construction(_))));
    }

    #[test]
    fn budgets_validated() {
        let g = GroundSet::new(&[2, 2]).unwrap();
        assert!(PartitionMatroid::new(g.clone(), vec![1]).is_err());
        assert!(PartitionMatroid::new(g.clone(), vec![0, 1]).is_err());
        assert!(PartitionMatroid::new(g.clone(), vec![3, 1]).is_err());
        assert!(PartitionMatroid::new(g, vec![2, 2]).is_ok());
    }

    #[test]
    fn polytope_examples() {
        let m = matroid(&[2, 2], &[1, 1]);
        assert!(m.polytope_check(&mv(&[1.0, 0.0, 1.0, 0.0])).unwrap());
        assert!(!m.polytope_check(&mv(&[0.7, 0.7, 0.0, 0.0])).unwrap());
        assert!(m.polytope_check(&mv(&[0.5, 0.5, 0.5, 0.5])).unwrap());
        assert!(matches!(
            m.polytope_check(&mv(&[0.5, 0.5])),
            Err(Error::Dimension { expected: 4, got: 2 })
        ));
    }

    #[test]
    fn feasibility_examples() {
        let m = matroid(&[2, 2], &[1, 1]);
        assert!(m.feasibility_check(&FeasibleSet::new(vec![0, 2])).unwrap());
        assert!(!m.feasibility_check(&FeasibleSet::new(vec![0, 1])).unwrap());
        assert!(m.feasibility_check(&FeasibleSet::empty()).unwrap());
        assert!(matches!(
            m.feasibility_check(&FeasibleSet::new(vec![4])),
            Err(Error::IndexOutOfRange { index: 4, n: 4 })
        ));
    }

    #[test]
    fn membership_rejects_out_of_box() {
        assert!(MembershipVector::new(vec![1.5]).is_err());
        assert!(MembershipVector::new(vec![-0.1]).is_err());
        assert!(MembershipVector::new(vec![f64::NAN]).is_err());
    }

    fn layout() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
        prop::collection::vec(1usize..5, 1..5).prop_flat_map(|sizes| {
            let budgets = sizes.iter().map(|&s| 1..=s).collect::<Vec<_>>();
            (Just(sizes), budgets)
        })
    }

    proptest! {
        #[test]
        fn partition_of_round_trips(sizes in prop::collection::vec(1usize..6, 1..6)) {
            let g = GroundSet::new(&sizes).unwrap();
            prop_assert_eq!(g.len(), sizes.iter().sum::<usize>());
            for j in 0..g.len() {
                for i in 0..g.num_partitions() {
                    prop_assert_eq!(g.partition_of(j) == i, g.partition(i).contains(&j));
                }
            }
        }

        #[test]
        fn feasible_indicators_lie_in_polytope(
            (sizes, budgets) in layout(),
            picks in prop::collection::vec(any::<prop::sample::Index>(), 0..10),
        ) {
            let m = PartitionMatroid::new(GroundSet::new(&sizes).unwrap(), budgets).unwrap();
            let n = m.ground().len();
            let mut set = FeasibleSet::empty();
            for p in picks {
                let mut trial = set.clone();
                trial.insert(p.index(n));
                if m.feasibility_check(&trial).unwrap() {
                    set = trial;
                }
            }
            let x = MembershipVector::indicator(n, &set).unwrap();
            prop_assert!(m.polytope_check(&x).unwrap());
        }

        #[test]
        fn polytope_closed_under_decrease(
            (sizes, budgets) in layout(),
            raw in prop::collection::vec(0.0f64..1.0, 20),
            shrink in prop::collection::vec(0.0f64..=1.0, 20),
        ) {
            let m = PartitionMatroid::new(GroundSet::new(&sizes).unwrap(), budgets).unwrap();
            let g = m.ground();
            // scale each block into the polytope
            let mut x = raw[..g.len()].to_vec();
            for (range, &k) in g.partitions().iter().zip(m.budgets()) {
                let s: f64 = x[range.clone()].iter().sum();
                if s > k as f64 {
                    for v in &mut x[range.clone()] {
                        *v *= k as f64 / s;
                    }
                }
            }
            let x = MembershipVector::new(x).unwrap();
            prop_assert!(m.polytope_check(&x).unwrap());
            let y: Vec<f64> = x.values().iter().zip(&shrink).map(|(a, b)| a * b).collect();
            prop_assert!(m.polytope_check(&MembershipVector::new(y).unwrap()).unwrap());
        }
    }
}
