use super::select::top_k;
use crate::error::{Error, Result};
use crate::ground::{FeasibleSet, MembershipVector, PartitionMatroid};

/// Partition-wise argmax rounding: the `κ_i` largest positive coordinates of
/// each block, ties to the lowest index.
pub fn round_topk(x: &MembershipVector, m: &PartitionMatroid) -> Result<FeasibleSet> {
    if !m.polytope_check(x)? {
        return Err(Error::Precondition("x lies outside the matroid polytope".into()));
    }
    let v = x.values();
    let mut members = Vec::new();
    for (range, &k) in m.ground().partitions().iter().zip(m.budgets()) {
        let positive: Vec<usize> = range.clone().filter(|&j| v[j] > 0.0).collect();
        members.extend(top_k(v, &positive, k));
    }
    Ok(FeasibleSet::new(members))
}
