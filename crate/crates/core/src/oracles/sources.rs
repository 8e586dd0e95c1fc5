use crate::error::{budget, Result};
use crate::rdscp::{HittingSetInstance, MatchingInstance};

const MAX_SUBSETS: u64 = 1 << 24;

/// Some set of at most `k` ground elements meets every listed set.
pub fn hitting_set_oracle(inst: &HittingSetInstance) -> Result<bool> {
    budget("oracle-subsets", MAX_SUBSETS, 1u64.checked_shl(inst.n as u32).unwrap_or(u64::MAX))?;
    Ok((0u64..(1 << inst.n))
        .filter(|mask| mask.count_ones() as usize <= inst.k)
        .any(|mask| {
            inst.sets
                .iter()
                .all(|set| set.iter().any(|v| mask & (1 << (v - 1)) != 0))
        }))
}

/// Some `k` triples are pairwise disjoint in every coordinate.
pub fn matching_3dm_oracle(inst: &MatchingInstance) -> Result<bool> {
    let m = inst.triples.len();
    budget("oracle-subsets", MAX_SUBSETS, 1u64.checked_shl(m as u32).unwrap_or(u64::MAX))?;
    Ok((0u64..(1 << m))
        .filter(|mask| mask.count_ones() as usize >= inst.k)
        .any(|mask| {
            let chosen: Vec<&[usize; 3]> = (0..m)
                .filter(|j| mask & (1 << j) != 0)
                .map(|j| &inst.triples[j])
                .collect();
            chosen.iter().enumerate().all(|(a, e)| {
                chosen[a + 1..]
                    .iter()
                    .all(|f| (0..3).all(|c| e[c] != f[c]))
            })
        }))
}
