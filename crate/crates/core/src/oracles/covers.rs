use std::collections::BTreeSet;

use crate::error::{budget, Result};
use crate::rdscp::{AuthorizationPolicy, RdscpInstance};

const MAX_MEMBERS: u64 = 12;
const MAX_NODES: u64 = 50_000_000;

/// For every deletion of at most `s` members, are there `d` pairwise
/// disjoint subfamilies of at most `t` members each covering `universe`?
fn survives<T: Ord + Clone>(
    universe: &BTreeSet<T>,
    members: &[BTreeSet<T>],
    s: usize,
    d: usize,
    t: usize,
) -> Result<bool> {
    budget("oracle-members", MAX_MEMBERS, members.len() as u64)?;
    let m = members.len();
    let mut nodes = 0u64;
    for deleted in subsets_up_to(m, s.min(m)) {
        let alive: Vec<usize> = (0..m).filter(|i| !deleted.contains(i)).collect();
        if !packing(universe, members, &alive, d, t, &mut nodes)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All index subsets of `0..m` with at most `k` elements, as bitsets.
fn subsets_up_to(m: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..(1u32 << m))
        .filter(move |mask| mask.count_ones() as usize <= k)
        .map(move |mask| (0..m).filter(|i| mask & (1 << i) != 0).collect())
}

fn packing<T: Ord + Clone>(
    universe: &BTreeSet<T>,
    members: &[BTreeSet<T>],
    alive: &[usize],
    d: usize,
    t: usize,
    nodes: &mut u64,
) -> Result<bool> {
    if universe.is_empty() {
        // the empty subfamily covers an empty universe, as often as needed
        return Ok(true);
    }
    let covers: Vec<u32> = subsets_up_to(alive.len(), t.min(alive.len()))
        .filter(|pick| {
            let union: BTreeSet<T> = pick
                .iter()
                .flat_map(|p| members[alive[*p]].iter().cloned())
                .collect();
            union.is_superset(universe)
        })
        .map(|pick| pick.iter().fold(0u32, |acc, p| acc | (1 << alive[*p])))
        .collect();
    choose(&covers, 0, 0, d, nodes)
}

fn choose(covers: &[u32], from: usize, used: u32, left: usize, nodes: &mut u64) -> Result<bool> {
    *nodes += 1;
    budget("oracle-nodes", MAX_NODES, *nodes)?;
    if left == 0 {
        return Ok(true);
    }
    for i in from..covers.len() {
        if covers[i] & used == 0 && choose(covers, i + 1, used | covers[i], left - 1, nodes)? {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn rdscp_oracle(inst: &RdscpInstance) -> Result<bool> {
    let universe: BTreeSet<usize> = (1..=inst.n).collect();
    let members: Vec<BTreeSet<usize>> = inst.family.iter().map(|f| f.iter().copied().collect()).collect();
    survives(&universe, &members, inst.s, inst.d, inst.t)
}

/// Whether `d` disjoint covers survive the deletion of exactly the members
/// at `removed`.
pub fn rdscp_packing_exists(inst: &RdscpInstance, removed: &[usize]) -> Result<bool> {
    let universe: BTreeSet<usize> = (1..=inst.n).collect();
    let members: Vec<BTreeSet<usize>> = inst.family.iter().map(|f| f.iter().copied().collect()).collect();
    budget("oracle-members", MAX_MEMBERS, members.len() as u64)?;
    let alive: Vec<usize> = (0..members.len()).filter(|i| !removed.contains(i)).collect();
    packing(&universe, &members, &alive, inst.d, inst.t, &mut 0)
}

/// Teams of users: for every absence of at most `s` users, `d` disjoint
/// teams of at most `t` users each jointly authorized for all of `p`.
pub fn policy_oracle(policy: &AuthorizationPolicy) -> Result<bool> {
    let required: BTreeSet<&str> = policy.p.iter().map(String::as_str).collect();
    let grants: Vec<BTreeSet<&str>> = policy
        .users
        .iter()
        .map(|u| {
            policy
                .vr
                .iter()
                .filter(|(who, _)| who == u)
                .map(|(_, r)| r.as_str())
                .collect()
        })
        .collect();
    survives(&required, &grants, policy.s, policy.d, policy.t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: usize, family: &[&[usize]], s: usize, d: usize, t: usize) -> RdscpInstance {
        RdscpInstance { n, family: family.iter().map(|f| f.to_vec()).collect(), s, d, t }
    }

    #[test]
    fn examples() {
        assert!(rdscp_oracle(&inst(1, &[&[1]], 0, 1, 1)).unwrap());
        assert!(!rdscp_oracle(&inst(1, &[&[1]], 1, 1, 1)).unwrap());
        assert!(rdscp_oracle(&inst(2, &[&[1], &[2], &[1, 2], &[1, 2]], 1, 2, 2)).unwrap());
        assert!(!rdscp_oracle(&inst(2, &[&[1], &[2], &[1, 2]], 1, 2, 2)).unwrap());
        assert!(rdscp_oracle(&inst(1, &[&[1], &[1]], 0, 2, 1)).unwrap());
        assert!(!rdscp_oracle(&inst(2, &[&[1], &[2]], 0, 1, 1)).unwrap());
    }

    #[test]
    fn restricted_packing() {
        let i = inst(2, &[&[1], &[2], &[1, 2], &[1, 2]], 1, 2, 2);
        assert!(rdscp_packing_exists(&i, &[2]).unwrap());
        assert!(!rdscp_packing_exists(&i, &[2, 3]).unwrap());
    }

    #[test]
    fn policies() {
        let both = AuthorizationPolicy {
            users: vec!["u".into(), "v".into()],
            resources: vec!["r".into(), "q".into()],
            vr: vec![
                ("u".into(), "r".into()),
                ("u".into(), "q".into()),
                ("v".into(), "r".into()),
                ("v".into(), "q".into()),
            ],
            p: vec!["r".into(), "q".into()],
            s: 0,
            d: 2,
            t: 1,
        };
        assert!(policy_oracle(&both).unwrap());
        assert!(!policy_oracle(&AuthorizationPolicy { s: 1, ..both }).unwrap());
    }

    #[test]
    fn member_budget() {
        let many: Vec<&[usize]> = vec![&[1]; 13];
        assert!(matches!(
            rdscp_oracle(&inst(1, &many, 0, 1, 1)),
            Err(crate::Error::Budget { .. })
        ));
    }
}
