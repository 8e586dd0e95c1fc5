use std::collections::BTreeSet;

use crate::bribery::BriberyInstance;
use crate::error::{budget, Result};

const MAX_PROFILES: u64 = 5_000_000;

/// Adjacent swaps a bubble sort needs to turn `from` into `to`.
fn swap_distance(from: &[usize], to: &[usize]) -> usize {
    let mut seq: Vec<usize> = from.iter().map(|c| to.iter().position(|x| x == c).unwrap()).collect();
    let mut swaps = 0;
    let mut sorted = false;
    while !sorted {
        sorted = true;
        for j in 1..seq.len() {
            if seq[j - 1] > seq[j] {
                seq.swap(j - 1, j);
                swaps += 1;
                sorted = false;
            }
        }
    }
    swaps
}

fn all_orders(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for shorter in all_orders(m - 1) {
        for slot in 0..=shorter.len() {
            let mut o = shorter.clone();
            o.insert(slot, m);
            out.push(o);
        }
    }
    out
}

/// Profiles reachable from `voters` by re-ranking each voter, at total swap
/// cost at most `cap`.
fn reachable(voters: &[Vec<usize>], orders: &[Vec<usize>], cap: usize) -> BTreeSet<Vec<Vec<usize>>> {
    let mut out = BTreeSet::new();
    let mut current = Vec::with_capacity(voters.len());
    extend(voters, orders, cap, &mut current, &mut out);
    out
}

fn extend(
    voters: &[Vec<usize>],
    orders: &[Vec<usize>],
    cap: usize,
    current: &mut Vec<Vec<usize>>,
    out: &mut BTreeSet<Vec<Vec<usize>>>,
) {
    let Some(next) = voters.get(current.len()) else {
        let mut profile = current.clone();
        profile.sort();
        out.insert(profile);
        return;
    };
    for o in orders {
        let cost = swap_distance(next, o);
        if cost <= cap {
            current.push(o.clone());
            extend(voters, orders, cap - cost, current, out);
            current.pop();
        }
    }
}

fn first_wins(profile: &[Vec<usize>], scoring: &[u32], m: usize) -> bool {
    let mut points = vec![0u64; m + 1];
    for vote in profile {
        for (rank, c) in vote.iter().enumerate() {
            points[*c] += scoring[rank] as u64;
        }
    }
    (2..=m).all(|c| points[1] > points[c])
}

/// Works voter by voter: every adversarial re-ranking of cost at most `ba`
/// must admit a re-ranking of cost at most `b` after which candidate 1 has
/// strictly more points than anyone else.
pub fn bribery_oracle(inst: &BriberyInstance) -> Result<bool> {
    let m = inst.candidates;
    let orders = all_orders(m);
    let voters: Vec<Vec<usize>> = inst
        .votes
        .iter()
        .flat_map(|v| std::iter::repeat_n(v.order.clone(), v.count as usize))
        .collect();
    let per_side = (orders.len() as u64).saturating_pow(voters.len() as u32);
    budget("oracle-profiles", MAX_PROFILES, per_side.saturating_mul(per_side))?;
    for after_attack in reachable(&voters, &orders, inst.ba as usize) {
        let rescued = reachable(&after_attack, &orders, inst.b as usize)
            .iter()
            .any(|p| first_wins(p, &inst.scoring, m));
        if !rescued {
            return Ok(false);
        }
    }
    Ok(true)
}
