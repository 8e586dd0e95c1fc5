use crate::error::{budget, Result};
use crate::scheduling::SchedulingInstance;

const MAX_POINTS: u64 = 50_000_000;

/// Ways to spread `n` identical jobs over `m` machines.
fn spreads(n: u32, m: usize) -> Vec<Vec<u32>> {
    if m == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for here in 0..=n {
        for mut rest in spreads(n - here, m - 1) {
            rest.insert(0, here);
            out.push(rest);
        }
    }
    out
}

fn binomial(n: u64, k: u64) -> u64 {
    (1..=k).fold(1u64, |acc, i| acc.saturating_mul(n + 1 - i) / i)
}

/// Can all jobs be placed so machine `i` finishes by `cmax - delays[i]`?
pub fn makespan_oracle(inst: &SchedulingInstance, delays: &[u32]) -> Result<bool> {
    let m = inst.machines;
    let work: u64 = inst
        .counts
        .iter()
        .map(|n| binomial(*n as u64 + m as u64 - 1, m as u64 - 1))
        .fold(1u64, u64::saturating_mul);
    budget("oracle-points", MAX_POINTS, work)?;
    let capacity: Vec<i64> = delays.iter().map(|d| inst.cmax as i64 - *d as i64).collect();
    let per_type: Vec<Vec<Vec<u32>>> = inst.counts.iter().map(|n| spreads(*n, m)).collect();
    let mut load = vec![0i64; m];
    Ok(place(inst, &per_type, 0, &mut load, &capacity))
}

fn place(
    inst: &SchedulingInstance,
    per_type: &[Vec<Vec<u32>>],
    t: usize,
    load: &mut [i64],
    capacity: &[i64],
) -> bool {
    if t == per_type.len() {
        return load.iter().zip(capacity).all(|(l, c)| l <= c);
    }
    for spread in &per_type[t] {
        for (i, n) in spread.iter().enumerate() {
            load[i] += *n as i64 * inst.ptimes[t][i] as i64;
        }
        let ok = place(inst, per_type, t + 1, load, capacity);
        for (i, n) in spread.iter().enumerate() {
            load[i] -= *n as i64 * inst.ptimes[t][i] as i64;
        }
        if ok {
            return true;
        }
    }
    false
}

/// Every downtime vector with total at most `K` must leave a feasible
/// schedule.
pub fn sched_oracle(inst: &SchedulingInstance) -> Result<bool> {
    let vectors = binomial(inst.k as u64 + inst.machines as u64, inst.machines as u64);
    budget("oracle-scenarios", MAX_POINTS, vectors)?;
    let mut delays = vec![0u32; inst.machines];
    loop {
        let total: u32 = delays.iter().sum();
        if total <= inst.k && !makespan_oracle(inst, &delays)? {
            return Ok(false);
        }
        // odometer over [0, K]^m
        let mut i = delays.len();
        loop {
            if i == 0 {
                return Ok(true);
            }
            i -= 1;
            if delays[i] < inst.k {
                delays[i] += 1;
                break;
            }
            delays[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(ptimes: &[&[u32]], counts: &[u32], k: u32, cmax: u32) -> SchedulingInstance {
        SchedulingInstance {
            machines: ptimes[0].len(),
            ptimes: ptimes.iter().map(|r| r.to_vec()).collect(),
            counts: counts.to_vec(),
            k,
            cmax,
        }
    }

    #[test]
    fn examples() {
        assert!(sched_oracle(&inst(&[&[1]], &[3], 0, 3)).unwrap());
        assert!(!sched_oracle(&inst(&[&[1]], &[3], 1, 3)).unwrap());
        assert!(!sched_oracle(&inst(&[&[1, 1]], &[3], 2, 2)).unwrap());
        assert!(sched_oracle(&inst(&[&[1, 1]], &[2], 1, 2)).unwrap());
        assert!(sched_oracle(&inst(&[&[3, 3]], &[0], 2, 4)).unwrap());
    }

    #[test]
    fn spreads_count() {
        assert_eq!(spreads(4, 3).len() as u64, binomial(6, 2));
        assert_eq!(spreads(0, 2), vec![vec![0, 0]]);
    }
}
