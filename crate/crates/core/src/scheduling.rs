//! Resiliency makespan minimization on unrelated machines.
//!
//! Jobs come in types with per-machine processing times. The instance is
//! resilient when, for every downtime vector of total at most `K`, the jobs
//! can be assigned so that each machine `i` finishes by `Cmax - d_i`.

use serde::{Deserialize, Serialize};

use crate::engine::{Block, ResiliencySystem};
use crate::error::{Error, Result};
use crate::ilp::{IntAssignment, LinearRow, VarBounds};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchedulingInstance {
    pub machines: usize,
    /// `ptimes[t][i]`: processing time of a type-`t` job on machine `i`.
    pub ptimes: Vec<Vec<u32>>,
    pub counts: Vec<u32>,
    #[serde(rename = "K")]
    pub k: u32,
    pub cmax: u32,
}

impl SchedulingInstance {
    pub fn validate(&self) -> Result<()> {
        if self.machines == 0 {
            return Err(Error::Argument("machines must be positive".into()));
        }
        if self.ptimes.is_empty() {
            return Err(Error::Argument("at least one job type is required".into()));
        }
        if self.ptimes.len() != self.counts.len() {
            return Err(Error::Argument(format!(
                "ptimes has {} types but counts has {}",
                self.ptimes.len(),
                self.counts.len()
            )));
        }
        if let Some(t) = self.ptimes.iter().position(|row| row.len() != self.machines) {
            return Err(Error::Argument(format!(
                "ptimes[{t}] has {} entries, expected {}",
                self.ptimes[t].len(),
                self.machines
            )));
        }
        Ok(())
    }

    pub fn types(&self) -> usize {
        self.ptimes.len()
    }
}

pub fn delay_name(i: usize) -> String {
    format!("d[{}]", i + 1)
}

pub fn x_name(t: usize, i: usize) -> String {
    format!("x[{},{}]", t + 1, i + 1)
}

pub fn encode(inst: &SchedulingInstance) -> Result<ResiliencySystem> {
    inst.validate()?;
    let int = |v: u32| Rational::from_int(v as i64);
    let mut sys = ResiliencySystem::new();
    let delays = (0..inst.machines)
        .map(|i| sys.add_z(delay_name(i), VarBounds::new(0, inst.k as i64)))
        .collect::<Result<Vec<_>>>()?;
    let mut x = Vec::with_capacity(inst.types());
    for t in 0..inst.types() {
        let row = (0..inst.machines)
            .map(|i| sys.add_x(x_name(t, i), VarBounds::new(0, inst.counts[t] as i64)))
            .collect::<Result<Vec<_>>>()?;
        x.push(row);
    }

    sys.add_row(
        Block::Z,
        LinearRow::leq(delays.iter().map(|d| (*d, Rational::ONE)), int(inst.k)),
    )?;
    for (row, count) in x.iter().zip(&inst.counts) {
        let terms = row.iter().map(|v| (*v, Rational::ONE));
        sys.add_row(Block::X, LinearRow::eq(terms, int(*count)))?;
    }
    // zero processing times stay in the row so it keeps touching x
    for i in 0..inst.machines {
        let terms = (0..inst.types())
            .map(|t| (x[t][i], int(inst.ptimes[t][i])))
            .chain(std::iter::once((delays[i], Rational::ONE)));
        sys.add_row(Block::Xz, LinearRow::leq(terms, int(inst.cmax)))?;
    }
    Ok(sys)
}

pub fn decode_delays(inst: &SchedulingInstance, scenario: &IntAssignment) -> Result<Vec<u32>> {
    let delays = (0..inst.machines)
        .map(|i| {
            let name = delay_name(i);
            let v = scenario
                .get(&name)
                .ok_or_else(|| Error::Scenario(format!("missing {name}")))?;
            u32::try_from(v).map_err(|_| Error::Scenario(format!("{name} = {v} is negative")))
        })
        .collect::<Result<Vec<_>>>()?;
    let total: u64 = delays.iter().map(|d| *d as u64).sum();
    if total > inst.k as u64 {
        return Err(Error::Scenario(format!("total downtime {total} exceeds K = {}", inst.k)));
    }
    Ok(delays)
}

/// Job counts per machine: `table[i][t]` jobs of type `t` on machine `i`.
pub fn decode_schedule(
    inst: &SchedulingInstance,
    delays: &[u32],
    x: &IntAssignment,
) -> Result<Vec<Vec<u32>>> {
    let table: Vec<Vec<u32>> = (0..inst.machines)
        .map(|i| (0..inst.types()).map(|t| x.value(&x_name(t, i)).max(0) as u32).collect())
        .collect();
    verify_schedule(inst, delays, &table)
        .map_err(|e| Error::System(format!("encoder bug: {e}")))?;
    Ok(table)
}

pub fn verify_schedule(
    inst: &SchedulingInstance,
    delays: &[u32],
    table: &[Vec<u32>],
) -> std::result::Result<(), String> {
    if table.len() != inst.machines || delays.len() != inst.machines {
        return Err("table or delays do not match the machine count".into());
    }
    for t in 0..inst.types() {
        let placed: u64 = table.iter().map(|row| row[t] as u64).sum();
        if placed != inst.counts[t] as u64 {
            return Err(format!("type {} has {placed} jobs placed, {} required", t + 1, inst.counts[t]));
        }
    }
    for (i, row) in table.iter().enumerate() {
        let load: i64 = row
            .iter()
            .enumerate()
            .map(|(t, n)| *n as i64 * inst.ptimes[t][i] as i64)
            .sum();
        let capacity = inst.cmax as i64 - delays[i] as i64;
        if load > capacity {
            return Err(format!("machine {} has load {load} > {capacity}", i + 1));
        }
    }
    Ok(())
}
