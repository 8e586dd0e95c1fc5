use crate::engine::{Block, ResiliencySystem};
use crate::error::{budget, Error, Result};
use crate::ilp::{LinearRow, LinearSystem, Relation, Variable};
use crate::rational::Rational;

use super::POINT_BUDGET;

fn satisfied(row: &LinearRow, values: &[i64]) -> bool {
    let mut lhs = Rational::ZERO;
    for (v, c) in &row.coeffs {
        lhs += *c * Rational::from_int(values[v.0]);
    }
    match row.relation {
        Relation::Leq => lhs <= row.rhs,
        Relation::Eq => lhs == row.rhs,
    }
}

fn box_of(v: &Variable) -> Result<(i64, i64)> {
    match (v.bounds.lower, v.bounds.upper) {
        (Some(l), Some(u)) => Ok((l, u)),
        _ => Err(Error::UnboundedVar(v.name.clone())),
    }
}

/// Steps `values[idx]` through their boxes like an odometer. Returns false
/// once every point has been visited.
fn advance(values: &mut [i64], idx: &[usize], boxes: &[(i64, i64)]) -> bool {
    for &i in idx.iter().rev() {
        if values[i] < boxes[i].1 {
            values[i] += 1;
            return true;
        }
        values[i] = boxes[i].0;
    }
    false
}

fn box_size(idx: &[usize], boxes: &[(i64, i64)]) -> u64 {
    idx.iter().fold(1u64, |acc, i| {
        let (l, u) = boxes[*i];
        let width = if u < l { 0 } else { (u - l + 1) as u64 };
        acc.saturating_mul(width)
    })
}

pub fn forall_exists_oracle(system: &ResiliencySystem) -> Result<bool> {
    forall_exists_oracle_with(system, POINT_BUDGET)
}

/// For every z-box point satisfying the z-rows, look for an x-box point
/// satisfying the remaining rows. Visits every point of both boxes.
pub fn forall_exists_oracle_with(system: &ResiliencySystem, max_points: u64) -> Result<bool> {
    let boxes = system.vars().iter().map(box_of).collect::<Result<Vec<_>>>()?;
    let zs: Vec<usize> = (0..boxes.len()).filter(|i| system.is_z(crate::ilp::VarId(*i))).collect();
    let xs: Vec<usize> = (0..boxes.len()).filter(|i| !zs.contains(i)).collect();
    let zsize = box_size(&zs, &boxes);
    let xsize = box_size(&xs, &boxes);
    budget("oracle-points", max_points, zsize.saturating_mul(xsize.max(1)))?;
    if zsize == 0 {
        return Ok(true);
    }
    if xsize == 0 {
        // no x point at all; the answer is whether any scenario exists
        return Ok(!any_scenario(system, &zs, &boxes));
    }
    let mut values: Vec<i64> = boxes.iter().map(|b| b.0).collect();
    loop {
        if system.rows(Block::Z).iter().all(|r| satisfied(r, &values)) {
            let mut found = false;
            for i in &xs {
                values[*i] = boxes[*i].0;
            }
            loop {
                let ok = system
                    .rows(Block::X)
                    .iter()
                    .chain(system.rows(Block::Xz))
                    .all(|r| satisfied(r, &values));
                if ok {
                    found = true;
                    break;
                }
                if !advance(&mut values, &xs, &boxes) {
                    break;
                }
            }
            if !found {
                return Ok(false);
            }
        }
        if !advance(&mut values, &zs, &boxes) {
            return Ok(true);
        }
    }
}

fn any_scenario(system: &ResiliencySystem, zs: &[usize], boxes: &[(i64, i64)]) -> bool {
    let mut values: Vec<i64> = boxes.iter().map(|b| b.0).collect();
    loop {
        if system.rows(Block::Z).iter().all(|r| satisfied(r, &values)) {
            return true;
        }
        if !advance(&mut values, zs, boxes) {
            return false;
        }
    }
}

/// Depth-first walk of the box in variable order. A row is tested only once
/// all of its variables hold values; there is no propagation. Returns the
/// first satisfying point.
pub fn exists_by_enumeration(system: &LinearSystem, max_nodes: u64) -> Result<Option<Vec<i64>>> {
    let boxes = system.vars().iter().map(box_of).collect::<Result<Vec<_>>>()?;
    let n = boxes.len();
    // rows grouped by the last variable they mention
    let mut due: Vec<Vec<&LinearRow>> = vec![Vec::new(); n + 1];
    for row in system.rows() {
        let last = row.coeffs.keys().map(|v| v.0 + 1).max().unwrap_or(0);
        due[last].push(row);
    }
    let mut values: Vec<i64> = boxes.iter().map(|b| b.0).collect();
    if !due[0].iter().all(|r| satisfied(r, &values)) {
        return Ok(None);
    }
    if n == 0 {
        return Ok(Some(values));
    }
    if boxes.iter().any(|(l, u)| u < l) {
        return Ok(None);
    }
    let mut nodes = 0u64;
    let mut depth = 0usize;
    loop {
        nodes += 1;
        budget("enumeration-nodes", max_nodes, nodes)?;
        let ok = due[depth + 1].iter().all(|r| satisfied(r, &values));
        if ok && depth + 1 == n {
            return Ok(Some(values));
        }
        if ok {
            depth += 1;
            values[depth] = boxes[depth].0;
            continue;
        }
        // next value here, or backtrack
        loop {
            if values[depth] < boxes[depth].1 {
                values[depth] += 1;
                break;
            }
            if depth == 0 {
                return Ok(None);
            }
            depth -= 1;
        }
    }
}
