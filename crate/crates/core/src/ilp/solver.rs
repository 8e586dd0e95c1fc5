//! Depth-first branch and prune over integer boxes.
//!
//! Every row is scaled to integer coefficients and split into `<=` halves.
//! Each search node runs interval propagation to a fixpoint: for a row
//! `Σ a_j x_j <= b` the smallest achievable left-hand side bounds every
//! single variable, and a node dies as soon as that minimum exceeds `b`.
//! Branching picks the lowest-index unfixed variable and tries its values in
//! ascending order, so solutions come out in lexicographic order.

use std::collections::VecDeque;

use num_integer::Integer;

use super::system::{IntAssignment, LinearSystem};
use crate::error::{Error, Result};
use crate::rational::common_denominator;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(IntAssignment),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Finds some integer point of the box satisfying every row.
pub fn solve_feasibility(system: &LinearSystem) -> Result<Feasibility> {
    let mut solutions = Solutions::new(system)?;
    Ok(match solutions.next() {
        Some(values) => Feasibility::Feasible(system.assignment(&values)),
        None => Feasibility::Infeasible,
    })
}

struct IntRow {
    terms: Vec<(usize, i128)>,
    rhs: i128,
}

struct Compiled {
    rows: Vec<IntRow>,
    rows_of: Vec<Vec<usize>>,
    lower: Vec<i64>,
    upper: Vec<i64>,
}

impl Compiled {
    fn new(system: &LinearSystem) -> Result<Self> {
        let mut lower = Vec::with_capacity(system.vars().len());
        let mut upper = Vec::with_capacity(system.vars().len());
        for v in system.vars() {
            let (l, u) = v
                .bounds
                .finite()
                .ok_or_else(|| Error::UnboundedVar(v.name.clone()))?;
            lower.push(l);
            upper.push(u);
        }
        let mut rows = Vec::new();
        let mut rows_of = vec![Vec::new(); lower.len()];
        for row in system.rows().iter().flat_map(|r| r.as_leq_rows()) {
            let scale = common_denominator(row.coeffs.values().chain(std::iter::once(&row.rhs)));
            let terms: Vec<(usize, i128)> = row
                .coeffs
                .iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(v, c)| (v.0, c.scaled(scale).expect("scale clears denominators")))
                .collect();
            let rhs = row.rhs.scaled(scale).expect("scale clears denominators");
            let idx = rows.len();
            for (v, _) in &terms {
                rows_of[*v].push(idx);
            }
            rows.push(IntRow { terms, rhs });
        }
        Ok(Compiled {
            rows,
            rows_of,
            lower,
            upper,
        })
    }

    /// Tightens `lo`/`hi` to a fixpoint starting from `queue`. Returns false
    /// when some row becomes unsatisfiable.
    fn propagate(&self, lo: &mut [i64], hi: &mut [i64], queue: impl IntoIterator<Item = usize>) -> bool {
        let mut pending = vec![false; self.rows.len()];
        let mut queue: VecDeque<usize> = queue
            .into_iter()
            .filter(|&r| !std::mem::replace(&mut pending[r], true))
            .collect();
        while let Some(r) = queue.pop_front() {
            pending[r] = false;
            let row = &self.rows[r];
            let min_lhs: i128 = row.terms.iter().map(|&(j, a)| min_term(lo, hi, j, a)).sum();
            if min_lhs > row.rhs {
                return false;
            }
            for &(j, a) in &row.terms {
                let slack = row.rhs - (min_lhs - min_term(lo, hi, j, a));
                let changed = if a > 0 {
                    let bound = Integer::div_floor(&slack, &a);
                    if bound < hi[j] as i128 {
                        hi[j] = bound.max(i64::MIN as i128) as i64;
                        true
                    } else {
                        false
                    }
                } else {
                    // a*x <= slack with a < 0  =>  x >= ceil(slack / a)
                    let bound = -Integer::div_floor(&-slack, &a);
                    if bound > lo[j] as i128 {
                        lo[j] = bound.min(i64::MAX as i128) as i64;
                        true
                    } else {
                        false
                    }
                };
                if changed {
                    if lo[j] > hi[j] {
                        return false;
                    }
                    for &other in &self.rows_of[j] {
                        if other != r && !pending[other] {
                            pending[other] = true;
                            queue.push_back(other);
                        }
                    }
                }
            }
        }
        true
    }
}

// Tightening a variable through a row never moves that variable's own
// minimal contribution, so `min_lhs` stays valid for the whole row pass.
fn min_term(lo: &[i64], hi: &[i64], j: usize, a: i128) -> i128 {
    if a > 0 {
        a * lo[j] as i128
    } else {
        a * hi[j] as i128
    }
}

struct Frame {
    lo: Vec<i64>,
    hi: Vec<i64>,
    var: usize,
    next: i64,
}

/// Lazy stream of every integer solution, in lexicographic order of the
/// value vector (variables in index order).
pub struct Solutions {
    compiled: Compiled,
    stack: Vec<Frame>,
    started: bool,
    nodes: u64,
}

impl Solutions {
    pub fn new(system: &LinearSystem) -> Result<Self> {
        Ok(Solutions {
            compiled: Compiled::new(system)?,
            stack: Vec::new(),
            started: false,
            nodes: 0,
        })
    }

    /// Search nodes visited so far.
    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    // Returns the point if the node is fully fixed, otherwise schedules a branch.
    fn expand(&mut self, lo: Vec<i64>, hi: Vec<i64>) -> Option<Vec<i64>> {
        self.nodes += 1;
        match (0..lo.len()).find(|&j| lo[j] < hi[j]) {
            None => Some(lo),
            Some(var) => {
                let next = lo[var];
                self.stack.push(Frame { lo, hi, var, next });
                None
            }
        }
    }
}

impl Iterator for Solutions {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if !self.started {
            self.started = true;
            let mut lo = self.compiled.lower.clone();
            let mut hi = self.compiled.upper.clone();
            if lo.iter().zip(&hi).any(|(l, h)| l > h) {
                return None;
            }
            if self.compiled.propagate(&mut lo, &mut hi, 0..self.compiled.rows.len()) {
                if let Some(point) = self.expand(lo, hi) {
                    return Some(point);
                }
            }
        }
        loop {
            let frame = self.stack.last_mut()?;
            let var = frame.var;
            if frame.next > frame.hi[var] {
                self.stack.pop();
                continue;
            }
            let value = frame.next;
            frame.next += 1;
            let mut lo = frame.lo.clone();
            let mut hi = frame.hi.clone();
            lo[var] = value;
            hi[var] = value;
            let touched = self.compiled.rows_of[var].clone();
            if self.compiled.propagate(&mut lo, &mut hi, touched) {
                if let Some(point) = self.expand(lo, hi) {
                    return Some(point);
                }
            }
        }
    }
}
