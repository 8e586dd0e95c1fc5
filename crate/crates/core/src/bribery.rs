//! Resiliency unit swap bribery.
//!
//! Voters are grouped into types, one per linear order of the candidates.
//! An adversary first rebribes voters within budget `ba`; for every such
//! move we must be able to rebribe within budget `b` so that candidate 1
//! strictly beats every rival under the scoring protocol. Moving a voter from
//! one order to another costs the number of adjacent swaps, which is the
//! Kendall tau distance between the orders.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::engine::{Block, ResiliencySystem};
use crate::error::{budget, Error, Result};
use crate::ilp::{IntAssignment, LinearRow, VarBounds, VarId};
use crate::rational::Rational;

/// Number of candidate pairs ranked in opposite order by `a` and `b`.
pub fn kendall(a: &[usize], b: &[usize]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::Argument(format!(
            "orders have lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let position = |order: &[usize]| -> Result<BTreeMap<usize, usize>> {
        let pos: BTreeMap<usize, usize> = order.iter().enumerate().map(|(p, c)| (*c, p)).collect();
        if pos.len() != order.len() {
            return Err(Error::Argument(format!("{order:?} repeats a candidate")));
        }
        Ok(pos)
    };
    let pa = position(a)?;
    let pb = position(b)?;
    if pa.keys().ne(pb.keys()) {
        return Err(Error::Argument("orders rank different candidates".into()));
    }
    Ok(pa
        .keys()
        .tuple_combinations()
        .filter(|(x, y)| (pa[*x] < pa[*y]) != (pb[*x] < pb[*y]))
        .count())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vote {
    /// Candidates `1..=m`, most preferred first.
    pub order: Vec<usize>,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BriberyInstance {
    pub candidates: usize,
    pub votes: Vec<Vote>,
    /// Points for rank 1, rank 2, ...; non-increasing.
    pub scoring: Vec<u32>,
    pub ba: u32,
    pub b: u32,
}

/// All orders of `1..=m` in lexicographic order.
pub fn voter_types(m: usize) -> Vec<Vec<usize>> {
    (1..=m).permutations(m).collect()
}

impl BriberyInstance {
    pub fn validate(&self) -> Result<()> {
        let m = self.candidates;
        if m == 0 {
            return Err(Error::Argument("at least one candidate is required".into()));
        }
        if self.scoring.len() != m {
            return Err(Error::Argument(format!(
                "scoring has {} entries for {m} candidates",
                self.scoring.len()
            )));
        }
        if self.scoring.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Argument("scoring must be non-increasing".into()));
        }
        let reference: Vec<usize> = (1..=m).collect();
        for (i, v) in self.votes.iter().enumerate() {
            if v.order.iter().copied().sorted().ne(reference.iter().copied()) {
                return Err(Error::Argument(format!(
                    "votes[{i}].order = {:?} is not an order of 1..={m}",
                    v.order
                )));
            }
        }
        Ok(())
    }

    pub fn voters(&self) -> u64 {
        self.votes.iter().map(|v| v.count as u64).sum()
    }

    /// Voters per type, indexed like [`voter_types`].
    pub fn census(&self) -> Vec<u32> {
        let types = voter_types(self.candidates);
        let mut out = vec![0; types.len()];
        for v in &self.votes {
            let t = types.iter().position(|t| *t == v.order).expect("validated order");
            out[t] += v.count;
        }
        out
    }
}

/// Score of every candidate (index 0 is candidate 1) under a type census.
pub fn scores(inst: &BriberyInstance, census: &[u32]) -> Vec<i64> {
    let mut out = vec![0i64; inst.candidates];
    for (t, order) in voter_types(inst.candidates).iter().enumerate() {
        for (rank, c) in order.iter().enumerate() {
            out[c - 1] += census[t] as i64 * inst.scoring[rank] as i64;
        }
    }
    out
}

fn label(order: &[usize]) -> String {
    order.iter().join("")
}

fn label_sep(order: &[usize]) -> String {
    if order.iter().all(|c| *c < 10) {
        label(order)
    } else {
        order.iter().join(".")
    }
}

pub fn z_name(from: &[usize], to: &[usize]) -> String {
    format!("z[{}>{}]", label_sep(from), label_sep(to))
}

pub fn y_name(t: &[usize]) -> String {
    format!("y[{}]", label_sep(t))
}

pub fn x_name(from: &[usize], to: &[usize]) -> String {
    format!("x[{}>{}]", label_sep(from), label_sep(to))
}

pub fn w_name(t: &[usize]) -> String {
    format!("w[{}]", label_sep(t))
}

#[derive(Debug, Clone)]
pub struct BriberyBudget {
    pub max_candidates: usize,
}

impl Default for BriberyBudget {
    fn default() -> Self {
        BriberyBudget { max_candidates: 4 }
    }
}

pub fn encode(inst: &BriberyInstance) -> Result<ResiliencySystem> {
    encode_with(inst, &BriberyBudget::default())
}

pub fn encode_with(inst: &BriberyInstance, limits: &BriberyBudget) -> Result<ResiliencySystem> {
    inst.validate()?;
    budget("max-candidates", limits.max_candidates as u64, inst.candidates as u64)?;
    let types = voter_types(inst.candidates);
    let census = inst.census();
    let total = inst.voters() as i64;
    let q = types.len();
    let int = |v: i64| Rational::from_int(v);
    let one = Rational::ONE;
    let mut price = vec![vec![0i64; q]; q];
    for a in 0..q {
        for b in 0..q {
            price[a][b] = kendall(&types[a], &types[b])? as i64;
        }
    }

    let mut sys = ResiliencySystem::new();
    let mut z: Vec<Vec<VarId>> = Vec::with_capacity(q);
    for a in 0..q {
        z.push(
            (0..q)
                .map(|b| sys.add_z(z_name(&types[a], &types[b]), VarBounds::new(0, census[a] as i64)))
                .collect::<Result<_>>()?,
        );
    }
    let y = types
        .iter()
        .map(|t| sys.add_z(y_name(t), VarBounds::new(0, total)))
        .collect::<Result<Vec<_>>>()?;
    let mut x: Vec<Vec<VarId>> = Vec::with_capacity(q);
    for a in 0..q {
        x.push(
            (0..q)
                .map(|b| sys.add_x(x_name(&types[a], &types[b]), VarBounds::new(0, total)))
                .collect::<Result<_>>()?,
        );
    }
    let w = types
        .iter()
        .map(|t| sys.add_x(w_name(t), VarBounds::new(0, total)))
        .collect::<Result<Vec<_>>>()?;

    // adversary: every voter ends somewhere, arrivals form y, cost within ba
    for a in 0..q {
        let terms = (0..q).map(|b| (z[a][b], one));
        sys.add_row(Block::Z, LinearRow::eq(terms, int(census[a] as i64)))?;
    }
    for b in 0..q {
        let terms = (0..q).map(|a| (z[a][b], one)).chain([(y[b], -one)]);
        sys.add_row(Block::Z, LinearRow::eq(terms, Rational::ZERO))?;
    }
    let cost = (0..q).flat_map(|a| (0..q).map(move |b| (a, b)));
    sys.add_row(
        Block::Z,
        LinearRow::leq(cost.clone().map(|(a, b)| (z[a][b], int(price[a][b]))), int(inst.ba as i64)),
    )?;

    // our response starts from y
    for a in 0..q {
        let terms = (0..q).map(|b| (x[a][b], one)).chain([(y[a], -one)]);
        sys.add_row(Block::Xz, LinearRow::eq(terms, Rational::ZERO))?;
    }
    for b in 0..q {
        let terms = (0..q).map(|a| (x[a][b], one)).chain([(w[b], -one)]);
        sys.add_row(Block::X, LinearRow::eq(terms, Rational::ZERO))?;
    }
    sys.add_row(
        Block::X,
        LinearRow::leq(cost.map(|(a, b)| (x[a][b], int(price[a][b]))), int(inst.b as i64)),
    )?;
    // score(c_1) >= score(c_j) + 1
    let points = |t: usize, c: usize| {
        let rank = types[t].iter().position(|v| *v == c).expect("permutation");
        inst.scoring[rank] as i64
    };
    for rival in 2..=inst.candidates {
        let terms = (0..q).map(|t| (w[t], int(points(t, rival) - points(t, 1))));
        sys.add_row(Block::X, LinearRow::leq(terms, int(-1)))?;
    }
    Ok(sys)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Adversary,
    Ours,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transfer {
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    pub count: u32,
}

/// Type-to-type moves of one bribery, omitting voters that stay put.
///
/// `flow` must hold the side's transfer variables and both of its censuses:
/// the adversary moves the original census to `y`, ours moves `y` to `w`.
type EdgeName = fn(&[usize], &[usize]) -> String;

pub fn decode_bribery(inst: &BriberyInstance, side: Side, flow: &IntAssignment) -> Result<Vec<Transfer>> {
    inst.validate()?;
    let types = voter_types(inst.candidates);
    let q = types.len();
    let fetch = |name: String| -> Result<i64> {
        flow.get(&name)
            .ok_or_else(|| Error::Scenario(format!("missing {name}")))
    };
    let census = inst.census();
    let (edge, budget): (EdgeName, u32) = match side {
        Side::Adversary => (z_name, inst.ba),
        Side::Ours => (x_name, inst.b),
    };
    let mut moves = vec![vec![0i64; q]; q];
    for a in 0..q {
        for b in 0..q {
            moves[a][b] = fetch(edge(&types[a], &types[b]))?;
            if moves[a][b] < 0 {
                return Err(Error::Scenario(format!("{} is negative", edge(&types[a], &types[b]))));
            }
        }
    }
    let (before, after): (Vec<i64>, Vec<i64>) = match side {
        Side::Adversary => (
            census.iter().map(|c| *c as i64).collect(),
            types.iter().map(|t| fetch(y_name(t))).collect::<Result<_>>()?,
        ),
        Side::Ours => (
            types.iter().map(|t| fetch(y_name(t))).collect::<Result<_>>()?,
            types.iter().map(|t| fetch(w_name(t))).collect::<Result<_>>()?,
        ),
    };
    let mut cost = 0i64;
    let mut plan = Vec::new();
    for a in 0..q {
        let out: i64 = moves[a].iter().sum();
        let inflow: i64 = (0..q).map(|c| moves[c][a]).sum();
        if out != before[a] || inflow != after[a] {
            return Err(Error::Scenario(format!(
                "{side:?} flow does not match the censuses at type {}",
                label(&types[a])
            )));
        }
        for b in 0..q {
            cost += moves[a][b] * kendall(&types[a], &types[b])? as i64;
            if a != b && moves[a][b] > 0 {
                plan.push(Transfer {
                    from: types[a].clone(),
                    to: types[b].clone(),
                    count: moves[a][b] as u32,
                });
            }
        }
    }
    if cost > budget as i64 {
        return Err(Error::Scenario(format!("{side:?} bribery costs {cost} > {budget}")));
    }
    Ok(plan)
}

/// The census reached after applying `plan` to `census`.
pub fn apply_plan(inst: &BriberyInstance, census: &[u32], plan: &[Transfer]) -> Option<Vec<u32>> {
    let types = voter_types(inst.candidates);
    let mut out = census.to_vec();
    for t in plan {
        let a = types.iter().position(|o| *o == t.from)?;
        let b = types.iter().position(|o| *o == t.to)?;
        out[a] = out[a].checked_sub(t.count)?;
        out[b] += t.count;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::check_resiliency;
    use crate::ilp::Solutions;
    use proptest::prelude::*;

    fn two_vs_one(ba: u32, b: u32) -> BriberyInstance {
        BriberyInstance {
            candidates: 2,
            votes: vec![
                Vote { order: vec![1, 2], count: 2 },
                Vote { order: vec![2, 1], count: 1 },
            ],
            scoring: vec![1, 0],
            ba,
            b,
        }
    }

    /// Adjacent transpositions needed to sort `b` into `a`'s order.
    fn bubble_swaps(a: &[usize], b: &[usize]) -> usize {
        let mut seq: Vec<usize> = b.iter().map(|c| a.iter().position(|x| x == c).unwrap()).collect();
        let mut swaps = 0;
        for i in 0..seq.len() {
            for j in 0..seq.len() - 1 - i {
                if seq[j] > seq[j + 1] {
                    seq.swap(j, j + 1);
                    swaps += 1;
                }
            }
        }
        swaps
    }

    #[test]
    fn kendall_examples() {
        assert_eq!(kendall(&[1, 2, 3], &[1, 2, 3]).unwrap(), 0);
        assert_eq!(kendall(&[1, 2, 3], &[3, 2, 1]).unwrap(), 3);
        assert_eq!(kendall(&[1, 2, 3], &[2, 3, 1]).unwrap(), bubble_swaps(&[1, 2, 3], &[2, 3, 1]));
        assert_eq!(kendall(&[1, 2, 3], &[2, 3, 1]).unwrap(), 2);
        assert!(matches!(kendall(&[1, 2], &[1, 2, 3]), Err(Error::Argument(_))));
        assert!(matches!(kendall(&[1, 1], &[1, 2]), Err(Error::Argument(_))));
    }

    #[test]
    fn kendall_is_a_metric_up_to_four() {
        for m in 1..=4 {
            let all = voter_types(m);
            for a in &all {
                for b in &all {
                    let ab = kendall(a, b).unwrap();
                    assert_eq!(ab, kendall(b, a).unwrap());
                    assert_eq!(ab == 0, a == b);
                    assert_eq!(ab, bubble_swaps(a, b));
                    for c in &all {
                        assert!(kendall(a, c).unwrap() <= ab + kendall(b, c).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn encode_examples() {
        assert!(check_resiliency(&encode(&two_vs_one(0, 0)).unwrap()).unwrap().is_resilient());

        let i = two_vs_one(1, 0);
        let v = check_resiliency(&encode(&i).unwrap()).unwrap();
        assert!(!v.is_resilient());
        let plan = decode_bribery(&i, Side::Adversary, v.witness.as_ref().unwrap()).unwrap();
        assert_eq!(plan, vec![Transfer { from: vec![1, 2], to: vec![2, 1], count: 1 }]);

        assert!(check_resiliency(&encode(&two_vs_one(1, 1)).unwrap()).unwrap().is_resilient());
    }

    #[test]
    fn shape_and_budget() {
        let sys = encode(&two_vs_one(0, 0)).unwrap();
        assert_eq!(sys.z_count(), 4 + 2);
        assert_eq!(sys.x_count(), 4 + 2);
        assert_eq!(sys.rows(Block::X).len(), 2 + 1 + 1);
        let big = BriberyInstance {
            candidates: 5,
            votes: vec![],
            scoring: vec![4, 3, 2, 1, 0],
            ba: 0,
            b: 0,
        };
        assert!(matches!(encode(&big), Err(Error::Budget { .. })));
    }

    #[test]
    fn zero_voters_and_single_candidate() {
        let none = BriberyInstance { votes: vec![], ..two_vs_one(0, 0) };
        assert!(!check_resiliency(&encode(&none).unwrap()).unwrap().is_resilient());
        let alone = BriberyInstance {
            candidates: 1,
            votes: vec![],
            scoring: vec![1],
            ba: 0,
            b: 0,
        };
        assert!(check_resiliency(&encode(&alone).unwrap()).unwrap().is_resilient());
    }

    #[test]
    fn response_decodes_to_a_strict_win() {
        let i = two_vs_one(1, 1);
        let sys = encode(&i).unwrap();
        for sc in crate::engine::enumerate_scenarios(&sys).unwrap() {
            let adv = decode_bribery(&i, Side::Adversary, &sc).unwrap();
            let middle = apply_plan(&i, &i.census(), &adv).unwrap();
            let sub = sys.substitute(&sc).unwrap();
            let x = sub.assignment(&Solutions::new(&sub).unwrap().next().unwrap());
            let mut both = sc.clone();
            both.0.extend(x.0);
            let ours = decode_bribery(&i, Side::Ours, &both).unwrap();
            let end = apply_plan(&i, &middle, &ours).unwrap();
            let s = scores(&i, &end);
            assert!(s[1..].iter().all(|r| s[0] > *r));
        }
    }

    #[test]
    fn identity_flow_is_an_empty_plan() {
        let i = two_vs_one(0, 0);
        let sc = crate::engine::enumerate_scenarios(&encode(&i).unwrap()).unwrap().next().unwrap();
        assert!(decode_bribery(&i, Side::Adversary, &sc).unwrap().is_empty());
    }

    #[test]
    fn validation() {
        let mut bad = two_vs_one(0, 0);
        bad.votes[0].order = vec![1, 1];
        assert!(matches!(encode(&bad), Err(Error::Argument(_))));
        let mut bad = two_vs_one(0, 0);
        bad.scoring = vec![0, 1];
        assert!(matches!(encode(&bad), Err(Error::Argument(_))));
    }

    proptest! {
        #[test]
        fn kendall_counts_adjacent_swaps(perm in Just((1..=6).collect::<Vec<usize>>()).prop_shuffle()) {
            let id: Vec<usize> = (1..=6).collect();
            prop_assert_eq!(kendall(&id, &perm).unwrap(), bubble_swaps(&id, &perm));
        }
    }
}
