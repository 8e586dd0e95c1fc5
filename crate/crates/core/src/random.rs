//! Seeded generators of small random instances.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

use crate::bribery::{BriberyInstance, Vote};
use crate::closest_string::{normalize, Alphabet, RcsInstance, StringMatrix};
use crate::engine::{Block, ResiliencySystem};
use crate::ilp::{LinearRow, Relation, VarBounds, VarId};
use crate::rational::Rational;
use crate::rdscp::{HittingSetInstance, MatchingInstance, RdscpInstance};
use crate::scheduling::SchedulingInstance;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct SystemShape {
    pub max_x: usize,
    pub max_z: usize,
    pub box_max: i64,
    pub coeff: i64,
    pub max_rows: usize,
}

impl Default for SystemShape {
    fn default() -> Self {
        SystemShape {
            max_x: 3,
            max_z: 3,
            box_max: 3,
            coeff: 3,
            max_rows: 4,
        }
    }
}

fn random_row(rng: &mut Rng64, must: &[VarId], may: &[VarId], coeff: i64) -> LinearRow {
    let mut terms: Vec<(VarId, Rational)> = Vec::new();
    for v in must {
        let c = loop {
            let c = rng.gen_range(-coeff..=coeff);
            if c != 0 {
                break c;
            }
        };
        terms.push((*v, Rational::from_int(c)));
    }
    for v in may {
        if !must.contains(v) && rng.gen_bool(0.5) {
            terms.push((*v, Rational::from_int(rng.gen_range(-coeff..=coeff))));
        }
    }
    let relation = if rng.gen_bool(0.2) { Relation::Eq } else { Relation::Leq };
    let rhs = Rational::from_int(rng.gen_range(-2..=2 * coeff));
    LinearRow::new(terms, relation, rhs)
}

/// Systems with at most `max_x` x-vars and `max_z` z-vars, boxes inside
/// `[0, box_max]`, integer coefficients in `[-coeff, coeff]`, and at most
/// `max_rows` rows per block.
pub fn system(rng: &mut Rng64, shape: &SystemShape) -> ResiliencySystem {
    let mut sys = ResiliencySystem::new();
    let bounds = |rng: &mut Rng64| {
        let l = rng.gen_range(0..=shape.box_max);
        let u = rng.gen_range(l..=shape.box_max);
        VarBounds::new(l, u)
    };
    let nx = rng.gen_range(1..=shape.max_x);
    let nz = rng.gen_range(1..=shape.max_z);
    let xs: Vec<VarId> = (0..nx)
        .map(|i| sys.add_x(format!("x{i}"), bounds(rng)).expect("fresh name"))
        .collect();
    let zs: Vec<VarId> = (0..nz)
        .map(|i| sys.add_z(format!("z{i}"), bounds(rng)).expect("fresh name"))
        .collect();
    let both: Vec<VarId> = xs.iter().chain(&zs).copied().collect();
    for block in [Block::X, Block::Xz, Block::Z] {
        for _ in 0..rng.gen_range(0..=shape.max_rows) {
            let row = match block {
                Block::X => {
                    let must = [*xs.choose(rng).unwrap()];
                    random_row(rng, &must, &xs, shape.coeff)
                }
                Block::Z => {
                    let must = [*zs.choose(rng).unwrap()];
                    random_row(rng, &must, &zs, shape.coeff)
                }
                Block::Xz => {
                    let must = [*xs.choose(rng).unwrap(), *zs.choose(rng).unwrap()];
                    random_row(rng, &must, &both, shape.coeff)
                }
            };
            sys.add_row(block, row).expect("row matches its block");
        }
    }
    sys
}

fn random_subset(rng: &mut Rng64, n: usize) -> Vec<usize> {
    (1..=n).filter(|_| rng.gen_bool(0.5)).collect()
}

/// `n <= 3`, `m <= 5`, `s <= 2`, `d <= 2`, `t <= 3`.
pub fn rdscp(rng: &mut Rng64) -> RdscpInstance {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=5);
    let mut family: Vec<Vec<usize>> = Vec::with_capacity(m);
    while family.len() < m {
        // duplicates are useful: they exercise multiplicities
        if !family.is_empty() && rng.gen_bool(0.25) {
            let copy = family.choose(rng).unwrap().clone();
            family.push(copy);
        } else {
            family.push(random_subset(rng, n));
        }
    }
    RdscpInstance {
        n,
        family,
        s: rng.gen_range(0..=2),
        d: rng.gen_range(1..=2),
        t: rng.gen_range(1..=3),
    }
}

/// Graph-like hitting set: `n <= 4`, at most 4 distinct pairs, `k <= 2`.
pub fn hitting_set(rng: &mut Rng64) -> HittingSetInstance {
    let n = rng.gen_range(2..=4);
    let mut pairs: Vec<Vec<usize>> = (1..=n)
        .flat_map(|a| ((a + 1)..=n).map(move |b| vec![a, b]))
        .collect();
    pairs.shuffle(rng);
    pairs.truncate(rng.gen_range(0..=4));
    pairs.sort();
    HittingSetInstance {
        n,
        sets: pairs,
        k: rng.gen_range(0..=2),
        delta: Some(2),
    }
}

/// `n <= 2`, at most 4 distinct triples, `1 <= k <= 2`.
pub fn matching(rng: &mut Rng64) -> MatchingInstance {
    let n = rng.gen_range(1..=2);
    let mut triples: Vec<[usize; 3]> = Vec::new();
    for a in 1..=n {
        for b in 1..=n {
            for c in 1..=n {
                triples.push([a, b, c]);
            }
        }
    }
    triples.shuffle(rng);
    triples.truncate(rng.gen_range(1..=4));
    triples.sort();
    MatchingInstance {
        n,
        triples,
        k: rng.gen_range(1..=2),
    }
}

/// Binary alphabet, `k <= 3` rows of length `L <= 3`, `d <= 2`, `m <= 2`.
pub fn rcs(rng: &mut Rng64) -> RcsInstance {
    let k = rng.gen_range(1..=3);
    let len = rng.gen_range(1..=3);
    let rows: Vec<Vec<usize>> = (0..k)
        .map(|_| (0..len).map(|_| rng.gen_range(0..2)).collect())
        .collect();
    let (matrix, _) = normalize(&StringMatrix::from_indices(rows).expect("non-empty"), 2);
    let m = rng.gen_range(0..=2.min(k * len));
    RcsInstance::new(
        Alphabet::new(vec!['a', 'b']).expect("distinct"),
        matrix,
        rng.gen_range(0..=2),
        m,
    )
    .expect("normalized matrix")
}

/// A random binary matrix with `k <= 3` rows and `L <= 4` columns.
pub fn matrix(rng: &mut Rng64) -> StringMatrix {
    let k = rng.gen_range(1..=3);
    let len = rng.gen_range(1..=4);
    let rows = (0..k)
        .map(|_| (0..len).map(|_| rng.gen_range(0..2)).collect())
        .collect();
    StringMatrix::from_indices(rows).expect("non-empty")
}

/// `m <= 3` machines, at most 2 types, `n_t <= 4`, `p <= 3`, `K <= 3`,
/// `Cmax <= 8`.
pub fn scheduling(rng: &mut Rng64) -> SchedulingInstance {
    let machines = rng.gen_range(1..=3);
    let types = rng.gen_range(1..=2);
    SchedulingInstance {
        machines,
        ptimes: (0..types)
            .map(|_| (0..machines).map(|_| rng.gen_range(0..=3)).collect())
            .collect(),
        counts: (0..types).map(|_| rng.gen_range(0..=4)).collect(),
        k: rng.gen_range(0..=3),
        cmax: rng.gen_range(0..=8),
    }
}

/// `m <= 3` candidates, at most 4 voters, budgets at most 2, plurality or
/// Borda scoring.
pub fn bribery(rng: &mut Rng64) -> BriberyInstance {
    let m = rng.gen_range(2..=3);
    let mut votes: Vec<Vote> = Vec::new();
    for _ in 0..rng.gen_range(0..=4) {
        let mut order: Vec<usize> = (1..=m).collect();
        order.shuffle(rng);
        match votes.iter_mut().find(|v| v.order == order) {
            Some(v) => v.count += 1,
            None => votes.push(Vote { order, count: 1 }),
        }
    }
    let scoring = if rng.gen_bool(0.5) {
        (0..m).map(|r| u32::from(r == 0)).collect()
    } else {
        (0..m).map(|r| (m - 1 - r) as u32).collect()
    };
    BriberyInstance {
        candidates: m,
        votes,
        scoring,
        ba: rng.gen_range(0..=2),
        b: rng.gen_range(0..=2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generators_repeat() {
        let a = system(&mut rng(7), &SystemShape::default());
        let b = system(&mut rng(7), &SystemShape::default());
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(rdscp(&mut rng(3)), rdscp(&mut rng(3)));
        assert_eq!(bribery(&mut rng(3)), bribery(&mut rng(3)));
    }

    #[test]
    fn generated_instances_are_valid() {
        let mut r = rng(11);
        for _ in 0..50 {
            rdscp(&mut r).validate().unwrap();
            hitting_set(&mut r).uniformity().unwrap();
            matching(&mut r).validate().unwrap();
            scheduling(&mut r).validate().unwrap();
            bribery(&mut r).validate().unwrap();
            rcs(&mut r);
            let s = system(&mut r, &SystemShape::default());
            assert!(s.x_count() <= 3 && s.z_count() <= 3);
        }
    }
}
