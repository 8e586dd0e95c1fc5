use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::system::ResiliencySystem;
use crate::error::{budget, Result};
use crate::ilp::{IntAssignment, LinearSystem, Solutions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Resilient,
    NotResilient,
}

/// Result of a resiliency check. `witness` is present exactly when the
/// outcome is [`Outcome::NotResilient`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResiliencyVerdict {
    pub outcome: Outcome,
    pub witness: Option<IntAssignment>,
    pub scenarios_checked: u64,
}

impl ResiliencyVerdict {
    pub fn is_resilient(&self) -> bool {
        self.outcome == Outcome::Resilient
    }
}

impl Serialize for ResiliencyVerdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ResiliencyVerdict", 3)?;
        s.serialize_field("resilient", &self.is_resilient())?;
        s.serialize_field("scenarios_checked", &self.scenarios_checked)?;
        s.serialize_field("witness", &self.witness)?;
        s.end()
    }
}

#[derive(Debug, Clone, Default)]
pub struct EngineOptions {
    /// Refuse to examine more than this many scenarios.
    pub max_scenarios: Option<u64>,
}

/// Admissible z-assignments, lexicographic in z-variable order.
pub struct Scenarios {
    zsys: LinearSystem,
    inner: Solutions,
}

impl Scenarios {
    fn next_values(&mut self) -> Option<Vec<i64>> {
        self.inner.next()
    }
}

impl Iterator for Scenarios {
    type Item = IntAssignment;

    fn next(&mut self) -> Option<IntAssignment> {
        let values = self.inner.next()?;
        Some(self.zsys.assignment(&values))
    }
}

pub fn enumerate_scenarios(system: &ResiliencySystem) -> Result<Scenarios> {
    let zsys = system.z_system();
    let inner = Solutions::new(&zsys)?;
    Ok(Scenarios { zsys, inner })
}

pub fn substitute(system: &ResiliencySystem, scenario: &IntAssignment) -> Result<LinearSystem> {
    system.substitute(scenario)
}

pub fn check_resiliency(system: &ResiliencySystem) -> Result<ResiliencyVerdict> {
    check_resiliency_with(system, &EngineOptions::default())
}

/// Stops at the first scenario (in lexicographic order) whose x-system has no
/// integer solution.
pub fn check_resiliency_with(
    system: &ResiliencySystem,
    options: &EngineOptions,
) -> Result<ResiliencyVerdict> {
    let mut scenarios = enumerate_scenarios(system)?;
    let mut checked = 0u64;
    while let Some(zvals) = scenarios.next_values() {
        checked += 1;
        if let Some(limit) = options.max_scenarios {
            budget("max-scenarios", limit, checked)?;
        }
        let xsys = system.substitute_values(&zvals);
        if Solutions::new(&xsys)?.next().is_none() {
            return Ok(ResiliencyVerdict {
                outcome: Outcome::NotResilient,
                witness: Some(scenarios.zsys.assignment(&zvals)),
                scenarios_checked: checked,
            });
        }
    }
    // x boxes are validated even when the scenario set is empty.
    Solutions::new(&system.substitute_values(&vec![0; system.z_count()]))?;
    Ok(ResiliencyVerdict {
        outcome: Outcome::Resilient,
        witness: None,
        scenarios_checked: checked,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExhaustiveReport {
    pub failing: Vec<IntAssignment>,
    pub scenarios_checked: u64,
}

/// Every failing scenario, in lexicographic order.
pub fn failing_scenarios(
    system: &ResiliencySystem,
    options: &EngineOptions,
) -> Result<ExhaustiveReport> {
    let mut scenarios = enumerate_scenarios(system)?;
    let mut failing = Vec::new();
    let mut checked = 0u64;
    while let Some(zvals) = scenarios.next_values() {
        checked += 1;
        if let Some(limit) = options.max_scenarios {
            budget("max-scenarios", limit, checked)?;
        }
        if Solutions::new(&system.substitute_values(&zvals))?.next().is_none() {
            failing.push(scenarios.zsys.assignment(&zvals));
        }
    }
    Ok(ExhaustiveReport {
        failing,
        scenarios_checked: checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Block;
    use crate::error::Error;
    use crate::ilp::{evaluate, Evaluation, LinearRow, Relation, VarBounds, VarId};
    use crate::rational::Rational;
    use proptest::prelude::*;

    fn r(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn z_values(s: &ResiliencySystem) -> Vec<Vec<i64>> {
        enumerate_scenarios(s)
            .unwrap()
            .map(|a| s.z_vars().map(|(_, v)| a.get(&v.name).unwrap()).collect())
            .collect()
    }

    #[test]
    fn scenario_filter() {
        let mut s = ResiliencySystem::new();
        let z = s.add_z("z", VarBounds::new(0, 2)).unwrap();
        s.add_row(Block::Z, LinearRow::leq([(z, r(1))], r(1))).unwrap();
        assert_eq!(z_values(&s), vec![vec![0], vec![1]]);
    }

    #[test]
    fn no_z_means_one_empty_scenario() {
        let s = ResiliencySystem::new();
        let all: Vec<_> = enumerate_scenarios(&s).unwrap().collect();
        assert_eq!(all, vec![IntAssignment::default()]);
    }

    #[test]
    fn scenarios_in_lex_order() {
        let mut s = ResiliencySystem::new();
        let a = s.add_z("z1", VarBounds::new(0, 1)).unwrap();
        let b = s.add_z("z2", VarBounds::new(0, 1)).unwrap();
        s.add_row(Block::Z, LinearRow::leq([(a, r(1)), (b, r(1))], r(1))).unwrap();
        assert_eq!(z_values(&s), vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn resilient_without_adversary() {
        let mut s = ResiliencySystem::new();
        s.add_x("x", VarBounds::new(0, 1)).unwrap();
        let v = check_resiliency(&s).unwrap();
        assert!(v.is_resilient());
        assert_eq!(v.witness, None);
        assert_eq!(v.scenarios_checked, 1);
    }

    #[test]
    fn adversary_wins() {
        let mut s = ResiliencySystem::new();
        let x = s.add_x("x", VarBounds::new(0, 0)).unwrap();
        let z = s.add_z("z", VarBounds::new(0, 1)).unwrap();
        s.add_row(Block::Xz, LinearRow::geq([(x, r(1)), (z, r(-1))], r(0))).unwrap();
        let v = check_resiliency(&s).unwrap();
        assert_eq!(v.outcome, Outcome::NotResilient);
        assert_eq!(v.witness.unwrap().get("z"), Some(1));
        assert_eq!(v.scenarios_checked, 2);
    }

    #[test]
    fn empty_adversary_domain_is_vacuously_resilient() {
        let mut s = ResiliencySystem::new();
        let x = s.add_x("x", VarBounds::new(0, 0)).unwrap();
        let z = s.add_z("z", VarBounds::new(0, 1)).unwrap();
        s.add_row(Block::Z, LinearRow::leq([(z, r(1))], r(-1))).unwrap();
        s.add_row(Block::X, LinearRow::geq([(x, r(1))], r(5))).unwrap();
        let v = check_resiliency(&s).unwrap();
        assert!(v.is_resilient());
        assert_eq!(v.scenarios_checked, 0);
    }

    #[test]
    fn unbounded_x_propagates() {
        let mut s = ResiliencySystem::new();
        s.add_x("x", VarBounds { lower: None, upper: Some(3) }).unwrap();
        assert_eq!(check_resiliency(&s).unwrap_err(), Error::UnboundedVar("x".into()));
    }

    #[test]
    fn scenario_budget() {
        let mut s = ResiliencySystem::new();
        s.add_z("z", VarBounds::new(0, 9)).unwrap();
        let opts = EngineOptions { max_scenarios: Some(5) };
        assert!(matches!(check_resiliency_with(&s, &opts), Err(Error::Budget { .. })));
    }

    #[test]
    fn exhaustive_lists_every_failure() {
        let mut s = ResiliencySystem::new();
        let x = s.add_x("x", VarBounds::new(0, 1)).unwrap();
        let z = s.add_z("z", VarBounds::new(0, 3)).unwrap();
        s.add_row(Block::Xz, LinearRow::geq([(x, r(1)), (z, r(-1))], r(0))).unwrap();
        let rep = failing_scenarios(&s, &EngineOptions::default()).unwrap();
        assert_eq!(rep.scenarios_checked, 4);
        let zs: Vec<i64> = rep.failing.iter().map(|a| a.get("z").unwrap()).collect();
        assert_eq!(zs, vec![2, 3]);
    }

    // Plain double loop over both boxes; shares nothing with the engine.
    fn double_loop(s: &ResiliencySystem) -> bool {
        let flat = s.flattened();
        let boxes: Vec<(i64, i64)> = s.vars().iter().map(|v| v.bounds.finite().unwrap()).collect();
        let zs: Vec<usize> = s.z_vars().map(|(v, _)| v.0).collect();
        let xs: Vec<usize> = s.x_vars().map(|(v, _)| v.0).collect();
        let zrows = s.rows(Block::Z);
        let mut values: Vec<i64> = boxes.iter().map(|b| b.0).collect();
        fn each(ids: &[usize], boxes: &[(i64, i64)], values: &mut Vec<i64>, f: &mut dyn FnMut(&mut Vec<i64>) -> bool) -> bool {
            match ids.split_first() {
                None => f(values),
                Some((&i, rest)) => {
                    for v in boxes[i].0..=boxes[i].1 {
                        values[i] = v;
                        if !each(rest, boxes, values, f) {
                            return false;
                        }
                    }
                    true
                }
            }
        }
        each(&zs, &boxes, &mut values, &mut |vals| {
            if !zrows.iter().all(|r| r.holds(vals)) {
                return true;
            }
            let mut found = false;
            each(&xs, &boxes, vals, &mut |full| {
                if flat.rows().iter().all(|r| r.holds(full)) {
                    found = true;
                    return false;
                }
                true
            });
            found
        })
    }

    fn arb_resiliency() -> impl Strategy<Value = ResiliencySystem> {
        (1usize..=3, 0usize..=2).prop_flat_map(|(nx, nz)| {
            let n = nx + nz;
            let boxes = prop::collection::vec((0i64..=2, 0i64..=2), n);
            let row = (prop::collection::vec(-2i64..=2, n), prop::bool::ANY, -3i64..=5);
            (
                Just((nx, nz)),
                boxes,
                prop::collection::vec(row.clone(), 0..=3),
                prop::collection::vec(row.clone(), 0..=3),
                prop::collection::vec(row, 0..=2),
            )
        })
        .prop_map(|((nx, _), boxes, rx, rxz, rz)| {
            let mut s = ResiliencySystem::new();
            for (i, (lo, w)) in boxes.iter().enumerate() {
                let b = VarBounds::new(*lo, (lo + w).min(2));
                if i < nx {
                    s.add_x(format!("x{i}"), b).unwrap();
                } else {
                    s.add_z(format!("z{}", i - nx), b).unwrap();
                }
            }
            let mk = |(coeffs, eq, rhs): &(Vec<i64>, bool, i64), keep: &dyn Fn(usize) -> bool| {
                let terms = coeffs.iter().enumerate().filter(|(i, _)| keep(*i)).map(|(i, c)| (VarId(i), r(*c)));
                LinearRow::new(terms, if *eq { Relation::Eq } else { Relation::Leq }, r(*rhs))
            };
            for row in &rx {
                s.add_row(Block::X, mk(row, &|i| i < nx)).unwrap();
            }
            for row in &rxz {
                s.add_row(Block::Xz, mk(row, &|_| true)).unwrap();
            }
            for row in &rz {
                s.add_row(Block::Z, mk(row, &|i| i >= nx)).unwrap();
            }
            s
        })
    }

    proptest! {
        #[test]
        fn matches_double_loop(s in arb_resiliency()) {
            prop_assert_eq!(check_resiliency(&s).unwrap().is_resilient(), double_loop(&s));
        }

        #[test]
        fn witnesses_are_sound(s in arb_resiliency()) {
            let v = check_resiliency(&s).unwrap();
            if let Some(w) = v.witness {
                prop_assert_eq!(evaluate(&s.z_system(), &w).unwrap(), Evaluation::Satisfies);
                let sub = substitute(&s, &w).unwrap();
                prop_assert!(Solutions::new(&sub).unwrap().next().is_none());
            } else {
                prop_assert_eq!(v.scenarios_checked, enumerate_scenarios(&s).unwrap().count() as u64);
            }
        }

        #[test]
        fn extra_z_row_never_breaks_resilience(s in arb_resiliency(), coeffs in prop::collection::vec(-2i64..=2, 2), rhs in -2i64..=3) {
            prop_assume!(s.z_count() > 0);
            if check_resiliency(&s).unwrap().is_resilient() {
                let mut t = s.clone();
                let terms: Vec<_> = t.z_vars().map(|(v, _)| v).zip(&coeffs).map(|(v, c)| (v, r(*c))).collect();
                t.add_row(Block::Z, LinearRow::leq(terms, r(rhs))).unwrap();
                prop_assert!(check_resiliency(&t).unwrap().is_resilient());
            }
        }

        #[test]
        fn dropping_an_x_row_never_breaks_resilience(s in arb_resiliency(), pick in 0usize..8) {
            if check_resiliency(&s).unwrap().is_resilient() {
                let mut t = ResiliencySystem::new();
                for (id, v) in s.vars().iter().enumerate() {
                    if s.is_z(VarId(id)) { t.add_z(v.name.clone(), v.bounds).unwrap(); } else { t.add_x(v.name.clone(), v.bounds).unwrap(); }
                }
                for (i, (b, row)) in s.tagged_rows().enumerate() {
                    if i == pick && b != Block::Z { continue; }
                    t.add_row(b, row.clone()).unwrap();
                }
                prop_assert!(check_resiliency(&t).unwrap().is_resilient());
            }
        }
    }
}
