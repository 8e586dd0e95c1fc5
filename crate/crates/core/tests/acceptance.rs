//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use resiliency_core::bribery::{self, kendall, voter_types};
use resiliency_core::closest_string::{self, column_types, is_normalized_column, normalize};
use resiliency_core::engine::check_resiliency;
use resiliency_core::ilp::{evaluate, solve_feasibility, Evaluation};
use resiliency_core::oracles::{
    bribery_oracle, closest_string_oracle, exists_by_enumeration, forall_exists_oracle,
    hitting_set_oracle, matching_3dm_oracle, rcs_oracle, rdscp_oracle, rdscp_packing_exists,
    sched_oracle,
};
use resiliency_core::random::{self, SystemShape};
use resiliency_core::rdscp::{self, gen_from_3dm, gen_from_hitting_set};
use resiliency_core::scheduling;
use resiliency_core::{IntAssignment, ResiliencySystem};

/// Node cap for the propagation-free enumeration used on witnesses.
const ENUMERATION_NODES: u64 = 2_000_000_000;

type Outcome = Result<String, String>;

struct Witness {
    suite: &'static str,
    system: ResiliencySystem,
    scenario: IntAssignment,
}

#[derive(Default)]
struct Collected {
    witnesses: Vec<Witness>,
    monotone_checks: usize,
    monotone_failures: Vec<String>,
}

impl Collected {
    fn witness(&mut self, suite: &'static str, system: ResiliencySystem, verdict_witness: Option<IntAssignment>) {
        if let Some(scenario) = verdict_witness {
            self.witnesses.push(Witness { suite, system, scenario });
        }
    }

    fn monotone(&mut self, holds: bool, what: String) {
        self.monotone_checks += 1;
        if !holds {
            self.monotone_failures.push(what);
        }
    }
}

fn resilient(sys: &ResiliencySystem) -> Result<(bool, Option<IntAssignment>), String> {
    let v = check_resiliency(sys).map_err(|e| e.to_string())?;
    Ok((v.is_resilient(), v.witness))
}

fn tally(yes: usize, total: usize) -> String {
    format!("yes={yes} no={}", total - yes)
}

fn criterion_1(out: &mut Collected) -> Outcome {
    let start = Instant::now();
    let mut r = random::rng(0xA1);
    let mut yes = 0;
    for i in 0..200 {
        let sys = random::system(&mut r, &SystemShape::default());
        let (engine, witness) = resilient(&sys)?;
        let oracle = forall_exists_oracle(&sys).map_err(|e| e.to_string())?;
        if engine != oracle {
            return Err(format!("instance {i}: engine {engine}, oracle {oracle}"));
        }
        yes += engine as usize;
        out.witness("systems", sys, witness);
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(120) {
        return Err(format!("took {elapsed:?}, limit 120 s"));
    }
    Ok(format!("200/200 agree ({}), {:.2} s < 120 s", tally(yes, 200), elapsed.as_secs_f64()))
}

fn criterion_2(out: &mut Collected) -> Outcome {
    let mut r = random::rng(0xA2);
    let mut yes = 0;
    let mut killed = 0;
    for i in 0..100 {
        let inst = random::rdscp(&mut r);
        let sys = rdscp::encode(&inst).map_err(|e| e.to_string())?;
        let (engine, witness) = resilient(&sys)?;
        let oracle = rdscp_oracle(&inst).map_err(|e| e.to_string())?;
        if engine != oracle {
            return Err(format!("instance {i} {inst:?}: engine {engine}, oracle {oracle}"));
        }
        if let Some(w) = &witness {
            let removed = rdscp::decode_scenario(&inst, w).map_err(|e| e.to_string())?;
            if removed.len() > inst.s {
                return Err(format!("instance {i}: witness removes {} > s", removed.len()));
            }
            if rdscp_packing_exists(&inst, &removed).map_err(|e| e.to_string())? {
                return Err(format!("instance {i}: packing survives witness {removed:?}"));
            }
            killed += 1;
        }
        if engine {
            yes += 1;
            if inst.s > 0 {
                let smaller = rdscp::RdscpInstance { s: inst.s - 1, ..inst.clone() };
                let sys = rdscp::encode(&smaller).map_err(|e| e.to_string())?;
                out.monotone(resilient(&sys)?.0, format!("rdscp {i} at s-1"));
            }
        }
        out.witness("rdscp", sys, witness);
    }
    Ok(format!("100/100 agree ({}), {killed} witnesses kill every packing", tally(yes, 100)))
}

fn criterion_3() -> Outcome {
    let mut r = random::rng(0xA3);
    let mut hit = 0;
    for i in 0..50 {
        let hs = random::hitting_set(&mut r);
        let gen = gen_from_hitting_set(&hs).map_err(|e| e.to_string())?;
        let covers = rdscp_oracle(&gen).map_err(|e| e.to_string())?;
        let hits = hitting_set_oracle(&hs).map_err(|e| e.to_string())?;
        if covers == hits {
            return Err(format!("instance {i} {hs:?}: rdscp {covers}, hitting set {hits}"));
        }
        hit += hits as usize;
    }
    Ok(format!("50/50 satisfy rdscp = not hitting-set (hitting set exists in {hit})"))
}

fn criterion_4() -> Outcome {
    let mut r = random::rng(0xA4);
    let mut matched = 0;
    for i in 0..50 {
        let mi = random::matching(&mut r);
        let gen = gen_from_3dm(&mi).map_err(|e| e.to_string())?;
        let covers = rdscp_oracle(&gen).map_err(|e| e.to_string())?;
        let matches = matching_3dm_oracle(&mi).map_err(|e| e.to_string())?;
        if covers != matches {
            return Err(format!("instance {i} {mi:?}: rdscp {covers}, matching {matches}"));
        }
        matched += matches as usize;
    }
    Ok(format!("50/50 satisfy rdscp = matching >= k (matching exists in {matched})"))
}

fn criterion_5(out: &mut Collected) -> Outcome {
    let mut r = random::rng(0xA5);
    let mut yes = 0;
    let mut plain = 0;
    for i in 0..100 {
        let inst = random::rcs(&mut r);
        let sys = closest_string::encode(&inst).map_err(|e| e.to_string())?;
        let (engine, witness) = resilient(&sys)?;
        let oracle = rcs_oracle(&inst).map_err(|e| e.to_string())?;
        if engine != oracle {
            return Err(format!("instance {i} {:?}: engine {engine}, oracle {oracle}", inst.to_doc()));
        }
        if inst.m == 0 {
            plain += 1;
            let cs = closest_string_oracle(inst.matrix.rows(), 2, inst.d).map_err(|e| e.to_string())?;
            if cs != engine {
                return Err(format!("instance {i}: m = 0 but closest string says {cs}"));
            }
        }
        if engine {
            yes += 1;
            if inst.m > 0 {
                let smaller = closest_string::RcsInstance { m: inst.m - 1, ..inst.clone() };
                let sys = closest_string::encode(&smaller).map_err(|e| e.to_string())?;
                out.monotone(resilient(&sys)?.0, format!("rcs {i} at m-1"));
            }
        }
        out.witness("rcs", sys, witness);
    }
    Ok(format!("100/100 agree ({}), {plain} with m = 0 match plain closest string", tally(yes, 100)))
}

fn criterion_6(out: &mut Collected) -> Outcome {
    let mut r = random::rng(0xA6);
    let mut yes = 0;
    for i in 0..100 {
        let inst = random::scheduling(&mut r);
        let sys = scheduling::encode(&inst).map_err(|e| e.to_string())?;
        let (engine, witness) = resilient(&sys)?;
        let oracle = sched_oracle(&inst).map_err(|e| e.to_string())?;
        if engine != oracle {
            return Err(format!("instance {i} {inst:?}: engine {engine}, oracle {oracle}"));
        }
        if engine {
            yes += 1;
            if inst.k > 0 {
                let smaller = scheduling::SchedulingInstance { k: inst.k - 1, ..inst.clone() };
                let sys = scheduling::encode(&smaller).map_err(|e| e.to_string())?;
                out.monotone(resilient(&sys)?.0, format!("sched {i} at K-1"));
            }
        }
        out.witness("sched", sys, witness);
    }
    Ok(format!("100/100 agree ({})", tally(yes, 100)))
}

fn criterion_7(out: &mut Collected) -> Outcome {
    let mut r = random::rng(0xA7);
    let mut yes = 0;
    for i in 0..60 {
        let inst = random::bribery(&mut r);
        let sys = bribery::encode(&inst).map_err(|e| e.to_string())?;
        let (engine, witness) = resilient(&sys)?;
        let oracle = bribery_oracle(&inst).map_err(|e| e.to_string())?;
        if engine != oracle {
            return Err(format!("instance {i} {inst:?}: engine {engine}, oracle {oracle}"));
        }
        if engine {
            yes += 1;
            if inst.ba > 0 {
                let weaker = bribery::BriberyInstance { ba: inst.ba - 1, ..inst.clone() };
                let sys = bribery::encode(&weaker).map_err(|e| e.to_string())?;
                out.monotone(resilient(&sys)?.0, format!("bribery {i} at Ba-1"));
            }
            let richer = bribery::BriberyInstance { b: inst.b + 1, ..inst.clone() };
            let sys = bribery::encode(&richer).map_err(|e| e.to_string())?;
            out.monotone(resilient(&sys)?.0, format!("bribery {i} at B+1"));
        }
        out.witness("bribery", sys, witness);
    }
    Ok(format!("60/60 agree ({})", tally(yes, 60)))
}

fn criterion_8(out: &Collected) -> Outcome {
    if out.monotone_failures.is_empty() {
        Ok(format!("{} shifted yes-instances stay yes, 0 violations", out.monotone_checks))
    } else {
        Err(format!("violations: {:?}", out.monotone_failures))
    }
}

fn criterion_9(out: &Collected) -> Outcome {
    let mut per_suite: std::collections::BTreeMap<&str, usize> = Default::default();
    for (i, w) in out.witnesses.iter().enumerate() {
        let tag = format!("{} witness {i}", w.suite);
        match evaluate(&w.system.z_system(), &w.scenario).map_err(|e| e.to_string())? {
            Evaluation::Satisfies => {}
            Evaluation::Violates(v) => return Err(format!("{tag} violates the z-rows: {v:?}")),
        }
        let sub = w.system.substitute(&w.scenario).map_err(|e| e.to_string())?;
        if solve_feasibility(&sub).map_err(|e| e.to_string())?.is_feasible() {
            return Err(format!("{tag}: solver finds a response"));
        }
        match exists_by_enumeration(&sub, ENUMERATION_NODES) {
            Ok(None) => {}
            Ok(Some(_)) => return Err(format!("{tag}: enumeration finds a response")),
            Err(e) => return Err(format!("{tag}: {e}")),
        }
        *per_suite.entry(w.suite).or_default() += 1;
    }
    Ok(format!("{} witnesses sound under solver and enumeration {per_suite:?}", out.witnesses.len()))
}

fn criterion_10() -> Outcome {
    let mut pairs = 0;
    for m in 1..=4 {
        let all = voter_types(m);
        for a in &all {
            for b in &all {
                let ab = kendall(a, b).map_err(|e| e.to_string())?;
                if ab != kendall(b, a).map_err(|e| e.to_string())? || (ab == 0) != (a == b) {
                    return Err(format!("kendall fails symmetry or identity at {a:?}, {b:?}"));
                }
                for c in &all {
                    if kendall(a, c).unwrap() > ab + kendall(b, c).unwrap() {
                        return Err(format!("triangle inequality fails at {a:?}, {b:?}, {c:?}"));
                    }
                }
                pairs += 1;
            }
        }
    }
    let mut r = random::rng(0xAA);
    for i in 0..200 {
        let m = random::matrix(&mut r);
        let (once, _) = normalize(&m, 2);
        let (twice, _) = normalize(&once, 2);
        if once != twice {
            return Err(format!("matrix {i}: normalize is not idempotent"));
        }
        for c in 0..m.len() {
            for a in 0..m.k() {
                for b in 0..m.k() {
                    let before = m.rows()[a][c] == m.rows()[b][c];
                    let after = once.rows()[a][c] == once.rows()[b][c];
                    if before != after {
                        return Err(format!("matrix {i}: column {c} changes its equality pattern"));
                    }
                }
            }
            if !is_normalized_column(&once.column(c), 2) {
                return Err(format!("matrix {i}: column {c} not normalized"));
            }
        }
        column_types(&once, 2).map_err(|e| e.to_string())?;
    }
    Ok(format!("kendall is a metric on {pairs} ordered pairs (m <= 4); normalize holds on 200 matrices"))
}

fn main() -> ExitCode {
    let mut collected = Collected::default();
    let mut failed = 0;
    let mut report = |id: usize, name: &str, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(detail) => println!("PASS  {id:>2} {name}: {detail} [{secs:.2} s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {id:>2} {name}: {detail} [{secs:.2} s]");
            }
        }
    };
    report(1, "engine agrees with the forall-exists oracle", &mut || criterion_1(&mut collected));
    report(2, "set cover encoding agrees with brute force", &mut || criterion_2(&mut collected));
    report(3, "hitting set generator", &mut criterion_3);
    report(4, "3-dimensional matching generator", &mut criterion_4);
    report(5, "closest string encoding agrees with brute force", &mut || criterion_5(&mut collected));
    report(6, "makespan encoding agrees with brute force", &mut || criterion_6(&mut collected));
    report(7, "bribery encoding agrees with brute force", &mut || criterion_7(&mut collected));
    report(8, "monotonicity", &mut || criterion_8(&collected));
    report(9, "witness soundness", &mut || criterion_9(&collected));
    report(10, "kendall metric and normalization", &mut criterion_10);
    if failed == 0 {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 10 criteria fail");
        ExitCode::FAILURE
    }
}
