//! Command-line front end: encode instances, check resiliency, run the
//! brute-force oracles and build reduction instances.
//!
//! Exit codes: 0 yes, 1 no, 2 error, 3 engine/oracle disagreement or a
//! decoded answer that fails validation.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use resiliency_core::bribery::{self, BriberyInstance, Side};
use resiliency_core::closest_string::{self, DistanceMode, RcsInstance, RcsOptions};
use resiliency_core::engine::{
    check_resiliency_with, enumerate_scenarios, failing_scenarios, EngineOptions,
};
use resiliency_core::ilp::{IntAssignment, Solutions};
use resiliency_core::oracles;
use resiliency_core::random::{self, SystemShape};
use resiliency_core::rdscp::{
    self, AuthorizationPolicy, HittingSetInstance, MatchingInstance, RdscpBudget, RdscpInstance,
};
use resiliency_core::scheduling::{self, SchedulingInstance};
use resiliency_core::{ResiliencySystem, ResiliencyVerdict};

/// The decision procedure `check` runs. Tests substitute their own.
pub type Engine<'a> =
    &'a dyn Fn(&ResiliencySystem, &EngineOptions) -> resiliency_core::Result<ResiliencyVerdict>;

#[derive(Parser, Debug)]
#[command(name = "resiliency", version, about = "Decide resiliency of integer linear systems and the problems they encode")]
pub struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Rdscp,
    Rcs,
    Sched,
    Bribery,
    Policy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Reduction {
    HittingSet,
    #[value(name = "3dm")]
    Matching,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RandomKind {
    System,
    Rdscp,
    Rcs,
    Sched,
    Bribery,
    HittingSet,
    #[value(name = "3dm")]
    Matching,
}

#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Problem the instance file describes.
    #[arg(long, value_enum, conflicts_with = "raw")]
    pub problem: Option<Problem>,
    /// Treat the file as a resiliency system.
    #[arg(long)]
    pub raw: bool,
    /// Instance file, or `-` for stdin.
    pub file: PathBuf,
    /// Cap on cover patterns for set cover instances.
    #[arg(long, default_value_t = 100_000)]
    pub max_patterns: usize,
    /// Bound the summed column mismatch instead of each row's distance.
    #[arg(long)]
    pub aggregate_distance: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the resiliency system an instance encodes to.
    Encode {
        #[command(flatten)]
        source: Source,
        /// Also print kappa (variables plus x-touching rows) to stderr.
        #[arg(long)]
        kappa: bool,
    },
    /// Decide an instance with the engine.
    Check {
        #[command(flatten)]
        source: Source,
        /// Also run the brute-force oracle; exit 3 if it disagrees.
        #[arg(long)]
        oracle: bool,
        /// List every failing scenario instead of stopping at the first.
        #[arg(long)]
        exhaustive: bool,
        /// Attach the witness (or a sample scenario and its answer) in the
        /// problem's own terms.
        #[arg(long)]
        decode: bool,
        /// Refuse to examine more scenarios than this.
        #[arg(long)]
        max_scenarios: Option<u64>,
    },
    /// Decide an instance by brute force only.
    Oracle {
        #[command(flatten)]
        source: Source,
    },
    /// Build a set cover instance from a hitting set or 3D matching instance.
    Gen {
        #[arg(long, value_enum)]
        reduction: Reduction,
        file: PathBuf,
        /// Check with brute force that the answers correspond.
        #[arg(long)]
        verify: bool,
    },
    /// Print a seeded random instance.
    GenRandom {
        #[arg(long, value_enum)]
        problem: RandomKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Error(anyhow::Error),
    Mismatch(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Error(e)
    }
}

impl From<resiliency_core::Error> for Failure {
    fn from(e: resiliency_core::Error) -> Self {
        Failure::Error(e.into())
    }
}

type Run<T> = std::result::Result<T, Failure>;

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    format: Format,
}

impl Io<'_> {
    fn read(&mut self, path: &PathBuf) -> anyhow::Result<String> {
        if path.as_os_str() == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).context("reading stdin")?;
            Ok(s)
        } else {
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
        }
    }

    fn emit(&mut self, value: &Value, text: impl FnOnce() -> String) -> anyhow::Result<()> {
        match self.format {
            Format::Json => writeln!(self.out, "{}", serde_json::to_string_pretty(value)?)?,
            Format::Text => write!(self.out, "{}", text())?,
        }
        Ok(())
    }

    fn note(&mut self, msg: &str) {
        let _ = writeln!(self.err, "{msg}");
    }
}

pub fn main_with_engine(args: Vec<String>, engine: Engine) -> i32 {
    let stdin = &mut std::io::stdin();
    let out = &mut std::io::stdout();
    let err = &mut std::io::stderr();
    run_with_engine(args, stdin, out, err, engine)
}

pub fn run(args: Vec<String>, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    run_with_engine(args, stdin, out, err, &check_resiliency_with)
}

pub fn run_with_engine(
    args: Vec<String>,
    stdin: &mut dyn Read,
    out: &mut dyn Write,
    err: &mut dyn Write,
    engine: Engine,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 2 } else { let _ = write!(out, "{}", e.render()); 0 };
        }
    };
    let mut io = Io { stdin, out, err, format: cli.format };
    match dispatch(cli.command, &mut io, engine) {
        Ok(code) => code,
        Err(Failure::Error(e)) => {
            io.note(&format!("error: {e:#}"));
            2
        }
        Err(Failure::Mismatch(msg)) => {
            io.note(&format!("verification failed: {msg}"));
            3
        }
    }
}

fn dispatch(command: Command, io: &mut Io, engine: Engine) -> Run<i32> {
    match command {
        Command::Encode { source, kappa } => cmd_encode(&source, kappa, io),
        Command::Check { source, oracle, exhaustive, decode, max_scenarios } => {
            let flags = CheckFlags { oracle, exhaustive, decode, max_scenarios };
            cmd_check(&source, &flags, io, engine)
        }
        Command::Oracle { source } => cmd_oracle(&source, io),
        Command::Gen { reduction, file, verify } => cmd_gen(reduction, &file, verify, io),
        Command::GenRandom { problem, seed } => cmd_gen_random(problem, seed, io),
    }
}

enum Loaded {
    Raw(ResiliencySystem),
    Rdscp(RdscpInstance),
    Policy(AuthorizationPolicy, RdscpInstance),
    Rcs(RcsInstance),
    Sched(SchedulingInstance),
    Bribery(BriberyInstance),
}

fn parse<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> anyhow::Result<T> {
    serde_json::from_str(text).with_context(|| format!("malformed {what} instance"))
}

fn load(source: &Source, io: &mut Io) -> Run<Loaded> {
    let text = io.read(&source.file)?;
    let loaded = match (source.raw, source.problem) {
        (true, _) => Loaded::Raw(ResiliencySystem::from_json(&text).context("malformed system")?),
        (false, None) => return Err(Failure::Error(anyhow!("pass --problem or --raw"))),
        (false, Some(Problem::Rdscp)) => {
            let inst: RdscpInstance = parse(&text, "rdscp")?;
            inst.validate()?;
            Loaded::Rdscp(inst)
        }
        (false, Some(Problem::Policy)) => {
            let policy: AuthorizationPolicy = parse(&text, "policy")?;
            let inst = rdscp::from_policy(&policy)?;
            Loaded::Policy(policy, inst)
        }
        (false, Some(Problem::Rcs)) => {
            let (inst, renamed) = RcsInstance::from_json(&text).context("malformed rcs instance")?;
            if !renamed.is_empty() {
                io.note(&format!("warning: normalized columns {renamed:?} by renaming symbols"));
            }
            Loaded::Rcs(inst)
        }
        (false, Some(Problem::Sched)) => {
            let inst: SchedulingInstance = parse(&text, "sched")?;
            inst.validate()?;
            Loaded::Sched(inst)
        }
        (false, Some(Problem::Bribery)) => {
            let inst: BriberyInstance = parse(&text, "bribery")?;
            inst.validate()?;
            Loaded::Bribery(inst)
        }
    };
    Ok(loaded)
}

impl Loaded {
    fn name(&self) -> &'static str {
        match self {
            Loaded::Raw(_) => "raw",
            Loaded::Rdscp(_) => "rdscp",
            Loaded::Policy(..) => "policy",
            Loaded::Rcs(_) => "rcs",
            Loaded::Sched(_) => "sched",
            Loaded::Bribery(_) => "bribery",
        }
    }

    fn encode(&self, source: &Source) -> resiliency_core::Result<ResiliencySystem> {
        let patterns = RdscpBudget { max_patterns: source.max_patterns, ..RdscpBudget::default() };
        match self {
            Loaded::Raw(sys) => Ok(sys.clone()),
            Loaded::Rdscp(inst) | Loaded::Policy(_, inst) => rdscp::encode_with(inst, &patterns),
            Loaded::Rcs(inst) => {
                let distance = if source.aggregate_distance {
                    DistanceMode::Aggregate
                } else {
                    DistanceMode::PerRow
                };
                closest_string::encode_with(inst, &RcsOptions { distance, ..RcsOptions::default() })
            }
            Loaded::Sched(inst) => scheduling::encode(inst),
            Loaded::Bribery(inst) => bribery::encode(inst),
        }
    }

    fn oracle(&self) -> resiliency_core::Result<bool> {
        match self {
            Loaded::Raw(sys) => oracles::forall_exists_oracle(sys),
            Loaded::Rdscp(inst) => oracles::rdscp_oracle(inst),
            Loaded::Policy(policy, _) => oracles::policy_oracle(policy),
            Loaded::Rcs(inst) => oracles::rcs_oracle(inst),
            Loaded::Sched(inst) => oracles::sched_oracle(inst),
            Loaded::Bribery(inst) => oracles::bribery_oracle(inst),
        }
    }

    /// The scenario in problem terms, plus the decoded answer when `response`
    /// is given. Decoded answers are re-validated from scratch.
    fn decode(&self, scenario: &IntAssignment, response: Option<&IntAssignment>) -> Run<Value> {
        let bad = |e: String| Failure::Mismatch(e);
        let value = match self {
            Loaded::Raw(_) => json!({ "scenario": scenario, "response": response }),
            Loaded::Rdscp(inst) | Loaded::Policy(_, inst) => {
                let removed = rdscp::decode_scenario(inst, scenario)?;
                let covers = match response {
                    Some(x) => {
                        let covers = rdscp::decode_solution(inst, x, &removed)?;
                        rdscp::verify_packing(inst, &removed, &covers).map_err(bad)?;
                        Some(covers)
                    }
                    None => None,
                };
                if let Loaded::Policy(policy, _) = self {
                    let user = |i: &usize| policy.users[*i].clone();
                    json!({
                        "unavailable": removed.iter().map(user).collect::<Vec<_>>(),
                        "teams": covers.map(|cs| cs.iter().map(|c| c.iter().map(user).collect::<Vec<_>>()).collect::<Vec<_>>()),
                    })
                } else {
                    json!({ "removed": removed, "covers": covers })
                }
            }
            Loaded::Rcs(inst) => {
                let modified = closest_string::decode_scenario(inst, scenario)?;
                let center = match response {
                    Some(x) => {
                        let s = closest_string::decode_solution(inst, &modified, x)?;
                        closest_string::verify_closest(&inst.alphabet, &modified, &s, inst.d).map_err(bad)?;
                        Some(s)
                    }
                    None => None,
                };
                json!({ "modified": modified.to_strings(&inst.alphabet), "closest": center })
            }
            Loaded::Sched(inst) => {
                let delays = scheduling::decode_delays(inst, scenario)?;
                let table = match response {
                    Some(x) => {
                        let table = scheduling::decode_schedule(inst, &delays, x)?;
                        scheduling::verify_schedule(inst, &delays, &table).map_err(bad)?;
                        Some(table)
                    }
                    None => None,
                };
                json!({ "delays": delays, "schedule": table })
            }
            Loaded::Bribery(inst) => {
                let attack = bribery::decode_bribery(inst, Side::Adversary, scenario)?;
                let middle = bribery::apply_plan(inst, &inst.census(), &attack)
                    .ok_or_else(|| bad("adversary plan moves absent voters".into()))?;
                let answer = match response {
                    Some(x) => {
                        let mut both = scenario.clone();
                        both.0.extend(x.0.clone());
                        let ours = bribery::decode_bribery(inst, Side::Ours, &both)?;
                        let end = bribery::apply_plan(inst, &middle, &ours)
                            .ok_or_else(|| bad("our plan moves absent voters".into()))?;
                        let scores = bribery::scores(inst, &end);
                        if scores[1..].iter().any(|s| *s >= scores[0]) {
                            return Err(bad(format!("candidate 1 does not win: scores {scores:?}")));
                        }
                        Some(json!({ "plan": ours, "scores": scores }))
                    }
                    None => None,
                };
                json!({ "adversary": attack, "response": answer })
            }
        };
        Ok(value)
    }
}

fn first_response(sys: &ResiliencySystem, scenario: &IntAssignment) -> Run<IntAssignment> {
    let sub = sys.substitute(scenario)?;
    let values = Solutions::new(&sub)?
        .next()
        .ok_or_else(|| Failure::Mismatch("resilient verdict but a scenario has no answer".into()))?;
    Ok(sub.assignment(&values))
}

fn system_text(sys: &ResiliencySystem) -> String {
    let mut s = String::new();
    for (id, v) in sys.vars().iter().enumerate() {
        let side = if sys.is_z(resiliency_core::VarId(id)) { "z" } else { "x" };
        let lower = v.bounds.lower.map_or("-inf".to_string(), |b| b.to_string());
        let upper = v.bounds.upper.map_or("inf".to_string(), |b| b.to_string());
        s += &format!("{side} {} in [{lower}, {upper}]\n", v.name);
    }
    for (block, row) in sys.tagged_rows() {
        let terms: Vec<String> = row
            .coeffs
            .iter()
            .map(|(v, c)| format!("{c}*{}", sys.name(*v)))
            .collect();
        let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        let rel = match row.relation {
            resiliency_core::Relation::Leq => "<=",
            resiliency_core::Relation::Eq => "=",
        };
        s += &format!("[{block}] {lhs} {rel} {}\n", row.rhs);
    }
    s
}

fn cmd_encode(source: &Source, kappa: bool, io: &mut Io) -> Run<i32> {
    let loaded = load(source, io)?;
    let sys = loaded.encode(source)?;
    if kappa {
        io.note(&format!("kappa: {}", sys.kappa()));
    }
    io.emit(&sys.to_json(), || system_text(&sys))?;
    Ok(0)
}

struct CheckFlags {
    oracle: bool,
    exhaustive: bool,
    decode: bool,
    max_scenarios: Option<u64>,
}

fn cmd_check(source: &Source, flags: &CheckFlags, io: &mut Io, engine: Engine) -> Run<i32> {
    let loaded = load(source, io)?;
    let start = Instant::now();
    let sys = loaded.encode(source)?;
    let opts = EngineOptions { max_scenarios: flags.max_scenarios };
    let verdict = engine(&sys, &opts)?;
    let mut report = json!({
        "problem": loaded.name(),
        "kappa": sys.kappa(),
        "verdict": verdict,
    });
    if flags.exhaustive {
        let all = failing_scenarios(&sys, &opts)?;
        report["failing_scenarios"] = json!(all.failing);
        report["scenarios_checked"] = json!(all.scenarios_checked);
    }
    if flags.decode {
        report["decoded"] = match &verdict.witness {
            Some(w) => loaded.decode(w, None)?,
            None => match enumerate_scenarios(&sys)?.next() {
                Some(sc) => {
                    let x = first_response(&sys, &sc)?;
                    loaded.decode(&sc, Some(&x))?
                }
                None => Value::Null,
            },
        };
    }
    let mut mismatch = None;
    if flags.oracle {
        let answer = loaded.oracle()?;
        report["oracle"] = json!(answer);
        if answer != verdict.is_resilient() {
            mismatch = Some(format!(
                "engine says {}, oracle says {answer}",
                verdict.is_resilient()
            ));
        }
    }
    report["wall_time_ms"] = json!(start.elapsed().as_millis() as u64);
    io.emit(&report, || check_text(&report))?;
    match mismatch {
        Some(msg) => Err(Failure::Mismatch(msg)),
        None => Ok(if verdict.is_resilient() { 0 } else { 1 }),
    }
}

fn check_text(report: &Value) -> String {
    let verdict = &report["verdict"];
    let mut s = format!(
        "resilient: {}\nscenarios checked: {}\nkappa: {}\n",
        if verdict["resilient"] == json!(true) { "yes" } else { "no" },
        verdict["scenarios_checked"],
        report["kappa"],
    );
    if let Some(w) = verdict["witness"].as_object() {
        let parts: Vec<String> = w.iter().map(|(k, v)| format!("{k}={v}")).collect();
        s += &format!("witness: {}\n", parts.join(" "));
    }
    if let Some(o) = report.get("oracle") {
        s += &format!("oracle: {}\n", if *o == json!(true) { "yes" } else { "no" });
    }
    if let Some(f) = report.get("failing_scenarios").and_then(Value::as_array) {
        s += &format!("failing scenarios: {}\n", f.len());
    }
    if let Some(d) = report.get("decoded") {
        s += &format!("decoded: {d}\n");
    }
    s += &format!("wall time: {} ms\n", report["wall_time_ms"]);
    s
}

fn cmd_oracle(source: &Source, io: &mut Io) -> Run<i32> {
    let loaded = load(source, io)?;
    let start = Instant::now();
    let answer = loaded.oracle()?;
    let report = json!({
        "problem": loaded.name(),
        "answer": answer,
        "wall_time_ms": start.elapsed().as_millis() as u64,
    });
    io.emit(&report, || format!("answer: {}\n", if answer { "yes" } else { "no" }))?;
    Ok(if answer { 0 } else { 1 })
}

fn cmd_gen(reduction: Reduction, file: &PathBuf, verify: bool, io: &mut Io) -> Run<i32> {
    let text = io.read(file)?;
    let (inst, expected) = match reduction {
        Reduction::HittingSet => {
            let hs: HittingSetInstance = parse(&text, "hitting set")?;
            let inst = rdscp::gen_from_hitting_set(&hs)?;
            // covers survive exactly when no small hitting set exists
            let expected = if verify { Some(!oracles::hitting_set_oracle(&hs)?) } else { None };
            (inst, expected)
        }
        Reduction::Matching => {
            let mi: MatchingInstance = parse(&text, "3dm")?;
            let inst = rdscp::gen_from_3dm(&mi)?;
            let expected = if verify { Some(oracles::matching_3dm_oracle(&mi)?) } else { None };
            (inst, expected)
        }
    };
    let value = serde_json::to_value(&inst).map_err(anyhow::Error::from)?;
    io.emit(&value, || format!("{}\n", serde_json::to_string(&inst).unwrap_or_default()))?;
    if let Some(expected) = expected {
        let got = oracles::rdscp_oracle(&inst)?;
        if got != expected {
            return Err(Failure::Mismatch(format!(
                "generated instance answers {got}, source problem implies {expected}"
            )));
        }
        io.note(&format!("verified: generated instance answers {got} as the source implies"));
    }
    Ok(0)
}

fn cmd_gen_random(kind: RandomKind, seed: u64, io: &mut Io) -> Run<i32> {
    let mut r = random::rng(seed);
    let value = match kind {
        RandomKind::System => random::system(&mut r, &SystemShape::default()).to_json(),
        RandomKind::Rdscp => json!(random::rdscp(&mut r)),
        RandomKind::Rcs => json!(random::rcs(&mut r).to_doc()),
        RandomKind::Sched => json!(random::scheduling(&mut r)),
        RandomKind::Bribery => json!(random::bribery(&mut r)),
        RandomKind::HittingSet => json!(random::hitting_set(&mut r)),
        RandomKind::Matching => json!(random::matching(&mut r)),
    };
    io.emit(&value, || format!("{value}\n"))?;
    Ok(0)
}
