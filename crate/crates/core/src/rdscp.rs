//! Resiliency disjoint set cover.
//!
//! Instance: universe `[n]`, a multiset `family` of subsets, and integers
//! `s`, `d`, `t`. It is a yes-instance when, after deleting any `s` or fewer
//! members of the family, `d` pairwise disjoint covers of size at most `t`
//! remain.
//!
//! The encoding works on groups of identical members. A cover pattern is a
//! set of distinct group contents whose union is `[n]`; the x-side counts how
//! many covers follow each pattern and the z-side counts how many members of
//! each group the adversary deletes.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::engine::{Block, ResiliencySystem};
use crate::error::{budget, Error, Result};
use crate::ilp::{IntAssignment, LinearRow, VarBounds};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RdscpInstance {
    pub n: usize,
    pub family: Vec<Vec<usize>>,
    pub s: usize,
    pub d: usize,
    pub t: usize,
}

impl RdscpInstance {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Argument("d must be positive".into()));
        }
        if self.t == 0 {
            return Err(Error::Argument("t must be positive".into()));
        }
        for (i, member) in self.family.iter().enumerate() {
            if let Some(e) = member.iter().find(|e| **e == 0 || **e > self.n) {
                return Err(Error::Argument(format!(
                    "family member {i} contains {e}, outside 1..={}",
                    self.n
                )));
            }
        }
        Ok(())
    }

    /// `t` clamped to `n`: a minimal cover never needs more than `n` sets.
    pub fn effective_t(&self) -> usize {
        self.t.min(self.n)
    }

    pub fn member(&self, i: usize) -> BTreeSet<usize> {
        self.family[i].iter().copied().collect()
    }
}

/// All copies of one distinct member content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnGroup {
    pub content: BTreeSet<usize>,
    /// Family indices holding this content, ascending.
    pub copies: Vec<usize>,
}

impl ColumnGroup {
    pub fn multiplicity(&self) -> usize {
        self.copies.len()
    }
}

/// Groups ordered by content.
pub fn column_groups(inst: &RdscpInstance) -> Vec<ColumnGroup> {
    let mut by_content: BTreeMap<BTreeSet<usize>, Vec<usize>> = BTreeMap::new();
    for i in 0..inst.family.len() {
        by_content.entry(inst.member(i)).or_default().push(i);
    }
    by_content
        .into_iter()
        .map(|(content, copies)| ColumnGroup { content, copies })
        .collect()
}

/// A set of distinct group contents covering the universe. `members` holds
/// indices into the output of [`column_groups`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverPattern {
    pub members: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RdscpBudget {
    pub max_universe: usize,
    pub max_patterns: usize,
}

impl Default for RdscpBudget {
    fn default() -> Self {
        RdscpBudget {
            max_universe: 6,
            max_patterns: 100_000,
        }
    }
}

pub fn cover_patterns(
    inst: &RdscpInstance,
    groups: &[ColumnGroup],
    limits: &RdscpBudget,
) -> Result<Vec<CoverPattern>> {
    budget("max-universe", limits.max_universe as u64, inst.n as u64)?;
    let full: BTreeSet<usize> = (1..=inst.n).collect();
    // an empty member never helps a cover
    let useful: Vec<usize> = (0..groups.len())
        .filter(|g| !groups[*g].content.is_empty())
        .collect();
    let mut out = Vec::new();
    for size in 0..=inst.effective_t().min(useful.len()) {
        for members in useful.iter().copied().combinations(size) {
            let union: BTreeSet<usize> = members
                .iter()
                .flat_map(|g| groups[*g].content.iter().copied())
                .collect();
            if union == full {
                out.push(CoverPattern { members });
                budget("max-patterns", limits.max_patterns as u64, out.len() as u64)?;
            }
        }
    }
    Ok(out)
}

fn set_label(content: &BTreeSet<usize>) -> String {
    format!("{{{}}}", content.iter().join(","))
}

pub fn z_name(group: &ColumnGroup) -> String {
    format!("z[{}]", set_label(&group.content))
}

pub fn x_name(pattern: &CoverPattern, groups: &[ColumnGroup]) -> String {
    format!(
        "x[{}]",
        pattern
            .members
            .iter()
            .map(|g| set_label(&groups[*g].content))
            .join("|")
    )
}

pub fn encode(inst: &RdscpInstance) -> Result<ResiliencySystem> {
    encode_with(inst, &RdscpBudget::default())
}

pub fn encode_with(inst: &RdscpInstance, limits: &RdscpBudget) -> Result<ResiliencySystem> {
    inst.validate()?;
    let groups = column_groups(inst);
    let patterns = cover_patterns(inst, &groups, limits)?;
    let one = Rational::ONE;
    let mut sys = ResiliencySystem::new();

    let xs = patterns
        .iter()
        .map(|p| sys.add_x(x_name(p, &groups), VarBounds::new(0, inst.d as i64)))
        .collect::<Result<Vec<_>>>()?;
    let zs = groups
        .iter()
        .map(|g| {
            let cap = inst.s.min(g.multiplicity()) as i64;
            sys.add_z(z_name(g), VarBounds::new(0, cap))
        })
        .collect::<Result<Vec<_>>>()?;

    // at least d covers in total
    sys.add_row(
        Block::X,
        LinearRow::geq(xs.iter().map(|x| (*x, one)), Rational::from_int(inst.d as i64)),
    )?;
    // at most s deletions
    sys.add_row(
        Block::Z,
        LinearRow::leq(zs.iter().map(|z| (*z, one)), Rational::from_int(inst.s as i64)),
    )?;
    // covers using a content fit in the copies the adversary left
    for (gi, g) in groups.iter().enumerate() {
        let users = patterns
            .iter()
            .zip(&xs)
            .filter(|(p, _)| p.members.contains(&gi))
            .map(|(_, x)| (*x, one));
        let terms = users.chain(std::iter::once((zs[gi], one)));
        sys.add_row(
            Block::Xz,
            LinearRow::leq(terms, Rational::from_int(g.multiplicity() as i64)),
        )?;
    }
    Ok(sys)
}

/// Family indices deleted by a scenario: the lowest-index copies of each
/// group.
pub fn decode_scenario(inst: &RdscpInstance, scenario: &IntAssignment) -> Result<Vec<usize>> {
    let groups = column_groups(inst);
    let mut removed = Vec::new();
    for g in &groups {
        let name = z_name(g);
        let count = scenario
            .get(&name)
            .ok_or_else(|| Error::Scenario(format!("missing {name}")))?;
        if count < 0 || count as usize > g.multiplicity() {
            return Err(Error::Scenario(format!(
                "{name} = {count} but the group has {} copies",
                g.multiplicity()
            )));
        }
        removed.extend(g.copies.iter().take(count as usize));
    }
    if removed.len() > inst.s {
        return Err(Error::Scenario(format!(
            "scenario deletes {} members, more than s = {}",
            removed.len(),
            inst.s
        )));
    }
    removed.sort_unstable();
    Ok(removed)
}

/// Turns pattern counts into `d` concrete covers, each taking the
/// lowest-index copy of every content it uses that is neither deleted nor
/// already taken.
pub fn decode_solution(
    inst: &RdscpInstance,
    x: &IntAssignment,
    removed: &[usize],
) -> Result<Vec<Vec<usize>>> {
    let groups = column_groups(inst);
    let patterns = cover_patterns(inst, &groups, &RdscpBudget {
        max_universe: usize::MAX,
        max_patterns: usize::MAX,
    })?;
    let mut taken = vec![false; inst.family.len()];
    for r in removed {
        taken[*r] = true;
    }
    let mut covers = Vec::new();
    'patterns: for p in &patterns {
        for _ in 0..x.value(&x_name(p, &groups)) {
            if covers.len() == inst.d {
                break 'patterns;
            }
            let mut cover = Vec::with_capacity(p.members.len());
            for g in &p.members {
                let copy = groups[*g]
                    .copies
                    .iter()
                    .copied()
                    .find(|c| !taken[*c])
                    .ok_or_else(|| {
                        Error::System(format!(
                            "encoder bug: no free copy of {}",
                            set_label(&groups[*g].content)
                        ))
                    })?;
                taken[copy] = true;
                cover.push(copy);
            }
            covers.push(cover);
        }
    }
    if covers.len() < inst.d {
        return Err(Error::System(format!(
            "encoder bug: solution yields {} covers, {} required",
            covers.len(),
            inst.d
        )));
    }
    Ok(covers)
}

/// Checks a packing directly against the problem definition.
pub fn verify_packing(
    inst: &RdscpInstance,
    removed: &[usize],
    covers: &[Vec<usize>],
) -> std::result::Result<(), String> {
    if covers.len() != inst.d {
        return Err(format!("{} covers, expected {}", covers.len(), inst.d));
    }
    let mut seen = BTreeSet::new();
    for (i, cover) in covers.iter().enumerate() {
        if cover.len() > inst.t {
            return Err(format!("cover {i} has {} members > t = {}", cover.len(), inst.t));
        }
        let mut union = BTreeSet::new();
        for c in cover {
            if *c >= inst.family.len() {
                return Err(format!("cover {i} uses unknown member {c}"));
            }
            if removed.contains(c) {
                return Err(format!("cover {i} uses deleted member {c}"));
            }
            if !seen.insert(*c) {
                return Err(format!("member {c} used twice"));
            }
            union.extend(inst.family[*c].iter().copied());
        }
        if union != (1..=inst.n).collect() {
            return Err(format!("cover {i} misses part of the universe"));
        }
    }
    Ok(())
}

/// Users, resources, and who may access what, together with a resiliency
/// requirement on the resource subset `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuthorizationPolicy {
    pub users: Vec<String>,
    pub resources: Vec<String>,
    pub vr: Vec<(String, String)>,
    pub p: Vec<String>,
    pub s: usize,
    pub d: usize,
    pub t: usize,
}

impl AuthorizationPolicy {
    pub fn validate(&self) -> Result<()> {
        let users: BTreeSet<&str> = self.users.iter().map(String::as_str).collect();
        let resources: BTreeSet<&str> = self.resources.iter().map(String::as_str).collect();
        if users.len() != self.users.len() || resources.len() != self.resources.len() {
            return Err(Error::Argument("duplicate user or resource".into()));
        }
        for (u, r) in &self.vr {
            if !users.contains(u.as_str()) {
                return Err(Error::Argument(format!("vr names unknown user `{u}`")));
            }
            if !resources.contains(r.as_str()) {
                return Err(Error::Argument(format!("vr names unknown resource `{r}`")));
            }
        }
        if let Some(r) = self.p.iter().find(|r| !resources.contains(r.as_str())) {
            return Err(Error::Argument(format!("p names unknown resource `{r}`")));
        }
        Ok(())
    }
}

/// Resources of `p` become the universe and each user contributes the set of
/// `p`-resources they are authorized for.
pub fn from_policy(policy: &AuthorizationPolicy) -> Result<RdscpInstance> {
    policy.validate()?;
    let universe: Vec<&str> = policy.p.iter().map(String::as_str).unique().collect();
    let element = |r: &str| universe.iter().position(|u| *u == r).map(|i| i + 1);
    let family = policy
        .users
        .iter()
        .map(|user| {
            policy
                .vr
                .iter()
                .filter(|(u, _)| u == user)
                .filter_map(|(_, r)| element(r))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        })
        .collect();
    Ok(RdscpInstance {
        n: universe.len(),
        family,
        s: policy.s,
        d: policy.d,
        t: policy.t,
    })
}

/// Ground set `1..=n`, a family of `delta`-element subsets, and a bound `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HittingSetInstance {
    pub n: usize,
    pub sets: Vec<Vec<usize>>,
    pub k: usize,
    /// Required only when `sets` is empty; defaults to 2 then.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<usize>,
}

impl HittingSetInstance {
    pub fn uniformity(&self) -> Result<usize> {
        let delta = match (self.delta, self.sets.first()) {
            (Some(d), _) => d,
            (None, Some(first)) => first.len(),
            (None, None) => 2,
        };
        if delta < 2 {
            return Err(Error::Argument(format!("delta = {delta}, need at least 2")));
        }
        for (j, set) in self.sets.iter().enumerate() {
            let distinct: BTreeSet<_> = set.iter().collect();
            if set.len() != delta || distinct.len() != delta {
                return Err(Error::Argument(format!("set {j} does not have {delta} distinct elements")));
            }
            if let Some(v) = set.iter().find(|v| **v == 0 || **v > self.n) {
                return Err(Error::Argument(format!("set {j} contains {v}, outside 1..={}", self.n)));
            }
        }
        Ok(delta)
    }
}

/// Builds a disjoint-set-cover instance (`d = 1`, `t = delta + 1`, `s = k`)
/// that is a yes-instance exactly when no hitting set of size `k` exists.
///
/// Elements: one per `(delta-1)`-subset of `[n]`, then `delta` private
/// elements per set `S_j`, then a final marker element. Members: one per
/// ground element `v_i` (the private elements at the positions where `v_i`
/// occurs, plus every subset element whose subset avoids `i`), then one per
/// set `S_j` (the marker plus every private element not belonging to `j`).
pub fn gen_from_hitting_set(hs: &HittingSetInstance) -> Result<RdscpInstance> {
    let delta = hs.uniformity()?;
    let subsets: Vec<Vec<usize>> = (1..=hs.n).combinations(delta - 1).collect();
    let m = hs.sets.len();
    let private = |j: usize, x: usize| subsets.len() + j * delta + x + 1;
    let marker = subsets.len() + m * delta + 1;

    let mut family = Vec::with_capacity(hs.n + m);
    for i in 1..=hs.n {
        let mut member: Vec<usize> = Vec::new();
        for (j, set) in hs.sets.iter().enumerate() {
            for (x, v) in set.iter().enumerate() {
                if *v == i {
                    member.push(private(j, x));
                }
            }
        }
        for (q, subset) in subsets.iter().enumerate() {
            if !subset.contains(&i) {
                member.push(q + 1);
            }
        }
        member.sort_unstable();
        family.push(member);
    }
    for j in 0..m {
        let mut member = vec![marker];
        for other in (0..m).filter(|o| *o != j) {
            member.extend((0..delta).map(|x| private(other, x)));
        }
        member.sort_unstable();
        family.push(member);
    }
    Ok(RdscpInstance {
        n: marker,
        family,
        s: hs.k,
        d: 1,
        t: delta + 1,
    })
}

/// Three ground sets of size `n` and hyperedges given as 1-based index
/// triples `(x, y, z)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingInstance {
    pub n: usize,
    pub triples: Vec<[usize; 3]>,
    pub k: usize,
}

impl MatchingInstance {
    pub fn validate(&self) -> Result<()> {
        for (j, e) in self.triples.iter().enumerate() {
            if e.iter().any(|c| *c == 0 || *c > self.n) {
                return Err(Error::Argument(format!("triple {j} = {e:?} leaves 1..={}", self.n)));
            }
        }
        if self.triples.iter().collect::<BTreeSet<_>>().len() != self.triples.len() {
            return Err(Error::Argument("duplicate triple".into()));
        }
        if self.k == 0 {
            return Err(Error::Argument("k must be positive".into()));
        }
        Ok(())
    }
}

/// Builds a disjoint-set-cover instance (`s = 0`, `t = 4`, `d = k`) that is
/// a yes-instance exactly when `k` pairwise disjoint hyperedges exist.
///
/// Elements `1..=3m` are per-edge copies for the three coordinates, followed
/// by one marker per coordinate and a final marker. Coordinate members hold
/// the per-edge elements of the edges through them (plus that coordinate's
/// marker); edge members hold everything except that edge's three per-edge
/// elements and the three coordinate markers.
pub fn gen_from_3dm(inst: &MatchingInstance) -> Result<RdscpInstance> {
    inst.validate()?;
    let m = inst.triples.len();
    let edge_elem = |axis: usize, j: usize| axis * m + j + 1;
    let axis_marker = |axis: usize| 3 * m + axis + 1;
    let n = 3 * m + 4;

    let mut family = Vec::with_capacity(3 * inst.n + m);
    for axis in 0..3 {
        for i in 1..=inst.n {
            let mut member: Vec<usize> = inst
                .triples
                .iter()
                .enumerate()
                .filter(|(_, e)| e[axis] == i)
                .map(|(j, _)| edge_elem(axis, j))
                .collect();
            if !member.is_empty() {
                member.push(axis_marker(axis));
            }
            family.push(member);
        }
    }
    for j in 0..m {
        let excluded: BTreeSet<usize> = (0..3)
            .flat_map(|a| [edge_elem(a, j), axis_marker(a)])
            .collect();
        family.push((1..=n).filter(|e| !excluded.contains(e)).collect());
    }
    Ok(RdscpInstance {
        n,
        family,
        s: 0,
        d: inst.k,
        t: 4,
    })
}
