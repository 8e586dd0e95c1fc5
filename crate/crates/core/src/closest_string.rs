//! Resiliency closest string.
//!
//! A `k x L` matrix of symbols is resilient when every normalized matrix
//! within Hamming distance `m` of it still has a string at distance at most
//! `d` from each of its rows. Columns are handled by type: after per-column
//! renaming of symbols by frequency rank, only the pattern of each column
//! matters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::{Block, ResiliencySystem};
use crate::error::{budget, Error, Result};
use crate::ilp::{IntAssignment, LinearRow, VarBounds, VarId};
use crate::rational::Rational;

/// Ordered, distinct symbols. The order decides frequency ties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: Vec<char>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Argument("empty alphabet".into()));
        }
        for (i, c) in symbols.iter().enumerate() {
            if symbols[..i].contains(c) {
                return Err(Error::Argument(format!("symbol `{c}` repeated in alphabet")));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index(&self, c: char) -> Option<usize> {
        self.symbols.iter().position(|s| *s == c)
    }
}

/// `k` rows of equal length `L`, cells stored as alphabet indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringMatrix {
    rows: Vec<Vec<usize>>,
}

impl StringMatrix {
    pub fn from_strings(alphabet: &Alphabet, strings: &[String]) -> Result<Self> {
        if strings.is_empty() {
            return Err(Error::Argument("no strings".into()));
        }
        let rows = strings
            .iter()
            .enumerate()
            .map(|(r, s)| {
                s.chars()
                    .map(|c| {
                        alphabet
                            .index(c)
                            .ok_or_else(|| Error::Argument(format!("string {r}: `{c}` not in alphabet")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(rows)
    }

    pub fn from_indices(rows: Vec<Vec<usize>>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || width == 0 {
            return Err(Error::Argument("matrix needs at least one row and one column".into()));
        }
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Argument("strings differ in length".into()));
        }
        Ok(StringMatrix { rows })
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn len(&self) -> usize {
        self.rows[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn column(&self, c: usize) -> Vec<usize> {
        self.rows.iter().map(|r| r[c]).collect()
    }

    pub fn set_column(&mut self, c: usize, column: &[usize]) {
        for (row, v) in self.rows.iter_mut().zip(column) {
            row[c] = *v;
        }
    }

    pub fn to_strings(&self, alphabet: &Alphabet) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|i| alphabet.symbols[*i]).collect())
            .collect()
    }
}

/// Symbol renaming applied to one column: `map[old] = new`.
pub type Bijection = Vec<usize>;

fn rank_order(column: &[usize], sigma: usize) -> Vec<usize> {
    let mut freq = vec![0usize; sigma];
    for v in column {
        freq[*v] += 1;
    }
    let mut order: Vec<usize> = (0..sigma).collect();
    order.sort_by_key(|s| (std::cmp::Reverse(freq[*s]), *s));
    order
}

/// Column is normalized iff symbol frequencies never increase along the
/// alphabet order.
pub fn is_normalized_column(column: &[usize], sigma: usize) -> bool {
    rank_order(column, sigma).iter().enumerate().all(|(i, s)| i == *s)
}

/// Renames every column so that its i-th most frequent symbol becomes the
/// i-th alphabet symbol.
pub fn normalize(matrix: &StringMatrix, sigma: usize) -> (StringMatrix, Vec<Bijection>) {
    let mut out = matrix.clone();
    let mut maps = Vec::with_capacity(matrix.len());
    for c in 0..matrix.len() {
        let column = matrix.column(c);
        let mut map = vec![0; sigma];
        for (new, old) in rank_order(&column, sigma).into_iter().enumerate() {
            map[old] = new;
        }
        let renamed: Vec<usize> = column.iter().map(|v| map[*v]).collect();
        out.set_column(c, &renamed);
        maps.push(map);
    }
    (out, maps)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnType {
    pub column: Vec<usize>,
    pub count: usize,
}

/// Distinct columns of a normalized matrix with their counts, ordered by
/// column content.
pub fn column_types(matrix: &StringMatrix, sigma: usize) -> Result<Vec<ColumnType>> {
    let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for c in 0..matrix.len() {
        let column = matrix.column(c);
        if !is_normalized_column(&column, sigma) {
            return Err(Error::Normalization { column: c });
        }
        *counts.entry(column).or_default() += 1;
    }
    Ok(counts
        .into_iter()
        .map(|(column, count)| ColumnType { column, count })
        .collect())
}

/// All normalized columns of height `k` in lexicographic order.
pub fn all_types(k: usize, sigma: usize, max_types: usize) -> Result<Vec<Vec<usize>>> {
    let space = (sigma as u64).checked_pow(k as u32).unwrap_or(u64::MAX);
    budget("type-space", 1 << 24, space)?;
    let mut out = Vec::new();
    let mut column = vec![0usize; k];
    loop {
        if is_normalized_column(&column, sigma) {
            out.push(column.clone());
            budget("max-types", max_types as u64, out.len() as u64)?;
        }
        let Some(pos) = (0..k).rev().find(|i| column[*i] + 1 < sigma) else {
            return Ok(out);
        };
        column[pos] += 1;
        for v in &mut column[pos + 1..] {
            *v = 0;
        }
    }
}

fn hamming(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMode {
    /// One bound per input row.
    #[default]
    PerRow,
    /// A single bound on the summed column mismatch.
    Aggregate,
}

#[derive(Debug, Clone)]
pub struct RcsOptions {
    pub distance: DistanceMode,
    /// Largest admissible number of normalized column types.
    pub max_types: usize,
}

impl Default for RcsOptions {
    fn default() -> Self {
        RcsOptions {
            distance: DistanceMode::PerRow,
            max_types: 11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RcsDoc {
    pub alphabet: Vec<char>,
    pub strings: Vec<String>,
    pub d: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RcsInstance {
    pub alphabet: Alphabet,
    pub matrix: StringMatrix,
    pub d: usize,
    pub m: usize,
}

impl RcsInstance {
    pub fn new(alphabet: Alphabet, matrix: StringMatrix, d: usize, m: usize) -> Result<Self> {
        column_types(&matrix, alphabet.len())?;
        if m > matrix.k() * matrix.len() {
            return Err(Error::Argument(format!(
                "m = {m} exceeds the matrix size {}",
                matrix.k() * matrix.len()
            )));
        }
        Ok(RcsInstance { alphabet, matrix, d, m })
    }

    /// Builds an instance from its document form, normalizing the matrix.
    /// Also returns the indices of columns that normalization changed.
    pub fn from_doc(doc: &RcsDoc) -> Result<(Self, Vec<usize>)> {
        let alphabet = Alphabet::new(doc.alphabet.clone())?;
        let raw = StringMatrix::from_strings(&alphabet, &doc.strings)?;
        let (matrix, _) = normalize(&raw, alphabet.len());
        let renamed = (0..raw.len())
            .filter(|c| raw.column(*c) != matrix.column(*c))
            .collect();
        Ok((Self::new(alphabet, matrix, doc.d, doc.m)?, renamed))
    }

    pub fn from_json(text: &str) -> Result<(Self, Vec<usize>)> {
        let doc: RcsDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_doc(&doc)
    }

    pub fn to_doc(&self) -> RcsDoc {
        RcsDoc {
            alphabet: self.alphabet.symbols.clone(),
            strings: self.matrix.to_strings(&self.alphabet),
            d: self.d,
            m: self.m,
        }
    }

    fn label(&self, column: &[usize]) -> String {
        column.iter().map(|i| self.alphabet.symbols[*i]).collect()
    }
}

struct Names<'a> {
    inst: &'a RcsInstance,
}

impl Names<'_> {
    fn z(&self, t: &[usize], u: &[usize]) -> String {
        format!("z[{}>{}]", self.inst.label(t), self.inst.label(u))
    }

    fn census(&self, t: &[usize]) -> String {
        format!("n'[{}]", self.inst.label(t))
    }

    fn x(&self, t: &[usize], phi: usize) -> String {
        format!("x[{}:{}]", self.inst.label(t), self.inst.alphabet.symbols[phi])
    }
}

pub fn encode(inst: &RcsInstance) -> Result<ResiliencySystem> {
    encode_with(inst, &RcsOptions::default())
}

pub fn encode_with(inst: &RcsInstance, opts: &RcsOptions) -> Result<ResiliencySystem> {
    let sigma = inst.alphabet.len();
    let k = inst.matrix.k();
    let len = inst.matrix.len() as i64;
    let types = all_types(k, sigma, opts.max_types)?;
    let present: BTreeMap<Vec<usize>, usize> = column_types(&inst.matrix, sigma)?
        .into_iter()
        .map(|t| (t.column, t.count))
        .collect();
    let count = |t: &Vec<usize>| present.get(t).copied().unwrap_or(0) as i64;
    let names = Names { inst };
    let one = Rational::ONE;
    let int = |v: i64| Rational::from_int(v);
    let mut sys = ResiliencySystem::new();

    let mut z: BTreeMap<(usize, usize), VarId> = BTreeMap::new();
    for (a, t) in types.iter().enumerate() {
        for (b, u) in types.iter().enumerate() {
            let id = sys.add_z(names.z(t, u), VarBounds::new(0, count(t)))?;
            z.insert((a, b), id);
        }
    }
    let census = types
        .iter()
        .map(|t| sys.add_z(names.census(t), VarBounds::new(0, len)))
        .collect::<Result<Vec<_>>>()?;
    let mut x: BTreeMap<(usize, usize), VarId> = BTreeMap::new();
    for (a, t) in types.iter().enumerate() {
        for phi in 0..sigma {
            x.insert((a, phi), sys.add_x(names.x(t, phi), VarBounds::new(0, len))?);
        }
    }

    // every original column goes somewhere
    for (a, t) in types.iter().enumerate() {
        let terms = (0..types.len()).map(|b| (z[&(a, b)], one));
        sys.add_row(Block::Z, LinearRow::eq(terms, int(count(t))))?;
    }
    // total number of changed cells
    let changed = z.iter().map(|((a, b), id)| {
        (*id, int(hamming(&types[*a], &types[*b]) as i64))
    });
    sys.add_row(Block::Z, LinearRow::leq(changed, int(inst.m as i64)))?;
    // census of the modified matrix
    for b in 0..types.len() {
        let terms = (0..types.len())
            .map(|a| (z[&(a, b)], one))
            .chain(std::iter::once((census[b], -one)));
        sys.add_row(Block::Z, LinearRow::eq(terms, Rational::ZERO))?;
    }
    // each modified column gets one solution symbol
    for (a, c) in census.iter().enumerate() {
        let terms = (0..sigma)
            .map(|phi| (x[&(a, phi)], one))
            .chain(std::iter::once((*c, -one)));
        sys.add_row(Block::Xz, LinearRow::eq(terms, Rational::ZERO))?;
    }
    let d = int(inst.d as i64);
    match opts.distance {
        DistanceMode::PerRow => {
            for r in 0..k {
                let terms = x.iter().map(|((a, phi), id)| {
                    (*id, if types[*a].get(r) == Some(phi) { Rational::ZERO } else { one })
                });
                sys.add_row(Block::X, LinearRow::leq(terms, d))?;
            }
        }
        DistanceMode::Aggregate => {
            let terms = x.iter().map(|((a, phi), id)| {
                let mismatch = types[*a].iter().filter(|v| *v != phi).count();
                (*id, int(mismatch as i64))
            });
            sys.add_row(Block::X, LinearRow::leq(terms, d))?;
        }
    }
    Ok(sys)
}

fn read(a: &IntAssignment, name: &str) -> Result<i64> {
    a.get(name)
        .ok_or_else(|| Error::Scenario(format!("missing {name}")))
}

/// The modified matrix described by a scenario. Within each type, the
/// leftmost columns are changed first, targets taken in type order.
pub fn decode_scenario(inst: &RcsInstance, scenario: &IntAssignment) -> Result<StringMatrix> {
    let sigma = inst.alphabet.len();
    let types = all_types(inst.matrix.k(), sigma, usize::MAX)?;
    let names = Names { inst };
    let mut out = inst.matrix.clone();
    let mut distance = 0usize;
    for t in &types {
        let columns: Vec<usize> = (0..inst.matrix.len())
            .filter(|c| inst.matrix.column(*c) == *t)
            .collect();
        let mut next = columns.iter();
        let mut moved = 0usize;
        for u in &types {
            let n = read(scenario, &names.z(t, u))?;
            if n < 0 {
                return Err(Error::Scenario(format!("{} is negative", names.z(t, u))));
            }
            for _ in 0..n {
                let c = next.next().ok_or_else(|| {
                    Error::Scenario(format!("more than {} columns of type {} moved", columns.len(), inst.label(t)))
                })?;
                out.set_column(*c, u);
                distance += hamming(t, u);
            }
            moved += n as usize;
        }
        if moved != columns.len() {
            return Err(Error::Scenario(format!(
                "{moved} of {} columns of type {} accounted for",
                columns.len(),
                inst.label(t)
            )));
        }
    }
    if distance > inst.m {
        return Err(Error::Scenario(format!("{distance} cells changed, more than m = {}", inst.m)));
    }
    let census: BTreeMap<Vec<usize>, usize> = column_types(&out, sigma)?
        .into_iter()
        .map(|t| (t.column, t.count))
        .collect();
    for t in &types {
        let claimed = read(scenario, &names.census(t))?;
        if claimed != census.get(t).copied().unwrap_or(0) as i64 {
            return Err(Error::Scenario(format!("{} disagrees with the modified matrix", names.census(t))));
        }
    }
    Ok(out)
}

/// A string assigning, within each column type of `modified`, the leftmost
/// columns to symbols in alphabet order according to the x-counts.
pub fn decode_solution(inst: &RcsInstance, modified: &StringMatrix, x: &IntAssignment) -> Result<String> {
    let sigma = inst.alphabet.len();
    let names = Names { inst };
    let mut out: Vec<Option<usize>> = vec![None; modified.len()];
    for t in column_types(modified, sigma)? {
        let mut columns = (0..modified.len()).filter(|c| modified.column(*c) == t.column);
        for phi in 0..sigma {
            for _ in 0..x.value(&names.x(&t.column, phi)) {
                let c = columns.next().ok_or_else(|| {
                    Error::System(format!("encoder bug: x overfills type {}", inst.label(&t.column)))
                })?;
                out[c] = Some(phi);
            }
        }
        if columns.next().is_some() {
            return Err(Error::System(format!(
                "encoder bug: x leaves columns of type {} unassigned",
                inst.label(&t.column)
            )));
        }
    }
    Ok(out
        .into_iter()
        .map(|v| inst.alphabet.symbols[v.expect("every column assigned")])
        .collect())
}

/// Checks `d_H(s, row) <= d` for every row of `matrix`.
pub fn verify_closest(
    alphabet: &Alphabet,
    matrix: &StringMatrix,
    s: &str,
    d: usize,
) -> std::result::Result<(), String> {
    let s: Vec<usize> = s
        .chars()
        .map(|c| alphabet.index(c).ok_or_else(|| format!("`{c}` not in alphabet")))
        .collect::<std::result::Result<_, _>>()?;
    if s.len() != matrix.len() {
        return Err(format!("length {} but rows have length {}", s.len(), matrix.len()));
    }
    for (i, row) in matrix.rows().iter().enumerate() {
        let dist = hamming(row, &s);
        if dist > d {
            return Err(format!("row {i} at distance {dist} > {d}"));
        }
    }
    Ok(())
}
