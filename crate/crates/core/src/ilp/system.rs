use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Dense index of a variable inside its owning system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

/// Integer box for one variable. `None` marks a missing bound, which the
/// solver rejects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarBounds {
    pub lower: Option<i64>,
    pub upper: Option<i64>,
}

impl VarBounds {
    pub fn new(lower: i64, upper: i64) -> Self {
        VarBounds {
            lower: Some(lower),
            upper: Some(upper),
        }
    }

    pub fn finite(&self) -> Option<(i64, i64)> {
        Some((self.lower?, self.upper?))
    }

    pub fn contains(&self, value: i64) -> bool {
        self.lower.is_none_or(|l| l <= value) && self.upper.is_none_or(|u| value <= u)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub bounds: VarBounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Leq,
    #[serde(rename = "=")]
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Leq => "<=",
            Relation::Eq => "=",
        })
    }
}

/// `Σ coeff·var (<= | =) rhs`.
///
/// The support of a row is the key set of `coeffs`, explicit zero entries
/// included. Encoders rely on this to pin a row to a block even when every
/// coefficient on one side happens to be zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRow {
    pub coeffs: BTreeMap<VarId, Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LinearRow {
    pub fn new(
        terms: impl IntoIterator<Item = (VarId, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) -> Self {
        let mut coeffs = BTreeMap::new();
        for (v, c) in terms {
            *coeffs.entry(v).or_insert(Rational::ZERO) += c;
        }
        LinearRow {
            coeffs,
            relation,
            rhs,
        }
    }

    pub fn leq(terms: impl IntoIterator<Item = (VarId, Rational)>, rhs: Rational) -> Self {
        Self::new(terms, Relation::Leq, rhs)
    }

    pub fn eq(terms: impl IntoIterator<Item = (VarId, Rational)>, rhs: Rational) -> Self {
        Self::new(terms, Relation::Eq, rhs)
    }

    /// `Σ terms >= rhs`, stored as `Σ -terms <= -rhs`.
    pub fn geq(terms: impl IntoIterator<Item = (VarId, Rational)>, rhs: Rational) -> Self {
        Self::new(terms.into_iter().map(|(v, c)| (v, -c)), Relation::Leq, -rhs)
    }

    pub fn support(&self) -> impl Iterator<Item = VarId> + '_ {
        self.coeffs.keys().copied()
    }

    /// Left-hand side under `values` (indexed by `VarId`).
    pub fn lhs(&self, values: &[i64]) -> Rational {
        self.coeffs
            .iter()
            .fold(Rational::ZERO, |acc, (v, c)| acc + *c * Rational::from_int(values[v.0]))
    }

    pub fn holds(&self, values: &[i64]) -> bool {
        let lhs = self.lhs(values);
        match self.relation {
            Relation::Leq => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }

    /// The row as one or two `<=` rows with the same integer solutions.
    pub fn as_leq_rows(&self) -> Vec<LinearRow> {
        match self.relation {
            Relation::Leq => vec![self.clone()],
            Relation::Eq => {
                let up = LinearRow {
                    relation: Relation::Leq,
                    ..self.clone()
                };
                let down = LinearRow {
                    coeffs: self.coeffs.iter().map(|(v, c)| (*v, -*c)).collect(),
                    relation: Relation::Leq,
                    rhs: -self.rhs,
                };
                vec![up, down]
            }
        }
    }
}

/// Variables with integer boxes plus a list of rows over them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearSystem {
    vars: Vec<Variable>,
    index: HashMap<String, VarId>,
    rows: Vec<LinearRow>,
}

impl LinearSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, bounds: VarBounds) -> Result<VarId> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(Error::System(format!("duplicate variable `{name}`")));
        }
        if let Some((l, u)) = bounds.finite() {
            if l > u {
                return Err(Error::System(format!("variable `{name}` has lower {l} > upper {u}")));
            }
        }
        let id = VarId(self.vars.len());
        self.index.insert(name.clone(), id);
        self.vars.push(Variable { name, bounds });
        Ok(id)
    }

    pub fn add_row(&mut self, row: LinearRow) -> Result<()> {
        if let Some(v) = row.support().find(|v| v.0 >= self.vars.len()) {
            return Err(Error::System(format!("row references unknown variable index {}", v.0)));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn rows(&self) -> &[LinearRow] {
        &self.rows
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.vars[id.0].name
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.vars.iter().map(|v| v.name.as_str())
    }

    /// Same variables, every `=` row replaced by its two `<=` halves.
    pub fn desugared(&self) -> LinearSystem {
        LinearSystem {
            vars: self.vars.clone(),
            index: self.index.clone(),
            rows: self.rows.iter().flat_map(LinearRow::as_leq_rows).collect(),
        }
    }

    /// Dense value vector for `a`, checking that its domain is exactly this
    /// system's variable set.
    pub fn values_of(&self, a: &IntAssignment) -> Result<Vec<i64>> {
        let missing: Vec<String> = self
            .vars
            .iter()
            .filter(|v| !a.0.contains_key(&v.name))
            .map(|v| v.name.clone())
            .collect();
        let extra: Vec<String> = a
            .0
            .keys()
            .filter(|k| !self.index.contains_key(*k))
            .cloned()
            .collect();
        if !missing.is_empty() || !extra.is_empty() {
            return Err(Error::Domain { missing, extra });
        }
        Ok(self.vars.iter().map(|v| a.0[&v.name]).collect())
    }

    pub fn assignment(&self, values: &[i64]) -> IntAssignment {
        IntAssignment(
            self.vars
                .iter()
                .zip(values)
                .map(|(v, x)| (v.name.clone(), *x))
                .collect(),
        )
    }
}

/// Integer values keyed by variable name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntAssignment(pub BTreeMap<String, i64>);

impl IntAssignment {
    pub fn get(&self, name: &str) -> Option<i64> {
        self.0.get(name).copied()
    }

    /// Value of `name`, or 0 when absent.
    pub fn value(&self, name: &str) -> i64 {
        self.get(name).unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> BTreeSet<&str> {
        self.0.keys().map(String::as_str).collect()
    }
}

impl FromIterator<(String, i64)> for IntAssignment {
    fn from_iter<I: IntoIterator<Item = (String, i64)>>(iter: I) -> Self {
        IntAssignment(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    Row(usize),
    Bound(VarId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluation {
    Satisfies,
    Violates(Violation),
}

/// Checks `a` against every row (in order) and then every variable box.
pub fn evaluate(system: &LinearSystem, a: &IntAssignment) -> Result<Evaluation> {
    let values = system.values_of(a)?;
    if let Some(i) = system.rows.iter().position(|r| !r.holds(&values)) {
        return Ok(Evaluation::Violates(Violation::Row(i)));
    }
    if let Some(i) = system
        .vars
        .iter()
        .zip(&values)
        .position(|(v, x)| !v.bounds.contains(*x))
    {
        return Ok(Evaluation::Violates(Violation::Bound(VarId(i))));
    }
    Ok(Evaluation::Satisfies)
}
