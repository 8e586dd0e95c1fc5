//! JSON documents for plain and partitioned systems.
//!
//! ```json
//! {"variables": [{"name": "x", "lower": 0, "upper": 3}],
//!  "zvars": ["z"],
//!  "rows": [{"coeffs": {"x": 1, "z": "1/2"}, "rel": "<=", "rhs": 3, "block": "xz"}]}
//! ```
//!
//! `zvars` and `block` are only meaningful for partitioned systems. When a
//! row carries no `block`, its block is derived from its support.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::engine::{Block, ResiliencySystem};
use crate::error::{Error, Result};
use crate::ilp::{LinearRow, LinearSystem, Relation, VarBounds, VarId};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarDoc {
    pub name: String,
    #[serde(default)]
    pub lower: Option<i64>,
    #[serde(default)]
    pub upper: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowDoc {
    pub coeffs: BTreeMap<String, Rational>,
    pub rel: Relation,
    pub rhs: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<Block>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub variables: Vec<VarDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub zvars: Vec<String>,
    pub rows: Vec<RowDoc>,
}

fn parse_doc(text: &str) -> Result<SystemDoc> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn resolve_terms(
    row: &RowDoc,
    lookup: impl Fn(&str) -> Option<VarId>,
) -> Result<Vec<(VarId, Rational)>> {
    row.coeffs
        .iter()
        .map(|(name, c)| {
            lookup(name)
                .map(|v| (v, *c))
                .ok_or_else(|| Error::Parse(format!("row mentions undeclared variable `{name}`")))
        })
        .collect()
}

fn bounds_of(v: &VarDoc) -> VarBounds {
    VarBounds {
        lower: v.lower,
        upper: v.upper,
    }
}

impl LinearSystem {
    pub fn from_doc(doc: &SystemDoc) -> Result<Self> {
        if !doc.zvars.is_empty() {
            return Err(Error::Parse("a plain system cannot declare zvars".into()));
        }
        let mut sys = LinearSystem::new();
        for v in &doc.variables {
            sys.add_var(v.name.clone(), bounds_of(v))?;
        }
        for row in &doc.rows {
            let terms = resolve_terms(row, |n| sys.var_id(n))?;
            sys.add_row(LinearRow::new(terms, row.rel, row.rhs))?;
        }
        Ok(sys)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&parse_doc(text)?)
    }

    pub fn to_doc(&self) -> SystemDoc {
        SystemDoc {
            variables: self
                .vars()
                .iter()
                .map(|v| VarDoc {
                    name: v.name.clone(),
                    lower: v.bounds.lower,
                    upper: v.bounds.upper,
                })
                .collect(),
            zvars: Vec::new(),
            rows: self
                .rows()
                .iter()
                .map(|r| row_doc(r, |v| self.name(v), None))
                .collect(),
        }
    }
}

fn row_doc<'a>(row: &LinearRow, name: impl Fn(VarId) -> &'a str, block: Option<Block>) -> RowDoc {
    RowDoc {
        coeffs: row
            .coeffs
            .iter()
            .map(|(v, c)| (name(*v).to_string(), *c))
            .collect(),
        rel: row.relation,
        rhs: row.rhs,
        block,
    }
}

impl ResiliencySystem {
    pub fn from_doc(doc: &SystemDoc) -> Result<Self> {
        let declared: BTreeSet<&str> = doc.variables.iter().map(|v| v.name.as_str()).collect();
        let mut zset = BTreeSet::new();
        for z in &doc.zvars {
            if !declared.contains(z.as_str()) {
                return Err(Error::Parse(format!("zvars lists undeclared variable `{z}`")));
            }
            if !zset.insert(z.as_str()) {
                return Err(Error::Parse(format!("zvars lists `{z}` twice")));
            }
        }
        let mut sys = ResiliencySystem::new();
        for v in &doc.variables {
            if zset.contains(v.name.as_str()) {
                sys.add_z(v.name.clone(), bounds_of(v))?;
            } else {
                sys.add_x(v.name.clone(), bounds_of(v))?;
            }
        }
        for (i, row) in doc.rows.iter().enumerate() {
            let terms = resolve_terms(row, |n| sys.var_id(n))?;
            let touches_z = terms.iter().any(|(v, _)| sys.is_z(*v));
            let touches_x = terms.iter().any(|(v, _)| !sys.is_z(*v));
            let derived = Block::from_support(touches_x, touches_z);
            let block = row.block.unwrap_or(derived);
            sys.add_row(block, LinearRow::new(terms, row.rel, row.rhs))
                .map_err(|_| Error::Parse(format!("row {i} is tagged `{block}` but its support implies `{derived}`")))?;
        }
        Ok(sys)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&parse_doc(text)?)
    }

    /// Document with explicit block tags, so that reading it back yields the
    /// same partition even for coupling rows whose x-coefficients are zero.
    pub fn to_doc(&self) -> SystemDoc {
        SystemDoc {
            variables: self
                .vars()
                .iter()
                .map(|v| VarDoc {
                    name: v.name.clone(),
                    lower: v.bounds.lower,
                    upper: v.bounds.upper,
                })
                .collect(),
            zvars: self.z_vars().map(|(_, v)| v.name.clone()).collect(),
            rows: self
                .tagged_rows()
                .map(|(b, r)| row_doc(r, |v| self.name(v), Some(b)))
                .collect(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_doc()).expect("documents serialize")
    }
}
