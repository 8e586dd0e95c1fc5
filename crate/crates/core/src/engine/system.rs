use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ilp::{IntAssignment, LinearRow, LinearSystem, VarBounds, VarId, Variable};
use crate::rational::Rational;

/// Which constraint block a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    /// Rows over x only (`Ax <= b`).
    X,
    /// Rows coupling x and z (`Cx + Dz <= e`).
    Xz,
    /// Rows over z only (`Fz <= g`), the adversary's domain.
    Z,
}

impl Block {
    /// Block implied by a row's support.
    pub fn from_support(touches_x: bool, touches_z: bool) -> Block {
        match (touches_x, touches_z) {
            (_, false) => Block::X,
            (false, true) => Block::Z,
            (true, true) => Block::Xz,
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Block::X => "x",
            Block::Xz => "xz",
            Block::Z => "z",
        })
    }
}

/// A system whose variables split into existential `x` and adversarial `z`.
///
/// All variables share one table so that rows can be stored with plain
/// [`VarId`]s; `is_z` records the side of each variable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResiliencySystem {
    table: LinearSystem,
    is_z: Vec<bool>,
    rows_x: Vec<LinearRow>,
    rows_xz: Vec<LinearRow>,
    rows_z: Vec<LinearRow>,
}

impl ResiliencySystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_x(&mut self, name: impl Into<String>, bounds: VarBounds) -> Result<VarId> {
        let id = self.table.add_var(name, bounds)?;
        self.is_z.push(false);
        Ok(id)
    }

    pub fn add_z(&mut self, name: impl Into<String>, bounds: VarBounds) -> Result<VarId> {
        let id = self.table.add_var(name, bounds)?;
        self.is_z.push(true);
        Ok(id)
    }

    /// Appends `row` to `block`, rejecting rows whose support crosses into
    /// the wrong side.
    pub fn add_row(&mut self, block: Block, row: LinearRow) -> Result<()> {
        let n = self.is_z.len();
        if let Some(v) = row.support().find(|v| v.0 >= n) {
            return Err(Error::System(format!("row references unknown variable index {}", v.0)));
        }
        let touches_z = row.support().any(|v| self.is_z[v.0]);
        let touches_x = row.support().any(|v| !self.is_z[v.0]);
        match block {
            Block::X if touches_z => {
                return Err(Error::System("x-block row mentions a z variable".into()))
            }
            Block::Z if touches_x => {
                return Err(Error::System("z-block row mentions an x variable".into()))
            }
            _ => {}
        }
        match block {
            Block::X => self.rows_x.push(row),
            Block::Xz => self.rows_xz.push(row),
            Block::Z => self.rows_z.push(row),
        }
        Ok(())
    }

    pub fn vars(&self) -> &[Variable] {
        self.table.vars()
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.table.var_id(name)
    }

    pub fn name(&self, id: VarId) -> &str {
        self.table.name(id)
    }

    pub fn is_z(&self, id: VarId) -> bool {
        self.is_z[id.0]
    }

    pub fn x_vars(&self) -> impl Iterator<Item = (VarId, &Variable)> {
        self.side(false)
    }

    pub fn z_vars(&self) -> impl Iterator<Item = (VarId, &Variable)> {
        self.side(true)
    }

    fn side(&self, z: bool) -> impl Iterator<Item = (VarId, &Variable)> {
        self.table
            .vars()
            .iter()
            .enumerate()
            .filter(move |(i, _)| self.is_z[*i] == z)
            .map(|(i, v)| (VarId(i), v))
    }

    pub fn rows(&self, block: Block) -> &[LinearRow] {
        match block {
            Block::X => &self.rows_x,
            Block::Xz => &self.rows_xz,
            Block::Z => &self.rows_z,
        }
    }

    /// Rows of every block, tagged, in block order x, xz, z.
    pub fn tagged_rows(&self) -> impl Iterator<Item = (Block, &LinearRow)> {
        [Block::X, Block::Xz, Block::Z]
            .into_iter()
            .flat_map(move |b| self.rows(b).iter().map(move |r| (b, r)))
    }

    pub fn x_count(&self) -> usize {
        self.is_z.iter().filter(|z| !**z).count()
    }

    pub fn z_count(&self) -> usize {
        self.is_z.iter().filter(|z| **z).count()
    }

    /// `n + p + m`: x-dimension, z-dimension, and rows touching x.
    pub fn kappa(&self) -> usize {
        self.x_count() + self.z_count() + self.rows_x.len() + self.rows_xz.len()
    }

    // Maps full-table ids of one side to dense local ids.
    fn local_ids(&self, z: bool) -> Vec<Option<VarId>> {
        let mut next = 0;
        self.is_z
            .iter()
            .map(|&is_z| {
                (is_z == z).then(|| {
                    next += 1;
                    VarId(next - 1)
                })
            })
            .collect()
    }

    fn project(&self, z: bool) -> (LinearSystem, Vec<Option<VarId>>) {
        let local = self.local_ids(z);
        let mut sys = LinearSystem::new();
        for (_, v) in self.side(z) {
            sys.add_var(v.name.clone(), v.bounds).expect("names are unique");
        }
        (sys, local)
    }

    /// The adversary's domain: z variables with their boxes and the z-block.
    pub fn z_system(&self) -> LinearSystem {
        let (mut sys, local) = self.project(true);
        for row in &self.rows_z {
            let terms = row.coeffs.iter().map(|(v, c)| (local[v.0].expect("z row"), *c));
            sys.add_row(LinearRow::new(terms, row.relation, row.rhs))
                .expect("ids are local");
        }
        sys
    }

    /// x-only system obtained by folding the scenario's z-values into the
    /// right-hand sides of the coupling rows.
    pub fn substitute(&self, scenario: &IntAssignment) -> Result<LinearSystem> {
        let zsys = self.z_system();
        let zvals = zsys.values_of(scenario).map_err(|e| Error::Scenario(e.to_string()))?;
        for (v, value) in zsys.vars().iter().zip(&zvals) {
            if !v.bounds.contains(*value) {
                return Err(Error::Scenario(format!(
                    "{} = {value} lies outside its box",
                    v.name
                )));
            }
        }
        if let Some(i) = zsys.rows().iter().position(|r| !r.holds(&zvals)) {
            return Err(Error::Scenario(format!("scenario violates z-row {i}")));
        }
        Ok(self.substitute_values(&zvals))
    }

    /// Like [`substitute`](Self::substitute) for a dense z-vector already
    /// known to be admissible.
    pub(crate) fn substitute_values(&self, zvals: &[i64]) -> LinearSystem {
        let zlocal = self.local_ids(true);
        let (mut sys, xlocal) = self.project(false);
        for row in &self.rows_x {
            let terms = row.coeffs.iter().map(|(v, c)| (xlocal[v.0].expect("x row"), *c));
            sys.add_row(LinearRow::new(terms, row.relation, row.rhs))
                .expect("ids are local");
        }
        for row in &self.rows_xz {
            let mut rhs = row.rhs;
            let mut terms = Vec::new();
            for (v, c) in &row.coeffs {
                match xlocal[v.0] {
                    Some(x) => terms.push((x, *c)),
                    None => {
                        let z = zlocal[v.0].expect("z var");
                        rhs = rhs - *c * Rational::from_int(zvals[z.0]);
                    }
                }
            }
            sys.add_row(LinearRow::new(terms, row.relation, rhs))
                .expect("ids are local");
        }
        sys
    }

    /// All variables and all rows as one plain system (block tags dropped).
    pub fn flattened(&self) -> LinearSystem {
        let mut sys = self.table.clone();
        for (_, row) in self.tagged_rows() {
            sys.add_row(row.clone()).expect("ids are valid");
        }
        sys
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn block_validation() {
        let mut s = ResiliencySystem::new();
        let x = s.add_x("x", VarBounds::new(0, 1)).unwrap();
        let z = s.add_z("z", VarBounds::new(0, 1)).unwrap();
        assert!(s.add_row(Block::X, LinearRow::leq([(z, r(1))], r(0))).is_err());
        assert!(s.add_row(Block::Z, LinearRow::leq([(x, r(1))], r(0))).is_err());
        s.add_row(Block::Xz, LinearRow::leq([(x, r(1)), (z, r(1))], r(1))).unwrap();
        assert_eq!(s.kappa(), 3);
    }

    #[test]
    fn substitute_folds_constants() {
        let mut s = ResiliencySystem::new();
        let x = s.add_x("x", VarBounds::new(0, 5)).unwrap();
        let z = s.add_z("z", VarBounds::new(0, 3)).unwrap();
        s.add_row(Block::Xz, LinearRow::leq([(x, r(1)), (z, r(1))], r(3))).unwrap();
        let scenario: IntAssignment = [("z".to_string(), 2)].into_iter().collect();
        let sub = s.substitute(&scenario).unwrap();
        assert_eq!(sub.vars().len(), 1);
        assert_eq!(sub.rows()[0], LinearRow::leq([(VarId(0), r(1))], r(1)));

        let mut s = ResiliencySystem::new();
        let x = s.add_x("x", VarBounds::new(0, 5)).unwrap();
        let z = s.add_z("z", VarBounds::new(0, 3)).unwrap();
        s.add_row(Block::Xz, LinearRow::leq([(x, r(2)), (z, r(-3))], r(0))).unwrap();
        let scenario: IntAssignment = [("z".to_string(), 1)].into_iter().collect();
        let sub = s.substitute(&scenario).unwrap();
        assert_eq!(sub.rows()[0], LinearRow::leq([(VarId(0), r(2))], r(3)));
    }

    #[test]
    fn substitute_without_coupling_keeps_x_rows() {
        let mut s = ResiliencySystem::new();
        let x = s.add_x("x", VarBounds::new(0, 5)).unwrap();
        s.add_z("z", VarBounds::new(0, 3)).unwrap();
        let row = LinearRow::leq([(x, r(1))], r(4));
        s.add_row(Block::X, row.clone()).unwrap();
        let scenario: IntAssignment = [("z".to_string(), 0)].into_iter().collect();
        assert_eq!(s.substitute(&scenario).unwrap().rows(), &[row]);
    }

    #[test]
    fn substitute_rejects_bad_scenarios() {
        let mut s = ResiliencySystem::new();
        s.add_x("x", VarBounds::new(0, 5)).unwrap();
        let z = s.add_z("z", VarBounds::new(0, 3)).unwrap();
        s.add_row(Block::Z, LinearRow::leq([(z, r(1))], r(1))).unwrap();
        let two: IntAssignment = [("z".to_string(), 2)].into_iter().collect();
        assert!(matches!(s.substitute(&two), Err(Error::Scenario(_))));
        let nine: IntAssignment = [("z".to_string(), 9)].into_iter().collect();
        assert!(matches!(s.substitute(&nine), Err(Error::Scenario(_))));
        let wrong: IntAssignment = [("w".to_string(), 0)].into_iter().collect();
        assert!(matches!(s.substitute(&wrong), Err(Error::Scenario(_))));
    }
}
