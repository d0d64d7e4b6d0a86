use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{Partition, SkewShape};

/// A 1-based cell `(row, column)`.
pub type Cell = (usize, usize);

/// A filling of a skew shape, read as a lecture hall tableau of order `n`
/// with entries bounded by `t(n + j - i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LectureHallTableau {
    pub shape: SkewShape,
    pub n: u32,
    pub t: u32,
    pub entries: BTreeMap<Cell, u64>,
}

/// `n + j - i`, the denominator attached to a cell.
pub fn cell_denominator(n: u32, (i, j): Cell) -> i64 {
    n as i64 + j as i64 - i as i64
}

impl LectureHallTableau {
    pub fn new(shape: SkewShape, n: u32, t: u32, entries: BTreeMap<Cell, u64>) -> Self {
        Self { shape, n, t, entries }
    }

    /// Builds a straight-shape tableau from its rows.
    pub fn from_rows(n: u32, t: u32, rows: &[Vec<u64>]) -> Result<Self> {
        let parts = rows.iter().map(|r| r.len() as u32).collect();
        let shape = SkewShape::straight(Partition::new(parts)?);
        let mut entries = BTreeMap::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                entries.insert((i + 1, j + 1), v);
            }
        }
        Ok(Self { shape, n, t, entries })
    }

    /// Rows of a straight-shape tableau.
    pub fn rows(&self) -> Vec<Vec<u64>> {
        (1..=self.shape.outer.length())
            .map(|i| {
                (self.shape.inner.part(i) as usize + 1..=self.shape.outer.part(i) as usize)
                    .map(|j| self.entries.get(&(i, j)).copied().unwrap_or(0))
                    .collect()
            })
            .collect()
    }

    pub fn get(&self, cell: Cell) -> Option<u64> {
        self.entries.get(&cell).copied()
    }

    fn check_cells(&self) -> Result<()> {
        self.shape.check()?;
        if self.n == 0 || self.t == 0 {
            return Err(Error::Argument("n and t must be positive".into()));
        }
        let cells = self.shape.cells();
        for &c in &cells {
            if cell_denominator(self.n, c) <= 0 {
                return Err(Error::Shape(format!(
                    "cell {c:?} has n + j - i <= 0 for n = {}",
                    self.n
                )));
            }
            if !self.entries.contains_key(&c) {
                return Err(Error::Validation(format!("missing entry at cell {c:?}")));
            }
        }
        if self.entries.len() != cells.len() {
            let extra = self
                .entries
                .keys()
                .find(|c| !self.shape.contains_cell(**c))
                .copied();
            return Err(Error::Validation(format!("entry outside the shape at {extra:?}")));
        }
        Ok(())
    }

    /// Checks the row, column and bound inequalities with integer arithmetic.
    ///
    /// Returns `Ok(false)` for a well-formed filling that breaks an
    /// inequality; malformed shapes or missing entries are errors.
    pub fn validate(&self) -> Result<bool> {
        self.check_cells()?;
        Ok(self.first_violation().is_none())
    }

    /// The first broken inequality, if any, in reading order.
    pub fn first_violation(&self) -> Option<String> {
        let n = self.n;
        for (&(i, j), &v) in &self.entries {
            let d = cell_denominator(n, (i, j)) as i128;
            let v = v as i128;
            if v >= self.t as i128 * d {
                return Some(format!("L({i},{j}) = {v} is not below {}", self.t as i128 * d));
            }
            if let Some(&r) = self.entries.get(&(i, j + 1)) {
                // L(i,j)/d >= L(i,j+1)/(d+1)
                if v * (d + 1) < r as i128 * d {
                    return Some(format!("row inequality fails between ({i},{j}) and ({i},{})", j + 1));
                }
            }
            if let Some(&b) = self.entries.get(&(i + 1, j)) {
                // L(i,j)/d > L(i+1,j)/(d-1)
                if v * (d - 1) <= b as i128 * d {
                    return Some(format!("column inequality fails between ({i},{j}) and ({},{j})", i + 1));
                }
            }
        }
        None
    }

    /// `⌊L(i,j) / (n + j - i)⌋` on every cell.
    pub fn floor(&self) -> Result<BTreeMap<Cell, u32>> {
        if !self.validate()? {
            return Err(Error::Validation(
                self.first_violation().unwrap_or_default(),
            ));
        }
        Ok(self
            .entries
            .iter()
            .map(|(&c, &v)| (c, (v / cell_denominator(self.n, c) as u64) as u32))
            .collect())
    }

    /// Level partition `λ^(κ)_i = #{j : L(i,j) ≥ κ (n + j - i)}` of a
    /// straight-shape tableau, padded to `n` parts.
    pub fn level(&self, kappa: u32) -> Result<Partition> {
        if !self.shape.is_straight() {
            return Err(Error::Shape("level partitions need a straight shape".into()));
        }
        let mut parts = vec![0u32; self.n as usize];
        for (&(i, j), &v) in &self.entries {
            if i > parts.len() {
                return Err(Error::Shape(format!("row {i} exceeds n = {}", self.n)));
            }
            if v as i128 >= kappa as i128 * cell_denominator(self.n, (i, j)) as i128 {
                parts[i - 1] += 1;
            }
        }
        Partition::new(parts)
    }

    pub fn to_json(&self) -> serde_json::Value {
        TableauJson::from(self).to_value()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: TableauJson = serde_json::from_value(v.clone())?;
        j.into_tableau()
    }
}

pub const TABLEAU_SCHEMA: &str = "hallscope/tableau/v1";

/// On-disk form: 0-based `[row, col, value]` triples.
#[derive(Serialize, Deserialize)]
struct TableauJson {
    schema: String,
    indexing: String,
    n: u32,
    t: u32,
    outer: Vec<u32>,
    inner: Vec<u32>,
    entries: Vec<(usize, usize, u64)>,
}

impl From<&LectureHallTableau> for TableauJson {
    fn from(l: &LectureHallTableau) -> Self {
        Self {
            schema: TABLEAU_SCHEMA.into(),
            indexing: "zero-based".into(),
            n: l.n,
            t: l.t,
            outer: l.shape.outer.parts().to_vec(),
            inner: l.shape.inner.parts().to_vec(),
            entries: l.entries.iter().map(|(&(i, j), &v)| (i - 1, j - 1, v)).collect(),
        }
    }
}

impl TableauJson {
    fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("tableau serializes")
    }

    fn into_tableau(self) -> Result<LectureHallTableau> {
        if self.schema != TABLEAU_SCHEMA {
            return Err(Error::Argument(format!("unexpected schema {:?}", self.schema)));
        }
        if self.indexing != "zero-based" {
            return Err(Error::Argument(format!("unexpected indexing {:?}", self.indexing)));
        }
        let shape = SkewShape::new(Partition::new(self.outer)?, Partition::new(self.inner)?)?;
        let entries = self
            .entries
            .into_iter()
            .map(|(i, j, v)| ((i + 1, j + 1), v))
            .collect();
        Ok(LectureHallTableau::new(shape, self.n, self.t, entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tableau_is_valid() {
        let l = LectureHallTableau::from_rows(2, 3, &[vec![5, 5], vec![2, 3]]).unwrap();
        assert!(l.validate().unwrap());
        let f = l.floor().unwrap();
        assert_eq!(f.values().copied().collect::<Vec<_>>(), vec![2, 1, 2, 1]);
    }

    #[test]
    fn column_violation_detected() {
        // 5/2 > 3/1 is false
        let l = LectureHallTableau::from_rows(2, 3, &[vec![5, 5], vec![3, 3]]).unwrap();
        assert!(!l.validate().unwrap());
        assert!(matches!(l.floor(), Err(Error::Validation(_))));
    }

    #[test]
    fn empty_tableau_is_valid() {
        let l = LectureHallTableau::from_rows(3, 2, &[]).unwrap();
        assert!(l.validate().unwrap());
        assert!(l.floor().unwrap().is_empty());
    }

    #[test]
    fn single_cell_floor() {
        let l = LectureHallTableau::from_rows(5, 2, &[vec![9]]).unwrap();
        assert_eq!(l.floor().unwrap()[&(1, 1)], 1);
    }

    #[test]
    fn zero_tableau_floors_to_zero() {
        let l = LectureHallTableau::from_rows(3, 2, &[vec![0, 0, 0]]).unwrap();
        assert!(l.floor().unwrap().values().all(|&v| v == 0));
    }

    #[test]
    fn bound_is_strict() {
        let l = LectureHallTableau::from_rows(2, 3, &[vec![6]]).unwrap();
        assert!(!l.validate().unwrap());
        let l = LectureHallTableau::from_rows(2, 3, &[vec![5]]).unwrap();
        assert!(l.validate().unwrap());
    }

    #[test]
    fn missing_entry_is_an_error() {
        let mut l = LectureHallTableau::from_rows(2, 3, &[vec![5, 5]]).unwrap();
        l.entries.remove(&(1, 2));
        assert!(matches!(l.validate(), Err(Error::Validation(_))));
    }

    #[test]
    fn malformed_shape_is_an_error() {
        let shape = SkewShape {
            outer: Partition::parse("1").unwrap(),
            inner: Partition::parse("2").unwrap(),
        };
        let l = LectureHallTableau::new(shape, 2, 2, BTreeMap::new());
        assert!(matches!(l.validate(), Err(Error::Shape(_))));
    }

    #[test]
    fn json_round_trip_is_zero_based() {
        let l = LectureHallTableau::from_rows(2, 3, &[vec![5, 5], vec![2, 3]]).unwrap();
        let v = l.to_json();
        assert_eq!(v["entries"][0], serde_json::json!([0, 0, 5]));
        assert_eq!(LectureHallTableau::from_json(&v).unwrap(), l);
    }
}
