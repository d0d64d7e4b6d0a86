//! The lecture hall graph and non-intersecting path configurations on it.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{Partition, SkewShape};
use crate::tableau::LectureHallTableau;

/// Vertex `(col, idx / (col + 1))` of the lecture hall graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub col: u32,
    pub idx: u64,
}

impl Vertex {
    pub fn new(col: u32, idx: u64) -> Self {
        Self { col, idx }
    }

    pub fn height(&self) -> f64 {
        self.idx as f64 / (self.col as f64 + 1.0)
    }

    pub fn x(&self) -> f64 {
        self.col as f64
    }
}

/// The graph with vertex heights `idx / (col + 1)`, `idx < t (col + 1)`,
/// materialized for columns `0..=max_col`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LhGraph {
    pub t: u32,
    pub max_col: u32,
}

impl LhGraph {
    pub fn new(t: u32, max_col: u32) -> Self {
        Self { t, max_col }
    }

    /// Number of vertices in column `col`.
    pub fn column_size(&self, col: u32) -> u64 {
        self.t as u64 * (col as u64 + 1)
    }

    pub fn has_vertex(&self, v: Vertex) -> bool {
        v.col <= self.max_col && v.idx < self.column_size(v.col)
    }

    /// The right neighbour: `(c, k + r/(c+1)) -> (c+1, k + r/(c+2))`.
    pub fn right_of(&self, v: Vertex) -> Option<Vertex> {
        if v.col >= self.max_col || !self.has_vertex(v) {
            return None;
        }
        Some(right_step(v))
    }

    pub fn down_of(&self, v: Vertex) -> Option<Vertex> {
        (v.idx > 0 && self.has_vertex(v)).then(|| Vertex::new(v.col, v.idx - 1))
    }

    pub fn is_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.down_of(a) == Some(b) || self.right_of(a) == Some(b)
    }

    /// All vertices, column by column.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..=self.max_col)
            .flat_map(move |c| (0..self.column_size(c)).map(move |i| Vertex::new(c, i)))
    }
}

pub(crate) fn right_step(v: Vertex) -> Vertex {
    let c = v.col as u64;
    let (k, r) = (v.idx / (c + 1), v.idx % (c + 1));
    Vertex::new(v.col + 1, k * (c + 2) + r)
}

/// `n` vertex-disjoint down/right paths on the lecture hall graph; path `i`
/// (1-based) runs from the top of column `n - i` to the bottom of column
/// `n - i + λ_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathConfig {
    pub graph: LhGraph,
    pub n: u32,
    pub lambda: Partition,
    pub paths: Vec<Vec<Vertex>>,
}

/// A non-vertical edge, stored by its left endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RightEdge {
    pub path: usize,
    pub from: Vertex,
}

impl PathConfig {
    pub fn t(&self) -> u32 {
        self.graph.t
    }

    pub fn start(n: u32, t: u32, i: usize) -> Vertex {
        let col = n - i as u32;
        Vertex::new(col, t as u64 * (col as u64 + 1) - 1)
    }

    pub fn end(n: u32, lambda: &Partition, i: usize) -> Vertex {
        Vertex::new(n - i as u32 + lambda.part(i), 0)
    }

    /// Checks endpoints, edges and vertex-disjointness.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let bad = |m: String| Err(Error::MalformedConfig(m));
        if self.lambda.len() != n as usize {
            return bad(format!("lambda {} does not have {n} parts", self.lambda));
        }
        if self.paths.len() != n as usize {
            return bad(format!("expected {n} paths, got {}", self.paths.len()));
        }
        if self.graph.max_col < n.saturating_sub(1) + self.lambda.part(1) {
            return bad("graph does not reach the last endpoint".into());
        }
        let mut seen = HashSet::new();
        for (k, path) in self.paths.iter().enumerate() {
            let i = k + 1;
            let (Some(&first), Some(&last)) = (path.first(), path.last()) else {
                return bad(format!("path {i} is empty"));
            };
            if first != Self::start(n, self.t(), i) || last != Self::end(n, &self.lambda, i) {
                return bad(format!("path {i} has wrong endpoints"));
            }
            for w in path.windows(2) {
                if !self.graph.is_edge(w[0], w[1]) {
                    return bad(format!("path {i}: {:?} -> {:?} is not an edge", w[0], w[1]));
                }
            }
            for &v in path {
                if !self.graph.has_vertex(v) {
                    return bad(format!("path {i}: vertex {v:?} not in the graph"));
                }
                if !seen.insert(v) {
                    return bad(format!("paths share vertex {v:?}"));
                }
            }
        }
        Ok(())
    }

    /// Left endpoints of all non-vertical edges.
    pub fn right_edges(&self) -> Vec<RightEdge> {
        let mut out = Vec::new();
        for (k, path) in self.paths.iter().enumerate() {
            for w in path.windows(2) {
                if w[1].col == w[0].col + 1 {
                    out.push(RightEdge { path: k + 1, from: w[0] });
                }
            }
        }
        out
    }

    /// Rebuilds a configuration from the left endpoints of its non-vertical
    /// edges given as `(col, num, den)` heights `num / den`.
    pub fn from_edges(n: u32, t: u32, lambda: &Partition, edges: &[(u32, u64, u64)]) -> Result<Self> {
        let lambda = lambda.padded(n as usize)?;
        let mut by_col: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
        for &(col, num, den) in edges {
            let c1 = col as u64 + 1;
            if den == 0 || (num * c1) % den != 0 {
                return Err(Error::MalformedConfig(format!(
                    "edge at column {col} has height {num}/{den}, not of the form m/{c1}"
                )));
            }
            by_col.entry(col).or_default().push(num * c1 / den);
        }
        let mut entries = BTreeMap::new();
        let cells = SkewShape::straight(lambda.clone()).cells();
        // Cells on one diagonal share a column; higher rows sit higher.
        let mut diag: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
        for (i, j) in cells {
            let col = (n as i64 + j as i64 - i as i64 - 1) as u32;
            diag.entry(col).or_default().push((i, j));
        }
        for (col, mut idxs) in by_col {
            let cs = diag.remove(&col).unwrap_or_default();
            if cs.len() != idxs.len() {
                return Err(Error::MalformedConfig(format!(
                    "column {col} has {} non-vertical edges, shape needs {}",
                    idxs.len(),
                    cs.len()
                )));
            }
            idxs.sort_unstable_by(|a, b| b.cmp(a));
            for (cell, idx) in cs.into_iter().zip(idxs) {
                entries.insert(cell, idx);
            }
        }
        if let Some((col, _)) = diag.into_iter().next() {
            return Err(Error::MalformedConfig(format!("column {col} is missing non-vertical edges")));
        }
        let l = LectureHallTableau::new(SkewShape::straight(lambda.trimmed()), n, t, entries);
        if !l.validate().map_err(|e| Error::MalformedConfig(e.to_string()))? {
            return Err(Error::MalformedConfig(
                l.first_violation().unwrap_or_default(),
            ));
        }
        tableau_to_paths(&l)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let edges: Vec<(u32, u64, u64)> = self
            .right_edges()
            .into_iter()
            .map(|e| (e.from.col, e.from.idx, e.from.col as u64 + 1))
            .collect();
        serde_json::json!({
            "schema": PATHS_SCHEMA,
            "n": self.n,
            "t": self.t(),
            "lambda": self.lambda.parts(),
            "edges": edges,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct J {
            schema: String,
            n: u32,
            t: u32,
            lambda: Partition,
            edges: Vec<(u32, u64, u64)>,
        }
        let j: J = serde_json::from_value(v.clone())?;
        if j.schema != PATHS_SCHEMA {
            return Err(Error::Argument(format!("unexpected schema {:?}", j.schema)));
        }
        Self::from_edges(j.n, j.t, &j.lambda, &j.edges)
    }
}

pub const PATHS_SCHEMA: &str = "hallscope/paths/v1";

/// The path configuration of a straight-shape tableau: the `j`-th right step
/// of path `i` leaves column `n + j - i - 1` at height `L(i,j) / (n + j - i)`.
pub fn tableau_to_paths(l: &LectureHallTableau) -> Result<PathConfig> {
    if !l.shape.is_straight() {
        return Err(Error::Shape("path model needs a straight shape".into()));
    }
    if !l.validate()? {
        return Err(Error::Validation(l.first_violation().unwrap_or_default()));
    }
    let n = l.n;
    let lambda = l.shape.outer.padded(n as usize)?;
    let graph = LhGraph::new(l.t, n - 1 + lambda.part(1));
    let mut paths = Vec::with_capacity(n as usize);
    for i in 1..=n as usize {
        let mut cur = PathConfig::start(n, l.t, i);
        let mut path = vec![cur];
        for j in 1..=lambda.part(i) as usize {
            let target = l.entries[&(i, j)];
            if target > cur.idx {
                return Err(Error::Consistency(format!(
                    "path {i} arrives at index {} below its next departure {target}",
                    cur.idx
                )));
            }
            while cur.idx > target {
                cur.idx -= 1;
                path.push(cur);
            }
            cur = right_step(cur);
            path.push(cur);
        }
        while cur.idx > 0 {
            cur.idx -= 1;
            path.push(cur);
        }
        paths.push(path);
    }
    let mut seen = HashSet::new();
    for v in paths.iter().flatten() {
        if !seen.insert(*v) {
            return Err(Error::Consistency(format!("paths intersect at {v:?}")));
        }
    }
    Ok(PathConfig { graph, n, lambda, paths })
}

/// Inverse of [`tableau_to_paths`].
pub fn paths_to_tableau(p: &PathConfig) -> Result<LectureHallTableau> {
    p.validate()?;
    let n = p.n;
    let mut entries = BTreeMap::new();
    let mut counts = vec![0usize; n as usize + 1];
    for e in p.right_edges() {
        counts[e.path] += 1;
        let cell = (e.path, counts[e.path]);
        let expected_col = n as i64 + cell.1 as i64 - cell.0 as i64 - 1;
        if expected_col != e.from.col as i64 {
            return Err(Error::MalformedConfig(format!(
                "right step {cell:?} leaves column {} instead of {expected_col}",
                e.from.col
            )));
        }
        entries.insert(cell, e.from.idx);
    }
    let l = LectureHallTableau::new(SkewShape::straight(p.lambda.trimmed()), n, p.t(), entries);
    if !l.validate()? {
        return Err(Error::Consistency(l.first_violation().unwrap_or_default()));
    }
    Ok(l)
}

/// Reads `λ^(κ)` for `κ = 0..t` from the columns whose vertical edge just
/// below height `κ` is used by a path (for `κ = 0`, the end columns).
pub fn level_partitions(p: &PathConfig) -> Result<Vec<Partition>> {
    p.validate()?;
    let n = p.n as usize;
    let mut used: HashSet<(Vertex, Vertex)> = HashSet::new();
    for path in &p.paths {
        for w in path.windows(2) {
            if w[0].col == w[1].col {
                used.insert((w[0], w[1]));
            }
        }
    }
    let mut out = Vec::with_capacity(p.t() as usize);
    for kappa in 0..p.t() as u64 {
        let present: Vec<u32> = if kappa == 0 {
            let mut ends: Vec<u32> = p.paths.iter().map(|q| q.last().unwrap().col).collect();
            ends.sort_unstable();
            ends
        } else {
            (0..=p.graph.max_col)
                .filter(|&c| {
                    let hi = Vertex::new(c, kappa * (c as u64 + 1));
                    let lo = Vertex::new(c, hi.idx - 1);
                    used.contains(&(hi, lo))
                })
                .collect()
        };
        if present.len() != n {
            return Err(Error::Consistency(format!(
                "level {kappa} crosses {} vertical edges, expected {n}",
                present.len()
            )));
        }
        // j-th rightmost present column c has c - (n - j) absent columns to its left
        let parts = (1..=n)
            .map(|j| present[n - j] - (n - j) as u32)
            .collect();
        out.push(Partition::new(parts)?);
    }
    Ok(out)
}

/// Integer height at sampled points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightField {
    pub samples: Vec<((f64, f64), u32)>,
}

/// Where a path crosses the horizontal line at height `y`. Above the start
/// (below the end) the path is extended vertically.
fn crossing_x(path: &[Vertex], y: f64) -> std::result::Result<f64, Vertex> {
    let first = path[0];
    if y >= first.height() {
        return if y == first.height() { Err(first) } else { Ok(first.x()) };
    }
    let last = *path.last().unwrap();
    if y < 0.0 {
        return Ok(last.x());
    }
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ha, hb) = (a.height(), b.height());
        if y == ha {
            return Err(a);
        }
        if y == hb {
            return Err(b);
        }
        if y < ha && y > hb {
            return Ok(a.x() + (b.x() - a.x()) * (ha - y) / (ha - hb));
        }
    }
    Ok(last.x())
}

/// `h(x, y)` = number of paths crossing the line at height `y` strictly left
/// of `x`.
pub fn height_function(p: &PathConfig, grid: &[(f64, f64)]) -> Result<HeightField> {
    p.validate()?;
    let mut samples = Vec::with_capacity(grid.len());
    for &(x, y) in grid {
        let mut h = 0;
        for path in &p.paths {
            match crossing_x(path, y) {
                Err(v) if v.x() == x => {
                    return Err(Error::Query(format!("({x}, {y}) is the vertex {v:?}")))
                }
                Err(v) => {
                    // the line passes through a vertex elsewhere; nudge along the path
                    if v.x() < x {
                        h += 1;
                    }
                }
                Ok(cx) if (cx - x).abs() < 1e-12 => {
                    return Err(Error::Query(format!("({x}, {y}) lies on a path")))
                }
                Ok(cx) => {
                    if cx < x {
                        h += 1;
                    }
                }
            }
        }
        samples.push(((x, y), h));
    }
    Ok(HeightField { samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> LectureHallTableau {
        LectureHallTableau::from_rows(2, 3, &[vec![5, 5], vec![2, 3]]).unwrap()
    }

    /// Tableau whose paths are drawn in the 5-path, t = 4 example.
    pub(crate) fn five_path_example() -> LectureHallTableau {
        LectureHallTableau::from_rows(5, 4, &[vec![16, 8, 9, 4], vec![11, 5, 6], vec![7]]).unwrap()
    }

    #[test]
    fn right_steps_match_tableau() {
        let p = tableau_to_paths(&small()).unwrap();
        let edges: Vec<(usize, u32, u64)> = p
            .right_edges()
            .iter()
            .map(|e| (e.path, e.from.col, e.from.idx))
            .collect();
        // heights 5/2, 5/3 and 2/1, 3/2
        assert_eq!(edges, vec![(1, 1, 5), (1, 2, 5), (2, 0, 2), (2, 1, 3)]);
        assert_eq!(paths_to_tableau(&p).unwrap(), small());
    }

    #[test]
    fn empty_shape_gives_vertical_paths() {
        let l = LectureHallTableau::from_rows(3, 2, &[]).unwrap();
        let p = tableau_to_paths(&l).unwrap();
        assert!(p.right_edges().is_empty());
        for (k, path) in p.paths.iter().enumerate() {
            assert!(path.iter().all(|v| v.col == 2 - k as u32));
        }
        let back = paths_to_tableau(&p).unwrap();
        assert!(back.entries.is_empty());
        for lp in level_partitions(&p).unwrap() {
            assert_eq!(lp.size(), 0);
        }
    }

    #[test]
    fn five_path_levels() {
        let p = tableau_to_paths(&five_path_example()).unwrap();
        let lv = level_partitions(&p).unwrap();
        let want = ["4,3,1,0,0", "3,3,1,0,0", "1,1,1,0,0", "1,0,0,0,0"];
        for (k, w) in want.iter().enumerate() {
            assert_eq!(lv[k], Partition::parse(w).unwrap(), "level {k}");
        }
        let ends: Vec<u32> = p.paths.iter().map(|q| q.last().unwrap().col).collect();
        assert_eq!(ends, vec![8, 6, 3, 1, 0]);
    }

    #[test]
    fn levels_agree_with_floor_counts() {
        let l = five_path_example();
        let p = tableau_to_paths(&l).unwrap();
        let lv = level_partitions(&p).unwrap();
        let fl = l.floor().unwrap();
        for (k, lp) in lv.iter().enumerate() {
            for i in 1..=5 {
                let cnt = fl.iter().filter(|(c, &v)| c.0 == i && v as usize >= k).count();
                assert_eq!(lp.part(i) as usize, cnt);
            }
        }
    }

    #[test]
    fn height_examples() {
        let p = tableau_to_paths(&five_path_example()).unwrap();
        let h = height_function(&p, &[(-0.5, 0.05), (2.5, 0.05), (8.5, 0.05), (9.0, 3.9)]).unwrap();
        let vals: Vec<u32> = h.samples.iter().map(|s| s.1).collect();
        assert_eq!(vals, vec![0, 2, 5, 5]);
        assert!(matches!(
            height_function(&p, &[(0.0, 0.0)]),
            Err(Error::Query(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let p = tableau_to_paths(&five_path_example()).unwrap();
        let back = PathConfig::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn off_lattice_edge_is_malformed() {
        let lam = Partition::parse("1").unwrap();
        let r = PathConfig::from_edges(2, 3, &lam, &[(1, 1, 3)]);
        assert!(matches!(r, Err(Error::MalformedConfig(_))));
    }

    #[test]
    fn validate_rejects_shared_vertices() {
        let mut p = tableau_to_paths(&small()).unwrap();
        p.paths[1] = p.paths[0].clone();
        assert!(p.validate().is_err());
    }
}
