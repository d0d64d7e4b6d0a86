//! Exhaustive enumeration, exact weighted counting and exact sampling of
//! bounded lecture hall tableaux.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::partition::{Partition, SkewShape};
use crate::paths::{right_step, tableau_to_paths, PathConfig, Vertex};
use crate::tableau::{cell_denominator, Cell, LectureHallTableau};

/// A finite instance: shape `λ`, order `n`, bound `t`, and optional weights
/// `x_0..x_{t-1}` attached to floor values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationSpec {
    pub lambda: Partition,
    pub n: u32,
    pub t: u32,
    pub weights: Option<Vec<BigRational>>,
}

/// Default limit on the number of interface states kept by the sampler.
pub const DEFAULT_STATE_LIMIT: usize = 2_000_000;

impl EnumerationSpec {
    pub fn new(lambda: Partition, n: u32, t: u32) -> Self {
        Self { lambda, n, t, weights: None }
    }

    pub fn with_weights(mut self, w: Vec<BigRational>) -> Self {
        self.weights = Some(w);
        self
    }

    pub fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Argument("n must be positive".into()));
        }
        if self.t == 0 {
            return Err(Error::Argument("t must be positive".into()));
        }
        if self.lambda.length() > self.n as usize {
            return Err(Error::Argument(format!(
                "{} has more than n = {} parts",
                self.lambda, self.n
            )));
        }
        if let Some(w) = &self.weights {
            if w.len() != self.t as usize {
                return Err(Error::Argument(format!(
                    "expected {} weights, got {}",
                    self.t,
                    w.len()
                )));
            }
            if w.iter().any(|x| *x <= BigRational::zero()) {
                return Err(Error::Argument("weights must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn weight(&self, floor: u64) -> BigRational {
        match &self.weights {
            Some(w) => w[floor as usize].clone(),
            None => BigRational::one(),
        }
    }

    pub fn shape(&self) -> SkewShape {
        SkewShape::straight(self.lambda.trimmed())
    }
}

/// Calls `visit` on every bounded tableau of a (possibly skew) shape, in
/// lexicographic order of the entries read row by row.
pub fn for_each_lht(
    shape: &SkewShape,
    n: u32,
    t: u32,
    mut visit: impl FnMut(&BTreeMap<Cell, u64>),
) -> Result<()> {
    shape.check()?;
    let cells = shape.cells();
    for &c in &cells {
        if cell_denominator(n, c) <= 0 {
            return Err(Error::Shape(format!("cell {c:?} lies beyond order n = {n}")));
        }
    }
    let mut entries = BTreeMap::new();
    fn rec(
        k: usize,
        cells: &[Cell],
        n: u32,
        t: u32,
        entries: &mut BTreeMap<Cell, u64>,
        visit: &mut dyn FnMut(&BTreeMap<Cell, u64>),
    ) {
        if k == cells.len() {
            visit(entries);
            return;
        }
        let (i, j) = cells[k];
        let d = cell_denominator(n, (i, j)) as u64;
        let mut hi = t as u64 * d - 1;
        if let Some(&left) = entries.get(&(i, j - 1)) {
            // left/(d-1) >= L/d
            hi = hi.min(left * d / (d - 1));
        }
        if let Some(&above) = entries.get(&(i - 1, j)) {
            // above/(d+1) > L/d  <=>  L (d+1) < above d
            let num = above * d;
            if num == 0 {
                return;
            }
            hi = hi.min((num - 1) / (d + 1));
        }
        for v in 0..=hi {
            entries.insert((i, j), v);
            rec(k + 1, cells, n, t, entries, visit);
        }
        entries.remove(&(i, j));
    }
    rec(0, &cells, n, t, &mut entries, &mut visit);
    Ok(())
}

/// All bounded tableaux of the instance, in lexicographic order.
pub fn enumerate_lht(spec: &EnumerationSpec) -> Result<Vec<LectureHallTableau>> {
    spec.check()?;
    let shape = spec.shape();
    let mut out = Vec::new();
    for_each_lht(&shape, spec.n, spec.t, |e| {
        out.push(LectureHallTableau::new(shape.clone(), spec.n, spec.t, e.clone()));
    })?;
    Ok(out)
}

/// Column-interface transfer structure on the path model.
///
/// The state after column `c` lists, top to bottom, the indices at which the
/// paths continuing to column `c + 1` leave column `c`.
struct Interfaces<'a> {
    spec: &'a EnumerationSpec,
    lambda: Partition,
    max_col: u32,
}

type State = Vec<u64>;

impl<'a> Interfaces<'a> {
    fn new(spec: &'a EnumerationSpec) -> Result<Self> {
        spec.check()?;
        let lambda = spec.lambda.padded(spec.n as usize)?;
        let max_col = spec.n - 1 + lambda.part(1);
        Ok(Self { spec, lambda, max_col })
    }

    /// Index of the path ending at column `c`, if any.
    fn ending_at(&self, c: u32) -> Option<usize> {
        (1..=self.spec.n as usize).find(|&i| self.spec.n - i as u32 + self.lambda.part(i) == c)
    }

    /// Entry indices into column `c`, top to bottom.
    fn arrivals(&self, c: u32, prev: &State) -> Vec<u64> {
        let mut a = Vec::with_capacity(prev.len() + 1);
        if c < self.spec.n {
            a.push(self.spec.t as u64 * (c as u64 + 1) - 1);
        }
        a.extend(prev.iter().map(|&e| right_step(Vertex::new(c - 1, e)).idx));
        a
    }

    /// Calls `f(next_state, weight)` for every way through column `c`.
    fn successors(&self, c: u32, prev: &State, mut f: impl FnMut(&State, &BigRational)) {
        let arr = self.arrivals(c, prev);
        let m = arr.len();
        if m == 0 {
            f(&Vec::new(), &BigRational::one());
            return;
        }
        let ends = self.ending_at(c).is_some();
        let cw = c as u64 + 1;
        let ranges: Vec<(u64, u64)> = (0..m)
            .map(|k| {
                if k + 1 < m {
                    (arr[k + 1] + 1, arr[k])
                } else if ends {
                    (0, 0)
                } else {
                    (0, arr[k])
                }
            })
            .collect();
        let keep = if ends { m - 1 } else { m };
        let mut cur = vec![0u64; keep];
        let mut w = vec![BigRational::one(); keep + 1];
        fn rec(
            k: usize,
            keep: usize,
            ranges: &[(u64, u64)],
            cw: u64,
            it: &Interfaces<'_>,
            cur: &mut Vec<u64>,
            w: &mut Vec<BigRational>,
            f: &mut dyn FnMut(&State, &BigRational),
        ) {
            if k == keep {
                f(cur, &w[keep]);
                return;
            }
            let (lo, hi) = ranges[k];
            for e in lo..=hi {
                cur[k] = e;
                w[k + 1] = &w[k] * it.spec.weight(e / cw);
                rec(k + 1, keep, ranges, cw, it, cur, w, f);
            }
        }
        rec(0, keep, &ranges, cw, self, &mut cur, &mut w, &mut f);
    }

    /// Forward weighted sums over all states, one map per column.
    fn forward(&self, limit: usize) -> Result<Vec<HashMap<State, BigRational>>> {
        let mut layers: Vec<HashMap<State, BigRational>> = Vec::new();
        let mut cur: HashMap<State, BigRational> = HashMap::new();
        cur.insert(Vec::new(), BigRational::one());
        let mut total = 0usize;
        for c in 0..=self.max_col {
            let mut next: HashMap<State, BigRational> = HashMap::new();
            for (s, v) in &cur {
                self.successors(c, s, |s2, w| {
                    *next.entry(s2.clone()).or_insert_with(BigRational::zero) += v * w;
                });
            }
            total += next.len();
            if total > limit {
                return Err(Error::Capacity { what: "interface states", size: total, limit });
            }
            layers.push(next.clone());
            cur = next;
        }
        Ok(layers)
    }
}

/// Weighted count `Σ_L ∏ x_{⌊L⌋(i,j)}`; the plain count without weights.
pub fn count_lht(spec: &EnumerationSpec) -> Result<BigRational> {
    let it = Interfaces::new(spec)?;
    let layers = it.forward(usize::MAX)?;
    Ok(layers
        .last()
        .and_then(|l| l.get(&Vec::new()).cloned())
        .unwrap_or_else(BigRational::zero))
}

/// Unweighted count as an integer.
pub fn count_lht_int(spec: &EnumerationSpec) -> Result<BigInt> {
    let mut s = spec.clone();
    s.weights = None;
    Ok(count_lht(&s)?.to_integer())
}

/// Exact sampler; the transfer tables are built once and reused.
pub struct ExactSampler {
    spec: EnumerationSpec,
    lambda: Partition,
    max_col: u32,
    /// `back[c][s]`: weight of all completions from state `s` after column `c`.
    back: Vec<HashMap<State, f64>>,
}

impl ExactSampler {
    pub fn new(spec: &EnumerationSpec) -> Result<Self> {
        Self::with_limit(spec, DEFAULT_STATE_LIMIT)
    }

    pub fn with_limit(spec: &EnumerationSpec, limit: usize) -> Result<Self> {
        let it = Interfaces::new(spec)?;
        let layers = it.forward(limit)?;
        let last = layers.len() - 1;
        let mut back_exact: Vec<HashMap<State, BigRational>> = vec![HashMap::new(); layers.len()];
        back_exact[last].insert(Vec::new(), BigRational::one());
        for c in (0..last).rev() {
            let mut m = HashMap::with_capacity(layers[c].len());
            for s in layers[c].keys() {
                let mut acc = BigRational::zero();
                it.successors(c as u32 + 1, s, |s2, w| {
                    if let Some(b) = back_exact[c + 1].get(s2) {
                        acc += w * b;
                    }
                });
                m.insert(s.clone(), acc);
            }
            back_exact[c] = m;
        }
        // normalize each layer by its maximum so f64 never overflows
        let back = back_exact
            .into_iter()
            .map(|m| {
                let scale = m.values().max().cloned().unwrap_or_else(BigRational::one);
                m.into_iter()
                    .map(|(k, v)| (k, (v / &scale).to_f64().unwrap_or(0.0)))
                    .collect()
            })
            .collect();
        Ok(Self {
            spec: spec.clone(),
            lambda: it.lambda.clone(),
            max_col: it.max_col,
            back,
        })
    }

    pub fn table_size(&self) -> usize {
        self.back.iter().map(|m| m.len()).sum()
    }

    /// Draws one tableau with probability proportional to its weight.
    pub fn sample_tableau<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LectureHallTableau> {
        let it = Interfaces {
            spec: &self.spec,
            lambda: self.lambda.clone(),
            max_col: self.max_col,
        };
        let n = self.spec.n;
        let mut state: State = Vec::new();
        let mut entries = BTreeMap::new();
        for c in 0..=self.max_col {
            let mut cands: Vec<(State, f64)> = Vec::new();
            let mut total = 0.0;
            it.successors(c, &state, |s2, w| {
                if let Some(&b) = self.back[c as usize].get(s2) {
                    let p = w.to_f64().unwrap_or(0.0) * b;
                    if p > 0.0 {
                        total += p;
                        cands.push((s2.clone(), p));
                    }
                }
            });
            if cands.is_empty() {
                return Err(Error::Consistency(format!("no continuation at column {c}")));
            }
            let mut r = rng.random::<f64>() * total;
            let mut pick = cands.len() - 1;
            for (k, (_, p)) in cands.iter().enumerate() {
                if r < *p {
                    pick = k;
                    break;
                }
                r -= p;
            }
            let next = cands.swap_remove(pick).0;
            for (&i, &e) in self.present(c).iter().zip(&next) {
                let j = (c as i64 - (n as i64 - i as i64) + 1) as usize;
                entries.insert((i, j), e);
            }
            state = next;
        }
        let l = LectureHallTableau::new(self.spec.shape(), n, self.spec.t, entries);
        debug_assert_eq!(l.validate().ok(), Some(true));
        Ok(l)
    }

    /// Paths present in column `c`, top to bottom.
    fn present(&self, c: u32) -> Vec<usize> {
        let n = self.spec.n;
        (1..=n as usize)
            .filter(|&i| n - i as u32 <= c && c <= n - i as u32 + self.lambda.part(i))
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PathConfig> {
        tableau_to_paths(&self.sample_tableau(rng)?)
    }
}
