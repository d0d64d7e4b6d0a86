//! Local Markov chains on bounded lecture hall tableaux.
//!
//! Changing one entry `L(i,j)` by one moves a single right step of path `i`
//! up or down by one vertex, i.e. flips one corner of the path across a face
//! of the lecture hall graph.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::enumerate::EnumerationSpec;
use crate::error::{Error, Result};
use crate::paths::{tableau_to_paths, PathConfig};
use crate::tableau::LectureHallTableau;

/// Per-chain generator derived from `(seed, chain)` by hashing.
pub fn chain_rng(seed: u64, chain: u64) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(b"hallscope-chain");
    h.update(seed.to_le_bytes());
    h.update(chain.to_le_bytes());
    let digest: [u8; 32] = h.finalize().into();
    ChaCha8Rng::from_seed(digest)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    /// `L(i,j) ± 1` with a Metropolis filter.
    Flip,
    /// Resample `L(i,j)` from its conditional law given the other entries.
    HeatBath,
}

/// Chain state: the entries of a straight-shape tableau, row by row.
#[derive(Clone, Debug)]
pub struct Chain {
    n: u32,
    t: u32,
    rows: Vec<Vec<u64>>,
    cells: Vec<(usize, usize)>,
    weights: Option<Vec<f64>>,
    pub proposals: u64,
    pub accepted: u64,
}

impl Chain {
    /// Starts from the entry-wise minimal tableau.
    pub fn new(spec: &EnumerationSpec) -> Result<Self> {
        spec.check()?;
        let lam = spec.lambda.trimmed();
        let rows: Vec<Vec<u64>> = lam.parts().iter().map(|&p| vec![0; p as usize]).collect();
        let cells = crate::partition::SkewShape::straight(lam).cells();
        let weights = spec
            .weights
            .as_ref()
            .map(|w| w.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect());
        let mut c = Self { n: spec.n, t: spec.t, rows, cells, weights, proposals: 0, accepted: 0 };
        for k in (0..c.cells.len()).rev() {
            let (i, j) = c.cells[k];
            let lo = c.lower_bound(i, j);
            if lo >= spec.t as u64 * c.d(i, j) {
                return Err(Error::Argument(format!(
                    "no bounded tableau of shape {} with n = {}, t = {}",
                    spec.lambda, spec.n, spec.t
                )));
            }
            c.rows[i - 1][j - 1] = lo;
        }
        debug_assert!(c.tableau().validate().unwrap_or(false));
        Ok(c)
    }

    fn d(&self, i: usize, j: usize) -> u64 {
        (self.n as i64 + j as i64 - i as i64) as u64
    }

    fn entry(&self, i: usize, j: usize) -> Option<u64> {
        if i == 0 || j == 0 {
            return None;
        }
        self.rows.get(i - 1).and_then(|r| r.get(j - 1)).copied()
    }

    /// Admissible range of `L(i,j)` given its four neighbours.
    fn bounds(&self, i: usize, j: usize) -> (u64, u64) {
        let d = self.d(i, j);
        let lo = self.lower_bound(i, j);
        let mut hi = self.t as u64 * d - 1;
        if let Some(left) = self.entry(i, j - 1) {
            hi = hi.min(left * d / (d - 1));
        }
        if let Some(above) = self.entry(i - 1, j) {
            let num = above * d;
            if num == 0 {
                return (1, 0);
            }
            hi = hi.min((num - 1) / (d + 1));
        }
        (lo, hi)
    }

    /// Smallest `L(i,j)` allowed by the right and lower neighbours.
    fn lower_bound(&self, i: usize, j: usize) -> u64 {
        let d = self.d(i, j);
        let mut lo = 0u64;
        if let Some(right) = self.entry(i, j + 1) {
            lo = lo.max((right * d).div_ceil(d + 1));
        }
        if let Some(below) = self.entry(i + 1, j) {
            lo = lo.max(below * d / (d - 1) + 1);
        }
        lo
    }

    fn weight(&self, v: u64, d: u64) -> f64 {
        match &self.weights {
            Some(w) => w[(v / d) as usize],
            None => 1.0,
        }
    }

    pub fn step<R: Rng + ?Sized>(&mut self, kind: MoveKind, rng: &mut R) {
        if self.cells.is_empty() {
            return;
        }
        let (i, j) = self.cells[rng.random_range(0..self.cells.len())];
        let d = self.d(i, j);
        let cur = self.rows[i - 1][j - 1];
        let (lo, hi) = self.bounds(i, j);
        self.proposals += 1;
        match kind {
            MoveKind::Flip => {
                let up = rng.random::<bool>();
                let new = if up { cur + 1 } else { cur.wrapping_sub(1) };
                if !up && cur == 0 {
                    return;
                }
                if new < lo || new > hi {
                    return;
                }
                if self.weights.is_some() {
                    let ratio = self.weight(new, d) / self.weight(cur, d);
                    if ratio < 1.0 && rng.random::<f64>() >= ratio {
                        return;
                    }
                }
                self.rows[i - 1][j - 1] = new;
                self.accepted += 1;
            }
            MoveKind::HeatBath => {
                let new = if self.weights.is_none() {
                    rng.random_range(lo..=hi)
                } else {
                    let total: f64 = (lo..=hi).map(|v| self.weight(v, d)).sum();
                    let mut r = rng.random::<f64>() * total;
                    let mut pick = hi;
                    for v in lo..=hi {
                        let w = self.weight(v, d);
                        if r < w {
                            pick = v;
                            break;
                        }
                        r -= w;
                    }
                    pick
                };
                if new != cur {
                    self.accepted += 1;
                }
                self.rows[i - 1][j - 1] = new;
            }
        }
    }

    /// One sweep is `|λ|` single-cell updates.
    pub fn sweep<R: Rng + ?Sized>(&mut self, kind: MoveKind, rng: &mut R) {
        for _ in 0..self.cells.len() {
            self.step(kind, rng);
        }
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn tableau(&self) -> LectureHallTableau {
        LectureHallTableau::from_rows(self.n, self.t, &self.rows).expect("chain rows form a partition")
    }

    /// `λ^(κ)_i = #{j : L(i,j) ≥ κ (n + j - i)}`, padded to `n` parts.
    pub fn level(&self, kappa: u32) -> crate::partition::Partition {
        let n = self.n as usize;
        let parts = (1..=n)
            .map(|i| {
                self.rows
                    .get(i - 1)
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(j, &v)| v >= kappa as u64 * self.d(i, j + 1))
                            .count() as u32
                    })
                    .unwrap_or(0)
            })
            .collect();
        crate::partition::Partition::new(parts).expect("levels are partitions")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McmcOptions {
    pub kind: MoveKind,
    pub chains: usize,
    pub burn_in: u64,
    /// Sweeps between recorded samples.
    pub thin: u64,
    /// Samples recorded per chain.
    pub samples_per_chain: usize,
}

impl Default for McmcOptions {
    fn default() -> Self {
        Self { kind: MoveKind::Flip, chains: 1, burn_in: 0, thin: 1, samples_per_chain: 1 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub acceptance_rate: f64,
    pub sweeps: u64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Mcmc,
}

/// Samples stored as tableaux; [`SampleBatch::configs`] gives the paths.
#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub samples: Vec<LectureHallTableau>,
    pub seed: u64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl SampleBatch {
    pub fn configs(&self) -> Result<Vec<PathConfig>> {
        self.samples.iter().map(tableau_to_paths).collect()
    }
}

/// Runs independent chains in parallel and calls `observe(chain, sample)`
/// on every recorded state, then returns diagnostics. Results depend only on
/// the seed, not on scheduling.
pub fn run_chains<T: Send>(
    spec: &EnumerationSpec,
    opts: &McmcOptions,
    seed: u64,
    observe: impl Fn(&Chain) -> T + Sync,
) -> Result<(Vec<Vec<T>>, Diagnostics)> {
    let start = Chain::new(spec)?;
    let results: Vec<(Vec<T>, u64, u64, Vec<String>)> = (0..opts.chains)
        .into_par_iter()
        .map(|c| {
            let mut rng = chain_rng(seed, c as u64);
            let mut chain = start.clone();
            let mut warnings = Vec::new();
            for _ in 0..opts.burn_in {
                chain.sweep(opts.kind, &mut rng);
            }
            if !chain.cells.is_empty() && opts.kind == MoveKind::Flip {
                let before = chain.accepted;
                chain.sweep(opts.kind, &mut rng);
                if chain.accepted == before {
                    warnings.push(format!("chain {c}: no move accepted during an audit sweep"));
                }
            }
            let mut out = Vec::with_capacity(opts.samples_per_chain);
            for _ in 0..opts.samples_per_chain {
                for _ in 0..opts.thin {
                    chain.sweep(opts.kind, &mut rng);
                }
                out.push(observe(&chain));
            }
            (out, chain.proposals, chain.accepted, warnings)
        })
        .collect();
    let mut diag = Diagnostics {
        sweeps: opts.burn_in + opts.thin * opts.samples_per_chain as u64,
        ..Default::default()
    };
    let (mut prop, mut acc) = (0u64, 0u64);
    let mut all = Vec::with_capacity(results.len());
    for (out, p, a, w) in results {
        prop += p;
        acc += a;
        diag.warnings.extend(w);
        all.push(out);
    }
    diag.acceptance_rate = if prop == 0 { 0.0 } else { acc as f64 / prop as f64 };
    Ok((all, diag))
}

/// Chain states after burn-in and thinning, gathered into a batch.
pub fn sample_mcmc(
    spec: &EnumerationSpec,
    sweeps: u64,
    seed: u64,
    opts: &McmcOptions,
) -> Result<SampleBatch> {
    let opts = McmcOptions { burn_in: sweeps, ..opts.clone() };
    let (per_chain, diagnostics) = run_chains(spec, &opts, seed, |c| c.tableau())?;
    Ok(SampleBatch {
        samples: per_chain.into_iter().flatten().collect(),
        seed,
        method: Method::Mcmc,
        diagnostics,
    })
}

/// `count` independent exact draws.
pub fn sample_exact_batch(spec: &EnumerationSpec, count: usize, seed: u64) -> Result<SampleBatch> {
    let sampler = crate::enumerate::ExactSampler::new(spec)?;
    let mut rng = chain_rng(seed, 0);
    let samples = (0..count)
        .map(|_| sampler.sample_tableau(&mut rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleBatch { samples, seed, method: Method::Exact, diagnostics: Diagnostics::default() })
}

/// One exact draw.
pub fn sample_exact(spec: &EnumerationSpec, seed: u64) -> Result<PathConfig> {
    let sampler = crate::enumerate::ExactSampler::new(spec)?;
    sampler.sample(&mut chain_rng(seed, 0))
}
