//! Power-sum observables and mergeable online moment accumulators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::paths::{level_partitions, PathConfig};

/// `p_k = Σ_i (λ_i + n - i)^k`.
pub fn power_sum(lambda: &Partition, n: usize, k: u32) -> f64 {
    (1..=n)
        .map(|i| ((lambda.part(i) as i128 + n as i128 - i as i128) as f64).powi(k as i32))
        .sum()
}

/// Power sums of selected level partitions of one configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSums {
    pub ks: Vec<u32>,
    pub kappas: Vec<u32>,
    /// `values[a][b]` is `p_{ks[b]}` at level `kappas[a]`.
    pub values: Vec<Vec<f64>>,
}

impl PowerSums {
    pub fn from_levels(levels: &[Partition], n: usize, ks: &[u32], kappas: &[u32]) -> Result<Self> {
        let mut values = Vec::with_capacity(kappas.len());
        for &kappa in kappas {
            let lv = levels.get(kappa as usize).ok_or_else(|| {
                Error::Argument(format!("level {kappa} outside [0, {})", levels.len()))
            })?;
            values.push(ks.iter().map(|&k| power_sum(lv, n, k)).collect());
        }
        Ok(Self { ks: ks.to_vec(), kappas: kappas.to_vec(), values })
    }

    pub fn flat(&self) -> Vec<f64> {
        self.values.iter().flatten().copied().collect()
    }
}

pub fn power_sums(p: &PathConfig, ks: &[u32], kappas: &[u32]) -> Result<PowerSums> {
    if let Some(&bad) = kappas.iter().find(|&&k| k >= p.t()) {
        return Err(Error::Argument(format!("level {bad} outside [0, {})", p.t())));
    }
    let levels = level_partitions(p)?;
    PowerSums::from_levels(&levels, p.n as usize, ks, kappas)
}

/// Running count, mean and central moments up to order four; merging is
/// associative up to rounding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        let mut one = Moments { count: 1, mean: x, ..Default::default() };
        std::mem::swap(self, &mut one);
        self.merge_from(&one);
    }

    pub fn merge_from(&mut self, o: &Moments) {
        if o.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *o;
            return;
        }
        let (na, nb) = (self.count as f64, o.count as f64);
        let n = na + nb;
        let d = o.mean - self.mean;
        let d2 = d * d;
        let m2 = self.m2 + o.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + o.m3
            + d * d2 * na * nb * (na - nb) / (n * n)
            + 3.0 * d * (na * o.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + o.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * o.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * d * (na * o.m3 - nb * self.m3) / n;
        self.count += o.count;
        self.mean += d * nb / n;
        self.m2 = m2;
        self.m3 = m3;
        self.m4 = m4;
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        self.m2 / (self.count as f64 - 1.0)
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }

    pub fn skewness(&self) -> f64 {
        let n = self.count as f64;
        if self.m2 == 0.0 {
            return 0.0;
        }
        n.sqrt() * self.m3 / self.m2.powf(1.5)
    }

    pub fn excess_kurtosis(&self) -> f64 {
        let n = self.count as f64;
        if self.m2 == 0.0 {
            return 0.0;
        }
        n * self.m4 / (self.m2 * self.m2) - 3.0
    }
}

/// Running mean vector and covariance matrix.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CovarianceAccumulator {
    pub count: u64,
    pub mean: Vec<f64>,
    comoment: Vec<Vec<f64>>,
}

impl CovarianceAccumulator {
    pub fn new(dim: usize) -> Self {
        Self { count: 0, mean: vec![0.0; dim], comoment: vec![vec![0.0; dim]; dim] }
    }

    pub fn push(&mut self, x: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        let d: Vec<f64> = x.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        for (m, di) in self.mean.iter_mut().zip(&d) {
            *m += di / n;
        }
        for a in 0..d.len() {
            for b in 0..d.len() {
                self.comoment[a][b] += d[a] * (x[b] - self.mean[b]);
            }
        }
    }

    pub fn merge_from(&mut self, o: &CovarianceAccumulator) {
        if o.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = o.clone();
            return;
        }
        let (na, nb) = (self.count as f64, o.count as f64);
        let n = na + nb;
        let d: Vec<f64> = o.mean.iter().zip(&self.mean).map(|(b, a)| b - a).collect();
        for a in 0..d.len() {
            for b in 0..d.len() {
                self.comoment[a][b] += o.comoment[a][b] + d[a] * d[b] * na * nb / n;
            }
        }
        for (m, di) in self.mean.iter_mut().zip(&d) {
            *m += di * nb / n;
        }
        self.count += o.count;
    }

    pub fn covariance(&self) -> Vec<Vec<f64>> {
        let c = (self.count.max(2) - 1) as f64;
        self.comoment
            .iter()
            .map(|r| r.iter().map(|v| v / c).collect())
            .collect()
    }
}

/// Online statistics of power sums over a batch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSumStats {
    pub ks: Vec<u32>,
    pub kappas: Vec<u32>,
    pub cov: CovarianceAccumulator,
    pub moments: Vec<Moments>,
}

impl PowerSumStats {
    pub fn new(ks: &[u32], kappas: &[u32]) -> Self {
        let dim = ks.len() * kappas.len();
        Self {
            ks: ks.to_vec(),
            kappas: kappas.to_vec(),
            cov: CovarianceAccumulator::new(dim),
            moments: vec![Moments::default(); dim],
        }
    }

    pub fn push(&mut self, p: &PowerSums) {
        let f = p.flat();
        self.cov.push(&f);
        for (m, x) in self.moments.iter_mut().zip(&f) {
            m.push(*x);
        }
    }

    pub fn merge_from(&mut self, o: &PowerSumStats) {
        self.cov.merge_from(&o.cov);
        for (m, x) in self.moments.iter_mut().zip(&o.moments) {
            m.merge_from(x);
        }
    }

    /// Flat index of `(kappa position, k position)`.
    pub fn index(&self, kappa_pos: usize, k_pos: usize) -> usize {
        kappa_pos * self.ks.len() + k_pos
    }

    pub fn mean(&self) -> &[f64] {
        &self.cov.mean
    }
}
