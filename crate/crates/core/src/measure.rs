//! Base measures and their transforms: moment generating function,
//! Stieltjes transform, compositional inverse, R-transform and the
//! potential `H` with its derivative.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{c, quad, series};
use crate::partition::{counting_measure, Partition};

/// A compactly supported probability measure on `[0, β]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseMeasure {
    /// Density `1/p` on `(0, p)`.
    Staircase { p: u32 },
    /// Density one on `(a_1, b_1) ∪ (a_2, b_2) ∪ ...` with `a_1 = 0`.
    Intervals(Vec<(f64, f64)>),
    /// Density `1/2` on `(0, 1)` and `1` on `(3/2, 2)`.
    TwoSpeed,
    /// Atoms of equal mass.
    Empirical(Vec<f64>),
}

impl BaseMeasure {
    /// Counting measure of a partition with `n` parts.
    pub fn from_partition(lambda: &Partition, n: i64) -> Result<Self> {
        Ok(Self::Empirical(counting_measure(lambda, n)?.atoms_f64()))
    }

    /// `(a, b, density)` blocks of a piecewise-constant density.
    pub fn blocks(&self) -> Option<Vec<(f64, f64, f64)>> {
        match self {
            Self::Staircase { p } => Some(vec![(0.0, *p as f64, 1.0 / *p as f64)]),
            Self::Intervals(iv) => Some(iv.iter().map(|&(a, b)| (a, b, 1.0)).collect()),
            Self::TwoSpeed => Some(vec![(0.0, 1.0, 0.5), (1.5, 2.0, 1.0)]),
            Self::Empirical(_) => None,
        }
    }

    pub fn check(&self) -> Result<()> {
        match self {
            Self::Staircase { p } if *p == 0 => {
                return Err(Error::Argument("staircase needs p >= 1".into()))
            }
            Self::Intervals(iv) => {
                if iv.is_empty() {
                    return Err(Error::Argument("no intervals given".into()));
                }
                if iv[0].0 != 0.0 {
                    return Err(Error::AssumptionViolation(
                        "the first interval must start at 0".into(),
                    ));
                }
                for w in iv.windows(2) {
                    if w[0].1 >= w[1].0 {
                        return Err(Error::Argument("intervals must be disjoint and sorted".into()));
                    }
                }
                if iv.iter().any(|&(a, b)| a >= b) {
                    return Err(Error::Argument("empty interval".into()));
                }
            }
            Self::Empirical(x) if x.is_empty() => {
                return Err(Error::Argument("no atoms given".into()))
            }
            _ => {}
        }
        let mass = self.moment(0);
        if (mass - 1.0).abs() > 1e-12 {
            return Err(Error::Argument(format!("total mass {mass} is not 1")));
        }
        Ok(())
    }

    /// `∫ x^k dm`.
    pub fn moment(&self, k: u32) -> f64 {
        match self {
            Self::Staircase { p } => (*p as f64).powi(k as i32) / (k as f64 + 1.0),
            Self::Empirical(x) => x.iter().map(|v| v.powi(k as i32)).sum::<f64>() / x.len() as f64,
            _ => self
                .blocks()
                .unwrap()
                .iter()
                .map(|&(a, b, d)| d * (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / (k as f64 + 1.0))
                .sum(),
        }
    }

    /// Right end `β` of the support.
    pub fn support_max(&self) -> f64 {
        match self {
            Self::Empirical(x) => x.iter().copied().fold(0.0, f64::max),
            _ => self.blocks().unwrap().iter().map(|b| b.1).fold(0.0, f64::max),
        }
    }

    /// Left end of the support.
    pub fn support_min(&self) -> f64 {
        match self {
            Self::Empirical(x) => x.iter().copied().fold(f64::INFINITY, f64::min),
            _ => self.blocks().unwrap().iter().map(|b| b.0).fold(f64::INFINITY, f64::min),
        }
    }

    /// Whether `x` lies in the closed support.
    pub fn in_support(&self, x: f64) -> bool {
        match self {
            Self::Empirical(a) => a.contains(&x),
            _ => self.blocks().unwrap().iter().any(|&(a, b, _)| a <= x && x <= b),
        }
    }

    /// Closest support point to `z`.
    pub fn nearest_support(&self, z: Complex64) -> Complex64 {
        let x = z.re;
        let best = match self {
            Self::Empirical(a) => a
                .iter()
                .copied()
                .min_by(|p, q| (p - x).abs().total_cmp(&(q - x).abs()))
                .unwrap_or(0.0),
            _ => self
                .blocks()
                .unwrap()
                .iter()
                .map(|&(a, b, _)| x.clamp(a, b))
                .min_by(|p, q| (p - x).abs().total_cmp(&(q - x).abs()))
                .unwrap_or(0.0),
        };
        c(best)
    }
}

impl fmt::Display for BaseMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Staircase { p } => write!(f, "staircase:p={p}"),
            Self::Intervals(iv) => {
                write!(f, "intervals:")?;
                for (k, (a, b)) in iv.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}-{b}")?;
                }
                Ok(())
            }
            Self::TwoSpeed => write!(f, "two-speed"),
            Self::Empirical(x) => {
                write!(f, "empirical:")?;
                for (k, v) in x.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for BaseMeasure {
    type Err = Error;

    /// `staircase:p=3`, `intervals:0-0.5,1-1.5`, `two-speed`,
    /// `empirical:1.6,1.2,0.6,0.2,0`, or `partition:4,3,1;n=5`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Argument(format!("measure {s:?}: {m}"));
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| bad(&e.to_string()));
        let m = match kind.trim() {
            "staircase" => {
                let p = rest
                    .trim()
                    .strip_prefix("p=")
                    .ok_or_else(|| bad("expected p=<integer>"))?
                    .parse::<u32>()
                    .map_err(|e| bad(&e.to_string()))?;
                Self::Staircase { p }
            }
            "intervals" => {
                let iv = rest
                    .split(',')
                    .map(|pair| {
                        let (a, b) = pair.split_once('-').ok_or_else(|| bad("expected a-b"))?;
                        Ok((num(a)?, num(b)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::Intervals(iv)
            }
            "two-speed" => Self::TwoSpeed,
            "empirical" => Self::Empirical(rest.split(',').map(num).collect::<Result<Vec<_>>>()?),
            "partition" => {
                let (parts, n) = rest.split_once(";n=").ok_or_else(|| bad("expected <parts>;n=<N>"))?;
                let n = n.trim().parse::<i64>().map_err(|e| bad(&e.to_string()))?;
                Self::from_partition(&Partition::parse(parts)?, n)?
            }
            _ => return Err(bad("unknown kind")),
        };
        m.check()?;
        Ok(m)
    }
}

/// Number of Taylor coefficients kept for expansions at `z = 1`.
const SERIES_LEN: usize = 40;

/// Transform evaluators for one base measure.
#[derive(Clone, Debug)]
pub struct TransformPack {
    pub measure: BaseMeasure,
    /// Taylor coefficients of `H'` at 1, from the moment series.
    hprime_series: Vec<Complex64>,
    /// Taylor coefficients of `S^{-1}` at 0.
    sinv_series: Vec<Complex64>,
}

pub fn build_transforms(m: &BaseMeasure) -> Result<TransformPack> {
    m.check()?;
    let len = SERIES_LEN;
    let s_series: Vec<Complex64> = (0..len)
        .map(|k| if k == 0 { c(0.0) } else { c(m.moment(k as u32 - 1)) })
        .collect();
    let sinv_series = series::reversion(&s_series, len);
    let w = series::compose(&sinv_series, &series::log1p(len), len);
    // g(ε) = (1+ε) S^{-1}(log(1+ε)) = ε (1 + ...); W = 1/g
    let g = series::mul(&w, &[c(1.0), c(1.0)], len);
    let g_over_eps: Vec<Complex64> = g[1..].to_vec();
    let inv = series::reciprocal(&g_over_eps, len - 1);
    let hprime_series = inv[1..].to_vec();
    Ok(TransformPack { measure: m.clone(), hprime_series, sinv_series })
}

impl TransformPack {
    /// Moment generating function `S(z) = Σ_k M_k z^{k+1}`.
    pub fn s(&self, z: Complex64) -> Result<Complex64> {
        match &self.measure {
            BaseMeasure::Empirical(x) => {
                let mut acc = c(0.0);
                for &a in x {
                    let d = 1.0 - a * z;
                    if d.norm() < 1e-15 {
                        return Err(Error::Pole(z));
                    }
                    acc += z / d;
                }
                Ok(acc / x.len() as f64)
            }
            m => {
                let mut acc = c(0.0);
                for (a, b, d) in m.blocks().unwrap() {
                    let num = 1.0 - a * z;
                    let den = 1.0 - b * z;
                    let r = num / den;
                    if den.norm() < 1e-15 || (r.im == 0.0 && r.re <= 0.0) {
                        return Err(Error::Domain { at: z, nearest: c(1.0 / b) });
                    }
                    acc += d * r.ln();
                }
                Ok(acc)
            }
        }
    }

    pub fn s_prime(&self, z: Complex64) -> Complex64 {
        match &self.measure {
            BaseMeasure::Empirical(x) => {
                x.iter().map(|&a| 1.0 / ((1.0 - a * z) * (1.0 - a * z))).sum::<Complex64>()
                    / x.len() as f64
            }
            m => m
                .blocks()
                .unwrap()
                .iter()
                .map(|&(a, b, d)| d * (-a / (1.0 - a * z) + b / (1.0 - b * z)))
                .sum(),
        }
    }

    /// Stieltjes transform `∫ dm(x) / (ζ - x)`.
    pub fn st(&self, zeta: Complex64) -> Result<Complex64> {
        let on_support = zeta.im.abs() < 1e-300 && self.measure.in_support(zeta.re);
        if on_support {
            return Err(Error::Domain { at: zeta, nearest: self.measure.nearest_support(zeta) });
        }
        match &self.measure {
            BaseMeasure::Empirical(x) => {
                Ok(x.iter().map(|&a| 1.0 / (zeta - a)).sum::<Complex64>() / x.len() as f64)
            }
            m => Ok(m
                .blocks()
                .unwrap()
                .iter()
                .map(|&(a, b, d)| d * ((zeta - a) / (zeta - b)).ln())
                .sum()),
        }
    }

    /// Compositional inverse of `S` on the branch through `S^{-1}(0) = 0`.
    pub fn s_inv(&self, u: Complex64) -> Result<Complex64> {
        if let BaseMeasure::Staircase { p } = self.measure {
            let p = p as f64;
            return Ok((1.0 - (-p * u).exp()) / p);
        }
        self.s_inv_newton(u)
    }

    /// [`TransformPack::s_inv`] by Newton continuation from the series.
    pub fn s_inv_newton(&self, u: Complex64) -> Result<Complex64> {
        if u.norm() == 0.0 {
            return Ok(c(0.0));
        }
        // continuation along the segment 0 -> u, starting from the series
        let start = 0.05 / self.sinv_radius().max(1e-3);
        let steps = ((u.norm() * start).ceil() as usize).clamp(4, 400);
        let mut w = series::eval(&self.sinv_series[..12], u / steps as f64);
        for k in 1..=steps {
            let target = u * (k as f64 / steps as f64);
            let mut ok = false;
            for _ in 0..60 {
                let f = self.s(w)? - target;
                let d = self.s_prime(w);
                let step = f / d;
                if !step.is_finite() {
                    break;
                }
                w -= step;
                if step.norm() <= 1e-15 * w.norm().max(1e-300) {
                    ok = true;
                    break;
                }
            }
            if !ok {
                let f = (self.s(w)? - target).norm();
                if !(f <= 1e-13 * target.norm().max(1.0)) {
                    return Err(Error::Domain { at: u, nearest: c(0.0) });
                }
            }
        }
        Ok(w)
    }

    fn sinv_radius(&self) -> f64 {
        series::radius_estimate(&self.sinv_series).min(1e3)
    }

    /// Voiculescu R-transform `1/S^{-1}(t) - 1/t`.
    pub fn r(&self, t: Complex64) -> Result<Complex64> {
        if t.norm() < 1e-8 {
            // 1/(t(1 + c_2 t + ...)) - 1/t
            let rec = series::reciprocal(&self.sinv_series[1..], 4);
            return Ok(series::eval(&rec[1..], t));
        }
        Ok(1.0 / self.s_inv(t)? - 1.0 / t)
    }

    /// `W(z) = 1/(z S^{-1}(ln z))`; `H'(z) = W(z) - 1/(z-1)`.
    pub fn w(&self, z: Complex64) -> Result<Complex64> {
        if let BaseMeasure::Staircase { p } = self.measure {
            let zp = z.powu(p);
            if (zp - 1.0).norm() < 1e-14 {
                return Err(Error::Pole(z));
            }
            return Ok(p as f64 * z.powu(p - 1) / (zp - 1.0));
        }
        if (z - 1.0).norm() < 1e-14 {
            return Err(Error::Pole(z));
        }
        if z.im == 0.0 && z.re <= 0.0 {
            return Err(Error::Domain { at: z, nearest: c(0.0) });
        }
        let v = self.s_inv(z.ln())?;
        Ok(1.0 / (z * v))
    }

    /// `W(z)` through the numerical inverse of `S`, even where a closed form
    /// exists.
    pub fn w_generic(&self, z: Complex64) -> Result<Complex64> {
        if (z - 1.0).norm() < 1e-14 {
            return Err(Error::Pole(z));
        }
        let v = self.s_inv_newton(z.ln())?;
        Ok(1.0 / (z * v))
    }

    /// `W'(z) = -g'(z)/g(z)^2` with `g = z S^{-1}(ln z)` and
    /// `g' = S^{-1}(ln z) + 1/S'(S^{-1}(ln z))`.
    pub fn w_prime(&self, z: Complex64) -> Result<Complex64> {
        if let BaseMeasure::Staircase { p } = self.measure {
            let zp = z.powu(p);
            if (zp - 1.0).norm() < 1e-14 {
                return Err(Error::Pole(z));
            }
            let pf = p as f64;
            let zpm2 = if p >= 2 { z.powu(p - 2) } else { 1.0 / z };
            return Ok(-pf * zpm2 * (zp + pf - 1.0) / ((zp - 1.0) * (zp - 1.0)));
        }
        self.w_prime_generic(z)
    }

    pub fn w_prime_generic(&self, z: Complex64) -> Result<Complex64> {
        if (z - 1.0).norm() < 1e-14 {
            return Err(Error::Pole(z));
        }
        let v = self.s_inv_newton(z.ln())?;
        let g = z * v;
        let gp = v + 1.0 / self.s_prime(v);
        Ok(-gp / (g * g))
    }

    /// `H'(z)`, with the removable singularity at 1 handled by its Taylor series.
    pub fn h_prime(&self, z: Complex64) -> Result<Complex64> {
        let e = z - 1.0;
        if e.norm() < 1e-3 {
            return Ok(series::eval(&self.hprime_series, e));
        }
        Ok(self.w(z)? - 1.0 / e)
    }

    /// Taylor coefficients of `H'` at 1.
    pub fn h_prime_series(&self) -> &[Complex64] {
        &self.hprime_series
    }

    /// `H(u) = ∫_0^{ln u} R(t) dt + ln(ln u / (u - 1))`.
    pub fn h(&self, u: Complex64) -> Result<Complex64> {
        let l = u.ln();
        if l.norm() < 1e-12 {
            return Ok(c(0.0));
        }
        let (x, wts) = quad::gauss_legendre(40);
        let mut acc = c(0.0);
        for (xi, wi) in x.iter().zip(&wts) {
            let t = l * (0.5 * (xi + 1.0));
            acc += self.r(t)? * *wi;
        }
        Ok(acc * l * 0.5 + (l / (u - 1.0)).ln())
    }

    /// Distance from 1 to the nearest singularity of `W` other than the pole
    /// at 1, capped at 1 (the logarithm's branch point at 0).
    pub fn singularity_distance(&self) -> f64 {
        match self.measure {
            BaseMeasure::Staircase { p } if p <= 1 => 1.0,
            BaseMeasure::Staircase { p } => (2.0 * (std::f64::consts::PI / p as f64).sin()).min(1.0),
            _ => series::radius_estimate(&self.hprime_series).min(1.0),
        }
    }

    /// Contour radius used for integrals around `z = 1`.
    pub fn contour_radius(&self) -> f64 {
        0.5 * self.singularity_distance()
    }
}
