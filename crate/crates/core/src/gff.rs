//! Gaussian fluctuations of the level measures: the covariance kernel
//! `Q(z, w)`, its double contour integral, the liquid region's map to the
//! upper half plane, and the Green-function form of the same covariance.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limit::{solve_zplus, u_y_combined};
use crate::mcmc::SampleBatch;
use crate::measure::{BaseMeasure, TransformPack};
use crate::numeric::{c, quad, roots, series};
use crate::stats::{power_sum, Moments};

/// `(A(z), A'(z))` with `A(z) = z H'(z)`.
fn a_pair(z: Complex64, pack: &TransformPack) -> Result<(Complex64, Complex64)> {
    let e = z - 1.0;
    let hp = pack.h_prime(z)?;
    let hpp = if e.norm() < 1e-3 {
        let d: Vec<Complex64> =
            pack.h_prime_series().iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect();
        series::eval(&d, e)
    } else {
        pack.w_prime(z)? + 1.0 / (e * e)
    };
    Ok((z * hp, hp + z * hpp))
}

fn q_from_pairs(z: Complex64, w: Complex64, (az, dz): (Complex64, Complex64), (aw, dw): (Complex64, Complex64)) -> Result<Complex64> {
    let h = z - w;
    if h.norm() < 1e-12 {
        return Err(Error::Pole(z));
    }
    // D = (A(z) - A(w))/(z - w) and its partial derivatives
    let d = (az - aw) / h;
    let d_z = (dz - d) / h;
    let d_w = (d - dw) / h;
    let d_zw = (dz + dw - 2.0 * d) / (h * h);
    let (zm, wm) = (z - 1.0, w - 1.0);
    let f = 1.0 - zm * wm * d;
    if f.norm() < 1e-13 {
        return Err(Error::Domain { at: z, nearest: w });
    }
    let f_z = -wm * (d + zm * d_z);
    let f_w = -zm * (d + wm * d_w);
    let f_zw = -(d + zm * d_z + wm * d_w + zm * wm * d_zw);
    Ok(1.0 / (h * h) + (f * f_zw - f_z * f_w) / (f * f))
}

/// `Q(z, w) = 1/(z-w)^2 + ∂_z ∂_w log(1 - (z-1)(w-1)(zH'(z) - wH'(w))/(z-w))`,
/// with the mixed derivative of the logarithm worked out by hand.
pub fn q_kernel(z: Complex64, w: Complex64, pack: &TransformPack) -> Result<Complex64> {
    q_from_pairs(z, w, a_pair(z, pack)?, a_pair(w, pack)?)
}

/// The same kernel as `ẑ'(z) ŵ'(w) / (ẑ - ŵ)^2` with `ẑ = z W(z)`.
pub fn q_kernel_compact(z: Complex64, w: Complex64, pack: &TransformPack) -> Result<Complex64> {
    let hat = |x: Complex64| -> Result<(Complex64, Complex64)> {
        let wx = pack.w(x)?;
        Ok((x * wx, wx + x * pack.w_prime(x)?))
    };
    let ((zh, zd), (wh, wd)) = (hat(z)?, hat(w)?);
    let diff = zh - wh;
    if diff.norm() < 1e-13 {
        return Err(Error::Pole(z));
    }
    Ok(zd * wd / (diff * diff))
}

/// Indices and levels of one covariance entry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSpec {
    pub k1: u32,
    pub k2: u32,
    pub s1: f64,
    pub s2: f64,
    /// Inner contour radius; the outer one is twice this. Defaults to a
    /// quarter of the distance to the nearest singularity of `W`.
    pub epsilon: Option<f64>,
}

impl CovarianceSpec {
    pub fn new(k1: u32, k2: u32, s1: f64, s2: f64) -> Self {
        Self { k1, k2, s1, s2, epsilon: None }
    }

    pub fn check(&self) -> Result<()> {
        if self.k1 == 0 || self.k2 == 0 {
            return Err(Error::Argument("moment indices must be at least 1".into()));
        }
        for s in [self.s1, self.s2] {
            if !(s > 0.0 && s < 1.0) {
                return Err(Error::Argument(format!("level fraction {s} outside (0, 1)")));
            }
        }
        Ok(())
    }
}

/// Result of a quadrature with its convergence record.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    /// Imaginary part left over by the contour rule, or the estimated error
    /// of the real-line rule.
    pub residue: f64,
    pub nodes: usize,
}

/// `(1/(2πi)^2) ∮∮ U_{s1}(z)^{k1} U_{s2}(w)^{k2} Q(z, w) dz dw` over
/// `|z-1| = ε`, `|w-1| = 2ε` by the trapezoid rule, doubling the node
/// count until two successive values agree to `1e-12`.
///
/// The level with the smaller `s` (the higher level) takes the inner
/// contour; with the other nesting the `z = w` pole adds a spurious term
/// and the result is no longer symmetric.
pub fn covariance_contour(spec: &CovarianceSpec, pack: &TransformPack) -> Result<Quadrature> {
    spec.check()?;
    let spec = &if spec.s1 > spec.s2 {
        CovarianceSpec { k1: spec.k2, k2: spec.k1, s1: spec.s2, s2: spec.s1, epsilon: spec.epsilon }
    } else {
        *spec
    };
    let eps = spec.epsilon.unwrap_or(0.5 * pack.contour_radius());
    if !(eps > 0.0 && 2.0 * eps < pack.singularity_distance()) {
        return Err(Error::Argument(format!(
            "contour radius {eps} does not fit inside the analyticity disc of radius {}",
            pack.singularity_distance()
        )));
    }
    let eval = |m: usize| -> Result<Complex64> {
        let nodes = |r: f64, s: f64, k: u32| -> Result<Vec<(Complex64, Complex64, (Complex64, Complex64))>> {
            (0..m)
                .map(|i| {
                    let e = Complex64::from_polar(1.0, 2.0 * PI * i as f64 / m as f64);
                    let x = 1.0 + r * e;
                    // (1/2πi) dx = r e dθ/2π
                    let weight = u_y_combined(x, s, pack)?.powu(k) * r * e;
                    Ok((x, weight, a_pair(x, pack)?))
                })
                .collect()
        };
        let zs = nodes(eps, spec.s1, spec.k1)?;
        let ws = nodes(2.0 * eps, spec.s2, spec.k2)?;
        let rows: Result<Vec<Complex64>> = zs
            .par_iter()
            .map(|&(z, wz, az)| {
                let mut acc = c(0.0);
                for &(w, ww, aw) in &ws {
                    acc += ww * q_from_pairs(z, w, az, aw)?;
                }
                Ok(acc * wz)
            })
            .collect();
        Ok(rows?.into_iter().sum::<Complex64>() / (m * m) as f64)
    };
    let mut m = 32;
    let mut prev = eval(m)?;
    while m < 4096 {
        m *= 2;
        let cur = eval(m)?;
        if !cur.is_finite() {
            return Err(Error::Precision("non-finite covariance integral".into()));
        }
        if (cur - prev).norm() <= 1e-12 * cur.norm().max(1e-3) {
            return Ok(Quadrature { value: cur.re, residue: cur.im, nodes: m });
        }
        prev = cur;
    }
    Err(Error::Precision("covariance contour integral not converged with 4096 nodes".into()))
}

/// `V_y(ζ) = ζ (1 - (1 - s) e^{-St(ζ)})`.
pub fn v_y(zeta: Complex64, s: f64, pack: &TransformPack) -> Result<Complex64> {
    Ok(zeta * (1.0 - (1.0 - s) * (-pack.st(zeta)?).exp()))
}

/// The liquid-region point `T(χ, s) ∈ ℍ`, the root of `V_y(ζ) = χ` in the
/// upper half plane, or `None` at frozen points.
///
/// For measures made of unit-density intervals starting at 0 the equation
/// reduces to `(ζ - χ) Π_{i>1} (ζ - a_i) = (1 - s) Π_i (ζ - b_i)`. Other
/// measures go through `T = conj(1/S^{-1}(ln z_+))`.
pub fn liquid_map(chi: f64, s: f64, pack: &TransformPack) -> Result<Option<Complex64>> {
    match &pack.measure {
        BaseMeasure::Intervals(iv) => liquid_map_polynomial(chi, s, iv),
        _ => liquid_map_via_root(chi, s, pack),
    }
}

fn liquid_map_polynomial(chi: f64, s: f64, iv: &[(f64, f64)]) -> Result<Option<Complex64>> {
    let lhs = roots::from_roots(
        &std::iter::once(c(chi)).chain(iv[1..].iter().map(|&(a, _)| c(a))).collect::<Vec<_>>(),
    );
    let rhs = roots::from_roots(&iv.iter().map(|&(_, b)| c(b)).collect::<Vec<_>>());
    let mut poly = lhs;
    poly.resize(rhs.len().max(poly.len()), c(0.0));
    for (k, r) in rhs.iter().enumerate() {
        poly[k] -= (1.0 - s) * r;
    }
    while poly.len() > 1 && poly.last().is_some_and(|x| x.norm() < 1e-14) {
        poly.pop();
    }
    if poly.len() < 2 {
        return Ok(None);
    }
    let rs = roots::roots(&poly)?;
    let upper: Vec<Complex64> =
        rs.into_iter().filter(|z| z.im > crate::limit::REAL_ROOT_TOL * z.norm().max(1.0)).collect();
    match upper.len() {
        0 => Ok(None),
        1 => Ok(Some(upper[0])),
        k => Err(Error::AssumptionViolation(format!("V_y(ζ) = {chi} has {k} roots in ℍ"))),
    }
}

/// [`liquid_map`] through the upper root `z_+` of `U_y(z) = χ`, using
/// `z W(z) = χ z/(z - 1 + s)` there. Evaluating `W` itself would need the
/// right branch of `S^{-1}`, which is not the principal one for every
/// measure.
pub fn liquid_map_via_root(chi: f64, s: f64, pack: &TransformPack) -> Result<Option<Complex64>> {
    match solve_zplus(chi, s, pack)? {
        None => Ok(None),
        Some(z) => Ok(Some((chi * z / (z - 1.0 + s)).conj())),
    }
}

/// `(χ_ℒ(ζ), s_ℒ(ζ))` with the imaginary parts the closed forms leave over.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiquidPreimage {
    pub chi: f64,
    pub s: f64,
    pub chi_im: f64,
    pub s_im: f64,
}

/// Inverse of [`liquid_map`] in closed form.
pub fn liquid_map_inverse(zeta: Complex64, pack: &TransformPack) -> Result<LiquidPreimage> {
    if !(zeta.im > 0.0) {
        return Err(Error::Argument(format!("{zeta} is not in the upper half plane")));
    }
    let zb = zeta.conj();
    let e = (-pack.st(zeta)?).exp();
    let eb = (-pack.st(zb)?).exp();
    let den = zb * eb - zeta * e;
    let chi = zeta * (1.0 + e * (zeta - zb) / den);
    let s = 1.0 + (zeta - zb) / den;
    Ok(LiquidPreimage { chi: chi.re, s: s.re, chi_im: chi.im, s_im: s.im })
}

/// Dirichlet Green function of ℍ, `-(1/2π) ln |(z - w)/(z - w̄)|`.
pub fn green_h(z: Complex64, w: Complex64) -> f64 {
    -((z - w) / (z - w.conj())).norm().ln() / (2.0 * PI)
}

/// Maximal intervals of `χ` where `(χ, s)` is liquid, located by a scan and
/// refined by bisection.
pub fn liquid_intervals(s: f64, pack: &TransformPack) -> Result<Vec<(f64, f64)>> {
    let lo = pack.measure.support_min() - 1.0;
    let hi = pack.measure.support_max() + 1.0;
    let liquid = |x: f64| -> Result<bool> { Ok(liquid_map(x, s, pack)?.is_some()) };
    let refine = |mut a: f64, mut b: f64, a_liquid: bool| -> Result<f64> {
        // the liquid side ends up in the returned point's interval
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if liquid(m)? == a_liquid {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(if a_liquid { a } else { b })
    };
    let n = 2000;
    let xs: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
    let flags: Vec<bool> = xs.iter().map(|&x| liquid(x)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut start = None;
    for k in 0..=n {
        match (flags[k], start) {
            (true, None) => {
                start = Some(if k == 0 { xs[0] } else { refine(xs[k - 1], xs[k], false)? });
            }
            (false, Some(a)) => {
                out.push((a, refine(xs[k - 1], xs[k], true)?));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        out.push((a, xs[n]));
    }
    Ok(out)
}

/// `∫_a^b f` split at the midpoint so each piece has its awkward endpoint at
/// offset zero.
fn integrate_from_ends(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let m = 0.5 * (b - a);
    let left = quad::tanh_sinh_abs(&|d: f64| f(a + d), 0.0, m, tol, tol * 1e-3)?;
    let right = quad::tanh_sinh_abs(&|d: f64| f(b - d), 0.0, m, tol, tol * 1e-3)?;
    Ok(left + right)
}

/// The covariance as `(k1 k2/π) ∫∫ χ1^{k1-1} χ2^{k2-1} G_ℍ(T(χ1,s1), T(χ2,s2)) dχ1 dχ2`
/// over the liquid slices at `s1` and `s2`.
pub fn covariance_green(spec: &CovarianceSpec, pack: &TransformPack) -> Result<Quadrature> {
    spec.check()?;
    let tol = 1e-10;
    let iv1 = liquid_intervals(spec.s1, pack)?;
    let iv2 = liquid_intervals(spec.s2, pack)?;
    let t_of = |x: f64, s: f64| -> Option<Complex64> { liquid_map(x, s, pack).ok().flatten() };
    let inner = |x1: f64| -> Result<f64> {
        let Some(t1) = t_of(x1, spec.s1) else { return Ok(0.0) };
        let g = |x2: f64| -> f64 {
            match t_of(x2, spec.s2) {
                Some(t2) => x2.powi(spec.k2 as i32 - 1) * green_h(t1, t2),
                None => 0.0,
            }
        };
        let mut acc = 0.0;
        for &(a, b) in &iv2 {
            if x1 > a && x1 < b {
                // logarithmic singularity on the diagonal
                acc += quad::tanh_sinh_abs(&|d: f64| g(x1 - d), 0.0, x1 - a, tol, tol * 1e-3)?;
                acc += quad::tanh_sinh_abs(&|d: f64| g(x1 + d), 0.0, b - x1, tol, tol * 1e-3)?;
            } else {
                acc += integrate_from_ends(&g, a, b, tol)?;
            }
        }
        Ok(x1.powi(spec.k1 as i32 - 1) * acc)
    };
    // tanh_sinh takes an `Fn`, so the first inner failure is parked here
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let f = |x1: f64| match inner(x1) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let mut total = 0.0;
    for &(a, b) in &iv1 {
        total += integrate_from_ends(&f, a, b, 1e-9)?;
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(Quadrature { value: spec.k1 as f64 * spec.k2 as f64 / PI * total, residue: 0.0, nodes: 0 })
}

/// Fluctuation statistics of `∫ χ^j (Δ_n - EΔ_n) dχ` at one level of a
/// sample batch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GffReport {
    pub j: u32,
    pub kappa: u32,
    /// `1 - κ/t`, the weight fraction of the level actually used.
    pub s: f64,
    pub samples: usize,
    /// Plug-in mean of `p_{j+1}` at this level.
    pub mean_power_sum: f64,
    pub variance: f64,
    /// Variance over the first half of the batch, for a stability check.
    pub half_variance: f64,
    /// `π/(j+1)^2` times the Green-form covariance of `p_{j+1}` with itself.
    pub predicted_variance: Option<f64>,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub warnings: Vec<String>,
}

/// Below this many samples the report carries a statistical-power warning.
pub const MIN_SAMPLES: usize = 100;

/// Computes `(√π/(j+1)) (p_{j+1} - mean)/n^{j+1}` on level `κ = round(t(1-s))`
/// of every sample, centring by the batch mean, and summarises its law.
///
/// `p_k = Σ_i (λ_i + n - i)^k` uses the counting-measure convention.
pub fn gff_statistics(batch: &SampleBatch, j: u32, s: f64, pack: Option<&TransformPack>) -> Result<GffReport> {
    let first = batch.samples.first().ok_or_else(|| Error::Argument("empty sample batch".into()))?;
    let (n, t) = (first.n, first.t);
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Argument(format!("level fraction {s} outside [0, 1]")));
    }
    let kappa = (t as f64 * (1.0 - s)).round() as u32;
    if kappa >= t {
        return Err(Error::Argument(format!("level {kappa} outside [0, {t})")));
    }
    let k = j + 1;
    let raw: Vec<f64> = batch
        .samples
        .iter()
        .map(|tab| Ok(power_sum(&tab.level(kappa)?, n as usize, k)))
        .collect::<Result<_>>()?;
    let mean_power_sum = raw.iter().sum::<f64>() / raw.len() as f64;
    let scale = PI.sqrt() / k as f64 / (n as f64).powi(k as i32);
    let mut all = Moments::default();
    let mut half = Moments::default();
    for (idx, x) in raw.iter().enumerate() {
        let v = scale * (x - mean_power_sum);
        all.push(v);
        if idx < raw.len() / 2 {
            half.push(v);
        }
    }
    let mut warnings = Vec::new();
    if raw.len() < MIN_SAMPLES {
        warnings.push(format!("only {} samples; moment estimates have little power", raw.len()));
    }
    let s_level = 1.0 - kappa as f64 / t as f64;
    let predicted_variance = match pack {
        Some(pack) if s_level > 0.0 && s_level < 1.0 => {
            let cov = covariance_green(&CovarianceSpec::new(k, k, s_level, s_level), pack)?;
            Some(PI / (k * k) as f64 * cov.value)
        }
        Some(_) => {
            warnings.push("no limiting prediction at the boundary level".into());
            None
        }
        None => None,
    };
    Ok(GffReport {
        j,
        kappa,
        s: s_level,
        samples: raw.len(),
        mean_power_sum,
        variance: all.variance(),
        half_variance: half.variance(),
        predicted_variance,
        skewness: all.skewness(),
        excess_kurtosis: all.excess_kurtosis(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::build_transforms;

    fn stair(p: u32) -> TransformPack {
        build_transforms(&BaseMeasure::Staircase { p }).unwrap()
    }

    fn two_intervals() -> TransformPack {
        build_transforms(&BaseMeasure::Intervals(vec![(0.0, 0.5), (1.0, 1.5)])).unwrap()
    }

    fn pairs() -> Vec<(Complex64, Complex64)> {
        let mut out = Vec::new();
        for k in 0..8 {
            let a = 0.7 * k as f64;
            let z = 1.0 + Complex64::from_polar(0.2, a);
            let w = 1.0 + Complex64::from_polar(0.35, 1.3 * a + 0.4);
            out.push((z, w));
        }
        out
    }

    #[test]
    fn kernel_is_symmetric() {
        for pack in [stair(2), stair(3), two_intervals()] {
            for (z, w) in pairs() {
                let a = q_kernel(z, w, &pack).unwrap();
                let b = q_kernel(w, z, &pack).unwrap();
                assert!((a - b).norm() < 1e-10 * a.norm().max(1.0), "{a} {b}");
            }
        }
    }

    #[test]
    fn covariance_is_symmetric_in_the_levels() {
        let pack = stair(2);
        let a = covariance_contour(&CovarianceSpec::new(1, 2, 0.7, 0.3), &pack).unwrap().value;
        let b = covariance_contour(&CovarianceSpec::new(2, 1, 0.3, 0.7), &pack).unwrap().value;
        let g = covariance_green(&CovarianceSpec::new(1, 2, 0.7, 0.3), &pack).unwrap().value;
        assert!((a - b).abs() < 1e-12 && (a - g).abs() < 1e-8, "{a} {b} {g}");
    }

    #[test]
    fn kernel_without_correction_term() {
        let pack = stair(1);
        for (z, w) in pairs() {
            let q = q_kernel(z, w, &pack).unwrap();
            assert!((q - 1.0 / ((z - w) * (z - w))).norm() < 1e-12);
        }
    }

    #[test]
    fn kernel_forms_agree() {
        let pack = stair(2);
        let (z, w) = (c(1.1), Complex64::new(1.2, 0.1));
        let a = q_kernel(z, w, &pack).unwrap();
        let b = q_kernel_compact(z, w, &pack).unwrap();
        assert!((a - b).norm() < 1e-9 * a.norm(), "{a} {b}");
        for pack in [stair(3), two_intervals()] {
            for (z, w) in pairs() {
                let a = q_kernel(z, w, &pack).unwrap();
                let b = q_kernel_compact(z, w, &pack).unwrap();
                assert!((a - b).norm() < 1e-8 * a.norm().max(1.0), "{a} {b}");
            }
        }
    }

    #[test]
    fn contour_and_green_forms_agree() {
        let pack = stair(2);
        for (k1, k2) in [(1, 1), (1, 2), (2, 2)] {
            let spec = CovarianceSpec::new(k1, k2, 0.5, 0.5);
            let a = covariance_contour(&spec, &pack).unwrap();
            let b = covariance_green(&spec, &pack).unwrap();
            eprintln!("{k1} {k2} {a:?} {b:?}");
            assert!((a.value - b.value).abs() < 1e-6, "{a:?} {b:?}");
            assert!(a.residue.abs() < 1e-10);
        }
    }

    #[test]
    fn distinct_levels() {
        let pack = stair(2);
        for ((k1, k2), want) in [((1, 1), 0.08), ((1, 2), 0.16), ((2, 2), 0.352)] {
            let spec = CovarianceSpec::new(k1, k2, 0.4, 0.6);
            let a = covariance_contour(&spec, &pack).unwrap();
            let b = covariance_green(&spec, &pack).unwrap();
            assert!((a.value - want).abs() < 1e-9, "{a:?}");
            assert!((b.value - want).abs() < 1e-6, "{b:?}");
        }
    }

    #[test]
    fn variances_are_nonnegative() {
        for pack in [stair(2), stair(3)] {
            for k in 1..=3 {
                for s in [0.2, 0.5, 0.8] {
                    let v = covariance_contour(&CovarianceSpec::new(k, k, s, s), &pack).unwrap();
                    assert!(v.value > 0.0);
                }
            }
        }
    }

    #[test]
    fn bad_specs_rejected() {
        let pack = stair(2);
        assert!(covariance_contour(&CovarianceSpec::new(0, 1, 0.5, 0.5), &pack).is_err());
        assert!(covariance_contour(&CovarianceSpec::new(1, 1, 1.0, 0.5), &pack).is_err());
        let mut spec = CovarianceSpec::new(1, 1, 0.5, 0.5);
        spec.epsilon = Some(0.6);
        assert!(covariance_contour(&spec, &pack).is_err());
    }

    #[test]
    fn single_interval_has_no_liquid_region() {
        let pack = build_transforms(&BaseMeasure::Intervals(vec![(0.0, 1.0)])).unwrap();
        for s in [0.1, 0.5, 0.9] {
            for k in -4..12 {
                assert_eq!(liquid_map(0.25 * k as f64, s, &pack).unwrap(), None);
            }
            assert!(liquid_intervals(s, &pack).unwrap().is_empty());
        }
    }

    #[test]
    fn liquid_map_round_trip() {
        let pack = two_intervals();
        let mut checked = 0;
        for a in 0..8 {
            for r in [0.3, 0.8, 1.7, 4.0] {
                let zeta = Complex64::from_polar(r, 0.2 + 0.35 * a as f64) + 0.6;
                let pre = liquid_map_inverse(zeta, &pack).unwrap();
                assert!(pre.s_im.abs() < 1e-10, "{pre:?}");
                assert!(pre.chi_im.abs() < 1e-10, "{pre:?}");
                if pre.s > 0.0 && pre.s < 1.0 {
                    let back = liquid_map(pre.chi, pre.s, &pack).unwrap().unwrap();
                    assert!((back - zeta).norm() < 1e-8, "{zeta} {back}");
                    checked += 1;
                }
            }
        }
        assert!(checked >= 10, "{checked}");
    }

    #[test]
    fn polynomial_and_root_routes_agree() {
        let pack = two_intervals();
        for s in [0.3, 0.6] {
            for &(a, b) in &liquid_intervals(s, &pack).unwrap() {
                for k in 1..5 {
                    let x = a + (b - a) * k as f64 / 5.0;
                    let p = liquid_map(x, s, &pack).unwrap().unwrap();
                    let r = liquid_map_via_root(x, s, &pack).unwrap().unwrap();
                    assert!((p - r).norm() < 1e-8, "{p} {r}");
                    assert!((v_y(p, s, &pack).unwrap() - x).norm() < 1e-9);
                }
            }
        }
        let pack = stair(3);
        for s in [0.3, 0.6] {
            for &(a, b) in &liquid_intervals(s, &pack).unwrap() {
                for k in 1..5 {
                    let x = a + (b - a) * k as f64 / 5.0;
                    let p = liquid_map(x, s, &pack).unwrap().unwrap();
                    let z = solve_zplus(x, s, &pack).unwrap().unwrap();
                    assert!((p - (z * pack.w(z).unwrap()).conj()).norm() < 1e-9);
                    assert!((v_y(p, s, &pack).unwrap() - x).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn inverse_far_away() {
        let pack = two_intervals();
        let m1 = pack.measure.moment(1);
        for r in [1e3, 1e4] {
            let zeta = Complex64::from_polar(r, 1.0);
            let pre = liquid_map_inverse(zeta, &pack).unwrap();
            assert!((pre.chi - 1.0).abs() < 10.0 / r);
            let scaled = pre.s * r * r;
            assert!((scaled - (m1 - 0.5)).abs() < 0.1 * (m1 - 0.5).abs().max(0.1), "{scaled} {m1}");
        }
    }

    #[test]
    fn statistics_on_exact_samples() {
        use crate::enumerate::EnumerationSpec;
        use crate::mcmc::sample_exact_batch;
        use crate::partition::Partition;
        let spec = EnumerationSpec::new(Partition::staircase(2, 3), 3, 3);
        let batch = sample_exact_batch(&spec, 400, 7).unwrap();
        let top = gff_statistics(&batch, 0, 1.0, None).unwrap();
        assert_eq!(top.kappa, 0);
        assert_eq!(top.variance, 0.0);
        let mid = gff_statistics(&batch, 1, 0.6, Some(&stair(2))).unwrap();
        assert_eq!(mid.kappa, 1);
        assert!(mid.variance > 0.0);
        assert!(mid.predicted_variance.unwrap() > 0.0);
        assert!(mid.warnings.is_empty());
        let few = SampleBatch { samples: batch.samples[..10].to_vec(), ..batch };
        assert_eq!(gff_statistics(&few, 1, 0.6, None).unwrap().warnings.len(), 1);
    }
}
