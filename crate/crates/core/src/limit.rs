//! Limit shape of the level measures: the observable `U_y`, its root in the
//! upper half plane, densities, moments and frozen boundaries.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{BaseMeasure, TransformPack};
use crate::numeric::{c, quad, roots, series};

/// How the weight fraction `s` depends on the rescaled level `y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Schedule {
    /// `s = 1 - y/α`.
    Uniform { alpha: f64 },
    /// `y = α (1 - s)^e`.
    PowerLaw { alpha: f64, exponent: f64 },
}

impl Schedule {
    pub fn s_of_y(&self, y: f64) -> f64 {
        match *self {
            Self::Uniform { alpha } => 1.0 - y / alpha,
            Self::PowerLaw { alpha, exponent } => 1.0 - (y / alpha).max(0.0).powf(1.0 / exponent),
        }
    }

    pub fn y_of_s(&self, s: f64) -> f64 {
        match *self {
            Self::Uniform { alpha } => alpha * (1.0 - s),
            Self::PowerLaw { alpha, exponent } => alpha * (1.0 - s).max(0.0).powf(exponent),
        }
    }

    pub fn parse(kind: &str, alpha: f64, exponent: Option<f64>) -> Result<Self> {
        match kind {
            "uniform" => Ok(Self::Uniform { alpha }),
            "power" => Ok(Self::PowerLaw { alpha, exponent: exponent.unwrap_or(2.0) }),
            other => Err(Error::Argument(format!("unknown schedule {other:?}"))),
        }
    }
}

/// `U_y(z) = (z-1+s) H'(z) + (z-1+s)/(z-1)`.
pub fn u_y(z: Complex64, s: f64, pack: &TransformPack) -> Result<Complex64> {
    let e = z - 1.0;
    if e.norm() < 1e-14 {
        return Err(Error::Pole(z));
    }
    Ok((e + s) * pack.h_prime(z)? + (e + s) / e)
}

/// `U_y(z) = (z-1+s) W(z)`, the same function without the split at 1.
pub fn u_y_combined(z: Complex64, s: f64, pack: &TransformPack) -> Result<Complex64> {
    Ok((z - 1.0 + s) * pack.w(z)?)
}

/// `p z^{p-1}(z-1+s)/(z^p-1)`.
pub fn u_y_staircase(z: Complex64, s: f64, p: u32) -> Result<Complex64> {
    let zp = z.powu(p);
    if (zp - 1.0).norm() < 1e-14 {
        return Err(Error::Pole(z));
    }
    Ok(p as f64 * z.powu(p - 1) * (z - 1.0 + s) / (zp - 1.0))
}

/// `U_y'(z) = W(z) + (z-1+s) W'(z)`.
pub fn u_y_prime(z: Complex64, s: f64, pack: &TransformPack) -> Result<Complex64> {
    Ok(pack.w(z)? + (z - 1.0 + s) * pack.w_prime(z)?)
}

/// Intervals form: `U_y = (z-1+s) ζ / z` with `z = ∏ (ζ-a_i)/(ζ-b_i)`.
pub fn u_y_from_zeta(zeta: Complex64, s: f64, intervals: &[(f64, f64)]) -> (Complex64, Complex64) {
    let z: Complex64 = intervals.iter().map(|&(a, b)| (zeta - a) / (zeta - b)).product();
    (z, (z - 1.0 + s) * zeta / z)
}

/// Relative tolerance on `Im z` below which a root counts as real. Double
/// roots split by about the square root of the rounding error.
pub const REAL_ROOT_TOL: f64 = 1e-7;

/// All solutions of `U_y(z) = χ`, for kinds where this is polynomial.
pub fn all_roots(chi: Complex64, s: f64, pack: &TransformPack) -> Result<Vec<Complex64>> {
    match &pack.measure {
        BaseMeasure::Staircase { p } => {
            // p z^{p-1}(z-1+s) - χ (z^p - 1) = 0
            let p = *p as usize;
            let mut co = vec![c(0.0); p + 1];
            co[0] += chi;
            co[p - 1] += c(p as f64 * (s - 1.0));
            co[p] += p as f64 - chi;
            let mut rs = roots::roots(&co)?;
            polish(&mut rs, chi, s, pack);
            Ok(rs)
        }
        BaseMeasure::Intervals(iv) => {
            // (ζ - χ) ∏_{i>1}(ζ - a_i) - (1-s) ∏ (ζ - b_i) = 0, then z = (1-s) ζ / (ζ - χ)
            let one = c(1.0);
            let mut a_rest = vec![one];
            for &(a, _) in &iv[1..] {
                a_rest = roots::mul(&a_rest, &[c(-a), one]);
            }
            let mut b_all = vec![one];
            for &(_, b) in iv {
                b_all = roots::mul(&b_all, &[c(-b), one]);
            }
            let lhs = roots::mul(&[-chi, one], &a_rest);
            let mut co = vec![c(0.0); lhs.len().max(b_all.len())];
            for (k, v) in lhs.iter().enumerate() {
                co[k] += v;
            }
            for (k, v) in b_all.iter().enumerate() {
                co[k] -= (1.0 - s) * v;
            }
            let zetas = roots::roots(&co)?;
            Ok(zetas
                .into_iter()
                .filter(|zeta| (zeta - chi).norm() > 1e-300)
                .map(|zeta| (1.0 - s) * zeta / (zeta - chi))
                .collect())
        }
        other => Err(Error::Unsupported(format!(
            "root solving for {other} (only staircase and intervals reduce to polynomials)"
        ))),
    }
}

fn polish(rs: &mut [Complex64], chi: Complex64, s: f64, pack: &TransformPack) {
    for z in rs.iter_mut() {
        for _ in 0..2 {
            let (Ok(u), Ok(d)) = (u_y(*z, s, pack), u_y_prime(*z, s, pack)) else { break };
            let step = (u - chi) / d;
            if !step.is_finite() || step.norm() > 1e-6 * z.norm().max(1.0) {
                break;
            }
            *z -= step;
        }
    }
}

fn is_real(z: Complex64) -> bool {
    z.im.abs() <= REAL_ROOT_TOL * z.norm().max(1.0)
}

/// Whether an upper root of the staircase equation is `exp St(ζ)` for some
/// `ζ` off the support, i.e. `S(S^{-1}(ln z)) = ln z` with the principal
/// logarithm. Roots that fail are images of the other poles of `W` (the
/// nontrivial `p`-th roots of unity) and carry no density. Measures made of
/// unit-density intervals have at most one conjugate pair and need no test.
fn on_physical_sheet(z: Complex64, pack: &TransformPack) -> bool {
    if !matches!(pack.measure, BaseMeasure::Staircase { .. }) {
        return true;
    }
    let l = z.ln();
    match pack.s_inv(l).and_then(|w| pack.s(w)) {
        Ok(back) => (back - l).norm() <= 1e-8 * l.norm().max(1.0),
        Err(_) => false,
    }
}

/// The root of `U_y(z) = χ` in the upper half plane, or `None` at frozen
/// points.
pub fn solve_zplus(chi: f64, s: f64, pack: &TransformPack) -> Result<Option<Complex64>> {
    let rs = all_roots(c(chi), s, pack)?;
    let upper: Vec<Complex64> = rs
        .iter()
        .copied()
        .filter(|z| z.im > 0.0 && !is_real(*z) && on_physical_sheet(*z, pack))
        .collect();
    match upper.len() {
        0 => Ok(None),
        1 => Ok(Some(upper[0])),
        k => {
            // a real double root can split into two near-real roots that both
            // land just above the axis; that is the frozen boundary itself
            let scale = upper.iter().map(|z| z.norm()).fold(1.0, f64::max);
            let tight = upper.iter().all(|a| upper.iter().all(|b| (a - b).norm() < 1e-5 * scale));
            if tight {
                return Ok(None);
            }
            Err(Error::AssumptionViolation(format!(
                "U_y(z) = {chi} has {k} roots in the upper half plane at s = {s}"
            )))
        }
    }
}

/// A point of the rescaled domain with its upper-half-plane root.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiquidPoint {
    pub chi: f64,
    pub y: f64,
    pub s: f64,
    pub z_plus: Option<(f64, f64)>,
}

pub fn liquid_point(chi: f64, y: f64, schedule: &Schedule, pack: &TransformPack) -> Result<LiquidPoint> {
    let s = schedule.s_of_y(y);
    let z = solve_zplus(chi, s, pack)?;
    Ok(LiquidPoint { chi, y, s, z_plus: z.map(|z| (z.re, z.im)) })
}

/// Density of the level measure at `χ` for weight fraction `s`.
///
/// In the liquid region this is `Arg(z_+ - 1 + s)/π`. At frozen points the
/// value is read from the real root that leaves into the lower half plane
/// when `χ` gains a small positive imaginary part (the root with
/// `U_y' < 0`): the density is 1 when that root lies left of `1 - s`.
pub fn density_at_s(chi: f64, s: f64, pack: &TransformPack) -> Result<f64> {
    if let Some(z) = solve_zplus(chi, s, pack)? {
        return Ok((z - 1.0 + s).arg() / PI);
    }
    let rs = all_roots(c(chi), s, pack)?;
    let mut branch = Vec::new();
    for z in rs.iter().filter(|z| is_real(**z)) {
        let zr = c(z.re);
        if let Ok(d) = u_y_prime(zr, s, pack) {
            if d.re < 0.0 {
                branch.push(z.re);
            }
        }
    }
    match branch.len() {
        1 => Ok(if branch[0] - 1.0 + s < 0.0 { 1.0 } else { 0.0 }),
        _ => density_by_continuation(chi, s, pack),
    }
}

/// Follows the root with `z ≈ 1 + s/x` from large `x` to `χ` along
/// `Im x = η` and reads the phase there.
fn density_by_continuation(chi: f64, s: f64, pack: &TransformPack) -> Result<f64> {
    let eta = 1e-6;
    let start = pack.measure.support_max().max(chi) + 10.0;
    let mut x = start;
    let mut z = 1.0 + s / Complex64::new(x, eta);
    let mut h = 0.01;
    while x > chi {
        let nx = (x - h).max(chi);
        let rs = all_roots(Complex64::new(nx, eta), s, pack)?;
        let best = rs
            .iter()
            .copied()
            .min_by(|a, b| (a - z).norm().total_cmp(&(b - z).norm()))
            .ok_or_else(|| Error::Consistency("no roots".into()))?;
        if (best - z).norm() > 0.05 && h > 1e-7 {
            h *= 0.5;
            continue;
        }
        z = best;
        x = nx;
        h = (h * 1.5).min(0.05);
    }
    let phase = -(z - 1.0 + s).arg() / PI;
    Ok(if phase > 0.5 { 1.0 } else { 0.0 })
}

pub fn density_my(chi: f64, y: f64, schedule: &Schedule, pack: &TransformPack) -> Result<f64> {
    density_at_s(chi, schedule.s_of_y(y), pack)
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Both evaluations of `∫ x^j dm_y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEval {
    pub contour: f64,
    pub residue: f64,
    pub nodes: usize,
    pub radius: f64,
}

impl MomentEval {
    pub fn gap(&self) -> f64 {
        (self.contour - self.residue).abs()
    }
}

/// `(1/(2(j+1)πi)) ∮ dz/(z-1+s) U_y(z)^{j+1}` around 1 by the trapezoid rule.
pub fn moment_contour(j: u32, s: f64, pack: &TransformPack) -> Result<(f64, usize, f64)> {
    let mut radius = pack.contour_radius();
    let mut last = None;
    for _ in 0..4 {
        let bad = std::cell::Cell::new(None);
        let f = |z: Complex64| match pack.w(z) {
            Ok(w) => (z - 1.0 + s).powu(j) * w.powu(j + 1) / (j + 1) as f64,
            Err(e) => {
                bad.set(Some(e.to_string()));
                c(f64::NAN)
            }
        };
        match quad::circle_adaptive(&f, c(1.0), radius, 1e-12, 64, 4096) {
            Ok(r) if bad.take().is_none() => return Ok((r.value.re, r.nodes, radius)),
            Ok(_) => last = Some(Error::Domain { at: c(1.0 + radius), nearest: c(1.0) }),
            Err(e) => last = Some(e),
        }
        radius *= 0.5;
    }
    Err(last.unwrap_or(Error::Domain { at: c(1.0 + radius), nearest: c(1.0) }))
}

/// `Σ_g C(j,g)/(g+1) · (1/g!) ∂^g[(z-1+s)^j H'(z)^{j-g}]` at `z = 1`, from the
/// Taylor series of `H'`.
pub fn moment_residue(j: u32, s: f64, pack: &TransformPack) -> f64 {
    let len = j as usize + 1;
    let hp = pack.h_prime_series();
    let lin = [c(s), c(1.0)];
    let zs = series::pow(&lin, j, len);
    let mut total = 0.0;
    for g in 0..=j {
        let term = series::mul(&zs, &series::pow(&hp[..len.min(hp.len())], j - g, len), len);
        total += binom(j, g) / (g as f64 + 1.0) * term[g as usize].re;
    }
    total
}

/// `∫ x^j dm_y` at weight fraction `s`, by contour quadrature and by the
/// residue expansion.
pub fn moment_my(j: u32, s: f64, pack: &TransformPack) -> Result<MomentEval> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Argument(format!("s = {s} outside [0, 1]")));
    }
    let (contour, nodes, radius) = moment_contour(j, s, pack)?;
    Ok(MomentEval { contour, residue: moment_residue(j, s, pack), nodes, radius })
}

/// One sample of a frozen boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrozenSample {
    pub z: f64,
    pub chi: f64,
    pub s: f64,
    pub y: f64,
    /// `|U_y(z) - χ|` and `|U_y'(z)|` at the sample.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrozenCurve {
    pub schedule: Schedule,
    /// `None` marks a gap (parameter at a pole).
    pub samples: Vec<Option<FrozenSample>>,
}

/// `(χ, s)` where `U_y` has a double root at real `z`:
/// `s = 1 - z - W/W'`, `χ = -W²/W'`, with `W` from the numerical inverse.
///
/// Near `z = 1` the pole of `W` cancels; there the Taylor series of `H'`
/// gives `χ = (1+eh)²/(1-e²h')` and `s = -e + e(1+eh)/(1-e²h')`, `e = z-1`.
pub fn double_root_point(z: f64, pack: &TransformPack) -> Result<(f64, f64)> {
    let zc = c(z);
    let e = z - 1.0;
    if e.abs() < 1e-2 {
        let hp = pack.h_prime_series();
        let h = series::eval(hp, c(e)).re;
        let dh: Vec<Complex64> = hp.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect();
        let h1 = series::eval(&dh, c(e)).re;
        let den = 1.0 - e * e * h1;
        let num = 1.0 + e * h;
        return Ok((num * num / den, -e + e * num / den));
    }
    let w = pack.w_generic(zc)?;
    let wp = pack.w_prime_generic(zc)?;
    if wp.norm() < 1e-300 {
        return Err(Error::Pole(zc));
    }
    let s = 1.0 - z - (w / wp).re;
    let chi = -(w * w / wp).re;
    Ok((chi, s))
}

/// Closed form for the staircase: `χ = p z^p/(z^p+p-1)`,
/// `s = (z^p - p z + p - 1)/(z^p + p - 1)`.
pub fn double_root_staircase(z: f64, p: u32) -> Result<(f64, f64)> {
    let zp = z.powi(p as i32);
    let pf = p as f64;
    let den = zp + pf - 1.0;
    if den.abs() < 1e-12 {
        return Err(Error::Pole(c(z)));
    }
    Ok((pf * zp / den, (zp - pf * z + pf - 1.0) / den))
}

/// Sweeps `z` over `zs` and applies the schedule.
pub fn frozen_boundary(pack: &TransformPack, schedule: &Schedule, zs: &[f64]) -> Result<FrozenCurve> {
    if !matches!(pack.measure, BaseMeasure::Staircase { .. } | BaseMeasure::Intervals(_)) {
        return Err(Error::Unsupported(format!("frozen boundary for {}", pack.measure)));
    }
    let mut samples = Vec::with_capacity(zs.len());
    for &z in zs {
        let pt = match pack.measure {
            BaseMeasure::Staircase { p } => double_root_staircase(z, p),
            _ => double_root_point(z, pack),
        };
        let Ok((chi, s)) = pt else {
            samples.push(None);
            continue;
        };
        let r1 = u_y_combined(c(z), s, pack).map(|u| (u.re - chi).abs());
        let r2 = u_y_prime(c(z), s, pack).map(|u| u.norm());
        match (r1, r2) {
            (Ok(a), Ok(b)) if chi.is_finite() && s.is_finite() => samples.push(Some(FrozenSample {
                z,
                chi,
                s,
                y: schedule.y_of_s(s),
                residual: a.max(b),
            })),
            _ => samples.push(None),
        }
    }
    Ok(FrozenCurve { schedule: *schedule, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::build_transforms;

    fn stair(p: u32) -> TransformPack {
        build_transforms(&BaseMeasure::Staircase { p }).unwrap()
    }

    #[test]
    fn u_forms_agree() {
        let t = stair(3);
        let u = u_y(c(2.0), 0.4, &t).unwrap();
        assert!((u.re - 2.4).abs() < 1e-12);
        for z in [Complex64::new(1.3, 0.4), Complex64::new(0.2, -0.9), c(2.5)] {
            let a = u_y(z, 0.3, &t).unwrap();
            let b = u_y_staircase(z, 0.3, 3).unwrap();
            assert!((a - b).norm() < 1e-10);
        }
        assert!(matches!(u_y_staircase(c(1.0), 0.3, 3), Err(Error::Pole(_))));
    }

    #[test]
    fn intervals_form_agrees() {
        let iv = vec![(0.0, 0.5), (1.0, 1.5)];
        let t = build_transforms(&BaseMeasure::Intervals(iv.clone())).unwrap();
        for zeta in [Complex64::new(3.0, 1.0), Complex64::new(-2.0, 0.5), Complex64::new(0.7, 2.0)] {
            let (z, u) = u_y_from_zeta(zeta, 0.6, &iv);
            let d = u_y(z, 0.6, &t).unwrap();
            assert!((u - d).norm() < 1e-10, "{zeta}");
        }
    }

    #[test]
    fn unit_interval_is_always_frozen() {
        let t = build_transforms(&BaseMeasure::Intervals(vec![(0.0, 1.0)])).unwrap();
        for chi in [-1.0, 0.2, 0.5, 0.9, 2.0] {
            for s in [0.2, 0.5, 0.8] {
                assert_eq!(solve_zplus(chi, s, &t).unwrap(), None);
            }
        }
    }

    #[test]
    fn frozen_boundary_point_has_no_upper_root() {
        let t = stair(3);
        assert_eq!(solve_zplus(2.4, 0.4, &t).unwrap(), None);
        let (chi, s) = double_root_staircase(2.0, 3).unwrap();
        assert!((chi - 2.4).abs() < 1e-15 && (s - 0.4).abs() < 1e-15);
        assert_eq!(double_root_staircase(1.0, 3).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn liquid_point_has_one_root() {
        let t = stair(3);
        // inside the curve: s = 0.5, χ between the two boundary branches
        let z = solve_zplus(1.2, 0.5, &t).unwrap().expect("liquid");
        assert!(z.im > 0.0);
        assert!((u_y(z, 0.5, &t).unwrap() - 1.2).norm() < 1e-9);
    }

    #[test]
    fn density_limits() {
        let t = stair(2);
        assert_eq!(density_at_s(5.0, 0.5, &t).unwrap(), 0.0);
        assert_eq!(density_at_s(-1.0, 0.5, &t).unwrap(), 0.0);
        assert_eq!(density_at_s(0.01, 0.5, &t).unwrap(), 1.0);
        let d = density_at_s(1.0, 0.5, &t).unwrap();
        assert!(d > 0.0 && d < 1.0);
    }

    #[test]
    fn density_integrates_to_one() {
        for (p, s) in [(2, 0.3), (2, 0.5), (2, 0.8), (3, 0.5), (3, 0.2)] {
            let t = stair(p);
            let n = 4000;
            let (a, b) = (-0.5, p as f64 + 0.5);
            let h = (b - a) / n as f64;
            let total: f64 = (0..n)
                .map(|k| density_at_s(a + (k as f64 + 0.5) * h, s, &t).unwrap() * h)
                .sum();
            let m1: f64 = (0..n)
                .map(|k| {
                    let x = a + (k as f64 + 0.5) * h;
                    x * density_at_s(x, s, &t).unwrap() * h
                })
                .sum();
            // the level measure has total mass one after the 1/s rescaling of the
            // horizontal coordinate
            let mm = moment_my(1, s, &t).unwrap();
            assert!((total - 1.0).abs() < 2e-3, "s={s} mass {total}");
            assert!((m1 - mm.contour).abs() < 2e-3, "s={s} {m1} {}", mm.contour);
        }
    }

    #[test]
    fn moments_dual_routes() {
        for p in [1, 2, 3] {
            let t = stair(p);
            for j in 0..=4 {
                let m = moment_my(j, 0.5, &t).unwrap();
                assert!(m.gap() < 1e-9, "p={p} j={j} {m:?}");
            }
        }
        let m = moment_my(1, 0.5, &stair(2)).unwrap();
        assert!((m.contour - 0.75).abs() < 1e-12);
    }

    #[test]
    fn general_double_root_matches_closed_form() {
        let t = stair(3);
        for k in 0..=40 {
            let z = 1.0 + 2.0 * k as f64 / 40.0;
            let (a, b) = double_root_point(z, &t).unwrap();
            let (ca, cb) = double_root_staircase(z, 3).unwrap();
            assert!((a - ca).abs() < 1e-8 && (b - cb).abs() < 1e-8, "z={z}");
        }
        for z in [1.0, 1.0 + 1e-6, 1.005, 1.0099, 1.0101] {
            let (a, b) = double_root_point(z, &t).unwrap();
            let (ca, cb) = double_root_staircase(z, 3).unwrap();
            assert!((a - ca).abs() < 1e-8 && (b - cb).abs() < 1e-8, "z={z}: {a} {b} vs {ca} {cb}");
        }
        assert_eq!(double_root_point(1.0, &t).unwrap(), (1.0, 0.0));
    }
}
