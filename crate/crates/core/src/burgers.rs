//! Complex slope of the limiting height function and the Burgers equation.
//!
//! Everything here is for the uniformly weighted model, `s = 1 - y`. The
//! slope `u = 1/(z S^{-1}(ln z)) = W(z)` is taken at `z = z_+(χ, y)`, and
//! `U_y(z) = χ` reads `(z - y) u = χ`. Its reciprocal `v = 1/u` therefore
//! satisfies `z - y = χ v`, and `v` (not `u`) solves `v_x - v v_y = 0`;
//! `u` itself solves the transposed equation `u_y - u u_x = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limit::{density_at_s, solve_zplus, Schedule};
use crate::measure::TransformPack;
use crate::numeric::arg_2pi;

fn check_schedule(schedule: &Schedule) -> Result<()> {
    match *schedule {
        Schedule::Uniform { alpha } if alpha == 1.0 => Ok(()),
        other => Err(Error::AssumptionViolation(format!(
            "the complex slope needs the uniform schedule with alpha = 1, got {other:?}"
        ))),
    }
}

/// Complex slope at one point, with the root it was built from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slope {
    pub z: Complex64,
    pub u: Complex64,
}

impl Slope {
    /// `1/u = z S^{-1}(ln z)`.
    pub fn reciprocal(&self) -> Complex64 {
        1.0 / self.u
    }
}

/// Evaluator for the complex slope over the `(χ, y)` domain.
#[derive(Clone, Debug)]
pub struct ComplexSlopeField<'a> {
    pub pack: &'a TransformPack,
    pub schedule: Schedule,
}

impl<'a> ComplexSlopeField<'a> {
    pub fn new(pack: &'a TransformPack, schedule: Schedule) -> Result<Self> {
        check_schedule(&schedule)?;
        Ok(Self { pack, schedule })
    }

    pub fn at(&self, chi: f64, y: f64) -> Result<Option<Slope>> {
        let s = self.schedule.s_of_y(y);
        match solve_zplus(chi, s, self.pack)? {
            None => Ok(None),
            Some(z) => Ok(Some(Slope { z, u: self.pack.w(z)? })),
        }
    }

    pub fn is_liquid(&self, chi: f64, y: f64) -> Result<bool> {
        Ok(solve_zplus(chi, self.schedule.s_of_y(y), self.pack)?.is_some())
    }
}

/// `u(χ, y)`, or `None` at frozen points.
pub fn u_field(chi: f64, y: f64, schedule: &Schedule, pack: &TransformPack) -> Result<Option<Complex64>> {
    Ok(ComplexSlopeField::new(pack, *schedule)?.at(chi, y)?.map(|p| p.u))
}

/// Residuals of the two identities tied to `U_y(z) = χ` at a liquid point:
/// `|z - y - χ/u|` and `|Arg(z - y) + Arg(u) - 2π|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeIdentities {
    pub linear: f64,
    pub arg_sum: f64,
}

pub fn slope_identities(chi: f64, y: f64, schedule: &Schedule, pack: &TransformPack) -> Result<Option<SlopeIdentities>> {
    let Some(p) = ComplexSlopeField::new(pack, *schedule)?.at(chi, y)? else {
        return Ok(None);
    };
    let d = p.z - y;
    Ok(Some(SlopeIdentities {
        linear: (d - chi * p.reciprocal()).norm(),
        arg_sum: (arg_2pi(d) + arg_2pi(p.u) - 2.0 * PI).abs(),
    }))
}

/// `∇h = (Arg(z_+ - 1 + s)/π, Im u/π)`; frozen points give `(0, 0)` or `(1, 0)`.
pub fn grad_h(chi: f64, y: f64, schedule: &Schedule, pack: &TransformPack) -> Result<(f64, f64)> {
    let field = ComplexSlopeField::new(pack, *schedule)?;
    let s = schedule.s_of_y(y);
    match field.at(chi, y)? {
        Some(p) => Ok(((p.z - 1.0 + s).arg() / PI, p.u.im / PI)),
        None => Ok((density_at_s(chi, s, pack)?, 0.0)),
    }
}

/// Both Burgers residuals from one central-difference stencil.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BurgersResidual {
    pub chi: f64,
    pub y: f64,
    pub step: f64,
    /// `|v_x - v v_y|` for `v = 1/u`.
    pub residual: f64,
    /// `|u_y - u u_x|`.
    pub transposed: f64,
}

/// Central differences of the slope at `(χ, y)` with step `h`.
///
/// Fails with a margin error unless every point within `2h` along both axes
/// is liquid.
pub fn burgers_stencil(chi: f64, y: f64, h: f64, schedule: &Schedule, pack: &TransformPack) -> Result<BurgersResidual> {
    if !(h > 0.0) {
        return Err(Error::Argument(format!("step must be positive, got {h}")));
    }
    let field = ComplexSlopeField::new(pack, *schedule)?;
    let at = |x: f64, yy: f64| -> Result<Slope> {
        field.at(x, yy)?.ok_or_else(|| Error::Margin(format!("({x}, {yy}) is frozen")))
    };
    for k in [-2.0, 2.0] {
        at(chi + k * h, y)?;
        at(chi, y + k * h)?;
    }
    let c0 = at(chi, y)?;
    let (xp, xm) = (at(chi + h, y)?, at(chi - h, y)?);
    let (yp, ym) = (at(chi, y + h)?, at(chi, y - h)?);

    let u_x = (xp.u - xm.u) / (2.0 * h);
    let u_y = (yp.u - ym.u) / (2.0 * h);
    let v_x = (xp.reciprocal() - xm.reciprocal()) / (2.0 * h);
    let v_y = (yp.reciprocal() - ym.reciprocal()) / (2.0 * h);
    Ok(BurgersResidual {
        chi,
        y,
        step: h,
        residual: (v_x - c0.reciprocal() * v_y).norm(),
        transposed: (u_y - c0.u * u_x).norm(),
    })
}

/// `|v_x - v v_y|` by central differences; see [`burgers_stencil`].
pub fn burgers_residual(chi: f64, y: f64, h: f64, schedule: &Schedule, pack: &TransformPack) -> Result<f64> {
    Ok(burgers_stencil(chi, y, h, schedule, pack)?.residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::{density_my, double_root_staircase};
    use crate::measure::{build_transforms, BaseMeasure};

    fn p3() -> TransformPack {
        build_transforms(&BaseMeasure::Staircase { p: 3 }).unwrap()
    }

    const UNIFORM: Schedule = Schedule::Uniform { alpha: 1.0 };

    #[test]
    fn identities_hold_in_the_liquid_region() {
        let pack = p3();
        let mut seen = 0;
        for i in 1..12 {
            for j in 1..6 {
                let (chi, y) = (0.25 * i as f64, 0.15 * j as f64);
                if let Some(r) = slope_identities(chi, y, &UNIFORM, &pack).unwrap() {
                    assert!(r.linear < 1e-9, "{chi} {y}: {r:?}");
                    assert!(r.arg_sum < 1e-9, "{chi} {y}: {r:?}");
                    seen += 1;
                }
            }
        }
        assert!(seen >= 10);
    }

    #[test]
    fn slope_lies_in_the_lower_half_plane() {
        let pack = p3();
        let u = u_field(1.2, 0.5, &UNIFORM, &pack).unwrap().unwrap();
        assert!(u.im < 0.0);
        assert!((1.0 / u).im > 0.0);
    }

    #[test]
    fn second_order_convergence() {
        let pack = p3();
        let (chi, y) = (1.2, 0.5);
        let a = burgers_stencil(chi, y, 1e-3, &UNIFORM, &pack).unwrap();
        let b = burgers_stencil(chi, y, 5e-4, &UNIFORM, &pack).unwrap();
        assert!(a.residual < 1e-5);
        let ratio = a.residual / b.residual;
        assert!((ratio - 4.0).abs() < 1.2, "ratio {ratio}");
        assert!(a.transposed < 1e-5);
    }

    #[test]
    fn gradient_matches_density() {
        let pack = p3();
        for &(chi, y) in &[(1.2, 0.5), (0.5, 0.3), (2.0, 0.4), (0.1, 0.9)] {
            let (hx, _) = grad_h(chi, y, &UNIFORM, &pack).unwrap();
            let d = density_my(chi, y, &UNIFORM, &pack).unwrap();
            assert!((hx - d).abs() < 1e-9);
        }
        // far right is empty, far left below the support is full
        assert_eq!(grad_h(10.0, 0.5, &UNIFORM, &pack).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn slope_flattens_at_the_frozen_boundary() {
        let pack = p3();
        let z = 2.0;
        let (chi, s) = double_root_staircase(z, 3).unwrap();
        let y = 1.0 - s;
        let mut last = f64::INFINITY;
        for k in 1..6 {
            let d = 10f64.powi(-k);
            if let Some(u) = u_field(chi - d, y, &UNIFORM, &pack).unwrap() {
                assert!(u.im.abs() < last);
                last = u.im.abs();
            }
        }
        assert!(last < 1e-2, "{last}");
    }

    #[test]
    fn margin_error_near_frozen_points() {
        let pack = p3();
        let err = burgers_stencil(2.9, 0.5, 0.2, &UNIFORM, &pack).unwrap_err();
        assert!(matches!(err, Error::Margin(_)));
    }

    #[test]
    fn rejects_other_schedules() {
        let pack = p3();
        let s = Schedule::Uniform { alpha: 2.0 };
        assert!(u_field(1.0, 0.5, &s, &pack).is_err());
    }
}
