//! Quadrature rules: periodic trapezoid on circles, tanh-sinh on intervals,
//! Gauss–Legendre nodes.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `(1/2πi) ∮ f(z) dz` over `|z - center| = radius` with `m` nodes.
pub fn circle_trapezoid(
    f: &impl Fn(Complex64) -> Complex64,
    center: Complex64,
    radius: f64,
    m: usize,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..m {
        let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
        // dz = i r e dθ, so (1/2πi) dz = r e dθ / 2π
        acc += f(center + radius * e) * e;
    }
    acc * radius / m as f64
}

#[derive(Clone, Copy, Debug)]
pub struct CircleResult {
    pub value: Complex64,
    pub nodes: usize,
    pub rel_change: f64,
}

/// Doubles the node count from `min_nodes` until the relative change drops
/// below `tol`.
pub fn circle_adaptive(
    f: &impl Fn(Complex64) -> Complex64,
    center: Complex64,
    radius: f64,
    tol: f64,
    min_nodes: usize,
    max_nodes: usize,
) -> Result<CircleResult> {
    let mut m = min_nodes;
    let mut prev = circle_trapezoid(f, center, radius, m);
    while m < max_nodes {
        m *= 2;
        let cur = circle_trapezoid(f, center, radius, m);
        let change = (cur - prev).norm() / cur.norm().max(1e-300);
        if !cur.is_finite() {
            return Err(Error::Precision(format!("non-finite contour integral at {m} nodes")));
        }
        if change < tol || (cur - prev).norm() < tol * 1e-6 {
            return Ok(CircleResult { value: cur, nodes: m, rel_change: change });
        }
        prev = cur;
    }
    Err(Error::Precision(format!(
        "contour integral not converged with {max_nodes} nodes"
    )))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `∫_a^b f` by tanh-sinh; tolerates integrable endpoint singularities.
///
/// Nodes crowd the endpoints double-exponentially, so a strong singularity
/// is best placed at an endpoint equal to zero, where the offsets stay
/// representable.
pub fn tanh_sinh(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    tanh_sinh_abs(f, a, b, tol, 0.0)
}

/// [`tanh_sinh`] that also stops once successive estimates differ by less
/// than `abs_tol`.
pub fn tanh_sinh_abs(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let half = 0.5 * (b - a);
    let tmax = 3.5;
    let eval = |h: f64, offset_only: bool| -> f64 {
        let mut s = 0.0;
        let kmax = (tmax / h).ceil() as i64;
        for k in -kmax..=kmax {
            if offset_only && k % 2 == 0 {
                continue;
            }
            let t = k as f64 * h;
            let u = 0.5 * PI * t.sinh();
            let x = u.tanh();
            let wgt = 0.5 * PI * t.cosh() / u.cosh().powi(2);
            // distance to the nearer endpoint, computed without cancellation
            let d = 1.0 / (u.abs().exp() * u.cosh());
            if d == 0.0 || wgt == 0.0 {
                continue;
            }
            let xv = if x >= 0.0 { b - half * d } else { a + half * d };
            let fx = f(xv);
            if fx.is_finite() {
                s += wgt * fx;
            }
        }
        s
    };
    let mut h = 0.5;
    let mut sum = eval(h, false);
    let mut est = sum * h * half;
    for _ in 0..10 {
        h *= 0.5;
        sum += eval(h, true);
        let next = sum * h * half;
        if (next - est).abs() <= (tol * next.abs()).max(abs_tol).max(1e-300) {
            return Ok(next);
        }
        est = next;
    }
    Err(Error::Precision(format!("tanh-sinh did not converge on [{a}, {b}]")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_of_simple_pole() {
        let f = |z: Complex64| 3.0 / (z - 1.0) + z * z;
        let r = circle_adaptive(&f, Complex64::new(1.0, 0.0), 0.5, 1e-12, 16, 4096).unwrap();
        assert!((r.value - 3.0).norm() < 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-13);
    }

    #[test]
    fn tanh_sinh_log_singularity() {
        let v = tanh_sinh(&|x: f64| x.ln(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v + 1.0).abs() < 1e-11);
        let v = tanh_sinh(&|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{v}");
    }
}
