//! Simultaneous polynomial root finding (Aberth–Ehrlich iteration).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Polynomial with ascending coefficients `c_0 + c_1 x + ...`.
pub fn eval(c: &[Complex64], x: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * x + a)
}

pub fn derivative(c: &[Complex64]) -> Vec<Complex64> {
    c.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect()
}

pub fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `∏ (x - r)`.
pub fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    roots.iter().fold(vec![Complex64::new(1.0, 0.0)], |acc, r| {
        mul(&acc, &[-r, Complex64::new(1.0, 0.0)])
    })
}

fn trim(c: &[Complex64]) -> Vec<Complex64> {
    let scale = c.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut v = c.to_vec();
    while v.len() > 1 && v.last().unwrap().norm() <= 1e-14 * scale {
        v.pop();
    }
    v
}

/// All roots, with deterministic initial points on a circle.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let c = trim(coeffs);
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = c[deg];
    // Cauchy-type bound for the initial circle radius
    let radius = 1.0
        + c[..deg]
            .iter()
            .map(|a| (a / lead).norm())
            .fold(0.0, f64::max);
    let r0 = radius.min(
        c[..deg]
            .iter()
            .enumerate()
            .map(|(k, a)| (a / lead).norm().powf(1.0 / (deg - k) as f64))
            .fold(0.0, f64::max)
            .max(1e-3),
    );
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4;
            Complex64::from_polar(r0, th)
        })
        .collect();
    let dc = derivative(&c);
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let p = eval(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / eval(&dc, z[i]);
            let s: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let w = ratio / (1.0 - ratio * s);
            if !w.is_finite() {
                continue;
            }
            z[i] -= w;
            moved = moved.max(w.norm() / z[i].norm().max(1.0));
        }
        if moved < 1e-15 {
            break;
        }
    }
    // Newton polish against the undeflated polynomial
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let d = eval(&dc, *zi);
            if d.norm() == 0.0 {
                break;
            }
            let step = eval(&c, *zi) / d;
            if !step.is_finite() {
                break;
            }
            *zi -= step;
        }
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::Precision("root iteration diverged".into()));
    }
    Ok(z)
}

/// Roots with positive imaginary part above `tol`, and the count of roots
/// with negative imaginary part below `-tol`.
pub fn upper_roots(roots: &[Complex64], tol: f64) -> (Vec<Complex64>, usize) {
    let up = roots.iter().copied().filter(|r| r.im > tol).collect();
    let down = roots.iter().filter(|r| r.im < -tol).count();
    (up, down)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_known_roots() {
        let rs = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-2.0, 0.5),
            Complex64::new(-2.0, -0.5),
            Complex64::new(0.3, 3.0),
            Complex64::new(4.0, 0.0),
        ];
        let found = roots(&from_roots(&rs)).unwrap();
        for r in rs {
            let best = found.iter().map(|f| (f - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-10, "{r} missing");
        }
    }

    #[test]
    fn double_root_is_found_twice() {
        let rs = [Complex64::new(2.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(-1.0, 0.0)];
        let found = roots(&from_roots(&rs)).unwrap();
        let near = found.iter().filter(|f| (*f - rs[0]).norm() < 1e-6).count();
        assert_eq!(near, 2);
    }

    #[test]
    fn leading_zeros_trimmed() {
        let c = [Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let r = roots(&c).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 1.0).norm() < 1e-14);
    }
}
