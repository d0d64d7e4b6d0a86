//! Truncated power series `Σ_{k<len} a_k x^k` with complex coefficients.

use num_complex::Complex64;

pub type Series = Vec<Complex64>;

pub fn mul(a: &[Complex64], b: &[Complex64], len: usize) -> Series {
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (i, x) in a.iter().enumerate().take(len) {
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `1 / a`; needs `a_0 != 0`.
pub fn reciprocal(a: &[Complex64], len: usize) -> Series {
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    out[0] = 1.0 / a[0];
    for k in 1..len {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 1..=k.min(a.len() - 1) {
            s += a[i] * out[k - i];
        }
        out[k] = -s / a[0];
    }
    out
}

pub fn pow(a: &[Complex64], e: u32, len: usize) -> Series {
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    out[0] = Complex64::new(1.0, 0.0);
    for _ in 0..e {
        out = mul(&out, a, len);
    }
    out
}

/// `f(g(x))` for `g_0 = 0`.
pub fn compose(f: &[Complex64], g: &[Complex64], len: usize) -> Series {
    debug_assert!(g[0].norm() == 0.0);
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    let mut gp = vec![Complex64::new(0.0, 0.0); len];
    gp[0] = Complex64::new(1.0, 0.0);
    for fk in f.iter().take(len) {
        for (o, p) in out.iter_mut().zip(&gp) {
            *o += fk * p;
        }
        gp = mul(&gp, g, len);
    }
    out
}

/// Compositional inverse of `f = x + f_2 x^2 + ...`.
pub fn reversion(f: &[Complex64], len: usize) -> Series {
    // Newton-free fixed point: g = x - (f(g) - g) order by order
    let mut g = vec![Complex64::new(0.0, 0.0); len];
    if len > 1 {
        g[1] = Complex64::new(1.0, 0.0) / f[1];
    }
    for k in 2..len {
        let fg = compose(f, &g, k + 1);
        // coefficient k of f(g) must vanish; it depends on g_k linearly via f_1 g_k
        g[k] -= fg[k] / f[1];
    }
    g
}

/// `log(1 + x)`.
pub fn log1p(len: usize) -> Series {
    (0..len)
        .map(|k| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                let s = if k % 2 == 1 { 1.0 } else { -1.0 };
                Complex64::new(s / k as f64, 0.0)
            }
        })
        .collect()
}

pub fn eval(a: &[Complex64], x: Complex64) -> Complex64 {
    a.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
}

/// Radius of convergence estimated from the tail by the root test.
pub fn radius_estimate(a: &[Complex64]) -> f64 {
    let tail: Vec<f64> = a
        .iter()
        .enumerate()
        .skip(a.len() / 2)
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(k, c)| c.norm().powf(-1.0 / k as f64))
        .collect();
    if tail.is_empty() {
        return f64::INFINITY;
    }
    tail.iter().copied().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: &[f64]) -> Series {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn reversion_of_exp_minus_one_is_log1p() {
        let len = 12;
        let mut f = vec![Complex64::new(0.0, 0.0); len];
        let mut fact = 1.0;
        for k in 1..len {
            fact *= k as f64;
            f[k] = Complex64::new(1.0 / fact, 0.0);
        }
        let g = reversion(&f, len);
        let l = log1p(len);
        for k in 0..len {
            assert!((g[k] - l[k]).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn reciprocal_of_one_minus_x() {
        let r = reciprocal(&re(&[1.0, -1.0]), 8);
        assert!(r.iter().all(|c| (c.re - 1.0).abs() < 1e-15));
    }

    #[test]
    fn geometric_radius() {
        let a: Series = (0..40).map(|k| Complex64::new(0.5f64.powi(k), 0.0)).collect();
        assert!((radius_estimate(&a) - 2.0).abs() < 1e-9);
    }
}
