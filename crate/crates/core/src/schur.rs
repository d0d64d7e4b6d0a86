//! Schur polynomials, lecture hall polynomials and moment extraction from
//! Schur generating functions.

use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::enumerate::for_each_lht;
use crate::error::{Error, Result};
use crate::partition::{Partition, SkewShape};
use crate::poly::{rat, Poly};

/// Field elements Schur polynomials can be evaluated in.
pub trait Scalar:
    Clone
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
    /// Size used for pivoting; exact types only need zero/non-zero.
    fn magnitude(&self) -> f64;
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        rat(v)
    }
    fn magnitude(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let k = m.len();
    let mut det = S::one();
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&a, &b| m[a][col].magnitude().total_cmp(&m[b][col].magnitude()))
            .unwrap();
        if m[piv][col].magnitude() == 0.0 {
            return S::zero();
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det = det * p.clone();
        for r in col + 1..k {
            let f = m[r][col].clone() / p.clone();
            if f.magnitude() == 0.0 {
                continue;
            }
            for c in col..k {
                let v = m[col][c].clone() * f.clone();
                m[r][c] = m[r][c].clone() - v;
            }
        }
    }
    det
}

/// `s_λ(1^n) = ∏_{i<j} (λ_i - i - λ_j + j) / (j - i)`.
pub fn schur_principal(lambda: &Partition, n: u32) -> Result<BigRational> {
    let lam = lambda.padded(n as usize)?;
    let mut out = BigRational::one();
    for i in 1..=n as i64 {
        for j in i + 1..=n as i64 {
            let num = lam.part(i as usize) as i64 - i - lam.part(j as usize) as i64 + j;
            out *= BigRational::new(BigInt::from(num), BigInt::from(j - i));
        }
    }
    Ok(out)
}

/// Complete homogeneous symmetric polynomials `h_0..=h_kmax`.
pub fn complete_homogeneous<S: Scalar>(kmax: usize, values: &[S]) -> Vec<S> {
    let mut h = vec![S::zero(); kmax + 1];
    h[0] = S::one();
    for x in values {
        for k in 1..=kmax {
            h[k] = h[k].clone() + x.clone() * h[k - 1].clone();
        }
    }
    h
}

/// `s_λ(values)` by the Jacobi–Trudi determinant; valid for repeated values.
pub fn schur_eval<S: Scalar>(lambda: &Partition, values: &[S]) -> S {
    let l = lambda.length();
    if l > values.len() {
        return S::zero();
    }
    if l == 0 {
        return S::one();
    }
    let kmax = (lambda.part(1) as usize) + l;
    let h = complete_homogeneous(kmax, values);
    let m = (1..=l)
        .map(|i| {
            (1..=l)
                .map(|j| {
                    let k = lambda.part(i) as i64 - i as i64 + j as i64;
                    if k < 0 {
                        S::zero()
                    } else {
                        h[k as usize].clone()
                    }
                })
                .collect()
        })
        .collect();
    determinant(m)
}

/// `s_λ(values)` as the ratio of alternants; needs pairwise distinct values.
pub fn schur_bialternant<S: Scalar>(lambda: &Partition, values: &[S]) -> Result<S> {
    let n = values.len();
    let lam = lambda.padded(n)?;
    let pw = |x: &S, e: usize| (0..e).fold(S::one(), |a, _| a * x.clone());
    let num = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| pw(&values[i], lam.part(j + 1) as usize + n - 1 - j))
                .collect()
        })
        .collect();
    let den: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| pw(&values[i], n - 1 - j)).collect())
        .collect();
    let d = determinant(den);
    if d.magnitude() == 0.0 {
        return Err(Error::Precision(
            "repeated values: use the Jacobi-Trudi evaluation".into(),
        ));
    }
    Ok(determinant(num) / d)
}

/// `s_λ(a, ..., a)` with `n` copies of `a`.
pub fn schur_constant(lambda: &Partition, n: u32, a: &BigRational) -> Result<BigRational> {
    Ok(schur_principal(lambda, n)? * num_traits::pow(a.clone(), lambda.size() as usize))
}

/// `s_λ(v_1..v_n)` as a polynomial, summed over semistandard tableaux.
pub fn schur_poly(lambda: &Partition, n: usize) -> Poly {
    let lam = lambda.trimmed();
    let mut out = Poly::zero(n);
    if lam.length() > n {
        return out;
    }
    let cells = SkewShape::straight(lam.clone()).cells();
    let mut fill: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    fn rec(
        k: usize,
        cells: &[(usize, usize)],
        n: usize,
        fill: &mut BTreeMap<(usize, usize), usize>,
        out: &mut Poly,
    ) {
        if k == cells.len() {
            let mut e = vec![0u32; n];
            for &v in fill.values() {
                e[v] += 1;
            }
            out.add_term(e, BigRational::one());
            return;
        }
        let (i, j) = cells[k];
        let lo_row = fill.get(&(i, j - 1)).copied().unwrap_or(0);
        let lo_col = fill.get(&(i - 1, j)).map(|&v| v + 1).unwrap_or(0);
        for v in lo_row.max(lo_col)..n {
            fill.insert((i, j), v);
            rec(k + 1, cells, n, fill, out);
        }
        fill.remove(&(i, j));
    }
    rec(0, &cells, n, &mut fill, &mut out);
    out
}

/// `L^n_{λ/μ}(x) = Σ_T ∏ x_{⌊T⌋(i,j)}` over bounded tableaux with `t = x.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LhtPolynomial {
    pub shape: SkewShape,
    pub n: u32,
    pub t: u32,
    /// Keyed by how many cells have floor `0, 1, ..., t-1`.
    pub coefficients: BTreeMap<Vec<u32>, u64>,
}

impl LhtPolynomial {
    pub fn build(shape: &SkewShape, n: u32, t: u32) -> Result<Self> {
        let mut coefficients = BTreeMap::new();
        for_each_lht(shape, n, t, |e| {
            let mut key = vec![0u32; t as usize];
            for (&(i, j), &v) in e {
                let d = n as u64 + j as u64 - i as u64;
                key[(v / d) as usize] += 1;
            }
            *coefficients.entry(key).or_insert(0u64) += 1;
        })?;
        Ok(Self { shape: shape.clone(), n, t, coefficients })
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> Result<S> {
        if x.len() != self.t as usize {
            return Err(Error::Argument(format!("expected {} weights", self.t)));
        }
        let mut total = S::zero();
        for (key, &c) in &self.coefficients {
            let mut term = S::from_i64(c as i64);
            for (k, &e) in key.iter().enumerate() {
                for _ in 0..e {
                    term = term * x[k].clone();
                }
            }
            total = total + term;
        }
        Ok(total)
    }

    pub fn count(&self) -> u64 {
        self.coefficients.values().sum()
    }
}

pub fn lht_poly_eval<S: Scalar>(shape: &SkewShape, n: u32, x: &[S]) -> Result<S> {
    LhtPolynomial::build(shape, n, x.len() as u32)?.eval(x)
}

/// Both sides of `s_λ(|a| + b) = Σ_{ν ⊆ λ} L_{λ/ν}(a) s_ν(b)` with `b` of
/// length `n`.
pub fn branching_sides(
    lambda: &Partition,
    a: &[BigRational],
    b: &[BigRational],
) -> Result<(BigRational, BigRational)> {
    let n = b.len();
    let lam = lambda.padded(n)?;
    let sum_a = a.iter().fold(BigRational::zero(), |s, x| s + x);
    let shifted: Vec<BigRational> = b.iter().map(|x| x + &sum_a).collect();
    let lhs = schur_eval(&lam, &shifted);
    let mut rhs = BigRational::zero();
    for nu in lam.subpartitions() {
        let shape = SkewShape::new(lam.clone(), nu.clone())?;
        let l = lht_poly_eval(&shape, n as u32, a)?;
        if !l.is_zero() {
            rhs += l * schur_eval(&nu, b);
        }
    }
    Ok((lhs, rhs))
}

/// A distribution over partitions with at most `n` parts, read through its
/// Schur generating function at base point `base`.
#[derive(Clone, Debug)]
pub struct SgfProbe {
    pub n: u32,
    pub base: BigRational,
    pub rho: Vec<(Partition, BigRational)>,
}

impl SgfProbe {
    pub fn new(n: u32, base: BigRational, rho: Vec<(Partition, BigRational)>) -> Result<Self> {
        let total = rho.iter().fold(BigRational::zero(), |s, (_, p)| s + p);
        if total != BigRational::one() {
            return Err(Error::Argument(format!("ρ sums to {total}, not 1")));
        }
        if base <= BigRational::zero() {
            return Err(Error::Argument("base point must be positive".into()));
        }
        for (l, _) in &rho {
            if l.length() > n as usize {
                return Err(Error::Argument(format!("{l} has more than {n} parts")));
            }
        }
        Ok(Self { n, base, rho })
    }

    /// `V(v) · Σ ρ(λ) s_λ(v) / s_λ(base^n)` in the shifted variables
    /// `v_i = base + u_i`.
    fn vandermonde_times_sgf(&self) -> Result<Poly> {
        let n = self.n as usize;
        let mut f = Poly::zero(n);
        for (l, p) in &self.rho {
            let c = p / schur_constant(l, self.n, &self.base)?;
            f = &f + &schur_poly(l, n).scale(&c);
        }
        Ok(&Poly::vandermonde(n) * &f)
    }

    /// `V^{-1} [Σ_i (v_i ∂_{v_i})^j]^m V 𝒮` as a polynomial in `v`.
    pub fn operator_poly(&self, j: u32, m: u32) -> Result<Poly> {
        let mut g = self.vandermonde_times_sgf()?;
        for _ in 0..m {
            g = g.map_monomials(|e| e.iter().fold(rat(0), |s, &k| s + rat(k as i64).pow(j as i32)));
        }
        g.div_vandermonde()
    }

    /// The operator applied at the probe point `u` (absolute offsets).
    pub fn operator_at(&self, j: u32, m: u32, u: &[BigRational]) -> Result<BigRational> {
        let g = self.operator_poly(j, m)?;
        let v: Vec<BigRational> = u.iter().map(|x| x + &self.base).collect();
        Ok(g.eval(&v))
    }

    /// `E[(Σ_i (λ_i + n - i)^j)^m]`.
    pub fn direct_moment(&self, j: u32, m: u32) -> BigRational {
        let n = self.n as usize;
        self.rho
            .iter()
            .map(|(l, p)| {
                let pj = (1..=n).fold(rat(0), |s, i| {
                    s + rat(l.part(i) as i64 + n as i64 - i as i64).pow(j as i32)
                });
                p * pj.pow(m as i32)
            })
            .fold(rat(0), |a, b| a + b)
    }
}

/// `n^{-(j+1)m} 𝒟_j^m 𝒮_ρ |_{u=0}` together with the direct normalized moment
/// `E[(∫ x^j dm)^m]`.
pub fn sgf_moment(probe: &SgfProbe, j: u32, m: u32) -> Result<(BigRational, BigRational)> {
    let n = probe.n as usize;
    let op = probe.operator_at(j, m, &vec![rat(0); n])?;
    let norm = rat(probe.n as i64).pow(((j + 1) * m) as i32);
    let direct = probe.direct_moment(j, m) / rat(probe.n as i64).pow((j * m) as i32)
        / rat(probe.n as i64).pow(m as i32);
    Ok((op / norm, direct))
}

/// Absolute difference as `f64`, for reporting.
pub fn gap(a: &BigRational, b: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    (a - b).abs().to_f64().unwrap_or(f64::INFINITY)
}
