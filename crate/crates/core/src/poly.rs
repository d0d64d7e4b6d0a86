//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Map from exponent vectors to non-zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    /// The variable `v_k`.
    pub fn var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, BigRational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: BigRational) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        for (e, v) in &self.terms {
            out.terms.insert(e.clone(), v * c);
        }
        out
    }

    /// Multiplies every monomial `v^α` by `f(α)`.
    pub fn map_monomials(&self, f: impl Fn(&[u32]) -> BigRational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * f(e));
        }
        out
    }

    pub fn eval(&self, at: &[BigRational]) -> BigRational {
        self.terms
            .iter()
            .map(|(e, v)| {
                e.iter()
                    .zip(at)
                    .fold(v.clone(), |acc, (&k, x)| acc * num_traits::pow(x.clone(), k as usize))
            })
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Exact quotient by `v_p - v_q`; errors if the division leaves a remainder.
    pub fn div_linear(&self, p: usize, q: usize) -> Result<Self> {
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        loop {
            // a term of maximal degree in v_p
            let lead = rem
                .terms
                .iter()
                .max_by_key(|(e, _)| e[p])
                .map(|(e, v)| (e.clone(), v.clone()));
            let Some((e, c)) = lead else { break };
            if e[p] == 0 {
                return Err(Error::Consistency(format!(
                    "polynomial not divisible by v{p} - v{q}"
                )));
            }
            let mut qe = e.clone();
            qe[p] -= 1;
            quot.add_term(qe.clone(), c.clone());
            // rem -= c v^qe (v_p - v_q)
            rem.add_term(e, -c.clone());
            let mut shifted = qe;
            shifted[q] += 1;
            rem.add_term(shifted, c);
        }
        Ok(quot)
    }

    /// `∏_{i<j} (v_i - v_j)`.
    pub fn vandermonde(nvars: usize) -> Self {
        let mut out = Self::one(nvars);
        for i in 0..nvars {
            for j in i + 1..nvars {
                out = &out * &(&Self::var(nvars, i) - &Self::var(nvars, j));
            }
        }
        out
    }

    /// Divides by [`Poly::vandermonde`] exactly.
    pub fn div_vandermonde(&self) -> Result<Self> {
        let mut out = self.clone();
        for i in 0..self.nvars {
            for j in i + 1..self.nvars {
                out = out.div_linear(i, j)?;
            }
        }
        Ok(out)
    }

    pub fn max_abs_coeff(&self) -> BigRational {
        self.terms
            .values()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, v) in &rhs.terms {
            out.add_term(e.clone(), v.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, v) in &rhs.terms {
            out.add_term(e.clone(), -v.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut acc: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (e1, v1) in &self.terms {
            for (e2, v2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(BigRational::zero) += v1 * v2;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Poly { nvars: self.nvars, terms: acc }
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vandermonde_division_round_trip() {
        let f = &(&Poly::var(3, 0) * &Poly::var(3, 1)) + &Poly::constant(3, rat(7));
        let g = &f * &Poly::vandermonde(3);
        assert_eq!(g.div_vandermonde().unwrap(), f);
    }

    #[test]
    fn non_divisible_is_reported() {
        let f = Poly::var(2, 0);
        assert!(f.div_linear(0, 1).is_err());
    }

    #[test]
    fn vandermonde_value() {
        let v = Poly::vandermonde(3);
        // (1-2)(1-4)(2-4) = -6
        assert_eq!(v.eval(&[rat(1), rat(2), rat(4)]), rat(-6));
    }
}
