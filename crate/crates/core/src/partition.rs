use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-increasing sequence of non-negative integers.
///
/// Trailing zeros are kept: in length-`N` contexts they carry meaning.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Shape(format!("parts {parts:?} are not non-increasing")));
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Parses `"4,3,1"`; the empty string is the empty partition.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let parts = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Argument(format!("bad part {p:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of stored parts, trailing zeros included.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of non-zero parts.
    pub fn length(&self) -> usize {
        self.parts.iter().take_while(|&&p| p > 0).count()
    }

    /// The `i`-th part, 1-based, zero past the end.
    pub fn part(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    pub fn size(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    /// Pads with zeros (or trims zeros) to exactly `len` parts.
    pub fn padded(&self, len: usize) -> Result<Self> {
        if self.length() > len {
            return Err(Error::Argument(format!(
                "partition {self} has more than {len} non-zero parts"
            )));
        }
        let mut parts = self.parts.clone();
        parts.resize(len, 0);
        Ok(Self { parts })
    }

    /// Drops trailing zeros.
    pub fn trimmed(&self) -> Self {
        Self {
            parts: self.parts[..self.length()].to_vec(),
        }
    }

    /// Cell-wise containment `other ⊆ self`.
    pub fn contains(&self, other: &Partition) -> bool {
        (1..=other.len().max(self.len())).all(|i| other.part(i) <= self.part(i))
    }

    /// Conjugate partition.
    pub fn conjugate(&self) -> Self {
        let first = self.part(1);
        let parts = (1..=first)
            .map(|j| self.parts.iter().filter(|&&p| p >= j).count() as u32)
            .collect();
        Self { parts }
    }

    /// All partitions contained in `self` with at most `self.len()` parts.
    pub fn subpartitions(&self) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(self.len());
        fn rec(outer: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            let k = cur.len();
            if k == outer.len() {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            let cap = if k == 0 { outer[0] } else { outer[k].min(cur[k - 1]) };
            for v in 0..=cap {
                cur.push(v);
                rec(outer, cur, out);
                cur.pop();
            }
        }
        rec(&self.parts, &mut cur, &mut out);
        out
    }

    /// The staircase `((p-1)n, (p-1)(n-1), ..., p-1)` whose counting measure
    /// tends to the uniform law on `(0, p)`.
    pub fn staircase(p: u32, n: u32) -> Self {
        let parts = (0..n).map(|i| (p - 1) * (n - i)).collect();
        Self { parts }
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// `outer / inner`; cells of `outer` not in `inner`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SkewShape {
    pub outer: Partition,
    pub inner: Partition,
}

impl SkewShape {
    pub fn new(outer: Partition, inner: Partition) -> Result<Self> {
        if !outer.contains(&inner) {
            return Err(Error::Shape(format!("{inner} is not contained in {outer}")));
        }
        Ok(Self { outer, inner })
    }

    pub fn straight(outer: Partition) -> Self {
        Self {
            outer,
            inner: Partition::empty(),
        }
    }

    pub fn is_straight(&self) -> bool {
        self.inner.size() == 0
    }

    pub fn check(&self) -> Result<()> {
        if self.outer.contains(&self.inner) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{} is not contained in {}",
                self.inner, self.outer
            )))
        }
    }

    /// Cells `(i, j)`, 1-based, in reading order (row by row, left to right).
    pub fn cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 1..=self.outer.len() {
            for j in self.inner.part(i) + 1..=self.outer.part(i) {
                out.push((i, j as usize));
            }
        }
        out
    }

    pub fn contains_cell(&self, (i, j): (usize, usize)) -> bool {
        i >= 1 && j >= 1 && (j as u32) <= self.outer.part(i) && (j as u32) > self.inner.part(i)
    }

    pub fn size(&self) -> u64 {
        self.outer.size() - self.inner.size()
    }
}

/// Uniform atoms `(λ_i + N - i) / N`, `i = 1..N`, each with mass `1/N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountingMeasure {
    pub atoms: Vec<BigRational>,
    pub n: u32,
}

impl CountingMeasure {
    pub fn mass(&self) -> BigRational {
        BigRational::new(BigInt::from(self.atoms.len()), BigInt::from(self.n))
    }

    pub fn atoms_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.atoms.iter().map(|a| a.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// `∫ x^k dm`, exact.
    pub fn moment(&self, k: u32) -> BigRational {
        let n = BigRational::from_integer(BigInt::from(self.n));
        self.atoms
            .iter()
            .map(|a| num_traits::pow::pow(a.clone(), k as usize))
            .fold(BigRational::from_integer(0.into()), |acc, v| acc + v)
            / n
    }
}

pub fn counting_measure(lambda: &Partition, n: i64) -> Result<CountingMeasure> {
    if n <= 0 {
        return Err(Error::Argument(format!("N must be positive, got {n}")));
    }
    let n = n as u32;
    let lam = lambda.padded(n as usize)?;
    let atoms = (1..=n as usize)
        .map(|i| {
            BigRational::new(
                BigInt::from(lam.part(i) as i64 + n as i64 - i as i64),
                BigInt::from(n),
            )
        })
        .collect();
    Ok(CountingMeasure { atoms, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, ToPrimitive};

    #[test]
    fn rejects_increasing_parts() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::parse("3,3,1,0").is_ok());
    }

    #[test]
    fn skew_containment() {
        let outer = Partition::parse("2,1").unwrap();
        assert!(SkewShape::new(outer.clone(), Partition::parse("1").unwrap()).is_ok());
        assert!(matches!(
            SkewShape::new(outer, Partition::parse("1,1,1").unwrap()),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn counting_measure_of_five_path_boundary() {
        let m = counting_measure(&Partition::parse("4,3,1,0,0").unwrap(), 5).unwrap();
        let atoms: Vec<f64> = m.atoms_f64();
        assert_eq!(atoms, vec![1.6, 1.2, 0.6, 0.2, 0.0]);
        assert!(m.mass().is_one());
    }

    #[test]
    fn counting_measure_of_empty_partition() {
        let m = counting_measure(&Partition::empty(), 3).unwrap();
        let expect: Vec<BigRational> = [2, 1, 0]
            .iter()
            .map(|&k| BigRational::new(k.into(), 3.into()))
            .collect();
        assert_eq!(m.atoms, expect);
        assert!(counting_measure(&Partition::empty(), 0).is_err());
    }

    #[test]
    fn staircase_measure_approaches_uniform_on_zero_p() {
        // moments of uniform(0, 3) are 3^k / (k + 1)
        let m = counting_measure(&Partition::staircase(3, 400), 400).unwrap();
        for k in 1..4u32 {
            let got = m.moment(k).to_f64().unwrap();
            let want = 3f64.powi(k as i32) / (k as f64 + 1.0);
            assert!((got - want).abs() / want < 0.01, "k={k} {got} {want}");
        }
    }

    #[test]
    fn subpartitions_of_two_one() {
        let subs = Partition::parse("2,1").unwrap().subpartitions();
        assert_eq!(subs.len(), 5);
    }
}
