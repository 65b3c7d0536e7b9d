//! Exact polynomials in `s = Sigma.Sigma` (weight 2) and `k = kappa.Sigma`
//! (weight 1).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedPolynomial {
    // (i, j) -> coefficient of s^i k^j; zero coefficients are never stored
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl GradedPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, BigRational::one())
    }

    pub fn monomial(i: u32, j: u32, c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigRational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order: `i` descending, then `j` descending.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &BigRational)> {
        self.terms.iter().rev().map(|(&(i, j), c)| (i, j, c))
    }

    /// The weighted degree `2i + j` shared by all terms, if there is one.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|&(i, j)| 2 * i + j);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero();
        for (&(i, j), a) in &self.terms {
            out.add_term(i, j, a * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &other.terms {
                out.add_term(i + k, j + l, a * b);
            }
        }
        out
    }

    pub fn eval(&self, s: &BigRational, k: &BigRational) -> BigRational {
        self.terms.iter().fold(BigRational::zero(), |acc, (&(i, j), c)| {
            acc + c * pow(s, i) * pow(k, j)
        })
    }
}

fn pow(x: &BigRational, e: u32) -> BigRational {
    num_traits::pow(x.clone(), e as usize)
}

/// `num/den`, with the denominator dropped when it is 1.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn monomial_text(i: u32, j: u32) -> String {
    let var = |name: &str, e: u32| match e {
        0 => None,
        1 => Some(name.to_string()),
        _ => Some(format!("{name}^{e}")),
    };
    [var("s", i), var("k", j)].into_iter().flatten().collect::<Vec<_>>().join("*")
}

impl fmt::Display for GradedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, (i, j, c)) in self.terms().enumerate() {
            let mag = c.abs();
            match (n, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mono = monomial_text(i, j);
            if mono.is_empty() {
                f.write_str(&format_rational(&mag))?;
            } else if mag.is_one() {
                f.write_str(&mono)?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), mono)?;
            }
        }
        Ok(())
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `d! / (2^i i! (d-2i)!)`: the number of ways `s^i k^(d-2i)` arises when
/// the symmetric form `q^i kappa^(d-2i)` is evaluated on `(Sigma, ..., Sigma)`.
pub fn pairing_count(d: u64, i: u64) -> BigInt {
    assert!(2 * i <= d, "pairing count needs 2i <= d");
    factorial(d) / (BigInt::from(2).pow(i as u32) * factorial(i) * factorial(d - 2 * i))
}

/// Coefficients `a_i` of `sum a_i q^i kappa^(d-2i)` for a homogeneous
/// evaluated polynomial of weighted degree `d`, highest `i` first.
pub fn multilinear_coefficients(p: &GradedPolynomial, d: u32) -> Vec<(u32, BigRational)> {
    (0..=d / 2)
        .rev()
        .map(|i| {
            let c = p.coeff(i, d - 2 * i);
            (i, c / BigRational::from_integer(pairing_count(u64::from(d), u64::from(i))))
        })
        .collect()
}
