//! Bivariate power series in `s` (weight 2) and `x` (weight 1), truncated
//! at a fixed weighted degree.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::poly::{factorial, GradedPolynomial};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    cutoff: u32,
    // (i, j) -> coefficient of s^i x^j, only for 2i + j <= cutoff
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl TruncatedSeries {
    pub fn zero(cutoff: u32) -> Self {
        TruncatedSeries { cutoff, terms: BTreeMap::new() }
    }

    pub fn constant(cutoff: u32, c: BigRational) -> Self {
        let mut out = Self::zero(cutoff);
        out.add_term(0, 0, c);
        out
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    fn add_term(&mut self, i: u32, j: u32, c: BigRational) {
        if 2 * i + j > self.cutoff || c.is_zero() {
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

    /// `exp(a s)`.
    pub fn exp_s(cutoff: u32, a: &BigRational) -> Self {
        let mut out = Self::zero(cutoff);
        for i in 0..=cutoff / 2 {
            let c = num_traits::pow(a.clone(), i as usize) / BigRational::from_integer(factorial(i.into()));
            out.add_term(i, 0, c);
        }
        out
    }

    /// `cosh(a x)`.
    pub fn cosh_x(cutoff: u32, a: &BigInt) -> Self {
        let mut out = Self::zero(cutoff);
        for j in (0..=cutoff).step_by(2) {
            let c = BigRational::new(a.pow(j), factorial(j.into()));
            out.add_term(0, j, c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.cutoff.min(other.cutoff));
        for (&(i, j), c) in self.terms.iter().chain(&other.terms) {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.cutoff.min(other.cutoff));
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &other.terms {
                if 2 * (i + k) + j + l <= out.cutoff {
                    out.add_term(i + k, j + l, a * b);
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(self.cutoff, BigRational::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Reciprocal of a series with nonzero constant term, or `None`.
    ///
    /// Writing `a = a0 (1 - u)`, `u` has no constant term, so `u^m` vanishes
    /// below the cutoff once `m > cutoff` and `1/(1-u) = sum_{m <= cutoff} u^m`
    /// is exact.
    pub fn inverse(&self) -> Option<Self> {
        let a0 = self.coeff(0, 0);
        if a0.is_zero() {
            return None;
        }
        let inv0 = a0.recip();
        let mut u = Self::zero(self.cutoff);
        for (&(i, j), c) in &self.terms {
            if (i, j) != (0, 0) {
                u.add_term(i, j, -(c * &inv0));
            }
        }
        let one = Self::constant(self.cutoff, BigRational::one());
        let mut sum = one.clone();
        let mut power = one;
        for _ in 0..self.cutoff {
            power = power.mul(&u);
            sum = sum.add(&power);
        }
        let mut out = Self::zero(self.cutoff);
        for (&(i, j), c) in &sum.terms {
            out.add_term(i, j, c * &inv0);
        }
        Some(out)
    }

    /// Weighted-degree-`d` part, with `x` renamed to `k`.
    pub fn homogeneous_part(&self, d: u32) -> GradedPolynomial {
        let mut p = GradedPolynomial::zero();
        for (&(i, j), c) in &self.terms {
            if 2 * i + j == d {
                p.add_term(i, j, c.clone());
            }
        }
        p
    }
}
