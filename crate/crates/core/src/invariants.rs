//! Closed-form Donaldson-polynomial data for elliptic surfaces with two
//! multiple fibers, and the conjectural generating function.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::lattice::{check_multiplicities, ClassVector, SurfaceModel};
use crate::poly::{factorial, GradedPolynomial};
use crate::series::TruncatedSeries;

/// `(p_g, m1, m2)` with `m1 <= m2` coprime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InvariantParams {
    pg: u32,
    m1: u64,
    m2: u64,
}

impl InvariantParams {
    pub fn new(pg: u32, m1: u64, m2: u64) -> Result<Self> {
        let (m1, m2) = check_multiplicities(m1, m2)?;
        Ok(InvariantParams { pg, m1, m2 })
    }

    pub fn of_model(model: &SurfaceModel) -> Self {
        InvariantParams { pg: model.pg(), m1: model.m1(), m2: model.m2() }
    }

    pub fn pg(&self) -> u32 {
        self.pg
    }

    pub fn m1(&self) -> u64 {
        self.m1
    }

    pub fn m2(&self) -> u64 {
        self.m2
    }

    pub fn mu(&self) -> BigInt {
        BigInt::from(self.m1) * self.m2
    }

    /// The even multiplicity and the odd one, when exactly one is even.
    pub fn even_odd(&self) -> Option<(u64, u64)> {
        match (self.m1.is_even(), self.m2.is_even()) {
            (true, false) => Some((self.m1, self.m2)),
            (false, true) => Some((self.m2, self.m1)),
            _ => None,
        }
    }
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `C1 = mu^2 (p_g+1) - m1^2 - m2^2`, `C2 = mu^4 (p_g+1) - m1^4 - m2^4`.
pub fn invariant_constants(params: &InvariantParams) -> (BigInt, BigInt) {
    let chi = BigInt::from(params.pg + 1);
    let (m1, m2, mu) = (BigInt::from(params.m1), BigInt::from(params.m2), params.mu());
    let c1 = mu.pow(2) * &chi - m1.pow(2) - m2.pow(2);
    let c2 = mu.pow(4) * &chi - m1.pow(4) - m2.pow(4);
    (c1, c2)
}

/// `gamma_t` in closed form for `t <= 2`.
pub fn gamma_small(params: &InvariantParams, t: u32) -> Result<GradedPolynomial> {
    let (c1, c2) = invariant_constants(params);
    let mut p = GradedPolynomial::zero();
    match t {
        0 => p.add_term(0, 0, int(1)),
        1 => {
            p.add_term(1, 0, int(1));
            p.add_term(0, 2, int(c1));
        }
        2 => {
            p.add_term(2, 0, int(3));
            p.add_term(1, 2, int(&c1 * 6));
            p.add_term(0, 4, int(&c1 * &c1 * 3 - &c2 * 2));
        }
        _ => return Err(Error::UnsupportedDegree(t)),
    }
    Ok(p)
}

/// Degree-`2t` part of `(2t)! exp(s/2) cosh(mu x)^(p_g+1) / (cosh(m1 x) cosh(m2 x))`.
pub fn gamma_t_conjectural(params: &InvariantParams, t: u32) -> GradedPolynomial {
    let n = 2 * t;
    let num = TruncatedSeries::exp_s(n, &BigRational::new(1.into(), 2.into()))
        .mul(&TruncatedSeries::cosh_x(n, &params.mu()).pow(params.pg + 1));
    let den = TruncatedSeries::cosh_x(n, &BigInt::from(params.m1))
        .mul(&TruncatedSeries::cosh_x(n, &BigInt::from(params.m2)));
    let series = num.mul(&den.inverse().expect("cosh has constant term 1"));
    series.homogeneous_part(n).scale(&int(factorial(n.into())))
}

fn d_factor(d: u64, n: u64) -> BigRational {
    BigRational::new(factorial(d), BigInt::from(2).pow(n as u32) * factorial(n))
}

/// `d = -p - 3(p_g+1)`.
pub fn expected_dimension(pg: u32, p: i64) -> i64 {
    -p - 3 * (i64::from(pg) + 1)
}

/// Smallest `-p` allowed by the stable range `-p >= 2(4 p_g + 2)`.
pub fn stable_bound(pg: u32) -> i64 {
    2 * (4 * i64::from(pg) + 2)
}

/// `d!/(2^n n!)` with `d = -p - 3(p_g+1)` and `n = (d - p_g)/2`, after
/// checking the stable range and integrality of `n`.
pub fn so3_leading_factor(pg: u32, p: i64) -> Result<BigRational> {
    let bound = stable_bound(pg);
    if -p < bound {
        return Err(Error::StableRange { p, bound });
    }
    let d = expected_dimension(pg, p);
    if (d - i64::from(pg)).is_odd() {
        return Err(Error::NonIntegralIndex { d, pg });
    }
    let n = (d - i64::from(pg)) / 2;
    Ok(d_factor(d as u64, n as u64))
}

/// Leading coefficient `a_n = d!/(2^n n!) mu^p_g m_odd` for exactly one
/// even multiplicity.
pub fn leading_coeff_so3_even(params: &InvariantParams, p: i64) -> Result<BigRational> {
    let (_, odd) = params.even_odd().ok_or(Error::ParityViolation)?;
    Ok(so3_leading_factor(params.pg, p)? * int(params.mu().pow(params.pg)) * int(odd))
}

/// SU(2) leading coefficient `d!/(2^n n!) mu^p_g` with `n = 2c - 2p_g - 1`,
/// `d = 4c - 3p_g - 3`.
pub fn leading_coeff_su2(params: &InvariantParams, c: i64) -> Result<BigRational> {
    let pg = i64::from(params.pg);
    let n = 2 * c - 2 * pg - 1;
    let d = 4 * c - 3 * pg - 3;
    if n < 0 {
        return Err(Error::NegativeIndex(format!("n = 2c - 2p_g - 1 = {n}")));
    }
    if d < 0 {
        return Err(Error::NegativeIndex(format!("d = 4c - 3p_g - 3 = {d}")));
    }
    Ok(d_factor(d as u64, n as u64) * int(params.mu().pow(params.pg)))
}

/// Which published form of the second coefficient to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    /// `mu^p_g C1`, for every `p_g`.
    MorganMrowka,
    /// `mu (2 mu^2 - m1^2 - m2^2)`, stated for `p_g = 1` only.
    MorganOGrady,
}

/// The second coefficient `a_(n-1)` as printed, up to a universal factor.
pub fn second_coeff_printed(params: &InvariantParams, source: Source) -> Result<BigInt> {
    let mu = params.mu();
    match source {
        Source::MorganMrowka => Ok(mu.pow(params.pg) * invariant_constants(params).0),
        Source::MorganOGrady => {
            if params.pg != 1 {
                return Err(Error::SourceNeedsPgOne);
            }
            let (m1, m2) = (BigInt::from(params.m1), BigInt::from(params.m2));
            Ok(&mu * (mu.pow(2) * 2 - m1.pow(2) - m2.pow(2)))
        }
    }
}

/// Substitutes `s = Sigma.Sigma`, `k = kappa.Sigma`.
pub fn evaluate_on_class(model: &SurfaceModel, poly: &GradedPolynomial, sigma: &ClassVector) -> Result<BigRational> {
    let s = model.lattice().square(sigma)?;
    let k = model.lattice().pair(model.kappa(), sigma)?;
    Ok(poly.eval(&int(s), &int(k)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionReport {
    pub d: i64,
    pub d_odd: bool,
    /// `Delta^2 mod 2`: as supplied, or from Wu (`Delta^2 = Delta.K`) with
    /// `Delta.kappa = 1`.
    pub delta_square_mod2: u8,
    /// Whether `p = Delta^2 mod 2`, as `p_1 = w^2 mod 4` requires.
    pub p_consistent: bool,
}

pub fn expected_dimension_and_parity(
    params: &InvariantParams,
    p: i64,
    delta_square_mod2: Option<u8>,
) -> DimensionReport {
    let d = expected_dimension(params.pg, p);
    let wu = || {
        let k = crate::lattice::canonical_multiple(params.pg, params.m1, params.m2);
        u8::from(k.is_odd())
    };
    let delta_square_mod2 = delta_square_mod2.map_or_else(wu, |v| v % 2);
    DimensionReport {
        d,
        d_odd: d.is_odd(),
        delta_square_mod2,
        p_consistent: p.rem_euclid(2) == i64::from(delta_square_mod2),
    }
}
