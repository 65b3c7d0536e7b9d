//! Recovering multiplicities from invariant data, and deciding whether two
//! elliptic surfaces can be told apart.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::invariants::{
    expected_dimension, gamma_small, invariant_constants, leading_coeff_so3_even, leading_coeff_su2,
    so3_leading_factor, InvariantParams,
};
use crate::lattice::{check_multiplicities, SurfaceModel};
use crate::poly::format_rational;

/// `(m1^2 - 1)(m2^2 - 1)/3 - 1`.
pub fn bauer_f(m1: u64, m2: u64) -> Result<BigInt> {
    let (m1, m2) = check_multiplicities(m1, m2)?;
    let prod: BigInt = (BigInt::from(m1).pow(2) - 1) * (BigInt::from(m2).pow(2) - 1);
    let (q, r) = prod.div_rem(&BigInt::from(3));
    assert!(r.is_zero(), "coprime multiplicities give 3 | (m1^2-1)(m2^2-1)");
    Ok(q - 1)
}

/// `A = (m1^2-1)(m2^2-1)`, `B = (m1^4-1)(m2^4-1)`, i.e. `C1+1`, `C2+1` at `p_g = 0`.
pub fn ab_values(m1: u64, m2: u64) -> Result<(BigInt, BigInt)> {
    let p = InvariantParams::new(0, m1, m2)?;
    let (c1, c2) = invariant_constants(&p);
    Ok((c1 + 1, c2 + 1))
}

fn recovery(msg: impl Into<String>) -> Error {
    Error::Recovery(msg.into())
}

fn exact_half(v: BigInt, what: &str) -> Result<BigInt> {
    let (h, r) = v.div_rem(&BigInt::from(2));
    if !r.is_zero() {
        return Err(recovery(format!("{what} is not an integer")));
    }
    Ok(h)
}

fn exact_sqrt(v: &BigInt, what: &str) -> Result<BigInt> {
    if v.is_negative() {
        return Err(recovery(format!("{what} is negative")));
    }
    let r = v.sqrt();
    if &(&r * &r) != v {
        return Err(recovery(format!("{what} = {v} is not a perfect square")));
    }
    Ok(r)
}

/// Solves `T^2 - sigma1 T + sigma2 = 0` for `T = m^2`; returns `(m1, m2)`
/// with `m1 <= m2`, both positive and coprime.
fn solve_squares(sigma1: &BigInt, sigma2: &BigInt) -> Result<(BigInt, BigInt)> {
    let disc = sigma1 * sigma1 - sigma2 * 4;
    let root = exact_sqrt(&disc, "discriminant")?;
    let t1 = exact_half(sigma1 - &root, "smaller root")?;
    let t2 = exact_half(sigma1 + &root, "larger root")?;
    if !t1.is_positive() {
        return Err(recovery("roots are not positive"));
    }
    let m1 = exact_sqrt(&t1, "smaller root")?;
    let m2 = exact_sqrt(&t2, "larger root")?;
    if !m1.gcd(&m2).is_one() {
        return Err(recovery(format!("recovered pair ({m1},{m2}) is not coprime")));
    }
    Ok((m1, m2))
}

/// Inverts `(A, B)` for odd multiplicities both above 1.
pub fn recover_from_ab(a: &BigInt, b: &BigInt) -> Result<(BigInt, BigInt)> {
    if a.is_zero() {
        return Err(Error::AmbiguousA);
    }
    let (ratio, r) = b.div_rem(a);
    if !r.is_zero() {
        return Err(recovery("A does not divide B"));
    }
    let sigma2 = exact_half(&ratio + a - 2, "sigma2")?;
    let sigma1 = exact_half(&ratio - a, "sigma1")?;
    let (m1, m2) = solve_squares(&sigma1, &sigma2)?;
    if m1 <= BigInt::one() {
        return Err(recovery("a multiplicity is 1"));
    }
    Ok((m1, m2))
}

/// Recovers `{m1, m2}` from `mu = m1 m2` and `C1`.
pub fn recover_with_product(mu: &BigInt, c1: &BigInt, pg: u32) -> Result<(BigInt, BigInt)> {
    if !mu.is_positive() {
        return Err(recovery("mu must be positive"));
    }
    let sigma2 = mu * mu;
    let sigma1 = &sigma2 * (pg + 1) - c1;
    let (m1, m2) = solve_squares(&sigma1, &sigma2)?;
    if &(&m1 * &m2) != mu {
        return Err(recovery("recovered product differs from mu"));
    }
    Ok((m1, m2))
}

/// Recovers `(m_even, m_odd)` from `mu` and the leading coefficient `a_n`
/// at `p`.
pub fn recover_even(mu: &BigInt, a_n: &BigRational, p: i64, pg: u32) -> Result<(BigInt, BigInt)> {
    if !mu.is_positive() || mu.is_odd() {
        return Err(recovery("mu must be positive and even"));
    }
    let factor = so3_leading_factor(pg, p)? * BigRational::from_integer(mu.pow(pg));
    let m_odd = a_n / &factor;
    if !m_odd.is_integer() {
        return Err(recovery("a_n is not a multiple of d!/(2^n n!) mu^p_g"));
    }
    let m_odd = m_odd.to_integer();
    if !m_odd.is_positive() || m_odd.is_even() {
        return Err(recovery(format!("recovered odd multiplicity {m_odd} is not odd and positive")));
    }
    let (m_even, r) = mu.div_rem(&m_odd);
    if !r.is_zero() {
        return Err(recovery(format!("{m_odd} does not divide mu = {mu}")));
    }
    if !m_even.gcd(&m_odd).is_one() {
        return Err(recovery("recovered pair is not coprime"));
    }
    Ok((m_even, m_odd))
}

/// Multiplicity of the fiber of `J^d(S)` over a fiber of multiplicity `m`.
pub fn jd_multiplicity(m: u64, d: i64) -> u64 {
    assert!(m >= 1, "multiplicity must be positive");
    m / m.gcd(&d.unsigned_abs())
}

/// The data `distinguish` works from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub pg: u32,
    pub m1: u64,
    pub m2: u64,
    pub r: usize,
}

impl Fingerprint {
    pub fn new(pg: u32, m1: u64, m2: u64, r: usize) -> Result<Self> {
        let (m1, m2) = check_multiplicities(m1, m2)?;
        Ok(Fingerprint { pg, m1, m2, r })
    }

    pub fn of_model(model: &SurfaceModel) -> Self {
        Fingerprint { pg: model.pg(), m1: model.m1(), m2: model.m2(), r: model.r() }
    }

    fn params(&self) -> InvariantParams {
        InvariantParams::new(self.pg, self.m1, self.m2).expect("validated fingerprint")
    }

    pub fn is_rational(&self) -> bool {
        self.pg == 0 && self.m1 == 1
    }

    pub fn b2(&self) -> i64 {
        12 * (i64::from(self.pg) + 1) - 2 + self.r as i64
    }

    pub fn sigma(&self) -> i64 {
        -8 * (i64::from(self.pg) + 1) - self.r as i64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictKind {
    HomotopyDistinct,
    InvariantDistinct,
    DeformationEquivalent,
    Inconclusive,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::HomotopyDistinct => "homotopy-distinct",
            VerdictKind::InvariantDistinct => "invariant-distinct",
            VerdictKind::DeformationEquivalent => "deformation-equivalent",
            VerdictKind::Inconclusive => "inconclusive",
        })
    }
}

/// A number attached to each surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    B2,
    Sigma,
    BauerF,
    C1,
    C2,
    /// Leading SO(3) coefficient at `p`, one even multiplicity; for two odd
    /// multiplicities, the corresponding coefficient of `gamma_1`.
    LeadingSo3 { p: i64 },
    /// Leading SU(2) coefficient at `c`.
    LeadingSu2 { c: i64 },
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::B2 => f.write_str("b2"),
            Quantity::Sigma => f.write_str("sigma"),
            Quantity::BauerF => f.write_str("Bauer f"),
            Quantity::C1 => f.write_str("C1"),
            Quantity::C2 => f.write_str("C2"),
            Quantity::LeadingSo3 { p } => write!(f, "a_n at p={p}"),
            Quantity::LeadingSu2 { c } => write!(f, "SU(2) a_n at c={c}"),
        }
    }
}

impl Quantity {
    /// Value of this quantity on one surface.
    pub fn evaluate(&self, fp: &Fingerprint) -> Result<BigRational> {
        let int = |v: BigInt| BigRational::from_integer(v);
        let params = fp.params();
        match *self {
            Quantity::B2 => Ok(int(fp.b2().into())),
            Quantity::Sigma => Ok(int(fp.sigma().into())),
            Quantity::BauerF => bauer_f(fp.m1, fp.m2).map(int),
            Quantity::C1 => Ok(int(invariant_constants(&params).0)),
            Quantity::C2 => Ok(int(invariant_constants(&params).1)),
            Quantity::LeadingSo3 { p } => match params.even_odd() {
                Some(_) => leading_coeff_so3_even(&params, p),
                None => {
                    // gamma_1 has leading coefficient 1 in q; only p = -5 at p_g = 0 is that case
                    if fp.pg != 0 || expected_dimension(0, p) != 2 {
                        return Err(Error::ParityViolation);
                    }
                    Ok(gamma_small(&params, 1)?.coeff(1, 0))
                }
            },
            Quantity::LeadingSu2 { c } => leading_coeff_su2(&params, c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub quantity: Quantity,
    pub left: BigRational,
    pub right: BigRational,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} vs {}", self.quantity, format_rational(&self.left), format_rational(&self.right))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub witness: Option<Witness>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            Some(w) => write!(f, "VERDICT={} WITNESS={}", self.kind, w),
            None => write!(f, "VERDICT={} WITNESS=none", self.kind),
        }
    }
}

/// `p` used for the leading SO(3) coefficient: the smallest `-p` in the
/// stable range for which `n = (d - p_g)/2` is an integer.
pub fn even_case_p(pg: u32) -> i64 {
    -(8 * i64::from(pg) + 5)
}

/// `c` used for the SU(2) leading coefficient; `n = 1 >= 0` and `d >= 0`.
pub fn su2_c(pg: u32) -> i64 {
    i64::from(pg) + 1
}

fn compare(a: &Fingerprint, b: &Fingerprint, quantities: &[Quantity]) -> Result<Verdict> {
    for &q in quantities {
        let (left, right) = (q.evaluate(a)?, q.evaluate(b)?);
        if left != right {
            let kind = match q {
                Quantity::B2 | Quantity::Sigma => VerdictKind::HomotopyDistinct,
                _ => VerdictKind::InvariantDistinct,
            };
            return Ok(Verdict { kind, witness: Some(Witness { quantity: q, left, right }) });
        }
    }
    Ok(Verdict { kind: VerdictKind::DeformationEquivalent, witness: None })
}

/// Decides, from fingerprints alone, whether two surfaces are told apart by
/// homotopy data or by the invariants above, or are deformation equivalent.
pub fn distinguish(a: &Fingerprint, b: &Fingerprint) -> Verdict {
    let verdict = (|| -> Result<Verdict> {
        if (a.pg, a.r) != (b.pg, b.r) {
            return compare(a, b, &[Quantity::B2, Quantity::Sigma]);
        }
        let pg = a.pg;
        if a.is_rational() || b.is_rational() {
            return compare(a, b, &[Quantity::BauerF]);
        }
        let (ea, eb) = (a.params().even_odd().is_some(), b.params().even_odd().is_some());
        let so3 = Quantity::LeadingSo3 { p: even_case_p(pg) };
        let su2 = Quantity::LeadingSu2 { c: su2_c(pg) };
        let order: &[Quantity] = match (ea, eb, pg) {
            (true, false, 0) | (false, true, 0) => &[so3],
            (true, false, _) | (false, true, _) => &[su2],
            (false, false, 0) => &[Quantity::C1, Quantity::C2],
            (false, false, _) => &[su2, Quantity::C1],
            (true, true, 0) => &[so3, Quantity::BauerF],
            (true, true, _) => &[su2, so3],
        };
        compare(a, b, order)
    })();
    verdict.unwrap_or(Verdict { kind: VerdictKind::Inconclusive, witness: None })
}
