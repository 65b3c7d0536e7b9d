//! Integral lattices, class vectors and the intersection lattice of a
//! (blown-up) simply connected elliptic surface.
//!
//! The default basis of a surface lattice is
//!
//! ```text
//!   index 0        kappa            kappa^2 = 0, kappa.x = 1
//!   index 1        x                x^2 in {0, 1}
//!   2 .. 2+w       W                (p_g+1) E8(-1)  +  2 p_g H
//!   2+w ..         e_1 .. e_r       e_i^2 = -1
//! ```
//!
//! so that `kappa^perp = Z kappa + W` and every block is orthogonal to the
//! others apart from the kappa/x pairing.

use std::fmt;
use std::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::{self, IntMatrix};

/// Integral symmetric bilinear form on `Z^rank`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramLattice {
    gram: IntMatrix,
    signature: (usize, usize),
}

impl GramLattice {
    /// Validates symmetry and nondegeneracy and caches the signature.
    pub fn new(gram: IntMatrix) -> Result<Self> {
        let n = gram.len();
        if gram.iter().any(|row| row.len() != n) {
            return Err(Error::NotSquare);
        }
        if !matrix::is_symmetric(&gram) {
            return Err(Error::NotSymmetric);
        }
        let (pos, neg, zero) = matrix::inertia(&gram);
        if zero > 0 {
            return Err(Error::Degenerate);
        }
        Ok(GramLattice { gram, signature: (pos, neg) })
    }

    pub fn from_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    /// Diagonal form `<d_1> + ... + <d_n>`.
    pub fn diagonal(entries: &[i64]) -> Result<Self> {
        let n = entries.len();
        let gram = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigInt::from(entries[i]) } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        Self::new(gram)
    }

    /// The hyperbolic plane `H`.
    pub fn hyperbolic() -> Self {
        Self::from_rows(&[&[0, 1], &[1, 0]]).expect("H is nondegenerate")
    }

    /// The negative definite `E8(-1)` lattice, basis of simple roots.
    pub fn e8_negative() -> Self {
        // Bourbaki labelling: chain 1-3-4-5-6-7-8 with node 2 attached to 4.
        const EDGES: [(usize, usize); 7] = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];
        let mut gram = vec![vec![BigInt::zero(); 8]; 8];
        for (i, row) in gram.iter_mut().enumerate() {
            row[i] = BigInt::from(-2);
        }
        for &(a, b) in &EDGES {
            gram[a][b] = BigInt::one();
            gram[b][a] = BigInt::one();
        }
        Self::new(gram).expect("E8 is nondegenerate")
    }

    pub fn direct_sum(&self, other: &GramLattice) -> GramLattice {
        let (n, m) = (self.rank(), other.rank());
        let mut gram = vec![vec![BigInt::zero(); n + m]; n + m];
        for i in 0..n {
            gram[i][..n].clone_from_slice(&self.gram[i]);
        }
        for i in 0..m {
            gram[n + i][n..].clone_from_slice(&other.gram[i]);
        }
        GramLattice {
            gram,
            signature: (self.signature.0 + other.signature.0, self.signature.1 + other.signature.1),
        }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.gram[i][j]
    }

    /// `(b+, b-)`.
    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn b_plus(&self) -> usize {
        self.signature.0
    }

    pub fn determinant(&self) -> BigInt {
        matrix::determinant(&self.gram)
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs().is_one()
    }

    pub fn is_even(&self) -> bool {
        self.gram.iter().enumerate().all(|(i, row)| row[i].is_even())
    }

    fn check(&self, u: &ClassVector) -> Result<()> {
        if u.len() != self.rank() {
            return Err(Error::LengthMismatch { rank: self.rank(), found: u.len() });
        }
        Ok(())
    }

    /// `u^T G v`.
    pub fn pair(&self, u: &ClassVector, v: &ClassVector) -> Result<BigInt> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.pair_unchecked(u, v))
    }

    pub fn square(&self, u: &ClassVector) -> Result<BigInt> {
        self.pair(u, u)
    }

    pub(crate) fn pair_unchecked(&self, u: &ClassVector, v: &ClassVector) -> BigInt {
        let mut acc = BigInt::zero();
        for (i, ui) in u.0.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            let mut row = BigInt::zero();
            for (g, vj) in self.gram[i].iter().zip(&v.0) {
                if !g.is_zero() && !vj.is_zero() {
                    row += g * vj;
                }
            }
            acc += ui * row;
        }
        acc
    }

    /// `G u`, the pairing functional of `u` in coordinates.
    pub(crate) fn dual_of(&self, u: &ClassVector) -> Vec<BigInt> {
        matrix::mul_vec(&self.gram, &u.0)
    }

    /// Appends `extra` orthogonal `<-1>` summands.
    pub fn with_negative_ones(&self, extra: usize) -> GramLattice {
        if extra == 0 {
            return self.clone();
        }
        let ones = GramLattice::diagonal(&vec![-1; extra]).expect("nondegenerate");
        self.direct_sum(&ones)
    }
}

/// Integer coordinate vector in a chosen lattice basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassVector(pub Vec<BigInt>);

impl ClassVector {
    pub fn zero(rank: usize) -> Self {
        ClassVector(vec![BigInt::zero(); rank])
    }

    pub fn basis(rank: usize, i: usize) -> Self {
        let mut v = Self::zero(rank);
        v.0[i] = BigInt::one();
        v
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        ClassVector(coords.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &ClassVector) -> ClassVector {
        ClassVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &ClassVector) -> ClassVector {
        ClassVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &BigInt) -> ClassVector {
        ClassVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> ClassVector {
        ClassVector(self.0.iter().map(|a| -a).collect())
    }

    /// `self + k * other`.
    pub fn add_scaled(&self, k: &BigInt, other: &ClassVector) -> ClassVector {
        ClassVector(self.0.iter().zip(&other.0).map(|(a, b)| a + k * b).collect())
    }

    /// gcd of the coordinates (0 for the zero vector).
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// Pads with zeros, i.e. the pull-back along a blowup.
    pub fn extended(&self, rank: usize) -> ClassVector {
        let mut v = self.0.clone();
        v.resize(rank, BigInt::zero());
        ClassVector(v)
    }

    pub fn reduce_mod2(&self) -> Mod2Class {
        reduce_mod2(self)
    }
}

impl fmt::Display for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// A class in `H^2(S; Z/2)`, stored coordinate-wise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mod2Class(pub Vec<bool>);

impl Mod2Class {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &Mod2Class) -> Mod2Class {
        Mod2Class(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect())
    }

    /// The 0/1 integral lift.
    pub fn lift(&self) -> ClassVector {
        ClassVector(self.0.iter().map(|&b| BigInt::from(b as u8)).collect())
    }
}

impl fmt::Display for Mod2Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn reduce_mod2(u: &ClassVector) -> Mod2Class {
    Mod2Class(u.0.iter().map(|x| x.is_odd()).collect())
}

/// Choice of `x^2` in the default basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum XSquare {
    Zero,
    One,
    /// `x^2 = k mod 2` where `K = k kappa`; this is the choice for which
    /// `K` is characteristic (Wu formula).
    #[default]
    Auto,
}

/// Caller-supplied lattice for the minimal surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitLattice {
    pub gram: IntMatrix,
    pub kappa: ClassVector,
    pub x: ClassVector,
}

/// Everything needed to build a [`SurfaceModel`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceSpec {
    pub pg: u32,
    pub m1: u64,
    pub m2: u64,
    pub r: usize,
    pub x_square: XSquare,
    pub explicit: Option<ExplicitLattice>,
}

impl SurfaceSpec {
    pub fn new(pg: u32, m1: u64, m2: u64, r: usize) -> Self {
        SurfaceSpec { pg, m1, m2, r, x_square: XSquare::Auto, explicit: None }
    }

    pub fn build(&self) -> Result<SurfaceModel> {
        let (m1, m2) = check_multiplicities(self.m1, self.m2)?;
        let base = match &self.explicit {
            None => default_model(self.pg, m1, m2, self.x_square),
            Some(ex) => explicit_model(self.pg, m1, m2, ex)?,
        };
        let model = blow_up(&base, self.r);
        model.validate()?;
        Ok(model)
    }
}

pub(crate) fn check_multiplicities(m1: u64, m2: u64) -> Result<(u64, u64)> {
    if m1 == 0 || m2 == 0 {
        return Err(Error::ZeroMultiplicity);
    }
    if m1.gcd(&m2) != 1 {
        return Err(Error::NotCoprime { m1, m2 });
    }
    Ok((m1.min(m2), m1.max(m2)))
}

/// Coefficient `k` in `K = k kappa`, i.e. `(p_g+1) m1 m2 - m1 - m2`.
pub fn canonical_multiple(pg: u32, m1: u64, m2: u64) -> BigInt {
    let (m1, m2) = (BigInt::from(m1), BigInt::from(m2));
    BigInt::from(pg + 1) * &m1 * &m2 - m1 - m2
}

/// The intersection lattice of a blown-up elliptic surface with its
/// distinguished classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceModel {
    pg: u32,
    m1: u64,
    m2: u64,
    r: usize,
    lattice: GramLattice,
    kappa: ClassVector,
    fiber: ClassVector,
    canonical: ClassVector,
    x_class: ClassVector,
    exceptional: Vec<ClassVector>,
    w_block: Option<Range<usize>>,
}

/// Default construction; see the module docs for the basis layout.
pub fn build_surface_model(pg: u32, m1: u64, m2: u64, r: usize) -> Result<SurfaceModel> {
    SurfaceSpec::new(pg, m1, m2, r).build()
}

fn default_model(pg: u32, m1: u64, m2: u64, xsq: XSquare) -> SurfaceModel {
    let k = canonical_multiple(pg, m1, m2);
    let a = match xsq {
        XSquare::Zero => 0,
        XSquare::One => 1,
        XSquare::Auto => i64::from(k.is_odd()),
    };
    let mut lattice = GramLattice::from_rows(&[&[0, 1], &[1, a]]).expect("det -1");
    let e8 = GramLattice::e8_negative();
    let h = GramLattice::hyperbolic();
    for _ in 0..=pg {
        lattice = lattice.direct_sum(&e8);
    }
    for _ in 0..2 * pg {
        lattice = lattice.direct_sum(&h);
    }
    let rank = lattice.rank();
    let kappa = ClassVector::basis(rank, 0);
    let mu = BigInt::from(m1) * BigInt::from(m2);
    SurfaceModel {
        pg,
        m1,
        m2,
        r: 0,
        fiber: kappa.scale(&mu),
        canonical: kappa.scale(&k),
        x_class: ClassVector::basis(rank, 1),
        kappa,
        lattice,
        exceptional: Vec::new(),
        w_block: Some(2..rank),
    }
}

fn explicit_model(pg: u32, m1: u64, m2: u64, ex: &ExplicitLattice) -> Result<SurfaceModel> {
    let lattice = GramLattice::new(ex.gram.clone())?;
    let want = (2 * pg as usize + 1, 10 * pg as usize + 9);
    if lattice.signature() != want {
        return Err(Error::Signature {
            want_pos: want.0,
            want_neg: want.1,
            found_pos: lattice.signature().0,
            found_neg: lattice.signature().1,
        });
    }
    for (name, v) in [("kappa", &ex.kappa), ("x", &ex.x)] {
        if v.len() != lattice.rank() {
            return Err(Error::Invariant(format!(
                "{name} has {} coordinates, lattice rank is {}",
                v.len(),
                lattice.rank()
            )));
        }
    }
    let mu = BigInt::from(m1) * BigInt::from(m2);
    Ok(SurfaceModel {
        pg,
        m1,
        m2,
        r: 0,
        fiber: ex.kappa.scale(&mu),
        canonical: ex.kappa.scale(&canonical_multiple(pg, m1, m2)),
        kappa: ex.kappa.clone(),
        x_class: ex.x.clone(),
        lattice,
        exceptional: Vec::new(),
        w_block: None,
    })
}

/// Blows up `extra` more points: appends `<-1>` summands and pulls every
/// distinguished class back with zero new coordinates.
pub fn blow_up(model: &SurfaceModel, extra: usize) -> SurfaceModel {
    if extra == 0 {
        return model.clone();
    }
    let lattice = model.lattice.with_negative_ones(extra);
    let rank = lattice.rank();
    let old = model.lattice.rank();
    let mut exceptional: Vec<ClassVector> =
        model.exceptional.iter().map(|e| e.extended(rank)).collect();
    exceptional.extend((old..rank).map(|i| ClassVector::basis(rank, i)));
    SurfaceModel {
        pg: model.pg,
        m1: model.m1,
        m2: model.m2,
        r: model.r + extra,
        kappa: model.kappa.extended(rank),
        fiber: model.fiber.extended(rank),
        canonical: model.canonical.extended(rank),
        x_class: model.x_class.extended(rank),
        exceptional,
        w_block: model.w_block.clone(),
        lattice,
    }
}

impl SurfaceModel {
    pub fn pg(&self) -> u32 {
        self.pg
    }

    /// The smaller multiplicity.
    pub fn m1(&self) -> u64 {
        self.m1
    }

    pub fn m2(&self) -> u64 {
        self.m2
    }

    pub fn multiplicity_product(&self) -> BigInt {
        BigInt::from(self.m1) * BigInt::from(self.m2)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn lattice(&self) -> &GramLattice {
        &self.lattice
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn kappa(&self) -> &ClassVector {
        &self.kappa
    }

    pub fn fiber(&self) -> &ClassVector {
        &self.fiber
    }

    pub fn canonical(&self) -> &ClassVector {
        &self.canonical
    }

    pub fn x_class(&self) -> &ClassVector {
        &self.x_class
    }

    pub fn exceptional(&self) -> &[ClassVector] {
        &self.exceptional
    }

    /// Coordinate range of the even unimodular block `W`, when the model
    /// was built in the default basis.
    pub fn w_block(&self) -> Option<Range<usize>> {
        self.w_block.clone()
    }

    pub fn pair(&self, u: &ClassVector, v: &ClassVector) -> Result<BigInt> {
        self.lattice.pair(u, v)
    }

    /// Second Betti number and signature.
    pub fn betti_signature(&self) -> (i64, i64) {
        let (p, n) = self.lattice.signature();
        ((p + n) as i64, p as i64 - n as i64)
    }

    /// Replaces `x` by `x + kappa`, shifting `x^2` by 2.
    pub fn shift_x(&self) -> SurfaceModel {
        let mut m = self.clone();
        m.x_class = m.x_class.add(&m.kappa);
        m
    }

    /// `f . u`; always a multiple of `m1 m2`.
    pub fn fiber_degree(&self, u: &ClassVector) -> Result<BigInt> {
        self.lattice.pair(&self.fiber, u)
    }

    /// Whether some integral class has fiber degree `degree`. Only
    /// multiples of `m1 m2` occur, so e.g. `m1 m2 / 2` never does.
    pub fn fiber_degree_attainable(&self, degree: &BigInt) -> bool {
        (degree % self.multiplicity_product()).is_zero()
    }

    /// Re-checks every structural invariant.
    pub fn validate(&self) -> Result<()> {
        let l = &self.lattice;
        let inv = |s: &str| Err(Error::Invariant(s.to_string()));
        if self.m1.gcd(&self.m2) != 1 {
            return Err(Error::NotCoprime { m1: self.m1, m2: self.m2 });
        }
        if !l.is_unimodular() {
            return inv("lattice is not unimodular");
        }
        let want = (2 * self.pg as usize + 1, 10 * self.pg as usize + 9 + self.r);
        if l.signature() != want {
            return Err(Error::Signature {
                want_pos: want.0,
                want_neg: want.1,
                found_pos: l.signature().0,
                found_neg: l.signature().1,
            });
        }
        if !self.kappa.is_primitive() {
            return inv("kappa is not primitive");
        }
        if !l.square(&self.kappa)?.is_zero() {
            return inv("kappa is not isotropic");
        }
        if self.fiber != self.kappa.scale(&self.multiplicity_product()) {
            return inv("fiber != m1 m2 kappa");
        }
        let k = canonical_multiple(self.pg, self.m1, self.m2);
        if self.canonical != self.kappa.scale(&k) {
            return inv("canonical != ((p_g+1) m1 m2 - m1 - m2) kappa");
        }
        if !l.pair(&self.x_class, &self.kappa)?.is_one() {
            return inv("x . kappa != 1");
        }
        if self.exceptional.len() != self.r {
            return inv("wrong number of exceptional classes");
        }
        for (i, e) in self.exceptional.iter().enumerate() {
            if l.square(e)? != BigInt::from(-1) {
                return inv("exceptional class with e^2 != -1");
            }
            if !l.pair(e, &self.kappa)?.is_zero() {
                return inv("exceptional class with e . kappa != 0");
            }
            for e2 in &self.exceptional[..i] {
                if !l.pair(e, e2)?.is_zero() {
                    return inv("exceptional classes not orthogonal");
                }
            }
        }
        Ok(())
    }
}

/// Recovers `(p_g, r)` from `b2 = 12 chi - 2 + r`, `sigma = -8 chi - r`
/// where `chi = p_g + 1`.
pub fn homotopy_data(b2: i64, sigma: i64) -> Result<(u32, usize)> {
    let err = |reason| Error::InconsistentHomotopy { b2, sigma, reason };
    let s = b2 + sigma + 2;
    if s.rem_euclid(4) != 0 {
        return Err(err("b2 + sigma + 2 is not divisible by 4"));
    }
    let chi = s / 4;
    if chi < 1 {
        return Err(err("p_g would be negative"));
    }
    let r = -sigma - 8 * chi;
    if r < 0 {
        return Err(err("blowup count would be negative"));
    }
    let pg = (chi - 1).to_u32().ok_or_else(|| err("p_g out of range"))?;
    Ok((pg, r as usize))
}
