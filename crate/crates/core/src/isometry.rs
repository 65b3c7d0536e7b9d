//! Lattice automorphisms fixing `kappa`, and their action on mod-2 classes.
//!
//! With `kappa^perp = Z kappa + W` (`W` even unimodular) and `x` a class with
//! `x.kappa = 1`, `x ⊥ W`, every automorphism fixing `kappa` has the form
//!
//! ```text
//!   phi(kappa) = kappa
//!   phi(a)     = tau(a) + ell(a) kappa          a in W
//!   phi(x)     = x + c kappa + beta
//! ```
//!
//! where `tau` is an isometry of `W`, `ell: W -> Z` is arbitrary, `beta in W`
//! is forced by `phi(x).phi(a) = 0`, i.e. `beta.tau(a) = -ell(a)`, and
//! `c = -beta^2/2` is forced by `phi(x)^2 = x^2`.

use std::collections::{BTreeSet, VecDeque};
use std::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{ClassVector, GramLattice, Mod2Class, SurfaceModel};
use crate::matrix::{self, IntMatrix};

/// The data of a lattice with a distinguished isotropic `kappa` at
/// coordinate 0, a partner `x0` at coordinate 1 and the `W` block at
/// `w_block`. Remaining coordinates are orthogonal to all of these and are
/// fixed by every isometry built here.
#[derive(Clone, Debug)]
pub struct KappaFrame {
    lattice: GramLattice,
    w_block: Range<usize>,
    multiplicity: BigInt,
}

impl KappaFrame {
    pub fn new(lattice: GramLattice, w_block: Range<usize>, multiplicity: BigInt) -> Result<Self> {
        let n = lattice.rank();
        let g = lattice.gram();
        let bad = |s: &str| Err(Error::Invariant(s.to_string()));
        if n < 2 || w_block.start < 2 || w_block.end > n {
            return bad("frame needs kappa at 0, x at 1 and W after them");
        }
        if !g[0][0].is_zero() || !g[0][1].is_one() {
            return bad("frame needs kappa^2 = 0 and kappa.x = 1");
        }
        for i in 0..n {
            if w_block.contains(&i) {
                if !g[0][i].is_zero() || !g[1][i].is_zero() {
                    return bad("W is not orthogonal to kappa and x");
                }
                continue;
            }
            if i >= 2 && !(0..2).all(|k| g[k][i].is_zero()) {
                return bad("extra coordinates must be orthogonal to kappa and x");
            }
            if i >= 2 && !w_block.clone().all(|k| g[k][i].is_zero()) {
                return bad("extra coordinates must be orthogonal to W");
            }
        }
        let w = sub_gram(&lattice, &w_block);
        if !w.iter().enumerate().all(|(i, row)| row[i].is_even()) {
            return bad("W is not even");
        }
        if !matrix::determinant(&w).magnitude().is_one() {
            return bad("W is not unimodular");
        }
        Ok(KappaFrame { lattice, w_block, multiplicity })
    }

    pub fn from_model(model: &SurfaceModel) -> Result<Self> {
        let w = model.w_block().ok_or(Error::NoWBlock)?;
        Self::new(model.lattice().clone(), w, model.multiplicity_product())
    }

    pub fn lattice(&self) -> &GramLattice {
        &self.lattice
    }

    pub fn w_block(&self) -> Range<usize> {
        self.w_block.clone()
    }

    pub fn w_rank(&self) -> usize {
        self.w_block.len()
    }

    pub fn w_gram(&self) -> IntMatrix {
        sub_gram(&self.lattice, &self.w_block)
    }

    pub fn kappa(&self) -> ClassVector {
        ClassVector::basis(self.lattice.rank(), 0)
    }

    pub fn multiplicity(&self) -> &BigInt {
        &self.multiplicity
    }
}

fn sub_gram(l: &GramLattice, r: &Range<usize>) -> IntMatrix {
    r.clone().map(|i| r.clone().map(|j| l.entry(i, j).clone()).collect()).collect()
}

/// An automorphism of the full lattice fixing `kappa`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaIsometry {
    tau: IntMatrix,
    ell: Vec<BigInt>,
    beta: Vec<BigInt>,
    c: BigInt,
    lattice_preserving: bool,
    matrix: IntMatrix,
}

impl KappaIsometry {
    /// Isometry of `W`, acting on coordinate columns.
    pub fn tau(&self) -> &IntMatrix {
        &self.tau
    }

    /// `ell(a) = ell . a` in `W` coordinates.
    pub fn ell(&self) -> &[BigInt] {
        &self.ell
    }

    /// `beta` in `W` coordinates.
    pub fn beta(&self) -> &[BigInt] {
        &self.beta
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    /// Whether `phi` preserves `Z f + W`, i.e. `m1 m2 | ell`.
    pub fn lattice_preserving(&self) -> bool {
        self.lattice_preserving
    }

    /// Matrix on full-lattice coordinates (columns are images of basis vectors).
    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// The induced map on `H^2(S; Z/2)`.
    pub fn mod2_matrix(&self) -> Vec<Vec<bool>> {
        self.matrix.iter().map(|row| row.iter().map(Integer::is_odd).collect()).collect()
    }
}

pub fn build_kappa_isometry(frame: &KappaFrame, tau: IntMatrix, ell: Vec<BigInt>) -> Result<KappaIsometry> {
    let w = frame.w_rank();
    if tau.len() != w || tau.iter().any(|row| row.len() != w) || ell.len() != w {
        return Err(Error::LengthMismatch { rank: w, found: if tau.len() != w { tau.len() } else { ell.len() } });
    }
    let gw = frame.w_gram();
    if matrix::mul(&matrix::mul(&matrix::transpose(&tau), &gw), &tau) != gw {
        return Err(Error::NotIsometry);
    }
    let gw_inv = matrix::integer_inverse(&gw).ok_or_else(|| Error::Invariant("W is not unimodular".into()))?;
    // beta.tau(a) = -ell(a)  <=>  tau^T G beta = -ell  <=>  beta = -tau G^{-1} ell
    let beta: Vec<BigInt> =
        matrix::mul_vec(&tau, &matrix::mul_vec(&gw_inv, &ell)).into_iter().map(|b| -b).collect();
    let beta_sq = {
        let gb = matrix::mul_vec(&gw, &beta);
        gb.iter().zip(&beta).fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
    };
    let (half, rem) = beta_sq.div_rem(&BigInt::from(2));
    debug_assert!(rem.is_zero(), "W even forces beta^2 even");
    let c = -half;
    let lattice_preserving = ell.iter().all(|l| (l % frame.multiplicity()).is_zero());

    let n = frame.lattice().rank();
    let wr = frame.w_block();
    let mut m = matrix::identity(n);
    // column 1: phi(x0) = x0 + c kappa + beta
    m[0][1] = c.clone();
    for (k, i) in wr.clone().enumerate() {
        m[i][1] = beta[k].clone();
    }
    // W columns: phi(a_j) = tau(a_j) + ell_j kappa
    for (j, col) in wr.clone().enumerate() {
        m[0][col] = ell[j].clone();
        for (k, row) in wr.clone().enumerate() {
            m[row][col] = tau[k][j].clone();
        }
    }
    Ok(KappaIsometry { tau, ell, beta, c, lattice_preserving, matrix: m })
}

/// Pure translation `tau = Id`.
pub fn translation(frame: &KappaFrame, ell: Vec<BigInt>) -> Result<KappaIsometry> {
    build_kappa_isometry(frame, matrix::identity(frame.w_rank()), ell)
}

pub fn apply_isometry(phi: &KappaIsometry, v: &ClassVector) -> Result<ClassVector> {
    if v.len() != phi.matrix.len() {
        return Err(Error::LengthMismatch { rank: phi.matrix.len(), found: v.len() });
    }
    Ok(ClassVector(matrix::mul_vec(&phi.matrix, v.coords())))
}

pub fn apply_mod2(m: &[Vec<bool>], w: &Mod2Class) -> Mod2Class {
    Mod2Class(
        m.iter()
            .map(|row| row.iter().zip(&w.0).fold(false, |acc, (&a, &b)| acc ^ (a & b)))
            .collect(),
    )
}

/// Reflection of `W` in a vector of norm `±2`, as a matrix on `W` coordinates.
pub fn reflection(w_gram: &[Vec<BigInt>], v: &[BigInt]) -> Result<IntMatrix> {
    let gv = matrix::mul_vec(w_gram, v);
    let norm = gv.iter().zip(v).fold(BigInt::zero(), |acc, (a, b)| acc + a * b);
    let two = BigInt::from(2);
    if norm != two && norm != -&two {
        return Err(Error::Invariant(format!("reflection vector has norm {norm}, need ±2")));
    }
    // s(a) = a - 2 (a.v)/(v.v) v
    let factor = -(&two / &norm);
    let n = v.len();
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let delta = if i == j { BigInt::one() } else { BigInt::zero() };
                    delta + &factor * &v[i] * &gv[j]
                })
                .collect()
        })
        .collect())
}

/// Translations `ell = m1 m2 e_j^*` for each `W` basis vector, plus products
/// of pairs of reflections in norm `±2` vectors (consecutive simple roots in
/// each `E8(-1)` block, `u ± v` in each hyperbolic block).
pub fn default_generators(frame: &KappaFrame) -> Result<Vec<KappaIsometry>> {
    let w = frame.w_rank();
    let gw = frame.w_gram();
    let mut out = Vec::new();
    for j in 0..w {
        let mut ell = vec![BigInt::zero(); w];
        ell[j] = frame.multiplicity().clone();
        out.push(translation(frame, ell)?);
    }
    let unit = |i: usize| -> Vec<BigInt> {
        (0..w).map(|k| if k == i { BigInt::one() } else { BigInt::zero() }).collect()
    };
    let mut roots: Vec<Vec<BigInt>> = Vec::new();
    let mut i = 0;
    while i < w {
        if gw[i][i] == BigInt::from(-2) {
            roots.push(unit(i));
            i += 1;
        } else if i + 1 < w && gw[i][i].is_zero() && gw[i + 1][i + 1].is_zero() && gw[i][i + 1].is_one() {
            let (u, v) = (unit(i), unit(i + 1));
            let plus: Vec<BigInt> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
            let minus: Vec<BigInt> = u.iter().zip(&v).map(|(a, b)| a - b).collect();
            roots.push(plus);
            roots.push(minus);
            i += 2;
        } else {
            i += 1;
        }
    }
    for pair in roots.windows(2) {
        let tau = matrix::mul(&reflection(&gw, &pair[0])?, &reflection(&gw, &pair[1])?);
        out.push(build_kappa_isometry(frame, tau, vec![BigInt::zero(); w])?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct OrbitLimits {
    pub max_states: usize,
}

impl Default for OrbitLimits {
    fn default() -> Self {
        OrbitLimits { max_states: 1 << 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitStatus {
    /// Every admissible class lies in one orbit: the generated group, and
    /// hence any group containing it, acts transitively.
    SingleOrbit,
    /// More than one orbit under the supplied generators. This does not
    /// refute transitivity of a larger group.
    MultipleOrbits,
    /// The search hit its state ceiling; only a partial orbit is known.
    Truncated,
    /// No class satisfies the constraints.
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitReport {
    /// Number of admissible classes, when they could all be listed.
    pub candidates: Option<usize>,
    /// Orbits, each sorted lexicographically; orbits ordered by first element.
    pub orbits: Vec<Vec<Mod2Class>>,
    pub status: OrbitStatus,
}

impl OrbitReport {
    pub fn single_orbit(&self) -> bool {
        self.status == OrbitStatus::SingleOrbit
    }
}

struct Mod2Form {
    kappa_row: Vec<bool>,
    gram4: Vec<Vec<u8>>,
}

impl Mod2Form {
    fn new(lattice: &GramLattice, kappa: &ClassVector) -> Self {
        let kappa_row = lattice.dual_of(kappa).iter().map(Integer::is_odd).collect();
        let four = BigInt::from(4);
        let gram4 = lattice
            .gram()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|g| {
                        let r = g.mod_floor(&four);
                        u8::try_from(&r).expect("residue mod 4")
                    })
                    .collect()
            })
            .collect();
        Mod2Form { kappa_row, gram4 }
    }

    /// `w . kappa` is odd and the square of the 0/1 lift is `a` mod 4.
    /// The square mod 4 does not depend on the lift.
    fn admissible(&self, w: &Mod2Class, a: u8) -> bool {
        let dot = self.kappa_row.iter().zip(&w.0).fold(false, |acc, (&k, &b)| acc ^ (k & b));
        if !dot {
            return false;
        }
        let mut sq: u32 = 0;
        for (i, &bi) in w.0.iter().enumerate() {
            if !bi {
                continue;
            }
            for (j, &bj) in w.0.iter().enumerate() {
                if bj {
                    sq += u32::from(self.gram4[i][j]);
                }
            }
        }
        (sq % 4) as u8 == a
    }
}

fn class_from_bits(bits: u64, n: usize) -> Mod2Class {
    Mod2Class((0..n).map(|i| (bits >> i) & 1 == 1).collect())
}

/// Orbits of `{w : w.kappa = 1, w^2 = a mod 4}` in `H^2(S; Z/2)` under the
/// group generated by `generators`.
///
/// When all `2^rank` classes fit under `limits.max_states`, the admissible
/// set is listed and partitioned completely. Otherwise a single orbit is
/// grown from the first admissible class found, and the report is marked
/// truncated if it hits the ceiling.
pub fn mod2_orbit(
    lattice: &GramLattice,
    kappa: &ClassVector,
    a: u8,
    generators: &[KappaIsometry],
    limits: OrbitLimits,
) -> Result<OrbitReport> {
    let n = lattice.rank();
    if kappa.len() != n {
        return Err(Error::LengthMismatch { rank: n, found: kappa.len() });
    }
    let a = a % 4;
    let form = Mod2Form::new(lattice, kappa);
    let gens: Vec<Vec<Vec<bool>>> = generators.iter().map(KappaIsometry::mod2_matrix).collect();
    if gens.iter().any(|g| g.len() != n) {
        return Err(Error::LengthMismatch { rank: n, found: gens.iter().map(Vec::len).find(|&l| l != n).unwrap_or(0) });
    }
    let full = n < 63 && (1usize << n) <= limits.max_states;

    if full {
        let all: BTreeSet<Mod2Class> = (0..(1u64 << n))
            .map(|b| class_from_bits(b, n))
            .filter(|w| form.admissible(w, a))
            .collect();
        let candidates = all.len();
        let mut remaining = all;
        let mut orbits = Vec::new();
        while let Some(seed) = remaining.iter().next().cloned() {
            remaining.remove(&seed);
            let mut orbit = BTreeSet::new();
            orbit.insert(seed.clone());
            let mut queue = VecDeque::from([seed]);
            while let Some(w) = queue.pop_front() {
                for g in &gens {
                    let img = apply_mod2(g, &w);
                    if remaining.remove(&img) {
                        orbit.insert(img.clone());
                        queue.push_back(img);
                    }
                }
            }
            orbits.push(orbit.into_iter().collect::<Vec<_>>());
        }
        let status = match orbits.len() {
            0 => OrbitStatus::Empty,
            1 => OrbitStatus::SingleOrbit,
            _ => OrbitStatus::MultipleOrbits,
        };
        return Ok(OrbitReport { candidates: Some(candidates), orbits, status });
    }

    // partial mode: grow one orbit from the first admissible class
    let seed = (0..limits.max_states as u64)
        .map(|b| class_from_bits(b, n))
        .find(|w| form.admissible(w, a));
    let Some(seed) = seed else {
        return Ok(OrbitReport { candidates: None, orbits: Vec::new(), status: OrbitStatus::Truncated });
    };
    let mut orbit = BTreeSet::from([seed.clone()]);
    let mut queue = VecDeque::from([seed]);
    'bfs: while let Some(w) = queue.pop_front() {
        for g in &gens {
            let img = apply_mod2(g, &w);
            if !orbit.contains(&img) {
                if orbit.len() >= limits.max_states {
                    break 'bfs;
                }
                orbit.insert(img.clone());
                queue.push_back(img);
            }
        }
    }
    // The admissible set was never listed, so even a closed orbit cannot
    // certify transitivity here.
    Ok(OrbitReport {
        candidates: None,
        orbits: vec![orbit.into_iter().collect()],
        status: OrbitStatus::Truncated,
    })
}

/// [`mod2_orbit`] on a surface model.
pub fn model_mod2_orbit(
    model: &SurfaceModel,
    a: u8,
    generators: &[KappaIsometry],
    limits: OrbitLimits,
) -> Result<OrbitReport> {
    mod2_orbit(model.lattice(), model.kappa(), a, generators, limits)
}
