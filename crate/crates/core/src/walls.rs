//! Walls of type `(Delta, c)` and the chambers they cut out of the positive
//! cone, for lattices with `b+ = 1`.
//!
//! A wall is an integral `zeta` with `zeta = Delta mod 2` and
//! `p <= zeta^2 < 0`, where `p = Delta^2 - 4c`. Every query pins `zeta`
//! against two classes spanning a hyperbolic plane (`x, y` or `L, kappa`).
//! The Gram determinant of those two classes and `zeta` is `>= 0` when
//! `b+ = 1`, which leaves finitely many pairs of pairing values. Each pair
//! is an affine slice on which `zeta^2 >= p` is a small ellipsoid in the
//! negative definite complement.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{ClassVector, GramLattice, SurfaceModel};
use crate::search::{FinckePohst, HyperbolicSlice, PointSearch};

/// A `b+ = 1` lattice with its isotropic `kappa` and fiber `f = m kappa`.
#[derive(Clone)]
pub struct ChamberSpace {
    lattice: GramLattice,
    kappa: ClassVector,
    fiber: ClassVector,
    kernel: Arc<dyn PointSearch + Send>,
    jobs: usize,
}

impl fmt::Debug for ChamberSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChamberSpace")
            .field("lattice", &self.lattice)
            .field("kappa", &self.kappa)
            .field("fiber", &self.fiber)
            .finish_non_exhaustive()
    }
}

impl ChamberSpace {
    pub fn new(lattice: GramLattice, kappa: ClassVector, multiplicity: BigInt) -> Result<Self> {
        if lattice.b_plus() != 1 {
            return Err(Error::BPlusNotOne(lattice.b_plus()));
        }
        if !lattice.square(&kappa)?.is_zero() || kappa.is_zero() {
            return Err(Error::Invariant("kappa must be a nonzero isotropic class".into()));
        }
        if !multiplicity.is_positive() {
            return Err(Error::ZeroMultiplicity);
        }
        let fiber = kappa.scale(&multiplicity);
        Ok(ChamberSpace { lattice, kappa, fiber, kernel: Arc::new(FinckePohst::default()), jobs: 1 })
    }

    pub fn from_model(model: &SurfaceModel) -> Result<Self> {
        Self::new(model.lattice().clone(), model.kappa().clone(), model.multiplicity_product())
    }

    /// Replaces the enumeration kernel.
    pub fn with_search(mut self, kernel: Arc<dyn PointSearch + Send>) -> Self {
        self.kernel = kernel;
        self
    }

    /// Spreads the slices of each query over `jobs` threads. Output does
    /// not depend on this.
    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }

    pub fn lattice(&self) -> &GramLattice {
        &self.lattice
    }

    pub fn kappa(&self) -> &ClassVector {
        &self.kappa
    }

    pub fn fiber(&self) -> &ClassVector {
        &self.fiber
    }

    fn pair(&self, u: &ClassVector, v: &ClassVector) -> BigInt {
        self.lattice.pair_unchecked(u, v)
    }

    /// Points with `z.u = s`, `z.v = t`, `z^2 >= p` over all listed `(s, t)`.
    fn scan(
        &self,
        u: &ClassVector,
        v: &ClassVector,
        slices: &[(BigInt, BigInt)],
        p: &BigInt,
        residue: &ClassVector,
    ) -> Result<Vec<ClassVector>> {
        let Some(plane) = HyperbolicSlice::new(self.lattice.gram(), u.coords(), v.coords())? else {
            return Ok(Vec::new());
        };
        let kernel: &dyn PointSearch = self.kernel.as_ref();
        let run = |part: &[(BigInt, BigInt)]| -> Vec<Vec<BigInt>> {
            part.iter().flat_map(|(s, t)| plane.points_congruent(kernel, s, t, p, residue.coords())).collect()
        };
        let jobs = self.jobs.min(slices.len()).max(1);
        let mut pts = if jobs == 1 {
            run(slices)
        } else {
            let chunk = slices.len().div_ceil(jobs);
            std::thread::scope(|sc| {
                let handles: Vec<_> = slices.chunks(chunk).map(|part| sc.spawn(move || run(part))).collect();
                handles.into_iter().flat_map(|h| h.join().expect("wall worker panicked")).collect()
            })
        };
        pts.sort();
        Ok(pts.into_iter().map(ClassVector).collect())
    }
}

fn isqrt_floor(q: &BigRational) -> BigInt {
    if q.is_negative() {
        return BigInt::from(-1);
    }
    q.floor().to_integer().sqrt()
}

/// Numerical stand-in for an ample class: `L^2 > 0` and `L.kappa > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polarization {
    cls: ClassVector,
    square: BigInt,
}

impl Polarization {
    pub fn new(space: &ChamberSpace, cls: ClassVector) -> Result<Self> {
        let square = space.lattice.square(&cls)?;
        if !square.is_positive() {
            return Err(Error::BadPolarization(format!("L^2 = {square} is not positive")));
        }
        let deg = space.pair(&cls, &space.kappa);
        if !deg.is_positive() {
            return Err(Error::BadPolarization(format!("L.kappa = {deg} is not positive")));
        }
        Ok(Polarization { cls, square })
    }

    pub fn class(&self) -> &ClassVector {
        &self.cls
    }

    pub fn square(&self) -> &BigInt {
        &self.square
    }
}

/// A wall together with the type it was found for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallClass {
    pub zeta: ClassVector,
    pub square: BigInt,
    pub delta: ClassVector,
    pub c: BigInt,
}

impl fmt::Display for WallClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} square={}", self.zeta, self.square)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Suitability {
    Suitable,
    /// The witness is normalized with `zeta.L > 0`, so `zeta.f < 0`.
    Unsuitable(WallClass),
}

impl Suitability {
    pub fn is_suitable(&self) -> bool {
        matches!(self, Suitability::Suitable)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuitableMode {
    /// `n = floor(-p (L0.f)/2) + 1`, the explicit bound.
    ExplicitBound,
    /// Least `n >= 0` that passes.
    Minimal,
}

/// `p = Delta^2 - 4c`.
pub fn wall_bound(lattice: &GramLattice, delta: &ClassVector, c: &BigInt) -> Result<BigInt> {
    Ok(lattice.square(delta)? - c * 4)
}

fn congruent_mod2(a: &ClassVector, b: &ClassVector) -> bool {
    a.coords().iter().zip(b.coords()).all(|(x, y)| (x - y).is_even())
}

pub fn is_wall(lattice: &GramLattice, zeta: &ClassVector, delta: &ClassVector, c: &BigInt) -> Result<bool> {
    let p = wall_bound(lattice, delta, c)?;
    let sq = lattice.square(zeta)?;
    Ok(congruent_mod2(zeta, delta) && p <= sq && sq.is_negative())
}

fn wall(space: &ChamberSpace, zeta: ClassVector, delta: &ClassVector, c: &BigInt) -> WallClass {
    let square = space.pair(&zeta, &zeta);
    WallClass { zeta, square, delta: delta.clone(), c: c.clone() }
}

impl ChamberSpace {
    fn check(&self, delta: &ClassVector) -> Result<()> {
        if delta.len() != self.lattice.rank() {
            return Err(Error::LengthMismatch { rank: self.lattice.rank(), found: delta.len() });
        }
        Ok(())
    }

    fn wall_filter(&self, z: &ClassVector, delta: &ClassVector, p: &BigInt) -> bool {
        if !congruent_mod2(z, delta) {
            return false;
        }
        let sq = self.pair(z, z);
        *p <= sq && sq.is_negative()
    }

    /// Walls `zeta` with `zeta.x > 0 > zeta.y`, sorted lexicographically.
    pub fn separating_walls(
        &self,
        x: &Polarization,
        y: &Polarization,
        delta: &ClassVector,
        c: &BigInt,
    ) -> Result<Vec<WallClass>> {
        self.check(delta)?;
        let p = wall_bound(&self.lattice, delta, c)?;
        if !p.is_negative() || x == y {
            return Ok(Vec::new());
        }
        let xy = self.pair(&x.cls, &y.cls);
        let disc = &xy * &xy - &x.square * &y.square;
        if !disc.is_positive() {
            return Ok(Vec::new());
        }
        // With t = zeta.x > 0 > u = zeta.y the Gram determinant gives
        //   y^2 t^2 - 2 (x.y) t u + x^2 u^2 <= -p ((x.y)^2 - x^2 y^2),
        // a bounded region since every term on the left is positive.
        let big = -&p * &disc;
        let t_max = isqrt_floor(&BigRational::new(big.clone(), y.square.clone()));
        let mut slices = Vec::new();
        let mut t = BigInt::from(1);
        while t <= t_max {
            // smaller root of x^2 u^2 - 2 (x.y) t u + y^2 t^2 + p D = 0
            let root: BigInt = (&disc * (&t * &t - &p * &x.square)).sqrt() + 1;
            let lo: BigInt = (&xy * &t - root).div_floor(&x.square);
            let mut u = lo;
            while u.is_negative() {
                slices.push((t.clone(), u.clone()));
                u += 1;
            }
            t += 1;
        }
        Ok(self
            .scan(&x.cls, &y.cls, &slices, &p, delta)?
            .into_iter()
            .filter(|z| self.wall_filter(z, delta, &p))
            .map(|z| wall(self, z, delta, c))
            .collect())
    }

    /// Walls through `L`, sorted.
    pub fn walls_through(&self, l: &Polarization, delta: &ClassVector, c: &BigInt) -> Result<Vec<WallClass>> {
        self.check(delta)?;
        let p = wall_bound(&self.lattice, delta, c)?;
        if !p.is_negative() {
            return Ok(Vec::new());
        }
        // t = zeta.L = 0 leaves L^2 e^2 <= -(L.kappa)^2 p for e = zeta.kappa
        let lk = self.pair(&l.cls, &self.kappa);
        let e_max = isqrt_floor(&BigRational::new(-&p * &lk * &lk, l.square.clone()));
        let mut slices = Vec::new();
        let mut e = -e_max.clone();
        while e <= e_max {
            slices.push((BigInt::zero(), e.clone()));
            e += 1;
        }
        Ok(self
            .scan(&l.cls, &self.kappa, &slices, &p, delta)?
            .into_iter()
            .filter(|z| self.wall_filter(z, delta, &p))
            .map(|z| wall(self, z, delta, c))
            .collect())
    }

    /// Whether every wall pairs with `L` and `f` with the same sign.
    ///
    /// Requires `Delta.kappa` odd: then every wall has `zeta.kappa` odd, so
    /// the sign of `zeta.f` is never zero.
    pub fn is_suitable(&self, l: &Polarization, delta: &ClassVector, c: &BigInt) -> Result<Suitability> {
        self.check(delta)?;
        let p = wall_bound(&self.lattice, delta, c)?;
        if !p.is_negative() {
            return Ok(Suitability::Suitable);
        }
        if self.pair(delta, &self.kappa).is_even() {
            return Err(Error::EvenFiberDegree);
        }
        // For a wall with e = zeta.kappa > 0 and t = zeta.L <= 0, the Gram
        // determinant of (L, kappa, zeta) is >= 0 (b+ = 1), so
        //   2 e t (L.kappa) >= L^2 e^2 + (L.kappa)^2 p.
        // With t <= 0 this bounds e, and then t from below.
        let lk = self.pair(&l.cls, &self.kappa);
        let e_max = isqrt_floor(&BigRational::new(-&p * &lk * &lk, l.square.clone()));
        let mut slices = Vec::new();
        let mut e = BigInt::from(1);
        while e <= e_max {
            let lo = BigRational::new(&l.square * &e * &e + &lk * &lk * &p, BigInt::from(2) * &e * &lk);
            let mut t = lo.ceil().to_integer();
            while !t.is_positive() {
                slices.push((t.clone(), e.clone()));
                t += 1;
            }
            e += 1;
        }
        let pts = self.scan(&l.cls, &self.kappa, &slices, &p, delta)?;
        let mut witness: Option<ClassVector> = None;
        for z in pts {
            if !self.wall_filter(&z, delta, &p) {
                continue;
            }
            let t = self.pair(&z, &l.cls);
            if t.is_zero() {
                return Err(Error::OnWall(z));
            }
            if t.is_negative() {
                let w = z.neg();
                if witness.as_ref().is_none_or(|best| w < *best) {
                    witness = Some(w);
                }
            }
        }
        Ok(match witness {
            None => Suitability::Suitable,
            Some(z) => Suitability::Unsuitable(wall(self, z, delta, c)),
        })
    }

    /// `L0 + n f` for the `n` selected by `mode`; returns `(n, L)`.
    pub fn make_suitable(
        &self,
        l0: &Polarization,
        delta: &ClassVector,
        c: &BigInt,
        mode: SuitableMode,
    ) -> Result<(BigInt, Polarization)> {
        self.check(delta)?;
        let p = wall_bound(&self.lattice, delta, c)?;
        let lf = self.pair(&l0.cls, &self.fiber);
        let bound_n = if p.is_negative() { (-&p * &lf).div_floor(&BigInt::from(2)) + 1 } else { BigInt::zero() };
        let shifted = |n: &BigInt| Polarization::new(self, l0.cls.add_scaled(n, &self.fiber));
        match mode {
            SuitableMode::ExplicitBound => {
                let l = shifted(&bound_n)?;
                match self.is_suitable(&l, delta, c)? {
                    Suitability::Suitable => Ok((bound_n, l)),
                    Suitability::Unsuitable(w) => {
                        Err(Error::Invariant(format!("bounded shift is not suitable, wall {w}")))
                    }
                }
            }
            SuitableMode::Minimal => {
                let mut n = BigInt::zero();
                loop {
                    let l = shifted(&n)?;
                    match self.is_suitable(&l, delta, c) {
                        Ok(Suitability::Suitable) => return Ok((n, l)),
                        Ok(Suitability::Unsuitable(_)) | Err(Error::OnWall(_)) => {}
                        Err(e) => return Err(e),
                    }
                    if n >= bound_n {
                        return Err(Error::Invariant("no suitable shift up to the explicit bound".into()));
                    }
                    n += 1;
                }
            }
        }
    }

    /// Whether no wall separates `L1` and `L2`. Both must be off every wall.
    pub fn same_chamber(
        &self,
        l1: &Polarization,
        l2: &Polarization,
        delta: &ClassVector,
        c: &BigInt,
    ) -> Result<bool> {
        for l in [l1, l2] {
            if let Some(w) = self.walls_through(l, delta, c)?.into_iter().next() {
                return Err(Error::OnWall(w.zeta));
            }
        }
        Ok(self.separating_walls(l1, l2, delta, c)?.is_empty())
    }
}

/// Numerical shadow of a destabilizing sub-line-bundle with class `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Destabilizing {
    pub zeta: ClassVector,
    /// `l(Z) = c + F^2 - F.Delta`.
    pub colength: BigInt,
    pub is_wall: bool,
}

pub fn destabilizing_data(
    lattice: &GramLattice,
    f: &ClassVector,
    delta: &ClassVector,
    c: &BigInt,
) -> Result<Destabilizing> {
    let zeta = f.scale(&BigInt::from(2)).sub(delta);
    let colength = c + lattice.square(f)? - lattice.pair(f, delta)?;
    if colength.is_negative() {
        return Err(Error::NegativeColength(colength));
    }
    let is_wall = is_wall(lattice, &zeta, delta, c)?;
    Ok(Destabilizing { zeta, colength, is_wall })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(x: &[i64]) -> ClassVector {
        ClassVector::from_i64(x)
    }

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn toy() -> ChamberSpace {
        ChamberSpace::new(GramLattice::diagonal(&[1, -1]).unwrap(), cv(&[1, 1]), b(1)).unwrap()
    }

    fn pol(s: &ChamberSpace, x: &[i64]) -> Polarization {
        Polarization::new(s, cv(x)).unwrap()
    }

    /// Every class in the box `|z_i| <= r`.
    fn boxed(n: usize, r: i64) -> Vec<ClassVector> {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out.into_iter().flat_map(|v: Vec<i64>| (-r..=r).map(move |k| [v.clone(), vec![k]].concat())).collect();
        }
        let mut v: Vec<ClassVector> = out.iter().map(|x| cv(x)).collect();
        v.sort();
        v
    }

    fn brute_separating(s: &ChamberSpace, x: &Polarization, y: &Polarization, d: &ClassVector, c: &BigInt) -> Vec<ClassVector> {
        boxed(s.lattice.rank(), 12)
            .into_iter()
            .filter(|z| is_wall(&s.lattice, z, d, c).unwrap())
            .filter(|z| s.pair(z, x.class()).is_positive() && s.pair(z, y.class()).is_negative())
            .collect()
    }

    #[test]
    fn is_wall_examples() {
        let l = GramLattice::diagonal(&[1, -1]).unwrap();
        let d = cv(&[1, 0]);
        assert!(is_wall(&l, &cv(&[1, 2]), &d, &b(1)).unwrap());
        assert!(!is_wall(&l, &cv(&[1, 0]), &d, &b(1)).unwrap());
        // Delta^2 - 4c = 1 >= 0: no walls at all
        assert!(boxed(2, 6).iter().all(|z| !is_wall(&l, z, &d, &b(0)).unwrap()));
    }

    #[test]
    fn separating_examples() {
        let s = toy();
        let d = cv(&[1, 0]);
        let (x, y) = (pol(&s, &[3, 1]), pol(&s, &[5, 3]));
        let walls = s.separating_walls(&x, &y, &d, &b(1)).unwrap();
        assert_eq!(walls.len(), 1);
        assert_eq!(walls[0].zeta, cv(&[1, 2]));
        assert_eq!(walls[0].to_string(), "1,2 square=-3");
        assert!(s.separating_walls(&x, &x, &d, &b(1)).unwrap().is_empty());
        assert!(s.separating_walls(&x, &y, &d, &b(0)).unwrap().is_empty());
    }

    #[test]
    fn suitability_examples() {
        let s = toy();
        let d = cv(&[1, 0]);
        match s.is_suitable(&pol(&s, &[3, 1]), &d, &b(1)).unwrap() {
            Suitability::Unsuitable(w) => assert_eq!(w.zeta, cv(&[1, 2])),
            other => panic!("expected a witness, got {other:?}"),
        }
        assert!(s.is_suitable(&pol(&s, &[5, 3]), &d, &b(1)).unwrap().is_suitable());
        assert!(s.is_suitable(&pol(&s, &[3, 1]), &d, &b(0)).unwrap().is_suitable());
        assert!(matches!(s.is_suitable(&pol(&s, &[4, 2]), &d, &b(1)), Err(Error::OnWall(_))));
    }

    #[test]
    fn make_suitable_examples() {
        let s = toy();
        let d = cv(&[1, 0]);
        let l0 = pol(&s, &[3, 1]);
        let (n, l) = s.make_suitable(&l0, &d, &b(1), SuitableMode::ExplicitBound).unwrap();
        assert_eq!((n, l.class().clone()), (b(4), cv(&[7, 5])));
        let (n, l) = s.make_suitable(&l0, &d, &b(1), SuitableMode::Minimal).unwrap();
        assert_eq!((n, l.class().clone()), (b(2), cv(&[5, 3])));
        let (n, _) = s.make_suitable(&pol(&s, &[5, 3]), &d, &b(1), SuitableMode::Minimal).unwrap();
        assert_eq!(n, b(0));
    }

    #[test]
    fn chamber_examples() {
        let s = toy();
        let d = cv(&[1, 0]);
        assert!(s.same_chamber(&pol(&s, &[5, 3]), &pol(&s, &[6, 4]), &d, &b(1)).unwrap());
        assert!(!s.same_chamber(&pol(&s, &[3, 1]), &pol(&s, &[5, 3]), &d, &b(1)).unwrap());
        let l = pol(&s, &[5, 3]);
        assert!(s.same_chamber(&l, &l, &d, &b(1)).unwrap());
        assert!(matches!(s.same_chamber(&pol(&s, &[4, 2]), &l, &d, &b(1)), Err(Error::OnWall(_))));
    }

    #[test]
    fn destabilizing_examples() {
        let l = GramLattice::diagonal(&[1, -1]).unwrap();
        let d = cv(&[1, 0]);
        let k = destabilizing_data(&l, &cv(&[1, 1]), &d, &b(1)).unwrap();
        assert_eq!((k.zeta, k.colength, k.is_wall), (cv(&[1, 2]), b(0), true));
        let k = destabilizing_data(&l, &d, &d, &b(1)).unwrap();
        assert_eq!((k.zeta, k.colength, k.is_wall), (d.clone(), b(1), false));
        let k = destabilizing_data(&l, &cv(&[0, 0]), &d, &b(1)).unwrap();
        assert_eq!((k.zeta, k.colength, k.is_wall), (cv(&[-1, 0]), b(1), false));
        // F = (0,2): 1 + (-4) - 0 < 0
        assert_eq!(destabilizing_data(&l, &cv(&[0, 2]), &d, &b(1)), Err(Error::NegativeColength(b(-3))));
    }

    #[test]
    fn rejects_b_plus_above_one() {
        let l = GramLattice::diagonal(&[1, 1, -1]).unwrap();
        assert_eq!(
            ChamberSpace::new(l, cv(&[0, 1, 1]), b(1)).err(),
            Some(Error::BPlusNotOne(2))
        );
    }

    #[test]
    fn even_fiber_degree_rejected() {
        let s = toy();
        assert_eq!(
            s.is_suitable(&pol(&s, &[3, 1]), &cv(&[1, 1]), &b(1)),
            Err(Error::EvenFiberDegree)
        );
    }

    #[test]
    fn rank3_matches_brute_force() {
        let s = ChamberSpace::new(GramLattice::diagonal(&[1, -1, -1]).unwrap(), cv(&[1, 1, 0]), b(1)).unwrap();
        let d = cv(&[1, 0, 1]);
        let (x, y) = (pol(&s, &[4, 1, 1]), pol(&s, &[6, 5, -1]));
        let mut seen = 0;
        for c in 1..4 {
            let got: Vec<ClassVector> =
                s.separating_walls(&x, &y, &d, &b(c)).unwrap().into_iter().map(|w| w.zeta).collect();
            assert_eq!(got, brute_separating(&s, &x, &y, &d, &b(c)), "c = {c}");
            seen += got.len();
        }
        assert!(seen > 0);
    }

    #[test]
    fn jobs_do_not_change_walls() {
        let s = ChamberSpace::new(GramLattice::diagonal(&[1, -1, -1]).unwrap(), cv(&[1, 1, 0]), b(1)).unwrap();
        let d = cv(&[1, 0, 1]);
        let (x, y) = (pol(&s, &[4, 1, 1]), pol(&s, &[9, 8, -2]));
        let one = s.separating_walls(&x, &y, &d, &b(3)).unwrap();
        let four = s.clone().with_jobs(4).separating_walls(&x, &y, &d, &b(3)).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn dolgachev_suitable_chamber() {
        let m = crate::lattice::build_surface_model(0, 2, 3, 0).unwrap();
        let s = ChamberSpace::from_model(&m).unwrap();
        // Delta = x has Delta.kappa = 1
        let delta = m.x_class().clone();
        let l0 = Polarization::new(&s, m.x_class().add(m.kappa())).unwrap();
        let c = b(1);
        let (_, l) = s.make_suitable(&l0, &delta, &c, SuitableMode::Minimal).unwrap();
        assert!(s.is_suitable(&l, &delta, &c).unwrap().is_suitable());
    }
}
