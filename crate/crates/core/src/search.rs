//! Bounded integer point search for positive definite rational forms.
//!
//! Given `Q(z) = Σ d_i (z_i + Σ_{j>i} l_ji z_j)^2` (an `LDLᵀ` split of a
//! positive definite Gram matrix) and a bound `B`, enumerate every
//! `z ∈ Z^n` with `Q(z) <= B`, coordinate by coordinate from the last one
//! (Fincke-Pohst). Everything is exact; ranges are widened by one and then
//! filtered with the exact inequality.

use std::thread;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{self, IntMatrix, RatMatrix};

/// A replaceable enumeration kernel.
pub trait PointSearch: Sync {
    /// All integer vectors `z` with `form(z - center) <= bound`, sorted.
    fn points_near(&self, form: &PositiveForm, center: &[BigRational], bound: &BigRational) -> Vec<Vec<BigInt>>;

    /// All integer vectors `z` with `form(z) <= bound`, sorted.
    fn points_within(&self, form: &PositiveForm, bound: &BigRational) -> Vec<Vec<BigInt>> {
        self.points_near(form, &vec![BigRational::zero(); form.dim()], bound)
    }
}

#[derive(Clone, Debug)]
pub struct PositiveForm {
    gram: RatMatrix,
    d: Vec<BigRational>,
    // mu[i][j] = l[j][i] for j > i
    mu: RatMatrix,
}

impl PositiveForm {
    pub fn new(gram: RatMatrix) -> Result<Self> {
        let (d, l) = matrix::ldl(&gram)
            .ok_or_else(|| Error::Invariant("search form is not positive definite".into()))?;
        let n = d.len();
        let mu = (0..n).map(|i| (0..n).map(|j| l[j][i].clone()).collect()).collect();
        Ok(PositiveForm { gram, d, mu })
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn eval(&self, z: &[BigInt]) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, zi) in z.iter().enumerate() {
            for (j, zj) in z.iter().enumerate() {
                if !zi.is_zero() && !zj.is_zero() {
                    acc += &self.gram[i][j] * BigRational::from_integer(zi * zj);
                }
            }
        }
        acc
    }

    /// Offset of coordinate `i` in the `i`-th square, given `z_j` for `j > i`.
    fn center(&self, i: usize, z: &[BigInt], shift: &[BigRational]) -> BigRational {
        let mut c = -&shift[i];
        for j in i + 1..z.len() {
            if !self.mu[i][j].is_zero() {
                c += &self.mu[i][j] * (BigRational::from_integer(z[j].clone()) - &shift[j]);
            }
        }
        c
    }

    /// Candidate integers for coordinate `i` given the centre and the
    /// remaining budget, with the exact residual budget for each.
    fn candidates(&self, i: usize, center: &BigRational, budget: &BigRational) -> Vec<(BigInt, BigRational)> {
        if budget.is_negative() {
            return Vec::new();
        }
        let q = budget / &self.d[i];
        let radius: BigInt = q.floor().to_integer().sqrt() + 1;
        let mid = -center;
        let lo: BigInt = mid.floor().to_integer() - &radius;
        let hi: BigInt = mid.ceil().to_integer() + &radius;
        let mut out = Vec::new();
        let mut v = lo;
        while v <= hi {
            let t = BigRational::from_integer(v.clone()) + center;
            let cost = &self.d[i] * &t * &t;
            if cost <= *budget {
                out.push((v.clone(), budget - cost));
            }
            v += 1;
        }
        out
    }

    fn descend(
        &self,
        i: usize,
        z: &mut Vec<BigInt>,
        shift: &[BigRational],
        budget: &BigRational,
        out: &mut Vec<Vec<BigInt>>,
    ) {
        let c = self.center(i, z, shift);
        for (v, rest) in self.candidates(i, &c, budget) {
            z[i] = v;
            if i == 0 {
                out.push(z.clone());
            } else {
                self.descend(i - 1, z, shift, &rest, out);
            }
        }
        z[i] = BigInt::zero();
    }
}

/// Fincke-Pohst enumeration, optionally splitting the outermost
/// coordinate across `jobs` threads. Output order does not depend on `jobs`.
#[derive(Clone, Copy, Debug)]
pub struct FinckePohst {
    pub jobs: usize,
}

impl Default for FinckePohst {
    fn default() -> Self {
        FinckePohst { jobs: 1 }
    }
}

impl PointSearch for FinckePohst {
    fn points_near(&self, form: &PositiveForm, shift: &[BigRational], bound: &BigRational) -> Vec<Vec<BigInt>> {
        let n = form.dim();
        assert_eq!(shift.len(), n, "center has the wrong dimension");
        if n == 0 {
            return if bound.is_negative() { Vec::new() } else { vec![Vec::new()] };
        }
        let top = n - 1;
        let outer = form.candidates(top, &-&shift[top], bound);
        let jobs = self.jobs.max(1).min(outer.len().max(1));
        let mut out = if jobs == 1 {
            let mut out = Vec::new();
            let mut z = vec![BigInt::zero(); n];
            for (v, rest) in outer {
                z[top] = v;
                if top == 0 {
                    out.push(z.clone());
                } else {
                    form.descend(top - 1, &mut z, shift, &rest, &mut out);
                }
            }
            out
        } else {
            let chunk = outer.len().div_ceil(jobs);
            thread::scope(|s| {
                let handles: Vec<_> = outer
                    .chunks(chunk)
                    .map(|part| {
                        s.spawn(move || {
                            let mut out = Vec::new();
                            let mut z = vec![BigInt::zero(); n];
                            for (v, rest) in part {
                                z[top] = v.clone();
                                if top == 0 {
                                    out.push(z.clone());
                                } else {
                                    form.descend(top - 1, &mut z, shift, rest, &mut out);
                                }
                            }
                            out
                        })
                    })
                    .collect();
                handles.into_iter().flat_map(|h| h.join().expect("search worker panicked")).collect()
            })
        };
        out.sort();
        out
    }
}

/// Integer points of a `b+ = 1` lattice on the affine slices
/// `{z : z.a = s, z.b = t}`, where `a`, `b` span a hyperbolic plane.
///
/// The complement `{a, b}^perp` is negative definite, so on each slice
/// `-z^2` is a positive definite quadratic in kernel coordinates and
/// `z^2 >= p` cuts out a (small) ellipsoid around the slice's
/// projection point.
#[derive(Clone, Debug)]
pub struct HyperbolicSlice {
    lead: [Vec<BigInt>; 2],
    h: [BigInt; 3],
    kernel: IntMatrix,
    // K^T G, for the linear term of -(z0 + K k)^2
    kt_g: IntMatrix,
    gram: IntMatrix,
    form: PositiveForm,
    form_inv: RatMatrix,
    // rows of the inverse of [lead | kernel], reduced mod 2
    coords_mod2: Vec<Vec<bool>>,
}

fn combine(cols: &mut [Vec<BigInt>], a: &mut [Vec<BigInt>], row: usize, i: usize, j: usize) {
    let (x, y) = (a[row][i].clone(), a[row][j].clone());
    if y.is_zero() {
        return;
    }
    // (i, j) <- (u i + v j, -(y/g) i + (x/g) j), determinant 1
    let e = x.extended_gcd(&y);
    let (g, u, v) = (e.gcd, e.x, e.y);
    let (p, q) = (-(&y / &g), &x / &g);
    let mix = |m: &mut [Vec<BigInt>]| {
        for r in m.iter_mut() {
            let (ci, cj) = (r[i].clone(), r[j].clone());
            r[i] = &u * &ci + &v * &cj;
            r[j] = &p * &ci + &q * &cj;
        }
    };
    mix(cols);
    mix(a);
}

impl HyperbolicSlice {
    /// `None` when `a` and `b` are linearly dependent.
    pub fn new(gram: &IntMatrix, a: &[BigInt], b: &[BigInt]) -> Result<Option<Self>> {
        let n = gram.len();
        let mut rows = vec![matrix::mul_vec(gram, a), matrix::mul_vec(gram, b)];
        let mut u = matrix::identity(n);
        for j in 1..n {
            combine(&mut u, &mut rows, 0, 0, j);
        }
        if rows[0][0].is_zero() {
            return Err(Error::Invariant("slice direction pairs trivially with the lattice".into()));
        }
        for j in 2..n {
            combine(&mut u, &mut rows, 1, 1, j);
        }
        if rows[1][1].is_zero() {
            return Ok(None);
        }
        let col = |j: usize| -> Vec<BigInt> { u.iter().map(|r| r[j].clone()).collect() };
        let lead = [col(0), col(1)];
        let raw: IntMatrix = (2..n).map(col).collect();
        let raw_neg: IntMatrix = raw
            .iter()
            .map(|a| matrix::mul_vec(gram, a))
            .map(|ga| raw.iter().map(|b| -dot(&ga, b)).collect())
            .collect();
        if matrix::inertia(&raw_neg).0 != raw.len() {
            return Err(Error::Invariant("complement of the slice plane is not negative definite".into()));
        }
        // a reduced kernel basis keeps the enumeration ellipsoid round
        let (neg, t) = lll_reduce(&raw_neg);
        let kernel: IntMatrix = t
            .iter()
            .map(|row| {
                let mut v = vec![BigInt::zero(); n];
                for (c, k) in row.iter().zip(&raw) {
                    if !c.is_zero() {
                        for (vi, ki) in v.iter_mut().zip(k) {
                            *vi += c * ki;
                        }
                    }
                }
                v
            })
            .collect();
        let kt_g: IntMatrix = kernel.iter().map(|k| matrix::mul_vec(gram, k)).collect();
        let q = matrix::to_rational(&neg);
        let form = PositiveForm::new(q.clone())
            .map_err(|_| Error::Invariant("complement of the slice plane is not negative definite".into()))?;
        let form_inv = matrix::inverse(&q).expect("positive definite");
        let h = [rows[0][0].clone(), rows[1][0].clone(), rows[1][1].clone()];
        let columns: Vec<&Vec<BigInt>> = lead.iter().chain(&kernel).collect();
        let basis: IntMatrix = (0..n).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
        let inv = matrix::integer_inverse(&basis).expect("slice basis is unimodular");
        let coords_mod2 = inv.iter().map(|row| row.iter().map(Integer::is_odd).collect()).collect();
        Ok(Some(HyperbolicSlice { lead, h, kernel, kt_g, gram: gram.clone(), form, form_inv, coords_mod2 }))
    }

    /// Sorted points `z` with `z.a = s`, `z.b = t` and `z^2 >= p`.
    pub fn points(&self, kernel: &dyn PointSearch, s: &BigInt, t: &BigInt, p: &BigInt) -> Vec<Vec<BigInt>> {
        self.points_in(kernel, s, t, p, None)
    }

    /// As `points`, keeping only `z = residue (mod 2)`. The search runs on
    /// the coset directly, so it visits far fewer points.
    pub fn points_congruent(
        &self,
        kernel: &dyn PointSearch,
        s: &BigInt,
        t: &BigInt,
        p: &BigInt,
        residue: &[BigInt],
    ) -> Vec<Vec<BigInt>> {
        self.points_in(kernel, s, t, p, Some(residue))
    }

    fn points_in(
        &self,
        kernel: &dyn PointSearch,
        s: &BigInt,
        t: &BigInt,
        p: &BigInt,
        residue: Option<&[BigInt]>,
    ) -> Vec<Vec<BigInt>> {
        let (y0, r0) = s.div_rem(&self.h[0]);
        if !r0.is_zero() {
            return Vec::new();
        }
        let (y1, r1) = (t - &self.h[1] * &y0).div_rem(&self.h[2]);
        if !r1.is_zero() {
            return Vec::new();
        }
        let z0: Vec<BigInt> =
            self.lead[0].iter().zip(&self.lead[1]).map(|(c0, c1)| &y0 * c0 + &y1 * c1).collect();
        // residue coordinates in the [lead | kernel] basis
        let parity: Option<Vec<bool>> = residue.map(|r| {
            self.coords_mod2
                .iter()
                .map(|row| row.iter().zip(r).filter(|(b, x)| **b && x.is_odd()).count() % 2 == 1)
                .collect()
        });
        if let Some(par) = &parity {
            if par[0] != y0.is_odd() || par[1] != y1.is_odd() {
                return Vec::new();
            }
        }
        if self.kernel.is_empty() {
            let sq = dot(&matrix::mul_vec(&self.gram, &z0), &z0);
            return if sq >= *p { vec![z0] } else { Vec::new() };
        }
        // -(z0 + K k)^2 = -z0^2 - 2 k.g + Q(k),   g = K^T G z0
        let g: Vec<BigRational> =
            self.kt_g.iter().map(|row| BigRational::from_integer(dot(row, &z0))).collect();
        let center: Vec<BigRational> = self
            .form_inv
            .iter()
            .map(|row| row.iter().zip(&g).fold(BigRational::zero(), |acc, (a, b)| acc + a * b))
            .collect();
        let z0_sq = dot(&matrix::mul_vec(&self.gram, &z0), &z0);
        let g_dot_c = g.iter().zip(&center).fold(BigRational::zero(), |acc, (a, b)| acc + a * b);
        let min_value = -BigRational::from_integer(z0_sq) - g_dot_c;
        let bound = -BigRational::from_integer(p.clone()) - min_value;
        if bound.is_negative() {
            return Vec::new();
        }
        let found = match &parity {
            None => kernel.points_near(&self.form, &center, &bound),
            Some(par) => {
                // k = k_par + 2 k', and Q(k - c) = 4 Q(k' - (c - k_par)/2)
                let k_par: Vec<BigInt> = par[2..].iter().map(|&b| BigInt::from(u8::from(b))).collect();
                let half = BigRational::new(BigInt::from(1), BigInt::from(2));
                let shifted: Vec<BigRational> = center
                    .iter()
                    .zip(&k_par)
                    .map(|(c, k)| (c - BigRational::from_integer(k.clone())) * &half)
                    .collect();
                let quarter = &bound / BigRational::from_integer(BigInt::from(4));
                kernel
                    .points_near(&self.form, &shifted, &quarter)
                    .into_iter()
                    .map(|k| k.iter().zip(&k_par).map(|(a, b)| a * 2 + b).collect())
                    .collect()
            }
        };
        let mut out: Vec<Vec<BigInt>> = found
            .into_iter()
            .map(|k| {
                let mut z = z0.clone();
                for (ki, col) in k.iter().zip(&self.kernel) {
                    if !ki.is_zero() {
                        for (zj, cj) in z.iter_mut().zip(col) {
                            *zj += ki * cj;
                        }
                    }
                }
                z
            })
            .collect();
        out.sort();
        out
    }
}

/// Gram-Schmidt data `(mu, d)` of a positive definite Gram matrix.
fn gram_schmidt(q: &[Vec<BigInt>]) -> (RatMatrix, Vec<BigRational>) {
    let n = q.len();
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut d: Vec<BigRational> = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..i {
            let mut v = BigRational::from_integer(q[i][j].clone());
            for l in 0..j {
                v -= &mu[j][l] * &mu[i][l] * &d[l];
            }
            mu[i][j] = v / &d[j];
        }
        let mut v = BigRational::from_integer(q[i][i].clone());
        for l in 0..i {
            v -= &mu[i][l] * &mu[i][l] * &d[l];
        }
        d.push(v);
    }
    (mu, d)
}

/// LLL reduction (delta = 3/4) of the basis with positive definite integer
/// Gram `q`. Returns the reduced Gram and the unimodular `t` whose row `i`
/// expresses new basis vector `i` in the old basis.
fn lll_reduce(q: &[Vec<BigInt>]) -> (IntMatrix, IntMatrix) {
    let n = q.len();
    let mut q: IntMatrix = q.to_vec();
    let mut t = matrix::identity(n);
    let delta = BigRational::new(3.into(), 4.into());
    let mut k = 1;
    while k < n {
        let (mut mu, d) = gram_schmidt(&q);
        for j in (0..k).rev() {
            let r = mu[k][j].round().to_integer();
            if r.is_zero() {
                continue;
            }
            // b_k -= r b_j
            for i in 0..n {
                let v = &r * &q[i][j];
                q[i][k] -= v;
            }
            for i in 0..n {
                let v = &r * &q[j][i];
                q[k][i] -= v;
            }
            for i in 0..n {
                let v = &r * &t[j][i];
                t[k][i] -= v;
            }
            let rq = BigRational::from_integer(r);
            for i in 0..j {
                let v = &rq * &mu[j][i];
                mu[k][i] -= v;
            }
            mu[k][j] -= &rq;
        }
        if d[k] >= (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &d[k - 1] {
            k += 1;
        } else {
            q.swap(k, k - 1);
            for row in q.iter_mut() {
                row.swap(k, k - 1);
            }
            t.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    (q, t)
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}
