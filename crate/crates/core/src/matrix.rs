//! Small exact linear-algebra kernels over `BigInt` / `BigRational`.
//!
//! Matrices are row-major `Vec<Vec<_>>`. Sizes in this crate stay below a
//! few dozen, so nothing here tries to be clever about fill-in.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn to_rational(m: &[Vec<BigInt>]) -> RatMatrix {
    m.iter()
        .map(|row| row.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn transpose(m: &[Vec<BigInt>]) -> IntMatrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = BigInt::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc += &row[k] * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mul_vec(a: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(x, y)| !x.is_zero() && !y.is_zero())
                .fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
        })
        .collect()
}

pub fn is_symmetric<T: PartialEq>(m: &[Vec<T>]) -> bool {
    let n = m.len();
    m.iter().all(|row| row.len() == n)
        && (0..n).all(|i| (0..i).all(|j| m[i][j] == m[j][i]))
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: IntMatrix = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Counts of positive, negative and zero entries in a congruence
/// diagonalization of the symmetric matrix `m` over the rationals.
pub fn inertia(m: &[Vec<BigInt>]) -> (usize, usize, usize) {
    let mut a = to_rational(m);
    let n = a.len();
    let (mut pos, mut neg, mut zero) = (0, 0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&i| !a[i][i].is_zero());
        let pivot = match pivot {
            Some(p) => p,
            None => {
                // all remaining diagonal entries vanish; look for an off-diagonal one
                let pair = active.iter().flat_map(|&i| active.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !a[i][j].is_zero());
                match pair {
                    Some((i, j)) => {
                        // e_i <- e_i + e_j makes a_ii = 2 a_ij != 0
                        for k in 0..n {
                            let v = a[j][k].clone();
                            a[i][k] += v;
                        }
                        for k in 0..n {
                            let v = a[k][j].clone();
                            a[k][i] += v;
                        }
                        i
                    }
                    None => {
                        zero += active.len();
                        break;
                    }
                }
            }
        };
        let d = a[pivot][pivot].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        active.retain(|&i| i != pivot);
        for &i in &active {
            let factor = &a[i][pivot] / &d;
            if factor.is_zero() {
                continue;
            }
            for &j in &active {
                let v = &factor * &a[pivot][j];
                a[i][j] -= v;
            }
        }
        for &i in &active {
            a[i][pivot] = BigRational::zero();
            a[pivot][i] = BigRational::zero();
        }
    }
    (pos, neg, zero)
}

/// Exact inverse by Gauss-Jordan elimination; `None` when singular.
pub fn inverse(m: &[Vec<BigRational>]) -> Option<RatMatrix> {
    let n = m.len();
    let mut a: RatMatrix = m.to_vec();
    let mut inv: RatMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        inv.swap(piv, col);
        let d = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &d;
            inv[col][j] /= &d;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let x = &f * &a[col][j];
                a[r][j] -= x;
                let y = &f * &inv[col][j];
                inv[r][j] -= y;
            }
        }
    }
    Some(inv)
}

/// Inverse of an integer matrix, provided it is integral (e.g. unimodular).
pub fn integer_inverse(m: &[Vec<BigInt>]) -> Option<IntMatrix> {
    let inv = inverse(&to_rational(m))?;
    inv.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| if x.is_integer() { Some(x.to_integer()) } else { None })
                .collect()
        })
        .collect()
}

/// `LDLᵀ` factorization of a positive definite rational matrix.
///
/// Returns `(d, l)` with `l` unit lower triangular, or `None` when a pivot
/// is not strictly positive.
pub fn ldl(m: &[Vec<BigRational>]) -> Option<(Vec<BigRational>, RatMatrix)> {
    let n = m.len();
    let mut l: RatMatrix = vec![vec![BigRational::zero(); n]; n];
    let mut d = vec![BigRational::zero(); n];
    for j in 0..n {
        let mut dj = m[j][j].clone();
        for k in 0..j {
            dj -= &l[j][k] * &l[j][k] * &d[k];
        }
        if !dj.is_positive() {
            return None;
        }
        l[j][j] = BigRational::one();
        for i in j + 1..n {
            let mut v = m[i][j].clone();
            for k in 0..j {
                v -= &l[i][k] * &l[j][k] * &d[k];
            }
            l[i][j] = v / &dj;
        }
        d[j] = dj;
    }
    Some((d, l))
}
