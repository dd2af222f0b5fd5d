//! Exact linear algebra over `Q(v)` and a modular rank filter.

use crate::error::{Error, Result};
use crate::scalars::{LaurentPoly, Scalar};

pub type Matrix = Vec<Vec<Scalar>>;

/// Scalar "size" used to prefer simple pivots.
fn weight_of(s: &Scalar) -> usize {
    let n = s.numerator();
    let d = s.denominator();
    (n.high() - n.low()) as usize + (d.high() - d.low()) as usize
}

fn pick_pivot(m: &Matrix, col: usize, from: usize) -> Option<usize> {
    (from..m.len()).filter(|&r| !m[r][col].is_zero()).min_by_key(|&r| weight_of(&m[r][col]))
}

/// Inverse of a square matrix.
pub fn invert(a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    let mut m: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = pick_pivot(&m, c, c).ok_or_else(|| Error::Internal("singular matrix".into()))?;
        m.swap(p, c);
        let inv = m[c][c].inv()?;
        for k in c..2 * n {
            m[c][k] = &m[c][k] * &inv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in c..2 * n {
                    if !m[c][k].is_zero() {
                        let t = &f * &m[c][k];
                        m[r][k] = &m[r][k] - &t;
                    }
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_vec(m: &Matrix, v: &[Scalar]) -> Vec<Scalar> {
    m.iter()
        .map(|row| {
            row.iter().zip(v).fold(Scalar::zero(), |acc, (a, b)| {
                if a.is_zero() || b.is_zero() {
                    acc
                } else {
                    &acc + &(a * b)
                }
            })
        })
        .collect()
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).fold(Scalar::zero(), |acc, (x, y)| {
        if x.is_zero() || y.is_zero() {
            acc
        } else {
            &acc + &(x * y)
        }
    })
}

/// Solves `a x = b` for a possibly rectangular `a` (rows = equations).
///
/// Returns `None` when the system is inconsistent; free variables are set to zero.
pub fn solve(a: &Matrix, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = pick_pivot(&m, c, r) else { continue };
        m.swap(p, r);
        let inv = m[r][c].inv()?;
        for k in c..=cols {
            m[r][k] = &m[r][k] * &inv;
        }
        for rr in 0..rows {
            if rr != r && !m[rr][c].is_zero() {
                let f = m[rr][c].clone();
                for k in c..=cols {
                    if !m[r][k].is_zero() {
                        let t = &f * &m[r][k];
                        m[rr][k] = &m[rr][k] - &t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return Ok(None);
    }
    let mut x = vec![Scalar::zero(); cols];
    for (k, &c) in pivots.iter().enumerate() {
        x[c] = m[k][cols].clone();
    }
    Ok(Some(x))
}

/// Fraction-free Gauss-Jordan elimination over `Z[v, v^{-1}]`.
///
/// Returns `(adj, d)` with `a^{-1} = adj / d`.
pub fn fraction_free_inverse(a: &[Vec<LaurentPoly>]) -> Result<(Vec<Vec<LaurentPoly>>, LaurentPoly)> {
    let n = a.len();
    if n == 0 {
        return Ok((Vec::new(), LaurentPoly::one()));
    }
    let mut m: Vec<Vec<LaurentPoly>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { LaurentPoly::one() } else { LaurentPoly::zero() }));
            r
        })
        .collect();
    let mut prev = LaurentPoly::one();
    for k in 0..n {
        let p = (k..n).find(|&r| !m[r][k].is_zero()).ok_or_else(|| Error::Internal("singular matrix".into()))?;
        m.swap(p, k);
        let pivot = m[k][k].clone();
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = m[i][k].clone();
            for j in 0..2 * n {
                if j == k {
                    continue;
                }
                let t = &(&pivot * &m[i][j]) - &(&f * &m[k][j]);
                m[i][j] = t.div_exact(&prev).ok_or_else(|| Error::Internal("inexact elimination step".into()))?;
            }
            m[i][k] = LaurentPoly::zero();
        }
        prev = pivot;
    }
    let d = prev;
    Ok((m.into_iter().map(|row| row[n..].to_vec()).collect(), d))
}

/// Arithmetic modulo the Mersenne prime `2^61 - 1`, used to pick bases quickly.
pub mod modp {
    pub const P: u64 = (1 << 61) - 1;
    /// Evaluation point for `q`.
    pub const Q0: u64 = 1_000_003;

    pub fn add(a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= P {
            s - P
        } else {
            s
        }
    }

    pub fn sub(a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + P - b
        }
    }

    pub fn mul(a: u64, b: u64) -> u64 {
        let t = a as u128 * b as u128;
        let s = (t as u64 & P) + (t >> 61) as u64;
        let s = (s & P) + (s >> 61);
        if s >= P {
            s - P
        } else {
            s
        }
    }

    pub fn pow(mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, a);
            }
            a = mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(a: u64) -> u64 {
        pow(a, P - 2)
    }

    /// `Q0^k` for any integer `k`.
    pub fn q_pow(k: i64) -> u64 {
        if k >= 0 {
            pow(Q0, k as u64)
        } else {
            inv(pow(Q0, (-k) as u64))
        }
    }

    pub fn from_i64(x: i64) -> u64 {
        if x >= 0 {
            x as u64 % P
        } else {
            sub(0, (-x) as u64 % P)
        }
    }

    /// Incremental row echelon form used as an independence filter.
    #[derive(Default)]
    pub struct Echelon {
        rows: Vec<(usize, Vec<u64>)>,
    }

    impl Echelon {
        pub fn rank(&self) -> usize {
            self.rows.len()
        }

        /// Adds the row if it is independent of the stored ones.
        pub fn try_add(&mut self, mut row: Vec<u64>) -> bool {
            for (pc, prow) in &self.rows {
                let f = row[*pc];
                if f != 0 {
                    for (x, y) in row.iter_mut().zip(prow) {
                        *x = sub(*x, mul(f, *y));
                    }
                }
            }
            let Some(pc) = row.iter().position(|&x| x != 0) else { return false };
            let inv_p = inv(row[pc]);
            for x in row.iter_mut() {
                *x = mul(*x, inv_p);
            }
            for (_, prow) in self.rows.iter_mut() {
                let f = prow[pc];
                if f != 0 {
                    for (x, y) in prow.iter_mut().zip(&row) {
                        *x = sub(*x, mul(f, *y));
                    }
                }
            }
            self.rows.push((pc, row));
            true
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        Scalar::parse(x).unwrap()
    }

    #[test]
    fn invert_two_by_two() {
        let m = vec![vec![s("1"), s("q")], vec![s("q^{-1}"), s("2")]];
        let inv = invert(&m).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let v = dot(&m[i], &[inv[0][j].clone(), inv[1][j].clone()]);
                assert_eq!(v, if i == j { Scalar::one() } else { Scalar::zero() });
            }
        }
    }

    #[test]
    fn fraction_free_matches_field_inverse() {
        let m = vec![vec![s("1 + q"), s("q"), s("2")], vec![s("q^{-1}"), s("3"), s("q^2")], vec![s("1"), s("1 - q"), s("q")]];
        let polys: Vec<Vec<LaurentPoly>> =
            m.iter().map(|r| r.iter().map(|x| x.as_laurent().unwrap().clone()).collect()).collect();
        let (adj, d) = fraction_free_inverse(&polys).unwrap();
        let inv = invert(&m).unwrap();
        let d = Scalar::from_poly(d);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(Scalar::from_poly(adj[i][j].clone()), &inv[i][j] * &d);
            }
        }
    }

    #[test]
    fn singular_is_reported() {
        let m = vec![vec![s("1"), s("q")], vec![s("q"), s("q^2")]];
        assert!(invert(&m).is_err());
    }

    #[test]
    fn rectangular_solve() {
        let a = vec![vec![s("1"), s("0")], vec![s("0"), s("q")], vec![s("1"), s("q")]];
        let x = solve(&a, &[s("2"), s("q^2"), s("2 + q^2")]).unwrap().unwrap();
        assert_eq!(x, vec![s("2"), s("q")]);
        assert!(solve(&a, &[s("2"), s("q^2"), s("3")]).unwrap().is_none());
    }

    #[test]
    fn modular_echelon() {
        let mut e = modp::Echelon::default();
        assert!(e.try_add(vec![1, 2, 3]));
        assert!(e.try_add(vec![0, 1, 1]));
        assert!(!e.try_add(vec![1, 3, 4]));
        assert_eq!(e.rank(), 2);
        assert_eq!(modp::mul(modp::q_pow(-3), modp::q_pow(3)), 1);
    }
}
