//! Small dense complex matrices and a Householder-QR least-squares solver.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{czero, Real, C};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CMat { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "matrix data length",
                left: data.len(),
                right: rows * cols,
            });
        }
        Ok(CMat { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C<T>> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                what: "matrix product inner dimension",
                left: self.cols,
                right: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == czero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[C<T>]) -> Result<Vec<C<T>>> {
        if self.cols != x.len() {
            return Err(Error::DimensionMismatch {
                what: "matrix-vector product",
                left: self.cols,
                right: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).fold(czero(), |acc, (&a, &b)| acc + a * b))
            .collect())
    }

    pub fn scale(&self, s: C<T>) -> Self {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                what: "vertical stack column count",
                left: self.cols,
                right: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(CMat {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }
}

impl<T> Index<(usize, usize)> for CMat<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for CMat<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C<T> {
        &mut self.data[r * self.cols + c]
    }
}

/// Householder QR factorization of a tall matrix, kept in compact form.
#[derive(Clone, Debug)]
pub struct Qr<T> {
    rows: usize,
    cols: usize,
    /// Householder vectors, one per column (length `rows - k`).
    reflectors: Vec<Vec<C<T>>>,
    /// Upper-triangular factor, `cols x cols`.
    r: CMat<T>,
}

impl<T: Real> Qr<T> {
    /// Factors `a` (rows >= cols).
    pub fn new(a: &CMat<T>) -> Result<Self> {
        let (m, n) = (a.rows, a.cols);
        if m < n {
            return Err(Error::DimensionMismatch {
                what: "least-squares rows vs columns",
                left: m,
                right: n,
            });
        }
        let mut w = a.clone();
        let mut reflectors = Vec::with_capacity(n);
        for k in 0..n {
            let mut v: Vec<C<T>> = (k..m).map(|i| w[(i, k)]).collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if norm == T::zero() {
                reflectors.push(Vec::new());
                continue;
            }
            let x0 = v[0];
            let phase = if x0.norm() == T::zero() {
                C::new(T::one(), T::zero())
            } else {
                x0 / x0.norm()
            };
            let alpha = -phase * norm;
            v[0] = v[0] - alpha;
            let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<T>();
            if vnorm2 == T::zero() {
                reflectors.push(Vec::new());
                continue;
            }
            let scale = T::lit(2.0) / vnorm2;
            for c in k..n {
                let s = (k..m).fold(czero::<T>(), |acc, i| acc + v[i - k].conj() * w[(i, c)]);
                let f = s * scale;
                for i in k..m {
                    w[(i, c)] = w[(i, c)] - v[i - k] * f;
                }
            }
            reflectors.push(v);
        }
        let r = CMat::from_fn(n, n, |i, j| if j >= i { w[(i, j)] } else { czero() });
        Ok(Qr {
            rows: m,
            cols: n,
            reflectors,
            r,
        })
    }

    pub fn r(&self) -> &CMat<T> {
        &self.r
    }

    /// Applies `Q^H` to every column of `b` in place.
    fn apply_qh(&self, b: &mut CMat<T>) {
        for (k, v) in self.reflectors.iter().enumerate() {
            if v.is_empty() {
                continue;
            }
            let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<T>();
            let scale = T::lit(2.0) / vnorm2;
            for c in 0..b.cols {
                let s = (k..self.rows).fold(czero::<T>(), |acc, i| acc + v[i - k].conj() * b[(i, c)]);
                let f = s * scale;
                for i in k..self.rows {
                    b[(i, c)] = b[(i, c)] - v[i - k] * f;
                }
            }
        }
    }

    fn back_substitute(&self, y: &CMat<T>) -> Result<CMat<T>> {
        let n = self.cols;
        let mut x = CMat::zeros(n, y.cols);
        for c in 0..y.cols {
            for i in (0..n).rev() {
                let mut acc = y[(i, c)];
                for j in i + 1..n {
                    acc = acc - self.r[(i, j)] * x[(j, c)];
                }
                let d = self.r[(i, i)];
                if d.norm() == T::zero() {
                    return Err(Error::RankDeficient {
                        rows: self.rows,
                        cols: self.cols,
                    });
                }
                x[(i, c)] = acc / d;
            }
        }
        Ok(x)
    }

    /// Solves `min ||A X - B||_F` column by column.
    pub fn solve(&self, b: &CMat<T>) -> Result<CMat<T>> {
        if b.rows != self.rows {
            return Err(Error::DimensionMismatch {
                what: "least-squares right-hand side rows",
                left: b.rows,
                right: self.rows,
            });
        }
        let mut qb = b.clone();
        self.apply_qh(&mut qb);
        let y = CMat::from_fn(self.cols, b.cols, |i, j| qb[(i, j)]);
        self.back_substitute(&y)
    }

    /// Frobenius-norm condition estimate of `A^H A`, i.e. `(||R||_F ||R^-1||_F)^2`.
    /// Returns infinity when `R` has a zero pivot.
    pub fn gram_condition(&self) -> f64 {
        let n = self.cols;
        if (0..n).any(|i| self.r[(i, i)].norm() == T::zero()) {
            return f64::INFINITY;
        }
        let rinv = match self.back_substitute(&CMat::identity(n)) {
            Ok(m) => m,
            Err(_) => return f64::INFINITY,
        };
        let c = self.r.frobenius_norm().as_f64() * rinv.frobenius_norm().as_f64();
        c * c
    }
}

/// Least-squares solve `min ||A X - B||_F` via Householder QR.
pub fn lstsq<T: Real>(a: &CMat<T>, b: &CMat<T>) -> Result<CMat<T>> {
    Qr::new(a)?.solve(b)
}

/// Moore-Penrose left pseudo-inverse `(A^H A)^{-1} A^H` of a full-column-rank matrix.
/// Fails when the Gram condition number exceeds `1 / epsilon`.
pub fn left_pseudo_inverse<T: Real>(a: &CMat<T>) -> Result<CMat<T>> {
    let qr = Qr::new(a)?;
    if qr.gram_condition() * T::epsilon().as_f64() > 1.0 {
        return Err(Error::RankDeficient {
            rows: a.rows,
            cols: a.cols,
        });
    }
    qr.solve(&CMat::identity(a.rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    #[test]
    fn solves_square_system() {
        let a = CMat::from_vec(2, 2, vec![c(2.0, 0.0), c(1.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)]).unwrap();
        let x_true = CMat::from_vec(2, 1, vec![c(1.0, 2.0), c(-0.5, 0.25)]).unwrap();
        let b = a.matmul(&x_true).unwrap();
        let x = lstsq(&a, &b).unwrap();
        assert!(x.sub(&x_true).max_abs() < 1e-14);
    }

    #[test]
    fn overdetermined_normal_equations_hold() {
        let a = CMat::from_fn(6, 3, |r, k| {
            c((r * 7 + k * 3) as f64 % 5.0 - 2.0, ((r + 2 * k) % 3) as f64)
        });
        let b = CMat::from_fn(6, 1, |r, _| c(r as f64, 1.0 - r as f64 * 0.5));
        let x = lstsq(&a, &b).unwrap();
        let resid = a.matmul(&x).unwrap().sub(&b);
        let ne = a.adjoint().matmul(&resid).unwrap();
        assert!(ne.max_abs() < 1e-12);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let a = CMat::from_fn(3, 2, |r, _| c(r as f64 + 1.0, 0.0));
        assert!(left_pseudo_inverse(&a).is_err());
        assert!(Qr::new(&a).unwrap().gram_condition() > 1e20);
    }

    #[test]
    fn pseudo_inverse_is_left_inverse() {
        let a = CMat::from_fn(5, 2, |r, k| {
            c((r as f64 + 1.0).sin() + k as f64, (r as f64 * 0.3 - k as f64).cos())
        });
        let p = left_pseudo_inverse(&a).unwrap();
        let id = p.matmul(&a).unwrap();
        assert!(id.sub(&CMat::identity(2)).max_abs() < 1e-13);
    }
}
