//! Small dense matrices over [`Field`] with LU and symmetric (Jacobi) eigen-decomposition.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{Field, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn diag(d: &[T]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { T::zero() })
    }

    /// Outer product `u vᵀ` (no conjugation).
    pub fn outer(u: &[T], v: &[T]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn map<U: Field>(&self, f: impl Fn(T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|x| x * s)
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |acc, j| acc + self[(i, j)] * v[j]))
            .collect()
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn max_abs(&self) -> T::R {
        self.data.iter().fold(T::R::zero(), |m, x| {
            let a = x.modulus();
            if a > m {
                a
            } else {
                m
            }
        })
    }

    pub fn frobenius(&self) -> T::R {
        self.data
            .iter()
            .fold(T::R::zero(), |acc, x| acc + x.re() * x.re() + x.im() * x.im())
            .sqrt()
    }

    /// Spectral norm (largest singular value).
    pub fn op_norm(&self) -> T::R {
        if self.data.is_empty() {
            return T::R::zero();
        }
        let h = &self.adjoint() * self;
        let n = h.rows;
        // real symmetric embedding [[Re, -Im], [Im, Re]] of the Hermitian MᴴM
        let e = Mat::<T::R>::from_fn(2 * n, 2 * n, |i, j| {
            let (a, b) = (i % n, j % n);
            let z = h[(a, b)];
            match (i < n, j < n) {
                (true, true) | (false, false) => z.re(),
                (true, false) => -z.im(),
                (false, true) => z.im(),
            }
        });
        let ev = sym_eigen(&e).values;
        let top = ev.last().copied().unwrap_or_else(T::R::zero);
        if top > T::R::zero() {
            top.sqrt()
        } else {
            T::R::zero()
        }
    }

    pub fn lu(&self) -> Lu<T> {
        assert!(self.is_square(), "LU of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut odd = false;
        let mut min_pivot = None::<T::R>;
        let scale = self.max_abs();
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].modulus();
            for i in k + 1..n {
                let m = a[(i, k)].modulus();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
                odd = !odd;
            }
            min_pivot = Some(match min_pivot {
                Some(m) if m < best => m,
                _ => best,
            });
            let d = a[(k, k)];
            if best == T::R::zero() {
                continue;
            }
            for i in k + 1..n {
                let f = a[(i, k)] / d;
                a[(i, k)] = f;
                for j in k + 1..n {
                    let t = a[(k, j)];
                    a[(i, j)] = a[(i, j)] - f * t;
                }
            }
        }
        let tiny = T::R::from_f64(T::R::eps() * n.max(1) as f64) * scale;
        let singular = n > 0 && min_pivot.is_none_or(|m| m <= tiny || m == T::R::zero());
        Lu { a, piv, odd, singular }
    }

    pub fn det(&self) -> T {
        self.lu().det()
    }

    pub fn inverse(&self) -> Result<Self> {
        let lu = self.lu();
        if lu.singular {
            return Err(Error::Precondition("matrix is numerically singular".into()));
        }
        Ok(lu.solve(&Self::identity(self.rows)))
    }

    /// `‖self · other − 1‖ / (‖self‖‖other‖)` in the spectral norm.
    pub fn inverse_residual(&self, other: &Self) -> f64 {
        let r = &(self * other) - &Self::identity(self.rows);
        r.op_norm().to_f64() / (self.op_norm() * other.op_norm()).to_f64().max(1e-300)
    }

    pub fn to_c64(&self) -> Mat<Complex64> {
        self.map(|x| x.to_c64())
    }
}

impl<R: Real> Mat<R> {
    pub fn to_complex(&self) -> Mat<Complex<R>> {
        self.map(|x| Complex::new(x, R::zero()))
    }
}

impl<R: Real> Mat<Complex<R>> {
    pub fn real_part(&self) -> Mat<R> {
        self.map(|z| z.re)
    }

    pub fn imag_part(&self) -> Mat<R> {
        self.map(|z| z.im)
    }

    pub fn scale_re(&self, s: R) -> Self {
        self.map(|z| Complex::new(z.re * s, z.im * s))
    }
}

pub struct Lu<T: Field> {
    a: Mat<T>,
    piv: Vec<usize>,
    odd: bool,
    pub singular: bool,
}

impl<T: Field> Lu<T> {
    pub fn det(&self) -> T {
        let n = self.a.rows;
        let mut d = T::one();
        for i in 0..n {
            d = d * self.a[(i, i)];
        }
        if self.odd {
            -d
        } else {
            d
        }
    }

    pub fn solve(&self, b: &Mat<T>) -> Mat<T> {
        let n = self.a.rows;
        let mut x = Mat::from_fn(n, b.cols, |i, j| b[(self.piv[i], j)]);
        for c in 0..b.cols {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s = s - self.a[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s = s - self.a[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.a[(i, i)];
            }
        }
        x
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Field> Add for &Mat<T> {
    type Output = Mat<T>;
    fn add(self, o: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Field> Sub for &Mat<T> {
    type Output = Mat<T>;
    fn sub(self, o: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Field> Neg for Mat<T> {
    type Output = Mat<T>;
    fn neg(self) -> Mat<T> {
        self.map(|x| -x)
    }
}

impl<T: Field> Neg for &Mat<T> {
    type Output = Mat<T>;
    fn neg(self) -> Mat<T> {
        self.map(|x| -x)
    }
}

impl<T: Field> Mul for &Mat<T> {
    type Output = Mat<T>;
    fn mul(self, o: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let mut out = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..o.cols {
                    out.data[i * o.cols + j] = out.data[i * o.cols + j] + a * o[(k, j)];
                }
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl<T: Field> $tr for Mat<T> {
            type Output = Mat<T>;
            fn $f(self, o: Mat<T>) -> Mat<T> {
                (&self).$f(&o)
            }
        }
        impl<T: Field> $tr<&Mat<T>> for Mat<T> {
            type Output = Mat<T>;
            fn $f(self, o: &Mat<T>) -> Mat<T> {
                (&self).$f(o)
            }
        }
        impl<T: Field> $tr<Mat<T>> for &Mat<T> {
            type Output = Mat<T>;
            fn $f(self, o: Mat<T>) -> Mat<T> {
                self.$f(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending,
/// eigenvectors in the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct SymEigen<R: Real> {
    pub values: Vec<R>,
    pub vectors: Mat<R>,
}

/// Cyclic Jacobi rotations.
pub fn sym_eigen<R: Real>(m: &Mat<R>) -> SymEigen<R> {
    let n = m.rows();
    assert!(m.is_square());
    let mut a = m.clone();
    // symmetrize against rounding
    for i in 0..n {
        for j in 0..i {
            let s = (a[(i, j)] + a[(j, i)]) * R::from_f64(0.5);
            a[(i, j)] = s;
            a[(j, i)] = s;
        }
    }
    let mut v = Mat::<R>::identity(n);
    let two = R::from_f64(2.0);
    for _sweep in 0..100 {
        let mut off = R::zero();
        let mut diag = R::zero();
        for i in 0..n {
            diag += a[(i, i)] * a[(i, i)];
            for j in 0..n {
                if i != j {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
        }
        if off <= R::from_f64(R::eps() * R::eps()) * diag || off == R::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= R::from_f64(1e-3 * R::eps()) * (a[(p, p)].abs() + a[(q, q)].abs()) {
                    a[(p, q)] = R::zero();
                    a[(q, p)] = R::zero();
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (two * apq);
                let sgn = if theta < R::zero() { -R::one() } else { R::one() };
                let t = if theta.abs() > R::from_f64(1e100) {
                    R::one() / (two * theta)
                } else {
                    sgn / (theta.abs() + (theta * theta + R::one()).sqrt())
                };
                let c = R::one() / (t * t + R::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = idx.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| v[(r, idx[c])]);
    SymEigen { values, vectors }
}

/// Orthogonal projection onto the span of the given orthonormal real vectors.
pub fn projector<R: Real>(n: usize, basis: &[Vec<R>]) -> Mat<R> {
    let mut p = Mat::<R>::zeros(n, n);
    for v in basis {
        p = &p + &Mat::outer(v, v);
    }
    p
}

/// Orthonormal basis of the range of an orthogonal projection.
pub fn range_basis<R: Real>(p: &Mat<R>) -> Vec<Vec<R>> {
    let e = sym_eigen(p);
    let half = R::from_f64(0.5);
    (0..p.rows()).filter(|&k| e.values[k] > half).map(|k| e.vectors.col(k)).collect()
}

/// Number of eigenvalues above 1/2 of a projection.
pub fn proj_rank<R: Real>(p: &Mat<R>) -> usize {
    range_basis(p).len()
}

/// `V (M + 1 − V)⁻¹ V`: the inverse of `M` on `range V` (expects `M = V M V`).
pub fn inverse_on<T: Field>(m: &Mat<T>, v: &Mat<T>) -> Result<Mat<T>> {
    let n = m.rows();
    let q = &Mat::identity(n) - v;
    let inv = (m + &q).inverse()?;
    Ok(v * &inv * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::Dd;
    use num_complex::Complex64;

    #[test]
    fn lu_inverse_and_det() {
        let m = Mat::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 4.0]]);
        let inv = m.inverse().unwrap();
        assert!(m.inverse_residual(&inv) < 1e-15);
        assert!((m.det() - 18.0).abs() < 1e-13);
        let s = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(s.inverse().is_err());
    }

    #[test]
    fn jacobi_recovers_spectrum() {
        let m = Mat::from_rows(&[vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]]);
        let e = sym_eigen(&m);
        let s2 = 2f64.sqrt();
        for (got, want) in e.values.iter().zip([2.0 - s2, 2.0, 2.0 + s2]) {
            assert!((got - want).abs() < 1e-14);
        }
        let rebuilt = &(&e.vectors * &Mat::diag(&e.values)) * &e.vectors.transpose();
        assert!((&rebuilt - &m).max_abs() < 1e-14);
    }

    #[test]
    fn jacobi_in_double_double() {
        let m = Mat::from_fn(3, 3, |i, j| Dd::new(1.0 / (1.0 + i as f64 + j as f64)));
        let e = sym_eigen(&m);
        let rebuilt = &(&e.vectors * &Mat::diag(&e.values)) * &e.vectors.transpose();
        assert!((&rebuilt - &m).max_abs().to_f64() < 1e-30);
    }

    #[test]
    fn op_norm_complex() {
        let m = Mat::from_rows(&[
            vec![Complex64::new(0.0, 3.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 1.0)],
        ]);
        assert!((m.op_norm() - 3.0).abs() < 1e-14);
    }
}
