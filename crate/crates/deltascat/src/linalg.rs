//! Projected inversion (Jensen–Nenciu), block inversion (Feshbach/Schur) and
//! tolerance-based kernel projections.

use crate::error::{Error, Result};
use crate::matrix::{projector, range_basis, sym_eigen, Mat};
use crate::scalar::{Field, Real};

/// Default relative spectral tolerance for kernel decisions.
pub const KERNEL_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct ProjectedInverse<T: Field> {
    /// `A⁻¹` when `invertible`.
    pub inverse: Option<Mat<T>>,
    /// `B = S − S(A+S)⁻¹S`.
    pub b_block: Mat<T>,
    /// `B⁻¹` on `range S` (zero outside), when `invertible`.
    pub b_inverse: Option<Mat<T>>,
    /// `(A+S)⁻¹`.
    pub a_plus_s_inverse: Mat<T>,
    pub invertible: bool,
}

/// Invert `A` through `B = S − S(A+S)⁻¹S`:
/// `A⁻¹ = (A+S)⁻¹ + (A+S)⁻¹ S B⁻¹ S (A+S)⁻¹`.
pub fn jensen_nenciu_invert<T: Field>(a: &Mat<T>, s: &Mat<T>) -> Result<ProjectedInverse<T>> {
    if !a.is_square() || a.rows() != s.rows() || !s.is_square() {
        return Err(Error::Input("shape mismatch".into()));
    }
    let aps = (a + s)
        .inverse()
        .map_err(|_| Error::Precondition("A + S is singular".into()))?;
    let b = s - &(s * &aps * s);
    let q = &Mat::identity(a.rows()) - s;
    let b_full = &b + &q;
    let lu = b_full.lu();
    if lu.singular {
        return Ok(ProjectedInverse {
            inverse: None,
            b_block: b,
            b_inverse: None,
            a_plus_s_inverse: aps,
            invertible: false,
        });
    }
    let binv = s * &lu.solve(&Mat::identity(a.rows())) * s;
    let inverse = &aps + &(&aps * s * &binv * s * &aps);
    Ok(ProjectedInverse {
        inverse: Some(inverse),
        b_block: b,
        b_inverse: Some(binv),
        a_plus_s_inverse: aps,
        invertible: true,
    })
}

/// Block inverse from `a22⁻¹` and the Schur complement `d = (a11 − a12 a22⁻¹ a21)⁻¹`.
pub fn feshbach_invert<T: Field>(a11: &Mat<T>, a12: &Mat<T>, a21: &Mat<T>, a22: &Mat<T>) -> Result<Mat<T>> {
    let (n1, n2) = (a11.rows(), a22.rows());
    if a12.rows() != n1 || a12.cols() != n2 || a21.rows() != n2 || a21.cols() != n1 {
        return Err(Error::Input("block shapes do not conform".into()));
    }
    let a22i = a22
        .inverse()
        .map_err(|_| Error::Precondition("a22 is singular".into()))?;
    let schur = a11 - &(a12 * &a22i * a21);
    let d = schur
        .inverse()
        .map_err(|_| Error::Precondition("Schur complement is singular".into()))?;
    let top_right = -(&(&d * a12) * &a22i);
    let bottom_left = -(&(&a22i * a21) * &d);
    let bottom_right = &a22i + &(&(&(&a22i * a21) * &d) * &(a12 * &a22i));
    let n = n1 + n2;
    Ok(Mat::from_fn(n, n, |i, j| match (i < n1, j < n1) {
        (true, true) => d[(i, j)],
        (true, false) => top_right[(i, j - n1)],
        (false, true) => bottom_left[(i - n1, j)],
        (false, false) => bottom_right[(i - n1, j - n1)],
    }))
}

/// Split a square matrix into blocks at `k`.
pub fn split_blocks<T: Field>(m: &Mat<T>, k: usize) -> (Mat<T>, Mat<T>, Mat<T>, Mat<T>) {
    let n = m.rows();
    (
        Mat::from_fn(k, k, |i, j| m[(i, j)]),
        Mat::from_fn(k, n - k, |i, j| m[(i, j + k)]),
        Mat::from_fn(n - k, k, |i, j| m[(i + k, j)]),
        Mat::from_fn(n - k, n - k, |i, j| m[(i + k, j + k)]),
    )
}

/// Kernel of a symmetric compression, with the eigenvalues that decided it.
#[derive(Clone, Debug)]
pub struct KernelSplit<R: Real> {
    pub projection: Mat<R>,
    pub basis: Vec<Vec<R>>,
    /// Eigenvalues of the compression on `range V`, ascending by magnitude.
    pub spectrum: Vec<R>,
    /// Reference magnitude used for the relative test.
    pub scale: R,
}

impl<R: Real> KernelSplit<R> {
    /// Whether any relative eigenvalue lies within a factor 10 of the cutoff `tol`.
    pub fn borderline(&self, tol: f64) -> bool {
        self.spectrum.iter().any(|&mu| {
            let r = (mu.abs() / self.scale).to_f64();
            r >= tol / 10.0 && r <= tol * 10.0
        })
    }
}

/// Orthogonal projection onto the near-kernel of `V M V` inside `range V`.
pub fn kernel_projection<R: Real>(m: &Mat<R>, v: &Mat<R>, tol: f64) -> Mat<R> {
    kernel_split(m, v, tol).projection
}

pub fn kernel_split<R: Real>(m: &Mat<R>, v: &Mat<R>, tol: f64) -> KernelSplit<R> {
    kernel_split_ref(m, v, tol, None)
}

/// As [`kernel_split`], measuring eigenvalues against `max(reference, largest |eigenvalue|)`.
pub fn kernel_split_ref<R: Real>(m: &Mat<R>, v: &Mat<R>, tol: f64, reference: Option<R>) -> KernelSplit<R> {
    let n = m.rows();
    let q = range_basis(v);
    let k = q.len();
    if k == 0 {
        return KernelSplit { projection: Mat::zeros(n, n), basis: vec![], spectrum: vec![], scale: R::one() };
    }
    let qm = Mat::from_fn(n, k, |i, j| q[j][i]);
    let c = &(&qm.transpose() * m) * &qm;
    let e = sym_eigen(&c);
    let mut scale = e.values.iter().fold(R::zero(), |a, &x| if x.abs() > a { x.abs() } else { a });
    if let Some(r) = reference {
        if r > scale {
            scale = r;
        }
    }
    if scale == R::zero() {
        scale = R::one();
    }
    let cut = R::from_f64(tol) * scale;
    let mut basis = Vec::new();
    for j in 0..k {
        if e.values[j].abs() < cut {
            let w = e.vectors.col(j);
            basis.push(qm.mul_vec(&w));
        }
    }
    let mut spectrum = e.values.clone();
    spectrum.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap_or(std::cmp::Ordering::Equal));
    KernelSplit { projection: projector(n, &basis), basis, spectrum, scale }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn jn_with_zero_projection_is_plain_inverse() {
        let a = Mat::from_rows(&[vec![c(2.0, 1.0), c(0.5, 0.0)], vec![c(0.5, 0.0), c(1.0, -1.0)]]);
        let r = jensen_nenciu_invert(&a, &Mat::zeros(2, 2)).unwrap();
        assert!(r.invertible);
        assert!(a.inverse_residual(r.inverse.as_ref().unwrap()) < 1e-12);
    }

    #[test]
    fn jn_reports_singular_block() {
        let a = Mat::diag(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let s = Mat::diag(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let r = jensen_nenciu_invert(&a, &s).unwrap();
        assert!(!r.invertible);
        assert!(r.b_block.max_abs() < 1e-15);
    }

    #[test]
    fn feshbach_block_diagonal() {
        let a11 = Mat::diag(&[2.0]);
        let a22 = Mat::diag(&[4.0]);
        let z = Mat::zeros(1, 1);
        let inv = feshbach_invert(&a11, &z, &z, &a22).unwrap();
        assert!((inv[(0, 0)] - 0.5).abs() < 1e-15 && (inv[(1, 1)] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn kernel_projection_trivial_cases() {
        let v = Mat::<f64>::identity(3);
        let p = kernel_projection(&Mat::zeros(3, 3), &v, 1e-8);
        assert!((&p - &v).max_abs() < 1e-15);
        let p = kernel_projection(&Mat::diag(&[1.0, 2.0, 3.0]), &v, 1e-8);
        assert!(p.max_abs() < 1e-15);
    }
}
