//! Point configurations, the coupling matrix `Γ(z)`, its small-λ structure matrices and the
//! resolvent kernel.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::{Cx, Real};
use crate::specfun;

/// Strengths `α_j` at distinct planar points `y_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointConfiguration {
    pub alpha: Vec<f64>,
    pub points: Vec<[f64; 2]>,
}

impl PointConfiguration {
    pub fn new(alpha: Vec<f64>, points: Vec<[f64; 2]>) -> Result<Self> {
        let c = PointConfiguration { alpha, points };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_empty() {
            return Err(Error::Input("configuration needs at least one point".into()));
        }
        if self.alpha.len() != self.points.len() {
            return Err(Error::Input(format!(
                "{} strengths for {} points",
                self.alpha.len(),
                self.points.len()
            )));
        }
        if self.alpha.iter().chain(self.points.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite entry".into()));
        }
        if self.min_distance() <= 0.0 {
            return Err(Error::Input("points are not pairwise distinct".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn distance(&self, j: usize, k: usize) -> f64 {
        let (a, b) = (self.points[j], self.points[k]);
        (a[0] - b[0]).hypot(a[1] - b[1])
    }

    pub fn min_distance(&self) -> f64 {
        let n = self.len();
        let mut m = f64::INFINITY;
        for j in 0..n {
            for k in j + 1..n {
                m = m.min(self.distance(j, k));
            }
        }
        m
    }

    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut m: f64 = 0.0;
        for j in 0..n {
            for k in j + 1..n {
                m = m.max(self.distance(j, k));
            }
        }
        m
    }

    /// Apply a rigid motion `x ↦ R_θ x + shift`.
    pub fn moved(&self, theta: f64, shift: [f64; 2]) -> Self {
        let (s, c) = theta.sin_cos();
        let points = self
            .points
            .iter()
            .map(|p| [c * p[0] - s * p[1] + shift[0], s * p[0] + c * p[1] + shift[1]])
            .collect();
        PointConfiguration { alpha: self.alpha.clone(), points }
    }

    /// Strengths in extended precision.
    pub fn alpha_dd(&self) -> Vec<Dd> {
        self.alpha.iter().map(|&a| Dd::new(a)).collect()
    }
}

/// `|y_j − y_k|` in the working precision, from exact coordinate differences.
pub fn distance_in<R: Real>(points: &[[f64; 2]], j: usize, k: usize) -> R {
    let dx = R::from_f64(points[j][0]) - R::from_f64(points[k][0]);
    let dy = R::from_f64(points[j][1]) - R::from_f64(points[k][1]);
    (dx * dx + dy * dy).sqrt()
}

/// `D̃`, `Γ₁`, `Γ₂` and the projections `P`, `S`.
#[derive(Clone, Debug)]
pub struct StructureMatrices<R: Real> {
    pub dtilde: Mat<R>,
    pub gamma1: Mat<R>,
    pub gamma2: Mat<R>,
    pub p_proj: Mat<R>,
    pub s_proj: Mat<R>,
}

pub fn build_structure(config: &PointConfiguration) -> StructureMatrices<f64> {
    build_structure_in(&config.alpha, &config.points)
}

pub fn build_structure_in<R: Real>(alpha: &[R], points: &[[f64; 2]]) -> StructureMatrices<R> {
    let n = alpha.len();
    let nf = R::from_f64(n as f64);
    let two_pi = R::pi() + R::pi();
    let mut dt = Mat::zeros(n, n);
    let mut g1 = Mat::zeros(n, n);
    let mut g2 = Mat::zeros(n, n);
    for j in 0..n {
        dt[(j, j)] = alpha[j];
        for k in 0..n {
            if j == k {
                continue;
            }
            let d: R = distance_in(points, j, k);
            let ld = d.ln();
            dt[(j, k)] = ld / two_pi;
            g1[(j, k)] = -(d * d) / (R::from_f64(4.0) * nf);
            g2[(j, k)] = d * d * (ld - R::one()) / (R::from_f64(4.0) * two_pi * nf);
        }
    }
    let e = R::one() / nf;
    let p = Mat::from_fn(n, n, |_, _| e);
    let s = &Mat::identity(n) - &p;
    StructureMatrices { dtilde: dt, gamma1: g1, gamma2: g2, p_proj: p, s_proj: s }
}

/// `Γ(z)_jk = (α_j − g(z))δ_jk − 𝒢_z(y_j − y_k)(1 − δ_jk)`.
pub fn build_gamma(config: &PointConfiguration, z: Complex64) -> Result<Mat<Complex64>> {
    let g = specfun::g_factor(z)?;
    specfun::hankel0_first(z)?;
    let n = config.len();
    let mut m = Mat::zeros(n, n);
    for j in 0..n {
        m[(j, j)] = Complex64::new(config.alpha[j], 0.0) - g;
        for k in 0..j {
            let v = -specfun::green_radial(z * config.distance(j, k));
            m[(j, k)] = v;
            m[(k, j)] = v;
        }
    }
    Ok(m)
}

/// `Γ(λ)` for real `λ > 0` in generic precision.
pub fn gamma_real<R: Real>(alpha: &[R], points: &[[f64; 2]], lam: R) -> Mat<Cx<R>> {
    let n = alpha.len();
    let g = specfun::g_real(lam);
    let mut m = Mat::zeros(n, n);
    for j in 0..n {
        m[(j, j)] = Cx::new(alpha[j] - g.re, -g.im);
        for k in 0..j {
            let d: R = distance_in(points, j, k);
            let t = lam * d;
            let v = if t.to_f64() < 4.0 {
                specfun::green_real(t)
            } else {
                let c = specfun::green_real_fast(t.to_f64());
                Cx::new(R::from_f64(c.re), R::from_f64(c.im))
            };
            m[(j, k)] = -v;
            m[(k, j)] = -v;
        }
    }
    m
}

/// `‖Γ(λ)/(−N g) − (P − g⁻¹D̃/N + λ²Γ₁ + λ²g⁻¹Γ₂)‖`, evaluated in double-double.
pub fn gamma_expansion_residual(config: &PointConfiguration, lam: f64) -> Result<f64> {
    if !(lam > 0.0) {
        return Err(Error::Domain("λ must be positive".into()));
    }
    if lam * config.diameter() >= 0.1 {
        return Err(Error::Accuracy(format!("λ·diam(Y) = {} ≥ 0.1", lam * config.diameter())));
    }
    let alpha = config.alpha_dd();
    let l = Dd::new(lam);
    let st = build_structure_in(&alpha, &config.points);
    let gam = gamma_real(&alpha, &config.points, l);
    let n = Dd::new(config.len() as f64);
    let g = specfun::g_real(l);
    let ginv = Cx::new(Dd::ONE, Dd::ZERO) / g;
    let lhs = gam.scale(-(ginv / n));
    let l2 = Cx::new(l * l, Dd::ZERO);
    let rhs = &(&(&st.p_proj.to_complex() - &st.dtilde.to_complex().scale(ginv / n))
        + &st.gamma1.to_complex().scale(l2))
        + &st.gamma2.to_complex().scale(l2 * ginv);
    Ok((&lhs - &rhs).op_norm().to_f64())
}

/// Whether `det Γ(z)` is below the scale-free exceptional-set threshold.
pub fn is_exceptional(gamma: &Mat<Complex64>) -> (bool, f64) {
    let det = gamma.det().norm();
    let scale: f64 = (0..gamma.rows()).map(|j| 1.0 + gamma[(j, j)].norm()).product();
    (det < 1e-10 * scale, det)
}

/// Resolvent kernel `𝒢_z(x−y) + Σ_jk [Γ(z)⁻¹]_jk 𝒢_z(x−y_j) 𝒢_z(y−y_k)`.
pub fn resolvent_kernel(config: &PointConfiguration, z: Complex64, x: [f64; 2], y: [f64; 2]) -> Result<Complex64> {
    let gam = build_gamma(config, z)?;
    let (exc, det) = is_exceptional(&gam);
    if exc {
        return Err(Error::Exceptional { det });
    }
    let inv = gam.inverse().map_err(|_| Error::Exceptional { det })?;
    resolvent_with_inverse(config, z, &inv, x, y)
}

/// Resolvent kernel given a precomputed `Γ(z)⁻¹`.
pub fn resolvent_with_inverse(
    config: &PointConfiguration,
    z: Complex64,
    inv: &Mat<Complex64>,
    x: [f64; 2],
    y: [f64; 2],
) -> Result<Complex64> {
    let n = config.len();
    for p in &config.points {
        if *p == x || *p == y {
            return Err(Error::Domain("evaluation point coincides with a scatterer".into()));
        }
    }
    let gx: Vec<Complex64> = (0..n)
        .map(|j| specfun::green_kernel(z, [x[0] - config.points[j][0], x[1] - config.points[j][1]]))
        .collect::<Result<_>>()?;
    let gy: Vec<Complex64> = (0..n)
        .map(|j| specfun::green_kernel(z, [y[0] - config.points[j][0], y[1] - config.points[j][1]]))
        .collect::<Result<_>>()?;
    let free = specfun::green_kernel(z, [x[0] - y[0], x[1] - y[1]])?;
    let w = inv.mul_vec(&gy);
    Ok(free + gx.iter().zip(&w).map(|(a, b)| a * b).sum::<Complex64>())
}

/// Green kernel at `x` for real `λ > 0` in generic precision.
pub fn green_at<R: Real>(lam: R, x: [f64; 2], y: [f64; 2]) -> Cx<R> {
    let dx = R::from_f64(x[0]) - R::from_f64(y[0]);
    let dy = R::from_f64(x[1]) - R::from_f64(y[1]);
    let t = lam * (dx * dx + dy * dy).sqrt();
    if t.to_f64() < 4.0 {
        specfun::green_real(t)
    } else {
        let c = specfun::green_real_fast(t.to_f64());
        Cx::new(R::from_f64(c.re), R::from_f64(c.im))
    }
}

/// Resolvent kernel at real `λ > 0` with a given `Γ(λ)⁻¹`, generic precision.
pub fn resolvent_real<R: Real>(points: &[[f64; 2]], lam: R, inv: &Mat<Cx<R>>, x: [f64; 2], y: [f64; 2]) -> Cx<R> {
    let n = points.len();
    let gx: Vec<Cx<R>> = (0..n).map(|j| green_at(lam, x, points[j])).collect();
    let gy: Vec<Cx<R>> = (0..n).map(|j| green_at(lam, y, points[j])).collect();
    let w = inv.mul_vec(&gy);
    let mut s = green_at(lam, x, y);
    for j in 0..n {
        s = s + gx[j] * w[j];
    }
    s
}

/// Newton-potential vector `N̂₀(x)_j = −(1/2π) log|x − y_j|`.
pub fn newton_vector(config: &PointConfiguration, x: [f64; 2]) -> Vec<f64> {
    config
        .points
        .iter()
        .map(|p| -((x[0] - p[0]).hypot(x[1] - p[1])).ln() / (2.0 * PI))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: f64, b: f64) -> PointConfiguration {
        PointConfiguration::new(vec![a, b], vec![[-0.5, 0.0], [0.5, 0.0]]).unwrap()
    }

    #[test]
    fn structure_of_unit_pair() {
        let st = build_structure(&pair(1.0, -1.0));
        assert_eq!(st.dtilde[(0, 0)], 1.0);
        assert_eq!(st.dtilde[(1, 1)], -1.0);
        assert!(st.dtilde[(0, 1)].abs() < 1e-17);
        assert!((st.gamma1[(0, 1)] + 0.125).abs() < 1e-16);
        assert!((st.gamma2[(0, 1)] + 1.0 / (16.0 * PI)).abs() < 1e-16);
        let e = std::f64::consts::E;
        let c = PointConfiguration::new(vec![0.0, 0.0], vec![[0.0, 0.0], [e, 0.0]]).unwrap();
        assert!(build_structure(&c).gamma2.max_abs() < 1e-16);
    }

    #[test]
    fn invalid_configurations() {
        assert!(PointConfiguration::new(vec![], vec![]).is_err());
        assert!(PointConfiguration::new(vec![0.0, 1.0], vec![[0.0, 0.0], [0.0, 0.0]]).is_err());
        assert!(PointConfiguration::new(vec![0.0], vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
    }

    #[test]
    fn gamma_of_pair_at_two() {
        let z = Complex64::new(2.0, 0.0);
        let m = build_gamma(&pair(0.0, 0.0), z).unwrap();
        let g = specfun::g_factor(z).unwrap();
        assert!((m[(0, 0)] + g).norm() < 1e-15);
        let h = specfun::hankel0_first(z).unwrap();
        assert!((m[(0, 1)] + Complex64::new(0.0, 0.25) * h).norm() < 1e-13);
    }

    #[test]
    fn single_point_resolvent_formula() {
        let c = PointConfiguration::new(vec![0.0], vec![[0.0, 0.0]]).unwrap();
        let z = Complex64::new(0.0, 2.0);
        let r = resolvent_kernel(&c, z, [1.0, 0.0], [-1.0, 0.0]).unwrap();
        let gxy = specfun::green_kernel(z, [2.0, 0.0]).unwrap();
        let gx = specfun::green_kernel(z, [1.0, 0.0]).unwrap();
        let want = gxy + gx * gx / (-specfun::g_factor(z).unwrap());
        assert!((r - want).norm() < 1e-14 * want.norm());
    }

    #[test]
    fn real_gamma_matches_complex_builder() {
        let c = PointConfiguration::new(vec![0.3, -0.2, 0.1], vec![[0.0, 0.0], [1.0, 0.2], [-0.4, 0.9]]).unwrap();
        let a = gamma_real(&c.alpha, &c.points, 0.37);
        let b = build_gamma(&c, Complex64::new(0.37, 0.0)).unwrap();
        assert!((&a - &b).max_abs() < 1e-14);
    }
}
