//! Test functions with Fourier transform `ρ(|ξ|) m(|ξ|) Σ_m c_m e^{imφ}` on an annulus.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::waveop::field::{PolarGrid, SampledField};

pub type Radial = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

const PANEL_NODES: usize = 16;

#[derive(Clone)]
pub struct TestFunction {
    pub r0: f64,
    pub r1: f64,
    pub amplitude: f64,
    /// Profile `(4t(1−t))^grade` on the annulus, `t = (r − r0)/(r1 − r0)`.
    pub grade: u32,
    pub modes: Vec<(i32, Complex64)>,
    factors: Vec<Radial>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("r0", &self.r0)
            .field("r1", &self.r1)
            .field("amplitude", &self.amplitude)
            .field("grade", &self.grade)
            .field("modes", &self.modes)
            .field("factors", &self.factors.len())
            .finish()
    }
}

/// `J_m(x)` for any integer order.
pub fn bessel_j(m: i32, x: f64) -> f64 {
    let v = puruspe::Jn(m.unsigned_abs(), x);
    if m < 0 && m % 2 != 0 {
        -v
    } else {
        v
    }
}

/// `J_m(s)` minus its linear term (nonzero only for `|m| = 1`).
pub fn bessel_j_reduced(m: i32, s: f64) -> f64 {
    if m.abs() != 1 {
        return bessel_j(m, s);
    }
    let r = if s < 0.5 {
        // Σ_{k≥1} (−1)^k (s/2)^{2k+1} / (k!(k+1)!)
        let h = 0.5 * s;
        let mut term = h;
        let mut sum = 0.0;
        for k in 1..12 {
            term *= -h * h / (k as f64 * (k + 1) as f64);
            sum += term;
        }
        sum
    } else {
        puruspe::Jn(1, s) - 0.5 * s
    };
    if m < 0 {
        -r
    } else {
        r
    }
}

fn i_pow(m: i32) -> Complex64 {
    match m.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl TestFunction {
    pub fn new(r0: f64, r1: f64, modes: Vec<(i32, Complex64)>) -> Result<Self> {
        if !(r0 > 0.0 && r1 > r0 && r1.is_finite()) {
            return Err(Error::Precondition(format!("Fourier support [{r0}, {r1}] is not an annulus away from 0")));
        }
        if modes.is_empty() {
            return Err(Error::Input("test function needs at least one angular mode".into()));
        }
        Ok(TestFunction { r0, r1, amplitude: 1.0, grade: 8, modes, factors: Vec::new() })
    }

    /// Radial (mode-0) test function.
    pub fn radial_bump(r0: f64, r1: f64) -> Result<Self> {
        Self::new(r0, r1, vec![(0, Complex64::new(1.0, 0.0))])
    }

    pub fn with_grade(mut self, grade: u32) -> Self {
        self.grade = grade;
        self
    }

    pub fn profile(&self, r: f64) -> f64 {
        if r <= self.r0 || r >= self.r1 {
            return 0.0;
        }
        let t = (r - self.r0) / (self.r1 - self.r0);
        self.amplitude * (4.0 * t * (1.0 - t)).powi(self.grade as i32)
    }

    /// Product of the attached multipliers at `r`.
    pub fn multiplier(&self, r: f64) -> Complex64 {
        self.factors.iter().fold(Complex64::new(1.0, 0.0), |s, f| s * f(r))
    }

    fn radial_part(&self, r: f64) -> Complex64 {
        self.multiplier(r) * self.profile(r)
    }

    pub fn mode(&self, m: i32) -> Complex64 {
        self.modes.iter().filter(|(k, _)| *k == m).map(|(_, c)| *c).sum()
    }

    /// `û(ξ)`.
    pub fn fourier(&self, xi: [f64; 2]) -> Complex64 {
        let r = xi[0].hypot(xi[1]);
        let phi = xi[1].atan2(xi[0]);
        let ang: Complex64 = self.modes.iter().map(|(m, c)| c * Complex64::from_polar(1.0, *m as f64 * phi)).sum();
        self.radial_part(r) * ang
    }

    /// `∫_{S¹} û(λω) dω`.
    pub fn angular_integral(&self, lam: f64) -> Complex64 {
        self.radial_part(lam) * self.mode(0) * (2.0 * PI)
    }

    /// `∫_{S¹} e^{iλ⟨y,ω⟩} û(λω) dω`.
    pub fn translated_angular_integral(&self, lam: f64, y: [f64; 2]) -> Complex64 {
        let s = lam * y[0].hypot(y[1]);
        let th = y[1].atan2(y[0]);
        let sum: Complex64 = self
            .modes
            .iter()
            .map(|(m, c)| c * i_pow(*m) * bessel_j(*m, s) * Complex64::from_polar(1.0, *m as f64 * th))
            .sum();
        self.radial_part(lam) * sum * (2.0 * PI)
    }

    /// `Î(λ, y) − iλ⟨y, ∫ω û(λω)dω⟩`, with the linear term removed before evaluation.
    pub fn translated_angular_integral_reduced(&self, lam: f64, y: [f64; 2]) -> Complex64 {
        let s = lam * y[0].hypot(y[1]);
        let th = y[1].atan2(y[0]);
        let sum: Complex64 = self
            .modes
            .iter()
            .map(|(m, c)| c * i_pow(*m) * bessel_j_reduced(*m, s) * Complex64::from_polar(1.0, *m as f64 * th))
            .sum();
        self.radial_part(lam) * sum * (2.0 * PI)
    }

    /// `∫_{S¹} ω û(λω) dω`.
    pub fn angular_first_moment(&self, lam: f64) -> [Complex64; 2] {
        let (cp, cm) = (self.mode(1), self.mode(-1));
        let rp = self.radial_part(lam) * PI;
        [rp * (cp + cm), rp * Complex64::new(0.0, 1.0) * (cp - cm)]
    }

    /// `u_t(y) = u(ty)`.
    pub fn dilate(&self, t: f64) -> Self {
        let mut out = self.clone();
        out.r0 *= t;
        out.r1 *= t;
        out.amplitude /= t * t;
        out.factors = self
            .factors
            .iter()
            .map(|f| {
                let f = f.clone();
                Arc::new(move |r: f64| f(r / t)) as Radial
            })
            .collect();
        out
    }

    /// `m(|D|)u`.
    pub fn multiplied(&self, m: Radial) -> Self {
        let mut out = self.clone();
        out.factors.push(m);
        out
    }

    /// Riesz transform `R_l = ξ_l/|ξ|`, `l ∈ {1, 2}`.
    pub fn riesz(&self, l: usize) -> Self {
        let half = Complex64::new(0.5, 0.0);
        let (up, down) = match l {
            1 => (half, half),
            _ => (Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.5)),
        };
        let mut modes: Vec<(i32, Complex64)> = Vec::new();
        for (m, c) in &self.modes {
            for (k, w) in [(m + 1, up), (m - 1, down)] {
                match modes.iter_mut().find(|(j, _)| *j == k) {
                    Some(e) => e.1 += c * w,
                    None => modes.push((k, c * w)),
                }
            }
        }
        modes.sort_by_key(|(m, _)| *m);
        let mut out = self.clone();
        out.modes = modes;
        out
    }

    /// `∫ ρ(r) m(r) J_m(rs) r dr`.
    pub fn hankel_mode(&self, m: i32, s: f64) -> Complex64 {
        let gl = GaussLegendre::new(PANEL_NODES);
        let panels = 2 + ((self.r1 - self.r0) * s / PI).ceil() as usize;
        gl.composite(self.r0, self.r1, panels, |r| self.radial_part(r) * (bessel_j(m, r * s) * r))
    }

    /// `u(x) = (1/2π)∫ e^{ixξ} û(ξ) dξ`.
    pub fn value(&self, x: [f64; 2]) -> Complex64 {
        let s = x[0].hypot(x[1]);
        let th = x[1].atan2(x[0]);
        self.modes
            .iter()
            .map(|(m, c)| c * i_pow(*m) * Complex64::from_polar(1.0, *m as f64 * th) * self.hankel_mode(*m, s))
            .sum()
    }

    pub fn sample(&self, grid: &Arc<PolarGrid>, label: &str) -> SampledField {
        let per_radius: Vec<Vec<Complex64>> = grid
            .radii
            .par_iter()
            .map(|&s| {
                let h: Vec<Complex64> = self.modes.iter().map(|(m, c)| c * i_pow(*m) * self.hankel_mode(*m, s)).collect();
                grid.angles
                    .iter()
                    .map(|&th| {
                        self.modes
                            .iter()
                            .zip(&h)
                            .map(|((m, _), v)| v * Complex64::from_polar(1.0, *m as f64 * th))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        SampledField::new(grid.clone(), per_radius.concat(), label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_annular_support() {
        assert!(matches!(TestFunction::radial_bump(0.0, 1.0), Err(Error::Precondition(_))));
        assert!(TestFunction::radial_bump(1.0, 0.5).is_err());
    }

    #[test]
    fn spatial_value_matches_direct_fourier_integral() {
        let u = TestFunction::new(0.5, 1.5, vec![(1, Complex64::new(1.0, 0.0)), (-2, Complex64::new(0.3, -0.2))]).unwrap();
        let x = [0.7, -1.1];
        // brute-force polar quadrature of (1/2π)∫ e^{ixξ} û(ξ) dξ
        let gl = GaussLegendre::new(40);
        let n_phi = 128;
        let mut s = Complex64::new(0.0, 0.0);
        for (r, w) in gl.mapped(0.5, 1.5) {
            for k in 0..n_phi {
                let phi = 2.0 * PI * k as f64 / n_phi as f64;
                let xi = [r * phi.cos(), r * phi.sin()];
                s += u.fourier(xi) * Complex64::from_polar(1.0, x[0] * xi[0] + x[1] * xi[1]) * (w * r * 2.0 * PI / n_phi as f64);
            }
        }
        s /= 2.0 * PI;
        assert!((s - u.value(x)).norm() < 1e-12 * s.norm().max(1e-3));
    }

    #[test]
    fn reduced_integral_removes_the_linear_term() {
        let u = TestFunction::new(0.5, 1.5, vec![(1, Complex64::new(1.0, 0.0)), (-1, Complex64::new(0.3, 0.4))]).unwrap();
        let (lam, y) = (0.9, [0.4, -0.8]);
        let d = u.angular_first_moment(lam);
        let lin = Complex64::new(0.0, lam) * (d[0] * y[0] + d[1] * y[1]);
        let full = u.translated_angular_integral(lam, y);
        assert!((full - lin - u.translated_angular_integral_reduced(lam, y)).norm() < 1e-14);
        for s in [0.1, 0.49, 0.51] {
            assert!((bessel_j_reduced(1, s) - (puruspe::Jn(1, s) - 0.5 * s)).abs() < 1e-16);
        }
    }

    #[test]
    fn translated_integral_matches_quadrature() {
        let u = TestFunction::new(0.5, 1.5, vec![(1, Complex64::new(1.0, 0.0)), (0, Complex64::new(0.2, 0.1))]).unwrap();
        let (lam, y) = (0.9, [0.4, -0.8]);
        let n = 256;
        let direct: Complex64 = (0..n)
            .map(|k| {
                let phi = 2.0 * PI * k as f64 / n as f64;
                let w = [phi.cos(), phi.sin()];
                Complex64::from_polar(1.0, lam * (y[0] * w[0] + y[1] * w[1])) * u.fourier([lam * w[0], lam * w[1]])
            })
            .sum::<Complex64>()
            * (2.0 * PI / n as f64);
        assert!((direct - u.translated_angular_integral(lam, y)).norm() < 1e-13);
    }
}
