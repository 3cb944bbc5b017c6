//! Radial Fourier multipliers, including the entries of `Γ̃(λ) = Γ(λ)⁻¹`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::operator::{build_gamma, gamma_real, PointConfiguration};
use crate::matrix::Mat;
use crate::scalar::{Cx, Field};
use crate::waveop::field::{PolarGrid, SampledField};
use crate::waveop::testfn::{Radial, TestFunction};

/// Apply `m(|D|)` and sample the result.
pub fn multiplier_apply(m: Radial, u: &TestFunction, grid: &Arc<PolarGrid>) -> Result<SampledField> {
    check_bounded(&m, u)?;
    Ok(u.multiplied(m).sample(grid, "m(|D|) u"))
}

/// Precondition for multipliers: finite on the support of `û`.
pub fn check_bounded(m: &Radial, u: &TestFunction) -> Result<()> {
    for k in 0..=256 {
        let r = u.r0 + (u.r1 - u.r0) * k as f64 / 256.0;
        let v = m(r);
        if !(v.re.is_finite() && v.im.is_finite()) || v.norm() > 1e150 {
            return Err(Error::Precondition(format!("multiplier is singular at |ξ| = {r}")));
        }
    }
    Ok(())
}

/// `Γ̃(λ) = Γ(λ)⁻¹` by direct inversion in double-double.
pub fn gamma_tilde_dd(alpha: &[Dd], points: &[[f64; 2]], lam: f64) -> Result<Mat<Cx<Dd>>> {
    let m = gamma_real(alpha, points, Dd::new(lam));
    let det = m.det().to_c64().norm();
    if det <= 1e-26 * m.max_abs().to_f64().powi(alpha.len() as i32) {
        return Err(Error::Exceptional { det });
    }
    m.inverse()
}

pub fn gamma_tilde(alpha: &[Dd], points: &[[f64; 2]], lam: f64) -> Result<Mat<Complex64>> {
    Ok(gamma_tilde_dd(alpha, points, lam)?.to_c64())
}

/// The multiplier `Γ̃_jk(|ξ|)`, inverted in double precision (for `|ξ|` away from 0).
pub fn gamma_tilde_entry(config: &PointConfiguration, j: usize, k: usize) -> Radial {
    let config = config.clone();
    Arc::new(move |r: f64| match build_gamma(&config, Complex64::new(r, 0.0)).and_then(|m| m.inverse()) {
        Ok(m) => m[(j, k)],
        Err(_) => Complex64::new(f64::INFINITY, 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<PolarGrid> {
        Arc::new(PolarGrid::log_polar(0.05, 20.0, 41, 12).unwrap())
    }

    #[test]
    fn identity_and_composition() {
        let u = TestFunction::new(0.5, 1.5, vec![(1, Complex64::new(1.0, 0.0)), (0, Complex64::new(0.5, 0.0))]).unwrap();
        let g = grid();
        let base = u.sample(&g, "u");
        let one: Radial = Arc::new(|_| Complex64::new(1.0, 0.0));
        assert!(multiplier_apply(one, &u, &g).unwrap().relative_difference(&base) < 1e-14);
        let m1: Radial = Arc::new(|r| Complex64::new(r * r, 0.0));
        let m2: Radial = Arc::new(|r| Complex64::new(1.0, r));
        let both: Radial = Arc::new(|r| Complex64::new(r * r, 0.0) * Complex64::new(1.0, r));
        let lhs = u.multiplied(m2).multiplied(m1).sample(&g, "m1 m2 u");
        let rhs = multiplier_apply(both, &u, &g).unwrap();
        assert!(lhs.relative_difference(&rhs) < 1e-13);
    }

    #[test]
    fn riesz_squares_sum_to_identity() {
        let u = TestFunction::new(0.5, 1.5, vec![(1, Complex64::new(1.0, 0.0)), (-2, Complex64::new(0.0, 0.7))]).unwrap();
        let g = grid();
        let r1 = u.riesz(1).riesz(1).sample(&g, "R1²u");
        let r2 = u.riesz(2).riesz(2).sample(&g, "R2²u");
        let sum = r1.zip(&r2, "sum", |a, b| a + b);
        assert!(sum.relative_difference(&u.sample(&g, "u")) < 1e-8);
    }

    #[test]
    fn singular_multiplier_is_rejected() {
        let u = TestFunction::radial_bump(0.5, 1.5).unwrap();
        let m: Radial = Arc::new(|r| Complex64::new(1.0 / (r - 1.0), 0.0));
        assert!(matches!(multiplier_apply(m, &u, &grid()), Err(Error::Precondition(_))));
    }
}
