//! Free Green kernel of the planar Helmholtz operator and its logarithmic prefactor.
//!
//! Conventions: `𝒢_z(x) = (i/4) H0⁽¹⁾(z|x|)`, `g(z) = -(1/2π) log(z/2) + i/4 - γ/(2π)`,
//! `N0(x) = -(1/2π) log|x|`. The power-log series of `(i/4)H0⁽¹⁾` starts with `g`, so
//! `𝒢_z(x) - g(z) - N0(x) → 0` as `z → 0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;
use crate::scalar::{Cx, Real};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Radius below which the series is used.
pub const CROSSOVER: f64 = 1.5;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Replace a signed zero imaginary part by `+0.0` so that `log` of a negative real
/// lands on the upper side of the cut.
#[inline]
fn upper(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        Complex64::new(z.re, 0.0)
    } else {
        z
    }
}

fn check_upper(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Domain("z = 0".into()));
    }
    if z.im < 0.0 {
        return Err(Error::Domain(format!("Im z < 0 (z = {z})")));
    }
    Ok(upper(z))
}

/// `(i/4)H0⁽¹⁾(z)` from the power-log series. Any `z ≠ 0` off the negative imaginary axis.
pub fn quarter_i_h0_series(z: Complex64) -> Complex64 {
    let z = upper(z);
    let w = z * z / 4.0;
    let mut term = Complex64::new(1.0, 0.0);
    let mut j0 = term;
    let mut harm = 0.0;
    let mut tail = Complex64::new(0.0, 0.0);
    let mut k = 0usize;
    loop {
        k += 1;
        let kf = k as f64;
        term = -term * w / (kf * kf);
        harm += 1.0 / kf;
        j0 += term;
        // (-1)^{k+1} H_k w^k/(k!)^2 = -H_k * term
        let t2 = -term * harm;
        tail += t2;
        let small = term.norm() <= 1e-16 * j0.norm() && t2.norm() <= 1e-16 * tail.norm();
        if (small && k > 2) || k > 400 {
            break;
        }
    }
    g_unchecked(z) * j0 - tail / (2.0 * PI)
}

/// `(i/4)H0⁽¹⁾(z)` from the integral `e^{iz}/(2^{3/2}π) ∫_0^∞ 2 e^{-s²} (s²/2 - iz)^{-1/2} ds`.
pub fn quarter_i_h0_integral(z: Complex64) -> Complex64 {
    let z = upper(z);
    let f = |s: f64| {
        let w = Complex64::new(0.5 * s * s, 0.0) - I * z;
        w.sqrt().inv() * (2.0 * (-s * s).exp())
    };
    let (v, _) = quad::adaptive(f, 0.0, 6.5, 1e-300, 1e-14, 400);
    (I * z).exp() * v / (2f64.powf(1.5) * PI)
}

/// Hankel function of the first kind, order zero.
pub fn hankel0_first(z: Complex64) -> Result<Complex64> {
    let z = check_upper(z)?;
    Ok(quarter_i_h0(z) * (-4.0 * I))
}

fn quarter_i_h0(z: Complex64) -> Complex64 {
    if z.norm() < CROSSOVER {
        quarter_i_h0_series(z)
    } else {
        quarter_i_h0_integral(z)
    }
}

fn g_unchecked(z: Complex64) -> Complex64 {
    -(upper(z) / 2.0).ln() / (2.0 * PI) + Complex64::new(-EULER_GAMMA / (2.0 * PI), 0.25)
}

/// `g(z) = -(1/2π) log(z/2) + i/4 - γ/(2π)`, principal branch.
pub fn g_factor(z: Complex64) -> Result<Complex64> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Domain("g(0) is undefined".into()));
    }
    Ok(g_unchecked(z))
}

/// `-(1/2π) log|x|`.
pub fn newton_potential(x: [f64; 2]) -> Result<f64> {
    let r = x[0].hypot(x[1]);
    if r == 0.0 {
        return Err(Error::Domain("Newton potential at the origin".into()));
    }
    Ok(-r.ln() / (2.0 * PI))
}

/// `𝒢_z(x) = (i/4)H0⁽¹⁾(z|x|)`.
pub fn green_kernel(z: Complex64, x: [f64; 2]) -> Result<Complex64> {
    let z = check_upper(z)?;
    let r = x[0].hypot(x[1]);
    if r == 0.0 {
        return Err(Error::Domain("Green kernel at x = 0".into()));
    }
    Ok(quarter_i_h0(z * r))
}

/// Green kernel as a function of `t = z|x|`, for any `t` with `Im t ≥ 0` (including `t < 0`,
/// which gives the `𝒢_{-λ}` branch).
pub fn green_radial(t: Complex64) -> Complex64 {
    quarter_i_h0(upper(t))
}

/// Fast `(i/4)H0⁽¹⁾(t)` for real `t > 0`.
pub fn green_real_fast(t: f64) -> Complex64 {
    if t < CROSSOVER {
        quarter_i_h0_series(Complex64::new(t, 0.0))
    } else {
        Complex64::new(-0.25 * puruspe::Yn(0, t), 0.25 * puruspe::Jn(0, t))
    }
}

/// Small-`z` expansion of `𝒢_z(x)`: order 0 is `g(z) + N0(x)`, order 1 adds the `z²` terms.
pub fn green_kernel_expansion(z: Complex64, x: [f64; 2], order: u8) -> Result<Complex64> {
    let z = check_upper(z)?;
    let r = x[0].hypot(x[1]);
    let n0 = newton_potential(x)?;
    if z.norm() * r >= 1.0 {
        return Err(Error::Accuracy(format!("|z||x| = {} ≥ 1", z.norm() * r)));
    }
    let lead = g_unchecked(z) + n0;
    match order {
        0 => Ok(lead),
        1 => {
            let t2 = z * z * r * r / 4.0;
            Ok(lead - t2 * (lead + 1.0 / (2.0 * PI)))
        }
        _ => Err(Error::Input(format!("expansion order {order} not in {{0, 1}}"))),
    }
}

/// `g(λ)` for real `λ > 0` in generic precision.
pub fn g_real<R: Real>(lam: R) -> Cx<R> {
    let two_pi = R::pi() + R::pi();
    let re = -((lam / R::from_f64(2.0)).ln() + R::euler_gamma()) / two_pi;
    Cx::new(re, R::from_f64(0.25))
}

/// `(i/4)H0⁽¹⁾(t)` for real `t > 0` in generic precision, by the series.
///
/// Intended for `t ≲ 2`; cancellation grows like `e^t`.
pub fn green_real<R: Real>(t: R) -> Cx<R> {
    let two_pi = R::pi() + R::pi();
    let w = t * t / R::from_f64(4.0);
    let mut term = R::one();
    let mut j0 = R::one();
    let mut harm = R::zero();
    let mut tail = R::zero();
    let tol = R::from_f64(R::eps() * 0.1);
    let mut k = 0usize;
    loop {
        k += 1;
        let kf = R::from_f64(k as f64);
        term = -(term * w) / (kf * kf);
        harm += R::one() / kf;
        j0 += term;
        let t2 = -(term * harm);
        tail += t2;
        if (term.abs() <= tol * j0.abs() && t2.abs() <= tol * tail.abs() && k > 2) || k > 400 {
            break;
        }
    }
    let g = g_real(t);
    Cx::new(g.re * j0 - tail / two_pi, g.im * j0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn hankel_reference_values() {
        let h = hankel0_first(Complex64::new(1.0, 0.0)).unwrap();
        assert!((h - Complex64::new(0.7651976866, 0.0882569642)).norm() < 1e-9);
        let h = hankel0_first(I).unwrap();
        assert!((h - Complex64::new(0.0, -0.268032482033989)).norm() < 1e-13);
        assert!(h.re.abs() < 1e-14);
    }

    #[test]
    fn series_and_integral_agree_on_overlap() {
        for k in 0..12 {
            let th = PI * k as f64 / 11.0;
            for &r in &[0.5, 1.0, 1.5, 2.0] {
                let z = Complex64::from_polar(r, th);
                let a = quarter_i_h0_series(z);
                let b = quarter_i_h0_integral(z);
                assert!(rel(a, b) < 1e-12, "z={z} {a} {b}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(hankel0_first(Complex64::new(0.0, 0.0)).is_err());
        assert!(hankel0_first(Complex64::new(1.0, -0.1)).is_err());
        assert!(g_factor(Complex64::new(0.0, 0.0)).is_err());
        assert!(newton_potential([0.0, 0.0]).is_err());
    }

    #[test]
    fn g_factor_values() {
        let g = g_factor(Complex64::new(2.0, 0.0)).unwrap();
        assert!((g - Complex64::new(-EULER_GAMMA / (2.0 * PI), 0.25)).norm() < 1e-15);
        let g = g_factor(I).unwrap();
        assert!((g.re - (2f64.ln() - EULER_GAMMA) / (2.0 * PI)).abs() < 1e-15);
        assert!(g.im.abs() < 1e-15);
        let g = g_factor(I * 2.0 * (-EULER_GAMMA).exp()).unwrap();
        assert!(g.norm() < 1e-15);
    }

    #[test]
    fn negative_real_argument_uses_upper_branch() {
        let a = green_radial(Complex64::new(-0.7, -0.0));
        let b = green_radial(Complex64::new(-0.7, 1e-300));
        assert!(rel(a, b) < 1e-14);
        // 𝒢_λ - 𝒢_{-λ} = (i/2) J0(λ)
        let d = green_radial(Complex64::new(0.7, 0.0)) - a;
        assert!((d - I * 0.5 * puruspe::Jn(0, 0.7)).norm() < 1e-14);
        let d = green_radial(Complex64::new(3.2, 0.0)) - green_radial(Complex64::new(-3.2, 0.0));
        assert!((d - I * 0.5 * puruspe::Jn(0, 3.2)).norm() < 1e-12);
    }

    #[test]
    fn fast_real_path_matches() {
        for &t in &[0.1, 1.0, 1.49, 1.51, 3.0, 17.5, 250.0] {
            let a = green_real_fast(t);
            let b = green_radial(Complex64::new(t, 0.0));
            assert!(rel(a, b) < 1e-11, "t={t}");
        }
    }

    #[test]
    fn generic_series_matches_f64() {
        use crate::dd::Dd;
        for &t in &[1e-6, 0.3, 1.2] {
            let a = green_real(Dd::new(t));
            let b = quarter_i_h0_series(Complex64::new(t, 0.0));
            assert!((a.re.to_f64() - b.re).abs() < 1e-15 * b.norm());
            assert!((a.im.to_f64() - b.im).abs() < 1e-15 * b.norm());
        }
    }
}
