//! The singular operator `K`, by its spectral form and by its principal-value form.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::specfun::green_real_fast;
use crate::waveop::field::{PolarGrid, SampledField};
use crate::waveop::testfn::TestFunction;

/// Kernel constant of the principal-value form: `Ku(x) = c lim ∫ u(y)dy/(|x|² − |y|² + iε)`.
pub const PV_CONSTANT: f64 = -1.0 / (2.0 * PI * PI * PI);

/// Default excision sequence, relative to `|x|²`.
pub const EXCISION: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// `Ku(x)` at `|x| = s` by the λ-integral `(1/π²)∫𝒢_λ(x) λ ∫_{S¹}û(λω)dω dλ`.
pub fn k_apply_at(u: &TestFunction, s: f64) -> Complex64 {
    let gl = GaussLegendre::new(16);
    let panels = 2 + ((u.r1 - u.r0) * s / PI).ceil() as usize;
    gl.composite(u.r0, u.r1, panels, |l| green_real_fast(l * s) * u.angular_integral(l) * l) / (PI * PI)
}

/// `Ku` on a polar grid; the result is radial.
pub fn k_apply(u: &TestFunction, grid: &Arc<PolarGrid>) -> SampledField {
    let per: Vec<Complex64> = grid.radii.par_iter().map(|&s| k_apply_at(u, s)).collect();
    let na = grid.angles.len();
    let values = per.iter().flat_map(|v| std::iter::repeat(*v).take(na)).collect();
    SampledField::new(grid.clone(), values, "K u")
}

#[derive(Clone, Debug, PartialEq)]
pub struct PvEvaluation {
    /// Absolute excision parameters.
    pub eps: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Extrapolated to `ε = 0`.
    pub limit: Complex64,
    /// Change over the last two excision steps.
    pub increment: f64,
}

/// `Ku(x)` at `|x| = s` from `c ∫ u(y)dy/(|x|² − |y|² + iε)` along a decreasing `ε` sequence.
pub fn k_apply_pv(u: &TestFunction, s: f64, rel_eps: &[f64]) -> Result<PvEvaluation> {
    if !(s > 0.0) || rel_eps.is_empty() {
        return Err(Error::Input(format!("principal-value evaluation needs |x| > 0 and excisions (|x| = {s})")));
    }
    let c0 = u.mode(0);
    // angular integral of u on the circle of radius ρ
    let v = |rho: f64| u.hankel_mode(0, rho) * c0 * (2.0 * PI);
    let gl = GaussLegendre::new(16);
    let a = s * s;
    let h = (PI / u.r1).min(0.25 * s);
    let vmax = (0..64).map(|k| v(s * 4.0 * k as f64 / 64.0).norm()).fold(0.0, f64::max);
    // outer radius: |V| negligible on a full period
    let mut r_max = 4.0 * s + 40.0 / (u.r1 - u.r0);
    loop {
        let tail = (0..8).map(|k| v(r_max + k as f64 * h).norm()).fold(0.0, f64::max);
        if tail <= 1e-12 * vmax.max(f64::MIN_POSITIVE) {
            break;
        }
        r_max *= 1.5;
        if r_max > 1e5 * (s + 1.0 / u.r0) {
            return Err(Error::Resolution("spatial profile does not decay within the principal-value window".into()));
        }
    }
    let n_panels = (r_max / h).ceil() as usize;
    let h = r_max / n_panels as f64;
    // panels [k h, (k+1) h]; those meeting the window around s are graded per ε
    let win = ((s / h).floor() as usize).saturating_sub(1)..(((s / h).floor() as usize) + 2).min(n_panels);
    let (w_lo, w_hi) = (win.start as f64 * h, win.end as f64 * h);
    let vs = v(s);
    let fixed: Vec<(f64, f64, Complex64)> = (0..n_panels)
        .filter(|k| !win.contains(k))
        .collect::<Vec<_>>()
        .par_iter()
        .flat_map_iter(|&k| {
            let lo = k as f64 * h;
            gl.mapped(lo, lo + h).map(|(r, w)| (r, w, v(r))).collect::<Vec<_>>()
        })
        .collect();
    let mut eps_abs = Vec::new();
    let mut values = Vec::new();
    for &re in rel_eps {
        let e = re * a;
        let mut cuts = vec![w_lo, s, w_hi];
        let mut d = 0.1 * e;
        while d < a - w_lo * w_lo || d < w_hi * w_hi - a {
            if a - d > w_lo * w_lo {
                cuts.push((a - d).sqrt());
            }
            if a + d < w_hi * w_hi {
                cuts.push((a + d).sqrt());
            }
            d *= 4.0;
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let kernel = |r: f64| Complex64::new(r, 0.0) / Complex64::new(a - r * r, e);
        let mut sum: Complex64 = fixed.iter().map(|(r, w, vr)| (vr - vs) * kernel(*r) * *w).sum();
        let pieces: Vec<Complex64> = cuts
            .windows(2)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|c| gl.integrate(c[0], c[1], |r| (v(r) - vs) * kernel(r)))
            .collect();
        sum += pieces.iter().sum::<Complex64>();
        let analytic = (Complex64::new(a, e).ln() - Complex64::new(a - r_max * r_max, e).ln()) * 0.5;
        values.push((sum + vs * analytic) * PV_CONSTANT);
        eps_abs.push(e);
    }
    let n = values.len();
    let (limit, increment) = if n > 1 {
        // the excision error is linear in ε
        let (v1, v0) = (values[n - 1], values[n - 2]);
        let (e1, e0) = (eps_abs[n - 1], eps_abs[n - 2]);
        (v1 - (v1 - v0) * (e1 / (e1 - e0)), (v1 - v0).norm())
    } else {
        (values[0], f64::INFINITY)
    };
    Ok(PvEvaluation { eps: eps_abs, values, limit, increment })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dilation_covariance() {
        let u = TestFunction::radial_bump(0.5, 1.5).unwrap();
        for t in [0.25, 2.0] {
            let ut = u.dilate(t);
            for s in [0.3, 1.0, 2.7] {
                let lhs = k_apply_at(&ut, s);
                let rhs = k_apply_at(&u, t * s);
                assert!((lhs - rhs).norm() < 1e-10 * rhs.norm(), "t={t} s={s}");
            }
        }
    }
}
