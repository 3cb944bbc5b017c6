//! The low-energy part `𝒲_low` of the stationary representation.
//!
//! With `Î_k(λ) = ∫_{S¹} e^{iλ⟨y_k,ω⟩} û(λω) dω` the `y`-integral in the stationary formula
//! equals `(i/2)Î_k(λ)`, so
//! `𝒲_low u(x) = (1/2π) ∫ χ_{≤ε}(λ) λ Σ_jk Γ̃_jk(λ) 𝒢_λ(x − y_j) Î_k(λ) dλ`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::Result;
use crate::operator::PointConfiguration;
use crate::quad::GaussLegendre;
use crate::spectral::threshold_setup;
use crate::specfun::green_real_fast;
use crate::waveop::cutoff::CutoffPair;
use crate::waveop::field::{PolarGrid, SampledField};
use crate::waveop::kop::{k_apply_pv, EXCISION};
use crate::scalar::{Cx, Field};
use crate::waveop::multiplier::{gamma_tilde, gamma_tilde_dd, gamma_tilde_entry};
use crate::waveop::testfn::{bessel_j, TestFunction};

const NODES: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BadPart {
    #[default]
    Keep,
    /// Replace `Î` by `Î − b̂/N`, where `b̂_k = iλ Σ_l ⟨y_k − y_l, ∫ω û(λω)dω⟩`.
    Remove,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LowEnergyField {
    pub field: SampledField,
    pub warnings: Vec<String>,
}

/// Quadrature nodes on the λ-band at one panel count, with the weights folded into `v_j`.
struct Level {
    panels: usize,
    lams: Vec<f64>,
    /// `v[node][j] = w χ_{≤ε}(λ) λ (Γ̃(λ)Î(λ))_j / 2π`
    v: Vec<Vec<Complex64>>,
}

/// `i^m J_m(λ|y|) e^{imθ_y}` in double-double, optionally without the linear term.
///
/// For `λ|y| < 2` this is the power series in `λ(y₁ ± iy₂)`, so cancellations between
/// nearby points survive; larger arguments fall back to double precision.
fn translated_mode(m: i32, lam: f64, y: [f64; 2], drop_linear: bool) -> Cx<Dd> {
    let one = Dd::new(1.0);
    let s = lam * y[0].hypot(y[1]);
    let ipow = [Cx::new(one, Dd::new(0.0)), Cx::new(Dd::new(0.0), one), Cx::new(-one, Dd::new(0.0)), Cx::new(Dd::new(0.0), -one)]
        [m.rem_euclid(4) as usize];
    if s >= 2.0 {
        let z = Complex64::from_polar(bessel_j(m, s), m as f64 * y[1].atan2(y[0]));
        let mut v = Cx::new(Dd::new(z.re), Dd::new(z.im));
        if drop_linear && m.abs() == 1 {
            let sign = Dd::new(m as f64);
            v = v - Cx::new(Dd::new(y[0]), Dd::new(y[1]) * sign) * Dd::new(0.5 * lam);
        }
        return ipow * v;
    }
    let k = m.unsigned_abs() as usize;
    let half = Dd::new(lam) * Dd::new(0.5);
    // (λ/2)^{|m|} (y₁ ± iy₂)^{|m|} (−1)^{m} for m < 0
    let w = Cx::new(Dd::new(y[0]) * half, Dd::new(y[1]) * half * Dd::new(m.signum() as f64 + if m == 0 { 1.0 } else { 0.0 }));
    let mut lead = Cx::new(one, Dd::new(0.0));
    for _ in 0..k {
        lead = lead * w;
    }
    if m < 0 && k % 2 == 1 {
        lead = -lead;
    }
    let q = -(half * half * (Dd::new(y[0]) * Dd::new(y[0]) + Dd::new(y[1]) * Dd::new(y[1])));
    let mut term = (1..=k).fold(one, |f, j| f / Dd::new(j as f64));
    let mut sum = if drop_linear && k == 1 { Dd::new(0.0) } else { term };
    for j in 1..40 {
        term = term * q / Dd::new((j * (j + k)) as f64);
        sum = sum + term;
        if term.to_f64().abs() < 1e-34 * sum.to_f64().abs().max(1e-300) {
            break;
        }
    }
    ipow * lead * sum
}

fn incoming(u: &TestFunction, points: &[[f64; 2]], lam: f64, bad: BadPart) -> Vec<Cx<Dd>> {
    let radial = u.multiplier(lam) * (u.profile(lam) * 2.0 * PI);
    let radial = Cx::new(Dd::new(radial.re), Dd::new(radial.im));
    let drop = bad == BadPart::Remove;
    let mut out: Vec<Cx<Dd>> = points
        .iter()
        .map(|&y| {
            let sum = u.modes.iter().fold(Cx::new(Dd::new(0.0), Dd::new(0.0)), |acc, (m, c)| {
                acc + Cx::new(Dd::new(c.re), Dd::new(c.im)) * translated_mode(*m, lam, y, drop)
            });
            radial * sum
        })
        .collect();
    if drop {
        // Î_k − b̂_k/N = (Î_k − iλ⟨y_k, d⟩) + iλ⟨ȳ, d⟩ with d = ∫ω û(λω)dω
        let n = Dd::new(points.len() as f64);
        let bar = points.iter().fold([Dd::new(0.0), Dd::new(0.0)], |s, y| [s[0] + Dd::new(y[0]), s[1] + Dd::new(y[1])]);
        let d = u.angular_first_moment(lam);
        let d = d.map(|z| Cx::new(Dd::new(z.re), Dd::new(z.im)));
        let common = Cx::new(Dd::new(0.0), Dd::new(lam)) * (d[0] * (bar[0] / n) + d[1] * (bar[1] / n));
        out.iter_mut().for_each(|v| *v = *v + common);
    }
    out
}

fn build_level(
    alpha: &[Dd],
    points: &[[f64; 2]],
    u: &TestFunction,
    cut: &CutoffPair,
    band: (f64, f64),
    panels: usize,
    bad: BadPart,
) -> Result<Level> {
    let gl = GaussLegendre::new(NODES);
    let h = (band.1 - band.0) / panels as f64;
    let nodes: Vec<(f64, f64)> = (0..panels)
        .flat_map(|p| gl.mapped(band.0 + p as f64 * h, band.0 + (p + 1) as f64 * h).collect::<Vec<_>>())
        .collect();
    let v = nodes
        .par_iter()
        .map(|&(lam, w)| {
            let gt = gamma_tilde_dd(alpha, points, lam)?;
            let hat = incoming(u, points, lam, bad);
            let c = w * cut.low(lam) * lam / (2.0 * PI);
            Ok(gt.mul_vec(&hat).into_iter().map(|x| x.to_c64() * c).collect())
        })
        .collect::<Result<Vec<Vec<Complex64>>>>()?;
    Ok(Level { panels, lams: nodes.iter().map(|n| n.0).collect(), v })
}

/// `𝒲_low u` on `grid`.
pub fn low_energy_wave_operator(
    config: &PointConfiguration,
    u: &TestFunction,
    cut: CutoffPair,
    grid: &Arc<PolarGrid>,
    bad: BadPart,
) -> Result<LowEnergyField> {
    config.validate()?;
    let band = (u.r0, u.r1.min(cut.support_end()));
    if band.0 >= band.1 {
        let zero = vec![Complex64::new(0.0, 0.0); grid.len()];
        return Ok(LowEnergyField {
            field: SampledField::new(grid.clone(), zero, "W_low u"),
            warnings: vec![format!("Fourier support of u lies above 2ε = {}", cut.support_end())],
        });
    }
    let (alpha, _, _) = threshold_setup(config)?;
    let points = &config.points;
    let y_max = points.iter().map(|y| y[0].hypot(y[1])).fold(0.0, f64::max);
    let s_max = grid.radii.last().copied().unwrap_or(0.0) + y_max;
    let width = band.1 - band.0;
    let needed = |s: f64| ((width * s / PI).ceil() as usize + 1).next_power_of_two();
    let mut levels = Vec::new();
    let mut p = 1;
    while p <= needed(s_max) {
        levels.push(build_level(&alpha, points, u, &cut, band, p, bad)?);
        p *= 2;
    }
    let values: Vec<Complex64> = grid
        .points()
        .par_iter()
        .map(|x| {
            let mut sum = Complex64::new(0.0, 0.0);
            for (j, y) in points.iter().enumerate() {
                let s = (x[0] - y[0]).hypot(x[1] - y[1]);
                let want = needed(s);
                let lv = levels.iter().find(|l| l.panels >= want).unwrap_or(levels.last().unwrap());
                for (lam, v) in lv.lams.iter().zip(&lv.v) {
                    sum += v[j] * green_real_fast(lam * s);
                }
            }
            sum
        })
        .collect();
    Ok(LowEnergyField { field: SampledField::new(grid.clone(), values, "W_low u"), warnings: Vec::new() })
}

/// `𝒲_jk u(x)` from the stationary formula (no cutoff, no translations).
pub fn wave_piece(config: &PointConfiguration, u: &TestFunction, j: usize, k: usize, s: f64) -> Result<Complex64> {
    let alpha = config.alpha_dd();
    let gl = GaussLegendre::new(NODES);
    let panels = 2 + ((u.r1 - u.r0) * s / PI).ceil() as usize;
    let h = (u.r1 - u.r0) / panels as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        for (lam, w) in gl.mapped(u.r0 + p as f64 * h, u.r0 + (p + 1) as f64 * h) {
            let gt = gamma_tilde(&alpha, &config.points, lam)?;
            sum += gt[(j, k)] * green_real_fast(lam * s) * u.angular_integral(lam) * (w * lam);
        }
    }
    Ok(sum / (2.0 * PI))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductCheck {
    pub radius: f64,
    pub stationary: Complex64,
    pub via_k: Complex64,
    pub relative_difference: f64,
}

/// `𝒲_jk u = (π/2) K(Γ̃_jk(|D|)u)`: the left side by the stationary λ-integral, the right
/// side by the principal-value form of `K` applied to the multiplied test function.
pub fn product_formula_check(
    config: &PointConfiguration,
    u: &TestFunction,
    j: usize,
    k: usize,
    radii: &[f64],
) -> Result<Vec<ProductCheck>> {
    let m = u.multiplied(gamma_tilde_entry(config, j, k));
    radii
        .iter()
        .map(|&s| {
            let stationary = wave_piece(config, u, j, k, s)?;
            let via_k = k_apply_pv(&m, s, &EXCISION)?.limit * (PI / 2.0);
            Ok(ProductCheck { radius: s, stationary, via_k, relative_difference: (stationary - via_k).norm() / stationary.norm() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_matches_double_precision_integral() {
        let u = TestFunction::new(0.5, 1.5, vec![(1, Complex64::new(1.0, 0.2)), (-2, Complex64::new(0.3, -0.1)), (0, Complex64::new(0.4, 0.0))])
            .unwrap();
        for (lam, y) in [(0.9, [0.4, -0.8]), (1.2, [-1.1, 0.3]), (0.7, [2.5, 1.0])] {
            let want = u.translated_angular_integral(lam, y);
            let got = incoming(&u, &[y], lam, BadPart::Keep)[0].to_c64();
            assert!((want - got).norm() < 1e-14, "{want} {got}");
            // b̂ vanishes when all points coincide
            let got = incoming(&u, &[y, y], lam, BadPart::Remove)[0].to_c64();
            assert!((want - got).norm() < 1e-14, "{want} {got}");
            let y0 = [0.0, 0.0];
            let got = incoming(&u, &[y, y0], lam, BadPart::Remove)[0].to_c64();
            let d = u.angular_first_moment(lam);
            let b = Complex64::new(0.0, lam) * (d[0] * y[0] + d[1] * y[1]) * 0.5;
            assert!((want - b - got).norm() < 1e-14);
        }
    }

    #[test]
    fn support_above_cutoff_gives_zero() {
        let c = crate::classifier::fixtures::single();
        let u = TestFunction::new(0.3, 0.5, vec![(0, Complex64::new(1.0, 0.0))]).unwrap();
        let grid = Arc::new(PolarGrid::log_polar(0.1, 10.0, 11, 4).unwrap());
        let out = low_energy_wave_operator(&c, &u, CutoffPair::new(0.1).unwrap(), &grid, BadPart::Keep).unwrap();
        assert!(out.field.max_abs() == 0.0 && out.warnings.len() == 1);
    }

    #[test]
    fn radial_input_at_origin_gives_radial_output() {
        let c = crate::classifier::fixtures::single();
        let u = TestFunction::radial_bump(0.05, 0.1).unwrap();
        let grid = Arc::new(PolarGrid::log_polar(0.1, 100.0, 21, 8).unwrap());
        let out = low_energy_wave_operator(&c, &u, CutoffPair::new(0.1).unwrap(), &grid, BadPart::Keep).unwrap().field;
        for i in 0..grid.radii.len() {
            for k in 1..8 {
                assert!((out.at(i, k) - out.at(i, 0)).norm() <= 1e-12 * out.max_abs());
            }
        }
    }
}
