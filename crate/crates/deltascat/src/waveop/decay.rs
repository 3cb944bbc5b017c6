//! Pointwise decay of two low-energy Fourier integrals.
//!
//! `F(x) = (1/2π)∫ e^{ipx} χ_{≤ε}(|p|)/(|p|g(|p|)) dp = ∫₀^{2ε} χ(r/ε) J₀(r|x|)/g(r) dr`, and the
//! appendix kernel `(2π)⁻²∫∫ e^{ixξ−ipy} χ_{≤2ε}(ξ)χ_{≤ε}(p)/(|ξ|+|p|) = ∫₀^∞ P_{2ε}(|x|,t)P_ε(|y|,t) dt`
//! with `P_c(X,t) = ∫ e^{−tr} χ(r/c) J₀(rX) r dr`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit;
use crate::quad::{adaptive, GaussLegendre};
use crate::specfun::g_real;
use crate::waveop::cutoff::chi;
use crate::waveop::testfn::bessel_j;

/// Agreement required between the two radial quadratures, relative to `|F(0)|`.
pub const ROUTE_TOL: f64 = 1e-9;

/// Quadrature nodes on `[0, upper]`: geometric toward 0 over `decades`, panels of `π/X` for
/// oscillation, and extra panels on the cutoff transition `[upper/2, upper]`.
fn radial_nodes(upper: f64, x: f64, decades: f64, order: usize, refine: usize) -> Vec<(f64, f64)> {
    let mut cuts = vec![0.0, upper];
    cuts.extend((0..16).map(|k| 0.5 * upper * (1.0 + k as f64 / 16.0)));
    let floor = upper * 10f64.powf(-decades);
    let mut r = upper;
    while r > floor {
        r /= 1.5;
        cuts.push(r);
    }
    if x > 0.0 {
        let h = PI / x;
        let mut k = 1.0;
        while k * h < upper {
            cuts.push(k * h);
            k += 1.0;
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * upper);
    let gl = GaussLegendre::new(order);
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let h = (w[1] - w[0]) / refine as f64;
        for j in 0..refine {
            let a = w[0] + j as f64 * h;
            out.extend(gl.mapped(a, a + h));
        }
    }
    out
}

fn inv_g(r: f64) -> Complex64 {
    1.0 / g_real(r)
}

/// `F` at `|x| = x` by two radial quadratures; returns the value and their difference.
pub fn log_fourier_transform(eps: f64, x: f64) -> Result<(Complex64, f64)> {
    if !(eps > 0.0 && eps <= 1.0) || !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Input(format!("need 0 < ε ≤ 1 and |x| ≥ 0 (ε = {eps}, |x| = {x})")));
    }
    let f = |nodes: Vec<(f64, f64)>| -> Complex64 {
        nodes.iter().map(|&(r, w)| inv_g(r) * (w * chi(r / eps) * bessel_j(0, r * x))).sum()
    };
    let a = f(radial_nodes(2.0 * eps, x, 40.0, 16, 1));
    let b = f(radial_nodes(2.0 * eps, x, 40.0, 24, 2));
    let diff = (a - b).norm();
    let scale = log_fourier_at_origin(eps).norm();
    if diff > ROUTE_TOL * scale {
        return Err(Error::Accuracy(format!("radial quadratures for F(|x| = {x}) differ by {diff:.3e}")));
    }
    Ok((a, diff))
}

/// `F(0) = ∫₀^{2ε} χ(r/ε)/g(r) dr` by adaptive Gauss-Kronrod.
pub fn log_fourier_at_origin(eps: f64) -> Complex64 {
    adaptive(|r: f64| if r == 0.0 { Complex64::new(0.0, 0.0) } else { inv_g(r) * chi(r / eps) }, 0.0, 2.0 * eps, 1e-15, 1e-14, 4000).0
}

/// `F(x)` from the planar integral in polar coordinates (trapezoid in the angle).
pub fn log_fourier_transform_planar(eps: f64, x: [f64; 2], n_phi: usize) -> Complex64 {
    let nodes = radial_nodes(2.0 * eps, x[0].hypot(x[1]), 40.0, 16, 1);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for (r, w) in nodes {
        let ang: Complex64 = (0..n_phi)
            .map(|k| {
                let phi = k as f64 * dphi;
                Complex64::from_polar(1.0, r * (x[0] * phi.cos() + x[1] * phi.sin()))
            })
            .sum::<Complex64>()
            * dphi;
        // (1/2π) ∫ e^{ipx} χ/(|p|g) |p| d|p| dφ
        sum += ang * inv_g(r) * (w * chi(r / eps) / (2.0 * PI));
    }
    sum
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub radius: f64,
    pub value: Complex64,
    /// `|F(x)| ⟨x⟩ log(2 + |x|)`.
    pub bound_ratio: f64,
    pub route_difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayTable {
    pub eps: f64,
    pub rows: Vec<DecayRow>,
    pub sup_ratio: f64,
    /// Log-log slope of the bound ratio over the rows with `|x| ≥ 10`.
    pub trend_slope: f64,
    /// `|F/F_∞ − 1|` at the largest radius, `F_∞(x) = 2π/(|x|(log 4|x| + iπ/2))`.
    pub asymptotic_deviation: f64,
}

/// Large-`|x|` form of `F` from expanding `1/g(u/|x|)` to second order in `1/log|x|`.
pub fn log_fourier_asymptote(x: f64) -> Complex64 {
    Complex64::new(2.0 * PI / x, 0.0) / Complex64::new((4.0 * x).ln(), 0.5 * PI)
}

fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

pub fn log_fourier_decay(eps: f64, radii: &[f64]) -> Result<DecayTable> {
    let rows = radii
        .par_iter()
        .map(|&x| {
            let (value, diff) = log_fourier_transform(eps, x)?;
            Ok(DecayRow { radius: x, value, bound_ratio: value.norm() * bracket(x) * (2.0 + x).ln(), route_difference: diff })
        })
        .collect::<Result<Vec<_>>>()?;
    let sup_ratio = rows.iter().map(|r| r.bound_ratio).fold(0.0, f64::max);
    let far: Vec<(f64, f64)> = rows.iter().filter(|r| r.radius >= 10.0).map(|r| (r.radius.ln(), r.bound_ratio.ln())).collect();
    let trend_slope = if far.len() >= 2 { fit::slope(&far) } else { f64::NAN };
    let asymptotic_deviation = rows
        .iter()
        .max_by(|a, b| a.radius.partial_cmp(&b.radius).unwrap())
        .filter(|r| r.radius > 0.0)
        .map_or(f64::NAN, |r| (r.value / log_fourier_asymptote(r.radius) - 1.0).norm());
    Ok(DecayTable { eps, rows, sup_ratio, trend_slope, asymptotic_deviation })
}

/// `P_c(X, t)` at many `t` from one set of radial nodes.
fn poisson_bumps(c: f64, x: f64, ts: &[f64]) -> Vec<f64> {
    let nodes: Vec<(f64, f64)> = radial_nodes(2.0 * c, x, 14.0, 16, 1)
        .into_iter()
        .map(|(r, w)| (r, w * chi(r / c) * bessel_j(0, r * x) * r))
        .filter(|(_, w)| *w != 0.0)
        .collect();
    ts.iter().map(|&t| nodes.iter().map(|&(r, w)| w * (-t * r).exp()).sum()).collect()
}

/// `P_c(X, t) = ∫ e^{−tr} χ(r/c) J₀(rX) r dr`.
pub fn poisson_bump(c: f64, x: f64, t: f64) -> f64 {
    poisson_bumps(c, x, &[t])[0]
}

struct TRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    t_max: f64,
}

fn t_rule() -> TRule {
    let gl = GaussLegendre::new(16);
    let (t_min, t_max): (f64, f64) = (1e-8, 1e6);
    let mut cuts = vec![0.0, t_min];
    let mut t = t_min;
    while t < t_max {
        t = (t * 1.5).min(t_max);
        cuts.push(t);
    }
    let (mut nodes, mut weights) = (Vec::new(), Vec::new());
    for w in cuts.windows(2) {
        for (x, wt) in gl.mapped(w[0], w[1]) {
            nodes.push(x);
            weights.push(wt);
        }
    }
    TRule { nodes, weights, t_max }
}

/// Relative tail share accepted by the `t`-quadrature.
pub const TAIL_TOL: f64 = 1e-6;

fn combine(rule: &TRule, px: &[f64], py: &[f64]) -> Result<(f64, f64)> {
    let value: f64 = rule.weights.iter().zip(px.iter().zip(py)).map(|(w, (a, b))| w * a * b).sum();
    // both factors behave like t⁻² beyond t_max
    let (a, b) = (px.last().unwrap(), py.last().unwrap());
    let tail = (a * b).abs() * rule.t_max / 3.0;
    if tail > TAIL_TOL * value.abs() {
        return Err(Error::Accuracy(format!("t-integral tail {tail:.3e} against value {value:.3e}")));
    }
    Ok((value, tail))
}

/// `∫₀^∞ P_{cx}(X,t) P_{cy}(Y,t) dt` and its tail estimate.
pub fn appendix_value(cx: f64, cy: f64, x: f64, y: f64) -> Result<(f64, f64)> {
    let rule = t_rule();
    combine(&rule, &poisson_bumps(cx, x, &rule.nodes), &poisson_bumps(cy, y, &rule.nodes))
}

/// The same quantity as a double radial integral with kernel `rs/(r+s)`.
pub fn appendix_value_direct(cx: f64, cy: f64, x: f64, y: f64) -> f64 {
    let a: Vec<(f64, f64)> =
        radial_nodes(2.0 * cx, x, 14.0, 24, 2).into_iter().map(|(r, w)| (r, w * chi(r / cx) * bessel_j(0, r * x) * r)).collect();
    let b: Vec<(f64, f64)> =
        radial_nodes(2.0 * cy, y, 14.0, 24, 2).into_iter().map(|(s, w)| (s, w * chi(s / cy) * bessel_j(0, s * y) * s)).collect();
    let rows: Vec<f64> = a.par_iter().map(|&(r, wr)| b.iter().map(|&(s, ws)| wr * ws / (r + s)).sum::<f64>()).collect();
    rows.iter().sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendixRow {
    pub x: f64,
    pub y: f64,
    pub value: f64,
    /// `|value| ⟨x⟩⟨y⟩(⟨x⟩+⟨y⟩)`.
    pub ratio_b: f64,
    /// `|value| (⟨x⟩+⟨y⟩)³ / log((⟨x⟩+⟨y⟩)²/(⟨x⟩⟨y⟩))`.
    pub ratio_a: f64,
    pub tail: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendixTable {
    pub eps: f64,
    pub rows: Vec<AppendixRow>,
    pub sup_ratio_b: f64,
    pub sup_ratio_a: f64,
    /// Log-log slope in `⟨x⟩ + 1` of `|value|/log((⟨x⟩+1)²/⟨x⟩)` on the `y = 0` rows with `|x| ≥ 5/ε`.
    pub slope_y0: f64,
    /// The same slope without the logarithmic factor.
    pub slope_y0_raw: f64,
    /// Log-log slope of `ratio_b` along the diagonal `x = y ≥ 5/ε`.
    pub diagonal_trend: f64,
}

/// Evaluate the appendix kernel with cutoffs `(2ε, ε)` on `xs × ys`.
pub fn appendix_kernel_bound(eps: f64, xs: &[f64], ys: &[f64]) -> Result<AppendixTable> {
    if !(eps > 0.0) || xs.iter().chain(ys).any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::Input("need ε > 0 and radii ≥ 0".into()));
    }
    let rule = t_rule();
    let px: Vec<Vec<f64>> = xs.par_iter().map(|&x| poisson_bumps(2.0 * eps, x, &rule.nodes)).collect();
    let py: Vec<Vec<f64>> = ys.par_iter().map(|&y| poisson_bumps(eps, y, &rule.nodes)).collect();
    let mut rows = Vec::with_capacity(xs.len() * ys.len());
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            let (value, tail) = combine(&rule, &px[i], &py[j])?;
            let (bx, by) = (bracket(x), bracket(y));
            rows.push(AppendixRow {
                x,
                y,
                value,
                ratio_b: value.abs() * bx * by * (bx + by),
                ratio_a: value.abs() * (bx + by).powi(3) / ((bx + by).powi(2) / (bx * by)).ln(),
                tail,
            });
        }
    }
    let sup_ratio_b = rows.iter().map(|r| r.ratio_b).fold(0.0, f64::max);
    let sup_ratio_a = rows.iter().map(|r| r.ratio_a).fold(0.0, f64::max);
    let slope_of = |pts: Vec<(f64, f64)>| if pts.len() >= 2 { fit::slope(&pts) } else { f64::NAN };
    let far = 5.0 / eps;
    let y0: Vec<&AppendixRow> = rows.iter().filter(|r| r.y == 0.0 && r.x >= far).collect();
    let slope_y0 = slope_of(
        y0.iter()
            .map(|r| {
                let s = bracket(r.x) + 1.0;
                (s.ln(), (r.value.abs() / (s * s / bracket(r.x)).ln()).ln())
            })
            .collect(),
    );
    let slope_y0_raw = slope_of(y0.iter().map(|r| ((bracket(r.x) + 1.0).ln(), r.value.abs().ln())).collect());
    let diagonal_trend = slope_of(rows.iter().filter(|r| r.x == r.y && r.x >= far).map(|r| (r.x.ln(), r.ratio_b.ln())).collect());
    Ok(AppendixTable { eps, rows, sup_ratio_b, sup_ratio_a, slope_y0, slope_y0_raw, diagonal_trend })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_value_matches_direct_integral() {
        let (f0, _) = log_fourier_transform(0.5, 0.0).unwrap();
        assert!((f0 - log_fourier_at_origin(0.5)).norm() < 1e-12 * f0.norm());
    }

    #[test]
    fn transform_is_radial() {
        let eps = 0.5;
        for r in [0.7, 3.0] {
            let vals: Vec<Complex64> =
                [0.0, 1.0, 2.3].iter().map(|th: &f64| log_fourier_transform_planar(eps, [r * th.cos(), r * th.sin()], 64)).collect();
            let (radial, _) = log_fourier_transform(eps, r).unwrap();
            for v in vals {
                assert!((v - radial).norm() < 1e-10 * radial.norm());
            }
        }
    }

    #[test]
    fn large_radius_asymptote() {
        for x in [2e3, 1e4] {
            let (f, _) = log_fourier_transform(0.5, x).unwrap();
            assert!((f / log_fourier_asymptote(x) - 1.0).norm() < 1e-2);
        }
    }

    #[test]
    fn poisson_kernel_limit() {
        // for t ≫ 1/c the bump is flat where e^{−tr} lives: P ≈ t/(t² + X²)^{3/2}
        let (t, x): (f64, f64) = (2e3, 500.0);
        let want = t / (t * t + x * x).powf(1.5);
        assert!((poisson_bump(1.0, x, t) / want - 1.0).abs() < 1e-6);
    }

    #[test]
    fn t_route_matches_double_integral() {
        for (x, y) in [(0.0, 0.0), (2.0, 0.5), (7.0, 3.0)] {
            let (v, _) = appendix_value(1.0, 0.5, x, y).unwrap();
            let d = appendix_value_direct(1.0, 0.5, x, y);
            assert!((v - d).abs() < 1e-8 * d.abs().max(1e-6), "{x} {y}: {v} {d}");
            // exchanging both the cutoffs and the arguments
            let (w, _) = appendix_value(0.5, 1.0, y, x).unwrap();
            assert!((v - w).abs() < 1e-12 * v.abs().max(1e-6));
        }
    }
}
