//! Dyadic probes of `‖𝒲_low u_n‖_p / ‖u_n‖_p` as the Fourier support of `u_n` shrinks to 0.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classifier::{classify, CaseLabel};
use crate::error::{Error, Result};
use crate::linalg::KERNEL_TOL;
use crate::operator::PointConfiguration;
use crate::waveop::cutoff::CutoffPair;
use crate::waveop::field::PolarGrid;
use crate::waveop::lowenergy::{low_energy_wave_operator, BadPart};
use crate::waveop::testfn::TestFunction;

/// Ratio range separating the verdicts.
pub const TREND_FACTOR: f64 = 10.0;
/// Minimal run of strict increases for a growth verdict.
pub const MIN_RUN: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Bounded,
    Growing,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    pub eps: f64,
    /// Number of dyadic steps; probes run for `n = 0..=steps`.
    pub steps: usize,
    pub bad_part: BadPart,
    pub n_theta: usize,
    /// Radial nodes per decade of the inner (logarithmic) grid.
    pub per_decade: usize,
    /// Radial nodes per wavelength `2π/λ_max` of the outer (uniform) grid.
    pub per_wavelength: usize,
    /// Outer radius in units of `1/(λ_max − λ_min)`.
    pub reach: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { eps: 1e-6, steps: 8, bad_part: BadPart::Keep, n_theta: 32, per_decade: 24, per_wavelength: 12, reach: 120.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub n: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub input_norm: f64,
    pub output_norm: f64,
    pub ratio: f64,
    /// Largest truncated share of the two norms.
    pub tail: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub case_label: CaseLabel,
    pub p: f64,
    pub options: ProbeOptions,
    pub rows: Vec<ProbeRow>,
    pub verdict: Trend,
    /// `max_{i<j} r_j/r_i` and `max_{i<j} r_i/r_j`.
    pub max_rise: f64,
    pub max_fall: f64,
    pub warnings: Vec<String>,
}

/// `u_n`: Fourier support `[2^{-n-1}ε, 2^{-n}ε]`, angular factor `e^{iφ}`.
pub fn probe_input(eps: f64, n: usize) -> Result<TestFunction> {
    let hi = eps * 0.5f64.powi(n as i32);
    TestFunction::new(0.5 * hi, hi, vec![(1, Complex64::new(1.0, 0.0))])
}

/// Polar grid resolving both the point scale and the wavelength scale of `u_n`.
pub fn probe_grid(config: &PointConfiguration, u: &TestFunction, opts: &ProbeOptions) -> Result<PolarGrid> {
    let scale = config.min_distance().min(1.0);
    let y_max = config.points.iter().map(|y| y[0].hypot(y[1])).fold(0.0, f64::max);
    let r_min = 1e-6 * scale;
    // the inner lattice is the same for every n
    let steps = ((1.0 / u.r1).max(4.0 * (y_max + scale)) / r_min).log10() * opts.per_decade as f64;
    let steps = 2 * (steps / 2.0).ceil() as usize;
    let r_c = r_min * 10f64.powf(steps as f64 / opts.per_decade as f64);
    let r_max = r_c + opts.reach / (u.r1 - u.r0);
    let n_lin = ((r_max - r_c) * u.r1 / (2.0 * std::f64::consts::PI) * opts.per_wavelength as f64).ceil() as usize + 1;
    // half-step rotation keeps nodes off the axis through collinear points
    let half = std::f64::consts::PI / opts.n_theta as f64;
    Ok(PolarGrid::log_linear(r_min, r_c, r_max, steps + 1, n_lin.max(3), opts.n_theta)?.rotated(half))
}

/// Verdict on a ratio sequence.
pub fn classify_trend(ratios: &[f64]) -> Trend {
    if ratios.iter().all(|r| *r == 0.0) {
        return Trend::Bounded;
    }
    if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Trend::Inconclusive;
    }
    let (rise, _) = excursions(ratios);
    let mut run = 0;
    let mut best = 0;
    for w in ratios.windows(2) {
        run = if w[1] > w[0] { run + 1 } else { 0 };
        best = best.max(run);
    }
    let total = ratios.last().unwrap_or(&1.0) / ratios.first().unwrap_or(&1.0);
    if best >= MIN_RUN && total > TREND_FACTOR {
        Trend::Growing
    } else if rise < TREND_FACTOR {
        Trend::Bounded
    } else {
        Trend::Inconclusive
    }
}

fn excursions(r: &[f64]) -> (f64, f64) {
    let mut rise: f64 = 1.0;
    let mut fall: f64 = 1.0;
    for i in 0..r.len() {
        for j in i + 1..r.len() {
            rise = rise.max(r[j] / r[i]);
            fall = fall.max(r[i] / r[j]);
        }
    }
    (rise, fall)
}

/// `r_n = ‖𝒲_low u_n‖_p / ‖u_n‖_p` for `n = 0..=steps`.
pub fn boundedness_probe(config: &PointConfiguration, p: f64, opts: ProbeOptions) -> Result<ProbeReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Input(format!("p = {p} outside (1, ∞)")));
    }
    let report = classify(config, KERNEL_TOL)?;
    let cut = CutoffPair::new(opts.eps)?;
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for n in 0..=opts.steps {
        let u = probe_input(opts.eps, n)?;
        let grid = Arc::new(probe_grid(config, &u, &opts)?);
        let input = u.sample(&grid, "u_n").lp_norm(p)?;
        let out = low_energy_wave_operator(config, &u, cut, &grid, opts.bad_part)?;
        warnings.extend(out.warnings);
        let output = out.field.lp_norm(p)?;
        rows.push(ProbeRow {
            n,
            lambda_min: u.r0,
            lambda_max: u.r1,
            input_norm: input.value,
            output_norm: output.value,
            ratio: output.value / input.value,
            tail: [input.tail, input.core, output.tail, output.core].into_iter().fold(0.0, f64::max),
        });
    }
    let ratios: Vec<f64> = rows.iter().map(|r| if r.output_norm == 0.0 { 0.0 } else { r.ratio }).collect();
    let (max_rise, max_fall) = if ratios.iter().all(|r| *r > 0.0) { excursions(&ratios) } else { (f64::NAN, f64::NAN) };
    Ok(ProbeReport {
        case_label: report.case_label,
        p,
        options: opts,
        rows,
        verdict: classify_trend(&ratios),
        max_rise,
        max_fall,
        warnings,
    })
}
