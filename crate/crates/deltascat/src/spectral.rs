//! Bound states on the imaginary axis and small-λ profiles of `Γ(λ)⁻¹` and the resolvent.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{build_chain, CaseLabel, ProjectionChain};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::fit;
use crate::ladder::{build_ladder_in, leading_term_in, ExpansionLadder};
use crate::linalg::KERNEL_TOL;
use crate::matrix::{sym_eigen, Mat};
use crate::operator::{build_gamma, gamma_real, newton_vector, resolvent_real, PointConfiguration};
use crate::scalar::{Cx, Field, Real};
use crate::specfun::{self, g_real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueRecord {
    pub kappa: f64,
    pub energy: f64,
    pub coeffs: Vec<Complex64>,
    pub det_residual: f64,
    pub kernel_residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub records: Vec<EigenvalueRecord>,
    pub warnings: Vec<String>,
}

/// `Γ(iκ)`, a real symmetric matrix.
pub fn gamma_imaginary(config: &PointConfiguration, kappa: f64) -> Result<Mat<f64>> {
    Ok(build_gamma(config, Complex64::new(0.0, kappa))?.real_part())
}

const BRACKET_SAMPLES: usize = 400;

/// All `κ ∈ [κ_min, κ_max]` with `Γ(iκ)` singular.
///
/// Every eigenvalue of `Γ(iκ)` increases with `κ`, so each sign change of the sorted
/// eigenvalues is one root; degenerate roots appear as simultaneous changes.
pub fn negative_eigenvalues(config: &PointConfiguration, kappa_range: (f64, f64), tol: f64) -> Result<Spectrum> {
    config.validate()?;
    let (k0, k1) = kappa_range;
    if !(k0 > 0.0 && k1 > k0 && k1.is_finite()) {
        return Err(Error::Input(format!("invalid κ range [{k0}, {k1}]")));
    }
    let n = config.len();
    let grid = fit::log_grid(k0, k1, BRACKET_SAMPLES);
    let eig = |k: f64| -> Result<Vec<f64>> { Ok(sym_eigen(&gamma_imaginary(config, k)?).values) };
    let vals: Vec<Vec<f64>> = grid.par_iter().map(|&k| eig(k)).collect::<Result<_>>()?;
    let neg = |v: &[f64]| v.iter().filter(|&&x| x < 0.0).count();
    let mut out = Spectrum::default();
    for i in 0..grid.len() - 1 {
        let (na, nb) = (neg(&vals[i]), neg(&vals[i + 1]));
        if nb > na {
            return Err(Error::Inconsistent("eigenvalue of Γ(iκ) decreased in κ".into()));
        }
        for level in nb..na {
            // the eigenvalue with ascending index `level` crosses zero in [grid[i], grid[i+1]]
            let (mut lo, mut hi) = (grid[i], grid[i + 1]);
            while hi - lo > 1e-15 * hi {
                let mid = 0.5 * (lo + hi);
                if eig(mid)?[level] < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let kappa = 0.5 * (lo + hi);
            let gm = gamma_imaginary(config, kappa)?;
            let e = sym_eigen(&gm);
            let v = e.vectors.col(level);
            let kernel_residual = gm.mul_vec(&v).iter().map(|x| x * x).sum::<f64>().sqrt();
            let det_residual = gm.det().abs();
            if kernel_residual > tol.max(1e-12) * (1.0 + gm.max_abs()) {
                out.warnings.push(format!("kernel residual {kernel_residual:e} at κ = {kappa}"));
            }
            out.records.push(EigenvalueRecord {
                kappa,
                energy: -kappa * kappa,
                coeffs: v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
                det_residual,
                kernel_residual,
            });
        }
    }
    if neg(&vals[0]) > 0 && neg(&vals[0]) == n {
        // nothing can lie below: all eigenvalues already negative at κ_min is fine
    }
    if vals[0].iter().any(|x| x.abs() < 1e-10) || vals[grid.len() - 1].iter().any(|x| x.abs() < 1e-10) {
        out.warnings.push("a root lies at the boundary of the κ range".into());
    }
    if out.records.len() > n {
        return Err(Error::Inconsistent(format!("{} roots for N = {n}", out.records.len())));
    }
    out.records.sort_by(|a, b| b.kappa.partial_cmp(&a.kappa).unwrap());
    Ok(out)
}

/// `ψ(x) = Σ_j c_j 𝒢_{iκ}(x − y_j)`.
pub fn bound_state_function(record: &EigenvalueRecord, config: &PointConfiguration, x: [f64; 2]) -> Result<Complex64> {
    let z = Complex64::new(0.0, record.kappa);
    let mut s = Complex64::new(0.0, 0.0);
    for (c, y) in record.coeffs.iter().zip(&config.points) {
        let d = [x[0] - y[0], x[1] - y[1]];
        if d == [0.0, 0.0] {
            return Err(Error::Domain("bound state evaluated at a scatterer".into()));
        }
        s += c * specfun::green_kernel(z, d)?;
    }
    Ok(s)
}

/// Largest coupling adjustment accepted by [`threshold_setup`], relative to `1 + max|α|`.
pub const SNAP_LIMIT: f64 = 1e-12;

/// Couplings and chain for threshold work in double-double.
///
/// The input couplings are f64, so a configuration sitting exactly on a resonance
/// (e.g. `α = −log 2/2π`) only does so to ~1e-17. The couplings are nudged by at most
/// [`SNAP_LIMIT`] so the kernel conditions of the chain hold to double-double accuracy;
/// larger nudges are refused and the f64 couplings are used as given.
pub fn threshold_setup(config: &PointConfiguration) -> Result<(Vec<Dd>, ProjectionChain<Dd>, f64)> {
    let alpha0 = config.alpha_dd();
    let chain0 = build_chain(&alpha0, &config.points, KERNEL_TOL)?;
    let limit = SNAP_LIMIT * (1.0 + config.alpha.iter().fold(0.0f64, |m, a| m.max(a.abs())));
    let mut alpha = alpha0.clone();
    let mut chain = chain0.clone();
    let mut total = 0.0f64;
    for _ in 0..3 {
        let delta = snap_delta(&chain);
        let size = delta.iter().fold(0.0f64, |m, d| m.max(d.to_f64().abs()));
        total += size;
        if total > limit {
            return Ok((alpha0, chain0, 0.0));
        }
        if size == 0.0 {
            break;
        }
        for (a, d) in alpha.iter_mut().zip(&delta) {
            *a = *a + *d;
        }
        chain = build_chain(&alpha, &config.points, KERNEL_TOL)?;
        if chain.case != chain0.case {
            return Ok((alpha0, chain0, 0.0));
        }
    }
    Ok((alpha, chain, total))
}

fn snap_delta(chain: &ProjectionChain<Dd>) -> Vec<Dd> {
    let d = &chain.structure.dtilde;
    let n = d.rows();
    let zero = Dd::new(0.0);
    let tiny = Dd::new(1e-16);
    match chain.case {
        CaseLabel::Case1 => vec![zero; n],
        CaseLabel::Case2 => {
            // S(D̃ + δ)v = 0, i.e. (D̃v)_j + δ_j v_j = c for one c; c minimizes Σδ_j²
            let v = &crate::matrix::range_basis(&chain.t_proj)[0];
            let r = d.mul_vec(v);
            let (mut num, mut den) = (zero, zero);
            for j in 0..n {
                if v[j].abs() > tiny {
                    let w = Dd::new(1.0) / (v[j] * v[j]);
                    num = num + w * r[j];
                    den = den + w;
                }
            }
            let c = if den > zero { num / den } else { zero };
            (0..n).map(|j| if v[j].abs() > tiny { (c - r[j]) / v[j] } else { zero }).collect()
        }
        _ => {
            // (D̃ + δ)v = 0 for every v in T_p, in the least-squares sense per row
            let basis = crate::matrix::range_basis(&chain.tp_proj);
            let rs: Vec<Vec<Dd>> = basis.iter().map(|v| d.mul_vec(v)).collect();
            (0..n)
                .map(|j| {
                    let num = basis.iter().zip(&rs).fold(zero, |s, (v, r)| s + r[j] * v[j]);
                    let den = basis.iter().fold(zero, |s, v| s + v[j] * v[j]);
                    if den > tiny * tiny { -num / den } else { zero }
                })
                .collect()
        }
    }
}

/// Ladder at one `λ`, in double-double.
pub fn build_ladder(config: &PointConfiguration, lam: f64) -> Result<(ExpansionLadder<Dd>, ProjectionChain<Dd>)> {
    let (alpha, chain, _) = threshold_setup(config)?;
    let l = build_ladder_in(&alpha, &config.points, &chain, Dd::new(lam))?;
    Ok((l, chain))
}

/// Leading singular part of `Γ(λ)⁻¹` (double-double, returned in f64).
pub fn gamma_inverse_asymptotic(config: &PointConfiguration, lam: f64) -> Result<(CaseLabel, Mat<Complex64>)> {
    let (_, chain, _) = threshold_setup(config)?;
    Ok((chain.case, leading_term_in(&chain, Dd::new(lam))?.to_c64()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub lambda: f64,
    pub value_re: f64,
    pub value_im: f64,
    pub residual: f64,
    pub fitted_order: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionProfile {
    pub case_label: CaseLabel,
    pub rows: Vec<ProfileRow>,
    /// Fitted λ-power of the residual column.
    pub fitted_order: f64,
    /// Fitted exponent of the `|log λ|` factor.
    pub fitted_log_power: f64,
}

/// For each λ: `value = ‖Γ⁻¹ − lead‖`, `residual = ‖Γ⁻¹ − lead‖/‖lead‖` (or `‖Γ⁻¹‖` in Case1).
pub fn expansion_residual_profile(config: &PointConfiguration, lam_grid: &[f64]) -> Result<ExpansionProfile> {
    config.validate()?;
    let (alpha, chain, _) = threshold_setup(config)?;
    let rows: Vec<(f64, f64, f64)> = lam_grid
        .par_iter()
        .map(|&lam| {
            let l = Dd::new(lam);
            let inv = gamma_real(&alpha, &config.points, l)
                .inverse()
                .map_err(|_| Error::Exceptional { det: 0.0 })?;
            let lead = leading_term_in(&chain, l)?;
            let diff = (&inv - &lead).op_norm().to_f64();
            let ln = lead.op_norm().to_f64();
            let res = if chain.case == CaseLabel::Case1 { diff } else { diff / ln };
            Ok((lam, diff, res))
        })
        .collect::<Result<_>>()?;
    let lams: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let res: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let (q, k) = fit::power_with_log(&lams, &res, None).unwrap_or((f64::NAN, f64::NAN));
    Ok(ExpansionProfile {
        case_label: chain.case,
        rows: rows
            .iter()
            .map(|&(lambda, d, r)| ProfileRow { lambda, value_re: d, value_im: 0.0, residual: r, fitted_order: q })
            .collect(),
        fitted_order: q,
        fitted_log_power: k,
    })
}

/// `R(λ²)(x, y)` at real `λ > 0`, double-double internally.
pub fn resolvent_at(config: &PointConfiguration, lam: f64, x: [f64; 2], y: [f64; 2]) -> Result<Complex64> {
    for p in &config.points {
        if *p == x || *p == y {
            return Err(Error::Domain("evaluation point coincides with a scatterer".into()));
        }
    }
    resolvent_in(&config.alpha_dd(), config, lam, x, y)
}

fn resolvent_in(alpha: &[Dd], config: &PointConfiguration, lam: f64, x: [f64; 2], y: [f64; 2]) -> Result<Complex64> {
    let l = Dd::new(lam);
    let inv = gamma_real(alpha, &config.points, l)
        .inverse()
        .map_err(|_| Error::Exceptional { det: 0.0 })?;
    Ok(resolvent_real(&config.points, l, &inv, x, y).to_c64())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventProfile {
    pub case_label: CaseLabel,
    pub rows: Vec<ProfileRow>,
    /// Predicted leading coefficient, case-dependent (see [`resolvent_threshold_profile`]).
    pub predicted: Vec<Complex64>,
    /// `value / predicted` at each λ (Case2–5), or successive differences (Case1).
    pub ratio: Vec<f64>,
    /// Extrapolated `λ → 0` limit (Case1 only).
    pub limit: Option<Complex64>,
}

/// Leading-order resolvent prediction at one λ.
///
/// Case2: `(Ng/‖D̃f‖²) φ(x)φ(y)`; Case3: `−(Ngλ²)⁻¹⟨T_pN̂₀(x), B_*T_pN̂₀(y)⟩`;
/// Case4/5: `−(Nλ²)⁻¹⟨T_eN̂₀(x), H T_eN̂₀(y)⟩`.
pub fn resolvent_prediction<R: Real>(
    config: &PointConfiguration,
    chain: &ProjectionChain<R>,
    lam: R,
    x: [f64; 2],
    y: [f64; 2],
) -> Result<Cx<R>> {
    let n = config.len();
    let nr = R::from_f64(n as f64);
    let g = g_real(lam);
    let nx: Vec<Cx<R>> = newton_vector(config, x).iter().map(|&v| Cx::new(R::from_f64(v), R::zero())).collect();
    let ny: Vec<Cx<R>> = newton_vector(config, y).iter().map(|&v| Cx::new(R::from_f64(v), R::zero())).collect();
    let dot = |a: &[Cx<R>], b: &[Cx<R>]| a.iter().zip(b).fold(Cx::new(R::zero(), R::zero()), |s, (p, q)| s + *p * *q);
    let st = &chain.structure;
    match chain.case {
        CaseLabel::Case1 => Ok(Cx::new(R::zero(), R::zero())),
        CaseLabel::Case2 => {
            let basis = crate::matrix::range_basis(&chain.t_proj);
            let f = &basis[0];
            let df = st.dtilde.mul_vec(f);
            let nd2 = df.iter().fold(R::zero(), |s, &v| s + v * v);
            let cst = df.iter().fold(R::zero(), |s, &v| s + v) / nr;
            let phi = |v: &[Cx<R>]| {
                f.iter().zip(v).fold(Cx::new(cst, R::zero()), |s, (a, b)| s + *b * *a)
            };
            Ok(g * phi(&nx) * phi(&ny) * Cx::new(nr / nd2, R::zero()))
        }
        _ => {
            let lead = leading_term_in(chain, lam)?;
            // every leading term is supported on T_p, which annihilates the constant part of 𝒢
            let w = lead.mul_vec(&ny);
            Ok(dot(&nx, &w))
        }
    }
}

/// Sweep `R(λ²)(x, y)` over the grid and compare with the case profile.
pub fn resolvent_threshold_profile(
    config: &PointConfiguration,
    lam_grid: &[f64],
    x: [f64; 2],
    y: [f64; 2],
) -> Result<ResolventProfile> {
    config.validate()?;
    if lam_grid.len() < 3 {
        return Err(Error::Fit("λ grid needs at least three points".into()));
    }
    for p in &config.points {
        if *p == x || *p == y {
            return Err(Error::Domain("evaluation point coincides with a scatterer".into()));
        }
    }
    let (alpha, chain, _) = threshold_setup(config)?;
    let vals: Vec<(Complex64, Complex64)> = lam_grid
        .par_iter()
        .map(|&lam| {
            let v = resolvent_in(&alpha, config, lam, x, y)?;
            let p = resolvent_prediction(config, &chain, Dd::new(lam), x, y)?.to_c64();
            Ok((v, p))
        })
        .collect::<Result<_>>()?;
    let mut ratio = Vec::new();
    let mut limit = None;
    if chain.case == CaseLabel::Case1 {
        for w in vals.windows(2) {
            ratio.push((w[1].0 - w[0].0).norm());
        }
        // R = R₀ + c₁/g + c₂/g², fitted on the real and imaginary parts
        let gs: Vec<Complex64> = lam_grid.iter().map(|&l| g_real(l)).collect();
        limit = Some(extrapolate_in_inverse_g(&gs, &vals.iter().map(|v| v.0).collect::<Vec<_>>())?);
        ratio.insert(0, f64::NAN);
    } else {
        for (v, p) in &vals {
            ratio.push((v / p).norm());
        }
    }
    let lams = lam_grid.to_vec();
    let fit_col: Vec<f64> = vals.iter().map(|v| v.0.norm()).collect();
    let q = fit::power_with_log(&lams, &fit_col, Some(0.0)).map(|r| r.0).unwrap_or(f64::NAN);
    Ok(ResolventProfile {
        case_label: chain.case,
        rows: lam_grid
            .iter()
            .zip(&vals)
            .zip(&ratio)
            .map(|((&lambda, v), &r)| ProfileRow {
                lambda,
                value_re: v.0.re,
                value_im: v.0.im,
                residual: if r.is_nan() { 0.0 } else { r },
                fitted_order: q,
            })
            .collect(),
        predicted: vals.iter().map(|v| v.1).collect(),
        ratio,
        limit,
    })
}

/// Complex least squares of `v ≈ Σ_k c_k g^{p_k}`; returns the `c_k`.
pub fn fit_in_g(gs: &[Complex64], vs: &[Complex64], powers: &[i32]) -> Result<Vec<Complex64>> {
    // real unknowns (Re c_k, Im c_k); one row each for the real and imaginary parts
    let m = powers.len();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (g, v) in gs.iter().zip(vs) {
        let mut re_row = vec![0.0; 2 * m];
        let mut im_row = vec![0.0; 2 * m];
        for (k, &p) in powers.iter().enumerate() {
            let b = g.powi(p);
            re_row[2 * k] = b.re;
            re_row[2 * k + 1] = -b.im;
            im_row[2 * k] = b.im;
            im_row[2 * k + 1] = b.re;
        }
        x.push(re_row);
        y.push(v.re);
        x.push(im_row);
        y.push(v.im);
    }
    let c = fit::least_squares(&x, &y)?;
    Ok((0..m).map(|k| Complex64::new(c[2 * k], c[2 * k + 1])).collect())
}

fn extrapolate_in_inverse_g(gs: &[Complex64], vs: &[Complex64]) -> Result<Complex64> {
    Ok(fit_in_g(gs, vs, &[0, -1, -2, -3])?[0])
}

/// Case2: coefficient of `g` in `R(λ²)(x, y)`, fitted on `[g, 1, 1/g, 1/g²]`.
pub fn s_wave_coefficient(config: &PointConfiguration, lam_grid: &[f64], x: [f64; 2], y: [f64; 2]) -> Result<Complex64> {
    let (alpha, _, _) = threshold_setup(config)?;
    let vs: Vec<Complex64> = lam_grid.par_iter().map(|&l| resolvent_in(&alpha, config, l, x, y)).collect::<Result<_>>()?;
    let gs: Vec<Complex64> = lam_grid.iter().map(|&l| g_real(l)).collect();
    Ok(fit_in_g(&gs, &vs, &[1, 0, -1, -2])?[0])
}

/// Case2 prediction for the coefficient of `g`: `(N/‖D̃f‖²) φ(x)φ(y)`.
pub fn s_wave_predicted_coefficient(config: &PointConfiguration, x: [f64; 2], y: [f64; 2]) -> Result<Complex64> {
    let (_, chain, _) = threshold_setup(config)?;
    if chain.case != CaseLabel::Case2 {
        return Err(Error::Precondition(format!("{} is not Case2", chain.case)));
    }
    // with λ = 1 the prediction is g(1) times the coefficient
    let g = g_real(1.0);
    Ok(resolvent_prediction(config, &chain, Dd::new(1.0), x, y)?.to_c64() / g)
}

/// Matrix of `λ² g R(λ²)(x_i, y_j)` (Case3) or `λ² R(λ²)(x_i, y_j)` (Case4/5), for rank checks.
pub fn scaled_resolvent_matrix(config: &PointConfiguration, lam: f64, xs: &[[f64; 2]], ys: &[[f64; 2]]) -> Result<Mat<Complex64>> {
    for p in &config.points {
        if xs.contains(p) || ys.contains(p) {
            return Err(Error::Domain("evaluation point coincides with a scatterer".into()));
        }
    }
    let (alpha, chain, _) = threshold_setup(config)?;
    let g = g_real(lam);
    let s = match chain.case {
        CaseLabel::Case3 => g * lam * lam,
        CaseLabel::Case4 | CaseLabel::Case5 => Complex64::new(lam * lam, 0.0),
        CaseLabel::Case2 => 1.0 / g,
        CaseLabel::Case1 => Complex64::new(1.0, 0.0),
    };
    let mut m = Mat::zeros(xs.len(), ys.len());
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            m[(i, j)] = resolvent_in(&alpha, config, lam, x, y)? * s;
        }
    }
    Ok(m)
}

/// Singular values of a complex matrix, descending.
pub fn singular_values(m: &Mat<Complex64>) -> Vec<f64> {
    let h = &m.adjoint() * m;
    let n = h.rows();
    let e = Mat::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let v = sym_eigen(&e).values;
    // each singular value appears twice in the real embedding
    let mut out: Vec<f64> = v.iter().rev().step_by(2).map(|&x| x.max(0.0).sqrt()).collect();
    out.truncate(n);
    out
}
