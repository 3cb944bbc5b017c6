//! Threshold classification through the projection chain `S ⊇ T ⊇ T_p ⊇ T_e`, and the
//! zero-energy resonance functions it produces.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kernel_split_ref, KernelSplit, KERNEL_TOL};
use crate::matrix::{range_basis, Mat};
use crate::operator::{build_structure_in, PointConfiguration, StructureMatrices};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    Case1,
    Case2,
    Case3,
    Case4,
    Case5,
}

impl CaseLabel {
    pub fn verdict(self) -> LpVerdict {
        match self {
            CaseLabel::Case1 | CaseLabel::Case2 | CaseLabel::Case5 => LpVerdict::AllP,
            CaseLabel::Case3 | CaseLabel::Case4 => LpVerdict::UpToTwo,
        }
    }

    pub fn has_p_wave(self) -> bool {
        matches!(self, CaseLabel::Case3 | CaseLabel::Case4)
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpVerdict {
    #[serde(rename = "bounded for all 1<p<infinity")]
    AllP,
    #[serde(rename = "bounded for 1<p<=2, unbounded for 2<p<infinity")]
    UpToTwo,
}

impl LpVerdict {
    pub fn bounded(self, p: f64) -> bool {
        match self {
            LpVerdict::AllP => p > 1.0,
            LpVerdict::UpToTwo => p > 1.0 && p <= 2.0,
        }
    }
}

/// The nested projections and the matrices they were extracted from.
#[derive(Clone, Debug)]
pub struct ProjectionChain<R: Real> {
    pub p_proj: Mat<R>,
    pub s_proj: Mat<R>,
    pub t_proj: Mat<R>,
    pub tp_proj: Mat<R>,
    pub te_proj: Mat<R>,
    pub rank_s: usize,
    pub rank_t: usize,
    pub rank_tp: usize,
    pub rank_te: usize,
    pub tol: f64,
    pub case: CaseLabel,
    pub borderline: bool,
    pub structure: StructureMatrices<R>,
}

impl<R: Real> ProjectionChain<R> {
    /// `max(‖TS − T‖, ‖T_pT − T_p‖, ‖T_eT_p − T_e‖)`.
    pub fn containment_defect(&self) -> f64 {
        let d1 = (&(&self.t_proj * &self.s_proj) - &self.t_proj).max_abs().to_f64();
        let d2 = (&(&self.tp_proj * &self.t_proj) - &self.tp_proj).max_abs().to_f64();
        let d3 = (&(&self.te_proj * &self.tp_proj) - &self.te_proj).max_abs().to_f64();
        d1.max(d2).max(d3)
    }

    /// `T_e^⊥ = T_p − T_e`.
    pub fn te_perp(&self) -> Mat<R> {
        &self.tp_proj - &self.te_proj
    }
}

fn fmax<R: Real>(a: R, b: R) -> R {
    if a > b {
        a
    } else {
        b
    }
}

/// Build the chain in precision `R` from strengths and points.
pub fn build_chain<R: Real>(alpha: &[R], points: &[[f64; 2]], tol: f64) -> Result<ProjectionChain<R>> {
    let st = build_structure_in(alpha, points);
    chain_from_structure(st, tol)
}

pub fn chain_from_structure<R: Real>(st: StructureMatrices<R>, tol: f64) -> Result<ProjectionChain<R>> {
    let n = st.dtilde.rows();
    let zero = Mat::<R>::zeros(n, n);
    let s = st.s_proj.clone();
    let rank_s = n - 1;
    let dt = &st.dtilde;
    let dt_norm = dt.op_norm();
    let mut borderline = false;
    let mut note = |k: &KernelSplit<R>| borderline |= k.borderline(tol);

    let kt = kernel_split_ref(dt, &s, tol, Some(dt_norm));
    note(&kt);
    let t = kt.projection;
    let rank_t = kt.basis.len();
    let (tp, te, case) = if rank_t == 0 {
        (zero.clone(), zero.clone(), CaseLabel::Case1)
    } else {
        let d2 = dt * dt;
        let kp = kernel_split_ref(&d2, &t, tol, Some(fmax(dt_norm * dt_norm, R::zero())));
        note(&kp);
        if kp.basis.is_empty() {
            if rank_t != 1 {
                return Err(Error::Inconsistent(format!(
                    "Case2 with rank T = {rank_t}; T D̃² T should have rank at most one"
                )));
            }
            (zero.clone(), zero.clone(), CaseLabel::Case2)
        } else {
            let tp = kp.projection;
            let g1 = &st.gamma1;
            let ke = kernel_split_ref(g1, &tp, tol, Some(g1.op_norm()));
            note(&ke);
            let rank_tp = kp.basis.len();
            let rank_ke = ke.basis.len();
            if rank_ke == 0 {
                (tp, zero.clone(), CaseLabel::Case3)
            } else if rank_ke == rank_tp {
                (tp.clone(), tp, CaseLabel::Case5)
            } else {
                (tp, ke.projection, CaseLabel::Case4)
            }
        }
    };
    let rank_tp = range_basis(&tp).len();
    let rank_te = range_basis(&te).len();
    Ok(ProjectionChain {
        p_proj: st.p_proj.clone(),
        s_proj: s,
        t_proj: t,
        tp_proj: tp,
        te_proj: te,
        rank_s,
        rank_t,
        rank_tp,
        rank_te,
        tol,
        case,
        borderline,
        structure: st,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResonanceKind {
    SWave,
    PWave,
    ZeroEigenfunction,
}

/// `φ(x) = ⟨D̃a, 1⟩/N − (1/2π) Σ a_j log|x − y_j|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceFunction {
    pub kind: ResonanceKind,
    pub coeffs: Vec<f64>,
    pub constant: f64,
    pub dipole: [f64; 2],
    pub points: Vec<[f64; 2]>,
}

impl ResonanceFunction {
    pub fn new(config: &PointConfiguration, coeffs: Vec<f64>, kind: ResonanceKind) -> Self {
        let st = build_structure_in(&config.alpha, &config.points);
        let da = st.dtilde.mul_vec(&coeffs);
        let constant = da.iter().sum::<f64>() / config.len() as f64;
        let mut dipole = [0.0; 2];
        for (a, y) in coeffs.iter().zip(&config.points) {
            dipole[0] += a * y[0] / (2.0 * PI);
            dipole[1] += a * y[1] / (2.0 * PI);
        }
        ResonanceFunction { kind, coeffs, constant, dipole, points: config.points.clone() }
    }

    pub fn value(&self, x: [f64; 2]) -> Result<f64> {
        resonance_value(self, x)
    }
}

/// Pointwise value of a resonance function.
pub fn resonance_value(phi: &ResonanceFunction, x: [f64; 2]) -> Result<f64> {
    let rmax = phi.points.iter().map(|y| y[0].hypot(y[1])).fold(0.0, f64::max);
    let r = x[0].hypot(x[1]);
    let mut s = 0.0;
    if r > 4.0 * rmax && r > 0.0 {
        // log|x−y| = log|x| + ½ log1p((|y|² − 2x·y)/|x|²)
        let lr = r.ln();
        let mut sa = 0.0;
        for (a, y) in phi.coeffs.iter().zip(&phi.points) {
            let q = (y[0] * y[0] + y[1] * y[1] - 2.0 * (x[0] * y[0] + x[1] * y[1])) / (r * r);
            s += a * 0.5 * q.ln_1p();
            sa += a;
        }
        s += sa * lr;
    } else {
        for (a, y) in phi.coeffs.iter().zip(&phi.points) {
            let d = (x[0] - y[0]).hypot(x[1] - y[1]);
            if d == 0.0 {
                return Err(Error::Domain("resonance function evaluated at a scatterer".into()));
            }
            s += a * d.ln();
        }
    }
    Ok(phi.constant - s / (2.0 * PI))
}

/// Circle fit of a resonance function at large radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub constant: f64,
    pub dipole: [f64; 2],
    /// Fitted decay order of `φ − c − ⟨x̂, b⟩/|x|`.
    pub remainder_order: f64,
    pub remainders: Vec<f64>,
}

const CIRCLE_SAMPLES: usize = 64;

/// Fit `c + ⟨x̂, b⟩/|x|` on circles of the given radii.
pub fn verify_resonance_asymptotics(phi: &ResonanceFunction, radii: &[f64]) -> Result<AsymptoticFit> {
    let rmax = phi.points.iter().map(|y| y[0].hypot(y[1])).fold(0.0, f64::max);
    let diam = rmax.max(1e-300) * 2.0;
    if radii.len() < 2 || radii.iter().any(|&r| r < 10.0 * diam) {
        return Err(Error::Fit("need at least two radii, each ≥ 10·diameter".into()));
    }
    let mut fits = Vec::new();
    for &r in radii {
        let m = CIRCLE_SAMPLES;
        let mut vals = Vec::with_capacity(m);
        let (mut c0, mut c1, mut s1) = (0.0, 0.0, 0.0);
        for k in 0..m {
            let th = 2.0 * PI * (k as f64 + 0.5) / m as f64;
            let v = resonance_value(phi, [r * th.cos(), r * th.sin()])?;
            c0 += v;
            c1 += v * th.cos();
            s1 += v * th.sin();
            vals.push((th, v));
        }
        let c = c0 / m as f64;
        let b = [2.0 * c1 / m as f64 * r, 2.0 * s1 / m as f64 * r];
        let rem = vals
            .iter()
            .map(|&(th, v)| (v - c - (b[0] * th.cos() + b[1] * th.sin()) / r).abs())
            .fold(0.0, f64::max);
        fits.push((r, c, b, rem));
    }
    let last = fits.last().unwrap();
    let scale = phi.coeffs.iter().map(|a| a.abs()).sum::<f64>().max(1e-300);
    let pts: Vec<(f64, f64)> = fits
        .iter()
        .filter(|f| f.3 > 1e-13 * scale)
        .map(|f| (f.0.ln(), f.3.ln()))
        .collect();
    let remainder_order = if pts.len() >= 2 {
        -crate::fit::slope(&pts)
    } else {
        // below roundoff at every radius
        f64::MAX
    };
    Ok(AsymptoticFit {
        constant: last.1,
        dipole: last.2,
        remainder_order,
        remainders: fits.iter().map(|f| f.3).collect(),
    })
}

/// `−2π φ(x)/log|x − y_j|` at distance `scale` from `y_j` (converges like `1/|log scale|`).
pub fn naive_log_coefficient(phi: &ResonanceFunction, j: usize, scale: f64) -> Result<f64> {
    let y = phi.points[j];
    let v = resonance_value(phi, [y[0] + scale, y[1]])?;
    Ok(-2.0 * PI * v / scale.ln())
}

/// Recover `a_j` from the logarithmic singularity of `φ` at each `y_j`.
///
/// Circle averages of `φ` around `y_j` at the given scales are regressed on `[1, log s]`;
/// the slope is `−a_j/2π`. The last two scales are used.
pub fn verify_log_coefficients(phi: &ResonanceFunction, approach_scales: &[f64]) -> Result<Vec<f64>> {
    if approach_scales.len() < 2 {
        return Err(Error::Fit("need at least two approach scales".into()));
    }
    if approach_scales.windows(2).any(|w| !(w[1] < w[0]) || w[1] <= 0.0) {
        return Err(Error::Fit("approach scales must decrease to 0".into()));
    }
    let sep = phi.points.iter().enumerate().flat_map(|(j, a)| {
        phi.points[j + 1..].iter().map(move |b| (a[0] - b[0]).hypot(a[1] - b[1]))
    });
    let min_sep = sep.fold(f64::INFINITY, f64::min);
    if approach_scales[0] >= 0.5 * min_sep {
        return Err(Error::Fit("approach scales must be well below the point separation".into()));
    }
    let n = phi.points.len();
    let k = approach_scales.len();
    let (s1, s2) = (approach_scales[k - 2], approach_scales[k - 1]);
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let avg = |s: f64| -> Result<f64> {
            let m = 16;
            let y = phi.points[j];
            let mut acc = 0.0;
            for q in 0..m {
                let th = 2.0 * PI * (q as f64 + 0.5) / m as f64;
                acc += resonance_value(phi, [y[0] + s * th.cos(), y[1] + s * th.sin()])?;
            }
            Ok(acc / m as f64)
        };
        let (v1, v2) = (avg(s1)?, avg(s2)?);
        let slope = (v2 - v1) / (s2.ln() - s1.ln());
        if !slope.is_finite() {
            return Err(Error::Fit("non-finite slope".into()));
        }
        out.push(-2.0 * PI * slope);
    }
    Ok(out)
}

/// Sizes of the chain, for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRanks {
    pub s: usize,
    pub t: usize,
    pub t_p: usize,
    pub t_e: usize,
}

/// Classification result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub case_label: CaseLabel,
    pub lp_verdict: LpVerdict,
    pub ranks: ChainRanks,
    pub tolerance: f64,
    pub borderline: bool,
    /// `P D̃ T ≠ 0`.
    pub s_wave_exists: bool,
    pub resonances: Vec<ResonanceFunction>,
    pub t_proj: Vec<Vec<f64>>,
    pub tp_proj: Vec<Vec<f64>>,
    pub te_proj: Vec<Vec<f64>>,
}

fn rows(m: &Mat<f64>) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| clean(m[(i, j)])).collect()).collect()
}

/// Flush roundoff-level entries and negative zeros so reports are stable.
fn clean(x: f64) -> f64 {
    if x.abs() < 1e-15 {
        0.0
    } else {
        x
    }
}

/// Make the first entry of significant size positive.
fn canonical_sign(mut v: Vec<f64>) -> Vec<f64> {
    let big = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-3 * big) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    v.into_iter().map(clean).collect()
}

pub fn classify(config: &PointConfiguration, tol: f64) -> Result<ThresholdReport> {
    config.validate()?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Input(format!("tolerance {tol} outside (0, 1)")));
    }
    let chain = build_chain(&config.alpha, &config.points, tol)?;
    Ok(report_from_chain(config, &chain))
}

pub fn classify_default(config: &PointConfiguration) -> Result<ThresholdReport> {
    classify(config, KERNEL_TOL)
}

pub fn report_from_chain(config: &PointConfiguration, chain: &ProjectionChain<f64>) -> ThresholdReport {
    let mut resonances = Vec::new();
    let layers = [
        (&chain.t_proj - &chain.tp_proj, ResonanceKind::SWave),
        (&chain.tp_proj - &chain.te_proj, ResonanceKind::PWave),
        (chain.te_proj.clone(), ResonanceKind::ZeroEigenfunction),
    ];
    for (proj, kind) in layers {
        for v in range_basis(&proj) {
            resonances.push(ResonanceFunction::new(config, canonical_sign(v), kind));
        }
    }
    let pdt = &(&chain.p_proj * &chain.structure.dtilde) * &chain.t_proj;
    let s_wave_exists = pdt.op_norm() > chain.tol * chain.structure.dtilde.op_norm().max(1e-300);
    ThresholdReport {
        case_label: chain.case,
        lp_verdict: chain.case.verdict(),
        ranks: ChainRanks { s: chain.rank_s, t: chain.rank_t, t_p: chain.rank_tp, t_e: chain.rank_te },
        tolerance: chain.tol,
        borderline: chain.borderline,
        s_wave_exists,
        resonances,
        t_proj: rows(&chain.t_proj),
        tp_proj: rows(&chain.tp_proj),
        te_proj: rows(&chain.te_proj),
    }
}

/// The four hand-checked configurations.
pub mod fixtures {
    use super::*;

    pub fn single() -> PointConfiguration {
        PointConfiguration { alpha: vec![0.0], points: vec![[0.0, 0.0]] }
    }

    pub fn s_wave_pair() -> PointConfiguration {
        PointConfiguration { alpha: vec![1.0, -1.0], points: vec![[-0.5, 0.0], [0.5, 0.0]] }
    }

    pub fn p_wave_pair() -> PointConfiguration {
        PointConfiguration { alpha: vec![0.0, 0.0], points: vec![[-0.5, 0.0], [0.5, 0.0]] }
    }

    pub fn collinear_triple() -> PointConfiguration {
        let a = -(2f64.ln()) / (2.0 * PI);
        PointConfiguration { alpha: vec![a, 0.0, a], points: vec![[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]] }
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn fixture_labels() {
        assert_eq!(classify_default(&single()).unwrap().case_label, CaseLabel::Case1);
        let r = classify_default(&s_wave_pair()).unwrap();
        assert_eq!(r.case_label, CaseLabel::Case2);
        assert!(r.s_wave_exists);
        assert_eq!(r.resonances[0].kind, ResonanceKind::SWave);
        let r = classify_default(&p_wave_pair()).unwrap();
        assert_eq!(r.case_label, CaseLabel::Case3);
        assert_eq!(r.lp_verdict, LpVerdict::UpToTwo);
        let b = r.resonances[0].dipole;
        let a = &r.resonances[0].coeffs;
        assert!((a[0] + a[1]).abs() < 1e-15);
        assert!((b[0] + a[0] / (2.0 * PI)).abs() < 1e-15 && b[1].abs() < 1e-16);
        let r = classify_default(&collinear_triple()).unwrap();
        assert_eq!(r.case_label, CaseLabel::Case5);
        assert_eq!(r.ranks.t_p, 1);
        assert!(!r.borderline);
    }

    #[test]
    fn perpendicular_bisector_is_nodal() {
        let r = classify_default(&p_wave_pair()).unwrap();
        for &y in &[0.3, 2.0, 50.0] {
            assert!(resonance_value(&r.resonances[0], [0.0, y]).unwrap().abs() < 1e-15);
        }
    }
}
