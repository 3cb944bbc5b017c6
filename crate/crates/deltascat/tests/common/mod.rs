#![allow(dead_code)]

use std::f64::consts::PI;

use deltascat::classifier::CaseLabel;
use deltascat::operator::PointConfiguration;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Which chain layer a random configuration is built to hit.
#[derive(Clone, Copy, Debug)]
pub enum Target {
    Generic,
    SWave,
    PWave,
    ZeroMode,
}

fn log_dist(p: &[[f64; 2]], j: usize, k: usize) -> f64 {
    (p[j][0] - p[k][0]).hypot(p[j][1] - p[k][1]).ln() / (2.0 * PI)
}

/// Null space of `m` (columns), cut at `tol` relative to the largest singular value.
fn null_space(m: &DMatrix<f64>, tol: f64) -> Vec<Vec<f64>> {
    let n = m.ncols();
    // square up so the SVD sees every right singular vector
    let mut sq = DMatrix::<f64>::zeros(m.nrows().max(n), n);
    sq.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.unwrap();
    let top = svd.singular_values.max();
    (0..n)
        .filter(|&i| svd.singular_values[i] <= tol * top.max(1e-300))
        .map(|i| vt.row(i).iter().copied().collect())
        .collect()
}

/// `D̃` built from scratch.
pub fn dtilde(c: &PointConfiguration) -> DMatrix<f64> {
    let n = c.len();
    DMatrix::from_fn(n, n, |j, k| if j == k { c.alpha[j] } else { log_dist(&c.points, j, k) })
}

/// Layer dimensions `(dim T, dim T_p, dim T_e)` from stacked linear conditions.
///
/// `T = {v ⊥ 1 : D̃v ∈ span 1}`, `T_p = {v ⊥ 1 : D̃v = 0}`, `T_e = {v ∈ T_p : Σv_j y_j = 0}`.
pub fn oracle_dims(c: &PointConfiguration, tol: f64) -> (usize, usize, usize) {
    let n = c.len();
    if n == 1 {
        return (0, 0, 0);
    }
    let d = dtilde(c);
    let scale = d.norm().max(1.0);
    let ones = DMatrix::from_element(1, n, scale / (n as f64).sqrt());
    let centered = &d - DMatrix::from_element(n, n, 1.0 / n as f64) * &d;
    let stack = |blocks: &[&DMatrix<f64>]| {
        let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
        let mut m = DMatrix::zeros(rows, n);
        let mut r = 0;
        for b in blocks {
            m.view_mut((r, 0), (b.nrows(), n)).copy_from(b);
            r += b.nrows();
        }
        m
    };
    let t = null_space(&stack(&[&ones, &centered]), tol).len();
    let tp = null_space(&stack(&[&ones, &d]), tol).len();
    let diam = c.diameter().max(1e-300);
    let ys = DMatrix::from_fn(2, n, |i, j| c.points[j][i] * scale / diam);
    let te = null_space(&stack(&[&ones, &d, &ys]), tol).len();
    (t, tp, te)
}

pub fn oracle_case(c: &PointConfiguration, tol: f64) -> CaseLabel {
    match oracle_dims(c, tol) {
        (0, _, _) => CaseLabel::Case1,
        (_, 0, _) => CaseLabel::Case2,
        (_, _, 0) => CaseLabel::Case3,
        (_, tp, te) if tp == te => CaseLabel::Case5,
        _ => CaseLabel::Case4,
    }
}

/// Random configuration with `n ≤ 4` points, tuned to the requested layer where possible.
pub fn random_config(rng: &mut ChaCha8Rng, n: usize, target: Target) -> PointConfiguration {
    loop {
        let mut points: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]).collect();
        let c0 = PointConfiguration { alpha: vec![0.0; n], points: points.clone() };
        if n > 1 && c0.min_distance() < 0.2 {
            continue;
        }
        let alpha: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if n == 1 || matches!(target, Target::Generic) {
            return PointConfiguration { alpha, points };
        }
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        // two points never carry a zero mode; they fall back to the p-wave construction
        if let Target::ZeroMode = target {
            match n {
                2 => {}
                3 => {
                    // put the third point on the line through the first two
                    let t = rng.gen_range(-1.5..2.5);
                    points[2] = [points[0][0] + t * (points[1][0] - points[0][0]), points[0][1] + t * (points[1][1] - points[0][1])];
                    let c = PointConfiguration { alpha: vec![0.0; 3], points: points.clone() };
                    if c.min_distance() < 0.2 {
                        continue;
                    }
                    v = vec![t - 1.0, -t, 1.0];
                }
                _ => {
                    let m = DMatrix::from_fn(3, n, |i, j| if i == 0 { 1.0 } else { points[j][i - 1] });
                    v = null_space(&m, 1e-12)[0].clone();
                }
            }
        }
        let mean = v.iter().sum::<f64>() / n as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        if v.iter().any(|x| x.abs() < 0.05) {
            continue;
        }
        let c = if let Target::SWave = target { rng.gen_range(0.3..1.0) } else { 0.0 };
        let alpha = (0..n)
            .map(|j| {
                let off: f64 = (0..n).filter(|&k| k != j).map(|k| log_dist(&points, j, k) * v[k]).sum();
                (c - off) / v[j]
            })
            .collect();
        return PointConfiguration { alpha, points };
    }
}
