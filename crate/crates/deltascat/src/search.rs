//! Randomized construction of Case4 configurations.
//!
//! Case4 needs `dim T_p ≥ 2` with `T_pΓ₁T_p` singular but nonzero. On `T_p` the form
//! `Γ₁` is `|Σ a_j y_j|²/2N`, so `T_e` is spanned by affine dependences of the points.
//! For four points the affine dependence `b` is unique; the search looks for points and a
//! second direction `a` such that one choice of couplings puts both `a` and `b` in `ker D̃`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classifier::{classify, CaseLabel};
use crate::linalg::KERNEL_TOL;
use crate::matrix::Mat;
use crate::operator::{build_structure_in, PointConfiguration};

const NEWTON_STEPS: usize = 60;
const SOLVED: f64 = 1e-14;

/// Search for a Case4 configuration with `n` points. `None` for `n ≤ 3`, where none exist.
pub fn case4_search(n: usize, trials: usize, seed: u64) -> Option<PointConfiguration> {
    if n < 4 {
        return None;
    }
    (0..trials).into_par_iter().find_map_first(|t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(t as u64));
        let (points, a, b) = solve_four(&mut rng)?;
        let mut config = couplings(points, &a, &b);
        if !extend(&mut config, &a, &b, n, &mut rng) {
            return None;
        }
        let report = classify(&config, KERNEL_TOL).ok()?;
        (report.case_label == CaseLabel::Case4 && !report.borderline).then_some(config)
    })
}

/// Off-diagonal part of `D̃`: `log|y_j − y_k|/2π`.
fn log_matrix(points: &[[f64; 2]]) -> Mat<f64> {
    build_structure_in(&vec![0.0; points.len()], points).dtilde
}

/// Unit affine dependence of four points: `Σb_j = 0`, `Σb_j y_j = 0`.
pub fn affine_dependence(p: &[[f64; 2]]) -> [f64; 4] {
    let rows = |skip: usize| -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        let mut c = 0;
        for (j, q) in p.iter().enumerate() {
            if j != skip {
                m[0][c] = 1.0;
                m[1][c] = q[0];
                m[2][c] = q[1];
                c += 1;
            }
        }
        m
    };
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let mut b = [0.0; 4];
    for (j, bj) in b.iter_mut().enumerate() {
        let s = if j % 2 == 0 { 1.0 } else { -1.0 };
        *bj = s * det3(rows(j));
    }
    let norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    b.map(|x| x / norm)
}

fn direction(theta: f64) -> [f64; 4] {
    let u = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0, 0.0];
    let v = [1.0 / 6f64.sqrt(), 1.0 / 6f64.sqrt(), -2.0 / 6f64.sqrt(), 0.0];
    let w = [1.0, 1.0, 1.0, -3.0].map(|x| x / 12f64.sqrt());
    // a circle through u and w: b is rarely in this plane and v is covered through mixing
    let (c, s) = (theta.cos(), theta.sin());
    std::array::from_fn(|j| c * u[j] + s * (0.6 * v[j] + 0.8 * w[j]))
}

fn unpack(x: &[f64; 5]) -> (Vec<[f64; 2]>, [f64; 4]) {
    (vec![[0.0, 0.0], [1.0, 0.0], [x[0], x[1]], [x[2], x[3]]], direction(x[4]))
}

/// `a_j(Lb)_j − b_j(La)_j` for `j < 3`; the four components always sum to zero.
fn residual(x: &[f64; 5]) -> [f64; 3] {
    let (p, a) = unpack(x);
    let b = affine_dependence(&p);
    let l = log_matrix(&p);
    let la = l.mul_vec(&a);
    let lb = l.mul_vec(&b);
    std::array::from_fn(|j| a[j] * lb[j] - b[j] * la[j])
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn solve_four(rng: &mut ChaCha8Rng) -> Option<(Vec<[f64; 2]>, [f64; 4], [f64; 4])> {
    let mut x: [f64; 5] = std::array::from_fn(|k| if k < 4 { rng.gen_range(-2.0..2.0) } else { rng.gen_range(0.0..std::f64::consts::PI) });
    for _ in 0..NEWTON_STEPS {
        let f = residual(&x);
        if norm(&f) < SOLVED {
            break;
        }
        // minimal-norm Gauss-Newton step with a central-difference Jacobian
        let h = 1e-7;
        let mut jac = Mat::<f64>::zeros(3, 5);
        for k in 0..5 {
            let (mut xp, mut xm) = (x, x);
            xp[k] += h;
            xm[k] -= h;
            let (fp, fm) = (residual(&xp), residual(&xm));
            for i in 0..3 {
                jac[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let jjt = &jac * &jac.transpose();
        let y = jjt.inverse().ok()?.mul_vec(&f);
        let mut step = jac.transpose().mul_vec(&y);
        let s = norm(&step);
        if s > 0.5 {
            step.iter_mut().for_each(|v| *v *= 0.5 / s);
        }
        for k in 0..5 {
            x[k] -= step[k];
        }
    }
    if norm(&residual(&x)) >= SOLVED {
        return None;
    }
    let (p, a) = unpack(&x);
    let b = affine_dependence(&p);
    // well separated, no three points nearly collinear
    let cfg = PointConfiguration { alpha: vec![0.0; 4], points: p.clone() };
    if cfg.min_distance() < 0.1 * cfg.diameter() || cfg.diameter() > 20.0 || b.iter().any(|v| v.abs() < 0.05) {
        return None;
    }
    Some((p, a, b))
}

/// Couplings putting `a` and `b` into `ker D̃` (exact when the residual vanishes).
fn couplings(points: Vec<[f64; 2]>, a: &[f64], b: &[f64]) -> PointConfiguration {
    let l = log_matrix(&points);
    let la = l.mul_vec(a);
    let lb = l.mul_vec(b);
    let alpha = (0..points.len())
        .map(|j| -(a[j] * la[j] + b[j] * lb[j]) / (a[j] * a[j] + b[j] * b[j]))
        .collect();
    PointConfiguration { alpha, points }
}

/// Add points on the common zero set of `Σa_j log|x − y_j|` and `Σb_j log|x − y_j|`.
fn extend(config: &mut PointConfiguration, a: &[f64], b: &[f64], n: usize, rng: &mut ChaCha8Rng) -> bool {
    let base: Vec<[f64; 2]> = config.points.clone();
    let scale = config.diameter();
    while config.len() < n {
        let mut found = None;
        for _ in 0..20 {
            let mut x = [rng.gen_range(-2.0..2.0) * scale, rng.gen_range(-2.0..2.0) * scale];
            for _ in 0..NEWTON_STEPS {
                let (mut f, mut jac) = ([0.0; 2], [[0.0; 2]; 2]);
                for (j, y) in base.iter().enumerate() {
                    let d = [x[0] - y[0], x[1] - y[1]];
                    let r2 = d[0] * d[0] + d[1] * d[1];
                    let lg = 0.5 * r2.ln();
                    for (row, c) in [a[j], b[j]].into_iter().enumerate() {
                        f[row] += c * lg;
                        jac[row][0] += c * d[0] / r2;
                        jac[row][1] += c * d[1] / r2;
                    }
                }
                if norm(&f) < SOLVED {
                    break;
                }
                let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
                if det.abs() < 1e-300 {
                    break;
                }
                let mut dx = [(jac[1][1] * f[0] - jac[0][1] * f[1]) / det, (jac[0][0] * f[1] - jac[1][0] * f[0]) / det];
                let s = norm(&dx);
                if s > 0.5 * scale {
                    dx = dx.map(|v| v * 0.5 * scale / s);
                }
                x = [x[0] - dx[0], x[1] - dx[1]];
            }
            let far = config.points.iter().all(|p| ((p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2)).sqrt() > 0.1 * scale);
            let f = base.iter().enumerate().fold([0.0, 0.0], |s, (j, y)| {
                let lg = 0.5 * ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).ln();
                [s[0] + a[j] * lg, s[1] + b[j] * lg]
            });
            if far && norm(&f) < 1e-13 && x[0].hypot(x[1]) < 10.0 * scale {
                found = Some(x);
                break;
            }
        }
        let Some(x) = found else { return false };
        config.points.push(x);
        config.alpha.push(rng.gen_range(-1.0..1.0));
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_n_has_none() {
        assert!(case4_search(2, 10, 1).is_none());
        assert!(case4_search(3, 10, 1).is_none());
    }

    #[test]
    fn affine_dependence_is_one() {
        let p = [[0.0, 0.0], [1.0, 0.0], [0.3, 1.2], [-0.4, 0.7]];
        let b = affine_dependence(&p);
        assert!(b.iter().sum::<f64>().abs() < 1e-15);
        for c in 0..2 {
            assert!(b.iter().zip(&p).map(|(w, q)| w * q[c]).sum::<f64>().abs() < 1e-15);
        }
    }
}
