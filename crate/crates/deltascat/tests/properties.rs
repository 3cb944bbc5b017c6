mod common;

use std::sync::Arc;

use common::{oracle_case, random_config, Target};
use deltascat::classifier::{classify_default, ThresholdReport};
use deltascat::linalg::{feshbach_invert, jensen_nenciu_invert, split_blocks, KERNEL_TOL};
use deltascat::matrix::{projector, Mat};
use deltascat::operator::{build_gamma, PointConfiguration};
use deltascat::spectral::{bound_state_function, gamma_imaginary, negative_eigenvalues};
use deltascat::waveop::probe::{classify_trend, Trend};
use deltascat::waveop::{PolarGrid, SampledField};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn target(k: u8) -> Target {
    [Target::Generic, Target::SWave, Target::PWave, Target::ZeroMode][k as usize % 4]
}

fn config(seed: u64, n: usize, k: u8) -> PointConfiguration {
    random_config(&mut ChaCha8Rng::seed_from_u64(seed), n, target(k))
}

fn complex_matrix(entries: &[(f64, f64)], n: usize, shift: f64) -> Mat<Complex64> {
    Mat::from_fn(n, n, |i, j| {
        let (re, im) = entries[i * n + j];
        Complex64::new(re + if i == j { shift } else { 0.0 }, im)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classification_survives_rigid_motion(seed in any::<u64>(), n in 1usize..=4, k in 0u8..4, theta in 0.0..6.3f64, dx in -3.0..3.0f64, dy in -3.0..3.0f64) {
        let c = config(seed, n, k);
        let a = classify_default(&c).unwrap();
        let b = classify_default(&c.moved(theta, [dx, dy])).unwrap();
        prop_assert_eq!(a.case_label, b.case_label);
        prop_assert_eq!(a.ranks, b.ranks);
    }

    #[test]
    fn classifier_matches_oracle(seed in any::<u64>(), n in 1usize..=4, k in 0u8..4) {
        let c = config(seed, n, k);
        prop_assert_eq!(classify_default(&c).unwrap().case_label, oracle_case(&c, KERNEL_TOL));
    }

    #[test]
    fn report_json_round_trip(seed in any::<u64>(), n in 1usize..=4, k in 0u8..4) {
        let r = classify_default(&config(seed, n, k)).unwrap();
        let s = serde_json::to_string_pretty(&r).unwrap();
        let back: ThresholdReport = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(serde_json::to_string_pretty(&back).unwrap(), s);
    }

    #[test]
    fn gamma_is_complex_symmetric(seed in any::<u64>(), n in 1usize..=4, re in 0.05..5.0f64, im in 0.0..5.0f64) {
        let g = build_gamma(&config(seed, n, 0), Complex64::new(re, im)).unwrap();
        prop_assert!((&g - &g.transpose()).max_abs() == 0.0);
    }

    #[test]
    fn gamma_on_imaginary_axis_is_real(seed in any::<u64>(), n in 1usize..=4, kappa in 0.01..20.0f64) {
        let c = config(seed, n, 0);
        let g = build_gamma(&c, Complex64::new(0.0, kappa)).unwrap();
        prop_assert!(g.imag_part().max_abs() < 1e-14 * (1.0 + g.max_abs()));
        let det = g.det();
        prop_assert!(det.im.abs() <= 1e-12 * (1.0 + det.norm()));
    }

    #[test]
    fn gamma_eigenvalues_increase_with_kappa(seed in any::<u64>(), n in 1usize..=4, kappa in 0.01..10.0f64) {
        let c = config(seed, n, 0);
        let lo = deltascat::matrix::sym_eigen(&gamma_imaginary(&c, kappa).unwrap()).values;
        let hi = deltascat::matrix::sym_eigen(&gamma_imaginary(&c, kappa * 1.1).unwrap()).values;
        for (a, b) in lo.iter().zip(&hi) {
            prop_assert!(b > a);
        }
    }

    #[test]
    fn jensen_nenciu_and_feshbach_invert(
        entries in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 36),
        basis in proptest::collection::vec(-1.0..1.0f64, 36),
        n in 2usize..=6,
        k in 1usize..6,
    ) {
        let k = k.min(n - 1);
        let a = complex_matrix(&entries, n, n as f64);
        let mut vs: Vec<Vec<f64>> = Vec::new();
        for j in 0..k {
            let mut v: Vec<f64> = basis[j * n..(j + 1) * n].to_vec();
            for q in &vs {
                let d: f64 = v.iter().zip(q).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-3);
            vs.push(v.into_iter().map(|x| x / norm).collect());
        }
        let s = projector(n, &vs).to_complex();
        let jn = jensen_nenciu_invert(&a, &s).unwrap();
        prop_assert!(a.inverse_residual(jn.inverse.as_ref().unwrap()) < 1e-12);
        let (a11, a12, a21, a22) = split_blocks(&a, k);
        prop_assert!(a.inverse_residual(&feshbach_invert(&a11, &a12, &a21, &a22).unwrap()) < 1e-12);
    }

    #[test]
    fn trend_verdict_is_scale_free(ratios in proptest::collection::vec(1e-3..1e3f64, 9), c in 1e-6..1e6f64) {
        let scaled: Vec<f64> = ratios.iter().map(|r| r * c).collect();
        prop_assert_eq!(classify_trend(&ratios), classify_trend(&scaled));
    }
}

#[test]
fn geometric_growth_is_growing_and_decay_is_bounded() {
    let up: Vec<f64> = (0..9).map(|n| 1.4f64.powi(n)).collect();
    let down: Vec<f64> = (0..9).map(|n| 0.5f64.powi(n)).collect();
    assert_eq!(classify_trend(&up), Trend::Growing);
    assert_eq!(classify_trend(&down), Trend::Bounded);
}

#[test]
fn lp_norm_scales_with_dilation() {
    let grid = PolarGrid::log_polar(1e-4, 12.0, 601, 8).unwrap();
    let f = |x: [f64; 2]| Complex64::new((-(x[0] * x[0] + x[1] * x[1])).exp() * (1.0 + 0.3 * x[0]), 0.0);
    let a = SampledField::from_fn(Arc::new(grid.clone()), "f", f);
    for t in [0.5, 3.0] {
        let b = SampledField::from_fn(Arc::new(grid.scaled(t)), "f(·/t)", |x| f([x[0] / t, x[1] / t]));
        for p in [1.5, 4.0] {
            let want = t.powf(2.0 / p) * a.lp_norm(p).unwrap().value;
            let got = b.lp_norm(p).unwrap().value;
            assert!((got / want - 1.0).abs() < 1e-12, "t={t} p={p}: {got} vs {want}");
        }
    }
}

#[test]
fn sampled_fields_combine_linearly() {
    let grid = Arc::new(PolarGrid::log_polar(1e-3, 8.0, 201, 6).unwrap());
    let u = SampledField::from_fn(grid.clone(), "u", |x| Complex64::new((-x[0] * x[0] - x[1] * x[1]).exp(), x[1]));
    let v = SampledField::from_fn(grid, "v", |x| Complex64::new(x[0], 1.0) * (-(x[0] * x[0] + x[1] * x[1])).exp());
    let c = Complex64::new(0.3, -1.2);
    let w = u.zip(&v, "u + cv", |a, b| a + c * b);
    let again = u.zip(&v.map("cv", |b| c * b), "u + cv", |a, b| a + b);
    assert!(w.relative_difference(&again) < 1e-15);
}

#[test]
fn bound_states_solve_helmholtz() {
    let c = PointConfiguration::new(vec![-0.2, 0.1, 0.0], vec![[-0.6, 0.0], [0.5, 0.3], [0.1, -0.9]]).unwrap();
    let sp = negative_eigenvalues(&c, (1e-3, 50.0), 1e-12).unwrap();
    assert!(!sp.records.is_empty());
    let h = 1e-3;
    for rec in &sp.records {
        for x in [[1.7, 0.4], [-1.2, 1.5], [0.3, -2.1]] {
            let psi = |d: [f64; 2]| bound_state_function(rec, &c, [x[0] + d[0], x[1] + d[1]]).unwrap();
            let lap = (psi([h, 0.0]) + psi([-h, 0.0]) + psi([0.0, h]) + psi([0.0, -h]) - psi([0.0, 0.0]) * 4.0) / (h * h);
            let res = (-lap + psi([0.0, 0.0]) * rec.kappa * rec.kappa).norm();
            // five-point stencil error is O(h²)
            assert!(res < 1e-5 * (1.0 + rec.kappa.powi(4)) * psi([0.0, 0.0]).norm().max(1e-3), "κ={} res={res:e}", rec.kappa);
        }
    }
}

#[test]
fn bound_states_decay_monotonically() {
    let c = PointConfiguration::new(vec![0.3], vec![[0.0, 0.0]]).unwrap();
    let rec = &negative_eigenvalues(&c, (1e-3, 50.0), 1e-12).unwrap().records[0];
    let vals: Vec<f64> = (1..40).map(|k| bound_state_function(rec, &c, [0.25 * k as f64, 0.0]).unwrap().norm()).collect();
    assert!(vals.windows(2).all(|w| w[1] < w[0]));
}
