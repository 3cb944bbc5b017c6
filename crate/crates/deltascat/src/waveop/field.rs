//! Polar sampling grids and `L^p` norms.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tail contribution accepted by [`SampledField::lp_norm`].
pub const TAIL_LIMIT: f64 = 1e-4;

/// Geometric radii with Simpson weights in `log r`, uniform angles.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarGrid {
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
    /// Weights for `∫ f r dr` at each radius.
    pub radial_weights: Vec<f64>,
    pub angular_weight: f64,
}

impl PolarGrid {
    pub fn log_polar(r_min: f64, r_max: f64, n_r: usize, n_theta: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min) || n_r < 3 || n_theta < 1 {
            return Err(Error::Input(format!("bad polar grid [{r_min}, {r_max}] × {n_r} × {n_theta}")));
        }
        let n = if n_r % 2 == 0 { n_r + 1 } else { n_r };
        let h = (r_max / r_min).ln() / (n - 1) as f64;
        let radii: Vec<f64> = (0..n).map(|i| r_min * (h * i as f64).exp()).collect();
        let radial_weights = radii
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let s = if i == 0 || i == n - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                s * h / 3.0 * r * r
            })
            .collect();
        let dth = 2.0 * std::f64::consts::PI / n_theta as f64;
        Ok(PolarGrid { radii, angles: (0..n_theta).map(|k| k as f64 * dth).collect(), radial_weights, angular_weight: dth })
    }

    /// Geometric radii on `[r_min, r_c]` joined to uniform radii on `[r_c, r_max]`.
    pub fn log_linear(r_min: f64, r_c: f64, r_max: f64, n_log: usize, n_lin: usize, n_theta: usize) -> Result<Self> {
        if !(r_c > r_min && r_max > r_c) || n_lin < 3 {
            return Err(Error::Input(format!("bad composite grid {r_min} < {r_c} < {r_max}")));
        }
        let mut g = Self::log_polar(r_min, r_c, n_log, n_theta)?;
        let n = if n_lin % 2 == 0 { n_lin + 1 } else { n_lin };
        let h = (r_max - r_c) / (n - 1) as f64;
        *g.radial_weights.last_mut().unwrap() += h / 3.0 * r_c;
        for i in 1..n {
            let r = r_c + h * i as f64;
            let s = if i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            g.radii.push(r);
            g.radial_weights.push(s * h / 3.0 * r);
        }
        Ok(g)
    }

    /// Rotate the angular nodes by `phi`.
    pub fn rotated(mut self, phi: f64) -> Self {
        self.angles.iter_mut().for_each(|a| *a += phi);
        self
    }

    /// Same grid with every radius multiplied by `t`.
    pub fn scaled(&self, t: f64) -> Self {
        PolarGrid {
            radii: self.radii.iter().map(|r| r * t).collect(),
            angles: self.angles.clone(),
            radial_weights: self.radial_weights.iter().map(|w| w * t * t).collect(),
            angular_weight: self.angular_weight,
        }
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cartesian points, radius-major.
    pub fn points(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(self.len());
        for &r in &self.radii {
            for &a in &self.angles {
                out.push([r * a.cos(), r * a.sin()]);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    pub grid: Arc<PolarGrid>,
    pub values: Vec<Complex64>,
    pub label: String,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpNorm {
    pub value: f64,
    /// Share of `∫|f|ᵖ` in the outermost radial shells.
    pub tail: f64,
    /// Estimated share of the disc inside the smallest radius.
    pub core: f64,
}

impl SampledField {
    pub fn new(grid: Arc<PolarGrid>, values: Vec<Complex64>, label: &str) -> Self {
        assert_eq!(grid.len(), values.len());
        SampledField { grid, values, label: label.to_string() }
    }

    pub fn from_fn(grid: Arc<PolarGrid>, label: &str, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Self::new(grid, values, label)
    }

    pub fn at(&self, i_r: usize, i_th: usize) -> Complex64 {
        self.values[i_r * self.grid.angles.len() + i_th]
    }

    /// `(∫|f|ᵖ)^{1/p}` without the tail certificate.
    pub fn lp_norm_unchecked(&self, p: f64) -> LpNorm {
        let na = self.grid.angles.len();
        let nr = self.grid.radii.len();
        let shell: Vec<f64> = (0..nr)
            .map(|i| {
                let s: f64 = (0..na).map(|k| self.at(i, k).norm().powf(p)).sum();
                s * self.grid.angular_weight * self.grid.radial_weights[i]
            })
            .collect();
        let total: f64 = shell.iter().sum();
        let outer = (nr / 20).max(3);
        let tail = shell[nr - outer..].iter().sum::<f64>() / total.max(f64::MIN_POSITIVE);
        let r0 = self.grid.radii[0];
        let inner_mean = (0..na).map(|k| self.at(0, k).norm().powf(p)).sum::<f64>() / na as f64;
        let core = inner_mean * std::f64::consts::PI * r0 * r0 / total.max(f64::MIN_POSITIVE);
        LpNorm { value: total.powf(1.0 / p), tail, core }
    }

    /// `‖f‖_p` with a certificate that the truncated regions are negligible.
    pub fn lp_norm(&self, p: f64) -> Result<LpNorm> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Input(format!("p = {p} outside (1, ∞)")));
        }
        let n = self.lp_norm_unchecked(p);
        if n.tail > TAIL_LIMIT || n.core > TAIL_LIMIT {
            return Err(Error::Resolution(format!(
                "{}: truncated share of ∫|f|^{p} is {:.3e} (outer) / {:.3e} (inner); enlarge the grid",
                self.label, n.tail, n.core
            )));
        }
        Ok(n)
    }

    pub fn map(&self, label: &str, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect(), label)
    }

    pub fn zip(&self, other: &Self, label: &str, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert!(Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid);
        Self::new(self.grid.clone(), self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(), label)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// `max|f − g| / max|g|`.
    pub fn relative_difference(&self, other: &Self) -> f64 {
        let d = self.values.iter().zip(&other.values).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        d / other.max_abs().max(f64::MIN_POSITIVE)
    }
}
