//! Least-squares helpers for order fitting.

use crate::error::{Error, Result};

/// Solve the normal equations of `y ≈ X β` (small dense problems only).
pub fn least_squares(x: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let m = x.first().map_or(0, |r| r.len());
    if x.len() < m || m == 0 {
        return Err(Error::Fit(format!("{} samples for {} unknowns", x.len(), m)));
    }
    // column scaling keeps the normal matrix well conditioned
    let scale: Vec<f64> = (0..m)
        .map(|j| x.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt().max(1e-300))
        .collect();
    let mut a = vec![vec![0.0; m + 1]; m];
    for (row, &yi) in x.iter().zip(y) {
        for i in 0..m {
            let xi = row[i] / scale[i];
            for j in 0..m {
                a[i][j] += xi * row[j] / scale[j];
            }
            a[i][m] += xi * yi;
        }
    }
    for k in 0..m {
        let p = (k..m)
            .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())
            .unwrap();
        a.swap(k, p);
        if a[k][k].abs() < 1e-14 {
            return Err(Error::Fit("rank-deficient regression".into()));
        }
        for i in 0..m {
            if i != k {
                let f = a[i][k] / a[k][k];
                for j in k..=m {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
    }
    Ok((0..m).map(|i| a[i][m] / a[i][i] / scale[i]).collect())
}

/// Slope of the straight-line fit through `(x, y)` pairs.
pub fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Fitted power `q` in `value ≈ C λ^q |log λ|^k`, with the log exponent `k` either fixed
/// or fitted. Returns `(q, k)`.
pub fn power_with_log(lams: &[f64], values: &[f64], log_power: Option<f64>) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = lams
        .iter()
        .zip(values)
        .filter(|(_, v)| **v > 0.0 && v.is_finite())
        .map(|(l, v)| (*l, *v))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Fit("fewer than three positive samples".into()));
    }
    match log_power {
        Some(k) => {
            let p: Vec<(f64, f64)> = pts.iter().map(|(l, v)| (l.ln(), v.ln() - k * l.ln().abs().ln())).collect();
            Ok((slope(&p), k))
        }
        None => {
            let x: Vec<Vec<f64>> = pts.iter().map(|(l, _)| vec![1.0, l.ln(), l.ln().abs().ln()]).collect();
            let y: Vec<f64> = pts.iter().map(|(_, v)| v.ln()).collect();
            let b = least_squares(&x, &y)?;
            Ok((b[1], b[2]))
        }
    }
}

/// Logarithmically spaced grid from `a` to `b` (inclusive).
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    let mut g: Vec<f64> = (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect();
    g[0] = a;
    g[n - 1] = b;
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_and_log() {
        let l = log_grid(1e-6, 1e-2, 40);
        let v: Vec<f64> = l.iter().map(|x| 3.0 * x * x * x.ln().abs().powi(2)).collect();
        let (q, k) = power_with_log(&l, &v, None).unwrap();
        assert!((q - 2.0).abs() < 1e-8 && (k - 2.0).abs() < 1e-7);
        let (q, _) = power_with_log(&l, &v, Some(2.0)).unwrap();
        assert!((q - 2.0).abs() < 1e-10);
    }
}
