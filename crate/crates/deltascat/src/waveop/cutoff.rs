use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn flat(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth monotone step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    let (a, b) = (flat(t), flat(1.0 - t));
    a / (a + b)
}

/// `χ(λ)`: 1 on `|λ| ≤ 1`, 0 on `|λ| ≥ 2`.
pub fn chi(lam: f64) -> f64 {
    1.0 - smooth_step(lam.abs() - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffPair {
    pub eps: f64,
}

impl CutoffPair {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Input(format!("cutoff scale {eps} must be positive")));
        }
        Ok(CutoffPair { eps })
    }

    /// `χ_{≤ε}(λ) = χ(λ/ε)`.
    pub fn low(&self, lam: f64) -> f64 {
        chi(lam / self.eps)
    }

    /// `χ_{≥ε} = 1 − χ_{≤ε}`.
    pub fn high(&self, lam: f64) -> f64 {
        1.0 - self.low(lam)
    }

    /// End of the support of `χ_{≤ε}`.
    pub fn support_end(&self) -> f64 {
        2.0 * self.eps
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_and_supports() {
        let c = CutoffPair::new(0.3).unwrap();
        let c2 = CutoffPair::new(0.6).unwrap();
        for i in 0..=400 {
            let l = i as f64 * 0.005;
            assert_eq!(c.low(l) + c.high(l), 1.0);
            // supp χ_{≥2ε} ∩ supp χ_{≤ε} = ∅
            assert!(c.low(l) * c2.high(l) == 0.0);
        }
        assert_eq!(chi(0.99), 1.0);
        assert_eq!(chi(2.01), 0.0);
        assert!((chi(1.5) - 0.5).abs() < 1e-15);
    }
}
