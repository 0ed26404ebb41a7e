//! Finite location-scale mixtures of normals, the state saved by the
//! stick-breaking samplers.

use crate::error::{Result, RocError};
use crate::indices::DistributionFunction;
use crate::numeric::{solve_increasing, std_normal_cdf, std_normal_pdf};

/// One posterior draw of a truncated stick-breaking normal mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureDraw {
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

impl MixtureDraw {
    pub fn new(weights: Vec<f64>, means: Vec<f64>, variances: Vec<f64>) -> Result<Self> {
        let m = Self {
            weights,
            means,
            variances,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.weights.len();
        if l == 0 || self.means.len() != l || self.variances.len() != l {
            return Err(RocError::InvalidDraw(format!(
                "component arrays have lengths {}, {}, {}",
                l,
                self.means.len(),
                self.variances.len()
            )));
        }
        if self.weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(RocError::InvalidDraw("negative or NaN weight".into()));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(RocError::InvalidDraw(format!("weights sum to {total}")));
        }
        if self.variances.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(RocError::InvalidDraw("variances must be positive".into()));
        }
        if self.means.iter().any(|m| !m.is_finite()) {
            return Err(RocError::InvalidDraw("non-finite component mean".into()));
        }
        Ok(())
    }

    pub fn components(&self) -> usize {
        self.weights.len()
    }

    pub fn cdf(&self, y: f64) -> f64 {
        let s: f64 = self
            .weights
            .iter()
            .zip(&self.means)
            .zip(&self.variances)
            .filter(|((w, _), _)| **w > 0.0)
            .map(|((w, m), v)| w * std_normal_cdf((y - m) / v.sqrt()))
            .sum();
        s.clamp(0.0, 1.0)
    }

    pub fn pdf(&self, y: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.means)
            .zip(&self.variances)
            .filter(|((w, _), _)| **w > 0.0)
            .map(|((w, m), v)| {
                let sd = v.sqrt();
                w * std_normal_pdf((y - m) / sd) / sd
            })
            .sum()
    }

    /// Bracket `[min mean - 10 max sd, max mean + 10 max sd]`.
    pub fn support_bracket(&self) -> (f64, f64) {
        let max_sd = self.variances.iter().fold(0.0_f64, |a, v| a.max(v.sqrt()));
        let lo = self.means.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo - 10.0 * max_sd, hi + 10.0 * max_sd)
    }

    /// Solves `F(y) = level` for `level` in (0, 1) to within `1e-12`.
    pub fn inverse(&self, level: f64) -> Result<f64> {
        let (lo, hi) = self.support_bracket();
        self.inverse_in(level, lo, hi)
    }

    pub(crate) fn inverse_in(&self, level: f64, lo: f64, hi: f64) -> Result<f64> {
        solve_increasing(|y| self.cdf(y), |y| self.pdf(y), level, lo, hi, 1e-12, 200)
    }
}

impl DistributionFunction for MixtureDraw {
    fn cdf(&self, y: f64) -> f64 {
        MixtureDraw::cdf(self, y)
    }
}

/// Pointwise average of several mixture CDFs (a posterior-mean CDF).
#[derive(Debug, Clone)]
pub struct MixtureAverage<'a> {
    pub draws: &'a [MixtureDraw],
}

impl DistributionFunction for MixtureAverage<'_> {
    fn cdf(&self, y: f64) -> f64 {
        self.draws.iter().map(|d| d.cdf(y)).sum::<f64>() / self.draws.len() as f64
    }
}
