//! ROC estimation without covariates: empirical, normal-kernel, Bayesian
//! bootstrap and Dirichlet process mixture of normals.

mod bb;
mod dpm;
mod empirical;
mod kernel;

pub use bb::bb_roc;
pub(crate) use dpm::mixture_roc_curve;
pub use dpm::{dpm_auc, dpm_fit, dpm_roc, dpm_youden, DpmConfig};
pub use empirical::{empirical_auc, empirical_roc};
pub use kernel::{
    kernel_auc, kernel_cdf, kernel_roc, lscv_bandwidth, select_bandwidth, silverman_bandwidth,
    BandwidthRule, KernelCdf,
};

use crate::error::{invalid, Result};
use crate::indices::YoudenResult;
use crate::numeric::{percentile_sorted, ProbGrid};

/// An ROC curve evaluated on a grid of false positive fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurveEstimate {
    pub grid: ProbGrid,
    pub roc: Vec<f64>,
    pub band_lo: Option<Vec<f64>>,
    pub band_hi: Option<Vec<f64>>,
    pub auc: f64,
    pub auc_ci: Option<(f64, f64)>,
}

impl RocCurveEstimate {
    pub fn new(grid: ProbGrid, roc: Vec<f64>, auc: f64) -> Result<Self> {
        let est = Self {
            grid,
            roc,
            band_lo: None,
            band_hi: None,
            auc,
            auc_ci: None,
        };
        est.validate()?;
        Ok(est)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.grid.len();
        if self.roc.len() != n {
            return invalid(format!(
                "{} roc values for {} grid points",
                self.roc.len(),
                n
            ));
        }
        if self.roc.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return invalid("roc values must lie in [0, 1]");
        }
        if let (Some(lo), Some(hi)) = (&self.band_lo, &self.band_hi) {
            if lo.len() != n || hi.len() != n {
                return invalid("band length does not match grid");
            }
            let ordered = lo
                .iter()
                .zip(&self.roc)
                .zip(hi)
                .all(|((l, r), h)| l <= r && r <= h);
            if !ordered {
                return invalid("bands must enclose the point estimate");
            }
        }
        Ok(())
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid
            .points()
            .iter()
            .copied()
            .zip(self.roc.iter().copied())
    }
}

/// Per-draw curves and AUCs from a posterior sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorEnsemble {
    pub grid: ProbGrid,
    pub curves: Vec<Vec<f64>>,
    pub aucs: Vec<f64>,
    pub youden: Option<Vec<YoudenResult>>,
}

/// Posterior mean and equal-tail 95% interval of the Youden index and threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorYouden {
    pub mean: YoudenResult,
    pub yi_ci: (f64, f64),
    pub c_star_ci: (f64, f64),
}

fn equal_tail(values: &mut [f64]) -> (f64, f64) {
    values.sort_by(f64::total_cmp);
    (
        percentile_sorted(values, 0.025),
        percentile_sorted(values, 0.975),
    )
}

impl PosteriorEnsemble {
    pub fn len(&self) -> usize {
        self.aucs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aucs.is_empty()
    }

    /// Ensemble mean as point estimate with 2.5/97.5 percentile bands.
    ///
    /// A band endpoint that falls on the wrong side of the mean (possible for
    /// skewed ensembles near the corners) is moved onto the mean.
    pub fn summary(&self) -> Result<RocCurveEstimate> {
        if self.is_empty() {
            return invalid("empty posterior ensemble");
        }
        let s = self.curves.len() as f64;
        let k = self.grid.len();
        let mut roc = Vec::with_capacity(k);
        let mut lo = Vec::with_capacity(k);
        let mut hi = Vec::with_capacity(k);
        let mut column = vec![0.0; self.curves.len()];
        for g in 0..k {
            for (c, curve) in column.iter_mut().zip(&self.curves) {
                *c = curve[g];
            }
            let m = (column.iter().sum::<f64>() / s).clamp(0.0, 1.0);
            let (l, h) = equal_tail(&mut column);
            roc.push(m);
            lo.push(l.min(m));
            hi.push(h.max(m));
        }
        let auc = self.aucs.iter().sum::<f64>() / self.aucs.len() as f64;
        let mut aucs = self.aucs.clone();
        let auc_ci = equal_tail(&mut aucs);
        let est = RocCurveEstimate {
            grid: self.grid.clone(),
            roc,
            band_lo: Some(lo),
            band_hi: Some(hi),
            auc,
            auc_ci: Some(auc_ci),
        };
        est.validate()?;
        Ok(est)
    }

    pub fn youden_summary(&self) -> Option<PosteriorYouden> {
        let draws = self.youden.as_ref().filter(|d| !d.is_empty())?;
        let n = draws.len() as f64;
        let mean = YoudenResult {
            yi: draws.iter().map(|d| d.yi).sum::<f64>() / n,
            c_star: draws.iter().map(|d| d.c_star).sum::<f64>() / n,
            p_star: draws.iter().map(|d| d.p_star).sum::<f64>() / n,
            below_chance: false,
        };
        let mean = YoudenResult {
            below_chance: mean.yi < 0.0,
            ..mean
        };
        let mut yi: Vec<f64> = draws.iter().map(|d| d.yi).collect();
        let mut c: Vec<f64> = draws.iter().map(|d| d.c_star).collect();
        Some(PosteriorYouden {
            mean,
            yi_ci: equal_tail(&mut yi),
            c_star_ci: equal_tail(&mut c),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_is_mean_with_percentile_bands() {
        let grid = ProbGrid::new(vec![0.0, 0.5, 1.0]).unwrap();
        let curves: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![0.0, 0.5 + 0.01 * (i as f64 - 20.0), 1.0])
            .collect();
        let aucs: Vec<f64> = (0..40).map(|i| 0.6 + 0.001 * i as f64).collect();
        let ens = PosteriorEnsemble {
            grid,
            curves,
            aucs,
            youden: None,
        };
        let s = ens.summary().unwrap();
        assert!((s.roc[1] - 0.495).abs() < 1e-12);
        let (lo, hi) = (s.band_lo.unwrap(), s.band_hi.unwrap());
        assert!(lo[1] <= s.roc[1] && s.roc[1] <= hi[1]);
        assert_eq!(s.roc[2], 1.0);
        let (a, b) = s.auc_ci.unwrap();
        assert!(a <= s.auc && s.auc <= b);
    }

    #[test]
    fn skewed_columns_keep_bands_around_mean() {
        let grid = ProbGrid::new(vec![0.0, 1.0]).unwrap();
        let mut curves = vec![vec![1.0, 1.0]; 98];
        curves.push(vec![0.0, 1.0]);
        curves.push(vec![0.0, 1.0]);
        let ens = PosteriorEnsemble {
            grid,
            curves,
            aucs: vec![0.9; 100],
            youden: None,
        };
        let s = ens.summary().unwrap();
        assert!(s.band_lo.as_ref().unwrap()[0] <= s.roc[0]);
    }

    #[test]
    fn estimate_rejects_out_of_range() {
        let grid = ProbGrid::new(vec![0.0, 1.0]).unwrap();
        assert!(RocCurveEstimate::new(grid.clone(), vec![0.0, 1.2], 0.5).is_err());
        assert!(RocCurveEstimate::new(grid, vec![0.0], 0.5).is_err());
    }
}
