//! Normal-kernel smoothed distribution functions and the induced ROC curve.

use crate::error::{invalid, Result, RocError};
use crate::indices::DistributionFunction;
use crate::numeric::{
    check_sample, percentile_sorted, solve_increasing, sorted_copy, std_normal_cdf, std_normal_pdf,
    variance, ProbGrid,
};

use super::RocCurveEstimate;

/// Bandwidth selectors for the normal kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BandwidthRule {
    /// `0.9 min(sd, IQR / 1.34) n^(-1/5)`.
    #[default]
    SilvermanRobust,
    /// `1.06 sd n^(-1/5)`.
    SilvermanNormal,
    /// Least-squares (unbiased) cross-validation.
    LeastSquaresCv,
}

fn spread(sample: &[f64]) -> Result<(f64, f64)> {
    if sample.len() < 2 {
        return invalid("bandwidth selection needs at least two observations");
    }
    check_sample("bandwidth", sample)?;
    let sd = variance(sample).sqrt();
    if !(sd > 0.0) {
        return Err(RocError::DegenerateSample(
            "constant sample has zero spread".into(),
        ));
    }
    let sorted = sorted_copy(sample);
    let iqr = percentile_sorted(&sorted, 0.75) - percentile_sorted(&sorted, 0.25);
    Ok((sd, iqr))
}

/// Silverman's rule of thumb, robust variant.
pub fn silverman_bandwidth(sample: &[f64]) -> Result<f64> {
    let (sd, iqr) = spread(sample)?;
    let scale = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    Ok(0.9 * scale * (sample.len() as f64).powf(-0.2))
}

pub fn select_bandwidth(sample: &[f64], rule: BandwidthRule) -> Result<f64> {
    match rule {
        BandwidthRule::SilvermanRobust => silverman_bandwidth(sample),
        BandwidthRule::SilvermanNormal => {
            let (sd, _) = spread(sample)?;
            Ok(1.06 * sd * (sample.len() as f64).powf(-0.2))
        }
        BandwidthRule::LeastSquaresCv => lscv_bandwidth(sample),
    }
}

/// Least-squares cross-validation criterion for the normal kernel:
/// `int f_h^2 - (2/n) sum_i f_{h,-i}(x_i)`.
fn lscv_score(sample: &[f64], h: f64) -> f64 {
    let n = sample.len() as f64;
    let mut conv = 0.0; // sum over all pairs of N(x_i - x_j; 0, 2h^2)
    let mut loo = 0.0; // sum over i != j of N(x_i - x_j; 0, h^2)
    for (i, &xi) in sample.iter().enumerate() {
        for &xj in &sample[i + 1..] {
            let d = (xi - xj) / h;
            conv += 2.0 * std_normal_pdf(d / std::f64::consts::SQRT_2) / std::f64::consts::SQRT_2;
            loo += 2.0 * std_normal_pdf(d);
        }
    }
    conv += n * std_normal_pdf(0.0) / std::f64::consts::SQRT_2;
    conv / (n * n * h) - 2.0 * loo / (n * (n - 1.0) * h)
}

/// Bandwidth minimizing the least-squares cross-validation score.
///
/// Coarse log-scale scan over `[h_s / 20, 4 h_s]` around the Silverman value
/// `h_s`, then golden-section refinement in log bandwidth.
pub fn lscv_bandwidth(sample: &[f64]) -> Result<f64> {
    let h0 = silverman_bandwidth(sample)?;
    let (lo, hi) = ((h0 / 20.0).ln(), (4.0 * h0).ln());
    let steps = 40;
    let at = |i: usize| lo + (hi - lo) * i as f64 / steps as f64;
    let best = (0..=steps)
        .map(|i| (i, lscv_score(sample, at(i).exp())))
        .fold(
            (0, f64::INFINITY),
            |acc, (i, s)| if s < acc.1 { (i, s) } else { acc },
        );
    let (mut a, mut b) = (at(best.0.saturating_sub(1)), at((best.0 + 1).min(steps)));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (lscv_score(sample, c.exp()), lscv_score(sample, d.exp()));
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = lscv_score(sample, c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = lscv_score(sample, d.exp());
        }
    }
    let h = (0.5 * (a + b)).exp();
    if !h.is_finite() || h <= 0.0 {
        return Err(RocError::Numeric(format!(
            "cross-validation produced bandwidth {h}"
        )));
    }
    Ok(h)
}

/// `F(y) = (1/n) sum_i Phi((y - y_i) / h)`.
#[derive(Debug, Clone)]
pub struct KernelCdf {
    sorted: Vec<f64>,
    h: f64,
}

impl KernelCdf {
    pub fn new(sample: &[f64], h: f64) -> Result<Self> {
        check_sample("kernel", sample)?;
        if !(h > 0.0 && h.is_finite()) {
            return invalid(format!("bandwidth must be positive, got {h}"));
        }
        Ok(Self {
            sorted: sorted_copy(sample),
            h,
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    pub fn eval(&self, y: f64) -> f64 {
        let s: f64 = self
            .sorted
            .iter()
            .map(|&x| std_normal_cdf((y - x) / self.h))
            .sum();
        (s / self.sorted.len() as f64).clamp(0.0, 1.0)
    }

    pub fn density(&self, y: f64) -> f64 {
        let s: f64 = self
            .sorted
            .iter()
            .map(|&x| std_normal_pdf((y - x) / self.h))
            .sum();
        s / (self.sorted.len() as f64 * self.h)
    }

    /// Solves `F(y) = level` for `level` in (0, 1) to within `1e-12`.
    pub fn inverse(&self, level: f64) -> Result<f64> {
        self.inverse_from(level, None)
    }

    fn inverse_from(&self, level: f64, start: Option<f64>) -> Result<f64> {
        let lo = self.sorted[0] - 40.0 * self.h;
        let hi = self.sorted[self.sorted.len() - 1] + 40.0 * self.h;
        let (lo, hi) = match start {
            Some(s) => {
                // warm start: narrow the bracket on the side the target lies
                if self.eval(s) >= level {
                    (lo, s)
                } else {
                    (s, hi)
                }
            }
            None => (lo, hi),
        };
        solve_increasing(
            |y| self.eval(y),
            |y| self.density(y),
            level,
            lo,
            hi,
            1e-12,
            200,
        )
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max(&self) -> f64 {
        self.sorted[self.sorted.len() - 1]
    }
}

impl DistributionFunction for KernelCdf {
    fn cdf(&self, y: f64) -> f64 {
        self.eval(y)
    }
}

pub fn kernel_cdf(sample: &[f64], h: f64, y: f64) -> Result<f64> {
    Ok(KernelCdf::new(sample, h)?.eval(y))
}

/// ROC curve induced by the two kernel distribution functions.
pub fn kernel_roc(
    diseased: &[f64],
    nondiseased: &[f64],
    h_d: f64,
    h_nd: f64,
    grid: &ProbGrid,
) -> Result<RocCurveEstimate> {
    let f_d = KernelCdf::new(diseased, h_d)?;
    let f_nd = KernelCdf::new(nondiseased, h_nd)?;
    let mut roc = Vec::with_capacity(grid.len());
    let mut last = None;
    for &p in grid.points() {
        let level = 1.0 - p;
        let r = if level >= 1.0 {
            0.0
        } else if level <= 0.0 {
            1.0
        } else {
            let c = f_nd.inverse_from(level, last)?;
            last = Some(c);
            1.0 - f_d.eval(c)
        };
        roc.push(r.clamp(0.0, 1.0));
    }
    RocCurveEstimate::new(
        grid.clone(),
        roc,
        kernel_auc(diseased, nondiseased, h_d, h_nd)?,
    )
}

/// Closed-form AUC of the normal-kernel estimator.
pub fn kernel_auc(diseased: &[f64], nondiseased: &[f64], h_d: f64, h_nd: f64) -> Result<f64> {
    check_sample("diseased", diseased)?;
    check_sample("nondiseased", nondiseased)?;
    for h in [h_d, h_nd] {
        if !(h > 0.0 && h.is_finite()) {
            return invalid(format!("bandwidth must be positive, got {h}"));
        }
    }
    let scale = (h_d * h_d + h_nd * h_nd).sqrt();
    let total: f64 = diseased
        .iter()
        .map(|&yd| {
            nondiseased
                .iter()
                .map(|&ynd| std_normal_cdf((yd - ynd) / scale))
                .sum::<f64>()
        })
        .sum();
    Ok(total / (diseased.len() as f64 * nondiseased.len() as f64))
}
