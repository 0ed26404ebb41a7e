use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result, RocError};
use crate::gibbs::{self, Prior};
use crate::mixture::MixtureDraw;
use crate::numeric::{solve_increasing, ProbGrid, SeedSpec};
use crate::pooled::{dpm_auc, mixture_roc_curve, PosteriorEnsemble};

use super::induced::ConditionalCdf;
use super::regression::{least_squares, RegressionSample};

/// One draw of a single-weights dependent DP mixture: component `l` has
/// mean `z' coef[l]` and variance `variances[l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DdpDraw {
    pub weights: Vec<f64>,
    pub coef: Vec<Vec<f64>>,
    pub variances: Vec<f64>,
}

impl DdpDraw {
    /// The conditional mixture at a design row.
    pub fn at(&self, z: &[f64]) -> Result<MixtureDraw> {
        if self.coef.iter().any(|b| b.len() != z.len()) {
            return invalid(format!(
                "design row of length {} does not match the coefficients",
                z.len()
            ));
        }
        let means = self
            .coef
            .iter()
            .map(|b| b.iter().zip(z).map(|(u, v)| u * v).sum())
            .collect();
        MixtureDraw::new(self.weights.clone(), means, self.variances.clone())
    }
}

/// DPM settings with a multivariate normal centring law for the coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct DdpConfig {
    pub truncation: usize,
    pub m: Vec<f64>,
    /// Row-major `q x q` centring covariance.
    pub s: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub burn_in: usize,
    pub n_save: usize,
    pub seed: SeedSpec,
}

impl DdpConfig {
    /// `m` = least-squares coefficients, `S = 10 v n (Z'Z)^{-1}`, `a = 2`,
    /// `b = v`, with `v` the residual variance; other settings as the pooled
    /// DPM. A tiny ridge keeps `S` finite for rank-deficient spline designs.
    pub fn with_defaults(sample: &RegressionSample, seed: SeedSpec) -> Result<Self> {
        let n = sample.len();
        let q = sample.columns();
        if n < 2 {
            return invalid("DDP needs at least two observations");
        }
        let z = &sample.design;
        let ztz = z.transpose() * z;
        let sv = z.singular_values();
        let chol = if sv.min() > 1e-10 * sv.max() {
            ztz.clone().cholesky()
        } else {
            None
        };
        let beta = match &chol {
            Some(ch) => ch.solve(&(z.transpose() * DVector::from_column_slice(&sample.outcomes))),
            None => least_squares(z, &sample.outcomes)?,
        };
        let fitted = z * &beta;
        let rss: f64 = sample
            .outcomes
            .iter()
            .zip(fitted.iter())
            .map(|(y, f)| (y - f).powi(2))
            .sum();
        let v = rss / (n - 1) as f64;
        if !(v > 0.0) {
            return Err(RocError::DegenerateSample(
                "residual variance is zero".into(),
            ));
        }
        let inv = match chol {
            Some(ch) => ch.inverse(),
            None => {
                let ridge = 1e-6 * ztz.trace() / q as f64;
                (ztz + DMatrix::identity(q, q) * ridge)
                    .try_inverse()
                    .ok_or_else(|| {
                        RocError::SingularDesign("ridge-regularized Z'Z is singular".into())
                    })?
            }
        };
        let s = inv * (10.0 * v * n as f64);
        Ok(Self {
            truncation: 10,
            m: beta.iter().copied().collect(),
            s: s.transpose().iter().copied().collect(),
            a: 2.0,
            b: v,
            alpha: 1.0,
            burn_in: 500,
            n_save: 1000,
            seed,
        })
    }
}

/// Blocked Gibbs sampler for the dependent DP mixture of normal regressions.
pub fn ddp_fit(sample: &RegressionSample, cfg: &DdpConfig) -> Result<Vec<DdpDraw>> {
    let q = sample.columns();
    if cfg.m.len() != q || cfg.s.len() != q * q {
        return invalid(format!(
            "centring law has dimension {} / {} entries for a {q}-column design",
            cfg.m.len(),
            cfg.s.len()
        ));
    }
    let prior = Prior {
        truncation: cfg.truncation,
        alpha: cfg.alpha,
        mean: DVector::from_column_slice(&cfg.m),
        cov: DMatrix::from_row_slice(q, q, &cfg.s),
        shape: cfg.a,
        rate: cfg.b,
    };
    Ok(gibbs::run(
        &sample.outcomes,
        &sample.design,
        &prior,
        cfg.burn_in,
        cfg.n_save,
        &cfg.seed,
    )?
    .into_iter()
    .map(|d| DdpDraw {
        weights: d.weights,
        coef: d.coef,
        variances: d.variances,
    })
    .collect())
}

/// Per-draw covariate-specific curves and closed-form AUCs at design row `z`.
pub fn ddp_roc(
    draws_d: &[DdpDraw],
    draws_nd: &[DdpDraw],
    z: &[f64],
    grid: &ProbGrid,
) -> Result<PosteriorEnsemble> {
    if draws_d.len() != draws_nd.len() || draws_d.is_empty() {
        return invalid("need equally many draws per group");
    }
    let mut curves = Vec::with_capacity(draws_d.len());
    let mut aucs = Vec::with_capacity(draws_d.len());
    for (d, nd) in draws_d.iter().zip(draws_nd) {
        let (md, mnd) = (d.at(z)?, nd.at(z)?);
        curves.push(mixture_roc_curve(&md, &mnd, grid)?);
        aucs.push(dpm_auc(&md, &mnd)?);
    }
    Ok(PosteriorEnsemble {
        grid: grid.clone(),
        curves,
        aucs,
        youden: None,
    })
}

/// Posterior-mean conditional CDF `(1/S) sum_s F^(s)(y | z)`.
#[derive(Debug, Clone)]
pub struct DdpPosteriorCdf {
    pub draws: Vec<DdpDraw>,
}

impl DdpPosteriorCdf {
    fn mixtures(&self, z: &[f64]) -> Result<Vec<MixtureDraw>> {
        if self.draws.is_empty() {
            return invalid("no posterior draws");
        }
        self.draws.iter().map(|d| d.at(z)).collect()
    }
}

impl ConditionalCdf for DdpPosteriorCdf {
    fn cdf_at(&self, y: f64, z: &[f64]) -> Result<f64> {
        let m = self.mixtures(z)?;
        Ok(m.iter().map(|d| d.cdf(y)).sum::<f64>() / m.len() as f64)
    }

    fn quantile_at(&self, level: f64, z: &[f64]) -> Result<f64> {
        if !(level > 0.0 && level < 1.0) {
            return invalid(format!("conditional quantile level {level} outside (0, 1)"));
        }
        let m = self.mixtures(z)?;
        let (lo, hi) = m
            .iter()
            .map(|d| d.support_bracket())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (c, d)| {
                (a.min(c), b.max(d))
            });
        let s = m.len() as f64;
        solve_increasing(
            |y| m.iter().map(|d| d.cdf(y)).sum::<f64>() / s,
            |y| m.iter().map(|d| d.pdf(y)).sum::<f64>() / s,
            level,
            lo,
            hi,
            1e-12,
            300,
        )
    }
}
