use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result, RocError};
use crate::gibbs::{self, Prior};
use crate::indices::{youden_from_cdfs, YoudenResult};
use crate::mixture::MixtureDraw;
use crate::numeric::{check_sample, mean, std_normal_cdf, variance, ProbGrid, SeedSpec, PROB_TOL};

use super::PosteriorEnsemble;

/// Settings of the truncated Dirichlet process mixture of normals.
///
/// Component parameters have the conjugate centring law
/// `mu ~ N(m, s)`, `1/sigma^2 ~ Gamma(a, rate = b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DpmConfig {
    pub truncation: usize,
    pub m: f64,
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub burn_in: usize,
    pub n_save: usize,
    pub seed: SeedSpec,
}

impl DpmConfig {
    /// Empirical-Bayes defaults: `L = 10`, `alpha = 1`, `m` the sample mean,
    /// `S = 10 var`, `a = 2`, `b = var`, 500 burn-in and 1000 saved draws.
    pub fn with_defaults(sample: &[f64], seed: SeedSpec) -> Result<Self> {
        check_sample("sample", sample)?;
        if sample.len() < 2 {
            return invalid("DPM needs at least two observations");
        }
        let var = variance(sample);
        if !(var > 0.0) {
            return Err(RocError::DegenerateSample(
                "sample variance is zero; the centring law is undefined".into(),
            ));
        }
        Ok(Self {
            truncation: 10,
            m: mean(sample),
            s: 10.0 * var,
            a: 2.0,
            b: var,
            alpha: 1.0,
            burn_in: 500,
            n_save: 1000,
            seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.truncation < 2 {
            return invalid("truncation level must be at least 2");
        }
        if self.n_save == 0 {
            return invalid("n_save must be at least 1");
        }
        let positive = [self.s, self.a, self.b, self.alpha];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) || !self.m.is_finite() {
            return invalid("centring variance, a, b and alpha must be positive and finite");
        }
        Ok(())
    }
}

/// Blocked Gibbs sampler for the truncated DP mixture; returns `n_save`
/// draws after `burn_in` iterations.
pub fn dpm_fit(sample: &[f64], cfg: &DpmConfig) -> Result<Vec<MixtureDraw>> {
    check_sample("sample", sample)?;
    cfg.validate()?;
    let prior = Prior {
        truncation: cfg.truncation,
        alpha: cfg.alpha,
        mean: DVector::from_element(1, cfg.m),
        cov: DMatrix::from_element(1, 1, cfg.s),
        shape: cfg.a,
        rate: cfg.b,
    };
    let z = DMatrix::from_element(sample.len(), 1, 1.0);
    gibbs::run(sample, &z, &prior, cfg.burn_in, cfg.n_save, &cfg.seed)?
        .into_iter()
        .map(|d| {
            MixtureDraw::new(
                d.weights,
                d.coef.into_iter().map(|b| b[0]).collect(),
                d.variances,
            )
        })
        .collect()
}

/// Per-draw curves `1 - F_D(F_Dbar^{-1}(1 - p))` with closed-form AUCs.
pub fn dpm_roc(
    draws_d: &[MixtureDraw],
    draws_nd: &[MixtureDraw],
    grid: &ProbGrid,
) -> Result<PosteriorEnsemble> {
    if draws_d.len() != draws_nd.len() || draws_d.is_empty() {
        return invalid(format!(
            "need equally many draws per group, got {} and {}",
            draws_d.len(),
            draws_nd.len()
        ));
    }
    let mut curves = Vec::with_capacity(draws_d.len());
    let mut aucs = Vec::with_capacity(draws_d.len());
    for (d, nd) in draws_d.iter().zip(draws_nd) {
        curves.push(mixture_roc_curve(d, nd, grid)?);
        aucs.push(dpm_auc(d, nd)?);
    }
    Ok(PosteriorEnsemble {
        grid: grid.clone(),
        curves,
        aucs,
        youden: None,
    })
}

/// ROC curve of one pair of mixture draws.
pub(crate) fn mixture_roc_curve(
    d: &MixtureDraw,
    nd: &MixtureDraw,
    grid: &ProbGrid,
) -> Result<Vec<f64>> {
    d.validate()?;
    nd.validate()?;
    let (lo, hi) = nd.support_bracket();
    let mut curve = Vec::with_capacity(grid.len());
    // grid is increasing in p, so thresholds decrease: shrink the bracket as we go
    let mut upper = hi;
    for &p in grid.points() {
        let level = 1.0 - p;
        let r = if level <= PROB_TOL {
            1.0
        } else if level >= 1.0 - PROB_TOL {
            1.0 - d.cdf(hi)
        } else {
            let c = nd
                .inverse_in(level, lo, upper)
                .or_else(|_| nd.inverse(level))?;
            upper = c.max(lo);
            1.0 - d.cdf(c)
        };
        curve.push(r.clamp(0.0, 1.0));
    }
    Ok(curve)
}

/// Closed-form AUC of a pair of normal mixtures,
/// `sum_k sum_l w_Dbar_k w_D_l Phi(a_kl / sqrt(1 + b_kl^2))` with
/// `a_kl = (mu_D_l - mu_Dbar_k) / sigma_D_l` and `b_kl = sigma_Dbar_k / sigma_D_l`.
pub fn dpm_auc(draw_d: &MixtureDraw, draw_nd: &MixtureDraw) -> Result<f64> {
    for v in draw_d.variances.iter().chain(&draw_nd.variances) {
        if !(*v > 0.0) {
            return Err(RocError::InvalidDraw(
                "component standard deviation is zero".into(),
            ));
        }
    }
    let mut auc = 0.0;
    for ((w_nd, mu_nd), v_nd) in draw_nd
        .weights
        .iter()
        .zip(&draw_nd.means)
        .zip(&draw_nd.variances)
    {
        for ((w_d, mu_d), v_d) in draw_d
            .weights
            .iter()
            .zip(&draw_d.means)
            .zip(&draw_d.variances)
        {
            let sd_d = v_d.sqrt();
            let a = (mu_d - mu_nd) / sd_d;
            let b = v_nd.sqrt() / sd_d;
            auc += w_nd * w_d * std_normal_cdf(a / (1.0 + b * b).sqrt());
        }
    }
    Ok(auc.clamp(0.0, 1.0))
}

/// Youden index and threshold of every draw pair, maximizing
/// `F_Dbar(c) - F_D(c)` over the union of both mixtures' brackets.
pub fn dpm_youden(draws_d: &[MixtureDraw], draws_nd: &[MixtureDraw]) -> Result<Vec<YoudenResult>> {
    if draws_d.len() != draws_nd.len() {
        return invalid("need equally many draws per group");
    }
    draws_d
        .iter()
        .zip(draws_nd)
        .map(|(d, nd)| {
            let (a, b) = d.support_bracket();
            let (c, e) = nd.support_bracket();
            youden_from_cdfs(d, nd, a.min(c), b.max(e))
        })
        .collect()
}
