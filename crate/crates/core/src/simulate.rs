//! Scenario generators with known ROC curves, AUCs and Youden indices.

use rand::Rng;
use rand_distr::{Exp, Normal, StandardNormal};

use crate::binary::DiagnosticSample;
use crate::covariate::RegressionSample;
use crate::error::{invalid, Result};
use crate::indices::YoudenResult;
use crate::numeric::{std_normal_cdf, std_normal_quantile_unchecked, SeedSpec};
use crate::timedep::SurvivalSample;

/// Nondiseased `N(0, 1)`, diseased `N(a / b, 1 / b^2)`, so that
/// `ROC(p) = Phi(a + b Phi^{-1}(p))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinormalScenario {
    pub a: f64,
    pub b: f64,
    pub n_d: usize,
    pub n_nd: usize,
    pub seed: SeedSpec,
}

fn check_ab(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && b > 0.0) {
        return invalid(format!(
            "binormal parameters a = {a}, b = {b} need finite a and b > 0"
        ));
    }
    Ok(())
}

fn normal_draws(n: usize, mean: f64, sd: f64, seed: SeedSpec) -> Vec<f64> {
    let mut rng = seed.rng();
    (0..n)
        .map(|_| mean + sd * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Groups use separate substreams, so changing one group's size leaves the
/// other group's draws unchanged.
pub fn gen_binormal(sc: &BinormalScenario) -> Result<DiagnosticSample> {
    check_ab(sc.a, sc.b)?;
    if sc.n_d == 0 || sc.n_nd == 0 {
        return invalid("both groups need at least one subject");
    }
    DiagnosticSample::new(
        normal_draws(sc.n_d, sc.a / sc.b, 1.0 / sc.b, sc.seed.substream(0)),
        normal_draws(sc.n_nd, 0.0, 1.0, sc.seed.substream(1)),
    )
}

pub fn true_binormal_roc(a: f64, b: f64, p: f64) -> Result<f64> {
    check_ab(a, b)?;
    crate::numeric::check_prob("FPF", p)?;
    Ok(match p {
        0.0 => 0.0,
        1.0 => 1.0,
        _ => std_normal_cdf(a + b * std_normal_quantile_unchecked(p)),
    })
}

pub fn true_binormal_auc(a: f64, b: f64) -> Result<f64> {
    check_ab(a, b)?;
    Ok(std_normal_cdf(a / (1.0 + b * b).sqrt()))
}

/// Maximizer of `Phi(c) - Phi((c - mu) / sigma)` with `mu = a / b` and
/// `sigma = 1 / b`, found among the points where the two densities cross.
pub fn true_binormal_youden(a: f64, b: f64) -> Result<YoudenResult> {
    check_ab(a, b)?;
    let (mu, sigma) = (a / b, 1.0 / b);
    let gap = |c: f64| std_normal_cdf(c) - std_normal_cdf((c - mu) / sigma);
    // (sigma^2 - 1) c^2 + 2 mu c - mu^2 - 2 sigma^2 ln sigma = 0
    let s2 = sigma * sigma;
    let roots: Vec<f64> = if (s2 - 1.0).abs() < 1e-12 {
        vec![mu / 2.0]
    } else {
        let disc = (mu * mu * s2 + (s2 - 1.0) * 2.0 * s2 * sigma.ln()).max(0.0);
        vec![
            (-mu + disc.sqrt()) / (s2 - 1.0),
            (-mu - disc.sqrt()) / (s2 - 1.0),
        ]
    };
    let c_star = roots
        .iter()
        .copied()
        .max_by(|x, y| gap(*x).total_cmp(&gap(*y)))
        .expect("at least one root");
    let best = gap(c_star);
    let worst = roots.iter().map(|c| gap(*c)).fold(0.0, f64::min);
    Ok(YoudenResult {
        yi: best,
        c_star,
        p_star: 1.0 - std_normal_cdf(c_star),
        below_chance: -worst > best,
    })
}

/// Normal linear homoscedastic groups `y = z' beta + sigma eps` with every
/// covariate uniform on `covariate_range`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariateScenario {
    pub beta_d: Vec<f64>,
    pub beta_nd: Vec<f64>,
    pub sigma_d: f64,
    pub sigma_nd: f64,
    pub n_d: usize,
    pub n_nd: usize,
    pub covariate_range: (f64, f64),
    pub seed: SeedSpec,
}

impl CovariateScenario {
    fn validate(&self) -> Result<()> {
        if self.beta_d.is_empty() || self.beta_d.len() != self.beta_nd.len() {
            return invalid("coefficient vectors must be nonempty and of equal length");
        }
        if !(self.sigma_d > 0.0 && self.sigma_nd > 0.0) {
            return invalid("error scales must be positive");
        }
        let (lo, hi) = self.covariate_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return invalid(format!("covariate range ({lo}, {hi}) is not an interval"));
        }
        if self.n_d == 0 || self.n_nd == 0 {
            return invalid("both groups need at least one subject");
        }
        Ok(())
    }

    fn mean(beta: &[f64], z: &[f64]) -> Result<f64> {
        if z.len() != beta.len() {
            return invalid(format!(
                "design row of length {} for {} coefficients",
                z.len(),
                beta.len()
            ));
        }
        Ok(beta.iter().zip(z).map(|(b, v)| b * v).sum())
    }

    /// `(a(x), b)` of the induced binormal curve at design row `z`.
    pub fn true_ab(&self, z: &[f64]) -> Result<(f64, f64)> {
        let a = (Self::mean(&self.beta_nd, z)? - Self::mean(&self.beta_d, z)?) / self.sigma_d;
        Ok((a, self.sigma_nd / self.sigma_d))
    }

    /// `1 - Phi(a(x) + b Phi^{-1}(1 - p))`.
    pub fn true_roc(&self, p: f64, z: &[f64]) -> Result<f64> {
        let (a, b) = self.true_ab(z)?;
        // the same curve in the usual binormal parametrization
        true_binormal_roc(-a / b, 1.0 / b, p)
    }

    pub fn true_auc(&self, z: &[f64]) -> Result<f64> {
        let (a, b) = self.true_ab(z)?;
        Ok(std_normal_cdf(-a / (1.0 + b * b).sqrt()))
    }
}

fn gen_group(
    beta: &[f64],
    sigma: f64,
    n: usize,
    (lo, hi): (f64, f64),
    seed: SeedSpec,
) -> Result<RegressionSample> {
    let mut rng = seed.rng();
    let q = beta.len() - 1;
    let columns: Vec<Vec<f64>> = (0..q)
        .map(|_| (0..n).map(|_| rng.random_range(lo..hi)).collect())
        .collect();
    let y = (0..n)
        .map(|i| {
            let mean = beta[0] + (0..q).map(|k| beta[k + 1] * columns[k][i]).sum::<f64>();
            mean + sigma * rng.sample::<f64, _>(StandardNormal)
        })
        .collect();
    let names: Vec<String> = if q == 1 {
        vec!["x".into()]
    } else {
        (1..=q).map(|k| format!("x{k}")).collect()
    };
    RegressionSample::linear(y, &columns, &names)
}

/// `(diseased, nondiseased)` samples.
pub fn gen_covariate_linear(
    sc: &CovariateScenario,
) -> Result<(RegressionSample, RegressionSample)> {
    sc.validate()?;
    Ok((
        gen_group(
            &sc.beta_d,
            sc.sigma_d,
            sc.n_d,
            sc.covariate_range,
            sc.seed.substream(0),
        )?,
        gen_group(
            &sc.beta_nd,
            sc.sigma_nd,
            sc.n_nd,
            sc.covariate_range,
            sc.seed.substream(1),
        )?,
    ))
}

/// Marker `Y ~ N(marker_mean, marker_sd^2)`, onset `T | Y ~ Exp(exp(gamma Y))`,
/// independent censoring `C ~ Exp(censor_rate)` (none when the rate is 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalScenario {
    pub marker_mean: f64,
    pub marker_sd: f64,
    pub gamma: f64,
    pub censor_rate: f64,
    pub n: usize,
    pub seed: SeedSpec,
}

pub fn gen_survival(sc: &SurvivalScenario) -> Result<SurvivalSample> {
    if !(sc.marker_sd > 0.0 && sc.marker_mean.is_finite() && sc.gamma.is_finite()) {
        return invalid("marker law needs a finite mean and positive sd");
    }
    if !(sc.censor_rate >= 0.0 && sc.censor_rate.is_finite()) {
        return invalid(format!(
            "censoring rate {} must be nonnegative",
            sc.censor_rate
        ));
    }
    if sc.n == 0 {
        return invalid("sample size must be positive");
    }
    let mut rng = sc.seed.rng();
    let law = Normal::new(sc.marker_mean, sc.marker_sd)
        .map_err(|e| crate::RocError::InvalidInput(e.to_string()))?;
    let mut marker = Vec::with_capacity(sc.n);
    let mut time = Vec::with_capacity(sc.n);
    let mut event = Vec::with_capacity(sc.n);
    for _ in 0..sc.n {
        let y: f64 = rng.sample(law);
        let rate = (sc.gamma * y).exp();
        let onset: f64 =
            rng.sample(Exp::new(rate).map_err(|e| crate::RocError::Numeric(e.to_string()))?);
        let censor = if sc.censor_rate > 0.0 {
            rng.sample(Exp::new(sc.censor_rate).expect("positive rate"))
        } else {
            f64::INFINITY
        };
        marker.push(y);
        time.push(onset.min(censor));
        event.push(onset <= censor);
    }
    SurvivalSample::new(marker, time, event)
}
