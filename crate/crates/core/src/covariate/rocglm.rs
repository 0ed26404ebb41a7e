use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result, RocError};
use crate::numeric::{
    std_normal_cdf, std_normal_pdf, std_normal_quantile_unchecked, ProbGrid, PROB_TOL,
};
use crate::pooled::RocCurveEstimate;

use super::bspline::BSplineSpec;
use super::induced::ConditionalCdf;
use super::regression::RegressionSample;

/// Baseline `h_0(p) = sum_k alpha_k h_k(p)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Baseline {
    /// `h_1 = 1`, `h_2 = Phi^{-1}(p)`: binormal without covariates.
    Binormal,
    /// Intercept plus a cubic B-spline in `Phi^{-1}(p)` with this many
    /// interior knots (first basis function dropped for identifiability).
    Spline { interior_knots: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocGlmConfig {
    pub p_grid: ProbGrid,
    pub baseline: Baseline,
    pub max_iter: usize,
}

impl Default for RocGlmConfig {
    /// 50 interior FPFs `{1/51, ..., 50/51}`, binormal baseline.
    fn default() -> Self {
        Self {
            p_grid: ProbGrid::interior(50).expect("static grid"),
            baseline: Baseline::Binormal,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum BaselineBasis {
    Binormal,
    Spline(BSplineSpec),
}

impl BaselineBasis {
    fn eval(&self, p: f64) -> Result<Vec<f64>> {
        let u = std_normal_quantile_unchecked(p);
        match self {
            BaselineBasis::Binormal => Ok(vec![1.0, u]),
            BaselineBasis::Spline(s) => {
                let (lo, hi) = s.boundary_knots;
                let b = s.basis(u.clamp(lo, hi))?;
                let mut h = vec![1.0];
                h.extend_from_slice(&b[1..]);
                Ok(h)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocGlmFit {
    /// Baseline coefficients; `(alpha_1, alpha_2)` for the binormal baseline.
    pub alpha: Vec<f64>,
    /// Covariate effects, one per non-intercept design column.
    pub beta: Vec<f64>,
    pub iterations: usize,
    pub deviance: f64,
    /// Fitted probabilities hit 0 or 1; coefficients were clamped.
    pub separation: bool,
    /// Whether the fitted baseline is nondecreasing over the FPF grid.
    pub baseline_monotone: bool,
    basis: BaselineBasis,
}

impl RocGlmFit {
    /// `Phi(h(p)' alpha + x' beta)` with `x` the design row without its intercept.
    pub fn roc_at(&self, p: f64, x: &[f64]) -> Result<f64> {
        if x.len() != self.beta.len() {
            return invalid(format!(
                "{} covariates for {} effects",
                x.len(),
                self.beta.len()
            ));
        }
        if p <= 0.0 {
            return Ok(0.0);
        }
        if p >= 1.0 {
            return Ok(1.0);
        }
        let h = self.basis.eval(p)?;
        let eta: f64 = h.iter().zip(&self.alpha).map(|(a, b)| a * b).sum::<f64>()
            + x.iter().zip(&self.beta).map(|(a, b)| a * b).sum::<f64>();
        Ok(std_normal_cdf(eta))
    }

    /// Covariate-specific curve at design row `z` (leading 1 included). The
    /// binormal baseline has the closed-form AUC `Phi((a1 + x'b) / sqrt(1 + a2^2))`;
    /// otherwise the curve is integrated by the trapezoid rule.
    pub fn curve(&self, z: &[f64], grid: &ProbGrid) -> Result<RocCurveEstimate> {
        if z.is_empty() {
            return invalid("empty design row");
        }
        let x = &z[1..];
        let roc: Vec<f64> = grid
            .points()
            .iter()
            .map(|&p| self.roc_at(p, x))
            .collect::<Result<_>>()?;
        let auc = match self.basis {
            BaselineBasis::Binormal => {
                let shift: f64 = x.iter().zip(&self.beta).map(|(a, b)| a * b).sum();
                std_normal_cdf((self.alpha[0] + shift) / (1.0 + self.alpha[1].powi(2)).sqrt())
            }
            BaselineBasis::Spline(_) => {
                crate::numeric::trapezoid(grid.points(), &roc).clamp(0.0, 1.0)
            }
        };
        RocCurveEstimate::new(grid.clone(), roc, auc)
    }
}

/// Placement values `1 - F_Dbar(y_Dj | x_Dj)` of the diseased sample.
pub fn placement_values<C: ConditionalCdf + ?Sized>(
    sample_d: &RegressionSample,
    nondiseased_cdf: &C,
) -> Result<Vec<f64>> {
    (0..sample_d.len())
        .map(|j| nondiseased_cdf.placement(sample_d.outcomes[j], &sample_d.row(j)))
        .collect()
}

/// `I(pv_j <= p_l)` with rows indexed by subject and columns by FPF.
pub fn placement_indicators(pv: &[f64], p_grid: &ProbGrid) -> Vec<Vec<bool>> {
    pv.iter()
        .map(|&u| p_grid.points().iter().map(|&p| u <= p + PROB_TOL).collect())
        .collect()
}

/// Direct ROC regression `ROC(p | x) = Phi(h(p)' alpha + x' beta)` fitted by
/// probit IRLS on the stacked placement-value indicators.
pub fn rocglm_fit<C: ConditionalCdf + ?Sized>(
    sample_d: &RegressionSample,
    nondiseased_cdf: &C,
    cfg: &RocGlmConfig,
) -> Result<RocGlmFit> {
    let pv = placement_values(sample_d, nondiseased_cdf)?;
    let ind = placement_indicators(&pv, &cfg.p_grid);
    let ps = cfg.p_grid.points();
    if ps.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return invalid("ROC-GLM FPF grid must lie strictly inside (0, 1)");
    }
    let basis = match cfg.baseline {
        Baseline::Binormal => BaselineBasis::Binormal,
        Baseline::Spline { interior_knots } => {
            let lo = std_normal_quantile_unchecked(ps[0]);
            let hi = std_normal_quantile_unchecked(ps[ps.len() - 1]);
            let knots = (1..=interior_knots)
                .map(|k| lo + (hi - lo) * k as f64 / (interior_knots + 1) as f64)
                .collect();
            BaselineBasis::Spline(BSplineSpec::new(knots, (lo, hi))?)
        }
    };
    let h: Vec<Vec<f64>> = ps.iter().map(|&p| basis.eval(p)).collect::<Result<_>>()?;
    let k_h = h[0].len();
    let q = sample_d.columns() - 1;
    let n_rows = sample_d.len() * ps.len();
    let k = k_h + q;

    let mut x = DMatrix::<f64>::zeros(n_rows, k);
    let mut y = vec![0.0; n_rows];
    for j in 0..sample_d.len() {
        for (l, hl) in h.iter().enumerate() {
            let r = j * ps.len() + l;
            for (c, v) in hl.iter().enumerate() {
                x[(r, c)] = *v;
            }
            for c in 0..q {
                x[(r, k_h + c)] = sample_d.design[(j, c + 1)];
            }
            y[r] = if ind[j][l] { 1.0 } else { 0.0 };
        }
    }
    let fit = probit_irls(&x, &y, cfg.max_iter)?;
    let alpha = fit.coef[..k_h].to_vec();
    let baseline_monotone = h
        .iter()
        .map(|hl| hl.iter().zip(&alpha).map(|(a, b)| a * b).sum::<f64>())
        .collect::<Vec<f64>>()
        .windows(2)
        .all(|w| w[1] >= w[0] - 1e-12);
    Ok(RocGlmFit {
        alpha,
        beta: fit.coef[k_h..].to_vec(),
        iterations: fit.iterations,
        deviance: fit.deviance,
        separation: fit.separation,
        baseline_monotone,
        basis,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbitFit {
    pub coef: Vec<f64>,
    pub iterations: usize,
    pub deviance: f64,
    pub separation: bool,
}

/// Bound on the linear predictor; beyond it `Phi` is 0 or 1 in double precision.
const ETA_MAX: f64 = 37.0;
/// Magnitude at which coefficients are clamped once separation is detected.
const COEF_CLAMP: f64 = 10.0;

fn deviance(eta: &[f64], y: &[f64]) -> f64 {
    -2.0 * eta
        .iter()
        .zip(y)
        .map(|(&e, &t)| {
            let e = e.clamp(-ETA_MAX, ETA_MAX);
            // Phi(-e) = 1 - Phi(e) without cancellation
            let p = if t > 0.5 {
                std_normal_cdf(e)
            } else {
                std_normal_cdf(-e)
            };
            p.max(f64::MIN_POSITIVE).ln()
        })
        .sum::<f64>()
}

/// Probit regression by Fisher scoring with step halving, starting at zero.
pub fn probit_irls(x: &DMatrix<f64>, y: &[f64], max_iter: usize) -> Result<ProbitFit> {
    let (n, k) = x.shape();
    if n != y.len() || n == 0 || k == 0 {
        return invalid("probit design and response do not match");
    }
    let mut beta = DVector::<f64>::zeros(k);
    let mut eta = vec![0.0; n];
    let mut dev = deviance(&eta, y);
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=max_iter {
        iterations = it;
        let mut info = DMatrix::<f64>::zeros(k, k);
        let mut score = DVector::<f64>::zeros(k);
        for i in 0..n {
            let e = eta[i].clamp(-ETA_MAX, ETA_MAX);
            let (mu, one_minus) = (std_normal_cdf(e), std_normal_cdf(-e));
            let dens = std_normal_pdf(e);
            let var = (mu * one_minus).max(f64::MIN_POSITIVE);
            let w = dens * dens / var;
            let u = dens * (y[i] - mu) / var;
            let row = x.row(i);
            for a in 0..k {
                let xa = row[a];
                score[a] += xa * u;
                for b in 0..=a {
                    info[(a, b)] += w * xa * row[b];
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                info[(b, a)] = info[(a, b)];
            }
        }
        let step = match info.clone().cholesky() {
            Some(ch) => ch.solve(&score),
            None => info
                .svd(true, true)
                .solve(&score, 1e-12)
                .map_err(|e| RocError::SingularDesign(format!("probit information matrix: {e}")))?,
        };
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = &beta + &step * scale;
            let cand_eta: Vec<f64> = (x * &cand).iter().copied().collect();
            let cand_dev = deviance(&cand_eta, y);
            if cand_dev.is_finite() && cand_dev <= dev + 1e-12 * dev.abs().max(1.0) {
                let change = dev - cand_dev;
                beta = cand;
                eta = cand_eta;
                dev = cand_dev;
                accepted = true;
                if change.abs() < 1e-10 * (dev.abs() + 0.1) {
                    converged = true;
                }
                break;
            }
            scale *= 0.5;
        }
        if !accepted || converged {
            converged = true;
            break;
        }
    }

    let saturated = eta.iter().all(|e| e.abs() >= 8.0) || dev < 1e-8 * n as f64;
    let separation = saturated || beta.iter().any(|b| b.abs() > 1e3);
    if separation {
        return Ok(ProbitFit {
            coef: beta
                .iter()
                .map(|b| b.clamp(-COEF_CLAMP, COEF_CLAMP))
                .collect(),
            iterations,
            deviance: dev,
            separation: true,
        });
    }
    if !converged {
        return Err(RocError::Convergence {
            iterations,
            detail: format!("probit IRLS deviance still changing at {dev:.6e}"),
        });
    }
    Ok(ProbitFit {
        coef: beta.iter().copied().collect(),
        iterations,
        deviance: dev,
        separation: false,
    })
}
