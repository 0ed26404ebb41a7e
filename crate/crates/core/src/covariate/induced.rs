use crate::error::{invalid, Result};
use crate::numeric::{
    solve_increasing, std_normal_cdf, std_normal_quantile_unchecked, EmpiricalCdf, ProbGrid,
    PROB_TOL,
};
use crate::pooled::RocCurveEstimate;

use super::regression::LocationScaleFit;

/// A distribution function of the outcome given a design row
/// (leading 1 included).
pub trait ConditionalCdf {
    fn cdf_at(&self, y: f64, z: &[f64]) -> Result<f64>;

    /// Generalized inverse `inf{y : F(y | z) >= level}` for `level` in (0, 1).
    fn quantile_at(&self, level: f64, z: &[f64]) -> Result<f64>;

    /// Placement value `1 - F(y | z)`.
    fn placement(&self, y: f64, z: &[f64]) -> Result<f64> {
        Ok((1.0 - self.cdf_at(y, z)?).clamp(0.0, 1.0))
    }
}

/// Error law of a location-scale model.
#[derive(Debug, Clone, PartialEq)]
pub enum ErrorLaw {
    Normal,
    /// Empirical distribution of the standardized residuals.
    Empirical(EmpiricalCdf),
}

/// `F(y | z) = F_eps((y - z' beta) / sigma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationScaleCdf {
    pub fit: LocationScaleFit,
    pub law: ErrorLaw,
}

impl LocationScaleCdf {
    pub fn normal(fit: LocationScaleFit) -> Self {
        Self {
            fit,
            law: ErrorLaw::Normal,
        }
    }

    pub fn empirical(fit: LocationScaleFit) -> Result<Self> {
        let law = ErrorLaw::Empirical(EmpiricalCdf::new(&fit.residuals)?);
        Ok(Self { fit, law })
    }
}

impl ConditionalCdf for LocationScaleCdf {
    fn cdf_at(&self, y: f64, z: &[f64]) -> Result<f64> {
        let e = (y - self.fit.mean_at(z)?) / self.fit.sigma;
        Ok(match &self.law {
            ErrorLaw::Normal => std_normal_cdf(e),
            ErrorLaw::Empirical(f) => f.eval(e),
        })
    }

    fn quantile_at(&self, level: f64, z: &[f64]) -> Result<f64> {
        if !(level > 0.0 && level < 1.0) {
            return invalid(format!("conditional quantile level {level} outside (0, 1)"));
        }
        let q = match &self.law {
            ErrorLaw::Normal => std_normal_quantile_unchecked(level),
            ErrorLaw::Empirical(f) => f.quantile(level)?,
        };
        Ok(self.fit.mean_at(z)? + self.fit.sigma * q)
    }
}

/// Closure-backed conditional CDF with a bracketed numeric inverse.
pub struct FnConditionalCdf<F, D> {
    pub cdf: F,
    pub density: D,
    pub bracket: (f64, f64),
}

impl<F, D> ConditionalCdf for FnConditionalCdf<F, D>
where
    F: Fn(f64, &[f64]) -> f64,
    D: Fn(f64, &[f64]) -> f64,
{
    fn cdf_at(&self, y: f64, z: &[f64]) -> Result<f64> {
        Ok((self.cdf)(y, z))
    }

    fn quantile_at(&self, level: f64, z: &[f64]) -> Result<f64> {
        solve_increasing(
            |y| (self.cdf)(y, z),
            |y| (self.density)(y, z),
            level,
            self.bracket.0,
            self.bracket.1,
            1e-12,
            300,
        )
    }
}

/// Binormal parameters at a design row: `a(x) = x'(beta_Dbar - beta_D) / sigma_D`
/// and `b = sigma_Dbar / sigma_D`.
pub fn induced_ab(
    fit_d: &LocationScaleFit,
    fit_nd: &LocationScaleFit,
    z: &[f64],
) -> Result<(f64, f64)> {
    if fit_d.beta.len() != fit_nd.beta.len() {
        return invalid("diseased and nondiseased fits use different designs");
    }
    let a = (fit_nd.mean_at(z)? - fit_d.mean_at(z)?) / fit_d.sigma;
    Ok((a, fit_nd.sigma / fit_d.sigma))
}

/// Normal homoscedastic induced curve `1 - Phi(a(x) + b Phi^{-1}(1 - p))`
/// with AUC `Phi(-a(x) / sqrt(1 + b^2))`.
pub fn faraggi_roc(
    fit_d: &LocationScaleFit,
    fit_nd: &LocationScaleFit,
    z: &[f64],
    grid: &ProbGrid,
) -> Result<RocCurveEstimate> {
    let (a, b) = induced_ab(fit_d, fit_nd, z)?;
    let roc = grid
        .points()
        .iter()
        .map(|&p| {
            (1.0 - std_normal_cdf(a + b * std_normal_quantile_unchecked(1.0 - p))).clamp(0.0, 1.0)
        })
        .collect();
    RocCurveEstimate::new(grid.clone(), roc, std_normal_cdf(-a / (1.0 + b * b).sqrt()))
}

/// Semiparametric induced curve from the residual ECDFs,
/// `1 - F_eps_D(a(x) + b F_eps_Dbar^{-1}(1 - p))`.
pub fn pepe_semiparam_roc(
    fit_d: &LocationScaleFit,
    fit_nd: &LocationScaleFit,
    z: &[f64],
    grid: &ProbGrid,
) -> Result<RocCurveEstimate> {
    let (a, b) = induced_ab(fit_d, fit_nd, z)?;
    let f_d = EmpiricalCdf::new(&fit_d.residuals)?;
    let f_nd = EmpiricalCdf::new(&fit_nd.residuals)?;
    let roc = grid
        .points()
        .iter()
        .map(|&p| {
            let level = 1.0 - p;
            if level <= PROB_TOL {
                1.0
            } else {
                1.0 - f_d.eval(a + b * f_nd.quantile_closed(level))
            }
        })
        .collect();
    RocCurveEstimate::new(grid.clone(), roc, pepe_auc(fit_d, fit_nd, z)?)
}

/// Covariate-specific Mann-Whitney statistic
/// `(1 / n_D n_Dbar) sum_j sum_i I(mu_Dbar(x) + sigma_Dbar e_i <= mu_D(x) + sigma_D e_j)`.
pub fn pepe_auc(fit_d: &LocationScaleFit, fit_nd: &LocationScaleFit, z: &[f64]) -> Result<f64> {
    let mu_d = fit_d.mean_at(z)?;
    let mu_nd = fit_nd.mean_at(z)?;
    let nd: Vec<f64> = fit_nd
        .residuals
        .iter()
        .map(|e| mu_nd + fit_nd.sigma * e)
        .collect();
    let f_nd = EmpiricalCdf::new(&nd)?;
    let count: usize = fit_d
        .residuals
        .iter()
        .map(|e| f_nd.count_le(mu_d + fit_d.sigma * e))
        .sum();
    Ok(count as f64 / (fit_d.residuals.len() * nd.len()) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariate::regression::{ols_fit, RegressionSample};
    use crate::numeric::{trapezoid, SeedSpec};
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn fit(beta: Vec<f64>, sigma: f64, residuals: Vec<f64>) -> LocationScaleFit {
        LocationScaleFit {
            beta,
            sigma,
            residuals,
        }
    }

    const AUC_1: f64 = 0.760_249_938_906_523_8;

    #[test]
    fn faraggi_identical_fits_give_diagonal() {
        let f = fit(vec![1.0, 0.5], 2.0, vec![0.0]);
        let grid = ProbGrid::uniform(101).unwrap();
        let est = faraggi_roc(&f, &f, &[1.0, 0.3], &grid).unwrap();
        for (p, r) in est.points() {
            assert!((p - r).abs() < 1e-12);
        }
        assert_eq!(est.auc, 0.5);
    }

    #[test]
    fn faraggi_auc_formula_and_integral() {
        // a(x) = -1, b = 1
        let d = fit(vec![1.0, 1.0], 1.0, vec![0.0]);
        let nd = fit(vec![0.0, 1.0], 1.0, vec![0.0]);
        let grid = ProbGrid::uniform(2001).unwrap();
        let est = faraggi_roc(&d, &nd, &[1.0, 0.4], &grid).unwrap();
        assert!((est.auc - AUC_1).abs() < 1e-15);
        assert!((trapezoid(grid.points(), &est.roc) - est.auc).abs() < 5e-4);
        assert!(faraggi_roc(&d, &nd, &[1.0], &grid).is_err());
    }

    #[test]
    fn pepe_auc_matches_brute_force() {
        let mut rng = SeedSpec::new(4, 4).rng();
        for _ in 0..20 {
            let nd_n = rng.random_range(1..30);
            let d_n = rng.random_range(1..30);
            // rounded residuals force ties
            let mut res = |n: usize| -> Vec<f64> {
                (0..n)
                    .map(|_| (rng.sample::<f64, _>(StandardNormal) * 2.0).round() / 2.0)
                    .collect()
            };
            let d = fit(vec![0.5, 1.0], 1.0, res(d_n));
            let nd = fit(vec![0.0, 1.0], 1.0, res(nd_n));
            let z = [1.0, 0.7];
            let (mu_d, mu_nd) = (d.mean_at(&z).unwrap(), nd.mean_at(&z).unwrap());
            let mut count = 0usize;
            for ej in &d.residuals {
                for ei in &nd.residuals {
                    if mu_nd + nd.sigma * ei <= mu_d + d.sigma * ej {
                        count += 1;
                    }
                }
            }
            let brute = count as f64 / (d_n * nd_n) as f64;
            assert_eq!(pepe_auc(&d, &nd, &z).unwrap(), brute);
        }
    }

    #[test]
    fn pepe_identical_fits_give_half_plus_ties() {
        let r = vec![-1.0, 0.0, 1.0, 2.0];
        let f = fit(vec![0.0], 1.0, r);
        let auc = pepe_auc(&f, &f, &[1.0]).unwrap();
        // the <= convention counts each of the n self-pairs
        assert!((auc - (0.5 + 1.0 / 8.0)).abs() < 1e-15);
    }

    #[test]
    fn pepe_approaches_faraggi_with_normal_residuals() {
        let mut rng = SeedSpec::new(8, 1).rng();
        let n = 5000;
        let mut sample = |shift: f64| {
            let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let y: Vec<f64> = x
                .iter()
                .map(|v| shift + 0.5 * v + rng.sample::<f64, _>(StandardNormal))
                .collect();
            ols_fit(&RegressionSample::linear(y, &[x], &["x".into()]).unwrap()).unwrap()
        };
        let d = sample(1.0);
        let nd = sample(0.0);
        let grid = ProbGrid::uniform(101).unwrap();
        let z = [1.0, 0.5];
        let a = faraggi_roc(&d, &nd, &z, &grid).unwrap();
        let b = pepe_semiparam_roc(&d, &nd, &z, &grid).unwrap();
        for (x, y) in a.roc.iter().zip(&b.roc) {
            assert!((x - y).abs() < 0.02);
        }
    }

    #[test]
    fn location_scale_cdf_round_trip() {
        let f = fit(vec![1.0, 2.0], 0.5, vec![-1.0, 0.0, 1.0]);
        let z = [1.0, 0.25];
        let n = LocationScaleCdf::normal(f.clone());
        let q = n.quantile_at(0.9, &z).unwrap();
        assert!((n.cdf_at(q, &z).unwrap() - 0.9).abs() < 1e-12);
        let e = LocationScaleCdf::empirical(f).unwrap();
        assert_eq!(e.cdf_at(1.5, &z).unwrap(), 2.0 / 3.0);
        assert_eq!(e.quantile_at(0.5, &z).unwrap(), 1.5);
        assert!((e.placement(1.5, &z).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }
}
