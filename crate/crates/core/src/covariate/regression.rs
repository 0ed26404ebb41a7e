use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result, RocError};
use crate::numeric::check_sample;

/// Outcomes with a design matrix whose first column is the intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSample {
    pub outcomes: Vec<f64>,
    pub design: DMatrix<f64>,
    pub labels: Vec<String>,
}

impl RegressionSample {
    pub fn new(outcomes: Vec<f64>, design: DMatrix<f64>, labels: Vec<String>) -> Result<Self> {
        check_sample("outcomes", &outcomes)?;
        if design.nrows() != outcomes.len() {
            return invalid(format!(
                "design has {} rows for {} outcomes",
                design.nrows(),
                outcomes.len()
            ));
        }
        if design.ncols() == 0 || design.column(0).iter().any(|&v| v != 1.0) {
            return invalid("first design column must be the all-ones intercept");
        }
        if labels.len() != design.ncols() {
            return invalid(format!(
                "{} labels for {} design columns",
                labels.len(),
                design.ncols()
            ));
        }
        if design.iter().any(|v| !v.is_finite()) {
            return invalid("design contains non-finite entries");
        }
        Ok(Self {
            outcomes,
            design,
            labels,
        })
    }

    pub fn intercept_only(outcomes: Vec<f64>) -> Result<Self> {
        let n = outcomes.len();
        Self::new(
            outcomes,
            DMatrix::from_element(n, 1, 1.0),
            vec!["(intercept)".into()],
        )
    }

    /// Design `[1 | x_1 .. x_q]` from covariate columns.
    pub fn linear(outcomes: Vec<f64>, columns: &[Vec<f64>], names: &[String]) -> Result<Self> {
        let n = outcomes.len();
        if columns.iter().any(|c| c.len() != n) || names.len() != columns.len() {
            return invalid("covariate columns must match the outcome length and names");
        }
        let design = DMatrix::from_fn(n, columns.len() + 1, |i, j| {
            if j == 0 {
                1.0
            } else {
                columns[j - 1][i]
            }
        });
        let mut labels = vec!["(intercept)".to_string()];
        labels.extend(names.iter().cloned());
        Self::new(outcomes, design, labels)
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn columns(&self) -> usize {
        self.design.ncols()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.design.row(i).iter().copied().collect()
    }
}

/// Least-squares location-scale fit `y = z' beta + sigma eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationScaleFit {
    pub beta: Vec<f64>,
    pub sigma: f64,
    /// Standardized residuals `(y - z' beta) / sigma`.
    pub residuals: Vec<f64>,
}

impl LocationScaleFit {
    /// Conditional mean at a design row (leading 1 included).
    pub fn mean_at(&self, z: &[f64]) -> Result<f64> {
        if z.len() != self.beta.len() {
            return invalid(format!(
                "design row has {} entries, fit has {} coefficients",
                z.len(),
                self.beta.len()
            ));
        }
        Ok(z.iter().zip(&self.beta).map(|(a, b)| a * b).sum())
    }
}

/// Relative singular-value cutoff below which a design is treated as rank deficient.
const RANK_TOL: f64 = 1e-10;

/// Ordinary least squares with `sigma^2 = RSS / (n - q - 1)`.
pub fn ols_fit(sample: &RegressionSample) -> Result<LocationScaleFit> {
    let n = sample.len();
    let k = sample.columns();
    if n <= k {
        return invalid(format!(
            "{n} observations cannot identify {k} coefficients and a scale"
        ));
    }
    let z = &sample.design;
    let svd = z.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > RANK_TOL * smax) {
        return Err(RocError::SingularDesign(format!(
            "design singular values span [{smin:.3e}, {smax:.3e}]"
        )));
    }
    let y = DVector::from_column_slice(&sample.outcomes);
    let beta = svd
        .solve(&y, RANK_TOL * smax)
        .map_err(|e| RocError::SingularDesign(e.to_string()))?;
    let fitted = z * &beta;
    let raw: Vec<f64> = y.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();
    let rss: f64 = raw.iter().map(|r| r * r).sum();
    let sigma = (rss / (n - k) as f64).sqrt();
    let scale = y.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    if !(sigma > 1e-12 * scale) {
        return Err(RocError::DegenerateFit(
            "residual scale is zero (outcomes fitted exactly)".into(),
        ));
    }
    Ok(LocationScaleFit {
        beta: beta.iter().copied().collect(),
        sigma,
        residuals: raw.iter().map(|r| r / sigma).collect(),
    })
}

/// Minimum-norm least-squares coefficients; tolerates rank deficiency.
pub(crate) fn least_squares(z: &DMatrix<f64>, y: &[f64]) -> Result<DVector<f64>> {
    let svd = z.clone().svd(true, true);
    let eps = RANK_TOL * svd.singular_values.max();
    svd.solve(&DVector::from_column_slice(y), eps)
        .map_err(|e| RocError::SingularDesign(e.to_string()))
}
