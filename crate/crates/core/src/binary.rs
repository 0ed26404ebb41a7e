//! Classification accuracy of a dichotomized test.

use crate::error::{invalid, PredictiveValue, Result, RocError};
use crate::numeric::check_sample;

/// Test outcomes of diseased and nondiseased subjects.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSample {
    pub diseased: Vec<f64>,
    pub nondiseased: Vec<f64>,
}

impl DiagnosticSample {
    pub fn new(diseased: Vec<f64>, nondiseased: Vec<f64>) -> Result<Self> {
        check_sample("diseased", &diseased)?;
        check_sample("nondiseased", &nondiseased)?;
        Ok(Self {
            diseased,
            nondiseased,
        })
    }
}

/// True/false positive and negative fractions of a test at one threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfusionFractions {
    pub tpf: f64,
    pub fpf: f64,
    pub tnf: f64,
    pub fnf: f64,
}

impl ConfusionFractions {
    /// Builds the four fractions from sensitivity and false positive fraction.
    pub fn new(tpf: f64, fpf: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tpf) || !(0.0..=1.0).contains(&fpf) {
            return invalid(format!(
                "fractions must lie in [0, 1]: tpf={tpf}, fpf={fpf}"
            ));
        }
        Ok(Self {
            tpf,
            fpf,
            tnf: 1.0 - fpf,
            fnf: 1.0 - tpf,
        })
    }
}

/// Disease prevalence, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prevalence(f64);

impl Prevalence {
    pub fn new(pi: f64) -> Result<Self> {
        if !(pi > 0.0 && pi < 1.0) {
            return invalid(format!("prevalence {pi} must lie strictly between 0 and 1"));
        }
        Ok(Self(pi))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Fractions of each group testing positive under the rule `y >= threshold`.
pub fn classification_fractions(
    diseased: &[f64],
    nondiseased: &[f64],
    threshold: f64,
) -> Result<ConfusionFractions> {
    check_sample("diseased", diseased)?;
    check_sample("nondiseased", nondiseased)?;
    let positive =
        |xs: &[f64]| xs.iter().filter(|&&y| y >= threshold).count() as f64 / xs.len() as f64;
    ConfusionFractions::new(positive(diseased), positive(nondiseased))
}

/// Positive and negative predictive values at prevalence `prev`.
///
/// `PPV = pi TPF / (pi TPF + (1 - pi) FPF)` and
/// `NPV = (1 - pi) TNF / ((1 - pi) TNF + pi FNF)`.
pub fn predictive_values(f: &ConfusionFractions, prev: Prevalence) -> Result<(f64, f64)> {
    let pi = prev.value();
    let ppv =
        bayes_ratio(pi, f.tpf, 1.0 - pi, f.fpf).ok_or(RocError::UndefinedPredictiveValue {
            which: PredictiveValue::Positive,
        })?;
    let npv =
        bayes_ratio(1.0 - pi, f.tnf, pi, f.fnf).ok_or(RocError::UndefinedPredictiveValue {
            which: PredictiveValue::Negative,
        })?;
    Ok((ppv, npv))
}

/// `w1 r1 / (w1 r1 + w2 r2)`, evaluated as `w1 / (w1 + w2 r2 / r1)` so equal
/// rates cancel without rounding.
fn bayes_ratio(w1: f64, r1: f64, w2: f64, r2: f64) -> Option<f64> {
    if r1 > 0.0 {
        Some(w1 / (w1 + w2 * (r2 / r1)))
    } else if r2 > 0.0 {
        Some(0.0)
    } else {
        None
    }
}
