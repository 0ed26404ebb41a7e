use crate::error::Result;
use crate::numeric::{check_sample, EmpiricalCdf, ProbGrid, PROB_TOL};

use super::RocCurveEstimate;

/// Empirical ROC curve `1 - F_D(F_Dbar^{-1}(1 - p))` from the two ECDFs.
///
/// `F_Dbar^{-1}` is the left-continuous generalized inverse, so at `p = 0`
/// the curve takes its right limit `1 - F_D(max nondiseased)`; at `p = 1` it
/// is 1.
pub fn empirical_roc(
    diseased: &[f64],
    nondiseased: &[f64],
    grid: &ProbGrid,
) -> Result<RocCurveEstimate> {
    let f_d = EmpiricalCdf::new(diseased)?;
    let f_nd = EmpiricalCdf::new(nondiseased)?;
    let n_d = f_d.len();
    let roc = grid
        .points()
        .iter()
        .map(|&p| {
            let level = 1.0 - p;
            if level <= PROB_TOL {
                return 1.0;
            }
            let c = f_nd.quantile_closed(level);
            (n_d - f_d.count_le(c)) as f64 / n_d as f64
        })
        .collect();
    RocCurveEstimate::new(grid.clone(), roc, empirical_auc(diseased, nondiseased)?)
}

/// Mann-Whitney estimate of `Pr(Y_D > Y_Dbar)` with half credit for ties.
pub fn empirical_auc(diseased: &[f64], nondiseased: &[f64]) -> Result<f64> {
    check_sample("diseased", diseased)?;
    let f_nd = EmpiricalCdf::new(nondiseased)?;
    // twice the statistic, kept integral so the division is the only rounding
    let doubled: u64 = diseased
        .iter()
        .map(|&y| {
            let below = f_nd.count_lt(y);
            let ties = f_nd.count_le(y) - below;
            2 * below as u64 + ties as u64
        })
        .sum();
    let pairs = 2.0 * diseased.len() as f64 * nondiseased.len() as f64;
    Ok(doubled as f64 / pairs)
}
