use crate::error::{invalid, Result};
use crate::indices::{youden_from_cdfs, youden_from_curve, FnCdf, YoudenResult};
use crate::numeric::{trapezoid, ProbGrid, PROB_TOL};
use crate::pooled::RocCurveEstimate;

use super::induced::ConditionalCdf;
use super::regression::RegressionSample;
use super::rocglm::placement_values;

/// Covariate-adjusted ROC curve: the distribution function of the diseased
/// placement values, `AROC(p) = (1/n_D) sum_j I(1 - F_Dbar(y_Dj | x_Dj) <= p)`.
pub fn aroc<C: ConditionalCdf + ?Sized>(
    sample_d: &RegressionSample,
    nondiseased_cdf: &C,
    grid: &ProbGrid,
) -> Result<RocCurveEstimate> {
    let mut pv = placement_values(sample_d, nondiseased_cdf)?;
    pv.sort_by(f64::total_cmp);
    let n = pv.len() as f64;
    let roc: Vec<f64> = grid
        .points()
        .iter()
        .map(|&p| pv.partition_point(|&u| u <= p + PROB_TOL) as f64 / n)
        .collect();
    let auc = trapezoid(grid.points(), &roc).clamp(0.0, 1.0);
    RocCurveEstimate::new(grid.clone(), roc, auc)
}

/// `YI(x) = max_c {F_Dbar(c | x) - F_D(c | x)}` at design row `z`.
pub fn covariate_youden_cdfs<D, N>(
    cdf_d: &D,
    cdf_nd: &N,
    z: &[f64],
    search_lo: f64,
    search_hi: f64,
) -> Result<YoudenResult>
where
    D: ConditionalCdf + ?Sized,
    N: ConditionalCdf + ?Sized,
{
    // probe once so dimension errors surface as such rather than as NaN
    cdf_d.cdf_at(search_lo, z)?;
    cdf_nd.cdf_at(search_lo, z)?;
    youden_from_cdfs(
        FnCdf(|c| cdf_d.cdf_at(c, z).unwrap_or(f64::NAN)),
        FnCdf(|c| cdf_nd.cdf_at(c, z).unwrap_or(f64::NAN)),
        search_lo,
        search_hi,
    )
}

/// `YI(x) = max_p {ROC(p | x) - p}` with the threshold recovered from the
/// conditional nondiseased quantile; FPFs of 0 and 1 map to thresholds of
/// plus and minus infinity.
pub fn covariate_youden_curve<N>(
    curve: &RocCurveEstimate,
    cdf_nd: &N,
    z: &[f64],
) -> Result<YoudenResult>
where
    N: ConditionalCdf + ?Sized,
{
    if z.is_empty() {
        return invalid("empty design row");
    }
    youden_from_curve(curve, |level| {
        if level <= PROB_TOL {
            Ok(f64::NEG_INFINITY)
        } else if level >= 1.0 - PROB_TOL {
            Ok(f64::INFINITY)
        } else {
            cdf_nd.quantile_at(level, z)
        }
    })
}
