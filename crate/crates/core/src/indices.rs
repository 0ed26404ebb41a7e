//! AUC by integration, Youden index and optimal threshold.

use crate::error::{invalid, Result, RocError};
use crate::numeric::{trapezoid, EmpiricalCdf};
use crate::pooled::RocCurveEstimate;

/// A distribution function that can be evaluated pointwise.
///
/// Step functions report their jump locations through `atoms`, which lets
/// maximization over thresholds be exact.
pub trait DistributionFunction {
    fn cdf(&self, y: f64) -> f64;

    fn atoms(&self) -> Option<&[f64]> {
        None
    }
}

impl DistributionFunction for EmpiricalCdf {
    fn cdf(&self, y: f64) -> f64 {
        self.eval(y)
    }

    fn atoms(&self) -> Option<&[f64]> {
        Some(self.sorted())
    }
}

/// Adapter for a plain closure.
pub struct FnCdf<F>(pub F);

impl<F: Fn(f64) -> f64> DistributionFunction for FnCdf<F> {
    fn cdf(&self, y: f64) -> f64 {
        (self.0)(y)
    }
}

impl<T: DistributionFunction + ?Sized> DistributionFunction for &T {
    fn cdf(&self, y: f64) -> f64 {
        (**self).cdf(y)
    }

    fn atoms(&self) -> Option<&[f64]> {
        (**self).atoms()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YoudenResult {
    pub yi: f64,
    pub c_star: f64,
    /// False positive fraction at `c_star`.
    pub p_star: f64,
    /// Set when the curve falls further below the diagonal than it rises
    /// above it, i.e. reversing the positivity rule would do better.
    pub below_chance: bool,
}

/// Trapezoidal area under a curve on its grid, clamped to [0, 1].
pub fn auc_from_curve(curve: &RocCurveEstimate) -> Result<f64> {
    let p = curve.grid.points();
    if p.len() < 2 {
        return invalid("need at least two grid points to integrate");
    }
    if p.windows(2).any(|w| !(w[0] < w[1])) {
        return invalid("grid must be strictly increasing");
    }
    Ok(trapezoid(p, &curve.roc).clamp(0.0, 1.0))
}

/// `[min - 3 sd, max + 3 sd]` over both samples, sd from the pooled values.
pub fn default_search_interval(diseased: &[f64], nondiseased: &[f64]) -> (f64, f64) {
    let all: Vec<f64> = diseased.iter().chain(nondiseased).copied().collect();
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sd = if all.len() > 1 {
        crate::numeric::variance(&all).sqrt()
    } else {
        0.0
    };
    (lo - 3.0 * sd, hi + 3.0 * sd)
}

const SCAN_POINTS: usize = 1000;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes `F_Dbar(c) - F_D(c)` over `[lo, hi]`.
///
/// Scans 1000 equally spaced thresholds plus every atom of a step CDF in the
/// interval, then refines the best scan cell by golden section when either
/// CDF is continuous. Among equal maxima the smallest threshold wins.
pub fn youden_from_cdfs<D, N>(
    cdf_d: D,
    cdf_nd: N,
    search_lo: f64,
    search_hi: f64,
) -> Result<YoudenResult>
where
    D: DistributionFunction,
    N: DistributionFunction,
{
    if !(search_lo.is_finite() && search_hi.is_finite() && search_lo < search_hi) {
        return invalid(format!("bad search interval [{search_lo}, {search_hi}]"));
    }
    let gap = |c: f64| -> Result<f64> {
        let g = cdf_nd.cdf(c) - cdf_d.cdf(c);
        if g.is_finite() {
            Ok(g)
        } else {
            Err(RocError::Numeric(format!(
                "non-finite CDF value at threshold {c}"
            )))
        }
    };
    let step = (search_hi - search_lo) / (SCAN_POINTS - 1) as f64;
    let mut candidates: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| {
            if i + 1 == SCAN_POINTS {
                search_hi
            } else {
                search_lo + step * i as f64
            }
        })
        .collect();
    let both_steps = cdf_d.atoms().is_some() && cdf_nd.atoms().is_some();
    for atoms in [cdf_d.atoms(), cdf_nd.atoms()].into_iter().flatten() {
        candidates.extend(
            atoms
                .iter()
                .copied()
                .filter(|a| (search_lo..=search_hi).contains(a)),
        );
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let mut best_c = candidates[0];
    let mut best = gap(best_c)?;
    let mut worst = best;
    let mut best_idx = 0;
    for (i, &c) in candidates.iter().enumerate().skip(1) {
        let g = gap(c)?;
        worst = worst.min(g);
        if g > best {
            best = g;
            best_c = c;
            best_idx = i;
        }
    }

    if !both_steps {
        let mut a = candidates[best_idx.saturating_sub(1)];
        let mut b = candidates[(best_idx + 1).min(candidates.len() - 1)];
        let mut x1 = b - INV_PHI * (b - a);
        let mut x2 = a + INV_PHI * (b - a);
        let (mut g1, mut g2) = (gap(x1)?, gap(x2)?);
        for _ in 0..100 {
            if b - a <= 1e-12 * (1.0 + best_c.abs()) {
                break;
            }
            if g1 >= g2 {
                b = x2;
                x2 = x1;
                g2 = g1;
                x1 = b - INV_PHI * (b - a);
                g1 = gap(x1)?;
            } else {
                a = x1;
                x1 = x2;
                g1 = g2;
                x2 = a + INV_PHI * (b - a);
                g2 = gap(x2)?;
            }
        }
        for (x, g) in [(x1, g1), (x2, g2)] {
            if g > best {
                best = g;
                best_c = x;
            }
        }
    }

    Ok(YoudenResult {
        yi: best,
        c_star: best_c,
        p_star: (1.0 - cdf_nd.cdf(best_c)).clamp(0.0, 1.0),
        below_chance: -worst > best,
    })
}

/// Maximizes `roc(p) - p` over the curve's grid and maps the maximizing
/// FPF back to a threshold through `nondiseased_quantile(1 - p*)`.
///
/// Among equal gaps the largest `p` wins, which is the smallest threshold.
pub fn youden_from_curve<Q>(
    curve: &RocCurveEstimate,
    nondiseased_quantile: Q,
) -> Result<YoudenResult>
where
    Q: Fn(f64) -> Result<f64>,
{
    curve.validate()?;
    let mut best = f64::NEG_INFINITY;
    let mut worst = f64::INFINITY;
    let mut p_star = 0.0;
    for (p, r) in curve.points() {
        let g = r - p;
        worst = worst.min(g);
        if g >= best {
            best = g;
            p_star = p;
        }
    }
    Ok(YoudenResult {
        yi: best,
        c_star: nondiseased_quantile(1.0 - p_star)?,
        p_star,
        below_chance: -worst > best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{std_normal_cdf, std_normal_quantile_unchecked, ProbGrid};

    const YI_BINORMAL: f64 = 0.382_924_922_548_026;

    fn curve(grid: ProbGrid, f: impl Fn(f64) -> f64) -> RocCurveEstimate {
        let roc = grid.points().iter().map(|&p| f(p)).collect();
        RocCurveEstimate::new(grid, roc, 0.0).unwrap()
    }

    #[test]
    fn auc_of_reference_curves() {
        let g = ProbGrid::uniform(2001).unwrap();
        assert!((auc_from_curve(&curve(g.clone(), |p| p)).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(auc_from_curve(&curve(g.clone(), |_| 1.0)).unwrap(), 1.0);
        let binormal = curve(g, |p| {
            std_normal_cdf(1.0 + std_normal_quantile_unchecked(p))
        });
        // closed form Phi(1 / sqrt 2)
        assert!((auc_from_curve(&binormal).unwrap() - 0.760_249_938_906_523_8).abs() < 5e-4);
    }

    #[test]
    fn youden_from_cdfs_examples() {
        let same =
            youden_from_cdfs(FnCdf(std_normal_cdf), FnCdf(std_normal_cdf), -5.0, 5.0).unwrap();
        assert_eq!(same.yi, 0.0);
        assert_eq!(same.c_star, -5.0);

        let d = EmpiricalCdf::new(&[5.0, 6.0]).unwrap();
        let nd = EmpiricalCdf::new(&[0.0, 1.0]).unwrap();
        let sep = youden_from_cdfs(&d, &nd, -1.0, 7.0).unwrap();
        assert_eq!(sep.yi, 1.0);
        assert_eq!(sep.c_star, 1.0);

        let shifted = youden_from_cdfs(
            FnCdf(|c| std_normal_cdf(c - 1.0)),
            FnCdf(std_normal_cdf),
            -5.0,
            6.0,
        )
        .unwrap();
        assert!((shifted.c_star - 0.5).abs() < 1e-6);
        assert!((shifted.yi - YI_BINORMAL).abs() < 1e-12);
        assert!((shifted.p_star - std_normal_cdf(-0.5)).abs() < 1e-6);
    }

    #[test]
    fn youden_from_curve_examples() {
        let g = ProbGrid::uniform(11).unwrap();
        let diag = youden_from_curve(&curve(g.clone(), |p| p), Ok).unwrap();
        assert!(diag.yi.abs() < 1e-15);

        let spike = curve(g, |p| {
            if (p - 0.2).abs() < 1e-9 {
                0.8
            } else if p < 0.2 {
                p
            } else {
                (p + 0.3).min(1.0)
            }
        });
        let r = youden_from_curve(&spike, Ok).unwrap();
        assert!((r.yi - 0.6).abs() < 1e-12);
        assert!((r.p_star - 0.2).abs() < 1e-12);

        let dense = ProbGrid::uniform(20_001).unwrap();
        let binormal = curve(dense, |p| {
            std_normal_cdf(1.0 + std_normal_quantile_unchecked(p))
        });
        let r = youden_from_curve(&binormal, |q| Ok(std_normal_quantile_unchecked(q))).unwrap();
        assert!((r.yi - YI_BINORMAL).abs() < 1e-3);
        assert!((r.p_star - std_normal_cdf(-0.5)).abs() < 2e-3);
    }

    #[test]
    fn empirical_youden_matches_one_sided_ks() {
        let d = [0.3, 1.5, 2.2, 2.2, 4.0, 0.9];
        let nd = [-1.0, 0.3, 0.5, 1.1, 2.2];
        let fd = EmpiricalCdf::new(&d).unwrap();
        let fnd = EmpiricalCdf::new(&nd).unwrap();
        let (lo, hi) = default_search_interval(&d, &nd);
        let r = youden_from_cdfs(&fd, &fnd, lo, hi).unwrap();
        let brute = d
            .iter()
            .chain(&nd)
            .map(|&c| {
                let a = nd.iter().filter(|&&v| v <= c).count() as f64 / nd.len() as f64;
                let b = d.iter().filter(|&&v| v <= c).count() as f64 / d.len() as f64;
                a - b
            })
            .fold(0.0, f64::max);
        assert_eq!(r.yi, brute);
    }

    #[test]
    fn below_chance_flag() {
        let g = ProbGrid::uniform(11).unwrap();
        let r = youden_from_curve(&curve(g, |p| p * p), Ok).unwrap();
        assert!(r.below_chance);
        assert!(r.yi.abs() < 1e-15);
    }
}
