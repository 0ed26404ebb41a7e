use nalgebra::DMatrix;

use crate::error::{invalid, Result, RocError};
use crate::numeric::{percentile_sorted, sorted_copy};

pub const SPLINE_DEGREE: usize = 3;

/// Cubic B-spline basis with a clamped knot vector.
#[derive(Debug, Clone, PartialEq)]
pub struct BSplineSpec {
    pub interior_knots: Vec<f64>,
    pub boundary_knots: (f64, f64),
}

impl BSplineSpec {
    pub fn new(interior_knots: Vec<f64>, boundary_knots: (f64, f64)) -> Result<Self> {
        let (lo, hi) = boundary_knots;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return invalid(format!(
                "boundary knots ({lo}, {hi}) must be finite and increasing"
            ));
        }
        if interior_knots.windows(2).any(|w| !(w[0] <= w[1]))
            || interior_knots.iter().any(|k| !(*k > lo && *k < hi))
        {
            return invalid("interior knots must be sorted and strictly inside the boundary");
        }
        Ok(Self {
            interior_knots,
            boundary_knots,
        })
    }

    /// Interior knots at the given sample quantiles, boundary at min/max.
    pub fn from_quantiles(x: &[f64], probs: &[f64]) -> Result<Self> {
        crate::numeric::check_sample("covariate", x)?;
        let s = sorted_copy(x);
        let (lo, hi) = (s[0], s[s.len() - 1]);
        let mut knots: Vec<f64> = probs
            .iter()
            .map(|&p| percentile_sorted(&s, p))
            .filter(|k| *k > lo && *k < hi)
            .collect();
        knots.dedup();
        Self::new(knots, (lo, hi))
    }

    /// Defaults: interior knots at the quartiles.
    pub fn quartiles(x: &[f64]) -> Result<Self> {
        Self::from_quantiles(x, &[0.25, 0.5, 0.75])
    }

    pub fn n_basis(&self) -> usize {
        self.interior_knots.len() + SPLINE_DEGREE + 1
    }

    fn knot_vector(&self) -> Vec<f64> {
        let (lo, hi) = self.boundary_knots;
        let mut t = vec![lo; SPLINE_DEGREE + 1];
        t.extend_from_slice(&self.interior_knots);
        t.extend(std::iter::repeat_n(hi, SPLINE_DEGREE + 1));
        t
    }

    /// All basis functions at `x`; they are nonnegative and sum to one.
    pub fn basis(&self, x: f64) -> Result<Vec<f64>> {
        let (lo, hi) = self.boundary_knots;
        if !(x >= lo && x <= hi) {
            return Err(RocError::Extrapolation { x, lo, hi });
        }
        let t = self.knot_vector();
        let p = SPLINE_DEGREE;
        let nb = self.n_basis();
        // span index mu with t[mu] <= x < t[mu + 1]; the right end uses the last span
        let mut mu = p;
        while mu + 1 < nb && t[mu + 1] <= x {
            mu += 1;
        }
        // Cox-de Boor triangle for the p + 1 nonzero functions
        let mut n = vec![0.0; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        n[0] = 1.0;
        for j in 1..=p {
            left[j] = x - t[mu + 1 - j];
            right[j] = t[mu + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                let denom = right[r + 1] + left[j - r];
                let temp = if denom > 0.0 { n[r] / denom } else { 0.0 };
                n[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            n[j] = saved;
        }
        let mut out = vec![0.0; nb];
        for (r, v) in n.into_iter().enumerate() {
            out[mu - p + r] = v;
        }
        Ok(out)
    }
}

/// Layout of a spline design row: intercept, spline basis, treatment-coded
/// factor dummies, and optionally basis-by-dummy interactions.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineDesign {
    pub spline: BSplineSpec,
    /// Number of levels of each factor; level 0 is the reference.
    pub factor_levels: Vec<usize>,
    pub interactions: bool,
}

impl SplineDesign {
    pub fn n_dummies(&self) -> usize {
        self.factor_levels.iter().map(|l| l.saturating_sub(1)).sum()
    }

    pub fn n_columns(&self) -> usize {
        let nb = self.spline.n_basis();
        let d = self.n_dummies();
        1 + nb + d + if self.interactions { nb * d } else { 0 }
    }

    pub fn row(&self, x: f64, codes: &[usize]) -> Result<Vec<f64>> {
        if codes.len() != self.factor_levels.len() {
            return invalid(format!(
                "{} factor codes for {} factors",
                codes.len(),
                self.factor_levels.len()
            ));
        }
        let b = self.spline.basis(x)?;
        let mut dummies = Vec::with_capacity(self.n_dummies());
        for (k, (&code, &levels)) in codes.iter().zip(&self.factor_levels).enumerate() {
            if code >= levels {
                return invalid(format!("factor {k} code {code} exceeds {levels} levels"));
            }
            dummies.extend((1..levels).map(|l| if code == l { 1.0 } else { 0.0 }));
        }
        let mut row = Vec::with_capacity(self.n_columns());
        row.push(1.0);
        row.extend_from_slice(&b);
        row.extend_from_slice(&dummies);
        if self.interactions {
            for d in &dummies {
                row.extend(b.iter().map(|v| v * d));
            }
        }
        Ok(row)
    }

    pub fn labels(&self, covariate: &str, factor_names: &[String]) -> Vec<String> {
        let nb = self.spline.n_basis();
        let mut out = vec!["(intercept)".to_string()];
        out.extend((1..=nb).map(|k| format!("bs({covariate})[{k}]")));
        let mut dummy_names = Vec::new();
        for (name, &levels) in factor_names.iter().zip(&self.factor_levels) {
            dummy_names.extend((1..levels).map(|l| format!("{name}[{l}]")));
        }
        out.extend(dummy_names.iter().cloned());
        if self.interactions {
            for d in &dummy_names {
                out.extend((1..=nb).map(|k| format!("bs({covariate})[{k}]:{d}")));
            }
        }
        out
    }
}

/// Design matrix with one row per `x` value; `codes[i]` holds the factor
/// level codes of row `i`.
pub fn bspline_design(
    x: &[f64],
    spline: &BSplineSpec,
    factor_levels: &[usize],
    codes: &[Vec<usize>],
    interactions: bool,
) -> Result<DMatrix<f64>> {
    if codes.len() != x.len() {
        return invalid("one factor-code vector per row is required");
    }
    let layout = SplineDesign {
        spline: spline.clone(),
        factor_levels: factor_levels.to_vec(),
        interactions,
    };
    let cols = layout.n_columns();
    let mut data = Vec::with_capacity(x.len() * cols);
    for (xi, ci) in x.iter().zip(codes) {
        data.extend(layout.row(*xi, ci)?);
    }
    Ok(DMatrix::from_row_slice(x.len(), cols, &data))
}
