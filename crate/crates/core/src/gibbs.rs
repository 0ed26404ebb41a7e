//! Blocked Gibbs sampler for truncated stick-breaking mixtures of normal
//! regressions, `y_i ~ sum_l w_l N(z_i' beta_l, 1 / tau_l)`.
//!
//! The pooled DPM is the special case of a single all-ones column.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};

use crate::error::{invalid, Result, RocError};
use crate::numeric::SeedSpec;

#[derive(Debug, Clone)]
pub(crate) struct Prior {
    pub truncation: usize,
    pub alpha: f64,
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    pub shape: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RawDraw {
    pub weights: Vec<f64>,
    pub coef: Vec<Vec<f64>>,
    pub variances: Vec<f64>,
}

struct Chain<'a> {
    y: &'a [f64],
    z: &'a DMatrix<f64>,
    prior: &'a Prior,
    prec: DMatrix<f64>,
    prec_mean: DVector<f64>,
    weights: Vec<f64>,
    coef: Vec<DVector<f64>>,
    tau: Vec<f64>,
    alloc: Vec<usize>,
}

fn numeric_at(iter: usize, what: impl std::fmt::Display) -> RocError {
    RocError::Numeric(format!("Gibbs iteration {iter}: {what}"))
}

impl<'a> Chain<'a> {
    fn new(y: &'a [f64], z: &'a DMatrix<f64>, prior: &'a Prior) -> Result<Self> {
        let q = z.ncols();
        let prec =
            prior.cov.clone().try_inverse().ok_or_else(|| {
                RocError::SingularDesign("prior covariance is not invertible".into())
            })?;
        let prec_mean = &prec * &prior.mean;
        let l = prior.truncation;

        // start from residual-ordered chunks: component k gets the k-th slice
        let resid: Vec<f64> = (0..y.len())
            .map(|i| y[i] - z.row(i).transpose().dot(&prior.mean))
            .collect();
        let mut order: Vec<usize> = (0..y.len()).collect();
        order.sort_by(|&a, &b| resid[a].total_cmp(&resid[b]));
        let mut alloc = vec![0; y.len()];
        let mut coef = vec![prior.mean.clone(); l];
        let n = y.len();
        let var0 = {
            let m = resid.iter().sum::<f64>() / n as f64;
            let v = resid.iter().map(|r| (r - m).powi(2)).sum::<f64>() / (n.max(2) - 1) as f64;
            if v > 0.0 {
                v
            } else {
                1.0
            }
        };
        for k in 0..l {
            let (s, e) = (k * n / l, (k + 1) * n / l);
            if e > s {
                let shift = order[s..e].iter().map(|&i| resid[i]).sum::<f64>() / (e - s) as f64;
                coef[k][0] += shift;
                for &i in &order[s..e] {
                    alloc[i] = k;
                }
            }
        }
        debug_assert!(q >= 1);
        Ok(Self {
            y,
            z,
            prior,
            prec,
            prec_mean,
            weights: vec![1.0 / l as f64; l],
            coef,
            tau: vec![1.0 / var0; l],
            alloc,
        })
    }

    fn step(&mut self, rng: &mut ChaCha8Rng, iter: usize) -> Result<()> {
        let l = self.prior.truncation;
        let n = self.y.len();

        // allocations
        let log_w: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.tau)
            .map(|(w, t)| w.ln() + 0.5 * t.ln())
            .collect();
        let mut logp = vec![0.0; l];
        let mut prob = vec![0.0; l];
        let mu = self.z * DMatrix::from_columns(&self.coef);
        for i in 0..n {
            let mut top = f64::NEG_INFINITY;
            for k in 0..l {
                let r = self.y[i] - mu[(i, k)];
                logp[k] = log_w[k] - 0.5 * self.tau[k] * r * r;
                top = top.max(logp[k]);
            }
            if !top.is_finite() {
                return Err(numeric_at(
                    iter,
                    format!("allocation weights for subject {i}"),
                ));
            }
            let mut total = 0.0;
            for k in 0..l {
                prob[k] = (logp[k] - top).exp();
                total += prob[k];
            }
            let mut u = rng.random::<f64>() * total;
            let mut pick = l - 1;
            for (k, p) in prob.iter().enumerate() {
                if u < *p {
                    pick = k;
                    break;
                }
                u -= p;
            }
            // never land on a zero-probability tail component through rounding
            while prob[pick] == 0.0 && pick > 0 {
                pick -= 1;
            }
            self.alloc[i] = pick;
        }

        let mut counts = vec![0usize; l];
        for &k in &self.alloc {
            counts[k] += 1;
        }

        // stick-breaking weights, closed at the truncation level
        let mut tail: usize = n;
        let mut remaining = 1.0;
        for k in 0..l {
            tail -= counts[k];
            let v = if k + 1 == l {
                1.0
            } else {
                let beta = Beta::new(1.0 + counts[k] as f64, self.prior.alpha + tail as f64)
                    .map_err(|e| numeric_at(iter, e))?;
                beta.sample(rng)
            };
            self.weights[k] = remaining * v;
            remaining *= 1.0 - v;
        }
        let total: f64 = self.weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(numeric_at(iter, "stick-breaking weights degenerate"));
        }

        // component coefficients and precisions
        let q = self.z.ncols();
        for k in 0..l {
            let mut ztz = DMatrix::<f64>::zeros(q, q);
            let mut zty = DVector::<f64>::zeros(q);
            for i in (0..n).filter(|&i| self.alloc[i] == k) {
                let zi = self.z.row(i).transpose();
                ztz += &zi * zi.transpose();
                zty += &zi * self.y[i];
            }
            let post_prec = &self.prec + &ztz * self.tau[k];
            let chol = post_prec.cholesky().ok_or_else(|| {
                numeric_at(
                    iter,
                    format!("component {k} precision not positive definite"),
                )
            })?;
            let post_mean = chol.solve(&(&self.prec_mean + &zty * self.tau[k]));
            // beta = mean + L^{-T} e  has covariance (L L^T)^{-1}
            let e = DVector::<f64>::from_fn(q, |_, _| rng.sample(StandardNormal));
            let l_t = chol.l().transpose();
            let noise = l_t
                .solve_upper_triangular(&e)
                .ok_or_else(|| numeric_at(iter, "triangular solve failed"))?;
            self.coef[k] = post_mean + noise;

            let ss: f64 = (0..n)
                .filter(|&i| self.alloc[i] == k)
                .map(|i| {
                    let r = self.y[i] - self.z.row(i).transpose().dot(&self.coef[k]);
                    r * r
                })
                .sum();
            let shape = self.prior.shape + 0.5 * counts[k] as f64;
            let rate = self.prior.rate + 0.5 * ss;
            let gamma = Gamma::new(shape, 1.0 / rate).map_err(|e| numeric_at(iter, e))?;
            let mut t = gamma.sample(rng);
            if t == 0.0 {
                t = f64::MIN_POSITIVE;
            }
            if !t.is_finite() || self.coef[k].iter().any(|b| !b.is_finite()) {
                return Err(numeric_at(
                    iter,
                    format!("component {k} parameters not finite"),
                ));
            }
            self.tau[k] = t;
        }
        Ok(())
    }

    fn snapshot(&self) -> RawDraw {
        let mut weights = self.weights.clone();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        RawDraw {
            weights,
            coef: self
                .coef
                .iter()
                .map(|b| b.iter().copied().collect())
                .collect(),
            variances: self.tau.iter().map(|t| 1.0 / t).collect(),
        }
    }
}

pub(crate) fn run(
    y: &[f64],
    z: &DMatrix<f64>,
    prior: &Prior,
    burn_in: usize,
    n_save: usize,
    seed: &SeedSpec,
) -> Result<Vec<RawDraw>> {
    if y.len() < 2 {
        return invalid("mixture fit needs at least two observations");
    }
    if z.nrows() != y.len() || z.ncols() == 0 {
        return invalid(format!(
            "design is {}x{} for {} outcomes",
            z.nrows(),
            z.ncols(),
            y.len()
        ));
    }
    if prior.truncation < 2 || n_save == 0 {
        return invalid("truncation must be at least 2 and n_save positive");
    }
    if !(prior.alpha > 0.0 && prior.shape > 0.0 && prior.rate > 0.0) {
        return invalid("alpha, gamma shape and gamma rate must be positive");
    }
    if prior.mean.len() != z.ncols() || prior.cov.shape() != (z.ncols(), z.ncols()) {
        return invalid("centring mean/covariance do not match the design");
    }
    let mut chain = Chain::new(y, z, prior)?;
    let mut rng = seed.rng();
    let mut out = Vec::with_capacity(n_save);
    for iter in 0..burn_in + n_save {
        chain.step(&mut rng, iter)?;
        if iter >= burn_in {
            out.push(chain.snapshot());
        }
    }
    Ok(out)
}
