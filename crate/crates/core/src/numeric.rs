//! Numeric primitives shared by every estimator: empirical distribution
//! functions, the generalized inverse, standard normal functions,
//! uniform-simplex sampling and seeded RNG streams.

use libm::erfc;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use statrs::function::erf::erfc_inv;

use crate::error::{invalid, Result, RocError};

/// Slack used when comparing probabilities that are ratios of counts.
///
/// Ratios such as `k / n` and `1 - p` carry rounding noise; two probabilities
/// closer than this are treated as equal so that step-function estimators
/// agree with each other at their jump points.
pub const PROB_TOL: f64 = 1e-12;

pub(crate) fn check_sample(name: &str, xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return invalid(format!("{name} sample is empty"));
    }
    if let Some(i) = xs.iter().position(|v| !v.is_finite()) {
        return invalid(format!("{name} sample has non-finite value at index {i}"));
    }
    Ok(())
}

pub(crate) fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("{name} = {p} is not a probability"));
    }
    Ok(())
}

pub(crate) fn sorted_copy(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Empirical distribution function `(1/n) #{x_i <= y}`.
pub fn ecdf(sample: &[f64], y: f64) -> Result<f64> {
    check_sample("ecdf", sample)?;
    let count = sample.iter().filter(|&&x| x <= y).count();
    Ok(count as f64 / sample.len() as f64)
}

/// Generalized inverse `inf{y in sample : ecdf(sample, y) >= p}` for `p` in (0, 1].
pub fn quantile(sample: &[f64], p: f64) -> Result<f64> {
    check_sample("quantile", sample)?;
    let sorted = sorted_copy(sample);
    quantile_sorted(&sorted, p)
}

pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return invalid(format!("quantile level {p} outside (0, 1]"));
    }
    Ok(sorted[quantile_rank(sorted.len(), p) - 1])
}

/// Smallest `k` in `1..=n` with `k / n >= p` (up to [`PROB_TOL`]).
pub(crate) fn quantile_rank(n: usize, p: f64) -> usize {
    let nf = n as f64;
    let mut k = ((nf * p).ceil() as usize).clamp(1, n);
    while k > 1 && (k - 1) as f64 / nf >= p - PROB_TOL {
        k -= 1;
    }
    while k < n && (k as f64 / nf) < p - PROB_TOL {
        k += 1;
    }
    k
}

/// Empirical CDF over a sorted copy of the sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(sample: &[f64]) -> Result<Self> {
        check_sample("empirical cdf", sample)?;
        Ok(Self {
            sorted: sorted_copy(sample),
        })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `#{x_i <= y}`.
    pub fn count_le(&self, y: f64) -> usize {
        self.sorted.partition_point(|&x| x <= y)
    }

    /// `#{x_i < y}`.
    pub fn count_lt(&self, y: f64) -> usize {
        self.sorted.partition_point(|&x| x < y)
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.count_le(y) as f64 / self.len() as f64
    }

    /// Survival `Pr(X > y)` computed from counts.
    pub fn survival(&self, y: f64) -> f64 {
        (self.len() - self.count_le(y)) as f64 / self.len() as f64
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        quantile_sorted(&self.sorted, p)
    }

    /// Quantile extended to `p = 0` by the sample minimum.
    pub fn quantile_closed(&self, p: f64) -> f64 {
        if p <= 0.0 {
            self.sorted[0]
        } else {
            self.sorted[quantile_rank(self.len(), p.min(1.0)) - 1]
        }
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max(&self) -> f64 {
        self.sorted[self.len() - 1]
    }
}

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn std_normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal distribution function.
pub fn std_normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Inverse of [`std_normal_cdf`] on the open unit interval.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(RocError::InvalidInput(format!(
            "normal quantile undefined at p = {p}"
        )));
    }
    Ok(std_normal_quantile_unchecked(p))
}

/// Like [`std_normal_quantile`] but maps 0 and 1 to the infinities.
pub fn std_normal_quantile_unchecked(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let z = -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
    // the library inverse is only a starting value; one Newton step on the
    // accurate cdf brings it to full precision
    let err = std_normal_cdf(z) - p;
    let dens = std_normal_pdf(z);
    if dens > 1e-300 {
        z - err / dens
    } else {
        z
    }
}

/// Seed of one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Child stream `k`. Distinct `(self, k)` pairs give distinct streams.
    pub fn substream(&self, k: u64) -> SeedSpec {
        SeedSpec {
            master_seed: splitmix64(self.master_seed ^ splitmix64(self.stream_id)),
            stream_id: k,
        }
    }
}

/// One draw from Dirichlet(1, ..., 1) of length `n`.
pub fn dirichlet_uniform(n: usize, seed: &SeedSpec) -> Result<Vec<f64>> {
    let mut rng = seed.rng();
    sample_dirichlet_uniform(&mut rng, n)
}

/// Uniform-simplex draw from normalized unit exponentials.
pub fn sample_dirichlet_uniform<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return invalid("Dirichlet dimension must be at least 1");
    }
    let mut w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(RocError::Numeric("exponential draws summed to zero".into()));
    }
    for v in &mut w {
        *v /= total;
    }
    Ok(w)
}

/// Equally spaced, strictly increasing FPF values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbGrid {
    points: Vec<f64>,
}

impl ProbGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return invalid("probability grid is empty");
        }
        for &p in &points {
            check_prob("grid point", p)?;
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("probability grid must be strictly increasing");
        }
        Ok(Self { points })
    }

    /// `k` equally spaced points from 0 to 1 inclusive (`k >= 2`).
    pub fn uniform(k: usize) -> Result<Self> {
        if k < 2 {
            return invalid("uniform grid needs at least two points");
        }
        let step = (k - 1) as f64;
        Self::new((0..k).map(|i| i as f64 / step).collect())
    }

    /// `{1/(k+1), ..., k/(k+1)}`.
    pub fn interior(k: usize) -> Result<Self> {
        if k == 0 {
            return invalid("interior grid needs at least one point");
        }
        let d = (k + 1) as f64;
        Self::new((1..=k).map(|i| i as f64 / d).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Default for ProbGrid {
    fn default() -> Self {
        Self::uniform(201).expect("static grid")
    }
}

/// Trapezoidal rule over paired abscissae and ordinates.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) * 0.5)
        .sum()
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with denominator `n - 1`.
pub(crate) fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Linear-interpolation percentile (R type 7) of an already sorted slice.
pub(crate) fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Solves `f(x) = target` for a continuous nondecreasing `f` with derivative
/// `df`, starting from a bracket `[lo, hi]` with `f(lo) <= target <= f(hi)`.
///
/// Newton steps are taken when they stay inside the bracket, bisection
/// otherwise. Succeeds when `|f(x) - target| <= tol`.
pub(crate) fn solve_increasing<F, D>(
    f: F,
    df: D,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    if !(f_lo <= target && target <= f_hi) {
        return Err(RocError::Numeric(format!(
            "root not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}, target {target}"
        )));
    }
    let mut x = 0.5 * (lo + hi);
    let mut best = (f64::INFINITY, x);
    for _ in 0..max_iter {
        let fx = f(x);
        if !fx.is_finite() {
            return Err(RocError::Numeric(format!("non-finite cdf value at {x}")));
        }
        let err = fx - target;
        if err.abs() < best.0 {
            best = (err.abs(), x);
        }
        if err.abs() <= tol {
            return Ok(x);
        }
        if err < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = df(x);
        let newton = if d > 0.0 { x - err / d } else { f64::NAN };
        x = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * (lo.abs().max(hi.abs()).max(1e-300)) {
            break;
        }
    }
    if best.0 <= tol {
        return Ok(best.1);
    }
    Err(RocError::Numeric(format!(
        "inversion stalled: best |F(x) - {target}| = {:.3e} at x = {}, bracket [{lo}, {hi}]",
        best.0, best.1
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// erf by its Maclaurin series, summed to convergence (|z| small).
    fn erf_series(z: f64) -> f64 {
        let mut term = z;
        let mut sum = z;
        let z2 = z * z;
        for n in 1..200 {
            term *= -z2 / n as f64;
            let add = term / (2 * n + 1) as f64;
            sum += add;
            if add.abs() < 1e-18 {
                break;
            }
        }
        sum * 2.0 / std::f64::consts::PI.sqrt()
    }

    #[test]
    fn ecdf_examples() {
        assert_eq!(ecdf(&[1.0, 2.0, 3.0], 2.0).unwrap(), 2.0 / 3.0);
        assert_eq!(ecdf(&[4.0, -1.0, 3.5], 4.0).unwrap(), 1.0);
        // ties at the threshold all count
        assert_eq!(ecdf(&[0.0, 0.0, 1.0], 0.0).unwrap(), 2.0 / 3.0);
        assert!(ecdf(&[], 0.0).is_err());
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(quantile(&[1.0, 2.0, 3.0], 1.0).unwrap(), 3.0);
        assert_eq!(quantile(&[1.0, 2.0, 3.0], 0.5).unwrap(), 2.0);
        assert_eq!(quantile(&[5.0], 0.01).unwrap(), 5.0);
        assert!(quantile(&[1.0], 0.0).is_err());
        assert!(quantile(&[1.0], 1.5).is_err());
    }

    #[test]
    fn quantile_exact_jump_levels() {
        // 1 - 0.7 carries rounding noise; the jump at 3/10 must still be hit
        let s: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(quantile(&s, 1.0 - 0.7).unwrap(), 3.0);
        assert_eq!(quantile(&s, 0.7).unwrap(), 7.0);
    }

    #[test]
    fn normal_cdf_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        // a / sqrt(1 + b^2) for a = b = 1
        let z = std::f64::consts::FRAC_1_SQRT_2;
        let oracle = 0.5 * (1.0 + erf_series(z / std::f64::consts::SQRT_2));
        assert!((std_normal_cdf(z) - oracle).abs() < 1e-14);
        assert!((std_normal_cdf(z) - 0.7602).abs() < 5e-5);
        let q = std_normal_quantile(std_normal_cdf(1.3)).unwrap();
        assert!((q - 1.3).abs() < 1e-10);
        assert!(std_normal_quantile(0.0).is_err());
        assert!(std_normal_quantile(1.0).is_err());
    }

    #[test]
    fn normal_cdf_matches_density_quadrature() {
        // composite Simpson on [-12, z] with fine steps
        let simpson = |a: f64, b: f64, m: usize| {
            let h = (b - a) / m as f64;
            let mut s = std_normal_pdf(a) + std_normal_pdf(b);
            for i in 1..m {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                s += w * std_normal_pdf(a + i as f64 * h);
            }
            s * h / 3.0
        };
        let mut z = -6.0;
        while z <= 6.0 {
            let quad = simpson(-12.0, z, 20_000);
            assert!((std_normal_cdf(z) - quad).abs() < 1e-8, "z = {z}");
            z += 0.25;
        }
    }

    #[test]
    fn quantile_round_trip_across_range() {
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let z = std_normal_quantile(p).unwrap();
            assert!((std_normal_cdf(z) - p).abs() < 1e-14);
        }
        // upper tail limited to where 1 - cdf is still resolvable in f64
        for z in [-8.0, -5.5, -2.0, 0.3, 1.3, 4.0] {
            let back = std_normal_quantile(std_normal_cdf(z)).unwrap();
            assert!((back - z).abs() < 1e-10, "z = {z}, back = {back}");
        }
    }

    #[test]
    fn dirichlet_contracts() {
        let s = SeedSpec::new(7, 0);
        assert_eq!(dirichlet_uniform(1, &s).unwrap(), vec![1.0]);
        assert_eq!(
            dirichlet_uniform(4, &SeedSpec::new(11, 3)).unwrap(),
            dirichlet_uniform(4, &SeedSpec::new(11, 3)).unwrap()
        );
        assert_ne!(
            dirichlet_uniform(4, &SeedSpec::new(11, 3)).unwrap(),
            dirichlet_uniform(4, &SeedSpec::new(11, 4)).unwrap()
        );
        assert!(dirichlet_uniform(0, &s).is_err());
    }

    #[test]
    fn dirichlet_uniform_simplex_moments() {
        let base = SeedSpec::new(2024, 0);
        let mut rng = base.rng();
        let draws = 100_000;
        let mut acc = [0.0; 3];
        for _ in 0..draws {
            let w = sample_dirichlet_uniform(&mut rng, 3).unwrap();
            for k in 0..3 {
                acc[k] += w[k];
            }
        }
        for a in acc {
            assert!((a / draws as f64 - 1.0 / 3.0).abs() < 0.01);
        }
    }

    #[test]
    fn substreams_differ() {
        let s = SeedSpec::new(1, 0);
        assert_ne!(s.substream(0), s.substream(1));
        assert_eq!(s.substream(5), s.substream(5));
        assert_ne!(SeedSpec::new(1, 1).substream(0), s.substream(0));
    }

    #[test]
    fn grids() {
        let g = ProbGrid::default();
        assert_eq!(g.len(), 201);
        assert_eq!(g.points()[0], 0.0);
        assert_eq!(g.points()[200], 1.0);
        assert!((g.points()[1] - 0.005).abs() < 1e-15);
        assert!(ProbGrid::new(vec![0.2, 0.1]).is_err());
        assert!(ProbGrid::new(vec![0.2, 1.1]).is_err());
        let i = ProbGrid::interior(50).unwrap();
        assert_eq!(i.points()[0], 1.0 / 51.0);
    }

    #[test]
    fn solver_brackets_and_converges() {
        let x = solve_increasing(
            std_normal_cdf,
            std_normal_pdf,
            0.975,
            -10.0,
            10.0,
            1e-13,
            100,
        )
        .unwrap();
        assert!((x - 1.959_963_984_540_054).abs() < 1e-9);
        assert!(
            solve_increasing(std_normal_cdf, std_normal_pdf, 0.5, 1.0, 2.0, 1e-12, 50).is_err()
        );
    }

    #[test]
    fn percentile_type7() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile_sorted(&s, 0.0), 1.0);
        assert_eq!(percentile_sorted(&s, 1.0), 4.0);
        assert!((percentile_sorted(&s, 0.5) - 2.5).abs() < 1e-15);
    }
}
