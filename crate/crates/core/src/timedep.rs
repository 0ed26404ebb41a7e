//! Cumulative/dynamic time-dependent ROC analysis under right censoring,
//! with fractions obtained from Kaplan-Meier estimates through Bayes' theorem.

use crate::error::{invalid, Result, RocError};
use crate::numeric::{check_sample, ProbGrid, PROB_TOL};
use crate::pooled::RocCurveEstimate;

/// Marker, follow-up time and event indicator (true = onset observed).
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalSample {
    pub marker: Vec<f64>,
    pub time: Vec<f64>,
    pub event: Vec<bool>,
}

impl SurvivalSample {
    pub fn new(marker: Vec<f64>, time: Vec<f64>, event: Vec<bool>) -> Result<Self> {
        check_sample("marker", &marker)?;
        check_sample("time", &time)?;
        if time.len() != marker.len() || event.len() != marker.len() {
            return invalid(format!(
                "marker, time and event lengths differ: {}, {}, {}",
                marker.len(),
                time.len(),
                event.len()
            ));
        }
        if let Some(t) = time.iter().find(|t| **t < 0.0) {
            return invalid(format!("negative follow-up time {t}"));
        }
        Ok(Self {
            marker,
            time,
            event,
        })
    }

    pub fn len(&self) -> usize {
        self.marker.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marker.is_empty()
    }
}

/// Right-continuous nonincreasing step function with `S(t) = 1` before the
/// first jump.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSurvival {
    pub jump_times: Vec<f64>,
    pub surv_values: Vec<f64>,
    /// No events were observed, so the estimate is identically one.
    pub all_censored: bool,
}

impl StepSurvival {
    pub fn eval(&self, t: f64) -> f64 {
        match self.jump_times.partition_point(|&u| u <= t) {
            0 => 1.0,
            k => self.surv_values[k - 1],
        }
    }
}

/// Product-limit estimator. At tied times events are processed before
/// censorings, so subjects censored at an event time count as at risk.
pub fn kaplan_meier(times: &[f64], events: &[bool]) -> Result<StepSurvival> {
    check_sample("time", times)?;
    if events.len() != times.len() {
        return invalid("times and events differ in length");
    }
    if times.iter().any(|t| *t < 0.0) {
        return invalid("negative follow-up time");
    }
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let mut at_risk = times.len();
    let mut s = 1.0;
    let mut jump_times = Vec::new();
    let mut surv_values = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let u = times[order[i]];
        let mut j = i;
        let mut deaths = 0;
        while j < order.len() && times[order[j]] == u {
            deaths += usize::from(events[order[j]]);
            j += 1;
        }
        if deaths > 0 {
            s *= 1.0 - deaths as f64 / at_risk as f64;
            jump_times.push(u);
            surv_values.push(s);
        }
        at_risk -= j - i;
        i = j;
    }
    Ok(StepSurvival {
        all_censored: jump_times.is_empty(),
        jump_times,
        surv_values,
    })
}

/// Subjects sorted by time, for repeated restricted Kaplan-Meier evaluation.
struct TimeOrdered<'a> {
    s: &'a SurvivalSample,
    order: Vec<usize>,
}

impl<'a> TimeOrdered<'a> {
    fn new(s: &'a SurvivalSample) -> Self {
        let mut order: Vec<usize> = (0..s.len()).collect();
        order.sort_by(|&a, &b| s.time[a].total_cmp(&s.time[b]));
        Self { s, order }
    }

    /// `S(t)` of the subjects selected by `keep`; `None` if none are selected.
    fn survival_at(&self, t: f64, keep: impl Fn(usize) -> bool) -> Option<f64> {
        let mut at_risk = self.order.iter().filter(|&&i| keep(i)).count();
        if at_risk == 0 {
            return None;
        }
        let mut surv = 1.0;
        let mut k = 0;
        while k < self.order.len() {
            let u = self.s.time[self.order[k]];
            if u > t {
                break;
            }
            let (mut deaths, mut leaving) = (0usize, 0usize);
            while k < self.order.len() && self.s.time[self.order[k]] == u {
                let i = self.order[k];
                if keep(i) {
                    leaving += 1;
                    deaths += usize::from(self.s.event[i]);
                }
                k += 1;
            }
            if deaths > 0 {
                surv *= 1.0 - deaths as f64 / at_risk as f64;
            }
            at_risk -= leaving;
        }
        Some(surv)
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return invalid(format!("evaluation time {t} must be positive and finite"));
    }
    Ok(())
}

fn no_events(t: f64) -> RocError {
    RocError::TimeOutOfRange {
        t,
        reason: "no events observed by this time, so Pr(T <= t) is estimated as 0".into(),
    }
}

fn no_survivors(t: f64) -> RocError {
    RocError::TimeOutOfRange {
        t,
        reason: "estimated survival is 0, so Pr(T > t) is estimated as 0".into(),
    }
}

/// Overall `S(t)`, rejecting times at which either fraction is undefined.
fn overall_survival(tt: &TimeOrdered, t: f64) -> Result<f64> {
    let s_t = tt.survival_at(t, |_| true).expect("nonempty sample");
    if 1.0 - s_t <= 0.0 {
        return Err(no_events(t));
    }
    if s_t <= 0.0 {
        return Err(no_survivors(t));
    }
    Ok(s_t)
}

fn tpf_at(tt: &TimeOrdered, s_t: f64, c: f64, t: f64) -> f64 {
    let s = tt.s;
    let above = s.marker.iter().filter(|&&y| y >= c).count();
    match tt.survival_at(t, |i| s.marker[i] >= c) {
        Some(s_above) => {
            ((above as f64 / s.len() as f64) * (1.0 - s_above) / (1.0 - s_t)).clamp(0.0, 1.0)
        }
        None => 0.0,
    }
}

fn tnf_at(tt: &TimeOrdered, s_t: f64, c: f64, t: f64) -> f64 {
    let s = tt.s;
    let below = s.marker.iter().filter(|&&y| y < c).count();
    match tt.survival_at(t, |i| s.marker[i] < c) {
        Some(s_below) => ((below as f64 / s.len() as f64) * s_below / s_t).clamp(0.0, 1.0),
        None => 0.0,
    }
}

fn check_threshold(c: f64, t: f64) -> Result<()> {
    check_time(t)?;
    if c.is_nan() {
        return invalid("threshold is NaN");
    }
    Ok(())
}

/// `TPF(c, t) = Pr(Y >= c | T <= t)`; needs an event by `t`.
pub fn cumdyn_tpf(s: &SurvivalSample, c: f64, t: f64) -> Result<f64> {
    check_threshold(c, t)?;
    let tt = TimeOrdered::new(s);
    let s_t = tt.survival_at(t, |_| true).expect("nonempty sample");
    if 1.0 - s_t <= 0.0 {
        return Err(no_events(t));
    }
    Ok(tpf_at(&tt, s_t, c, t))
}

/// `TNF(c, t) = Pr(Y < c | T > t)`; needs positive estimated survival at `t`.
pub fn cumdyn_tnf(s: &SurvivalSample, c: f64, t: f64) -> Result<f64> {
    check_threshold(c, t)?;
    let tt = TimeOrdered::new(s);
    let s_t = tt.survival_at(t, |_| true).expect("nonempty sample");
    if s_t <= 0.0 {
        return Err(no_survivors(t));
    }
    Ok(tnf_at(&tt, s_t, c, t))
}

/// Both fractions at `(c, t)`. Neither is guaranteed monotone in `c` under
/// censoring.
pub fn cumdyn_fractions(s: &SurvivalSample, c: f64, t: f64) -> Result<(f64, f64)> {
    check_threshold(c, t)?;
    let tt = TimeOrdered::new(s);
    let s_t = overall_survival(&tt, t)?;
    Ok((tpf_at(&tt, s_t, c, t), tnf_at(&tt, s_t, c, t)))
}

/// `(c, FPF(c, t), TPF(c, t))` over the distinct markers in increasing order
/// followed by `c = +inf`.
pub fn threshold_sweep(s: &SurvivalSample, t: f64, isotonic: bool) -> Result<Vec<(f64, f64, f64)>> {
    check_time(t)?;
    let tt = TimeOrdered::new(s);
    let s_t = overall_survival(&tt, t)?;
    let mut cs = s.marker.clone();
    cs.sort_by(f64::total_cmp);
    cs.dedup();
    cs.push(f64::INFINITY);
    let (mut fpf, mut tpf): (Vec<f64>, Vec<f64>) = cs
        .iter()
        .map(|&c| (1.0 - tnf_at(&tt, s_t, c, t), tpf_at(&tt, s_t, c, t)))
        .unzip();
    if isotonic {
        fpf = pava_nonincreasing(&fpf);
        tpf = pava_nonincreasing(&tpf);
    }
    Ok(cs
        .into_iter()
        .zip(fpf)
        .zip(tpf)
        .map(|((c, f), p)| (c, f, p))
        .collect())
}

/// `ROC(p, t) = TPF(c*(p), t)` with `c*(p) = min{c : FPF(c, t) <= p}` over the
/// sweep. `isotonic` applies pool-adjacent-violators to both fractions first.
pub fn timedep_roc(
    s: &SurvivalSample,
    t: f64,
    grid: &ProbGrid,
    isotonic: bool,
) -> Result<RocCurveEstimate> {
    let sweep = threshold_sweep(s, t, isotonic)?;
    let roc = grid
        .points()
        .iter()
        .map(|&p| {
            sweep
                .iter()
                .find(|(_, f, _)| *f <= p + PROB_TOL)
                .map_or(0.0, |(_, _, tp)| *tp)
        })
        .collect();
    RocCurveEstimate::new(grid.clone(), roc, sweep_auc(&sweep))
}

/// Trapezoidal area under the swept `(FPF, TPF)` polygon.
pub fn timedep_auc(s: &SurvivalSample, t: f64) -> Result<f64> {
    Ok(sweep_auc(&threshold_sweep(s, t, false)?))
}

fn sweep_auc(sweep: &[(f64, f64, f64)]) -> f64 {
    sweep
        .windows(2)
        .map(|w| (w[0].1 - w[1].1) * (w[0].2 + w[1].2) / 2.0)
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// Least-squares nonincreasing fit with equal weights.
pub fn pava_nonincreasing(values: &[f64]) -> Vec<f64> {
    // blocks of (sum, count)
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (s1, n1) = blocks[blocks.len() - 1];
            let (s0, n0) = blocks[blocks.len() - 2];
            if s0 / n0 as f64 >= s1 / n1 as f64 {
                break;
            }
            blocks.pop();
            let last = blocks.len() - 1;
            blocks[last] = (s0 + s1, n0 + n1);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(s, n)| std::iter::repeat_n(s / n as f64, n))
        .collect()
}
