//! Analysis dispatch: ingest, estimate, then write every output file.

use std::path::PathBuf;

use roceval::binary::{classification_fractions, predictive_values, Prevalence};
use roceval::covariate::{
    aroc, covariate_youden_cdfs, covariate_youden_curve, ddp_fit, ddp_roc, faraggi_roc, ols_fit,
    pepe_semiparam_roc, rocglm_fit, Baseline, ConditionalCdf, DdpConfig, DdpDraw, DdpPosteriorCdf,
    LocationScaleCdf, RegressionSample, RocGlmConfig,
};
use roceval::indices::{default_search_interval, youden_from_cdfs};
use roceval::mixture::MixtureDraw;
use roceval::numeric::{EmpiricalCdf, ProbGrid, SeedSpec};
use roceval::pooled::{
    bb_roc, dpm_fit, dpm_roc, dpm_youden, empirical_roc, kernel_roc, select_bandwidth,
    BandwidthRule, DpmConfig, KernelCdf, RocCurveEstimate,
};
use roceval::simulate::{
    gen_binormal, gen_covariate_linear, gen_survival, true_binormal_auc, true_binormal_youden,
    BinormalScenario, CovariateScenario, SurvivalScenario,
};
use roceval::timedep::{threshold_sweep, timedep_roc};

use crate::config::{
    Analysis, Bandwidth, BaselineKind, CovariateMethod, NdCdf, PooledMethod, Scenario, Settings,
};
use crate::ingest::{
    ingest_diagnostic, ingest_regression, ingest_survival, DesignOptions, IngestReport,
};
use crate::output::{self, Provenance, Summary};
use crate::{svg, validation, CliResult};

/// What an analysis produced before anything is written.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub curve: Option<RocCurveEstimate>,
    pub summary: Summary,
    pub report: Option<IngestReport>,
    /// Simulated cohort, already rendered as CSV.
    pub data_csv: Option<String>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub artifacts: Artifacts,
}

pub fn run(settings: &Settings) -> CliResult<RunOutcome> {
    settings.validate()?;
    let Some(analysis) = settings.analysis else {
        return validation("no analysis selected");
    };
    let digest = match (&settings.input.path, analysis) {
        (_, Analysis::Simulate) => None,
        (Some(p), _) => Some(output::file_digest(p)?),
        (None, _) => None,
    };
    let artifacts = analyse(settings, analysis)?;
    let out_dir = settings.out_dir();
    let files = write_outputs(settings, analysis, digest.as_deref(), &artifacts, &out_dir)?;
    Ok(RunOutcome {
        out_dir,
        files,
        artifacts,
    })
}

pub fn analyse(settings: &Settings, analysis: Analysis) -> CliResult<Artifacts> {
    match analysis {
        Analysis::Binary => binary(settings),
        Analysis::Pooled => pooled(settings),
        Analysis::Covariate => covariate(settings),
        Analysis::Aroc => adjusted(settings),
        Analysis::Timedep => timedep(settings),
        Analysis::Simulate => simulate(settings),
    }
}

fn write_outputs(
    settings: &Settings,
    analysis: Analysis,
    digest: Option<&str>,
    art: &Artifacts,
    dir: &std::path::Path,
) -> CliResult<Vec<String>> {
    let prov = Provenance::new(settings, digest);
    let mut files = Vec::new();
    let mut put = |name: &str, text: String| -> CliResult<()> {
        output::write_atomic(&dir.join(name), text.as_bytes())?;
        files.push(name.to_string());
        Ok(())
    };
    if let Some(curve) = &art.curve {
        put("curve.csv", output::curve_csv(curve, &prov, false))?;
        if settings.output.full_precision {
            put("curve_full.csv", output::curve_csv(curve, &prov, true))?;
        }
        if settings.output.svg {
            put("roc.svg", svg::roc_svg(curve, analysis.name(), &prov))?;
        }
    }
    if let Some(data) = &art.data_csv {
        put("data.csv", data.clone())?;
    }
    put("summary.txt", art.summary.render(&prov))?;
    let mut listed = files.clone();
    listed.push("metadata.toml".into());
    let meta = output::metadata_toml(settings, digest, art.report.as_ref(), &listed);
    output::write_atomic(&dir.join("metadata.toml"), meta.as_bytes())?;
    Ok(listed)
}

fn grid(s: &Settings) -> CliResult<ProbGrid> {
    Ok(ProbGrid::uniform(s.estimator.grid_points)?)
}

fn seed(s: &Settings) -> SeedSpec {
    SeedSpec::new(s.estimator.seed, s.estimator.stream)
}

fn binary(s: &Settings) -> CliResult<Artifacts> {
    let Some(threshold) = s.estimator.threshold else {
        return validation("binary analysis needs --threshold");
    };
    let (sample, report) = ingest_diagnostic(&s.input)?;
    let f = classification_fractions(&sample.diseased, &sample.nondiseased, threshold)?;
    let mut summary = Summary::default();
    summary.num("threshold", threshold);
    summary.num("n_diseased", sample.diseased.len() as f64);
    summary.num("n_nondiseased", sample.nondiseased.len() as f64);
    summary.num("tpf", f.tpf);
    summary.num("fpf", f.fpf);
    summary.num("tnf", f.tnf);
    summary.num("fnf", f.fnf);
    if let Some(pi) = s.estimator.prevalence {
        let (ppv, npv) = predictive_values(&f, Prevalence::new(pi)?)?;
        summary.num("prevalence", pi);
        summary.num("ppv", ppv);
        summary.num("npv", npv);
    }
    Ok(Artifacts {
        summary,
        report: Some(report),
        ..Default::default()
    })
}

fn bandwidth_rule(b: Bandwidth) -> BandwidthRule {
    match b {
        Bandwidth::Silverman => BandwidthRule::SilvermanRobust,
        Bandwidth::Normal => BandwidthRule::SilvermanNormal,
        Bandwidth::Lscv => BandwidthRule::LeastSquaresCv,
    }
}

fn dpm_config(s: &Settings, sample: &[f64], seed: SeedSpec) -> CliResult<DpmConfig> {
    let e = &s.estimator;
    Ok(DpmConfig {
        truncation: e.truncation,
        alpha: e.alpha,
        burn_in: e.burn_in,
        n_save: e.n_save,
        ..DpmConfig::with_defaults(sample, seed)?
    })
}

fn ddp_config(s: &Settings, sample: &RegressionSample, seed: SeedSpec) -> CliResult<DdpConfig> {
    let e = &s.estimator;
    Ok(DdpConfig {
        truncation: e.truncation,
        alpha: e.alpha,
        burn_in: e.burn_in,
        n_save: e.n_save,
        ..DdpConfig::with_defaults(sample, seed)?
    })
}

fn pooled(s: &Settings) -> CliResult<Artifacts> {
    let (sample, report) = ingest_diagnostic(&s.input)?;
    let (d, nd) = (&sample.diseased, &sample.nondiseased);
    let grid = grid(s)?;
    let e = &s.estimator;
    let mut summary = Summary::default();
    summary.num("n_diseased", d.len() as f64);
    summary.num("n_nondiseased", nd.len() as f64);
    let (lo, hi) = default_search_interval(d, nd);
    let curve = match e.pooled_method {
        PooledMethod::Empirical => {
            let curve = empirical_roc(d, nd, &grid)?;
            summary.auc(&curve);
            let y = youden_from_cdfs(EmpiricalCdf::new(d)?, EmpiricalCdf::new(nd)?, lo, hi)?;
            summary.youden(&y);
            curve
        }
        PooledMethod::Kernel => {
            let rule = bandwidth_rule(e.bandwidth);
            let h_d = e
                .bandwidth_d
                .map_or_else(|| select_bandwidth(d, rule), Ok)?;
            let h_nd = e
                .bandwidth_nd
                .map_or_else(|| select_bandwidth(nd, rule), Ok)?;
            let curve = kernel_roc(d, nd, h_d, h_nd, &grid)?;
            summary.num("bandwidth_d", h_d);
            summary.num("bandwidth_nd", h_nd);
            summary.auc(&curve);
            let y = youden_from_cdfs(KernelCdf::new(d, h_d)?, KernelCdf::new(nd, h_nd)?, lo, hi)?;
            summary.youden(&y);
            curve
        }
        PooledMethod::Bb => {
            let ens = bb_roc(d, nd, e.draws, &grid, &seed(s))?;
            let curve = ens.summary()?;
            summary.num("draws", ens.len() as f64);
            summary.auc(&curve);
            if let Some(y) = ens.youden_summary() {
                summary.posterior_youden(&y);
            }
            curve
        }
        PooledMethod::Dpm => {
            let root = seed(s);
            let draws_d = dpm_fit(d, &dpm_config(s, d, root.substream(0))?)?;
            let draws_nd = dpm_fit(nd, &dpm_config(s, nd, root.substream(1))?)?;
            let mut ens = dpm_roc(&draws_d, &draws_nd, &grid)?;
            ens.youden = Some(dpm_youden(&draws_d, &draws_nd)?);
            let curve = ens.summary()?;
            summary.num("draws", ens.len() as f64);
            summary.auc(&curve);
            if let Some(y) = ens.youden_summary() {
                summary.posterior_youden(&y);
            }
            curve
        }
    };
    Ok(Artifacts {
        curve: Some(curve),
        summary,
        report: Some(report),
        data_csv: None,
    })
}

fn design_options(s: &Settings) -> DesignOptions {
    DesignOptions {
        spline: s.estimator.spline,
        interactions: s.estimator.interactions,
    }
}

fn mixtures_at(draws: &[DdpDraw], z: &[f64]) -> CliResult<Vec<MixtureDraw>> {
    Ok(draws
        .iter()
        .map(|d| d.at(z))
        .collect::<roceval::Result<_>>()?)
}

fn nondiseased_cdf(s: &Settings, nd: &RegressionSample) -> CliResult<Box<dyn ConditionalCdf>> {
    Ok(match s.estimator.nd_cdf {
        NdCdf::Normal => Box::new(LocationScaleCdf::normal(ols_fit(nd)?)),
        NdCdf::Pepe => Box::new(LocationScaleCdf::empirical(ols_fit(nd)?)?),
        NdCdf::Ddp => Box::new(DdpPosteriorCdf {
            draws: ddp_fit(nd, &ddp_config(s, nd, seed(s).substream(1))?)?,
        }),
    })
}

/// Search interval covering both fitted conditional laws at `z`.
fn location_scale_interval(
    fd: &roceval::covariate::LocationScaleFit,
    fnd: &roceval::covariate::LocationScaleFit,
    z: &[f64],
) -> CliResult<(f64, f64)> {
    let shift = |f: &roceval::covariate::LocationScaleFit| -> CliResult<Vec<f64>> {
        let mu = f.mean_at(z)?;
        Ok(f.residuals.iter().map(|e| mu + f.sigma * e).collect())
    };
    let (lo, hi) = default_search_interval(&shift(fd)?, &shift(fnd)?);
    let spread = 8.0 * fd.sigma.max(fnd.sigma);
    let (m_d, m_nd) = (fd.mean_at(z)?, fnd.mean_at(z)?);
    Ok((
        lo.min(m_d.min(m_nd) - spread),
        hi.max(m_d.max(m_nd) + spread),
    ))
}

fn covariate(s: &Settings) -> CliResult<Artifacts> {
    let (d, nd, layout, report) = ingest_regression(&s.input, design_options(s))?;
    let z = layout.row_at(&s.estimator.at)?;
    let grid = grid(s)?;
    let e = &s.estimator;
    let mut summary = Summary::default();
    summary.num("n_diseased", d.len() as f64);
    summary.num("n_nondiseased", nd.len() as f64);
    for (k, v) in &e.at {
        summary.text(&format!("at.{k}"), v.clone());
    }
    let curve = match e.covariate_method {
        CovariateMethod::Faraggi | CovariateMethod::Pepe => {
            let (fd, fnd) = (ols_fit(&d)?, ols_fit(&nd)?);
            let (lo, hi) = location_scale_interval(&fd, &fnd, &z)?;
            let (curve, cd, cnd) = if e.covariate_method == CovariateMethod::Faraggi {
                (
                    faraggi_roc(&fd, &fnd, &z, &grid)?,
                    LocationScaleCdf::normal(fd.clone()),
                    LocationScaleCdf::normal(fnd.clone()),
                )
            } else {
                (
                    pepe_semiparam_roc(&fd, &fnd, &z, &grid)?,
                    LocationScaleCdf::empirical(fd.clone())?,
                    LocationScaleCdf::empirical(fnd.clone())?,
                )
            };
            for (label, (bd, bnd)) in layout.labels().iter().zip(fd.beta.iter().zip(&fnd.beta)) {
                summary.num(&format!("beta_d.{label}"), *bd);
                summary.num(&format!("beta_nd.{label}"), *bnd);
            }
            summary.num("sigma_d", fd.sigma);
            summary.num("sigma_nd", fnd.sigma);
            summary.auc(&curve);
            summary.youden(&covariate_youden_cdfs(&cd, &cnd, &z, lo, hi)?);
            curve
        }
        CovariateMethod::Ddp => {
            let root = seed(s);
            let draws_d = ddp_fit(&d, &ddp_config(s, &d, root.substream(0))?)?;
            let draws_nd = ddp_fit(&nd, &ddp_config(s, &nd, root.substream(1))?)?;
            let mut ens = ddp_roc(&draws_d, &draws_nd, &z, &grid)?;
            ens.youden = Some(dpm_youden(
                &mixtures_at(&draws_d, &z)?,
                &mixtures_at(&draws_nd, &z)?,
            )?);
            let curve = ens.summary()?;
            summary.num("draws", ens.len() as f64);
            summary.auc(&curve);
            if let Some(y) = ens.youden_summary() {
                summary.posterior_youden(&y);
            }
            curve
        }
        CovariateMethod::Rocglm => {
            let cdf_nd = nondiseased_cdf(s, &nd)?;
            let baseline = match e.baseline {
                BaselineKind::Binormal => Baseline::Binormal,
                BaselineKind::Spline => Baseline::Spline {
                    interior_knots: e.baseline_knots,
                },
            };
            let cfg = RocGlmConfig {
                p_grid: ProbGrid::interior(e.fpf_points)?,
                baseline,
                max_iter: e.max_iter,
            };
            let fit = rocglm_fit(&d, cdf_nd.as_ref(), &cfg)?;
            let curve = fit.curve(&z, &grid)?;
            for (k, a) in fit.alpha.iter().enumerate() {
                summary.num(&format!("alpha.{k}"), *a);
            }
            for (label, b) in layout.labels().iter().skip(1).zip(&fit.beta) {
                summary.num(&format!("beta.{label}"), *b);
            }
            summary.num("iterations", fit.iterations as f64);
            summary.num("deviance", fit.deviance);
            summary.text("separation", fit.separation.to_string());
            summary.text("baseline_monotone", fit.baseline_monotone.to_string());
            summary.auc(&curve);
            summary.youden(&covariate_youden_curve(&curve, cdf_nd.as_ref(), &z)?);
            curve
        }
    };
    Ok(Artifacts {
        curve: Some(curve),
        summary,
        report: Some(report),
        data_csv: None,
    })
}

/// Largest `ROC(p) - p` on the grid; the first maximizer wins ties.
fn curve_youden(curve: &RocCurveEstimate) -> (f64, f64) {
    curve
        .points()
        .map(|(p, r)| (r - p, p))
        .fold((f64::NEG_INFINITY, 0.0), |best, cur| {
            if cur.0 > best.0 {
                cur
            } else {
                best
            }
        })
}

fn adjusted(s: &Settings) -> CliResult<Artifacts> {
    let (d, nd, _, report) = ingest_regression(&s.input, design_options(s))?;
    let grid = grid(s)?;
    let cdf_nd = nondiseased_cdf(s, &nd)?;
    let curve = aroc(&d, cdf_nd.as_ref(), &grid)?;
    let mut summary = Summary::default();
    summary.num("n_diseased", d.len() as f64);
    summary.num("n_nondiseased", nd.len() as f64);
    summary.auc(&curve);
    let (yi, p) = curve_youden(&curve);
    summary.num("yi", yi);
    // the adjusted curve pools covariate values, so no single threshold exists
    summary.text("c_star", "NA");
    summary.num("p_star", p);
    Ok(Artifacts {
        curve: Some(curve),
        summary,
        report: Some(report),
        data_csv: None,
    })
}

fn timedep(s: &Settings) -> CliResult<Artifacts> {
    let Some(t) = s.estimator.time else {
        return validation("time-dependent analysis needs --time");
    };
    let (sample, report) = ingest_survival(&s.input)?;
    let grid = grid(s)?;
    let iso = s.estimator.isotonic;
    let curve = timedep_roc(&sample, t, &grid, iso)?;
    let sweep = threshold_sweep(&sample, t, iso)?;
    let (c, fpf, tpf) =
        sweep
            .iter()
            .copied()
            .fold((f64::NAN, 0.0, f64::NEG_INFINITY), |best, cur| {
                if cur.2 - cur.1 > best.2 - best.1 {
                    cur
                } else {
                    best
                }
            });
    let events = sample
        .time
        .iter()
        .zip(&sample.event)
        .filter(|(&ti, &ev)| ev && ti <= t)
        .count();
    let mut summary = Summary::default();
    summary.num("time", t);
    summary.num("n", sample.len() as f64);
    summary.num("events_by_time", events as f64);
    summary.auc(&curve);
    summary.num("yi", tpf - fpf);
    summary.num("c_star", c);
    summary.num("p_star", fpf);
    Ok(Artifacts {
        curve: Some(curve),
        summary,
        report: Some(report),
        data_csv: None,
    })
}

fn simulate(s: &Settings) -> CliResult<Artifacts> {
    let sim = &s.simulate;
    let seed = seed(s);
    let mut summary = Summary::default();
    let mut csv = String::new();
    match sim.scenario {
        Scenario::Binormal => {
            let sc = BinormalScenario {
                a: sim.a,
                b: sim.b,
                n_d: sim.n_d,
                n_nd: sim.n_nd,
                seed,
            };
            let data = gen_binormal(&sc)?;
            csv.push_str("marker,status\n");
            for y in &data.diseased {
                csv.push_str(&format!("{y},1\n"));
            }
            for y in &data.nondiseased {
                csv.push_str(&format!("{y},0\n"));
            }
            let y = true_binormal_youden(sim.a, sim.b)?;
            summary.num("true_auc", true_binormal_auc(sim.a, sim.b)?);
            summary.num("true_yi", y.yi);
            summary.num("true_c_star", y.c_star);
            summary.num("true_p_star", y.p_star);
        }
        Scenario::Covariate => {
            let sc = CovariateScenario {
                beta_d: sim.beta_d.clone(),
                beta_nd: sim.beta_nd.clone(),
                sigma_d: sim.sigma_d,
                sigma_nd: sim.sigma_nd,
                n_d: sim.n_d,
                n_nd: sim.n_nd,
                covariate_range: (sim.covariate_lo, sim.covariate_hi),
                seed,
            };
            let (d, nd) = gen_covariate_linear(&sc)?;
            csv.push_str("marker,status");
            for l in &d.labels[1..] {
                csv.push(',');
                csv.push_str(l);
            }
            csv.push('\n');
            for (sample, status) in [(&d, 1), (&nd, 0)] {
                for i in 0..sample.len() {
                    csv.push_str(&format!("{},{status}", sample.outcomes[i]));
                    for x in &sample.row(i)[1..] {
                        csv.push_str(&format!(",{x}"));
                    }
                    csv.push('\n');
                }
            }
            let mut mid = vec![1.0];
            mid.resize(sc.beta_d.len(), 0.5 * (sim.covariate_lo + sim.covariate_hi));
            summary.num("true_auc_at_midpoint", sc.true_auc(&mid)?);
        }
        Scenario::Survival => {
            let sc = SurvivalScenario {
                marker_mean: sim.marker_mean,
                marker_sd: sim.marker_sd,
                gamma: sim.gamma,
                censor_rate: sim.censor_rate,
                n: sim.n,
                seed,
            };
            let data = gen_survival(&sc)?;
            csv.push_str("marker,time,event\n");
            for i in 0..data.len() {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    data.marker[i],
                    data.time[i],
                    u8::from(data.event[i])
                ));
            }
            summary.num("n", data.len() as f64);
            summary.num("events", data.event.iter().filter(|&&e| e).count() as f64);
        }
    }
    summary.text("scenario", format!("{:?}", sim.scenario).to_lowercase());
    summary.text("data", "data.csv");
    Ok(Artifacts {
        summary,
        data_csv: Some(csv),
        ..Default::default()
    })
}
