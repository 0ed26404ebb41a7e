use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::{validation, CliError, CliResult};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ROCEVAL_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "roceval-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Binary,
    Pooled,
    Covariate,
    Aroc,
    Timedep,
    Simulate,
}

impl Analysis {
    pub fn name(self) -> &'static str {
        match self {
            Analysis::Binary => "binary",
            Analysis::Pooled => "pooled",
            Analysis::Covariate => "covariate",
            Analysis::Aroc => "aroc",
            Analysis::Timedep => "timedep",
            Analysis::Simulate => "simulate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PooledMethod {
    Empirical,
    Kernel,
    Bb,
    Dpm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CovariateMethod {
    Faraggi,
    Pepe,
    Ddp,
    Rocglm,
}

/// Estimate of the nondiseased conditional CDF used by ROC-GLM and AROC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NdCdf {
    /// Location-scale fit with normal errors.
    Normal,
    /// Location-scale fit with the residual ECDF.
    Pepe,
    /// Posterior mean of the dependent DP mixture.
    Ddp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Bandwidth {
    Silverman,
    Normal,
    Lscv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BaselineKind {
    Binormal,
    Spline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Binormal,
    Covariate,
    Survival,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputSettings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub marker: String,
    pub status: String,
    pub time: String,
    pub event: String,
    pub covariates: Vec<String>,
    pub factors: Vec<String>,
    pub log_marker: bool,
}

impl Default for InputSettings {
    fn default() -> Self {
        Self {
            path: None,
            marker: "marker".into(),
            status: "status".into(),
            time: "time".into(),
            event: "event".into(),
            covariates: Vec::new(),
            factors: Vec::new(),
            log_marker: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSettings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    pub svg: bool,
    pub full_precision: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorSettings {
    pub pooled_method: PooledMethod,
    pub covariate_method: CovariateMethod,
    pub seed: u64,
    pub stream: u64,
    pub grid_points: usize,
    pub bandwidth: Bandwidth,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth_d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth_nd: Option<f64>,
    /// Bayesian bootstrap draws.
    pub draws: usize,
    pub burn_in: usize,
    pub n_save: usize,
    pub truncation: usize,
    pub alpha: f64,
    pub nd_cdf: NdCdf,
    pub baseline: BaselineKind,
    pub baseline_knots: usize,
    pub fpf_points: usize,
    /// Fisher-scoring iteration cap for the ROC-GLM probit fit.
    pub max_iter: usize,
    /// B-spline mean function for the dependent DP mixture.
    pub spline: bool,
    pub interactions: bool,
    pub isotonic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prevalence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    /// Covariate values (numeric or factor level) at which to evaluate.
    pub at: BTreeMap<String, String>,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        Self {
            pooled_method: PooledMethod::Empirical,
            covariate_method: CovariateMethod::Faraggi,
            seed: 1,
            stream: 0,
            grid_points: 201,
            bandwidth: Bandwidth::Silverman,
            bandwidth_d: None,
            bandwidth_nd: None,
            draws: 1000,
            burn_in: 500,
            n_save: 1000,
            truncation: 10,
            alpha: 1.0,
            nd_cdf: NdCdf::Pepe,
            baseline: BaselineKind::Binormal,
            baseline_knots: 2,
            fpf_points: 50,
            max_iter: 100,
            spline: false,
            interactions: false,
            isotonic: false,
            threshold: None,
            prevalence: None,
            time: None,
            at: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSettings {
    pub scenario: Scenario,
    pub a: f64,
    pub b: f64,
    pub n_d: usize,
    pub n_nd: usize,
    pub beta_d: Vec<f64>,
    pub beta_nd: Vec<f64>,
    pub sigma_d: f64,
    pub sigma_nd: f64,
    pub covariate_lo: f64,
    pub covariate_hi: f64,
    pub n: usize,
    pub marker_mean: f64,
    pub marker_sd: f64,
    pub gamma: f64,
    pub censor_rate: f64,
}

impl Default for SimulateSettings {
    fn default() -> Self {
        Self {
            scenario: Scenario::Binormal,
            a: 1.0,
            b: 1.0,
            n_d: 500,
            n_nd: 500,
            beta_d: vec![0.5, 1.0],
            beta_nd: vec![0.0, 0.0],
            sigma_d: 1.0,
            sigma_nd: 1.0,
            covariate_lo: 0.0,
            covariate_hi: 1.0,
            n: 500,
            marker_mean: 0.0,
            marker_sd: 1.0,
            gamma: 1.0,
            censor_rate: 0.0,
        }
    }
}

/// Everything that determines a run. Loaded from TOML, then overridden by
/// command-line flags; the resolved value is recorded with every output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analysis: Option<Analysis>,
    pub input: InputSettings,
    pub output: OutputSettings,
    pub estimator: EstimatorSettings,
    pub simulate: SimulateSettings,
}

impl Settings {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        toml::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("settings serialize")
    }

    /// Flag, then config file, then environment, then the built-in default.
    pub fn out_dir(&self) -> PathBuf {
        self.output
            .dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }

    pub fn validate(&self) -> CliResult<()> {
        let e = &self.estimator;
        if e.grid_points < 2 {
            return validation("grid_points must be at least 2");
        }
        if e.draws == 0 || e.n_save == 0 || e.truncation < 2 {
            return validation("draws and n_save must be positive and truncation at least 2");
        }
        if !(e.alpha > 0.0) {
            return validation("alpha must be positive");
        }
        if e.fpf_points == 0 || e.max_iter == 0 {
            return validation("fpf_points and max_iter must be positive");
        }
        if e.interactions && !e.spline {
            return validation("interactions require the spline design");
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "roceval",
    version,
    about = "ROC curve, AUC and Youden index estimation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default: $ROCEVAL_OUT_DIR, then ./roceval-out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
    /// Also write an SVG plot of the curve.
    #[arg(long, global = true)]
    pub svg: bool,
    /// Also write the curve at full precision.
    #[arg(long, global = true)]
    pub full_precision: bool,
}

#[derive(Debug, Args, Default)]
pub struct InputArgs {
    /// Cohort CSV with a header row.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub marker_col: Option<String>,
    #[arg(long)]
    pub status_col: Option<String>,
    /// Analyse the natural logarithm of the marker.
    #[arg(long)]
    pub log_marker: bool,
}

#[derive(Debug, Args, Default)]
pub struct CovariateArgs {
    /// Numeric covariate columns (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub covariates: Vec<String>,
    /// Categorical covariate columns (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub factors: Vec<String>,
    /// Evaluation point as name=value (repeatable).
    #[arg(long = "at", value_parser = parse_key_value)]
    pub at: Vec<(String, String)>,
    #[arg(long)]
    pub nd_cdf: Option<NdCdf>,
}

#[derive(Debug, Args, Default)]
pub struct McmcArgs {
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub n_save: Option<usize>,
    #[arg(long)]
    pub truncation: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classification fractions and predictive values at one threshold.
    Binary {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        prevalence: Option<f64>,
    },
    /// ROC curve without covariates.
    Pooled {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        method: Option<PooledMethod>,
        #[arg(long)]
        bandwidth: Option<Bandwidth>,
        /// Bayesian bootstrap draws.
        #[arg(long)]
        draws: Option<usize>,
        #[command(flatten)]
        mcmc: McmcArgs,
    },
    /// Covariate-specific ROC curve at one covariate value.
    Covariate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        cov: CovariateArgs,
        #[arg(long)]
        method: Option<CovariateMethod>,
        #[arg(long)]
        baseline: Option<BaselineKind>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// B-spline mean function (dependent DP mixture only).
        #[arg(long)]
        spline: bool,
        #[arg(long)]
        interactions: bool,
        #[command(flatten)]
        mcmc: McmcArgs,
    },
    /// Covariate-adjusted ROC curve.
    Aroc {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        cov: CovariateArgs,
        #[command(flatten)]
        mcmc: McmcArgs,
    },
    /// Cumulative/dynamic time-dependent ROC curve at one time.
    Timedep {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        time: Option<f64>,
        #[arg(long)]
        time_col: Option<String>,
        #[arg(long)]
        event_col: Option<String>,
        /// Pool-adjacent-violators correction of the swept fractions.
        #[arg(long)]
        isotonic: bool,
    },
    /// Generate a cohort file from a scenario with known truth.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        scenario: Option<Scenario>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        n_d: Option<usize>,
        #[arg(long)]
        n_nd: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        censor_rate: Option<f64>,
    },
}

fn parse_key_value(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn apply_common(s: &mut Settings, c: &CommonArgs) {
    if let Some(d) = &c.out {
        s.output.dir = Some(d.clone());
    }
    if let Some(v) = c.seed {
        s.estimator.seed = v;
    }
    if let Some(v) = c.grid_points {
        s.estimator.grid_points = v;
    }
    s.output.svg |= c.svg;
    s.output.full_precision |= c.full_precision;
}

fn apply_input(s: &mut Settings, i: &InputArgs) {
    if let Some(p) = &i.input {
        s.input.path = Some(p.clone());
    }
    if let Some(v) = &i.marker_col {
        s.input.marker = v.clone();
    }
    if let Some(v) = &i.status_col {
        s.input.status = v.clone();
    }
    s.input.log_marker |= i.log_marker;
}

fn apply_cov(s: &mut Settings, c: &CovariateArgs) {
    if !c.covariates.is_empty() {
        s.input.covariates = c.covariates.clone();
    }
    if !c.factors.is_empty() {
        s.input.factors = c.factors.clone();
    }
    for (k, v) in &c.at {
        s.estimator.at.insert(k.clone(), v.clone());
    }
    if let Some(v) = c.nd_cdf {
        s.estimator.nd_cdf = v;
    }
}

fn apply_mcmc(s: &mut Settings, m: &McmcArgs) {
    if let Some(v) = m.burn_in {
        s.estimator.burn_in = v;
    }
    if let Some(v) = m.n_save {
        s.estimator.n_save = v;
    }
    if let Some(v) = m.truncation {
        s.estimator.truncation = v;
    }
}

impl Command {
    pub fn analysis(&self) -> Analysis {
        match self {
            Command::Binary { .. } => Analysis::Binary,
            Command::Pooled { .. } => Analysis::Pooled,
            Command::Covariate { .. } => Analysis::Covariate,
            Command::Aroc { .. } => Analysis::Aroc,
            Command::Timedep { .. } => Analysis::Timedep,
            Command::Simulate { .. } => Analysis::Simulate,
        }
    }

    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Binary { common, .. }
            | Command::Pooled { common, .. }
            | Command::Covariate { common, .. }
            | Command::Aroc { common, .. }
            | Command::Timedep { common, .. }
            | Command::Simulate { common, .. } => common,
        }
    }

    /// Loads the config file (if any) and applies this command's flags.
    pub fn resolve(&self) -> CliResult<Settings> {
        let common = self.common();
        let mut s = match &common.config {
            Some(p) => Settings::from_file(p)?,
            None => Settings::default(),
        };
        let analysis = self.analysis();
        if let Some(a) = s.analysis {
            if a != analysis {
                return validation(format!(
                    "config is for the {} analysis but the {} subcommand was run",
                    a.name(),
                    analysis.name()
                ));
            }
        }
        s.analysis = Some(analysis);
        apply_common(&mut s, common);
        match self {
            Command::Binary {
                input,
                threshold,
                prevalence,
                ..
            } => {
                apply_input(&mut s, input);
                if threshold.is_some() {
                    s.estimator.threshold = *threshold;
                }
                if prevalence.is_some() {
                    s.estimator.prevalence = *prevalence;
                }
            }
            Command::Pooled {
                input,
                method,
                bandwidth,
                draws,
                mcmc,
                ..
            } => {
                apply_input(&mut s, input);
                apply_mcmc(&mut s, mcmc);
                if let Some(m) = method {
                    s.estimator.pooled_method = *m;
                }
                if let Some(b) = bandwidth {
                    s.estimator.bandwidth = *b;
                }
                if let Some(d) = draws {
                    s.estimator.draws = *d;
                }
            }
            Command::Covariate {
                input,
                cov,
                method,
                baseline,
                max_iter,
                spline,
                interactions,
                mcmc,
                ..
            } => {
                apply_input(&mut s, input);
                apply_cov(&mut s, cov);
                apply_mcmc(&mut s, mcmc);
                if let Some(m) = method {
                    s.estimator.covariate_method = *m;
                }
                if let Some(b) = baseline {
                    s.estimator.baseline = *b;
                }
                if let Some(m) = max_iter {
                    s.estimator.max_iter = *m;
                }
                s.estimator.spline |= *spline;
                s.estimator.interactions |= *interactions;
            }
            Command::Aroc {
                input, cov, mcmc, ..
            } => {
                apply_input(&mut s, input);
                apply_cov(&mut s, cov);
                apply_mcmc(&mut s, mcmc);
            }
            Command::Timedep {
                input,
                time,
                time_col,
                event_col,
                isotonic,
                ..
            } => {
                apply_input(&mut s, input);
                if time.is_some() {
                    s.estimator.time = *time;
                }
                if let Some(c) = time_col {
                    s.input.time = c.clone();
                }
                if let Some(c) = event_col {
                    s.input.event = c.clone();
                }
                s.estimator.isotonic |= *isotonic;
            }
            Command::Simulate {
                scenario,
                a,
                b,
                n_d,
                n_nd,
                n,
                gamma,
                censor_rate,
                ..
            } => {
                let sim = &mut s.simulate;
                if let Some(v) = scenario {
                    sim.scenario = *v;
                }
                macro_rules! set {
                    ($($f:ident),*) => {$( if let Some(v) = $f { sim.$f = *v; } )*};
                }
                set!(a, b, n_d, n_nd, n, gamma, censor_rate);
            }
        }
        s.validate()?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let s = Settings::default();
        assert_eq!(toml::from_str::<Settings>(&s.to_toml()).unwrap(), s);
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.toml");
        std::fs::write(
            &cfg,
            "analysis = \"pooled\"\n[estimator]\npooled_method = \"bb\"\nseed = 7\ndraws = 50\n",
        )
        .unwrap();
        let cli = Cli::parse_from([
            "roceval",
            "pooled",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "9",
        ]);
        let s = cli.command.resolve().unwrap();
        assert_eq!(s.estimator.seed, 9);
        assert_eq!(s.estimator.draws, 50);
        assert_eq!(s.estimator.pooled_method, PooledMethod::Bb);
    }

    #[test]
    fn mismatched_analysis_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.toml");
        std::fs::write(&cfg, "analysis = \"timedep\"\n").unwrap();
        let cli = Cli::parse_from(["roceval", "pooled", "--config", cfg.to_str().unwrap()]);
        assert!(matches!(
            cli.command.resolve(),
            Err(CliError::Validation(_))
        ));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<Settings>("[estimator]\nsede = 3\n").is_err());
    }

    #[test]
    fn at_values_parse() {
        let cli = Cli::parse_from(["roceval", "covariate", "--at", "age=50", "--at", "sex=F"]);
        let s = cli.command.resolve().unwrap();
        assert_eq!(s.estimator.at.get("age").map(String::as_str), Some("50"));
        assert_eq!(s.estimator.at.len(), 2);
    }
}
