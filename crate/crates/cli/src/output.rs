use std::io::Write;
use std::path::Path;

use roceval::indices::YoudenResult;
use roceval::pooled::{PosteriorYouden, RocCurveEstimate};
use sha2::{Digest, Sha256};

use crate::config::Settings;
use crate::ingest::IngestReport;
use crate::{CliError, CliResult};

/// Formats with six significant digits, fixed notation for moderate
/// magnitudes and scientific notation otherwise.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // the exponent after rounding to six digits decides the layout
    let sci = format!("{x:.5e}");
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        trim_zeros(format!("{:.*}", (5 - exp).max(0) as usize, x))
    } else {
        format!("{}e{exp}", trim_zeros(mant.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| CliError::Io(format!("cannot write {}: {}", path.display(), e.error)))?;
    Ok(())
}

pub fn file_digest(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

/// Settings as stamped into outputs. The output directory is left out so
/// that identical runs written to different places stay byte-identical.
fn recorded(settings: &Settings) -> Settings {
    let mut s = settings.clone();
    s.output.dir = None;
    s
}

/// Tool version, input digest and the resolved settings, in that order.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub lines: Vec<String>,
}

impl Provenance {
    pub fn new(settings: &Settings, input_sha256: Option<&str>) -> Self {
        let analysis = settings.analysis.map_or("unknown", |a| a.name());
        let mut lines = vec![
            format!("roceval {} {analysis}", env!("CARGO_PKG_VERSION")),
            format!("input_sha256 = {}", input_sha256.unwrap_or("none")),
        ];
        lines.extend(
            recorded(settings)
                .to_toml()
                .lines()
                .filter(|l| !l.is_empty())
                .map(str::to_string),
        );
        Self { lines }
    }

    pub fn commented(&self) -> String {
        self.lines.iter().map(|l| format!("# {l}\n")).collect()
    }
}

pub fn curve_csv(curve: &RocCurveEstimate, prov: &Provenance, full_precision: bool) -> String {
    let fmt = |x: f64| {
        if full_precision {
            format!("{x}")
        } else {
            fmt6(x)
        }
    };
    let mut out = prov.commented();
    out.push_str("p,roc,band_lo,band_hi\n");
    for (i, (p, r)) in curve.points().enumerate() {
        let band = |b: &Option<Vec<f64>>| b.as_ref().map_or("NA".to_string(), |v| fmt(v[i]));
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt(p),
            fmt(r),
            band(&curve.band_lo),
            band(&curve.band_hi)
        ));
    }
    out
}

/// Ordered `key = value` entries of the summary table.
#[derive(Debug, Clone, Default)]
pub struct Summary {
    pub entries: Vec<(String, String)>,
}

impl Summary {
    pub fn text(&mut self, key: &str, value: impl Into<String>) {
        self.entries.push((key.into(), value.into()));
    }

    pub fn num(&mut self, key: &str, value: f64) {
        self.text(key, fmt6(value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn auc(&mut self, curve: &RocCurveEstimate) {
        self.num("auc", curve.auc);
        if let Some((lo, hi)) = curve.auc_ci {
            self.num("auc_ci_lo", lo);
            self.num("auc_ci_hi", hi);
        }
    }

    pub fn youden(&mut self, y: &YoudenResult) {
        self.num("yi", y.yi);
        self.num("c_star", y.c_star);
        self.num("p_star", y.p_star);
        self.text("below_chance", y.below_chance.to_string());
    }

    pub fn posterior_youden(&mut self, y: &PosteriorYouden) {
        self.youden(&y.mean);
        self.num("yi_ci_lo", y.yi_ci.0);
        self.num("yi_ci_hi", y.yi_ci.1);
        self.num("c_star_ci_lo", y.c_star_ci.0);
        self.num("c_star_ci_hi", y.c_star_ci.1);
    }

    pub fn render(&self, prov: &Provenance) -> String {
        let mut out = prov.commented();
        for (k, v) in &self.entries {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}

pub fn metadata_toml(
    settings: &Settings,
    input_sha256: Option<&str>,
    report: Option<&IngestReport>,
    files: &[String],
) -> String {
    let mut run = toml::Table::new();
    run.insert("tool".into(), "roceval".into());
    run.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    run.insert(
        "analysis".into(),
        settings.analysis.map_or("unknown", |a| a.name()).into(),
    );
    run.insert("input_sha256".into(), input_sha256.unwrap_or("none").into());
    if let Some(r) = report {
        run.insert("rows_read".into(), (r.rows_read as i64).into());
        run.insert("rows_used".into(), (r.rows_used as i64).into());
        run.insert(
            "excluded".into(),
            toml::Value::Array(r.excluded.iter().map(|e| e.clone().into()).collect()),
        );
    }
    run.insert(
        "files".into(),
        toml::Value::Array(files.iter().map(|f| f.clone().into()).collect()),
    );
    let mut doc = toml::Table::new();
    doc.insert("run".into(), toml::Value::Table(run));
    doc.insert(
        "settings".into(),
        toml::Value::Table(toml::Table::try_from(recorded(settings)).expect("settings serialize")),
    );
    toml::to_string(&doc).expect("metadata serialize")
}

pub fn error_json(err: &CliError) -> String {
    let v = serde_json::json!({
        "kind": err.kind(),
        "exit_code": err.exit_code(),
        "message": err.to_string(),
    });
    format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
}
