use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use roceval::binary::DiagnosticSample;
use roceval::covariate::{BSplineSpec, RegressionSample, SplineDesign};
use roceval::nalgebra::DMatrix;
use roceval::timedep::SurvivalSample;

use crate::config::InputSettings;
use crate::{validation, CliError, CliResult};

/// Rows read, rows used, and why the others were left out.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_used: usize,
    pub excluded: Vec<String>,
}

impl IngestReport {
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("rows_read = {}", self.rows_read),
            format!("rows_used = {}", self.rows_used),
            format!("rows_excluded = {}", self.excluded.len()),
        ];
        out.extend(self.excluded.iter().map(|e| format!("excluded: {e}")));
        out
    }
}

struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn read(path: &Path) -> CliResult<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| CliError::Validation(format!("cannot open {}: {e}", path.display())))?;
        let headers = rdr
            .headers()
            .map_err(|e| CliError::Validation(format!("{}: bad header: {e}", path.display())))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| {
                CliError::Validation(format!("{}: row {}: {e}", path.display(), i + 1))
            })?;
            rows.push(rec.iter().map(str::to_string).collect());
        }
        Ok(Self { headers, rows })
    }

    fn column(&self, name: &str) -> CliResult<usize> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| {
            CliError::Validation(format!(
                "missing column {name:?}; header has {:?}",
                self.headers
            ))
        })
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "na" | "NaN" | ".")
}

fn number(cell: &str, row: usize, col: &str) -> CliResult<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => validation(format!(
            "row {row}, column {col:?}: {cell:?} is not a finite number"
        )),
    }
}

fn indicator(cell: &str, row: usize, col: &str) -> CliResult<bool> {
    match cell {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => validation(format!(
            "row {row}, column {col:?}: {cell:?} must be 0 or 1"
        )),
    }
}

fn marker_value(cell: &str, row: usize, input: &InputSettings) -> CliResult<f64> {
    let y = number(cell, row, &input.marker)?;
    if input.log_marker {
        if !(y > 0.0) {
            return validation(format!(
                "row {row}, column {:?}: log transform needs positive values, got {y}",
                input.marker
            ));
        }
        return Ok(y.ln());
    }
    Ok(y)
}

/// Keeps rows with every listed column present; the rest go to the report.
fn complete_rows<'a>(
    table: &'a Table,
    cols: &[(usize, &str)],
    report: &mut IngestReport,
) -> Vec<(usize, &'a [String])> {
    report.rows_read = table.rows.len();
    let mut kept = Vec::new();
    for (i, row) in table.rows.iter().enumerate() {
        let missing: Vec<&str> = cols
            .iter()
            .filter(|(c, _)| row.get(*c).is_none_or(|v| is_missing(v)))
            .map(|(_, n)| *n)
            .collect();
        if missing.is_empty() {
            kept.push((i + 1, row.as_slice()));
        } else {
            report
                .excluded
                .push(format!("row {}: missing {}", i + 1, missing.join(", ")));
        }
    }
    report.rows_used = kept.len();
    kept
}

fn require_path(input: &InputSettings) -> CliResult<&Path> {
    input
        .path
        .as_deref()
        .ok_or_else(|| CliError::Validation("no input file given (--input or [input] path)".into()))
}

/// Marker split by a 0/1 status column.
pub fn ingest_diagnostic(input: &InputSettings) -> CliResult<(DiagnosticSample, IngestReport)> {
    let table = Table::read(require_path(input)?)?;
    let (mc, sc) = (table.column(&input.marker)?, table.column(&input.status)?);
    let mut report = IngestReport::default();
    let (mut d, mut nd) = (Vec::new(), Vec::new());
    for (row, cells) in complete_rows(
        &table,
        &[(mc, &input.marker), (sc, &input.status)],
        &mut report,
    ) {
        let y = marker_value(&cells[mc], row, input)?;
        if indicator(&cells[sc], row, &input.status)? {
            d.push(y);
        } else {
            nd.push(y);
        }
    }
    check_groups(d.len(), nd.len())?;
    Ok((DiagnosticSample::new(d, nd)?, report))
}

fn check_groups(n_d: usize, n_nd: usize) -> CliResult<()> {
    if n_d == 0 || n_nd == 0 {
        return validation(format!(
            "empty group after filtering: {n_d} diseased, {n_nd} nondiseased"
        ));
    }
    Ok(())
}

/// Marker, follow-up time and event indicator.
pub fn ingest_survival(input: &InputSettings) -> CliResult<(SurvivalSample, IngestReport)> {
    let table = Table::read(require_path(input)?)?;
    let (mc, tc, ec) = (
        table.column(&input.marker)?,
        table.column(&input.time)?,
        table.column(&input.event)?,
    );
    let mut report = IngestReport::default();
    let (mut marker, mut time, mut event) = (Vec::new(), Vec::new(), Vec::new());
    let cols = [
        (mc, input.marker.as_str()),
        (tc, input.time.as_str()),
        (ec, input.event.as_str()),
    ];
    for (row, cells) in complete_rows(&table, &cols, &mut report) {
        marker.push(marker_value(&cells[mc], row, input)?);
        let t = number(&cells[tc], row, &input.time)?;
        if t < 0.0 {
            return validation(format!(
                "row {row}, column {:?}: negative time {t}",
                input.time
            ));
        }
        time.push(t);
        event.push(indicator(&cells[ec], row, &input.event)?);
    }
    if marker.is_empty() {
        return validation("no complete rows");
    }
    Ok((SurvivalSample::new(marker, time, event)?, report))
}

/// How covariate values become design rows, shared by both groups.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariateLayout {
    pub numeric: Vec<String>,
    /// Factor names with their sorted levels; the first level is the reference.
    pub factors: Vec<(String, Vec<String>)>,
    pub spline: Option<SplineDesign>,
}

impl CovariateLayout {
    fn row(&self, numeric: &[f64], codes: &[usize]) -> CliResult<Vec<f64>> {
        match &self.spline {
            Some(sd) => Ok(sd.row(numeric[0], codes)?),
            None => {
                let mut r = vec![1.0];
                r.extend_from_slice(numeric);
                for ((_, levels), &code) in self.factors.iter().zip(codes) {
                    r.extend((1..levels.len()).map(|l| if code == l { 1.0 } else { 0.0 }));
                }
                Ok(r)
            }
        }
    }

    pub fn labels(&self) -> Vec<String> {
        match &self.spline {
            Some(sd) => {
                let names: Vec<String> = self.factors.iter().map(|(n, _)| n.clone()).collect();
                sd.labels(&self.numeric[0], &names)
            }
            None => {
                let mut out = vec!["(intercept)".to_string()];
                out.extend(self.numeric.iter().cloned());
                for (name, levels) in &self.factors {
                    out.extend(levels[1..].iter().map(|l| format!("{name}[{l}]")));
                }
                out
            }
        }
    }

    /// Design row at named covariate values; every covariate must be given.
    pub fn row_at(&self, at: &BTreeMap<String, String>) -> CliResult<Vec<f64>> {
        let known: BTreeSet<&str> = self
            .numeric
            .iter()
            .chain(self.factors.iter().map(|(n, _)| n))
            .map(String::as_str)
            .collect();
        if let Some(k) = at.keys().find(|k| !known.contains(k.as_str())) {
            return validation(format!("evaluation point names unknown covariate {k:?}"));
        }
        let mut numeric = Vec::new();
        for name in &self.numeric {
            let v = at.get(name).ok_or_else(|| {
                CliError::Validation(format!(
                    "no value for covariate {name:?} (use --at {name}=...)"
                ))
            })?;
            numeric.push(
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| {
                        CliError::Validation(format!("covariate {name:?}: {v:?} is not a number"))
                    })?,
            );
        }
        let mut codes = Vec::new();
        for (name, levels) in &self.factors {
            let v = at.get(name).ok_or_else(|| {
                CliError::Validation(format!(
                    "no level for factor {name:?} (use --at {name}=...)"
                ))
            })?;
            codes.push(levels.iter().position(|l| l == v).ok_or_else(|| {
                CliError::Validation(format!(
                    "factor {name:?} has no level {v:?}; levels are {levels:?}"
                ))
            })?);
        }
        self.row(&numeric, &codes)
    }
}

/// Options for building the covariate design.
#[derive(Debug, Clone, Copy, Default)]
pub struct DesignOptions {
    pub spline: bool,
    pub interactions: bool,
}

/// Diseased and nondiseased regression samples on a common design.
pub fn ingest_regression(
    input: &InputSettings,
    opts: DesignOptions,
) -> CliResult<(
    RegressionSample,
    RegressionSample,
    CovariateLayout,
    IngestReport,
)> {
    if input.covariates.is_empty() && input.factors.is_empty() {
        return validation("no covariates given (--covariates / --factors)");
    }
    if opts.spline && input.covariates.len() != 1 {
        return validation("the spline design needs exactly one numeric covariate");
    }
    let table = Table::read(require_path(input)?)?;
    let mc = table.column(&input.marker)?;
    let sc = table.column(&input.status)?;
    let num_cols: Vec<usize> = input
        .covariates
        .iter()
        .map(|c| table.column(c))
        .collect::<CliResult<_>>()?;
    let fac_cols: Vec<usize> = input
        .factors
        .iter()
        .map(|c| table.column(c))
        .collect::<CliResult<_>>()?;
    let mut cols: Vec<(usize, &str)> = vec![(mc, &input.marker), (sc, &input.status)];
    cols.extend(
        num_cols
            .iter()
            .zip(&input.covariates)
            .map(|(c, n)| (*c, n.as_str())),
    );
    cols.extend(
        fac_cols
            .iter()
            .zip(&input.factors)
            .map(|(c, n)| (*c, n.as_str())),
    );

    let mut report = IngestReport::default();
    let rows = complete_rows(&table, &cols, &mut report);

    struct Parsed {
        y: f64,
        diseased: bool,
        numeric: Vec<f64>,
        levels: Vec<String>,
    }
    let mut parsed = Vec::with_capacity(rows.len());
    for (row, cells) in rows {
        parsed.push(Parsed {
            y: marker_value(&cells[mc], row, input)?,
            diseased: indicator(&cells[sc], row, &input.status)?,
            numeric: num_cols
                .iter()
                .zip(&input.covariates)
                .map(|(c, n)| number(&cells[*c], row, n))
                .collect::<CliResult<_>>()?,
            levels: fac_cols.iter().map(|c| cells[*c].clone()).collect(),
        });
    }
    let factors: Vec<(String, Vec<String>)> = input
        .factors
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let set: BTreeSet<&String> = parsed.iter().map(|p| &p.levels[k]).collect();
            (name.clone(), set.into_iter().cloned().collect())
        })
        .collect();
    let spline = if opts.spline {
        let x: Vec<f64> = parsed.iter().map(|p| p.numeric[0]).collect();
        if x.is_empty() {
            return validation("no complete rows");
        }
        Some(SplineDesign {
            spline: BSplineSpec::quartiles(&x)?,
            factor_levels: factors.iter().map(|(_, l)| l.len()).collect(),
            interactions: opts.interactions,
        })
    } else {
        None
    };
    let layout = CovariateLayout {
        numeric: input.covariates.clone(),
        factors,
        spline,
    };
    let labels = layout.labels();

    let mut groups = [(Vec::new(), Vec::new()), (Vec::new(), Vec::new())];
    for p in &parsed {
        let codes: Vec<usize> = p
            .levels
            .iter()
            .zip(&layout.factors)
            .map(|(v, (_, levels))| {
                levels
                    .iter()
                    .position(|l| l == v)
                    .expect("level collected above")
            })
            .collect();
        let g = &mut groups[usize::from(p.diseased)];
        g.0.push(p.y);
        g.1.extend(layout.row(&p.numeric, &codes)?);
    }
    let [(y_nd, z_nd), (y_d, z_d)] = groups;
    check_groups(y_d.len(), y_nd.len())?;
    let k = labels.len();
    let build = |y: Vec<f64>, z: Vec<f64>| -> CliResult<RegressionSample> {
        let n = y.len();
        Ok(RegressionSample::new(
            y,
            DMatrix::from_row_slice(n, k, &z),
            labels.clone(),
        )?)
    };
    Ok((build(y_d, z_d)?, build(y_nd, z_nd)?, layout, report))
}
