//! Per-condition analysis of a study and its JSON / CSV renderings, plus the
//! tabular renderings of the E-model table and curves.
//!
//! Reported numbers are rounded to 6 decimals and every collection is emitted
//! in a fixed order, so identical inputs give byte-identical output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::emodel::{estimate_gob_pow_tme, CurvePoint, EModelPoint, ThresholdSet};
use crate::error::{QoeError, Result};
use crate::estimators::{
    acceptance_rate, condition_stats, empirical_pmf, mos, quantile_of, sos, standard_error,
    theta_acceptability, VarianceMode,
};
use crate::scalar::Scalar;
use crate::sos_model::{condition_moments, fit_dataset, SosFit};
use crate::types::{ensure_valid, ScaleKind, Statistic, StudyDataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = QoeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(QoeError::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

/// Rounds to 6 decimals; `-0` becomes `0`.
pub fn round6(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn r6<T: Scalar>(x: T) -> f64 {
    round6(x.as_f64())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSummary {
    pub kind: ScaleKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileValue {
    pub quantile: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptabilityValue {
    pub theta: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSummary {
    pub gob: f64,
    pub pow: f64,
    pub tme: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: String,
    pub count: usize,
    pub mos: f64,
    pub sos: Option<f64>,
    pub standard_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pmf: Option<BTreeMap<i64, f64>>,
    #[serde(default)]
    pub quantiles: Vec<QuantileValue>,
    #[serde(default)]
    pub acceptability: Vec<AcceptabilityValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acceptance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pow: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tme: Option<f64>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub a: f64,
    pub raw_a: f64,
    pub residual: f64,
    pub conditions_used: usize,
    pub degenerate_conditions: usize,
}

impl<T: Scalar> From<&SosFit<T>> for FitSummary {
    fn from(fit: &SosFit<T>) -> Self {
        let degenerate = fit.degenerate_count();
        Self {
            a: r6(fit.a),
            raw_a: r6(fit.raw_a),
            residual: r6(fit.residual),
            conditions_used: fit.points.len() - degenerate,
            degenerate_conditions: degenerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub scale: ScaleSummary,
    pub variance_mode: VarianceMode,
    pub thresholds: Option<ThresholdSummary>,
    pub conditions: Vec<ConditionReport>,
    pub sos_fit: Option<FitSummary>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

fn resolve_thresholds<T: Scalar>(dataset: &StudyDataset<T>) -> Result<Option<ThresholdSet<T>>> {
    let def = &dataset.definition;
    if let Some(t) = def.thresholds {
        return Ok(Some(t));
    }
    if def.statistics.contains(&Statistic::GobPowTme) {
        return ThresholdSet::default_for(&def.scale).map(Some).ok_or_else(|| {
            QoeError::InvalidParameter(format!(
                "no default GoB/PoW/TME thresholds for scale {}; pass them explicitly",
                def.scale
            ))
        });
    }
    Ok(None)
}

/// Computes every requested per-condition statistic and the study-level SOS
/// parameter fit.
pub fn analyze<T: Scalar>(dataset: &StudyDataset<T>, mode: VarianceMode) -> Result<StudyReport> {
    ensure_valid(dataset)?;
    let def = &dataset.definition;
    let scale = def.scale;
    let thresholds = resolve_thresholds(dataset)?;
    let want_pmf = def.statistics.contains(&Statistic::Pmf) && scale.is_discrete();

    let mut conditions = Vec::new();
    for stats in condition_stats(dataset)? {
        let mut warnings = Vec::new();
        let (sd, se) = match (sos(&stats), standard_error(&stats)) {
            (Ok(sd), Ok(se)) => (Some(r6(sd)), Some(r6(se))),
            (Err(e), _) | (_, Err(e)) => {
                warnings.push(format!("sos undefined: {e}"));
                (None, None)
            }
        };
        let pmf = if want_pmf {
            Some(
                empirical_pmf(&stats)?
                    .probabilities
                    .into_iter()
                    .map(|(k, p)| (k, r6(p)))
                    .collect(),
            )
        } else {
            None
        };
        let quantiles = def
            .quantiles
            .iter()
            .map(|&spec| QuantileValue {
                quantile: spec.to_string(),
                value: r6(quantile_of(&stats, spec)),
            })
            .collect();
        let acceptability = def
            .thetas
            .iter()
            .map(|&theta| AcceptabilityValue {
                theta: r6(theta),
                value: r6(theta_acceptability(&stats, theta)),
            })
            .collect();
        let acceptance = if scale.is_binary() {
            Some(r6(acceptance_rate(&stats)?))
        } else {
            None
        };
        let (gob, pow, tme) = match &thresholds {
            Some(t) => {
                let (g, p, e) = estimate_gob_pow_tme(&stats, t)?;
                (Some(r6(g)), Some(r6(p)), Some(r6(e)))
            }
            None => (None, None, None),
        };
        conditions.push(ConditionReport {
            condition: stats.condition().to_string(),
            count: stats.count(),
            mos: r6(mos(&stats)),
            sos: sd,
            standard_error: se,
            pmf,
            quantiles,
            acceptability,
            acceptance,
            gob,
            pow,
            tme,
            warnings,
        });
    }

    let mut warnings = Vec::new();
    let sos_fit = match fit_dataset(dataset, mode) {
        Ok(fit) => {
            if fit.was_clamped() {
                warnings.push(format!(
                    "SOS parameter {} clamped to [0, 1]",
                    r6(fit.raw_a)
                ));
            }
            Some(FitSummary::from(&fit))
        }
        Err(QoeError::NoInformation) => {
            warnings.push("no SOS fit: every condition has its MOS at a scale bound".into());
            None
        }
        Err(QoeError::InsufficientSamples { condition, .. }) => {
            warnings.push(format!(
                "no SOS fit: condition `{condition}` has a single rating"
            ));
            None
        }
        Err(e) => return Err(e),
    };

    Ok(StudyReport {
        scale: ScaleSummary {
            kind: scale.kind(),
            lower: r6(scale.lower()),
            upper: r6(scale.upper()),
        },
        variance_mode: mode,
        thresholds: thresholds.map(|t| ThresholdSummary {
            gob: r6(t.theta_gb()),
            pow: r6(t.theta_pw()),
            tme: r6(t.theta_te()),
        }),
        conditions,
        sos_fit,
        warnings,
    })
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl StudyReport {
    pub fn to_json(&self) -> Result<String> {
        to_json_text(self)
    }

    /// One row per condition. Study-level results are not part of the CSV.
    pub fn to_csv(&self) -> Result<String> {
        let first = self.conditions.first();
        let quantile_labels: Vec<String> = first
            .map(|c| c.quantiles.iter().map(|q| q.quantile.clone()).collect())
            .unwrap_or_default();
        let thetas: Vec<f64> = first
            .map(|c| c.acceptability.iter().map(|a| a.theta).collect())
            .unwrap_or_default();
        let pmf_keys: Vec<i64> = first
            .and_then(|c| c.pmf.as_ref())
            .map(|p| p.keys().copied().collect())
            .unwrap_or_default();
        let with_acceptance = first.is_some_and(|c| c.acceptance.is_some());
        let with_thresholds = self.thresholds.is_some();

        let mut header: Vec<String> = ["condition", "count", "mos", "sos", "standard_error"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend(pmf_keys.iter().map(|k| format!("p_{k}")));
        header.extend(quantile_labels.iter().map(|q| format!("q_{q}")));
        header.extend(thetas.iter().map(|t| format!("acceptability_{t}")));
        if with_acceptance {
            header.push("acceptance".into());
        }
        if with_thresholds {
            header.extend(["gob", "pow", "tme"].map(String::from));
        }

        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&header)?;
        for c in &self.conditions {
            let mut row = vec![
                c.condition.clone(),
                c.count.to_string(),
                c.mos.to_string(),
                cell(c.sos),
                cell(c.standard_error),
            ];
            row.extend(
                pmf_keys
                    .iter()
                    .map(|k| cell(c.pmf.as_ref().and_then(|p| p.get(k).copied()))),
            );
            row.extend(c.quantiles.iter().map(|q| q.value.to_string()));
            row.extend(c.acceptability.iter().map(|a| a.value.to_string()));
            if with_acceptance {
                row.push(cell(c.acceptance));
            }
            if with_thresholds {
                row.extend([cell(c.gob), cell(c.pow), cell(c.tme)]);
            }
            w.write_record(&row)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| QoeError::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
        }
    }
}

/// Writes the rendered report to `path`, or to stdout when `path` is `None`.
pub fn write_report(report: &StudyReport, path: Option<&Path>, format: ReportFormat) -> Result<()> {
    emit(&report.render(format)?, path)
}

/// Writes text to a file, or to stdout when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => File::create(p)?.write_all(text.as_bytes())?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitPointReport {
    pub condition: String,
    pub count: usize,
    pub z: f64,
    pub variance: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub variance_mode: VarianceMode,
    pub a: f64,
    pub raw_a: f64,
    pub clamped: bool,
    pub residual: f64,
    /// Normalized MOS and variance per condition.
    pub points: Vec<FitPointReport>,
}

impl FitReport {
    /// Fits the SOS parameter of `dataset` and labels each point with its
    /// condition.
    pub fn from_dataset<T: Scalar>(dataset: &StudyDataset<T>, mode: VarianceMode) -> Result<Self> {
        ensure_valid(dataset)?;
        let moments = condition_moments(dataset, mode)?;
        let fit = fit_dataset(dataset, mode)?;
        let points = moments
            .iter()
            .zip(&fit.points)
            .map(|((condition, _, _, n), p)| FitPointReport {
                condition: condition.clone(),
                count: *n,
                z: r6(p.z),
                variance: r6(p.variance),
                degenerate: p.degenerate,
            })
            .collect();
        Ok(Self {
            variance_mode: mode,
            a: r6(fit.a),
            raw_a: r6(fit.raw_a),
            clamped: fit.was_clamped(),
            residual: r6(fit.residual),
            points,
        })
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => to_json_text(self),
            ReportFormat::Csv => {
                let mut s = String::from("condition,count,z,variance,degenerate\n");
                for p in &self.points {
                    writeln!(s, "{},{},{},{},{}", csv_field(&p.condition), p.count, p.z, p.variance, p.degenerate)
                        .expect("write to String");
                }
                Ok(s)
            }
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Serialize)]
struct TableRow {
    mos: f64,
    r: Option<f64>,
    pow_pct: f64,
    gob_pct: f64,
    tme_pct: f64,
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (x * f).round() / f + 0.0
}

fn to_json_text<S: Serialize>(value: &S) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Transformation table with MOS to 5 decimals, R to 2 and percentages to 3.
/// An undefined R is written as `undefined` in CSV and `null` in JSON.
pub fn render_emodel_table<T: Scalar>(rows: &[EModelPoint<T>], format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Csv => {
            let mut s = String::from("mos,r,pow_pct,gob_pct,tme_pct\n");
            for p in rows {
                let r = p
                    .r
                    .map(|r| format!("{:.2}", r.as_f64()))
                    .unwrap_or_else(|| "undefined".into());
                writeln!(
                    s,
                    "{:.5},{},{:.3},{:.3},{:.3}",
                    p.mos.as_f64(),
                    r,
                    p.pow_pct.as_f64(),
                    p.gob_pct.as_f64(),
                    p.tme_pct.as_f64()
                )
                .expect("write to String");
            }
            Ok(s)
        }
        ReportFormat::Json => to_json_text(
            &rows
                .iter()
                .map(|p| TableRow {
                    mos: round_to(p.mos.as_f64(), 5),
                    r: p.r.map(|r| round_to(r.as_f64(), 2)),
                    pow_pct: round_to(p.pow_pct.as_f64(), 3),
                    gob_pct: round_to(p.gob_pct.as_f64(), 3),
                    tme_pct: round_to(p.tme_pct.as_f64(), 3),
                })
                .collect::<Vec<_>>(),
        ),
    }
}

#[derive(Serialize)]
struct CurveRow {
    mos: f64,
    gob_pct: f64,
    pow_pct: f64,
    neutral_pct: f64,
}

/// Curve data for plotting, all columns to 6 decimals.
pub fn render_curve<T: Scalar>(points: &[CurvePoint<T>], format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Csv => {
            let mut s = String::from("mos,gob_pct,pow_pct,neutral_pct\n");
            for p in points {
                writeln!(
                    s,
                    "{:.6},{:.6},{:.6},{:.6}",
                    p.mos.as_f64(),
                    p.gob_pct.as_f64(),
                    p.pow_pct.as_f64(),
                    p.neutral_pct.as_f64()
                )
                .expect("write to String");
            }
            Ok(s)
        }
        ReportFormat::Json => to_json_text(
            &points
                .iter()
                .map(|p| CurveRow {
                    mos: r6(p.mos),
                    gob_pct: r6(p.gob_pct),
                    pow_pct: r6(p.pow_pct),
                    neutral_pct: r6(p.neutral_pct),
                })
                .collect::<Vec<_>>(),
        ),
    }
}
