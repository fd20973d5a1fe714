//! Rating files and study metadata sidecars.
//!
//! Ratings are CSV with the header `subject_id,condition_id,rating`, one
//! rating per line. Lines starting with `#` are comments; LF and CRLF line
//! endings are both accepted. The optional JSON sidecar declares the scale,
//! the condition attribute table, the requested statistics and thresholds:
//!
//! ```json
//! {
//!   "scale": { "kind": "discrete", "lower": 1, "upper": 5 },
//!   "conditions": [ { "id": "c1", "attributes": [["w", "news"], ["q", "2.0"]] } ],
//!   "statistics": ["mos", "sos", "quantiles"],
//!   "quantiles": ["1/2", "90/100"],
//!   "thetas": [4],
//!   "thresholds": { "gob": 4, "pow": 2, "tme": 1 },
//!   "repeated_measures": false
//! }
//! ```

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::emodel::{discretize_thresholds, ThresholdSet};
use crate::error::{QoeError, Result};
use crate::scalar::Scalar;
use crate::types::{
    ensure_valid, ConditionDescriptor, Observator, QuantileSpec, Rating, RatingScale,
    StatDefinitionSet, Statistic, StudyDataset,
};

pub const RATINGS_HEADER: [&str; 3] = ["subject_id", "condition_id", "rating"];

/// GoB / PoW / TME thresholds as written in a sidecar; the scale is the
/// study's.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct ThresholdValues<T> {
    pub gob: T,
    pub pow: T,
    pub tme: T,
}

impl<T: Scalar> ThresholdValues<T> {
    /// Thresholds on `scale`, rounded to categories when the scale is
    /// discrete.
    pub fn on_scale(&self, scale: &RatingScale<T>) -> Result<ThresholdSet<T>> {
        let t = ThresholdSet::new(self.gob, self.pow, self.tme, *scale)?;
        if scale.is_discrete() {
            discretize_thresholds(&t, scale)
        } else {
            Ok(t)
        }
    }
}

impl<T: Scalar> From<&ThresholdSet<T>> for ThresholdValues<T> {
    fn from(t: &ThresholdSet<T>) -> Self {
        Self {
            gob: t.theta_gb(),
            pow: t.theta_pw(),
            tme: t.theta_te(),
        }
    }
}

/// The metadata sidecar document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct StudyMetadata<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<RatingScale<T>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<ConditionDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistics: Option<BTreeSet<Statistic>>,
    /// Derived from `statistics` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observators: Option<BTreeSet<Observator>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub quantiles: Vec<QuantileSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub thetas: Vec<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ThresholdValues<T>>,
    #[serde(default)]
    pub repeated_measures: bool,
}

impl<T: Scalar> Default for StudyMetadata<T> {
    fn default() -> Self {
        Self {
            scale: None,
            conditions: Vec::new(),
            statistics: None,
            observators: None,
            quantiles: Vec::new(),
            thetas: Vec::new(),
            thresholds: None,
            repeated_measures: false,
        }
    }
}

impl<T: Scalar> StudyMetadata<T> {
    /// Definition set described by this document. Missing pieces default to
    /// the ACR scale `{1..5}` with MOS and SOS.
    pub fn definition(&self) -> Result<StatDefinitionSet<T>> {
        let scale = self.scale.unwrap_or_else(RatingScale::acr);
        let statistics = self
            .statistics
            .clone()
            .unwrap_or_else(|| [Statistic::Mos, Statistic::Sos].into_iter().collect());
        let mut def = StatDefinitionSet::new(scale, statistics);
        if let Some(obs) = &self.observators {
            def.observators = obs.clone();
        }
        def.conditions = self.conditions.clone();
        def.quantiles = self.quantiles.clone();
        def.thetas = self.thetas.clone();
        def.thresholds = self.thresholds.map(|t| t.on_scale(&scale)).transpose()?;
        Ok(def)
    }

    pub fn from_dataset(dataset: &StudyDataset<T>) -> Self {
        let def = &dataset.definition;
        Self {
            scale: Some(def.scale),
            conditions: def.conditions.clone(),
            statistics: Some(def.statistics.clone()),
            observators: Some(def.observators.clone()),
            quantiles: def.quantiles.clone(),
            thetas: def.thetas.clone(),
            thresholds: def.thresholds.as_ref().map(ThresholdValues::from),
            repeated_measures: dataset.repeated_measures,
        }
    }

    pub fn read(reader: impl Read) -> Result<Self> {
        Ok(serde_json::from_reader(reader)?)
    }

    pub fn write(&self, mut writer: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut writer, self)?;
        writer.write_all(b"\n")?;
        Ok(())
    }
}

fn parse_error(line: u64, message: impl Into<String>) -> QoeError {
    QoeError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses a ratings CSV. Errors carry the 1-based line number of the input.
///
/// Lines starting with `#` and blank lines are skipped.
pub fn read_ratings<T: Scalar>(mut reader: impl Read) -> Result<Vec<Rating<T>>> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    // Comment and blank lines are dropped up front so that the csv reader's
    // line positions can be mapped back to input lines.
    let mut source_lines = Vec::new();
    let mut kept = String::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        source_lines.push(i as u64 + 1);
        kept.push_str(line);
        kept.push('\n');
    }
    let line_of = |csv_line: u64| -> u64 {
        csv_line
            .checked_sub(1)
            .and_then(|i| source_lines.get(i as usize).copied())
            .unwrap_or(csv_line)
    };

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(kept.as_bytes());

    let header_line = source_lines.first().copied().unwrap_or(1);
    let header = rdr
        .headers()
        .map_err(|e| parse_error(header_line, e.to_string()))?
        .clone();
    if header.iter().ne(RATINGS_HEADER.iter().copied()) {
        return Err(parse_error(
            header_line,
            format!(
                "expected header `{}`, found `{}`",
                RATINGS_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }

    let mut ratings = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| line_of(p.line())).unwrap_or(0);
            parse_error(line, e.to_string())
        })?;
        let line = record.position().map(|p| line_of(p.line())).unwrap_or(0);
        let (subject, condition, raw) = (&record[0], &record[1], &record[2]);
        if subject.is_empty() || condition.is_empty() {
            return Err(parse_error(line, "subject_id and condition_id must not be empty"));
        }
        let value = raw
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .and_then(T::from_f64)
            .filter(|v| v.is_finite())
            .ok_or_else(|| {
                parse_error(line, format!("rating `{raw}` is not a finite decimal number"))
            })?;
        ratings.push(Rating::new(subject, condition, value));
    }
    Ok(ratings)
}

pub fn write_ratings<T: Scalar>(ratings: &[Rating<T>], writer: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(RATINGS_HEADER)?;
    for r in ratings {
        w.write_record([r.subject.as_str(), r.condition.as_str(), &r.value.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Assembles and validates a dataset from parsed ratings and metadata.
/// Conditions that only appear in the ratings are registered without
/// attributes.
pub fn build_dataset<T: Scalar>(
    ratings: Vec<Rating<T>>,
    metadata: &StudyMetadata<T>,
) -> Result<StudyDataset<T>> {
    let mut ds = StudyDataset {
        definition: metadata.definition()?,
        ratings,
        repeated_measures: metadata.repeated_measures,
    };
    ds.register_missing_conditions();
    ensure_valid(&ds)?;
    Ok(ds)
}

/// Reads a ratings CSV and its optional metadata sidecar.
pub fn load_dataset<T: Scalar>(
    ratings_path: &Path,
    metadata_path: Option<&Path>,
) -> Result<StudyDataset<T>> {
    let metadata = match metadata_path {
        Some(p) => StudyMetadata::read(BufReader::new(File::open(p)?))?,
        None => StudyMetadata::default(),
    };
    let ratings = read_ratings(BufReader::new(File::open(ratings_path)?))?;
    build_dataset(ratings, &metadata)
}

/// Writes ratings and, if a path is given, the metadata sidecar.
pub fn save_dataset<T: Scalar>(
    dataset: &StudyDataset<T>,
    ratings_path: &Path,
    metadata_path: Option<&Path>,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(ratings_path)?);
    write_ratings(&dataset.ratings, &mut w)?;
    w.flush()?;
    if let Some(p) = metadata_path {
        let mut w = BufWriter::new(File::create(p)?);
        StudyMetadata::from_dataset(dataset).write(&mut w)?;
        w.flush()?;
    }
    Ok(())
}
