//! Rating scales, ratings, test-condition metadata and the statistical
//! definition set `{Ω, C, Σ, S}` describing what a study measures.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::emodel::ThresholdSet;
use crate::error::{QoeError, Result};
use crate::scalar::{ascending, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleKind {
    /// Consecutive integer categories `{lower, lower + 1, …, upper}`.
    Discrete,
    /// The closed interval `[lower, upper]`.
    Continuous,
}

/// The rating scale Ω with bounds `U⁻` and `U⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScale<T>", into = "RawScale<T>")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct RatingScale<T> {
    kind: ScaleKind,
    lower: T,
    upper: T,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
struct RawScale<T> {
    kind: ScaleKind,
    lower: T,
    upper: T,
}

impl<T: Scalar> TryFrom<RawScale<T>> for RatingScale<T> {
    type Error = QoeError;

    fn try_from(raw: RawScale<T>) -> Result<Self> {
        RatingScale::new(raw.kind, raw.lower, raw.upper)
    }
}

impl<T: Scalar> From<RatingScale<T>> for RawScale<T> {
    fn from(s: RatingScale<T>) -> Self {
        RawScale {
            kind: s.kind,
            lower: s.lower,
            upper: s.upper,
        }
    }
}

impl<T: Scalar> RatingScale<T> {
    pub fn new(kind: ScaleKind, lower: T, upper: T) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() {
            return Err(QoeError::InvalidScale("bounds must be finite".into()));
        }
        if lower >= upper {
            return Err(QoeError::InvalidScale(format!(
                "lower bound {lower} must be below upper bound {upper}"
            )));
        }
        if kind == ScaleKind::Discrete && (lower.fract() != T::zero() || upper.fract() != T::zero())
        {
            return Err(QoeError::InvalidScale(format!(
                "discrete scale needs integer bounds, got [{lower}, {upper}]"
            )));
        }
        Ok(Self { kind, lower, upper })
    }

    pub fn discrete(lower: i64, upper: i64) -> Result<Self> {
        Self::new(
            ScaleKind::Discrete,
            T::lit(lower as f64),
            T::lit(upper as f64),
        )
    }

    pub fn continuous(lower: T, upper: T) -> Result<Self> {
        Self::new(ScaleKind::Continuous, lower, upper)
    }

    /// The 5-point Absolute Category Rating scale `{1, …, 5}`.
    pub fn acr() -> Self {
        Self {
            kind: ScaleKind::Discrete,
            lower: T::one(),
            upper: T::lit(5.0),
        }
    }

    /// Accept (1) / reject (0).
    pub fn binary() -> Self {
        Self {
            kind: ScaleKind::Discrete,
            lower: T::zero(),
            upper: T::one(),
        }
    }

    pub fn kind(&self) -> ScaleKind {
        self.kind
    }

    pub fn lower(&self) -> T {
        self.lower
    }

    pub fn upper(&self) -> T {
        self.upper
    }

    /// `U⁺ − U⁻`.
    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn is_discrete(&self) -> bool {
        self.kind == ScaleKind::Discrete
    }

    pub fn is_binary(&self) -> bool {
        self.is_discrete() && self.lower == T::zero() && self.upper == T::one()
    }

    pub fn contains(&self, u: T) -> bool {
        u >= self.lower && u <= self.upper
    }

    /// Same bounds, continuous kind.
    pub fn as_continuous(&self) -> Self {
        Self {
            kind: ScaleKind::Continuous,
            ..*self
        }
    }

    /// Integer categories of a discrete scale, ascending.
    pub fn categories(&self) -> Option<Vec<i64>> {
        if !self.is_discrete() {
            return None;
        }
        let lo = self.lower.to_i64()?;
        let hi = self.upper.to_i64()?;
        Some((lo..=hi).collect())
    }

    pub(crate) fn check_contains(&self, u: T) -> Result<()> {
        if self.contains(u) {
            Ok(())
        } else {
            Err(QoeError::OutOfScale {
                value: u.as_f64(),
                lower: self.lower.as_f64(),
                upper: self.upper.as_f64(),
            })
        }
    }
}

impl<T: Scalar> fmt::Display for RatingScale<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ScaleKind::Discrete => write!(f, "{{{}..{}}}", self.lower, self.upper),
            ScaleKind::Continuous => write!(f, "[{}, {}]", self.lower, self.upper),
        }
    }
}

/// One observation `U_{i,r,c}`: subject `r` rated condition `c` with `value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Rating<T> {
    pub subject: String,
    pub condition: String,
    pub value: T,
}

impl<T> Rating<T> {
    pub fn new(subject: impl Into<String>, condition: impl Into<String>, value: T) -> Self {
        Self {
            subject: subject.into(),
            condition: condition.into(),
            value,
        }
    }
}

/// A test condition `c_j` with opaque, ordered attributes such as content,
/// quality level or the timing of quality changes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConditionDescriptor {
    pub id: String,
    #[serde(default)]
    pub attributes: Vec<(String, String)>,
}

impl ConditionDescriptor {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            attributes: Vec::new(),
        }
    }

    pub fn with_attribute(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.attributes.push((key.into(), value.into()));
        self
    }
}

/// A statistic in Σ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    Mos,
    Sos,
    StandardError,
    Pmf,
    Quantiles,
    Acceptability,
    Acceptance,
    GobPowTme,
}

impl Statistic {
    pub fn required_observators(self) -> &'static [Observator] {
        use Observator::*;
        match self {
            Statistic::Mos => &[Sum],
            Statistic::Sos | Statistic::StandardError => &[Sum, SumOfSquares],
            Statistic::Pmf
            | Statistic::Quantiles
            | Statistic::Acceptability
            | Statistic::Acceptance
            | Statistic::GobPowTme => &[SortedSample],
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Statistic::Mos => "mos",
            Statistic::Sos => "sos",
            Statistic::StandardError => "standard-error",
            Statistic::Pmf => "pmf",
            Statistic::Quantiles => "quantiles",
            Statistic::Acceptability => "acceptability",
            Statistic::Acceptance => "acceptance",
            Statistic::GobPowTme => "gob-pow-tme",
        };
        f.write_str(s)
    }
}

/// A sufficient observator in S.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observator {
    Sum,
    SumOfSquares,
    SortedSample,
}

impl fmt::Display for Observator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Observator::Sum => "sum",
            Observator::SumOfSquares => "sum-of-squares",
            Observator::SortedSample => "sorted-sample",
        })
    }
}

/// The `n/q` quantile request `Q_{n/q}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuantileSpec {
    pub n: u32,
    pub q: u32,
}

impl QuantileSpec {
    pub fn new(n: u32, q: u32) -> Result<Self> {
        if n == 0 || n >= q {
            return Err(QoeError::InvalidQuantile { n, q });
        }
        Ok(Self { n, q })
    }

    pub fn median() -> Self {
        Self { n: 1, q: 2 }
    }
}

impl fmt::Display for QuantileSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.n, self.q)
    }
}

impl std::str::FromStr for QuantileSpec {
    type Err = QoeError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || QoeError::InvalidParameter(format!("quantile `{s}` is not of the form n/q"));
        let (n, q) = s.trim().split_once('/').ok_or_else(bad)?;
        let n = n.trim().parse().map_err(|_| bad())?;
        let q = q.trim().parse().map_err(|_| bad())?;
        QuantileSpec::new(n, q)
    }
}

impl Serialize for QuantileSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuantileSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The statistical definition set `{Ω, C, Σ, S}` plus the parameters of
/// the parametrised statistics in Σ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct StatDefinitionSet<T> {
    pub scale: RatingScale<T>,
    #[serde(default)]
    pub conditions: Vec<ConditionDescriptor>,
    pub statistics: BTreeSet<Statistic>,
    pub observators: BTreeSet<Observator>,
    #[serde(default)]
    pub quantiles: Vec<QuantileSpec>,
    #[serde(default)]
    pub thetas: Vec<T>,
    #[serde(default)]
    pub thresholds: Option<ThresholdSet<T>>,
}

impl<T: Scalar> StatDefinitionSet<T> {
    /// Definition set with the observators the given statistics need.
    pub fn new(
        scale: RatingScale<T>,
        statistics: impl IntoIterator<Item = Statistic>,
    ) -> Self {
        let statistics: BTreeSet<_> = statistics.into_iter().collect();
        let observators = statistics
            .iter()
            .flat_map(|s| s.required_observators().iter().copied())
            .collect();
        Self {
            scale,
            conditions: Vec::new(),
            statistics,
            observators,
            quantiles: Vec::new(),
            thetas: Vec::new(),
            thresholds: None,
        }
    }

    /// Adds a statistic together with whatever observators it needs.
    pub fn request(&mut self, stat: Statistic) {
        self.statistics.insert(stat);
        self.observators
            .extend(stat.required_observators().iter().copied());
    }

    pub fn condition(&self, id: &str) -> Option<&ConditionDescriptor> {
        self.conditions.iter().find(|c| c.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct StudyDataset<T> {
    pub definition: StatDefinitionSet<T>,
    pub ratings: Vec<Rating<T>>,
    /// Permits several ratings by the same subject for the same condition.
    #[serde(default)]
    pub repeated_measures: bool,
}

impl<T: Scalar> StudyDataset<T> {
    pub fn new(definition: StatDefinitionSet<T>, ratings: Vec<Rating<T>>) -> Self {
        Self {
            definition,
            ratings,
            repeated_measures: false,
        }
    }

    pub fn scale(&self) -> &RatingScale<T> {
        &self.definition.scale
    }

    /// Registers a descriptor with no attributes for every condition id that
    /// appears in the ratings but not in the definition set.
    pub fn register_missing_conditions(&mut self) {
        let mut known: HashSet<String> = self
            .definition
            .conditions
            .iter()
            .map(|c| c.id.clone())
            .collect();
        for r in &self.ratings {
            if known.insert(r.condition.clone()) {
                self.definition
                    .conditions
                    .push(ConditionDescriptor::new(r.condition.clone()));
            }
        }
    }

    /// Number of ratings `R_j` per condition.
    pub fn subjects_per_condition(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for r in &self.ratings {
            *counts.entry(r.condition.clone()).or_insert(0) += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    OutOfRange {
        index: usize,
        subject: String,
        condition: String,
        value: f64,
    },
    NonIntegerCategory {
        index: usize,
        subject: String,
        condition: String,
        value: f64,
    },
    NonFinite {
        index: usize,
        subject: String,
        condition: String,
    },
    UnknownCondition {
        index: usize,
        condition: String,
    },
    DuplicateConditionId {
        condition: String,
    },
    DuplicateRating {
        index: usize,
        subject: String,
        condition: String,
    },
    MissingObservator {
        statistic: Statistic,
        observator: Observator,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfRange {
                index,
                subject,
                condition,
                value,
            } => write!(
                f,
                "rating #{index} (subject `{subject}`, condition `{condition}`): value {value} is outside the scale"
            ),
            Violation::NonIntegerCategory {
                index,
                subject,
                condition,
                value,
            } => write!(
                f,
                "rating #{index} (subject `{subject}`, condition `{condition}`): value {value} is not an integer category"
            ),
            Violation::NonFinite {
                index,
                subject,
                condition,
            } => write!(
                f,
                "rating #{index} (subject `{subject}`, condition `{condition}`): value is not finite"
            ),
            Violation::UnknownCondition { index, condition } => write!(
                f,
                "rating #{index}: condition `{condition}` is not declared"
            ),
            Violation::DuplicateConditionId { condition } => {
                write!(f, "condition id `{condition}` is declared more than once")
            }
            Violation::DuplicateRating {
                index,
                subject,
                condition,
            } => write!(
                f,
                "rating #{index}: subject `{subject}` rated condition `{condition}` more than once"
            ),
            Violation::MissingObservator {
                statistic,
                observator,
            } => write!(
                f,
                "statistic `{statistic}` requires observator `{observator}`"
            ),
        }
    }
}

/// Checks every dataset invariant and returns all violations found, in a
/// deterministic order.
pub fn validate_dataset<T: Scalar>(dataset: &StudyDataset<T>) -> Vec<Violation> {
    let def = &dataset.definition;
    let scale = &def.scale;
    let mut out = Vec::new();

    for stat in &def.statistics {
        for obs in stat.required_observators() {
            if !def.observators.contains(obs) {
                out.push(Violation::MissingObservator {
                    statistic: *stat,
                    observator: *obs,
                });
            }
        }
    }

    let mut declared = HashSet::new();
    for c in &def.conditions {
        if !declared.insert(c.id.as_str()) {
            out.push(Violation::DuplicateConditionId {
                condition: c.id.clone(),
            });
        }
    }

    let mut seen = HashSet::new();
    for (index, r) in dataset.ratings.iter().enumerate() {
        if !declared.contains(r.condition.as_str()) {
            out.push(Violation::UnknownCondition {
                index,
                condition: r.condition.clone(),
            });
        }
        if !r.value.is_finite() {
            out.push(Violation::NonFinite {
                index,
                subject: r.subject.clone(),
                condition: r.condition.clone(),
            });
        } else if !scale.contains(r.value) {
            out.push(Violation::OutOfRange {
                index,
                subject: r.subject.clone(),
                condition: r.condition.clone(),
                value: r.value.as_f64(),
            });
        } else if scale.is_discrete() && r.value.fract() != T::zero() {
            out.push(Violation::NonIntegerCategory {
                index,
                subject: r.subject.clone(),
                condition: r.condition.clone(),
                value: r.value.as_f64(),
            });
        }
        if !dataset.repeated_measures
            && !seen.insert((r.subject.as_str(), r.condition.as_str()))
        {
            out.push(Violation::DuplicateRating {
                index,
                subject: r.subject.clone(),
                condition: r.condition.clone(),
            });
        }
    }
    out
}

/// Rejects the dataset with all violations if any invariant is broken.
pub fn ensure_valid<T: Scalar>(dataset: &StudyDataset<T>) -> Result<()> {
    let violations = validate_dataset(dataset);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(QoeError::Validation(violations))
    }
}

/// Groups ratings into per-condition samples `𝒰 = {U_i}`, each sorted
/// ascending. Conditions without ratings do not appear.
pub fn group_by_condition<T: Scalar>(dataset: &StudyDataset<T>) -> Result<BTreeMap<String, Vec<T>>> {
    ensure_valid(dataset)?;
    let mut groups: BTreeMap<String, Vec<T>> = BTreeMap::new();
    for r in &dataset.ratings {
        groups.entry(r.condition.clone()).or_default().push(r.value);
    }
    for sample in groups.values_mut() {
        sample.sort_by(ascending);
    }
    Ok(groups)
}
