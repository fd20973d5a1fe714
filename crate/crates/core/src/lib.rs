//! Quality-of-Experience metrics for subjective rating studies.
//!
//! Per-condition estimators (MOS, SOS, quantiles, acceptability), the SOS
//! hypothesis and its parameter fit, the E-model GoB/PoW/TME mappings, and
//! reading and writing of rating datasets.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases at the crate root fix the scalar to `f64`.

pub mod dataset_io;
pub mod emodel;
pub mod error;
pub mod estimators;
pub mod report;
mod scalar;
pub mod sos_model;
pub mod special;
pub mod types;

pub use dataset_io::{load_dataset, read_ratings, save_dataset, write_ratings, StudyMetadata};
pub use emodel::{
    curve_data, default_table, emodel_table, mos_to_r, r_to_mos, std_normal_cdf, CurvePoint,
    EModelPoint, ThresholdSet,
};
pub use error::{QoeError, Result};
pub use estimators::{
    acceptance_rate, condition_stats, empirical_pmf, lower_tail, mos, quantile, sos,
    standard_error, theta_acceptability, variance, ConditionStats, EmpiricalPmf, VarianceMode,
};
pub use report::{analyze, ReportFormat, StudyReport};
pub use scalar::Scalar;
pub use sos_model::{
    fit_dataset, fit_sos_parameter, max_sos, min_sos, sos_hypothesis, LinearTransform, SosFit,
};
pub use types::{
    ConditionDescriptor, QuantileSpec, Rating, RatingScale, ScaleKind, StatDefinitionSet,
    Statistic, StudyDataset, Violation,
};

pub type Scale = RatingScale<f64>;
pub type Dataset = StudyDataset<f64>;
pub type Stats = ConditionStats<f64>;
pub type Fit = SosFit<f64>;
pub type Thresholds = ThresholdSet<f64>;
pub type Transform = LinearTransform<f64>;
pub type Metadata = StudyMetadata<f64>;

pub type Scale32 = RatingScale<f32>;
pub type Dataset32 = StudyDataset<f32>;
pub type Stats32 = ConditionStats<f32>;
