//! SOS as a function of MOS: the minimum and maximum SOS a scale admits, the
//! SOS hypothesis `S(u) = √a·S⁺(u)`, linear rescaling of ratings and the
//! closed-form least-squares fit of the SOS parameter `a`.

use serde::Serialize;

use crate::error::{QoeError, Result};
use crate::estimators::{condition_stats, mos, variance, VarianceMode};
use crate::scalar::Scalar;
use crate::types::{ensure_valid, Rating, RatingScale, StudyDataset};

/// Smallest SOS any distribution on the scale with mean `u` can have.
///
/// Zero on continuous scales; on a discrete scale the minimum is reached by
/// splitting the mass between `⌊u⌋` and `⌊u⌋ + 1`:
/// `S⁻(u) = sqrt( u(2⌊u⌋+1) − ⌊u⌋(⌊u⌋+1) − u² )`.
pub fn min_sos<T: Scalar>(u: T, scale: &RatingScale<T>) -> Result<T> {
    scale.check_contains(u)?;
    if !scale.is_discrete() {
        return Ok(T::zero());
    }
    let f = u.floor();
    let two = T::lit(2.0);
    let radicand = u * (two * f + T::one()) - f * (f + T::one()) - u * u;
    Ok(radicand.max(T::zero()).sqrt())
}

/// Largest SOS on the scale at mean `u`, reached by mass on the two bounds:
/// `S⁺(u) = sqrt( −u² + (U⁻ + U⁺)u − U⁻U⁺ )`.
pub fn max_sos<T: Scalar>(u: T, scale: &RatingScale<T>) -> Result<T> {
    scale.check_contains(u)?;
    let (lo, hi) = (scale.lower(), scale.upper());
    // (u − U⁻)(U⁺ − u) is the same polynomial without cancellation at the bounds
    let radicand = (u - lo) * (hi - u);
    Ok(radicand.max(T::zero()).sqrt())
}

fn check_parameter<T: Scalar>(a: T) -> Result<()> {
    if a >= T::zero() && a <= T::one() {
        Ok(())
    } else {
        Err(QoeError::InvalidParameter(format!(
            "SOS parameter {a} lies outside [0, 1]"
        )))
    }
}

/// SOS predicted by the SOS hypothesis, `√a · S⁺(u)`.
pub fn sos_hypothesis<T: Scalar>(u: T, a: T, scale: &RatingScale<T>) -> Result<T> {
    check_parameter(a)?;
    Ok(a.sqrt() * max_sos(u, scale)?)
}

/// Maps a rating onto `[0, 1]`: `(u − U⁻)/(U⁺ − U⁻)`.
pub fn normalize<T: Scalar>(u: T, scale: &RatingScale<T>) -> Result<T> {
    scale.check_contains(u)?;
    Ok((u - scale.lower()) / scale.width())
}

/// The affine map `τ` between two rating scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct LinearTransform<T> {
    from: RatingScale<T>,
    to: RatingScale<T>,
}

impl<T: Scalar> LinearTransform<T> {
    pub fn new(from: RatingScale<T>, to: RatingScale<T>) -> Self {
        Self { from, to }
    }

    pub fn from_scale(&self) -> &RatingScale<T> {
        &self.from
    }

    pub fn to_scale(&self) -> &RatingScale<T> {
        &self.to
    }

    pub fn inverse(&self) -> Self {
        Self {
            from: self.to,
            to: self.from,
        }
    }

    fn same_bounds(&self) -> bool {
        self.from.lower() == self.to.lower() && self.from.upper() == self.to.upper()
    }

    /// `τ(u) = (u − L₁)/(H₁ − L₁)·(H₂ − L₂) + L₂`.
    ///
    /// Evaluated as `L₂(1 − t) + H₂t` so both bounds map exactly.
    pub fn apply(&self, u: T) -> Result<T> {
        self.from.check_contains(u)?;
        if self.same_bounds() {
            return Ok(u);
        }
        let t = (u - self.from.lower()) / self.from.width();
        let (lo, hi) = (self.to.lower(), self.to.upper());
        Ok((lo * (T::one() - t) + hi * t).max(lo).min(hi))
    }

    /// Rescales every rating. The result carries the target scale; for a
    /// discrete target, ratings that do not land on categories are caught by
    /// validation.
    pub fn apply_dataset(&self, dataset: &StudyDataset<T>) -> Result<StudyDataset<T>> {
        let src = dataset.scale();
        if src.lower() != self.from.lower() || src.upper() != self.from.upper() {
            return Err(QoeError::InvalidScale(format!(
                "dataset is on {src} but the transform starts from {}",
                self.from
            )));
        }
        let ratings = dataset
            .ratings
            .iter()
            .map(|r| {
                Ok(Rating {
                    subject: r.subject.clone(),
                    condition: r.condition.clone(),
                    value: self.apply(r.value)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut definition = dataset.definition.clone();
        definition.scale = self.to;
        Ok(StudyDataset {
            definition,
            ratings,
            repeated_measures: dataset.repeated_measures,
        })
    }
}

/// Rescales one rating between scales.
pub fn transform_rating<T: Scalar>(u: T, t: &LinearTransform<T>) -> Result<T> {
    t.apply(u)
}

/// One condition in a SOS fit, on the normalized `[0, 1]` scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct FitPoint<T> {
    pub z: T,
    pub variance: T,
    pub count: Option<usize>,
    /// MOS at a scale bound: the condition carries no information about `a`.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct SosFit<T> {
    /// Fitted SOS parameter, clamped to `[0, 1]`.
    pub a: T,
    /// Closed-form value before clamping.
    pub raw_a: T,
    pub points: Vec<FitPoint<T>>,
    /// Least-squares error `L(a)` at the clamped `a`.
    pub residual: T,
}

impl<T: Scalar> SosFit<T> {
    pub fn was_clamped(&self) -> bool {
        self.a != self.raw_a
    }

    pub fn degenerate_count(&self) -> usize {
        self.points.iter().filter(|p| p.degenerate).count()
    }
}

/// `L(a) = Σ_c (a(z_c − z_c²) − σ²_c)²` over the informative points.
pub fn fit_loss<T: Scalar>(points: &[FitPoint<T>], a: T) -> T {
    points
        .iter()
        .filter(|p| !p.degenerate)
        .fold(T::zero(), |acc, p| {
            let e = a * (p.z - p.z * p.z) - p.variance;
            acc + e * e
        })
}

fn normalized_points<T: Scalar>(
    per_condition: &[(T, T, Option<usize>)],
    scale: &RatingScale<T>,
) -> Result<Vec<FitPoint<T>>> {
    let w2 = scale.width() * scale.width();
    per_condition
        .iter()
        .map(|&(m, var, count)| {
            if !var.is_finite() || var < T::zero() {
                return Err(QoeError::InvalidParameter(format!(
                    "variance {var} must be a finite non-negative number"
                )));
            }
            let z = normalize(m, scale)?;
            Ok(FitPoint {
                z,
                variance: var / w2,
                count,
                degenerate: z == T::zero() || z == T::one(),
            })
        })
        .collect()
}

fn fit_points<T: Scalar>(points: Vec<FitPoint<T>>) -> Result<SosFit<T>> {
    let (num, den) = points
        .iter()
        .filter(|p| !p.degenerate)
        .fold((T::zero(), T::zero()), |(num, den), p| {
            let g = p.z * p.z - p.z;
            (num + g * p.variance, den + g * g)
        });
    if den == T::zero() {
        return Err(QoeError::NoInformation);
    }
    let raw_a = -num / den;
    let a = raw_a.max(T::zero()).min(T::one());
    let residual = fit_loss(&points, a);
    Ok(SosFit {
        a,
        raw_a,
        points,
        residual,
    })
}

/// Least-squares SOS parameter from per-condition `(MOS, variance)` pairs on
/// `scale`:
/// `a = −Σ(z_c² − z_c)σ²_c / Σ(z_c² − z_c)²` with `z_c`, `σ²_c` normalized
/// to `[0, 1]`.
pub fn fit_sos_parameter<T: Scalar>(
    per_condition: &[(T, T)],
    scale: &RatingScale<T>,
) -> Result<SosFit<T>> {
    let triples: Vec<_> = per_condition.iter().map(|&(m, v)| (m, v, None)).collect();
    fit_points(normalized_points(&triples, scale)?)
}

/// Per-condition `(condition, MOS, variance, R)` of a dataset.
pub fn condition_moments<T: Scalar>(
    dataset: &StudyDataset<T>,
    mode: VarianceMode,
) -> Result<Vec<(String, T, T, usize)>> {
    condition_stats(dataset)?
        .iter()
        .map(|s| {
            Ok((
                s.condition().to_string(),
                mos(s),
                variance(s, mode)?,
                s.count(),
            ))
        })
        .collect()
}

/// Fits the SOS parameter to every condition of a dataset.
pub fn fit_dataset<T: Scalar>(dataset: &StudyDataset<T>, mode: VarianceMode) -> Result<SosFit<T>> {
    let triples: Vec<_> = condition_moments(dataset, mode)?
        .into_iter()
        .map(|(_, m, v, n)| (m, v, Some(n)))
        .collect();
    fit_points(normalized_points(&triples, dataset.scale())?)
}

/// Fits `a` on the original ratings and on the rescaled ratings.
pub fn verify_fit_invariance<T: Scalar>(
    dataset: &StudyDataset<T>,
    transform: &LinearTransform<T>,
    mode: VarianceMode,
) -> Result<(T, T)> {
    ensure_valid(dataset)?;
    for (condition, n) in dataset.subjects_per_condition() {
        if n < 2 {
            return Err(QoeError::InsufficientSamples {
                condition,
                needed: 2,
                got: n,
            });
        }
    }
    let before = fit_dataset(dataset, mode)?;
    let mut moved = transform.apply_dataset(dataset)?;
    // category membership of the target is irrelevant to the fit
    moved.definition.scale = moved.definition.scale.as_continuous();
    let after = fit_dataset(&moved, mode)?;
    Ok((before.a, after.a))
}
