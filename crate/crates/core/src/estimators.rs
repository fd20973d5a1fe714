//! Per-condition estimators computed from the sufficient observators of a
//! sample: empirical pmf, MOS, SOS, standard error, quantiles,
//! θ-acceptability and acceptance.

use std::collections::BTreeMap;

use num_traits::Float;
use serde::Serialize;

use crate::error::{QoeError, Result};
use crate::scalar::{ascending, Scalar};
use crate::types::{group_by_condition, QuantileSpec, RatingScale, StudyDataset};

/// Sufficient observators of one condition's sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ConditionStats<T> {
    condition: String,
    count: usize,
    sum: T,
    sum_sq: T,
    sorted_sample: Vec<T>,
    scale: RatingScale<T>,
}

impl<T: Scalar> ConditionStats<T> {
    /// Accumulates the observators. The sample is sorted first so that sums
    /// are always accumulated in ascending order.
    pub fn from_samples(
        condition: impl Into<String>,
        mut samples: Vec<T>,
        scale: RatingScale<T>,
    ) -> Result<Self> {
        let condition = condition.into();
        if samples.is_empty() {
            return Err(QoeError::EmptySample(condition));
        }
        if let Some(bad) = samples.iter().find(|u| !u.is_finite()) {
            return Err(QoeError::InvalidParameter(format!(
                "condition `{condition}` contains non-finite rating {bad}"
            )));
        }
        samples.sort_by(ascending);
        let (sum, sum_sq) = samples
            .iter()
            .fold((T::zero(), T::zero()), |(s, s2), &u| (s + u, s2 + u * u));
        Ok(Self {
            condition,
            count: samples.len(),
            sum,
            sum_sq,
            sorted_sample: samples,
            scale,
        })
    }

    pub fn condition(&self) -> &str {
        &self.condition
    }

    /// Number of ratings `R`.
    pub fn count(&self) -> usize {
        self.count
    }

    /// `Σ U_i`.
    pub fn sum(&self) -> T {
        self.sum
    }

    /// `Σ U_i²`.
    pub fn sum_sq(&self) -> T {
        self.sum_sq
    }

    pub fn sorted_sample(&self) -> &[T] {
        &self.sorted_sample
    }

    pub fn scale(&self) -> &RatingScale<T> {
        &self.scale
    }

    fn r(&self) -> T {
        T::from_count(self.count)
    }
}

/// Builds observators for every condition with at least one rating,
/// ordered by condition id.
pub fn condition_stats<T: Scalar>(dataset: &StudyDataset<T>) -> Result<Vec<ConditionStats<T>>> {
    let scale = *dataset.scale();
    group_by_condition(dataset)?
        .into_iter()
        .map(|(c, sample)| ConditionStats::from_samples(c, sample, scale))
        .collect()
}

/// Estimated probability `f̂_u` of every category of a discrete scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct EmpiricalPmf<T> {
    pub scale: RatingScale<T>,
    pub probabilities: BTreeMap<i64, T>,
}

impl<T: Scalar> EmpiricalPmf<T> {
    pub fn get(&self, category: i64) -> T {
        self.probabilities.get(&category).copied().unwrap_or_else(T::zero)
    }

    /// `Σ_v v·f̂_v`, the pmf route to the MOS.
    pub fn mean(&self) -> T {
        self.probabilities
            .iter()
            .fold(T::zero(), |acc, (&v, &p)| acc + T::lit(v as f64) * p)
    }
}

pub fn empirical_pmf<T: Scalar>(stats: &ConditionStats<T>) -> Result<EmpiricalPmf<T>> {
    let categories = stats.scale.categories().ok_or_else(|| {
        QoeError::Unsupported("empirical pmf needs a discrete rating scale".into())
    })?;
    let mut counts: BTreeMap<i64, usize> = categories.into_iter().map(|c| (c, 0)).collect();
    for u in &stats.sorted_sample {
        let key = u.to_i64().filter(|k| T::lit(*k as f64) == *u);
        match key.and_then(|k| counts.get_mut(&k)) {
            Some(n) => *n += 1,
            None => {
                return Err(QoeError::InvalidParameter(format!(
                    "rating {u} is not a category of {}",
                    stats.scale
                )))
            }
        }
    }
    let r = stats.r();
    Ok(EmpiricalPmf {
        scale: stats.scale,
        probabilities: counts
            .into_iter()
            .map(|(c, n)| (c, T::from_count(n) / r))
            .collect(),
    })
}

/// Mean Opinion Score `Û = (1/R) Σ U_i`.
pub fn mos<T: Scalar>(stats: &ConditionStats<T>) -> T {
    stats.sum / stats.r()
}

/// Which denominator a variance estimate uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceMode {
    /// `Σ U_i²/R − Û²`, the variance of the empirical distribution.
    #[default]
    Population,
    /// The unbiased `R − 1` estimator that also underlies the SOS.
    Sample,
}

impl std::str::FromStr for VarianceMode {
    type Err = QoeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "population" => Ok(VarianceMode::Population),
            "sample" => Ok(VarianceMode::Sample),
            other => Err(QoeError::InvalidParameter(format!(
                "variance mode `{other}` is neither `population` nor `sample`"
            ))),
        }
    }
}

/// Radicands in (−tolerance, 0) are rounding noise and are clamped to zero.
fn radicand_tolerance<T: Scalar>(scale_of_terms: T) -> T {
    let relative = T::lit(64.0) * T::epsilon() * scale_of_terms.abs();
    T::lit(1e-9).max(relative)
}

fn clamp_radicand<T: Scalar>(radicand: T, magnitude: T) -> Result<T> {
    if radicand >= T::zero() {
        Ok(radicand)
    } else if radicand > -radicand_tolerance(magnitude) {
        Ok(T::zero())
    } else {
        Err(QoeError::NegativeRadicand(radicand.as_f64()))
    }
}

/// Variance of the sample under the chosen denominator.
pub fn variance<T: Scalar>(stats: &ConditionStats<T>, mode: VarianceMode) -> Result<T> {
    let r = stats.r();
    let m = mos(stats);
    match mode {
        VarianceMode::Population => {
            let second = stats.sum_sq / r;
            clamp_radicand(second - m * m, second)
        }
        VarianceMode::Sample => {
            if stats.count < 2 {
                return Err(QoeError::InsufficientSamples {
                    condition: stats.condition.clone(),
                    needed: 2,
                    got: stats.count,
                });
            }
            let rm1 = r - T::one();
            let first = stats.sum_sq / rm1;
            clamp_radicand(first - r / rm1 * m * m, first)
        }
    }
}

/// Standard deviation of Opinion Scores,
/// `S = sqrt( ΣU_i²/(R−1) − R/(R−1)·Û² )`.
pub fn sos<T: Scalar>(stats: &ConditionStats<T>) -> Result<T> {
    variance(stats, VarianceMode::Sample).map(Float::sqrt)
}

/// Standard error of the MOS, `S/√R`.
pub fn standard_error<T: Scalar>(stats: &ConditionStats<T>) -> Result<T> {
    Ok(sos(stats)? / stats.r().sqrt())
}

/// `Q̂_{n/q} = U^(h)` with `h = ⌈R·n/q⌉` (1-based order statistic).
pub fn quantile<T: Scalar>(stats: &ConditionStats<T>, n: u32, q: u32) -> Result<T> {
    let spec = QuantileSpec::new(n, q)?;
    Ok(quantile_of(stats, spec))
}

pub(crate) fn quantile_of<T: Scalar>(stats: &ConditionStats<T>, spec: QuantileSpec) -> T {
    let (n, q) = (spec.n as u64, spec.q as u64);
    let h = (stats.count as u64 * n).div_ceil(q);
    // 1 ≤ h ≤ R because 0 < n < q and R ≥ 1
    stats.sorted_sample[h as usize - 1]
}

/// θ-acceptability `𝔸_θ = |{U_i ≥ θ}| / R`.
pub fn theta_acceptability<T: Scalar>(stats: &ConditionStats<T>, theta: T) -> T {
    let below = stats.sorted_sample.partition_point(|&u| u < theta);
    T::from_count(stats.count - below) / stats.r()
}

/// `|{U_i ≤ θ}| / R`.
pub fn lower_tail<T: Scalar>(stats: &ConditionStats<T>, theta: T) -> T {
    let at_most = stats.sorted_sample.partition_point(|&u| u <= theta);
    T::from_count(at_most) / stats.r()
}

/// Probability of acceptance `f̂_1` on a binary accept/reject scale.
pub fn acceptance_rate<T: Scalar>(stats: &ConditionStats<T>) -> Result<T> {
    if !stats.scale.is_binary() {
        return Err(QoeError::Unsupported(format!(
            "acceptance needs the binary scale {{0..1}}, got {}",
            stats.scale
        )));
    }
    let accepted = stats.sorted_sample.iter().filter(|&&u| u == T::one()).count();
    Ok(T::from_count(accepted) / stats.r())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn acr(samples: &[f64]) -> ConditionStats<f64> {
        ConditionStats::from_samples("c", samples.to_vec(), RatingScale::acr()).unwrap()
    }

    #[test]
    fn pmf_counts_categories() {
        let pmf = empirical_pmf(&acr(&[1.0, 1.0, 5.0, 5.0])).unwrap();
        let probs: Vec<f64> = pmf.probabilities.values().copied().collect();
        assert_eq!(probs, vec![0.5, 0.0, 0.0, 0.0, 0.5]);

        let pmf = empirical_pmf(&acr(&[3.0])).unwrap();
        assert_eq!(pmf.get(3), 1.0);
        assert_eq!(pmf.get(1) + pmf.get(2) + pmf.get(4) + pmf.get(5), 0.0);
    }

    #[test]
    fn pmf_rejects_continuous_scale() {
        let s = ConditionStats::from_samples(
            "c",
            vec![1.5],
            RatingScale::continuous(0.0, 6.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(empirical_pmf(&s), Err(QoeError::Unsupported(_))));
    }

    #[test]
    fn empty_sample_is_rejected() {
        assert!(matches!(
            ConditionStats::<f64>::from_samples("c", vec![], RatingScale::acr()),
            Err(QoeError::EmptySample(_))
        ));
    }

    #[test]
    fn mos_examples() {
        assert_eq!(mos(&acr(&[4.0, 4.0, 4.0])), 4.0);
        assert_eq!(mos(&acr(&[1.0, 5.0])), 3.0);
        for k in 1..=20 {
            let sample: Vec<f64> = (0..k).flat_map(|_| [1.0, 2.0, 3.0, 4.0, 5.0]).collect();
            assert!((mos(&acr(&sample)) - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sos_examples() {
        assert_eq!(sos(&acr(&[4.0, 4.0, 4.0, 4.0])).unwrap(), 0.0);
        assert!((sos(&acr(&[1.0, 5.0])).unwrap() - 8f64.sqrt()).abs() < 1e-12);
        assert!((sos(&acr(&[1.0, 2.0, 3.0, 4.0, 5.0])).unwrap() - 2.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sos_needs_two_ratings() {
        assert!(matches!(
            sos(&acr(&[3.0])),
            Err(QoeError::InsufficientSamples { needed: 2, got: 1, .. })
        ));
        assert!(standard_error(&acr(&[3.0])).is_err());
    }

    #[test]
    fn standard_error_examples() {
        assert_eq!(standard_error(&acr(&[4.0, 4.0, 4.0, 4.0])).unwrap(), 0.0);
        assert!((standard_error(&acr(&[1.0, 5.0])).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(quantile(&acr(&[1.0, 2.0, 3.0, 4.0, 5.0]), 1, 2).unwrap(), 3.0);
        let ten: Vec<f64> = (1..=10).map(f64::from).collect();
        let s = ConditionStats::from_samples("c", ten, RatingScale::continuous(0.0, 10.0).unwrap())
            .unwrap();
        assert_eq!(quantile(&s, 9, 10).unwrap(), 9.0);
        assert_eq!(quantile(&s, 1, 10).unwrap(), 1.0);
        let constant = acr(&[2.0; 7]);
        for q in 2..12 {
            for n in 1..q {
                assert_eq!(quantile(&constant, n, q).unwrap(), 2.0);
            }
        }
    }

    #[test]
    fn quantile_rejects_bad_fraction() {
        let s = acr(&[1.0, 2.0]);
        assert!(matches!(quantile(&s, 0, 2), Err(QoeError::InvalidQuantile { .. })));
        assert!(matches!(quantile(&s, 2, 2), Err(QoeError::InvalidQuantile { .. })));
        assert!(matches!(quantile(&s, 3, 2), Err(QoeError::InvalidQuantile { .. })));
    }

    #[test]
    fn acceptability_examples() {
        let s = acr(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(theta_acceptability(&s, 4.0), 0.4);
        assert_eq!(theta_acceptability(&s, 1.0), 1.0);
        assert_eq!(theta_acceptability(&s, 0.0), 1.0);
        assert_eq!(theta_acceptability(&s, 5.5), 0.0);
        assert_eq!(lower_tail(&s, 2.0), 0.4);
    }

    #[test]
    fn acceptance_examples() {
        let bin = |v: &[f64]| {
            ConditionStats::from_samples("c", v.to_vec(), RatingScale::binary()).unwrap()
        };
        assert_eq!(acceptance_rate(&bin(&[1.0, 1.0, 0.0, 1.0])).unwrap(), 0.75);
        assert_eq!(acceptance_rate(&bin(&[0.0, 0.0, 0.0])).unwrap(), 0.0);
        let s = bin(&[1.0, 0.0, 0.0, 1.0, 1.0]);
        assert_eq!(acceptance_rate(&s).unwrap(), theta_acceptability(&s, 1.0));
        assert!(matches!(
            acceptance_rate(&acr(&[1.0])),
            Err(QoeError::Unsupported(_))
        ));
    }

    #[test]
    fn works_in_single_precision() {
        let s = ConditionStats::<f32>::from_samples(
            "c",
            vec![1.0, 2.0, 3.0, 4.0, 5.0],
            RatingScale::acr(),
        )
        .unwrap();
        assert_eq!(mos(&s), 3.0f32);
        assert!((sos(&s).unwrap() - 2.5f32.sqrt()).abs() < 1e-6);
        assert_eq!(quantile(&s, 1, 2).unwrap(), 3.0f32);
    }

    fn acr_sample() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec((1i32..=5).prop_map(f64::from), 1..60)
    }

    proptest! {
        #[test]
        fn pmf_is_a_distribution(sample in prop::collection::vec((1i32..=5).prop_map(f64::from), 100)) {
            let pmf = empirical_pmf(&acr(&sample)).unwrap();
            let total: f64 = pmf.probabilities.values().sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
            prop_assert!(pmf.probabilities.values().all(|p| (0.0..=1.0).contains(p)));
        }

        #[test]
        fn mos_duality(sample in acr_sample()) {
            let s = acr(&sample);
            let pmf = empirical_pmf(&s).unwrap();
            prop_assert!((mos(&s) - pmf.mean()).abs() <= 1e-12);
        }

        #[test]
        fn mos_and_sos_stay_in_bounds(sample in acr_sample()) {
            let s = acr(&sample);
            let m = mos(&s);
            prop_assert!((1.0..=5.0).contains(&m));
            if s.count() >= 2 {
                let r = s.count() as f64;
                let bound = (r / (r - 1.0)).sqrt() * crate::sos_model::max_sos(m, s.scale()).unwrap();
                let sd = sos(&s).unwrap();
                prop_assert!(sd >= 0.0 && sd <= bound + 1e-9, "sos {sd} bound {bound}");
                if sd > 0.0 {
                    prop_assert!(standard_error(&s).unwrap() < sd);
                }
            }
        }

        #[test]
        fn acceptability_is_non_increasing(sample in acr_sample()) {
            let s = acr(&sample);
            prop_assert_eq!(theta_acceptability(&s, 1.0), 1.0);
            let mut prev = 1.0;
            for i in 0..=50 {
                let a = theta_acceptability(&s, 0.5 + i as f64 * 0.1);
                prop_assert!((0.0..=1.0).contains(&a) && a <= prev);
                prev = a;
            }
        }

        #[test]
        fn quantile_is_monotone_in_n(sample in acr_sample(), q in 2u32..30) {
            let s = acr(&sample);
            let mut prev = f64::NEG_INFINITY;
            for n in 1..q {
                let v = quantile(&s, n, q).unwrap();
                prop_assert!(v >= prev);
                prev = v;
            }
        }

        #[test]
        fn estimators_ignore_sample_order(sample in acr_sample(), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut shuffled = sample.clone();
            shuffled.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
            let (a, b) = (acr(&sample), acr(&shuffled));
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(mos(&a), mos(&b));
            prop_assert_eq!(theta_acceptability(&a, 3.0), theta_acceptability(&b, 3.0));
        }
    }
}
