//! E-model transformation laws between the Transmission Rating `R`, MOS and
//! the Good-or-Better / Poor-or-Worse / Terminate-Early percentages.
//!
//! Ratings are taken as normally distributed around `R` with spread 16, so
//! `GoB(R) = Φ((R − 60)/16)`, `PoW(R) = Φ((45 − R)/16)` and
//! `TME(R) = Φ((36 − R)/16)`.

use serde::{Deserialize, Serialize};

use crate::error::{QoeError, Result};
use crate::estimators::{lower_tail, theta_acceptability, ConditionStats};
use crate::scalar::Scalar;
use crate::types::{RatingScale, ScaleKind};

pub const GOB_THRESHOLD: f64 = 60.0;
pub const POW_THRESHOLD: f64 = 45.0;
pub const TME_THRESHOLD: f64 = 36.0;
pub const SPREAD: f64 = 16.0;

/// Lowest and highest MOS the R→MOS map reaches on `[0, 100]`.
pub const MOS_MIN: f64 = 1.0;
pub const MOS_MAX: f64 = 4.5;

/// MOS column of the reference transformation table. The three non-round
/// values are the images of the thresholds 36, 45 and 60.
pub const TABLE_MOS_ROWS: [f64; 12] = [
    1.0, 1.5, 1.87293, 2.0, 2.31513, 2.5, 3.0, 3.1, 3.5, 4.0, 4.5, 5.0,
];

/// Bisection stops once the bracket is this narrow.
const BISECTION_TOLERANCE: f64 = 1e-9;

/// Standard normal CDF `Φ(x) = erfc(−x/√2)/2`.
pub fn std_normal_cdf<T: Scalar>(x: T) -> T {
    let half = T::lit(0.5);
    half * (-x / T::lit(std::f64::consts::SQRT_2)).erfc()
}

fn check_r<T: Scalar>(r: T) -> Result<()> {
    if r >= T::zero() && r <= T::lit(100.0) {
        Ok(())
    } else {
        Err(QoeError::Domain(format!(
            "transmission rating {r} is outside [0, 100]"
        )))
    }
}

fn percent_below<T: Scalar>(z: T) -> T {
    T::lit(100.0) * std_normal_cdf(z)
}

/// Good-or-Better in percent.
pub fn gob<T: Scalar>(r: T) -> Result<T> {
    check_r(r)?;
    Ok(percent_below((r - T::lit(GOB_THRESHOLD)) / T::lit(SPREAD)))
}

/// Poor-or-Worse in percent.
pub fn pow<T: Scalar>(r: T) -> Result<T> {
    check_r(r)?;
    Ok(percent_below((T::lit(POW_THRESHOLD) - r) / T::lit(SPREAD)))
}

/// Terminate-Early in percent.
pub fn tme<T: Scalar>(r: T) -> Result<T> {
    check_r(r)?;
    Ok(percent_below((T::lit(TME_THRESHOLD) - r) / T::lit(SPREAD)))
}

/// `MOS(R) = 7·(R − 60)·(100 − R)·R·10⁻⁶ + 0.035·R + 1`.
pub fn r_to_mos<T: Scalar>(r: T) -> Result<T> {
    check_r(r)?;
    Ok(mos_polynomial(r))
}

fn mos_polynomial<T: Scalar>(r: T) -> T {
    T::lit(7e-6) * (r - T::lit(60.0)) * (T::lit(100.0) - r) * r + T::lit(0.035) * r + T::one()
}

/// Where `MOS(R)` turns from decreasing to increasing.
///
/// `dMOS/dR = 7·10⁻⁶(−3R² + 320R − 6000) + 0.035` vanishes at
/// `R = (320 − √90400)/6 ≈ 3.222`; the map dips slightly below 1 on
/// `(0, 6.515)` and is strictly increasing from this point to 100.
pub fn increasing_branch_start<T: Scalar>() -> T {
    (T::lit(320.0) - T::lit(90400.0).sqrt()) / T::lit(6.0)
}

/// Inverse of [`r_to_mos`] on its increasing branch, by bisection.
///
/// MOS 1 maps to `R ≈ 6.52`, not to 0. MOS above 4.5 has no transmission
/// rating.
pub fn mos_to_r<T: Scalar>(mos: T) -> Result<T> {
    if mos.is_nan() || mos < T::lit(MOS_MIN) {
        return Err(QoeError::Domain(format!(
            "MOS {mos} is below the E-model range [1, 4.5]"
        )));
    }
    if mos > T::lit(MOS_MAX) {
        return Err(QoeError::UndefinedTransmissionRating(mos.as_f64()));
    }
    let mut lo = increasing_branch_start::<T>();
    let mut hi = T::lit(100.0);
    let tol = T::lit(BISECTION_TOLERANCE);
    while hi - lo > tol {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if mos_polynomial(mid) < mos {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) / T::lit(2.0))
}

/// One row of the MOS / R / PoW / GoB / TME transformation table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct EModelPoint<T> {
    /// `None` for MOS above 4.5.
    pub r: Option<T>,
    pub mos: T,
    pub gob_pct: T,
    pub pow_pct: T,
    pub tme_pct: T,
}

impl<T: Scalar> EModelPoint<T> {
    pub fn from_r(r: T) -> Result<Self> {
        Ok(Self {
            r: Some(r),
            mos: r_to_mos(r)?,
            gob_pct: gob(r)?,
            pow_pct: pow(r)?,
            tme_pct: tme(r)?,
        })
    }

    pub fn from_mos(mos: T) -> Result<Self> {
        if mos > T::lit(MOS_MAX) && mos <= T::lit(5.0) {
            return Ok(Self {
                r: None,
                mos,
                gob_pct: T::lit(100.0),
                pow_pct: T::zero(),
                tme_pct: T::zero(),
            });
        }
        if !(mos >= T::lit(MOS_MIN) && mos <= T::lit(5.0)) {
            return Err(QoeError::Domain(format!(
                "MOS {mos} is outside the ACR range [1, 5]"
            )));
        }
        let r = mos_to_r(mos)?;
        Ok(Self {
            mos,
            ..Self::from_r(r)?
        })
    }

    /// `100 − GoB − PoW`.
    pub fn neutral_pct(&self) -> T {
        T::lit(100.0) - self.gob_pct - self.pow_pct
    }
}

/// Transformation table rows for the given MOS values.
pub fn emodel_table<T: Scalar>(mos_values: &[T]) -> Result<Vec<EModelPoint<T>>> {
    mos_values.iter().map(|&m| EModelPoint::from_mos(m)).collect()
}

/// The twelve reference rows.
pub fn default_table<T: Scalar>() -> Result<Vec<EModelPoint<T>>> {
    let rows: Vec<T> = TABLE_MOS_ROWS.iter().map(|&m| T::lit(m)).collect();
    emodel_table(&rows)
}

/// GoB / PoW / TME thresholds on a rating scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawThresholds<T>", into = "RawThresholds<T>")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct ThresholdSet<T> {
    theta_gb: T,
    theta_pw: T,
    theta_te: T,
    scale: RatingScale<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
struct RawThresholds<T> {
    gob: T,
    pow: T,
    tme: T,
    scale: RatingScale<T>,
}

impl<T: Scalar> TryFrom<RawThresholds<T>> for ThresholdSet<T> {
    type Error = QoeError;

    fn try_from(raw: RawThresholds<T>) -> Result<Self> {
        ThresholdSet::new(raw.gob, raw.pow, raw.tme, raw.scale)
    }
}

impl<T: Scalar> From<ThresholdSet<T>> for RawThresholds<T> {
    fn from(t: ThresholdSet<T>) -> Self {
        RawThresholds {
            gob: t.theta_gb,
            pow: t.theta_pw,
            tme: t.theta_te,
            scale: t.scale,
        }
    }
}

impl<T: Scalar> ThresholdSet<T> {
    pub fn new(theta_gb: T, theta_pw: T, theta_te: T, scale: RatingScale<T>) -> Result<Self> {
        if ![theta_gb, theta_pw, theta_te].iter().all(|t| t.is_finite()) {
            return Err(QoeError::InvalidParameter("thresholds must be finite".into()));
        }
        if !(theta_te <= theta_pw && theta_pw < theta_gb) {
            return Err(QoeError::InvalidParameter(format!(
                "thresholds need te ≤ pw < gb, got gb={theta_gb} pw={theta_pw} te={theta_te}"
            )));
        }
        Ok(Self {
            theta_gb,
            theta_pw,
            theta_te,
            scale,
        })
    }

    /// `(60, 45, 36)` on the transmission-rating scale `[0, 100]`.
    pub fn emodel_r() -> Self {
        Self {
            theta_gb: T::lit(GOB_THRESHOLD),
            theta_pw: T::lit(POW_THRESHOLD),
            theta_te: T::lit(TME_THRESHOLD),
            scale: RatingScale::continuous(T::zero(), T::lit(100.0))
                .expect("valid transmission-rating scale"),
        }
    }

    /// The E-model thresholds carried to the MOS scale `[1, 5]` through
    /// [`r_to_mos`]: `(3.1, 2.31513, 1.87293)`.
    pub fn emodel_mos() -> Self {
        let map = |r: f64| mos_polynomial(T::lit(r));
        Self {
            theta_gb: map(GOB_THRESHOLD),
            theta_pw: map(POW_THRESHOLD),
            theta_te: map(TME_THRESHOLD),
            scale: RatingScale::continuous(T::one(), T::lit(5.0)).expect("valid MOS scale"),
        }
    }

    /// Defaults for scales the E-model covers: `(4, 2, 1)` on ACR `{1..5}`
    /// and `(60, 45, 36)` on `[0, 100]`.
    pub fn default_for(scale: &RatingScale<T>) -> Option<Self> {
        let (lo, hi) = (scale.lower(), scale.upper());
        if lo == T::one() && hi == T::lit(5.0) {
            let t = Self::emodel_mos();
            if scale.is_discrete() {
                discretize_thresholds(&t, scale).ok()
            } else {
                Some(Self { scale: *scale, ..t })
            }
        } else if lo == T::zero() && hi == T::lit(100.0) {
            Some(Self {
                scale: *scale,
                ..Self::emodel_r()
            })
        } else {
            None
        }
    }

    pub fn theta_gb(&self) -> T {
        self.theta_gb
    }

    pub fn theta_pw(&self) -> T {
        self.theta_pw
    }

    pub fn theta_te(&self) -> T {
        self.theta_te
    }

    pub fn scale(&self) -> &RatingScale<T> {
        &self.scale
    }

    fn is_integral(&self) -> bool {
        [self.theta_gb, self.theta_pw, self.theta_te]
            .iter()
            .all(|t| t.fract() == T::zero())
    }
}

/// Carries thresholds to a discrete scale: the GoB threshold rounds up, the
/// PoW and TME thresholds round down.
pub fn discretize_thresholds<T: Scalar>(
    t: &ThresholdSet<T>,
    target: &RatingScale<T>,
) -> Result<ThresholdSet<T>> {
    if target.kind() != ScaleKind::Discrete {
        return Err(QoeError::Unsupported(format!(
            "threshold discretization needs a discrete target scale, got {target}"
        )));
    }
    ThresholdSet::new(
        t.theta_gb.ceil(),
        t.theta_pw.floor(),
        t.theta_te.floor(),
        *target,
    )
}

/// Fractions `(GoB, PoW, TME)` of a sample: ratings `≥ θ_gb`, `≤ θ_pw` and
/// `≤ θ_te`.
pub fn estimate_gob_pow_tme<T: Scalar>(
    stats: &ConditionStats<T>,
    t: &ThresholdSet<T>,
) -> Result<(T, T, T)> {
    if stats.scale().is_discrete() && !t.is_integral() {
        return Err(QoeError::InvalidParameter(
            "thresholds must be discretized before use on a discrete scale".into(),
        ));
    }
    Ok((
        theta_acceptability(stats, t.theta_gb),
        lower_tail(stats, t.theta_pw),
        lower_tail(stats, t.theta_te),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct CurvePoint<T> {
    pub mos: T,
    pub gob_pct: T,
    pub pow_pct: T,
    pub neutral_pct: T,
}

/// GoB, PoW and neutral percentages on an evenly spaced MOS grid.
pub fn curve_data<T: Scalar>(mos_min: T, mos_max: T, steps: usize) -> Result<Vec<CurvePoint<T>>> {
    let in_range = |m: T| m >= T::lit(MOS_MIN) && m <= T::lit(MOS_MAX);
    if !(in_range(mos_min) && in_range(mos_max) && mos_min < mos_max) {
        return Err(QoeError::Domain(format!(
            "MOS range [{mos_min}, {mos_max}] must be increasing within [1, 4.5]"
        )));
    }
    if steps < 2 {
        return Err(QoeError::Domain(format!("need at least 2 steps, got {steps}")));
    }
    let span = mos_max - mos_min;
    let last = T::from_count(steps - 1);
    (0..steps)
        .map(|i| {
            let mos = if i == steps - 1 {
                mos_max
            } else {
                mos_min + span * T::from_count(i) / last
            };
            let p = EModelPoint::from_mos(mos)?;
            Ok(CurvePoint {
                mos,
                gob_pct: p.gob_pct,
                pow_pct: p.pow_pct,
                neutral_pct: p.neutral_pct(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn normal_cdf_basics() {
        assert_eq!(std_normal_cdf(0.0f64), 0.5);
        for i in 0..=800 {
            let x = i as f64 * 0.01;
            assert!(close(std_normal_cdf(x) + std_normal_cdf(-x), 1.0, 1e-14));
        }
        // argument behind PoW at MOS 1, where R is 6.5153 rather than the rounded 6.52
        let x = (45.0 - mos_to_r(1.0f64).unwrap()) / 16.0;
        assert!(close(std_normal_cdf(x), 0.99192, 5e-6));
    }

    #[test]
    fn normal_cdf_reference_values() {
        // 40-digit references
        let cases: [(f64, f64); 20] = [
            (-8.0, 6.220960574271784e-16),
            (-6.0, 9.865_876_450_376_98e-10),
            (-5.0, 2.866515718791939e-7),
            (-4.0, 3.167124183311992e-5),
            (-3.4375, 2.935553597519711e-4),
            (-2.5, 6.209665325776135e-3),
            (-2.405, 8.086232892101946e-3),
            (-1.5, 6.680720126885807e-2),
            (-1.0, 0.15865525393145705),
            (-0.5, 0.3085375387259869),
            (-0.1, 0.460172162722971),
            (0.0, 0.5),
            (0.1, 0.539827837277029),
            (0.5, 0.6914624612740131),
            (1.0, 0.8413447460685429),
            (1.5, 0.9331927987311419),
            (2.405, 0.9919137671078981),
            (2.5, 0.9937903346742238),
            (3.4375, 0.999_706_444_640_248),
            (5.0, 0.9999997133484281),
        ];
        for (x, want) in cases {
            let got = std_normal_cdf(x);
            assert!(close(got, want, 1e-15), "Φ({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn measure_examples() {
        assert_eq!(gob(60.0f64).unwrap(), 50.0);
        assert!(close(gob(100.0f64).unwrap(), 99.379, 5e-4));
        assert!(close(gob(mos_to_r(1.0f64).unwrap()).unwrap(), 0.041, 5e-4));
        assert_eq!(pow(45.0f64).unwrap(), 50.0);
        assert!(close(pow(mos_to_r(3.0f64).unwrap()).unwrap(), 20.685, 5e-4));
        assert!(close(pow(100.0f64).unwrap(), 0.029, 5e-4));
        assert_eq!(tme(36.0f64).unwrap(), 50.0);
        assert!(close(tme(mos_to_r(1.5f64).unwrap()).unwrap(), 70.736, 5e-4));
        assert!(close(tme(mos_to_r(4.0f64).unwrap()).unwrap(), 0.336, 5e-4));
        assert!(gob(-1.0f64).is_err() && pow(100.5f64).is_err() && tme(f64::NAN).is_err());
    }

    #[test]
    fn r_to_mos_examples() {
        assert_eq!(r_to_mos(0.0f64).unwrap(), 1.0);
        assert!(close(r_to_mos(60.0f64).unwrap(), 3.1, 1e-12));
        assert!(close(r_to_mos(100.0f64).unwrap(), 4.5, 1e-12));
        assert!(r_to_mos(101.0f64).is_err());
    }

    #[test]
    fn map_dips_below_one_near_zero() {
        let start = increasing_branch_start::<f64>();
        assert!(close(start, 3.2223454054236433, 1e-12));
        assert!(r_to_mos(start).unwrap() < 0.989);
        assert!(r_to_mos(1.0f64).unwrap() < r_to_mos(0.0f64).unwrap());
    }

    #[test]
    fn map_increases_on_its_branch() {
        let start = increasing_branch_start::<f64>();
        let n = 100_000;
        let mut prev = r_to_mos(start).unwrap();
        for i in 1..=n {
            let r = start + (100.0 - start) * i as f64 / n as f64;
            let m = r_to_mos(r).unwrap();
            assert!(m > prev, "not increasing at r={r}");
            prev = m;
        }
    }

    #[test]
    fn mos_to_r_examples() {
        assert!(close(mos_to_r(3.1f64).unwrap(), 60.0, 0.01));
        assert!(close(mos_to_r(2.31513f64).unwrap(), 45.0, 0.01));
        assert!(close(mos_to_r(1.87293f64).unwrap(), 36.0, 0.01));
        assert!(close(mos_to_r(1.0f64).unwrap(), 6.52, 0.01));
        assert!(close(mos_to_r(4.5f64).unwrap(), 100.0, 1e-8));
        assert!(matches!(mos_to_r(0.99f64), Err(QoeError::Domain(_))));
        assert!(matches!(
            mos_to_r(4.6f64),
            Err(QoeError::UndefinedTransmissionRating(_))
        ));
    }

    #[test]
    fn inverse_round_trips_on_branch() {
        let start = 6.6;
        for i in 0..=1000 {
            let r = start + (100.0 - start) * i as f64 / 1000.0;
            let back = mos_to_r(r_to_mos(r).unwrap()).unwrap();
            assert!(close(back, r, 1e-6), "r={r} back={back}");
        }
    }

    #[test]
    fn table_examples() {
        let rows = emodel_table(&[2.0f64, 5.0, 3.5]).unwrap();
        let r = rows[0];
        assert!(close(r.r.unwrap(), 38.68, 0.01));
        assert!(close(r.pow_pct, 65.349, 0.002));
        assert!(close(r.gob_pct, 9.139, 0.002));
        assert!(close(r.tme_pct, 43.340, 0.002));
        assert_eq!(
            rows[1],
            EModelPoint {
                r: None,
                mos: 5.0,
                gob_pct: 100.0,
                pow_pct: 0.0,
                tme_pct: 0.0
            }
        );
        let r = rows[2];
        assert!(close(r.r.unwrap(), 67.96, 0.01));
        assert!(close(r.pow_pct, 7.563, 0.002));
        assert!(close(r.gob_pct, 69.062, 0.002));
        assert!(close(r.tme_pct, 2.288, 0.002));
        assert!(emodel_table(&[0.5f64]).is_err());
        assert!(emodel_table(&[5.5f64]).is_err());
    }

    #[test]
    fn measures_are_ordered() {
        for i in 0..=1000 {
            let r = i as f64 * 0.1;
            let (g, p, t) = (gob(r).unwrap(), pow(r).unwrap(), tme(r).unwrap());
            assert!(t <= p);
            assert!(g + p <= 100.0 + 1e-9);
            for v in [g, p, t] {
                assert!((0.0..=100.0).contains(&v));
            }
        }
    }

    #[test]
    fn threshold_discretization() {
        let acr = RatingScale::<f64>::acr();
        let t = discretize_thresholds(&ThresholdSet::emodel_mos(), &acr).unwrap();
        assert_eq!((t.theta_gb(), t.theta_pw(), t.theta_te()), (4.0, 2.0, 1.0));

        let ints = ThresholdSet::new(4.0, 2.0, 1.0, acr).unwrap();
        assert_eq!(discretize_thresholds(&ints, &acr).unwrap(), ints);

        let pct = RatingScale::<f64>::discrete(0, 100).unwrap();
        let t = discretize_thresholds(&ThresholdSet::emodel_r(), &pct).unwrap();
        assert_eq!((t.theta_gb(), t.theta_pw(), t.theta_te()), (60.0, 45.0, 36.0));

        let close_pair =
            ThresholdSet::new(2.05, 2.0, 1.5, RatingScale::continuous(1.0, 5.0).unwrap()).unwrap();
        let t = discretize_thresholds(&close_pair, &acr).unwrap();
        assert_eq!((t.theta_gb(), t.theta_pw(), t.theta_te()), (3.0, 2.0, 1.0));
        assert!(discretize_thresholds(&ints, &RatingScale::continuous(1.0, 5.0).unwrap()).is_err());
    }

    #[test]
    fn threshold_ordering_is_enforced() {
        let acr = RatingScale::<f64>::acr();
        assert!(ThresholdSet::new(2.0, 2.0, 1.0, acr).is_err());
        assert!(ThresholdSet::new(4.0, 2.0, 3.0, acr).is_err());
    }

    #[test]
    fn default_thresholds() {
        let acr = RatingScale::<f64>::acr();
        let t = ThresholdSet::default_for(&acr).unwrap();
        assert_eq!((t.theta_gb(), t.theta_pw(), t.theta_te()), (4.0, 2.0, 1.0));
        let pct = RatingScale::<f64>::continuous(0.0, 100.0).unwrap();
        let t = ThresholdSet::default_for(&pct).unwrap();
        assert_eq!((t.theta_gb(), t.theta_pw(), t.theta_te()), (60.0, 45.0, 36.0));
        assert!(ThresholdSet::default_for(&RatingScale::<f64>::continuous(0.0, 6.0).unwrap()).is_none());
        let m = ThresholdSet::<f64>::emodel_mos();
        assert!(close(m.theta_pw(), 2.31513, 5e-6) && close(m.theta_te(), 1.87293, 5e-6));
    }

    #[test]
    fn gob_pow_tme_estimates() {
        let acr = RatingScale::<f64>::acr();
        let t = ThresholdSet::new(4.0, 2.0, 1.0, acr).unwrap();
        let s = |v: &[f64]| ConditionStats::from_samples("c", v.to_vec(), acr).unwrap();
        assert_eq!(
            estimate_gob_pow_tme(&s(&[1.0, 2.0, 3.0, 4.0, 5.0]), &t).unwrap(),
            (0.4, 0.4, 0.2)
        );
        assert_eq!(estimate_gob_pow_tme(&s(&[5.0; 4]), &t).unwrap(), (1.0, 0.0, 0.0));
        assert_eq!(estimate_gob_pow_tme(&s(&[1.0; 4]), &t).unwrap(), (0.0, 1.0, 1.0));
        let raw = ThresholdSet::emodel_mos();
        assert!(estimate_gob_pow_tme(&s(&[3.0]), &raw).is_err());
    }

    #[test]
    fn curve_examples() {
        let pts = curve_data(1.0f64, 4.5, 351).unwrap();
        assert_eq!(pts.len(), 351);
        let at = pts.iter().find(|p| close(p.mos, 3.1, 1e-9)).unwrap();
        assert!(close(at.gob_pct, 50.0, 1e-6));
        assert!(close(at.neutral_pct, 32.575, 0.002));
        for w in pts.windows(2) {
            assert!(w[1].gob_pct > w[0].gob_pct);
            assert!(w[1].pow_pct < w[0].pow_pct);
        }
        assert!(pts.iter().all(|p| p.neutral_pct >= -1e-9 && p.neutral_pct.is_finite()));
        assert!(curve_data(0.5f64, 4.5, 10).is_err());
        assert!(curve_data(2.0f64, 2.0, 10).is_err());
        assert!(curve_data(1.0f64, 4.5, 1).is_err());
    }

    #[test]
    fn single_precision_table() {
        let rows = default_table::<f32>().unwrap();
        assert_eq!(rows.len(), 12);
        assert!((rows[3].pow_pct - 65.349).abs() < 0.01);
    }
}
