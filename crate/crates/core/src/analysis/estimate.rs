//! Closed-form long-time estimate of the average-energy crossing time.

use serde::Serialize;

use super::validate_pair;
use super::verdict::first_differing_level;
use crate::error::{Error, Result};
use crate::spectrum::{EnergySpectrum, PopulationVector};

/// Argument of the logarithm below which the estimate is flagged as marginal.
const MARGINAL_LOG_ARGUMENT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateCase {
    /// Both states occupy the deciding level; the hot state wins because its
    /// ratio there is smaller.
    SharedLevel,
    /// The hot state leaves the deciding level empty.
    HotLevelEmpty,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingEstimate {
    pub tau: f64,
    pub case: EstimateCase,
    /// Lowest level whose ratio to the ground population differs.
    pub deciding_level: usize,
    /// Hot level balanced against the deciding level.
    pub partner_level: usize,
    pub log_argument: f64,
    /// The log argument is below 2, where the two-term balance is rough.
    pub marginal: bool,
}

/// Estimates the crossing of the average-energy curves by balancing the two
/// slowest-decaying terms of their difference.
///
/// With `d` the deciding level and `k` the next level the hot state occupies:
/// if the hot state occupies `d`,
/// `τ ≈ ln[r^h_k E_k / ((r^c_d - r^h_d) E_d)] / (2(E_k - E_d))`;
/// if it leaves `d` empty,
/// `τ ≈ ln[p^h_k p^c_0 E_k / (p^c_d p^h_0 E_d)] / (2(E_k - E_d))`.
pub fn estimate_crossing(
    hot: &PopulationVector,
    cold: &PopulationVector,
    spectrum: &EnergySpectrum,
) -> Result<CrossingEstimate> {
    validate_pair(hot, cold, spectrum)?;
    let d = first_differing_level(hot, cold)
        .ok_or_else(|| Error::NoMpemba("all level ratios agree".into()))?;
    let (rh_d, rc_d) = (hot.ratio(d), cold.ratio(d));
    if rh_d >= rc_d {
        return Err(Error::NoMpemba(format!(
            "hot ratio {rh_d} at level {d} is not below cold ratio {rc_d}"
        )));
    }
    let k = hot.next_occupied_above(d).ok_or_else(|| {
        Error::EstimateInapplicable(format!("hot state has no occupied level above {d}"))
    })?;
    let (e_d, e_k) = (spectrum.energy(d), spectrum.energy(k));

    let (case, arg) = if hot.get(d) > 0.0 {
        (
            EstimateCase::SharedLevel,
            hot.ratio(k) * e_k / ((rc_d - rh_d) * e_d),
        )
    } else {
        (
            EstimateCase::HotLevelEmpty,
            hot.get(k) * cold.get(0) * e_k / (cold.get(d) * hot.get(0) * e_d),
        )
    };
    if arg.is_nan() || arg <= 1.0 {
        return Err(Error::EstimateInapplicable(format!(
            "crossing is early-time (log argument {arg} <= 1)"
        )));
    }
    let marginal = arg < MARGINAL_LOG_ARGUMENT;
    if marginal {
        log::warn!(
            "crossing estimate has a small log argument ({arg:.4}); the two-term balance is rough"
        );
    }
    Ok(CrossingEstimate {
        tau: arg.ln() / (2.0 * (e_k - e_d)),
        case,
        deciding_level: d,
        partner_level: k,
        log_argument: arg,
        marginal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec5() -> EnergySpectrum {
        EnergySpectrum::new(vec![0.0, 0.15, 0.4, 0.65, 0.8]).unwrap()
    }

    fn pv(v: &[f64]) -> PopulationVector {
        PopulationVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn shared_level_case() {
        let est = estimate_crossing(
            &pv(&[0.05, 0.005, 0.8, 0.05, 0.095]),
            &pv(&[0.3, 0.45, 0.05, 0.1, 0.1]),
            &spec5(),
        )
        .unwrap();
        assert_eq!(est.case, EstimateCase::SharedLevel);
        let expected = 2.0 * ((16.0 * 0.4) / ((1.5 - 0.1) * 0.15f64)).ln();
        assert!((est.tau - expected).abs() < 1e-12);
        assert!((est.tau - 6.8339).abs() < 1e-4);
    }

    #[test]
    fn hot_level_empty_case() {
        let est = estimate_crossing(
            &pv(&[0.05, 0.0, 0.9, 0.025, 0.025]),
            &pv(&[0.4, 0.4, 0.05, 0.05, 0.1]),
            &spec5(),
        )
        .unwrap();
        assert_eq!(est.case, EstimateCase::HotLevelEmpty);
        assert!((est.tau - 2.0 * 48f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn no_partner_level_is_inapplicable() {
        // Ratios agree below the top level.
        let hot = pv(&[0.2, 0.1, 0.1, 0.1, 0.5]);
        let cold = pv(&[0.1, 0.05, 0.05, 0.05, 0.75]);
        let s = spec5();
        assert!(matches!(
            estimate_crossing(&hot, &cold, &s),
            Err(Error::EstimateInapplicable(_))
        ));
    }

    #[test]
    fn early_crossing_is_rejected() {
        let s = EnergySpectrum::new(vec![0.0, 0.2, 0.3]).unwrap();
        // log argument (0.2/0.6)·0.3/((1.2857 - 0.3333)·0.2) < 1
        let r = estimate_crossing(&pv(&[0.6, 0.2, 0.2]), &pv(&[0.35, 0.45, 0.20]), &s);
        assert!(matches!(r, Err(Error::EstimateInapplicable(_))));
    }

    #[test]
    fn larger_hot_ratio_has_no_effect() {
        let s = EnergySpectrum::new(vec![0.0, 0.2, 0.3]).unwrap();
        assert!(matches!(
            estimate_crossing(&pv(&[0.2, 0.5, 0.3]), &pv(&[0.35, 0.45, 0.20]), &s),
            Err(Error::NoMpemba(_))
        ));
    }
}
