//! Sufficient conditions for a crossing while both distances are still above a
//! stopping threshold `ε`.

use serde::Serialize;

use super::verdict::first_differing_level;
use super::{require_hotter, validate_pair};
use crate::error::{Error, Result};
use crate::roots::bisect;
use crate::spectrum::{DistanceFunction, EnergySpectrum, PopulationVector};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteTimeCertificate {
    pub applicable: bool,
    /// Any stopping threshold strictly below this still sees a crossing.
    pub epsilon_bound: Option<f64>,
    /// Upper bound on the time of that crossing.
    pub tau_tilde_star: Option<f64>,
    pub r_hot: f64,
    pub r_cold: f64,
    pub s_hot: f64,
    /// Level `j` whose cumulative ratios and gap `E_{j+1} - E_j` were used.
    pub level: usize,
    /// Free parameter of the general bound, `a*` when optimized.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// Upper end of the admissible `a` interval (infinite when `r_hot = 0`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_max: Option<f64>,
    /// The two branch times of the general bound at `a`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch_times: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl FiniteTimeCertificate {
    fn inapplicable(r_hot: f64, r_cold: f64, s_hot: f64, level: usize, reason: String) -> Self {
        Self {
            applicable: false,
            epsilon_bound: None,
            tau_tilde_star: None,
            r_hot,
            r_cold,
            s_hot,
            level,
            a: None,
            a_max: None,
            branch_times: None,
            reason: Some(reason),
        }
    }
}

fn s_of(p: &PopulationVector) -> f64 {
    p.excited_mass() / p.ground_population()
}

fn cumulative_ratio(p: &PopulationVector, upto: usize) -> f64 {
    (1..=upto).map(|i| p.ratio(i)).sum()
}

/// Finite-time bound for the infidelity `1 - p_0`.
///
/// With `r = p_1/p_0` and `s = (1 - p_0)/p_0`, a hot state with `r_h < r_c`
/// crosses below the cold one no later than
/// `τ̃* = ln((s_h - r_h)/(r_c - r_h)) / (2(E_2 - E_1))`, while its infidelity is
/// still above the returned `epsilon_bound`. When the level-1 ratios tie, the
/// ratios are summed up to the first differing level `j` and `E_1, E_2` become
/// `E_j, E_{j+1}`.
pub fn infidelity_certificate(
    hot: &PopulationVector,
    cold: &PopulationVector,
    spectrum: &EnergySpectrum,
) -> Result<FiniteTimeCertificate> {
    let n = spectrum.level_count();
    if n < 3 {
        return Err(Error::TooFewLevels(n));
    }
    validate_pair(hot, cold, spectrum)?;
    require_hotter(hot, cold, &DistanceFunction::infidelity(spectrum))?;

    let s_hot = s_of(hot);
    let Some(j) = first_differing_level(hot, cold) else {
        return Ok(FiniteTimeCertificate::inapplicable(
            hot.ratio(1),
            cold.ratio(1),
            s_hot,
            n,
            "all level ratios agree".into(),
        ));
    };
    let rh = cumulative_ratio(hot, j);
    let rc = cumulative_ratio(cold, j);
    if rh >= rc {
        return Ok(FiniteTimeCertificate::inapplicable(
            rh,
            rc,
            s_hot,
            j,
            format!("hot ratio {rh} is not below cold ratio {rc}"),
        ));
    }
    if j + 1 >= n {
        return Ok(FiniteTimeCertificate::inapplicable(
            rh,
            rc,
            s_hot,
            j,
            "deciding level is the top level".into(),
        ));
    }
    let (e_lo, e_hi) = (spectrum.energy(j), spectrum.energy(j + 1));
    let x = (s_hot - rh) / (rc - rh);
    let tau = x.ln() / (2.0 * (e_hi - e_lo));
    let bound = 1.0 / (1.0 + x.powf(e_lo / (e_hi - e_lo)) / rc);
    Ok(FiniteTimeCertificate {
        applicable: true,
        epsilon_bound: Some(bound),
        tau_tilde_star: Some(tau),
        r_hot: rh,
        r_cold: rc,
        s_hot,
        level: j,
        a: None,
        a_max: None,
        branch_times: None,
        reason: None,
    })
}

/// Quantities of the general bound that do not depend on `a`.
struct GeneralParts {
    rh: f64,
    rc: f64,
    sh: f64,
    q: f64,
    f1: f64,
    e1: f64,
    e2: f64,
}

impl GeneralParts {
    /// Time after which the cold distance provably exceeds the level-1 share.
    fn tau_one(&self, a: f64) -> f64 {
        ((self.rc / a).ln() + (1.0 - self.q).ln()) / (2.0 * self.e1)
    }

    /// Time after which the hot level-1 ratio dominates the tail.
    fn tau_two(&self, a: f64) -> f64 {
        self.log_arg(a).ln() / (2.0 * (self.e2 - self.e1))
    }

    fn log_arg(&self, a: f64) -> f64 {
        (self.sh - self.rh) / (self.q * self.rc / (1.0 + a) - self.rh)
    }

    fn bound(&self, a: f64) -> f64 {
        let first = a / (1.0 - self.q + a);
        let second = 1.0 / (1.0 + self.log_arg(a).powf(self.e1 / (self.e2 - self.e1)) / self.rc);
        self.f1 * first.min(second)
    }
}

/// Finite-time bound for a general distance `D_f` with `f(E_{n-1}) > f(E_1)`.
///
/// With `q = f(E_1)/f(E_{n-1})` the bound holds for every
/// `a ∈ (0, q r_c / r_h - 1)`; omitting `a` selects the `a*` where the two branch
/// times meet, found by bisection. Applicable only when
/// `r_c / r_h > f(E_{n-1})/f(E_1)`.
pub fn general_certificate(
    hot: &PopulationVector,
    cold: &PopulationVector,
    spectrum: &EnergySpectrum,
    df: &DistanceFunction,
    a: Option<f64>,
) -> Result<FiniteTimeCertificate> {
    let n = spectrum.level_count();
    validate_pair(hot, cold, spectrum)?;
    if df.level_count() != n {
        return Err(Error::LengthMismatch {
            what: "distance weights",
            expected: n,
            got: df.level_count(),
        });
    }
    require_hotter(hot, cold, df)?;

    let (rh, rc, sh) = (hot.ratio(1), cold.ratio(1), s_of(hot));
    let f1 = df.weight(1);
    let fmax = df.weight(n - 1);
    if fmax <= f1 {
        return Ok(FiniteTimeCertificate::inapplicable(
            rh,
            rc,
            sh,
            1,
            format!("requires f(E_top) > f(E_1), got {fmax} and {f1}"),
        ));
    }
    let q = f1 / fmax;
    if q * rc <= rh {
        return Ok(FiniteTimeCertificate::inapplicable(
            rh,
            rc,
            sh,
            1,
            format!(
                "ratio r_c/r_h = {} does not exceed f(E_top)/f(E_1) = {}",
                rc / rh,
                1.0 / q
            ),
        ));
    }
    let parts = GeneralParts {
        rh,
        rc,
        sh,
        q,
        f1,
        e1: spectrum.energy(1),
        e2: spectrum.energy(2),
    };
    let a_max = if rh == 0.0 {
        f64::INFINITY
    } else {
        q * rc / rh - 1.0
    };

    let a = match a {
        Some(a) => {
            if !(a > 0.0 && a < a_max) {
                return Err(Error::InvalidParameter {
                    name: "a",
                    reason: format!("must lie in (0, {a_max}), got {a}"),
                });
            }
            a
        }
        None => optimal_a(&parts, a_max),
    };
    let (t1, t2) = (parts.tau_one(a), parts.tau_two(a));
    Ok(FiniteTimeCertificate {
        applicable: true,
        epsilon_bound: Some(parts.bound(a)),
        tau_tilde_star: Some(t1.max(t2)),
        r_hot: rh,
        r_cold: rc,
        s_hot: sh,
        level: 1,
        a: Some(a),
        a_max: Some(a_max),
        branch_times: Some([t1, t2]),
        reason: None,
    })
}

/// `τ_1(a)` falls from `+∞` and `τ_2(a)` rises to `+∞` across the admissible
/// interval, so their difference has exactly one root.
fn optimal_a(parts: &GeneralParts, a_max: f64) -> f64 {
    let gap = |a: f64| parts.tau_one(a) - parts.tau_two(a);
    let hi = if a_max.is_finite() {
        a_max
    } else {
        let mut hi = 1.0;
        while gap(hi) > 0.0 {
            hi *= 2.0;
        }
        hi
    };
    bisect(
        |a| {
            if a <= 0.0 {
                f64::INFINITY
            } else if a >= a_max {
                f64::NEG_INFINITY
            } else {
                gap(a)
            }
        },
        0.0,
        hi,
        0.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve_with, Direction};

    fn spec3() -> EnergySpectrum {
        EnergySpectrum::new(vec![0.0, 0.2, 0.3]).unwrap()
    }

    fn pv(v: &[f64]) -> PopulationVector {
        PopulationVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn two_decimal_coordinates_of_c() {
        let c =
            infidelity_certificate(&pv(&[0.31, 0.16, 0.53]), &pv(&[0.35, 0.45, 0.20]), &spec3())
                .unwrap();
        assert!(c.applicable);
        assert!((c.r_hot - 0.516129).abs() < 1e-6);
        assert!((c.r_cold - 1.285714).abs() < 1e-6);
        assert!((c.s_hot - 2.225806).abs() < 1e-6);
        assert!((c.tau_tilde_star.unwrap() - 3.99102).abs() < 1e-4);
        assert!((c.epsilon_bound.unwrap() - 0.20667).abs() < 1e-4);
    }

    #[test]
    fn backward_evolved_c() {
        let s = spec3();
        let b = pv(&[0.45, 0.15, 0.40]);
        let c = evolve_with(&b, &s, -1.1, Direction::AllowBackward).unwrap();
        let cert = infidelity_certificate(&c, &pv(&[0.35, 0.45, 0.20]), &s).unwrap();
        assert!((cert.tau_tilde_star.unwrap() - 4.0300).abs() < 1e-3);
        assert!((cert.epsilon_bound.unwrap() - 0.2041).abs() < 1e-3);
    }

    #[test]
    fn tied_level_one_uses_cumulative_ratios() {
        let s = EnergySpectrum::new(vec![0.0, 0.2, 0.3, 0.5]).unwrap();
        let hot = pv(&[0.2, 0.1, 0.1, 0.6]);
        let cold = pv(&[0.4, 0.2, 0.3, 0.1]);
        let c = infidelity_certificate(&hot, &cold, &s).unwrap();
        assert!(c.applicable);
        assert_eq!(c.level, 2);
        let (rh, rc, sh) = (1.0, 1.25, 4.0);
        assert!((c.r_hot - rh).abs() < 1e-15 && (c.r_cold - rc).abs() < 1e-15);
        let x: f64 = (sh - rh) / (rc - rh);
        assert!((c.tau_tilde_star.unwrap() - x.ln() / 0.4).abs() < 1e-12);
        let bound = 1.0 / (1.0 + x.powf(0.3 / 0.2) / rc);
        assert!((c.epsilon_bound.unwrap() - bound).abs() < 1e-12);
    }

    #[test]
    fn larger_hot_ratio_is_inapplicable() {
        let c = infidelity_certificate(&pv(&[0.2, 0.5, 0.3]), &pv(&[0.35, 0.45, 0.20]), &spec3())
            .unwrap();
        assert!(!c.applicable);
        assert!(c.epsilon_bound.is_none());
    }

    #[test]
    fn two_levels_are_rejected() {
        let s = EnergySpectrum::new(vec![0.0, 0.2]).unwrap();
        assert_eq!(
            infidelity_certificate(&pv(&[0.2, 0.8]), &pv(&[0.5, 0.5]), &s),
            Err(Error::TooFewLevels(2))
        );
    }

    #[test]
    fn general_bound_for_b_prime() {
        let s = spec3();
        let df = DistanceFunction::average_energy(&s);
        let c = general_certificate(
            &pv(&[0.36, 0.16, 0.48]),
            &pv(&[0.35, 0.45, 0.20]),
            &s,
            &df,
            None,
        )
        .unwrap();
        assert!(c.applicable);
        assert!((c.a_max.unwrap() - 0.928571).abs() < 1e-6);
        let [t1, t2] = c.branch_times.unwrap();
        assert!((t1 - t2).abs() < 1e-12);
        assert!((c.a.unwrap() - 0.0354306).abs() < 1e-6);
        assert!((c.epsilon_bound.unwrap() - 0.0192159).abs() < 1e-6);
    }

    #[test]
    fn general_bound_rejects_infidelity_and_bad_a() {
        let s = spec3();
        let hot = pv(&[0.36, 0.16, 0.48]);
        let cold = pv(&[0.35, 0.45, 0.20]);
        let c_point = pv(&[0.31, 0.16, 0.53]);
        let c = general_certificate(&c_point, &cold, &s, &DistanceFunction::infidelity(&s), None)
            .unwrap();
        assert!(!c.applicable);
        let df = DistanceFunction::average_energy(&s);
        assert!(matches!(
            general_certificate(&hot, &cold, &s, &df, Some(0.95)),
            Err(Error::InvalidParameter { name: "a", .. })
        ));
        let c = general_certificate(&hot, &cold, &s, &df, Some(0.5)).unwrap();
        assert!(c.epsilon_bound.unwrap() > 0.0);
    }

    #[test]
    fn general_bound_with_small_ratio_gap_is_inapplicable() {
        let s = spec3();
        let df = DistanceFunction::average_energy(&s);
        // r_c / r_h = 1.2 < f(E_2)/f(E_1) = 1.5
        let hot = pv(&[0.25, 0.25, 0.5]);
        let cold = pv(&[0.4, 0.48, 0.12]);
        let c = general_certificate(&hot, &cold, &s, &df, None).unwrap();
        assert!(!c.applicable);
    }

    #[test]
    fn general_bound_with_empty_hot_level_one() {
        let s = spec3();
        let df = DistanceFunction::average_energy(&s);
        let c = general_certificate(
            &pv(&[0.3, 0.0, 0.7]),
            &pv(&[0.35, 0.45, 0.20]),
            &s,
            &df,
            None,
        )
        .unwrap();
        assert!(c.applicable);
        assert_eq!(c.a_max, Some(f64::INFINITY));
        let [t1, t2] = c.branch_times.unwrap();
        assert!((t1 - t2).abs() < 1e-10);
    }
}
