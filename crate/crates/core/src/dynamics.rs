//! Closed-form imaginary-time evolution of level populations.
//!
//! Under normalized `e^{-Hτ}` evolution each population is reweighted by
//! `e^{-2E_i τ}` and renormalized. Time is measured in inverse energy units.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::bisect;
use crate::spectrum::{DistanceFunction, EnergySpectrum, PopulationVector, POPULATION_FLOOR};

/// Reported distances below this are printed as zero; crossing scans stop here.
pub const DISTANCE_FLOOR: f64 = 1e-15;

/// Whether negative imaginary times are accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    ForwardOnly,
    /// Backward evolution amplifies excited levels. Used to extend trajectories
    /// and collinear families to `τ < 0`.
    AllowBackward,
}

/// Populations at time `tau`. Rejects `tau < 0`.
pub fn evolve(
    initial: &PopulationVector,
    spectrum: &EnergySpectrum,
    tau: f64,
) -> Result<PopulationVector> {
    evolve_with(initial, spectrum, tau, Direction::ForwardOnly)
}

pub fn evolve_with(
    initial: &PopulationVector,
    spectrum: &EnergySpectrum,
    tau: f64,
    direction: Direction,
) -> Result<PopulationVector> {
    initial.require_len(spectrum.level_count(), "population vector")?;
    if !tau.is_finite() {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: format!("must be finite, got {tau}"),
        });
    }
    if tau < 0.0 && direction == Direction::ForwardOnly {
        return Err(Error::NegativeTime(tau));
    }
    initial.require_ground("initial")?;
    Ok(PopulationVector::from_raw(evolve_slice(
        initial.as_slice(),
        spectrum.energies(),
        tau,
    )))
}

/// Unchecked core of [`evolve`]. Works for either sign of `tau` and for
/// vectors with an empty ground level.
///
/// Weights are taken relative to the level with the largest `ln p_i - 2E_i τ`,
/// so the largest weight is exactly one and nothing overflows.
pub(crate) fn evolve_slice(p: &[f64], energies: &[f64], tau: f64) -> Vec<f64> {
    if tau == 0.0 {
        return p.to_vec();
    }
    let log_weight = |i: usize| p[i].ln() - 2.0 * energies[i] * tau;
    let k = (0..p.len())
        .filter(|&i| p[i] > 0.0)
        .max_by(|&a, &b| log_weight(a).total_cmp(&log_weight(b)))
        .expect("population vector has positive mass");
    let mut w: Vec<f64> = p
        .iter()
        .zip(energies)
        .map(|(&pi, &ei)| {
            if pi == 0.0 {
                return 0.0;
            }
            let ratio = pi / p[k];
            let decay = (-2.0 * (ei - energies[k]) * tau).exp();
            if ratio.is_finite() && decay.is_finite() {
                ratio * decay
            } else {
                (pi.ln() - p[k].ln() - 2.0 * (ei - energies[k]) * tau).exp()
            }
        })
        .collect();
    let z: f64 = w.iter().sum();
    for wi in &mut w {
        *wi /= z;
        if *wi < POPULATION_FLOOR {
            *wi = 0.0;
        }
    }
    w
}

/// `Z(τ) = Σ_j p_j(0) e^{-2E_j τ}`.
pub fn partition_function(
    initial: &PopulationVector,
    spectrum: &EnergySpectrum,
    tau: f64,
) -> Result<f64> {
    initial.require_len(spectrum.level_count(), "population vector")?;
    Ok(initial
        .as_slice()
        .iter()
        .zip(spectrum.energies())
        .map(|(p, e)| p * (-2.0 * e * tau).exp())
        .sum())
}

/// `D_f = Σ p_i f(E_i)`.
pub fn distance(state: &PopulationVector, df: &DistanceFunction) -> Result<f64> {
    df.evaluate(state)
}

/// Distance as reported in exported data.
pub fn floor_distance(d: f64) -> f64 {
    if d < DISTANCE_FLOOR {
        0.0
    } else {
        d
    }
}

/// Mean energy `Σ E_i p_i`.
pub fn mean_energy(state: &PopulationVector, spectrum: &EnergySpectrum) -> Result<f64> {
    state.require_len(spectrum.level_count(), "population vector")?;
    Ok(dot(state.as_slice(), spectrum.energies()))
}

/// `dp_i/dτ = -2(E_i - Ē) p_i`.
pub fn population_derivative(
    state: &PopulationVector,
    spectrum: &EnergySpectrum,
) -> Result<Vec<f64>> {
    let mean = mean_energy(state, spectrum)?;
    Ok(state
        .as_slice()
        .iter()
        .zip(spectrum.energies())
        .map(|(p, e)| -2.0 * (e - mean) * p)
        .collect())
}

/// Time-grid layout for sampled trajectories and crossing scans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "spacing", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GridSpec {
    /// `points` equally spaced times on `[0, tau_max]`.
    Linear { points: usize },
    /// `τ = 0` followed by `points - 1` log-spaced times from `first` to
    /// `tau_max`. `first` defaults to `tau_max · 1e-4`.
    Geometric {
        points: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        first: Option<f64>,
    },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Geometric {
            points: 400,
            first: None,
        }
    }
}

impl GridSpec {
    pub fn times(&self, tau_max: f64) -> Result<Vec<f64>> {
        if !(tau_max > 0.0 && tau_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "tau_max must be positive and finite, got {tau_max}"
            )));
        }
        match *self {
            GridSpec::Linear { points } => {
                if points < 2 {
                    return Err(Error::InvalidGrid(format!(
                        "need at least 2 points, got {points}"
                    )));
                }
                let step = tau_max / (points - 1) as f64;
                let mut t: Vec<f64> = (0..points).map(|i| i as f64 * step).collect();
                t[points - 1] = tau_max;
                Ok(t)
            }
            GridSpec::Geometric { points, first } => {
                if points < 2 {
                    return Err(Error::InvalidGrid(format!(
                        "need at least 2 points, got {points}"
                    )));
                }
                let first = first.unwrap_or(tau_max * 1e-4);
                if !(first > 0.0 && first <= tau_max) {
                    return Err(Error::InvalidGrid(format!(
                        "first must lie in (0, tau_max = {tau_max}], got {first}"
                    )));
                }
                let mut t = vec![0.0];
                let m = points - 1;
                if m == 1 {
                    t.push(tau_max);
                    return Ok(t);
                }
                if first == tau_max {
                    return Err(Error::InvalidGrid(
                        "first equals tau_max, geometric grid collapses".into(),
                    ));
                }
                let ratio = (tau_max / first).ln() / (m - 1) as f64;
                t.extend((0..m).map(|i| first * (ratio * i as f64).exp()));
                t[points - 1] = tau_max;
                Ok(t)
            }
        }
    }
}

/// A sampled trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub taus: Vec<f64>,
    pub states: Vec<PopulationVector>,
    pub distances: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// CSV with header `tau,p_0,...,p_{n-1}[,distance]`.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, PopulationVector::len);
        let mut out = String::from("tau");
        for i in 0..n {
            let _ = write!(out, ",p_{i}");
        }
        if self.distances.is_some() {
            out.push_str(",distance");
        }
        out.push('\n');
        for (row, (tau, state)) in self.taus.iter().zip(&self.states).enumerate() {
            out.push_str(&fmt_num(*tau));
            for p in state.as_slice() {
                out.push(',');
                out.push_str(&fmt_num(*p));
            }
            if let Some(d) = &self.distances {
                out.push(',');
                out.push_str(&fmt_num(d[row]));
            }
            out.push('\n');
        }
        out
    }

    /// JSON array of `{tau, p_0, ..., distance}` objects.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .taus
            .iter()
            .zip(&self.states)
            .enumerate()
            .map(|(row, (tau, state))| {
                let mut obj = serde_json::Map::new();
                obj.insert("tau".into(), (*tau).into());
                for (i, p) in state.as_slice().iter().enumerate() {
                    obj.insert(format!("p_{i}"), (*p).into());
                }
                if let Some(d) = &self.distances {
                    obj.insert("distance".into(), d[row].into());
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

/// Round-trip-safe number formatting: 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Samples the exact trajectory on `grid`, with floored distances.
pub fn sample_trajectory(
    initial: &PopulationVector,
    spectrum: &EnergySpectrum,
    df: &DistanceFunction,
    tau_max: f64,
    grid: GridSpec,
) -> Result<Trajectory> {
    initial.require_len(spectrum.level_count(), "population vector")?;
    if df.level_count() != spectrum.level_count() {
        return Err(Error::LengthMismatch {
            what: "distance weights",
            expected: spectrum.level_count(),
            got: df.level_count(),
        });
    }
    initial.require_ground("initial")?;
    let taus = grid.times(tau_max)?;
    let states: Vec<PopulationVector> = taus
        .iter()
        .map(|&t| {
            PopulationVector::from_raw(evolve_slice(initial.as_slice(), spectrum.energies(), t))
        })
        .collect();
    let distances = states
        .iter()
        .map(|s| floor_distance(df.evaluate_slice(s.as_slice())))
        .collect();
    Ok(Trajectory {
        taus,
        states,
        distances: Some(distances),
    })
}

/// Raw `D_f` of the state evolved to `tau`.
pub(crate) fn distance_at(p: &[f64], energies: &[f64], df: &DistanceFunction, tau: f64) -> f64 {
    df.evaluate_slice(&evolve_slice(p, energies, tau))
}

/// First time at which `D_f(τ)` reaches `epsilon`. Zero if it starts at or below.
pub fn hitting_time(
    initial: &PopulationVector,
    spectrum: &EnergySpectrum,
    df: &DistanceFunction,
    epsilon: f64,
) -> Result<f64> {
    initial.require_len(spectrum.level_count(), "population vector")?;
    initial.require_ground("initial")?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("must be positive, got {epsilon}"),
        });
    }
    let (p, e) = (initial.as_slice(), spectrum.energies());
    let g = |t: f64| distance_at(p, e, df, t) - epsilon;
    if g(0.0) <= 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0 / spectrum.energy(1);
    while g(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: "threshold is never reached".into(),
            });
        }
    }
    Ok(bisect(g, 0.0, hi, 1e-12 * hi.max(1.0)))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec3() -> EnergySpectrum {
        EnergySpectrum::new(vec![0.0, 0.2, 0.3]).unwrap()
    }

    fn point_a() -> PopulationVector {
        PopulationVector::new(vec![0.35, 0.45, 0.20]).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let p = point_a();
        assert_eq!(evolve(&p, &spec3(), 0.0).unwrap(), p);
    }

    #[test]
    fn ground_state_is_fixed() {
        let g = PopulationVector::ground(3);
        assert_eq!(
            evolve(&g, &spec3(), 7.5).unwrap().as_slice(),
            &[1.0, 0.0, 0.0]
        );
    }

    #[test]
    fn two_level_closed_form() {
        let s = EnergySpectrum::new(vec![0.0, 0.2]).unwrap();
        let p = PopulationVector::new(vec![0.5, 0.5]).unwrap();
        let q = evolve(&p, &s, 1.0).unwrap();
        let w = (-0.4f64).exp();
        let z = 0.5 + 0.5 * w;
        assert!((q.get(0) - 0.5 / z).abs() < 1e-15);
        assert!((q.get(1) - 0.5 * w / z).abs() < 1e-15);
        assert!((partition_function(&p, &s, 1.0).unwrap() - z).abs() < 1e-15);
        assert_eq!(partition_function(&p, &s, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn negative_time_needs_flag() {
        let p = point_a();
        assert_eq!(evolve(&p, &spec3(), -1.0), Err(Error::NegativeTime(-1.0)));
        let back = evolve_with(&p, &spec3(), -1.0, Direction::AllowBackward).unwrap();
        let there = evolve(&back, &spec3(), 1.0).unwrap();
        for (a, b) in there.as_slice().iter().zip(p.as_slice()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn empty_ground_rejected() {
        let p = PopulationVector::new(vec![0.0, 0.5, 0.5]).unwrap();
        assert!(matches!(
            evolve(&p, &spec3(), 1.0),
            Err(Error::ZeroGroundPopulation { .. })
        ));
    }

    #[test]
    fn huge_time_is_stable() {
        let p = PopulationVector::new(vec![1e-200, 0.5, 0.5 - 1e-200]).unwrap();
        let q = evolve(&p, &spec3(), 5000.0).unwrap();
        assert_eq!(q.get(0), 1.0);
        assert_eq!(q.get(2), 0.0);
    }

    #[test]
    fn distances_of_point_a() {
        let s = spec3();
        let p = point_a();
        let e = distance(&p, &DistanceFunction::average_energy(&s)).unwrap();
        let i = distance(&p, &DistanceFunction::infidelity(&s)).unwrap();
        assert!((e - 0.15).abs() < 1e-15);
        assert!((i - 0.65).abs() < 1e-15);
        assert_eq!(
            distance(
                &PopulationVector::ground(3),
                &DistanceFunction::infidelity(&s)
            )
            .unwrap(),
            0.0
        );
    }

    #[test]
    fn derivative_of_point_a() {
        let d = population_derivative(&point_a(), &spec3()).unwrap();
        let expected = [0.105, -0.045, -0.060];
        for (a, b) in d.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(d.iter().sum::<f64>().abs() < 1e-15);
    }

    #[test]
    fn trajectory_decreases_and_composes() {
        let s = spec3();
        let df = DistanceFunction::average_energy(&s);
        let tr = sample_trajectory(&point_a(), &s, &df, 15.0, GridSpec::default()).unwrap();
        let d = tr.distances.as_ref().unwrap();
        assert_eq!(tr.len(), 400);
        assert!((d[0] - 0.15).abs() < 1e-15);
        assert!(d.windows(2).all(|w| w[1] < w[0]));

        let direct = evolve(&point_a(), &s, 3.0).unwrap();
        let step = evolve(&evolve(&point_a(), &s, 1.3).unwrap(), &s, 1.7).unwrap();
        for (a, b) in direct.as_slice().iter().zip(step.as_slice()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn ground_trajectory_is_zero() {
        let s = spec3();
        let df = DistanceFunction::infidelity(&s);
        let tr = sample_trajectory(
            &PopulationVector::ground(3),
            &s,
            &df,
            5.0,
            GridSpec::Linear { points: 11 },
        )
        .unwrap();
        assert!(tr.distances.unwrap().iter().all(|d| *d == 0.0));
    }

    #[test]
    fn grids() {
        let lin = GridSpec::Linear { points: 5 }.times(2.0).unwrap();
        assert_eq!(lin, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let geo = GridSpec::Geometric {
            points: 4,
            first: Some(0.01),
        }
        .times(1.0)
        .unwrap();
        assert_eq!(geo[0], 0.0);
        assert!((geo[1] - 0.01).abs() < 1e-15);
        assert!((geo[2] - 0.1).abs() < 1e-14);
        assert_eq!(geo[3], 1.0);
        assert!(GridSpec::Linear { points: 1 }.times(1.0).is_err());
        assert!(GridSpec::default().times(-1.0).is_err());
    }

    #[test]
    fn csv_header_and_precision() {
        let s = spec3();
        let df = DistanceFunction::infidelity(&s);
        let tr =
            sample_trajectory(&point_a(), &s, &df, 1.0, GridSpec::Linear { points: 2 }).unwrap();
        let csv = tr.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "tau,p_0,p_1,p_2,distance");
        let first: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|x| x.parse().unwrap())
            .collect();
        assert_eq!(first, vec![0.0, 0.35, 0.45, 0.20, 0.65]);
        let json = tr.to_json();
        assert_eq!(json[1]["tau"], 1.0);
        assert!(json[1]["p_2"].is_f64());
    }

    #[test]
    fn hitting_time_brackets() {
        let s = spec3();
        let df = DistanceFunction::average_energy(&s);
        let t = hitting_time(&point_a(), &s, &df, 0.01).unwrap();
        let d = distance(&evolve(&point_a(), &s, t).unwrap(), &df).unwrap();
        assert!((d - 0.01).abs() < 1e-12);
        assert_eq!(hitting_time(&point_a(), &s, &df, 0.2).unwrap(), 0.0);
    }
}
