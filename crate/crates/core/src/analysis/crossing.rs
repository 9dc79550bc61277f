//! Locating the times at which two relaxation curves cross.

use serde::Serialize;

use super::validate_pair;
use crate::dynamics::{distance_at, GridSpec, DISTANCE_FLOOR};
use crate::error::{Error, Result};
use crate::roots::{bisect, golden_section_min};
use crate::spectrum::{DistanceFunction, EnergySpectrum, PopulationVector};

/// Absolute bracket width at which crossing refinement stops.
pub const CROSSING_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub tau: f64,
    /// Common distance of the two curves at `tau`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingReport {
    /// Crossings before the stopping threshold, ascending in `tau`.
    pub crossings: Vec<Crossing>,
    /// First time at which the closer curve reaches the threshold.
    pub truncated_at: Option<f64>,
    /// Crossings that happen only after the threshold was reached.
    pub past_threshold: Vec<Crossing>,
    /// The two curves start at the same distance.
    pub marginal: bool,
}

impl CrossingReport {
    pub fn first(&self) -> Option<&Crossing> {
        self.crossings.first()
    }
}

/// Scans `g(τ) = D_hot(τ) - D_cold(τ)` on the default geometric grid up to
/// `tau_max`. See [`find_crossings_on`].
pub fn find_crossings(
    hot: &PopulationVector,
    cold: &PopulationVector,
    spectrum: &EnergySpectrum,
    df: &DistanceFunction,
    tau_max: f64,
    epsilon: Option<f64>,
) -> Result<CrossingReport> {
    find_crossings_on(
        hot,
        cold,
        spectrum,
        df,
        tau_max,
        epsilon,
        GridSpec::default(),
    )
}

/// Every sign change of `g` on the grid is bisected to [`CROSSING_TOLERANCE`].
/// Interior grid points where `|g|` dips without a sign change are searched for
/// a pair of close crossings. The scan stops once both distances fall below
/// [`DISTANCE_FLOOR`].
///
/// With a threshold `epsilon`, crossings after the first time either curve
/// reaches it are moved to `past_threshold`. Thresholds below
/// [`DISTANCE_FLOOR`] are rejected, since distances that small read as zero.
pub fn find_crossings_on(
    hot: &PopulationVector,
    cold: &PopulationVector,
    spectrum: &EnergySpectrum,
    df: &DistanceFunction,
    tau_max: f64,
    epsilon: Option<f64>,
    grid: GridSpec,
) -> Result<CrossingReport> {
    validate_pair(hot, cold, spectrum)?;
    if df.level_count() != spectrum.level_count() {
        return Err(Error::LengthMismatch {
            what: "distance weights",
            expected: spectrum.level_count(),
            got: df.level_count(),
        });
    }
    if let Some(eps) = epsilon {
        if !(eps >= DISTANCE_FLOOR && eps.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("must be at least {DISTANCE_FLOOR:e}, got {eps}"),
            });
        }
    }
    let taus = grid.times(tau_max)?;
    let (ph, pc, e) = (hot.as_slice(), cold.as_slice(), spectrum.energies());
    let pair = |t: f64| (distance_at(ph, e, df, t), distance_at(pc, e, df, t));
    let g = |t: f64| {
        let (a, b) = pair(t);
        a - b
    };

    let mut gs = Vec::with_capacity(taus.len());
    for &t in &taus {
        let (a, b) = pair(t);
        gs.push(a - b);
        if a.max(b) < DISTANCE_FLOOR {
            break;
        }
    }
    let marginal = gs[0] == 0.0;

    let mut roots = Vec::new();
    for i in 1..gs.len() {
        let (g0, g1) = (gs[i - 1], gs[i]);
        if g1 == 0.0 {
            // Exact zero at a grid point; counted once, from its left interval.
            roots.push(taus[i]);
            continue;
        }
        if g0 != 0.0 && g0.signum() != g1.signum() {
            roots.push(bisect(g, taus[i - 1], taus[i], CROSSING_TOLERANCE));
        } else if i + 1 < gs.len() {
            // Interior dip of |g| with no sign change on either side.
            let g2 = gs[i + 1];
            if g0 != 0.0
                && g0.signum() == g1.signum()
                && g1.signum() == g2.signum()
                && g1.abs() < g0.abs()
                && g1.abs() < g2.abs()
            {
                let s = g1.signum();
                let (lo, hi) = (taus[i - 1], taus[i + 1]);
                let (t_min, h_min) = golden_section_min(|t| s * g(t), lo, hi, CROSSING_TOLERANCE);
                if h_min < 0.0 {
                    roots.push(bisect(g, lo, t_min, CROSSING_TOLERANCE));
                    roots.push(bisect(g, t_min, hi, CROSSING_TOLERANCE));
                }
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= CROSSING_TOLERANCE);

    let all: Vec<Crossing> = roots
        .into_iter()
        .filter(|&t| t > 0.0)
        .map(|tau| {
            let (a, b) = pair(tau);
            Crossing {
                tau,
                value: 0.5 * (a + b),
            }
        })
        .collect();

    let truncated_at = epsilon.map(|eps| {
        let m = |t: f64| {
            let (a, b) = pair(t);
            a.min(b) - eps
        };
        if m(0.0) <= 0.0 {
            return 0.0;
        }
        let mut hi = tau_max.max(1.0 / spectrum.energy(1));
        while m(hi) > 0.0 {
            hi *= 2.0;
        }
        bisect(m, 0.0, hi, CROSSING_TOLERANCE)
    });

    let (crossings, past_threshold) = match truncated_at {
        Some(t_eps) => all.into_iter().partition(|c| c.tau <= t_eps),
        None => (all, Vec::new()),
    };
    Ok(CrossingReport {
        crossings,
        truncated_at,
        past_threshold,
        marginal,
    })
}
