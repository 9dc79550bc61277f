//! Mpemba decision theory on population vectors.
//!
//! Everything here is a pure function of initial populations, the spectrum and
//! (where relevant) a distance function.

mod acceleration;
mod certificate;
mod crossing;
mod estimate;
mod verdict;

pub use acceleration::{max_acceleration_time, AccelerationEstimate};
pub use certificate::{general_certificate, infidelity_certificate, FiniteTimeCertificate};
pub use crossing::{
    find_crossings, find_crossings_on, Crossing, CrossingReport, CROSSING_TOLERANCE,
};
pub use estimate::{estimate_crossing, CrossingEstimate, EstimateCase};
pub use verdict::{check_mpemba, first_differing_level, MpembaVerdict, RATIO_TOLERANCE};

use crate::error::{Error, Result};
use crate::spectrum::{DistanceFunction, EnergySpectrum, PopulationVector};

/// Shared validation: lengths, nonempty ground levels.
fn validate_pair(
    hot: &PopulationVector,
    cold: &PopulationVector,
    spectrum: &EnergySpectrum,
) -> Result<()> {
    let n = spectrum.level_count();
    hot.require_len(n, "hot populations")?;
    cold.require_len(n, "cold populations")?;
    hot.require_ground("hot")?;
    cold.require_ground("cold")?;
    Ok(())
}

/// Errors unless `hot` is strictly farther from the ground state under `df`.
fn require_hotter(
    hot: &PopulationVector,
    cold: &PopulationVector,
    df: &DistanceFunction,
) -> Result<(f64, f64)> {
    let d_hot = df.evaluate(hot)?;
    let d_cold = df.evaluate(cold)?;
    if d_hot < d_cold {
        Err(Error::ColdIsHotter {
            hot: d_hot,
            cold: d_cold,
        })
    } else if d_hot == d_cold {
        Err(Error::EqualDistance(d_hot))
    } else {
        Ok((d_hot, d_cold))
    }
}
