use serde::Serialize;

use super::{require_hotter, validate_pair};
use crate::error::Result;
use crate::spectrum::{DistanceFunction, EnergySpectrum, PopulationVector};

/// Relative tolerance below which two level ratios count as equal.
pub const RATIO_TOLERANCE: f64 = 1e-12;

/// Outcome of the long-time occurrence test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MpembaVerdict {
    pub occurs: bool,
    /// Lowest level `i ≥ 1` where `p_i/p_0` differs between the two states, or
    /// `n` when every ratio agrees.
    pub deciding_level: usize,
    pub ratio_hot: f64,
    pub ratio_cold: f64,
}

/// Smallest `i ≥ 1` whose ground-relative ratios differ beyond [`RATIO_TOLERANCE`].
pub fn first_differing_level(hot: &PopulationVector, cold: &PopulationVector) -> Option<usize> {
    (1..hot.len()).find(|&i| ratios_differ(hot.ratio(i), cold.ratio(i)))
}

pub(crate) fn ratios_differ(a: f64, b: f64) -> bool {
    (a - b).abs() > RATIO_TOLERANCE * a.abs().max(b.abs())
}

/// Decides whether the initially hotter state eventually stays colder.
///
/// The decision depends only on the lowest level whose ratio `p_i/p_0`
/// differs: the effect occurs iff the hot state's ratio there is smaller. It
/// is the same for every admissible distance function; `df` only fixes which
/// state is the hot one.
pub fn check_mpemba(
    hot: &PopulationVector,
    cold: &PopulationVector,
    spectrum: &EnergySpectrum,
    df: &DistanceFunction,
) -> Result<MpembaVerdict> {
    validate_pair(hot, cold, spectrum)?;
    require_hotter(hot, cold, df)?;
    Ok(match first_differing_level(hot, cold) {
        Some(i) => {
            let (rh, rc) = (hot.ratio(i), cold.ratio(i));
            MpembaVerdict {
                occurs: rh < rc,
                deciding_level: i,
                ratio_hot: rh,
                ratio_cold: rc,
            }
        }
        None => {
            let top = hot.len() - 1;
            MpembaVerdict {
                occurs: false,
                deciding_level: hot.len(),
                ratio_hot: hot.ratio(top),
                ratio_cold: cold.ratio(top),
            }
        }
    })
}
