use serde::Serialize;

use super::validate_pair;
use crate::error::{Error, Result};
use crate::spectrum::{DistanceFunction, EnergySpectrum, PopulationVector};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccelerationEstimate {
    /// `tau_cold - tau_hot`.
    pub delta_tau: f64,
    /// Approximate time for the cold state to reach `epsilon`.
    pub tau_cold: f64,
    /// Approximate time for the hot state to reach `epsilon`.
    pub tau_hot: f64,
    /// Lowest occupied excited level of the cold state.
    pub cold_level: usize,
}

/// Largest speed-up a hot state can get over `cold` in reaching `epsilon`.
///
/// The hot state must sit only on the ground and top levels, so its distance
/// decays at the fastest rate `2E_{n-1}`, while the cold one decays at `2E_k`
/// from its lowest occupied excited level `k`. Each hitting time is taken from
/// its single dominant term:
/// `τ^c ≈ -ln(p^c_0 ε / (p^c_k f_k)) / (2E_k)` and
/// `τ^h ≈ -ln(p^h_0 ε / (p^h_{n-1} f_{n-1})) / (2E_{n-1})`.
/// Accuracy improves as `epsilon` shrinks.
pub fn max_acceleration_time(
    cold: &PopulationVector,
    hot: &PopulationVector,
    spectrum: &EnergySpectrum,
    df: &DistanceFunction,
    epsilon: f64,
) -> Result<AccelerationEstimate> {
    validate_pair(hot, cold, spectrum)?;
    let n = spectrum.level_count();
    if df.level_count() != n {
        return Err(Error::LengthMismatch {
            what: "distance weights",
            expected: n,
            got: df.level_count(),
        });
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("must be positive, got {epsilon}"),
        });
    }
    let top = n - 1;
    if let Some(i) = (1..top).find(|&i| hot.get(i) > 0.0) {
        return Err(Error::NotSparseForm(format!(
            "hot state must be empty between ground and top level, level {i} holds {}",
            hot.get(i)
        )));
    }
    if hot.get(top) == 0.0 {
        return Err(Error::NotSparseForm(
            "hot state has an empty top level".into(),
        ));
    }
    let k = cold.lowest_occupied_excited().ok_or_else(|| {
        Error::EstimateInapplicable("cold state is already the ground state".into())
    })?;

    let tau_cold =
        -(cold.get(0) * epsilon / (cold.get(k) * df.weight(k))).ln() / (2.0 * spectrum.energy(k));
    let tau_hot = -(hot.get(0) * epsilon / (hot.get(top) * df.weight(top))).ln()
        / (2.0 * spectrum.energy(top));
    Ok(AccelerationEstimate {
        delta_tau: tau_cold - tau_hot,
        tau_cold,
        tau_hot,
        cold_level: k,
    })
}
