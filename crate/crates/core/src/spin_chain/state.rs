use serde::Serialize;

use super::hamiltonian::{build_hamiltonian, SpinChainConfig, SpinChainSystem};
use crate::error::{Error, Result};
use crate::spectrum::{canonicalize_spectrum, EnergySpectrum, PopulationVector};

/// Squared overlaps below this are rounding noise on symmetry-forbidden levels.
pub const OVERLAP_NOISE_FLOOR: f64 = 1e-24;

/// Merge band for chain spectra, relative to the spectral width.
pub const CHAIN_RELATIVE_MERGE_TOLERANCE: f64 = 1e-8;

/// Real amplitudes in the computational basis; bit `j` of the index is site `j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateVector {
    amplitudes: Vec<f64>,
}

impl StateVector {
    /// Normalizes `amplitudes`.
    pub fn new(mut amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(index) = amplitudes.iter().position(|a| !a.is_finite()) {
            return Err(Error::NonFinite {
                what: "amplitudes",
                index,
                value: amplitudes[index],
            });
        }
        let norm = norm(&amplitudes);
        if norm == 0.0 {
            return Err(Error::ZeroPopulation);
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn dot(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a * b)
            .sum()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Product state with every spin rotated by `θ` about `y`: per-site amplitudes
/// `(cos θ/2, sin θ/2)` on (up, down).
pub fn tilted_state(config: &SpinChainConfig) -> Result<StateVector> {
    config.validate()?;
    let (c, s) = ((config.theta / 2.0).cos(), (config.theta / 2.0).sin());
    let amplitudes = (0..config.dimension())
        .map(|x: usize| {
            let down = x.count_ones() as i32;
            c.powi(config.sites as i32 - down) * s.powi(down)
        })
        .collect();
    StateVector::new(amplitudes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Propagation {
    /// `e^{-H t/2}`
    Forward,
    /// `e^{+H t/2}`
    Backward,
}

/// Applies `e^{∓H·duration/2}` in the eigenbasis and renormalizes.
///
/// The amplitude factor per eigenvalue is `e^{∓λ duration/2}`, so populations
/// pick up `e^{∓λ duration}`: a forward leg of length `t` matches population
/// evolution for time `t/2`.
pub fn imaginary_propagate(
    state: &StateVector,
    system: &SpinChainSystem,
    duration: f64,
    direction: Propagation,
) -> Result<StateVector> {
    if state.amplitudes.len() != system.dimension() {
        return Err(Error::LengthMismatch {
            what: "state amplitudes",
            expected: system.dimension(),
            got: state.amplitudes.len(),
        });
    }
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "duration",
            reason: format!("must be nonnegative and finite, got {duration}"),
        });
    }
    if duration == 0.0 {
        return Ok(state.clone());
    }
    let values = system.eigenvalues();
    let (sign, pivot) = match direction {
        Propagation::Forward => (-1.0, values[0]),
        Propagation::Backward => (1.0, values[values.len() - 1]),
    };
    let mut c = system.to_eigenbasis(&state.amplitudes);
    for (ck, lambda) in c.iter_mut().zip(values) {
        *ck *= (sign * (lambda - pivot) * duration / 2.0).exp();
    }
    StateVector::new(system.expand_eigenbasis(&c)).map_err(|_| Error::InvalidParameter {
        name: "duration",
        reason: "propagated state vanished numerically".into(),
    })
}

/// Forward leg under the chain with `YY` coupling `gamma0`, then a backward
/// leg of equal length under the chain described by `config`.
pub fn prepare_hotter_state(config: &SpinChainConfig, gamma0: f64) -> Result<StateVector> {
    if gamma0 == config.gamma {
        return Err(Error::InvalidChain(format!(
            "gamma0 must differ from the target coupling {}",
            config.gamma
        )));
    }
    let h0 = build_hamiltonian(config, Some(gamma0))?;
    let h1 = build_hamiltonian(config, None)?;
    prepare_with(config, &h0, &h1)
}

fn prepare_with(
    config: &SpinChainConfig,
    h0: &SpinChainSystem,
    h1: &SpinChainSystem,
) -> Result<StateVector> {
    let psi = tilted_state(config)?;
    let forward = imaginary_propagate(&psi, h0, config.tau_pre, Propagation::Forward)?;
    imaginary_propagate(&forward, h1, config.tau_pre, Propagation::Backward)
}

/// Chain default merge band: `1e-8` of the spectral width.
pub fn default_chain_merge_tolerance(system: &SpinChainSystem) -> f64 {
    CHAIN_RELATIVE_MERGE_TOLERANCE * system.spectral_width().max(f64::MIN_POSITIVE)
}

/// Energy-level populations `|⟨E_k|ψ⟩|²` in canonical form: degenerate
/// multiplets merged, ground energy shifted to zero.
pub fn populations_of(
    state: &StateVector,
    system: &SpinChainSystem,
    merge_tolerance: f64,
) -> Result<(EnergySpectrum, PopulationVector)> {
    if state.amplitudes.len() != system.dimension() {
        return Err(Error::LengthMismatch {
            what: "state amplitudes",
            expected: system.dimension(),
            got: state.amplitudes.len(),
        });
    }
    let weights: Vec<f64> = system
        .to_eigenbasis(&state.amplitudes)
        .into_iter()
        .map(|c| {
            let w = c * c;
            if w < OVERLAP_NOISE_FLOOR {
                0.0
            } else {
                w
            }
        })
        .collect();
    canonicalize_spectrum(system.eigenvalues(), &weights, merge_tolerance)
}

/// `⟨ψ|H|ψ⟩`.
pub fn energy_expectation(state: &StateVector, system: &SpinChainSystem) -> f64 {
    system
        .apply(&state.amplitudes)
        .iter()
        .zip(&state.amplitudes)
        .map(|(a, b)| a * b)
        .sum()
}

/// Initial populations of the pre-evolution protocol, both resolved on the
/// target chain's spectrum.
#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub system: SpinChainSystem,
    pub spectrum: EnergySpectrum,
    /// The tilted product state.
    pub cold: PopulationVector,
    /// The pre-evolved state.
    pub hot: PopulationVector,
}

pub fn run_protocol(config: &SpinChainConfig, gamma0: f64) -> Result<ProtocolRun> {
    if gamma0 == config.gamma {
        return Err(Error::InvalidChain(format!(
            "gamma0 must differ from the target coupling {}",
            config.gamma
        )));
    }
    let h0 = build_hamiltonian(config, Some(gamma0))?;
    let h1 = build_hamiltonian(config, None)?;
    let tol = default_chain_merge_tolerance(&h1);
    let (spectrum, cold) = populations_of(&tilted_state(config)?, &h1, tol)?;
    let (hot_spectrum, hot) = populations_of(&prepare_with(config, &h0, &h1)?, &h1, tol)?;
    debug_assert_eq!(spectrum, hot_spectrum);
    Ok(ProtocolRun {
        system: h1,
        spectrum,
        cold,
        hot,
    })
}
