//! Energy spectra, population vectors and distance functions.
//!
//! A spectrum is always held in canonical form: strictly increasing, with the
//! ground level shifted to exactly zero. Raw spectra with degeneracies or an
//! arbitrary offset (for example exact-diagonalization output) go through
//! [`canonicalize_spectrum`], which merges degenerate levels by summing their
//! populations. Observables that are functions of the Hamiltonian cannot tell
//! a degenerate multiplet apart from a single level carrying its total weight,
//! so nothing downstream loses information.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative merge band used by [`default_merge_tolerance`].
pub const DEFAULT_RELATIVE_MERGE_TOLERANCE: f64 = 1e-9;

/// Populations below this are flushed to zero.
pub const POPULATION_FLOOR: f64 = 1e-300;

/// Allowed deviation of a population vector's sum from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Strictly increasing eigenenergies with `E_0 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EnergySpectrum {
    energies: Vec<f64>,
}

impl EnergySpectrum {
    /// Validates an already-canonical spectrum. Use [`canonicalize_spectrum`]
    /// for raw eigenvalues.
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::Empty);
        }
        if energies.len() < 2 {
            return Err(Error::TooFewLevels(energies.len()));
        }
        check_finite("energies", &energies)?;
        if energies[0] != 0.0 {
            return Err(Error::InvalidSpectrum(format!(
                "ground energy must be exactly 0, got {}",
                energies[0]
            )));
        }
        if let Some(i) = energies.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSpectrum(format!(
                "energies must be strictly increasing, E[{}] = {} >= E[{}] = {}",
                i,
                energies[i],
                i + 1,
                energies[i + 1]
            )));
        }
        Ok(Self { energies })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn level_count(&self) -> usize {
        self.energies.len()
    }

    pub fn energy(&self, level: usize) -> f64 {
        self.energies[level]
    }

    /// Highest energy `E_{n-1}`.
    pub fn top(&self) -> f64 {
        self.energies[self.energies.len() - 1]
    }
}

impl TryFrom<Vec<f64>> for EnergySpectrum {
    type Error = Error;

    fn try_from(energies: Vec<f64>) -> Result<Self> {
        Self::new(energies)
    }
}

impl From<EnergySpectrum> for Vec<f64> {
    fn from(spectrum: EnergySpectrum) -> Self {
        spectrum.energies
    }
}

/// Probability distribution over energy levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PopulationVector {
    populations: Vec<f64>,
}

impl PopulationVector {
    /// Accepts populations that are nonnegative and already sum to one
    /// (within [`NORMALIZATION_TOLERANCE`]). Values are stored as given.
    pub fn new(populations: Vec<f64>) -> Result<Self> {
        let sum = check_populations(&populations)?;
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized(sum));
        }
        Ok(Self { populations })
    }

    /// Normalizes arbitrary nonnegative weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let sum = check_populations(&weights)?;
        Ok(Self {
            populations: weights.into_iter().map(|w| w / sum).collect(),
        })
    }

    /// The ground state `(1, 0, ..., 0)` on `n` levels.
    pub fn ground(levels: usize) -> Self {
        let mut populations = vec![0.0; levels];
        populations[0] = 1.0;
        Self { populations }
    }

    /// Caller guarantees the invariants.
    pub(crate) fn from_raw(populations: Vec<f64>) -> Self {
        debug_assert!(populations.iter().all(|p| *p >= 0.0));
        Self { populations }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.populations
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.populations
    }

    pub fn len(&self) -> usize {
        self.populations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.populations.is_empty()
    }

    pub fn get(&self, level: usize) -> f64 {
        self.populations[level]
    }

    pub fn ground_population(&self) -> f64 {
        self.populations[0]
    }

    /// Total weight outside the ground level.
    pub fn excited_mass(&self) -> f64 {
        self.populations[1..].iter().sum()
    }

    /// `p_i / p_0`. Infinite when the ground level is empty and `p_i > 0`.
    pub fn ratio(&self, level: usize) -> f64 {
        let p = self.populations[level];
        if p == 0.0 {
            0.0
        } else {
            p / self.populations[0]
        }
    }

    /// Index of the lowest occupied excited level above `level`.
    pub fn next_occupied_above(&self, level: usize) -> Option<usize> {
        (level + 1..self.populations.len()).find(|&i| self.populations[i] > 0.0)
    }

    /// Index of the lowest occupied excited level.
    pub fn lowest_occupied_excited(&self) -> Option<usize> {
        self.next_occupied_above(0)
    }

    pub(crate) fn require_len(&self, expected: usize, what: &'static str) -> Result<()> {
        if self.populations.len() != expected {
            return Err(Error::LengthMismatch {
                what,
                expected,
                got: self.populations.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn require_ground(&self, which: &'static str) -> Result<()> {
        if self.populations[0] > 0.0 {
            Ok(())
        } else {
            Err(Error::ZeroGroundPopulation { which })
        }
    }
}

impl TryFrom<Vec<f64>> for PopulationVector {
    type Error = Error;

    fn try_from(populations: Vec<f64>) -> Result<Self> {
        Self::new(populations)
    }
}

impl From<PopulationVector> for Vec<f64> {
    fn from(p: PopulationVector) -> Self {
        p.populations
    }
}

/// Which family a [`DistanceFunction`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceKind {
    /// `f(E_0) = 0`, `f(E) = 1` otherwise.
    Infidelity,
    /// `f(E) = E`.
    AverageEnergy,
    Custom,
}

/// Level-wise weights `f(E_i)` of a distance-like observable `D_f = Σ p_i f(E_i)`.
///
/// Weights are nondecreasing in the level index, vanish on the ground level and
/// are strictly positive on the first excited level, so `D_f` is zero exactly on
/// the ground state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceFunction {
    kind: DistanceKind,
    weights: Vec<f64>,
}

impl DistanceFunction {
    pub fn infidelity(spectrum: &EnergySpectrum) -> Self {
        let mut weights = vec![1.0; spectrum.level_count()];
        weights[0] = 0.0;
        Self {
            kind: DistanceKind::Infidelity,
            weights,
        }
    }

    pub fn average_energy(spectrum: &EnergySpectrum) -> Self {
        Self {
            kind: DistanceKind::AverageEnergy,
            weights: spectrum.energies().to_vec(),
        }
    }

    pub fn custom(spectrum: &EnergySpectrum, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != spectrum.level_count() {
            return Err(Error::LengthMismatch {
                what: "distance weights",
                expected: spectrum.level_count(),
                got: weights.len(),
            });
        }
        check_finite("distance weights", &weights)?;
        if weights[0] != 0.0 {
            return Err(Error::InvalidWeights(format!(
                "f(E_0) must be 0, got {}",
                weights[0]
            )));
        }
        if weights[1] <= 0.0 {
            return Err(Error::InvalidWeights(format!(
                "f(E_1) must be positive, got {}",
                weights[1]
            )));
        }
        if let Some(i) = weights.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidWeights(format!(
                "weights must be nondecreasing, f(E_{}) = {} > f(E_{}) = {}",
                i,
                weights[i],
                i + 1,
                weights[i + 1]
            )));
        }
        Ok(Self {
            kind: DistanceKind::Custom,
            weights,
        })
    }

    /// Builds a distance of the given kind; `custom_weights` is only read for
    /// [`DistanceKind::Custom`].
    pub fn make(
        spectrum: &EnergySpectrum,
        kind: DistanceKind,
        custom_weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        match kind {
            DistanceKind::Infidelity => Ok(Self::infidelity(spectrum)),
            DistanceKind::AverageEnergy => Ok(Self::average_energy(spectrum)),
            DistanceKind::Custom => {
                let weights = custom_weights.ok_or(Error::InvalidWeights(
                    "custom distance requires weights".into(),
                ))?;
                Self::custom(spectrum, weights)
            }
        }
    }

    pub fn kind(&self) -> DistanceKind {
        self.kind
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, level: usize) -> f64 {
        self.weights[level]
    }

    pub fn level_count(&self) -> usize {
        self.weights.len()
    }

    /// `Σ p_i f(E_i)`.
    pub fn evaluate(&self, state: &PopulationVector) -> Result<f64> {
        state.require_len(self.weights.len(), "population vector")?;
        Ok(self.evaluate_slice(state.as_slice()))
    }

    pub(crate) fn evaluate_slice(&self, populations: &[f64]) -> f64 {
        populations
            .iter()
            .zip(&self.weights)
            .map(|(p, f)| p * f)
            .sum()
    }
}

/// `1e-9 × max|E|` over the raw energies.
pub fn default_merge_tolerance(raw_energies: &[f64]) -> f64 {
    let scale = raw_energies.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    (DEFAULT_RELATIVE_MERGE_TOLERANCE * scale).max(f64::MIN_POSITIVE)
}

/// Sorts raw levels, merges those closer than `merge_tolerance` to their
/// neighbour (summing populations, averaging energies), shifts the ground
/// level to zero and renormalizes.
///
/// The output is a fixed point: canonicalizing it again returns identical bits.
pub fn canonicalize_spectrum(
    raw_energies: &[f64],
    raw_populations: &[f64],
    merge_tolerance: f64,
) -> Result<(EnergySpectrum, PopulationVector)> {
    if raw_energies.is_empty() || raw_populations.is_empty() {
        return Err(Error::Empty);
    }
    if raw_energies.len() != raw_populations.len() {
        return Err(Error::LengthMismatch {
            what: "populations",
            expected: raw_energies.len(),
            got: raw_populations.len(),
        });
    }
    if raw_energies.len() < 2 {
        return Err(Error::TooFewLevels(raw_energies.len()));
    }
    if !(merge_tolerance > 0.0 && merge_tolerance.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "merge_tolerance",
            reason: format!("must be positive and finite, got {merge_tolerance}"),
        });
    }
    check_finite("energies", raw_energies)?;
    check_populations(raw_populations)?;

    let mut order: Vec<usize> = (0..raw_energies.len()).collect();
    order.sort_by(|&a, &b| raw_energies[a].total_cmp(&raw_energies[b]));

    // (energy sum, member count, population sum, last energy)
    let mut groups: Vec<(f64, usize, f64, f64)> = Vec::new();
    for &i in &order {
        let (e, p) = (raw_energies[i], raw_populations[i]);
        match groups.last_mut() {
            Some(g) if e - g.3 <= merge_tolerance => {
                g.0 += e;
                g.1 += 1;
                g.2 += p;
                g.3 = e;
            }
            _ => groups.push((e, 1, p, e)),
        }
    }
    if groups.len() < 2 {
        return Err(Error::TooFewLevels(groups.len()));
    }

    let means: Vec<f64> = groups.iter().map(|g| g.0 / g.1 as f64).collect();
    let ground = means[0];
    let energies: Vec<f64> = means.iter().map(|e| e - ground).collect();

    let mut populations: Vec<f64> = groups
        .iter()
        .map(|g| if g.2 < POPULATION_FLOOR { 0.0 } else { g.2 })
        .collect();
    let total: f64 = populations.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroPopulation);
    }
    // Leave already-normalized input untouched so the map is idempotent.
    if (total - 1.0).abs() > 8.0 * populations.len() as f64 * f64::EPSILON {
        for p in &mut populations {
            *p /= total;
        }
    }

    Ok((
        EnergySpectrum::new(energies)?,
        PopulationVector::from_raw(populations),
    ))
}

fn check_finite(what: &'static str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            what,
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

/// Validates nonnegative finite entries with a positive sum; returns the sum.
fn check_populations(populations: &[f64]) -> Result<f64> {
    if populations.is_empty() {
        return Err(Error::Empty);
    }
    check_finite("populations", populations)?;
    if let Some(index) = populations.iter().position(|p| *p < 0.0) {
        return Err(Error::NegativePopulation {
            index,
            value: populations[index],
        });
    }
    let sum: f64 = populations.iter().sum();
    if sum <= 0.0 {
        return Err(Error::ZeroPopulation);
    }
    Ok(sum)
}
