use serde::{Deserialize, Serialize};

use super::eigen::{symmetric_eigen, SymmetricEigen};
use crate::error::{Error, Result};

/// Largest chain the dense solver accepts.
pub const MAX_SITES: usize = 12;

/// Periodic XYZ chain `H = -Σ_j (X_j X_{j+1} + γ Y_j Y_{j+1} + μ Z_j Z_{j+1})`
/// plus the tilted initial state and pre-evolution time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinChainConfig {
    pub sites: usize,
    /// `Y Y` coupling.
    pub gamma: f64,
    /// `Z Z` coupling.
    pub mu: f64,
    /// Tilt angle of the product state, radians.
    pub theta: f64,
    /// Duration of each pre-evolution leg.
    #[serde(default)]
    pub tau_pre: f64,
}

impl SpinChainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_SITES).contains(&self.sites) {
            return Err(Error::InvalidChain(format!(
                "sites must be in 2..={MAX_SITES}, got {}",
                self.sites
            )));
        }
        for (name, v) in [
            ("gamma", self.gamma),
            ("mu", self.mu),
            ("theta", self.theta),
            ("tau_pre", self.tau_pre),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidChain(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        if self.tau_pre < 0.0 {
            return Err(Error::InvalidChain(format!(
                "tau_pre must be nonnegative, got {}",
                self.tau_pre
            )));
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        1 << self.sites
    }
}

/// `+1` for spin up (bit clear), `-1` for spin down.
#[inline]
fn spin(x: usize, site: usize) -> f64 {
    if x >> site & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Calls `visit(row, value)` for every nonzero of column `x` of `H`.
///
/// Per bond, `X X` and `Y Y` both flip the two spins; `Y Y` contributes
/// `-s_j s_k` because `Y|↑⟩ = i|↓⟩` and `Y|↓⟩ = -i|↑⟩`. `Z Z` is diagonal.
fn column_entries(sites: usize, gamma: f64, mu: f64, x: usize, mut visit: impl FnMut(usize, f64)) {
    let mut diag = 0.0;
    for j in 0..sites {
        let k = (j + 1) % sites;
        let sjk = spin(x, j) * spin(x, k);
        diag -= mu * sjk;
        let flip = -(1.0 - gamma * sjk);
        if flip != 0.0 {
            visit(x ^ (1 << j) ^ (1 << k), flip);
        }
    }
    visit(x, diag);
}

/// Dense XYZ Hamiltonian, row-major. Symmetric by construction.
pub fn hamiltonian_matrix(sites: usize, gamma: f64, mu: f64) -> Vec<f64> {
    let n = 1 << sites;
    let mut h = vec![0.0; n * n];
    for x in 0..n {
        column_entries(sites, gamma, mu, x, |y, v| h[y * n + x] += v);
    }
    h
}

/// `H v` without forming `H`.
pub fn apply_hamiltonian(sites: usize, gamma: f64, mu: f64, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for (x, &vx) in v.iter().enumerate() {
        if vx != 0.0 {
            column_entries(sites, gamma, mu, x, |y, h| out[y] += h * vx);
        }
    }
    out
}

/// A diagonalized chain Hamiltonian.
#[derive(Debug, Clone)]
pub struct SpinChainSystem {
    sites: usize,
    gamma: f64,
    mu: f64,
    hamiltonian: Vec<f64>,
    eigen: SymmetricEigen,
}

impl SpinChainSystem {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn dimension(&self) -> usize {
        1 << self.sites
    }

    /// Row-major dense matrix.
    pub fn hamiltonian(&self) -> &[f64] {
        &self.hamiltonian
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        self.eigen.values()
    }

    pub fn eigenvector(&self, k: usize) -> &[f64] {
        self.eigen.vector(k)
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigen.values()[0]
    }

    /// Spectral norm `max |λ|`.
    pub fn norm(&self) -> f64 {
        let v = self.eigen.values();
        v[0].abs().max(v[v.len() - 1].abs())
    }

    pub fn spectral_width(&self) -> f64 {
        let v = self.eigen.values();
        v[v.len() - 1] - v[0]
    }

    /// `H v` via bit operations.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        apply_hamiltonian(self.sites, self.gamma, self.mu, v)
    }

    /// `max_k ‖H v_k - λ_k v_k‖₂`.
    pub fn max_residual(&self) -> f64 {
        (0..self.dimension())
            .map(|k| {
                let v = self.eigenvector(k);
                let lambda = self.eigenvalues()[k];
                self.apply(v)
                    .iter()
                    .zip(v)
                    .map(|(hv, vi)| (hv - lambda * vi).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `max |⟨v_k, v_l⟩ - δ_kl|`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.dimension();
        let mut worst = 0.0_f64;
        for k in 0..n {
            for l in k..n {
                let dot: f64 = self
                    .eigenvector(k)
                    .iter()
                    .zip(self.eigenvector(l))
                    .map(|(a, b)| a * b)
                    .sum();
                let target = if k == l { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Coordinates of `v` in the eigenbasis.
    pub(crate) fn to_eigenbasis(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dimension())
            .map(|k| self.eigenvector(k).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub(crate) fn expand_eigenbasis(&self, c: &[f64]) -> Vec<f64> {
        let n = self.dimension();
        let mut out = vec![0.0; n];
        for (k, &ck) in c.iter().enumerate() {
            if ck != 0.0 {
                for (o, vk) in out.iter_mut().zip(self.eigenvector(k)) {
                    *o += ck * vk;
                }
            }
        }
        out
    }
}

/// Builds and diagonalizes the chain. `gamma_override` replaces `config.gamma`.
///
/// The decomposition is checked against `‖H v - λ v‖ < 1e-9 ‖H‖` before it is
/// returned.
pub fn build_hamiltonian(
    config: &SpinChainConfig,
    gamma_override: Option<f64>,
) -> Result<SpinChainSystem> {
    config.validate()?;
    let gamma = gamma_override.unwrap_or(config.gamma);
    if !gamma.is_finite() {
        return Err(Error::InvalidChain(format!(
            "gamma must be finite, got {gamma}"
        )));
    }
    let hamiltonian = hamiltonian_matrix(config.sites, gamma, config.mu);
    let eigen = symmetric_eigen(&hamiltonian, config.dimension())?;
    let system = SpinChainSystem {
        sites: config.sites,
        gamma,
        mu: config.mu,
        hamiltonian,
        eigen,
    };
    let residual = system.max_residual();
    let scale = system.norm().max(f64::MIN_POSITIVE);
    if residual >= 1e-9 * scale {
        return Err(Error::Eigensolver(format!(
            "eigen-residual {residual:e} exceeds 1e-9 ‖H‖ = {:e}",
            1e-9 * scale
        )));
    }
    Ok(system)
}
