//! Imaginary-time relaxation of energy-level populations and the Mpemba effect.
//!
//! A state is reduced to its populations `p_i` over a nondegenerate spectrum
//! `0 = E_0 < E_1 < ...`; normalized imaginary-time evolution reweights them by
//! `e^{-2E_i τ}`. On top of that the crate provides:
//!
//! - occurrence tests and finite-time certificates for an initially hotter
//!   state overtaking a colder one ([`analysis`]),
//! - crossing detection and closed-form crossing-time estimates,
//! - collinear families of initial states ([`collinear`]),
//! - a periodic XYZ chain with exact diagonalization and a pre-evolution
//!   protocol for building hotter-but-faster states ([`spin_chain`]),
//! - a config-driven experiment runner ([`cli`]).
//!
//! ```
//! use qite_mpemba::{check_mpemba, DistanceFunction, EnergySpectrum, PopulationVector};
//!
//! let spectrum = EnergySpectrum::new(vec![0.0, 0.2, 0.3])?;
//! let hot = PopulationVector::new(vec![0.36, 0.16, 0.48])?;
//! let cold = PopulationVector::new(vec![0.35, 0.45, 0.20])?;
//! let df = DistanceFunction::average_energy(&spectrum);
//! assert!(check_mpemba(&hot, &cold, &spectrum, &df)?.occurs);
//! # Ok::<(), qite_mpemba::Error>(())
//! ```

pub mod analysis;
pub mod cli;
pub mod collinear;
pub mod dynamics;
pub mod error;
pub mod parallel;
pub mod roots;
pub mod spectrum;
pub mod spin_chain;

pub use analysis::{
    check_mpemba, estimate_crossing, find_crossings, general_certificate, infidelity_certificate,
    max_acceleration_time, Crossing, CrossingReport, FiniteTimeCertificate, MpembaVerdict,
};
pub use collinear::{evolved_lambda, simultaneous_crossing, CollinearFamily};
pub use dynamics::{
    distance, evolve, evolve_with, hitting_time, partition_function, population_derivative,
    sample_trajectory, Direction, GridSpec, Trajectory,
};
pub use error::{Error, Result};
pub use spectrum::{
    canonicalize_spectrum, default_merge_tolerance, DistanceFunction, DistanceKind, EnergySpectrum,
    PopulationVector,
};
