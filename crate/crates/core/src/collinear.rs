//! Families of initial states on one line of the probability simplex.
//!
//! Imaginary-time evolution maps a line of initial states onto a line of
//! evolved states: the member at affine coordinate `λ` evolves into the member
//! at `λ'(τ) = λ Z_B(τ) / Z_λ(τ)` of the evolved anchors. For average energy
//! this makes all members share one distance at a common time.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::Crossing;
use crate::dynamics::{distance_at, evolve_slice, fmt_num, GridSpec};
use crate::error::{Error, Result};
use crate::parallel::pool;
use crate::roots::golden_section_min;
use crate::spectrum::{DistanceFunction, EnergySpectrum, PopulationVector};

/// Spread below which the members count as coinciding.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-10;

/// Componentwise slack allowed when checking that a member stays in the simplex.
const SIMPLEX_SLACK: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct CollinearFamily {
    anchor_a: PopulationVector,
    anchor_b: PopulationVector,
    lambdas: Vec<f64>,
}

impl CollinearFamily {
    /// `λ = 0` is `anchor_a`, `λ = 1` is `anchor_b`. Members are checked when used.
    pub fn new(
        anchor_a: PopulationVector,
        anchor_b: PopulationVector,
        lambdas: Vec<f64>,
    ) -> Result<Self> {
        anchor_b.require_len(anchor_a.len(), "anchor_b")?;
        if anchor_a == anchor_b {
            return Err(Error::InvalidFamily("anchors coincide".into()));
        }
        if let Some(index) = lambdas.iter().position(|l| !l.is_finite()) {
            return Err(Error::NonFinite {
                what: "lambdas",
                index,
                value: lambdas[index],
            });
        }
        Ok(Self {
            anchor_a,
            anchor_b,
            lambdas,
        })
    }

    pub fn anchor_a(&self) -> &PopulationVector {
        &self.anchor_a
    }

    pub fn anchor_b(&self) -> &PopulationVector {
        &self.anchor_b
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// `λ p_B + (1 - λ) p_A`, if it lies in the simplex.
    pub fn member(&self, lambda: f64) -> Result<PopulationVector> {
        let mut p: Vec<f64> = self
            .anchor_a
            .as_slice()
            .iter()
            .zip(self.anchor_b.as_slice())
            .map(|(a, b)| lambda * b + (1.0 - lambda) * a)
            .collect();
        for (index, v) in p.iter_mut().enumerate() {
            if *v < 0.0 {
                if *v < -SIMPLEX_SLACK {
                    return Err(Error::InvalidMember {
                        lambda,
                        index,
                        value: *v,
                    });
                }
                *v = 0.0;
            }
        }
        if p[0] == 0.0 {
            return Err(Error::InvalidMember {
                lambda,
                index: 0,
                value: 0.0,
            });
        }
        PopulationVector::from_weights(p)
    }

    /// Closed range of `λ` for which every component is nonnegative.
    pub fn admissible_range(&self) -> (f64, f64) {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (a, b) in self
            .anchor_a
            .as_slice()
            .iter()
            .zip(self.anchor_b.as_slice())
        {
            let slope = b - a;
            if slope > 0.0 {
                lo = lo.max(-a / slope);
            } else if slope < 0.0 {
                hi = hi.min(-a / slope);
            }
        }
        (lo, hi)
    }

    fn validated_members(&self) -> Result<Vec<PopulationVector>> {
        self.lambdas.iter().map(|&l| self.member(l)).collect()
    }
}

/// `Σ p_i e^{-2(E_i - E_ref)τ}` with the reference chosen so no term overflows.
fn scaled_partition(p: &[f64], energies: &[f64], tau: f64) -> f64 {
    let e_ref = if tau >= 0.0 {
        0.0
    } else {
        energies[energies.len() - 1]
    };
    p.iter()
        .zip(energies)
        .map(|(pi, ei)| pi * (-2.0 * (ei - e_ref) * tau).exp())
        .sum()
}

/// Affine coordinate, on the line through the evolved anchors, of the evolved
/// member that started at `lambda`.
pub fn evolved_lambda(
    family: &CollinearFamily,
    lambda: f64,
    spectrum: &EnergySpectrum,
    tau: f64,
) -> Result<f64> {
    family
        .anchor_a
        .require_len(spectrum.level_count(), "anchor_a")?;
    family.member(lambda)?;
    let e = spectrum.energies();
    let za = scaled_partition(family.anchor_a.as_slice(), e, tau);
    let zb = scaled_partition(family.anchor_b.as_slice(), e, tau);
    Ok(lambda * zb / (lambda * zb + (1.0 - lambda) * za))
}

/// Earliest `τ ∈ (0, tau_max]` at which every member of the family has the same
/// distance, or `None` if the spread never drops below [`COINCIDENCE_TOLERANCE`].
///
/// Local minima of the spread `max D - min D` are bracketed on the default
/// geometric grid and refined by golden-section search.
pub fn simultaneous_crossing(
    family: &CollinearFamily,
    spectrum: &EnergySpectrum,
    df: &DistanceFunction,
    tau_max: f64,
) -> Result<Option<Crossing>> {
    family
        .anchor_a
        .require_len(spectrum.level_count(), "anchor_a")?;
    let members = family.validated_members()?;
    let mut distinct: Vec<&PopulationVector> = Vec::new();
    for m in &members {
        if !distinct.contains(&m) {
            distinct.push(m);
        }
    }
    if distinct.len() < 2 {
        return Err(Error::InvalidFamily(format!(
            "need at least 2 distinct members, got {}",
            distinct.len()
        )));
    }
    let e = spectrum.energies();
    let spread_and_mean = |t: f64| {
        let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for m in &distinct {
            let d = distance_at(m.as_slice(), e, df, t);
            lo = lo.min(d);
            hi = hi.max(d);
            sum += d;
        }
        (hi - lo, sum / distinct.len() as f64)
    };
    let spread = |t: f64| spread_and_mean(t).0;

    let taus = GridSpec::default().times(tau_max)?;
    let s: Vec<f64> = taus.iter().map(|&t| spread(t)).collect();
    for i in 1..taus.len() {
        let is_min = s[i] <= s[i - 1] && (i + 1 == taus.len() || s[i] <= s[i + 1]);
        if !is_min {
            continue;
        }
        let hi = if i + 1 < taus.len() {
            taus[i + 1]
        } else {
            taus[i]
        };
        let (t, v) = golden_section_min(spread, taus[i - 1], hi, 1e-13);
        if v < COINCIDENCE_TOLERANCE && t > 0.0 {
            let (_, mean) = spread_and_mean(t);
            return Ok(Some(Crossing {
                tau: t,
                value: mean,
            }));
        }
    }
    Ok(None)
}

/// One point of an isochrone sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsochronePoint {
    pub tau: f64,
    pub lambda: f64,
    pub populations: Vec<f64>,
    pub distance: f64,
}

/// Evolves every member of the family to every time in `taus`. Rows are
/// ordered by `tau`, then by `lambda` as listed in the family.
pub fn isochrone_sweep(
    family: &CollinearFamily,
    spectrum: &EnergySpectrum,
    df: &DistanceFunction,
    taus: &[f64],
) -> Result<Vec<IsochronePoint>> {
    family
        .anchor_a
        .require_len(spectrum.level_count(), "anchor_a")?;
    if let Some(&t) = taus.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::NegativeTime(t));
    }
    let members = family.validated_members()?;
    let e = spectrum.energies();
    let rows = pool().install(|| {
        taus.par_iter()
            .flat_map_iter(|&tau| {
                members
                    .iter()
                    .zip(&family.lambdas)
                    .map(move |(m, &lambda)| {
                        let p = evolve_slice(m.as_slice(), e, tau);
                        let distance = df.evaluate_slice(&p);
                        IsochronePoint {
                            tau,
                            lambda,
                            populations: p,
                            distance,
                        }
                    })
            })
            .collect()
    });
    Ok(rows)
}

/// CSV with header `tau,lambda,p_0,...,p_{n-1},distance`.
pub fn isochrone_csv(points: &[IsochronePoint]) -> String {
    let n = points.first().map_or(0, |p| p.populations.len());
    let mut out = String::from("tau,lambda");
    for i in 0..n {
        let _ = write!(out, ",p_{i}");
    }
    out.push_str(",distance\n");
    for pt in points {
        out.push_str(&fmt_num(pt.tau));
        out.push(',');
        out.push_str(&fmt_num(pt.lambda));
        for p in &pt.populations {
            out.push(',');
            out.push_str(&fmt_num(*p));
        }
        out.push(',');
        out.push_str(&fmt_num(pt.distance));
        out.push('\n');
    }
    out
}
