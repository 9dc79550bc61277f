//! Randomized and numerical checks shared by the acceptance report and the
//! per-topic suites. Each check returns a [`Check`] instead of panicking so the
//! acceptance report can print every line before failing.

#![allow(dead_code)]

use qite_mpemba::collinear::CollinearFamily;
use qite_mpemba::dynamics::{population_derivative, DISTANCE_FLOOR};
use qite_mpemba::spin_chain::{
    build_hamiltonian, default_chain_merge_tolerance, imaginary_propagate, populations_of,
    tilted_state, Propagation, SpinChainConfig,
};
use qite_mpemba::{
    check_mpemba, distance, evolve, evolved_lambda, find_crossings, general_certificate,
    infidelity_certificate, DistanceFunction, EnergySpectrum, PopulationVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const INSTANCES: usize = 10_000;
pub const SEED: u64 = 0x51_7E_0C_A7;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub instances: usize,
    pub failures: usize,
    /// Largest observed error, in the units of the tolerance.
    pub worst: f64,
    pub tolerance: f64,
    pub first_failure: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.instances > 0
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {} instances, {} failures, worst {:.3e} (tol {:.1e}){}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.instances,
            self.failures,
            self.worst,
            self.tolerance,
            self.first_failure
                .as_ref()
                .map_or(String::new(), |f| format!("; first failure: {f}"))
        )
    }
}

/// Outcome of one instance: `Ok(err)` with the observed error, `Err(msg)` on a
/// violated property, or `None` when the draw does not meet the preconditions.
type Trial = Option<std::result::Result<f64, String>>;

/// Runs `trial` on independent per-instance streams until `instances`
/// admissible draws were seen.
fn run<F>(name: &'static str, tolerance: f64, salt: u64, trial: F) -> Check
where
    F: Fn(&mut ChaCha8Rng) -> Trial + Sync,
{
    // Fixed-size batches keep the admitted set independent of thread timing.
    const BATCH: u64 = 4096;
    let mut outcomes: Vec<std::result::Result<f64, String>> = Vec::with_capacity(INSTANCES);
    let mut start = 0;
    while outcomes.len() < INSTANCES {
        let batch: Vec<Trial> = (start..start + BATCH)
            .into_par_iter()
            .map(|i| {
                trial(&mut ChaCha8Rng::seed_from_u64(
                    SEED ^ salt.rotate_left(32) ^ i,
                ))
            })
            .collect();
        outcomes.extend(batch.into_iter().flatten());
        start += BATCH;
        assert!(start < 10_000 * BATCH, "{name}: too few admissible draws");
    }
    outcomes.truncate(INSTANCES);
    let mut check = Check {
        name,
        instances: outcomes.len(),
        failures: 0,
        worst: 0.0,
        tolerance,
        first_failure: None,
    };
    for o in outcomes {
        match o {
            Ok(err) => check.worst = check.worst.max(err),
            Err(msg) => {
                check.failures += 1;
                check.first_failure.get_or_insert(msg);
            }
        }
    }
    check
}

pub fn random_spectrum(rng: &mut ChaCha8Rng, n: usize) -> EnergySpectrum {
    let mut e = vec![0.0];
    for _ in 1..n {
        let last = *e.last().unwrap();
        e.push(last + rng.random_range(0.05..1.0));
    }
    EnergySpectrum::new(e).unwrap()
}

pub fn random_populations(rng: &mut ChaCha8Rng, n: usize) -> PopulationVector {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    PopulationVector::from_weights(w).unwrap()
}

/// Nondecreasing weights with `f(E_0) = 0` and a strictly positive first step.
pub fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut f = vec![0.0];
    for _ in 1..n {
        let last = *f.last().unwrap();
        f.push(last + rng.random_range(0.01..1.0));
    }
    f
}

fn levels(rng: &mut ChaCha8Rng) -> usize {
    rng.random_range(3..=5)
}

fn within(err: f64, tol: f64, what: impl FnOnce() -> String) -> std::result::Result<f64, String> {
    if err <= tol {
        Ok(err)
    } else {
        Err(format!("{} (error {err:.3e})", what()))
    }
}

/// `evolve(evolve(p, t1), t2) = evolve(p, t1 + t2)` componentwise.
pub fn semigroup() -> Check {
    run("semigroup", 1e-12, 1, |rng| {
        let n = levels(rng);
        let (s, p) = (random_spectrum(rng, n), random_populations(rng, n));
        let (t1, t2) = (rng.random_range(0.0..5.0), rng.random_range(0.0..5.0));
        let two = evolve(&evolve(&p, &s, t1).unwrap(), &s, t2).unwrap();
        let one = evolve(&p, &s, t1 + t2).unwrap();
        let err = (0..n)
            .map(|i| (two.get(i) - one.get(i)).abs())
            .fold(0.0, f64::max);
        Some(within(err, 1e-12, || {
            format!("p={:?} t1={t1} t2={t2}", p.as_slice())
        }))
    })
}

/// `p_i(τ)/p_0(τ) = (p_i/p_0) e^{-2E_iτ}`, relative.
pub fn ratio_law() -> Check {
    run("ratio law", 1e-10, 2, |rng| {
        let n = levels(rng);
        let (s, p) = (random_spectrum(rng, n), random_populations(rng, n));
        let t = rng.random_range(0.0..5.0);
        let q = evolve(&p, &s, t).unwrap();
        let err = (1..n)
            .map(|i| {
                let expect = p.ratio(i) * (-2.0 * s.energy(i) * t).exp();
                (q.ratio(i) - expect).abs() / expect
            })
            .fold(0.0, f64::max);
        Some(within(err, 1e-10, || format!("p={:?} t={t}", p.as_slice())))
    })
}

/// `D_f(τ)` strictly decreases for infidelity, average energy and a random
/// nondecreasing `f`, sampled until it drops below `1e-6`.
pub fn monotonicity() -> Check {
    run("distance monotonicity", 0.0, 3, |rng| {
        let n = levels(rng);
        let (s, p) = (random_spectrum(rng, n), random_populations(rng, n));
        let dfs = [
            DistanceFunction::infidelity(&s),
            DistanceFunction::average_energy(&s),
            DistanceFunction::custom(&s, random_weights(rng, n)).unwrap(),
        ];
        for df in &dfs {
            let mut prev = distance(&p, df).unwrap();
            for k in 1..=400 {
                let t = 0.05 * k as f64;
                let d = distance(&evolve(&p, &s, t).unwrap(), df).unwrap();
                if d >= prev {
                    return Some(Err(format!(
                        "{:?} not decreasing at tau {t}: {prev} -> {d}",
                        df.kind()
                    )));
                }
                if d < 1e-6 {
                    break;
                }
                prev = d;
            }
        }
        Some(Ok(0.0))
    })
}

/// Analytic `dp/dτ` against a central difference with `h = 1e-5`.
pub fn derivative() -> Check {
    run("derivative vs finite difference", 1e-6, 4, |rng| {
        let n = levels(rng);
        let (s, p) = (random_spectrum(rng, n), random_populations(rng, n));
        let t = rng.random_range(0.0..5.0);
        let h = 1e-5;
        let at = evolve(&p, &s, t).unwrap();
        let analytic = population_derivative(&at, &s).unwrap();
        let (lo, hi) = (
            evolve(&p, &s, (t - h).max(0.0)).unwrap(),
            evolve(&p, &s, t + h).unwrap(),
        );
        let width = t + h - (t - h).max(0.0);
        let err = (0..n)
            .map(|i| ((hi.get(i) - lo.get(i)) / width - analytic[i]).abs())
            .fold(0.0, f64::max);
        Some(within(err, 1e-6, || format!("p={:?} t={t}", p.as_slice())))
    })
}

/// Sign of `D_h - D_c` at large `τ`, evaluated exactly as
/// `Σ_{i,k} f_i (r^h_i r^c_k - r^c_i r^h_k) e^{-2(E_i + E_k - E_j)τ}`, which is
/// `D_h - D_c` times a positive factor. Every term that survives has
/// `E_i + E_k ≥ E_j`, so nothing overflows.
fn asymptotic_sign(
    hot: &PopulationVector,
    cold: &PopulationVector,
    s: &EnergySpectrum,
    f: &[f64],
    j: usize,
) -> (f64, f64) {
    let n = s.level_count();
    let coeff =
        |i: usize, k: usize| f[i] * (hot.ratio(i) * cold.ratio(k) - cold.ratio(i) * hot.ratio(k));
    let lead = coeff(j, 0).abs();
    let mut tail = 0.0;
    let mut gap = f64::INFINITY;
    for i in 0..n {
        for k in 0..n {
            let c = coeff(i, k);
            if c == 0.0 || (i == j && k == 0) {
                continue;
            }
            tail += c.abs();
            let excess = s.energy(i) + s.energy(k) - s.energy(j);
            if excess > 0.0 {
                gap = gap.min(excess);
            }
        }
    }
    // Large enough that the leading term beats the rest by 10^3.
    let tau = ((1e3 * tail / lead).ln() / (2.0 * gap)).max(0.0);
    let value: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |k| (i, k)))
        .map(|(i, k)| coeff(i, k) * (-2.0 * (s.energy(i) + s.energy(k) - s.energy(j)) * tau).exp())
        .sum();
    (value, tau)
}

/// The long-time order of the curves matches `check_mpemba` for both
/// infidelity and average energy.
pub fn long_time_verdict() -> Check {
    run("long-time sign agreement", 0.0, 5, |rng| {
        let n = levels(rng);
        let s = random_spectrum(rng, n);
        let (a, b) = (random_populations(rng, n), random_populations(rng, n));
        let inf = DistanceFunction::infidelity(&s);
        let en = DistanceFunction::average_energy(&s);
        let hotter = |x: &PopulationVector, y: &PopulationVector| {
            distance(x, &inf).unwrap() > distance(y, &inf).unwrap()
                && distance(x, &en).unwrap() > distance(y, &en).unwrap()
        };
        let (hot, cold) = if hotter(&a, &b) {
            (a, b)
        } else if hotter(&b, &a) {
            (b, a)
        } else {
            return None;
        };
        let mut verdicts = Vec::new();
        for df in [&inf, &en] {
            let v = check_mpemba(&hot, &cold, &s, df).unwrap();
            let (value, tau) = asymptotic_sign(&hot, &cold, &s, df.weights(), v.deciding_level);
            if (value < 0.0) != v.occurs {
                return Some(Err(format!(
                    "{:?}: verdict {} but D_h - D_c has sign {value:e} at tau {tau}",
                    df.kind(),
                    v.occurs
                )));
            }
            verdicts.push(v.occurs);
        }
        if verdicts[0] != verdicts[1] {
            return Some(Err("verdict depends on the distance function".into()));
        }
        Some(Ok(0.0))
    })
}

fn hot_cold_for(
    rng: &mut ChaCha8Rng,
    n: usize,
    df: &DistanceFunction,
) -> Option<(PopulationVector, PopulationVector)> {
    let (a, b) = (random_populations(rng, n), random_populations(rng, n));
    let (da, db) = (distance(&a, df).unwrap(), distance(&b, df).unwrap());
    if da > db {
        Some((a, b))
    } else if db > da {
        Some((b, a))
    } else {
        None
    }
}

/// Whenever the infidelity certificate applies and `ε` is below its bound,
/// there is a crossing above `ε` no later than `τ̃*`.
pub fn certificate_soundness() -> Check {
    run("finite-time certificate soundness", 1e-9, 6, |rng| {
        let n = levels(rng);
        let s = random_spectrum(rng, n);
        let df = DistanceFunction::infidelity(&s);
        let (hot, cold) = hot_cold_for(rng, n, &df)?;
        let cert = infidelity_certificate(&hot, &cold, &s).unwrap();
        if !cert.applicable {
            return None;
        }
        let (bound, tstar) = (cert.epsilon_bound.unwrap(), cert.tau_tilde_star.unwrap());
        let eps = bound * rng.random_range(0.01..0.99);
        // No representable threshold lies below such a bound.
        if eps < DISTANCE_FLOOR {
            return None;
        }
        let report = find_crossings(&hot, &cold, &s, &df, 1.5 * tstar + 1.0, Some(eps)).unwrap();
        let describe = || {
            format!(
                "hot={:?} cold={:?} E={:?}",
                hot.as_slice(),
                cold.as_slice(),
                s.energies()
            )
        };
        let Some(c) = report.first() else {
            return Some(Err(format!("no crossing above {eps}: {}", describe())));
        };
        if c.value <= eps {
            return Some(Err(format!(
                "crossing value {} <= {eps}: {}",
                c.value,
                describe()
            )));
        }
        let late = (c.tau - tstar).max(0.0);
        Some(within(late, 1e-9, || {
            format!("crossing at {} after {tstar}: {}", c.tau, describe())
        }))
    })
}

/// Same guarantee for the general bound with average energy, using its
/// reported crossing-time bound.
pub fn general_certificate_soundness() -> Check {
    run("general bound soundness", 1e-9, 7, |rng| {
        let n = levels(rng);
        let s = random_spectrum(rng, n);
        let df = DistanceFunction::average_energy(&s);
        let (hot, cold) = hot_cold_for(rng, n, &df)?;
        let cert = general_certificate(&hot, &cold, &s, &df, None).unwrap();
        if !cert.applicable {
            return None;
        }
        let (bound, tstar) = (cert.epsilon_bound.unwrap(), cert.tau_tilde_star.unwrap());
        let eps = bound * rng.random_range(0.01..0.99);
        // No representable threshold lies below such a bound.
        if eps < DISTANCE_FLOOR {
            return None;
        }
        let report = find_crossings(&hot, &cold, &s, &df, 1.5 * tstar + 1.0, Some(eps)).unwrap();
        let describe = || {
            format!(
                "hot={:?} cold={:?} E={:?}",
                hot.as_slice(),
                cold.as_slice(),
                s.energies()
            )
        };
        let Some(c) = report.first() else {
            return Some(Err(format!("no crossing above {eps}: {}", describe())));
        };
        if c.value <= eps {
            return Some(Err(format!(
                "crossing value {} <= {eps}: {}",
                c.value,
                describe()
            )));
        }
        let late = (c.tau - tstar).max(0.0);
        Some(within(late, 1e-9, || {
            format!("crossing at {} after {tstar}: {}", c.tau, describe())
        }))
    })
}

/// Hot on levels 0..=2 only, cold on 0..=1 only: the bound is the crossing
/// distance itself.
pub fn worst_case_tightness() -> Check {
    run("worst-case tightness", 1e-9, 8, |rng| {
        let n = levels(rng);
        let s = random_spectrum(rng, n);
        let mut h = vec![0.0; n];
        let mut c = vec![0.0; n];
        for x in &mut h[..3] {
            *x = rng.random_range(0.01..1.0);
        }
        for x in &mut c[..2] {
            *x = rng.random_range(0.01..1.0);
        }
        let (hot, cold) = (
            PopulationVector::from_weights(h).unwrap(),
            PopulationVector::from_weights(c).unwrap(),
        );
        let df = DistanceFunction::infidelity(&s);
        if distance(&hot, &df).unwrap() <= distance(&cold, &df).unwrap() {
            return None;
        }
        let cert = infidelity_certificate(&hot, &cold, &s).unwrap();
        if !cert.applicable {
            return None;
        }
        // Crossings below the distance floor are not resolved.
        if cert.epsilon_bound.unwrap() < DISTANCE_FLOOR {
            return None;
        }
        let tstar = cert.tau_tilde_star.unwrap();
        let report = find_crossings(&hot, &cold, &s, &df, 1.5 * tstar + 1.0, None).unwrap();
        let Some(x) = report.first() else {
            return Some(Err(format!(
                "no crossing: hot={:?} cold={:?} E={:?} cert={cert:?}",
                hot.as_slice(),
                cold.as_slice(),
                s.energies()
            )));
        };
        let err = (x.value - cert.epsilon_bound.unwrap()).abs();
        Some(within(err, 1e-9, || {
            format!("hot={:?} cold={:?}", hot.as_slice(), cold.as_slice())
        }))
    })
}

/// Evolved members stay on the line through the evolved anchors, at `λ'(τ)`.
pub fn collinearity() -> Check {
    run("collinearity preservation", 1e-10, 9, |rng| {
        let n = levels(rng);
        let s = random_spectrum(rng, n);
        let (a, b) = (random_populations(rng, n), random_populations(rng, n));
        let probe = CollinearFamily::new(a.clone(), b.clone(), vec![]).unwrap();
        let (lo, hi) = probe.admissible_range();
        let lambda = rng.random_range(lo.max(-5.0)..hi.min(5.0));
        let family = CollinearFamily::new(a.clone(), b.clone(), vec![lambda]).unwrap();
        let Ok(member) = family.member(lambda) else {
            return None;
        };
        let t = rng.random_range(0.0..5.0);
        let lp = evolved_lambda(&family, lambda, &s, t).unwrap();
        let (pa, pb, pm) = (
            evolve(&a, &s, t).unwrap(),
            evolve(&b, &s, t).unwrap(),
            evolve(&member, &s, t).unwrap(),
        );
        let err = (0..n)
            .map(|i| (lp * pb.get(i) + (1.0 - lp) * pa.get(i) - pm.get(i)).abs())
            .fold(0.0, f64::max);
        Some(within(err, 1e-10, || {
            format!(
                "a={:?} b={:?} lambda={lambda} t={t}",
                a.as_slice(),
                b.as_slice()
            )
        }))
    })
}

/// The optimal `a` of the general bound against a nested grid scan of
/// `|τ_1(a) - τ_2(a)|`.
pub fn optimal_a_oracle() -> Check {
    run("optimal a vs grid scan", 1e-6, 10, |rng| {
        let n = levels(rng);
        let s = random_spectrum(rng, n);
        let df = DistanceFunction::custom(&s, random_weights(rng, n)).unwrap();
        let (hot, cold) = hot_cold_for(rng, n, &df)?;
        let cert = general_certificate(&hot, &cold, &s, &df, None).unwrap();
        if !cert.applicable {
            return None;
        }
        let (a_star, a_max) = (cert.a.unwrap(), cert.a_max.unwrap());
        let gap = |a: f64| {
            let c = general_certificate(&hot, &cold, &s, &df, Some(a)).unwrap();
            let [t1, t2] = c.branch_times.unwrap();
            (t1 - t2).abs()
        };
        let (mut lo, mut hi) = (0.0, a_max);
        const POINTS: usize = 64;
        while hi - lo > 1e-9 * (1.0 + hi) {
            let step = (hi - lo) / POINTS as f64;
            let best = (1..POINTS)
                .map(|k| lo + step * k as f64)
                .min_by(|x, y| gap(*x).total_cmp(&gap(*y)))
                .unwrap();
            lo = (best - step).max(lo);
            hi = (best + step).min(hi);
        }
        let scan = 0.5 * (lo + hi);
        Some(within((scan - a_star).abs(), 1e-6, || {
            format!("scan {scan} vs a* {a_star} (a_max {a_max})")
        }))
    })
}

/// Every check in the randomized suite.
pub fn all_properties() -> Vec<Check> {
    vec![
        semigroup(),
        ratio_law(),
        monotonicity(),
        derivative(),
        long_time_verdict(),
        certificate_soundness(),
        worst_case_tightness(),
        collinearity(),
        optimal_a_oracle(),
    ]
}

pub fn chain_config(sites: usize, gamma: f64, mu: f64) -> SpinChainConfig {
    SpinChainConfig {
        sites,
        gamma,
        mu,
        theta: 0.1 * std::f64::consts::PI,
        tau_pre: 0.2,
    }
}

/// Worst `‖Hv - λv‖ / ‖H‖` over chains with 2 to 10 sites.
pub fn chain_residuals() -> (bool, f64) {
    let worst = (2..=10)
        .into_par_iter()
        .flat_map_iter(|l| {
            [(1.0, 0.3), (0.01, 0.3), (0.5, -0.7)]
                .into_iter()
                .map(move |(g, m)| {
                    let sys = build_hamiltonian(&chain_config(l, g, m), None).unwrap();
                    sys.max_residual() / sys.norm()
                })
        })
        .reduce(|| 0.0, f64::max);
    (worst < 1e-9, worst)
}

/// Forward then backward propagation for the same duration returns the
/// starting state.
pub fn chain_round_trip() -> (bool, f64) {
    let cfg = chain_config(8, 1.0, 0.3);
    let sys = build_hamiltonian(&cfg, None).unwrap();
    let psi = tilted_state(&cfg).unwrap();
    let mut worst: f64 = 0.0;
    for t in [0.05, 0.2, 0.5, 1.0] {
        let f = imaginary_propagate(&psi, &sys, t, Propagation::Forward).unwrap();
        let back = imaginary_propagate(&f, &sys, t, Propagation::Backward).unwrap();
        let err = psi
            .amplitudes()
            .iter()
            .zip(back.amplitudes())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(err);
    }
    (worst < 1e-10, worst)
}

/// Populations of a forward-propagated state against population evolution for
/// half the duration, at 20 times.
pub fn chain_bridge() -> (bool, f64) {
    let cfg = chain_config(8, 1.0, 0.3);
    let sys = build_hamiltonian(&cfg, None).unwrap();
    let tol = default_chain_merge_tolerance(&sys);
    let psi = tilted_state(&cfg).unwrap();
    let (spectrum, p) = populations_of(&psi, &sys, tol).unwrap();
    let mut worst: f64 = 0.0;
    for k in 1..=20 {
        let t = 0.15 * k as f64;
        let direct = imaginary_propagate(&psi, &sys, t, Propagation::Forward).unwrap();
        let (s2, q) = populations_of(&direct, &sys, tol).unwrap();
        assert_eq!(s2.level_count(), spectrum.level_count());
        let via = evolve(&p, &spectrum, t / 2.0).unwrap();
        let err = (0..q.len())
            .map(|i| (q.get(i) - via.get(i)).abs())
            .fold(0.0, f64::max);
        worst = worst.max(err);
    }
    (worst < 1e-8, worst)
}

/// Worst deviation of the two-site spectrum from `{-3.4, -0.6, -0.6, 4.6}`.
pub fn two_site_spectrum() -> (bool, f64) {
    let sys = build_hamiltonian(&chain_config(2, 1.0, 0.3), None).unwrap();
    let expect = [-3.4, -0.6, -0.6, 4.6];
    let worst = sys
        .eigenvalues()
        .iter()
        .zip(expect)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    (worst < 1e-12, worst)
}
