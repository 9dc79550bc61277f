//! Closed-form crossing estimate against the exact crossing.

use qite_mpemba::cli::presets::{five_level_spectrum, EMPTY_LEVEL_CASE, SHARED_LEVEL_CASE};
use qite_mpemba::{estimate_crossing, find_crossings, DistanceFunction, PopulationVector};

fn main() -> qite_mpemba::Result<()> {
    let spectrum = five_level_spectrum();
    let df = DistanceFunction::average_energy(&spectrum);
    for (hot, cold) in [SHARED_LEVEL_CASE, EMPTY_LEVEL_CASE] {
        let hot = PopulationVector::new(hot.to_vec())?;
        let cold = PopulationVector::new(cold.to_vec())?;
        let est = estimate_crossing(&hot, &cold, &spectrum)?;
        let exact = find_crossings(&hot, &cold, &spectrum, &df, 30.0, None)?;
        let t = exact.crossings.last().map_or(f64::NAN, |c| c.tau);
        println!(
            "{:?}: estimate {:.4}, exact {t:.4}, error {:.2}%",
            est.case,
            est.tau,
            100.0 * (est.tau - t).abs() / t
        );
    }
    Ok(())
}
