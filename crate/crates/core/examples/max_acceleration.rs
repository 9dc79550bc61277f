//! Head start of a state concentrated on the ground and top levels.

use qite_mpemba::{
    hitting_time, max_acceleration_time, DistanceFunction, EnergySpectrum, PopulationVector,
};

fn main() -> qite_mpemba::Result<()> {
    let spectrum = EnergySpectrum::new(vec![0.0, 0.2, 0.3])?;
    let df = DistanceFunction::average_energy(&spectrum);
    let cold = PopulationVector::new(vec![0.35, 0.45, 0.20])?;
    let hot = PopulationVector::new(vec![0.30, 0.0, 0.70])?;

    for eps in [1e-2, 1e-3, 1e-4, 1e-6] {
        let est = max_acceleration_time(&cold, &hot, &spectrum, &df, eps)?;
        let exact =
            hitting_time(&cold, &spectrum, &df, eps)? - hitting_time(&hot, &spectrum, &df, eps)?;
        println!(
            "eps {eps:e}: estimate {:.4}, exact {exact:.4}, error {:.2}%",
            est.delta_tau,
            100.0 * (est.delta_tau - exact).abs() / exact
        );
    }
    Ok(())
}
