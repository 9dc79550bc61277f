//! Long-time verdict from the population ratios, for two distance functions.

use qite_mpemba::{check_mpemba, DistanceFunction, EnergySpectrum, PopulationVector};

fn main() -> qite_mpemba::Result<()> {
    let spectrum = EnergySpectrum::new(vec![0.0, 0.15, 0.4, 0.65, 0.8])?;
    let hot = PopulationVector::new(vec![0.05, 0.005, 0.8, 0.05, 0.095])?;
    let cold = PopulationVector::new(vec![0.3, 0.45, 0.05, 0.1, 0.1])?;

    for df in [
        DistanceFunction::average_energy(&spectrum),
        DistanceFunction::infidelity(&spectrum),
    ] {
        let v = check_mpemba(&hot, &cold, &spectrum, &df)?;
        println!(
            "{:?}: occurs={} level={} r_hot={:.4} r_cold={:.4}",
            df.kind(),
            v.occurs,
            v.deciding_level,
            v.ratio_hot,
            v.ratio_cold
        );
    }
    Ok(())
}
