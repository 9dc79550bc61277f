//! Relaxation of a three-level state under imaginary-time evolution.

use qite_mpemba::{distance, evolve, DistanceFunction, EnergySpectrum, PopulationVector};

fn main() -> qite_mpemba::Result<()> {
    let spectrum = EnergySpectrum::new(vec![0.0, 0.2, 0.3])?;
    let p = PopulationVector::new(vec![0.35, 0.45, 0.20])?;
    let df = DistanceFunction::average_energy(&spectrum);

    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "tau", "p0", "p1", "p2", "energy"
    );
    for tau in [0.0, 1.0, 2.0, 5.0, 10.0, 15.0] {
        let q = evolve(&p, &spectrum, tau)?;
        let s = q.as_slice();
        println!(
            "{tau:>6.1} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            s[0],
            s[1],
            s[2],
            distance(&q, &df)?
        );
    }
    Ok(())
}
