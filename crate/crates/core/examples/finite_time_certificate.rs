//! Closed-form guarantee that the crossing happens above a stopping threshold.

use qite_mpemba::cli::presets::{on_b_trajectory, point_a, three_level_spectrum, BACK_TO_C};
use qite_mpemba::{find_crossings, general_certificate, infidelity_certificate, DistanceFunction};

fn main() -> qite_mpemba::Result<()> {
    let spectrum = three_level_spectrum();
    let (hot, cold) = (on_b_trajectory(BACK_TO_C), point_a());
    let epsilon = 0.05;

    let cert = infidelity_certificate(&hot, &cold, &spectrum)?;
    let bound = cert.epsilon_bound.unwrap_or(0.0);
    println!(
        "infidelity: bound {bound:.4}, crossing no later than {:.4}, certified at {epsilon}: {}",
        cert.tau_tilde_star.unwrap_or(f64::NAN),
        epsilon < bound
    );
    let df = DistanceFunction::infidelity(&spectrum);
    let report = find_crossings(&hot, &cold, &spectrum, &df, 15.0, Some(epsilon))?;
    if let Some(c) = report.first() {
        println!(
            "actual crossing at tau {:.4}, distance {:.4}",
            c.tau, c.value
        );
    }

    let energy = DistanceFunction::average_energy(&spectrum);
    let g = general_certificate(&hot, &cold, &spectrum, &energy, None)?;
    println!(
        "average energy: applicable={} bound {:?} at a = {:?}",
        g.applicable, g.epsilon_bound, g.a
    );
    Ok(())
}
