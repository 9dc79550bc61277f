//! Members of a line of initial states reach the same average energy at once.

use qite_mpemba::cli::presets::{on_b_trajectory, point_a, three_level_spectrum, BACK_TO_B_PRIME};
use qite_mpemba::collinear::isochrone_sweep;
use qite_mpemba::{simultaneous_crossing, CollinearFamily, DistanceFunction};

fn main() -> qite_mpemba::Result<()> {
    let spectrum = three_level_spectrum();
    let df = DistanceFunction::average_energy(&spectrum);
    let family = CollinearFamily::new(
        point_a(),
        on_b_trajectory(BACK_TO_B_PRIME),
        vec![-0.5, 0.0, 0.5, 1.0, 1.5],
    )?;
    let (lo, hi) = family.admissible_range();
    println!("admissible lambda in [{lo:.3}, {hi:.3}]");

    let Some(c) = simultaneous_crossing(&family, &spectrum, &df, 15.0)? else {
        println!("no common crossing");
        return Ok(());
    };
    println!("common crossing at tau {:.4}, energy {:.4}", c.tau, c.value);
    for pt in isochrone_sweep(&family, &spectrum, &df, &[c.tau])? {
        println!("  lambda {:>5.2}: {:.12}", pt.lambda, pt.distance);
    }
    Ok(())
}
