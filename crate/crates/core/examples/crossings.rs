//! All crossings of two curves, with and without a stopping threshold.

use qite_mpemba::cli::presets::{
    on_b_trajectory, point_a, three_level_spectrum, BACK_TO_C, BACK_TO_C_PRIME,
};
use qite_mpemba::{find_crossings, DistanceFunction};

fn main() -> qite_mpemba::Result<()> {
    let spectrum = three_level_spectrum();
    let df = DistanceFunction::infidelity(&spectrum);
    let cold = point_a();
    for (name, back) in [("C", BACK_TO_C), ("C'", BACK_TO_C_PRIME)] {
        let hot = on_b_trajectory(back);
        let r = find_crossings(&hot, &cold, &spectrum, &df, 15.0, Some(0.05))?;
        println!("{name} vs A:");
        for c in &r.crossings {
            println!("  crossing at {:.4} (D = {:.4})", c.tau, c.value);
        }
        if let Some(t) = r.truncated_at {
            println!("  threshold reached at {t:.4}");
        }
        for c in &r.past_threshold {
            println!("  too late: {:.4} (D = {:.4})", c.tau, c.value);
        }
    }
    Ok(())
}
