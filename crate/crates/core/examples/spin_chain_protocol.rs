//! Pre-evolution on an XYZ chain turns a tilted state into a hotter one that
//! relaxes faster.

use qite_mpemba::cli::presets::chain_protocol_section;
use qite_mpemba::dynamics::mean_energy;
use qite_mpemba::evolve;
use qite_mpemba::spin_chain::run_protocol;

fn main() -> qite_mpemba::Result<()> {
    let section = chain_protocol_section();
    let run = run_protocol(&section.target(), section.gamma0)?;
    println!(
        "L={} levels={} ground energy {:.6}",
        section.sites,
        run.spectrum.level_count(),
        run.system.ground_energy()
    );
    println!(
        "p1/p0: tilted {:.4}, pre-evolved {:.4}",
        run.cold.ratio(1),
        run.hot.ratio(1)
    );
    println!("{:>6} {:>10} {:>10}", "tau", "tilted", "pre-evolved");
    for tau in [0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0] {
        let c = mean_energy(&evolve(&run.cold, &run.spectrum, tau)?, &run.spectrum)?;
        let h = mean_energy(&evolve(&run.hot, &run.spectrum, tau)?, &run.spectrum)?;
        println!("{tau:>6.2} {c:>10.5} {h:>10.5}");
    }
    Ok(())
}
