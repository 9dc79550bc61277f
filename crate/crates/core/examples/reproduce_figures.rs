//! Writes every preset into a directory (default `figures/`).

use std::path::PathBuf;

use qite_mpemba::cli::{write_preset, PRESETS};

fn main() {
    let dir: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "figures".into())
        .into();
    for name in PRESETS {
        match write_preset(name, &dir, None) {
            Ok(files) => {
                for f in files {
                    println!("{}", f.display());
                }
            }
            Err(e) => {
                eprintln!("{name}: {e}");
                std::process::exit(e.exit_code());
            }
        }
    }
}
