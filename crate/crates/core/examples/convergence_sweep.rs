//! Runs several Galerkin cutoffs against one shared reference flow and fits
//! the decay of the late-time errors against the first unresolved eigenvalue.
//!
//! Usage: `cargo run --release --example convergence_sweep [config.toml]`

use std::path::PathBuf;

use nsda::config::Config;
use nsda::sweep::convergence_sweep;

fn main() -> nsda::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference.toml"));
    let cfg = Config::load(&path)?;
    let report = convergence_sweep(
        &cfg.nudge_config()?,
        &cfg.sweep_cutoffs()?,
        &cfg.initial_truth()?,
        &cfg.sweep_options()?,
    )?;
    print!("{report}");
    if let Some(s) = report.slopes {
        println!(
            "postprocessing gains {:.2} in the L2 exponent and {:.2} in the H1 exponent",
            s.sgm_l2.slope - s.ppgm_l2.slope,
            s.sgm_h1.slope - s.ppgm_h1.slope
        );
    }
    Ok(())
}
