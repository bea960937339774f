//! Nudges a Galerkin model toward a reference flow observed on its lowest
//! Fourier modes and prints how fast the low-mode error collapses.
//!
//! Usage: `cargo run --release --example nudging_convergence [config.toml] [t_end]`

use std::path::PathBuf;

use nsda::config::Config;
use nsda::run::run_lockstep;
use nsda::series::ErrorRow;

fn main() -> nsda::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/reference.toml"));
    let cfg = Config::load(&path)?;
    let mut nudge = cfg.nudge_config()?;
    if let Some(t_end) = args.next() {
        nudge.t_end = t_end.parse().map_err(|_| nsda::Error::Config(format!("bad t_end {t_end:?}")))?;
    }
    nudge.sample_every = nudge.sample_every.max((2.0 / nudge.dt).round() as usize);
    println!(
        "nu = {}, beta = {:.4}, kappa_N = {}, observing {}, dt = {}",
        nudge.nu,
        nudge.beta,
        nudge.cutoff_n.kappa(),
        nudge.interp,
        nudge.dt
    );

    let g = nudge.build_forcing()?;
    let u0 = cfg.initial_truth()?;
    let cut = nudge.cutoff_n;
    println!("{:>8} {:>14} {:>12} {:>12} {:>12}", "t", "err_lowmodes", "err_sgm", "err_ppgm", "|Q_N u|");
    run_lockstep(&nudge, &[cut], &u0, |s| {
        let r = ErrorRow::compute(s.time, s.truth, &s.nudged[0], &g, nudge.nu, &cut)?;
        println!(
            "{:>8.2} {:>14.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            r.t, r.err_lowmodes_l2, r.err_sgm_l2, r.err_ppgm_l2, r.high_modes_l2
        );
        Ok(())
    })
}
