//! Reconstructs the unresolved scales of a flow from its low modes through
//! the approximate inertial manifold, and probes the map's Lipschitz ratio.

use std::f64::consts::PI;

use nsda::forcing::{build_forcing, ForcingSpec};
use nsda::grid::{make_grid, ShellCutoff};
use nsda::ops::{l2_norm, project_high, project_low, stokes_apply};
use nsda::postprocess::{lipschitz_probe, postprocess};
use nsda::run::spin_up;

fn main() -> nsda::Result<()> {
    let nu = 0.05;
    let grid = make_grid(2.0 * PI, 64)?;
    let spec = ForcingSpec::new(1.0, 1.0, 10.0, 1).with_tail(1e-3, 1.0);
    let g = build_forcing(&spec, &grid, nu)?;
    let u = spin_up(&g, nu, 0.01, 10.0, &stokes_apply(&g, -1.0)?.scaled(1.0 / nu))?;

    println!("{:>8} {:>12} {:>12} {:>12}", "kappa_N", "|Q_N u|", "|u - P_N u|", "|u - post|");
    for kappa in [2.0, 4.0, 8.0, 12.0] {
        let cut = ShellCutoff::new(kappa)?;
        let low = project_low(&u, &cut);
        let state = postprocess(&low, &g, nu, &cut)?;
        println!(
            "{kappa:>8} {:>12.4e} {:>12.4e} {:>12.4e}",
            l2_norm(&project_high(&u, &cut)),
            l2_norm(&(&u - &low)),
            l2_norm(&(&u - &state.combined))
        );
    }

    println!("\nLipschitz ratios on the H1 ball of radius 1:");
    for kappa in [2.0, 4.0, 8.0, 16.0] {
        let est = lipschitz_probe(&g, nu, &ShellCutoff::new(kappa)?, 1.0, 20, 0)?;
        println!(
            "kappa_N = {kappa:>4}: lambda_next = {:>5}, L2 {:.3e}, H1 {:.3e}",
            est.lambda_next, est.ratio_l2, est.ratio_h1
        );
    }
    Ok(())
}
