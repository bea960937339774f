//! Evaluates the parameter conditions for both observation operators and
//! shows the largest admissible nudging rate.

use std::f64::consts::PI;

use nsda::conditions::{check_conditions, suggest_beta, AssumedConstants};
use nsda::grid::make_grid;
use nsda::interp::InterpolantSpec;

fn main() -> nsda::Result<()> {
    let grid = make_grid(2.0 * PI, 128)?;
    let constants = AssumedConstants::default();
    let nu = 0.05;
    for interp in [
        InterpolantSpec::FourierShell { kappa_k: 4.0 },
        InterpolantSpec::FourierShell { kappa_k: 8.0 },
        InterpolantSpec::FiniteVolume { cells: 16 },
        InterpolantSpec::FiniteVolume { cells: 64 },
    ] {
        let beta = suggest_beta(nu, &interp, &grid, &constants);
        println!("{interp} with nu = {nu}: largest admissible beta = {beta:.6}");
        print!("{}", check_conditions(nu, beta, &interp, &grid, &constants));
        print!("doubled beta:\n{}", check_conditions(nu, 2.0 * beta, &interp, &grid, &constants));
        println!();
    }
    Ok(())
}
