//! Applies the cell-average observation operator and estimates the constants
//! in its approximation and inverse inequalities.

use std::f64::consts::PI;

use nsda::grid::{make_grid, ShellCutoff};
use nsda::interp::{apply_interpolant, estimate_p1, estimate_p2, estimate_p3, write_estimates_csv, InterpolantSpec};
use nsda::ops::l2_norm;
use nsda::random::{random_field, FieldKind};

fn main() -> nsda::Result<()> {
    let grid = make_grid(2.0 * PI, 64)?;
    let phi = random_field(&grid, FieldKind::Solenoidal, 21.0, 3);
    for cells in [4, 8, 16, 32] {
        let spec = InterpolantSpec::FiniteVolume { cells };
        let err = l2_norm(&(&phi - &apply_interpolant(&spec, &phi)?)) / l2_norm(&phi);
        println!("{spec}: h = {:.4}, relative observation error {err:.3e}", spec.resolution(&grid));
    }

    let shells: Vec<ShellCutoff> = [8.0, 12.0, 16.0].into_iter().map(ShellCutoff::new).collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for cells in [8, 16] {
        let spec = InterpolantSpec::FiniteVolume { cells };
        rows.push(estimate_p1(&spec, &grid, 100, 1)?);
        rows.push(estimate_p2(&spec, &grid, 100, 1)?);
        rows.extend(estimate_p3(&spec, &grid, &shells, 100, 1)?);
    }
    println!();
    write_estimates_csv(std::io::stdout().lock(), &rows)
}
