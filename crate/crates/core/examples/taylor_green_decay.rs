//! Integrates a Taylor-Green vortex, which the nonlinear term leaves alone,
//! and compares with its exact viscous decay at several time steps.

use std::f64::consts::PI;

use nsda::grid::make_grid;
use nsda::ops::{bilinear_b, l2_norm};
use nsda::solver::TruthStepper;
use nsda::SpectralVelocity;
use rustfft::num_complex::Complex64;

fn main() -> nsda::Result<()> {
    let grid = make_grid(2.0 * PI, 32)?;
    // u = (sin x cos y, -cos x sin y), an eigenfunction of the Stokes operator with lambda = 2
    let u0 = SpectralVelocity::from_fn(&grid, |k1, k2| {
        if k1.abs() == 1 && k2.abs() == 1 {
            [Complex64::new(0.0, -0.25 * k1 as f64), Complex64::new(0.0, 0.25 * k2 as f64)]
        } else {
            [Complex64::default(); 2]
        }
    });
    println!("|B(u, u)| = {:.2e}", l2_norm(&bilinear_b(&u0, &u0)?));

    let nu: f64 = 1.0;
    let g = SpectralVelocity::zeros(&grid);
    let exact = u0.scaled((-2.0 * nu).exp());
    let mut previous: Option<f64> = None;
    for dt in [4e-3, 2e-3, 1e-3, 5e-4] {
        let mut stepper = TruthStepper::new(&g, nu, dt)?;
        let mut u = u0.clone();
        let steps = (1.0 / dt).round() as usize;
        for n in 0..steps {
            u = stepper.step(&u, n as f64 * dt)?;
        }
        let err = l2_norm(&(&u - &exact)) / l2_norm(&exact);
        match previous {
            Some(p) => println!("dt = {dt:.0e}: relative error at t = 1 is {err:.3e} (ratio {:.3})", p / err),
            None => println!("dt = {dt:.0e}: relative error at t = 1 is {err:.3e}"),
        }
        previous = Some(err);
    }
    Ok(())
}
