//! Randomized invariants of the spectral operators, interpolants and solvers.

use std::f64::consts::PI;

use nsda::forcing::ForcingSpec;
use nsda::grid::{make_grid, ShellCutoff};
use nsda::interp::{apply_interpolant, InterpolantSpec};
use nsda::ops::{bilinear_b, l2_norm, leray_project, project_high, project_low};
use nsda::postprocess::postprocess;
use nsda::random::{random_field, FieldKind};
use nsda::run::{run_coupled, InitialGuess, NudgeConfig};
use nsda::series::ErrorRow;
use nsda::snapshot::Snapshot;
use nsda::sweep::fit_slope;
use proptest::prelude::*;

fn grid16() -> nsda::WaveGrid {
    make_grid(2.0 * PI, 16).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn leray_is_idempotent_and_solenoidal(seed in any::<u64>()) {
        let f = random_field(&grid16(), FieldKind::Raw, 5.0, seed);
        let p = leray_project(&f);
        let pp = leray_project(&p);
        prop_assert_eq!(p.component(0), pp.component(0));
        prop_assert_eq!(p.component(1), pp.component(1));
        // the pass-through threshold is relative to |k| |c|
        prop_assert!(p.max_divergence() < 1e-13);
        prop_assert!(l2_norm(&p) <= l2_norm(&f) * (1.0 + 1e-14));
    }

    #[test]
    fn advection_is_skew(seed in any::<u64>()) {
        let grid = grid16();
        let u = random_field(&grid, FieldKind::Solenoidal, 5.0, seed);
        let v = random_field(&grid, FieldKind::Solenoidal, 5.0, seed.wrapping_add(1));
        let w = random_field(&grid, FieldKind::Solenoidal, 5.0, seed.wrapping_add(2));
        // (B(u, v), w) = -(B(u, w), v)
        let a = bilinear_b(&u, &v).unwrap().inner(&w);
        let b = bilinear_b(&u, &w).unwrap().inner(&v);
        let scale = l2_norm(&bilinear_b(&u, &v).unwrap()) * l2_norm(&w) + 1e-300;
        prop_assert!((a + b).abs() / scale < 1e-12);
    }

    #[test]
    fn nonlinear_term_is_real_and_solenoidal(seed in any::<u64>()) {
        let grid = grid16();
        let u = random_field(&grid, FieldKind::Solenoidal, 5.0, seed);
        let b = bilinear_b(&u, &u).unwrap();
        prop_assert_eq!(b.hermitian_defect(), 0.0);
        prop_assert!(b.max_divergence() < 1e-13);
        prop_assert!(b.has_zero_mean());
    }

    #[test]
    fn projections_split_fields(seed in any::<u64>(), kappa in 1.0f64..5.0) {
        let f = random_field(&grid16(), FieldKind::Solenoidal, 5.0, seed);
        let cut = ShellCutoff::new(kappa).unwrap();
        let (lo, hi) = (project_low(&f, &cut), project_high(&f, &cut));
        prop_assert_eq!(lo.inner(&hi), 0.0);
        let back = &lo + &hi;
        prop_assert_eq!(back.component(0), f.component(0));
        prop_assert_eq!(back.component(1), f.component(1));
    }

    #[test]
    fn cell_averages_are_symmetric_contractions(seed in any::<u64>(), log_cells in 0u32..5) {
        let grid = grid16();
        let spec = InterpolantSpec::FiniteVolume { cells: 1 << log_cells };
        let phi = random_field(&grid, FieldKind::Raw, 5.0, seed);
        let psi = random_field(&grid, FieldKind::Raw, 5.0, seed.wrapping_add(7));
        let (ip, is) = (apply_interpolant(&spec, &phi).unwrap(), apply_interpolant(&spec, &psi).unwrap());
        let scale = l2_norm(&phi) * l2_norm(&psi);
        prop_assert!((ip.inner(&psi) - phi.inner(&is)).abs() < 1e-12 * scale);
        prop_assert!(l2_norm(&ip) <= l2_norm(&phi) * (1.0 + 1e-12));
        prop_assert!(ip.has_zero_mean());
    }

    #[test]
    fn postprocessing_keeps_supports_apart(seed in any::<u64>(), kappa in 1.0f64..4.5) {
        let grid = grid16();
        let cut = ShellCutoff::new(kappa).unwrap();
        let v = project_low(&random_field(&grid, FieldKind::Solenoidal, 5.0, seed), &cut);
        let g = random_field(&grid, FieldKind::Solenoidal, 5.0, seed.wrapping_add(3));
        let s = postprocess(&v, &g, 0.1, &cut).unwrap();
        prop_assert_eq!(project_low(&s.high, &cut).max_abs(), 0.0);
        prop_assert_eq!(project_high(&s.low, &cut).max_abs(), 0.0);
        let row = ErrorRow::compute(0.0, &g, &v, &g, 0.1, &cut).unwrap();
        prop_assert!(row.triangle_holds());
        prop_assert!(row.err_lowmodes_l2 <= row.err_sgm_l2 * (1.0 + 1e-12));
    }

    #[test]
    fn snapshots_round_trip(seed in any::<u64>(), time in -1e3f64..1e3) {
        let f = random_field(&grid16(), FieldKind::Solenoidal, 5.0, seed);
        let snap = Snapshot::new(time, f);
        let back = Snapshot::read_from(&snap.to_bytes()[..], None).unwrap();
        prop_assert_eq!(back, snap);
    }

    #[test]
    fn power_laws_are_recovered(rate in -3.0f64..1.0, amp in 1e-6f64..1e3) {
        let pts: Vec<(f64, f64)> = [2.0f64, 5.0, 13.0, 40.0].iter().map(|&l| (l, amp * l.powf(rate))).collect();
        let fit = fit_slope(&pts).unwrap();
        prop_assert!((fit.slope - rate).abs() < 1e-10);
        prop_assert!(fit.residual < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn nudged_states_stay_confined(seed in 0u64..1000, kappa in 2.0f64..5.0, fv in any::<bool>()) {
        let grid = grid16();
        let interp = if fv {
            InterpolantSpec::FiniteVolume { cells: 4 }
        } else {
            InterpolantSpec::FourierShell { kappa_k: 2.0 }
        };
        let cfg = NudgeConfig {
            nu: 0.1,
            beta: 1.0,
            forcing: ForcingSpec::new(1.0, 3.0, 5.0, seed),
            grid_truth: grid.clone(),
            cutoff_n: ShellCutoff::new(kappa).unwrap(),
            interp,
            dt: 0.01,
            t0: 0.0,
            t_end: 0.2,
            sample_every: 5,
            v0: InitialGuess::Seeded(seed),
        };
        let u0 = random_field(&grid, FieldKind::Solenoidal, 5.0, seed);
        let out = run_coupled(&cfg, &u0).unwrap();
        for s in &out.samples {
            prop_assert_eq!(project_high(&s.nudged, &cfg.cutoff_n).max_abs(), 0.0);
            prop_assert!(s.nudged.max_divergence() < 1e-12);
            prop_assert_eq!(s.nudged.hermitian_defect(), 0.0);
        }
    }
}
