//! Time-independent, divergence-free body forcing with a prescribed Grashof number.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralVelocity;
use crate::grid::WaveGrid;
use crate::ops::l2_norm;
use crate::random::{random_modes, rng_from_seed, FieldKind};

/// Random-phase forcing on the shells `shell_lo <= |k| <= shell_hi`, with an
/// optional weak power-law tail above the band.
///
/// Band modes have equal expected amplitude. Tail modes
/// (`shell_hi < |k| <= tail_hi`) have amplitude proportional to
/// `|k|^{-tail_decay}` and a combined `L^2` norm equal to `tail_ratio` times
/// that of the band. A band confined to one eigenvalue shell makes the steady
/// Stokes response an exact, globally attracting solution; the tail then
/// controls how the high modes of the flow fall off.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSpec {
    pub shell_lo: f64,
    pub shell_hi: f64,
    #[serde(rename = "G")]
    pub target_grashof: f64,
    pub seed: u64,
    #[serde(default)]
    pub tail_ratio: f64,
    #[serde(default = "default_tail_decay")]
    pub tail_decay: f64,
    /// Outer radius of the tail; `None` means the dealias radius.
    #[serde(default)]
    pub tail_hi: Option<f64>,
}

fn default_tail_decay() -> f64 {
    1.0
}

impl ForcingSpec {
    pub fn new(shell_lo: f64, shell_hi: f64, target_grashof: f64, seed: u64) -> Self {
        ForcingSpec {
            shell_lo,
            shell_hi,
            target_grashof,
            seed,
            tail_ratio: 0.0,
            tail_decay: default_tail_decay(),
            tail_hi: None,
        }
    }

    pub fn with_tail(mut self, ratio: f64, decay: f64) -> Self {
        self.tail_ratio = ratio;
        self.tail_decay = decay;
        self
    }
}

/// Synthesizes `g` with `|g|_{L^2} = G nu^2 lambda_1`.
pub fn build_forcing(spec: &ForcingSpec, grid: &WaveGrid, nu: f64) -> Result<SpectralVelocity> {
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!("viscosity must be positive, got {nu}")));
    }
    if !(spec.shell_lo >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "forcing shell_lo must be at least 1, got {}",
            spec.shell_lo
        )));
    }
    let radius = grid.dealias_radius() as f64;
    if spec.shell_hi > radius {
        return Err(Error::InvalidParameter(format!(
            "forcing shell_hi = {} exceeds the dealias radius {radius}",
            spec.shell_hi
        )));
    }
    if !(spec.target_grashof >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "target Grashof number must be nonnegative, got {}",
            spec.target_grashof
        )));
    }
    if !(spec.tail_ratio >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tail_ratio must be nonnegative, got {}",
            spec.tail_ratio
        )));
    }
    let tail_hi = spec.tail_hi.unwrap_or(radius);
    if tail_hi > radius {
        return Err(Error::InvalidParameter(format!(
            "forcing tail_hi = {tail_hi} exceeds the dealias radius {radius}"
        )));
    }

    let mut rng = rng_from_seed(spec.seed);
    let (lo_sq, hi_sq) = (spec.shell_lo * spec.shell_lo - 1e-9, spec.shell_hi * spec.shell_hi + 1e-9);
    let band = random_modes(grid, FieldKind::Solenoidal, &mut rng, |k1, k2| {
        let ksq = (k1 * k1 + k2 * k2) as f64;
        (ksq >= lo_sq && ksq <= hi_sq).then_some(1.0)
    });
    let band_norm = l2_norm(&band);
    if band_norm == 0.0 {
        return Err(Error::EmptyShell(format!(
            "no modes with {} <= |k| <= {}",
            spec.shell_lo, spec.shell_hi
        )));
    }
    let mut g = band.scaled(1.0 / band_norm);
    if spec.tail_ratio > 0.0 {
        let top_sq = tail_hi * tail_hi + 1e-9;
        let tail = random_modes(grid, FieldKind::Solenoidal, &mut rng, |k1, k2| {
            let ksq = (k1 * k1 + k2 * k2) as f64;
            (ksq > hi_sq && ksq <= top_sq).then(|| ksq.powf(-0.5 * spec.tail_decay))
        });
        let tail_norm = l2_norm(&tail);
        if tail_norm == 0.0 {
            return Err(Error::EmptyShell(format!(
                "no tail modes with {} < |k| <= {tail_hi}",
                spec.shell_hi
            )));
        }
        g.axpy(spec.tail_ratio / tail_norm, &tail);
    }
    let target = spec.target_grashof * nu * nu * grid.lambda1();
    Ok(g.scaled(target / l2_norm(&g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, ShellCutoff};
    use crate::ops::{grashof, project_high, project_low};
    use std::f64::consts::PI;

    #[test]
    fn forcing_examples() {
        let grid = make_grid(2.0 * PI, 32).unwrap();
        let zero = build_forcing(&ForcingSpec::new(1.0, 4.0, 0.0, 1), &grid, 0.1).unwrap();
        assert_eq!(zero.max_abs(), 0.0);

        let g = build_forcing(&ForcingSpec::new(1.0, 4.0, 1.0, 1), &grid, 1.0).unwrap();
        assert!((l2_norm(&g) - 1.0).abs() < 1e-12);

        let a = build_forcing(&ForcingSpec::new(2.0, 8.0, 10.0, 5), &grid, 0.05).unwrap();
        let b = build_forcing(&ForcingSpec::new(2.0, 8.0, 10.0, 5), &grid, 0.05).unwrap();
        assert_eq!(a.component(0), b.component(0));
        assert_eq!(a.component(1), b.component(1));
        assert!((grashof(&a, 0.05, grid.lambda1()).unwrap() - 10.0).abs() < 1e-12);
        assert!(a.max_divergence() < 1e-14);
        assert!(a.has_zero_mean());
        assert_eq!(a.hermitian_defect(), 0.0);
    }

    #[test]
    fn tail_weight() {
        let grid = make_grid(2.0 * PI, 32).unwrap();
        let spec = ForcingSpec::new(1.0, 1.0, 10.0, 3).with_tail(1e-3, 1.0);
        let g = build_forcing(&spec, &grid, 0.05).unwrap();
        assert!((grashof(&g, 0.05, 1.0).unwrap() - 10.0).abs() < 1e-12);
        let cut = ShellCutoff::new(1.0).unwrap();
        let ratio = l2_norm(&project_high(&g, &cut)) / l2_norm(&project_low(&g, &cut));
        assert!((ratio - 1e-3).abs() < 1e-15);
        assert!(g.max_divergence() < 1e-14);
    }

    #[test]
    fn forcing_errors() {
        let grid = make_grid(2.0 * PI, 32).unwrap();
        assert!(build_forcing(&ForcingSpec::new(0.0, 4.0, 1.0, 1), &grid, 1.0).is_err());
        assert!(build_forcing(&ForcingSpec::new(1.0, 11.0, 1.0, 1), &grid, 1.0).is_err());
        assert!(matches!(
            build_forcing(&ForcingSpec::new(1.2, 1.3, 1.0, 1), &grid, 1.0),
            Err(Error::EmptyShell(_))
        ));
        assert!(build_forcing(&ForcingSpec::new(1.0, 4.0, 1.0, 1), &grid, 0.0).is_err());
    }
}
