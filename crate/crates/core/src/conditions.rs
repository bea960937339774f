//! Sufficient conditions on `beta`, the observation resolution and the
//! Galerkin cutoff, evaluated with user-chosen stand-ins for the unknown
//! absolute constants. Advisory only.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::grid::{eigenvalue_by_index, ShellCutoff, WaveGrid};
use crate::interp::InterpolantSpec;

/// Stand-ins for the absolute constants and the auxiliary index `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssumedConstants {
    pub c0: f64,
    pub c: f64,
    /// Index of the eigenvalue `lambda_m` (counted with multiplicity, from 1).
    pub m: usize,
}

impl Default for AssumedConstants {
    fn default() -> Self {
        AssumedConstants { c0: 1.0, c: 1.0, m: 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionEntry {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

impl ConditionEntry {
    fn at_least(name: &str, lhs: f64, rhs: f64) -> Self {
        ConditionEntry {
            name: name.to_string(),
            lhs,
            rhs,
            satisfied: lhs >= rhs,
        }
    }

    fn at_most(name: &str, lhs: f64, rhs: f64) -> Self {
        ConditionEntry {
            name: name.to_string(),
            lhs,
            rhs,
            satisfied: lhs <= rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub entries: Vec<ConditionEntry>,
    pub constants: AssumedConstants,
}

impl ConditionReport {
    pub fn all_satisfied(&self) -> bool {
        self.entries.iter().all(|e| e.satisfied)
    }

    pub fn entry(&self, name: &str) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "assumed constants: c0 = {}, c = {}, m = {}",
            self.constants.c0, self.constants.c, self.constants.m
        )?;
        for e in &self.entries {
            let verdict = if e.satisfied { "pass" } else { "FAIL" };
            writeln!(f, "{verdict:>4}  {:<40} lhs = {:.6e}  rhs = {:.6e}", e.name, e.lhs, e.rhs)?;
        }
        Ok(())
    }
}

pub const BETA_LOWER: &str = "beta >= nu*lambda_m";
pub const FOURIER_SPECTRAL_GAP: &str = "lambda_{K+1} >= 2*beta/nu";
pub const FV_RESOLUTION: &str = "h <= (1/c0)*(nu/beta)^(1/2)";
pub const FV_RESOLUTION_M: &str = "h <= c*min{(nu/beta)^(1/2), nu*lambda_m^(1/2)/beta}";

/// `(nu / beta)^{1/2}`, infinite for `beta = 0`.
fn diffusive_length(nu: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        f64::INFINITY
    } else {
        (nu / beta).sqrt()
    }
}

/// Evaluates every condition that applies to `interp`. Invalid inputs yield
/// non-finite numbers and failed entries rather than errors.
pub fn check_conditions(
    nu: f64,
    beta: f64,
    interp: &InterpolantSpec,
    grid: &WaveGrid,
    constants: &AssumedConstants,
) -> ConditionReport {
    let lambda_m = eigenvalue_by_index(constants.m.max(1), grid.length()).unwrap_or(f64::NAN);
    let mut entries = vec![ConditionEntry::at_least(BETA_LOWER, beta, nu * lambda_m)];
    match *interp {
        InterpolantSpec::FourierShell { kappa_k } => {
            let lambda_next = ShellCutoff::new(kappa_k)
                .map(|k| k.lambda_next(grid))
                .unwrap_or(f64::NAN);
            entries.push(ConditionEntry::at_least(FOURIER_SPECTRAL_GAP, lambda_next, 2.0 * beta / nu));
        }
        InterpolantSpec::FiniteVolume { .. } => {
            let h = interp.resolution(grid);
            let ell = diffusive_length(nu, beta);
            entries.push(ConditionEntry::at_most(FV_RESOLUTION, h, ell / constants.c0));
            let second = if beta == 0.0 { f64::INFINITY } else { nu * lambda_m.sqrt() / beta };
            entries.push(ConditionEntry::at_most(FV_RESOLUTION_M, h, constants.c * ell.min(second)));
        }
    }
    ConditionReport {
        entries,
        constants: *constants,
    }
}

/// Largest `beta` allowed by the upper-bound conditions for `interp`:
/// `nu lambda_{K+1} / 2` for the Fourier projector, and the largest value
/// meeting both resolution conditions for cell averages. Shaded down by one
/// part in 10^12 so that rounding cannot flip the checks.
pub fn suggest_beta(nu: f64, interp: &InterpolantSpec, grid: &WaveGrid, constants: &AssumedConstants) -> f64 {
    let bound = match *interp {
        InterpolantSpec::FourierShell { kappa_k } => {
            let lambda_next = ShellCutoff::new(kappa_k)
                .map(|k| k.lambda_next(grid))
                .unwrap_or(f64::NAN);
            0.5 * nu * lambda_next
        }
        InterpolantSpec::FiniteVolume { .. } => {
            let h = interp.resolution(grid);
            let lambda_m = eigenvalue_by_index(constants.m.max(1), grid.length()).unwrap_or(f64::NAN);
            let from_first = nu / (constants.c0 * h).powi(2);
            let from_diffusive = nu * (constants.c / h).powi(2);
            let from_m = constants.c * nu * lambda_m.sqrt() / h;
            from_first.min(from_diffusive).min(from_m)
        }
    };
    bound * (1.0 - 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn spectral_gap_at_equality() {
        let grid = make_grid(2.0 * PI, 32).unwrap();
        // shells up to |k|^2 = 13, so lambda_{K+1} = 16
        let interp = InterpolantSpec::FourierShell { kappa_k: 13f64.sqrt() };
        let report = check_conditions(1.0, 8.0, &interp, &grid, &AssumedConstants::default());
        let gap = report.entry(FOURIER_SPECTRAL_GAP).unwrap();
        assert_eq!((gap.lhs, gap.rhs), (16.0, 16.0));
        assert!(gap.satisfied);
        assert!(report.all_satisfied());

        // one shell less: lambda_{K+1} = 13 < 16
        let interp = InterpolantSpec::FourierShell { kappa_k: 10f64.sqrt() };
        let report = check_conditions(1.0, 8.0, &interp, &grid, &AssumedConstants::default());
        assert!(!report.entry(FOURIER_SPECTRAL_GAP).unwrap().satisfied);
    }

    #[test]
    fn fv_resolution_bound() {
        let grid = make_grid(1.0, 32).unwrap();
        let interp = InterpolantSpec::FiniteVolume { cells: 4 };
        let report = check_conditions(1.0, 8.0, &interp, &grid, &AssumedConstants::default());
        let e = report.entry(FV_RESOLUTION).unwrap();
        assert!((e.rhs - 0.3535533905932738).abs() < 1e-15);
        assert_eq!(e.lhs, 0.25);
        assert!(e.satisfied);
        let m = report.entry(FV_RESOLUTION_M).unwrap();
        let lambda1 = (2.0 * PI).powi(2);
        assert!((m.rhs - (0.125f64.sqrt()).min(lambda1.sqrt() / 8.0)).abs() < 1e-15);
    }

    #[test]
    fn beta_lower_bound_at_equality() {
        let grid = make_grid(2.0 * PI, 32).unwrap();
        let constants = AssumedConstants { m: 5, ..Default::default() };
        // eigenvalues 1,1,1,1,2,... so lambda_5 = 2
        let nu = 0.3;
        let beta = nu * 2.0;
        let report = check_conditions(nu, beta, &InterpolantSpec::FourierShell { kappa_k: 4.0 }, &grid, &constants);
        assert!(report.entry(BETA_LOWER).unwrap().satisfied);
        let report = check_conditions(nu, beta * 0.999, &InterpolantSpec::FourierShell { kappa_k: 4.0 }, &grid, &constants);
        assert!(!report.entry(BETA_LOWER).unwrap().satisfied);
    }

    #[test]
    fn suggested_beta_meets_bounds() {
        let grid = make_grid(2.0 * PI, 64).unwrap();
        let fourier = InterpolantSpec::FourierShell { kappa_k: 4.0 };
        let c = AssumedConstants::default();
        let beta = suggest_beta(0.05, &fourier, &grid, &c);
        assert!((beta - 0.425).abs() < 1e-12);
        assert!(check_conditions(0.05, beta, &fourier, &grid, &c).all_satisfied());
        let fv = InterpolantSpec::FiniteVolume { cells: 16 };
        let beta = suggest_beta(0.05, &fv, &grid, &c);
        let report = check_conditions(0.05, beta, &fv, &grid, &c);
        assert!(report.entry(FV_RESOLUTION).unwrap().satisfied);
        assert!(report.entry(FV_RESOLUTION_M).unwrap().satisfied);
        assert!(format!("{report}").contains("pass"));
    }
}
