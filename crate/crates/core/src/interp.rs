//! Observation operators `I_h` and estimators for their approximation constants.
//!
//! Two operators are provided: the low Fourier modes projector `P_K` and
//! local averages over the squares of a uniform `n x n` partition of the torus.
//! The estimators sample random fields and report the largest observed ratio
//! in each defining inequality, which is a lower bound for the constant.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{PhysicalVelocity, SpectralVelocity};
use crate::grid::{ShellCutoff, WaveGrid};
use crate::ops::{l2_norm, project_low, sobolev_norm, h1_norm};
use crate::random::{random_band, rng_from_seed, FieldKind};

/// Choice of observation operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InterpolantSpec {
    /// Orthogonal projection onto `|k| <= kappa_k`.
    FourierShell { kappa_k: f64 },
    /// Cell averages on a `cells x cells` partition, `h = L / cells`.
    FiniteVolume { cells: usize },
}

impl fmt::Display for InterpolantSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InterpolantSpec::FourierShell { kappa_k } => write!(f, "fourier({kappa_k})"),
            InterpolantSpec::FiniteVolume { cells } => write!(f, "fv({cells})"),
        }
    }
}

impl InterpolantSpec {
    pub fn validate(&self, grid: &WaveGrid) -> Result<()> {
        match *self {
            InterpolantSpec::FourierShell { kappa_k } => {
                if !(kappa_k >= 0.0) {
                    return Err(Error::Interpolant(format!("kappa_K must be nonnegative, got {kappa_k}")));
                }
                if kappa_k > grid.dealias_radius() as f64 {
                    return Err(Error::Interpolant(format!(
                        "kappa_K = {kappa_k} exceeds the dealias radius {}",
                        grid.dealias_radius()
                    )));
                }
            }
            InterpolantSpec::FiniteVolume { cells } => {
                if cells == 0 || !grid.points().is_multiple_of(cells) {
                    return Err(Error::Interpolant(format!(
                        "{cells} cells per axis do not tile the {}-point grid",
                        grid.points()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Whether `I_h` is diagonal in Fourier space.
    pub fn is_mode_diagonal(&self) -> bool {
        matches!(self, InterpolantSpec::FourierShell { .. })
    }

    /// Resolution `h`. For the Fourier projector this is `lambda_{K+1}^{-1/2}`.
    pub fn resolution(&self, grid: &WaveGrid) -> f64 {
        match *self {
            InterpolantSpec::FourierShell { kappa_k } => {
                let cut = ShellCutoff::new(kappa_k).expect("validated radius");
                cut.lambda_next(grid).powf(-0.5)
            }
            InterpolantSpec::FiniteVolume { cells } => grid.length() / cells as f64,
        }
    }
}

/// `I_h(f)`. The finite-volume output keeps the mean but is in general not
/// divergence-free.
pub fn apply_interpolant(spec: &InterpolantSpec, f: &SpectralVelocity) -> Result<SpectralVelocity> {
    spec.validate(f.grid())?;
    match *spec {
        InterpolantSpec::FourierShell { kappa_k } => Ok(project_low(f, &ShellCutoff::new(kappa_k)?)),
        InterpolantSpec::FiniteVolume { cells } => {
            let averaged = cell_average(&f.to_physical(), cells)?;
            let mut out = averaged.to_spectral();
            // Nyquist modes are not resolved by a real field on an even grid
            let grid = f.grid().clone();
            let half = (grid.points() / 2) as i64;
            out.retain_modes(|idx| {
                let (k1, k2) = grid.mode(idx);
                k1 != half && k2 != half
            });
            out.set_coeff(0, f.mean());
            Ok(out)
        }
    }
}

/// Replaces grid values in each cell by the cell average (both components).
pub fn cell_average(p: &PhysicalVelocity, cells: usize) -> Result<PhysicalVelocity> {
    let grid = p.grid();
    let n = grid.points();
    if cells == 0 || !n.is_multiple_of(cells) {
        return Err(Error::Interpolant(format!("{cells} cells do not tile {n} points")));
    }
    let s = n / cells;
    let mut out = p.clone();
    for c in 0..2 {
        let src = p.component(c);
        let dst = out.component_mut(c);
        for a1 in 0..cells {
            for a2 in 0..cells {
                let rows = (a1 * s)..(a1 * s + s);
                let cols = (a2 * s)..(a2 * s + s);
                let first = src[a1 * s * n + a2 * s];
                let mut sum = 0.0;
                let mut uniform = true;
                for j1 in rows.clone() {
                    for j2 in cols.clone() {
                        let v = src[j1 * n + j2];
                        uniform &= v == first;
                        sum += v;
                    }
                }
                // an already averaged cell maps to itself exactly
                let avg = if uniform { first } else { sum / (s * s) as f64 };
                for j1 in rows.clone() {
                    for j2 in cols.clone() {
                        dst[j1 * n + j2] = avg;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Which interpolant inequality a ratio refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropertyConstant {
    /// `|phi - I_h phi| <= c0 h ||phi||`.
    C0,
    /// `||phi - I_h phi||_{H^-1} <= c_{-1} h |phi|`.
    CMinus1,
    /// `|I_h q| <= c0~ |Omega|^{3/4} h^{-2} lambda_{N+1}^{-1/4} |q|` on `Q_N H`.
    C0Tilde,
}

impl PropertyConstant {
    pub fn name(&self) -> &'static str {
        match self {
            PropertyConstant::C0 => "c0",
            PropertyConstant::CMinus1 => "c_minus1",
            PropertyConstant::C0Tilde => "c0_tilde",
        }
    }
}

/// Largest observed ratio for one constant at one parameter value.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyEstimate {
    pub constant: PropertyConstant,
    pub variant: InterpolantSpec,
    /// `h` for the first two constants, `lambda_{N+1}` for the third.
    pub param: f64,
    pub estimate: f64,
    pub samples: usize,
    pub seed: u64,
}

pub const ESTIMATE_CSV_HEADER: [&str; 6] = ["constant", "variant", "param", "estimate", "samples", "seed"];

/// Writes estimator reports as CSV with [`ESTIMATE_CSV_HEADER`].
pub fn write_estimates_csv<W: std::io::Write>(w: W, rows: &[PropertyEstimate]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(ESTIMATE_CSV_HEADER)?;
    for r in rows {
        out.write_record([
            r.constant.name().to_string(),
            r.variant.to_string(),
            format!("{:e}", r.param),
            format!("{:e}", r.estimate),
            r.samples.to_string(),
            r.seed.to_string(),
        ])?;
    }
    out.flush().map_err(|e| Error::io("estimate csv", e))?;
    Ok(())
}

fn sample_nonzero<R: Rng>(
    rng: &mut R,
    mut draw: impl FnMut(&mut R) -> SpectralVelocity,
    norm: impl Fn(&SpectralVelocity) -> f64,
) -> (SpectralVelocity, f64) {
    loop {
        let f = draw(rng);
        let n = norm(&f);
        if n > 0.0 {
            return (f, n);
        }
    }
}

fn check_samples(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    Ok(())
}

/// Estimates `c0`: max of `|phi - I_h phi| / (h ||phi||_{H^1})` over random
/// zero-mean band-limited fields.
pub fn estimate_p1(spec: &InterpolantSpec, grid: &WaveGrid, n_samples: usize, seed: u64) -> Result<PropertyEstimate> {
    check_samples(n_samples)?;
    spec.validate(grid)?;
    let h = spec.resolution(grid);
    let radius = grid.dealias_radius() as f64;
    let mut rng = rng_from_seed(seed);
    let mut best: f64 = 0.0;
    for _ in 0..n_samples {
        let (phi, norm) = sample_nonzero(&mut rng, |r| random_band(grid, FieldKind::Raw, 0.0, radius, r), h1_norm);
        let err = l2_norm(&(&phi - &apply_interpolant(spec, &phi)?));
        best = best.max(err / (h * norm));
    }
    Ok(PropertyEstimate {
        constant: PropertyConstant::C0,
        variant: *spec,
        param: h,
        estimate: best,
        samples: n_samples,
        seed,
    })
}

/// Estimates `c_{-1}`: max of `||phi - I_h phi||_{H^-1} / (h |phi|_{L^2})`.
pub fn estimate_p2(spec: &InterpolantSpec, grid: &WaveGrid, n_samples: usize, seed: u64) -> Result<PropertyEstimate> {
    check_samples(n_samples)?;
    spec.validate(grid)?;
    let h = spec.resolution(grid);
    let radius = grid.dealias_radius() as f64;
    let mut rng = rng_from_seed(seed);
    let mut best: f64 = 0.0;
    for _ in 0..n_samples {
        let (phi, norm) = sample_nonzero(&mut rng, |r| random_band(grid, FieldKind::Raw, 0.0, radius, r), l2_norm);
        let diff = &phi - &apply_interpolant(spec, &phi)?;
        // the dual norm ignores the mean mode
        best = best.max(sobolev_norm(&diff, -1.0) / (h * norm));
    }
    Ok(PropertyEstimate {
        constant: PropertyConstant::CMinus1,
        variant: *spec,
        param: h,
        estimate: best,
        samples: n_samples,
        seed,
    })
}

/// Estimates `c0~` for each shell: max of
/// `|I_h q| h^2 lambda_{N+1}^{1/4} / (L^{3/2} |q|)` over random divergence-free
/// `q` supported strictly above the shell.
pub fn estimate_p3(
    spec: &InterpolantSpec,
    grid: &WaveGrid,
    shells: &[ShellCutoff],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<PropertyEstimate>> {
    check_samples(n_samples)?;
    spec.validate(grid)?;
    let h = spec.resolution(grid);
    let radius = grid.dealias_radius() as f64;
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(shells.len());
    for shell in shells {
        if shell.kappa() >= radius {
            return Err(Error::Cutoff(format!(
                "shell {} is at or beyond the dealias radius {radius}",
                shell.kappa()
            )));
        }
        let lambda_next = shell.lambda_next(grid);
        let mut best: f64 = 0.0;
        for _ in 0..n_samples {
            let (q, norm) = sample_nonzero(
                &mut rng,
                |r| random_band(grid, FieldKind::Solenoidal, shell.kappa(), radius, r),
                l2_norm,
            );
            let iq = l2_norm(&apply_interpolant(spec, &q)?);
            let ratio = iq * h * h * lambda_next.powf(0.25) / (grid.length().powf(1.5) * norm);
            best = best.max(ratio);
        }
        out.push(PropertyEstimate {
            constant: PropertyConstant::C0Tilde,
            variant: *spec,
            param: lambda_next,
            estimate: best,
            samples: n_samples,
            seed,
        });
    }
    Ok(out)
}
