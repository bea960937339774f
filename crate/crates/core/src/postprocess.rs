//! Postprocessing of a Galerkin state through the approximate inertial
//! manifold `Phi_1(p) = (nu A)^{-1} Q_N [g - B(p, p)]`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::field::SpectralVelocity;
use crate::grid::ShellCutoff;
use crate::ops::{bilinear_b, h1_norm, l2_norm, project_high, stokes_apply};
use crate::random::{random_band, rng_from_seed, FieldKind};
use rand::Rng;

/// Galerkin state together with its high-mode correction.
#[derive(Clone, Debug)]
pub struct PostprocessedState {
    pub low: SpectralVelocity,
    pub high: SpectralVelocity,
    pub combined: SpectralVelocity,
}

fn check_inputs(vn: &SpectralVelocity, g: &SpectralVelocity, nu: f64, cutoff: &ShellCutoff) -> Result<()> {
    vn.check_same_grid(g)?;
    let grid = vn.grid();
    if cutoff.kappa() >= grid.dealias_radius() as f64 {
        return Err(Error::Cutoff(format!(
            "kappa_N = {} is not below the dealias radius {}; the correction would vanish identically",
            cutoff.kappa(),
            grid.dealias_radius()
        )));
    }
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!("nu must be positive, got {nu}")));
    }
    if !g.has_zero_mean() {
        return Err(Error::NonZeroMean("the forcing must have zero mean".into()));
    }
    let outside = project_high(vn, cutoff);
    if outside.max_abs() != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Galerkin state has modes beyond kappa_N = {}",
            cutoff.kappa()
        )));
    }
    Ok(())
}

/// `(nu A)^{-1} Q_N [g - B(vN, vN)]`, evaluated on the grid of `vN`.
pub fn phi1(vn: &SpectralVelocity, g: &SpectralVelocity, nu: f64, cutoff: &ShellCutoff) -> Result<SpectralVelocity> {
    check_inputs(vn, g, nu, cutoff)?;
    let mut r = g.clone();
    r.axpy(-1.0, &bilinear_b(vn, vn)?);
    let q = project_high(&r, cutoff);
    Ok(stokes_apply(&q, -1.0)?.scaled(1.0 / nu))
}

/// `vN + Phi_1(vN)`.
pub fn postprocess(vn: &SpectralVelocity, g: &SpectralVelocity, nu: f64, cutoff: &ShellCutoff) -> Result<PostprocessedState> {
    let high = phi1(vn, g, nu, cutoff)?;
    let combined = vn + &high;
    Ok(PostprocessedState {
        low: vn.clone(),
        high,
        combined,
    })
}

/// Largest observed Lipschitz ratios of `Phi_1` on a ball of `P_N H`.
#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzEstimate {
    pub kappa_n: f64,
    pub lambda_next: f64,
    pub ratio_l2: f64,
    pub ratio_h1: f64,
    pub pairs: usize,
    pub seed: u64,
}

pub const LIPSCHITZ_CSV_HEADER: [&str; 5] = ["kappa_N", "ratio_L2", "ratio_H1", "pairs", "seed"];

pub fn write_lipschitz_csv<W: Write>(w: W, rows: &[LipschitzEstimate]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(LIPSCHITZ_CSV_HEADER)?;
    for r in rows {
        out.write_record([
            r.kappa_n.to_string(),
            r.ratio_l2.to_string(),
            r.ratio_h1.to_string(),
            r.pairs.to_string(),
            r.seed.to_string(),
        ])?;
    }
    out.flush().map_err(|e| Error::io("lipschitz csv", e))
}

/// Samples `n_pairs` pairs `p1, p2` in `P_N H` with `|p_i|_{H^1} <= radius`
/// and reports the largest ratios `|Phi_1(p1) - Phi_1(p2)| / |p1 - p2|` in
/// `L^2` and in `H^1`.
pub fn lipschitz_probe(
    g: &SpectralVelocity,
    nu: f64,
    cutoff: &ShellCutoff,
    radius: f64,
    n_pairs: usize,
    seed: u64,
) -> Result<LipschitzEstimate> {
    if n_pairs == 0 {
        return Err(Error::InvalidParameter("at least one pair is required".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    let grid = g.grid().clone();
    let zero = SpectralVelocity::zeros(&grid);
    check_inputs(&zero, g, nu, cutoff)?;
    let mut rng = rng_from_seed(seed);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> SpectralVelocity {
        let p = random_band(&grid, FieldKind::Solenoidal, 0.0, cutoff.kappa(), rng);
        let target = radius * rng.random_range(0.5..=1.0);
        p.scaled(target / h1_norm(&p))
    };
    let (mut best_l2, mut best_h1) = (0.0f64, 0.0f64);
    let mut accepted = 0;
    while accepted < n_pairs {
        let p1 = draw(&mut rng);
        let p2 = draw(&mut rng);
        let d = &p1 - &p2;
        if l2_norm(&d) == 0.0 {
            continue;
        }
        let diff = &phi1(&p1, g, nu, cutoff)? - &phi1(&p2, g, nu, cutoff)?;
        best_l2 = best_l2.max(l2_norm(&diff) / l2_norm(&d));
        best_h1 = best_h1.max(h1_norm(&diff) / h1_norm(&d));
        accepted += 1;
    }
    Ok(LipschitzEstimate {
        kappa_n: cutoff.kappa(),
        lambda_next: cutoff.lambda_next(&grid),
        ratio_l2: best_l2,
        ratio_h1: best_h1,
        pairs: n_pairs,
        seed,
    })
}
