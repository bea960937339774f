//! Seeded random band-limited fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;

use crate::field::SpectralVelocity;
use crate::grid::WaveGrid;

/// Whether samples are projected onto divergence-free fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Solenoidal,
    /// Arbitrary zero-mean real vector field.
    Raw,
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real field whose coefficient at `k` has standard deviation
/// `amplitude(k1, k2)` (or is zero when `amplitude` returns `None`).
///
/// Only dealiased, non-Nyquist, nonzero modes are populated.
pub fn random_modes<R: Rng>(
    grid: &WaveGrid,
    kind: FieldKind,
    rng: &mut R,
    mut amplitude: impl FnMut(i64, i64) -> Option<f64>,
) -> SpectralVelocity {
    let mut out = SpectralVelocity::zeros(grid);
    for idx in 1..grid.len() {
        let conj = grid.conjugate_index(idx);
        if conj < idx || !grid.is_dealiased(idx) {
            continue;
        }
        let (k1, k2) = grid.mode(idx);
        let Some(a) = amplitude(k1, k2) else { continue };
        let mut draw = || -> Complex64 {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * (a / std::f64::consts::SQRT_2)
        };
        let value = match kind {
            FieldKind::Solenoidal => {
                let norm = ((k1 * k1 + k2 * k2) as f64).sqrt();
                let z = draw();
                [z * (-k2 as f64 / norm), z * (k1 as f64 / norm)]
            }
            FieldKind::Raw => [draw(), draw()],
        };
        out.set_coeff(idx, value);
        out.set_coeff(conj, [value[0].conj(), value[1].conj()]);
    }
    out
}

/// Isotropic sample with `|c(k)| ~ (1 + |k|^2)^{-1}` on `|k| <= radius`.
pub fn random_field(grid: &WaveGrid, kind: FieldKind, radius: f64, seed: u64) -> SpectralVelocity {
    let mut rng = rng_from_seed(seed);
    random_band(grid, kind, 0.0, radius, &mut rng)
}

/// Isotropic sample with `|c(k)| ~ (1 + |k|^2)^{-1}` on `lo < |k| <= hi`.
pub fn random_band<R: Rng>(grid: &WaveGrid, kind: FieldKind, lo: f64, hi: f64, rng: &mut R) -> SpectralVelocity {
    let (lo_sq, hi_sq) = (lo * lo + 1e-9, hi * hi + 1e-9);
    random_modes(grid, kind, rng, |k1, k2| {
        let ksq = (k1 * k1 + k2 * k2) as f64;
        (ksq > lo_sq && ksq <= hi_sq).then(|| 1.0 / (1.0 + ksq))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn deterministic_real_solenoidal() {
        let g = make_grid(2.0, 16).unwrap();
        let a = random_field(&g, FieldKind::Solenoidal, 5.0, 42);
        let b = random_field(&g, FieldKind::Solenoidal, 5.0, 42);
        assert_eq!(a.component(0), b.component(0));
        assert_eq!(a.component(1), b.component(1));
        assert!(a.hermitian_defect() == 0.0);
        assert!(a.max_divergence() < 1e-15);
        assert!(a.has_zero_mean());
        let c = random_field(&g, FieldKind::Solenoidal, 5.0, 43);
        assert_ne!(a.component(0), c.component(0));
    }

    #[test]
    fn band_support() {
        let g = make_grid(1.0, 32).unwrap();
        let mut rng = rng_from_seed(1);
        let f = random_band(&g, FieldKind::Raw, 4.0, 8.0, &mut rng);
        for idx in 0..g.len() {
            let [a, b] = f.coeff(idx);
            if a.norm() + b.norm() > 0.0 {
                let ksq = g.ksq(idx);
                assert!(ksq > 16 && ksq <= 64);
            }
        }
        assert!(f.max_divergence() > 1e-3);
    }
}
