//! Spectral operators: Leray projection, powers of the Stokes operator,
//! shell projectors, the dealiased advection term and Sobolev norms.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{unpack_real_pair, SpectralVelocity};
use crate::grid::ShellCutoff;

/// Relative `|k.c| / (|k| |c|)` below which a mode counts as solenoidal and
/// is passed through the Leray projector untouched. Makes the projector
/// exactly idempotent in floating point.
const SOLENOIDAL_TOL: f64 = 1e-14;

/// Orthogonal projection onto divergence-free, zero-mean fields.
pub fn leray_project(f: &SpectralVelocity) -> SpectralVelocity {
    let mut out = f.clone();
    leray_project_in_place(&mut out);
    out
}

pub fn leray_project_in_place(f: &mut SpectralVelocity) {
    let grid = f.grid().clone();
    let (a, b) = f.components_mut();
    a[0] = Complex64::default();
    b[0] = Complex64::default();
    for idx in 1..grid.len() {
        let (k1, k2) = grid.mode(idx);
        let (k1, k2) = (k1 as f64, k2 as f64);
        let ksq = k1 * k1 + k2 * k2;
        let div = a[idx] * k1 + b[idx] * k2;
        let size = (a[idx].norm_sqr() + b[idx].norm_sqr()).sqrt();
        if div.norm() <= SOLENOIDAL_TOL * ksq.sqrt() * size {
            continue;
        }
        let s = div / ksq;
        a[idx] -= s * k1;
        b[idx] -= s * k2;
    }
}

/// `A^alpha f`, i.e. each mode scaled by `lambda(k)^alpha`.
///
/// Negative powers require a zero-mean input.
pub fn stokes_apply(f: &SpectralVelocity, alpha: f64) -> Result<SpectralVelocity> {
    if alpha < 0.0 && !f.has_zero_mean() {
        return Err(Error::NonZeroMean(format!(
            "A^{alpha} is undefined on the mean mode"
        )));
    }
    let grid = f.grid().clone();
    let mut out = f.clone();
    if alpha == 0.0 {
        return Ok(out);
    }
    out.scale_modes(|idx| {
        if idx == 0 {
            0.0
        } else {
            grid.lambda(idx).powf(alpha)
        }
    });
    Ok(out)
}

/// `P_kappa f`: keeps modes with `|k|^2 <= kappa^2`.
pub fn project_low(f: &SpectralVelocity, cut: &ShellCutoff) -> SpectralVelocity {
    let grid = f.grid().clone();
    let mut out = f.clone();
    out.retain_modes(|idx| cut.contains_ksq(grid.ksq(idx)));
    out
}

/// `Q_kappa f = f - P_kappa f`.
pub fn project_high(f: &SpectralVelocity, cut: &ShellCutoff) -> SpectralVelocity {
    let grid = f.grid().clone();
    let mut out = f.clone();
    out.retain_modes(|idx| !cut.contains_ksq(grid.ksq(idx)));
    out
}

/// Zeroes modes outside the 2/3-rule square.
pub fn dealias(f: &mut SpectralVelocity) {
    let grid = f.grid().clone();
    f.retain_modes(|idx| grid.is_dealiased(idx));
}

/// `B(u, v) = P_sigma[(u . grad) v]`, evaluated pseudospectrally with 2/3-rule
/// truncation of the inputs and of the product.
pub fn bilinear_b(u: &SpectralVelocity, v: &SpectralVelocity) -> Result<SpectralVelocity> {
    u.check_same_grid(v)?;
    let mut out = advection(u, v);
    leray_project_in_place(&mut out);
    Ok(out)
}

/// Dealiased `(u . grad) v` without the final Leray projection.
pub(crate) fn advection(u: &SpectralVelocity, v: &SpectralVelocity) -> SpectralVelocity {
    let grid = u.grid();
    let n = grid.len();
    let fft = grid.fft();
    let i = Complex64::i();
    let keep = |idx: usize| grid.is_dealiased(idx);

    // physical u1 + i u2
    let mut zu = vec![Complex64::default(); n];
    // d1 v1 + i d2 v1 and d1 v2 + i d2 v2
    let mut zg1 = vec![Complex64::default(); n];
    let mut zg2 = vec![Complex64::default(); n];
    let (u1, u2) = (u.component(0), u.component(1));
    let (v1, v2) = (v.component(0), v.component(1));
    for idx in 0..n {
        if !keep(idx) {
            continue;
        }
        let (q1, q2) = grid.wavevector(idx);
        zu[idx] = u1[idx] + i * u2[idx];
        let (d1v1, d2v1) = (i * q1 * v1[idx], i * q2 * v1[idx]);
        let (d1v2, d2v2) = (i * q1 * v2[idx], i * q2 * v2[idx]);
        zg1[idx] = d1v1 + i * d2v1;
        zg2[idx] = d1v2 + i * d2v2;
    }
    fft.inverse(&mut zu);
    fft.inverse(&mut zg1);
    fft.inverse(&mut zg2);

    let mut prod = vec![Complex64::default(); n];
    for j in 0..n {
        let (a1, a2) = (zu[j].re, zu[j].im);
        let n1 = a1 * zg1[j].re + a2 * zg1[j].im;
        let n2 = a1 * zg2[j].re + a2 * zg2[j].im;
        prod[j] = Complex64::new(n1, n2);
    }
    fft.forward(&mut prod);
    let mut out = SpectralVelocity::zeros(grid);
    unpack_real_pair(grid, &prod, 1.0 / n as f64, &mut out);
    dealias(&mut out);
    out
}

/// `(sum_k lambda(k)^s |c(k)|^2 L^2)^{1/2}`.
///
/// `s = 0` is the L^2 norm (mean included), `s = 1` the H^1 seminorm,
/// `s = -1` the dual norm (mean excluded).
pub fn sobolev_norm(f: &SpectralVelocity, s: f64) -> f64 {
    let grid = f.grid();
    let (a, b) = (f.component(0), f.component(1));
    let mut sum = 0.0;
    for idx in 0..grid.len() {
        let m = a[idx].norm_sqr() + b[idx].norm_sqr();
        if m == 0.0 {
            continue;
        }
        let w = if idx == 0 {
            if s == 0.0 {
                1.0
            } else {
                0.0
            }
        } else if s == 0.0 {
            1.0
        } else if s == 1.0 {
            grid.lambda(idx)
        } else if s == -1.0 {
            1.0 / grid.lambda(idx)
        } else {
            grid.lambda(idx).powf(s)
        };
        sum += w * m;
    }
    (sum * grid.area()).sqrt()
}

pub fn l2_norm(f: &SpectralVelocity) -> f64 {
    sobolev_norm(f, 0.0)
}

pub fn h1_norm(f: &SpectralVelocity) -> f64 {
    sobolev_norm(f, 1.0)
}

/// Grashof number `|g|_{L^2} / (nu^2 lambda_1)`.
pub fn grashof(g: &SpectralVelocity, nu: f64, lambda1: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!("viscosity must be positive, got {nu}")));
    }
    Ok(l2_norm(g) / (nu * nu * lambda1))
}

/// `L_N = [1 + log(lambda_N / lambda_1)]^{1/2}` with `lambda_N` the largest
/// eigenvalue retained by the shell.
pub fn log_factor(cut: &ShellCutoff, lambda1: f64) -> Result<f64> {
    let ksq = cut.max_retained_ksq().ok_or_else(|| {
        Error::EmptyShell(format!("no nonzero modes with |k| <= {}", cut.kappa()))
    })?;
    let lambda_n = lambda1 * ksq as f64;
    Ok(log_factor_from_ratio(lambda_n / lambda1))
}

pub fn log_factor_from_ratio(ratio: f64) -> f64 {
    (1.0 + ratio.ln()).sqrt()
}

/// Validates that two fields share a grid and returns it.
#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PhysicalVelocity;
    use crate::grid::make_grid;
    use crate::random::{random_field, FieldKind};
    use std::f64::consts::PI;

    fn tp() -> f64 {
        2.0 * PI
    }

    #[test]
    fn leray_kills_gradients() {
        let g = make_grid(tp(), 16).unwrap();
        // c(k) = k * phi(k) with Hermitian phi
        let f = SpectralVelocity::from_fn(&g, |k1, k2| {
            let phi = Complex64::new(0.0, (k1 - 2 * k2) as f64) / (1.0 + (k1 * k1 + k2 * k2) as f64);
            [phi * k1 as f64, phi * k2 as f64]
        });
        let p = leray_project(&f);
        assert!(p.max_abs() < 1e-15);
    }

    #[test]
    fn leray_examples() {
        let g = make_grid(tp(), 16).unwrap();
        // (sin y, 0): c1(0, +-1) = -+i/2
        let siny = SpectralVelocity::from_fn(&g, |k1, k2| match (k1, k2) {
            (0, 1) => [Complex64::new(0.0, -0.5), Complex64::default()],
            (0, -1) => [Complex64::new(0.0, 0.5), Complex64::default()],
            _ => [Complex64::default(); 2],
        });
        let p = leray_project(&siny);
        assert!((&p - &siny).max_abs() == 0.0);

        let sinx = PhysicalVelocity::from_fn(&g, |x, _| [x.sin(), 0.0]).to_spectral();
        assert!(leray_project(&sinx).max_abs() < 1e-15);
    }

    #[test]
    fn leray_idempotent_bit_exact() {
        let g = make_grid(3.0, 32).unwrap();
        let f = random_field(&g, FieldKind::Raw, 10.0, 7);
        let once = leray_project(&f);
        let twice = leray_project(&once);
        for c in 0..2 {
            assert_eq!(once.component(c), twice.component(c));
        }
        assert!(once.max_divergence() <= 1e-12);
    }

    #[test]
    fn stokes_examples() {
        let g = make_grid(tp(), 16).unwrap();
        let mut f = SpectralVelocity::zeros(&g);
        f.set_coeff(g.index(1, 0), [Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.1)]);
        let a = stokes_apply(&f, 1.0).unwrap();
        assert!((&a - &f).max_abs() < 1e-15);

        let mut f = SpectralVelocity::zeros(&g);
        f.set_coeff(g.index(1, 1), [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
        let a = stokes_apply(&f, -1.0).unwrap();
        assert!((a.at(1, 1)[0] - Complex64::new(0.5, 0.0)).norm() < 1e-15);

        let r = random_field(&g, FieldKind::Solenoidal, 5.0, 1);
        assert_eq!(stokes_apply(&r, 0.0).unwrap().component(0), r.component(0));
        let back = stokes_apply(&stokes_apply(&r, 0.7).unwrap(), -0.7).unwrap();
        assert!((&back - &r).max_abs() < 1e-14);

        let mut m = r.clone();
        m.set_coeff(0, [Complex64::new(1.0, 0.0), Complex64::default()]);
        assert!(matches!(stokes_apply(&m, -1.0), Err(Error::NonZeroMean(_))));
        assert!(stokes_apply(&m, 1.0).is_ok());
    }

    #[test]
    fn shell_projector_examples() {
        let g = make_grid(tp(), 16).unwrap();
        let cut = ShellCutoff::new(2.0).unwrap();
        let mut f = SpectralVelocity::zeros(&g);
        for (k1, k2) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            f.set_coeff(g.index(k1, k2), [Complex64::new(0.2, 0.0), Complex64::new(0.1, 0.0)]);
        }
        assert_eq!(project_low(&f, &cut).component(0), f.component(0));
        assert_eq!(project_high(&f, &cut).max_abs(), 0.0);

        let mut f = SpectralVelocity::zeros(&g);
        f.set_coeff(g.index(1, 2), [Complex64::new(0.2, 0.0), Complex64::new(-0.1, 0.0)]);
        f.set_coeff(g.index(-1, -2), [Complex64::new(0.2, 0.0), Complex64::new(-0.1, 0.0)]);
        assert_eq!(project_low(&f, &cut).max_abs(), 0.0);
    }

    #[test]
    fn sobolev_examples() {
        let g = make_grid(tp(), 16).unwrap();
        let sinx = PhysicalVelocity::from_fn(&g, |x, _| [x.sin(), 0.0]).to_spectral();
        let expect = PI * 2f64.sqrt();
        assert!((sobolev_norm(&sinx, 0.0) - expect).abs() < 1e-12);
        assert!((sobolev_norm(&sinx, 1.0) - expect).abs() < 1e-12);
        let z = SpectralVelocity::zeros(&g);
        for s in [-1.0, 0.0, 1.0] {
            assert_eq!(sobolev_norm(&z, s), 0.0);
        }
    }

    #[test]
    fn parseval_matches_quadrature() {
        let g = make_grid(1.7, 24).unwrap();
        let f = random_field(&g, FieldKind::Solenoidal, 7.0, 3);
        let quad = f.to_physical().l2_norm_sqr();
        let spec = sobolev_norm(&f, 0.0).powi(2);
        assert!((quad - spec).abs() <= 1e-10 * spec);
    }

    #[test]
    fn poincare_holds() {
        let g = make_grid(2.5, 16).unwrap();
        for seed in 0..20 {
            let f = random_field(&g, FieldKind::Solenoidal, 5.0, seed);
            assert!(g.lambda1().sqrt() * l2_norm(&f) <= h1_norm(&f) * (1.0 + 1e-15));
        }
    }

    #[test]
    fn grashof_examples() {
        let g = make_grid(tp(), 16).unwrap();
        let z = SpectralVelocity::zeros(&g);
        assert_eq!(grashof(&z, 0.1, 1.0).unwrap(), 0.0);
        assert!(grashof(&z, 0.0, 1.0).is_err());
        assert!(grashof(&z, -1.0, 1.0).is_err());
        // |g| = 0.05
        let mut f = random_field(&g, FieldKind::Solenoidal, 4.0, 9);
        let s = 0.05 / l2_norm(&f);
        f = f.scaled(s);
        assert!((grashof(&f, 0.1, 1.0).unwrap() - 5.0).abs() < 1e-12);
        // |g| = nu^2 lambda1
        let f2 = f.scaled(0.01 * 2.0 / 0.05);
        assert!((grashof(&f2, 0.1, 2.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_factor_examples() {
        assert_eq!(log_factor_from_ratio(1.0), 1.0);
        assert!((log_factor_from_ratio(std::f64::consts::E) - 2f64.sqrt()).abs() < 1e-15);
        let cut = ShellCutoff::new(4.0).unwrap();
        let l = log_factor(&cut, 1.0).unwrap();
        assert!((l - (1.0 + 16f64.ln()).sqrt()).abs() < 1e-15);
        assert!((l - 1.94232).abs() < 1e-5);
        assert_eq!(log_factor(&ShellCutoff::new(1.0).unwrap(), 1.0).unwrap(), 1.0);
        assert!(matches!(log_factor(&ShellCutoff::new(0.9).unwrap(), 1.0), Err(Error::EmptyShell(_))));
    }

    #[test]
    fn bilinear_zero_input() {
        let g = make_grid(tp(), 16).unwrap();
        let v = random_field(&g, FieldKind::Solenoidal, 5.0, 2);
        let z = SpectralVelocity::zeros(&g);
        assert_eq!(bilinear_b(&z, &v).unwrap().max_abs(), 0.0);
        let other = make_grid(tp(), 8).unwrap();
        assert!(bilinear_b(&SpectralVelocity::zeros(&other), &v).is_err());
    }

    #[test]
    fn taylor_green_is_annihilated() {
        let g = make_grid(tp(), 32).unwrap();
        let u = PhysicalVelocity::from_fn(&g, |x, y| [x.sin() * y.cos(), -x.cos() * y.sin()]).to_spectral();
        let b = bilinear_b(&u, &u).unwrap();
        assert!(l2_norm(&b) < 1e-12);
        // the advection itself is the gradient (sin 2x, sin 2y) / 2
        let adv = advection(&u, &u);
        let expect = PhysicalVelocity::from_fn(&g, |x, y| [0.5 * (2.0 * x).sin(), 0.5 * (2.0 * y).sin()]).to_spectral();
        assert!((&adv - &expect).max_abs() < 1e-15);
    }
}
