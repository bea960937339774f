//! Wavenumber grids on the periodic square `[0, L)^2` and spectral shell cutoffs.
//!
//! Modes are stored in FFT ("wrapped") order: flat index `i1 * M + i2`, where
//! `i` maps to the signed wavenumber `i` for `i <= M/2` and `i - M` otherwise.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fft::Fft2;

struct GridTables {
    ksq: Vec<u32>,
    lambda: Vec<f64>,
    dealiased: Vec<bool>,
    fft: Fft2,
}

/// Torus side length, physical resolution and the per-mode Stokes spectrum.
#[derive(Clone)]
pub struct WaveGrid {
    length: f64,
    points: usize,
    tables: Arc<GridTables>,
}

impl fmt::Debug for WaveGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WaveGrid")
            .field("length", &self.length)
            .field("points", &self.points)
            .finish()
    }
}

impl PartialEq for WaveGrid {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.length.to_bits() == other.length.to_bits()
    }
}

/// Builds a grid with `points` samples per axis on a torus of side `length`.
pub fn make_grid(length: f64, points: usize) -> Result<WaveGrid> {
    WaveGrid::new(length, points)
}

impl WaveGrid {
    pub fn new(length: f64, points: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "side length must be positive, got {length}"
            )));
        }
        if !points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "M must be even, got {points}"
            )));
        }
        if points < 8 {
            return Err(Error::InvalidGrid(format!(
                "M must be at least 8, got {points}"
            )));
        }
        let n = points;
        let scale = (2.0 * PI / length).powi(2);
        let mut ksq = Vec::with_capacity(n * n);
        let mut lambda = Vec::with_capacity(n * n);
        let mut dealiased = Vec::with_capacity(n * n);
        for i1 in 0..n {
            for i2 in 0..n {
                let (k1, k2) = (wrap(i1, n), wrap(i2, n));
                let s = (k1 * k1 + k2 * k2) as u32;
                ksq.push(s);
                lambda.push(scale * s as f64);
                // 2/3 rule in the max norm; strict so that products of kept
                // modes never alias back onto kept modes.
                dealiased.push(3 * k1.unsigned_abs() < n as u64 && 3 * k2.unsigned_abs() < n as u64);
            }
        }
        Ok(WaveGrid {
            length,
            points,
            tables: Arc::new(GridTables {
                ksq,
                lambda,
                dealiased,
                fft: Fft2::new(n),
            }),
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Physical grid points per axis.
    pub fn points(&self) -> usize {
        self.points
    }

    /// Number of modes (`M^2`).
    pub fn len(&self) -> usize {
        self.points * self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dealias_radius(&self) -> usize {
        self.points / 3
    }

    /// `(2 pi / L)^2`, the smallest nonzero Stokes eigenvalue.
    pub fn lambda1(&self) -> f64 {
        (2.0 * PI / self.length).powi(2)
    }

    /// `|Omega| = L^2`.
    pub fn area(&self) -> f64 {
        self.length * self.length
    }

    pub fn index(&self, k1: i64, k2: i64) -> usize {
        let n = self.points as i64;
        (k1.rem_euclid(n) * n + k2.rem_euclid(n)) as usize
    }

    /// Signed wavenumber pair of flat index `idx`.
    pub fn mode(&self, idx: usize) -> (i64, i64) {
        (wrap(idx / self.points, self.points), wrap(idx % self.points, self.points))
    }

    /// Flat index of `-k`.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.points;
        let (i1, i2) = (idx / n, idx % n);
        ((n - i1) % n) * n + (n - i2) % n
    }

    pub fn ksq(&self, idx: usize) -> u32 {
        self.tables.ksq[idx]
    }

    pub fn lambda(&self, idx: usize) -> f64 {
        self.tables.lambda[idx]
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.tables.lambda
    }

    pub fn ksqs(&self) -> &[u32] {
        &self.tables.ksq
    }

    /// Whether mode `idx` survives 2/3-rule truncation.
    pub fn is_dealiased(&self, idx: usize) -> bool {
        self.tables.dealiased[idx]
    }

    /// Physical wavevector `2 pi k / L`.
    pub fn wavevector(&self, idx: usize) -> (f64, f64) {
        let (k1, k2) = self.mode(idx);
        let s = 2.0 * PI / self.length;
        (s * k1 as f64, s * k2 as f64)
    }

    pub(crate) fn fft(&self) -> &Fft2 {
        &self.tables.fft
    }
}

fn wrap(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn is_sum_of_two_squares(n: u64) -> bool {
    let mut a = 0u64;
    while a * a <= n {
        let rest = n - a * a;
        let b = (rest as f64).sqrt().round() as u64;
        if b * b == rest {
            return true;
        }
        a += 1;
    }
    false
}

/// The `m`-th smallest nonzero eigenvalue of the Stokes operator on the torus
/// of side `length`, counted with multiplicity (one per nonzero integer vector).
pub fn eigenvalue_by_index(m: usize, length: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("eigenvalue index starts at 1".into()));
    }
    let mut counted = 0usize;
    let mut n = 1u64;
    loop {
        let mult = multiplicity(n);
        counted += mult;
        if counted >= m {
            return Ok((2.0 * PI / length).powi(2) * n as f64);
        }
        n += 1;
    }
}

/// Number of integer vectors `k` with `|k|^2 = n`.
fn multiplicity(n: u64) -> usize {
    let r = (n as f64).sqrt().ceil() as i64 + 1;
    let mut count = 0;
    for a in -r..=r {
        for b in -r..=r {
            if (a * a + b * b) as u64 == n {
                count += 1;
            }
        }
    }
    count
}

/// Spectral shell `|k| <= kappa` defining the low-mode projector `P_kappa`
/// and its complement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShellCutoff {
    kappa: f64,
    /// Largest integer `|k|^2` inside the shell.
    ksq_max: u32,
}

impl ShellCutoff {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "shell radius must be nonnegative, got {kappa}"
            )));
        }
        // Tolerate radii such as sqrt(5) that are not exactly representable.
        let ksq_max = (kappa * kappa + 1e-9).floor() as u32;
        Ok(ShellCutoff { kappa, ksq_max })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Largest integer `|k|^2` retained.
    pub fn ksq_max(&self) -> u32 {
        self.ksq_max
    }

    pub fn contains_ksq(&self, ksq: u32) -> bool {
        ksq <= self.ksq_max
    }

    /// Smallest realizable `|k|^2` strictly outside the shell.
    pub fn next_ksq(&self) -> u32 {
        let mut n = self.ksq_max as u64 + 1;
        while !is_sum_of_two_squares(n) {
            n += 1;
        }
        n as u32
    }

    /// `lambda_{N+1} = (2 pi / L)^2 min{|k|^2 : |k|^2 > kappa^2}`.
    pub fn lambda_next(&self, grid: &WaveGrid) -> f64 {
        grid.lambda1() * self.next_ksq() as f64
    }

    /// Largest realizable nonzero `|k|^2` inside the shell, if any.
    pub fn max_retained_ksq(&self) -> Option<u32> {
        (1..=self.ksq_max as u64)
            .rev()
            .find(|&n| is_sum_of_two_squares(n))
            .map(|n| n as u32)
    }

    /// Largest retained eigenvalue `lambda_N`.
    pub fn lambda_max_retained(&self, grid: &WaveGrid) -> Option<f64> {
        self.max_retained_ksq().map(|n| grid.lambda1() * n as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_examples() {
        let g = make_grid(2.0 * PI, 16).unwrap();
        assert!((g.lambda1() - 1.0).abs() < 1e-14);
        assert_eq!(g.dealias_radius(), 5);

        let g = make_grid(1.0, 16).unwrap();
        assert!((g.lambda1() - 4.0 * PI * PI).abs() < 1e-12);
        assert!((g.lambda1() - 39.478).abs() < 1e-3);

        assert!(matches!(make_grid(2.0 * PI, 7), Err(Error::InvalidGrid(_))));
        assert!(make_grid(2.0 * PI, 6).is_err());
        assert!(make_grid(0.0, 16).is_err());
        assert!(make_grid(-1.0, 16).is_err());
    }

    #[test]
    fn lambda_symmetries() {
        let g = make_grid(3.0, 12).unwrap();
        let mut min_nonzero = f64::INFINITY;
        for idx in 0..g.len() {
            let (k1, k2) = g.mode(idx);
            let lam = g.lambda(idx);
            if (k1, k2) != (0, 0) {
                assert!(lam > 0.0);
                min_nonzero = min_nonzero.min(lam);
            }
            if k1.abs() < 6 && k2.abs() < 6 {
                assert_eq!(lam, g.lambda(g.index(-k1, -k2)));
                assert_eq!(lam, g.lambda(g.index(k2, k1)));
            }
        }
        assert_eq!(min_nonzero, g.lambda1());
    }

    #[test]
    fn index_round_trip() {
        let g = make_grid(1.0, 10).unwrap();
        for idx in 0..g.len() {
            let (k1, k2) = g.mode(idx);
            assert_eq!(g.index(k1, k2), idx);
            let c = g.conjugate_index(idx);
            let (m1, m2) = g.mode(c);
            assert_eq!(((k1 + m1).rem_euclid(10), (k2 + m2).rem_euclid(10)), (0, 0));
        }
    }

    #[test]
    fn shell_next_and_retained() {
        let s = ShellCutoff::new(2.0).unwrap();
        assert_eq!(s.next_ksq(), 5);
        assert_eq!(s.max_retained_ksq(), Some(4));
        let s = ShellCutoff::new(4.0).unwrap();
        assert_eq!(s.next_ksq(), 17);
        let s = ShellCutoff::new(5f64.sqrt()).unwrap();
        assert_eq!(s.ksq_max(), 5);
        assert_eq!(s.next_ksq(), 8);
        let s = ShellCutoff::new(0.5).unwrap();
        assert_eq!(s.max_retained_ksq(), None);
        assert_eq!(s.next_ksq(), 1);
        // 3 and 6, 7 are not sums of two squares
        let s = ShellCutoff::new(2.5).unwrap();
        assert_eq!(s.ksq_max(), 6);
        assert_eq!(s.max_retained_ksq(), Some(5));
        assert_eq!(s.next_ksq(), 8);
    }

    #[test]
    fn eigenvalue_counting() {
        let l = 2.0 * PI;
        for m in 1..=4 {
            assert!((eigenvalue_by_index(m, l).unwrap() - 1.0).abs() < 1e-12);
        }
        for m in 5..=8 {
            assert!((eigenvalue_by_index(m, l).unwrap() - 2.0).abs() < 1e-12);
        }
        assert!((eigenvalue_by_index(9, l).unwrap() - 4.0).abs() < 1e-12);
        assert!(eigenvalue_by_index(0, l).is_err());
    }
}
