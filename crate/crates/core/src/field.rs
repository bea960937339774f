//! Velocity fields in spectral and physical representation.
//!
//! A field is `u(x) = sum_k c(k) exp(2 pi i k.x / L)`, so the L^2 norm is
//! `|u|^2 = L^2 sum_k |c(k)|^2`.

use std::ops::{Add, Mul, Neg, Sub};

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::WaveGrid;

/// Complex Fourier coefficients of a real 2-vector field, one entry per mode
/// and component, in the grid's wrapped ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralVelocity {
    grid: WaveGrid,
    coeff: [Vec<Complex64>; 2],
}

/// Point values of a real 2-vector field on the `M x M` grid;
/// entry `j1 * M + j2` sits at `(j1 L / M, j2 L / M)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalVelocity {
    grid: WaveGrid,
    values: [Vec<f64>; 2],
}

impl SpectralVelocity {
    pub fn zeros(grid: &WaveGrid) -> Self {
        let n = grid.len();
        SpectralVelocity {
            grid: grid.clone(),
            coeff: [vec![Complex64::default(); n], vec![Complex64::default(); n]],
        }
    }

    pub fn from_components(grid: &WaveGrid, first: Vec<Complex64>, second: Vec<Complex64>) -> Result<Self> {
        if first.len() != grid.len() || second.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} coefficients per component, got {} and {}",
                grid.len(),
                first.len(),
                second.len()
            )));
        }
        Ok(SpectralVelocity {
            grid: grid.clone(),
            coeff: [first, second],
        })
    }

    /// Builds a field from a closure returning the coefficient pair at `(k1, k2)`.
    pub fn from_fn(grid: &WaveGrid, mut f: impl FnMut(i64, i64) -> [Complex64; 2]) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            let (k1, k2) = grid.mode(idx);
            let [a, b] = f(k1, k2);
            out.coeff[0][idx] = a;
            out.coeff[1][idx] = b;
        }
        out
    }

    pub fn grid(&self) -> &WaveGrid {
        &self.grid
    }

    pub fn component(&self, i: usize) -> &[Complex64] {
        &self.coeff[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.coeff[i]
    }

    pub fn components_mut(&mut self) -> (&mut [Complex64], &mut [Complex64]) {
        let [a, b] = &mut self.coeff;
        (a, b)
    }

    pub fn coeff(&self, idx: usize) -> [Complex64; 2] {
        [self.coeff[0][idx], self.coeff[1][idx]]
    }

    pub fn set_coeff(&mut self, idx: usize, value: [Complex64; 2]) {
        self.coeff[0][idx] = value[0];
        self.coeff[1][idx] = value[1];
    }

    pub fn at(&self, k1: i64, k2: i64) -> [Complex64; 2] {
        self.coeff(self.grid.index(k1, k2))
    }

    /// Spatial mean (the `k = 0` coefficient).
    pub fn mean(&self) -> [Complex64; 2] {
        self.coeff(0)
    }

    pub fn has_zero_mean(&self) -> bool {
        let [a, b] = self.mean();
        a == Complex64::default() && b == Complex64::default()
    }

    pub fn is_finite(&self) -> bool {
        self.coeff
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    pub fn check_same_grid(&self, other: &SpectralVelocity) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// `(u, v)_{L^2}`.
    pub fn inner(&self, other: &SpectralVelocity) -> f64 {
        debug_assert!(self.grid == other.grid);
        let mut s = 0.0;
        for c in 0..2 {
            for (a, b) in self.coeff[c].iter().zip(&other.coeff[c]) {
                s += a.re * b.re + a.im * b.im;
            }
        }
        s * self.grid.area()
    }

    /// Largest `|c(k)|` over modes and components.
    pub fn max_abs(&self) -> f64 {
        self.coeff
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Max over modes of `|k.c(k)| / |c(k)|` (modes with `c = 0` skipped).
    pub fn max_divergence(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let (k1, k2) = self.grid.mode(idx);
            let [a, b] = self.coeff(idx);
            let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
            if norm > 0.0 {
                let div = (a * k1 as f64 + b * k2 as f64).norm();
                worst = worst.max(div / norm);
            }
        }
        worst
    }

    /// Largest violation of `c(-k) = conj(c(k))` relative to `max_abs`.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let j = self.grid.conjugate_index(idx);
            for c in 0..2 {
                worst = worst.max((self.coeff[c][idx] - self.coeff[c][j].conj()).norm());
            }
        }
        worst / scale
    }

    /// Zeroes every mode for which `keep` returns false.
    pub fn retain_modes(&mut self, mut keep: impl FnMut(usize) -> bool) {
        for idx in 0..self.grid.len() {
            if !keep(idx) {
                self.coeff[0][idx] = Complex64::default();
                self.coeff[1][idx] = Complex64::default();
            }
        }
    }

    /// Scales every mode by a real factor depending on the mode index.
    pub fn scale_modes(&mut self, mut factor: impl FnMut(usize) -> f64) {
        for idx in 0..self.grid.len() {
            let s = factor(idx);
            self.coeff[0][idx] *= s;
            self.coeff[1][idx] *= s;
        }
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralVelocity) {
        debug_assert!(self.grid == other.grid);
        for c in 0..2 {
            for (x, y) in self.coeff[c].iter_mut().zip(&other.coeff[c]) {
                *x += y * a;
            }
        }
    }

    pub fn scaled(&self, a: f64) -> SpectralVelocity {
        let mut out = self.clone();
        out.scale_modes(|_| a);
        out
    }

    /// Spectral interpolation onto another grid of the same side length:
    /// modes present on both grids are copied, the rest are zero.
    /// Nyquist modes of the source are dropped.
    pub fn resample(&self, target: &WaveGrid) -> Result<SpectralVelocity> {
        if target.length().to_bits() != self.grid.length().to_bits() {
            return Err(Error::GridMismatch("resampling requires equal side lengths".into()));
        }
        let mut out = SpectralVelocity::zeros(target);
        let src_half = (self.grid.points() / 2) as i64;
        let dst_half = (target.points() / 2) as i64;
        let half = src_half.min(dst_half);
        for k1 in (1 - half)..half {
            for k2 in (1 - half)..half {
                let v = self.at(k1, k2);
                out.set_coeff(target.index(k1, k2), v);
            }
        }
        Ok(out)
    }

    /// Inverse transform to grid point values.
    pub fn to_physical(&self) -> PhysicalVelocity {
        let fft = self.grid.fft();
        let n = self.grid.len();
        // pack both real components into one complex transform
        let mut z: Vec<Complex64> = (0..n)
            .map(|i| self.coeff[0][i] + Complex64::i() * self.coeff[1][i])
            .collect();
        fft.inverse(&mut z);
        PhysicalVelocity {
            grid: self.grid.clone(),
            values: [z.iter().map(|c| c.re).collect(), z.iter().map(|c| c.im).collect()],
        }
    }
}

impl PhysicalVelocity {
    pub fn zeros(grid: &WaveGrid) -> Self {
        PhysicalVelocity {
            grid: grid.clone(),
            values: [vec![0.0; grid.len()], vec![0.0; grid.len()]],
        }
    }

    /// Samples `f(x, y)` at the grid points.
    pub fn from_fn(grid: &WaveGrid, mut f: impl FnMut(f64, f64) -> [f64; 2]) -> Self {
        let n = grid.points();
        let h = grid.length() / n as f64;
        let mut out = Self::zeros(grid);
        for j1 in 0..n {
            for j2 in 0..n {
                let [a, b] = f(j1 as f64 * h, j2 as f64 * h);
                out.values[0][j1 * n + j2] = a;
                out.values[1][j1 * n + j2] = b;
            }
        }
        out
    }

    pub fn grid(&self) -> &WaveGrid {
        &self.grid
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i]
    }

    /// Midpoint-rule quadrature of `|u|^2` over the torus.
    pub fn l2_norm_sqr(&self) -> f64 {
        let cell = self.grid.area() / self.grid.len() as f64;
        self.values
            .iter()
            .flat_map(|v| v.iter())
            .map(|x| x * x)
            .sum::<f64>()
            * cell
    }

    /// Forward transform; `c(k) = M^{-2} sum_j u(x_j) exp(-2 pi i k.x_j / L)`.
    pub fn to_spectral(&self) -> SpectralVelocity {
        let grid = &self.grid;
        let n = grid.len();
        let mut z: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(self.values[0][i], self.values[1][i]))
            .collect();
        grid.fft().forward(&mut z);
        let scale = 1.0 / n as f64;
        let mut out = SpectralVelocity::zeros(grid);
        unpack_real_pair(grid, &z, scale, &mut out);
        out
    }
}

/// Splits the transform `Z = A + iB` of two real signals into `A` and `B`.
pub(crate) fn unpack_real_pair(grid: &WaveGrid, z: &[Complex64], scale: f64, out: &mut SpectralVelocity) {
    let half = Complex64::new(0.5 * scale, 0.0);
    let minus_half_i = Complex64::new(0.0, -0.5 * scale);
    let (a, b) = out.components_mut();
    for idx in 0..grid.len() {
        let zk = z[idx];
        let zc = z[grid.conjugate_index(idx)].conj();
        a[idx] = (zk + zc) * half;
        b[idx] = (zk - zc) * minus_half_i;
    }
}

impl Add for &SpectralVelocity {
    type Output = SpectralVelocity;
    fn add(self, rhs: &SpectralVelocity) -> SpectralVelocity {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &SpectralVelocity {
    type Output = SpectralVelocity;
    fn sub(self, rhs: &SpectralVelocity) -> SpectralVelocity {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Neg for &SpectralVelocity {
    type Output = SpectralVelocity;
    fn neg(self) -> SpectralVelocity {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for &SpectralVelocity {
    type Output = SpectralVelocity;
    fn mul(self, rhs: f64) -> SpectralVelocity {
        self.scaled(rhs)
    }
}
