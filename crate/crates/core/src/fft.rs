use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Square 2D complex FFT of side `n`, row-major, unnormalized in both directions.
pub(crate) struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// `X[k] = sum_j x[j] exp(-2 pi i k.j / n)`.
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &*self.forward);
    }

    /// `x[j] = sum_k X[k] exp(+2 pi i k.j / n)`.
    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &*self.inverse);
    }

    fn run(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        debug_assert_eq!(data.len(), self.n * self.n);
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(data, &mut scratch);
        transpose(data, self.n);
        fft.process_with_scratch(data, &mut scratch);
        transpose(data, self.n);
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}
