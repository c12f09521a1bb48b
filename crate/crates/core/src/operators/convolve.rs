//! Linear convolution of a grid field with symmetric kernel taps through real FFTs.

use std::sync::Arc;

use realfft::num_complex::Complex;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

/// Smallest `2^a 3^b >= n`.
fn fft_size(n: usize) -> usize {
    let mut best = usize::MAX;
    let mut p3 = 1usize;
    while p3 < 2 * n {
        let mut p = p3;
        while p < n {
            p *= 2;
        }
        best = best.min(p);
        p3 *= 3;
    }
    best
}

/// FFT plans for `out_i = sum_j taps[|i - j|] f_j` on `n` points.
pub struct Convolver {
    n: usize,
    size: usize,
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
}

pub type Spectrum = Vec<Complex<f64>>;

impl std::fmt::Debug for Convolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Convolver {{ n: {}, size: {} }}", self.n, self.size)
    }
}

impl Convolver {
    pub fn new(n: usize) -> Self {
        let size = fft_size(3 * n - 2);
        let mut planner = RealFftPlanner::<f64>::new();
        Self { n, size, forward: planner.plan_fft_forward(size), inverse: planner.plan_fft_inverse(size) }
    }

    pub fn spectrum_len(&self) -> usize {
        self.size / 2 + 1
    }

    /// Spectrum of the kernel with offsets `-(n-1)..=(n-1)`; `taps[m]` is the weight at offset `+-m`.
    pub fn kernel_spectrum(&self, taps: &[f64]) -> Spectrum {
        debug_assert_eq!(taps.len(), self.n);
        let mut buf = vec![0.0; self.size];
        let c = self.n - 1;
        buf[c] = taps[0];
        for m in 1..self.n {
            buf[c + m] = taps[m];
            buf[c - m] = taps[m];
        }
        self.transform(buf)
    }

    pub fn signal_spectrum(&self, f: &[f64]) -> Spectrum {
        let mut buf = vec![0.0; self.size];
        buf[..self.n].copy_from_slice(f);
        self.transform(buf)
    }

    fn transform(&self, mut buf: Vec<f64>) -> Spectrum {
        let mut out = self.forward.make_output_vec();
        self.forward.process(&mut buf, &mut out).expect("buffer sizes match the plan");
        out
    }

    /// Back to the grid: picks the `n` outputs aligned with the signal.
    pub fn invert(&self, mut spec: Spectrum) -> Vec<f64> {
        spec[0].im = 0.0;
        if self.size % 2 == 0 {
            spec[self.size / 2].im = 0.0;
        }
        let mut buf = self.inverse.make_output_vec();
        self.inverse.process(&mut spec, &mut buf).expect("buffer sizes match the plan");
        let scale = 1.0 / self.size as f64;
        buf[self.n - 1..2 * self.n - 1].iter().map(|v| v * scale).collect()
    }

    pub fn convolve(&self, taps: &[f64], f: &[f64]) -> Vec<f64> {
        let k = self.kernel_spectrum(taps);
        let s = self.signal_spectrum(f);
        self.invert(k.iter().zip(&s).map(|(a, b)| a * b).collect())
    }
}

/// `acc += a * b` elementwise.
pub(crate) fn multiply_accumulate(acc: &mut [Complex<f64>], a: &[Complex<f64>], b: &[Complex<f64>]) {
    for ((c, x), y) in acc.iter_mut().zip(a).zip(b) {
        *c += x * y;
    }
}
