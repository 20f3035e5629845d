//! Complex FFTs: iterative radix-2 for power-of-two lengths, Bluestein's
//! chirp-z for everything else, and a row/column 2D wrapper.
//!
//! Forward transforms are unnormalized; inverse transforms divide by `n`.
//! Twiddles are evaluated directly (no recurrence) so a plan is bit-for-bit
//! reproducible.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // unused whenever std is linked
use num_traits::Float;

#[derive(Debug, Clone)]
enum Plan {
    Radix2 { twiddles: Vec<Complex64>, bitrev: Vec<u32> },
    Bluestein { m: usize, chirp: Vec<Complex64>, kernel_hat: Vec<Complex64>, inner: Box<Fft> },
}

/// One-dimensional FFT plan.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    plan: Plan,
}

impl Fft {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "FFT length must be positive");
        if n.is_power_of_two() {
            let twiddles = (0..n / 2)
                .map(|k| {
                    let a = -2.0 * PI * k as f64 / n as f64;
                    Complex64::new(a.cos(), a.sin())
                })
                .collect();
            let bits = n.trailing_zeros();
            let bitrev = (0..n as u32).map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (32 - bits) }).collect();
            return Self { n, plan: Plan::Radix2 { twiddles, bitrev } };
        }
        let m = (2 * n - 1).next_power_of_two();
        // exp(-iπk²/n); k² reduced mod 2n keeps the argument small.
        let chirp: Vec<Complex64> = (0..n)
            .map(|k| {
                let k2 = (k as u128 * k as u128 % (2 * n as u128)) as f64;
                let a = -PI * k2 / n as f64;
                Complex64::new(a.cos(), a.sin())
            })
            .collect();
        let inner = Box::new(Fft::new(m));
        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        kernel[0] = chirp[0].conj();
        for k in 1..n {
            kernel[k] = chirp[k].conj();
            kernel[m - k] = chirp[k].conj();
        }
        inner.forward(&mut kernel);
        Self { n, plan: Plan::Bluestein { m, chirp, kernel_hat: kernel, inner } }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In-place forward transform, `X_k = Σ x_j exp(-2πi jk/n)`.
    pub fn forward(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n, "buffer length does not match plan");
        match &self.plan {
            Plan::Radix2 { twiddles, bitrev } => radix2(buf, twiddles, bitrev),
            Plan::Bluestein { m, chirp, kernel_hat, inner } => {
                let mut work = vec![Complex64::new(0.0, 0.0); *m];
                for (w, (x, c)) in work.iter_mut().zip(buf.iter().zip(chirp)) {
                    *w = x * c;
                }
                inner.forward(&mut work);
                for (w, k) in work.iter_mut().zip(kernel_hat) {
                    *w *= k;
                }
                inner.inverse(&mut work);
                for (x, (w, c)) in buf.iter_mut().zip(work.iter().zip(chirp)) {
                    *x = w * c;
                }
            }
        }
    }

    /// In-place inverse transform including the `1/n` factor.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        for z in buf.iter_mut() {
            *z = z.conj();
        }
        self.forward(buf);
        let s = 1.0 / self.n as f64;
        for z in buf.iter_mut() {
            *z = z.conj() * s;
        }
    }
}

fn radix2(buf: &mut [Complex64], twiddles: &[Complex64], bitrev: &[u32]) {
    let n = buf.len();
    for (i, &j) in bitrev.iter().enumerate() {
        let j = j as usize;
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

/// Two-dimensional FFT over row-major `ny` x `nx` data.
#[derive(Debug, Clone)]
pub struct Fft2 {
    nx: usize,
    ny: usize,
    rows: Fft,
    cols: Fft,
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let rows = Fft::new(nx);
        let cols = if ny == nx { rows.clone() } else { Fft::new(ny) };
        Self { nx, ny, rows, cols }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.apply(data, false);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.apply(data, true);
    }

    fn apply(&self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.nx * self.ny, "buffer length does not match plan");
        for row in data.chunks_exact_mut(self.nx) {
            if inverse {
                self.rows.inverse(row);
            } else {
                self.rows.forward(row);
            }
        }
        // Columns are processed in blocks to keep the gathers cache friendly.
        const BLOCK: usize = 8;
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.ny * BLOCK];
        let mut i0 = 0;
        while i0 < self.nx {
            let w = BLOCK.min(self.nx - i0);
            for j in 0..self.ny {
                let row = &data[j * self.nx + i0..j * self.nx + i0 + w];
                for (b, v) in row.iter().enumerate() {
                    scratch[b * self.ny + j] = *v;
                }
            }
            for b in 0..w {
                let col = &mut scratch[b * self.ny..(b + 1) * self.ny];
                if inverse {
                    self.cols.inverse(col);
                } else {
                    self.cols.forward(col);
                }
            }
            for j in 0..self.ny {
                for b in 0..w {
                    data[j * self.nx + i0 + b] = scratch[b * self.ny + j];
                }
            }
            i0 += w;
        }
    }
}

/// Signed frequency index of FFT bin `k` for length `n` (numpy `fftfreq` order).
#[inline]
pub fn signed_bin(k: usize, n: usize) -> i64 {
    if k < n.div_ceil(2) {
        k as i64
    } else {
        k as i64 - n as i64
    }
}
