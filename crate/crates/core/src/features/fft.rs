use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;

/// Iterative radix-2 decimation-in-time FFT of a fixed power-of-two size.
#[derive(Debug, Clone)]
pub(crate) struct Fft {
    n: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Fft {
    pub(crate) fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "FFT size must be a power of two");
        let bits = n.trailing_zeros();
        let bitrev = (0..n).map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) }).collect();
        let twiddles = (0..n / 2)
            .map(|k| {
                let a = -TAU * k as f64 / n as f64;
                Complex64::new(libm::cos(a), libm::sin(a))
            })
            .collect();
        Fft { n, twiddles, bitrev }
    }

    pub(crate) fn len(&self) -> usize {
        self.n
    }

    /// Forward transform in place: `X_k = sum_j x_j e^{-2 pi i jk / n}`.
    pub(crate) fn process(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n);
        for i in 0..self.n {
            let j = self.bitrev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= self.n {
            let half = len / 2;
            let step = self.n / len;
            for chunk in buf.chunks_exact_mut(len) {
                let (lo, hi) = chunk.split_at_mut(half);
                for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let t = self.twiddles[k * step] * *b;
                    *b = *a - t;
                    *a += t;
                }
            }
            len *= 2;
        }
    }
}
