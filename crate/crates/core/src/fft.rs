//! Radix-2 complex FFT on power-of-two lengths, plus a row-major
//! multi-dimensional driver.
//!
//! Only the positive-exponent transform `X_k = sum_j x_j e^{+2 pi i jk/M}`
//! is needed: it evaluates a trigonometric polynomial on an equispaced grid.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::turns::Turns;

#[derive(Clone, Debug)]
pub struct Radix2Plan {
    len: usize,
    twiddles: Vec<Complex64>,
}

impl Radix2Plan {
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "FFT length must be a power of two");
        let half = len / 2;
        let twiddles = (0..half)
            .map(|k| Turns::from_ratio(k as i128, len as u64).cis())
            .collect();
        Radix2Plan { len, twiddles }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place positive-exponent DFT.
    pub fn process(&self, data: &mut [Complex64]) {
        let n = self.len;
        assert_eq!(data.len(), n);
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                data.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            size *= 2;
        }
    }
}

/// Positive-exponent DFT over every axis of a row-major array.
pub fn fft_nd(data: &mut [Complex64], shape: &[usize]) {
    let total: usize = shape.iter().product();
    assert_eq!(data.len(), total);
    let mut line = Vec::new();
    for (axis, &len) in shape.iter().enumerate() {
        if len <= 1 {
            continue;
        }
        let plan = Radix2Plan::new(len);
        let inner: usize = shape[axis + 1..].iter().product();
        let outer = total / (len * inner);
        line.clear();
        line.resize(len, Complex64::new(0.0, 0.0));
        for o in 0..outer {
            for i in 0..inner {
                let base = o * len * inner + i;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + k * inner];
                }
                plan.process(&mut line);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * inner] = *v;
                }
            }
        }
    }
}

/// Direct O(M^2) transform, used to cross-check the fast path.
pub fn dft_naive(data: &[Complex64]) -> Vec<Complex64> {
    let n = data.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, x) in data.iter().enumerate() {
            acc += x * Turns::from_ratio((j * k) as i128, n as u64).cis();
        }
        *slot = acc;
    }
    out
}
