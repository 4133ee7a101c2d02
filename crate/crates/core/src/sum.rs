//! Correctly rounded summation.
//!
//! All averaging kernels accumulate through [`ExactSum`], which keeps the
//! running total as a list of non-overlapping partials (Shewchuk) and
//! rounds once at the end. The result is the correctly rounded value of
//! the exact sum, so it does not depend on term order. Products enter via
//! their error-free split `a*b = p + e`, which makes dot products exact
//! before the final rounding as well.

use alloc::vec::Vec;

use num_complex::Complex64;

/// Error-free product: returns `(p, e)` with `p = fl(a*b)` and `a*b = p + e`.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

#[derive(Clone, Debug, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
    special: f64,
}

impl ExactSum {
    pub fn new() -> Self {
        ExactSum {
            partials: Vec::with_capacity(4),
            special: 0.0,
        }
    }

    pub fn add(&mut self, mut x: f64) {
        if !x.is_finite() {
            self.special += x;
            return;
        }
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                core::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    /// Adds the exact product `a * b`.
    #[inline]
    pub fn add_product(&mut self, a: f64, b: f64) {
        let (p, e) = two_prod(a, b);
        self.add(p);
        if e != 0.0 {
            self.add(e);
        }
    }

    /// The correctly rounded (round-half-even) total.
    pub fn value(&self) -> f64 {
        if self.special != 0.0 || self.special.is_nan() {
            return self.special;
        }
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

/// Exact accumulation of complex terms, component-wise.
#[derive(Clone, Debug, Default)]
pub struct ComplexSum {
    re: ExactSum,
    im: ExactSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        ComplexSum {
            re: ExactSum::new(),
            im: ExactSum::new(),
        }
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    /// Adds the exact complex product `a * b`.
    pub fn add_product(&mut self, a: Complex64, b: Complex64) {
        self.re.add_product(a.re, b.re);
        self.re.add_product(-a.im, b.im);
        self.im.add_product(a.re, b.im);
        self.im.add_product(a.im, b.re);
    }

    /// Adds the exact product `a * conj(b)`.
    pub fn add_product_conj(&mut self, a: Complex64, b: Complex64) {
        self.re.add_product(a.re, b.re);
        self.re.add_product(a.im, b.im);
        self.im.add_product(a.im, b.re);
        self.im.add_product(-a.re, b.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Correctly rounded sum of a slice.
pub fn exact_sum(terms: &[f64]) -> f64 {
    let mut acc = ExactSum::new();
    for &t in terms {
        acc.add(t);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancels_catastrophic_terms() {
        assert_eq!(exact_sum(&[1e100, 1.0, -1e100]), 1.0);
        assert_eq!(exact_sum(&[0.1; 10]), 1.0);
        assert_eq!(exact_sum(&[]), 0.0);
    }

    #[test]
    fn order_independent() {
        let mut terms: Vec<f64> = (1..200)
            .map(|i| libm::sin(i as f64) * libm::pow(10.0, (i % 17) as f64 - 8.0))
            .collect();
        let a = exact_sum(&terms);
        terms.reverse();
        let b = exact_sum(&terms);
        terms.swap(3, 150);
        let c = exact_sum(&terms);
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(a.to_bits(), c.to_bits());
    }

    #[test]
    fn half_even_rounding() {
        // 1 + 2^-53 is a tie between 1 and 1 + 2^-52: rounds to even (1).
        let ulp_half = libm::ldexp(1.0, -53);
        assert_eq!(exact_sum(&[1.0, ulp_half]), 1.0);
        // A tiny extra term breaks the tie upward.
        assert_eq!(
            exact_sum(&[1.0, ulp_half, 1e-300]),
            1.0 + libm::ldexp(1.0, -52)
        );
    }

    #[test]
    fn products_are_exact() {
        let a = 1.0 + libm::ldexp(1.0, -30);
        let mut acc = ExactSum::new();
        acc.add_product(a, a);
        acc.add(-1.0);
        acc.add(-libm::ldexp(1.0, -29));
        assert_eq!(acc.value(), libm::ldexp(1.0, -60));
    }
}
