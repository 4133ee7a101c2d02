//! Exact big-integer reference arithmetic for floating-point oracles.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

/// Fixed binary scale: every f64 and every product of two f64 is an integer
/// multiple of `2^-SCALE`.
pub const SCALE: i64 = 2200;

/// `x = m 2^e` with integer `m`.
fn decompose(x: f64) -> (BigInt, i64) {
    assert!(x.is_finite());
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | 1 << 52, exp - 1075) };
    (BigInt::from(m) * sign, e)
}

/// `x 2^SCALE` as an integer.
pub fn scaled(x: f64) -> BigInt {
    let (m, e) = decompose(x);
    m << (e + SCALE) as usize
}

/// `a b 2^SCALE` as an integer.
pub fn scaled_product(a: f64, b: f64) -> BigInt {
    let (ma, ea) = decompose(a);
    let (mb, eb) = decompose(b);
    (ma * mb) << (ea + eb + SCALE) as usize
}

/// Rough `s 2^-SCALE`, within a few ulps.
fn approx(s: &BigInt) -> f64 {
    if s.is_zero() {
        return 0.0;
    }
    let bits = s.bits() as i64;
    let shift = (bits - 62).max(0);
    let top = (s >> shift as usize).to_f64().unwrap();
    // Two steps keep the intermediate power in range.
    let e = shift - SCALE;
    let half = e / 2;
    top * 2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
}

/// `s 2^-SCALE` rounded to nearest, ties to even.
pub fn nearest(s: &BigInt) -> f64 {
    let dist = |r: f64| (s - scaled(r)).abs();
    let mut r = approx(s);
    loop {
        let here = dist(r);
        let up = r.next_up();
        let down = r.next_down();
        if up.is_finite() && dist(up) < here {
            r = up;
        } else if down.is_finite() && dist(down) < here {
            r = down;
        } else {
            let tie = [up, down].into_iter().find(|c| c.is_finite() && dist(*c) == here);
            return match tie {
                Some(c) if r.to_bits() & 1 == 1 => c,
                _ => r,
            };
        }
    }
}

/// Correctly rounded `Σ a_i b_i` for complex pairs, per component.
pub fn exact_complex_dot(pairs: &[(Complex64, Complex64)]) -> Complex64 {
    let mut re = BigInt::zero();
    let mut im = BigInt::zero();
    for (a, b) in pairs {
        re += scaled_product(a.re, b.re) - scaled_product(a.im, b.im);
        im += scaled_product(a.re, b.im) + scaled_product(a.im, b.re);
    }
    Complex64::new(nearest(&re), nearest(&im))
}

/// Correctly rounded `Σ x_i`.
pub fn exact_sum(xs: &[f64]) -> f64 {
    nearest(&xs.iter().map(|x| scaled(*x)).sum())
}
