//! Angles measured in full turns, stored as 64-bit fixed-point fractions.
//!
//! Every phase in the crate (character values, rotation angles, circle
//! points) lives in `Z / 2^64`. Addition and multiplication by group
//! coordinates are therefore exact modular arithmetic, and the only
//! rounding happens when a phase is finally turned into a unit complex
//! number by [`Turns::cis`].

use core::ops::{Add, AddAssign, Neg, Sub};

use num_complex::Complex64;

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;
const QUARTER_MASK: u64 = (1 << 62) - 1;
const QUARTER_TURN_RADIANS: f64 = core::f64::consts::TAU / TWO_POW_64;

/// An angle `k / 2^64` turns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Turns(pub u64);

impl Turns {
    pub const ZERO: Turns = Turns(0);

    /// Rounds `x mod 1` to the nearest representable phase.
    pub fn from_f64(x: f64) -> Self {
        debug_assert!(x.is_finite());
        // x - floor(x) is exact in binary floating point.
        let frac = x - libm::floor(x);
        let scaled = libm::round(frac * TWO_POW_64);
        if scaled >= TWO_POW_64 {
            Turns(0)
        } else {
            Turns(scaled as u64)
        }
    }

    /// The phase `k / m` turns, correctly rounded.
    pub fn from_ratio(k: i128, m: u64) -> Self {
        assert!(m > 0, "ratio denominator must be positive");
        let m = m as u128;
        let k = k.rem_euclid(m as i128) as u128;
        // k < m, so k * 2^64 fits in u128 only when m <= 2^64, which holds.
        let num = k << 64;
        let q = num / m;
        let r = num % m;
        let q = if 2 * r >= m { q + 1 } else { q };
        Turns(q as u64)
    }

    /// `g * self`, exact modulo one turn.
    #[inline]
    pub fn mul_int(self, g: i64) -> Self {
        Turns(self.0.wrapping_mul(g as u64))
    }

    /// The phase as a real number in `[0, 1)`.
    pub fn to_f64(self) -> f64 {
        let x = self.0 as f64 / TWO_POW_64;
        if x >= 1.0 {
            0.0
        } else {
            x
        }
    }

    /// The phase as a real number in `[-1/2, 1/2)`.
    pub fn to_signed_f64(self) -> f64 {
        (self.0 as i64) as f64 / TWO_POW_64
    }

    /// `e^{2 pi i self}`. Quarter turns are reduced exactly, so phases that
    /// are multiples of `1/4` map to exactly `1, i, -1, -i`.
    #[inline]
    pub fn cis(self) -> Complex64 {
        let quadrant = self.0 >> 62;
        let rem = self.0 & QUARTER_MASK;
        let (s, c) = if rem == 0 {
            (0.0, 1.0)
        } else {
            libm::sincos(rem as f64 * QUARTER_TURN_RADIANS)
        };
        match quadrant {
            0 => Complex64::new(c, s),
            1 => Complex64::new(-s, c),
            2 => Complex64::new(-c, -s),
            _ => Complex64::new(s, -c),
        }
    }
}

impl Add for Turns {
    type Output = Turns;
    #[inline]
    fn add(self, rhs: Turns) -> Turns {
        Turns(self.0.wrapping_add(rhs.0))
    }
}

impl AddAssign for Turns {
    #[inline]
    fn add_assign(&mut self, rhs: Turns) {
        self.0 = self.0.wrapping_add(rhs.0);
    }
}

impl Sub for Turns {
    type Output = Turns;
    #[inline]
    fn sub(self, rhs: Turns) -> Turns {
        Turns(self.0.wrapping_sub(rhs.0))
    }
}

impl Neg for Turns {
    type Output = Turns;
    #[inline]
    fn neg(self) -> Turns {
        Turns(self.0.wrapping_neg())
    }
}
