//! Numerical kernels for ergodic averages over desk-scale LCA groups.
//!
//! Groups, characters and Følner windows are exact integer objects; phases
//! are 64-bit fixed-point turns; every averaging kernel accumulates with
//! correctly rounded summation. No heap-free promise is made, but nothing
//! here needs `std`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod fft;
pub mod field;
pub mod folner;
pub mod group;
pub mod hash;
pub mod kronecker;
pub mod set;
pub mod sum;
pub mod systems;
pub mod turns;
pub mod vdc;
pub mod ww;

pub use error::{Error, Result};
pub use group::{char_eval, dual_grid, Character, Element, Group, GroupKind, MAX_DIM};
pub use set::{ElementSet, Window};
pub use sum::{ComplexSum, ExactSum};
pub use turns::Turns;
