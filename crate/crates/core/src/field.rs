//! Dense complex samples over a box of group elements.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::set::Window;

/// Values `c_g` for every `g` of a box, row-major (last axis fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct BoxField {
    group: Group,
    window: Window,
    values: Vec<Complex64>,
}

impl BoxField {
    pub fn new(group: &Group, window: Window, values: Vec<Complex64>) -> Result<Self> {
        if window.dim() != group.dim() {
            return Err(Error::DimensionMismatch {
                expected: group.dim(),
                found: window.dim(),
            });
        }
        if values.len() as u64 != window.len() {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: format!("{} samples for a box of {}", values.len(), window.len()),
            });
        }
        // Wider boxes would count some residues twice.
        if let Some(m) = group.modulus() {
            if (0..window.dim()).any(|i| window.width(i) > m) {
                return Err(Error::InvalidParameter {
                    name: "window",
                    reason: "box wraps around a cyclic axis".into(),
                });
            }
        }
        Ok(BoxField {
            group: *group,
            window,
            values,
        })
    }

    pub fn from_fn(group: &Group, window: Window, mut f: impl FnMut(&Element) -> Complex64) -> Result<Self> {
        let values = window.iter().map(|g| f(&g)).collect();
        Self::new(group, window, values)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `c_g` for `g` inside the box (raw coordinates).
    pub fn get(&self, g: &Element) -> Option<Complex64> {
        self.window.index_of(g).map(|i| self.values[i])
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// The sub-box `w`, which must lie inside the field's box.
    pub fn restrict(&self, w: &Window) -> Result<BoxField> {
        if !self.window.contains_window(w) {
            return Err(Error::DomainTooSmall(format!(
                "box {:?}..{:?} is not inside {:?}..{:?}",
                w.lo(),
                w.hi(),
                self.window.lo(),
                self.window.hi()
            )));
        }
        let values = w
            .iter()
            .map(|g| self.values[self.window.index_of(&g).expect("contained")])
            .collect();
        Ok(BoxField {
            group: self.group,
            window: *w,
            values,
        })
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> BoxField {
        BoxField {
            group: self.group,
            window: self.window,
            values: self.values.iter().map(|&c| f(c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restrict_reads_the_same_samples() {
        let g = Group::lattice(2).unwrap();
        let big = Window::cube(2, 3);
        let field = BoxField::from_fn(&g, big, |e| {
            Complex64::new(e.coord(0) as f64, e.coord(1) as f64)
        })
        .unwrap();
        let small = Window::new(&[-1, 0], &[2, 3]).unwrap();
        let sub = field.restrict(&small).unwrap();
        for e in small.iter() {
            assert_eq!(sub.get(&e), field.get(&e));
        }
        assert!(field.restrict(&Window::cube(2, 4)).is_err());
        assert_eq!(field.max_abs(), libm::sqrt(18.0));
    }

    #[test]
    fn rejects_wrapping_cyclic_boxes() {
        let c = Group::cyclic(3, 1).unwrap();
        let w = Window::new(&[0], &[4]).unwrap();
        assert!(BoxField::new(&c, w, alloc::vec![Complex64::new(0.0, 0.0); 5]).is_err());
    }
}
