//! Exact finite sets of group elements and box-shaped windows.
//!
//! An [`ElementSet`] is a sorted, deduplicated array of canonical
//! elements; all set algebra is exact integer work. A [`Window`] is an
//! inclusive coordinate box, the shape of every Følner set used here.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::group::{Element, Group, GroupKind, MAX_DIM};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementSet {
    dim: usize,
    elems: Vec<Element>,
}

impl ElementSet {
    pub fn empty(group: &Group) -> Self {
        ElementSet {
            dim: group.dim(),
            elems: Vec::new(),
        }
    }

    pub fn from_iter(group: &Group, elems: impl IntoIterator<Item = Element>) -> Result<Self> {
        let mut v = Vec::new();
        for g in elems {
            group.check(&g)?;
            v.push(group.reduce(g));
        }
        Ok(Self::from_unsorted(group.dim(), v))
    }

    fn from_unsorted(dim: usize, mut elems: Vec<Element>) -> Self {
        elems.sort_unstable();
        elems.dedup();
        ElementSet { dim, elems }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Element> {
        self.elems.iter()
    }

    pub fn as_slice(&self) -> &[Element] {
        &self.elems
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.elems.binary_search(g).is_ok()
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        let (a, b) = (&self.elems, &other.elems);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                core::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                core::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        ElementSet {
            dim: self.dim,
            elems: out,
        }
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        self.merge_filter(other, |in_a, in_b| in_a && in_b)
    }

    pub fn difference(&self, other: &ElementSet) -> ElementSet {
        self.merge_filter(other, |in_a, in_b| in_a && !in_b)
    }

    pub fn symmetric_difference(&self, other: &ElementSet) -> ElementSet {
        self.merge_filter(other, |in_a, in_b| in_a != in_b)
    }

    fn merge_filter(&self, other: &ElementSet, keep: impl Fn(bool, bool) -> bool) -> ElementSet {
        let (a, b) = (&self.elems, &other.elems);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let (g, in_a, in_b) = if j >= b.len() || (i < a.len() && a[i] < b[j]) {
                i += 1;
                (a[i - 1], true, false)
            } else if i >= a.len() || b[j] < a[i] {
                j += 1;
                (b[j - 1], false, true)
            } else {
                i += 1;
                j += 1;
                (a[i - 1], true, true)
            };
            if keep(in_a, in_b) {
                out.push(g);
            }
        }
        ElementSet {
            dim: self.dim,
            elems: out,
        }
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.difference(other).is_empty()
    }

    /// `g + S`.
    pub fn translate(&self, group: &Group, g: &Element) -> Result<ElementSet> {
        group.check(g)?;
        let v = self.elems.iter().map(|e| group.add(e, g)).collect();
        Ok(Self::from_unsorted(self.dim, v))
    }

    /// `-S`, the inverse set.
    pub fn negate(&self, group: &Group) -> ElementSet {
        let v = self.elems.iter().map(|e| group.neg(e)).collect();
        Self::from_unsorted(self.dim, v)
    }

    pub fn is_symmetric(&self, group: &Group) -> bool {
        self.negate(group) == *self
    }

    /// Minkowski sum `self + other`: merge of the translates of the larger
    /// set by each element of the smaller one.
    pub fn minkowski_sum(&self, group: &Group, other: &ElementSet) -> ElementSet {
        let (big, small) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = ElementSet::empty(group);
        for s in small.iter() {
            let shifted = if group.modulus().is_some() {
                let v = big.elems.iter().map(|e| group.add(e, s)).collect();
                Self::from_unsorted(self.dim, v)
            } else {
                // Translation preserves lexicographic order on unreduced coordinates.
                ElementSet {
                    dim: self.dim,
                    elems: big.elems.iter().map(|e| e.raw_add(s)).collect(),
                }
            };
            acc = acc.union(&shifted);
        }
        acc
    }

    /// Minkowski sum with a box, `self + W`, computed one axis at a time by
    /// interval dilation along lines. Cost is linear in the output size.
    pub fn dilate(&self, group: &Group, window: &Window) -> Result<ElementSet> {
        if window.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: window.dim(),
            });
        }
        let mut current = self.elems.clone();
        for axis in 0..self.dim {
            current = dilate_axis(&current, self.dim, axis, window.lo[axis], window.hi[axis]);
        }
        if group.modulus().is_some() {
            for e in current.iter_mut() {
                *e = group.reduce(*e);
            }
        }
        Ok(Self::from_unsorted(self.dim, current))
    }

    /// Smallest box containing the set.
    pub fn bounding_box(&self) -> Option<Window> {
        let first = self.elems.first()?;
        let mut lo = first.coords().to_vec();
        let mut hi = lo.clone();
        for e in &self.elems {
            for (i, &c) in e.coords().iter().enumerate() {
                lo[i] = lo[i].min(c);
                hi[i] = hi[i].max(c);
            }
        }
        Window::new(&lo, &hi).ok()
    }
}

/// Dilates along one axis by `[lo, hi]`. The output is unsorted.
fn dilate_axis(elems: &[Element], dim: usize, axis: usize, lo: i64, hi: i64) -> Vec<Element> {
    // Key with the dilation axis moved last so lines are contiguous.
    let key = |e: &Element| -> [i64; MAX_DIM] {
        let mut k = [0; MAX_DIM];
        let mut p = 0;
        for i in 0..dim {
            if i != axis {
                k[p] = e.coord(i);
                p += 1;
            }
        }
        k[dim - 1] = e.coord(axis);
        k
    };
    let mut keyed: Vec<[i64; MAX_DIM]> = elems.iter().map(key).collect();
    if axis != dim - 1 {
        keyed.sort_unstable();
    }
    let unkey = |k: &[i64; MAX_DIM], v: i64| -> Element {
        let mut c = [0; MAX_DIM];
        let mut p = 0;
        for (i, slot) in c.iter_mut().enumerate().take(dim) {
            if i == axis {
                *slot = v;
            } else {
                *slot = k[p];
                p += 1;
            }
        }
        Element::from_array(dim, c)
    };
    let mut out = Vec::with_capacity(elems.len() + (hi - lo) as usize);
    let mut start = 0;
    while start < keyed.len() {
        let mut end = start + 1;
        while end < keyed.len() && keyed[end][..dim - 1] == keyed[start][..dim - 1] {
            end += 1;
        }
        // Union of intervals [v+lo, v+hi] over the sorted values of this line.
        let mut run: Option<(i64, i64)> = None;
        for k in &keyed[start..end] {
            let (a, b) = (k[dim - 1] + lo, k[dim - 1] + hi);
            run = match run {
                Some((ra, rb)) if a <= rb + 1 => Some((ra, rb.max(b))),
                Some((ra, rb)) => {
                    for v in ra..=rb {
                        out.push(unkey(&keyed[start], v));
                    }
                    Some((a, b))
                }
                None => Some((a, b)),
            };
        }
        if let Some((ra, rb)) = run {
            for v in ra..=rb {
                out.push(unkey(&keyed[start], v));
            }
        }
        start = end;
    }
    out
}

/// An inclusive box `Π [lo_i, hi_i]` of element coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    dim: usize,
    lo: [i64; MAX_DIM],
    hi: [i64; MAX_DIM],
}

impl Window {
    pub fn new(lo: &[i64], hi: &[i64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.is_empty() || lo.len() > MAX_DIM {
            return Err(invalid("window", "dimension out of range"));
        }
        if lo.iter().zip(hi).any(|(a, b)| a > b) {
            return Err(invalid("window", "lower corner exceeds upper corner"));
        }
        let mut l = [0; MAX_DIM];
        let mut h = [0; MAX_DIM];
        l[..lo.len()].copy_from_slice(lo);
        h[..hi.len()].copy_from_slice(hi);
        Ok(Window {
            dim: lo.len(),
            lo: l,
            hi: h,
        })
    }

    /// `{-n..n}^d`.
    pub fn cube(dim: usize, n: i64) -> Self {
        assert!(n >= 0 && dim >= 1 && dim <= MAX_DIM);
        let mut lo = [0; MAX_DIM];
        let mut hi = [0; MAX_DIM];
        for i in 0..dim {
            lo[i] = -n;
            hi[i] = n;
        }
        Window { dim, lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo[..self.dim]
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi[..self.dim]
    }

    pub fn width(&self, axis: usize) -> u64 {
        (self.hi[axis] - self.lo[axis] + 1) as u64
    }

    pub fn widths(&self) -> Vec<usize> {
        (0..self.dim).map(|i| self.width(i) as usize).collect()
    }

    /// Number of elements in the box.
    pub fn len(&self) -> u64 {
        (0..self.dim).map(|i| self.width(i)).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Raw coordinate containment (no reduction).
    pub fn contains(&self, g: &Element) -> bool {
        g.dim() == self.dim && (0..self.dim).all(|i| self.lo[i] <= g.coord(i) && g.coord(i) <= self.hi[i])
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        self.dim == other.dim
            && (0..self.dim).all(|i| self.lo[i] <= other.lo[i] && other.hi[i] <= self.hi[i])
    }

    /// Row-major position of `g` in the box.
    pub fn index_of(&self, g: &Element) -> Option<usize> {
        if !self.contains(g) {
            return None;
        }
        let mut idx = 0usize;
        for i in 0..self.dim {
            idx = idx * self.width(i) as usize + (g.coord(i) - self.lo[i]) as usize;
        }
        Some(idx)
    }

    pub fn element_at(&self, mut idx: usize) -> Element {
        let mut c = [0; MAX_DIM];
        for i in (0..self.dim).rev() {
            let w = self.width(i) as usize;
            c[i] = self.lo[i] + (idx % w) as i64;
            idx /= w;
        }
        Element::from_array(self.dim, c)
    }

    /// Elements in row-major order (last axis fastest), unreduced.
    pub fn iter(&self) -> WindowIter {
        WindowIter {
            window: *self,
            next: Some(self.lo),
        }
    }

    pub fn translate(&self, g: &Element) -> Window {
        let mut w = *self;
        for i in 0..self.dim {
            w.lo[i] += g.coord(i);
            w.hi[i] += g.coord(i);
        }
        w
    }

    /// Box Minkowski sum.
    pub fn sum(&self, other: &Window) -> Window {
        let mut w = *self;
        for i in 0..self.dim {
            w.lo[i] += other.lo[i];
            w.hi[i] += other.hi[i];
        }
        w
    }

    /// `-W`.
    pub fn negate(&self) -> Window {
        let mut w = *self;
        for i in 0..self.dim {
            w.lo[i] = -self.hi[i];
            w.hi[i] = -self.lo[i];
        }
        w
    }

    /// Number of elements shared by `W` and `h + W` (lattice arithmetic).
    pub fn overlap_with_shift(&self, h: &Element) -> u64 {
        (0..self.dim)
            .map(|i| (self.width(i) as i64 - h.coord(i).abs()).max(0) as u64)
            .product()
    }

    /// For cyclic groups, an axis at least `m` wide covers the whole axis
    /// and is replaced by `[0, m-1]`.
    pub fn canonical(&self, group: &Group) -> Window {
        let mut w = *self;
        if let GroupKind::Cyclic { modulus } = group.kind() {
            for i in 0..self.dim {
                if self.width(i) >= modulus {
                    w.lo[i] = 0;
                    w.hi[i] = modulus as i64 - 1;
                }
            }
        }
        w
    }

    pub fn to_set(&self, group: &Group) -> Result<ElementSet> {
        ElementSet::from_iter(group, self.iter())
    }
}

pub struct WindowIter {
    window: Window,
    next: Option<[i64; MAX_DIM]>,
}

impl Iterator for WindowIter {
    type Item = Element;

    fn next(&mut self) -> Option<Element> {
        let cur = self.next?;
        let w = &self.window;
        let mut nxt = cur;
        let mut axis = w.dim;
        loop {
            if axis == 0 {
                self.next = None;
                break;
            }
            axis -= 1;
            if nxt[axis] < w.hi[axis] {
                nxt[axis] += 1;
                self.next = Some(nxt);
                break;
            }
            nxt[axis] = w.lo[axis];
        }
        Some(Element::from_array(w.dim, cur))
    }
}
