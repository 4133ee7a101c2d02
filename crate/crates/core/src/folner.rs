//! Følner sequences of boxes and their exact diagnostics.
//!
//! Every quantity here is a ratio of element counts. On the sampled line
//! both numerator and denominator carry the same cell weight `h^d`, so the
//! counts are reported as they are.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::group::{Element, Group, MAX_DIM};
use crate::set::{ElementSet, Window};

/// An exact measure ratio `numerator / denominator` of element counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasureRatio {
    pub numerator: u64,
    pub denominator: u64,
}

impl MeasureRatio {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Exact comparison by cross-multiplication.
    pub fn cmp_exact(&self, other: &MeasureRatio) -> core::cmp::Ordering {
        (self.numerator as u128 * other.denominator as u128)
            .cmp(&(other.numerator as u128 * self.denominator as u128))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// `F_n = {-n..n}^d`.
    Cube,
    /// `F_n = Π {-r_i n .. r_i n}`.
    Rectangle { rates: Vec<u64> },
    /// `F_n = n*drift + {-n..n}^d`.
    ShiftedCube { drift: Vec<i64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FolnerSequence {
    group: Group,
    shape: Shape,
    n_min: u64,
    n_max: u64,
}

impl FolnerSequence {
    pub fn new(group: &Group, shape: Shape, n_min: u64, n_max: u64) -> Result<Self> {
        if n_min > n_max {
            return Err(invalid("n_max", "index range is empty"));
        }
        if n_max > (1 << 40) {
            return Err(invalid("n_max", "index too large"));
        }
        let d = group.dim();
        match &shape {
            Shape::Cube => {}
            Shape::Rectangle { rates } => {
                if rates.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: rates.len(),
                    });
                }
                if rates.iter().any(|&r| r == 0 || r > 1 << 16) {
                    return Err(invalid("rates", "growth rates must be in 1..=65536"));
                }
            }
            Shape::ShiftedCube { drift } => {
                if drift.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: drift.len(),
                    });
                }
                if drift.iter().any(|&r| r.unsigned_abs() > 1 << 16) {
                    return Err(invalid("drift", "drift components must be at most 65536"));
                }
            }
        }
        Ok(FolnerSequence {
            group: *group,
            shape,
            n_min,
            n_max,
        })
    }

    /// Cubes `{-n..n}^d` for `n` in `0..=n_max`.
    pub fn cubes(group: &Group, n_max: u64) -> Result<Self> {
        Self::new(group, Shape::Cube, 0, n_max)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn n_min(&self) -> u64 {
        self.n_min
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    fn check_index(&self, n: u64) -> Result<()> {
        if n < self.n_min || n > self.n_max {
            return Err(invalid(
                "n",
                alloc::format!("index {n} outside {}..={}", self.n_min, self.n_max),
            ));
        }
        Ok(())
    }

    /// The box `F_n` in raw coordinates (cyclic axes at least `m` wide are
    /// canonicalized to `[0, m-1]`).
    pub fn window(&self, n: u64) -> Result<Window> {
        self.check_index(n)?;
        Ok(self.window_unchecked(n))
    }

    pub(crate) fn window_unchecked(&self, n: u64) -> Window {
        let d = self.group.dim();
        let n = n as i64;
        let mut lo = [0i64; MAX_DIM];
        let mut hi = [0i64; MAX_DIM];
        for i in 0..d {
            let (a, b) = match &self.shape {
                Shape::Cube => (-n, n),
                Shape::Rectangle { rates } => (-(rates[i] as i64) * n, rates[i] as i64 * n),
                Shape::ShiftedCube { drift } => (drift[i] * n - n, drift[i] * n + n),
            };
            lo[i] = a;
            hi[i] = b;
        }
        Window::new(&lo[..d], &hi[..d])
            .expect("box corners are ordered")
            .canonical(&self.group)
    }

    pub fn set(&self, n: u64) -> Result<ElementSet> {
        self.window(n)?.to_set(&self.group)
    }

    /// Number of distinct elements of `F_n`.
    pub fn count(&self, n: u64) -> Result<u64> {
        let w = self.window(n)?;
        Ok(match self.group.modulus() {
            Some(_) => w.to_set(&self.group)?.len() as u64,
            None => w.len(),
        })
    }

    /// `m_G(F_n)`.
    pub fn haar(&self, n: u64) -> Result<f64> {
        Ok(self.group.haar_of_count(self.count(n)?))
    }
}

fn check_same_group(group: &Group, set: &ElementSet, what: &'static str) -> Result<()> {
    if set.dim() != group.dim() {
        return Err(Error::DimensionMismatch {
            expected: group.dim(),
            found: set.dim(),
        });
    }
    if set.is_empty() {
        return Err(Error::EmptySet(what));
    }
    Ok(())
}

/// `m(K F Δ F) / m(F)` for a finite set `F`.
pub fn sym_diff_ratio_of(group: &Group, f: &ElementSet, k: &ElementSet) -> Result<MeasureRatio> {
    check_same_group(group, k, "K")?;
    check_same_group(group, f, "F")?;
    let kf = f.minkowski_sum(group, k);
    Ok(MeasureRatio {
        numerator: kf.symmetric_difference(f).len() as u64,
        denominator: f.len() as u64,
    })
}

/// `m(K F_n Δ F_n) / m(F_n)`.
pub fn sym_diff_ratio(seq: &FolnerSequence, n: u64, k: &ElementSet) -> Result<MeasureRatio> {
    check_same_group(&seq.group, k, "K")?;
    sym_diff_ratio_of(&seq.group, &seq.set(n)?, k)
}

/// Region outside of which `-K + (G \ F)` cannot meet `-K + F`.
fn complement_universe(group: &Group, a: &ElementSet, k: &ElementSet) -> Result<ElementSet> {
    if let Some(m) = group.modulus() {
        let d = group.dim();
        let hi = [m as i64 - 1; MAX_DIM];
        return Window::new(&[0; MAX_DIM][..d], &hi[..d])?.to_set(group);
    }
    let (Some(ba), Some(bk)) = (a.bounding_box(), k.bounding_box()) else {
        return Ok(ElementSet::empty(group));
    };
    ba.sum(&bk).to_set(group)
}

/// `∂_K(F) = (-K + F) ∩ (-K + (G \ F))`, with the complement taken inside
/// a box large enough to be exact.
pub fn k_boundary_of(group: &Group, f: &ElementSet, k: &ElementSet) -> Result<ElementSet> {
    check_same_group(group, k, "K")?;
    if f.is_empty() {
        return Ok(ElementSet::empty(group));
    }
    let neg_k = k.negate(group);
    let a = f.minkowski_sum(group, &neg_k);
    let outside = complement_universe(group, &a, k)?.difference(f);
    let b = outside.minkowski_sum(group, &neg_k);
    Ok(a.intersection(&b))
}

/// `{g : (K + g) ∩ F ≠ ∅ and (K + g) ⊄ F}`, by direct membership tests.
pub fn k_boundary_by_definition(group: &Group, f: &ElementSet, k: &ElementSet) -> Result<ElementSet> {
    check_same_group(group, k, "K")?;
    let candidates = f.minkowski_sum(group, &k.negate(group));
    let mut out = Vec::new();
    for g in candidates.iter() {
        let mut inside = false;
        let mut outside = false;
        for kk in k.iter() {
            if f.contains(&group.add(kk, g)) {
                inside = true;
            } else {
                outside = true;
            }
        }
        if inside && outside {
            out.push(*g);
        }
    }
    ElementSet::from_iter(group, out)
}

pub fn k_boundary(seq: &FolnerSequence, n: u64, k: &ElementSet) -> Result<ElementSet> {
    k_boundary_of(&seq.group, &seq.set(n)?, k)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryReport {
    pub n: u64,
    pub sym_diff: MeasureRatio,
    pub k_boundary: MeasureRatio,
}

pub fn boundary_report(seq: &FolnerSequence, n: u64, k: &ElementSet) -> Result<BoundaryReport> {
    check_same_group(&seq.group, k, "K")?;
    let f = seq.set(n)?;
    let sym_diff = sym_diff_ratio_of(&seq.group, &f, k)?;
    let boundary = k_boundary_of(&seq.group, &f, k)?;
    Ok(BoundaryReport {
        n,
        sym_diff,
        k_boundary: MeasureRatio {
            numerator: boundary.len() as u64,
            denominator: f.len() as u64,
        },
    })
}

/// Outcome of testing `V F ⊆ F ∪ ∂_V(F)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InclusionWitness {
    pub holds: bool,
    /// An element of `VF` outside `F ∪ ∂_V(F)`, when one exists.
    pub witness: Option<Element>,
}

pub fn check_dilation_inclusion(group: &Group, f: &ElementSet, v: &ElementSet) -> Result<InclusionWitness> {
    check_same_group(group, v, "V")?;
    if !v.contains(&group.identity()) {
        return Err(Error::MissingIdentity);
    }
    if !v.is_symmetric(group) {
        return Err(Error::NotSymmetric);
    }
    let vf = f.minkowski_sum(group, v);
    let cover = f.union(&k_boundary_of(group, f, v)?);
    let missing = vf.difference(&cover);
    Ok(InclusionWitness {
        holds: missing.is_empty(),
        witness: missing.iter().next().copied(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TemperednessReport {
    /// `(n, m(∪_{k<n} -F_k + F_n) / m(F_n))` for `n` in `n_min+1..=n_max`.
    pub ratios: Vec<(u64, MeasureRatio)>,
    pub c_observed: f64,
}

pub fn temperedness(seq: &FolnerSequence, n_max: u64) -> Result<TemperednessReport> {
    if n_max < seq.n_min + 1 {
        return Err(invalid("n_max", "need at least two sets of the sequence"));
    }
    seq.check_index(n_max)?;
    let group = &seq.group;
    let mut running = seq.set(seq.n_min)?.negate(group);
    let mut ratios = Vec::with_capacity((n_max - seq.n_min) as usize);
    let mut c_observed: f64 = 0.0;
    for n in seq.n_min + 1..=n_max {
        let fw = seq.window_unchecked(n);
        let count = seq.count(n)?;
        let joined = running.dilate(group, &fw)?;
        let r = MeasureRatio {
            numerator: joined.len() as u64,
            denominator: count,
        };
        c_observed = c_observed.max(r.value());
        ratios.push((n, r));
        running = running.union(&fw.to_set(group)?.negate(group));
    }
    Ok(TemperednessReport { ratios, c_observed })
}

/// `m((h + W) Δ W) / m(W)` for a box `W`.
pub fn translate_ratio(group: &Group, w: &Window, h: &Element) -> Result<MeasureRatio> {
    group.check(h)?;
    if group.modulus().is_some() {
        let ws = w.to_set(group)?;
        let shifted = ws.translate(group, h)?;
        return Ok(MeasureRatio {
            numerator: ws.symmetric_difference(&shifted).len() as u64,
            denominator: ws.len() as u64,
        });
    }
    let size = w.len();
    Ok(MeasureRatio {
        numerator: 2 * (size - w.overlap_with_shift(h)),
        denominator: size,
    })
}

/// `sup_{h ∈ F_H} m((h + F_n) Δ F_n) / m(F_n)` by enumeration of `F_H`,
/// with the first maximizer in row-major order.
pub fn translate_ratio_sup(seq: &FolnerSequence, n: u64, big_h: u64) -> Result<(MeasureRatio, Element)> {
    let w = seq.window(n)?;
    let hs = seq.set(big_h)?;
    let mut best: Option<(MeasureRatio, Element)> = None;
    for h in hs.iter() {
        let r = translate_ratio(&seq.group, &w, h)?;
        if best.map_or(true, |(b, _)| r.cmp_exact(&b).is_gt()) {
            best = Some((r, *h));
        }
    }
    best.ok_or(Error::EmptySet("F_H"))
}

/// The extreme points of a box (its `2^d` corners, deduplicated).
pub fn box_corners(w: &Window) -> Vec<Element> {
    let d = w.dim();
    let mut out = vec![];
    for mask in 0..(1usize << d) {
        let mut c = [0i64; MAX_DIM];
        for (i, slot) in c.iter_mut().enumerate().take(d) {
            *slot = if mask >> i & 1 == 1 { w.hi()[i] } else { w.lo()[i] };
        }
        out.push(Element::new(&c[..d]).expect("dimension in range"));
    }
    out.sort_unstable();
    out.dedup();
    out
}
