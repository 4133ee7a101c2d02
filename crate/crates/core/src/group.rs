//! Desk-scale LCA groups, their elements and their characters.
//!
//! Three families are supported: the integer lattice `Z^d`, finite
//! products `(Z/mZ)^d`, and the real line sampled at quadrature step `h`
//! (elements are integer node indices `j`, standing for `t = j*h`).

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::set::ElementSet;
use crate::turns::Turns;

/// Largest supported group dimension.
pub const MAX_DIM: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GroupKind {
    Lattice,
    Cyclic { modulus: u64 },
    /// Midpoint-rule sampling of the real line. Characters are only
    /// searched inside `[-band, band]`, and `band <= 1/(4*step)`.
    Line { step: f64, band: Option<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Group {
    kind: GroupKind,
    dim: usize,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(invalid("d", format!("dimension must be in 1..={MAX_DIM}, got {dim}")));
    }
    Ok(())
}

impl Group {
    pub fn lattice(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Group {
            kind: GroupKind::Lattice,
            dim,
        })
    }

    pub fn cyclic(modulus: u64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if modulus == 0 || modulus > i64::MAX as u64 {
            return Err(invalid("m", "modulus must be positive"));
        }
        Ok(Group {
            kind: GroupKind::Cyclic { modulus },
            dim,
        })
    }

    pub fn line(step: f64, band: Option<f64>, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if !(step.is_finite() && step > 0.0) {
            return Err(invalid("h", "quadrature step must be positive and finite"));
        }
        if let Some(b) = band {
            let cap = 1.0 / (4.0 * step);
            if !(b.is_finite() && b > 0.0) {
                return Err(invalid("band", "band limit must be positive"));
            }
            if b > cap {
                return Err(invalid(
                    "band",
                    format!("band limit {b} exceeds the quarter-Nyquist cap 1/(4h) = {cap}"),
                ));
            }
        }
        Ok(Group {
            kind: GroupKind::Line { step, band },
            dim,
        })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_discrete(&self) -> bool {
        !matches!(self.kind, GroupKind::Line { .. })
    }

    pub fn modulus(&self) -> Option<u64> {
        match self.kind {
            GroupKind::Cyclic { modulus } => Some(modulus),
            _ => None,
        }
    }

    /// Haar weight of a single element (counting measure, or `h^d`).
    pub fn cell_weight(&self) -> f64 {
        match self.kind {
            GroupKind::Line { step, .. } => libm::pow(step, self.dim as f64),
            _ => 1.0,
        }
    }

    /// Haar measure of a finite set.
    pub fn haar(&self, set: &ElementSet) -> f64 {
        set.len() as f64 * self.cell_weight()
    }

    /// Haar measure of `count` elements.
    pub fn haar_of_count(&self, count: u64) -> f64 {
        count as f64 * self.cell_weight()
    }

    pub fn identity(&self) -> Element {
        Element::zero(self.dim)
    }

    pub fn check(&self, g: &Element) -> Result<()> {
        if g.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: g.dim(),
            });
        }
        Ok(())
    }

    /// Canonical representative (coordinates reduced mod `m` for cyclic kinds).
    pub fn reduce(&self, g: Element) -> Element {
        match self.kind {
            GroupKind::Cyclic { modulus } => {
                let mut out = g;
                for c in out.coords.iter_mut().take(self.dim) {
                    *c = c.rem_euclid(modulus as i64);
                }
                out
            }
            _ => g,
        }
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        self.reduce(a.raw_add(b))
    }

    pub fn neg(&self, a: &Element) -> Element {
        self.reduce(a.raw_neg())
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        self.reduce(a.raw_add(&b.raw_neg()))
    }
}

/// A group element: `d` integer coordinates (lattice points, residues, or
/// quadrature node indices).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    dim: u8,
    coords: [i64; MAX_DIM],
}

impl Element {
    pub fn new(coords: &[i64]) -> Result<Self> {
        check_dim(coords.len())?;
        let mut c = [0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Element {
            dim: coords.len() as u8,
            coords: c,
        })
    }

    pub fn scalar(x: i64) -> Self {
        let mut coords = [0; MAX_DIM];
        coords[0] = x;
        Element { dim: 1, coords }
    }

    pub fn zero(dim: usize) -> Self {
        debug_assert!(dim >= 1 && dim <= MAX_DIM);
        Element {
            dim: dim as u8,
            coords: [0; MAX_DIM],
        }
    }

    pub(crate) fn from_array(dim: usize, coords: [i64; MAX_DIM]) -> Self {
        Element {
            dim: dim as u8,
            coords,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords[..self.dim as usize]
    }

    pub fn coord(&self, axis: usize) -> i64 {
        self.coords[axis]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// Coordinate-wise sum without reduction.
    pub fn raw_add(&self, other: &Element) -> Element {
        debug_assert_eq!(self.dim, other.dim);
        let mut coords = self.coords;
        for (c, o) in coords.iter_mut().zip(other.coords.iter()) {
            *c += o;
        }
        Element {
            dim: self.dim,
            coords,
        }
    }

    pub fn raw_neg(&self) -> Element {
        let mut coords = self.coords;
        for c in coords.iter_mut() {
            *c = -*c;
        }
        Element {
            dim: self.dim,
            coords,
        }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords()).finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum CharParam {
    /// Lattice angles θ (turns) or line frequencies ν; `turns[i]` is the
    /// phase advance per unit step along axis `i` (θ_i, or h·ν_i).
    Phases {
        params: [f64; MAX_DIM],
        turns: [Turns; MAX_DIM],
    },
    Residues([u64; MAX_DIM]),
}

/// A character ξ of one of the supported groups, stored by its real (or
/// residue) parameters and evaluated by exact phase arithmetic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Character {
    group: Group,
    param: CharParam,
}

impl Character {
    /// The trivial character.
    pub fn trivial(group: &Group) -> Self {
        let param = match group.kind {
            GroupKind::Cyclic { .. } => CharParam::Residues([0; MAX_DIM]),
            _ => CharParam::Phases {
                params: [0.0; MAX_DIM],
                turns: [Turns::ZERO; MAX_DIM],
            },
        };
        Character {
            group: *group,
            param,
        }
    }

    /// Lattice: `ξ(g) = e^{2πi g·θ}`. Line: `ξ(t) = e^{2πi t·ν}` with `t = j*h`.
    pub fn new(group: &Group, params: &[f64]) -> Result<Self> {
        if params.len() != group.dim {
            return Err(Error::DimensionMismatch {
                expected: group.dim,
                found: params.len(),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(invalid("theta", "character parameters must be finite"));
        }
        let mut p = [0.0; MAX_DIM];
        let mut turns = [Turns::ZERO; MAX_DIM];
        match group.kind {
            GroupKind::Lattice => {
                for i in 0..group.dim {
                    turns[i] = Turns::from_f64(params[i]);
                    p[i] = turns[i].to_f64();
                }
            }
            GroupKind::Line { step, .. } => {
                for i in 0..group.dim {
                    p[i] = params[i];
                    turns[i] = Turns::from_f64(step * params[i]);
                }
            }
            GroupKind::Cyclic { .. } => {
                return Err(Error::GroupMismatch(
                    "cyclic characters are parametrized by residues".into(),
                ))
            }
        }
        Ok(Character {
            group: *group,
            param: CharParam::Phases { params: p, turns },
        })
    }

    /// Cyclic: `ξ(g) = ω^{r·g}` with `ω = e^{2πi/m}`.
    pub fn cyclic(group: &Group, residues: &[u64]) -> Result<Self> {
        let m = group
            .modulus()
            .ok_or_else(|| Error::GroupMismatch("residue characters need a cyclic group".into()))?;
        if residues.len() != group.dim {
            return Err(Error::DimensionMismatch {
                expected: group.dim,
                found: residues.len(),
            });
        }
        let mut r = [0; MAX_DIM];
        for i in 0..group.dim {
            r[i] = residues[i] % m;
        }
        Ok(Character {
            group: *group,
            param: CharParam::Residues(r),
        })
    }

    /// Lattice or line character from per-axis phase advances (turns per
    /// unit index step). Used where phases are produced by exact arithmetic.
    pub fn from_turns(group: &Group, turns: &[Turns]) -> Result<Self> {
        if turns.len() != group.dim {
            return Err(Error::DimensionMismatch {
                expected: group.dim,
                found: turns.len(),
            });
        }
        let mut t = [Turns::ZERO; MAX_DIM];
        let mut p = [0.0; MAX_DIM];
        t[..group.dim].copy_from_slice(turns);
        match group.kind {
            GroupKind::Lattice => {
                for i in 0..group.dim {
                    p[i] = t[i].to_f64();
                }
            }
            GroupKind::Line { step, .. } => {
                for i in 0..group.dim {
                    p[i] = t[i].to_signed_f64() / step;
                }
            }
            GroupKind::Cyclic { .. } => {
                return Err(Error::GroupMismatch(
                    "cyclic characters are parametrized by residues".into(),
                ))
            }
        }
        Ok(Character {
            group: *group,
            param: CharParam::Phases { params: p, turns: t },
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    /// θ (lattice, in `[0,1)`), ν (line) or residues (cyclic, as reals).
    pub fn parameters(&self) -> Vec<f64> {
        match self.param {
            CharParam::Phases { params, .. } => params[..self.group.dim].to_vec(),
            CharParam::Residues(r) => r[..self.group.dim].iter().map(|&x| x as f64).collect(),
        }
    }

    /// Per-axis phase advance in turns (lattice and line only).
    pub fn axis_turns(&self) -> Option<[Turns; MAX_DIM]> {
        match self.param {
            CharParam::Phases { turns, .. } => Some(turns),
            CharParam::Residues(_) => None,
        }
    }

    pub fn residues(&self) -> Option<[u64; MAX_DIM]> {
        match self.param {
            CharParam::Residues(r) => Some(r),
            CharParam::Phases { .. } => None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self.param {
            CharParam::Phases { turns, .. } => turns.iter().all(|t| *t == Turns::ZERO),
            CharParam::Residues(r) => r.iter().all(|&x| x == 0),
        }
    }

    /// The pointwise product `(ξη)(g) = ξ(g) η(g)`.
    pub fn compose(&self, other: &Character) -> Result<Character> {
        if self.group != other.group {
            return Err(Error::GroupMismatch("characters of different groups".into()));
        }
        match (self.param, other.param) {
            (CharParam::Phases { turns: a, .. }, CharParam::Phases { turns: b, .. }) => {
                let mut t = [Turns::ZERO; MAX_DIM];
                for i in 0..self.group.dim {
                    t[i] = a[i] + b[i];
                }
                Character::from_turns(&self.group, &t[..self.group.dim])
            }
            (CharParam::Residues(a), CharParam::Residues(b)) => {
                let m = self.group.modulus().unwrap_or(1) as u128;
                let mut r = [0u64; MAX_DIM];
                for i in 0..self.group.dim {
                    r[i] = ((a[i] as u128 + b[i] as u128) % m) as u64;
                }
                Character::cyclic(&self.group, &r[..self.group.dim])
            }
            _ => Err(Error::GroupMismatch("characters of different kinds".into())),
        }
    }

    /// The complex-conjugate character.
    pub fn conj(&self) -> Character {
        let param = match self.param {
            CharParam::Phases { mut params, mut turns } => {
                for i in 0..self.group.dim {
                    turns[i] = -turns[i];
                    params[i] = match self.group.kind {
                        GroupKind::Lattice => turns[i].to_f64(),
                        _ => -params[i],
                    };
                }
                CharParam::Phases { params, turns }
            }
            CharParam::Residues(mut r) => {
                let m = self.group.modulus().unwrap_or(1);
                for x in r.iter_mut().take(self.group.dim) {
                    *x = (m - *x) % m;
                }
                CharParam::Residues(r)
            }
        };
        Character {
            group: self.group,
            param,
        }
    }

    /// Phase of `ξ(g)` in turns, exact modulo `2^-64` (cyclic: exact
    /// residue, then correctly rounded).
    pub fn phase(&self, g: &Element) -> Result<Turns> {
        self.group.check(g)?;
        Ok(self.phase_unchecked(g))
    }

    #[inline]
    pub(crate) fn phase_unchecked(&self, g: &Element) -> Turns {
        match self.param {
            CharParam::Phases { turns, .. } => {
                let mut acc = Turns::ZERO;
                for i in 0..self.group.dim {
                    acc += turns[i].mul_int(g.coords[i]);
                }
                acc
            }
            CharParam::Residues(r) => {
                let m = self.group.modulus().unwrap_or(1) as i128;
                let mut k: i128 = 0;
                for i in 0..self.group.dim {
                    k = (k + r[i] as i128 * (g.coords[i] as i128).rem_euclid(m)) % m;
                }
                Turns::from_ratio(k, m as u64)
            }
        }
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, g: &Element) -> Complex64 {
        self.phase_unchecked(g).cis()
    }
}

/// `ξ(g)`.
pub fn char_eval(xi: &Character, g: &Element) -> Result<Complex64> {
    Ok(xi.phase(g)?.cis())
}

/// Equispaced characters covering one fundamental domain of the dual:
/// `θ ∈ {k/M}^d` for lattices, all `m^d` residues for cyclic groups
/// (`resolution` is ignored), and `M` points per axis on `[-B, B]^d` for
/// the sampled line. Ordered row-major, last axis fastest.
pub fn dual_grid(group: &Group, resolution: usize) -> Result<Vec<Character>> {
    if resolution == 0 {
        return Err(invalid("M", "grid resolution must be at least 1"));
    }
    let d = group.dim;
    let per_axis = match group.kind {
        GroupKind::Cyclic { modulus } => modulus as usize,
        _ => resolution,
    };
    let total = per_axis
        .checked_pow(d as u32)
        .filter(|&t| t <= 1 << 26)
        .ok_or_else(|| invalid("M", "dual grid too large"))?;
    let band = match group.kind {
        GroupKind::Line { band, .. } => Some(band.ok_or_else(|| {
            invalid("band", "the sampled line needs a band limit for its dual grid")
        })?),
        _ => None,
    };
    let mut out = Vec::with_capacity(total);
    let mut idx = [0usize; MAX_DIM];
    for _ in 0..total {
        let ch = match group.kind {
            GroupKind::Lattice => {
                let mut turns = [Turns::ZERO; MAX_DIM];
                for i in 0..d {
                    turns[i] = Turns::from_ratio(idx[i] as i128, per_axis as u64);
                }
                Character::from_turns(group, &turns[..d])?
            }
            GroupKind::Cyclic { .. } => {
                let mut r = [0u64; MAX_DIM];
                for i in 0..d {
                    r[i] = idx[i] as u64;
                }
                Character::cyclic(group, &r[..d])?
            }
            GroupKind::Line { .. } => {
                let b = band.unwrap_or(0.0);
                let mut nu = [0.0; MAX_DIM];
                for i in 0..d {
                    nu[i] = if per_axis == 1 {
                        0.0
                    } else {
                        -b + 2.0 * b * idx[i] as f64 / (per_axis - 1) as f64
                    };
                }
                Character::new(group, &nu[..d])?
            }
        };
        out.push(ch);
        for axis in (0..d).rev() {
            idx[axis] += 1;
            if idx[axis] < per_axis {
                break;
            }
            idx[axis] = 0;
        }
    }
    Ok(out)
}
