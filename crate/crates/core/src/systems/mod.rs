//! Measure-preserving group actions with evaluable points.
//!
//! A system is a flat list of factors (circle rotations, Bernoulli shifts,
//! finite cycles) driven by one group; products of products are flattened
//! at construction, so observables address factors by index.

mod integrate;
mod observable;

pub use integrate::{inner_product, InnerProduct, Quadrature};
pub use observable::Observable;

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::group::{Element, Group, GroupKind, MAX_DIM};
use crate::hash::{hash_words, reduce, SeedStream};
use crate::turns::Turns;

#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    /// `x ↦ x + Σ g_i α_i` on the circle; `step` holds `α_i` (or `h α_i`
    /// on the sampled line) in turns.
    Rotation { alpha: Vec<f64>, step: [Turns; MAX_DIM] },
    /// Shift on `{0..k-1}^{Z^d}` with i.i.d. uniform symbols.
    Bernoulli { k: u64, seed: u64 },
    /// `Z` (or `Z/mZ` with `p | m`) acting on `{0..p-1}` by translation.
    FiniteCycle { period: u64 },
}

/// Coordinates of a point in one factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointPart {
    Circle(Turns),
    /// The configuration `ω_j = symbol(seed, j + offset)`.
    Config { seed: u64, offset: [i64; MAX_DIM] },
    Residue(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Point {
    parts: Vec<PointPart>,
}

impl Point {
    pub fn new(parts: Vec<PointPart>) -> Self {
        Point { parts }
    }

    pub fn circle(x: f64) -> Self {
        Point::new(alloc::vec![PointPart::Circle(Turns::from_f64(x))])
    }

    pub fn config(seed: u64) -> Self {
        Point::new(alloc::vec![PointPart::Config {
            seed,
            offset: [0; MAX_DIM]
        }])
    }

    pub fn residue(r: u64) -> Self {
        Point::new(alloc::vec![PointPart::Residue(r)])
    }

    pub fn product(points: &[Point]) -> Self {
        Point::new(points.iter().flat_map(|p| p.parts.iter().copied()).collect())
    }

    pub fn parts(&self) -> &[PointPart] {
        &self.parts
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicalSystem {
    group: Group,
    factors: Vec<Factor>,
}

impl DynamicalSystem {
    pub fn rotation(group: &Group, alpha: &[f64]) -> Result<Self> {
        if alpha.len() != group.dim() {
            return Err(Error::DimensionMismatch {
                expected: group.dim(),
                found: alpha.len(),
            });
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(invalid("alpha", "rotation angles must be finite"));
        }
        let scale = match group.kind() {
            GroupKind::Lattice => 1.0,
            GroupKind::Line { step, .. } => step,
            GroupKind::Cyclic { .. } => {
                return Err(Error::GroupMismatch(
                    "circle rotations are driven by a lattice or the line".into(),
                ))
            }
        };
        let mut step = [Turns::ZERO; MAX_DIM];
        for (s, a) in step.iter_mut().zip(alpha) {
            *s = Turns::from_f64(scale * a);
        }
        Ok(DynamicalSystem {
            group: *group,
            factors: alloc::vec![Factor::Rotation {
                alpha: alpha.to_vec(),
                step
            }],
        })
    }

    pub fn bernoulli(group: &Group, k: u64, seed: u64) -> Result<Self> {
        if group.kind() != GroupKind::Lattice {
            return Err(Error::GroupMismatch("Bernoulli shifts are driven by Z^d".into()));
        }
        if k < 2 {
            return Err(invalid("k", "alphabet needs at least two symbols"));
        }
        Ok(DynamicalSystem {
            group: *group,
            factors: alloc::vec![Factor::Bernoulli { k, seed }],
        })
    }

    pub fn finite_cycle(group: &Group, period: u64) -> Result<Self> {
        if period == 0 {
            return Err(invalid("p", "period must be positive"));
        }
        if group.dim() != 1 {
            return Err(Error::GroupMismatch("finite cycles are driven by a one-dimensional group".into()));
        }
        match group.kind() {
            GroupKind::Lattice => {}
            GroupKind::Cyclic { modulus } if modulus % period == 0 => {}
            _ => {
                return Err(Error::GroupMismatch(format!(
                    "a cycle of period {period} needs Z or Z/mZ with p | m"
                )))
            }
        }
        Ok(DynamicalSystem {
            group: *group,
            factors: alloc::vec![Factor::FiniteCycle { period }],
        })
    }

    /// Product action; nested products are flattened.
    pub fn product(parts: &[DynamicalSystem]) -> Result<Self> {
        let first = parts.first().ok_or(Error::EmptySet("parts"))?;
        if parts.iter().any(|p| p.group != first.group) {
            return Err(Error::GroupMismatch("product factors must share one group".into()));
        }
        Ok(DynamicalSystem {
            group: first.group,
            factors: parts.iter().flat_map(|p| p.factors.iter().cloned()).collect(),
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn check_point(&self, x: &Point) -> Result<()> {
        if x.parts.len() != self.factors.len() {
            return Err(invalid("x", "point does not match the system's factors"));
        }
        for (f, p) in self.factors.iter().zip(&x.parts) {
            let ok = match (f, p) {
                (Factor::Rotation { .. }, PointPart::Circle(_)) => true,
                (Factor::Bernoulli { .. }, PointPart::Config { .. }) => true,
                (Factor::FiniteCycle { period }, PointPart::Residue(r)) => r < period,
                _ => false,
            };
            if !ok {
                return Err(invalid("x", "point coordinate has the wrong type"));
            }
        }
        Ok(())
    }

    /// `g·x`.
    pub fn act(&self, g: &Element, x: &Point) -> Result<Point> {
        self.group.check(g)?;
        self.check_point(x)?;
        Ok(self.act_unchecked(g, x))
    }

    pub(crate) fn act_unchecked(&self, g: &Element, x: &Point) -> Point {
        let parts = self
            .factors
            .iter()
            .zip(&x.parts)
            .map(|(f, p)| act_part(f, g, *p))
            .collect();
        Point { parts }
    }

    /// Symbol `ω_j` of a Bernoulli factor.
    pub fn symbol(&self, factor: usize, x: &Point, site: &Element) -> Result<u64> {
        match (self.factors.get(factor), x.parts.get(factor)) {
            (Some(Factor::Bernoulli { k, seed }), Some(PointPart::Config { seed: ps, offset })) => {
                self.group.check(site)?;
                Ok(symbol_at(*k, *seed, *ps, offset, site.coords()))
            }
            _ => Err(invalid("factor", "not a Bernoulli factor")),
        }
    }

    /// `count` i.i.d. draws from the invariant measure. Point `i` uses the
    /// stream `derive(rng_seed, i)`, so any split of the indices across
    /// workers yields the same points.
    pub fn sample_mu(&self, count: usize, rng_seed: u64) -> Vec<Point> {
        (0..count).map(|i| self.sample_one(rng_seed, i as u64)).collect()
    }

    pub fn sample_one(&self, rng_seed: u64, index: u64) -> Point {
        let mut rng = SeedStream::derive(rng_seed, index);
        let parts = self
            .factors
            .iter()
            .map(|f| match f {
                Factor::Rotation { .. } => PointPart::Circle(Turns(rng.next_u64())),
                Factor::Bernoulli { .. } => PointPart::Config {
                    seed: rng.next_u64(),
                    offset: [0; MAX_DIM],
                },
                Factor::FiniteCycle { period } => PointPart::Residue(rng.below(*period)),
            })
            .collect();
        Point { parts }
    }
}

fn act_part(f: &Factor, g: &Element, p: PointPart) -> PointPart {
    match (f, p) {
        (Factor::Rotation { step, .. }, PointPart::Circle(x)) => {
            let mut y = x;
            for (i, &c) in g.coords().iter().enumerate() {
                y += step[i].mul_int(c);
            }
            PointPart::Circle(y)
        }
        (Factor::Bernoulli { .. }, PointPart::Config { seed, mut offset }) => {
            for (o, &c) in offset.iter_mut().zip(g.coords()) {
                *o += c;
            }
            PointPart::Config { seed, offset }
        }
        (Factor::FiniteCycle { period }, PointPart::Residue(r)) => {
            let p = *period as i128;
            PointPart::Residue((r as i128 + g.coord(0) as i128).rem_euclid(p) as u64)
        }
        _ => p,
    }
}

#[inline]
pub(crate) fn symbol_at(k: u64, sys_seed: u64, point_seed: u64, offset: &[i64; MAX_DIM], site: &[i64]) -> u64 {
    let mut words = [0u64; MAX_DIM + 2];
    words[0] = sys_seed;
    words[1] = point_seed;
    for (i, &s) in site.iter().enumerate() {
        words[2 + i] = s.wrapping_add(offset[i]) as u64;
    }
    reduce(hash_words(&words[..2 + site.len()]), k)
}
