use alloc::format;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::{symbol_at, DynamicalSystem, Factor, Point, PointPart};
use crate::error::{Error, Result};
use crate::group::Element;
use crate::turns::Turns;

/// A bounded complex function on the point space, built from leaves that
/// each read one factor.
#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    Constant(Complex64),
    /// `Σ c_k e^{2πi k (x + shift)}` on a circle factor.
    Trig {
        factor: usize,
        terms: Vec<(i64, Complex64)>,
        shift: Turns,
    },
    /// `table[ω_site]` on a Bernoulli factor.
    Symbol {
        factor: usize,
        site: Element,
        table: Vec<Complex64>,
    },
    /// `table[(r + shift) mod p]` on a finite cycle.
    State {
        factor: usize,
        table: Vec<Complex64>,
        shift: u64,
    },
    Sum(Vec<Observable>),
    Product(Vec<Observable>),
}

impl Observable {
    pub fn zero() -> Self {
        Observable::Constant(Complex64::new(0.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Observable::Constant(c)
    }

    pub fn trig(factor: usize, terms: Vec<(i64, Complex64)>) -> Self {
        Observable::Trig {
            factor,
            terms,
            shift: Turns::ZERO,
        }
    }

    /// `e^{2πi k x}` on a circle factor.
    pub fn circle_character(factor: usize, k: i64) -> Self {
        Self::trig(factor, alloc::vec![(k, Complex64::new(1.0, 0.0))])
    }

    pub fn symbol(factor: usize, site: Element, table: Vec<Complex64>) -> Self {
        Observable::Symbol { factor, site, table }
    }

    /// `a ↦ 2a/(k-1) - 1` read at site 0: mean zero, values in `[-1, 1]`.
    pub fn centered_symbol(factor: usize, dim: usize, k: u64) -> Self {
        let table = (0..k)
            .map(|a| Complex64::new(2.0 * a as f64 / (k - 1) as f64 - 1.0, 0.0))
            .collect();
        Self::symbol(factor, Element::zero(dim), table)
    }

    pub fn state(factor: usize, table: Vec<Complex64>) -> Self {
        Observable::State {
            factor,
            table,
            shift: 0,
        }
    }

    /// Indicator of the residue `r` on a cycle of period `p`.
    pub fn state_indicator(factor: usize, p: u64, r: u64) -> Self {
        let table = (0..p)
            .map(|s| Complex64::new(if s == r { 1.0 } else { 0.0 }, 0.0))
            .collect();
        Self::state(factor, table)
    }

    pub fn scaled(self, c: Complex64) -> Self {
        Observable::Product(alloc::vec![Observable::Constant(c), self])
    }

    pub fn is_zero_constant(&self) -> bool {
        matches!(self, Observable::Constant(c) if *c == Complex64::new(0.0, 0.0))
    }

    /// Checks that every leaf reads a factor of the matching type.
    pub fn check(&self, sys: &DynamicalSystem) -> Result<()> {
        let factor_of = |i: usize| {
            sys.factors().get(i).ok_or_else(|| {
                Error::IncompatibleObservable(format!("factor {i} does not exist"))
            })
        };
        match self {
            Observable::Constant(_) => Ok(()),
            Observable::Trig { factor, .. } => match factor_of(*factor)? {
                Factor::Rotation { .. } => Ok(()),
                _ => Err(Error::IncompatibleObservable(format!(
                    "trigonometric leaf on non-circle factor {factor}"
                ))),
            },
            Observable::Symbol { factor, site, table } => match factor_of(*factor)? {
                Factor::Bernoulli { k, .. } => {
                    if table.len() as u64 != *k {
                        return Err(Error::IncompatibleObservable(format!(
                            "symbol table has {} entries for an alphabet of {k}",
                            table.len()
                        )));
                    }
                    sys.group().check(site)
                }
                _ => Err(Error::IncompatibleObservable(format!(
                    "symbol leaf on non-Bernoulli factor {factor}"
                ))),
            },
            Observable::State { factor, table, .. } => match factor_of(*factor)? {
                Factor::FiniteCycle { period } if table.len() as u64 == *period => Ok(()),
                _ => Err(Error::IncompatibleObservable(format!(
                    "state leaf does not fit factor {factor}"
                ))),
            },
            Observable::Sum(v) | Observable::Product(v) => v.iter().try_for_each(|o| o.check(sys)),
        }
    }

    /// `f(x)`.
    pub fn eval(&self, sys: &DynamicalSystem, x: &Point) -> Result<Complex64> {
        self.check(sys)?;
        sys.check_point(x)?;
        Ok(self.eval_unchecked(sys, x))
    }

    pub(crate) fn eval_unchecked(&self, sys: &DynamicalSystem, x: &Point) -> Complex64 {
        match self {
            Observable::Constant(c) => *c,
            Observable::Trig { factor, terms, shift } => {
                let PointPart::Circle(t) = x.parts()[*factor] else {
                    unreachable!("checked observable")
                };
                let base = t + *shift;
                terms.iter().map(|(k, c)| c * base.mul_int(*k).cis()).sum()
            }
            Observable::Symbol { factor, site, table } => {
                let (Factor::Bernoulli { k, seed }, PointPart::Config { seed: ps, offset }) =
                    (&sys.factors()[*factor], &x.parts()[*factor])
                else {
                    unreachable!("checked observable")
                };
                table[symbol_at(*k, *seed, *ps, offset, site.coords()) as usize]
            }
            Observable::State { factor, table, shift } => {
                let PointPart::Residue(r) = x.parts()[*factor] else {
                    unreachable!("checked observable")
                };
                let p = table.len() as u64;
                table[((r % p + shift % p) % p) as usize]
            }
            Observable::Sum(v) => v.iter().map(|o| o.eval_unchecked(sys, x)).sum(),
            Observable::Product(v) => v
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, o| acc * o.eval_unchecked(sys, x)),
        }
    }

    /// `x ↦ f(g·x)`, represented exactly.
    pub fn translate(&self, sys: &DynamicalSystem, g: &Element) -> Result<Observable> {
        self.check(sys)?;
        sys.group().check(g)?;
        Ok(self.translate_unchecked(sys, g))
    }

    fn translate_unchecked(&self, sys: &DynamicalSystem, g: &Element) -> Observable {
        match self {
            Observable::Constant(c) => Observable::Constant(*c),
            Observable::Trig { factor, terms, shift } => {
                let Factor::Rotation { step, .. } = &sys.factors()[*factor] else {
                    unreachable!("checked observable")
                };
                let mut s = *shift;
                for (i, &c) in g.coords().iter().enumerate() {
                    s += step[i].mul_int(c);
                }
                Observable::Trig {
                    factor: *factor,
                    terms: terms.clone(),
                    shift: s,
                }
            }
            Observable::Symbol { factor, site, table } => Observable::Symbol {
                factor: *factor,
                site: site.raw_add(g),
                table: table.clone(),
            },
            Observable::State { factor, table, shift } => {
                let p = table.len() as i128;
                let s = (*shift as i128 + g.coord(0) as i128).rem_euclid(p) as u64;
                Observable::State {
                    factor: *factor,
                    table: table.clone(),
                    shift: s,
                }
            }
            Observable::Sum(v) => Observable::Sum(v.iter().map(|o| o.translate_unchecked(sys, g)).collect()),
            Observable::Product(v) => {
                Observable::Product(v.iter().map(|o| o.translate_unchecked(sys, g)).collect())
            }
        }
    }

    /// The pointwise complex conjugate.
    pub fn conj(&self) -> Observable {
        match self {
            Observable::Constant(c) => Observable::Constant(c.conj()),
            Observable::Trig { factor, terms, shift } => Observable::Trig {
                factor: *factor,
                terms: terms.iter().map(|(k, c)| (-k, c.conj())).collect(),
                shift: *shift,
            },
            Observable::Symbol { factor, site, table } => Observable::Symbol {
                factor: *factor,
                site: *site,
                table: table.iter().map(|c| c.conj()).collect(),
            },
            Observable::State { factor, table, shift } => Observable::State {
                factor: *factor,
                table: table.iter().map(|c| c.conj()).collect(),
                shift: *shift,
            },
            Observable::Sum(v) => Observable::Sum(v.iter().map(Observable::conj).collect()),
            Observable::Product(v) => Observable::Product(v.iter().map(Observable::conj).collect()),
        }
    }

    /// An upper bound on `sup |f|` from the expression tree.
    pub fn sup_norm_bound(&self) -> f64 {
        let max_abs = |t: &[Complex64]| t.iter().map(|c| c.norm()).fold(0.0, f64::max);
        match self {
            Observable::Constant(c) => c.norm(),
            Observable::Trig { terms, .. } => terms.iter().map(|(_, c)| c.norm()).sum(),
            Observable::Symbol { table, .. } | Observable::State { table, .. } => max_abs(table),
            Observable::Sum(v) => v.iter().map(Observable::sup_norm_bound).sum(),
            Observable::Product(v) => v.iter().map(Observable::sup_norm_bound).product(),
        }
    }
}

impl Add for Observable {
    type Output = Observable;
    fn add(self, rhs: Observable) -> Observable {
        match self {
            Observable::Sum(mut v) => {
                v.push(rhs);
                Observable::Sum(v)
            }
            lhs => Observable::Sum(alloc::vec![lhs, rhs]),
        }
    }
}

impl Sub for Observable {
    type Output = Observable;
    fn sub(self, rhs: Observable) -> Observable {
        self + rhs.scaled(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for Observable {
    type Output = Observable;
    fn mul(self, rhs: Observable) -> Observable {
        Observable::Product(alloc::vec![self, rhs])
    }
}

impl From<Complex64> for Observable {
    fn from(c: Complex64) -> Self {
        Observable::Constant(c)
    }
}
