//! Weighted ergodic averages over Følner windows.
//!
//! All kernels sum exactly (correctly rounded) and divide by the element
//! count once at the end; Haar weights are uniform on a window and cancel.

mod sup;

pub use sup::{sup_over_dual, Certificate, SupOptions, SupReport};

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::field::BoxField;
use crate::folner::FolnerSequence;
use crate::group::{Character, Element, Group};
use crate::set::Window;
use crate::sum::ComplexSum;
use crate::systems::{DynamicalSystem, Observable, Point};

/// Samples `c_g = f(g·x)` over a window.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitWindow {
    field: BoxField,
    point: Point,
    sup_norm_bound: f64,
}

impl OrbitWindow {
    pub fn sample(sys: &DynamicalSystem, f: &Observable, x: &Point, window: &Window) -> Result<Self> {
        f.check(sys)?;
        sys.check_point(x)?;
        let field = BoxField::from_fn(sys.group(), *window, |g| f.eval_unchecked(sys, &sys.act_unchecked(g, x)))?;
        Ok(OrbitWindow {
            field,
            point: x.clone(),
            sup_norm_bound: f.sup_norm_bound(),
        })
    }

    pub fn field(&self) -> &BoxField {
        &self.field
    }

    pub fn point(&self) -> &Point {
        &self.point
    }

    pub fn sup_norm_bound(&self) -> f64 {
        self.sup_norm_bound
    }

    /// The orbit restricted to a sub-window.
    pub fn restrict(&self, w: &Window) -> Result<OrbitWindow> {
        Ok(OrbitWindow {
            field: self.field.restrict(w)?,
            point: self.point.clone(),
            sup_norm_bound: self.sup_norm_bound,
        })
    }
}

fn check_character(group: &Group, xi: &Character) -> Result<()> {
    if xi.group() != group {
        return Err(Error::GroupMismatch("character belongs to another group".into()));
    }
    Ok(())
}

/// `(1/m(F)) Σ_g ξ(g) c_g m(g)` over the field's window.
pub fn ww_average(field: &BoxField, xi: &Character) -> Result<Complex64> {
    check_character(field.group(), xi)?;
    let mut acc = ComplexSum::new();
    if xi.is_trivial() {
        for c in field.values() {
            acc.add(*c);
        }
    } else {
        for (g, c) in field.window().iter().zip(field.values()) {
            acc.add_product(xi.eval_unchecked(&g), *c);
        }
    }
    Ok(acc.value() / field.len() as f64)
}

/// `(1/m(F)) Σ_g c_g`.
pub fn birkhoff_average(field: &BoxField) -> Complex64 {
    let mut acc = ComplexSum::new();
    for c in field.values() {
        acc.add(*c);
    }
    acc.value() / field.len() as f64
}

/// `(1/m(F_n)) Σ_{g ∈ F_n} ξ(g)`.
pub fn char_average(seq: &FolnerSequence, n: u64, xi: &Character) -> Result<Complex64> {
    check_character(seq.group(), xi)?;
    let w = seq.window(n)?;
    let mut acc = ComplexSum::new();
    for g in w.iter() {
        acc.add(xi.eval_unchecked(&g));
    }
    Ok(acc.value() / w.len() as f64)
}

/// `(1/m(W)) Σ_{g ∈ W} c_{h+g} conj(c_g)`, reading both factors from a field
/// whose box contains `W` and `h + W`.
pub fn correlation_on_field(field: &BoxField, w: &Window, h: &Element) -> Result<Complex64> {
    field.group().check(h)?;
    let shifted = w.translate(h);
    for b in [w, &shifted] {
        if !field.window().contains_window(b) {
            return Err(Error::DomainTooSmall("correlation needs W and h + W".into()));
        }
    }
    let mut acc = ComplexSum::new();
    for g in w.iter() {
        let a = field.get(&g.raw_add(h)).expect("contained");
        let b = field.get(&g).expect("contained");
        acc.add_product_conj(a, b);
    }
    Ok(acc.value() / w.len() as f64)
}

/// `(1/m(F_n)) Σ_{g ∈ F_n} f((h+g)·x) conj(f(g·x))`.
pub fn correlation_average(
    sys: &DynamicalSystem,
    f: &Observable,
    x: &Point,
    seq: &FolnerSequence,
    n: u64,
    h: &Element,
) -> Result<Complex64> {
    f.check(sys)?;
    sys.check_point(x)?;
    sys.group().check(h)?;
    let w = seq.window(n)?;
    let group = sys.group();
    let mut acc = ComplexSum::new();
    for g in w.iter() {
        let a = f.eval_unchecked(sys, &sys.act_unchecked(&group.add(h, &g), x));
        let b = f.eval_unchecked(sys, &sys.act_unchecked(&g, x));
        acc.add_product_conj(a, b);
    }
    Ok(acc.value() / w.len() as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub enum DecayMode {
    Fixed(Character),
    Sup(SupOptions),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayPoint {
    pub n: u64,
    /// `|A_n(ξ)|` (fixed mode) or the best lower bound on the supremum.
    pub value: f64,
    /// `A_n(ξ)` in fixed mode.
    pub average: Option<Complex64>,
    /// Certified upper bound in sup mode.
    pub certified_upper: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayCurve {
    pub points: Vec<DecayPoint>,
}

/// Smallest box containing every window in the list.
fn hull(windows: &[Window]) -> Window {
    let first = windows[0];
    let d = first.dim();
    let mut lo = first.lo().to_vec();
    let mut hi = first.hi().to_vec();
    for w in &windows[1..] {
        for i in 0..d {
            lo[i] = lo[i].min(w.lo()[i]);
            hi[i] = hi[i].max(w.hi()[i]);
        }
    }
    Window::new(&lo, &hi).expect("hull of valid boxes")
}

/// Averages along `n_list`, sampling the orbit once on the hull of the
/// windows and slicing it.
pub fn decay_curve(
    sys: &DynamicalSystem,
    f: &Observable,
    x: &Point,
    seq: &FolnerSequence,
    n_list: &[u64],
    mode: &DecayMode,
) -> Result<DecayCurve> {
    if n_list.is_empty() {
        return Err(invalid("n_list", "must be nonempty"));
    }
    if n_list.windows(2).any(|p| p[0] >= p[1]) {
        return Err(invalid("n_list", "must be strictly increasing"));
    }
    let windows = n_list.iter().map(|&n| seq.window(n)).collect::<Result<Vec<_>>>()?;
    let mut span = hull(&windows);
    if sys.group().modulus().is_some() {
        span = span.canonical(sys.group());
    }
    let orbit = if windows.iter().all(|w| span.contains_window(w)) {
        Some(OrbitWindow::sample(sys, f, x, &span)?)
    } else {
        None
    };
    let mut points = Vec::with_capacity(n_list.len());
    for (&n, w) in n_list.iter().zip(&windows) {
        let local = match &orbit {
            Some(o) => o.restrict(w)?,
            None => OrbitWindow::sample(sys, f, x, w)?,
        };
        points.push(match mode {
            DecayMode::Fixed(xi) => {
                let a = ww_average(local.field(), xi)?;
                DecayPoint {
                    n,
                    value: a.norm(),
                    average: Some(a),
                    certified_upper: None,
                }
            }
            DecayMode::Sup(opts) => {
                let r = sup_over_dual(local.field(), opts)?;
                DecayPoint {
                    n,
                    value: r.refined_max,
                    average: None,
                    certified_upper: Some(r.certified_upper),
                }
            }
        });
    }
    Ok(DecayCurve { points })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledSup {
    /// Largest lower bound over the sampled points: a sampled lower bound
    /// of `sup_x sup_ξ |A_n(ξ, x)|`, not a certificate for all `x`.
    pub lower: f64,
    /// Largest certified upper bound over the sampled points.
    pub upper: f64,
    /// Index of the point attaining `lower`.
    pub worst_point: usize,
}

pub fn sup_over_points(
    sys: &DynamicalSystem,
    f: &Observable,
    seq: &FolnerSequence,
    n: u64,
    point_count: usize,
    seed: u64,
    opts: &SupOptions,
) -> Result<SampledSup> {
    if point_count == 0 {
        return Err(invalid("point_count", "must be at least 1"));
    }
    let w = seq.window(n)?;
    let mut out = SampledSup {
        lower: 0.0,
        upper: 0.0,
        worst_point: 0,
    };
    for i in 0..point_count {
        let x = sys.sample_one(seed, i as u64);
        let r = sup_over_dual(OrbitWindow::sample(sys, f, &x, &w)?.field(), opts)?;
        if r.refined_max > out.lower {
            out.lower = r.refined_max;
            out.worst_point = i;
        }
        out.upper = out.upper.max(r.certified_upper);
    }
    Ok(out)
}
