//! Both sides of the finitary van der Corput inequality over box Følner
//! windows, and the infinitary trend check built on it.
//!
//! The double average over `(h1, h2) ∈ F_H × F_H` only depends on
//! `s = h1 - h2`, so it is summed over the difference box with pair counts.
//! Counts times values go through `ExactSum::add_product`, which makes the
//! grouped sum bit-identical to the plain double loop.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::field::BoxField;
use crate::folner::{translate_ratio_sup, FolnerSequence};
use crate::group::{Character, Element, GroupKind};
use crate::set::Window;
use crate::sum::ExactSum;
use crate::systems::{DynamicalSystem, Observable, Point};
use crate::ww::{birkhoff_average, correlation_on_field};

/// A bounded function known on a box, with a declared bound on `|f|`.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowedFunction {
    field: BoxField,
    sup_norm_bound: f64,
}

impl WindowedFunction {
    /// `bound` must dominate every sample.
    pub fn new(field: BoxField, bound: f64) -> Result<Self> {
        if !bound.is_finite() || bound < field.max_abs() {
            return Err(invalid(
                "bound",
                format!("{bound} does not dominate the largest sample {}", field.max_abs()),
            ));
        }
        Ok(WindowedFunction {
            field,
            sup_norm_bound: bound,
        })
    }

    /// Uses the largest sample as the bound.
    pub fn from_field(field: BoxField) -> Self {
        let sup_norm_bound = field.max_abs();
        WindowedFunction { field, sup_norm_bound }
    }

    /// `f̃(g) = ξ(g) f(g·x)` over `window`.
    pub fn from_orbit(
        sys: &DynamicalSystem,
        f: &Observable,
        x: &Point,
        xi: &Character,
        window: &Window,
    ) -> Result<Self> {
        if xi.group() != sys.group() {
            return Err(Error::GroupMismatch("character belongs to another group".into()));
        }
        f.check(sys)?;
        sys.check_point(x)?;
        let field = BoxField::from_fn(sys.group(), *window, |g| {
            xi.eval_unchecked(g) * f.eval_unchecked(sys, &sys.act_unchecked(g, x))
        })?;
        // A rounded `ξ(g)` may push a sample a few ulps past `‖f‖_∞`.
        let bound = f.sup_norm_bound().max(field.max_abs());
        Self::new(field, bound)
    }

    pub fn field(&self) -> &BoxField {
        &self.field
    }

    pub fn sup_norm_bound(&self) -> f64 {
        self.sup_norm_bound
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VdcReport {
    pub n: u64,
    pub big_h: u64,
    /// `|avg_{F_n} f|²`.
    pub lhs: f64,
    /// `avg_{h1, h2 ∈ F_H} |avg_{g ∈ F_n} f(h1 - h2 + g) conj(f(g))|`.
    pub rhs_main: f64,
    /// `3 ρ ‖f‖²`.
    pub rhs_err1: f64,
    /// `ρ² ‖f‖²`.
    pub rhs_err2: f64,
    /// `sup_{h ∈ F_H} m((h + F_n) Δ F_n) / m(F_n)`.
    pub rho: f64,
    pub tol: f64,
    pub holds: bool,
}

impl VdcReport {
    pub fn rhs(&self) -> f64 {
        self.rhs_main + self.rhs_err1 + self.rhs_err2
    }
}

/// Number of `(a, b) ∈ [lo, hi]²` with `a - b = s`.
fn difference_count(w: &Window, s: &Element) -> u64 {
    (0..w.dim())
        .map(|i| w.width(i).saturating_sub(s.coord(i).unsigned_abs()))
        .product()
}

fn check_inputs(f: &WindowedFunction, seq: &FolnerSequence) -> Result<()> {
    if f.field.group() != seq.group() {
        return Err(Error::GroupMismatch("function and Følner sequence live on different groups".into()));
    }
    if let GroupKind::Cyclic { .. } = seq.group().kind() {
        return Err(invalid("group", "compact groups have no growing Følner windows"));
    }
    Ok(())
}

fn require(f: &WindowedFunction, need: &Window) -> Result<()> {
    if f.field.window().contains_window(need) {
        Ok(())
    } else {
        Err(Error::DomainTooSmall(format!(
            "samples cover {:?}..{:?} but {:?}..{:?} is needed",
            f.field.window().lo(),
            f.field.window().hi(),
            need.lo(),
            need.hi()
        )))
    }
}

/// `avg_{h1, h2 ∈ wh} |corr_{wn}(h1 - h2)|`, grouped by difference.
fn double_correlation_average(field: &BoxField, wn: &Window, wh: &Window) -> Result<f64> {
    let diffs = wh.sum(&wh.negate());
    let mut acc = ExactSum::new();
    for s in diffs.iter() {
        let c = difference_count(wh, &s);
        let v = correlation_on_field(field, wn, &s)?.norm();
        acc.add_product(c as f64, v);
    }
    let m = wh.len() as f64;
    Ok(acc.value() / (m * m))
}

/// Evaluates both sides at `(n, H)`. `tol` defaults to `1e-9 ‖f‖²`.
pub fn vdc_check(f: &WindowedFunction, seq: &FolnerSequence, n: u64, big_h: u64, tol: Option<f64>) -> Result<VdcReport> {
    check_inputs(f, seq)?;
    let wn = seq.window(n)?;
    let wh = seq.window(big_h)?;
    require(f, &wn.sum(&wh.sum(&wh.negate())))?;
    let norm2 = f.sup_norm_bound * f.sup_norm_bound;
    let tol = tol.unwrap_or(1e-9 * norm2);
    if !(tol >= 0.0) {
        return Err(invalid("tol", "must be non-negative"));
    }
    let lhs = birkhoff_average(&f.field.restrict(&wn)?).norm_sqr();
    let rhs_main = double_correlation_average(&f.field, &wn, &wh)?;
    let rho = translate_ratio_sup(seq, n, big_h)?.0.value();
    let rhs_err1 = 3.0 * rho * norm2;
    let rhs_err2 = rho * rho * norm2;
    Ok(VdcReport {
        n,
        big_h,
        lhs,
        rhs_main,
        rhs_err1,
        rhs_err2,
        rho,
        tol,
        holds: lhs <= rhs_main + rhs_err1 + rhs_err2 + tol,
    })
}

/// Plain averages against the γ double averages, with `γ_h` read at the
/// largest `n` in place of a limsup.
#[derive(Clone, Debug, PartialEq)]
pub struct VdcTrend {
    /// `(n, |avg_{F_n} f|)` in the given order.
    pub plain: Vec<(u64, f64)>,
    /// `(H, avg_{h1, h2 ∈ F_H} γ_{h1 - h2})` in the given order.
    pub gamma: Vec<(u64, f64)>,
    /// The window index at which every `γ_h` was evaluated.
    pub gamma_n: u64,
}

pub fn vdc_trend(f: &WindowedFunction, seq: &FolnerSequence, n_list: &[u64], h_list: &[u64]) -> Result<VdcTrend> {
    check_inputs(f, seq)?;
    let gamma_n = *n_list.iter().max().ok_or(Error::EmptySet("n_list"))?;
    let wn_star = seq.window(gamma_n)?;
    let mut plain = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let wn = seq.window(n)?;
        require(f, &wn)?;
        plain.push((n, birkhoff_average(&f.field.restrict(&wn)?).norm()));
    }
    let mut gamma = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let wh = seq.window(h)?;
        require(f, &wn_star.sum(&wh.sum(&wh.negate())))?;
        gamma.push((h, double_correlation_average(&f.field, &wn_star, &wh)?));
    }
    Ok(VdcTrend { plain, gamma, gamma_n })
}

/// The same report by the plain `(h1, h2)` double loop, for cross-checks.
pub fn vdc_check_direct(f: &WindowedFunction, seq: &FolnerSequence, n: u64, big_h: u64, tol: Option<f64>) -> Result<VdcReport> {
    let grouped = vdc_check(f, seq, n, big_h, tol)?;
    let wn = seq.window(n)?;
    let wh = seq.window(big_h)?;
    let mut acc = ExactSum::new();
    for h1 in wh.iter() {
        for h2 in wh.iter() {
            let s = seq.group().sub(&h1, &h2);
            acc.add(correlation_on_field(&f.field, &wn, &s)?.norm());
        }
    }
    let m = wh.len() as f64;
    let rhs_main = acc.value() / (m * m);
    Ok(VdcReport {
        rhs_main,
        holds: grouped.lhs <= rhs_main + grouped.rhs_err1 + grouped.rhs_err2 + grouped.tol,
        ..grouped
    })
}

/// `|avg_{F_n} f|` for `f` sampled on a larger box.
pub fn plain_average(f: &WindowedFunction, seq: &FolnerSequence, n: u64) -> Result<Complex64> {
    check_inputs(f, seq)?;
    let wn = seq.window(n)?;
    require(f, &wn)?;
    Ok(birkhoff_average(&f.field.restrict(&wn)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folner::box_corners;
    use crate::group::Group;
    use crate::hash::SeedStream;
    use crate::turns::Turns;

    fn z() -> Group {
        Group::lattice(1).unwrap()
    }

    #[test]
    fn constant_function_is_tight() {
        let g = z();
        let seq = FolnerSequence::cubes(&g, 50).unwrap();
        for (n, h) in [(5u64, 2u64), (20, 5), (50, 10)] {
            let w = Window::cube(1, (n + 2 * h) as i64);
            let f = WindowedFunction::from_field(BoxField::from_fn(&g, w, |_| Complex64::new(1.0, 0.0)).unwrap());
            let r = vdc_check(&f, &seq, n, h, None).unwrap();
            assert_eq!(r.lhs, 1.0);
            assert_eq!(r.rhs_main, 1.0);
            let rho = 2.0 * h as f64 / (2 * n + 1) as f64;
            assert_eq!(r.rho, rho);
            assert_eq!(r.rhs_err1 + r.rhs_err2, 3.0 * rho + rho * rho);
            assert!(r.holds);
        }
    }

    #[test]
    fn rho_sup_sits_at_a_corner() {
        let g = Group::lattice(2).unwrap();
        let seq = FolnerSequence::cubes(&g, 9).unwrap();
        let (r, _) = translate_ratio_sup(&seq, 9, 3).unwrap();
        let wn = seq.window(9).unwrap();
        let best = box_corners(&seq.window(3).unwrap())
            .iter()
            .map(|h| crate::folner::translate_ratio(&g, &wn, h).unwrap())
            .max_by(|a, b| a.cmp_exact(b))
            .unwrap();
        assert_eq!(r.cmp_exact(&best), core::cmp::Ordering::Equal);
    }

    #[test]
    fn character_orbit_matches_dirichlet_forms() {
        let g = z();
        let beta = libm::sqrt(2.0) - 1.0;
        let seq = FolnerSequence::cubes(&g, 40).unwrap();
        let (n, h) = (40u64, 4u64);
        let w = Window::cube(1, (n + 2 * h) as i64);
        let t = Turns::from_f64(beta);
        let f = WindowedFunction::new(BoxField::from_fn(&g, w, |e| t.mul_int(e.coord(0)).cis()).unwrap(), 1.0).unwrap();
        let r = vdc_check(&f, &seq, n, h, None).unwrap();
        let m = (2 * n + 1) as f64;
        let d = libm::sin(m * core::f64::consts::PI * beta) / (m * libm::sin(core::f64::consts::PI * beta));
        assert!((r.lhs - d * d).abs() < 1e-14);
        // |corr| = 1 for every shift.
        assert!((r.rhs_main - 1.0).abs() < 1e-14);
        assert!(r.holds);
    }

    #[test]
    fn grouped_and_direct_agree_bitwise() {
        let g = Group::lattice(2).unwrap();
        let seq = FolnerSequence::cubes(&g, 6).unwrap();
        let mut rng = SeedStream::new(11);
        for (n, h) in [(0u64, 0u64), (2, 1), (4, 2), (6, 2)] {
            let w = Window::cube(2, (n + 2 * h) as i64);
            let field = BoxField::from_fn(&g, w, |_| Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5)).unwrap();
            let f = WindowedFunction::from_field(field);
            let a = vdc_check(&f, &seq, n, h, None).unwrap();
            let b = vdc_check_direct(&f, &seq, n, h, None).unwrap();
            assert_eq!(a.rhs_main.to_bits(), b.rhs_main.to_bits());
            assert!(a.holds);
        }
    }

    #[test]
    fn short_domain_is_an_error() {
        let g = z();
        let seq = FolnerSequence::cubes(&g, 10).unwrap();
        let f = WindowedFunction::from_field(BoxField::from_fn(&g, Window::cube(1, 13), |_| Complex64::new(1.0, 0.0)).unwrap());
        assert!(matches!(vdc_check(&f, &seq, 10, 2, None), Err(Error::DomainTooSmall(_))));
        assert!(vdc_check(&f, &seq, 9, 2, None).is_ok());
    }

    #[test]
    fn declared_bound_must_dominate() {
        let g = z();
        let field = BoxField::from_fn(&g, Window::cube(1, 2), |e| Complex64::new(e.coord(0) as f64, 0.0)).unwrap();
        assert!(WindowedFunction::new(field.clone(), 1.5).is_err());
        assert!(WindowedFunction::new(field, 2.0).is_ok());
    }

    #[test]
    fn trend_for_zero_and_eigen_orbits() {
        let g = z();
        let seq = FolnerSequence::cubes(&g, 64).unwrap();
        let w = Window::cube(1, 64 + 16);
        let zero = WindowedFunction::from_field(BoxField::from_fn(&g, w, |_| Complex64::new(0.0, 0.0)).unwrap());
        let tr = vdc_trend(&zero, &seq, &[4, 16, 64], &[2, 8]).unwrap();
        assert!(tr.plain.iter().chain(&tr.gamma).all(|p| p.1 == 0.0));
        let alpha = 0.5 * (libm::sqrt(5.0) - 1.0);
        let sys = DynamicalSystem::rotation(&g, &[alpha]).unwrap();
        let e = Observable::circle_character(0, 1);
        let f = WindowedFunction::from_orbit(&sys, &e, &Point::circle(0.1), &Character::trivial(&g), &w).unwrap();
        let tr = vdc_trend(&f, &seq, &[4, 16, 64], &[2, 8]).unwrap();
        assert_eq!(tr.gamma_n, 64);
        for (_, v) in &tr.gamma {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }
}
