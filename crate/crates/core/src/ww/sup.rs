//! Certified maximum of `|A(θ)| = |(1/N) Σ_g c_g e^{2πi g·θ}|` over the dual.
//!
//! With `j = g - lo`, `P(θ) = Σ_j c_j e^{2πi j·θ}` has per-axis degree
//! `D_i = L_i - 1` and `|A| = |P| / N`. The search works on `T = |P|^2`,
//! a real trigonometric polynomial with frequencies in `[-D_i, D_i]`.
//!
//! Bounds used, for a box of half-widths `δ_i` around a center `c`:
//! - first order, on `|A|` over the grid cells: `S ≤ gm / (1 - π Σ D_i δ_i)`;
//! - second order, on `T` over any cell:
//!   `T ≤ T(c) + Σ |∂_i T(c)| δ_i + ½ (2π Σ D_i δ_i)^2 · sup T`.
//!
//! Both follow from the Bernstein inequality along a line segment. The
//! second one drives a branch-and-bound over ternary subdivisions of the
//! FFT grid cells until the upper and lower bounds meet.

use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::fft::fft_nd;
use crate::field::BoxField;
use crate::group::{Character, GroupKind, MAX_DIM};
use crate::sum::ComplexSum;
use crate::turns::Turns;

const MAX_GRID_WORDS: usize = 1 << 23;
const MAX_LEVEL: u32 = 20;
const GOLDEN_ITERATIONS: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupOptions {
    /// Grid points per unit of window width, per axis (`M_i = next_pow2(q L_i)`).
    pub oversample: usize,
    /// Rounds of per-axis golden-section polishing around the best point.
    pub refine_steps: usize,
    /// Stop once `sup T ≤ (1 + rel_tol) · best T`.
    pub rel_tol: f64,
    /// Budget of direct evaluations inside the branch-and-bound.
    pub max_cells: usize,
}

impl Default for SupOptions {
    fn default() -> Self {
        SupOptions {
            oversample: 8,
            refine_steps: 2,
            rel_tol: 1e-6,
            max_cells: 200_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Finite dual, enumerated.
    Exact,
    /// Bernstein-type bound over the whole torus.
    Bernstein,
    /// Bernstein-type bound over the band `[-B, B]^d` only.
    BandLimited,
    /// No valid bound at this oversampling.
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupReport {
    /// Largest `|A|` on the FFT grid.
    pub grid_max: f64,
    /// Largest `|A|` found anywhere (grid, subdivision, polishing).
    pub refined_max: f64,
    pub argmax: Character,
    /// Upper bound on the supremum; `+∞` when `certificate` is `Unbounded`.
    pub certified_upper: f64,
    pub certificate: Certificate,
    /// Grid size per axis (`m` for cyclic groups).
    pub grid: Vec<usize>,
    pub refine_steps: usize,
    pub cells_evaluated: usize,
    pub aliasing_note: Option<String>,
}

/// `sup_ξ |(1/N) Σ_g ξ(g) c_g|` with a two-sided bracket.
pub fn sup_over_dual(field: &BoxField, opts: &SupOptions) -> Result<SupReport> {
    if opts.oversample == 0 {
        return Err(invalid("oversample", "must be at least 1"));
    }
    if !(opts.rel_tol >= 0.0) {
        return Err(invalid("rel_tol", "must be nonnegative"));
    }
    let group = *field.group();
    match group.kind() {
        GroupKind::Cyclic { modulus } => enumerate_cyclic(field, modulus),
        GroupKind::Lattice => Search::new(field, opts, None)?.run(opts),
        GroupKind::Line { step, band } => {
            let band = band.ok_or_else(|| invalid("band", "the sampled line needs a band limit"))?;
            Search::new(field, opts, Some(step * band))?.run(opts)
        }
    }
}

fn enumerate_cyclic(field: &BoxField, modulus: u64) -> Result<SupReport> {
    let group = field.group();
    let d = group.dim();
    let count = (modulus as u128).pow(d as u32);
    if count * field.len() as u128 > 1 << 32 {
        return Err(invalid("m", "finite dual too large to enumerate"));
    }
    let n = field.len() as f64;
    let elems: Vec<_> = field.window().iter().collect();
    let mut best = -1.0;
    let mut best_r = [0u64; MAX_DIM];
    let mut r = [0u64; MAX_DIM];
    for _ in 0..count {
        let xi = Character::cyclic(group, &r[..d])?;
        let mut acc = ComplexSum::new();
        for (g, c) in elems.iter().zip(field.values()) {
            acc.add_product(xi.eval_unchecked(g), *c);
        }
        let v = (acc.value() / n).norm();
        if v > best {
            best = v;
            best_r = r;
        }
        for i in (0..d).rev() {
            r[i] += 1;
            if r[i] < modulus {
                break;
            }
            r[i] = 0;
        }
    }
    Ok(SupReport {
        grid_max: best,
        refined_max: best,
        argmax: Character::cyclic(group, &best_r[..d])?,
        certified_upper: best,
        certificate: Certificate::Exact,
        grid: vec![modulus as usize; d],
        refine_steps: 0,
        cells_evaluated: count as usize,
        aliasing_note: None,
    })
}

#[derive(Clone, Copy)]
struct Cell {
    bound: f64,
    seq: u64,
    center: [Turns; MAX_DIM],
    level: u32,
    t: f64,
    grad: [f64; MAX_DIM],
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Search<'a> {
    field: &'a BoxField,
    dim: usize,
    widths: [usize; MAX_DIM],
    degree: [f64; MAX_DIM],
    grid: [usize; MAX_DIM],
    /// Band half-width in turns (sampled line only).
    band: Option<f64>,
    abs_slack: f64,
    best_t: f64,
    best_theta: [Turns; MAX_DIM],
    best_level: u32,
    evaluated: usize,
}

impl<'a> Search<'a> {
    fn new(field: &'a BoxField, opts: &SupOptions, band: Option<f64>) -> Result<Self> {
        let dim = field.group().dim();
        let mut widths = [1usize; MAX_DIM];
        let mut degree = [0.0; MAX_DIM];
        let mut grid = [1usize; MAX_DIM];
        let mut total = 1usize;
        for i in 0..dim {
            widths[i] = field.window().width(i) as usize;
            degree[i] = (widths[i] - 1) as f64;
            grid[i] = widths[i]
                .checked_mul(opts.oversample)
                .and_then(usize::checked_next_power_of_two)
                .ok_or_else(|| invalid("oversample", "grid too large"))?
                .max(2);
            total = total.saturating_mul(grid[i]);
        }
        if total.saturating_mul(dim + 1) > MAX_GRID_WORDS {
            return Err(invalid("oversample", "dual grid too large for this window"));
        }
        let sum_abs: f64 = field.values().iter().map(|c| c.norm()).sum();
        let n = field.len() as f64;
        Ok(Search {
            field,
            dim,
            widths,
            degree,
            grid,
            band,
            abs_slack: 4.0 * (n + 64.0) * f64::EPSILON * sum_abs,
            best_t: -1.0,
            best_theta: [Turns::ZERO; MAX_DIM],
            best_level: 0,
            evaluated: 0,
        })
    }

    /// Half-width of a level-`level` cell along `axis`, in turns.
    fn half_width(&self, axis: usize, level: u32) -> f64 {
        0.5 / (self.grid[axis] as f64 * libm::pow(3.0, level as f64))
    }

    /// `½ (2π Σ D_i δ_i)^2` at a level.
    fn curvature(&self, level: u32) -> f64 {
        let s: f64 = (0..self.dim)
            .map(|i| self.degree[i] * self.half_width(i, level))
            .sum();
        0.5 * (2.0 * PI * s) * (2.0 * PI * s)
    }

    fn admissible(&self, center: &[Turns; MAX_DIM], level: u32) -> bool {
        match self.band {
            None => true,
            Some(b) => (0..self.dim).all(|i| center[i].to_signed_f64().abs() <= b + self.half_width(i, level)),
        }
    }

    fn in_band(&self, center: &[Turns; MAX_DIM]) -> bool {
        match self.band {
            None => true,
            Some(b) => (0..self.dim).all(|i| center[i].to_signed_f64().abs() <= b),
        }
    }

    fn consider(&mut self, t: f64, center: &[Turns; MAX_DIM], level: u32) {
        if t > self.best_t && self.in_band(center) {
            self.best_t = t;
            self.best_theta = *center;
            self.best_level = level;
        }
    }

    fn cell_bound(&self, t: f64, grad: &[f64; MAX_DIM], level: u32, upper: f64) -> f64 {
        let lin: f64 = (0..self.dim).map(|i| grad[i].abs() * self.half_width(i, level)).sum();
        t + lin + self.curvature(level) * upper
    }

    /// `P` and `∇P` at `θ` by direct summation.
    fn eval_direct(&mut self, theta: &[Turns; MAX_DIM]) -> (f64, [f64; MAX_DIM]) {
        self.evaluated += 1;
        let d = self.dim;
        let tables: Vec<Vec<Complex64>> = (0..d)
            .map(|i| (0..self.widths[i]).map(|j| theta[i].mul_int(j as i64).cis()).collect())
            .collect();
        let inner = self.widths[d - 1];
        let values = self.field.values();
        let outer = values.len() / inner;
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = [zero; MAX_DIM];
        let mut idx = [0usize; MAX_DIM];
        let last = &tables[d - 1];
        for o in 0..outer {
            let row = &values[o * inner..(o + 1) * inner];
            let mut s = zero;
            let mut s1 = zero;
            for (j, (c, w)) in row.iter().zip(last).enumerate() {
                let term = c * w;
                s += term;
                s1 += term * j as f64;
            }
            let mut pre = Complex64::new(1.0, 0.0);
            for i in 0..d - 1 {
                pre *= tables[i][idx[i]];
            }
            let ps = pre * s;
            p += ps;
            for i in 0..d - 1 {
                dp[i] += ps * idx[i] as f64;
            }
            dp[d - 1] += pre * s1;
            for i in (0..d.saturating_sub(1)).rev() {
                idx[i] += 1;
                if idx[i] < self.widths[i] {
                    break;
                }
                idx[i] = 0;
            }
        }
        // ∂_i T = 2 Re(conj(P) · 2πi Σ j_i c_j e^{2πi j·θ}).
        let mut grad = [0.0; MAX_DIM];
        for i in 0..d {
            grad[i] = 2.0 * (p.conj() * dp[i] * Complex64::new(0.0, 2.0 * PI)).re;
        }
        (p.norm_sqr(), grad)
    }

    fn run(mut self, opts: &SupOptions) -> Result<SupReport> {
        let d = self.dim;
        let n = self.field.len() as f64;
        let shape: Vec<usize> = self.grid[..d].to_vec();
        let total: usize = shape.iter().product();

        // Zero-padded P and its partial derivatives on the grid.
        let zero = Complex64::new(0.0, 0.0);
        let mut bufs = vec![vec![zero; total]; d + 1];
        for (g, c) in self.field.window().iter().zip(self.field.values()) {
            let mut pos = 0usize;
            for i in 0..d {
                let j = (g.coord(i) - self.field.window().lo()[i]) as usize;
                pos = pos * self.grid[i] + j;
            }
            bufs[0][pos] = *c;
            for i in 0..d {
                let j = (g.coord(i) - self.field.window().lo()[i]) as f64;
                bufs[i + 1][pos] = c * Complex64::new(0.0, 2.0 * PI * j);
            }
        }
        for b in bufs.iter_mut() {
            fft_nd(b, &shape);
        }

        let mut cells: Vec<(f64, [f64; MAX_DIM], [Turns; MAX_DIM])> = Vec::new();
        let mut k = [0usize; MAX_DIM];
        let mut grid_best = -1.0;
        let mut first_order_peak: f64 = 0.0;
        let mut second_order_peak: f64 = 0.0;
        for pos in 0..total {
            let mut center = [Turns::ZERO; MAX_DIM];
            for i in 0..d {
                center[i] = Turns::from_ratio(k[i] as i128, self.grid[i] as u64);
            }
            if self.admissible(&center, 0) {
                let p = bufs[0][pos];
                let t = p.norm_sqr();
                let mut grad = [0.0; MAX_DIM];
                for i in 0..d {
                    grad[i] = 2.0 * (p.conj() * bufs[i + 1][pos]).re;
                }
                if t > grid_best && self.in_band(&center) {
                    grid_best = t;
                }
                self.consider(t, &center, 0);
                first_order_peak = first_order_peak.max(t);
                second_order_peak = second_order_peak.max(self.cell_bound(t, &grad, 0, 0.0));
                cells.push((t, grad, center));
            }
            for i in (0..d).rev() {
                k[i] += 1;
                if k[i] < self.grid[i] {
                    break;
                }
                k[i] = 0;
            }
        }
        drop(bufs);
        let grid_max = libm::sqrt(grid_best.max(0.0)) / n;

        // Global bounds on sup T from the grid alone.
        let rho: f64 = (0..d).map(|i| PI * self.degree[i] * self.half_width(i, 0)).sum();
        let kappa = self.curvature(0);
        let mut upper = f64::INFINITY;
        if rho < 1.0 {
            upper = upper.min(first_order_peak / ((1.0 - rho) * (1.0 - rho)));
        }
        if kappa < 1.0 {
            upper = upper.min(second_order_peak / (1.0 - kappa));
        }
        let certified = upper.is_finite();

        if certified {
            let mut heap = BinaryHeap::new();
            let mut seq = 0u64;
            for (t, grad, center) in cells.drain(..) {
                let bound = self.cell_bound(t, &grad, 0, upper);
                if bound > self.best_t {
                    heap.push(Cell {
                        bound,
                        seq,
                        center,
                        level: 0,
                        t,
                        grad,
                    });
                    seq += 1;
                }
            }
            let children = 3usize.pow(d as u32);
            loop {
                let top = match heap.peek() {
                    Some(c) => *c,
                    None => break,
                };
                upper = upper.min(top.bound.max(self.best_t));
                if top.bound <= self.best_t * (1.0 + opts.rel_tol)
                    || self.evaluated + children > opts.max_cells
                    || top.level >= MAX_LEVEL
                {
                    break;
                }
                heap.pop();
                let level = top.level + 1;
                let mut offs = [0i64; MAX_DIM];
                offs[..d].fill(-1);
                for _ in 0..children {
                    let mut center = top.center;
                    for i in 0..d {
                        let denom = self.grid[i] as u64 * 3u64.pow(level);
                        center[i] += Turns::from_ratio(offs[i] as i128, denom);
                    }
                    if self.admissible(&center, level) {
                        let (t, grad) = if offs[..d].iter().all(|&o| o == 0) {
                            (top.t, top.grad)
                        } else {
                            self.eval_direct(&center)
                        };
                        self.consider(t, &center, level);
                        let bound = self.cell_bound(t, &grad, level, upper);
                        if bound > self.best_t {
                            heap.push(Cell {
                                bound,
                                seq,
                                center,
                                level,
                                t,
                                grad,
                            });
                            seq += 1;
                        }
                    }
                    for i in (0..d).rev() {
                        offs[i] += 1;
                        if offs[i] <= 1 {
                            break;
                        }
                        offs[i] = -1;
                    }
                }
            }
            upper = upper.min(heap.peek().map_or(self.best_t, |c| c.bound.max(self.best_t)));
        }

        self.polish(opts.refine_steps);

        let refined_max = libm::sqrt(self.best_t.max(0.0)) / n;
        let certified_upper = if certified {
            let u = (libm::sqrt(upper.max(self.best_t).max(0.0)) + self.abs_slack) / n;
            (u * (1.0 + 1e-9)).max(refined_max)
        } else {
            f64::INFINITY
        };
        let argmax = Character::from_turns(self.field.group(), &self.best_theta[..d])?;
        let (certificate, aliasing_note) = match (certified, self.band) {
            (false, _) => (Certificate::Unbounded, None),
            (true, None) => (Certificate::Bernstein, None),
            (true, Some(_)) => (
                Certificate::BandLimited,
                Some(String::from(
                    "bound covers the band-limited dual of the quadrature sum only; \
                     frequencies beyond the band and quadrature error are not certified",
                )),
            ),
        };
        Ok(SupReport {
            grid_max,
            refined_max,
            argmax,
            certified_upper,
            certificate,
            grid: self.grid[..d].to_vec(),
            refine_steps: opts.refine_steps,
            cells_evaluated: self.evaluated,
            aliasing_note,
        })
    }

    /// Per-axis golden-section ascent inside the best point's cell.
    fn polish(&mut self, rounds: usize) {
        let inv_phi = 0.5 * (libm::sqrt(5.0) - 1.0);
        for _ in 0..rounds {
            for axis in 0..self.dim {
                let base = self.best_theta;
                let h = self.half_width(axis, self.best_level);
                let at = |u: f64| {
                    let mut th = base;
                    th[axis] = base[axis] + Turns::from_f64(u);
                    th
                };
                let (mut a, mut b) = (-h, h);
                let mut x1 = b - inv_phi * (b - a);
                let mut x2 = a + inv_phi * (b - a);
                let mut f1 = self.eval_direct(&at(x1)).0;
                let mut f2 = self.eval_direct(&at(x2)).0;
                for _ in 0..GOLDEN_ITERATIONS {
                    if f1 >= f2 {
                        b = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = b - inv_phi * (b - a);
                        f1 = self.eval_direct(&at(x1)).0;
                    } else {
                        a = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = a + inv_phi * (b - a);
                        f2 = self.eval_direct(&at(x2)).0;
                    }
                }
                let (u, t) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
                let level = self.best_level;
                self.consider(t, &at(u), level);
            }
        }
    }
}

impl Certificate {
    pub fn as_str(&self) -> &'static str {
        match self {
            Certificate::Exact => "exact",
            Certificate::Bernstein => "bernstein",
            Certificate::BandLimited => "band-limited",
            Certificate::Unbounded => "unbounded",
        }
    }
}
