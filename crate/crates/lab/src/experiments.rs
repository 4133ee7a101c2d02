//! The eight experiment kinds. Each one is a pure function of its config:
//! work items are evaluated in parallel and collected in declared order, so
//! outputs do not depend on the worker count.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use folnerlab_core::field::BoxField;
use folnerlab_core::folner::{
    boundary_report, check_dilation_inclusion, k_boundary_by_definition, k_boundary_of, temperedness,
    translate_ratio_sup, FolnerSequence,
};
use folnerlab_core::hash::SeedStream;
use folnerlab_core::kronecker::{
    correlation_limit, heuristic_peaks, project, verify, wmix_average, wmix_double_average, EigenBasis,
};
use folnerlab_core::systems::{inner_product, DynamicalSystem, Observable, Quadrature};
use folnerlab_core::vdc::{vdc_check, vdc_trend, VdcReport, WindowedFunction};
use folnerlab_core::ww::{
    correlation_average, decay_curve, sup_over_dual, ww_average, DecayMode, OrbitWindow, SupOptions,
};
use folnerlab_core::{Character, Element, ElementSet, Group, GroupKind, Window};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::output::{json_bytes, num, Table};
use crate::LabError;

/// Data files (name, bytes) in write order, summary lines for the terminal,
/// and every failed invariant.
#[derive(Clone, Debug, Default)]
pub struct ExperimentOutput {
    pub files: Vec<(String, Vec<u8>)>,
    pub summary: Vec<String>,
    pub violations: Vec<String>,
}

pub fn execute(cfg: &ExperimentConfig) -> Result<ExperimentOutput, LabError> {
    cfg.validate()?;
    let group = cfg.build_group()?;
    let seq = cfg.folner.build(&group, cfg.n_max())?;
    match cfg.experiment {
        ExperimentKind::FolnerCheck => folner_check(cfg, &group, &seq),
        ExperimentKind::Decompose => decompose(cfg, &group, &seq),
        ExperimentKind::WwSweep => ww_sweep(cfg, &group, &seq),
        ExperimentKind::WwSup => ww_sup(cfg, &group, &seq),
        ExperimentKind::Decay => decay(cfg, &group, &seq),
        ExperimentKind::VdcCheck => vdc_check_run(cfg, &group, &seq),
        ExperimentKind::VdcFuzz => vdc_fuzz(cfg, &group, &seq),
        ExperimentKind::Correlation => correlation(cfg, &group, &seq),
    }
}

fn join(params: &[f64]) -> String {
    params.iter().map(|p| num(*p)).collect::<Vec<_>>().join(";")
}

fn point_of(sys: &DynamicalSystem, seed: u64) -> folnerlab_core::systems::Point {
    sys.sample_one(seed, 0)
}

fn sup_options(cfg: &ExperimentConfig) -> SupOptions {
    SupOptions {
        oversample: cfg.oversample,
        ..SupOptions::default()
    }
}

/// Smallest box containing all of `windows`.
fn hull(windows: &[Window]) -> Window {
    let d = windows[0].dim();
    let mut lo = windows[0].lo().to_vec();
    let mut hi = windows[0].hi().to_vec();
    for w in &windows[1..] {
        for i in 0..d {
            lo[i] = lo[i].min(w.lo()[i]);
            hi[i] = hi[i].max(w.hi()[i]);
        }
    }
    Window::new(&lo, &hi).expect("hull of valid boxes")
}

/// The shift `h e_1`.
fn axis_shift(group: &Group, h: i64) -> Element {
    let mut c = vec![0i64; group.dim()];
    c[0] = h;
    group.reduce(Element::new(&c).expect("dimension in range"))
}

/// `{-1, 0, 1}^d`, reduced.
fn unit_neighbourhood(group: &Group) -> Result<ElementSet, LabError> {
    let w = Window::cube(group.dim(), 1);
    Ok(ElementSet::from_iter(group, w.iter().map(|g| group.reduce(g)))?)
}

fn folner_check(cfg: &ExperimentConfig, group: &Group, seq: &FolnerSequence) -> Result<ExperimentOutput, LabError> {
    let k = unit_neighbourhood(group)?;
    let n_top = *cfg.n_list.iter().max().expect("validated");
    let tempered = temperedness(seq, n_top)?;
    let big_h = cfg.h_list.iter().max().copied().unwrap_or(1);
    let rows = cfg
        .n_list
        .par_iter()
        .map(|&n| -> Result<_, LabError> {
            let report = boundary_report(seq, n, &k)?;
            let f = seq.set(n)?;
            let by_def = k_boundary_by_definition(group, &f, &k)?;
            let formula_agrees = k_boundary_of(group, &f, &k)? == by_def;
            let inclusion = check_dilation_inclusion(group, &f, &k)?;
            let (rho, _) = translate_ratio_sup(seq, n, big_h)?;
            Ok((n, seq.count(n)?, report, formula_agrees, inclusion.holds, rho))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&[
        "n",
        "count",
        "sym_diff_num",
        "sym_diff_den",
        "sym_diff",
        "k_boundary_num",
        "k_boundary",
        "formula_matches_definition",
        "dilation_inclusion",
        "tempered_num",
        "tempered_den",
        "tempered",
        "translate_sup_h",
        "translate_sup",
    ]);
    let mut out = ExperimentOutput::default();
    for (n, count, r, agrees, incl, rho) in rows {
        let t = tempered.ratios.iter().find(|(m, _)| *m == n).map(|(_, r)| *r);
        table.push(vec![
            n.to_string(),
            count.to_string(),
            r.sym_diff.numerator.to_string(),
            r.sym_diff.denominator.to_string(),
            num(r.sym_diff.value()),
            r.k_boundary.numerator.to_string(),
            num(r.k_boundary.value()),
            agrees.to_string(),
            incl.to_string(),
            t.map_or(String::new(), |t| t.numerator.to_string()),
            t.map_or(String::new(), |t| t.denominator.to_string()),
            t.map_or(String::new(), |t| num(t.value())),
            big_h.to_string(),
            num(rho.value()),
        ]);
        if !agrees {
            out.violations.push(format!("n={n}: boundary formula disagrees with the definition"));
        }
        if !incl {
            out.violations.push(format!("n={n}: K F is not inside F ∪ ∂_K F"));
        }
    }
    out.summary.push(format!(
        "folner-check: {} windows, observed temperedness constant {}",
        table.len(),
        num(tempered.c_observed)
    ));
    out.files.push(("folner.csv".into(), table.to_bytes()));
    Ok(out)
}

#[derive(Serialize)]
struct CoefficientOut {
    character: Vec<f64>,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct PeakOut {
    frequency: f64,
    weight: f64,
}

#[derive(Serialize)]
struct DecompositionOut {
    basis_size: usize,
    basis_complete: bool,
    coefficients: Vec<CoefficientOut>,
    norm_sq_f: f64,
    norm_sq_kr: f64,
    norm_sq_wmix: f64,
    orthogonality_residual: f64,
    pythagoras_residual: f64,
    error_bound: f64,
    kr_sup_bound: f64,
    max_eigen_residual: f64,
    max_gram_residual: f64,
    /// Periodogram peaks of one orbit; heuristic, never verified.
    heuristic: bool,
    heuristic_peaks: Option<Vec<PeakOut>>,
}

fn decompose(cfg: &ExperimentConfig, group: &Group, seq: &FolnerSequence) -> Result<ExperimentOutput, LabError> {
    let sys = cfg.build_system(group)?;
    let f = cfg.build_observable(&sys)?;
    let seed = cfg.seeds.first().copied().unwrap_or(0);
    let mut out = ExperimentOutput::default();
    let basis = EigenBasis::standard(&sys, cfg.max_frequency)?;
    let vb = match verify(&sys, basis, seed) {
        Ok(vb) => vb,
        Err(e) => {
            out.violations.push(format!("eigenbasis refused: {e}"));
            return Ok(out);
        }
    };
    let dec = project(&f, &vb, &sys)?;
    let norm = |o: &Observable| -> Result<f64, LabError> { Ok(inner_product(o, o, &sys, Quadrature::Exact)?.value.re) };
    let (nf, nk, nw) = (norm(&f)?, norm(&dec.f_kr)?, norm(&dec.f_wmix)?);
    let orth = inner_product(&dec.f_kr, &dec.f_wmix, &sys, Quadrature::Exact)?.value.norm();
    let pyth = (nf - nk - nw).abs();
    let tol = 1e-9 * (1.0 + nf);
    if orth > tol {
        out.violations.push(format!("⟨f_kr, f_wmix⟩ = {orth:e}"));
    }
    if pyth > tol {
        out.violations.push(format!("Pythagoras residual {pyth:e}"));
    }
    let peaks = if group.kind() == GroupKind::Lattice && group.dim() == 1 {
        let w = seq.window(cfg.n_max())?;
        let orbit = OrbitWindow::sample(&sys, &f, &point_of(&sys, seed), &w)?;
        Some(
            heuristic_peaks(orbit.field(), 3)?
                .into_iter()
                .map(|p| PeakOut {
                    frequency: p.frequency,
                    weight: p.weight,
                })
                .collect(),
        )
    } else {
        None
    };
    let doc = DecompositionOut {
        basis_size: vb.basis().len(),
        basis_complete: vb.basis().complete,
        coefficients: vb
            .basis()
            .pairs
            .iter()
            .zip(&dec.coefficients)
            .map(|(p, c)| CoefficientOut {
                character: p.character.parameters(),
                re: c.re,
                im: c.im,
            })
            .collect(),
        norm_sq_f: nf,
        norm_sq_kr: nk,
        norm_sq_wmix: nw,
        orthogonality_residual: orth,
        pythagoras_residual: pyth,
        error_bound: dec.error_bound,
        kr_sup_bound: dec.kr_sup_bound,
        max_eigen_residual: vb.max_eigen_residual,
        max_gram_residual: vb.max_gram_residual,
        heuristic: peaks.is_some(),
        heuristic_peaks: peaks,
    };
    // Weak-mixing tests of both parts along the Følner sequence.
    let rows = cfg
        .n_list
        .par_iter()
        .map(|&n| -> Result<_, LabError> {
            Ok([
                wmix_average(&f, &f, &sys, seq, n)?,
                wmix_double_average(&f, &f, &sys, seq, n, seq, n)?,
                wmix_average(&dec.f_wmix, &dec.f_wmix, &sys, seq, n)?,
                wmix_double_average(&dec.f_wmix, &dec.f_wmix, &sys, seq, n, seq, n)?,
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["n", "wmix_f", "wmix_double_f", "wmix_residual", "wmix_double_residual"]);
    for (n, r) in cfg.n_list.iter().zip(rows) {
        let mut row = vec![n.to_string()];
        row.extend(r.iter().map(|v| num(*v)));
        table.push(row);
    }
    out.summary.push(format!(
        "decompose: {} basis functions, ‖f‖² = {}, ‖f_kr‖² = {}, ‖f_wmix‖² = {}",
        doc.basis_size,
        num(nf),
        num(nk),
        num(nw)
    ));
    out.files.push(("decomposition.json".into(), json_bytes(&doc)));
    out.files.push(("wmix.csv".into(), table.to_bytes()));
    Ok(out)
}

fn ww_sweep(cfg: &ExperimentConfig, group: &Group, seq: &FolnerSequence) -> Result<ExperimentOutput, LabError> {
    let sys = cfg.build_system(group)?;
    let f = cfg.build_observable(&sys)?;
    let chars = cfg.build_characters(group)?;
    let items: Vec<(u64, u64)> = cfg
        .seeds
        .iter()
        .flat_map(|&s| cfg.n_list.iter().map(move |&n| (s, n)))
        .collect();
    let rows = items
        .par_iter()
        .map(|&(seed, n)| -> Result<_, LabError> {
            let orbit = OrbitWindow::sample(&sys, &f, &point_of(&sys, seed), &seq.window(n)?)?;
            chars
                .iter()
                .map(|xi| Ok(ww_average(orbit.field(), xi)?))
                .collect::<Result<Vec<Complex64>, LabError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["seed", "n", "character", "xi", "re", "im", "abs"]);
    for ((seed, n), avgs) in items.iter().zip(rows) {
        for (i, (xi, a)) in chars.iter().zip(avgs).enumerate() {
            table.push(vec![
                seed.to_string(),
                n.to_string(),
                i.to_string(),
                join(&xi.parameters()),
                num(a.re),
                num(a.im),
                num(a.norm()),
            ]);
        }
    }
    let mut out = ExperimentOutput::default();
    out.summary.push(format!("ww-sweep: {} averages", table.len()));
    out.files.push(("ww_sweep.csv".into(), table.to_bytes()));
    Ok(out)
}

fn ww_sup(cfg: &ExperimentConfig, group: &Group, seq: &FolnerSequence) -> Result<ExperimentOutput, LabError> {
    let sys = cfg.build_system(group)?;
    let f = cfg.build_observable(&sys)?;
    let opts = sup_options(cfg);
    let items: Vec<(u64, u64)> = cfg
        .seeds
        .iter()
        .flat_map(|&s| cfg.n_list.iter().map(move |&n| (s, n)))
        .collect();
    let reports = items
        .par_iter()
        .map(|&(seed, n)| -> Result<_, LabError> {
            let orbit = OrbitWindow::sample(&sys, &f, &point_of(&sys, seed), &seq.window(n)?)?;
            Ok(sup_over_dual(orbit.field(), &opts)?)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&[
        "seed",
        "n",
        "grid_max",
        "refined_max",
        "certified_upper",
        "certificate",
        "grid",
        "cells_evaluated",
        "argmax",
        "note",
    ]);
    let mut out = ExperimentOutput::default();
    let mut worst_ratio: f64 = 0.0;
    for ((seed, n), r) in items.iter().zip(&reports) {
        if !(r.grid_max <= r.refined_max && r.refined_max <= r.certified_upper) {
            out.violations.push(format!(
                "seed={seed} n={n}: bracket out of order ({} ≤ {} ≤ {})",
                r.grid_max, r.refined_max, r.certified_upper
            ));
        }
        if r.grid_max > 0.0 {
            worst_ratio = worst_ratio.max(r.certified_upper / r.grid_max);
        }
        table.push(vec![
            seed.to_string(),
            n.to_string(),
            num(r.grid_max),
            num(r.refined_max),
            num(r.certified_upper),
            r.certificate.as_str().into(),
            r.grid.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(";"),
            r.cells_evaluated.to_string(),
            join(&r.argmax.parameters()),
            r.aliasing_note.clone().unwrap_or_default(),
        ]);
    }
    out.summary.push(format!(
        "ww-sup: {} suprema, worst certified/grid ratio {}",
        table.len(),
        num(worst_ratio)
    ));
    out.files.push(("ww_sup.csv".into(), table.to_bytes()));
    Ok(out)
}

fn decay(cfg: &ExperimentConfig, group: &Group, seq: &FolnerSequence) -> Result<ExperimentOutput, LabError> {
    let sys = cfg.build_system(group)?;
    let f = cfg.build_observable(&sys)?;
    let bound = f.sup_norm_bound();
    let mode = DecayMode::Sup(sup_options(cfg));
    let curves = cfg
        .seeds
        .par_iter()
        .map(|&seed| -> Result<_, LabError> {
            Ok(decay_curve(&sys, &f, &point_of(&sys, seed), seq, &cfg.n_list, &mode)?)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["seed", "n", "count", "sup_lower", "certified_upper", "reference"]);
    let mut decreasing = 0;
    for (seed, curve) in cfg.seeds.iter().zip(&curves) {
        for p in &curve.points {
            let count = seq.count(p.n)? as f64;
            // ‖f‖_∞ √(log N / N): the scale of a random trigonometric sum.
            let reference = bound * (count.ln().max(0.0) / count).sqrt();
            table.push(vec![
                seed.to_string(),
                p.n.to_string(),
                num(count),
                num(p.value),
                num(p.certified_upper.unwrap_or(f64::INFINITY)),
                num(reference),
            ]);
        }
        let ups: Vec<f64> = curve.points.iter().filter_map(|p| p.certified_upper).collect();
        if ups.windows(2).all(|w| w[1] < w[0]) {
            decreasing += 1;
        }
    }
    let mut out = ExperimentOutput::default();
    out.summary.push(format!(
        "decay: certified bound strictly decreasing for {decreasing} of {} seeds",
        cfg.seeds.len()
    ));
    out.files.push(("decay.csv".into(), table.to_bytes()));
    Ok(out)
}

#[derive(Serialize)]
struct VdcOut {
    seed: u64,
    n: u64,
    #[serde(rename = "H")]
    big_h: u64,
    lhs: f64,
    rhs_main: f64,
    rhs_err1: f64,
    rhs_err2: f64,
    rho: f64,
    tol: f64,
    holds: bool,
}

impl VdcOut {
    fn new(seed: u64, r: &VdcReport) -> Self {
        VdcOut {
            seed,
            n: r.n,
            big_h: r.big_h,
            lhs: r.lhs,
            rhs_main: r.rhs_main,
            rhs_err1: r.rhs_err1,
            rhs_err2: r.rhs_err2,
            rho: r.rho,
            tol: r.tol,
            holds: r.holds,
        }
    }
}

#[derive(Serialize)]
struct VdcCheckDoc {
    character: Vec<f64>,
    reports: Vec<VdcOut>,
    /// Window index at which each `γ_h` of the trend file is read, in place
    /// of a limsup.
    gamma_evaluated_at_n: u64,
}

/// Box on which `f` must be known for every `(n, H)` pair.
fn vdc_domain(seq: &FolnerSequence, n_list: &[u64], h_list: &[u64]) -> Result<Window, LabError> {
    let mut need = Vec::new();
    for &n in n_list {
        for &h in h_list {
            let (wn, wh) = (seq.window(n)?, seq.window(h)?);
            need.push(wn.sum(&wh.sum(&wh.negate())));
        }
    }
    Ok(hull(&need))
}

fn vdc_check_run(cfg: &ExperimentConfig, group: &Group, seq: &FolnerSequence) -> Result<ExperimentOutput, LabError> {
    let sys = cfg.build_system(group)?;
    let f = cfg.build_observable(&sys)?;
    let xi = cfg.build_characters(group)?.remove(0);
    let domain = vdc_domain(seq, &cfg.n_list, &cfg.h_list)?;
    let pairs: Vec<(u64, u64)> = cfg
        .n_list
        .iter()
        .flat_map(|&n| cfg.h_list.iter().map(move |&h| (n, h)))
        .collect();
    let per_seed = cfg
        .seeds
        .par_iter()
        .map(|&seed| -> Result<_, LabError> {
            let wf = WindowedFunction::from_orbit(&sys, &f, &point_of(&sys, seed), &xi, &domain)?;
            let reports = pairs
                .iter()
                .map(|&(n, h)| Ok(vdc_check(&wf, seq, n, h, None)?))
                .collect::<Result<Vec<_>, LabError>>()?;
            let trend = vdc_trend(&wf, seq, &cfg.n_list, &cfg.h_list)?;
            Ok((reports, trend))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = ExperimentOutput::default();
    let mut reports = Vec::new();
    let mut table = Table::new(&["seed", "curve", "index", "value"]);
    let mut gamma_n = 0;
    for (seed, (rs, trend)) in cfg.seeds.iter().zip(per_seed) {
        for r in &rs {
            if !r.holds {
                out.violations.push(format!(
                    "seed={seed} n={} H={}: lhs {} exceeds rhs {}",
                    r.n,
                    r.big_h,
                    r.lhs,
                    r.rhs()
                ));
            }
            reports.push(VdcOut::new(*seed, r));
        }
        for (n, v) in &trend.plain {
            table.push(vec![seed.to_string(), "plain".into(), n.to_string(), num(*v)]);
        }
        for (h, v) in &trend.gamma {
            table.push(vec![seed.to_string(), "gamma".into(), h.to_string(), num(*v)]);
        }
        gamma_n = trend.gamma_n;
    }
    out.summary.push(format!(
        "vdc-check: {} reports, {} violations",
        reports.len(),
        out.violations.len()
    ));
    let doc = VdcCheckDoc {
        character: xi.parameters(),
        reports,
        gamma_evaluated_at_n: gamma_n,
    };
    out.files.push(("vdc_check.json".into(), json_bytes(&doc)));
    out.files.push(("vdc_trend.csv".into(), table.to_bytes()));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FuzzFunction {
    /// Independent samples in the unit disk.
    Noise,
    /// A unimodular constant.
    Constant,
    /// `a e^{2πi θ·g}` with random `θ` and `|a| ≤ 1`.
    Character,
    /// Half a character, half noise.
    Mixed,
}

/// The random function of fuzz case `index`: `(n, H, kind, samples)`.
pub fn fuzz_case(
    group: &Group,
    seq: &FolnerSequence,
    n_list: &[u64],
    h_list: &[u64],
    seed: u64,
    index: u64,
) -> Result<(u64, u64, FuzzFunction, WindowedFunction), LabError> {
    let mut rng = SeedStream::derive(seed, index);
    let n = n_list[rng.below(n_list.len() as u64) as usize];
    let h = h_list[rng.below(h_list.len() as u64) as usize];
    let kind = [FuzzFunction::Noise, FuzzFunction::Constant, FuzzFunction::Character, FuzzFunction::Mixed]
        [rng.below(4) as usize];
    let (wn, wh) = (seq.window(n)?, seq.window(h)?);
    let domain = wn.sum(&wh.sum(&wh.negate()));
    let disk = |rng: &mut SeedStream| {
        let r = rng.next_f64().sqrt();
        Complex64::from_polar(r, std::f64::consts::TAU * rng.next_f64())
    };
    let theta: Vec<f64> = (0..group.dim()).map(|_| rng.next_f64()).collect();
    let xi = Character::new(group, &theta)?;
    let amp = disk(&mut rng);
    let constant = Complex64::from_polar(1.0, std::f64::consts::TAU * rng.next_f64());
    let field = BoxField::from_fn(group, domain, |g| match kind {
        FuzzFunction::Noise => disk(&mut rng),
        FuzzFunction::Constant => constant,
        FuzzFunction::Character => amp * xi.phase(g).expect("same group").cis(),
        FuzzFunction::Mixed => 0.5 * (xi.phase(g).expect("same group").cis() + disk(&mut rng)),
    })?;
    Ok((n, h, kind, WindowedFunction::from_field(field)))
}

#[derive(Serialize)]
struct Counterexample {
    case: u64,
    function: FuzzFunction,
    report: VdcOut,
}

#[derive(Serialize)]
struct FuzzSummary {
    cases: u64,
    violations: usize,
    /// Largest `lhs / (rhs + tol)` seen; at most 1 when sound.
    max_lhs_over_rhs: f64,
    counterexamples: Vec<Counterexample>,
}

fn vdc_fuzz(cfg: &ExperimentConfig, group: &Group, seq: &FolnerSequence) -> Result<ExperimentOutput, LabError> {
    let cases = cfg.fuzz.as_ref().expect("validated").cases;
    let seed = cfg.seeds[0];
    let results = (0..cases)
        .into_par_iter()
        .map(|i| -> Result<_, LabError> {
            let (n, h, kind, f) = fuzz_case(group, seq, &cfg.n_list, &cfg.h_list, seed, i)?;
            Ok((i, kind, vdc_check(&f, seq, n, h, None)?))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut summary = FuzzSummary {
        cases,
        violations: 0,
        max_lhs_over_rhs: 0.0,
        counterexamples: Vec::new(),
    };
    for (i, kind, r) in results {
        summary.max_lhs_over_rhs = summary.max_lhs_over_rhs.max(r.lhs / (r.rhs() + r.tol));
        if !r.holds {
            summary.violations += 1;
            summary.counterexamples.push(Counterexample {
                case: i,
                function: kind,
                report: VdcOut::new(seed, &r),
            });
        }
    }
    let mut out = ExperimentOutput::default();
    out.summary.push(format!("vdc-fuzz: {cases} cases, violations: {}", summary.violations));
    if summary.violations > 0 {
        out.violations
            .push(format!("{} of {cases} fuzz cases violate the inequality", summary.violations));
    }
    out.files.push(("vdc_fuzz.json".into(), json_bytes(&summary)));
    Ok(out)
}

fn correlation(cfg: &ExperimentConfig, group: &Group, seq: &FolnerSequence) -> Result<ExperimentOutput, LabError> {
    let sys = cfg.build_system(group)?;
    let f = cfg.build_observable(&sys)?;
    let limits = cfg
        .h_list
        .iter()
        .map(|&h| Ok(correlation_limit(&f, &sys, &axis_shift(group, h as i64))?))
        .collect::<Result<Vec<_>, LabError>>()?;
    let items: Vec<(u64, u64)> = cfg
        .seeds
        .iter()
        .flat_map(|&s| cfg.n_list.iter().map(move |&n| (s, n)))
        .collect();
    let rows = items
        .par_iter()
        .map(|&(seed, n)| -> Result<_, LabError> {
            let x = point_of(&sys, seed);
            cfg.h_list
                .iter()
                .map(|&h| Ok(correlation_average(&sys, &f, &x, seq, n, &axis_shift(group, h as i64))?))
                .collect::<Result<Vec<_>, LabError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["seed", "n", "h", "avg_re", "avg_im", "limit_re", "limit_im", "abs_diff"]);
    for ((seed, n), avgs) in items.iter().zip(rows) {
        for ((h, a), l) in cfg.h_list.iter().zip(avgs).zip(&limits) {
            table.push(vec![
                seed.to_string(),
                n.to_string(),
                h.to_string(),
                num(a.re),
                num(a.im),
                num(l.re),
                num(l.im),
                num((a - l).norm()),
            ]);
        }
    }
    let mut out = ExperimentOutput::default();
    out.summary.push(format!("correlation: {} averages", table.len()));
    out.files.push(("correlation.csv".into(), table.to_bytes()));
    Ok(out)
}
