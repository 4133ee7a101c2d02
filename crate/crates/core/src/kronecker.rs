//! Splitting observables into an eigenfunction part and a weakly mixing
//! remainder, for systems whose eigenfunctions are known explicitly.
//!
//! Convention: an eigenpair `(e, η)` satisfies `e(g·x) = η(g) e(x)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fft::Radix2Plan;
use crate::field::BoxField;
use crate::folner::FolnerSequence;
use crate::group::{Character, Element, Group, GroupKind, MAX_DIM};
use crate::hash::SeedStream;
use crate::sum::ExactSum;
use crate::systems::{inner_product, DynamicalSystem, Factor, Observable, Quadrature};
use crate::turns::Turns;

const VERIFY_TRIALS: u64 = 100;
const VERIFY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub function: Observable,
    pub character: Character,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenBasis {
    pub pairs: Vec<EigenPair>,
    /// Whether the pairs span every eigenfunction of the system.
    pub complete: bool,
}

impl EigenBasis {
    /// Tensor products of per-factor eigenfunctions: circle characters
    /// `e^{2πi k x}` with `|k| ≤ max_frequency` on rotations, constants on
    /// Bernoulli shifts, all `p` roots of unity on finite cycles.
    pub fn standard(sys: &DynamicalSystem, max_frequency: u32) -> Result<Self> {
        let group = *sys.group();
        let one = Complex64::new(1.0, 0.0);
        let mut pairs = vec![EigenPair {
            function: Observable::constant(one),
            character: Character::trivial(&group),
        }];
        let mut complete = true;
        for (i, factor) in sys.factors().iter().enumerate() {
            let local: Vec<EigenPair> = match factor {
                Factor::Rotation { step, .. } => {
                    complete = false;
                    let k_max = max_frequency as i64;
                    (-k_max..=k_max)
                        .filter(|&k| k != 0)
                        .map(|k| {
                            let mut t = [Turns::ZERO; MAX_DIM];
                            for a in 0..group.dim() {
                                t[a] = step[a].mul_int(k);
                            }
                            Ok(EigenPair {
                                function: Observable::circle_character(i, k),
                                character: Character::from_turns(&group, &t[..group.dim()])?,
                            })
                        })
                        .collect::<Result<_>>()?
                }
                Factor::Bernoulli { .. } => Vec::new(),
                Factor::FiniteCycle { period } => (1..*period)
                    .map(|r| {
                        let table = (0..*period)
                            .map(|s| Turns::from_ratio(r as i128 * s as i128, *period).cis())
                            .collect();
                        let character = match group.kind() {
                            GroupKind::Cyclic { modulus } => {
                                Character::cyclic(&group, &[r * (modulus / period)])?
                            }
                            _ => Character::from_turns(&group, &[Turns::from_ratio(r as i128, *period)])?,
                        };
                        Ok(EigenPair {
                            function: Observable::state(i, table),
                            character,
                        })
                    })
                    .collect::<Result<_>>()?,
            };
            let mut next = pairs.clone();
            for base in &pairs {
                for e in &local {
                    let function = if base.character.is_trivial() && matches!(base.function, Observable::Constant(_)) {
                        e.function.clone()
                    } else {
                        base.function.clone() * e.function.clone()
                    };
                    next.push(EigenPair {
                        function,
                        character: base.character.compose(&e.character)?,
                    });
                }
            }
            pairs = next;
        }
        Ok(EigenBasis { pairs, complete })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// An eigenbasis that passed [`verify`].
#[derive(Clone, Debug, PartialEq)]
pub struct VerifiedBasis {
    basis: EigenBasis,
    /// Gram matrix diagonal `⟨e, e⟩`.
    norms: Vec<f64>,
    pub max_eigen_residual: f64,
    pub max_gram_residual: f64,
}

impl VerifiedBasis {
    pub fn basis(&self) -> &EigenBasis {
        &self.basis
    }
}

fn random_element(group: &Group, rng: &mut SeedStream) -> Element {
    let mut c = [0i64; MAX_DIM];
    for slot in c.iter_mut().take(group.dim()) {
        *slot = rng.range_i64(-1000, 1000);
    }
    group.reduce(Element::new(&c[..group.dim()]).expect("dimension in range"))
}

/// Checks `e(g·x) = η(g) e(x)` on random `(g, x)` and orthogonality of the
/// pairs.
pub fn verify(sys: &DynamicalSystem, basis: EigenBasis, seed: u64) -> Result<VerifiedBasis> {
    let group = *sys.group();
    let mut max_eigen: f64 = 0.0;
    for (idx, pair) in basis.pairs.iter().enumerate() {
        pair.function.check(sys)?;
        if pair.character.group() != &group {
            return Err(Error::UnverifiedBasis(format!("pair {idx}: character of another group")));
        }
        let scale = pair.function.sup_norm_bound().max(1.0);
        for t in 0..VERIFY_TRIALS {
            let mut rng = SeedStream::derive(seed, t);
            let g = random_element(&group, &mut rng);
            let x = sys.sample_one(seed ^ 0x5eed, t);
            let lhs = pair.function.eval(sys, &sys.act(&g, &x)?)?;
            let rhs = pair.character.phase(&g)?.cis() * pair.function.eval(sys, &x)?;
            let r = (lhs - rhs).norm() / scale;
            max_eigen = max_eigen.max(r);
            if r > VERIFY_TOL {
                return Err(Error::UnverifiedBasis(format!(
                    "pair {idx}: |e(gx) - η(g)e(x)| = {r:e} at trial {t}"
                )));
            }
        }
    }
    let mut norms = Vec::with_capacity(basis.len());
    let mut max_gram: f64 = 0.0;
    for (a, pa) in basis.pairs.iter().enumerate() {
        for (b, pb) in basis.pairs.iter().enumerate().skip(a) {
            let ip = inner_product(&pa.function, &pb.function, sys, Quadrature::Exact)?;
            if a == b {
                if !(ip.value.re > VERIFY_TOL) {
                    return Err(Error::UnverifiedBasis(format!("pair {a} has zero norm")));
                }
                norms.push(ip.value.re);
            } else {
                max_gram = max_gram.max(ip.value.norm());
                if ip.value.norm() > VERIFY_TOL {
                    return Err(Error::UnverifiedBasis(format!(
                        "pairs {a} and {b} are not orthogonal: {}",
                        ip.value
                    )));
                }
            }
        }
    }
    Ok(VerifiedBasis {
        basis,
        norms,
        max_eigen_residual: max_eigen,
        max_gram_residual: max_gram,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub f_kr: Observable,
    pub f_wmix: Observable,
    /// `⟨f, e⟩ / ⟨e, e⟩` in basis order.
    pub coefficients: Vec<Complex64>,
    /// Worst-case rounding bound over the inner products used.
    pub error_bound: f64,
    /// `Σ |a_e| ‖e‖_∞`, a possibly loose bound on `‖f_kr‖_∞`.
    pub kr_sup_bound: f64,
}

pub fn project(f: &Observable, basis: &VerifiedBasis, sys: &DynamicalSystem) -> Result<Decomposition> {
    f.check(sys)?;
    let mut coefficients = Vec::with_capacity(basis.basis.len());
    let mut error_bound: f64 = 0.0;
    let mut kr_sup_bound = 0.0;
    let mut terms = Vec::new();
    for (pair, norm) in basis.basis.pairs.iter().zip(&basis.norms) {
        let ip = inner_product(f, &pair.function, sys, Quadrature::Exact)?;
        let a = ip.value / *norm;
        error_bound = error_bound.max(ip.error / norm);
        coefficients.push(a);
        if a != Complex64::new(0.0, 0.0) {
            kr_sup_bound += a.norm() * pair.function.sup_norm_bound();
            terms.push(if a == Complex64::new(1.0, 0.0) {
                pair.function.clone()
            } else {
                pair.function.clone().scaled(a)
            });
        }
    }
    let f_kr = match terms.len() {
        0 => Observable::zero(),
        1 => terms.pop().expect("one term"),
        _ => Observable::Sum(terms),
    };
    let f_wmix = if f_kr.is_zero_constant() {
        f.clone()
    } else {
        f.clone() - f_kr.clone()
    };
    Ok(Decomposition {
        f_kr,
        f_wmix,
        coefficients,
        error_bound,
        kr_sup_bound,
    })
}

/// `(1/m(F_n)) Σ_{g ∈ F_n} |⟨h, T_g f⟩|` with `T_g f(x) = f(g^{-1} x)`.
pub fn wmix_average(f: &Observable, h: &Observable, sys: &DynamicalSystem, seq: &FolnerSequence, n: u64) -> Result<f64> {
    f.check(sys)?;
    h.check(sys)?;
    let group = sys.group();
    let w = seq.window(n)?;
    let mut acc = ExactSum::new();
    for g in w.iter() {
        let tf = f.translate(sys, &group.neg(&g))?;
        acc.add(inner_product(h, &tf, sys, Quadrature::Exact)?.value.norm());
    }
    Ok(acc.value() / w.len() as f64)
}

/// Number of pairs `(a, b) ∈ [l1, h1] × [l2, h2]` with `a + b = s`.
fn interval_pair_count(l1: i64, h1: i64, l2: i64, h2: i64, s: i64) -> u64 {
    let lo = l1.max(s - h2);
    let hi = h1.min(s - l2);
    (hi - lo + 1).max(0) as u64
}

/// `(1/(m(F_n) m(F'_n'))) Σ_{g1, g2} |⟨h, T_{g1+g2} f⟩|`, grouped by
/// `s = g1 + g2` with pair counts from per-axis interval convolutions.
pub fn wmix_double_average(
    f: &Observable,
    h: &Observable,
    sys: &DynamicalSystem,
    seq: &FolnerSequence,
    n: u64,
    seq2: &FolnerSequence,
    n2: u64,
) -> Result<f64> {
    f.check(sys)?;
    h.check(sys)?;
    let group = *sys.group();
    if seq2.group() != &group || seq.group() != &group {
        return Err(Error::GroupMismatch("Følner sequences of another group".into()));
    }
    let (w1, w2) = (seq.window(n)?, seq2.window(n2)?);
    let sums = w1.sum(&w2);
    let d = group.dim();
    let mut counts: BTreeMap<Element, u64> = BTreeMap::new();
    for s in sums.iter() {
        let mut c = 1u64;
        for i in 0..d {
            c *= interval_pair_count(w1.lo()[i], w1.hi()[i], w2.lo()[i], w2.hi()[i], s.coord(i));
        }
        if c > 0 {
            *counts.entry(group.reduce(s)).or_insert(0) += c;
        }
    }
    let mut acc = ExactSum::new();
    for (s, c) in &counts {
        let tf = f.translate(sys, &group.neg(s))?;
        let v = inner_product(h, &tf, sys, Quadrature::Exact)?.value.norm();
        acc.add_product(*c as f64, v);
    }
    Ok(acc.value() / (w1.len() as f64 * w2.len() as f64))
}

/// `∫ f(h·y) conj(f(y)) dμ(y)`.
pub fn correlation_limit(f: &Observable, sys: &DynamicalSystem, h: &Element) -> Result<Complex64> {
    let fh = f.translate(sys, h)?;
    Ok(inner_product(&fh, f, sys, Quadrature::Exact)?.value)
}

/// A candidate eigenvalue read off a periodogram peak. Heuristic: nothing
/// here is verified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPeak {
    /// `α` with `f(g·x) ≈ c e^{2πi g α}` near this peak, in `[0, 1)`.
    pub frequency: f64,
    /// `|(1/N) Σ_g c_g e^{-2πi g α}|`.
    pub weight: f64,
}

/// Largest local maxima of the zero-padded periodogram of a one-dimensional
/// orbit (heuristic spectral mode).
pub fn heuristic_peaks(field: &BoxField, count: usize) -> Result<Vec<SpectralPeak>> {
    if field.group().dim() != 1 || !matches!(field.group().kind(), GroupKind::Lattice) {
        return Err(invalid("field", "periodogram peaks need a one-dimensional lattice orbit"));
    }
    let len = field.len();
    let m = (4 * len).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    buf[..len].copy_from_slice(field.values());
    Radix2Plan::new(m).process(&mut buf);
    let power: Vec<f64> = buf.iter().map(|z| z.norm() / len as f64).collect();
    let mut peaks: Vec<(usize, f64)> = (0..m)
        .filter(|&k| {
            let (a, b) = (power[(k + m - 1) % m], power[(k + 1) % m]);
            power[k] > a && power[k] >= b
        })
        .map(|k| (k, power[k]))
        .collect();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(peaks
        .into_iter()
        .take(count)
        .map(|(k, w)| SpectralPeak {
            // The transform peaks at θ = -α.
            frequency: Turns::from_ratio(-(k as i128), m as u64).to_f64(),
            weight: w,
        })
        .collect())
}
