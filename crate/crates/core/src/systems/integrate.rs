use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{DynamicalSystem, Factor, Observable};
use crate::error::{invalid, Result};
use crate::group::Element;
use crate::sum::{ComplexSum, ExactSum};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const MAX_MONOMIALS: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Quadrature {
    /// Expansion into monomials and exact per-factor integration.
    Exact,
    /// Sample mean over `samples` μ-random points.
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerProduct {
    pub value: Complex64,
    /// Rounding bound for `Exact`; standard error for `MonteCarlo`.
    pub error: f64,
}

/// `⟨f, h⟩ = ∫ f · conj(h) dμ`.
pub fn inner_product(f: &Observable, h: &Observable, sys: &DynamicalSystem, quad: Quadrature) -> Result<InnerProduct> {
    f.check(sys)?;
    h.check(sys)?;
    match quad {
        Quadrature::Exact => exact(f, h, sys),
        Quadrature::MonteCarlo { samples, seed } => monte_carlo(f, h, sys, samples, seed),
    }
}

fn monte_carlo(f: &Observable, h: &Observable, sys: &DynamicalSystem, samples: usize, seed: u64) -> Result<InnerProduct> {
    if samples < 2 {
        return Err(invalid(
            "samples",
            "a Monte-Carlo variance estimate needs at least two samples",
        ));
    }
    let values: Vec<Complex64> = (0..samples as u64)
        .map(|i| {
            let x = sys.sample_one(seed, i);
            f.eval_unchecked(sys, &x) * h.eval_unchecked(sys, &x).conj()
        })
        .collect();
    let mut acc = ComplexSum::new();
    for v in &values {
        acc.add(*v);
    }
    let n = samples as f64;
    let mean = acc.value() / n;
    let mut ss = ExactSum::new();
    for v in &values {
        let d = v - mean;
        ss.add_product(d.re, d.re);
        ss.add_product(d.im, d.im);
    }
    let var = ss.value() / (n - 1.0);
    Ok(InnerProduct {
        value: mean,
        error: libm::sqrt(var / n),
    })
}

/// A product of leaves times a coefficient.
struct Monomial<'a> {
    coef: Complex64,
    leaves: Vec<&'a Observable>,
}

fn mul_coef(a: Complex64, b: Complex64) -> Complex64 {
    if a == ONE {
        b
    } else if b == ONE {
        a
    } else {
        a * b
    }
}

fn expand(f: &Observable) -> Result<Vec<Monomial<'_>>> {
    Ok(match f {
        Observable::Constant(c) => alloc::vec![Monomial {
            coef: *c,
            leaves: Vec::new()
        }],
        Observable::Sum(v) => {
            let mut out = Vec::new();
            for o in v {
                out.extend(expand(o)?);
                if out.len() > MAX_MONOMIALS {
                    return Err(invalid("observable", "expansion is too large to integrate exactly"));
                }
            }
            out
        }
        Observable::Product(v) => {
            let mut acc = alloc::vec![Monomial {
                coef: ONE,
                leaves: Vec::new()
            }];
            for o in v {
                let rhs = expand(o)?;
                if acc.len().saturating_mul(rhs.len()) > MAX_MONOMIALS {
                    return Err(invalid("observable", "expansion is too large to integrate exactly"));
                }
                let mut next = Vec::with_capacity(acc.len() * rhs.len());
                for a in &acc {
                    for b in &rhs {
                        let mut leaves = a.leaves.clone();
                        leaves.extend_from_slice(&b.leaves);
                        next.push(Monomial {
                            coef: mul_coef(a.coef, b.coef),
                            leaves,
                        });
                    }
                }
                acc = next;
            }
            acc
        }
        leaf => alloc::vec![Monomial {
            coef: ONE,
            leaves: alloc::vec![leaf]
        }],
    })
}

fn leaf_factor(o: &Observable) -> usize {
    match o {
        Observable::Trig { factor, .. } | Observable::Symbol { factor, .. } | Observable::State { factor, .. } => {
            *factor
        }
        _ => unreachable!("expansion yields leaves only"),
    }
}

/// `∫ Π leaves` on one circle factor: the constant Fourier coefficient.
fn integrate_circle(leaves: &[&Observable]) -> Complex64 {
    let series = |o: &Observable| -> BTreeMap<i64, Complex64> {
        let Observable::Trig { terms, shift, .. } = o else {
            unreachable!("circle leaves are trigonometric")
        };
        let mut m = BTreeMap::new();
        for &(k, c) in terms {
            let w = shift.mul_int(k).cis();
            *m.entry(k).or_insert(Complex64::new(0.0, 0.0)) += mul_coef(c, w);
        }
        m
    };
    let (last, init) = leaves.split_last().expect("at least one leaf");
    let mut acc: BTreeMap<i64, Complex64> = BTreeMap::from([(0, ONE)]);
    for o in init {
        let s = series(o);
        let mut next: BTreeMap<i64, ComplexSum> = BTreeMap::new();
        for (ka, ca) in &acc {
            for (kb, cb) in &s {
                next.entry(ka + kb).or_default().add_product(*ca, *cb);
            }
        }
        acc = next.into_iter().map(|(k, v)| (k, v.value())).collect();
    }
    // Constant term of acc * last, accumulated exactly.
    let s = series(last);
    let mut total = ComplexSum::new();
    for (k, c) in &acc {
        if let Some(b) = s.get(&-k) {
            total.add_product(*c, *b);
        }
    }
    total.value()
}

/// `E[Π leaves]` on one Bernoulli factor: sites are independent.
fn integrate_bernoulli(k: u64, leaves: &[&Observable]) -> Complex64 {
    let mut by_site: BTreeMap<Element, Vec<&[Complex64]>> = BTreeMap::new();
    for o in leaves {
        let Observable::Symbol { site, table, .. } = o else {
            unreachable!("Bernoulli leaves are symbol functions")
        };
        by_site.entry(*site).or_default().push(table);
    }
    let mut out = ONE;
    for tables in by_site.values() {
        out = mul_coef(out, uniform_mean(k as usize, tables, |t, a| t[a]));
    }
    out
}

/// `(1/p) Σ_r Π table_i[(r + shift_i) mod p]`.
fn integrate_cycle(p: u64, leaves: &[&Observable]) -> Complex64 {
    let tables: Vec<(&[Complex64], u64)> = leaves
        .iter()
        .map(|o| {
            let Observable::State { table, shift, .. } = o else {
                unreachable!("cycle leaves are state functions")
            };
            (table.as_slice(), *shift)
        })
        .collect();
    uniform_mean(p as usize, &tables, |(t, s), r| t[(r + *s as usize) % p as usize])
}

/// Mean over `0..size` of a product of per-leaf values; the last factor
/// enters through an exact product.
fn uniform_mean<T>(size: usize, leaves: &[T], value: impl Fn(&T, usize) -> Complex64) -> Complex64 {
    let mut acc = ComplexSum::new();
    for a in 0..size {
        let (last, init) = leaves.split_last().expect("at least one leaf");
        let head = init.iter().fold(ONE, |z, t| mul_coef(z, value(t, a)));
        acc.add_product(head, value(last, a));
    }
    acc.value() / size as f64
}

fn integrate_monomial(m: &Monomial<'_>, sys: &DynamicalSystem) -> Complex64 {
    let mut by_factor: BTreeMap<usize, Vec<&Observable>> = BTreeMap::new();
    for leaf in &m.leaves {
        by_factor.entry(leaf_factor(leaf)).or_default().push(leaf);
    }
    let mut out = m.coef;
    for (i, leaves) in &by_factor {
        let v = match &sys.factors()[*i] {
            Factor::Rotation { .. } => integrate_circle(leaves),
            Factor::Bernoulli { k, .. } => integrate_bernoulli(*k, leaves),
            Factor::FiniteCycle { period } => integrate_cycle(*period, leaves),
        };
        out = mul_coef(out, v);
    }
    out
}

fn exact(f: &Observable, h: &Observable, sys: &DynamicalSystem) -> Result<InnerProduct> {
    let hc = h.conj();
    let fm = expand(f)?;
    let hm = expand(&hc)?;
    if fm.len().saturating_mul(hm.len()) > MAX_MONOMIALS {
        return Err(invalid("observable", "expansion is too large to integrate exactly"));
    }
    let mut total = ComplexSum::new();
    let mut scale = ExactSum::new();
    for a in &fm {
        for b in &hm {
            let mut leaves = a.leaves.clone();
            leaves.extend_from_slice(&b.leaves);
            let m = Monomial {
                coef: mul_coef(a.coef, b.coef),
                leaves,
            };
            let v = integrate_monomial(&m, sys);
            scale.add(m.coef.norm() * m.leaves.iter().map(|l| l.sup_norm_bound()).product::<f64>());
            total.add(v);
        }
    }
    let depth = 4.0 + fm.len().max(hm.len()) as f64;
    Ok(InnerProduct {
        value: total.value(),
        error: depth * f64::EPSILON * scale.value(),
    })
}
