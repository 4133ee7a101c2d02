//! Closed-form and brute-force oracles for character averages and dual
//! suprema.

use folnerlab_core::folner::FolnerSequence;
use folnerlab_core::hash::SeedStream;
use folnerlab_core::systems::{DynamicalSystem, Observable};
use folnerlab_core::ww::{char_average, sup_over_dual, Certificate, OrbitWindow, SupOptions};
use folnerlab_core::{Character, Group, Window};
use num_complex::Complex64;
use std::f64::consts::PI;

/// `sin((2n+1)πθ) / ((2n+1) sin πθ)`.
fn dirichlet(n: u64, theta: f64) -> f64 {
    let m = (2 * n + 1) as f64;
    (m * PI * theta).sin() / (m * (PI * theta).sin())
}

#[test]
fn character_average_is_the_dirichlet_kernel() {
    let z = Group::lattice(1).unwrap();
    let seq = FolnerSequence::cubes(&z, 10_000).unwrap();
    let mut rng = SeedStream::new(3);
    for _ in 0..200 {
        let n = rng.below(10_001);
        let theta = 0.001 + 0.998 * rng.next_f64();
        let a = char_average(&seq, n, &Character::new(&z, &[theta]).unwrap()).unwrap();
        let want = dirichlet(n, theta);
        // The average of a symmetric window is real.
        assert!(a.im.abs() <= 1e-12, "{a}");
        assert!((a.re - want).abs() <= 1e-10 * want.abs().max(1.0 / (2 * n + 1) as f64), "n={n} θ={theta}");
    }
}

/// `max_j |(1/N) Σ_g c_g e^{2πi g j / M}|` by direct phase recurrences.
fn dense_max_1d(c: &[Complex64], lo: i64, m: usize) -> f64 {
    let mut best: f64 = 0.0;
    for j in 0..m {
        let theta = j as f64 / m as f64;
        let step = Complex64::from_polar(1.0, 2.0 * PI * theta);
        let mut w = Complex64::from_polar(1.0, 2.0 * PI * theta * lo as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        for v in c {
            acc += v * w;
            w *= step;
        }
        best = best.max(acc.norm() / c.len() as f64);
    }
    best
}

#[test]
fn dense_search_lies_inside_the_bracket() {
    let z = Group::lattice(1).unwrap();
    let opts = SupOptions::default();
    for seed in 0..10u64 {
        let n = [16i64, 64, 200, 256][seed as usize % 4];
        let sys = DynamicalSystem::bernoulli(&z, 2, seed).unwrap();
        let f = Observable::centered_symbol(0, 1, 2);
        let x = sys.sample_one(seed, 0);
        let orbit = OrbitWindow::sample(&sys, &f, &x, &Window::cube(1, n)).unwrap();
        let r = sup_over_dual(orbit.field(), &opts).unwrap();
        assert_eq!(r.certificate, Certificate::Bernstein);
        // Four times the search grid is at least 32 points per unit width.
        let dense = dense_max_1d(orbit.field().values(), -n, 4 * r.grid[0]);
        assert!(dense >= r.grid_max * (1.0 - 1e-12), "seed {seed}: {dense} < {}", r.grid_max);
        assert!(dense <= r.certified_upper, "seed {seed}: {dense} > {}", r.certified_upper);
        assert!(r.refined_max <= r.certified_upper);
        assert!(r.certified_upper / r.grid_max <= 1.02);
    }
}

#[test]
fn dense_search_in_two_dimensions() {
    let z2 = Group::lattice(2).unwrap();
    let sys = DynamicalSystem::bernoulli(&z2, 2, 5).unwrap();
    let f = Observable::centered_symbol(0, 2, 2);
    let n = 6i64;
    let orbit = OrbitWindow::sample(&sys, &f, &sys.sample_one(1, 0), &Window::cube(2, n)).unwrap();
    let r = sup_over_dual(orbit.field(), &SupOptions::default()).unwrap();
    let l = (2 * n + 1) as usize;
    let m = 4 * r.grid[0];
    let vals = orbit.field().values();
    let mut dense: f64 = 0.0;
    for j0 in 0..m {
        for j1 in 0..m {
            let (t0, t1) = (j0 as f64 / m as f64, j1 as f64 / m as f64);
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, v) in vals.iter().enumerate() {
                let (g0, g1) = ((i / l) as f64 - n as f64, (i % l) as f64 - n as f64);
                acc += v * Complex64::from_polar(1.0, 2.0 * PI * (t0 * g0 + t1 * g1));
            }
            dense = dense.max(acc.norm() / vals.len() as f64);
        }
    }
    assert!(dense >= r.grid_max * (1.0 - 1e-12));
    assert!(dense <= r.certified_upper);
}
