#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symint::cli::circle_points;
use symint::{Complex, IntegrandSpec, OneMatrixSpec};

/// `(N, L₁, L₂, M₁, M₂)`.
pub type Shape = (usize, usize, usize, usize, usize);

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// ξ, ζ on radius 2 and η, μ on radius 3, as in the CLI sweep.
pub fn draw_spec(
    rng: &mut ChaCha8Rng,
    n: usize,
    l1: usize,
    l2: usize,
    m1: usize,
    m2: usize,
) -> IntegrandSpec {
    let xi = circle_points(rng, l1, 2.0);
    let zeta = circle_points(rng, l2, 2.0);
    let eta = circle_points(rng, m1, 3.0);
    let mu = circle_points(rng, m2, 3.0);
    IntegrandSpec::new(n, xi, zeta, eta, mu).unwrap()
}

pub fn draw_one(rng: &mut ChaCha8Rng, n: usize, l: usize, m: usize) -> OneMatrixSpec {
    let xi = circle_points(rng, l, 2.0);
    let eta = circle_points(rng, m, 3.0);
    OneMatrixSpec::new(n, xi, eta).unwrap()
}

/// `|a − b| / max(|b|, 1e−10)`.
pub fn rel(a: Complex, b: Complex) -> f64 {
    (a - b).norm() / b.norm().max(1e-10)
}

/// All `(N, L₁, L₂, M₁, M₂)` in the given ranges.
pub fn tuples(ns: &[usize], lm: &[usize]) -> Vec<Shape> {
    let mut out = Vec::new();
    for &n in ns {
        for &l1 in lm {
            for &l2 in lm {
                for &m1 in lm {
                    for &m2 in lm {
                        out.push((n, l1, l2, m1, m2));
                    }
                }
            }
        }
    }
    out
}

/// `(N + L₁ − M₁, N + L₂ − M₂)`.
pub fn combos(t: Shape) -> (i64, i64) {
    let (n, l1, l2, m1, m2) = t;
    let n = n as i64;
    (n + l1 as i64 - m1 as i64, n + l2 as i64 - m2 as i64)
}
