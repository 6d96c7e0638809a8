//! Random generic instances shared by the integration suites.
#![allow(dead_code)]

use drccp::{Closedness, Domain, Instance, InstanceKind, Norm, SafetySpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct GenericShape {
    pub n: usize,
    pub vars: usize,
    pub rows: usize,
    pub k: usize,
    pub theta: f64,
    pub norm: Norm,
}

/// Rows `(−Aξ_p − a_p)ᵀx + bᵀξ_p + d_p ≥ 0` over the box `[0, 5]^L` with
/// `A ≈ −I`. Every coefficient is at least 0.4, so the upper corner satisfies
/// each row on its own.
pub fn generic(seed: u64, shape: GenericShape) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (l, p) = (shape.vars, shape.rows);
    let mut weights = vec![0.0; l * l];
    for v in 0..l {
        for c in 0..l {
            // off-diagonal entries only raise the coefficients
            weights[v * l + c] = if v == c { -1.0 } else { rng.gen_range(-0.1..0.0) };
        }
    }
    let b = (0..l).map(|_| rng.gen_range(-0.2..0.2)).collect();
    let a = (0..p)
        .map(|_| (0..l).map(|_| rng.gen_range(-0.2..0.1)).collect())
        .collect();
    let d = (0..p).map(|_| rng.gen_range(-1.2..-0.5)).collect();
    let closed = if rng.gen_bool(0.5) {
        Closedness::Closed
    } else {
        Closedness::Open
    };
    let spec = SafetySpec::new(l, l, weights, b, a, d, closed).unwrap();
    let scen = (0..shape.n * p * l).map(|_| rng.gen_range(0.5..2.0)).collect();
    let cost = (0..l).map(|_| rng.gen_range(1.0..5.0)).collect();
    let eps = (shape.k as f64 + 0.5) / shape.n as f64;
    Instance::new(
        spec,
        scen,
        eps,
        shape.theta,
        shape.norm,
        Domain::boxed(l, 0.0, 5.0),
        cost,
        InstanceKind::Generic,
    )
    .unwrap()
    .with_seed(Some(seed))
}

/// A random shape with `N ≤ max_n`, `L ≤ 4`, `P ≤ 3` and a linear norm.
pub fn random_shape(seed: u64, max_n: usize, thetas: &[f64]) -> GenericShape {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n = rng.gen_range(4..=max_n);
    GenericShape {
        n,
        vars: rng.gen_range(1..=4),
        rows: rng.gen_range(1..=3),
        k: rng.gen_range(1..=3.min(n - 1)),
        theta: thetas[rng.gen_range(0..thetas.len())],
        norm: if rng.gen_bool(0.5) { Norm::L1 } else { Norm::Linf },
    }
}

pub fn random_generic(seed: u64, max_n: usize, thetas: &[f64]) -> Instance {
    generic(seed, random_shape(seed, max_n, thetas))
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
