#![allow(dead_code)]

use mrhinf::{DecimationPattern, Domain, StateSpace};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// Random stable discrete system with spectral radius in `[0.2, 0.9]`.
pub fn random_stable(rng: &mut impl Rng, nx: usize, nu: usize, ny: usize) -> StateSpace {
    let mut a = random_matrix(rng, nx, nx);
    if nx > 0 {
        let rho = a.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let target = rng.random_range(0.2..0.9);
        if rho > 0.0 {
            a *= target / rho;
        }
    }
    StateSpace::discrete(
        a,
        random_matrix(rng, nx, nu),
        random_matrix(rng, ny, nx),
        random_matrix(rng, ny, nu),
        1.0,
    )
    .unwrap()
}

pub fn random_pattern(rng: &mut impl Rng, max_len: usize) -> DecimationPattern {
    let m = rng.random_range(1..=max_len);
    loop {
        let bits: Vec<u8> = (0..m).map(|_| rng.random_range(0..2)).collect();
        if let Ok(p) = DecimationPattern::from_bits(&bits) {
            return p;
        }
    }
}

pub fn random_signal(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn discrete_domain() -> Domain {
    Domain::Discrete { period: 1.0 }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
