//! Seeded random instances for unit tests.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{CQChannel, Distribution};
use crate::hermitian::{ComplexMatrix, DensityOperator, HermitianOperator};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix<f64> {
    ComplexMatrix::from_fn(d, |_, _| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> HermitianOperator<f64> {
    let g = random_matrix(rng, d);
    HermitianOperator::new((&g + &g.adjoint()).scale(0.5)).unwrap()
}

/// `G G† / Tr`, full rank almost surely.
pub fn random_density(rng: &mut ChaCha8Rng, d: usize) -> DensityOperator<f64> {
    let g = random_matrix(rng, d);
    let p = &g * &g.adjoint();
    let t = p.trace().re;
    DensityOperator::from_matrix(p.scale(1.0 / t)).unwrap()
}

pub fn random_diag_density(rng: &mut ChaCha8Rng, d: usize) -> DensityOperator<f64> {
    let w: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
    let t: f64 = w.iter().sum();
    DensityOperator::from_diag(&w.iter().map(|x| x / t).collect::<Vec<_>>()).unwrap()
}

pub fn random_distribution(rng: &mut ChaCha8Rng, k: usize) -> Distribution<f64> {
    Distribution::from_weights((0..k).map(|_| rng.random_range(0.01..1.0)).collect()).unwrap()
}

pub fn random_channel(rng: &mut ChaCha8Rng, k: usize, d: usize) -> CQChannel<f64> {
    CQChannel::from_states((0..k).map(|_| random_density(rng, d)).collect()).unwrap()
}

pub fn random_classical_channel(rng: &mut ChaCha8Rng, k: usize, d: usize) -> CQChannel<f64> {
    CQChannel::from_states((0..k).map(|_| random_diag_density(rng, d)).collect()).unwrap()
}

/// Random rank-r orthogonal projector.
pub fn random_projector(rng: &mut ChaCha8Rng, d: usize, r: usize) -> HermitianOperator<f64> {
    let spec = random_hermitian(rng, d).eigh().unwrap();
    let mut w = vec![0.0; d];
    w[..r].iter_mut().for_each(|x| *x = 1.0);
    spec.synthesize(&w)
}
