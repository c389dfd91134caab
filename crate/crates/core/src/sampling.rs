//! Seeded random matrices for property suites and operator builders.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{Hermitian, Matrix};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut SeededRng) -> f64 {
    StandardNormal.sample(rng)
}

/// Real Gaussian vector of length `n`.
pub fn gaussian_vec(rng: &mut SeededRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| normal(rng)).collect()
}

/// Complex Gaussian matrix with independent standard normal real and
/// imaginary parts.
pub fn random_gaussian(rng: &mut SeededRng, n: usize) -> Matrix {
    let data = (0..n * n)
        .map(|_| Complex64::new(normal(rng), normal(rng)))
        .collect();
    Matrix::from_vec(n, data).expect("length is n*n")
}

pub fn random_hermitian(rng: &mut SeededRng, n: usize) -> Hermitian {
    let g = random_gaussian(rng, n);
    let sum = &g + &g.adjoint();
    Hermitian::new(sum.scale_real(0.5)).expect("G + G* is Hermitian")
}

/// `G* G` for a complex Gaussian `G`.
pub fn random_psd(rng: &mut SeededRng, n: usize) -> Hermitian {
    let g = random_gaussian(rng, n);
    Hermitian::new(&g.adjoint() * &g).expect("G* G is Hermitian")
}

/// Unitary from Gram-Schmidt (applied twice) on a complex Gaussian matrix.
pub fn random_unitary(rng: &mut SeededRng, n: usize) -> Matrix {
    let g = random_gaussian(rng, n);
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| g[(i, j)]).collect())
        .collect();
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = cols[k]
                    .iter()
                    .zip(&cols[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let (done, rest) = cols.split_at_mut(j);
                for (x, y) in rest[0].iter_mut().zip(&done[k]) {
                    *x -= proj * y;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|z| *z /= norm);
    }
    let mut u = Matrix::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            u[(i, j)] = z;
        }
    }
    u
}

/// Uniformly random unit vector in `C^n`.
pub fn random_unit_vector(rng: &mut SeededRng, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(normal(rng), normal(rng)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Rank-one orthogonal projector `v v*`.
pub fn rank_one_projector(v: &[Complex64]) -> Matrix {
    let n = v.len();
    let mut p = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            p[(i, j)] = v[i] * v[j].conj();
        }
    }
    p
}
