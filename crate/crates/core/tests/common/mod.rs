//! Reference implementations that share no code path with the library's
//! eigen- and singular-value solvers.
#![allow(dead_code)]

use num_complex::Complex64;
use trotter_dixmier::linalg::{Hermitian, Matrix};
use trotter_dixmier::sampling;
use trotter_dixmier::trotter::Scheme;

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.dim();
    let mut lhs = a.clone();
    let mut rhs = b.clone();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| lhs[(i, col)].norm().total_cmp(&lhs[(j, col)].norm()))
            .unwrap();
        for k in 0..n {
            let (x, y) = (lhs[(col, k)], lhs[(pivot, k)]);
            lhs[(col, k)] = y;
            lhs[(pivot, k)] = x;
            let (x, y) = (rhs[(col, k)], rhs[(pivot, k)]);
            rhs[(col, k)] = y;
            rhs[(pivot, k)] = x;
        }
        let d = lhs[(col, col)];
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = lhs[(row, col)] / d;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..n {
                let (l, r) = (lhs[(col, k)], rhs[(col, k)]);
                lhs[(row, k)] -= factor * l;
                rhs[(row, k)] -= factor * r;
            }
        }
    }
    for row in 0..n {
        let d = lhs[(row, row)];
        for k in 0..n {
            rhs[(row, k)] /= d;
        }
    }
    rhs
}

/// Matrix exponential by scaling and squaring with a diagonal [8/8] Padé
/// approximant.
pub fn expm(m: &Matrix) -> Matrix {
    const Q: usize = 8;
    let n = m.dim();
    let norm = m.frobenius_norm();
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let x = m.scale_real(0.5f64.powi(squarings as i32));
    let mut coeff = 1.0;
    let mut num = Matrix::identity(n);
    let mut den = Matrix::identity(n);
    let mut power = Matrix::identity(n);
    for k in 1..=Q {
        coeff *= (Q + 1 - k) as f64 / (k * (2 * Q + 1 - k)) as f64;
        power = &power * &x;
        let term = power.scale_real(coeff);
        num = &num + &term;
        den = if k % 2 == 0 {
            &den + &term
        } else {
            &den - &term
        };
    }
    let mut e = solve(&den, &num);
    for _ in 0..squarings {
        e = &e * &e;
    }
    e
}

/// `e^{-s H}` without any eigendecomposition.
pub fn exp_neg(h: &Hermitian, s: f64) -> Matrix {
    expm(&h.as_matrix().scale_real(-s))
}

/// Singular values as square roots of the eigenvalues of `M*M`, descending.
pub fn gram_singular_values(m: &Matrix) -> Vec<f64> {
    let gram = Hermitian::new(&m.adjoint() * m).unwrap();
    let mut values: Vec<f64> = gram
        .eig()
        .unwrap()
        .eigenvalues
        .iter()
        .map(|&v| v.max(0.0).sqrt())
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// The product formula with `f = g = exp`, multiplied out factor by factor.
pub fn direct_product(scheme: Scheme, a: &Hermitian, b: &Hermitian, t: f64, n: u64) -> Matrix {
    let tau = t / n as f64;
    let factors: Vec<Matrix> = match scheme {
        Scheme::Fg => vec![exp_neg(a, tau), exp_neg(b, tau)],
        Scheme::Gf => vec![exp_neg(b, tau), exp_neg(a, tau)],
        Scheme::FSym => vec![
            exp_neg(b, tau / 2.0),
            exp_neg(a, tau),
            exp_neg(b, tau / 2.0),
        ],
        Scheme::TSym => vec![
            exp_neg(a, tau / 2.0),
            exp_neg(b, tau),
            exp_neg(a, tau / 2.0),
        ],
    };
    let mut out = Matrix::identity(a.dim());
    for _ in 0..n {
        for f in &factors {
            out = &out * f;
        }
    }
    out
}

/// A seeded pair of positive matrices with unit operator norm.
pub fn seeded_pair(seed: u64, dim: usize) -> (Hermitian, Hermitian) {
    let mut rng = sampling::rng(seed);
    let mut unit = || {
        let h = sampling::random_psd(&mut rng, dim);
        let top = h.eig().unwrap().eigenvalues[dim - 1];
        h.scale_real(1.0 / top)
    };
    let a = unit();
    let b = unit();
    (a, b)
}
