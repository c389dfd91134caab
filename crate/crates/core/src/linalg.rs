//! Dense complex linear algebra: square matrices, Hermitian matrices,
//! a cyclic Jacobi eigensolver, one-sided Jacobi singular values and
//! spectral calculus.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectrum::SingularSpectrum;

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 512;

/// Relative tolerance on `|a_ij - conj(a_ji)|` accepted by [`Hermitian::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues in `[-PSD_CLAMP, 0)` (scaled by `max(1, spectral radius)`)
/// are treated as zero by operations that require positivity.
pub const PSD_CLAMP: f64 = 1e-12;

/// Jacobi sweeps stop once the off-diagonal Frobenius mass drops below
/// this fraction of the total Frobenius norm.
pub const JACOBI_TOL: f64 = 1e-13;

const MAX_SWEEPS: usize = 100;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:.4e}{:+.4e}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major complex entries.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from real rows. Panics if the rows are ragged.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "ragged rows");
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self { dim, data }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * alpha).collect(),
        }
    }

    pub fn scale_real(&self, alpha: f64) -> Self {
        self.scale(Complex64::new(alpha, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn check_finite(&self) -> Result<()> {
        match self
            .data
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            Some(k) => Err(Error::NonFinite {
                row: k / self.dim,
                col: k % self.dim,
            }),
            None => Ok(()),
        }
    }

    /// `self^power` by binary exponentiation; `power = 0` gives the identity.
    pub fn pow(&self, mut power: u64) -> Self {
        let mut result = Self::identity(self.dim);
        let mut base = self.clone();
        while power > 0 {
            if power & 1 == 1 {
                result = &result * &base;
            }
            power >>= 1;
            if power > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Product of a sequence of equally sized matrices, left to right.
    pub fn product<'a>(factors: impl IntoIterator<Item = &'a Matrix>) -> Option<Self> {
        let mut iter = factors.into_iter();
        let first = iter.next()?.clone();
        Some(iter.fold(first, |acc, m| &acc * m))
    }

    fn gemm(a: &Self, b: &Self) -> Self {
        assert_eq!(a.dim, b.dim, "dimension mismatch in product");
        let n = a.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let aik = a.data[i * n + k];
                if aik == ZERO {
                    continue;
                }
                let b_row = &b.data[k * n..(k + 1) * n];
                for (o, &bkj) in out_row.iter_mut().zip(b_row) {
                    *o += aik * bkj;
                }
            }
        }
        Self { dim: n, data: out }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        Matrix::gemm(self, rhs)
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// A matrix known to be Hermitian.
///
/// Construction checks `a_ij = conj(a_ji)` to [`HERMITIAN_TOL`] relative to
/// the largest entry and then symmetrizes exactly, so downstream code may
/// rely on exact conjugate symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian(Matrix);

impl Hermitian {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.dim == 0 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 1".into(),
            ));
        }
        m.check_finite()?;
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        let n = m.dim;
        for i in 0..n {
            for j in i..n {
                let deviation = (m[(i, j)] - m[(j, i)].conj()).norm();
                if deviation > HERMITIAN_TOL * scale {
                    return Err(Error::NotHermitian {
                        row: i,
                        col: j,
                        deviation,
                    });
                }
            }
        }
        let mut sym = m;
        for i in 0..n {
            sym[(i, i)] = Complex64::new(sym[(i, i)].re, 0.0);
            for j in i + 1..n {
                let avg = (sym[(i, j)] + sym[(j, i)].conj()) * 0.5;
                sym[(i, j)] = avg;
                sym[(j, i)] = avg.conj();
            }
        }
        Ok(Self(sym))
    }

    pub fn from_real_diag(diag: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_real_diag(diag))
    }

    pub fn identity(dim: usize) -> Self {
        Self(Matrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn eig(&self) -> Result<EigenSystem> {
        eig_hermitian(self)
    }

    pub fn scale_real(&self, alpha: f64) -> Self {
        Self(self.0.scale_real(alpha))
    }

    /// Sum of two Hermitian matrices (Hermitian by construction).
    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }
}

impl AsRef<Matrix> for Hermitian {
    fn as_ref(&self) -> &Matrix {
        &self.0
    }
}

/// Eigen-decomposition `M = U diag(λ) U*` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    /// Columns are orthonormal eigenvectors.
    pub basis: Matrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(values) U*` for arbitrary real `values`.
    pub fn synthesize(&self, values: &[f64]) -> Hermitian {
        let n = self.dim();
        assert_eq!(values.len(), n);
        let u = &self.basis;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = ZERO;
                for (k, &v) in values.iter().enumerate() {
                    if v != 0.0 {
                        acc += u[(i, k)] * u[(j, k)].conj() * v;
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)] = Complex64::new(out[(i, i)].re, 0.0);
        }
        Hermitian(out)
    }

    pub fn reconstruct(&self) -> Hermitian {
        self.synthesize(&self.eigenvalues)
    }

    /// Eigenvalues with the PSD clamp applied; fails on a genuinely
    /// negative eigenvalue.
    pub fn clamped_nonnegative(&self) -> Result<Vec<f64>> {
        let radius = self
            .eigenvalues
            .iter()
            .fold(0.0_f64, |acc, &l| acc.max(l.abs()));
        let floor = -PSD_CLAMP * radius.max(1.0);
        self.eigenvalues
            .iter()
            .map(|&l| {
                if l >= 0.0 {
                    Ok(l)
                } else if l >= floor {
                    Ok(0.0)
                } else {
                    Err(Error::NotPositive(l))
                }
            })
            .collect()
    }

    /// `h(scale · M)` through the stored decomposition. Requires `M ⪰ 0`.
    pub fn apply(&self, h: impl Fn(f64) -> f64, scale: f64) -> Result<Hermitian> {
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "spectral scale must be finite and non-negative, got {scale}"
            )));
        }
        let values: Vec<f64> = self
            .clamped_nonnegative()?
            .into_iter()
            .map(|l| h(scale * l))
            .collect();
        Ok(self.synthesize(&values))
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Sweeps visit pivots `(p, q)` in row order, so the result is a
/// deterministic function of the input.
pub fn eig_hermitian(m: &Hermitian) -> Result<EigenSystem> {
    let n = m.dim();
    if n > MAX_DIM {
        return Err(Error::DimensionTooLarge(n));
    }
    let mut a = m.0.clone();
    let mut v = Matrix::identity(n);
    let total = a.frobenius_norm();

    if total > 0.0 {
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&a) <= JACOBI_TOL * total {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let mag = apq.norm();
                    if mag == 0.0 {
                        continue;
                    }
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    // Skip rotations below the representable threshold.
                    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                        a[(p, q)] = ZERO;
                        a[(q, p)] = ZERO;
                        continue;
                    }
                    let phase = apq / mag;
                    let theta = (aqq - app) / (2.0 * mag);
                    let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / t.hypot(1.0);
                    let s = t * c;
                    // V restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
                    let vpp = Complex64::new(c, 0.0);
                    let vpq = Complex64::new(s, 0.0);
                    let vqp = -phase.conj() * s;
                    let vqq = phase.conj() * c;
                    rotate(&mut a, &mut v, p, q, [vpp, vpq, vqp, vqq]);
                    a[(p, p)] = Complex64::new(app - t * mag, 0.0);
                    a[(q, q)] = Complex64::new(aqq + t * mag, 0.0);
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut basis = Matrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            basis[(r, new_col)] = v[(r, old_col)];
        }
    }
    Ok(EigenSystem { eigenvalues, basis })
}

/// `A ← V* A V`, `U ← U V` for a rotation acting on columns `p`, `q`.
fn rotate(a: &mut Matrix, u: &mut Matrix, p: usize, q: usize, rot: [Complex64; 4]) {
    let [vpp, vpq, vqp, vqq] = rot;
    let n = a.dim;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * vpp + akq * vqp;
        a[(k, q)] = akp * vpq + akq * vqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
        a[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
    }
    for k in 0..n {
        let ukp = u[(k, p)];
        let ukq = u[(k, q)];
        u[(k, p)] = ukp * vpp + ukq * vqp;
        u[(k, q)] = ukp * vpq + ukq * vqq;
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.dim;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Singular values via one-sided (Hestenes) Jacobi orthogonalisation of
/// the columns. Works directly on `M`, never forming `M* M`.
fn hestenes_singular_values(m: &Matrix) -> Result<SingularSpectrum> {
    let n = m.dim;
    if n > MAX_DIM {
        return Err(Error::DimensionTooLarge(n));
    }
    m.check_finite()?;
    // Column-major working copy.
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| m[(i, j)]).collect())
        .collect();
    let tol = 1e-15;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (left, right) = cols.split_at_mut(q);
                let cp = &mut left[p];
                let cq = &mut right[0];
                let alpha: f64 = cp.iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cq.iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cp.iter().zip(cq.iter()).map(|(a, b)| a.conj() * b).sum();
                let mag = gamma.norm();
                if mag == 0.0 || mag <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / mag;
                let zeta = (beta - alpha) / (2.0 * mag);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + zeta.hypot(1.0))
                };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                let e = phase.conj();
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let xp = *x;
                    let xq = *y;
                    *x = xp * c - xq * e * s;
                    *y = xp * s + xq * e * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let values: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    Ok(SingularSpectrum::from_unsorted(&values))
}

/// Types whose singular values can be computed.
pub trait SingularValues {
    fn singular_values(&self) -> Result<SingularSpectrum>;
}

impl SingularValues for Matrix {
    fn singular_values(&self) -> Result<SingularSpectrum> {
        hestenes_singular_values(self)
    }
}

impl SingularValues for Hermitian {
    /// Sorted moduli of the eigenvalues.
    fn singular_values(&self) -> Result<SingularSpectrum> {
        let eig = eig_hermitian(self)?;
        Ok(SingularSpectrum::from_unsorted(&eig.eigenvalues))
    }
}

pub fn singular_values<M: SingularValues + ?Sized>(m: &M) -> Result<SingularSpectrum> {
    m.singular_values()
}

/// `s_1(M)`, the operator norm.
pub fn operator_norm<M: SingularValues + ?Sized>(m: &M) -> Result<f64> {
    Ok(m.singular_values()?.largest())
}

/// `h(t·M)` by spectral calculus for positive semi-definite `M`.
pub fn apply_spectral_function(
    h: impl Fn(f64) -> f64,
    m: &Hermitian,
    scale: f64,
) -> Result<Hermitian> {
    eig_hermitian(m)?.apply(h, scale)
}
