//! Dense complex-matrix kernel.
//!
//! Everything downstream (entropies, pinching, smoothing, type projectors) is
//! spectral calculus on small Hermitian matrices. Matrices are stored
//! row-major and diagonalized with cyclic complex Jacobi rotations, which are
//! accurate for the dimensions handled here (up to a few hundred).

use std::ops::{Add, Mul, Range, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Caps, Error, Result};
use crate::scalar::Scalar;

/// Absolute Hermiticity tolerance for validated operators.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Relative tolerance used to group numerically equal eigenvalues.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Eigenvalues of `B - A` above `-BOUNDARY_TOL` count as non-negative in `{A <= B}`.
pub const BOUNDARY_TOL: f64 = 1e-10;
/// Off-diagonal Frobenius threshold (relative to `||A||_F`) for Jacobi termination.
pub const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn new(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("matrix dimension must be positive"));
        }
        if data.len() != dim * dim {
            return Err(Error::validation(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(ComplexMatrix { dim, data })
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::validation(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::new(dim, data)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { Complex::one() } else { Complex::zero() })
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        Self::from_fn(diag.len(), |i, j| {
            if i == j {
                Complex::new(diag[i], T::zero())
            } else {
                Complex::zero()
            }
        })
    }

    /// `|v><v|`
    pub fn outer(v: &[Complex<T>]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex<T>) {
        self.data[i * self.dim + j] = z;
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<Complex<T>>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, s: T) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z.scale(s)).collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|i| self.get(i, i)).fold(Complex::zero(), |a, b| a + b)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        let dim = a * b;
        let mut data = vec![Complex::zero(); dim * dim];
        for i in 0..a {
            for j in 0..a {
                let s = self.get(i, j);
                if s.is_zero() {
                    continue;
                }
                for k in 0..b {
                    let row = (i * b + k) * dim + j * b;
                    for l in 0..b {
                        data[row + l] = s * other.get(k, l);
                    }
                }
            }
        }
        ComplexMatrix { dim, data }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = vec![Complex::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * *b;
                }
            }
        }
        ComplexMatrix { dim: n, data: out }
    }

    /// `(A + A†)/2`
    fn symmetrized(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.dim, |i, j| (self.get(i, j) + self.get(j, i).conj()).scale(half))
    }
}

impl<T: Scalar> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix sum");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<T: Scalar> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix difference");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<T: Scalar> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        self.matmul(rhs)
    }
}

/// Hermitian operator: equal to its conjugate transpose within [`HERMITIAN_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator<T> {
    matrix: ComplexMatrix<T>,
}

impl<T: Scalar> HermitianOperator<T> {
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if !(defect <= T::tolerance(HERMITIAN_TOL)) {
            return Err(Error::validation(format!(
                "matrix is not Hermitian (max |A_ij - conj(A_ji)| = {defect})"
            )));
        }
        Ok(Self::from_matrix_unchecked(matrix))
    }

    /// Wraps a matrix known to be Hermitian up to rounding; the stored matrix is
    /// symmetrized.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix<T>) -> Self {
        HermitianOperator {
            matrix: matrix.symmetrized(),
        }
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        HermitianOperator {
            matrix: ComplexMatrix::from_real_diag(diag),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator {
            matrix: ComplexMatrix::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    /// Projector `|v><v|` (not normalized).
    pub fn outer(v: &[Complex<T>]) -> Self {
        HermitianOperator {
            matrix: ComplexMatrix::outer(v),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    pub fn scale(&self, s: T) -> Self {
        HermitianOperator {
            matrix: self.matrix.scale(s),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Error::check_dim(self.dim(), other.dim())?;
        Ok(HermitianOperator {
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Error::check_dim(self.dim(), other.dim())?;
        Ok(HermitianOperator {
            matrix: &self.matrix - &other.matrix,
        })
    }

    /// `Re Tr(A B)`; the trace of a product of two Hermitian operators is real.
    pub fn trace_product(&self, other: &Self) -> Result<T> {
        Error::check_dim(self.dim(), other.dim())?;
        let n = self.dim();
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                acc += (self.matrix.get(i, j) * other.matrix.get(j, i)).re;
            }
        }
        Ok(acc)
    }

    /// `B A B` for Hermitian `B`.
    pub fn sandwich(&self, outer: &Self) -> Result<Self> {
        Error::check_dim(self.dim(), outer.dim())?;
        let m = outer.matrix.matmul(&self.matrix).matmul(&outer.matrix);
        Ok(Self::from_matrix_unchecked(m))
    }

    /// `U A U†` for an arbitrary (typically unitary) `U`.
    pub fn conjugate_by(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        Error::check_dim(self.dim(), u.dim())?;
        let m = u.matmul(&self.matrix).matmul(&u.adjoint());
        Ok(Self::from_matrix_unchecked(m))
    }

    pub fn kron(&self, other: &Self) -> Self {
        HermitianOperator {
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// Real diagonal entries.
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.matrix.get(i, i).re).collect()
    }

    /// True when every off-diagonal entry is below `tol` in modulus.
    pub fn is_diagonal(&self, tol: T) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.matrix.get(i, j).norm() <= tol))
    }

    pub fn eigh(&self) -> Result<SpectralDecomposition<T>> {
        eigh(self)
    }
}

/// Density operator: Hermitian, eigenvalues ≥ −1e-10, unit trace within 1e-10.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<T> {
    op: HermitianOperator<T>,
}

pub const DENSITY_TOL: f64 = 1e-10;

impl<T: Scalar> DensityOperator<T> {
    pub fn new(op: HermitianOperator<T>) -> Result<Self> {
        let tol = T::tolerance(DENSITY_TOL);
        let tr = op.trace();
        if !((tr - T::one()).abs() <= tol) {
            return Err(Error::validation(format!("trace is {tr}, expected 1")));
        }
        let min = op.eigh()?.min_eigenvalue();
        if !(min >= -tol) {
            return Err(Error::validation(format!(
                "operator is not positive semidefinite (min eigenvalue {min})"
            )));
        }
        Ok(DensityOperator { op })
    }

    pub fn from_matrix(m: ComplexMatrix<T>) -> Result<Self> {
        Self::new(HermitianOperator::new(m)?)
    }

    /// Wraps an operator that is a density by construction (convex combinations,
    /// tensor products, pinchings of densities).
    pub(crate) fn from_operator_unchecked(op: HermitianOperator<T>) -> Self {
        DensityOperator { op }
    }

    pub fn from_diag(probs: &[T]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diag(probs))
    }

    /// `|ψ><ψ| / <ψ|ψ>`
    pub fn pure(psi: &[Complex<T>]) -> Result<Self> {
        let norm2: T = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm2 > T::zero()) {
            return Err(Error::validation("pure state vector is zero"));
        }
        Ok(DensityOperator {
            op: HermitianOperator::outer(psi).scale(T::one() / norm2),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator {
            op: HermitianOperator::identity(dim).scale(T::one() / T::lit(dim as f64)),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    #[inline]
    pub fn operator(&self) -> &HermitianOperator<T> {
        &self.op
    }

    pub fn into_operator(self) -> HermitianOperator<T> {
        self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        self.op.matrix()
    }

    pub fn kron(&self, other: &Self) -> Self {
        DensityOperator {
            op: self.op.kron(&other.op),
        }
    }

    pub fn tensor_power(&self, n: usize, caps: &Caps) -> Result<Self> {
        Ok(DensityOperator {
            op: tensor_power(&self.op, n, caps)?,
        })
    }

    /// Convex combination `Σ w_i ρ_i`; weights must be non-negative and sum to one.
    pub fn mixture<'a>(parts: impl IntoIterator<Item = (T, &'a DensityOperator<T>)>) -> Result<Self>
    where
        T: 'a,
    {
        let mut acc: Option<ComplexMatrix<T>> = None;
        let mut total = T::zero();
        for (w, rho) in parts {
            if w < T::zero() {
                return Err(Error::validation("negative mixture weight"));
            }
            total += w;
            let term = rho.matrix().scale(w);
            acc = Some(match acc {
                None => term,
                Some(a) => {
                    Error::check_dim(a.dim(), term.dim())?;
                    &a + &term
                }
            });
        }
        let m = acc.ok_or_else(|| Error::validation("empty mixture"))?;
        if !((total - T::one()).abs() <= T::tolerance(1e-9)) {
            return Err(Error::validation(format!("mixture weights sum to {total}")));
        }
        Ok(DensityOperator {
            op: HermitianOperator::from_matrix_unchecked(m),
        })
    }
}

/// Eigendecomposition `A = U diag(λ) U†` with eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition<T> {
    pub eigenvalues: Vec<T>,
    /// Eigenvectors as columns.
    pub eigenvectors: ComplexMatrix<T>,
    /// Index ranges of numerically equal eigenvalues (relative tolerance [`DEGENERACY_TOL`]).
    pub blocks: Vec<Range<usize>>,
}

impl<T: Scalar> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn min_eigenvalue(&self) -> T {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// Column `j` of the eigenvector matrix.
    pub fn eigenvector(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.dim()).map(|i| self.eigenvectors.get(i, j)).collect()
    }

    /// `Σ_j w_j |u_j><u_j|`
    pub fn synthesize(&self, weights: &[T]) -> HermitianOperator<T> {
        let n = self.dim();
        let u = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n);
        for (k, &w) in weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for i in 0..n {
                let a = u.get(i, k).scale(w);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * u.get(j, k).conj();
                    out.set(i, j, v);
                }
            }
        }
        HermitianOperator::from_matrix_unchecked(out)
    }

    pub fn reconstruct(&self) -> HermitianOperator<T> {
        self.synthesize(&self.eigenvalues)
    }

    /// Spectral calculus with a total function.
    pub fn map(&self, f: impl Fn(T) -> T) -> HermitianOperator<T> {
        let w: Vec<T> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        self.synthesize(&w)
    }

    /// Orthogonal projectors onto each eigenvalue block.
    pub fn block_projectors(&self) -> Vec<HermitianOperator<T>> {
        self.blocks
            .iter()
            .map(|b| {
                let w: Vec<T> = (0..self.dim())
                    .map(|k| if b.contains(&k) { T::one() } else { T::zero() })
                    .collect();
                self.synthesize(&w)
            })
            .collect()
    }

    /// Projector onto eigenvectors whose eigenvalue satisfies `keep`.
    pub fn projector_where(&self, keep: impl Fn(T) -> bool) -> HermitianOperator<T> {
        let w: Vec<T> = self
            .eigenvalues
            .iter()
            .map(|&x| if keep(x) { T::one() } else { T::zero() })
            .collect();
        self.synthesize(&w)
    }

    /// Mean eigenvalue of each block.
    pub fn distinct_eigenvalues(&self) -> Vec<T> {
        self.blocks
            .iter()
            .map(|b| {
                let s: T = self.eigenvalues[b.clone()].iter().copied().sum();
                s / T::lit(b.len() as f64)
            })
            .collect()
    }
}

fn off_diagonal_norm<T: Scalar>(a: &ComplexMatrix<T>) -> T {
    let n = a.dim;
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a.data[i * n + j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
fn rotate<T: Scalar>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let n = a.dim;
    let apq = a.data[p * n + q];
    let r = apq.norm();
    if r.is_zero() {
        return;
    }
    let app = a.data[p * n + p].re;
    let aqq = a.data[q * n + q].re;
    let phase = apq.unscale(r);
    let tau = (aqq - app) / (T::two() * r);
    let sign = if tau >= T::zero() { T::one() } else { -T::one() };
    let t = sign / (tau.abs() + (T::one() + tau * tau).sqrt());
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    // G = diag(1, conj(phase)) · [[c, s], [-s, c]] on the (p, q) plane.
    let g_pp = Complex::new(c, T::zero());
    let g_pq = Complex::new(s, T::zero());
    let g_qp = phase.conj().scale(-s);
    let g_qq = phase.conj().scale(c);

    // A <- A G
    for k in 0..n {
        let akp = a.data[k * n + p];
        let akq = a.data[k * n + q];
        a.data[k * n + p] = akp * g_pp + akq * g_qp;
        a.data[k * n + q] = akp * g_pq + akq * g_qq;
    }
    // A <- G† A
    for j in 0..n {
        let apj = a.data[p * n + j];
        let aqj = a.data[q * n + j];
        a.data[p * n + j] = g_pp.conj() * apj + g_qp.conj() * aqj;
        a.data[q * n + j] = g_pq.conj() * apj + g_qq.conj() * aqj;
    }
    a.data[p * n + q] = Complex::zero();
    a.data[q * n + p] = Complex::zero();
    a.data[p * n + p] = Complex::new(app - t * r, T::zero());
    a.data[q * n + q] = Complex::new(aqq + t * r, T::zero());

    // V <- V G
    for k in 0..n {
        let vkp = v.data[k * n + p];
        let vkq = v.data[k * n + q];
        v.data[k * n + p] = vkp * g_pp + vkq * g_qp;
        v.data[k * n + q] = vkp * g_pq + vkq * g_qq;
    }
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
pub fn eigh<T: Scalar>(op: &HermitianOperator<T>) -> Result<SpectralDecomposition<T>> {
    let n = op.dim();
    let mut a = op.matrix.clone();
    let mut v = ComplexMatrix::identity(n);
    let fro = a.frobenius_norm();
    let threshold = T::tolerance(JACOBI_TOL) * fro;

    let mut converged = false;
    let mut off = off_diagonal_norm(&a);
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        off = off_diagonal_norm(&a);
    }
    if !converged && !(off <= threshold) {
        // Rounding can stall a few ulps above the threshold on large matrices.
        if !(off <= threshold * T::lit(1e3)) {
            return Err(Error::NoConvergence {
                iterations: JACOBI_MAX_SWEEPS,
                best_value: off.as_f64(),
                residual: off.as_f64(),
                best_point: Vec::new(),
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a.data[i * n + i].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues: Vec<T> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, k| v.data[i * n + order[k]]);

    let scale = eigenvalues
        .iter()
        .fold(T::zero(), |m, x| m.max(x.abs()));
    let group_tol = T::tolerance(DEGENERACY_TOL) * scale;
    let mut blocks = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || eigenvalues[start] - eigenvalues[k] > group_tol {
            blocks.push(start..k);
            start = k;
        }
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        blocks,
    })
}

/// Applies `f` to the spectrum of `op`. Fails if `f` is not finite at some eigenvalue.
pub fn mat_fn<T: Scalar>(op: &HermitianOperator<T>, f: impl Fn(T) -> T) -> Result<HermitianOperator<T>> {
    let spec = eigh(op)?;
    let mut mapped = Vec::with_capacity(spec.dim());
    for &x in &spec.eigenvalues {
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::Domain(format!("function undefined at eigenvalue {x}")));
        }
        mapped.push(y);
    }
    Ok(spec.synthesize(&mapped))
}

/// `||A||_1 = Σ |λ_i|`
pub fn trace_norm<T: Scalar>(op: &HermitianOperator<T>) -> Result<T> {
    Ok(eigh(op)?.eigenvalues.iter().map(|x| x.abs()).sum())
}

/// Half the trace norm of `a - b`.
pub fn trace_distance<T: Scalar>(a: &HermitianOperator<T>, b: &HermitianOperator<T>) -> Result<T> {
    Ok(trace_norm(&a.sub(b)?)? / T::two())
}

/// `{A ≤ B}`: projector onto the non-negative eigenspace of `B − A`.
pub fn positive_part_projector<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
) -> Result<HermitianOperator<T>> {
    let diff = b.sub(a)?;
    let tol = T::tolerance(BOUNDARY_TOL);
    Ok(eigh(&diff)?.projector_where(|x| x >= -tol))
}

/// `A^{⊗n}`, refusing results larger than `caps.max_dim`.
pub fn tensor_power<T: Scalar>(op: &HermitianOperator<T>, n: usize, caps: &Caps) -> Result<HermitianOperator<T>> {
    if n == 0 {
        return Err(Error::validation("tensor power must be positive"));
    }
    caps.check_dim("tensor power dimension", crate::error::saturating_pow(op.dim(), n))?;
    let mut acc = op.clone();
    for _ in 1..n {
        acc = acc.kron(op);
    }
    Ok(acc)
}

/// Smallest eigenvalue; `A ≥ 0` within slack iff this is `≥ -slack`.
pub fn min_eigenvalue<T: Scalar>(op: &HermitianOperator<T>) -> Result<T> {
    Ok(eigh(op)?.min_eigenvalue())
}

/// `A^p` restricted to the support of `A` (eigenvalues `≤ threshold` map to 0).
pub fn power_on_support<T: Scalar>(op: &HermitianOperator<T>, exponent: T, threshold: T) -> Result<HermitianOperator<T>> {
    let spec = eigh(op)?;
    Ok(spec.map(|x| if x > threshold { x.powf(exponent) } else { T::zero() }))
}
