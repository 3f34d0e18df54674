// Copyright 2026 qsl-open Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex kernels.
//!
//! Everything here works on small square matrices stored row-major. The
//! largest matrices in this crate are N-qubit operators with N <= 12, so there
//! is no sparse storage and no blocking; the triple loops are written so the
//! innermost index walks contiguous memory.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{QslError, Result};

pub type C64 = Complex64;

/// Maximum deviation between an entry and its conjugate-transpose partner.
pub const HERM_TOL: f64 = 1e-10;
/// Maximum deviation of a density-matrix trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted in a density matrix.
pub const POS_TOL: f64 = 1e-8;
/// Maximum deviation of a pure-state norm from one.
pub const NORM_TOL: f64 = 1e-12;
/// Largest dimension produced by [`kron`] unless the caller raises it.
pub const KRON_DIM_CAP: usize = 1 << 12;

/// Validation tolerances, defaulting to the crate-wide constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub hermitian: f64,
    pub trace: f64,
    pub positivity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: HERM_TOL,
            trace: TRACE_TOL,
            positivity: POS_TOL,
        }
    }
}

/// Dense complex square matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(QslError::InvalidMatrix("dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(QslError::InvalidMatrix(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(QslError::InvalidMatrix("matrix is not square".into()));
        }
        Self::from_vec(dim, rows.iter().flatten().copied().collect())
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|a><b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(QslError::DimensionMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        let dim = a.len();
        let mut data = Vec::with_capacity(dim * dim);
        for ai in a {
            for bj in b {
                data.push(ai * bj.conj());
            }
        }
        Self::from_vec(dim, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        let mut out = Self::zeros(self.dim);
        gemm_into(self, other, &mut out);
        Ok(out)
    }

    /// `self * v` for a column vector.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(QslError::DimensionMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        Ok(self
            .data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Largest `|m_ij - conj(m_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(m + m^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        let mut out = self.clone();
        for (o, a) in out.data.iter_mut().zip(&adj.data) {
            *o = (*o + a) * 0.5;
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `self += s * other`.
    pub(crate) fn axpy(&mut self, s: C64, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.dim);
        gemm_into(self, rhs, &mut out);
        out
    }
}

fn check_dims(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim != b.dim {
        return Err(QslError::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    Ok(())
}

/// `out = a * b`, overwriting `out`.
#[inline]
pub(crate) fn gemm_into(a: &ComplexMatrix, b: &ComplexMatrix, out: &mut ComplexMatrix) {
    let n = a.dim;
    debug_assert!(b.dim == n && out.dim == n);
    out.data.fill(C64::new(0.0, 0.0));
    for i in 0..n {
        let out_row = &mut out.data[i * n..(i + 1) * n];
        for k in 0..n {
            let aik = a.data[i * n + k];
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            let b_row = &b.data[k * n..(k + 1) * n];
            for (o, bkj) in out_row.iter_mut().zip(b_row) {
                *o += aik * bkj;
            }
        }
    }
}

/// `sqrt(Tr(m^dagger m))`.
pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `Tr(a b)` as `sum_ij a_ij b_ji`, without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    check_dims(a, b)?;
    Ok(trace_product_unchecked(a, b))
}

#[inline]
pub(crate) fn trace_product_unchecked(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.dim;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a.data[i * n + j] * b.data[j * n + i];
        }
    }
    acc
}

/// `a b - b a`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims(a, b)?;
    Ok(&(a * b) - &(b * a))
}

/// Kronecker product with the default dimension cap.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_capped(a, b, KRON_DIM_CAP)
}

pub fn kron_capped(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix> {
    let (na, nb) = (a.dim, b.dim);
    let dim = na * nb;
    if dim > cap {
        return Err(QslError::ResourceLimit { dim, cap });
    }
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..na {
        for j in 0..na {
            let aij = a.data[i * na + j];
            if aij.re == 0.0 && aij.im == 0.0 {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out.data[(i * nb + k) * dim + j * nb + l] = aij * b.data[k * nb + l];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of state vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue_hermitian(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues_hermitian(m)?[0])
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// The Hermitian part `A + iB` is embedded as the real symmetric matrix
/// `[[A, -B], [B, A]]`, whose spectrum is that of `A + iB` with every
/// eigenvalue doubled, and diagonalized with cyclic Jacobi rotations.
pub fn eigenvalues_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    const INPUT_HERM_TOL: f64 = 1e-8;
    let dev = m.hermitian_deviation();
    if dev > INPUT_HERM_TOL {
        return Err(QslError::NotHermitian(dev));
    }
    let n = m.dim;
    if n == 1 {
        return Ok(vec![m.data[0].re]);
    }
    if n == 2 {
        return Ok(eigenvalues_2x2(m));
    }
    let h = m.hermitian_part();
    let size = 2 * n;
    let mut s = vec![0.0f64; size * size];
    for i in 0..n {
        for j in 0..n {
            let z = h.data[i * n + j];
            s[i * size + j] = z.re;
            s[(i + n) * size + j + n] = z.re;
            s[i * size + j + n] = -z.im;
            s[(i + n) * size + j] = z.im;
        }
    }
    let mut evals = jacobi_eigenvalues(&mut s, size);
    evals.sort_by(|a, b| a.total_cmp(b));
    // Each eigenvalue appears twice; average the pairs.
    Ok(evals.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

fn eigenvalues_2x2(m: &ComplexMatrix) -> Vec<f64> {
    let a = m.data[0].re;
    let d = m.data[3].re;
    let b = 0.5 * (m.data[1] + m.data[2].conj());
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    vec![mean - half_gap, mean + half_gap]
}

/// Cyclic Jacobi on a dense real symmetric matrix; destroys `s`.
fn jacobi_eigenvalues(s: &mut [f64], n: usize) -> Vec<f64> {
    const MAX_SWEEPS: usize = 64;
    let scale = s.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += s[p * n + q] * s[p * n + q];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = s[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = s[p * n + p];
                let aqq = s[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let skp = s[k * n + p];
                    let skq = s[k * n + q];
                    s[k * n + p] = c * skp - sn * skq;
                    s[k * n + q] = sn * skp + c * skq;
                }
                for k in 0..n {
                    let spk = s[p * n + k];
                    let sqk = s[q * n + k];
                    s[p * n + k] = c * spk - sn * sqk;
                    s[q * n + k] = sn * spk + c * sqk;
                }
            }
        }
    }
    (0..n).map(|i| s[i * n + i]).collect()
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Accepts amplitudes whose norm is within [`NORM_TOL`] of one.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(QslError::InvalidArgument("empty state vector".into()));
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QslError::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(QslError::NotNormalized(norm));
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[k] = C64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &[C64]) -> C64 {
        self.amplitudes
            .iter()
            .zip(other)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|psi><psi|`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes).expect("same length")
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix(self.projector())
    }

    /// Tensor product `self ⊗ other`.
    pub fn kron(&self, other: &PureState) -> PureState {
        PureState {
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::default())
    }

    pub fn with_tolerances(m: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let dev = m.hermitian_deviation();
        if dev > tol.hermitian {
            return Err(QslError::InvalidDensity(format!(
                "not Hermitian (max deviation {dev:e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(QslError::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let min = min_eigenvalue_hermitian(&m)?;
        if min < -tol.positivity {
            return Err(QslError::InvalidDensity(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(Self(m))
    }

    /// Wraps an integrator state whose diagnostics are tracked elsewhere.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        trace_product_unchecked(&self.0, &self.0).re
    }
}

/// Pauli matrices and ladder operators in the basis `|0> = (1, 0)`, `|1> = (0, 1)`.
pub mod pauli {
    use super::{ComplexMatrix, C64};

    fn m(entries: [[C64; 2]; 2]) -> ComplexMatrix {
        ComplexMatrix::from_rows(&[entries[0].to_vec(), entries[1].to_vec()]).expect("2x2")
    }

    const O: C64 = C64::new(0.0, 0.0);
    const ONE: C64 = C64::new(1.0, 0.0);
    const I: C64 = C64::new(0.0, 1.0);

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn sigma_x() -> ComplexMatrix {
        m([[O, ONE], [ONE, O]])
    }

    pub fn sigma_y() -> ComplexMatrix {
        m([[O, -I], [I, O]])
    }

    pub fn sigma_z() -> ComplexMatrix {
        m([[ONE, O], [O, -ONE]])
    }

    /// `|1><0|`: lowers the excited state `|0>` to the ground state `|1>`.
    pub fn sigma_minus() -> ComplexMatrix {
        m([[O, O], [ONE, O]])
    }
}
