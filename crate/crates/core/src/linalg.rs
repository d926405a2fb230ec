//! Dense complex matrices and the linear-algebra kernel used by every module.
//!
//! All storage and all composite indexing is row-major: a matrix entry lives at
//! `row * cols + col`, the vectorization of a matrix is the concatenation of its
//! rows, and the composite index of a tensor-product space is `major * dim_minor
//! + minor`. The reshuffle operation below is pinned to this convention and the
//! rest of the crate inherits it.

use crate::error::{QchanError, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::fmt;
use std::ops::{Index, IndexMut};

/// Complex double-precision scalar used throughout the crate.
pub type C64 = Complex64;

/// Maximum hermiticity defect (Frobenius) accepted by hermitian-only kernels.
pub const HERMITICITY_TOL: f64 = 1e-9;
/// Eigenvalues of nominally PSD matrices may undershoot zero by this much and
/// are clamped; anything lower is an error.
pub const PSD_CLAMP: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Selects one factor of a bipartite row-major composite index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    /// The left (major) factor of `a ⊗ b`.
    First,
    /// The right (minor) factor of `a ⊗ b`.
    Second,
}

/// Dense complex matrix with row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix by evaluating `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Builds a matrix from nested row vectors; rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(QchanError::Shape("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in &rows {
            if row.len() != c {
                return Err(QchanError::Shape(format!(
                    "ragged rows: expected {c} columns, found {}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(ComplexMatrix { rows: r, cols: c, data })
    }

    /// Diagonal matrix with the given real entries.
    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Reinterprets a row-major entry vector as a matrix.
    pub fn from_vec_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(QchanError::Shape(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entry slice (the vectorization of the matrix).
    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    /// Consumes the matrix and returns its row-major entries.
    pub fn into_vec_row_major(self) -> Vec<C64> {
        self.data
    }

    /// Entrywise sum.
    pub fn add(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    /// Entrywise difference.
    pub fn sub(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    /// Hadamard (entrywise) product.
    pub fn hadamard(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(rhs, |a, b| a * b)
    }

    fn zip_with(&self, rhs: &ComplexMatrix, f: impl Fn(C64, C64) -> C64) -> Result<ComplexMatrix> {
        if self.shape() != rhs.shape() {
            return Err(QchanError::Shape(format!(
                "shape {:?} does not match {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Scales every entry by `s`.
    pub fn scale(&self, s: C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    /// Matrix–vector product `self · x` with length checking.
    pub fn matvec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if self.cols != x.len() {
            return Err(QchanError::DimMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for (row, y) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (a, b) in self.data[row * self.cols..(row + 1) * self.cols]
                .iter()
                .zip(x)
            {
                acc += a * b;
            }
            *y = acc;
        }
        Ok(out)
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(QchanError::Shape(format!(
                "cannot multiply {:?} by {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        let mut out = vec![ZERO; self.rows * rhs.cols];
        for i in 0..self.rows {
            let a_row = &self.data[i * self.cols..(i + 1) * self.cols];
            let out_row = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &aik) in a_row.iter().enumerate() {
                if aik == ZERO {
                    continue;
                }
                let b_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += aik * b;
                }
            }
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: rhs.cols,
            data: out,
        })
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.conj()).collect(),
        }
    }

    /// Transpose.
    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of `self - self†`; zero for hermitian matrices.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// True when the hermiticity defect is at most `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Largest entrywise absolute difference; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// True when every entry matches `other` within `tol` absolutely.
    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.shape() == other.shape() && self.max_abs_diff(other) <= tol
    }

    /// Kronecker product: `(a ⊗ b)[i·p + k, j·q + l] = a[i, j] · b[k, l]`.
    pub fn kron(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let (p, q) = rhs.shape();
        let mut out = ComplexMatrix::zeros(self.rows * p, self.cols * q);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..p {
                    for l in 0..q {
                        out[(i * p + k, j * q + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Partial trace of a `(dim_a·dim_b)`-square matrix over one factor.
    pub fn partial_trace(
        &self,
        dim_a: usize,
        dim_b: usize,
        traced: Subsystem,
    ) -> Result<ComplexMatrix> {
        let n = dim_a * dim_b;
        if self.shape() != (n, n) {
            return Err(QchanError::Shape(format!(
                "partial trace expects a {n}x{n} matrix, got {:?}",
                self.shape()
            )));
        }
        match traced {
            Subsystem::First => {
                let mut out = ComplexMatrix::zeros(dim_b, dim_b);
                for j in 0..dim_b {
                    for l in 0..dim_b {
                        let mut acc = ZERO;
                        for i in 0..dim_a {
                            acc += self[(i * dim_b + j, i * dim_b + l)];
                        }
                        out[(j, l)] = acc;
                    }
                }
                Ok(out)
            }
            Subsystem::Second => {
                let mut out = ComplexMatrix::zeros(dim_a, dim_a);
                for i in 0..dim_a {
                    for k in 0..dim_a {
                        let mut acc = ZERO;
                        for j in 0..dim_b {
                            acc += self[(i * dim_b + j, k * dim_b + j)];
                        }
                        out[(i, k)] = acc;
                    }
                }
                Ok(out)
            }
        }
    }

    /// Reshuffle of an `n²`-square matrix:
    /// `out[(i,j),(k,l)] = in[(i,k),(j,l)]` with composite index `major·n + minor`.
    ///
    /// This is an involution and maps a channel's superoperator to its
    /// dynamical (Choi) matrix and back.
    pub fn reshuffle(&self) -> Result<ComplexMatrix> {
        let n = perfect_square_root(self.rows)?;
        if self.rows != self.cols {
            return Err(QchanError::Shape(format!(
                "reshuffle expects a square matrix, got {:?}",
                self.shape()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, self.cols);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        out[(i * n + j, k * n + l)] = self[(i * n + k, j * n + l)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Trace of `self · other` accumulated so the result is bit-identical
    /// under argument swap; both matrices must share one square shape.
    pub fn symmetric_trace_product(&self, other: &ComplexMatrix) -> Result<C64> {
        if !self.is_square() || self.shape() != other.shape() {
            return Err(QchanError::Shape(format!(
                "trace product expects equal square shapes, got {:?} and {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let n = self.rows;
        let mut acc = ZERO;
        for i in 0..n {
            acc += self[(i, i)] * other[(i, i)];
            for j in (i + 1)..n {
                acc += self[(i, j)] * other[(j, i)] + self[(j, i)] * other[(i, j)];
            }
        }
        Ok(acc)
    }

    /// Eigendecomposition of a hermitian matrix; eigenvalues ascend.
    pub fn eigh(&self) -> Result<HermitianEigensystem> {
        if !self.is_square() {
            return Err(QchanError::Shape(format!(
                "eigh expects a square matrix, got {:?}",
                self.shape()
            )));
        }
        let defect = self.hermiticity_defect();
        if !(defect <= HERMITICITY_TOL) {
            return Err(QchanError::NotHermitian { defect });
        }
        let n = self.rows;
        // Work on the symmetrized matrix so roundoff in the input cannot leak
        // into an asymmetric decomposition.
        let sym = DMatrix::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5);
        let eig = sym
            .try_symmetric_eigen(f64::EPSILON, 100_000)
            .ok_or(QchanError::EigenFailed)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors =
            ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok(HermitianEigensystem {
            eigenvalues,
            eigenvectors,
        })
    }

    /// Principal square root of a PSD hermitian matrix.
    ///
    /// Eigenvalues in `[-PSD_CLAMP, 0)` are clamped to zero; anything lower is
    /// rejected as genuinely non-positive.
    pub fn psd_sqrt(&self) -> Result<ComplexMatrix> {
        let eig = self.eigh()?;
        let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
        if min < -PSD_CLAMP {
            return Err(QchanError::NotPositive {
                min_eigenvalue: min,
            });
        }
        let roots: Vec<f64> = eig
            .eigenvalues
            .iter()
            .map(|&l| if l > 0.0 { l.sqrt() } else { 0.0 })
            .collect();
        Ok(eig.recombine(&roots))
    }

    /// Trace norm (sum of absolute eigenvalues) of a hermitian matrix.
    pub fn trace_norm(&self) -> Result<f64> {
        let eig = self.eigh()?;
        Ok(eig.eigenvalues.iter().map(|l| l.abs()).sum())
    }

    /// The unitary `Q` factor of the QR decomposition, with each column's
    /// phase fixed so the corresponding diagonal entry of `R` is real
    /// positive. Feeding a Ginibre matrix through this yields Haar-distributed
    /// unitaries.
    pub fn qr_unitary(&self) -> Result<ComplexMatrix> {
        if !self.is_square() {
            return Err(QchanError::Shape(format!(
                "qr_unitary expects a square matrix, got {:?}",
                self.shape()
            )));
        }
        let n = self.rows;
        let m = DMatrix::from_fn(n, n, |i, j| self[(i, j)]);
        let qr = m.qr();
        let q = qr.q();
        let r = qr.r();
        Ok(ComplexMatrix::from_fn(n, n, |i, j| {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 {
                d / d.norm()
            } else {
                C64::new(1.0, 0.0)
            };
            q[(i, j)] * phase
        }))
    }
}

/// Returns `n` such that `n * n == m`, or a shape error.
pub fn perfect_square_root(m: usize) -> Result<usize> {
    let n = (m as f64).sqrt().round() as usize;
    if n * n == m {
        Ok(n)
    } else {
        Err(QchanError::Shape(format!("{m} is not a perfect square")))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Result of a hermitian eigendecomposition.
///
/// Eigenvalues are real and ascending; eigenvector `j` is column `j` of
/// `eigenvectors`, and `V · diag(λ) · V†` reconstructs the input.
#[derive(Debug, Clone)]
pub struct HermitianEigensystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigensystem {
    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// `V · diag(values) · V†` for caller-supplied spectrum values.
    pub fn recombine(&self, values: &[f64]) -> ComplexMatrix {
        let n = self.eigenvectors.rows();
        assert_eq!(values.len(), n, "recombine expects one value per column");
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            let s = C64::new(values[j], 0.0);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        scaled
            .matmul(&self.eigenvectors.adjoint())
            .expect("recombine dimensions always agree")
    }

    /// Reconstruction `V · diag(λ) · V†` of the decomposed matrix.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.recombine(&self.eigenvalues)
    }
}
