use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use faer::Mat;
use num_complex::Complex64;

use super::TensorSpace;
use crate::error::{invalid, Error, Result};
use crate::scalar::{abs, cabs, cabs2, real, sqrt, ONE, ZERO};

/// Relative tolerance for asserting conjugate symmetry.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Relative tolerance for asserting unit norm of state vectors.
pub const NORM_TOL: f64 = 1e-12;

/// Dense complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: alloc::vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(invalid!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            ));
        }
        Ok(Self { rows, cols, data })
    }

    /// Diagonal matrix with the given real entries.
    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = real(v);
        }
        m
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest absolute entry, `‖·‖_max`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|&z| cabs(z)).fold(0.0, f64::max)
    }

    /// `‖self − other‖_max`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| cabs(a - b))
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        sqrt(self.data.iter().map(|&z| cabs2(z)).sum())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `max |a_ij − conj(a_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max(cabs(self.data[i * n + j] - self.data[j * n + i].conj()));
            }
        }
        dev
    }

    /// Kronecker product with row-major composite indices.
    pub fn kron(&self, other: &Matrix) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        let rows = self.rows * r2;
        let cols = self.cols * c2;
        let mut data = alloc::vec![ZERO; rows * cols];
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.data[i1 * self.cols + j1];
                if a == ZERO {
                    continue;
                }
                for i2 in 0..r2 {
                    let row = (i1 * r2 + i2) * cols + j1 * c2;
                    let src = &other.data[i2 * c2..(i2 + 1) * c2];
                    for (dst, &b) in data[row..row + c2].iter_mut().zip(src) {
                        *dst = a * b;
                    }
                }
            }
        }
        Self { rows, cols, data }
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(invalid!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.cols,
                other.rows,
                other.cols
            ));
        }
        let prod = self.to_faer() * other.to_faer();
        Ok(Self::from_faer(prod.as_ref()))
    }

    /// `self · v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Matrix) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    /// `‖self†·self − 1‖_max`.
    pub fn unitarity_deviation(&self) -> f64 {
        let g = self.adjoint().to_faer() * self.to_faer();
        let g = Self::from_faer(g.as_ref());
        g.max_abs_diff(&Self::identity(self.cols))
    }

    pub(crate) fn to_faer(&self) -> Mat<Complex64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self.data[i * self.cols + j])
    }

    pub(crate) fn from_faer(m: faer::MatRef<'_, Complex64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Submatrix on the given row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

macro_rules! elementwise {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Matrix> for &Matrix {
            type Output = Matrix;
            fn $method(self, rhs: &Matrix) -> Matrix {
                assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
                Matrix {
                    rows: self.rows,
                    cols: self.cols,
                    data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a $op b).collect(),
                }
            }
        }
    };
}
elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl Mul<f64> for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: f64) -> Matrix {
        self.scale(rhs)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.map(|z| -z)
    }
}

/// Square complex matrix known to be Hermitian.
///
/// Construction checks `|a_ij − conj(a_ji)| ≤ 1e−12·(1 + ‖a‖_max)` and that
/// every entry is finite. An optional [`TensorSpace`] records the factor
/// structure; its ambient dimension always equals the matrix dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseHermitian {
    matrix: Matrix,
    space: Option<TensorSpace>,
}

impl DenseHermitian {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(invalid!(
                "Hermitian matrix must be square, got {}x{}",
                matrix.rows,
                matrix.cols
            ));
        }
        if !matrix.is_finite() {
            return Err(invalid!("matrix has non-finite entries"));
        }
        let tolerance = HERMITIAN_TOL * (1.0 + matrix.max_abs());
        let deviation = matrix.hermitian_deviation();
        if deviation > tolerance {
            return Err(Error::NotHermitian {
                deviation,
                tolerance,
            });
        }
        Ok(Self {
            matrix,
            space: None,
        })
    }

    /// Replaces `matrix` by its Hermitian part `(M + M†)/2`.
    ///
    /// Used for products such as `U ρ U†` that are Hermitian in exact
    /// arithmetic but carry rounding noise.
    pub fn from_hermitian_part(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(invalid!("Hermitian part of a non-square matrix"));
        }
        let n = matrix.rows;
        let mut m = matrix;
        for i in 0..n {
            m.data[i * n + i].im = 0.0;
            for j in i + 1..n {
                let avg = (m.data[i * n + j] + m.data[j * n + i].conj()) * 0.5;
                m.data[i * n + j] = avg;
                m.data[j * n + i] = avg.conj();
            }
        }
        Self::new(m)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            matrix: Matrix::zeros(n, n),
            space: None,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: Matrix::identity(n),
            space: None,
        }
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::new(Matrix::diagonal(values))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(v: &StateVector) -> Self {
        Self {
            matrix: Matrix::outer(v.amplitudes(), v.amplitudes()),
            space: v.space().cloned(),
        }
    }

    /// Attaches a factor structure.
    pub fn with_space(mut self, space: TensorSpace) -> Result<Self> {
        if space.dim() != self.dim() {
            return Err(invalid!(
                "space of dimension {} attached to a {}x{} matrix",
                space.dim(),
                self.dim(),
                self.dim()
            ));
        }
        self.space = Some(space);
        Ok(self)
    }

    pub fn without_space(mut self) -> Self {
        self.space = None;
        self
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn space(&self) -> Option<&TensorSpace> {
        self.space.as_ref()
    }

    /// The attached space, or an error naming the operation that needed it.
    pub fn require_space(&self, op: &str) -> Result<&TensorSpace> {
        self.space
            .as_ref()
            .ok_or_else(|| invalid!("{op} needs a matrix with an attached tensor space"))
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// Real trace.
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.max_abs()
    }

    pub fn max_abs_diff(&self, other: &DenseHermitian) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// Real multiple, keeping the space.
    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale(factor),
            space: self.space.clone(),
        }
    }

    /// Divides by the trace.
    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if !(t > 0.0) {
            return Err(invalid!("cannot normalize an operator with trace {t}"));
        }
        Ok(self.scale(1.0 / t))
    }

    /// `self + factor·other`, keeping the space of `self`.
    pub fn add_scaled(&self, factor: f64, other: &DenseHermitian) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(invalid!(
                "dimension mismatch {} vs {}",
                self.dim(),
                other.dim()
            ));
        }
        let data = self
            .matrix
            .data
            .iter()
            .zip(&other.matrix.data)
            .map(|(&a, &b)| a + b * factor)
            .collect();
        Ok(Self {
            matrix: Matrix {
                rows: self.dim(),
                cols: self.dim(),
                data,
            },
            space: self.space.clone(),
        })
    }

    /// `⟨v|self|v⟩` (real part).
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let mv = self.matrix.apply(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
    }

    /// `tr(self · other)` for Hermitian operands.
    pub fn trace_product(&self, other: &DenseHermitian) -> f64 {
        assert_eq!(self.dim(), other.dim());
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.matrix.data[i * n + j] * other.matrix.data[j * n + i]).re;
            }
        }
        acc
    }

    /// Kronecker product of two Hermitian matrices. Spaces are concatenated
    /// when both operands carry one with disjoint labels.
    pub fn kron(&self, other: &DenseHermitian) -> Self {
        let space = match (&self.space, &other.space) {
            (Some(a), Some(b)) => a.concat(b).ok(),
            _ => None,
        };
        Self {
            matrix: self.matrix.kron(&other.matrix),
            space,
        }
    }

    /// Wraps a matrix already known to be Hermitian (e.g. an entry
    /// permutation of a Hermitian matrix) without re-checking.
    pub(crate) fn from_parts_unchecked(matrix: Matrix, space: Option<TensorSpace>) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix, space }
    }
}

/// Vector in a (possibly labeled) Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    space: Option<TensorSpace>,
    normalized: bool,
}

impl StateVector {
    /// Unit vector; the norm must be 1 within `1e−12`.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm(&amplitudes);
        if abs(norm - 1.0) > NORM_TOL {
            return Err(invalid!("state vector has norm {norm}, expected 1"));
        }
        Ok(Self {
            amplitudes,
            space: None,
            normalized: true,
        })
    }

    /// Vector explicitly flagged as unnormalized.
    pub fn unnormalized(amplitudes: Vec<Complex64>) -> Self {
        Self {
            amplitudes,
            space: None,
            normalized: false,
        }
    }

    /// Rescales to unit norm.
    pub fn normalize(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n > 0.0) || !n.is_finite() {
            return Err(invalid!("cannot normalize a vector of norm {n}"));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / n).collect(),
            space: None,
            normalized: true,
        })
    }

    /// Computational basis vector `|i⟩` in dimension `n`.
    pub fn basis(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(invalid!("basis index {i} out of range for dimension {n}"));
        }
        let mut a = alloc::vec![ZERO; n];
        a[i] = ONE;
        Self::new(a)
    }

    pub fn with_space(mut self, space: TensorSpace) -> Result<Self> {
        if space.dim() != self.amplitudes.len() {
            return Err(invalid!(
                "space of dimension {} attached to a vector of length {}",
                space.dim(),
                self.amplitudes.len()
            ));
        }
        self.space = Some(space);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn space(&self) -> Option<&TensorSpace> {
        self.space.as_ref()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn kron(&self, other: &StateVector) -> Self {
        let mut a = Vec::with_capacity(self.dim() * other.dim());
        for &x in &self.amplitudes {
            for &y in &other.amplitudes {
                a.push(x * y);
            }
        }
        let space = match (&self.space, &other.space) {
            (Some(s), Some(t)) => s.concat(t).ok(),
            _ => None,
        };
        Self {
            amplitudes: a,
            space,
            normalized: self.normalized && other.normalized,
        }
    }
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    sqrt(v.iter().map(|&z| cabs2(z)).sum())
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
