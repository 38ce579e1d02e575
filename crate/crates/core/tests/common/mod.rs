//! Reference implementations used as oracles. They are written directly from
//! the definitions with explicit index loops and share no code with the
//! library beyond the matrix container.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snforge_core::tensor::{DenseHermitian, Matrix};
use snforge_core::Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    })
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> DenseHermitian {
    let a = gaussian_matrix(rng, n, n);
    DenseHermitian::from_hermitian_part(&a + &a.adjoint()).unwrap()
}

/// `A A†` with `A` of shape `n × rank`.
pub fn random_psd(rng: &mut impl Rng, n: usize, rank: usize) -> DenseHermitian {
    let a = gaussian_matrix(rng, n, rank);
    DenseHermitian::from_hermitian_part(a.matmul(&a.adjoint()).unwrap()).unwrap()
}

/// Eigenvalues from nalgebra, ascending.
pub fn oracle_eigenvalues(m: &DenseHermitian) -> Vec<f64> {
    let n = m.dim();
    let a = DMatrix::from_fn(n, n, |i, j| m.entry(i, j));
    let mut v: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn oracle_min_eig(m: &DenseHermitian) -> f64 {
    oracle_eigenvalues(m)[0]
}

/// Direct PSD test with the same relative rule as the library.
pub fn oracle_psd(m: &DenseHermitian, rel: f64) -> bool {
    let v = oracle_eigenvalues(m);
    v[0] >= -rel * v[v.len() - 1].max(1.0)
}

/// `(A ⊗ B)[(i,k),(j,l)] = A[i,j] B[k,l]`.
pub fn naive_kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (p, q) = (b.rows(), b.cols());
    Matrix::from_fn(a.rows() * p, a.cols() * q, |r, c| a[(r / p, c / q)] * b[(r % p, c % q)])
}

/// Partial transpose of the second factor of `da ⊗ db`.
pub fn naive_pt_second(m: &Matrix, da: usize, db: usize) -> Matrix {
    Matrix::from_fn(da * db, da * db, |r, c| {
        let (i, k) = (r / db, r % db);
        let (j, l) = (c / db, c % db);
        m[(i * db + l, j * db + k)]
    })
}

/// Partial transpose of the first factor of `da ⊗ db`.
pub fn naive_pt_first(m: &Matrix, da: usize, db: usize) -> Matrix {
    Matrix::from_fn(da * db, da * db, |r, c| {
        let (i, k) = (r / db, r % db);
        let (j, l) = (c / db, c % db);
        m[(j * db + k, i * db + l)]
    })
}

/// `Z^Γ` on `(A1, B1, A2, B2)` with dimensions `(d1, d1, d2, d2)`,
/// transposing `B1` and `B2`.
pub fn naive_pt_b1b2(m: &Matrix, d1: usize, d2: usize) -> Matrix {
    let dims = [d1, d1, d2, d2];
    let split = |x: usize| {
        let mut out = [0usize; 4];
        let mut rest = x;
        for k in (0..4).rev() {
            out[k] = rest % dims[k];
            rest /= dims[k];
        }
        out
    };
    let join = |d: [usize; 4]| ((d[0] * d1 + d[1]) * d2 + d[2]) * d2 + d[3];
    let n = d1 * d1 * d2 * d2;
    Matrix::from_fn(n, n, |r, c| {
        let (mut a, mut b) = (split(r), split(c));
        for k in [1, 3] {
            core::mem::swap(&mut a[k], &mut b[k]);
        }
        m[(join(a), join(b))]
    })
}

/// Omega projector on `d ⊗ d` from its definition.
pub fn naive_omega(d: usize) -> Matrix {
    Matrix::from_fn(d * d, d * d, |r, c| {
        if r % (d + 1) == 0 && c % (d + 1) == 0 {
            Complex64::new(1.0 / d as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn herm(m: Matrix) -> DenseHermitian {
    DenseHermitian::from_hermitian_part(m).unwrap()
}
