use alloc::vec::Vec;

use faer::Side;
use num_complex::Complex64;

use super::ops::permute_vector;
use super::{DenseHermitian, Matrix, StateVector, TensorSpace};
use crate::error::{invalid, Error, Result};
use crate::scalar::ZERO;

/// Default relative tolerance of [`psd_check`].
pub const PSD_REL_TOL: f64 = 1e-9;

/// Default singular-value cutoff of [`schmidt_rank`], relative to the largest
/// singular value.
pub const SCHMIDT_SV_TOL: f64 = 1e-10;

/// Eigenvalues in ascending order with orthonormal eigenvectors stored as the
/// columns of a unitary matrix.
///
/// No order is promised inside a degenerate eigenspace.
#[derive(Clone, Debug)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: Matrix,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.len() - 1]
    }

    /// Eigenvector matrix; column `i` belongs to `eigenvalues()[i]`.
    pub fn eigenvector_matrix(&self) -> &Matrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, i: usize) -> StateVector {
        StateVector::unnormalized(self.eigenvectors.column(i))
    }

    pub fn eigenvectors(&self) -> impl Iterator<Item = StateVector> + '_ {
        (0..self.len()).map(|i| self.eigenvector(i))
    }

    /// `Σ λ_i v_i v_i†`.
    pub fn reconstruct(&self) -> Matrix {
        let v = &self.eigenvectors;
        let n = self.len();
        let scaled = Matrix::from_fn(n, n, |i, j| v[(i, j)] * self.eigenvalues[j]);
        scaled
            .matmul(&v.adjoint())
            .expect("square factors of equal size")
    }
}

/// Groups of coordinates that the matrix never couples.
///
/// Two indices share a group when they are linked by a chain of exactly
/// nonzero entries, so the matrix is a direct sum over the groups.
fn coupled_blocks(m: &Matrix) -> Vec<Vec<usize>> {
    let n = m.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if m[(i, j)] != ZERO || m[(j, i)] != ZERO {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = alloc::vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

fn dense_eigen(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let evd = m
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence("Hermitian eigensolver"))?;
    let values = evd.S().column_vector().iter().map(|z| z.re).collect();
    Ok((values, Matrix::from_faer(evd.U())))
}

fn dense_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    m.to_faer()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NoConvergence("Hermitian eigensolver"))
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// If the matrix is an exact direct sum over coordinate blocks (its nonzero
/// pattern is disconnected), each block is diagonalized separately and every
/// eigenvector is supported on one block. This keeps eigenvectors of highly
/// degenerate structured operators aligned with their structure.
pub fn eig_hermitian(m: &DenseHermitian) -> Result<Spectrum> {
    let n = m.dim();
    if n == 0 {
        return Err(invalid!("eigendecomposition of an empty matrix"));
    }
    let mat = m.matrix();
    let blocks = coupled_blocks(mat);
    let mut pairs: Vec<(f64, Vec<(usize, Complex64)>)> = Vec::with_capacity(n);
    if blocks.len() == 1 {
        let (values, vecs) = dense_eigen(mat)?;
        for (j, &lambda) in values.iter().enumerate() {
            pairs.push((lambda, (0..n).map(|i| (i, vecs[(i, j)])).collect()));
        }
    } else {
        for block in &blocks {
            let sub = mat.submatrix(block, block);
            let (values, vecs) = dense_eigen(&sub)?;
            for (j, &lambda) in values.iter().enumerate() {
                let support = block
                    .iter()
                    .enumerate()
                    .map(|(local, &global)| (global, vecs[(local, j)]))
                    .collect();
                pairs.push((lambda, support));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let mut eigenvectors = Matrix::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    for (col, (lambda, support)) in pairs.into_iter().enumerate() {
        eigenvalues.push(lambda);
        for (row, z) in support {
            eigenvectors[(row, col)] = z;
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, ascending.
pub fn eigenvalues(m: &DenseHermitian) -> Result<Vec<f64>> {
    if m.dim() == 0 {
        return Err(invalid!("eigenvalues of an empty matrix"));
    }
    let mat = m.matrix();
    let blocks = coupled_blocks(mat);
    if blocks.len() == 1 {
        return dense_eigenvalues(mat);
    }
    let mut all = Vec::with_capacity(m.dim());
    for block in &blocks {
        all.extend(dense_eigenvalues(&mat.submatrix(block, block))?);
    }
    all.sort_by(f64::total_cmp);
    Ok(all)
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PsdVerdict {
    pub psd: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// The threshold `rel_tol·max(1, λ_max)` the minimum was compared against.
    pub tolerance: f64,
}

/// `λ_min ≥ −rel_tol·max(1, λ_max)`.
pub fn psd_check(m: &DenseHermitian, rel_tol: f64) -> Result<PsdVerdict> {
    if !(rel_tol >= 0.0) {
        return Err(invalid!("tolerance must be non-negative, got {rel_tol}"));
    }
    let values = eigenvalues(m)?;
    Ok(psd_verdict_from_values(&values, rel_tol))
}

pub(crate) fn psd_verdict_from_values(values: &[f64], rel_tol: f64) -> PsdVerdict {
    let min_eigenvalue = values[0];
    let max_eigenvalue = values[values.len() - 1];
    let tolerance = rel_tol * max_eigenvalue.max(1.0);
    PsdVerdict {
        psd: min_eigenvalue >= -tolerance,
        min_eigenvalue,
        max_eigenvalue,
        tolerance,
    }
}

fn check_bipartition(space: &TensorSpace, side_a: &[usize]) -> Result<Vec<usize>> {
    space.check_subset(side_a)?;
    if side_a.is_empty() || side_a.len() == space.num_factors() {
        return Err(invalid!(
            "side A must be a non-empty proper subset of the {} factors",
            space.num_factors()
        ));
    }
    let mut perm: Vec<usize> = side_a.to_vec();
    perm.extend((0..space.num_factors()).filter(|p| !side_a.contains(p)));
    Ok(perm)
}

/// Singular values (descending) of `v` reshaped into a `dim A × dim B`
/// matrix, after grouping the factors of `side_a` first.
pub fn schmidt_coefficients(
    v: &[Complex64],
    space: &TensorSpace,
    side_a: &[usize],
) -> Result<Vec<f64>> {
    if v.len() != space.dim() {
        return Err(invalid!(
            "vector of length {} in a space of dimension {}",
            v.len(),
            space.dim()
        ));
    }
    let perm = check_bipartition(space, side_a)?;
    let da: usize = side_a.iter().map(|&p| space.dims()[p]).product();
    let db = space.dim() / da;
    let grouped = permute_vector(v, space, &perm);
    let reshaped = faer::Mat::from_fn(da, db, |i, j| grouped[i * db + j]);
    reshaped
        .singular_values()
        .map_err(|_| Error::NoConvergence("singular value decomposition"))
}

/// Number of singular values above `sv_tol·σ_max` of the `A:B` reshape.
pub fn schmidt_rank(
    v: &StateVector,
    space: &TensorSpace,
    side_a: &[usize],
    sv_tol: f64,
) -> Result<usize> {
    let sv = schmidt_coefficients(v.amplitudes(), space, side_a)?;
    Ok(rank_from_singular_values(&sv, sv_tol))
}

pub(crate) fn rank_from_singular_values(sv: &[f64], sv_tol: f64) -> usize {
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > sv_tol * top).count()
}

/// `‖M − Σ λ v v†‖_max / (1 + ‖M‖_max)`.
pub fn reconstruction_residual(m: &DenseHermitian, spectrum: &Spectrum) -> f64 {
    spectrum.reconstruct().max_abs_diff(m.matrix()) / (1.0 + m.max_abs())
}

/// `‖V†V − 1‖_max` for the eigenvector matrix.
pub fn orthonormality_residual(spectrum: &Spectrum) -> f64 {
    spectrum.eigenvectors.unitarity_deviation()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{flip, max_entangled};
    use crate::scalar::real;

    #[test]
    fn identity_and_flip_spectra() {
        let s = eig_hermitian(&DenseHermitian::identity(5)).unwrap();
        assert!(s.eigenvalues().iter().all(|&l| (l - 1.0).abs() < 1e-15));
        let s = eig_hermitian(&flip(2)).unwrap();
        let want = [-1.0, 1.0, 1.0, 1.0];
        for (a, b) in s.eigenvalues().iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn flip_over_d_multiplicities() {
        for d in 2..6 {
            let f = flip(d).scale(1.0 / d as f64);
            let vals = eigenvalues(&f).unwrap();
            let inv = 1.0 / d as f64;
            let neg = vals.iter().filter(|&&l| (l + inv).abs() < 1e-12).count();
            let pos = vals.iter().filter(|&&l| (l - inv).abs() < 1e-12).count();
            assert_eq!(neg, d * (d - 1) / 2);
            assert_eq!(pos, d * (d + 1) / 2);
        }
    }

    #[test]
    fn psd_examples() {
        let v = psd_check(&DenseHermitian::identity(3), PSD_REL_TOL).unwrap();
        assert!(v.psd);
        assert!((v.min_eigenvalue - 1.0).abs() < 1e-15);
        let v = psd_check(&flip(2), PSD_REL_TOL).unwrap();
        assert!(!v.psd);
        assert!((v.min_eigenvalue + 1.0).abs() < 1e-14);
        let omega = max_entangled(2).projector;
        let space = TensorSpace::bipartite(2, 2).unwrap();
        let pt = crate::tensor::partial_transpose(&omega, &space, &[1]).unwrap();
        let v = psd_check(&pt, PSD_REL_TOL).unwrap();
        assert!(!v.psd);
        assert!((v.min_eigenvalue + 0.5).abs() < 1e-14);
        assert!(psd_check(&pt, -1.0).is_err());
    }

    #[test]
    fn schmidt_rank_examples() {
        let s22 = TensorSpace::bipartite(2, 2).unwrap();
        let v00 = StateVector::basis(4, 0).unwrap();
        assert_eq!(schmidt_rank(&v00, &s22, &[0], SCHMIDT_SV_TOL).unwrap(), 1);
        let omega = max_entangled(3).vector;
        let s33 = TensorSpace::bipartite(3, 3).unwrap();
        assert_eq!(schmidt_rank(&omega, &s33, &[0], SCHMIDT_SV_TOL).unwrap(), 3);
        assert_eq!(schmidt_rank(&omega, &s33, &[1], SCHMIDT_SV_TOL).unwrap(), 3);
        assert!(schmidt_rank(&omega, &s33, &[], SCHMIDT_SV_TOL).is_err());
        assert!(schmidt_rank(&omega, &s33, &[0, 1], SCHMIDT_SV_TOL).is_err());
    }

    #[test]
    fn block_diagonal_matrices_get_block_supported_eigenvectors() {
        // Two degenerate 2x2 blocks interleaved: {0, 2} and {1, 3}.
        let mut m = Matrix::identity(4);
        m[(0, 2)] = real(1.0);
        m[(2, 0)] = real(1.0);
        m[(1, 3)] = real(1.0);
        m[(3, 1)] = real(1.0);
        let h = DenseHermitian::new(m).unwrap();
        let s = eig_hermitian(&h).unwrap();
        for v in s.eigenvectors() {
            let a = v.amplitudes();
            let on_even = a[0].norm() + a[2].norm() > 1e-12;
            let on_odd = a[1].norm() + a[3].norm() > 1e-12;
            assert!(on_even ^ on_odd);
        }
        assert!(reconstruction_residual(&h, &s) < 1e-14);
        assert!(orthonormality_residual(&s) < 1e-14);
    }
}
