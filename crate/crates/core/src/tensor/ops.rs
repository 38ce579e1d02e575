use alloc::vec::Vec;

use super::{DenseHermitian, Matrix, TensorSpace};
use crate::error::{invalid, Result};
use crate::scalar::ZERO;

/// Kronecker product of a non-empty list of Hermitian matrices.
///
/// Factor spaces are concatenated when every part carries one and the labels
/// stay unique; otherwise the result has no attached space.
pub fn kron(parts: &[&DenseHermitian]) -> Result<DenseHermitian> {
    let (first, rest) = parts
        .split_first()
        .ok_or_else(|| invalid!("kron of an empty list"))?;
    Ok(rest.iter().fold((*first).clone(), |acc, p| acc.kron(p)))
}

fn check_space(m: &DenseHermitian, space: &TensorSpace) -> Result<()> {
    if space.dim() != m.dim() {
        return Err(invalid!(
            "tensor space of dimension {} does not match a {}x{} matrix",
            space.dim(),
            m.dim(),
            m.dim()
        ));
    }
    Ok(())
}

/// Reorders tensor factors: factor `k` of the result is factor `perm[k]` of
/// the input. The returned matrix carries the permuted space.
pub fn permute_factors(
    m: &DenseHermitian,
    space: &TensorSpace,
    perm: &[usize],
) -> Result<DenseHermitian> {
    check_space(m, space)?;
    let new_space = space.permuted(perm)?;
    let src = permutation_index_map(space, perm);
    let n = m.dim();
    let old = m.matrix();
    let mat = Matrix::from_fn(n, n, |i, j| old[(src[i], src[j])]);
    Ok(DenseHermitian::from_parts_unchecked(mat, Some(new_space)))
}

/// `src[new_flat] = old_flat` for the factor permutation `perm`.
pub(crate) fn permutation_index_map(space: &TensorSpace, perm: &[usize]) -> Vec<usize> {
    let strides = space.strides();
    let new_space = space
        .permuted(perm)
        .expect("permutation validated by caller");
    let k = perm.len();
    let mut digits = alloc::vec![0usize; k];
    (0..space.dim())
        .map(|flat| {
            new_space.split_index(flat, &mut digits);
            digits
                .iter()
                .zip(perm)
                .map(|(&d, &p)| d * strides[p])
                .sum()
        })
        .collect()
}

/// Reorders the amplitudes of a vector according to `perm` (see
/// [`permute_factors`]).
pub(crate) fn permute_vector(
    v: &[num_complex::Complex64],
    space: &TensorSpace,
    perm: &[usize],
) -> Vec<num_complex::Complex64> {
    permutation_index_map(space, perm)
        .into_iter()
        .map(|s| v[s])
        .collect()
}

/// Sum over the selected factors of `digit·stride`, for every composite index.
fn subset_offsets(space: &TensorSpace, subset: &[usize]) -> Vec<usize> {
    let strides = space.strides();
    let k = space.num_factors();
    let table = space.digit_table();
    (0..space.dim())
        .map(|flat| {
            subset
                .iter()
                .map(|&p| table[flat * k + p] * strides[p])
                .sum()
        })
        .collect()
}

/// Transposes the row and column indices of the selected factors only.
pub(crate) fn partial_transpose_matrix(
    m: &Matrix,
    space: &TensorSpace,
    subset: &[usize],
) -> Result<Matrix> {
    space.check_subset(subset)?;
    let n = m.rows();
    if subset.is_empty() {
        return Ok(m.clone());
    }
    let off = subset_offsets(space, subset);
    let mut out = Matrix::zeros(n, n);
    for r in 0..n {
        let base_r = r - off[r];
        for c in 0..n {
            let base_c = c - off[c];
            out[(base_r + off[c], base_c + off[r])] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Partial transpose on the factors listed in `subset`.
///
/// An involution that preserves Hermiticity and the trace; transposing every
/// factor gives the full transpose.
pub fn partial_transpose(
    m: &DenseHermitian,
    space: &TensorSpace,
    subset: &[usize],
) -> Result<DenseHermitian> {
    check_space(m, space)?;
    let mat = partial_transpose_matrix(m.matrix(), space, subset)?;
    Ok(DenseHermitian::from_parts_unchecked(mat, Some(space.clone())))
}

/// Traces out the factors listed in `traced`.
///
/// Tracing every factor yields the 1×1 matrix `[tr M]` with no space.
pub fn partial_trace(
    m: &DenseHermitian,
    space: &TensorSpace,
    traced: &[usize],
) -> Result<DenseHermitian> {
    check_space(m, space)?;
    space.check_subset(traced)?;
    let kept: Vec<usize> = (0..space.num_factors())
        .filter(|p| !traced.contains(p))
        .collect();
    if kept.is_empty() {
        let t = m.matrix().trace();
        let mat = Matrix::from_fn(1, 1, |_, _| num_complex::Complex64::new(t.re, 0.0));
        return Ok(DenseHermitian::from_parts_unchecked(mat, None));
    }
    let kept_space = space.select(&kept)?;
    let k = space.num_factors();
    let table = space.digit_table();
    let n = m.dim();
    let mut kept_idx = Vec::with_capacity(n);
    let mut traced_idx = Vec::with_capacity(n);
    for flat in 0..n {
        let digits = &table[flat * k..(flat + 1) * k];
        kept_idx.push(kept.iter().fold(0, |acc, &p| acc * space.dims()[p] + digits[p]));
        traced_idx.push(traced.iter().fold(0, |acc, &p| acc * space.dims()[p] + digits[p]));
    }
    let nk = kept_space.dim();
    let mut out = Matrix::zeros(nk, nk);
    let src = m.matrix();
    for r in 0..n {
        for c in 0..n {
            if traced_idx[r] == traced_idx[c] {
                let z = src[(r, c)];
                if z != ZERO {
                    out[(kept_idx[r], kept_idx[c])] += z;
                }
            }
        }
    }
    Ok(DenseHermitian::from_parts_unchecked(out, Some(kept_space)))
}
