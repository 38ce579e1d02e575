use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// Ordered list of labeled tensor factors.
///
/// Composite indices are row-major over the factors in list order:
/// `index(i1, …, ik) = i1·(n2·…·nk) + … + ik`. Every reshape, Kronecker
/// product and factor permutation in the crate uses this convention.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TensorSpace {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl TensorSpace {
    pub fn new<S: AsRef<str>>(dims: &[usize], labels: &[S]) -> Result<Self> {
        if dims.is_empty() {
            return Err(invalid!("a tensor space needs at least one factor"));
        }
        if dims.len() != labels.len() {
            return Err(invalid!(
                "{} dimensions but {} labels",
                dims.len(),
                labels.len()
            ));
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(invalid!("factor {pos} has dimension 0"));
        }
        let labels: Vec<String> = labels.iter().map(|l| l.as_ref().to_string()).collect();
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.chars().any(char::is_whitespace) {
                return Err(invalid!("label {l:?} must be non-empty without whitespace"));
            }
            if labels[..i].contains(l) {
                return Err(invalid!("duplicate factor label {l:?}"));
            }
        }
        dims.iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| invalid!("ambient dimension overflows"))?;
        Ok(Self {
            dims: dims.to_vec(),
            labels,
        })
    }

    /// Space with labels `F0, F1, …`.
    pub fn from_dims(dims: &[usize]) -> Result<Self> {
        let labels: Vec<String> = (0..dims.len()).map(|i| format!("F{i}")).collect();
        Self::new(dims, &labels)
    }

    /// Two factors labeled `A` and `B`.
    pub fn bipartite(da: usize, db: usize) -> Result<Self> {
        Self::new(&[da, db], &["A", "B"])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    /// Product of all factor dimensions.
    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Row-major strides, one per factor.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = alloc::vec![1usize; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    /// Splits a composite index into per-factor indices.
    pub fn split_index(&self, mut flat: usize, out: &mut [usize]) {
        debug_assert_eq!(out.len(), self.dims.len());
        for k in (0..self.dims.len()).rev() {
            out[k] = flat % self.dims[k];
            flat /= self.dims[k];
        }
    }

    pub fn join_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    /// Per-factor digits of every composite index, flattened row by row.
    pub(crate) fn digit_table(&self) -> Vec<usize> {
        let k = self.dims.len();
        let n = self.dim();
        let mut table = alloc::vec![0usize; n * k];
        for flat in 0..n {
            self.split_index(flat, &mut table[flat * k..(flat + 1) * k]);
        }
        table
    }

    /// Checks that `subset` lists distinct valid factor positions.
    pub fn check_subset(&self, subset: &[usize]) -> Result<()> {
        for (i, &p) in subset.iter().enumerate() {
            if p >= self.dims.len() {
                return Err(invalid!(
                    "factor position {p} out of range for {} factors",
                    self.dims.len()
                ));
            }
            if subset[..i].contains(&p) {
                return Err(invalid!("factor position {p} repeated"));
            }
        }
        Ok(())
    }

    /// Space whose factor `k` is factor `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.dims.len() {
            return Err(invalid!(
                "permutation of length {} for {} factors",
                perm.len(),
                self.dims.len()
            ));
        }
        self.check_subset(perm)?;
        Ok(Self {
            dims: perm.iter().map(|&p| self.dims[p]).collect(),
            labels: perm.iter().map(|&p| self.labels[p].clone()).collect(),
        })
    }

    /// Space restricted to the listed factors, in the listed order.
    pub fn select(&self, positions: &[usize]) -> Result<Self> {
        self.check_subset(positions)?;
        if positions.is_empty() {
            return Err(invalid!("cannot select zero factors"));
        }
        Ok(Self {
            dims: positions.iter().map(|&p| self.dims[p]).collect(),
            labels: positions.iter().map(|&p| self.labels[p].clone()).collect(),
        })
    }

    /// Same labels with new dimensions.
    pub fn with_dims(&self, dims: &[usize]) -> Result<Self> {
        Self::new(dims, &self.labels)
    }

    /// Concatenation of two spaces. Labels must stay unique.
    pub fn concat(&self, other: &TensorSpace) -> Result<Self> {
        let dims: Vec<usize> = self.dims.iter().chain(&other.dims).copied().collect();
        let labels: Vec<&String> = self.labels.iter().chain(&other.labels).collect();
        Self::new(&dims, &labels)
    }

    /// Merges consecutive factor groups into single factors.
    ///
    /// `groups` lists how many consecutive factors go into each new factor;
    /// the new labels are the concatenation of the old ones.
    pub fn coarse_grain(&self, groups: &[usize]) -> Result<Self> {
        if groups.iter().sum::<usize>() != self.dims.len() || groups.contains(&0) {
            return Err(invalid!(
                "groups {groups:?} do not partition {} factors",
                self.dims.len()
            ));
        }
        let mut dims = Vec::with_capacity(groups.len());
        let mut labels = Vec::with_capacity(groups.len());
        let mut start = 0;
        for &g in groups {
            dims.push(self.dims[start..start + g].iter().product());
            labels.push(self.labels[start..start + g].concat());
            start += g;
        }
        Self::new(&dims, &labels)
    }
}
