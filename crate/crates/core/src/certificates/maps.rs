use crate::error::{invalid, Result};
use crate::scalar::{real, ZERO};
use crate::tensor::{eigenvalues, psd_check, DenseHermitian, Matrix, PsdVerdict, TensorSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MapKind {
    Identity,
    Transposition,
    /// `X ↦ tr(X)·1 − X/(d − 1)`.
    ChoiMap,
    General,
}

/// Linear map `M_{d_in} → M_{d_out}` stored as its Choi matrix
/// `C_L = (L ⊗ id)(Ω)` on `d_out ⊗ d_in`, with analytic fast paths for the
/// named kinds.
///
/// Entry convention: `C[(a, i), (b, j)] = L(|i⟩⟨j|)[a, b] / d_in`, so
/// `L(X)[a, b] = d_in · Σ_ij C[(a, i), (b, j)] · X[i, j]`.
#[derive(Clone, Debug)]
pub struct LinearMapRep {
    d_in: usize,
    d_out: usize,
    kind: MapKind,
    choi: DenseHermitian,
    positivity_degree: Option<usize>,
}

impl LinearMapRep {
    fn analytic(d: usize, kind: MapKind, positivity_degree: Option<usize>) -> Result<Self> {
        if d == 0 {
            return Err(invalid!("map dimension must be positive"));
        }
        let mut map = Self {
            d_in: d,
            d_out: d,
            kind,
            choi: DenseHermitian::zeros(1),
            positivity_degree,
        };
        map.choi = map.choi_from_action()?;
        Ok(map)
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::analytic(d, MapKind::Identity, None)
    }

    pub fn transposition(d: usize) -> Result<Self> {
        Self::analytic(d, MapKind::Transposition, None)
    }

    /// A map given only by its Choi matrix on `d_out ⊗ d_in`.
    pub fn from_choi(choi: DenseHermitian, d_out: usize, d_in: usize) -> Result<Self> {
        if d_in == 0 || d_out == 0 || choi.dim() != d_in * d_out {
            return Err(invalid!(
                "Choi matrix of dimension {} does not fit d_out = {d_out}, d_in = {d_in}",
                choi.dim()
            ));
        }
        let choi = choi.without_space().with_space(choi_space(d_out, d_in)?)?;
        Ok(Self {
            d_in,
            d_out,
            kind: MapKind::General,
            choi,
            positivity_degree: None,
        })
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn choi(&self) -> &DenseHermitian {
        &self.choi
    }

    /// Known `k` for which the map is `k`-positive, when recorded.
    pub fn positivity_degree(&self) -> Option<usize> {
        self.positivity_degree
    }

    /// Applies the map to a `d_in × d_in` matrix, using the analytic formula
    /// when one exists.
    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        self.check_input(x)?;
        Ok(match self.kind {
            MapKind::Identity => x.clone(),
            MapKind::Transposition => x.transpose(),
            MapKind::ChoiMap => {
                let d = self.d_in;
                let t = x.trace();
                let inv = 1.0 / (d as f64 - 1.0);
                Matrix::from_fn(d, d, |a, b| {
                    let s = if a == b { t } else { ZERO };
                    s - x[(a, b)] * inv
                })
            }
            MapKind::General => self.apply_via_choi(x)?,
        })
    }

    /// Applies the map through its Choi matrix.
    pub fn apply_via_choi(&self, x: &Matrix) -> Result<Matrix> {
        self.check_input(x)?;
        let (din, dout) = (self.d_in, self.d_out);
        let c = self.choi.matrix();
        let scale = din as f64;
        Ok(Matrix::from_fn(dout, dout, |a, b| {
            let mut acc = ZERO;
            for i in 0..din {
                for j in 0..din {
                    let xij = x[(i, j)];
                    if xij != ZERO {
                        acc += c[(a * din + i, b * din + j)] * xij;
                    }
                }
            }
            acc * scale
        }))
    }

    /// Largest deviation between the fast path and the Choi route over all
    /// matrix units.
    pub fn fast_path_residual(&self) -> Result<f64> {
        let d = self.d_in;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let mut e = Matrix::zeros(d, d);
                e[(i, j)] = real(1.0);
                let diff = self.apply(&e)?.max_abs_diff(&self.apply_via_choi(&e)?);
                worst = worst.max(diff);
            }
        }
        Ok(worst)
    }

    pub fn choi_min_eigenvalue(&self) -> Result<f64> {
        Ok(eigenvalues(&self.choi)?[0])
    }

    /// Complete positivity via the Choi matrix.
    pub fn complete_positivity(&self, rel_tol: f64) -> Result<PsdVerdict> {
        psd_check(&self.choi, rel_tol)
    }

    fn check_input(&self, x: &Matrix) -> Result<()> {
        if x.rows() != self.d_in || x.cols() != self.d_in {
            return Err(invalid!(
                "map expects {0}x{0} input, got {1}x{2}",
                self.d_in,
                x.rows(),
                x.cols()
            ));
        }
        Ok(())
    }

    fn choi_from_action(&self) -> Result<DenseHermitian> {
        let (din, dout) = (self.d_in, self.d_out);
        let mut c = Matrix::zeros(dout * din, dout * din);
        let inv = 1.0 / din as f64;
        for i in 0..din {
            for j in 0..din {
                let mut e = Matrix::zeros(din, din);
                e[(i, j)] = real(1.0);
                let img = self.apply(&e)?;
                for a in 0..dout {
                    for b in 0..dout {
                        c[(a * din + i, b * din + j)] = img[(a, b)] * inv;
                    }
                }
            }
        }
        DenseHermitian::new(c)?.with_space(choi_space(dout, din)?)
    }
}

fn choi_space(d_out: usize, d_in: usize) -> Result<TensorSpace> {
    TensorSpace::new(&[d_out, d_in], &["out", "in"])
}

/// `P(X) = tr(X)·1 − X/(d − 1)`, which is `(d − 1)`-positive but not
/// completely positive.
pub fn choi_map(d: usize) -> Result<LinearMapRep> {
    if d < 2 {
        return Err(invalid!("the Choi map needs d >= 2, got {d}"));
    }
    LinearMapRep::analytic(d, MapKind::ChoiMap, Some(d - 1))
}

/// `(L ⊗ id)(Ω)` on `d_out ⊗ d_in`.
pub fn choi_matrix(map: &LinearMapRep) -> DenseHermitian {
    map.choi.clone()
}

/// Applies `map` to one tensor factor, leaving the others untouched. The
/// factor's dimension becomes `map.d_out()`.
pub fn apply_map_to_factor(
    map: &LinearMapRep,
    m: &DenseHermitian,
    space: &TensorSpace,
    factor: usize,
) -> Result<DenseHermitian> {
    if space.dim() != m.dim() {
        return Err(invalid!("space does not match the operator"));
    }
    if factor >= space.num_factors() {
        return Err(invalid!("factor {factor} out of range"));
    }
    let dims = space.dims();
    if dims[factor] != map.d_in() {
        return Err(invalid!(
            "factor {factor} has dimension {} but the map expects {}",
            dims[factor],
            map.d_in()
        ));
    }
    if map.kind() == MapKind::Identity {
        return m.clone().without_space().with_space(space.clone());
    }
    let left: usize = dims[..factor].iter().product();
    let right: usize = dims[factor + 1..].iter().product();
    let (din, dout) = (map.d_in(), map.d_out());
    let mut new_dims = dims.to_vec();
    new_dims[factor] = dout;
    let new_space = space.with_dims(&new_dims)?;
    let n = new_space.dim();
    let src = m.matrix();
    let mut out = Matrix::zeros(n, n);
    let mut block = Matrix::zeros(din, din);
    for l in 0..left {
        for r in 0..right {
            for l2 in 0..left {
                for r2 in 0..right {
                    let mut nonzero = false;
                    for x in 0..din {
                        for y in 0..din {
                            let v = src[((l * din + x) * right + r, (l2 * din + y) * right + r2)];
                            nonzero |= v != ZERO;
                            block[(x, y)] = v;
                        }
                    }
                    if !nonzero {
                        continue;
                    }
                    let img = map.apply(&block)?;
                    for a in 0..dout {
                        for b in 0..dout {
                            out[((l * dout + a) * right + r, (l2 * dout + b) * right + r2)] =
                                img[(a, b)];
                        }
                    }
                }
            }
        }
    }
    DenseHermitian::new(out)?.with_space(new_space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{flip, max_entangled};

    #[test]
    fn analytic_choi_matrices() {
        let id = LinearMapRep::identity(3).unwrap();
        assert!(choi_matrix(&id).max_abs_diff(&max_entangled(3).projector) < 1e-15);
        let t = LinearMapRep::transposition(2).unwrap();
        assert!(choi_matrix(&t).max_abs_diff(&flip(2).scale(0.5)) < 1e-15);
        assert!((t.choi_min_eigenvalue().unwrap() + 0.5).abs() < 1e-14);
        let p = choi_map(2).unwrap();
        let want = DenseHermitian::identity(4)
            .scale(0.5)
            .add_scaled(-1.0, &max_entangled(2).projector)
            .unwrap();
        assert!(choi_matrix(&p).max_abs_diff(&want) < 1e-15);
        assert!((p.choi_min_eigenvalue().unwrap() + 0.5).abs() < 1e-14);
        assert_eq!(p.positivity_degree(), Some(1));
    }

    #[test]
    fn fast_paths_agree_with_choi_route() {
        for d in 2..6 {
            for map in [
                LinearMapRep::identity(d).unwrap(),
                LinearMapRep::transposition(d).unwrap(),
                choi_map(d).unwrap(),
            ] {
                assert!(map.fast_path_residual().unwrap() < 1e-11);
            }
        }
    }

    #[test]
    fn choi_map_action() {
        let p = choi_map(2).unwrap();
        let e00 = Matrix::diagonal(&[1.0, 0.0]);
        assert_eq!(p.apply(&e00).unwrap(), Matrix::diagonal(&[0.0, 1.0]));
        let d = 3;
        let p = choi_map(d).unwrap();
        let id = p.apply(&Matrix::identity(d)).unwrap();
        let want = d as f64 - 1.0 / (d as f64 - 1.0);
        assert!(id.max_abs_diff(&Matrix::identity(d).scale(want)) < 1e-15);
        let mixed = Matrix::identity(3).scale(1.0 / 3.0);
        let out = p.apply(&mixed).unwrap();
        assert!(out.max_abs_diff(&Matrix::identity(3).scale(5.0 / 6.0)) < 1e-15);
        assert!(choi_map(1).is_err());
    }

    #[test]
    fn apply_to_factor_matches_partial_transpose() {
        for d in 2..5 {
            let omega = max_entangled(d).projector;
            let space = TensorSpace::bipartite(d, d).unwrap();
            let t = LinearMapRep::transposition(d).unwrap();
            let out = apply_map_to_factor(&t, &omega, &space, 1).unwrap();
            assert!(out.max_abs_diff(&flip(d).scale(1.0 / d as f64)) < 1e-15);
            let id = LinearMapRep::identity(d).unwrap();
            assert_eq!(
                apply_map_to_factor(&id, &omega, &space, 0).unwrap().matrix(),
                omega.matrix()
            );
        }
        let t = LinearMapRep::transposition(3).unwrap();
        let m = DenseHermitian::identity(4);
        assert!(apply_map_to_factor(&t, &m, &TensorSpace::bipartite(2, 2).unwrap(), 0).is_err());
    }

    #[test]
    fn general_map_from_choi() {
        let t = LinearMapRep::transposition(3).unwrap();
        let g = LinearMapRep::from_choi(choi_matrix(&t), 3, 3).unwrap();
        assert_eq!(g.kind(), MapKind::General);
        let x = Matrix::from_fn(3, 3, |i, j| num_complex::Complex64::new(i as f64, j as f64));
        assert!(g.apply(&x).unwrap().max_abs_diff(&x.transpose()) < 1e-14);
    }
}
