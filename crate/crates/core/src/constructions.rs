//! Explicit states: maximally entangled and flip operators, the
//! `Z = X ⊗ (1 − Ω) + Y ⊗ Ω` family, zero padding and PT-invariant lifts.
//!
//! Constructors return unnormalized operators unless their name says
//! otherwise; [`DenseHermitian::normalized`] divides by the trace.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::scalar::{c, ceil_div, exact_sqrt, real, sqrt, ZERO};
use crate::tensor::{
    partial_transpose, permute_factors, DenseHermitian, Matrix, StateVector, TensorSpace,
};

/// Factor positions of `A1, B1, A2, B2` in a [`ZFamilyState`].
pub const A1: usize = 0;
pub const B1: usize = 1;
pub const A2: usize = 2;
pub const B2: usize = 3;

/// The `A = A1A2` side of the `A1A2 : B1B2` bipartition.
pub const Z_SIDE_A: [usize; 2] = [A1, A2];
/// The `B = B1B2` side of the `A1A2 : B1B2` bipartition.
pub const Z_SIDE_B: [usize; 2] = [B1, B2];

/// Maximally entangled vector `(1/√d) Σ_i |ii⟩` and its projector.
#[derive(Clone, Debug)]
pub struct MaxEntangled {
    pub vector: StateVector,
    pub projector: DenseHermitian,
}

/// Panics if `d == 0`.
pub fn max_entangled(d: usize) -> MaxEntangled {
    assert!(d >= 1, "dimension must be positive");
    let space = TensorSpace::bipartite(d, d).expect("d >= 1");
    let amp = real(1.0 / sqrt(d as f64));
    let mut a = alloc::vec![ZERO; d * d];
    for i in 0..d {
        a[i * d + i] = amp;
    }
    let vector = StateVector::unnormalized(a.clone());
    // Entries of the projector are exactly 1/d on the (ii, jj) pattern.
    let inv = real(1.0 / d as f64);
    let mut m = Matrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] = inv;
        }
    }
    let vector = StateVector::normalize(vector.into_amplitudes())
        .and_then(|v| v.with_space(space.clone()))
        .expect("nonzero vector");
    let projector = DenseHermitian::new(m)
        .and_then(|p| p.with_space(space))
        .expect("real symmetric");
    MaxEntangled { vector, projector }
}

/// Flip operator `F|ij⟩ = |ji⟩` on `d ⊗ d`. Panics if `d == 0`.
pub fn flip(d: usize) -> DenseHermitian {
    assert!(d >= 1, "dimension must be positive");
    let mut m = Matrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] = real(1.0);
        }
    }
    DenseHermitian::new(m)
        .and_then(|f| f.with_space(TensorSpace::bipartite(d, d)?))
        .expect("permutation matrix is symmetric")
}

fn one_minus_omega(d: usize) -> DenseHermitian {
    DenseHermitian::identity(d * d)
        .add_scaled(-1.0, &max_entangled(d).projector)
        .expect("equal dimensions")
}

/// `Z = X ⊗ (1 − Ω) + Y ⊗ Ω` on factors `(A1, B1, A2, B2)` with dimensions
/// `(d1, d1, d2, d2)`, together with its components.
#[derive(Clone, Debug)]
pub struct ZFamilyState {
    d1: usize,
    d2: usize,
    x: DenseHermitian,
    y: DenseHermitian,
    z: DenseHermitian,
}

impl ZFamilyState {
    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn x(&self) -> &DenseHermitian {
        &self.x
    }

    pub fn y(&self) -> &DenseHermitian {
        &self.y
    }

    pub fn z(&self) -> &DenseHermitian {
        &self.z
    }

    pub fn space(&self) -> &TensorSpace {
        self.z.space().expect("Z always carries its space")
    }

    /// Side `A = {A1, A2}` of the bipartition.
    pub fn side_a(&self) -> [usize; 2] {
        Z_SIDE_A
    }

    /// Rescales `X`, `Y` and `Z` so that `tr Z = 1`.
    pub fn normalized(&self) -> Result<Self> {
        let t = self.z.trace();
        if !(t > 0.0) {
            return Err(invalid!("cannot normalize Z with trace {t}"));
        }
        Ok(Self {
            d1: self.d1,
            d2: self.d2,
            x: self.x.scale(1.0 / t),
            y: self.y.scale(1.0 / t),
            z: self.z.scale(1.0 / t),
        })
    }

    /// `Z^Γ`, the partial transpose on `B1B2`.
    pub fn partial_transpose_b(&self) -> DenseHermitian {
        partial_transpose(&self.z, self.space(), &Z_SIDE_B).expect("valid subset")
    }

    /// `Z` regrouped as a two-factor operator on `(A1A2) ⊗ (B1B2)`.
    pub fn bipartite(&self) -> DenseHermitian {
        let grouped = permute_factors(&self.z, self.space(), &[A1, A2, B1, B2])
            .expect("valid permutation");
        let n = self.d1 * self.d2;
        grouped
            .without_space()
            .with_space(TensorSpace::new(&[n, n], &["A1A2", "B1B2"]).expect("valid labels"))
            .expect("dimension n*n")
    }

    /// `‖Z − (X ⊗ (1 − Ω) + Y ⊗ Ω)‖_max / (1 + ‖Z‖_max)`.
    pub fn reconstruction_residual(&self) -> f64 {
        let rebuilt = assemble(&self.x, &self.y, self.d2);
        rebuilt.max_abs_diff(&self.z) / (1.0 + self.z.max_abs())
    }

    /// Recovers `X` and `Y` from an operator on `(d1, d1, d2, d2)` assumed to
    /// have the family form, and checks the reconstruction.
    ///
    /// `Y = ⟨Ω|Z|Ω⟩` on `A2B2`; `X = ⟨01|Z|01⟩` since `|01⟩ ⟂ |Ω⟩`.
    pub fn from_operator(z: &DenseHermitian, space: &TensorSpace) -> Result<Self> {
        let dims = space.dims();
        if dims.len() != 4 || dims[0] != dims[1] || dims[2] != dims[3] {
            return Err(invalid!(
                "expected factor dimensions (d1, d1, d2, d2), got {dims:?}"
            ));
        }
        if space.dim() != z.dim() {
            return Err(invalid!("space does not match the operator"));
        }
        let (d1, d2) = (dims[0], dims[2]);
        let n1 = d1 * d1;
        let n2 = d2 * d2;
        let omega = max_entangled(d2).vector;
        let om = omega.amplitudes();
        let compress = |v: &[num_complex::Complex64]| {
            Matrix::from_fn(n1, n1, |i, j| {
                let mut acc = ZERO;
                for (a, &va) in v.iter().enumerate() {
                    if va == ZERO {
                        continue;
                    }
                    for (b, &vb) in v.iter().enumerate() {
                        if vb != ZERO {
                            acc += va.conj() * z.entry(i * n2 + a, j * n2 + b) * vb;
                        }
                    }
                }
                acc
            })
        };
        let y = DenseHermitian::from_hermitian_part(compress(om))?;
        let x = if d2 >= 2 {
            let mut e01 = alloc::vec![ZERO; n2];
            e01[1] = real(1.0);
            DenseHermitian::from_hermitian_part(compress(&e01))?
        } else {
            DenseHermitian::zeros(n1)
        };
        let state = build_z(&x, &y, d2)?;
        let residual = state.reconstruction_residual_against(z);
        if residual > 1e-12 {
            return Err(invalid!(
                "operator is not of the form X ⊗ (1 − Ω) + Y ⊗ Ω (residual {residual:e})"
            ));
        }
        Ok(Self {
            z: z.clone().without_space().with_space(state.space().clone())?,
            ..state
        })
    }

    fn reconstruction_residual_against(&self, other: &DenseHermitian) -> f64 {
        self.z.max_abs_diff(other) / (1.0 + other.max_abs())
    }
}

fn z_space(d1: usize, d2: usize) -> TensorSpace {
    TensorSpace::new(&[d1, d1, d2, d2], &["A1", "B1", "A2", "B2"]).expect("positive dimensions")
}

fn assemble(x: &DenseHermitian, y: &DenseHermitian, d2: usize) -> DenseHermitian {
    let a = x.matrix().kron(one_minus_omega(d2).matrix());
    let b = y.matrix().kron(max_entangled(d2).projector.matrix());
    DenseHermitian::new(&a + &b).expect("sum of Kronecker products of Hermitian matrices")
}

/// Builds `Z = X ⊗ (1 − Ω) + Y ⊗ Ω` with `X, Y` on `d1 ⊗ d1`.
pub fn build_z(x: &DenseHermitian, y: &DenseHermitian, d2: usize) -> Result<ZFamilyState> {
    if x.dim() != y.dim() {
        return Err(invalid!(
            "X and Y must have equal dimension, got {} and {}",
            x.dim(),
            y.dim()
        ));
    }
    let d1 = exact_sqrt(x.dim())
        .filter(|&d| d >= 1)
        .ok_or_else(|| invalid!("dimension {} of X is not d1² for an integer d1", x.dim()))?;
    if d2 == 0 {
        return Err(invalid!("d2 must be positive"));
    }
    let xy_space = TensorSpace::new(&[d1, d1], &["A1", "B1"])?;
    let z = assemble(x, y, d2).with_space(z_space(d1, d2))?;
    Ok(ZFamilyState {
        d1,
        d2,
        x: x.clone().without_space().with_space(xy_space.clone())?,
        y: y.clone().without_space().with_space(xy_space)?,
        z,
    })
}

/// `X = 1 − Ω` and `Y = (d1 − 1)(d2 + 1)·Ω` on `d1 ⊗ d1`.
pub fn concrete_xy(d1: usize, d2: usize) -> Result<(DenseHermitian, DenseHermitian)> {
    if d1 == 0 || d1 > d2 {
        return Err(invalid!("need 1 <= d1 <= d2, got d1 = {d1}, d2 = {d2}"));
    }
    let x = one_minus_omega(d1);
    let y = max_entangled(d1)
        .projector
        .scale(((d1 - 1) * (d2 + 1)) as f64);
    Ok((x, y))
}

/// The concrete family member for `(d1, d2)`: positive, PPT, with Schmidt
/// number at least `⌈d2/d1⌉` across `A1A2 : B1B2`. Unnormalized.
pub fn concrete_family(d1: usize, d2: usize) -> Result<ZFamilyState> {
    let (x, y) = concrete_xy(d1, d2)?;
    build_z(&x, &y, d2)
}

/// Zero-pads each factor to `new_dims`, keeping entries on the original
/// index range. The spectrum gains zeros and is otherwise unchanged.
pub fn embed_zero(
    m: &DenseHermitian,
    space: &TensorSpace,
    new_dims: &[usize],
) -> Result<DenseHermitian> {
    if space.dim() != m.dim() {
        return Err(invalid!("space does not match the operator"));
    }
    if new_dims.len() != space.num_factors() {
        return Err(invalid!(
            "{} target dimensions for {} factors",
            new_dims.len(),
            space.num_factors()
        ));
    }
    if let Some(k) = (0..new_dims.len()).find(|&k| new_dims[k] < space.dims()[k]) {
        return Err(invalid!(
            "factor {k} would shrink from {} to {}",
            space.dims()[k],
            new_dims[k]
        ));
    }
    let new_space = space.with_dims(new_dims)?;
    let mut digits = alloc::vec![0usize; space.num_factors()];
    let target: Vec<usize> = (0..space.dim())
        .map(|flat| {
            space.split_index(flat, &mut digits);
            new_space.join_index(&digits)
        })
        .collect();
    let n = new_space.dim();
    let mut out = Matrix::zeros(n, n);
    for (i, &ti) in target.iter().enumerate() {
        for (j, &tj) in target.iter().enumerate() {
            out[(ti, tj)] = m.entry(i, j);
        }
    }
    DenseHermitian::new(out)?.with_space(new_space)
}

/// Normalized state on `d ⊗ d` with Schmidt number at least `⌈(d − 1)/4⌉`.
///
/// For `d ≥ 4` this is the `(d1, d2) = (2, ⌊d/2⌋)` concrete family member,
/// regrouped into two factors and zero-padded by one level per side when `d`
/// is odd. For `d ∈ {2, 3}` the bound is 1 and the maximally mixed state is
/// returned.
#[derive(Clone, Debug)]
pub struct ScalingState {
    pub d: usize,
    /// Normalized family member behind the state, when `d ≥ 4`.
    pub family: Option<ZFamilyState>,
    /// Normalized state on `A ⊗ B` with `dim A = dim B = d`.
    pub state: DenseHermitian,
    /// `⌈(d − 1)/4⌉`.
    pub claimed_bound: usize,
}

pub fn scaling_state(d: usize) -> Result<ScalingState> {
    if d < 2 {
        return Err(invalid!("local dimension must be at least 2, got {d}"));
    }
    let claimed_bound = ceil_div(d - 1, 4);
    let target = TensorSpace::bipartite(d, d)?;
    if d < 4 {
        let n = d * d;
        let state = DenseHermitian::identity(n)
            .scale(1.0 / n as f64)
            .with_space(target)?;
        return Ok(ScalingState {
            d,
            family: None,
            state,
            claimed_bound,
        });
    }
    let d2 = d / 2;
    let family = concrete_family(2, d2)?.normalized()?;
    let even = family
        .bipartite()
        .without_space()
        .with_space(TensorSpace::bipartite(2 * d2, 2 * d2)?)?;
    let state = if d % 2 == 1 {
        let even_space = even.space().cloned().expect("attached above");
        embed_zero(&even, &even_space, &[d, d])?
    } else {
        even
    };
    Ok(ScalingState {
        d,
        family: Some(family),
        state,
        claimed_bound,
    })
}

/// `ρ ⊗ |+i⟩⟨+i| + ρ^{Γ_B} ⊗ |−i⟩⟨−i|` on `A ⊗ B ⊗ B′`.
#[derive(Clone, Debug)]
pub struct LiftedState {
    pub base: DenseHermitian,
    pub lifted: DenseHermitian,
    /// Factor positions `{B, B′}` under whose partial transpose `lifted` is
    /// invariant.
    pub pt_side: [usize; 2],
}

/// `|+i⟩⟨+i|`, with exactly representable entries.
fn plus_i_projector() -> Matrix {
    Matrix::from_row_major(
        2,
        2,
        alloc::vec![c(0.5, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.5, 0.0)],
    )
    .expect("2x2")
}

/// `|−i⟩⟨−i| = (|+i⟩⟨+i|)ᵀ`.
fn minus_i_projector() -> Matrix {
    plus_i_projector().transpose()
}

/// `|±i⟩ = (|0⟩ ± i|1⟩)/√2`.
pub fn plus_i() -> StateVector {
    StateVector::normalize(alloc::vec![c(1.0, 0.0), c(0.0, 1.0)]).expect("nonzero")
}

pub fn minus_i() -> StateVector {
    StateVector::normalize(alloc::vec![c(1.0, 0.0), c(0.0, -1.0)]).expect("nonzero")
}

/// Lifts a bipartite operator to one that is invariant under the partial
/// transpose on `BB′`. The base must carry a two-factor space `A ⊗ B`.
///
/// A PPT base gives a PSD lift; a non-PPT base is accepted and simply yields
/// a lift that is not PSD.
pub fn pt_invariant_lift(base: &DenseHermitian) -> Result<LiftedState> {
    let space = base.require_space("pt_invariant_lift")?;
    if space.num_factors() != 2 {
        return Err(invalid!(
            "PT-invariant lift needs a two-factor base, got {} factors",
            space.num_factors()
        ));
    }
    let gamma = partial_transpose(base, space, &[1])?;
    let lifted = &base.matrix().kron(&plus_i_projector()) + &gamma.matrix().kron(&minus_i_projector());
    let prime = format!("{}'", space.labels()[1]);
    let lifted_space = TensorSpace::new(
        &[space.dims()[0], space.dims()[1], 2],
        &[space.labels()[0].as_str(), space.labels()[1].as_str(), prime.as_str()],
    )?;
    Ok(LiftedState {
        base: base.clone(),
        lifted: DenseHermitian::new(lifted)?.with_space(lifted_space)?,
        pt_side: [1, 2],
    })
}

impl LiftedState {
    pub fn space(&self) -> &TensorSpace {
        self.lifted.space().expect("lift carries its space")
    }

    /// `‖lifted^{Γ_{BB′}} − lifted‖_max`.
    pub fn pt_invariance_residual(&self) -> f64 {
        let g = partial_transpose(&self.lifted, self.space(), &self.pt_side).expect("valid subset");
        g.max_abs_diff(&self.lifted)
    }

    /// `(1 ⊗ ⟨v|) lifted (1 ⊗ |v⟩)` for a vector `v` on `B′`.
    pub fn compress(&self, v: &StateVector) -> Result<DenseHermitian> {
        if v.dim() != 2 {
            return Err(invalid!("compression vector must live on C^2"));
        }
        let n = self.base.dim();
        let a = v.amplitudes();
        let m = Matrix::from_fn(n, n, |i, j| {
            let mut acc = ZERO;
            for s in 0..2 {
                for t in 0..2 {
                    acc += a[s].conj() * self.lifted.entry(2 * i + s, 2 * j + t) * a[t];
                }
            }
            acc
        });
        let out = DenseHermitian::from_hermitian_part(m)?;
        match self.base.space() {
            Some(s) => out.with_space(s.clone()),
            None => Ok(out),
        }
    }
}

/// PT-invariant PPT state on `d ⊗ d` with Schmidt number at least
/// `⌈(d − 2)/8⌉` (even `d`) or `⌈(d − 3)/8⌉` (odd `d`).
#[derive(Clone, Debug)]
pub struct PtInvariantFamily {
    pub d: usize,
    /// Normalized state on `(AA′) ⊗ (BB′)`, invariant under the partial
    /// transpose of the second factor.
    pub state: DenseHermitian,
    pub claimed_bound: usize,
}

/// For even `d`: lift the `d/2` scaling state, append `|0⟩⟨0|` on `A′` and
/// regroup as `AA′ : BB′`. For odd `d`: build at `d − 1` and zero-pad.
pub fn pt_invariant_family(d: usize) -> Result<PtInvariantFamily> {
    if d < 4 {
        return Err(invalid!("PT-invariant family needs d >= 4, got {d}"));
    }
    if d % 2 == 1 {
        let even = pt_invariant_family(d - 1)?;
        let space = even.state.space().cloned().expect("family carries its space");
        let state = embed_zero(&even.state, &space, &[d, d])?;
        return Ok(PtInvariantFamily {
            d,
            state,
            claimed_bound: ceil_div(d - 3, 8),
        });
    }
    let half = d / 2;
    let sigma = scaling_state(half)?.state;
    let lift = pt_invariant_lift(&sigma)?;
    let ket0 = DenseHermitian::diagonal(&[1.0, 0.0])?.with_space(TensorSpace::new(&[2], &["A'"])?)?;
    // Factors (A, B, B', A') -> (A, A', B, B').
    let with_ancilla = lift.lifted.kron(&ket0);
    let space = with_ancilla.require_space("pt_invariant_family")?.clone();
    let ordered = permute_factors(&with_ancilla, &space, &[0, 3, 1, 2])?;
    let state = ordered
        .without_space()
        .with_space(TensorSpace::new(&[d, d], &["AA'", "BB'"])?)?
        .normalized()?;
    Ok(PtInvariantFamily {
        d,
        state,
        claimed_bound: ceil_div(d - 2, 8),
    })
}
