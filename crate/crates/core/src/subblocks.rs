//! Block structure of operators on `d1 ⊗ d2`: principal sub-blocks,
//! PT-invariance, the resulting Schmidt-number bound, and randomized
//! falsification of absolute PPT.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::certificates::CertificateReport;
use crate::error::{invalid, Result};
use crate::scalar::{abs, cabs, real};
use crate::seeding::{complex_normal, sub_seed, trial_rng, TrialRng};
use crate::tensor::{eigenvalues, partial_transpose, psd_check, DenseHermitian, Matrix, TensorSpace};

/// Default Haar trials per falsification target.
pub const DEFAULT_TRIALS: usize = 64;

/// Violation threshold of the absolute-PPT falsifier.
pub const APPT_TOL: f64 = 1e-9;

/// `ρ = Σ_ij |i⟩⟨j| ⊗ X_ij` with `X_ij` of size `d2 × d2`.
///
/// Off-diagonal blocks are not Hermitian in general, so blocks are plain
/// matrices; Hermiticity of the source shows up as `X_ji = X_ij†`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDecomposition {
    d1: usize,
    d2: usize,
    blocks: Vec<Matrix>,
}

impl BlockDecomposition {
    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn block(&self, i: usize, j: usize) -> &Matrix {
        &self.blocks[i * self.d1 + j]
    }

    /// `Σ_ij |i⟩⟨j| ⊗ X_ij` on `d1 ⊗ d2`.
    pub fn reassemble(&self) -> DenseHermitian {
        let (d1, d2) = (self.d1, self.d2);
        let m = Matrix::from_fn(d1 * d2, d1 * d2, |r, c| {
            self.block(r / d2, c / d2)[(r % d2, c % d2)]
        });
        DenseHermitian::from_hermitian_part(m)
            .and_then(|h| h.with_space(TensorSpace::bipartite(d1, d2)?))
            .expect("blocks come from a Hermitian source")
    }

    /// `max_ij ‖X_ij − X_ji‖_max`, which is `‖ρ^{Γ_1} − ρ‖_max`.
    pub fn pt_invariance_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.d1 {
            for j in i + 1..self.d1 {
                worst = worst.max(self.block(i, j).max_abs_diff(self.block(j, i)));
            }
        }
        worst
    }

    fn max_abs(&self) -> f64 {
        self.blocks.iter().map(Matrix::max_abs).fold(0.0, f64::max)
    }
}

pub fn block_decompose(rho: &DenseHermitian, d1: usize, d2: usize) -> Result<BlockDecomposition> {
    if d1 == 0 || d2 == 0 || rho.dim() != d1 * d2 {
        return Err(invalid!(
            "operator of dimension {} does not split as {d1} ⊗ {d2}",
            rho.dim()
        ));
    }
    let m = rho.matrix();
    let blocks = (0..d1 * d1)
        .map(|b| {
            let (i, j) = (b / d1, b % d1);
            Matrix::from_fn(d2, d2, |r, c| m[(i * d2 + r, j * d2 + c)])
        })
        .collect();
    Ok(BlockDecomposition { d1, d2, blocks })
}

/// `Σ_st |s⟩⟨t| ⊗ X_{m_s m_t}` on `r ⊗ d2` for `indices = (m_1, …, m_r)`.
pub fn extract_principal_subblock(
    dec: &BlockDecomposition,
    indices: &[usize],
) -> Result<DenseHermitian> {
    if indices.is_empty() {
        return Err(invalid!("principal sub-block needs at least one index"));
    }
    for (s, &m) in indices.iter().enumerate() {
        if m >= dec.d1 {
            return Err(invalid!("index {m} out of range for d1 = {}", dec.d1));
        }
        if indices[..s].contains(&m) {
            return Err(invalid!("index {m} repeated"));
        }
    }
    let (r, d2) = (indices.len(), dec.d2);
    let m = Matrix::from_fn(r * d2, r * d2, |a, b| {
        dec.block(indices[a / d2], indices[b / d2])[(a % d2, b % d2)]
    });
    DenseHermitian::from_hermitian_part(m)?.with_space(TensorSpace::bipartite(r, d2)?)
}

/// `‖X_ij − X_ji‖_max ≤ tol` for all block pairs.
pub fn pt_invariance_check(dec: &BlockDecomposition, tol: f64) -> bool {
    dec.pt_invariance_deviation() <= tol
}

#[derive(Clone, Debug)]
pub struct PtInvBound {
    pub bound: usize,
    pub report: CertificateReport,
}

/// `SN(ρ) ≤ d1 − 1` for states invariant under the partial transpose of
/// the first factor.
///
/// Every `2 ⊗ d2` principal sub-block of such a state is PSD, PT-invariant
/// and PPT, hence separable by the cited result for PT-invariant `2 ⊗ N`
/// states; the premises are checked here and the conclusion is recorded as
/// certified by citation. `tol` is relative: deviations are compared
/// against `tol·(1 + ‖ρ‖_max)`.
pub fn ptinv_sn_bound(
    rho: &DenseHermitian,
    d1: usize,
    d2: usize,
    tol: f64,
    psd_rel: f64,
) -> Result<PtInvBound> {
    if d1 < 2 || d1 > d2 {
        return Err(invalid!("need 2 <= d1 <= d2, got d1 = {d1}, d2 = {d2}"));
    }
    let prov = "ptinv_sn_bound";
    let dec = block_decompose(rho, d1, d2)?;
    let scale = tol * (1.0 + dec.max_abs());
    let mut r = CertificateReport::new();
    let dev = dec.pt_invariance_deviation();
    if !r.claim("pt-invariant", dev <= scale, dev, scale, prov) {
        r.note("not-PT-invariant: only the trivial bound d1 applies");
        r.quantity("bound", d1 as f64);
        return Ok(PtInvBound { bound: d1, report: r });
    }
    let mut all = true;
    for k1 in 0..d1 {
        for k2 in k1 + 1..d1 {
            let sub = extract_principal_subblock(&dec, &[k1, k2])?;
            let v = psd_check(&sub, psd_rel)?;
            all &= r.claim(format!("pair-{k1}-{k2}-psd"), v.psd, v.min_eigenvalue, v.tolerance, prov);
            let sdev = block_decompose(&sub, 2, d2)?.pt_invariance_deviation();
            all &= r.claim(format!("pair-{k1}-{k2}-pt-invariant"), sdev <= scale, sdev, scale, prov);
            let space = sub.space().cloned().expect("sub-block carries its space");
            let g = psd_check(&partial_transpose(&sub, &space, &[1])?, psd_rel)?;
            all &= r.claim(format!("pair-{k1}-{k2}-ppt"), g.psd, g.min_eigenvalue, g.tolerance, prov);
        }
    }
    let bound = if all { d1 - 1 } else { d1 };
    if all {
        r.note("2 ⊗ d2 sub-blocks separable: certified by citation (PT-invariant 2 ⊗ N PPT states)");
    } else {
        r.note("a sub-block premise failed: only the trivial bound d1 applies");
    }
    r.quantity("bound", bound as f64);
    Ok(PtInvBound { bound, report: r })
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre
/// matrix, with the phases of `diag R` moved into `Q`.
pub fn haar_unitary_from<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    assert!(n >= 1, "dimension must be positive");
    let mut g = faer::Mat::<crate::Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = complex_normal(rng);
        }
    }
    let qr = g.qr();
    let q = qr.compute_Q();
    let rr = qr.R();
    let phases: Vec<_> = (0..n)
        .map(|k| {
            let d = rr[(k, k)];
            let a = cabs(d);
            if a == 0.0 {
                real(1.0)
            } else {
                d / a
            }
        })
        .collect();
    Matrix::from_fn(n, n, |i, j| q[(i, j)] * phases[j])
}

/// Haar-random unitary on `C^n` for a given seed.
pub fn haar_unitary(n: usize, seed: u64) -> Matrix {
    haar_unitary_from(&mut crate::seeding::rng_from_seed(seed), n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ApptStatus {
    Falsified,
    Undetermined,
}

/// Outcome of the randomized absolute-PPT falsifier.
///
/// `trials_run = 0` with a falsified status means `ρ` itself is not PPT and
/// the witness is the identity.
#[derive(Clone, Debug)]
pub struct ApptVerdict {
    pub status: ApptStatus,
    pub witness_unitary: Option<Matrix>,
    pub violating_min_eig: Option<f64>,
    pub trials_run: usize,
    pub seed: u64,
}

impl ApptVerdict {
    pub fn falsified(witness: Matrix, min_eig: f64, trials_run: usize, seed: u64) -> Self {
        Self {
            status: ApptStatus::Falsified,
            witness_unitary: Some(witness),
            violating_min_eig: Some(min_eig),
            trials_run,
            seed,
        }
    }

    pub fn undetermined(trials_run: usize, seed: u64) -> Self {
        Self {
            status: ApptStatus::Undetermined,
            witness_unitary: None,
            violating_min_eig: None,
            trials_run,
            seed,
        }
    }

    pub fn is_falsified(&self) -> bool {
        self.status == ApptStatus::Falsified
    }

    /// Recomputes `λ_min((UρU†)^Γ)` from the stored witness.
    pub fn replay(&self, rho: &DenseHermitian, d1: usize, d2: usize) -> Result<Option<f64>> {
        match &self.witness_unitary {
            Some(u) => Ok(Some(rotated_gamma_min(rho, u, d1, d2)?)),
            None => Ok(None),
        }
    }
}

/// `λ_min((UρU†)^{Γ_B})` on `d1 ⊗ d2`.
pub fn rotated_gamma_min(rho: &DenseHermitian, u: &Matrix, d1: usize, d2: usize) -> Result<f64> {
    let space = TensorSpace::bipartite(d1, d2)?;
    if rho.dim() != space.dim() || u.rows() != rho.dim() || u.cols() != rho.dim() {
        return Err(invalid!("shapes of rho and U do not match {d1} ⊗ {d2}"));
    }
    let rotated = DenseHermitian::from_hermitian_part(rho.matrix().conjugate_by(u)?)?;
    let g = partial_transpose(&rotated, &space, &[1])?;
    Ok(eigenvalues(&g)?[0])
}

/// Checks that `rho` is a state on `d1 ⊗ d2` and returns `λ_min(ρ^Γ)`.
pub fn appt_precheck(rho: &DenseHermitian, d1: usize, d2: usize) -> Result<f64> {
    if d1 == 0 || d2 == 0 || rho.dim() != d1 * d2 {
        return Err(invalid!("operator of dimension {} is not on {d1} ⊗ {d2}", rho.dim()));
    }
    let t = rho.trace();
    if !(abs(t - 1.0) <= 1e-9) {
        return Err(invalid!("expected a unit-trace state, trace is {t}"));
    }
    let v = psd_check(rho, crate::tensor::PSD_REL_TOL)?;
    if !v.psd {
        return Err(crate::Error::NotPositive {
            min_eigenvalue: v.min_eigenvalue,
        });
    }
    rotated_gamma_min(rho, &Matrix::identity(rho.dim()), d1, d2)
}

/// Trial `index`: its Haar unitary and the resulting `λ_min((UρU†)^Γ)`.
pub fn appt_trial(
    rho: &DenseHermitian,
    d1: usize,
    d2: usize,
    seed: u64,
    index: usize,
) -> Result<(Matrix, f64)> {
    let mut rng: TrialRng = trial_rng(seed, index as u64);
    let u = haar_unitary_from(&mut rng, d1 * d2);
    let min = rotated_gamma_min(rho, &u, d1, d2)?;
    Ok((u, min))
}

/// Searches for a unitary `U` with `UρU†` not PPT: first `ρ` itself, then
/// `trials` Haar samples in index order. Never certifies absolute PPT.
pub fn appt_falsifier(
    rho: &DenseHermitian,
    d1: usize,
    d2: usize,
    trials: usize,
    seed: u64,
) -> Result<ApptVerdict> {
    let pre = appt_precheck(rho, d1, d2)?;
    if pre < -APPT_TOL {
        return Ok(ApptVerdict::falsified(Matrix::identity(rho.dim()), pre, 0, seed));
    }
    for t in 0..trials {
        let (u, min) = appt_trial(rho, d1, d2, seed, t)?;
        if min < -APPT_TOL {
            return Ok(ApptVerdict::falsified(u, min, t + 1, seed));
        }
    }
    Ok(ApptVerdict::undetermined(trials, seed))
}

/// `U = Σ_st |k_s⟩⟨k_t| ⊗ V_st + Σ_{i ∉ {k1, k2}} |i⟩⟨i| ⊗ 1` on `d1 ⊗ d2`
/// for a unitary `V` on `2 ⊗ d2`.
pub fn embed_pair_unitary(v: &Matrix, d1: usize, d2: usize, k1: usize, k2: usize) -> Result<Matrix> {
    if v.rows() != 2 * d2 || v.cols() != 2 * d2 {
        return Err(invalid!("V must be {0}x{0}", 2 * d2));
    }
    if k1 >= d1 || k2 >= d1 || k1 == k2 {
        return Err(invalid!("need distinct indices below {d1}, got {k1}, {k2}"));
    }
    let ks = [k1, k2];
    let mut u = Matrix::zeros(d1 * d2, d1 * d2);
    for i in (0..d1).filter(|i| !ks.contains(i)) {
        for a in 0..d2 {
            u[(i * d2 + a, i * d2 + a)] = real(1.0);
        }
    }
    for (s, &ks_) in ks.iter().enumerate() {
        for (t, &kt) in ks.iter().enumerate() {
            for a in 0..d2 {
                for b in 0..d2 {
                    u[(ks_ * d2 + a, kt * d2 + b)] = v[(s * d2 + a, t * d2 + b)];
                }
            }
        }
    }
    Ok(u)
}

/// Result of scanning one pair `{k1, k2}`.
#[derive(Clone, Debug)]
pub struct PairScan {
    pub k1: usize,
    pub k2: usize,
    /// `None` when the sub-block vanishes and there is nothing to test.
    pub verdict: Option<ApptVerdict>,
    pub unitarity_deviation: f64,
    pub embedding_residual: f64,
}

/// Scans one pair: falsifier on the normalized `2 ⊗ d2` sub-block, plus a
/// check that embedding the witness (or the first Haar sample) into the full
/// space gives a unitary whose conjugation acts on the sub-block as `V`.
pub fn scan_pair(
    rho: &DenseHermitian,
    dec: &BlockDecomposition,
    k1: usize,
    k2: usize,
    trials: usize,
    seed: u64,
) -> Result<PairScan> {
    let (d1, d2) = (dec.d1, dec.d2);
    let sub = extract_principal_subblock(dec, &[k1, k2])?;
    let t = sub.trace();
    let verdict = if t > 0.0 {
        Some(appt_falsifier(&sub.scale(1.0 / t), 2, d2, trials, seed)?)
    } else {
        None
    };
    let v = match verdict.as_ref().and_then(|v| v.witness_unitary.clone()) {
        Some(w) => w,
        None => haar_unitary_from(&mut trial_rng(seed, 0), 2 * d2),
    };
    let u = embed_pair_unitary(&v, d1, d2, k1, k2)?;
    let rotated = rho.matrix().conjugate_by(&u)?;
    let rot_dec = block_decompose(&DenseHermitian::from_hermitian_part(rotated)?, d1, d2)?;
    let rot_sub = extract_principal_subblock(&rot_dec, &[k1, k2])?;
    let direct = sub.matrix().conjugate_by(&v)?;
    let embedding_residual = rot_sub.matrix().max_abs_diff(&direct) / (1.0 + sub.max_abs());
    Ok(PairScan {
        k1,
        k2,
        verdict,
        unitarity_deviation: u.unitarity_deviation(),
        embedding_residual,
    })
}

/// All pairs `{k1 < k2}` in lexicographic order; pair `p` uses sub-seed `p`.
pub fn scan_pairs(d1: usize) -> Vec<(usize, usize)> {
    (0..d1)
        .flat_map(|k1| (k1 + 1..d1).map(move |k2| (k1, k2)))
        .collect()
}

/// Collects pair scans into a report. If no pair is falsified the report
/// carries the heuristic bound `min(d1, d2) − 1`.
pub fn scan_report(d1: usize, d2: usize, scans: &[PairScan]) -> CertificateReport {
    let prov = "subblock_appt_scan";
    let mut r = CertificateReport::new();
    let dev = scans.iter().map(|s| s.unitarity_deviation).fold(0.0, f64::max);
    let res = scans.iter().map(|s| s.embedding_residual).fold(0.0, f64::max);
    r.claim("embedded-unitary", dev <= 1e-10, dev, 1e-10, prov);
    r.claim("embedding-acts-on-subblock", res <= 1e-12, res, 1e-12, prov);
    let mut falsified = 0usize;
    for s in scans {
        let key = format!("pair-{}-{}", s.k1, s.k2);
        match &s.verdict {
            Some(v) if v.is_falsified() => {
                falsified += 1;
                r.quantity(format!("{key}.falsified"), 1.0);
                r.quantity(format!("{key}.min-eig"), v.violating_min_eig.unwrap_or(0.0));
                r.quantity(format!("{key}.trials-run"), v.trials_run as f64);
            }
            Some(v) => {
                r.quantity(format!("{key}.falsified"), 0.0);
                r.quantity(format!("{key}.trials-run"), v.trials_run as f64);
            }
            None => {
                r.quantity(format!("{key}.falsified"), 0.0);
                r.quantity(format!("{key}.trials-run"), 0.0);
            }
        }
    }
    r.quantity("pairs-falsified", falsified as f64);
    if falsified == 0 {
        r.quantity("heuristic-sn-upper", (d1.min(d2) - 1) as f64);
        r.note("no pair falsified: SN <= min(d1, d2) - 1 holds if the state is APPT (heuristic, randomized)");
    } else {
        r.note("some sub-block is not APPT, so the state is not APPT");
    }
    r
}

/// Pairwise absolute-PPT scan with `trials_per_block` Haar samples per pair.
pub fn subblock_appt_scan(
    rho: &DenseHermitian,
    d1: usize,
    d2: usize,
    trials_per_block: usize,
    seed: u64,
) -> Result<CertificateReport> {
    if d1 < 2 || d1 > d2 {
        return Err(invalid!("need 2 <= d1 <= d2, got d1 = {d1}, d2 = {d2}"));
    }
    let dec = block_decompose(rho, d1, d2)?;
    let scans = scan_pairs(d1)
        .into_iter()
        .enumerate()
        .map(|(p, (k1, k2))| scan_pair(rho, &dec, k1, k2, trials_per_block, sub_seed(seed, p as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(scan_report(d1, d2, &scans))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::max_entangled;
    use crate::scalar::{c, ZERO};

    fn product(p: &DenseHermitian, q: &DenseHermitian) -> DenseHermitian {
        p.kron(q)
    }

    #[test]
    fn block_decomposition_of_product() {
        let p = DenseHermitian::new(Matrix::from_row_major(2, 2, alloc::vec![
            real(1.0), c(0.5, 0.25), c(0.5, -0.25), real(2.0)
        ]).unwrap()).unwrap();
        let q = DenseHermitian::diagonal(&[1.0, 3.0, 5.0]).unwrap();
        let dec = block_decompose(&product(&p, &q), 2, 3).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(dec.block(i, j), &q.matrix().map(|z| z * p.entry(i, j)));
            }
        }
        assert_eq!(dec.reassemble().matrix(), product(&p, &q).matrix());
        assert!(block_decompose(&p, 3, 3).is_err());
    }

    #[test]
    fn principal_subblocks() {
        let omega = max_entangled(3).projector;
        let dec = block_decompose(&omega, 3, 3).unwrap();
        let full = extract_principal_subblock(&dec, &[0, 1, 2]).unwrap();
        assert_eq!(full.matrix(), omega.matrix());
        let single = extract_principal_subblock(&dec, &[1]).unwrap();
        assert!(psd_check(&single, 1e-9).unwrap().psd);
        assert!(extract_principal_subblock(&dec, &[1, 1]).is_err());
        assert!(extract_principal_subblock(&dec, &[3]).is_err());
    }

    #[test]
    fn ptinv_bound_examples() {
        let mixed = DenseHermitian::identity(12).scale(1.0 / 12.0);
        let b = ptinv_sn_bound(&mixed, 3, 4, 1e-12, 1e-9).unwrap();
        assert_eq!(b.bound, 2);
        assert!(b.report.all_pass());
        let omega = max_entangled(3).projector;
        let b = ptinv_sn_bound(&omega, 3, 3, 1e-12, 1e-9).unwrap();
        assert_eq!(b.bound, 3);
        assert!(!b.report.get_claim("pt-invariant").unwrap().verdict);
    }

    #[test]
    fn haar_small_cases() {
        let u = haar_unitary(1, 3);
        assert!((cabs(u[(0, 0)]) - 1.0).abs() < 1e-14);
        let u = haar_unitary(6, 4);
        assert!(u.unitarity_deviation() < 1e-11);
    }

    #[test]
    fn falsifier_examples() {
        let omega = max_entangled(2).projector;
        let v = appt_falsifier(&omega, 2, 2, 8, 0).unwrap();
        assert!(v.is_falsified());
        assert_eq!(v.trials_run, 0);
        let mixed = DenseHermitian::identity(9).scale(1.0 / 9.0);
        let v = appt_falsifier(&mixed, 3, 3, 50, 1).unwrap();
        assert!(!v.is_falsified());
        assert!(appt_falsifier(&DenseHermitian::identity(4), 2, 2, 1, 0).is_err());
    }

    #[test]
    fn embedded_pair_unitary_is_unitary() {
        let v = haar_unitary(6, 9);
        let u = embed_pair_unitary(&v, 4, 3, 1, 3).unwrap();
        assert!(u.unitarity_deviation() < 1e-10);
        assert!(embed_pair_unitary(&v, 4, 3, 1, 1).is_err());
    }

    #[test]
    fn scan_of_product_pure_state_falsifies_a_pair() {
        let mut e = alloc::vec![ZERO; 9];
        e[0] = real(1.0);
        let rho = DenseHermitian::projector(&crate::tensor::StateVector::new(e).unwrap());
        let r = subblock_appt_scan(&rho, 3, 3, 32, 5).unwrap();
        assert!(r.all_pass());
        assert!(r.get_quantity("pairs-falsified").unwrap() >= 1.0);
        let mixed = DenseHermitian::identity(9).scale(1.0 / 9.0);
        let r = subblock_appt_scan(&mixed, 3, 3, 16, 5).unwrap();
        assert_eq!(r.get_quantity("pairs-falsified"), Some(0.0));
        assert_eq!(r.get_quantity("heuristic-sn-upper"), Some(2.0));
    }
}
