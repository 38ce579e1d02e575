use alloc::format;

use super::maps::{apply_map_to_factor, choi_map, LinearMapRep};
use super::report::CertificateReport;
use super::Tolerances;
use crate::constructions::{concrete_family, max_entangled, scaling_state, ZFamilyState, A2, Z_SIDE_A};
use crate::error::{invalid, Error, Result};
use crate::scalar::{abs, ceil_div, exact_sqrt, real, sqrt, ZERO};
use crate::tensor::{
    eig_hermitian, eigenvalues, partial_transpose, psd_check, schmidt_rank, DenseHermitian,
    StateVector, TensorSpace,
};

/// Records a PSD claim and returns `(verdict, λ_min)`.
fn psd_claim(
    report: &mut CertificateReport,
    name: &str,
    m: &DenseHermitian,
    rel_tol: f64,
    provenance: &str,
) -> Result<(bool, f64)> {
    let v = psd_check(m, rel_tol)?;
    report.claim(name, v.psd, v.min_eigenvalue, v.tolerance, provenance);
    Ok((v.psd, v.min_eigenvalue))
}

/// Positivity and PPT of `Z = X ⊗ (1 − Ω) + Y ⊗ Ω` decided from `X` and `Y`
/// alone.
///
/// With `Ω^Γ = F/d2` split into symmetric and antisymmetric parts,
/// `Z ⪰ 0` iff `X, Y ⪰ 0` and `Z^Γ ⪰ 0` iff `(d2 − 1)X^Γ + Y^Γ ⪰ 0` and
/// `(d2 + 1)X^Γ − Y^Γ ⪰ 0`. For `d2 = 1` the terms carrying `1 − Ω` and the
/// antisymmetric subspace vanish, so the `X` and antisymmetric claims are
/// still reported but do not enter the verdicts.
pub fn lemma1_verdict(
    x: &DenseHermitian,
    y: &DenseHermitian,
    d2: usize,
    tol: &Tolerances,
) -> Result<CertificateReport> {
    if d2 < 1 {
        return Err(invalid!("d2 must be at least 1"));
    }
    if x.dim() != y.dim() {
        return Err(invalid!("X and Y must have equal dimension"));
    }
    let d1 = exact_sqrt(x.dim()).ok_or_else(|| invalid!("X is not an operator on d1 ⊗ d1"))?;
    let space = TensorSpace::bipartite(d1, d1)?;
    let xg = partial_transpose(x, &space, &[1])?;
    let yg = partial_transpose(y, &space, &[1])?;
    let k = d2 as f64;
    let sym = xg.scale(k - 1.0).add_scaled(1.0, &yg)?;
    let anti = xg.scale(k + 1.0).add_scaled(-1.0, &yg)?;

    let mut r = CertificateReport::new();
    let prov = "lemma1_verdict";
    let (x_ok, x_min) = psd_claim(&mut r, "x-psd", x, tol.psd_rel, prov)?;
    let (y_ok, y_min) = psd_claim(&mut r, "y-psd", y, tol.psd_rel, prov)?;
    let (s_ok, s_min) = psd_claim(&mut r, "ppt-symmetric", &sym, tol.psd_rel, prov)?;
    let (a_ok, a_min) = psd_claim(&mut r, "ppt-antisymmetric", &anti, tol.psd_rel, prov)?;
    let trivial = d2 == 1;
    let positive = y_ok && (trivial || x_ok);
    let ppt = s_ok && (trivial || a_ok);
    let pos_ev = if trivial { y_min } else { x_min.min(y_min) };
    let ppt_ev = if trivial { s_min } else { s_min.min(a_min) };
    r.claim("positive", positive, pos_ev, tol.psd_rel, prov);
    r.claim("ppt", ppt, ppt_ev, tol.psd_rel, prov);
    if trivial {
        r.note("d2 = 1: 1 − Ω vanishes, X and the antisymmetric condition do not constrain Z");
    }
    Ok(r)
}

/// Minimum eigenvalue of a map applied to one factor, with the violation
/// threshold `detector_rel · max(1, ‖result‖_max)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorOutcome {
    pub min_eigenvalue: f64,
    pub scale: f64,
    pub threshold: f64,
    pub violated: bool,
}

pub fn detector_on_operator(
    m: &DenseHermitian,
    space: &TensorSpace,
    factor: usize,
    map: &LinearMapRep,
    tol: &Tolerances,
) -> Result<DetectorOutcome> {
    let out = apply_map_to_factor(map, m, space, factor)?;
    let min_eigenvalue = eigenvalues(&out)?.first().copied().unwrap_or(0.0);
    let scale = out.max_abs();
    let threshold = tol.detector_rel * scale.max(1.0);
    Ok(DetectorOutcome {
        min_eigenvalue,
        scale,
        threshold,
        violated: min_eigenvalue < -threshold,
    })
}

/// `(id ⊗ id ⊗ L ⊗ id)(Z)` evaluated on factor `A2`.
pub fn detector(z: &ZFamilyState, map: &LinearMapRep, tol: &Tolerances) -> Result<DetectorOutcome> {
    if map.d_in() != z.d2() {
        return Err(invalid!(
            "map acts on dimension {} but A2 has dimension {}",
            map.d_in(),
            z.d2()
        ));
    }
    detector_on_operator(z.z(), z.space(), A2, map, tol)
}

/// Minimum eigenvalue of `(id ⊗ id ⊗ L ⊗ id)(Z)`.
pub fn detector_violation(z: &ZFamilyState, map: &LinearMapRep) -> Result<f64> {
    Ok(detector(z, map, &Tolerances::default())?.min_eigenvalue)
}

#[derive(Clone, Debug)]
pub struct SnLower {
    pub bound: usize,
    pub report: CertificateReport,
}

/// Schmidt-number lower bound `⌈d2/d1⌉` for a family member.
///
/// The map `id_{d1} ⊗ P` with `P` the Choi map on `d2` is
/// `⌊(d2 − 1)/d1⌋`-positive; a negative detector value on a PSD, PPT `Z`
/// satisfying `⟨Ω|X|Ω⟩ = 0 < ⟨Ω|Y|Ω⟩` therefore certifies
/// `SN ≥ ⌊(d2 − 1)/d1⌋ + 1`. Any failed premise falls back to bound 1.
pub fn sn_lower_certificate(z: &ZFamilyState, tol: &Tolerances) -> Result<SnLower> {
    let prov = "sn_lower_certificate";
    let (d1, d2) = (z.d1(), z.d2());
    let mut r = CertificateReport::new();
    let omega = max_entangled(d1).vector;
    let xo = z.x().expectation(omega.amplitudes());
    let yo = z.y().expectation(omega.amplitudes());
    let hx = r.claim("hypothesis-x-annihilates-omega", abs(xo) <= tol.hypothesis, xo, tol.hypothesis, prov);
    let hy = r.claim("hypothesis-y-positive-on-omega", yo >= tol.hypothesis, yo, tol.hypothesis, prov);
    let l1 = lemma1_verdict(z.x(), z.y(), d2, tol)?;
    let positive = l1.get_claim("positive").is_some_and(|c| c.verdict);
    let ppt = l1.get_claim("ppt").is_some_and(|c| c.verdict);
    r.absorb("lemma1", l1);
    let detected = if d2 >= 2 {
        let out = detector(z, &choi_map(d2)?, tol)?;
        r.claim("detector", out.violated, out.min_eigenvalue, out.threshold, prov)
    } else {
        r.note("d2 = 1: no Choi map exists, detector skipped");
        r.claim("detector", false, 0.0, tol.detector_rel, prov)
    };
    let ok = hx && hy && positive && ppt && detected;
    if !(hx && hy) {
        r.note("hypothesis-not-verified: bound falls back to 1");
    } else if !ok {
        r.note("premise failed: bound falls back to 1");
    }
    let bound = if ok { ceil_div(d2, d1) } else { 1 };
    r.quantity("positivity-degree", ((d2.max(1) - 1) / d1) as f64);
    r.quantity("bound", bound as f64);
    Ok(SnLower { bound, report: r })
}

/// Largest Schmidt rank among eigenvectors with eigenvalue above
/// `eig · λ_max`. The eigendecomposition is one admissible pure-state
/// decomposition, so this bounds the Schmidt number from above.
///
/// Fails with [`Error::NotPositive`] if `rho` is not PSD.
pub fn sn_upper_via_eigenbasis(
    rho: &DenseHermitian,
    space: &TensorSpace,
    side_a: &[usize],
    tol: &Tolerances,
) -> Result<usize> {
    if space.dim() != rho.dim() {
        return Err(invalid!("space does not match the operator"));
    }
    space.check_subset(side_a)?;
    if side_a.is_empty() || side_a.len() == space.num_factors() {
        return Err(invalid!("side A must be a nonempty proper subset"));
    }
    let spectrum = eig_hermitian(rho)?;
    let verdict = crate::tensor::psd_verdict_from_values(spectrum.eigenvalues(), tol.psd_rel);
    if !verdict.psd {
        return Err(Error::NotPositive {
            min_eigenvalue: verdict.min_eigenvalue,
        });
    }
    let cutoff = tol.eig * verdict.max_eigenvalue;
    let mut best = 1;
    for (i, &lambda) in spectrum.eigenvalues().iter().enumerate() {
        if lambda > cutoff {
            let v = spectrum.eigenvector(i);
            best = best.max(schmidt_rank(&v, space, side_a, tol.sv)?);
        }
    }
    Ok(best)
}

#[derive(Clone, Debug)]
pub struct SnDifference {
    pub lower_on_z: usize,
    pub upper_on_z_gamma: usize,
    /// `lower_on_z − upper_on_z_gamma`, possibly negative.
    pub difference: i64,
    /// `max(difference, 0)`, the statement actually certified.
    pub clamped: usize,
    pub report: CertificateReport,
}

/// Lower bound on `SN(Z) − SN(Z^Γ)` for the concrete family member.
pub fn sn_difference_report(d1: usize, d2: usize, tol: &Tolerances) -> Result<SnDifference> {
    let prov = "sn_difference_report";
    let z = concrete_family(d1, d2)?;
    let lower = sn_lower_certificate(&z, tol)?;
    let mut r = CertificateReport::new();
    r.absorb("lower", lower.report);
    let zg = z.partial_transpose_b();
    let (psd, _) = psd_claim(&mut r, "z-gamma-psd", &zg, tol.psd_rel, prov)?;
    if !psd {
        return Err(invalid!("Z^Γ is not PSD; the eigenbasis bound does not apply"));
    }
    let upper = sn_upper_via_eigenbasis(&zg, z.space(), &Z_SIDE_A, tol)?;
    r.claim("upper-at-most-4", upper <= 4, upper as f64, 4.0, prov);
    let difference = lower.bound as i64 - upper as i64;
    let clamped = difference.max(0) as usize;
    r.quantity("lower", lower.bound as f64);
    r.quantity("upper", upper as f64);
    r.quantity("difference", difference as f64);
    r.quantity("difference-clamped", clamped as f64);
    if difference <= 0 {
        r.note(format!(
            "difference bound {difference} is trivial; only SN(Z) - SN(Z^Γ) >= 0 is certified"
        ));
    }
    Ok(SnDifference {
        lower_on_z: lower.bound,
        upper_on_z_gamma: upper,
        difference,
        clamped,
        report: r,
    })
}

/// Certifies that `id_k ⊗ L` is not decomposable.
///
/// For `k < d_in` a PPT family member `Z` with `(d1, d2) = (k, d_in)` is
/// detected by `id_k ⊗ L`; decomposable maps never detect PPT states. For
/// `k ≥ d_in` the map `id_k ⊗ L` is not even positive (it contains the Choi
/// matrix of `L`), and decomposable maps are positive.
pub fn nondecomposability_witness(
    map: &LinearMapRep,
    k: usize,
    tol: &Tolerances,
) -> Result<CertificateReport> {
    if k < 2 {
        return Err(invalid!("k must be at least 2, got {k}"));
    }
    let prov = "nondecomposability_witness";
    let mut r = CertificateReport::new();
    let cp = map.complete_positivity(tol.psd_rel)?;
    r.claim("map-not-cp", !cp.psd, cp.min_eigenvalue, cp.tolerance, prov);
    if cp.psd {
        r.note("L-is-CP: completely positive maps are decomposable, nothing to certify");
        r.claim("non-decomposable", false, cp.min_eigenvalue, cp.tolerance, prov);
        return Ok(r);
    }
    let d = map.d_in();
    if k < d {
        let z = concrete_family(k, d)?;
        let l1 = lemma1_verdict(z.x(), z.y(), d, tol)?;
        let ppt = l1.get_claim("ppt").is_some_and(|c| c.verdict)
            && l1.get_claim("positive").is_some_and(|c| c.verdict);
        r.absorb("witness-state", l1);
        let out = detector(&z, map, tol)?;
        r.claim("detects-ppt-state", out.violated, out.min_eigenvalue, out.threshold, prov);
        r.claim(
            "non-decomposable",
            ppt && out.violated,
            out.min_eigenvalue,
            out.threshold,
            prov,
        );
    } else {
        let space = TensorSpace::bipartite(k, d)?;
        let amp = real(1.0 / sqrt(d as f64));
        let mut psi = alloc::vec![ZERO; k * d];
        for i in 0..d {
            psi[i * d + i] = amp;
        }
        let p = DenseHermitian::projector(&StateVector::unnormalized(psi));
        let out = detector_on_operator(&p, &space, 1, map, tol)?;
        r.claim("not-positive", out.violated, out.min_eigenvalue, out.threshold, prov);
        r.claim(
            "non-decomposable",
            out.violated,
            out.min_eigenvalue,
            out.threshold,
            prov,
        );
    }
    Ok(r)
}

#[derive(Clone, Debug)]
pub struct ScalingCertificate {
    pub d: usize,
    pub bound: usize,
    pub claimed: usize,
    pub report: CertificateReport,
}

/// Certifies `SN ≥ ⌈(d − 1)/4⌉` for [`scaling_state`]`(d)`.
pub fn scaling_certificate(d: usize, tol: &Tolerances) -> Result<ScalingCertificate> {
    let prov = "scaling_certificate";
    let s = scaling_state(d)?;
    let mut r = CertificateReport::new();
    psd_claim(&mut r, "state-psd", &s.state, tol.psd_rel, prov)?;
    let space = s.state.space().cloned().expect("scaling state carries its space");
    let gamma = partial_transpose(&s.state, &space, &[1])?;
    psd_claim(&mut r, "state-ppt", &gamma, tol.psd_rel, prov)?;
    let bound = match &s.family {
        Some(family) => {
            let lower = sn_lower_certificate(family, tol)?;
            r.absorb("family", lower.report);
            lower.bound
        }
        None => {
            r.note("d < 4: the claimed bound is 1 and holds for every state");
            1
        }
    };
    r.claim(
        "meets-claimed-bound",
        bound >= s.claimed_bound,
        bound as f64,
        s.claimed_bound as f64,
        prov,
    );
    r.quantity("bound", bound as f64);
    r.quantity("claimed", s.claimed_bound as f64);
    Ok(ScalingCertificate {
        d,
        bound,
        claimed: s.claimed_bound,
        report: r,
    })
}
