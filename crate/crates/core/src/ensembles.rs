//! Random-state experiments: traceless GUE samples, the noisy maximally
//! mixed state `ρ = (1/d²)(1 + αG/d)`, its PPT frequency and witness value,
//! and a heuristic estimate of `sup { tr(σG) : SN(σ) ≤ k }`.
//!
//! Trial `i` of a run with master seed `s` draws from
//! [`sub_seed`]`(s, i)`, so results do not depend on scheduling.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::scalar::{abs, cabs2, sqrt, ZERO};
use crate::seeding::{complex_normal, rng_from_seed, sub_seed, trial_rng};
use crate::tensor::{
    eig_hermitian, eigenvalues, inner, norm, partial_transpose, psd_check, DenseHermitian, Matrix,
    StateVector, TensorSpace,
};

/// A GUE matrix with the seed it was drawn from.
#[derive(Clone, Debug)]
pub struct GueSample {
    pub n: usize,
    pub matrix: DenseHermitian,
    pub traceless: bool,
    pub seed: u64,
}

/// `G′ = (G̃ + G̃†)/√2` for a matrix `G̃` of independent standard complex
/// Gaussians, optionally projected to `G = G′ − tr(G′)·1/n`.
pub fn sample_gue(n: usize, traceless: bool, seed: u64) -> Result<GueSample> {
    if n == 0 {
        return Err(invalid!("GUE dimension must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    let raw: Vec<Complex64> = (0..n * n).map(|_| complex_normal(&mut rng)).collect();
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let z = (raw[i * n + j] + raw[j * n + i].conj()) * s;
            if i == j {
                m[(i, i)] = Complex64::new(z.re, 0.0);
            } else {
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
    }
    if traceless {
        let shift = m.trace().re / n as f64;
        for i in 0..n {
            m[(i, i)].re -= shift;
        }
    }
    Ok(GueSample {
        n,
        matrix: DenseHermitian::new(m)?,
        traceless,
        seed,
    })
}

/// `ρ` together with the traceless GUE sample it was built from.
#[derive(Clone, Debug)]
pub struct RandomState {
    pub rho: DenseHermitian,
    pub g: GueSample,
}

/// `ρ = (1/d²)(1 + αG/d)` on `d ⊗ d` with `G` traceless GUE on `n = d²`.
pub fn random_state(d: usize, alpha: f64, seed: u64) -> Result<RandomState> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(invalid!("alpha must lie in (0, 1/2), got {alpha}"));
    }
    if d == 0 {
        return Err(invalid!("local dimension must be positive"));
    }
    let n = d * d;
    let g = sample_gue(n, true, seed)?;
    let rho = noisy_state(&g.matrix, d, alpha)?;
    Ok(RandomState { rho, g })
}

fn noisy_state(g: &DenseHermitian, d: usize, alpha: f64) -> Result<DenseHermitian> {
    let n = d * d;
    let inv = 1.0 / n as f64;
    DenseHermitian::identity(n)
        .scale(inv)
        .add_scaled(alpha / (d as f64 * n as f64), &g.clone().without_space())?
        .with_space(TensorSpace::bipartite(d, d)?)
}

/// `tr(ρ(1 − 2G/(αd)))`.
pub fn witness_value(rho: &DenseHermitian, g: &DenseHermitian, alpha: f64, d: usize) -> Result<f64> {
    if alpha == 0.0 || d == 0 {
        return Err(invalid!("alpha and d must be nonzero"));
    }
    if rho.dim() != g.dim() || rho.dim() != d * d {
        return Err(invalid!("rho and G must both act on {d} ⊗ {d}"));
    }
    Ok(rho.trace() - 2.0 / (alpha * d as f64) * rho.trace_product(g))
}

/// One trial of the random-state experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialOutcome {
    pub index: usize,
    pub min_eig: f64,
    pub min_eig_gamma: f64,
    pub psd: bool,
    pub ppt: bool,
    pub witness: f64,
}

/// Trial `index` of the experiment with master seed `seed`.
pub fn ensemble_trial(d: usize, alpha: f64, seed: u64, index: usize, psd_rel: f64) -> Result<TrialOutcome> {
    let s = random_state(d, alpha, sub_seed(seed, index as u64))?;
    let space = TensorSpace::bipartite(d, d)?;
    let v = psd_check(&s.rho, psd_rel)?;
    let g = psd_check(&partial_transpose(&s.rho, &space, &[1])?, psd_rel)?;
    Ok(TrialOutcome {
        index,
        min_eig: v.min_eigenvalue,
        min_eig_gamma: g.min_eigenvalue,
        psd: v.psd,
        ppt: v.psd && g.psd,
        witness: witness_value(&s.rho, &s.g.matrix, alpha, d)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Summary {
    pub mean: f64,
    pub stddev: f64,
}

/// Mean and sample standard deviation, summed in the given order.
pub fn summarize(values: &[f64]) -> Summary {
    let n = values.len();
    if n == 0 {
        return Summary {
            mean: f64::NAN,
            stddev: f64::NAN,
        };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let stddev = if n > 1 {
        sqrt(values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64)
    } else {
        0.0
    };
    Summary { mean, stddev }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnsembleReport {
    pub d: usize,
    pub alpha: f64,
    pub trials: usize,
    pub seed: u64,
    pub psd_count: usize,
    pub ppt_count: usize,
    pub witness_values: Vec<f64>,
    pub outcomes: Vec<TrialOutcome>,
    pub witness: Summary,
    pub min_eig: Summary,
    pub min_eig_gamma: Summary,
}

impl EnsembleReport {
    /// Aggregates outcomes; they must be ordered by trial index `0..len`.
    pub fn from_outcomes(d: usize, alpha: f64, seed: u64, outcomes: Vec<TrialOutcome>) -> Result<Self> {
        if outcomes.iter().enumerate().any(|(i, o)| o.index != i) {
            return Err(invalid!("outcomes must be ordered by trial index"));
        }
        let witness_values: Vec<f64> = outcomes.iter().map(|o| o.witness).collect();
        let mins: Vec<f64> = outcomes.iter().map(|o| o.min_eig).collect();
        let gmins: Vec<f64> = outcomes.iter().map(|o| o.min_eig_gamma).collect();
        Ok(Self {
            d,
            alpha,
            trials: outcomes.len(),
            seed,
            psd_count: outcomes.iter().filter(|o| o.psd).count(),
            ppt_count: outcomes.iter().filter(|o| o.ppt).count(),
            witness: summarize(&witness_values),
            min_eig: summarize(&mins),
            min_eig_gamma: summarize(&gmins),
            witness_values,
            outcomes,
        })
    }

    pub fn ppt_frequency(&self) -> f64 {
        self.ppt_count as f64 / self.trials as f64
    }
}

/// Runs `trials` trials in order; see [`ensemble_trial`].
pub fn ppt_frequency(d: usize, alpha: f64, trials: usize, seed: u64, psd_rel: f64) -> Result<EnsembleReport> {
    let outcomes = (0..trials)
        .map(|i| ensemble_trial(d, alpha, seed, i, psd_rel))
        .collect::<Result<Vec<_>>>()?;
    EnsembleReport::from_outcomes(d, alpha, seed, outcomes)
}

/// Per-draw GUE statistics: `tr(G²)/(n² − 1)` and `λ_min/√n`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GueDraw {
    pub trace_sq_ratio: f64,
    pub lambda_min_scaled: f64,
}

/// Draw `index` of a traceless GUE run on `n ≥ 2`.
pub fn gue_draw(n: usize, seed: u64, index: usize) -> Result<GueDraw> {
    if n < 2 {
        return Err(invalid!("GUE statistics need n >= 2"));
    }
    let g = sample_gue(n, true, sub_seed(seed, index as u64))?;
    let tr_sq: f64 = g.matrix.matrix().as_slice().iter().map(|&z| cabs2(z)).sum();
    let lmin = eigenvalues(&g.matrix)?[0];
    Ok(GueDraw {
        trace_sq_ratio: tr_sq / ((n * n - 1) as f64),
        lambda_min_scaled: lmin / sqrt(n as f64),
    })
}

pub fn gue_statistics(n: usize, draws: usize, seed: u64) -> Result<Vec<GueDraw>> {
    (0..draws).map(|i| gue_draw(n, seed, i)).collect()
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut worst: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = if a[i].total_cmp(&b[j]).is_le() { a[i] } else { b[j] };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        worst = worst.max(abs(i as f64 / na - j as f64 / nb));
    }
    worst
}

/// Pooled spectra of `G` and `G^Γ` over `samples` traceless GUE draws on
/// `d ⊗ d`, returned as `(spectra of G, spectra of G^Γ)`.
pub fn gamma_spectra(d: usize, samples: usize, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let space = TensorSpace::bipartite(d, d)?;
    let mut plain = Vec::new();
    let mut gamma = Vec::new();
    for s in 0..samples {
        let g = sample_gue(d * d, true, sub_seed(seed, s as u64))?.matrix;
        plain.extend(eigenvalues(&g)?);
        gamma.extend(eigenvalues(&partial_transpose(&g, &space, &[1])?)?);
    }
    Ok((plain, gamma))
}

/// Heuristic lower estimate of `sup ⟨ψ|G|ψ⟩` over unit `ψ` of Schmidt rank
/// at most `k`.
#[derive(Clone, Debug)]
pub struct AscentEstimate {
    pub k: usize,
    pub value: f64,
    pub vector: StateVector,
    /// Always true: the value is a lower estimate, never a certificate.
    pub heuristic: bool,
}

struct Ascent<'a> {
    g: &'a Matrix,
    d: usize,
    shift: f64,
    iters: usize,
}

/// Top `k` Schmidt components of `psi` as `(truncated, Q_A, Q_B)` where the
/// columns of `Q_A`, `Q_B` span the leading left and right Schmidt vectors.
fn truncate(psi: &[Complex64], d: usize, k: usize) -> Result<(Vec<Complex64>, Matrix, Matrix)> {
    let m = faer::Mat::from_fn(d, d, |i, j| psi[i * d + j]);
    let svd = m.svd().map_err(|_| Error::NoConvergence("singular value decomposition"))?;
    let s = svd.S().column_vector();
    let (u, v) = (svd.U(), svd.V());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| s[b].re.total_cmp(&s[a].re));
    let keep = &order[..k];
    let qa = Matrix::from_fn(d, k, |i, c| u[(i, keep[c])]);
    let qb = Matrix::from_fn(d, k, |j, c| v[(j, keep[c])].conj());
    let mut out = alloc::vec![ZERO; d * d];
    for (c, &t) in keep.iter().enumerate() {
        let sigma = s[t].re;
        for i in 0..d {
            let a = qa[(i, c)] * sigma;
            for j in 0..d {
                out[i * d + j] += a * qb[(j, c)];
            }
        }
    }
    Ok((out, qa, qb))
}

fn normalized(v: &mut [Complex64]) -> bool {
    let n = norm(v);
    if !(n > 0.0) || !n.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|z| *z /= n);
    true
}

impl Ascent<'_> {
    fn value(&self, psi: &[Complex64]) -> f64 {
        inner(psi, &self.g.apply(psi)).re
    }

    /// Exact optimum over `ψ = W w` for an isometry `W`.
    fn restricted_top(&self, w: &Matrix) -> Result<(f64, Vec<Complex64>)> {
        let h = w.adjoint().matmul(&self.g.matmul(w)?)?;
        let spec = eig_hermitian(&DenseHermitian::from_hermitian_part(h)?)?;
        let top = spec.len() - 1;
        let coeffs = spec.eigenvector(top).into_amplitudes();
        let mut psi = w.apply(&coeffs);
        normalized(&mut psi);
        Ok((spec.eigenvalues()[top], psi))
    }

    /// Alternately re-optimizes over `C^d ⊗ span(Q_B)` and
    /// `span(Q_A) ⊗ C^d`; each step keeps the current vector feasible, so the
    /// value never decreases.
    fn polish(&self, psi: Vec<Complex64>, k: usize) -> Result<(f64, Vec<Complex64>)> {
        let d = self.d;
        let mut best = (self.value(&psi), psi);
        for round in 0..64 {
            let (_, qa, qb) = truncate(&best.1, d, k)?;
            let w = if round % 2 == 0 {
                Matrix::identity(d).kron(&qb)
            } else {
                qa.kron(&Matrix::identity(d))
            };
            // The optimum already has Schmidt rank <= k; truncating only
            // strips rounding noise.
            let (_, cand) = self.restricted_top(&w)?;
            let (mut cand, _, _) = truncate(&cand, d, k)?;
            if !normalized(&mut cand) {
                break;
            }
            let val = self.value(&cand);
            let gain = val - best.0;
            if gain > 0.0 {
                best = (val, cand);
            }
            if gain < 1e-12 && round >= 1 {
                break;
            }
        }
        Ok(best)
    }

    /// Power ascent `ψ ← P_k((G + s)ψ)` from `start`, then [`Self::polish`].
    fn run(&self, start: Vec<Complex64>, k: usize) -> Result<(f64, Vec<Complex64>)> {
        let mut psi = start;
        let mut best = (self.value(&psi), psi.clone());
        let mut prev = best.0;
        for _ in 0..self.iters {
            let mut next = self.g.apply(&psi);
            for (n, p) in next.iter_mut().zip(&psi) {
                *n += p * self.shift;
            }
            let (mut t, _, _) = truncate(&next, self.d, k)?;
            if !normalized(&mut t) {
                break;
            }
            psi = t;
            let val = self.value(&psi);
            if val > best.0 {
                best = (val, psi.clone());
            }
            if abs(val - prev) < 1e-9 {
                break;
            }
            prev = val;
        }
        let polished = self.polish(best.1.clone(), k)?;
        Ok(if polished.0 > best.0 { polished } else { best })
    }
}

fn local_dim(g: &DenseHermitian) -> Result<usize> {
    crate::scalar::exact_sqrt(g.dim()).ok_or_else(|| invalid!("G must act on d ⊗ d, got dimension {}", g.dim()))
}

fn random_start<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize) -> Result<Vec<Complex64>> {
    let raw: Vec<Complex64> = (0..d * d).map(|_| complex_normal(rng)).collect();
    let (mut t, _, _) = truncate(&raw, d, k)?;
    normalized(&mut t);
    Ok(t)
}

/// Estimates for `k = 1, …, k_max`. Each level is warm-started from the
/// previous optimum (feasible, since rank `k − 1 ≤ k`), so the estimates are
/// non-decreasing in `k`. Restart `r` at level `k` uses stream
/// `(sub_seed(seed, k), r)`.
pub fn sup_sn_ladder(
    g: &DenseHermitian,
    k_max: usize,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> Result<Vec<AscentEstimate>> {
    let d = local_dim(g)?;
    if k_max == 0 || k_max > d {
        return Err(invalid!("k must lie in 1..={d}, got {k_max}"));
    }
    let shift = abs(eigenvalues(g)?[0]) + 1.0;
    let ascent = Ascent {
        g: g.matrix(),
        d,
        shift,
        iters,
    };
    let space = TensorSpace::bipartite(d, d)?;
    let mut out: Vec<AscentEstimate> = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut best: Option<(f64, Vec<Complex64>)> = out
            .last()
            .map(|prev| ascent.run(prev.vector.amplitudes().to_vec(), k))
            .transpose()?;
        if let (Some(prev), Some(b)) = (out.last(), best.as_mut()) {
            if b.0 < prev.value {
                *b = (prev.value, prev.vector.amplitudes().to_vec());
            }
        }
        let level_seed = sub_seed(seed, k as u64);
        for r in 0..restarts.max(1) {
            let start = random_start(&mut trial_rng(level_seed, r as u64), d, k)?;
            let cand = ascent.run(start, k)?;
            if best.as_ref().is_none_or(|b| cand.0 > b.0) {
                best = Some(cand);
            }
        }
        let (value, vector) = best.expect("at least one restart");
        out.push(AscentEstimate {
            k,
            value,
            vector: StateVector::unnormalized(vector).with_space(space.clone())?,
            heuristic: true,
        });
    }
    Ok(out)
}

/// Heuristic lower estimate of `sup { tr(σG) : SN(σ) ≤ k }` by multi-restart
/// projected power ascent with alternating subspace refinement.
pub fn sup_sn_k_ascent(
    g: &DenseHermitian,
    k: usize,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> Result<AscentEstimate> {
    let d = local_dim(g)?;
    if k == 0 || k > d {
        return Err(invalid!("k must lie in 1..={d}, got {k}"));
    }
    Ok(sup_sn_ladder(g, k, restarts, iters, seed)?.pop().expect("k >= 1"))
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeanWidth {
    pub estimate: f64,
    pub stderr: f64,
    pub heuristic: bool,
}

/// Sample `index` of the mean-width estimator: `sup_k(G)/n` for a fresh
/// traceless GUE `G` on `n = d²`.
pub fn mean_width_sample(
    k: usize,
    d: usize,
    restarts: usize,
    iters: usize,
    seed: u64,
    index: usize,
) -> Result<f64> {
    let s = sub_seed(seed, index as u64);
    let n = d * d;
    let g = sample_gue(n, true, sub_seed(s, 0))?;
    let est = sup_sn_k_ascent(&g.matrix, k, restarts, iters, sub_seed(s, 1))?;
    Ok(est.value / n as f64)
}

pub fn mean_width_from_samples(values: &[f64]) -> MeanWidth {
    let s = summarize(values);
    MeanWidth {
        estimate: s.mean,
        stderr: s.stddev / sqrt(values.len() as f64),
        heuristic: true,
    }
}

/// Monte Carlo mean of [`mean_width_sample`] over `samples` draws.
pub fn mean_width_estimate(
    k: usize,
    d: usize,
    samples: usize,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> Result<MeanWidth> {
    if k == 0 || k > d {
        return Err(invalid!("k must lie in 1..={d}, got {k}"));
    }
    if samples == 0 {
        return Err(invalid!("need at least one sample"));
    }
    let values = (0..samples)
        .map(|i| mean_width_sample(k, d, restarts, iters, seed, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(mean_width_from_samples(&values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::max_entangled;

    #[test]
    fn gue_is_hermitian_and_traceless() {
        let g = sample_gue(20, true, 3).unwrap();
        assert!(abs(g.matrix.trace()) <= 1e-10 * 20.0);
        assert_eq!(g.matrix.matrix().hermitian_deviation(), 0.0);
        let again = sample_gue(20, true, 3).unwrap();
        assert_eq!(g.matrix, again.matrix);
        assert!(sample_gue(0, true, 0).is_err());
    }

    #[test]
    fn random_state_trace_and_range() {
        let s = random_state(4, 0.25, 11).unwrap();
        assert!(abs(s.rho.trace() - 1.0) < 1e-12);
        assert!(random_state(4, 0.5, 0).is_err());
        assert!(random_state(4, 0.0, 0).is_err());
        let tiny = random_state(3, 1e-12, 0).unwrap();
        assert!(tiny.rho.max_abs_diff(&DenseHermitian::identity(9).scale(1.0 / 9.0)) < 1e-12);
    }

    #[test]
    fn witness_examples() {
        let d = 3;
        let sigma = DenseHermitian::identity(9).scale(1.0 / 9.0);
        let zero = DenseHermitian::zeros(9);
        assert!(abs(witness_value(&sigma, &zero, 0.2, d).unwrap() - 1.0) < 1e-15);
        let g = sample_gue(9, true, 5).unwrap();
        assert!(abs(witness_value(&sigma, &g.matrix, 0.2, d).unwrap() - 1.0) < 1e-12);
        assert!(witness_value(&sigma, &g.matrix, 0.0, d).is_err());
    }

    #[test]
    fn ks_distance_basics() {
        assert_eq!(ks_distance(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_eq!(ks_distance(&[0.0, 1.0], &[2.0, 3.0]), 1.0);
        assert!((ks_distance(&[0.0, 2.0], &[1.0, 3.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ascent_with_full_rank_is_exact() {
        let g = sample_gue(16, true, 2).unwrap().matrix;
        let top = *eigenvalues(&g).unwrap().last().unwrap();
        let est = sup_sn_k_ascent(&g, 4, 2, 50, 0).unwrap();
        assert!(abs(est.value - top) < 1e-6);
        assert!(est.heuristic);
    }

    #[test]
    fn product_states_miss_the_entangled_top() {
        let d = 3;
        let g = max_entangled(d)
            .projector
            .add_scaled(-1.0 / 9.0, &DenseHermitian::identity(9))
            .unwrap()
            .without_space();
        let top = *eigenvalues(&g).unwrap().last().unwrap();
        let ladder = sup_sn_ladder(&g, d, 4, 100, 1).unwrap();
        assert!(ladder[0].value < top - 1e-3);
        // Product states reach 1/d on Ω.
        assert!(abs(ladder[0].value - (1.0 / 3.0 - 1.0 / 9.0)) < 1e-6);
        for w in ladder.windows(2) {
            assert!(w[0].value <= w[1].value + 1e-9);
        }
        assert!(sup_sn_k_ascent(&g, 4, 1, 1, 0).is_err());
    }
}
