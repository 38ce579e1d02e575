//! Certification procedures. Every verdict is recorded as a [`Claim`] next to
//! the number that decided it.

mod maps;
mod report;
mod schmidt;

pub use maps::{apply_map_to_factor, choi_map, choi_matrix, LinearMapRep, MapKind};
pub use report::{CertificateReport, Claim, Quantity};
pub use schmidt::{
    detector, detector_on_operator, detector_violation, lemma1_verdict,
    nondecomposability_witness, scaling_certificate, sn_difference_report, sn_lower_certificate,
    sn_upper_via_eigenbasis, DetectorOutcome, ScalingCertificate, SnDifference, SnLower,
};

use crate::tensor::{PSD_REL_TOL, SCHMIDT_SV_TOL};

/// Numerical thresholds shared by the certificates.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tolerances {
    /// PSD test: `λ_min ≥ −psd_rel · max(1, λ_max)`.
    pub psd_rel: f64,
    /// Detector violation: `λ_min < −detector_rel · max(1, ‖result‖_max)`.
    pub detector_rel: f64,
    /// Singular-value cutoff relative to the largest one.
    pub sv: f64,
    /// Eigenvectors with eigenvalue at most `eig · λ_max` are ignored by the
    /// eigenbasis Schmidt-number bound.
    pub eig: f64,
    /// Absolute threshold for `⟨Ω|X|Ω⟩ = 0` and `⟨Ω|Y|Ω⟩ > 0`.
    pub hypothesis: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            psd_rel: PSD_REL_TOL,
            detector_rel: 1e-9,
            sv: SCHMIDT_SV_TOL,
            eig: 1e-9,
            hypothesis: 1e-10,
        }
    }
}
