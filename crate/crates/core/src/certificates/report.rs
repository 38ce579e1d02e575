use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// One verified (or refuted) statement with the number behind it.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Claim {
    pub name: String,
    pub verdict: bool,
    /// The quantity the verdict was decided on, e.g. a minimum eigenvalue.
    pub evidence: f64,
    pub tolerance: f64,
    /// Operation that produced the claim.
    pub provenance: String,
}

/// Named scalar result attached to a report (bounds, counts, estimates).
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Quantity {
    pub key: String,
    pub value: f64,
}

/// Ordered list of claims and result quantities.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertificateReport {
    pub claims: Vec<Claim>,
    pub quantities: Vec<Quantity>,
    pub notes: Vec<String>,
}

impl CertificateReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn claim(
        &mut self,
        name: impl Into<String>,
        verdict: bool,
        evidence: f64,
        tolerance: f64,
        provenance: &str,
    ) -> bool {
        self.claims.push(Claim {
            name: name.into(),
            verdict,
            evidence,
            tolerance,
            provenance: provenance.to_string(),
        });
        verdict
    }

    pub fn quantity(&mut self, key: impl Into<String>, value: f64) {
        self.quantities.push(Quantity {
            key: key.into(),
            value,
        });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Appends everything from `other`, prefixing its claim and quantity
    /// names with `prefix` when it is non-empty.
    pub fn absorb(&mut self, prefix: &str, other: CertificateReport) {
        let rename = |s: String| {
            if prefix.is_empty() {
                s
            } else {
                alloc::format!("{prefix}.{s}")
            }
        };
        self.claims.extend(other.claims.into_iter().map(|mut c| {
            c.name = rename(c.name);
            c
        }));
        self.quantities.extend(other.quantities.into_iter().map(|mut q| {
            q.key = rename(q.key);
            q
        }));
        self.notes.extend(other.notes);
    }

    pub fn get_claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }

    pub fn get_quantity(&self, key: &str) -> Option<f64> {
        self.quantities.iter().find(|q| q.key == key).map(|q| q.value)
    }

    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(|c| c.verdict)
    }
}
