use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use snforge_core::certificates::{
    choi_map, detector, lemma1_verdict, nondecomposability_witness, scaling_certificate,
    sn_difference_report, sn_lower_certificate, sn_upper_via_eigenbasis, LinearMapRep,
};
use snforge_core::constructions::{concrete_family, ZFamilyState, Z_SIDE_A};
use snforge_core::tensor::psd_check;

use super::{output, read_input, CliError, CliResult, Context};
use crate::output::Output;

/// A family member, from a file or from the concrete construction.
#[derive(Args, Debug, Clone)]
pub struct ZSource {
    /// Matrix file on (A1, B1, A2, B2).
    #[arg(long = "in", value_name = "FILE", conflicts_with_all = ["d1", "d2"])]
    pub input: Option<PathBuf>,
    #[arg(long, requires = "d2")]
    pub d1: Option<usize>,
    #[arg(long, requires = "d1")]
    pub d2: Option<usize>,
}

impl ZSource {
    fn resolve(&self) -> CliResult<ZFamilyState> {
        match (&self.input, self.d1, self.d2) {
            (Some(path), _, _) => {
                let z = read_input(path)?;
                let space = z.space().cloned().expect("read with a space");
                if space.num_factors() != 4 {
                    return Err(CliError::Usage(format!(
                        "{}: expected four factors (A1, B1, A2, B2), found {}",
                        path.display(),
                        space.num_factors()
                    )));
                }
                Ok(ZFamilyState::from_operator(&z, &space)?)
            }
            (None, Some(d1), Some(d2)) => Ok(concrete_family(d1, d2)?),
            _ => Err(CliError::Usage("pass --in FILE or --d1 and --d2".into())),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapArg {
    Choi,
    Transpose,
    Identity,
}

impl MapArg {
    fn build(self, d: usize) -> CliResult<LinearMapRep> {
        Ok(match self {
            MapArg::Choi => choi_map(d)?,
            MapArg::Transpose => LinearMapRep::transposition(d)?,
            MapArg::Identity => LinearMapRep::identity(d)?,
        })
    }
}

#[derive(Subcommand, Debug)]
pub enum CertifyCmd {
    /// Positivity and PPT of Z from its X, Y components.
    Lemma1 {
        #[command(flatten)]
        source: ZSource,
    },
    /// λ_min of the map applied to A2.
    Detector {
        #[command(flatten)]
        source: ZSource,
        #[arg(long, value_enum, default_value_t = MapArg::Choi)]
        map: MapArg,
    },
    /// Schmidt-number lower bound ⌈d2/d1⌉, or ⌈(d − 1)/4⌉ for the scaling state with --d.
    SnLower {
        #[command(flatten)]
        source: ZSource,
        #[arg(long, conflicts_with_all = ["input", "d1", "d2"])]
        d: Option<usize>,
    },
    /// Eigenbasis Schmidt-number upper bound on Z^Γ.
    SnUpperGamma {
        #[command(flatten)]
        source: ZSource,
    },
    /// Lower bound on SN(Z) − SN(Z^Γ).
    SnDiff {
        #[arg(long)]
        d1: usize,
        #[arg(long)]
        d2: usize,
    },
    /// Non-decomposability of id_k ⊗ L.
    Nondecomp {
        #[arg(long, value_enum, default_value_t = MapArg::Choi, conflicts_with = "choi")]
        map: MapArg,
        /// Dimension the map acts on.
        #[arg(long, required_unless_present = "choi")]
        d: Option<usize>,
        /// Choi matrix file on (out, in).
        #[arg(long, value_name = "FILE", conflicts_with = "d")]
        choi: Option<PathBuf>,
        #[arg(long)]
        k: usize,
    },
}

pub fn run(cmd: &CertifyCmd, ctx: &Context) -> CliResult<Output> {
    let tol = &ctx.tol;
    match cmd {
        CertifyCmd::Lemma1 { source } => {
            let z = source.resolve()?;
            let mut out = output("certify", "lemma1");
            out.report = lemma1_verdict(z.x(), z.y(), z.d2(), tol)?;
            Ok(out)
        }
        CertifyCmd::Detector { source, map } => {
            let z = source.resolve()?;
            let m = map.build(z.d2())?;
            let d = detector(&z, &m, tol)?;
            let mut out = output("certify", "detector");
            out.report.claim("violation", d.violated, d.min_eigenvalue, d.threshold, "detector");
            out.report.quantity("min-eig", d.min_eigenvalue);
            out.report.quantity("scale", d.scale);
            Ok(out)
        }
        CertifyCmd::SnLower { source, d: Some(d) } => {
            let _ = source;
            let c = scaling_certificate(*d, tol)?;
            let mut out = output("certify", "sn-lower");
            out.report = c.report;
            Ok(out)
        }
        CertifyCmd::SnLower { source, d: None } => {
            let z = source.resolve()?;
            let mut out = output("certify", "sn-lower");
            out.report = sn_lower_certificate(&z, tol)?.report;
            Ok(out)
        }
        CertifyCmd::SnUpperGamma { source } => {
            let z = source.resolve()?;
            let zg = z.partial_transpose_b();
            let mut out = output("certify", "sn-upper-gamma");
            let prov = "sn_upper_via_eigenbasis";
            let v = psd_check(&zg, tol.psd_rel)?;
            if !out.report.claim("z-gamma-psd", v.psd, v.min_eigenvalue, v.tolerance, prov) {
                out.report.note("Z^Γ is not PSD: the eigenbasis bound does not apply");
                return Ok(out);
            }
            let upper = sn_upper_via_eigenbasis(&zg, z.space(), &Z_SIDE_A, tol)?;
            out.report.claim("upper-at-most-4", upper <= 4, upper as f64, 4.0, prov);
            out.report.quantity("upper", upper as f64);
            Ok(out)
        }
        CertifyCmd::SnDiff { d1, d2 } => {
            let mut out = output("certify", "sn-diff");
            out.report = sn_difference_report(*d1, *d2, tol)?.report;
            Ok(out)
        }
        CertifyCmd::Nondecomp { map, d, choi, k } => {
            let m = match (choi, d) {
                (Some(path), _) => {
                    let c = read_input(path)?;
                    let space = c.space().cloned().expect("read with a space");
                    if space.num_factors() != 2 {
                        return Err(CliError::Usage("Choi matrix file needs factors (out, in)".into()));
                    }
                    let (d_out, d_in) = (space.dims()[0], space.dims()[1]);
                    LinearMapRep::from_choi(c, d_out, d_in)?
                }
                (None, Some(d)) => map.build(*d)?,
                (None, None) => return Err(CliError::Usage("pass --d or --choi".into())),
            };
            let mut out = output("certify", "nondecomp");
            out.report.quantity("choi-min-eig", m.choi_min_eigenvalue()?);
            out.report.absorb("", nondecomposability_witness(&m, *k, tol)?);
            Ok(out)
        }
    }
}
