use std::path::PathBuf;

use clap::Subcommand;
use snforge_core::certificates::CertificateReport;
use snforge_core::constructions::{
    concrete_family, flip, max_entangled, minus_i, plus_i, pt_invariant_family, pt_invariant_lift,
};
use snforge_core::tensor::{partial_transpose, psd_check, DenseHermitian};

use super::{output, read_input, write_output, CliResult, Context};
use crate::matfile::describe_space;
use crate::output::Output;

#[derive(Subcommand, Debug)]
pub enum ConstructCmd {
    /// Z = X ⊗ (1 − Ω) + Y ⊗ Ω on (A1, B1, A2, B2) for the concrete X, Y.
    Theorem3 {
        #[arg(long)]
        d1: usize,
        #[arg(long)]
        d2: usize,
        /// Divide by the trace.
        #[arg(long)]
        normalize: bool,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// PT-invariant PPT state on d ⊗ d.
    Ptinv {
        #[arg(long)]
        d: usize,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// ρ ⊗ |+i⟩⟨+i| + ρ^Γ ⊗ |−i⟩⟨−i| for a two-factor ρ.
    Lift {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Maximally entangled projector on d ⊗ d.
    Maxent {
        #[arg(long)]
        d: usize,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Flip operator on d ⊗ d.
    Flip {
        #[arg(long)]
        d: usize,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn psd_claim(r: &mut CertificateReport, name: &str, m: &DenseHermitian, rel: f64) -> CliResult<bool> {
    let v = psd_check(m, rel)?;
    Ok(r.claim(name, v.psd, v.min_eigenvalue, v.tolerance, "construct"))
}

fn residual_claim(r: &mut CertificateReport, name: &str, residual: f64, tol: f64) {
    r.claim(name, residual <= tol, residual, tol, "construct");
}

fn finish(mut out: Output, m: &DenseHermitian, path: &Option<PathBuf>) -> CliResult<Output> {
    let space = m.space().cloned().expect("constructions carry their space");
    out.report.quantity("dim", m.dim() as f64);
    out.report.quantity("trace", m.trace());
    out.report.note(format!("space {}", describe_space(&space)));
    if let Some(p) = path {
        write_output(p, m.matrix(), &space)?;
        out.report.note(format!("wrote {}", p.display()));
    }
    Ok(out)
}

pub fn run(cmd: &ConstructCmd, ctx: &Context) -> CliResult<Output> {
    let rel = ctx.tol.psd_rel;
    match cmd {
        ConstructCmd::Theorem3 { d1, d2, normalize, out: path } => {
            let mut out = output("construct", "theorem3");
            let mut z = concrete_family(*d1, *d2)?;
            if *normalize {
                z = z.normalized()?;
            }
            let r = &mut out.report;
            psd_claim(r, "z-psd", z.z(), rel)?;
            psd_claim(r, "z-ppt", &z.partial_transpose_b(), rel)?;
            residual_claim(r, "reconstruction", z.reconstruction_residual(), 1e-12);
            r.quantity("d1", *d1 as f64);
            r.quantity("d2", *d2 as f64);
            let zz = z.z().clone();
            finish(out, &zz, path)
        }
        ConstructCmd::Ptinv { d, out: path } => {
            let mut out = output("construct", "ptinv");
            let fam = pt_invariant_family(*d)?;
            let space = fam.state.space().cloned().expect("family carries its space");
            let gamma = partial_transpose(&fam.state, &space, &[1])?;
            let r = &mut out.report;
            let tol = ctx.opts.invariance_tol() * (1.0 + fam.state.max_abs());
            residual_claim(r, "pt-invariant", gamma.max_abs_diff(&fam.state), tol);
            psd_claim(r, "psd", &fam.state, rel)?;
            psd_claim(r, "ppt", &gamma, rel)?;
            r.quantity("claimed-bound", fam.claimed_bound as f64);
            r.note("invariant under the partial transpose of the second factor");
            finish(out, &fam.state, path)
        }
        ConstructCmd::Lift { input, out: path } => {
            let mut out = output("construct", "lift");
            let base = read_input(input)?;
            let lift = pt_invariant_lift(&base)?;
            let base_space = base.space().cloned().expect("read with a space");
            let gamma = partial_transpose(&base, &base_space, &[1])?;
            let scale = 1.0 + base.max_abs();
            let tol = ctx.opts.invariance_tol() * scale;
            let r = &mut out.report;
            residual_claim(r, "pt-invariant", lift.pt_invariance_residual(), tol);
            let plus = lift.compress(&plus_i())?.max_abs_diff(&base);
            residual_claim(r, "compress-plus-i", plus, 1e-12 * scale);
            let minus = lift.compress(&minus_i())?.max_abs_diff(&gamma);
            residual_claim(r, "compress-minus-i", minus, 1e-12 * scale);
            let v = psd_check(&lift.lifted, rel)?;
            r.quantity("lifted-min-eig", v.min_eigenvalue);
            finish(out, &lift.lifted, path)
        }
        ConstructCmd::Maxent { d, out: path } => {
            if *d == 0 {
                return Err(super::CliError::Usage("d must be positive".into()));
            }
            let mut out = output("construct", "maxent");
            let p = max_entangled(*d).projector;
            let sq = p.matrix().matmul(p.matrix())?;
            let r = &mut out.report;
            residual_claim(r, "idempotent", sq.max_abs_diff(p.matrix()), 1e-12);
            residual_claim(r, "unit-trace", (p.trace() - 1.0).abs(), 1e-12);
            finish(out, &p, path)
        }
        ConstructCmd::Flip { d, out: path } => {
            if *d == 0 {
                return Err(super::CliError::Usage("d must be positive".into()));
            }
            let mut out = output("construct", "flip");
            let f = flip(*d);
            let sq = f.matrix().matmul(f.matrix())?;
            let id = DenseHermitian::identity(f.dim());
            let r = &mut out.report;
            residual_claim(r, "involution", sq.max_abs_diff(id.matrix()), 0.0);
            residual_claim(r, "trace-equals-d", (f.trace() - *d as f64).abs(), 0.0);
            finish(out, &f, path)
        }
    }
}
