use std::path::PathBuf;

use clap::Subcommand;
use snforge_core::seeding::sub_seed;
use snforge_core::subblocks::{
    appt_precheck, appt_trial, block_decompose, ptinv_sn_bound, scan_pair, scan_pairs,
    scan_report, ApptVerdict, APPT_TOL, DEFAULT_TRIALS,
};
use snforge_core::tensor::{permute_factors, Matrix, TensorSpace};

use super::{bipartite_dims, output, read_input, write_output, CliError, CliResult, Context};
use crate::output::Output;

#[derive(Subcommand, Debug)]
pub enum SubblockCmd {
    /// Randomized absolute-PPT test of every 2 ⊗ d2 principal sub-block.
    Scan {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, requires = "d2")]
        d1: Option<usize>,
        #[arg(long, requires = "d1")]
        d2: Option<usize>,
        /// Haar samples per pair.
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
    },
    /// SN ≤ d1 − 1 for PT-invariant states with PPT sub-blocks.
    PtinvBound {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, requires = "d2")]
        d1: Option<usize>,
        #[arg(long, requires = "d1")]
        d2: Option<usize>,
        /// Factor whose partial transpose leaves the state invariant.
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..2))]
        factor: u8,
    },
    /// Searches for a unitary U with UρU† not PPT.
    ApptFalsify {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, requires = "d2")]
        d1: Option<usize>,
        #[arg(long, requires = "d1")]
        d2: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Write the witness unitary here when one is found.
        #[arg(long, value_name = "FILE")]
        witness_out: Option<PathBuf>,
    },
}

/// Same result as `appt_falsifier`, with trials spread over the pool.
fn falsify(ctx: &Context, rho: &snforge_core::tensor::DenseHermitian, d1: usize, d2: usize, trials: usize) -> CliResult<ApptVerdict> {
    let seed = ctx.seed();
    let pre = appt_precheck(rho, d1, d2)?;
    if pre < -APPT_TOL {
        return Ok(ApptVerdict::falsified(Matrix::identity(rho.dim()), pre, 0, seed));
    }
    let block = (4 * ctx.runner.threads()).max(8);
    let hit = ctx.runner.find_first(trials, block, |t| {
        let (u, min) = appt_trial(rho, d1, d2, seed, t)?;
        Ok::<_, CliError>((min < -APPT_TOL).then_some((u, min)))
    })?;
    Ok(match hit {
        Some((t, (u, min))) => ApptVerdict::falsified(u, min, t + 1, seed),
        None => ApptVerdict::undetermined(trials, seed),
    })
}

pub fn run(cmd: &SubblockCmd, ctx: &Context) -> CliResult<Output> {
    match cmd {
        SubblockCmd::Scan { input, d1, d2, trials } => {
            let rho = read_input(input)?;
            let (d1, d2) = bipartite_dims(&rho, *d1, *d2)?;
            if d1 < 2 || d1 > d2 {
                return Err(CliError::Usage(format!("need 2 <= d1 <= d2, got {d1}, {d2}")));
            }
            let dec = block_decompose(&rho, d1, d2)?;
            let pairs = scan_pairs(d1);
            let seed = ctx.seed();
            let scans = ctx.runner.map(0..pairs.len(), |p| {
                let (k1, k2) = pairs[p];
                scan_pair(&rho, &dec, k1, k2, *trials, sub_seed(seed, p as u64)).map_err(CliError::from)
            })?;
            let mut out = output("subblock", "scan");
            out.report = scan_report(d1, d2, &scans);
            Ok(out)
        }
        SubblockCmd::PtinvBound { input, d1, d2, factor } => {
            let rho = read_input(input)?;
            let (d1, d2) = bipartite_dims(&rho, *d1, *d2)?;
            let (rho, d1, d2) = if *factor == 1 {
                let space = TensorSpace::bipartite(d1, d2)?;
                let swapped = permute_factors(&rho.without_space().with_space(space.clone())?, &space, &[1, 0])?;
                (swapped, d2, d1)
            } else {
                (rho, d1, d2)
            };
            let b = ptinv_sn_bound(&rho, d1, d2, ctx.opts.invariance_tol(), ctx.tol.psd_rel)?;
            let mut out = output("subblock", "ptinv-bound");
            out.report = b.report;
            Ok(out)
        }
        SubblockCmd::ApptFalsify { input, d1, d2, trials, witness_out } => {
            let rho = read_input(input)?;
            let (d1, d2) = bipartite_dims(&rho, *d1, *d2)?;
            let v = falsify(ctx, &rho, d1, d2, *trials)?;
            let mut out = output("subblock", "appt-falsify");
            let r = &mut out.report;
            r.quantity("falsified", if v.is_falsified() { 1.0 } else { 0.0 });
            r.quantity("trials-run", v.trials_run as f64);
            if let (Some(u), Some(min)) = (&v.witness_unitary, v.violating_min_eig) {
                let replay = v.replay(&rho, d1, d2)?.expect("witness present");
                r.claim("witness-replays", replay < -APPT_TOL && replay == min, replay, -APPT_TOL, "appt_falsifier");
                r.quantity("violating-min-eig", min);
                r.note("falsified: the state is not absolutely PPT");
                if let Some(path) = witness_out {
                    write_output(path, u, &TensorSpace::bipartite(d1, d2)?)?;
                }
            } else {
                r.note("undetermined: no violating unitary found; absolute PPT is not certified");
            }
            Ok(out)
        }
    }
}
