use std::path::{Path, PathBuf};

use clap::Subcommand;
use snforge_core::ensembles::{
    ensemble_trial, gue_draw, mean_width_from_samples, mean_width_sample, summarize, EnsembleReport,
};

use super::{output, CliError, CliResult, Context};
use crate::output::{num, Output, Table};

/// Window for `λ_min/√n` reported by `gue-stats`.
pub const EDGE_WINDOW: (f64, f64) = (-2.4, -1.7);

#[derive(Subcommand, Debug)]
pub enum EnsembleCmd {
    /// PPT frequency of ρ = (1/d²)(1 + αG/d).
    Ppt {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Also write per-trial values as CSV.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Witness values tr(ρ(1 − 2G/(αd))) over the same ensemble.
    Witness {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Heuristic mean width of the Schmidt-number-k states.
    Meanwidth {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
    },
    /// Second moment and lowest eigenvalue of traceless GUE draws.
    GueStats {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        draws: usize,
    },
}

fn campaign(ctx: &Context, d: usize, alpha: f64, trials: usize) -> CliResult<EnsembleReport> {
    if trials == 0 {
        return Err(CliError::Usage("need at least one trial".into()));
    }
    let seed = ctx.seed();
    let rel = ctx.tol.psd_rel;
    let outcomes = ctx
        .runner
        .map(0..trials, |i| ensemble_trial(d, alpha, seed, i, rel).map_err(CliError::from))?;
    Ok(EnsembleReport::from_outcomes(d, alpha, seed, outcomes)?)
}

fn trial_table(rep: &EnsembleReport) -> Table {
    let mut t = Table::new("trials", &["index", "min_eig", "min_eig_gamma", "psd", "ppt", "witness"]);
    for o in &rep.outcomes {
        t.push(vec![
            o.index.to_string(),
            num(o.min_eig),
            num(o.min_eig_gamma),
            u8::from(o.psd).to_string(),
            u8::from(o.ppt).to_string(),
            num(o.witness),
        ]);
    }
    t
}

fn write_csv(path: &Path, table: &Table) -> CliResult<()> {
    std::fs::write(path, table.to_csv()).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
}

pub fn run(cmd: &EnsembleCmd, ctx: &Context) -> CliResult<Output> {
    match cmd {
        EnsembleCmd::Ppt { d, alpha, trials, csv } => {
            let rep = campaign(ctx, *d, *alpha, *trials)?;
            let mut out = output("ensemble", "ppt");
            let r = &mut out.report;
            r.quantity("trials", rep.trials as f64);
            r.quantity("psd-count", rep.psd_count as f64);
            r.quantity("ppt-count", rep.ppt_count as f64);
            r.quantity("ppt-frequency", rep.ppt_frequency());
            r.quantity("min-eig-mean", rep.min_eig.mean);
            r.quantity("min-eig-gamma-mean", rep.min_eig_gamma.mean);
            r.quantity("witness-mean", rep.witness.mean);
            let table = trial_table(&rep);
            if let Some(p) = csv {
                write_csv(p, &table)?;
            }
            out.tables.push(table);
            Ok(out)
        }
        EnsembleCmd::Witness { d, alpha, trials, csv } => {
            let rep = campaign(ctx, *d, *alpha, *trials)?;
            let mut out = output("ensemble", "witness");
            let n4 = (*d as f64).powi(4);
            let r = &mut out.report;
            r.quantity("trials", rep.trials as f64);
            r.quantity("witness-mean", rep.witness.mean);
            r.quantity("witness-stddev", rep.witness.stddev);
            r.quantity("witness-expected", 1.0 - 2.0 * (n4 - 1.0) / n4);
            r.quantity("ppt-frequency", rep.ppt_frequency());
            let mut table = Table::new("witness", &["index", "witness"]);
            for o in &rep.outcomes {
                table.push(vec![o.index.to_string(), num(o.witness)]);
            }
            if let Some(p) = csv {
                write_csv(p, &trial_table(&rep))?;
            }
            out.tables.push(table);
            Ok(out)
        }
        EnsembleCmd::Meanwidth { k, d, samples, restarts, iters } => {
            if *k == 0 || k > d {
                return Err(CliError::Usage(format!("k must lie in 1..={d}, got {k}")));
            }
            if *samples == 0 {
                return Err(CliError::Usage("need at least one sample".into()));
            }
            let seed = ctx.seed();
            let values = ctx.runner.map(0..*samples, |i| {
                mean_width_sample(*k, *d, *restarts, *iters, seed, i).map_err(CliError::from)
            })?;
            let mw = mean_width_from_samples(&values);
            let mut out = output("ensemble", "meanwidth");
            let r = &mut out.report;
            r.quantity("estimate", mw.estimate);
            r.quantity("stderr", mw.stderr);
            r.quantity("heuristic", 1.0);
            r.note("heuristic: multi-restart ascent gives a lower estimate of the mean width");
            let mut table = Table::new("samples", &["index", "value"]);
            for (i, v) in values.iter().enumerate() {
                table.push(vec![i.to_string(), num(*v)]);
            }
            out.tables.push(table);
            Ok(out)
        }
        EnsembleCmd::GueStats { n, draws } => {
            if *draws == 0 {
                return Err(CliError::Usage("need at least one draw".into()));
            }
            let seed = ctx.seed();
            let stats = ctx
                .runner
                .map(0..*draws, |i| gue_draw(*n, seed, i).map_err(CliError::from))?;
            let ratios: Vec<f64> = stats.iter().map(|s| s.trace_sq_ratio).collect();
            let mins: Vec<f64> = stats.iter().map(|s| s.lambda_min_scaled).collect();
            let (lo, hi) = EDGE_WINDOW;
            let inside = mins.iter().filter(|&&m| (lo..=hi).contains(&m)).count();
            let mut out = output("ensemble", "gue-stats");
            let r = &mut out.report;
            r.quantity("draws", *draws as f64);
            r.quantity("trace-sq-ratio-mean", summarize(&ratios).mean);
            r.quantity("lambda-min-scaled-mean", summarize(&mins).mean);
            r.quantity("edge-window-fraction", inside as f64 / *draws as f64);
            r.note(format!("edge window for lambda_min/sqrt(n): [{lo}, {hi}]"));
            let mut table = Table::new("draws", &["index", "trace_sq_ratio", "lambda_min_scaled"]);
            for (i, s) in stats.iter().enumerate() {
                table.push(vec![i.to_string(), num(s.trace_sq_ratio), num(s.lambda_min_scaled)]);
            }
            out.tables.push(table);
            Ok(out)
        }
    }
}
