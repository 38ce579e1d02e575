//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use snforge::cli::{run, Outcome};
use snforge::matfile::write_matrix;
use snforge_core::certificates::{
    choi_map, detector_violation, lemma1_verdict, scaling_certificate, sn_difference_report,
    sn_lower_certificate, sn_upper_via_eigenbasis, Tolerances,
};
use snforge_core::constructions::{
    build_z, concrete_family, plus_i, pt_invariant_family, pt_invariant_lift, Z_SIDE_A,
};
use snforge_core::ensembles::{sample_gue, sup_sn_k_ascent, sup_sn_ladder};
use snforge_core::seeding::{complex_normal, rng_from_seed};
use snforge_core::subblocks::{appt_falsifier, block_decompose, pt_invariance_check, ptinv_sn_bound};
use snforge_core::tensor::{
    eigenvalues, partial_transpose, permute_factors, psd_check, DenseHermitian, Matrix, TensorSpace,
};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// CLI invocations made while checking criteria; all are re-run with a
/// different thread count for the determinism criterion.
struct Cli {
    calls: Vec<(Vec<String>, Outcome)>,
}

impl Cli {
    fn call(&mut self, args: &[&str]) -> Outcome {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let out = invoke(&args, 1);
        self.calls.push((args, out.clone()));
        out
    }
}

fn invoke(args: &[String], threads: usize) -> Outcome {
    let t = threads.to_string();
    let argv = std::iter::once("snforge")
        .chain(args.iter().map(String::as_str))
        .chain(["--threads", t.as_str()]);
    run(argv)
}

fn text(o: &Outcome) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn result(o: &Outcome, key: &str) -> Result<f64, String> {
    let prefix = format!("result {key} ");
    text(o)
        .lines()
        .find_map(|l| l.strip_prefix(&prefix).and_then(|v| v.parse().ok()))
        .ok_or_else(|| format!("missing result {key} (exit {})", o.code))
}

fn random_psd(seed: u64, n: usize) -> DenseHermitian {
    let mut rng = rng_from_seed(seed);
    let a = Matrix::from_fn(n, n, |_, _| complex_normal(&mut rng));
    DenseHermitian::from_hermitian_part(a.matmul(&a.adjoint()).unwrap()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn lower_bound_certificate(cli: &mut Cli) -> Check {
    let start = Instant::now();
    let tol = Tolerances::default();
    let z = concrete_family(2, 8).map_err(|e| e.to_string())?;
    let l1 = lemma1_verdict(z.x(), z.y(), 8, &tol).map_err(|e| e.to_string())?;
    for name in ["x-psd", "y-psd", "ppt-symmetric", "ppt-antisymmetric"] {
        let c = l1.get_claim(name).ok_or(format!("missing claim {name}"))?;
        ensure(c.verdict, format!("{name}: λ_min {:e} below −{:e}", c.evidence, c.tolerance))?;
    }
    let v = detector_violation(&z, &choi_map(8).unwrap()).map_err(|e| e.to_string())?;
    ensure(v < -1e-6, format!("detector λ_min {v:e} not below −1e-6"))?;
    let bound = sn_lower_certificate(&z, &tol).map_err(|e| e.to_string())?.bound;
    ensure(bound == 4, format!("bound {bound} != 4"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), format!("took {elapsed:?}"))?;
    let o = cli.call(&["certify", "sn-lower", "--d1", "2", "--d2", "8"]);
    ensure(o.code == 0 && result(&o, "bound")? == 4.0, "CLI sn-lower did not report bound 4")?;
    Ok(format!("four PSD claims pass, detector λ_min = {v:.6}, bound 4, {elapsed:.2?}"))
}

fn upper_bound_and_difference(cli: &mut Cli) -> Check {
    let tol = Tolerances { sv: 1e-10, ..Tolerances::default() };
    let z = concrete_family(2, 8).map_err(|e| e.to_string())?;
    let zg = z.partial_transpose_b();
    let p = psd_check(&zg, 1e-9).map_err(|e| e.to_string())?;
    ensure(p.psd, format!("Z^Γ λ_min {:e}", p.min_eigenvalue))?;
    let upper = sn_upper_via_eigenbasis(&zg, z.space(), &Z_SIDE_A, &tol).map_err(|e| e.to_string())?;
    ensure(upper <= 4, format!("eigenbasis bound {upper} > 4"))?;
    let d8 = sn_difference_report(2, 8, &tol).map_err(|e| e.to_string())?;
    ensure(d8.difference >= 0, format!("difference at d2=8 is {}", d8.difference))?;
    let start = Instant::now();
    let o = cli.call(&["certify", "sn-diff", "--d1", "2", "--d2", "16"]);
    let elapsed = start.elapsed();
    let d16 = result(&o, "difference")?;
    ensure(o.code == 0, "CLI sn-diff at d2=16 has a failing claim")?;
    ensure(d16 >= 4.0, format!("difference at d2=16 is {d16}"))?;
    ensure(elapsed < Duration::from_secs(300), format!("d2=16 took {elapsed:?}"))?;
    let u = cli.call(&["certify", "sn-upper-gamma", "--d1", "2", "--d2", "8"]);
    ensure(u.code == 0 && result(&u, "upper")? <= 4.0, "CLI sn-upper-gamma failed")?;
    Ok(format!(
        "Z^Γ PSD, upper {upper}, difference {} at d2=8 and {d16} at d2=16 ({elapsed:.2?})",
        d8.difference
    ))
}

fn scaling(cli: &mut Cli) -> Check {
    let tol = Tolerances::default();
    let mut parts = Vec::new();
    for (d, want) in [(8usize, 2usize), (16, 4)] {
        let c = scaling_certificate(d, &tol).map_err(|e| e.to_string())?;
        ensure(c.report.all_pass(), format!("d={d}: a claim failed"))?;
        ensure(c.bound >= want, format!("d={d}: bound {} < {want}", c.bound))?;
        let ds = d.to_string();
        let o = cli.call(&["certify", "sn-lower", "--d", &ds]);
        ensure(o.code == 0 && result(&o, "bound")? >= want as f64, format!("CLI d={d} failed"))?;
        parts.push(format!("d={d}: SN >= {}", c.bound));
    }
    Ok(parts.join(", "))
}

fn lemma1_equivalence() -> Check {
    let tol = Tolerances::default();
    let (mut agree, mut total, mut ppt_true) = (0, 0, 0);
    for d1 in [2usize, 3] {
        for d2 in [2usize, 3] {
            let n = d1 * d1;
            for t in 0..100u64 {
                let seed = ((d1 * 10 + d2) as u64) << 32 | t;
                let x = random_psd(2 * seed, n);
                let y = random_psd(2 * seed + 1, n);
                // Spread the Y/X ratio so both PPT verdicts occur.
                let s = (t % 10) as f64 * 0.35 * (d2 + 1) as f64 * x.trace() / y.trace();
                let y = y.scale(s);
                let l1 = lemma1_verdict(&x, &y, d2, &tol).map_err(|e| e.to_string())?;
                let z = build_z(&x, &y, d2).map_err(|e| e.to_string())?;
                let pos = psd_check(z.z(), tol.psd_rel).map_err(|e| e.to_string())?.psd;
                let space = z.space().clone();
                let zg = partial_transpose(z.z(), &space, &[1, 3]).map_err(|e| e.to_string())?;
                let ppt = psd_check(&zg, tol.psd_rel).map_err(|e| e.to_string())?.psd;
                let lp = l1.get_claim("positive").unwrap().verdict;
                let lt = l1.get_claim("ppt").unwrap().verdict;
                total += 1;
                ppt_true += usize::from(ppt);
                if lp == pos && lt == ppt {
                    agree += 1;
                }
            }
        }
    }
    ensure(agree == 400 && total == 400, format!("{agree}/{total} agree"))?;
    Ok(format!("{agree}/{total} agree ({ppt_true} PPT, {} not PPT)", total - ppt_true))
}

fn lift_and_invariant_family(cli: &mut Cli, dir: &Path) -> Check {
    let base = concrete_family(2, 4)
        .and_then(|z| z.normalized())
        .map(|z| z.bipartite())
        .map_err(|e| e.to_string())?;
    let lift = pt_invariant_lift(&base).map_err(|e| e.to_string())?;
    let res = lift.pt_invariance_residual();
    ensure(res <= 1e-12, format!("lift residual {res:e}"))?;
    let comp = lift.compress(&plus_i()).map_err(|e| e.to_string())?.max_abs_diff(&base);
    ensure(comp <= 1e-12, format!("compression residual {comp:e}"))?;
    let fam = pt_invariant_family(8).map_err(|e| e.to_string())?;
    let space = fam.state.space().unwrap().clone();
    // The family is invariant on the second factor; the check works on the first.
    let swapped = permute_factors(&fam.state, &space, &[1, 0]).map_err(|e| e.to_string())?;
    let dec = block_decompose(&swapped, 8, 8).map_err(|e| e.to_string())?;
    ensure(pt_invariance_check(&dec, 1e-12), format!("deviation {:e}", dec.pt_invariance_deviation()))?;
    let psd = psd_check(&fam.state, 1e-9).map_err(|e| e.to_string())?;
    let g = partial_transpose(&fam.state, &space, &[1]).map_err(|e| e.to_string())?;
    let ppt = psd_check(&g, 1e-9).map_err(|e| e.to_string())?;
    ensure(psd.psd && ppt.psd, "family member is not PPT")?;
    let base_file = dir.join("base.mat");
    write_matrix(&base_file, base.matrix(), base.space().unwrap()).map_err(|e| e.to_string())?;
    let o = cli.call(&["construct", "lift", "--in", path(&base_file)]);
    ensure(o.code == 0, "CLI lift has a failing claim")?;
    let o = cli.call(&["construct", "ptinv", "--d", "8"]);
    ensure(o.code == 0, "CLI ptinv has a failing claim")?;
    Ok(format!(
        "lift residual {res:e}, compression residual {comp:e}, family d=8 invariant and PPT (λ_min {:.3e})",
        ppt.min_eigenvalue
    ))
}

fn ptinv_pipeline(cli: &mut Cli, dir: &Path) -> Check {
    let (d1, d2) = (3usize, 4usize);
    let n = d1 * d2;
    let sigma = random_psd(606, n);
    let sigma = sigma.scale(1.0 / sigma.trace());
    let mixed = DenseHermitian::identity(n).scale(0.5 / n as f64);
    let rho = mixed.add_scaled(0.5, &sigma).map_err(|e| e.to_string())?;
    // X_ij ← (X_ij + X_ji)/2 on the d2 × d2 blocks.
    let m = rho.matrix();
    let sym = Matrix::from_fn(n, n, |r, c| {
        let (i, a, j, b) = (r / d2, r % d2, c / d2, c % d2);
        (m[(r, c)] + m[(j * d2 + a, i * d2 + b)]) * 0.5
    });
    let rho = DenseHermitian::from_hermitian_part(sym).map_err(|e| e.to_string())?;
    let space = TensorSpace::bipartite(d1, d2).unwrap();
    let psd = psd_check(&rho, 1e-9).map_err(|e| e.to_string())?.psd;
    let g = partial_transpose(&rho, &space, &[1]).map_err(|e| e.to_string())?;
    let ppt = psd_check(&g, 1e-9).map_err(|e| e.to_string())?.psd;
    ensure(psd && ppt, "generated state is not PPT")?;
    let b = ptinv_sn_bound(&rho, d1, d2, 1e-12, 1e-9).map_err(|e| e.to_string())?;
    ensure(b.bound == 2, format!("bound {}", b.bound))?;
    let pair_claims = b.report.claims.iter().filter(|c| c.name.starts_with("pair-")).count();
    ensure(pair_claims == 9, format!("{pair_claims} pair claims"))?;
    ensure(b.report.all_pass(), "a sub-block claim failed")?;
    let file = dir.join("ptinv34.mat");
    write_matrix(&file, rho.matrix(), &space).map_err(|e| e.to_string())?;
    let o = cli.call(&["subblock", "ptinv-bound", "--in", path(&file)]);
    ensure(o.code == 0 && result(&o, "bound")? == 2.0, "CLI ptinv-bound did not report 2")?;
    Ok("bound 2; 3 pairs verified PSD, PT-invariant and PPT".into())
}

fn appt_soundness(cli: &mut Cli, dir: &Path) -> Check {
    let mm = DenseHermitian::identity(9).scale(1.0 / 9.0);
    let v = appt_falsifier(&mm, 3, 3, 1000, 0).map_err(|e| e.to_string())?;
    ensure(!v.is_falsified() && v.trials_run == 1000, "maximally mixed state falsified")?;
    let mut prod = Matrix::zeros(4, 4);
    prod[(0, 0)] = snforge_core::Complex64::new(1.0, 0.0);
    let prod = DenseHermitian::new(prod).unwrap();
    let (mut hits, mut replays) = (0, 0);
    for seed in 0..100u64 {
        let v = appt_falsifier(&prod, 2, 2, 16, seed).map_err(|e| e.to_string())?;
        if v.is_falsified() {
            hits += 1;
            let r = v.replay(&prod, 2, 2).map_err(|e| e.to_string())?.unwrap();
            if r < -1e-9 && Some(r) == v.violating_min_eig {
                replays += 1;
            }
        }
    }
    ensure(hits >= 95, format!("only {hits}/100 falsified"))?;
    ensure(replays == hits, format!("{replays}/{hits} witnesses replay"))?;
    let space2 = TensorSpace::bipartite(2, 2).unwrap();
    let space3 = TensorSpace::bipartite(3, 3).unwrap();
    let (fm, fp) = (dir.join("mm.mat"), dir.join("prod.mat"));
    write_matrix(&fm, mm.matrix(), &space3).map_err(|e| e.to_string())?;
    write_matrix(&fp, prod.matrix(), &space2).map_err(|e| e.to_string())?;
    let o = cli.call(&["subblock", "appt-falsify", "--in", path(&fm), "--trials", "1000"]);
    ensure(result(&o, "falsified")? == 0.0, "CLI falsified the maximally mixed state")?;
    let o = cli.call(&["subblock", "appt-falsify", "--in", path(&fp), "--trials", "16"]);
    ensure(o.code == 0, "CLI witness did not replay")?;
    Ok(format!("maximally mixed undetermined after 1000; |00⟩ falsified in {hits}/100, all replay"))
}

fn gue_statistics(cli: &mut Cli) -> Check {
    let o = cli.call(&["ensemble", "gue-stats", "--n", "2500", "--draws", "50"]);
    let ratio = result(&o, "trace-sq-ratio-mean")?;
    let frac = result(&o, "edge-window-fraction")?;
    ensure((0.95..=1.05).contains(&ratio), format!("mean tr(G²)/(n²−1) = {ratio}"))?;
    ensure(frac >= 0.9, format!("edge fraction {frac}"))?;
    Ok(format!("mean tr(G²)/(n²−1) = {ratio:.4}, λ_min/√n in window for {:.0}% of draws", frac * 100.0))
}

fn random_state_experiment(cli: &mut Cli) -> Check {
    let o = cli.call(&["ensemble", "ppt", "--d", "8", "--alpha", "0.25", "--trials", "200", "--seed", "7"]);
    let f = result(&o, "ppt-frequency")?;
    let w = result(&o, "witness-mean")?;
    ensure(f >= 0.95, format!("PPT frequency {f}"))?;
    ensure((-1.2..=-0.8).contains(&w), format!("witness mean {w}"))?;
    Ok(format!("PPT frequency {f}, witness mean {w:.4}"))
}

fn ascent_sanity(cli: &mut Cli) -> Check {
    let mut worst: f64 = 0.0;
    for t in 0..20u64 {
        let d = 2 + (t as usize % 7);
        let g = sample_gue(d * d, true, 1000 + t).map_err(|e| e.to_string())?.matrix;
        let exact = *eigenvalues(&g).map_err(|e| e.to_string())?.last().unwrap();
        let top = sup_sn_k_ascent(&g, d, 16, 200, t).map_err(|e| e.to_string())?.value;
        worst = worst.max((top - exact).abs());
        ensure((top - exact).abs() <= 1e-6, format!("d={d}: {top} vs λ_max {exact}"))?;
        let ladder = sup_sn_ladder(&g, d, 16, 200, t).map_err(|e| e.to_string())?;
        for w in ladder.windows(2) {
            ensure(w[0].value <= w[1].value + 1e-9, format!("d={d}: not monotone at k={}", w[0].k))?;
        }
    }
    let o = cli.call(&["ensemble", "meanwidth", "--k", "2", "--d", "4", "--samples", "8"]);
    ensure(o.code == 0, "CLI meanwidth failed")?;
    Ok(format!("20 draws, max |k=d estimate − λ_max| = {worst:.2e}, monotone in k"))
}

fn determinism(cli: &Cli) -> Check {
    for (args, first) in &cli.calls {
        let again = invoke(args, 3);
        ensure(
            again == *first,
            format!("`{}` differs between --threads 1 and --threads 3", args.join(" ")),
        )?;
    }
    Ok(format!("{} invocations byte-identical with --threads 1 and 3", cli.calls.len()))
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut cli = Cli { calls: Vec::new() };
    let mut failed = 0;
    let mut report = |n: usize, name: &str, r: Check| {
        match r {
            Ok(detail) => println!("PASS criterion {n:>2} {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {n:>2} {name}: {why}");
            }
        }
    };
    report(1, "lower-bound certificate", lower_bound_certificate(&mut cli));
    report(2, "eigenbasis upper bound and difference", upper_bound_and_difference(&mut cli));
    report(3, "scaling family", scaling(&mut cli));
    report(4, "positivity/PPT equivalence", lemma1_equivalence());
    report(5, "PT-invariant lift and family", lift_and_invariant_family(&mut cli, dir.path()));
    report(6, "PT-invariant sub-block bound", ptinv_pipeline(&mut cli, dir.path()));
    report(7, "absolute-PPT falsifier soundness", appt_soundness(&mut cli, dir.path()));
    report(8, "GUE statistics", gue_statistics(&mut cli));
    report(9, "random-state experiment", random_state_experiment(&mut cli));
    report(10, "ascent sanity", ascent_sanity(&mut cli));
    report(11, "determinism", determinism(&cli));
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all 11 criteria passed");
}
