//! Acceptance run: every criterion at its stated tolerance, one line each.
//!
//! Built with `harness = false`; exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kantorovich::analysis::{pair_counts, rigidity_report, RigidityReport, BOUND_SLACK};
use kantorovich::constructions::{gcd_construct, DEFAULT_LCM_GUARD};
use kantorovich::harness::{run_experiment, ExperimentSpec};
use kantorovich::instance::{
    gen_point_instance, gen_random_costs, genericity_check, perturb, Distribution, ScanMode,
    DEFAULT_GENERICITY_TOL, DEFAULT_PERTURB_ETA,
};
use kantorovich::io::{plan_from_csv, plan_to_csv, PlanStats};
use kantorovich::oracle::{brute_force_solve, DEFAULT_ORACLE_CAP};
use kantorovich::solver::{count_crossings, find_crossings, scaled_cost, uncross};
use kantorovich::{objective, solve, Instance, TransportPlan};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($fmt)+)),
        }
    };
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

fn within(t: Duration, limit_s: f64) -> Result<(), String> {
    if t.as_secs_f64() < limit_s {
        Ok(())
    } else {
        Err(format!("took {:.1}s, limit {limit_s}s", t.as_secs_f64()))
    }
}

/// Checks genericity and perturbs once if it fails, as the presets do.
fn generic(inst: Instance, mode: ScanMode, seed: u64) -> Result<(Instance, bool), String> {
    if genericity_check(&inst, DEFAULT_GENERICITY_TOL, mode).generic {
        return Ok((inst, false));
    }
    let p = perturb(&inst, DEFAULT_PERTURB_ETA, seed).map_err(|e| e.to_string())?;
    ensure!(
        genericity_check(&p, DEFAULT_GENERICITY_TOL, mode).generic,
        "perturbation did not restore genericity"
    );
    Ok((p, true))
}

fn c1_birkhoff() -> Outcome {
    let start = Instant::now();
    for k in 0..100u64 {
        let n = 2 + (k as usize) % 49;
        let (inst, _) = generic(gen_random_costs(n, n, k).unwrap(), ScanMode::Full, k)?;
        let p = solve(&inst);
        ensure!(
            p.support_size() == n && p.flows().iter().all(|f| f.units == p.scale() / n as u64),
            "instance {k} (n = {n}) is not a permutation"
        );
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "100/100 permutations in {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

struct OracleCase {
    inst: Instance,
    generic: bool,
    optimal: Vec<TransportPlan>,
    solved: TransportPlan,
}

fn oracle_corpus() -> Result<Vec<OracleCase>, String> {
    let mut out = Vec::new();
    for m in [2, 3] {
        for n in [2, 3, 4] {
            for seed in 0..20u64 {
                let inst = gen_random_costs(m, n, 1000 + seed).unwrap();
                let r = brute_force_solve(&inst, DEFAULT_ORACLE_CAP).map_err(|e| e.to_string())?;
                let solved = solve(&inst);
                let s = scaled_cost(&inst, &solved).unwrap();
                ensure!(
                    rel_close(
                        s / inst.scale() as f64,
                        r.min_cost / inst.scale() as f64,
                        1e-12
                    ),
                    "{m}x{n} seed {seed}: solver {s} vs oracle {}",
                    r.min_cost
                );
                ensure!(
                    r.optimal_plans.contains(&solved),
                    "{m}x{n} seed {seed}: solver plan not among oracle optima"
                );
                let generic =
                    genericity_check(&inst, DEFAULT_GENERICITY_TOL, ScanMode::Full).generic;
                out.push(OracleCase {
                    inst,
                    generic,
                    optimal: r.optimal_plans,
                    solved,
                });
            }
        }
    }
    Ok(out)
}

fn c2_c3_oracle() -> (Outcome, Outcome) {
    let start = Instant::now();
    let corpus = match oracle_corpus() {
        Ok(c) => c,
        Err(e) => return (Err(e), Err("corpus unavailable".into())),
    };
    let t = start.elapsed();
    let c2 = within(t, 30.0).map(|_| {
        format!(
            "{} instances agree with the oracle in {:.2}s",
            corpus.len(),
            t.as_secs_f64()
        )
    });
    let c3 = (|| {
        let mut plans = 0;
        let mut instances = 0;
        for case in corpus.iter().filter(|c| c.generic) {
            instances += 1;
            for p in case.optimal.iter().chain([&case.solved]) {
                ensure!(
                    find_crossings(p).is_empty(),
                    "{}x{} generic instance has a crossing optimum",
                    case.inst.m(),
                    case.inst.n()
                );
                ensure!(
                    rigidity_report(p).all_ok(),
                    "oracle optimum violates the bounds"
                );
                plans += 1;
            }
        }
        Ok(format!(
            "{instances} generic instances, {plans} optimal plans, 0 crossings"
        ))
    })();
    (c2, c3)
}

fn pair_limit_ok(p: &TransportPlan) -> bool {
    let pc = pair_counts(p);
    pc.within_pair_limit() && pc.max_pair_count() <= 1
}

fn c4_bounds(pair_failures: &mut Vec<String>) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut perturbed = 0;
    for k in 0..200u64 {
        let m = rng.random_range(2..=10usize);
        let n = rng.random_range(m..=200usize);
        let (inst, p) = generic(gen_random_costs(m, n, k).unwrap(), ScanMode::Full, k)?;
        perturbed += p as usize;
        let plan = solve(&inst);
        let r = rigidity_report(&plan);
        ensure!(
            r.bound1_ok && r.bound2_ok && r.bound3_ok,
            "{m}x{n} seed {k}: {r:?}"
        );
        let (lo, hi) = (n.div_ceil(m), n / m + m - 1);
        ensure!(
            r.t.iter().all(|&t| lo <= t && t <= hi),
            "{m}x{n} seed {k}: t out of range"
        );
        if !pair_limit_ok(&plan) {
            pair_failures.push(format!("criterion 4 instance {k}"));
        }
    }
    within(start.elapsed(), 60.0)?;
    Ok(format!(
        "200/200 within all bounds ({perturbed} perturbed) in {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn c5_fig1() -> Outcome {
    let mut notes = Vec::new();
    for ell in [10, 40] {
        let inst =
            gen_point_instance(Distribution::UniformSquare, 2 * ell, 3 * ell, 2, 1.0, 0).unwrap();
        let g = gcd_construct(&inst, DEFAULT_LCM_GUARD).map_err(|e| e.to_string())?;
        let rg = rigidity_report(&g);
        ensure!(
            rg.t_max() <= 3 && rg.ell_max() <= 2,
            "l = {ell}: gcd plan has t_max {} ell_max {}",
            rg.t_max(),
            rg.ell_max()
        );
        let s = solve(&inst);
        let (a, b) = (objective(&inst, &g).unwrap(), objective(&inst, &s).unwrap());
        ensure!(rel_close(a, b, 1e-12), "l = {ell}: objective {a} vs {b}");
        let rs = rigidity_report(&s);
        notes.push(format!(
            "l={ell}: gcd t_max={} ell_max={}, solver t_max={} ell_max={}",
            rg.t_max(),
            rg.ell_max(),
            rs.t_max(),
            rs.ell_max()
        ));
    }
    Ok(notes.join("; "))
}

struct LargeRun {
    seed: u64,
    report: RigidityReport,
    plan: TransportPlan,
    secs: f64,
}

fn large_runs(
    seeds: std::ops::Range<u64>,
    make: impl Fn(u64) -> Instance,
) -> Result<Vec<LargeRun>, String> {
    seeds
        .map(|seed| {
            let start = Instant::now();
            let (inst, _) = generic(make(seed), ScanMode::Auto, seed)?;
            let plan = solve(&inst);
            let report = rigidity_report(&plan);
            Ok(LargeRun {
                seed,
                report,
                plan,
                secs: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

fn c6_fig2(runs: &[LargeRun]) -> Outcome {
    let mut hist = BTreeMap::new();
    let mut flagged = Vec::new();
    for r in runs {
        ensure!(r.secs < 120.0, "seed {} took {:.1}s", r.seed, r.secs);
        ensure!(
            r.report.t_min() >= 45 && r.report.t_max() <= 93,
            "seed {}: t in [{}, {}]",
            r.seed,
            r.report.t_min(),
            r.report.t_max()
        );
        *hist.entry(r.report.t_max()).or_insert(0) += 1;
        if r.report.t_max() > 47 {
            flagged.push(r.seed);
        }
    }
    let slowest = runs.iter().map(|r| r.secs).fold(0.0, f64::max);
    Ok(format!(
        "t_max histogram {hist:?}; seeds above 47: {flagged:?}; slowest seed {slowest:.1}s"
    ))
}

fn c7_sec22(runs: &[LargeRun]) -> Outcome {
    let mut le289 = 0;
    for r in runs {
        ensure!(r.secs < 30.0, "seed {} took {:.1}s", r.seed, r.secs);
        ensure!(
            r.report.t.iter().all(|&t| (286..=291).contains(&t)),
            "seed {}: t in [{}, {}]",
            r.seed,
            r.report.t_min(),
            r.report.t_max()
        );
        le289 += (r.report.t_max() <= 289) as usize;
    }
    Ok(format!("{le289}/{} seeds with t_max <= 289", runs.len()))
}

fn c8_fanin(runs: &[LargeRun]) -> Outcome {
    let bound = 1.0 + 50.0 / 2222f64.sqrt();
    let mut worst = 0.0f64;
    for r in runs {
        // support / n against the bound, compared as support <= n * bound.
        let support = r.report.support_size as f64;
        ensure!(
            support <= 2222.0 * bound * (1.0 + BOUND_SLACK),
            "seed {}: mean fanin {}/2222 > {bound}",
            r.seed,
            r.report.support_size
        );
        worst = worst.max(support / 2222.0);
    }
    Ok(format!("max mean fanin {worst:.4} <= {bound:.4}"))
}

fn c9_uncross() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 10;
    for k in 0..50u64 {
        let inst = gen_random_costs(n, n, 9000 + k).unwrap();
        let mut p1: Vec<usize> = (0..n).collect();
        p1.shuffle(&mut rng);
        // p2 = p1 after a random permutation that contains a transposition,
        // so the average has at least one crossing.
        let mut sigma: Vec<usize> = (0..n).collect();
        sigma[2..].shuffle(&mut rng);
        sigma.swap(0, 1);
        let mut relabel: Vec<usize> = (0..n).collect();
        relabel.shuffle(&mut rng);
        let mut s = vec![0; n];
        for i in 0..n {
            s[relabel[i]] = relabel[sigma[i]];
        }
        let p2: Vec<usize> = (0..n).map(|i| p1[s[i]]).collect();
        let flows = (0..n).flat_map(|i| [(i, p1[i]), (i, p2[i])]);
        let mut dense = vec![vec![0u64; n]; n];
        for (i, j) in flows {
            dense[i][j] += 1;
        }
        let input = TransportPlan::from_dense(2 * n as u64, &dense).unwrap();
        ensure!(count_crossings(&input) > 0, "plan {k} was meant to cross");
        let out = uncross(&inst, &input).map_err(|e| e.to_string())?;
        ensure!(count_crossings(&out) == 0, "plan {k}: crossings left");
        let (a, b) = (
            objective(&inst, &out).unwrap(),
            objective(&inst, &input).unwrap(),
        );
        ensure!(a <= b, "plan {k}: objective rose from {b} to {a}");
    }
    within(start.elapsed(), 5.0)?;
    Ok(format!(
        "50/50 uncrossed without cost increase in {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn c10_pairs(pair_failures: &[String], large: &[&LargeRun]) -> Outcome {
    let mut fails = pair_failures.to_vec();
    for r in large {
        if !pair_limit_ok(&r.plan) {
            fails.push(format!("{}x{} seed {}", r.report.m, r.report.n, r.seed));
        }
    }
    ensure!(fails.is_empty(), "pair count limit broken: {fails:?}");
    Ok(format!(
        "200 + {} solver outputs within C(m, 2)",
        large.len()
    ))
}

fn c11_round_trip(large: &[&LargeRun]) -> Outcome {
    for r in large {
        let text = plan_to_csv(&r.plan);
        ensure!(
            plan_from_csv(&text).unwrap() == r.plan,
            "plan CSV did not round-trip"
        );
        let stats = PlanStats::new(&r.report, count_crossings(&r.plan) as usize);
        let json = stats.to_json();
        let back = PlanStats::from_json(&json).unwrap();
        ensure!(
            back == stats && back.to_json() == json,
            "stats JSON did not round-trip"
        );
    }
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut files = 0;
    for make in [
        |d: &std::path::Path| ExperimentSpec::fig1(10, vec![0, 1, 2], d),
        |d: &std::path::Path| ExperimentSpec::sec22(vec![0], d),
    ] {
        let sa = run_experiment(&make(a.path())).map_err(|e| e.to_string())?;
        let sb = run_experiment(&make(b.path())).map_err(|e| e.to_string())?;
        ensure!(sa == sb, "summaries differ");
        for entry in fs::read_dir(a.path()).unwrap() {
            let name = entry.unwrap().file_name();
            let (x, y) = (
                fs::read(a.path().join(&name)),
                fs::read(b.path().join(&name)),
            );
            ensure!(x.unwrap() == y.unwrap(), "{name:?} differs between runs");
            files += 1;
        }
    }
    Ok(format!(
        "{} plans round-trip; {files} artifacts byte-identical",
        large.len()
    ))
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((1, "Birkhoff property", c1_birkhoff()));
    let (c2, c3) = c2_c3_oracle();
    results.push((2, "oracle equivalence", c2));
    results.push((3, "non-crossing", c3));
    let mut pair_failures = Vec::new();
    results.push((4, "rigidity bounds", c4_bounds(&mut pair_failures)));
    results.push((5, "fig1 gcd construction", c5_fig1()));

    let fig2 = large_runs(0..10, |s| {
        gen_point_instance(Distribution::UniformSquare, 50, 2222, 2, 2.0, s).unwrap()
    });
    let sec22 = large_runs(0..10, |s| gen_random_costs(7, 2000, s).unwrap());
    match &fig2 {
        Ok(runs) => {
            results.push((6, "fig2 fanout", c6_fig2(runs)));
            results.push((8, "mean fanin at scale", c8_fanin(runs)));
        }
        Err(e) => {
            results.push((6, "fig2 fanout", Err(e.clone())));
            results.push((8, "mean fanin at scale", Err(e.clone())));
        }
    }
    results.push((
        7,
        "sec22 fanout",
        sec22
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|r| c7_sec22(r)),
    ));
    results.push((9, "uncrossing", c9_uncross()));
    let large: Vec<&LargeRun> = fig2
        .iter()
        .flatten()
        .chain(sec22.iter().flatten())
        .collect();
    results.push((
        10,
        "pair-count inequality",
        c10_pairs(&pair_failures, &large),
    ));
    results.push((11, "round-trip and determinism", c11_round_trip(&large)));
    results.sort_by_key(|r| r.0);

    let mut failed = 0;
    for (k, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {k:>2} PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {k:>2} FAIL  {name}: {why}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
