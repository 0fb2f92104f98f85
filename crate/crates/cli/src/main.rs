use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use kantorovich::analysis::{pair_counts, rigidity_report};
use kantorovich::constructions::{birkhoff_decompose, gcd_construct, DEFAULT_LCM_GUARD};
use kantorovich::harness::{default_seeds, emit_svg, run_experiment, CostModel, ExperimentSpec};
use kantorovich::instance::{
    gen_point_instance, gen_random_costs, genericity_check, perturb, Distribution, ScanMode,
    DEFAULT_GENERICITY_TOL, DEFAULT_PERTURB_ETA,
};
use kantorovich::io::{
    decomposition_to_json, plan_to_csv, read_instance, read_plan, read_plan_for, write_instance,
    write_plan, PlanStats,
};
use kantorovich::oracle::{brute_force_solve, DEFAULT_ORACLE_CAP};
use kantorovich::solver::{
    count_crossings, objective, solve_with_stats, uncross, verify_optimality, DEFAULT_DUAL_TOL,
};
use kantorovich::Error;

/// Exact optimal transport between equally weighted point sets.
#[derive(Parser)]
#[command(name = "kantorovich", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dist {
    Uniform,
    Gaussian,
}

impl From<Dist> for Distribution {
    fn from(d: Dist) -> Self {
        match d {
            Dist::Uniform => Distribution::UniformSquare,
            Dist::Gaussian => Distribution::Gaussian,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Fig1,
    Fig2,
    Sec22,
    Custom,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance exactly.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Plan CSV; printed to stdout when omitted.
        #[arg(long)]
        out_plan: Option<PathBuf>,
        #[arg(long)]
        out_stats: Option<PathBuf>,
    },
    /// Generate a point instance or a random cost matrix.
    Gen {
        #[arg(long, value_enum, conflicts_with = "random_costs")]
        dist: Option<Dist>,
        #[arg(long)]
        random_costs: bool,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Look for cost quadruples with c_ik + c_jl = c_il + c_jk.
    Genericity {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GENERICITY_TOL)]
        tol: f64,
        /// Scan every quadruple regardless of size.
        #[arg(long, conflicts_with = "sample")]
        full: bool,
        /// Check this many random quadruples.
        #[arg(long)]
        sample: Option<u64>,
        #[arg(long, default_value_t = 0)]
        sample_seed: u64,
    },
    /// Add a small random jitter to the costs.
    Perturb {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PERTURB_ETA)]
        eta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fanout statistics, bounds and optimality check of a plan.
    Analyze {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        plan: PathBuf,
    },
    /// Remove crossings from a plan without raising its cost.
    Uncross {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Optimal plan with fanout at most n/gcd(m, n).
    GcdConstruct {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LCM_GUARD)]
        guard: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decompose a square plan into permutations.
    Birkhoff {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Enumerate every integral plan of a tiny instance.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: u64,
    },
    /// Run a preset experiment over several seeds.
    Experiment {
        #[arg(long, value_enum)]
        preset: PresetArg,
        /// Half-size parameter of fig1: m = 2l, n = 3l.
        #[arg(long, default_value_t = 10)]
        ell: usize,
        /// Number of seeds, 0..K.
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long)]
        out_dir: PathBuf,
        /// Shape and cost model for the custom preset.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum)]
        dist: Option<Dist>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Draw a plan over its points as SVG.
    Plot {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn write_text(path: &Path, text: &str) -> kantorovich::Result<()> {
    fs::write(path, text)?;
    Ok(())
}

fn run(cmd: Command) -> kantorovich::Result<()> {
    match cmd {
        Command::Solve {
            instance,
            out_plan,
            out_stats,
        } => {
            let inst = read_instance(&instance)?;
            let (plan, stats) = solve_with_stats(&inst);
            match out_plan {
                Some(path) => write_plan(&path, &plan)?,
                None => print!("{}", plan_to_csv(&plan)),
            }
            if let Some(path) = out_stats {
                let s = PlanStats::new(&rigidity_report(&plan), count_crossings(&plan) as usize);
                write_text(&path, &s.to_json())?;
            }
            eprintln!(
                "objective {} support {} pivots {}",
                objective(&inst, &plan)?,
                plan.support_size(),
                stats.pivots
            );
        }
        Command::Gen {
            dist,
            random_costs,
            m,
            n,
            p,
            dim,
            seed,
            out,
        } => {
            let inst = match (dist, random_costs) {
                (_, true) => gen_random_costs(m, n, seed)?,
                (Some(d), false) => gen_point_instance(d.into(), m, n, dim, p, seed)?,
                (None, false) => {
                    return Err(Error::InvalidInstance(
                        "pass --dist or --random-costs".into(),
                    ))
                }
            };
            write_instance(&out, &inst)?;
        }
        Command::Genericity {
            instance,
            tol,
            full,
            sample,
            sample_seed,
        } => {
            let inst = read_instance(&instance)?;
            let mode = match (full, sample) {
                (true, _) => ScanMode::Full,
                (false, Some(budget)) => ScanMode::Sampled {
                    budget,
                    seed: sample_seed,
                },
                (false, None) => ScanMode::Auto,
            };
            let r = genericity_check(&inst, tol, mode);
            let shown: Vec<[usize; 4]> = r
                .violations
                .iter()
                .take(20)
                .map(|q| [q.i, q.j, q.k, q.l])
                .collect();
            print_json(&json!({
                "generic": r.generic,
                "sampled": r.sampled,
                "checked": r.checked,
                "tolerance": r.tolerance,
                "violation_count": r.violations.len(),
                "violations": shown,
            }));
        }
        Command::Perturb {
            instance,
            eta,
            seed,
            out,
        } => {
            let inst = read_instance(&instance)?;
            write_instance(&out, &perturb(&inst, eta, seed)?)?;
        }
        Command::Analyze { instance, plan } => {
            let inst = read_instance(&instance)?;
            let plan = read_plan_for(&inst, &plan)?;
            let r = rigidity_report(&plan);
            let pc = pair_counts(&plan);
            let certified = verify_optimality(&inst, &plan, DEFAULT_DUAL_TOL);
            let stats = PlanStats::new(&r, count_crossings(&plan) as usize);
            print_json(&json!({
                "stats": serde_json::to_value(&stats).expect("stats"),
                "objective": objective(&inst, &plan)?,
                "excess": r.excess(),
                "pair_total": pc.total,
                "pair_limit": pc.pair_limit(),
                "max_pair_count": pc.max_pair_count(),
                "certified_optimal": match certified {
                    Ok(c) => json!(c.is_some()),
                    Err(e) => json!(e.to_string()),
                },
            }));
        }
        Command::Uncross {
            instance,
            plan,
            out,
        } => {
            let inst = read_instance(&instance)?;
            let before = read_plan_for(&inst, &plan)?;
            let after = uncross(&inst, &before)?;
            write_plan(&out, &after)?;
            eprintln!(
                "crossings {} -> 0, objective {} -> {}",
                count_crossings(&before),
                objective(&inst, &before)?,
                objective(&inst, &after)?
            );
        }
        Command::GcdConstruct {
            instance,
            guard,
            out,
        } => {
            let inst = read_instance(&instance)?;
            write_plan(&out, &gcd_construct(&inst, guard)?)?;
        }
        Command::Birkhoff { plan, out } => {
            let plan = read_plan(&plan)?;
            write_text(&out, &decomposition_to_json(&birkhoff_decompose(&plan)?))?;
        }
        Command::Oracle { instance, cap } => {
            let inst = read_instance(&instance)?;
            let r = brute_force_solve(&inst, cap)?;
            let plans: Vec<String> = r.optimal_plans.iter().map(plan_to_csv).collect();
            print_json(&json!({
                "scale": inst.scale(),
                "min_scaled_cost": r.min_cost,
                "min_cost": r.min_cost / inst.scale() as f64,
                "enumerated_count": r.enumerated_count,
                "optimal_plans": plans,
            }));
        }
        Command::Experiment {
            preset,
            ell,
            seeds,
            out_dir,
            m,
            n,
            dist,
            p,
        } => {
            let seeds = seeds.map_or_else(default_seeds, |k| (0..k).collect());
            let spec = match preset {
                PresetArg::Fig1 => ExperimentSpec::fig1(ell, seeds, out_dir),
                PresetArg::Fig2 => ExperimentSpec::fig2(seeds, out_dir),
                PresetArg::Sec22 => ExperimentSpec::sec22(seeds, out_dir),
                PresetArg::Custom => {
                    let (Some(m), Some(n)) = (m, n) else {
                        return Err(Error::InvalidInstance("custom needs --m and --n".into()));
                    };
                    let costs = match dist {
                        Some(d) => CostModel::Points { dist: d.into(), p },
                        None => CostModel::Random,
                    };
                    ExperimentSpec::custom(m, n, costs, seeds, out_dir)
                }
            };
            let summary = run_experiment(&spec)?;
            for r in &summary.seeds {
                eprintln!(
                    "seed {}: t in [{}, {}], excess {}, bounds {}{}",
                    r.seed,
                    r.t_min,
                    r.t_max,
                    r.excess,
                    if r.bounds_ok { "ok" } else { "VIOLATED" },
                    if r.perturbed { ", perturbed" } else { "" }
                );
            }
            print!("{}", summary.to_json());
        }
        Command::Plot {
            instance,
            plan,
            out,
        } => {
            let inst = read_instance(&instance)?;
            let plan = read_plan_for(&inst, &plan)?;
            emit_svg(&inst, &plan, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::Io(_)) { 2 } else { 1 })
        }
    }
}
