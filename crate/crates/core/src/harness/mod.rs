//! Experiment presets and their on-disk artifacts.
//!
//! Each seed runs independently: generate, check genericity (perturbing once
//! if needed), solve, then write `seed<k>.plan.csv`, `seed<k>.stats.json`,
//! `seed<k>.instance.json` and, for point instances, `seed<k>.svg`. The
//! aggregate goes to `summary.json`.

mod svg;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use svg::{emit_svg, plan_svg, VIEWPORT};

use crate::analysis::{pair_counts, rigidity_report};
use crate::constructions::{gcd_construct, DEFAULT_LCM_GUARD};
use crate::error::{Error, Result};
use crate::instance::{
    gen_point_instance, gen_random_costs, genericity_check, perturb, Distribution, Instance,
    ScanMode, DEFAULT_GENERICITY_TOL, DEFAULT_PERTURB_ETA,
};
use crate::io::{write_instance, write_plan, PlanStats};
use crate::solver::{count_crossings, objective, solve_with_stats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig1,
    Fig2,
    Sec22,
    Custom,
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Sec22 => "sec22",
            Preset::Custom => "custom",
        })
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Preset::Fig1),
            "fig2" => Ok(Preset::Fig2),
            "sec22" => Ok(Preset::Sec22),
            "custom" => Ok(Preset::Custom),
            _ => Err(Error::Parse(format!("unknown preset {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostModel {
    /// Points in the plane, cost `|x - y|^p`.
    Points { dist: Distribution, p: f64 },
    /// I.i.d. uniform costs in `[0, 1)`.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub preset: Preset,
    pub m: usize,
    pub n: usize,
    pub costs: CostModel,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    /// Also run the gcd construction (fig1).
    pub gcd: bool,
}

pub fn default_seeds() -> Vec<u64> {
    (0..10).collect()
}

impl ExperimentSpec {
    /// `m = 2l` sources and `n = 3l` targets in the unit square, `p = 1`.
    pub fn fig1(ell: usize, seeds: Vec<u64>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            preset: Preset::Fig1,
            m: 2 * ell,
            n: 3 * ell,
            costs: CostModel::Points {
                dist: Distribution::UniformSquare,
                p: 1.0,
            },
            seeds,
            out_dir: out_dir.into(),
            gcd: true,
        }
    }

    /// 50 sources, 2222 targets, squared distance.
    pub fn fig2(seeds: Vec<u64>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            preset: Preset::Fig2,
            m: 50,
            n: 2222,
            costs: CostModel::Points {
                dist: Distribution::UniformSquare,
                p: 2.0,
            },
            seeds,
            out_dir: out_dir.into(),
            gcd: false,
        }
    }

    /// 7 sources, 2000 targets, random costs.
    pub fn sec22(seeds: Vec<u64>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            preset: Preset::Sec22,
            m: 7,
            n: 2000,
            costs: CostModel::Random,
            seeds,
            out_dir: out_dir.into(),
            gcd: false,
        }
    }

    pub fn custom(
        m: usize,
        n: usize,
        costs: CostModel,
        seeds: Vec<u64>,
        out_dir: impl Into<PathBuf>,
    ) -> Self {
        Self {
            preset: Preset::Custom,
            m,
            n,
            costs,
            seeds,
            out_dir: out_dir.into(),
            gcd: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidInstance(format!(
                "empty shape {}x{}",
                self.m, self.n
            )));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidInstance("no seeds".into()));
        }
        let forced = match self.preset {
            Preset::Fig1 => self.m * 3 == self.n * 2 && self.m.is_multiple_of(2),
            Preset::Fig2 => (self.m, self.n) == (50, 2222),
            Preset::Sec22 => (self.m, self.n) == (7, 2000),
            Preset::Custom => true,
        };
        if !forced {
            return Err(Error::InvalidInstance(format!(
                "preset {} does not allow {}x{}",
                self.preset, self.m, self.n
            )));
        }
        Ok(())
    }

    pub fn generate(&self, seed: u64) -> Result<Instance> {
        match self.costs {
            CostModel::Points { dist, p } => gen_point_instance(dist, self.m, self.n, 2, p, seed),
            CostModel::Random => gen_random_costs(self.m, self.n, seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcdRecord {
    pub t_max: usize,
    pub ell_max: usize,
    pub objective: f64,
    /// Relative gap to the solver's objective.
    pub rel_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub seed: u64,
    pub genericity_sampled: bool,
    pub genericity_violations: usize,
    pub perturbed: bool,
    pub pivots: u64,
    pub objective: f64,
    pub support_size: usize,
    pub t_min: usize,
    pub t_max: usize,
    pub ell_max: usize,
    pub ell_mean: f64,
    /// `t_max - ceil(n/m)`.
    pub excess: usize,
    pub bounds_ok: bool,
    pub crossings: u64,
    /// `sum_j C(l_j, 2)` against `C(m, 2)`.
    pub pair_total: u64,
    pub pair_limit: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gcd: Option<GcdRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub preset: Preset,
    pub m: usize,
    pub n: usize,
    pub seeds: Vec<SeedRecord>,
    /// Number of seeds per value of `t_max - ceil(n/m)`.
    pub excess_histogram: BTreeMap<usize, usize>,
}

impl ExperimentSummary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    spec.validate()?;
    fs::create_dir_all(&spec.out_dir)?;
    let seeds = spec
        .seeds
        .par_iter()
        .map(|&seed| run_seed(spec, seed))
        .collect::<Result<Vec<_>>>()?;
    let mut excess_histogram = BTreeMap::new();
    for r in &seeds {
        *excess_histogram.entry(r.excess).or_insert(0) += 1;
    }
    let summary = ExperimentSummary {
        preset: spec.preset,
        m: spec.m,
        n: spec.n,
        seeds,
        excess_histogram,
    };
    fs::write(spec.out_dir.join("summary.json"), summary.to_json())?;
    Ok(summary)
}

fn artifact(dir: &Path, seed: u64, ext: &str) -> PathBuf {
    dir.join(format!("seed{seed}.{ext}"))
}

fn run_seed(spec: &ExperimentSpec, seed: u64) -> Result<SeedRecord> {
    let generated = spec.generate(seed)?;
    let report = genericity_check(&generated, DEFAULT_GENERICITY_TOL, ScanMode::Auto);
    let perturbed = !report.generic;
    let inst = if perturbed {
        perturb(&generated, DEFAULT_PERTURB_ETA, seed)?
    } else {
        generated.clone()
    };
    let (plan, stats) = solve_with_stats(&inst);
    let rigidity = rigidity_report(&plan);
    let crossings = count_crossings(&plan);
    let pairs = pair_counts(&plan);
    let obj = objective(&inst, &plan)?;

    let gcd = if spec.gcd {
        let g = gcd_construct(&inst, DEFAULT_LCM_GUARD)?;
        let r = rigidity_report(&g);
        let o = objective(&inst, &g)?;
        Some(GcdRecord {
            t_max: r.t_max(),
            ell_max: r.ell_max(),
            objective: o,
            rel_gap: (o - obj).abs() / obj.abs().max(f64::MIN_POSITIVE),
        })
    } else {
        None
    };

    let dir = &spec.out_dir;
    write_plan(&artifact(dir, seed, "plan.csv"), &plan)?;
    fs::write(
        artifact(dir, seed, "stats.json"),
        PlanStats::new(&rigidity, crossings as usize).to_json(),
    )?;
    write_instance(&artifact(dir, seed, "instance.json"), &inst)?;
    // A perturbed instance has no geometry; draw over the original points.
    if generated.geometry().is_some() {
        emit_svg(&generated, &plan, &artifact(dir, seed, "svg"))?;
    }

    Ok(SeedRecord {
        seed,
        genericity_sampled: report.sampled,
        genericity_violations: report.violations.len(),
        perturbed,
        pivots: stats.pivots,
        objective: obj,
        support_size: rigidity.support_size,
        t_min: rigidity.t_min(),
        t_max: rigidity.t_max(),
        ell_max: rigidity.ell_max(),
        ell_mean: rigidity.ell_mean(),
        excess: rigidity.excess(),
        bounds_ok: rigidity.all_ok(),
        crossings,
        pair_total: pairs.total,
        pair_limit: pairs.pair_limit(),
        gcd,
    })
}
