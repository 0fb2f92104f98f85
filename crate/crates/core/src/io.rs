//! File formats: instance JSON, plan CSV, stats JSON, decomposition JSON.
//!
//! Every writer is deterministic, so identical values give identical bytes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::RigidityReport;
use crate::constructions::{PermutationDecomposition, PermutationTerm};
use crate::error::{Error, Result};
use crate::instance::{lcm, CostMatrix, Geometry, Instance, PointCloud, Side};
use crate::solver::TransportPlan;

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    m: usize,
    n: usize,
    costs: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    geometry: Option<GeometryFile>,
}

#[derive(Serialize, Deserialize)]
struct GeometryFile {
    sources: Vec<Vec<f64>>,
    targets: Vec<Vec<f64>>,
    p: f64,
}

pub fn instance_to_json(inst: &Instance) -> String {
    let file = InstanceFile {
        m: inst.m(),
        n: inst.n(),
        costs: inst.costs().to_rows(),
        geometry: inst.geometry().map(|g| GeometryFile {
            sources: g.sources.points().to_vec(),
            targets: g.targets.points().to_vec(),
            p: g.p,
        }),
    };
    let mut s = serde_json::to_string(&file).expect("instance serializes");
    s.push('\n');
    s
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let costs = CostMatrix::from_rows(file.costs)?;
    if (costs.m(), costs.n()) != (file.m, file.n) {
        return Err(Error::DimensionMismatch(format!(
            "header says {}x{}, costs are {}x{}",
            file.m,
            file.n,
            costs.m(),
            costs.n()
        )));
    }
    match file.geometry {
        None => Ok(Instance::from_costs(costs)),
        Some(g) => {
            let geometry = Geometry {
                sources: PointCloud::new(g.sources, Side::Source)?,
                targets: PointCloud::new(g.targets, Side::Target)?,
                p: g.p,
            };
            Instance::with_geometry(costs, geometry)
        }
    }
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<()> {
    fs::write(path, instance_to_json(inst))?;
    Ok(())
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    instance_from_json(&fs::read_to_string(path)?)
}

pub const PLAN_CSV_HEADER: &str = "i,j,num,den";

/// One line per support entry in `(i, j)` order; mass `num/den` in lowest
/// terms.
pub fn plan_to_csv(plan: &TransportPlan) -> String {
    let mut s = String::with_capacity(16 * (plan.support_size() + 1));
    s.push_str(PLAN_CSV_HEADER);
    s.push('\n');
    for f in plan.flows() {
        let (num, den) = plan.mass(f.i, f.j);
        s.push_str(&format!("{},{},{},{}\n", f.i, f.j, num, den));
    }
    s
}

/// Parses a plan, taking `m` and `n` from the largest indices. The scale is
/// the smallest valid one: `lcm` of `lcm(m, n)` and every denominator.
pub fn plan_from_csv(text: &str) -> Result<TransportPlan> {
    let rows = parse_plan_rows(text)?;
    let m = rows.iter().map(|r| r.0 + 1).max().unwrap_or(0);
    let n = rows.iter().map(|r| r.1 + 1).max().unwrap_or(0);
    assemble(m, n, &rows)
}

/// Parses a plan for a known `m x n` instance.
pub fn plan_from_csv_for(inst: &Instance, text: &str) -> Result<TransportPlan> {
    assemble(inst.m(), inst.n(), &parse_plan_rows(text)?)
}

fn parse_plan_rows(text: &str) -> Result<Vec<(usize, usize, u64, u64)>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == PLAN_CSV_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header {PLAN_CSV_HEADER:?}, found {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!("line {}: expected 4 fields", k + 2)));
        }
        let num = |x: &str| {
            x.trim()
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("line {}: {x:?}: {e}", k + 2)))
        };
        let (i, j) = (num(fields[0])? as usize, num(fields[1])? as usize);
        let (a, b) = (num(fields[2])?, num(fields[3])?);
        if b == 0 {
            return Err(Error::Parse(format!("line {}: zero denominator", k + 2)));
        }
        rows.push((i, j, a, b));
    }
    Ok(rows)
}

fn assemble(m: usize, n: usize, rows: &[(usize, usize, u64, u64)]) -> Result<TransportPlan> {
    if m == 0 || n == 0 {
        return Err(Error::Parse("plan has no entries".into()));
    }
    let scale = rows
        .iter()
        .fold(lcm(m as u64, n as u64), |s, r| lcm(s, r.3));
    TransportPlan::new(
        m,
        n,
        scale,
        rows.iter().map(|&(i, j, a, b)| (i, j, a * (scale / b))),
    )
}

pub fn write_plan(path: &Path, plan: &TransportPlan) -> Result<()> {
    fs::write(path, plan_to_csv(plan))?;
    Ok(())
}

pub fn read_plan(path: &Path) -> Result<TransportPlan> {
    plan_from_csv(&fs::read_to_string(path)?)
}

pub fn read_plan_for(inst: &Instance, path: &Path) -> Result<TransportPlan> {
    plan_from_csv_for(inst, &fs::read_to_string(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundFlags {
    pub b1: bool,
    pub b2: bool,
    pub b3: bool,
}

/// Per-plan record written next to each plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanStats {
    pub m: usize,
    pub n: usize,
    pub support_size: usize,
    pub t: Vec<usize>,
    pub ell: Vec<usize>,
    pub t_min: usize,
    pub t_max: usize,
    pub t_mean: f64,
    pub ell_mean: f64,
    pub bounds: BoundFlags,
    pub crossings: usize,
}

impl PlanStats {
    pub fn new(report: &RigidityReport, crossings: usize) -> Self {
        Self {
            m: report.m,
            n: report.n,
            support_size: report.support_size,
            t: report.t.clone(),
            ell: report.ell.clone(),
            t_min: report.t_min(),
            t_max: report.t_max(),
            t_mean: report.t_mean(),
            ell_mean: report.ell_mean(),
            bounds: BoundFlags {
                b1: report.bound1_ok,
                b2: report.bound2_ok,
                b3: report.bound3_ok,
            },
            crossings,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("stats serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Serialize, Deserialize)]
struct DecompositionFile {
    terms: Vec<TermFile>,
}

#[derive(Serialize, Deserialize)]
struct TermFile {
    perm: Vec<usize>,
    num: u64,
    den: u64,
}

pub fn decomposition_to_json(d: &PermutationDecomposition) -> String {
    let file = DecompositionFile {
        terms: d
            .terms
            .iter()
            .map(|t| TermFile {
                perm: t.perm.clone(),
                num: t.num,
                den: t.den,
            })
            .collect(),
    };
    let mut s = serde_json::to_string(&file).expect("decomposition serializes");
    s.push('\n');
    s
}

pub fn decomposition_from_json(text: &str) -> Result<PermutationDecomposition> {
    let file: DecompositionFile = serde_json::from_str(text)?;
    Ok(PermutationDecomposition {
        terms: file
            .terms
            .into_iter()
            .map(|t| PermutationTerm {
                perm: t.perm,
                num: t.num,
                den: t.den,
            })
            .collect(),
    })
}
