//! Transport instances: point clouds, dense cost matrices, and the
//! genericity condition on costs.
//!
//! An [`Instance`] moves `m` sources of mass `1/m` each onto `n` targets of
//! capacity `1/n` each. All masses are carried as integers at the scale
//! `S = lcm(m, n)`, so a source holds `S/m` units and a target takes `S/n`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Default relative tolerance for the genericity scan.
pub const DEFAULT_GENERICITY_TOL: f64 = 1e-12;
/// Default relative magnitude of the cost jitter applied by [`perturb`].
pub const DEFAULT_PERTURB_ETA: f64 = 1e-9;
/// Above this many quadruples (`m²n²/4`) [`ScanMode::Auto`] samples.
pub const FULL_SCAN_BUDGET: f64 = 1e8;
/// Sample size used by [`ScanMode::Auto`] on large instances.
pub const DEFAULT_SAMPLE_BUDGET: u64 = 10_000_000;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Read access to an `m x n` cost table. The solver is written against this
/// so that expanded problems need not be materialized.
pub trait Costs {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn cost(&self, i: usize, j: usize) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Source,
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// Each coordinate uniform in `[0, 1]`.
    UniformSquare,
    /// Each coordinate standard normal.
    Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    side: Side,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>, side: Side) -> Result<Self> {
        let dim = match points.first() {
            Some(p) => p.len(),
            None => return Err(Error::InvalidInstance("empty point cloud".into())),
        };
        if dim == 0 {
            return Err(Error::InvalidInstance(
                "points must have dimension >= 1".into(),
            ));
        }
        if let Some(k) = points.iter().position(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "point {k} has dimension {}, expected {dim}",
                points[k].len()
            )));
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInstance("non-finite coordinate".into()));
        }
        Ok(Self { points, side })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn side(&self) -> Side {
        self.side
    }
}

/// Dense row-major cost matrix, sources as rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    m: usize,
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(m: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidInstance(format!(
                "need m, n >= 1, got {m}x{n}"
            )));
        }
        if data.len() != m * n {
            return Err(Error::DimensionMismatch(format!(
                "{} cost entries for a {m}x{n} matrix",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInstance(format!(
                "cost ({}, {}) is not finite",
                k / n,
                k % n
            )));
        }
        Ok(Self { m, n, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} entries, expected {n}",
                rows[i].len()
            )));
        }
        Self::new(m, n, rows.into_iter().flatten().collect())
    }

    pub fn zeros(m: usize, n: usize) -> Result<Self> {
        Self::new(m, n, vec![0.0; m * n])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    pub fn transpose(&self) -> CostMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.n {
            data.extend((0..self.m).map(|i| self.get(i, j)));
        }
        CostMatrix {
            m: self.n,
            n: self.m,
            data,
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }
}

impl Costs for CostMatrix {
    fn rows(&self) -> usize {
        self.m
    }

    fn cols(&self) -> usize {
        self.n
    }

    #[inline]
    fn cost(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

/// Point positions behind a cost matrix built as `|x - y|^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub sources: PointCloud,
    pub targets: PointCloud,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    costs: CostMatrix,
    geometry: Option<Geometry>,
    scale: u64,
}

impl Instance {
    pub fn from_costs(costs: CostMatrix) -> Self {
        let scale = lcm(costs.m as u64, costs.n as u64);
        Self {
            costs,
            geometry: None,
            scale,
        }
    }

    /// Attach geometry, checking it reproduces the costs to relative 1e-12.
    pub fn with_geometry(costs: CostMatrix, geometry: Geometry) -> Result<Self> {
        if geometry.sources.len() != costs.m || geometry.targets.len() != costs.n {
            return Err(Error::DimensionMismatch(format!(
                "geometry has {}x{} points, costs are {}x{}",
                geometry.sources.len(),
                geometry.targets.len(),
                costs.m,
                costs.n
            )));
        }
        if geometry.sources.dim() != geometry.targets.dim() {
            return Err(Error::DimensionMismatch(format!(
                "source dimension {} vs target dimension {}",
                geometry.sources.dim(),
                geometry.targets.dim()
            )));
        }
        if !(geometry.p > 0.0 && geometry.p.is_finite()) {
            return Err(Error::InvalidInstance(format!(
                "exponent p = {} must be > 0",
                geometry.p
            )));
        }
        for (i, x) in geometry.sources.points().iter().enumerate() {
            for (j, y) in geometry.targets.points().iter().enumerate() {
                let expected = ground_cost(x, y, geometry.p);
                let got = costs.get(i, j);
                if (got - expected).abs() > 1e-12 * got.abs().max(expected.abs()) {
                    return Err(Error::InvalidInstance(format!(
                        "cost ({i}, {j}) = {got} does not match |x - y|^p = {expected}"
                    )));
                }
            }
        }
        let mut inst = Self::from_costs(costs);
        inst.geometry = Some(geometry);
        Ok(inst)
    }

    pub fn costs(&self) -> &CostMatrix {
        &self.costs
    }

    pub fn geometry(&self) -> Option<&Geometry> {
        self.geometry.as_ref()
    }

    pub fn m(&self) -> usize {
        self.costs.m
    }

    pub fn n(&self) -> usize {
        self.costs.n
    }

    /// `lcm(m, n)`.
    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// Units of mass held by each source at this instance's scale.
    pub fn source_mass(&self) -> u64 {
        self.scale / self.m() as u64
    }

    /// Units of capacity of each target at this instance's scale.
    pub fn target_capacity(&self) -> u64 {
        self.scale / self.n() as u64
    }
}

fn ground_cost(x: &[f64], y: &[f64], p: f64) -> f64 {
    let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    if p == 2.0 {
        sq
    } else if p == 1.0 {
        sq.sqrt()
    } else {
        sq.sqrt().powf(p)
    }
}

pub(crate) fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gen_points(dist: Distribution, count: usize, dim: usize, seed: u64) -> Result<PointCloud> {
    gen_points_on(dist, count, dim, seed, 0, Side::Source)
}

/// Like [`gen_points`], drawing from an independent RNG stream so that
/// source and target clouds for one seed do not coincide.
pub fn gen_points_on(
    dist: Distribution,
    count: usize,
    dim: usize,
    seed: u64,
    stream: u64,
    side: Side,
) -> Result<PointCloud> {
    if count == 0 || dim == 0 {
        return Err(Error::InvalidInstance(format!(
            "need count, dim >= 1, got count = {count}, dim = {dim}"
        )));
    }
    let mut rng = seeded_rng(seed, stream);
    let points = (0..count)
        .map(|_| {
            (0..dim)
                .map(|_| match dist {
                    Distribution::UniformSquare => rng.random::<f64>(),
                    Distribution::Gaussian => rng.sample::<f64, _>(StandardNormal),
                })
                .collect()
        })
        .collect();
    PointCloud::new(points, side)
}

/// Sources and targets drawn from the same distribution with one seed.
pub fn gen_point_instance(
    dist: Distribution,
    m: usize,
    n: usize,
    dim: usize,
    p: f64,
    seed: u64,
) -> Result<Instance> {
    let xs = gen_points_on(dist, m, dim, seed, 0, Side::Source)?;
    let ys = gen_points_on(dist, n, dim, seed, 1, Side::Target)?;
    cost_from_points(xs, ys, p)
}

pub fn cost_from_points(sources: PointCloud, targets: PointCloud, p: f64) -> Result<Instance> {
    if sources.dim() != targets.dim() {
        return Err(Error::DimensionMismatch(format!(
            "source dimension {} vs target dimension {}",
            sources.dim(),
            targets.dim()
        )));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidInstance(format!(
            "exponent p = {p} must be > 0"
        )));
    }
    let data = sources
        .points()
        .iter()
        .flat_map(|x| targets.points().iter().map(move |y| ground_cost(x, y, p)))
        .collect();
    let costs = CostMatrix::new(sources.len(), targets.len(), data)?;
    let scale = lcm(costs.m as u64, costs.n as u64);
    Ok(Instance {
        costs,
        geometry: Some(Geometry {
            sources,
            targets,
            p,
        }),
        scale,
    })
}

/// Costs iid uniform in `[0, 1)`.
pub fn gen_random_costs(m: usize, n: usize, seed: u64) -> Result<Instance> {
    let mut rng = seeded_rng(seed, 0);
    let data = (0..m * n).map(|_| rng.random::<f64>()).collect();
    Ok(Instance::from_costs(CostMatrix::new(m, n, data)?))
}

/// Adds independent jitter uniform in `[0, eta * max|c|)` to every cost.
/// An all-zero matrix is jittered on an absolute scale of 1. Geometry is
/// dropped.
pub fn perturb(inst: &Instance, eta: f64, seed: u64) -> Result<Instance> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidInstance(format!(
            "perturbation eta = {eta} must be > 0"
        )));
    }
    let max = inst.costs.max_abs();
    let width = eta * if max > 0.0 { max } else { 1.0 };
    let mut rng = seeded_rng(seed, 7);
    let data = inst
        .costs
        .as_slice()
        .iter()
        .map(|c| c + width * rng.random::<f64>())
        .collect();
    Ok(Instance::from_costs(CostMatrix::new(
        inst.m(),
        inst.n(),
        data,
    )?))
}

/// A quadruple of sources `i < j` and targets `k < l` on which
/// `c_ik + c_jl` and `c_il + c_jk` (nearly) coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quadruple {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanMode {
    /// Full scan up to [`FULL_SCAN_BUDGET`] quadruples, otherwise a sample of
    /// [`DEFAULT_SAMPLE_BUDGET`] with seed 0.
    Auto,
    Full,
    Sampled {
        budget: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericityReport {
    pub generic: bool,
    pub violations: Vec<Quadruple>,
    /// Relative tolerance; the absolute threshold is `tolerance * max|c|`.
    pub tolerance: f64,
    pub sampled: bool,
    /// Quadruples examined.
    pub checked: u64,
}

fn swap_defect(c: &CostMatrix, q: Quadruple) -> f64 {
    c.get(q.i, q.k) + c.get(q.j, q.l) - c.get(q.i, q.l) - c.get(q.j, q.k)
}

pub fn genericity_check(inst: &Instance, tol: f64, mode: ScanMode) -> GenericityReport {
    let (m, n) = (inst.m(), inst.n());
    let mode = match mode {
        ScanMode::Auto => {
            if (m as f64).powi(2) * (n as f64).powi(2) / 4.0 > FULL_SCAN_BUDGET {
                ScanMode::Sampled {
                    budget: DEFAULT_SAMPLE_BUDGET,
                    seed: 0,
                }
            } else {
                ScanMode::Full
            }
        }
        other => other,
    };
    let c = &inst.costs;
    let threshold = tol.max(0.0) * c.max_abs();
    let (violations, checked, sampled) = match mode {
        ScanMode::Sampled { budget, seed } if m >= 2 && n >= 2 => {
            let mut rng = seeded_rng(seed, 3);
            let mut found = Vec::new();
            for _ in 0..budget {
                let (i, j) = distinct_pair(&mut rng, m);
                let (k, l) = distinct_pair(&mut rng, n);
                let q = Quadruple { i, j, k, l };
                if swap_defect(c, q).abs() <= threshold {
                    found.push(q);
                }
            }
            found.sort_unstable();
            found.dedup();
            (found, budget, true)
        }
        ScanMode::Sampled { .. } => (Vec::new(), 0, true),
        _ => full_scan(c, threshold),
    };
    GenericityReport {
        generic: violations.is_empty(),
        violations,
        tolerance: tol,
        sampled,
        checked,
    }
}

fn distinct_pair(rng: &mut ChaCha8Rng, len: usize) -> (usize, usize) {
    let a = rng.random_range(0..len);
    let mut b = rng.random_range(0..len - 1);
    if b >= a {
        b += 1;
    }
    (a.min(b), a.max(b))
}

/// For each source pair the defect of `(k, l)` is `d_k - d_l` with
/// `d = c_i - c_j`, so near-equal entries of `d` are found with a sorted
/// sliding window instead of all `n²` target pairs. Candidates are then
/// confirmed with the direct four-term sum.
fn full_scan(c: &CostMatrix, threshold: f64) -> (Vec<Quadruple>, u64, bool) {
    let (m, n) = (c.m(), c.n());
    let window = threshold + 8.0 * f64::EPSILON * c.max_abs();
    let mut found = Vec::new();
    let mut diff: Vec<(f64, usize)> = Vec::with_capacity(n);
    for i in 0..m {
        for j in i + 1..m {
            diff.clear();
            diff.extend((0..n).map(|k| (c.get(i, k) - c.get(j, k), k)));
            diff.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for a in 0..n {
                for b in a + 1..n {
                    if diff[b].0 - diff[a].0 > window {
                        break;
                    }
                    let (k, l) = (diff[a].1.min(diff[b].1), diff[a].1.max(diff[b].1));
                    let q = Quadruple { i, j, k, l };
                    if swap_defect(c, q).abs() <= threshold {
                        found.push(q);
                    }
                }
            }
        }
    }
    found.sort_unstable();
    let pairs = |x: usize| (x * x.saturating_sub(1) / 2) as u64;
    (found, pairs(m) * pairs(n), false)
}
