use crate::error::{Error, Result};
use crate::instance::{gcd, lcm, CostMatrix, Instance};

/// One support entry: `units / scale` of mass moves from source `i` to
/// target `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flow {
    pub i: usize,
    pub j: usize,
    pub units: u64,
}

/// A feasible transport plan held as sparse integer flows at a scale `S`
/// that is a multiple of `lcm(m, n)`.
///
/// Construction checks the marginals exactly: every row carries `S/m` units
/// and every column `S/n`. Flows are kept sorted by `(i, j)` and strictly
/// positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransportPlan {
    m: usize,
    n: usize,
    scale: u64,
    flows: Vec<Flow>,
    row_start: Vec<usize>,
}

impl TransportPlan {
    pub fn new<I>(m: usize, n: usize, scale: u64, flows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        if m == 0 || n == 0 {
            return Err(Error::InfeasiblePlan(format!("empty plan shape {m}x{n}")));
        }
        if scale == 0 || !scale.is_multiple_of(lcm(m as u64, n as u64)) {
            return Err(Error::InfeasiblePlan(format!(
                "scale {scale} is not a multiple of lcm({m}, {n})"
            )));
        }
        let mut flows: Vec<Flow> = flows
            .into_iter()
            .filter(|&(_, _, f)| f > 0)
            .map(|(i, j, units)| Flow { i, j, units })
            .collect();
        flows.sort_unstable();
        if let Some(w) = flows
            .windows(2)
            .find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j))
        {
            return Err(Error::InfeasiblePlan(format!(
                "duplicate entry ({}, {})",
                w[0].i, w[0].j
            )));
        }
        if let Some(f) = flows.iter().find(|f| f.i >= m || f.j >= n) {
            return Err(Error::InfeasiblePlan(format!(
                "entry ({}, {}) outside {m}x{n}",
                f.i, f.j
            )));
        }
        let (row_mass, col_cap) = (scale / m as u64, scale / n as u64);
        let mut rows = vec![0u64; m];
        let mut cols = vec![0u64; n];
        for f in &flows {
            rows[f.i] += f.units;
            cols[f.j] += f.units;
        }
        if let Some(i) = rows.iter().position(|&r| r != row_mass) {
            return Err(Error::InfeasiblePlan(format!(
                "source {i} sends {} units, expected {row_mass}",
                rows[i]
            )));
        }
        if let Some(j) = cols.iter().position(|&c| c != col_cap) {
            return Err(Error::InfeasiblePlan(format!(
                "target {j} receives {} units, expected {col_cap}",
                cols[j]
            )));
        }
        let mut row_start = vec![0usize; m + 1];
        for f in &flows {
            row_start[f.i + 1] += 1;
        }
        for i in 0..m {
            row_start[i + 1] += row_start[i];
        }
        Ok(Self {
            m,
            n,
            scale,
            flows,
            row_start,
        })
    }

    /// Plan at the instance's own scale.
    pub fn for_instance<I>(inst: &Instance, flows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        Self::new(inst.m(), inst.n(), inst.scale(), flows)
    }

    pub fn from_dense(scale: u64, rows: &[Vec<u64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("ragged dense plan".into()));
        }
        Self::new(
            m,
            n,
            scale,
            rows.iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &f)| (i, j, f))),
        )
    }

    /// Permutation plan sending source `i` to target `perm[i]`.
    pub fn from_permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        Self::new(
            n,
            n,
            n as u64,
            perm.iter().enumerate().map(|(i, &j)| (i, j, 1)),
        )
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn source_mass(&self) -> u64 {
        self.scale / self.m as u64
    }

    pub fn target_capacity(&self) -> u64 {
        self.scale / self.n as u64
    }

    pub fn flows(&self) -> &[Flow] {
        &self.flows
    }

    pub fn support_size(&self) -> usize {
        self.flows.len()
    }

    /// Support entries of source `i`, sorted by target.
    pub fn row(&self, i: usize) -> &[Flow] {
        &self.flows[self.row_start[i]..self.row_start[i + 1]]
    }

    /// For each target, the `(source, units)` pairs feeding it, sorted by
    /// source.
    pub fn columns(&self) -> Vec<Vec<(usize, u64)>> {
        let mut cols = vec![Vec::new(); self.n];
        for f in &self.flows {
            cols[f.j].push((f.i, f.units));
        }
        cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        if i >= self.m {
            return 0;
        }
        let row = self.row(i);
        row.binary_search_by_key(&j, |f| f.j)
            .map_or(0, |k| row[k].units)
    }

    /// Mass of entry `(i, j)` as a fraction `num / den` in lowest terms.
    pub fn mass(&self, i: usize, j: usize) -> (u64, u64) {
        reduce(self.get(i, j), self.scale)
    }

    /// Number of targets each source sends mass to.
    pub fn fanout(&self) -> Vec<usize> {
        (0..self.m).map(|i| self.row(i).len()).collect()
    }

    /// Number of sources each target receives mass from.
    pub fn fanin(&self) -> Vec<usize> {
        let mut ell = vec![0usize; self.n];
        for f in &self.flows {
            ell[f.j] += 1;
        }
        ell
    }

    /// True when `m = n` and every source sends everything to one target.
    pub fn is_permutation(&self) -> bool {
        self.m == self.n
            && self.flows.len() == self.n
            && self.flows.iter().all(|f| f.units == self.target_capacity())
    }

    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        let mut d = vec![vec![0u64; self.n]; self.m];
        for f in &self.flows {
            d[f.i][f.j] = f.units;
        }
        d
    }

    /// Same mass distribution expressed at `factor` times the scale.
    pub fn rescaled(&self, factor: u64) -> Result<Self> {
        Self::new(
            self.m,
            self.n,
            self.scale * factor,
            self.flows.iter().map(|f| (f.i, f.j, f.units * factor)),
        )
    }

    pub(crate) fn check_shape(&self, costs: &CostMatrix) -> Result<()> {
        if (self.m, self.n) != (costs.m(), costs.n()) {
            return Err(Error::DimensionMismatch(format!(
                "plan is {}x{}, instance is {}x{}",
                self.m,
                self.n,
                costs.m(),
                costs.n()
            )));
        }
        Ok(())
    }
}

pub(crate) fn reduce(num: u64, den: u64) -> (u64, u64) {
    if num == 0 {
        return (0, 1);
    }
    let g = gcd(num, den);
    (num / g, den / g)
}

/// `sum_ij c_ij f_ij`, the cost at the plan's integer scale.
pub fn scaled_cost(inst: &Instance, plan: &TransportPlan) -> Result<f64> {
    plan.check_shape(inst.costs())?;
    Ok(plan
        .flows()
        .iter()
        .map(|f| inst.costs().get(f.i, f.j) * f.units as f64)
        .sum())
}

/// Total transport cost `sum_ij c_ij P_ij` with `P_ij = f_ij / S`.
pub fn objective(inst: &Instance, plan: &TransportPlan) -> Result<f64> {
    Ok(scaled_cost(inst, plan)? / plan.scale() as f64)
}
