//! Exhaustive enumeration of the integral plans of tiny instances.
//!
//! Every integer matrix with row sums `S/m` and column sums `S/n` is visited
//! once, filling rows left to right and pruning on the remaining capacity of
//! each column. The count grows quickly; `m * S <= 30` keeps it small.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::solver::TransportPlan;

pub const DEFAULT_ORACLE_CAP: u64 = 10_000_000;

/// Relative window, against `max(|min|, max|c|)`, for calling a plan optimal.
pub const ORACLE_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Minimum of `sum c_ij f_ij` at scale `S` (not divided by `S`).
    pub min_cost: f64,
    pub optimal_plans: Vec<TransportPlan>,
    pub enumerated_count: u64,
}

/// Calls `visit` on every integral plan of `inst` as a dense `m x n` table
/// at scale `S`. Returns the number visited, or `CapExceeded` as soon as
/// more than `cap` would be produced.
pub fn enumerate_plans<F>(inst: &Instance, cap: u64, mut visit: F) -> Result<u64>
where
    F: FnMut(&[Vec<u64>]),
{
    if cap == 0 {
        return Err(Error::InvalidInstance(
            "enumeration cap must be positive".into(),
        ));
    }
    let (m, n) = (inst.m(), inst.n());
    let mut walk = Walk {
        m,
        n,
        row_sum: inst.source_mass(),
        table: vec![vec![0; n]; m],
        room: vec![inst.target_capacity(); n],
        count: 0,
        cap,
    };
    walk.cell(0, 0, walk.row_sum, &mut visit)?;
    Ok(walk.count)
}

struct Walk {
    m: usize,
    n: usize,
    row_sum: u64,
    table: Vec<Vec<u64>>,
    room: Vec<u64>,
    count: u64,
    cap: u64,
}

impl Walk {
    fn cell<F: FnMut(&[Vec<u64>])>(
        &mut self,
        i: usize,
        j: usize,
        left: u64,
        visit: &mut F,
    ) -> Result<()> {
        if i == self.m {
            // Row sums are exact by construction and the column totals then
            // force every column to be full.
            self.count += 1;
            if self.count > self.cap {
                return Err(Error::CapExceeded(self.cap));
            }
            visit(&self.table);
            return Ok(());
        }
        if j + 1 == self.n {
            if left > self.room[j] {
                return Ok(());
            }
            self.place(i, j, left);
            let r = self.cell(i + 1, 0, self.row_sum, visit);
            self.place(i, j, 0);
            return r;
        }
        // The rest of the row must fit into the columns to the right.
        let after: u64 = self.room[j + 1..].iter().sum();
        let lo = left.saturating_sub(after);
        let hi = left.min(self.room[j]);
        for x in lo..=hi {
            self.place(i, j, x);
            self.cell(i, j + 1, left - x, visit)?;
        }
        self.place(i, j, 0);
        Ok(())
    }

    fn place(&mut self, i: usize, j: usize, x: u64) {
        self.room[j] += self.table[i][j];
        self.table[i][j] = x;
        self.room[j] -= x;
    }
}

/// Exact minimum of the scaled cost over all integral plans, with every plan
/// attaining it.
pub fn brute_force_solve(inst: &Instance, cap: u64) -> Result<OracleResult> {
    let c = inst.costs();
    let mut costs = Vec::new();
    let mut tables = Vec::new();
    let count = enumerate_plans(inst, cap, |t| {
        let mut sum = 0.0;
        for (i, row) in t.iter().enumerate() {
            for (j, &f) in row.iter().enumerate() {
                if f > 0 {
                    sum += c.get(i, j) * f as f64;
                }
            }
        }
        costs.push(sum);
        tables.push(t.to_vec());
    })?;
    let min_cost = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let window = ORACLE_REL_TOL * min_cost.abs().max(c.max_abs());
    let mut optimal_plans = Vec::new();
    for (sum, t) in costs.iter().zip(&tables) {
        if *sum - min_cost <= window {
            optimal_plans.push(TransportPlan::from_dense(inst.scale(), t)?);
        }
    }
    Ok(OracleResult {
        min_cost,
        optimal_plans,
        enumerated_count: count,
    })
}
