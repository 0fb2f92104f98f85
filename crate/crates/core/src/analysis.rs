//! Fanout and fanin of a plan, the rigidity bounds on them, and the
//! counting quantities behind those bounds.
//!
//! With `m <= n` and generic costs the fanout `t_i` of every source of an
//! optimal plan satisfies
//!
//! ```text
//! ceil(n/m) <= t_i <= floor(n/m) + m - 1,
//! (1/m) sum_i t_i <= n/m + sqrt(n),
//! (1/n) sum_j l_j <= 1 + m/sqrt(n),
//! ```
//!
//! where `l_j` is the fanin of target `j`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::solver::TransportPlan;

/// Relative slack on the right-hand sides of the averaged bounds.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct RigidityReport {
    pub m: usize,
    pub n: usize,
    /// Targets served by each source.
    pub t: Vec<usize>,
    /// Sources feeding each target.
    pub ell: Vec<usize>,
    pub support_size: usize,
    /// `ceil(n/m)`.
    pub lower: usize,
    /// `floor(n/m) + m - 1`.
    pub upper1: usize,
    /// `n/m + sqrt(n)`.
    pub upper2: f64,
    /// `1 + m/sqrt(n)`.
    pub upper3: f64,
    pub bound1_ok: bool,
    pub bound2_ok: bool,
    pub bound3_ok: bool,
}

impl RigidityReport {
    pub fn all_ok(&self) -> bool {
        self.bound1_ok && self.bound2_ok && self.bound3_ok
    }

    pub fn t_min(&self) -> usize {
        self.t.iter().copied().min().unwrap_or(0)
    }

    pub fn t_max(&self) -> usize {
        self.t.iter().copied().max().unwrap_or(0)
    }

    pub fn t_mean(&self) -> f64 {
        self.support_size as f64 / self.m as f64
    }

    pub fn ell_max(&self) -> usize {
        self.ell.iter().copied().max().unwrap_or(0)
    }

    pub fn ell_mean(&self) -> f64 {
        self.support_size as f64 / self.n as f64
    }

    /// `t_max - ceil(n/m)`: how far the worst source exceeds the trivial
    /// lower bound.
    pub fn excess(&self) -> usize {
        self.t_max().saturating_sub(self.lower)
    }
}

pub fn rigidity_report(plan: &TransportPlan) -> RigidityReport {
    let (m, n) = (plan.m(), plan.n());
    let t = plan.fanout();
    let ell = plan.fanin();
    let support_size = plan.support_size();
    let lower = n.div_ceil(m);
    let upper1 = n / m + m - 1;
    let sqrt_n = (n as f64).sqrt();
    let upper2 = n as f64 / m as f64 + sqrt_n;
    let upper3 = 1.0 + m as f64 / sqrt_n;
    // Compare sums against scaled bounds to keep the left sides exact.
    let total = support_size as f64;
    let bound1_ok = t.iter().all(|&ti| lower <= ti && ti <= upper1);
    let bound2_ok = total <= m as f64 * upper2 * (1.0 + BOUND_SLACK);
    let bound3_ok = total <= n as f64 * upper3 * (1.0 + BOUND_SLACK);
    RigidityReport {
        m,
        n,
        t,
        ell,
        support_size,
        lower,
        upper1,
        upper2,
        upper3,
        bound1_ok,
        bound2_ok,
        bound3_ok,
    }
}

/// Splits the targets of source `i` into those it fills to capacity by
/// itself and the rest. Returns `(saturated, partial)`.
pub fn fanout_split(plan: &TransportPlan, i: usize) -> Result<(usize, usize)> {
    if i >= plan.m() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: plan.m(),
        });
    }
    let cap = plan.target_capacity();
    let row = plan.row(i);
    let saturated = row.iter().filter(|f| f.units == cap).count();
    Ok((saturated, row.len() - saturated))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCountReport {
    pub m: usize,
    /// Common-target counts for each source pair `(a, b)`, `a < b`, that
    /// shares at least one target.
    pub pairs: BTreeMap<(usize, usize), u64>,
    /// `sum_j C(l_j, 2)`.
    pub total: u64,
}

impl PairCountReport {
    pub fn count(&self, a: usize, b: usize) -> u64 {
        let key = (a.min(b), a.max(b));
        self.pairs.get(&key).copied().unwrap_or(0)
    }

    pub fn max_pair_count(&self) -> u64 {
        self.pairs.values().copied().max().unwrap_or(0)
    }

    /// `C(m, 2)`.
    pub fn pair_limit(&self) -> u64 {
        (self.m * self.m.saturating_sub(1) / 2) as u64
    }

    pub fn within_pair_limit(&self) -> bool {
        self.total <= self.pair_limit()
    }
}

pub fn pair_counts(plan: &TransportPlan) -> PairCountReport {
    let mut pairs = BTreeMap::new();
    let mut total = 0u64;
    for col in plan.columns() {
        let l = col.len() as u64;
        total += l * l.saturating_sub(1) / 2;
        for (x, &(a, _)) in col.iter().enumerate() {
            for &(b, _) in &col[x + 1..] {
                *pairs.entry((a, b)).or_insert(0) += 1;
            }
        }
    }
    debug_assert_eq!(total, pairs.values().sum::<u64>());
    PairCountReport {
        m: plan.m(),
        pairs,
        total,
    }
}

/// `sum_j l_j <= n + sqrt(n) * sqrt(2 sum_j C(l_j, 2))`, which holds for
/// every plan by Cauchy-Schwarz.
pub fn cauchy_schwarz_holds(report: &RigidityReport, pairs: &PairCountReport) -> bool {
    let lhs = report.ell.iter().sum::<usize>() as f64;
    let n = report.n as f64;
    let rhs = n + n.sqrt() * (2.0 * pairs.total as f64).sqrt();
    lhs <= rhs * (1.0 + BOUND_SLACK)
}
