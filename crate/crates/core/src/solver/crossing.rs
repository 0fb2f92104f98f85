use std::collections::BTreeMap;

use crate::error::Result;
use crate::instance::Instance;

use super::{scaled_cost, TransportPlan};

/// Two sources `i < i2` both sending positive mass to two targets `j < j2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Crossing {
    pub i: usize,
    pub i2: usize,
    pub j: usize,
    pub j2: usize,
}

impl Crossing {
    /// `[c_ij, c_ij2, c_i2j, c_i2j2]`.
    pub fn costs(&self, inst: &Instance) -> [f64; 4] {
        let c = inst.costs();
        [
            c.get(self.i, self.j),
            c.get(self.i, self.j2),
            c.get(self.i2, self.j),
            c.get(self.i2, self.j2),
        ]
    }

    /// Change in scaled cost per unit pushed onto the diagonal
    /// `(i, j), (i2, j2)` and off the anti-diagonal.
    pub fn diagonal_gain(&self, inst: &Instance) -> f64 {
        let [a, b, c, d] = self.costs(inst);
        a + d - b - c
    }
}

fn common_targets(plan: &TransportPlan, i: usize, i2: usize) -> Vec<usize> {
    let (ra, rb) = (plan.row(i), plan.row(i2));
    let (mut x, mut y) = (0, 0);
    let mut out = Vec::new();
    while x < ra.len() && y < rb.len() {
        match ra[x].j.cmp(&rb[y].j) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                out.push(ra[x].j);
                x += 1;
                y += 1;
            }
        }
    }
    out
}

/// All crossings of the plan in lexicographic order.
pub fn find_crossings(plan: &TransportPlan) -> Vec<Crossing> {
    let mut out = Vec::new();
    for i in 0..plan.m() {
        for i2 in i + 1..plan.m() {
            let common = common_targets(plan, i, i2);
            for (a, &j) in common.iter().enumerate() {
                for &j2 in &common[a + 1..] {
                    out.push(Crossing { i, i2, j, j2 });
                }
            }
        }
    }
    out
}

/// Number of crossings without listing them.
pub fn count_crossings(plan: &TransportPlan) -> u64 {
    let mut total = 0u64;
    for i in 0..plan.m() {
        for i2 in i + 1..plan.m() {
            let k = common_targets(plan, i, i2).len() as u64;
            total += k * k.saturating_sub(1) / 2;
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq)]
pub struct UncrossStep {
    pub crossing: Crossing,
    /// True when flow moved onto `(i, j)` and `(i2, j2)`.
    pub onto_diagonal: bool,
    pub units: u64,
    /// Scaled cost after the step.
    pub scaled_cost: f64,
    pub support_size: usize,
}

/// Removes crossings by pushing flow around their 4-cycles; see
/// [`uncross_steps`].
pub fn uncross(inst: &Instance, plan: &TransportPlan) -> Result<TransportPlan> {
    Ok(uncross_steps(inst, plan)?.0)
}

/// Repeatedly takes the lexicographically first crossing and moves as much
/// flow as possible around it in the cost-decreasing direction, zeroing at
/// least one of its four entries. When the two directions cost the same to
/// within `1e-12 * max|c|`, the direction zeroing the lexicographically
/// smallest entry wins. Every step removes support, so the loop runs at
/// most `support_size` times.
pub fn uncross_steps(
    inst: &Instance,
    plan: &TransportPlan,
) -> Result<(TransportPlan, Vec<UncrossStep>)> {
    plan.check_shape(inst.costs())?;
    let tie = 1e-12 * inst.costs().max_abs();
    let mut rows: Vec<BTreeMap<usize, u64>> = (0..plan.m())
        .map(|i| plan.row(i).iter().map(|f| (f.j, f.units)).collect())
        .collect();
    let mut cost = scaled_cost(inst, plan)?;
    let mut support = plan.support_size();
    let mut steps = Vec::new();
    let mut start = 0;
    while let Some(x) = first_crossing(&rows, start) {
        start = x.i;
        let f = |i: usize, j: usize, rows: &[BTreeMap<usize, u64>]| rows[i][&j];
        let (fa, fb, fc, fd) = (
            f(x.i, x.j, &rows),
            f(x.i, x.j2, &rows),
            f(x.i2, x.j, &rows),
            f(x.i2, x.j2, &rows),
        );
        let gain = x.diagonal_gain(inst);
        let onto_diagonal = if gain < -tie {
            true
        } else if gain > tie {
            false
        } else {
            // Off the diagonal zeroes (i, j) iff fa <= fd; otherwise the
            // diagonal push zeroes (i, j2) or (i2, j), both before (i2, j2).
            fa > fd
        };
        let (units, delta) = if onto_diagonal {
            (fb.min(fc), gain)
        } else {
            (fa.min(fd), -gain)
        };
        let (plus, minus) = if onto_diagonal {
            ([(x.i, x.j), (x.i2, x.j2)], [(x.i, x.j2), (x.i2, x.j)])
        } else {
            ([(x.i, x.j2), (x.i2, x.j)], [(x.i, x.j), (x.i2, x.j2)])
        };
        for (i, j) in plus {
            *rows[i].get_mut(&j).expect("crossing entry") += units;
        }
        for (i, j) in minus {
            let e = rows[i].get_mut(&j).expect("crossing entry");
            *e -= units;
            if *e == 0 {
                rows[i].remove(&j);
                support -= 1;
            }
        }
        cost += delta * units as f64;
        steps.push(UncrossStep {
            crossing: x,
            onto_diagonal,
            units,
            scaled_cost: cost,
            support_size: support,
        });
    }
    let out = TransportPlan::new(
        plan.m(),
        plan.n(),
        plan.scale(),
        rows.iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(&j, &f)| (i, j, f))),
    )?;
    Ok((out, steps))
}

/// First crossing whose first source is at or after `from`. Pushes only
/// ever remove support, so source pairs already found crossing-free stay so.
fn first_crossing(rows: &[BTreeMap<usize, u64>], from: usize) -> Option<Crossing> {
    let m = rows.len();
    for i in from..m {
        for i2 in i + 1..m {
            let mut common = rows[i].keys().filter(|j| rows[i2].contains_key(j));
            if let (Some(&j), Some(&j2)) = (common.next(), common.next()) {
                return Some(Crossing { i, i2, j, j2 });
            }
        }
    }
    None
}
