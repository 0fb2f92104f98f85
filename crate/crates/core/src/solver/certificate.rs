use crate::error::{Error, Result};
use crate::instance::Instance;

use super::TransportPlan;

pub const DEFAULT_DUAL_TOL: f64 = 1e-9;

/// Potentials certifying a plan optimal by complementary slackness.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Relative slack; the absolute slack is `tolerance * max|c|`.
    pub tolerance: f64,
}

impl DualCertificate {
    pub fn reduced_cost(&self, inst: &Instance, i: usize, j: usize) -> f64 {
        inst.costs().get(i, j) - self.u[i] - self.v[j]
    }
}

/// Attempts to certify `plan` optimal.
///
/// Potentials are propagated along the support forest with one node per
/// component pinned to 0. A degenerate plan has several components whose
/// relative offsets are free; those offsets are then chosen by solving the
/// difference constraints `a_p - a_q <= min reduced cost between p and q`
/// with Bellman-Ford. `None` means no dual-feasible completion exists within
/// `tol * max|c|`.
pub fn verify_optimality(
    inst: &Instance,
    plan: &TransportPlan,
    tol: f64,
) -> Result<Option<DualCertificate>> {
    plan.check_shape(inst.costs())?;
    let (m, n) = (plan.m(), plan.n());
    let c = inst.costs();
    let slack = tol.max(0.0) * c.max_abs();

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m + n];
    for f in plan.flows() {
        adj[f.i].push(m + f.j);
        adj[m + f.j].push(f.i);
    }
    let mut comp = vec![usize::MAX; m + n];
    let mut pot = vec![0.0f64; m + n];
    let mut ncomp = 0;
    for root in 0..m + n {
        if comp[root] != usize::MAX {
            continue;
        }
        comp[root] = ncomp;
        let mut stack = vec![(root, usize::MAX)];
        while let Some((node, par)) = stack.pop() {
            for &next in &adj[node] {
                if next == par {
                    continue;
                }
                if comp[next] != usize::MAX {
                    return Err(Error::CyclicSupport {
                        source_index: node.min(next),
                    });
                }
                comp[next] = ncomp;
                let (i, j) = if node < m {
                    (node, next - m)
                } else {
                    (next, node - m)
                };
                pot[next] = c.get(i, j) - pot[node];
                stack.push((next, node));
            }
        }
        ncomp += 1;
    }

    // Sources of component p shift by +a_p, targets by -a_p, which keeps
    // every support equality intact.
    let mut w = vec![f64::INFINITY; ncomp * ncomp];
    for i in 0..m {
        for j in 0..n {
            let r = c.get(i, j) - pot[i] - pot[m + j];
            let e = &mut w[comp[i] * ncomp + comp[m + j]];
            // Half the slack here leaves room for rounding in the final check.
            *e = e.min(r + 0.5 * slack);
        }
    }
    if (0..ncomp).any(|p| w[p * ncomp + p] < 0.0) {
        return Ok(None);
    }
    // a_p - a_q <= w[p][q]  <=>  edge q -> p of weight w[p][q].
    let mut shift = vec![0.0f64; ncomp];
    let mut settled = false;
    for _ in 0..=ncomp {
        let mut changed = false;
        for p in 0..ncomp {
            for q in 0..ncomp {
                let wpq = w[p * ncomp + q];
                if p != q && shift[q] + wpq < shift[p] {
                    shift[p] = shift[q] + wpq;
                    changed = true;
                }
            }
        }
        if !changed {
            settled = true;
            break;
        }
    }
    if !settled {
        return Ok(None);
    }

    let u: Vec<f64> = (0..m).map(|i| pot[i] + shift[comp[i]]).collect();
    let v: Vec<f64> = (0..n).map(|j| pot[m + j] - shift[comp[m + j]]).collect();
    for (i, &ui) in u.iter().enumerate() {
        if v.iter()
            .enumerate()
            .any(|(j, &vj)| c.get(i, j) - ui - vj < -slack)
        {
            return Ok(None);
        }
    }
    if plan
        .flows()
        .iter()
        .any(|f| (c.get(f.i, f.j) - u[f.i] - v[f.j]).abs() > slack)
    {
        return Ok(None);
    }
    Ok(Some(DualCertificate {
        u,
        v,
        tolerance: tol,
    }))
}
