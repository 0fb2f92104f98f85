//! Primal network simplex on the complete bipartite transportation graph.
//!
//! Nodes `0..m` are sources, `m..m+n` are targets; arc `(i, j)` has index
//! `i * n + j`. The basis is a spanning tree of `m + n - 1` arcs rooted at
//! source 0, started from the northwest-corner rule. Pivoting follows
//! Bland's rule: the lowest-index arc with negative reduced cost enters, and
//! among blocking arcs the lowest index leaves. Flows stay integral.
//!
//! Potentials are sums of costs along tree paths, so a reduced cost that is
//! exactly zero in real arithmetic can come out as `-1e-16`. Bland's rule
//! only terminates when such ties are seen as ties, so an arc enters only
//! when its reduced cost is below `-floor`, with `floor` a bound on the
//! accumulated rounding: `(m + n) * EPSILON * max|c|`.

use crate::instance::Costs;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub pivots: u64,
    pub degenerate_pivots: u64,
}

/// A basic feasible solution: the `m + n - 1` tree arcs with their flows.
/// Zero flows on tree arcs are possible under degeneracy.
#[derive(Debug, Clone)]
pub(crate) struct Basis {
    pub cells: Vec<(usize, usize, u64)>,
    pub stats: SolveStats,
}

struct Tree<'a, C: Costs> {
    costs: &'a C,
    m: usize,
    n: usize,
    /// Basic arcs by slot: (source, target, flow).
    slots: Vec<(usize, usize, u64)>,
    adj: Vec<Vec<(usize, usize)>>,
    parent: Vec<usize>,
    parent_slot: Vec<usize>,
    depth: Vec<usize>,
    pot: Vec<f64>,
    basic: Vec<u64>,
    floor: f64,
}

const NONE: usize = usize::MAX;

impl<'a, C: Costs> Tree<'a, C> {
    fn northwest_corner(costs: &'a C, supply: u64, demand: u64) -> Self {
        let (m, n) = (costs.rows(), costs.cols());
        let mut slots = Vec::with_capacity(m + n - 1);
        let (mut i, mut j) = (0, 0);
        let (mut left, mut room) = (supply, demand);
        while j < n {
            let x = left.min(room);
            slots.push((i, j, x));
            left -= x;
            room -= x;
            if left == 0 && i + 1 < m {
                i += 1;
                left = supply;
            } else {
                j += 1;
                room = demand;
            }
        }
        debug_assert_eq!(slots.len(), m + n - 1);
        let mut tree = Tree {
            costs,
            m,
            n,
            slots,
            adj: vec![Vec::new(); m + n],
            parent: vec![NONE; m + n],
            parent_slot: vec![NONE; m + n],
            depth: vec![0; m + n],
            pot: vec![0.0; m + n],
            basic: vec![0; (m * n).div_ceil(64)],
            floor: 0.0,
        };
        let mut max_abs = 0.0f64;
        for i in 0..m {
            for j in 0..n {
                max_abs = max_abs.max(costs.cost(i, j).abs());
            }
        }
        tree.floor = (m + n) as f64 * f64::EPSILON * max_abs;
        for s in 0..tree.slots.len() {
            let (i, j, _) = tree.slots[s];
            tree.link(s, i, j);
        }
        tree.rehang(0, NONE, NONE);
        tree
    }

    fn link(&mut self, s: usize, i: usize, j: usize) {
        self.adj[i].push((self.m + j, s));
        self.adj[self.m + j].push((i, s));
        self.set_basic(i * self.n + j, true);
    }

    fn unlink(&mut self, s: usize) {
        let (i, j, _) = self.slots[s];
        let t = self.m + j;
        self.adj[i].retain(|&(_, x)| x != s);
        self.adj[t].retain(|&(_, x)| x != s);
        self.set_basic(i * self.n + j, false);
    }

    fn set_basic(&mut self, arc: usize, on: bool) {
        let (w, b) = (arc / 64, arc % 64);
        if on {
            self.basic[w] |= 1 << b;
        } else {
            self.basic[w] &= !(1 << b);
        }
    }

    fn is_basic(&self, arc: usize) -> bool {
        self.basic[arc / 64] >> (arc % 64) & 1 == 1
    }

    /// Re-derive parent, depth and potential for the subtree hanging from
    /// `top`, whose parent becomes `up` through `slot`. Potentials satisfy
    /// `u_i + v_j = c_ij` on tree arcs with `u_0 = 0`.
    fn rehang(&mut self, top: usize, up: usize, slot: usize) {
        let mut stack = vec![(top, up, slot)];
        while let Some((node, par, s)) = stack.pop() {
            self.parent[node] = par;
            self.parent_slot[node] = s;
            if par == NONE {
                self.depth[node] = 0;
                self.pot[node] = 0.0;
            } else {
                self.depth[node] = self.depth[par] + 1;
                let (i, j, _) = self.slots[s];
                self.pot[node] = self.costs.cost(i, j) - self.pot[par];
            }
            for k in 0..self.adj[node].len() {
                let (next, ns) = self.adj[node][k];
                if next != par {
                    stack.push((next, node, ns));
                }
            }
        }
    }

    fn entering(&self) -> Option<(usize, usize)> {
        let (m, n) = (self.m, self.n);
        let floor = -self.floor;
        for i in 0..m {
            let u = self.pot[i];
            for j in 0..n {
                if self.costs.cost(i, j) - u - self.pot[m + j] < floor && !self.is_basic(i * n + j)
                {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Push flow around the cycle closed by arc `(i, j)` and swap it into
    /// the basis. Returns whether the pivot was degenerate.
    fn pivot(&mut self, i: usize, j: usize, path: &mut Vec<(usize, bool, bool)>) -> bool {
        let (a, b) = (i, self.m + j);
        // (slot, decreasing, on the source side of the cycle)
        path.clear();
        let (mut x, mut y) = (a, b);
        while x != y {
            if self.depth[x] >= self.depth[y] {
                // Walking down from the apex to `a`: an arc whose lower end is
                // a source is traversed target -> source.
                path.push((self.parent_slot[x], x < self.m, true));
                x = self.parent[x];
            } else {
                // Walking up from `b`: lower end a target means target -> source.
                path.push((self.parent_slot[y], y >= self.m, false));
                y = self.parent[y];
            }
        }
        let mut theta = u64::MAX;
        let mut leave = NONE;
        let mut leave_arc = usize::MAX;
        let mut leave_side = false;
        for &(s, dec, side) in path.iter() {
            if !dec {
                continue;
            }
            let (si, sj, f) = self.slots[s];
            let arc = si * self.n + sj;
            if f < theta || (f == theta && arc < leave_arc) {
                theta = f;
                leave = s;
                leave_arc = arc;
                leave_side = side;
            }
        }
        debug_assert_ne!(leave, NONE);
        if theta > 0 {
            for &(s, dec, _) in path.iter() {
                let f = &mut self.slots[s].2;
                if dec {
                    *f -= theta;
                } else {
                    *f += theta;
                }
            }
        }
        // The endpoint on the leaving arc's side ends up below the new arc.
        let (lower, upper) = if leave_side { (a, b) } else { (b, a) };
        self.unlink(leave);
        self.slots[leave] = (i, j, theta);
        self.link(leave, i, j);
        self.rehang(lower, upper, leave);
        theta == 0
    }
}

/// Optimal basis for `m` sources of `supply` units and `n` targets of
/// `demand` units, `m * supply == n * demand`.
pub(crate) fn solve_basis<C: Costs>(costs: &C, supply: u64, demand: u64) -> Basis {
    debug_assert_eq!(costs.rows() as u64 * supply, costs.cols() as u64 * demand);
    let mut tree = Tree::northwest_corner(costs, supply, demand);
    let mut stats = SolveStats::default();
    let mut path = Vec::new();
    while let Some((i, j)) = tree.entering() {
        stats.pivots += 1;
        if tree.pivot(i, j, &mut path) {
            stats.degenerate_pivots += 1;
        }
    }
    Basis {
        cells: tree.slots,
        stats,
    }
}
