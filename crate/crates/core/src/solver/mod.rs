//! Exact solver for the scaled transportation problem, dual certification of
//! plans, and the 2x2 crossing detector with its repair loop.

mod certificate;
mod crossing;
mod network_simplex;
mod plan;

pub use certificate::{verify_optimality, DualCertificate, DEFAULT_DUAL_TOL};
pub use crossing::{
    count_crossings, find_crossings, uncross, uncross_steps, Crossing, UncrossStep,
};
pub use network_simplex::SolveStats;
pub use plan::{objective, scaled_cost, Flow, TransportPlan};

pub(crate) use plan::reduce;

use crate::instance::{Costs, Instance};

/// Minimum-cost vertex of the transportation polytope at scale `lcm(m, n)`.
pub fn solve(inst: &Instance) -> TransportPlan {
    solve_with_stats(inst).0
}

pub fn solve_with_stats(inst: &Instance) -> (TransportPlan, SolveStats) {
    solve_costs(inst.costs(), inst.scale())
}

/// Solve against any cost table at the given scale, which must be a
/// multiple of `lcm(rows, cols)`.
pub fn solve_costs<C: Costs>(costs: &C, scale: u64) -> (TransportPlan, SolveStats) {
    let (m, n) = (costs.rows(), costs.cols());
    let basis = network_simplex::solve_basis(costs, scale / m as u64, scale / n as u64);
    let plan = TransportPlan::new(m, n, scale, basis.cells.iter().copied())
        .expect("network simplex preserves the marginals");
    (plan, basis.stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_random_costs, CostMatrix};

    fn demo() -> Instance {
        Instance::from_costs(
            CostMatrix::from_rows(vec![vec![0.0, 1.0, 2.0], vec![2.0, 1.0, 0.0]]).unwrap(),
        )
    }

    #[test]
    fn one_by_one() {
        let inst = Instance::from_costs(CostMatrix::new(1, 1, vec![3.5]).unwrap());
        let p = solve(&inst);
        assert_eq!(p.scale(), 1);
        assert_eq!(
            p.flows(),
            &[Flow {
                i: 0,
                j: 0,
                units: 1
            }]
        );
    }

    #[test]
    fn two_by_three_matches_enumeration() {
        // Exhaustive enumeration of the 7 feasible integral plans gives a
        // unique optimum of scaled cost 2.
        let inst = demo();
        let p = solve(&inst);
        assert_eq!(p.scale(), 6);
        assert_eq!(p.to_dense(), vec![vec![2, 1, 0], vec![0, 1, 2]]);
        assert_eq!(scaled_cost(&inst, &p).unwrap(), 2.0);
        assert!((objective(&inst, &p).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn square_random_costs_give_permutations() {
        for seed in 0..20 {
            let n = 2 + seed as usize % 15;
            let p = solve(&gen_random_costs(n, n, seed).unwrap());
            assert!(p.is_permutation(), "seed {seed}");
        }
    }

    #[test]
    fn support_is_at_most_m_plus_n_minus_one() {
        for seed in 0..20 {
            let inst = gen_random_costs(3 + seed as usize % 5, 10 + seed as usize, seed).unwrap();
            let p = solve(&inst);
            assert!(p.support_size() < inst.m() + inst.n());
        }
    }

    #[test]
    fn solve_is_deterministic() {
        let inst = gen_random_costs(6, 17, 3).unwrap();
        assert_eq!(solve(&inst), solve(&inst));
    }
}
