//! Fixed workloads shared by the benchmarks.

use kantorovich::instance::{gen_point_instance, gen_random_costs, Distribution};
use kantorovich::{solve, Instance, TransportPlan};

/// Random costs, `m x n`, seed 0.
pub fn random(m: usize, n: usize) -> Instance {
    gen_random_costs(m, n, 0).expect("valid shape")
}

/// Uniform points in the unit square with cost `|x - y|^p`, seed 0.
pub fn points(m: usize, n: usize, p: f64) -> Instance {
    gen_point_instance(Distribution::UniformSquare, m, n, 2, p, 0).expect("valid shape")
}

/// Uniform average of the first `k` cyclic shifts at size `n`: a
/// bistochastic plan with `k * n` support entries.
pub fn shifted_mixture(n: usize, k: usize) -> TransportPlan {
    let mut dense = vec![vec![0u64; n]; n];
    for r in 0..k {
        for (i, row) in dense.iter_mut().enumerate() {
            row[(i + r) % n] += 1;
        }
    }
    TransportPlan::from_dense((n * k) as u64, &dense).expect("shifts are permutations")
}

/// Solver output on a square instance, a single permutation.
pub fn square_optimum(n: usize) -> TransportPlan {
    solve(&random(n, n))
}
