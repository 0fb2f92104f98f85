//! Birkhoff-von Neumann decomposition of square plans and the dummy-point
//! construction that bounds fanout by `n / gcd(m, n)`.

use crate::error::{Error, Result};
use crate::instance::{gcd, lcm, CostMatrix, Costs, Instance};
use crate::solver::{reduce, solve_costs, TransportPlan};

/// Default upper limit on `lcm(m, n)` for [`gcd_construct`].
pub const DEFAULT_LCM_GUARD: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationTerm {
    /// `perm[i]` is the target of source `i`.
    pub perm: Vec<usize>,
    pub num: u64,
    pub den: u64,
}

/// Convex combination of permutation matrices equal to the bistochastic
/// matrix `n * P` of a square plan `P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationDecomposition {
    pub terms: Vec<PermutationTerm>,
}

impl PermutationDecomposition {
    /// Rebuilds the plan at `scale` (a multiple of `n` and of every term
    /// denominator times `scale / n`).
    pub fn recombine(&self, scale: u64) -> Result<TransportPlan> {
        let n = self.terms.first().map_or(0, |t| t.perm.len());
        if n == 0 || !scale.is_multiple_of(n as u64) {
            return Err(Error::InfeasiblePlan(format!(
                "scale {scale} incompatible with n = {n}"
            )));
        }
        let row = scale / n as u64;
        let mut dense = vec![vec![0u64; n]; n];
        for t in &self.terms {
            if t.perm.len() != n || !(row * t.num).is_multiple_of(t.den) {
                return Err(Error::InfeasiblePlan("term does not fit the scale".into()));
            }
            for (i, &j) in t.perm.iter().enumerate() {
                dense[i][j] += row * t.num / t.den;
            }
        }
        TransportPlan::from_dense(scale, &dense)
    }

    /// Σ weights as an exact fraction in lowest terms.
    pub fn weight_sum(&self) -> (u64, u64) {
        self.terms.iter().fold((0, 1), |(a, b), t| {
            let den = lcm(b, t.den);
            reduce(a * (den / b) + t.num * (den / t.den), den)
        })
    }
}

/// Greedy decomposition: repeatedly take a perfect matching inside the
/// current support, peel off its minimum flow, and repeat. A bistochastic
/// support always contains a perfect matching; matchings are found by
/// augmenting paths, preferring a free target before re-routing.
pub fn birkhoff_decompose(plan: &TransportPlan) -> Result<PermutationDecomposition> {
    let n = plan.n();
    if plan.m() != n {
        return Err(Error::NotSquare { m: plan.m(), n });
    }
    let row_units = plan.source_mass();
    let mut rows: Vec<Vec<(usize, u64)>> = (0..n)
        .map(|i| plan.row(i).iter().map(|f| (f.j, f.units)).collect())
        .collect();
    let mut match_of_target = vec![usize::MAX; n];
    let mut match_of_source = vec![usize::MAX; n];
    let mut terms = Vec::new();
    let mut remaining = row_units;
    while remaining > 0 {
        for i in 0..n {
            if match_of_source[i] == usize::MAX {
                let mut seen = vec![false; n];
                if !augment(
                    i,
                    &rows,
                    &mut seen,
                    &mut match_of_target,
                    &mut match_of_source,
                ) {
                    return Err(Error::InfeasiblePlan(
                        "support has no perfect matching".into(),
                    ));
                }
            }
        }
        let perm = match_of_source.clone();
        let theta = (0..n)
            .map(|i| unit(&rows[i], perm[i]))
            .min()
            .expect("n >= 1");
        for (i, &j) in perm.iter().enumerate() {
            let k = rows[i]
                .binary_search_by_key(&j, |e| e.0)
                .expect("matched edge");
            rows[i][k].1 -= theta;
            if rows[i][k].1 == 0 {
                rows[i].remove(k);
                match_of_source[i] = usize::MAX;
                match_of_target[j] = usize::MAX;
            }
        }
        let (num, den) = reduce(theta, row_units);
        terms.push(PermutationTerm { perm, num, den });
        remaining -= theta;
    }
    Ok(PermutationDecomposition { terms })
}

fn unit(row: &[(usize, u64)], j: usize) -> u64 {
    row.binary_search_by_key(&j, |e| e.0)
        .map_or(0, |k| row[k].1)
}

fn augment(
    i: usize,
    rows: &[Vec<(usize, u64)>],
    seen: &mut [bool],
    match_of_target: &mut [usize],
    match_of_source: &mut [usize],
) -> bool {
    if let Some(&(j, _)) = rows[i].iter().find(|e| match_of_target[e.0] == usize::MAX) {
        match_of_target[j] = i;
        match_of_source[i] = j;
        return true;
    }
    for &(j, _) in &rows[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        if augment(
            match_of_target[j],
            rows,
            seen,
            match_of_target,
            match_of_source,
        ) {
            match_of_target[j] = i;
            match_of_source[i] = j;
            return true;
        }
    }
    false
}

/// Each source split into `n/g` co-located copies and each target into
/// `m/g`, giving an `L x L` assignment problem, `L = lcm(m, n)`. Source `i`
/// owns rows `[i*n/g, (i+1)*n/g)` and target `j` owns columns
/// `[j*m/g, (j+1)*m/g)`.
struct DummyExpansion<'a> {
    base: &'a CostMatrix,
    copies_per_source: usize,
    copies_per_target: usize,
}

impl Costs for DummyExpansion<'_> {
    fn rows(&self) -> usize {
        self.base.m() * self.copies_per_source
    }

    fn cols(&self) -> usize {
        self.base.n() * self.copies_per_target
    }

    #[inline]
    fn cost(&self, a: usize, b: usize) -> f64 {
        self.base
            .get(a / self.copies_per_source, b / self.copies_per_target)
    }
}

/// Optimal plan in which every source reaches at most `n/g` targets and
/// every target hears from at most `m/g` sources, `g = gcd(m, n)`.
///
/// The expanded assignment problem is solved exactly; its optimal vertex is
/// a permutation, which collapses back to an `m x n` plan at scale
/// `lcm(m, n)`.
pub fn gcd_construct(inst: &Instance, guard: u64) -> Result<TransportPlan> {
    let (m, n) = (inst.m(), inst.n());
    let g = gcd(m as u64, n as u64) as usize;
    let l = inst.scale();
    if l > guard {
        return Err(Error::GuardExceeded {
            m,
            n,
            lcm: l,
            guard,
        });
    }
    let expanded = DummyExpansion {
        base: inst.costs(),
        copies_per_source: n / g,
        copies_per_target: m / g,
    };
    let (assignment, _) = solve_costs(&expanded, l);
    debug_assert!(assignment.is_permutation());
    let mut dense = vec![vec![0u64; n]; m];
    for f in assignment.flows() {
        dense[f.i / expanded.copies_per_source][f.j / expanded.copies_per_target] += f.units;
    }
    TransportPlan::from_dense(l, &dense)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::rigidity_report;
    use crate::instance::{gen_point_instance, gen_random_costs, Distribution};
    use crate::solver::{objective, solve};

    #[test]
    fn permutation_is_a_single_term() {
        let p = TransportPlan::from_permutation(&[2, 0, 1]).unwrap();
        let d = birkhoff_decompose(&p).unwrap();
        assert_eq!(
            d.terms,
            vec![PermutationTerm {
                perm: vec![2, 0, 1],
                num: 1,
                den: 1
            }]
        );
        assert_eq!(d.recombine(3).unwrap(), p);
    }

    #[test]
    fn uniform_two_by_two_splits_in_half() {
        let p = TransportPlan::from_dense(4, &[vec![1, 1], vec![1, 1]]).unwrap();
        let d = birkhoff_decompose(&p).unwrap();
        assert_eq!(
            d.terms,
            vec![
                PermutationTerm {
                    perm: vec![0, 1],
                    num: 1,
                    den: 2
                },
                PermutationTerm {
                    perm: vec![1, 0],
                    num: 1,
                    den: 2
                },
            ]
        );
        assert_eq!(d.weight_sum(), (1, 1));
        assert_eq!(d.recombine(4).unwrap(), p);
    }

    #[test]
    fn non_square_is_rejected() {
        let p = TransportPlan::from_dense(2, &[vec![1, 1]]).unwrap();
        assert!(matches!(
            birkhoff_decompose(&p),
            Err(Error::NotSquare { m: 1, n: 2 })
        ));
    }

    #[test]
    fn square_solver_output_is_one_term() {
        for seed in 0..10 {
            let p = solve(&gen_random_costs(9, 9, seed).unwrap());
            assert_eq!(birkhoff_decompose(&p).unwrap().terms.len(), 1);
        }
    }

    proptest::proptest! {
        #[test]
        fn decomposition_recombines_exactly(
            n in 2usize..8,
            perms in proptest::collection::vec(proptest::collection::vec(0u32..1000, 8), 1..6),
            weights in proptest::collection::vec(1u64..5, 6),
        ) {
            // Random weighted sum of permutations, sorted keys give perms.
            let total: u64 = weights[..perms.len()].iter().sum();
            let scale = n as u64 * total;
            let mut dense = vec![vec![0u64; n]; n];
            for (keys, &w) in perms.iter().zip(&weights) {
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by_key(|&k| (keys[k], k));
                for (i, &j) in order.iter().enumerate() {
                    dense[i][j] += w;
                }
            }
            let p = TransportPlan::from_dense(scale, &dense).unwrap();
            let d = birkhoff_decompose(&p).unwrap();
            proptest::prop_assert_eq!(d.weight_sum(), (1, 1));
            proptest::prop_assert!(d.terms.len() <= p.support_size() - n + 1);
            proptest::prop_assert_eq!(d.recombine(scale).unwrap(), p);
        }
    }

    #[test]
    fn gcd_construct_square_is_permutation() {
        let inst = gen_random_costs(6, 6, 1).unwrap();
        let p = gcd_construct(&inst, DEFAULT_LCM_GUARD).unwrap();
        assert!(p.is_permutation());
    }

    #[test]
    fn gcd_construct_twenty_thirty() {
        let inst = gen_point_instance(Distribution::UniformSquare, 20, 30, 2, 1.0, 0).unwrap();
        let p = gcd_construct(&inst, DEFAULT_LCM_GUARD).unwrap();
        let r = rigidity_report(&p);
        assert!(r.t_max() <= 3 && r.ell_max() <= 2);
        let a = objective(&inst, &p).unwrap();
        let b = objective(&inst, &solve(&inst)).unwrap();
        assert!((a - b).abs() <= 1e-12 * b.abs());
    }

    #[test]
    fn gcd_bounds_on_small_pairs() {
        for (m, n) in [(2, 4), (4, 6), (3, 9), (6, 8), (5, 7)] {
            let inst = gen_random_costs(m, n, (m * n) as u64).unwrap();
            let g = gcd(m as u64, n as u64) as usize;
            let p = gcd_construct(&inst, DEFAULT_LCM_GUARD).unwrap();
            let r = rigidity_report(&p);
            assert!(r.t_max() <= n / g && r.ell_max() <= m / g, "{m}x{n}");
            let a = objective(&inst, &p).unwrap();
            let b = objective(&inst, &solve(&inst)).unwrap();
            assert!((a - b).abs() <= 1e-12 * b.abs());
        }
    }

    #[test]
    fn guard_is_enforced() {
        let inst = gen_random_costs(50, 2222, 0).unwrap();
        assert!(matches!(
            gcd_construct(&inst, DEFAULT_LCM_GUARD),
            Err(Error::GuardExceeded { lcm: 55550, .. })
        ));
    }
}
