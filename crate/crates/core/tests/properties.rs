mod common;

use std::sync::Arc;

use common::*;
use proptest::prelude::*;
use symint::kernels::k12;
use symint::measure::catalog::*;
use symint::oracle::{check_partial_frac_1, check_partial_frac_2, oracle_two};
use symint::{integral_two, BiorthogonalSystem, Complex, DiscreteBiMeasure, OracleBudget};

fn grid4() -> DiscreteBiMeasure {
    exp_xy_grid(&[-1.0, -0.4, 0.2, 0.9])
}

fn system(m: &DiscreteBiMeasure) -> BiorthogonalSystem {
    BiorthogonalSystem::largest(Arc::new(m.clone()), m.x_nodes().len() - 1).unwrap()
}

/// Small shapes `(N, L₁, L₂, M₁, M₂)` that fit the 4-point grid.
fn shape() -> impl Strategy<Value = Shape> {
    (1usize..=2, 0usize..=2, 0usize..=2, 0usize..=2, 0usize..=2).prop_filter("fits cap", |&t| {
        let (a, b) = combos(t);
        [t.0 as i64, a.abs(), b.abs()].into_iter().max().unwrap() <= 4
    })
}

fn weights(n: usize) -> impl Strategy<Value = Vec<Complex>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| c(a, b)), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn formula_is_permutation_invariant(t in shape(), seed in any::<u64>(), rot in 0usize..3) {
        let sys = system(&grid4());
        let spec = draw_spec(&mut rng(seed), t.0, t.1, t.2, t.3, t.4);
        let mut perm = spec.clone();
        for v in [&mut perm.xi, &mut perm.zeta, &mut perm.eta, &mut perm.mu] {
            if !v.is_empty() {
                let k = rot % v.len();
                v.rotate_left(k);
                v.reverse();
            }
        }
        let a = integral_two(&sys, &spec, false).unwrap().value;
        let b = integral_two(&sys, &perm, false).unwrap().value;
        prop_assert!(rel(b, a) < 1e-10, "{t:?}: {a} vs {b}");
    }

    #[test]
    fn swap_symmetry(t in shape(), seed in any::<u64>()) {
        let sys = system(&grid4());
        let spec = draw_spec(&mut rng(seed), t.0, t.1, t.2, t.3, t.4);
        let a = integral_two(&sys, &spec, false).unwrap().value;
        let b = integral_two(&sys.swapped(), &spec.swapped(), false).unwrap().value;
        prop_assert!(rel(b, a) < 1e-12);
    }

    #[test]
    fn formula_matches_oracle(t in shape(), seed in any::<u64>()) {
        let m = grid4();
        let spec = draw_spec(&mut rng(seed), t.0, t.1, t.2, t.3, t.4);
        let v = integral_two(&system(&m), &spec, false).unwrap().value;
        let o = oracle_two(&m, &spec, OracleBudget::default()).unwrap();
        prop_assert!(rel(v, o) < 1e-8, "{t:?}: {v} vs {o}");
    }

    #[test]
    fn bimoments_are_linear(w1 in weights(9), w2 in weights(9), alpha in -2.0f64..2.0, beta in -2.0f64..2.0) {
        let nodes = vec![c(-1.0, 0.0), c(0.0, 0.5), c(1.0, 0.0)];
        let rows = |w: &[Complex]| w.chunks(3).map(|r| r.to_vec()).collect::<Vec<_>>();
        let m1 = DiscreteBiMeasure::new(nodes.clone(), nodes.clone(), rows(&w1)).unwrap();
        let m2 = DiscreteBiMeasure::new(nodes.clone(), nodes, rows(&w2)).unwrap();
        let (a, b) = (c(alpha, 0.3), c(0.0, beta));
        let lhs = m1.combine(a, &m2, b).unwrap().bimoments(4);
        let (t1, t2) = (m1.bimoments(4), m2.bimoments(4));
        for j in 0..=4 {
            for k in 0..=4 {
                let rhs = a * t1.entries[j][k] + b * t2.entries[j][k];
                prop_assert!((lhs.entries[j][k] - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
            }
        }
    }

    #[test]
    fn partial_fractions_hold(seed in any::<u64>(), n in 1usize..=4, m in 0usize..=4) {
        let mut r = rng(seed);
        let x = symint::cli::circle_points(&mut r, n, 1.0);
        let eta = symint::cli::circle_points(&mut r, m, 2.5);
        let res = if n >= m {
            check_partial_frac_1(&x, &eta).unwrap()
        } else {
            check_partial_frac_2(&x, &eta).unwrap()
        };
        prop_assert!(res < 1e-10, "{res}");
    }

    #[test]
    fn kernel_truncation_steps(seed in any::<u64>(), j in 0usize..3) {
        let sys = system(&grid4());
        let mut r = rng(seed);
        let p = symint::cli::circle_points(&mut r, 2, 2.0);
        let step = k12(&sys, j + 1, p[0], p[1]).unwrap() - k12(&sys, j, p[0], p[1]).unwrap();
        let want = sys.eval_p(j, p[0]).unwrap() * sys.eval_s(j, p[1]).unwrap();
        prop_assert!((step - want).norm() <= 1e-10 * (1.0 + want.norm()));
    }
}
