use dilationlab::random::{ginibre, random_dissipative, rng};
use dilationlab::{c64, Matrix};
use proptest::prelude::*;

fn psd(dim: usize, seed: u64) -> Matrix {
    let g = ginibre(dim, &mut rng(seed));
    &g * &g.adjoint()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjoint_is_an_involution(dim in 1usize..5, seed in any::<u64>()) {
        let a = ginibre(dim, &mut rng(seed));
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn expm_semigroup_law(dim in 1usize..5, seed in any::<u64>(), norm in 0.0f64..5.0, s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let g = ginibre(dim, &mut rng(seed));
        let n = g.op_norm();
        let a = if n > 0.0 { g.scale_re(norm / n) } else { g };
        let lhs = &a.expm(s).unwrap() * &a.expm(t).unwrap();
        let rhs = a.expm(s + t).unwrap();
        prop_assert!(lhs.dist(&rhs) <= 1e-10 * rhs.op_norm().max(1.0));
    }

    #[test]
    fn psd_sqrt_is_hermitian_root(dim in 1usize..5, seed in any::<u64>()) {
        let p = psd(dim, seed);
        let q = p.psd_sqrt().unwrap();
        prop_assert!((&q - &q.adjoint()).op_norm() <= 1e-12);
        prop_assert!((&q * &q).dist(&p) <= 1e-10 * (1.0 + p.op_norm()));
    }

    #[test]
    fn solve_recovers_rhs(dim in 1usize..5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = &ginibre(dim, &mut r) + &Matrix::identity(dim).scale(c64(2.0, 0.0));
        let b = ginibre(dim, &mut r);
        let x = a.solve(&b).unwrap();
        let cond = a.condition_estimate();
        prop_assert!((&a * &x).dist(&b) <= 1e-10 * b.op_norm().max(1e-300) * cond.max(1.0));
    }

    #[test]
    fn dissipative_generators_give_contractions(dim in 1usize..5, seed in any::<u64>(), t in 0.0f64..5.0) {
        let a = random_dissipative(dim, 2.0, &mut rng(seed));
        prop_assert!(a.expm(t).unwrap().op_norm() <= 1.0 + 1e-10);
    }
}
