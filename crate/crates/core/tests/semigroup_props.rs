use dilationlab::random::{random_dissipative, random_vector, rng};
use dilationlab::semigroup::{
    generator_from_cogenerator, poly_apply, poly_coeffs, yosida_from_cogenerator, yosida_semigroup,
    ContractionSemigroup, YosidaConstants,
};
use dilationlab::{c64, Matrix};
use proptest::prelude::*;

fn semigroup(dim: usize, norm: f64, seed: u64) -> ContractionSemigroup {
    ContractionSemigroup::new(random_dissipative(dim, norm, &mut rng(seed))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cogenerator_closed_forms_agree(dim in 1usize..5, seed in any::<u64>(), norm in 0.0f64..10.0) {
        let t = semigroup(dim, norm, seed);
        let a = t.generator();
        let id = Matrix::identity(dim);
        let cayley = &(a + &id) * &(a - &id).inverse().unwrap();
        let resolvent = &id - &t.resolvent(c64(1.0, 0.0)).unwrap().scale_re(2.0);
        prop_assert!(cayley.dist(&resolvent) <= 1e-12);
        let v = t.cogenerator().unwrap();
        prop_assert!(v.op_norm() <= 1.0 + 1e-10);
        prop_assert!((&id - &v).min_singular_value() > 1e-8);
    }

    #[test]
    fn cogenerator_round_trip(dim in 1usize..5, seed in any::<u64>(), norm in 0.0f64..10.0) {
        let t = semigroup(dim, norm, seed);
        let back = generator_from_cogenerator(&t.cogenerator().unwrap()).unwrap();
        prop_assert!(back.dist(t.generator()) <= 1e-10 * (1.0 + norm));
    }

    #[test]
    fn yosida_identity(dim in 1usize..5, seed in any::<u64>(), norm in 0.0f64..2.0, lexp in 0.2f64..3.0) {
        let t = semigroup(dim, norm, seed);
        let lam = 1.0 + 10f64.powf(lexp);
        let c = YosidaConstants::new(lam).unwrap();
        let direct = &t.resolvent(c64(lam, 0.0)).unwrap().scale_re(lam * lam) - &Matrix::identity(dim).scale_re(lam);
        let via_v = yosida_from_cogenerator(&t.cogenerator().unwrap(), &c).unwrap();
        prop_assert!(direct.dist(&via_v) <= 1e-10 * (1.0 + direct.op_norm()));
    }

    #[test]
    fn polynomial_within_tail_bound(dim in 1usize..4, seed in any::<u64>(), time in 0.0f64..1.5, lam in 1.5f64..20.0, n in 0usize..60) {
        let t = semigroup(dim, 1.0, seed);
        let c = YosidaConstants::new(lam).unwrap();
        let p = poly_coeffs(time, &c, n);
        let approx = poly_apply(&p, &t.cogenerator().unwrap());
        let exact = yosida_semigroup(&t, &c, time).unwrap();
        prop_assert!(approx.dist(&exact) <= p.tail_bound + 1e-10);
    }

    #[test]
    fn yosida_error_non_increasing(dim in 1usize..4, seed in any::<u64>()) {
        let t = semigroup(dim, 2.0, seed);
        let xi = random_vector(dim, &mut rng(seed ^ 0x5a5a));
        let grid: Vec<f64> = (0..=40).map(|k| k as f64 * 0.05).collect();
        let mut prev = f64::INFINITY;
        for lam in [10.0, 100.0, 1000.0] {
            let c = YosidaConstants::new(lam).unwrap();
            let err = grid
                .iter()
                .map(|&s| (&yosida_semigroup(&t, &c, s).unwrap() - &t.evaluate(s).unwrap()).apply(&xi).norm())
                .fold(0.0, f64::max);
            prop_assert!(err <= prev);
            prev = err;
        }
    }
}
