use dilationlab::evolution::{
    cycle_monitored_system, cycle_reference, monitoring_product, pre_evolution_product, FamilyKind,
    GeneratorFamily, Monitor, MonitoredProcess,
};
use dilationlab::partition::{compose, self_similar_split, Partition, PartitionSystem, Rational};
use dilationlab::random::{random_dissipative, random_skew, rng};
use dilationlab::semigroup::ContractionSemigroup;
use dilationlab::Matrix;
use proptest::prelude::*;

fn rational01() -> impl Strategy<Value = Rational> {
    (1i128..12).prop_flat_map(|d| (0..=d).prop_map(move |n| Rational::new(n, d)))
}

fn partition() -> impl Strategy<Value = Partition> {
    prop::collection::vec(rational01(), 0..6).prop_map(|mut pts| {
        pts.push(Rational::new(0, 1));
        pts.push(Rational::new(1, 1));
        Partition::new(pts).unwrap()
    })
}

fn system() -> impl Strategy<Value = PartitionSystem> {
    prop_oneof![Just(PartitionSystem::All), (1usize..4).prop_map(PartitionSystem::Homogeneous)]
}

fn affine(seed: u64) -> GeneratorFamily {
    let mut r = rng(seed);
    let a0 = random_dissipative(2, 1.0, &mut r);
    let a1 = random_skew(2, 1.0, &mut r);
    GeneratorFamily::new(FamilyKind::Affine(a0, a1), (0.0, 1.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn homogenize_identities(xi in partition(), m in 1usize..5) {
        let h = xi.homogenize(m).unwrap();
        prop_assert_eq!(h.n(), m * xi.n());
        prop_assert!(h.refines(&xi));
        prop_assert_eq!(h.deltas().into_iter().fold(Rational::new(0, 1), |a, d| a + d), Rational::new(1, 1));
    }

    #[test]
    fn self_similar_split_identities(xi in partition(), alpha in rational01(), sys in system()) {
        let (g1, g2, g3) = self_similar_split(&xi, alpha, sys).unwrap();
        prop_assert_eq!(compose(&g1, &g2, alpha).unwrap(), g3.clone());
        prop_assert!(g3.refines(&xi));
        for g in [&g1, &g2, &g3] {
            prop_assert!(sys.contains(g));
        }
    }

    #[test]
    fn union_is_a_common_refinement(a in partition(), b in partition()) {
        let u = a.union(&b);
        prop_assert!(u.refines(&a) && u.refines(&b));
        prop_assert_eq!(u.clone(), b.union(&a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn constant_family_partition_independent(xi in partition(), seed in any::<u64>(), s in 0.0f64..0.5, h in 0.0f64..0.5) {
        let a = random_dissipative(3, 1.5, &mut rng(seed));
        let fam = GeneratorFamily::constant(a.clone()).unwrap();
        let got = pre_evolution_product(&fam, &xi, s + h, s).unwrap();
        prop_assert!(got.dist(&a.expm(h).unwrap()) <= 1e-10);
    }

    #[test]
    fn matched_partitions_cocycle(xi in partition(), seed in any::<u64>(), num in 1i128..9) {
        let fam = affine(seed);
        let (t, r) = (0.9, 0.1);
        let alpha = Rational::new(num, 9);
        let s = r + (t - r) * (num as f64 / 9.0);
        let (g1, g2, g3) = self_similar_split(&xi, alpha, PartitionSystem::All).unwrap();
        let whole = pre_evolution_product(&fam, &g3, t, r).unwrap();
        let split = &pre_evolution_product(&fam, &g2, t, s).unwrap() * &pre_evolution_product(&fam, &g1, s, r).unwrap();
        prop_assert!(whole.dist(&split) <= 1e-10);

        let proc = MonitoredProcess::new(
            ContractionSemigroup::new(random_dissipative(2, 1.0, &mut rng(seed ^ 1))).unwrap(),
            Monitor::Table(vec![(0.0, Matrix::diag_real(&[1.0, 0.0])), (0.5, Matrix::identity(2))]),
            1,
        ).unwrap();
        let whole = monitoring_product(&proc, &g3, t, r).unwrap();
        let split = &monitoring_product(&proc, &g2, t, s).unwrap() * &monitoring_product(&proc, &g1, s, r).unwrap();
        prop_assert!(whole.dist(&split) <= 1e-10);
    }

    #[test]
    fn cycle_system_block_identity(xi0 in partition(), seed in any::<u64>(), m in 1usize..4) {
        let mut r = rng(seed);
        let sgs: Vec<_> = (0..m)
            .map(|_| ContractionSemigroup::new(random_dissipative(2, 1.0, &mut r)).unwrap())
            .collect();
        let proc = cycle_monitored_system(&sgs).unwrap();
        let w = proc.monitor().at(0.0);
        prop_assert_eq!(w.pow(m as u32), Matrix::identity(2 * m));
        let got = monitoring_product(&proc, &xi0.homogenize(m).unwrap(), 0.8, 0.3).unwrap();
        let reference = cycle_reference(&sgs, &xi0, 0.8, 0.3).unwrap();
        prop_assert!(got.dist(&reference) <= 1e-11);
        let diag = monitoring_product(&proc, &xi0.homogenize(m).unwrap(), 0.5, 0.5).unwrap();
        prop_assert_eq!(diag, w.pow(m as u32));
    }
}
