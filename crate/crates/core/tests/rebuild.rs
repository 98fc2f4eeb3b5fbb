use chainrebuild::chain::random::random_complex;
use chainrebuild::chain::{homology_all, GradedMap};
use chainrebuild::circle::{choose_partition, circle_rebuilding, cover_lift, rebuilding_for_partition};
use chainrebuild::rebuild::{
    compose, induce_to_cover, quality, CoverLiftData, Identity, InducedRebuilding, RebuildError, Rebuilding,
};
use chainrebuild::{Caps, IntMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bump(m: &IntMatrix, r: usize, c: usize) -> IntMatrix {
    m.add(&IntMatrix::from_triplets_i64(m.rows(), m.cols(), [(r, c, 1)]).unwrap())
}

#[test]
fn identity_rebuildings_verify() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let c = random_complex(&mut rng, 3, 6, 3);
        for alpha in 0..=3 {
            let r = Rebuilding::identity(&c, alpha);
            assert!(r.verify().unwrap().is_empty());
        }
    }
}

#[test]
fn identity_quality_at_one() {
    let r = circle_rebuilding(12, 3.0).unwrap();
    let id = Rebuilding::identity(&r.source, 1);
    let q = quality(&id, 1.0).unwrap();
    assert_eq!(q.cell_ratios, vec![1.0, 1.0]);
    // ‖∂‖ = 2 for a cycle of 12 edges; the norm term is log 2 / (1 + 0).
    assert!((q.norm_kappa() - 2f64.ln()).abs() < 1e-9);
    assert_eq!(q.kappa_raw, 1.0);
    assert!(matches!(quality(&id, 0.5), Err(RebuildError::InvalidScale(_))));
}

#[test]
fn circle_12_3_and_mutation() {
    let r = circle_rebuilding(12, 3.0).unwrap();
    assert!(r.verify().unwrap().is_empty());
    let mut bad = r.clone();
    let rho = bump(&r.rho.components()[0], 4, 2);
    bad.rho = GradedMap::new(1, vec![rho]);
    let v = bad.verify().unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!((v[0].degree, v[0].identity), (0, Identity::Homotopy));
    assert_eq!(v[0].column, 2);

    let mut bad = r.clone();
    bad.g = GradedMap::new(0, vec![r.g.components()[0].clone(), bump(&r.g.components()[1], 0, 1)]);
    let v = bad.verify().unwrap();
    assert!(v.iter().any(|x| x.degree == 1 && x.identity == Identity::ChainMapG));
}

#[test]
fn shape_errors_surface() {
    let r = circle_rebuilding(12, 3.0).unwrap();
    let mut bad = r.clone();
    bad.rho = GradedMap::new(1, vec![]);
    assert!(matches!(bad.verify(), Err(RebuildError::Mismatch(_))));
    let mut bad = r;
    bad.h = GradedMap::new(0, vec![IntMatrix::zeros(3, 3), IntMatrix::zeros(3, 3)]);
    assert!(matches!(bad.verify(), Err(RebuildError::Chain(_))));
}

#[test]
fn compose_with_identity() {
    let r = circle_rebuilding(40, 4.0).unwrap();
    let id = Rebuilding::identity(&r.source, 1);
    let c = compose(&id, &r).unwrap();
    assert_eq!(c, r);
    let id2 = Rebuilding::identity(&r.target, 1);
    assert_eq!(compose(&r, &id2).unwrap(), r);
    assert!(matches!(compose(&r, &r), Err(RebuildError::Mismatch(_))));
}

#[test]
fn compose_circle_chain() {
    let r1 = circle_rebuilding(1000, 10.0).unwrap();
    let r2 = circle_rebuilding(100, 5.0).unwrap();
    let r3 = compose(&r1, &r2).unwrap();
    assert_eq!(r3.target.dims(), &[20, 20]);
    assert!(r3.verify().unwrap().is_empty());
    let k1 = quality(&r1, 10.0).unwrap().kappa_min;
    let k2 = quality(&r2, 5.0).unwrap().kappa_min;
    let k3 = quality(&r3, 50.0).unwrap().kappa_min;
    assert!(k3 <= 4.0 * k1 * k2, "{k3} vs {k1} {k2}");
}

#[test]
fn induce_trivial_and_double_cover() {
    let p = choose_partition(40, 4.0).unwrap();
    let r = rebuilding_for_partition(&p).unwrap();
    let one = induce_to_cover(&r, cover_lift(&p, 1).unwrap()).unwrap();
    assert_eq!(one, r);

    let two = induce_to_cover(&r, cover_lift(&p, 2).unwrap()).unwrap();
    assert_eq!(two.source.dims(), &[80, 80]);
    assert_eq!(two.target.dims(), &[20, 20]);
    let qb = quality(&r, 4.0).unwrap();
    let qc = quality(&two, 4.0).unwrap();
    assert_eq!(qb.cell_ratios, qc.cell_ratios);
    let m = InducedRebuilding::measure(&r, &two, 4.0, &Caps::default()).unwrap();
    assert_eq!(m.delta, 2);
    assert!(m.holds, "{m:?}");

    let mut lift = cover_lift(&p, 2).unwrap();
    lift.rho = None;
    assert!(matches!(induce_to_cover(&r, lift), Err(RebuildError::MissingLift(_))));
    let lift = CoverLiftData { degree: 3, ..cover_lift(&p, 2).unwrap() };
    assert!(matches!(induce_to_cover(&r, lift), Err(RebuildError::Mismatch(_))));
}

#[test]
fn serialization_round_trip() {
    let r = circle_rebuilding(13, 3.0).unwrap();
    let text = r.to_string();
    assert_eq!(Rebuilding::parse(&text).unwrap(), r);
    let broken = text.replacen("map h", "map k", 1);
    let err = Rebuilding::parse(&broken).unwrap_err();
    assert!(err.to_string().contains("map h"), "{err}");
}

#[test]
fn quality_cell_terms_scale_linearly() {
    let r = circle_rebuilding(300, 6.0).unwrap();
    let a = quality(&r, 6.0).unwrap();
    let b = quality(&r, 2.0).unwrap();
    for (x, y) in a.cell_ratios.iter().zip(&b.cell_ratios) {
        assert!((y * 6.0 / 2.0 - x).abs() <= 1e-12 * x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn composed_circles_verify_and_preserve_homology(n in 64usize..600, t1 in 2usize..6, t2 in 2usize..4) {
        let r1 = circle_rebuilding(n, t1 as f64).unwrap();
        let m1 = r1.target.dim(0);
        prop_assume!(m1 >= 4 * t2);
        let r2 = circle_rebuilding(m1, t2 as f64).unwrap();
        let r3 = compose(&r1, &r2).unwrap();
        prop_assert!(r3.verify().unwrap().is_empty());
        let caps = Caps::default();
        let hs = homology_all(&r3.source, &[], &caps).unwrap();
        let ht = homology_all(&r3.target, &[], &caps).unwrap();
        for j in 0..r3.alpha {
            prop_assert_eq!(hs[j].betti_rational, ht[j].betti_rational);
            prop_assert_eq!(&hs[j].torsion_factors, &ht[j].torsion_factors);
        }
    }
}
