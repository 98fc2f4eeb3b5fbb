use chainrebuild::chain::random::{random_complex, random_two_step};
use chainrebuild::chain::{
    check_bt3, check_gabber, check_universal_coefficients, euler_characteristic, gabber_bound, homology, homology_all,
    tensor_with_interval,
};
use chainrebuild::{Caps, ChainComplex, ChainError, IntMatrix};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn circle() -> ChainComplex {
    ChainComplex::new(vec![1, 1], vec![IntMatrix::zeros(1, 1)]).unwrap()
}

#[test]
fn circle_and_point() {
    let c = circle();
    for j in 0..2 {
        let h = homology(&c, j, &[2]).unwrap();
        assert_eq!(h.betti_rational, 1);
        assert!(h.torsion_factors.is_empty());
    }
    assert!(homology(&c, 1, &[]).unwrap().truncated);
    assert!(!homology(&c, 0, &[]).unwrap().truncated);

    let p = ChainComplex::new(vec![1, 0], vec![IntMatrix::zeros(1, 0)]).unwrap();
    assert_eq!(homology(&p, 0, &[]).unwrap().betti_rational, 1);
    assert_eq!(homology(&p, 1, &[]).unwrap().betti_rational, 0);
    assert!(matches!(homology(&p, 2, &[]), Err(ChainError::DegreeOutOfRange { .. })));
}

#[test]
fn mod_two_attaching() {
    let c = ChainComplex::new(
        vec![1, 2, 1],
        vec![IntMatrix::zeros(1, 2), IntMatrix::from_dense(&[vec![2], vec![0]])],
    )
    .unwrap();
    let h = homology(&c, 1, &[2, 3]).unwrap();
    assert_eq!(h.torsion_factors, vec![BigInt::from(2)]);
    assert_eq!(h.betti_rational, 1);
    assert_eq!(h.betti_mod_p[&2], 2);
    assert_eq!(h.betti_mod_p[&3], 1);
    assert!((h.log_torsion - 2f64.ln()).abs() < 1e-15);
}

#[test]
fn rejects_non_complexes() {
    let err = ChainComplex::new(
        vec![1, 1, 1],
        vec![IntMatrix::from_dense(&[vec![1]]), IntMatrix::from_dense(&[vec![1]])],
    )
    .unwrap_err();
    assert_eq!(err, ChainError::NotAComplex { degree: 2 });
    assert!(matches!(ChainComplex::new(vec![2, 1], vec![IntMatrix::zeros(1, 1)]), Err(ChainError::Shape { .. })));
}

#[test]
fn gabber_examples() {
    let zero = ChainComplex::new(vec![3, 2], vec![IntMatrix::zeros(3, 2)]).unwrap();
    assert_eq!(gabber_bound(&zero, 0).unwrap(), 0.0);
    let r = check_gabber(&zero, 0, &Caps::default()).unwrap();
    assert!(r.holds && r.log_torsion == 0.0);

    let tight =
        ChainComplex::new(vec![1, 1, 1], vec![IntMatrix::zeros(1, 1), IntMatrix::from_dense(&[vec![2]])]).unwrap();
    let r = check_gabber(&tight, 1, &Caps::default()).unwrap();
    assert_eq!(r.bound, 2f64.ln());
    assert_eq!(r.log_torsion, 2f64.ln());
    assert!(r.holds);

    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..20 {
        let c = random_two_step(&mut rng, 20, 5);
        for j in 0..2 {
            assert!(check_gabber(&c, j, &Caps::default()).unwrap().holds);
        }
    }
}

#[test]
fn bt3_examples() {
    let caps = Caps::default();
    let r = check_bt3(&IntMatrix::diagonal(&[2, 3]), &caps).unwrap();
    assert_eq!(r.torsion, BigInt::from(6));
    assert_eq!(r.det_prime_squared, BigInt::from(36));
    assert!(r.holds);
    let r = check_bt3(&IntMatrix::zeros(4, 3), &caps).unwrap();
    assert_eq!((r.torsion, r.det_prime_squared), (BigInt::from(1), BigInt::from(1)));

    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let rows: Vec<Vec<i64>> = (0..8).map(|_| (0..6).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        assert!(check_bt3(&IntMatrix::from_dense(&rows), &caps).unwrap().holds);
    }
}

#[test]
fn tensor_examples() {
    let i = tensor_with_interval(&ChainComplex::point());
    assert_eq!(i.dims(), &[2, 1]);
    assert_eq!(*i.boundary(1), IntMatrix::from_dense(&[vec![-1], vec![1]]));

    let cyl = tensor_with_interval(&circle());
    let h: Vec<_> = homology_all(&cyl, &[], &Caps::default()).unwrap();
    assert_eq!(h[0].betti_rational, 1);
    assert_eq!(h[1].betti_rational, 1);
    assert!(h[1].torsion_factors.is_empty());
    assert_eq!(h[2].betti_rational, 0);

    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let c = random_complex(&mut rng, 3, 6, 4);
        let t = tensor_with_interval(&c);
        for j in 2..=t.top_degree() {
            assert!(t.boundary(j - 1).mul(&t.boundary(j)).is_zero());
        }
        // The cylinder deformation retracts onto either end.
        let hc = homology_all(&c, &[], &Caps::default()).unwrap();
        let ht = homology_all(&t, &[], &Caps::default()).unwrap();
        for j in 0..c.top_degree() {
            assert_eq!(hc[j].betti_rational, ht[j].betti_rational);
            assert_eq!(hc[j].torsion_factors, ht[j].torsion_factors);
        }
    }
}

#[test]
fn file_round_trip() {
    let c = ChainComplex::new(
        vec![1, 2, 1],
        vec![IntMatrix::zeros(1, 2), IntMatrix::from_dense(&[vec![2], vec![0]])],
    )
    .unwrap();
    let text = c.to_string();
    assert_eq!(ChainComplex::parse(&text).unwrap(), c);
    let multi = "# comment\n2\n1\n2\n1\n1 2 0\n2 1 1\n0 0 2\n";
    assert_eq!(ChainComplex::parse(multi).unwrap(), c);
    let bad = "1\n1 1\n1 2 0\n";
    let err = ChainComplex::parse(bad).unwrap_err();
    assert!(err.to_string().starts_with("line 3"), "{err}");
    let nonzero = "2\n1 1 1\n1 1 1\n0 0 1\n1 1 1\n0 0 1\n";
    assert_eq!(ChainComplex::parse(nonzero).unwrap_err(), ChainError::NotAComplex { degree: 2 });
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn uct_and_euler(seed in any::<u64>(), top in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_complex(&mut rng, top, 7, 5);
        let h = homology_all(&c, &[2, 3, 5], &Caps::default()).unwrap();
        prop_assert!(check_universal_coefficients(&h).is_empty());
        let chi: i64 = h.iter().map(|r| if r.degree % 2 == 0 { r.betti_rational as i64 } else { -(r.betti_rational as i64) }).sum();
        prop_assert_eq!(chi, euler_characteristic(&c));
        for r in &h {
            for w in r.torsion_factors.windows(2) {
                prop_assert_eq!(&w[1] % &w[0], BigInt::from(0));
            }
        }
    }

    #[test]
    fn gabber_holds_on_random_two_step(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_two_step(&mut rng, 30, 5);
        for j in 0..2 {
            let r = check_gabber(&c, j, &Caps::default()).unwrap();
            prop_assert!(r.holds, "{:?}", r);
        }
    }
}
