use chainrebuild::chain::{homology_all, HomologyResult};
use chainrebuild::circle::build_circle_cover;
use chainrebuild::nilpotent::{
    build_cover, build_mapping_torus, fit_log_slope, glue_rebuilding, rebuild_lattice, rebuild_unipotent,
    theta_power_norm_scan, unwind_rebuilding, CellularSelfMap, Hnf, LatticeCover, LevelSpec, MappingTorusSpec,
    NilpotentError, SubgroupSpec, UnipotentTower,
};
use chainrebuild::rebuild::{quality, Rebuilding};
use chainrebuild::{Caps, IntMatrix};
use num_bigint::BigInt;
use proptest::prelude::*;

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn homology(c: &chainrebuild::ChainComplex) -> Vec<HomologyResult> {
    homology_all(c, &[2], &Caps::default()).unwrap()
}

fn same_homology_below(r: &Rebuilding, top: usize) {
    let hs = homology(&r.source);
    let ht = homology(&r.target);
    for j in 0..top {
        assert_eq!(hs[j].betti_rational, ht[j].betti_rational, "degree {j}");
        assert_eq!(hs[j].torsion_factors, ht[j].torsion_factors, "degree {j}");
    }
}

#[test]
fn hnf_normal_form_and_index() {
    let h = Hnf::from_generators(3, &[vec![4, 0, 2], vec![6, 3, 0], vec![1, 1, 5]]).unwrap();
    // Triangular with reduced off-diagonal entries.
    for i in 0..3 {
        assert!(h.get(i, i) > 0);
        for j in 0..3 {
            if j < i {
                assert_eq!(h.get(i, j), 0);
            } else if j > i {
                assert!((0..h.get(i, i)).contains(&h.get(i, j)));
            }
        }
    }
    // Oracle: index equals |det| of the generator matrix.
    let g = [[4i64, 6, 1], [0, 3, 1], [2, 0, 5]];
    let laplace = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    assert_eq!(h.index() as i64, laplace.abs());
    for gen in [[4, 0, 2], [6, 3, 0], [1, 1, 5]] {
        assert!(h.contains(&gen));
    }
    assert!(Hnf::from_generators(2, &[vec![1, 2], vec![2, 4]]).is_err());
    assert!(Hnf::from_rows(&[vec![2, 3], vec![0, 3]]).is_err());
    assert_eq!(Hnf::from_rows(&[vec![2, 1], vec![0, 3]]).unwrap().index(), 6);
}

#[test]
fn lattice_covers_match_level_assembly() {
    for rows in [vec![vec![2, 1], vec![0, 3]], vec![vec![3, 0, 2], vec![0, 1, 0], vec![0, 0, 2]], vec![vec![5]]] {
        let h = Hnf::from_rows(&rows).unwrap();
        let d = h.rank();
        let direct = LatticeCover::new(h.clone()).unwrap();
        let level = build_cover(&UnipotentTower::abelian(d), &SubgroupSpec::from_hnf(&h)).unwrap();
        assert_eq!(*direct.complex(), level.complex);
        let idx = h.index() as usize;
        let dims: Vec<usize> = (0..=d).map(|j| idx * binom(d, j)).collect();
        assert_eq!(direct.complex().dims(), dims.as_slice());
        // Oracle: the cover is again a d-torus, so H_j = ℤ^{C(d,j)}.
        for (j, r) in homology(direct.complex()).iter().enumerate() {
            assert_eq!(r.betti_rational, binom(d, j));
            assert!(r.torsion_factors.is_empty());
        }
    }
}

#[test]
fn z2_example_has_24_cells() {
    let h = Hnf::from_rows(&[vec![2, 0], vec![0, 3]]).unwrap();
    let c = build_cover(&UnipotentTower::abelian(2), &SubgroupSpec::from_hnf(&h)).unwrap();
    assert_eq!(c.complex.total_cells(), 24);
}

#[test]
fn z1_cover_is_the_circle_cover() {
    for n in [1usize, 2, 7, 30] {
        let h = Hnf::from_rows(&[vec![n as i64]]).unwrap();
        let c = build_cover(&UnipotentTower::abelian(1), &SubgroupSpec::from_hnf(&h)).unwrap();
        assert_eq!(c.complex, build_circle_cover(n));
    }
}

#[test]
fn dehn_twist_powers() {
    let t = CellularSelfMap::dehn_twist_torus();
    assert_eq!(t.complex.dims(), &[1, 2, 1]);
    assert!(t.complex.boundaries().iter().all(|b| b.is_zero()));
    // Degree-1 basis (e, f).
    assert_eq!(t.theta.components()[1], IntMatrix::from_dense(&[vec![1, 1], vec![0, 1]]));
    for m in [1u64, 2, 5, 40] {
        let p = t.power(m);
        assert_eq!(p.components()[1], IntMatrix::from_dense(&[vec![1, m as i64], vec![0, 1]]));
        assert_eq!(p.components()[2], IntMatrix::identity(1));
    }
    // θ on the T² = circle × [I] layout: θ(v⊗[I]) = v⊗[I] + r(v)⊗[0].
    let r = t.twist_homotopy.as_ref().unwrap();
    assert_eq!(r.components()[0], IntMatrix::from_dense(&[vec![1]]));
    // Heisenberg nilmanifold: H = ℤ, ℤ², ℤ², ℤ.
    let h = homology(&t.mapping_torus().unwrap());
    let betti: Vec<usize> = h.iter().map(|r| r.betti_rational).collect();
    assert_eq!(betti, vec![1, 2, 2, 1]);
    assert!(h.iter().all(|r| r.torsion_factors.is_empty()));
}

#[test]
fn heisenberg_congruence_covers() {
    let tower = UnipotentTower::heisenberg();
    for n in 1..=4u64 {
        let sub = SubgroupSpec::heisenberg_mod(n);
        assert_eq!(sub.index(), n.pow(3));
        let cover = build_cover(&tower, &sub).unwrap();
        assert_eq!(cover.complex.total_cells() as u64, 8 * n.pow(3));
        // Oracle: the congruence subgroup has [X^N, Y^N] = Z^{N²}, so H₁ = ℤ² ⊕ ℤ/N.
        let h = homology(&cover.complex);
        assert_eq!(h[1].betti_rational, 2);
        let want: Vec<BigInt> = if n > 1 { vec![BigInt::from(n)] } else { vec![] };
        assert_eq!(h[1].torsion_factors, want);
        assert_eq!(h[3].betti_rational, 1);
    }
}

#[test]
fn invalid_subgroups_are_rejected() {
    let tower = UnipotentTower::heisenberg();
    // Λ₁ = 2ℤ × ℤ and ℓ = 1: M(0,1) = (1,1) ∉ Λ₁.
    let sub = SubgroupSpec {
        levels: vec![
            LevelSpec { jump: 2, correction: vec![] },
            LevelSpec { jump: 1, correction: vec![0] },
            LevelSpec { jump: 1, correction: vec![0, 0] },
        ],
    };
    assert!(matches!(build_cover(&tower, &sub), Err(NilpotentError::Invalid(_))));
    let short = SubgroupSpec { levels: vec![LevelSpec { jump: 2, correction: vec![] }] };
    assert!(build_cover(&tower, &short).is_err());
    let bad = UnipotentTower::new("bad", vec![vec![], vec![vec![2]]]);
    assert!(matches!(bad, Err(NilpotentError::Invalid(_))));
    let low_twist = UnipotentTower::new(
        "low",
        vec![vec![], vec![vec![1]], vec![vec![1, 1], vec![0, 1]], vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]],
    );
    assert!(matches!(low_twist, Err(NilpotentError::Unsupported(_))));
}

#[test]
fn subgroup_text_format() {
    let (t, s) = SubgroupSpec::parse("tower heisenberg\nlevel ℓ=2 a=\nlevel ℓ=2 a=0\nlevel l=2 a=0,0\n").unwrap();
    assert_eq!(t, UnipotentTower::heisenberg());
    assert_eq!(s, SubgroupSpec::heisenberg_mod(2));
    let (t, s) = SubgroupSpec::parse("# lattice\ntower z2\nhnf\n2 1\n0 3\n").unwrap();
    assert_eq!(t.hirsch_length(), 2);
    assert_eq!(s.index(), 6);
    assert_eq!(s.levels[1].correction, vec![1]);
    let err = SubgroupSpec::parse("tower z2\nhnf\n2 5\n0 3\n").unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
    let err = SubgroupSpec::parse("tower heisenberg\nlevel ℓ=2 a=\nlevel ℓ=x a=0\n").unwrap_err();
    assert!(err.to_string().contains("line 3"), "{err}");
    assert!(SubgroupSpec::parse("tower nope\n").is_err());
}

#[test]
fn unwind_over_a_point_is_full() {
    let h = Hnf::from_rows(&[vec![12]]).unwrap();
    let level = build_cover(&UnipotentTower::abelian(1), &SubgroupSpec::from_hnf(&h)).unwrap();
    let (r, torus) = unwind_rebuilding(&level).unwrap();
    assert_eq!(r.source, build_circle_cover(12));
    assert_eq!(r.target, build_circle_cover(1));
    assert!(r.verify().unwrap().is_empty());
    assert!(r.is_full().unwrap());
    assert_eq!(torus.monodromy.components()[0], IntMatrix::identity(1));
}

#[test]
fn glue_with_identity_fiber_is_the_mapping_torus() {
    let t = CellularSelfMap::dehn_twist_torus();
    let spec = MappingTorusSpec { fiber: t.complex.clone(), monodromy: t.theta.clone() };
    let id = Rebuilding::identity(&t.complex, 2);
    let r = glue_rebuilding(&spec, &id).unwrap();
    let mt = build_mapping_torus(&spec).unwrap();
    assert_eq!(r.source, mt);
    assert_eq!(r.target, mt);
    assert_eq!(r.alpha, 3);
    assert!(r.verify().unwrap().is_empty());
}

#[test]
fn unwind_and_glue_on_twisted_level() {
    let tower = UnipotentTower::heisenberg();
    let sub = SubgroupSpec::heisenberg_mod(3);
    let level = build_cover(&tower, &sub).unwrap();
    let (r1, torus) = unwind_rebuilding(&level).unwrap();
    assert!(r1.verify().unwrap().is_empty());
    assert!(r1.is_full().unwrap());
    assert_eq!(r1.target.total_cells(), 2 * 9 * 4);
    let fiber = rebuild_lattice(&Hnf::scalar(2, 3)).unwrap();
    let r2 = glue_rebuilding(&torus, &fiber).unwrap();
    assert!(r2.verify().unwrap().is_empty());
    assert_eq!(r2.target.dims(), &[1, 3, 3, 1]);
}

#[test]
fn abelian_rebuildings_reach_the_one_vertex_torus() {
    for rows in [vec![vec![7]], vec![vec![2, 1], vec![0, 3]], vec![vec![3, 1, 2], vec![0, 2, 1], vec![0, 0, 2]]] {
        let h = Hnf::from_rows(&rows).unwrap();
        let d = h.rank();
        let r = rebuild_unipotent(&UnipotentTower::abelian(d), &SubgroupSpec::from_hnf(&h)).unwrap();
        assert_eq!(r.alpha, d);
        let dims: Vec<usize> = (0..=d).map(|j| binom(d, j)).collect();
        assert_eq!(r.target.dims(), dims.as_slice());
        assert!(r.verify().unwrap().is_empty());
        assert!(r.is_full().unwrap());
        same_homology_below(&r, d + 1);
    }
}

#[test]
fn heisenberg_rebuildings_preserve_homology() {
    let tower = UnipotentTower::heisenberg();
    for n in 1..=4u64 {
        let r = rebuild_unipotent(&tower, &SubgroupSpec::heisenberg_mod(n)).unwrap();
        assert_eq!(r.alpha, 3);
        assert_eq!(r.target.dims(), &[1, 3, 3, 1]);
        assert!(r.verify().unwrap().is_empty(), "N = {n}");
        same_homology_below(&r, 4);
    }
}

// Frozen from a run: every cell ratio is exactly 1 at T = index and all norm
// terms stay below 1, so κ clamps to 1.
const KAPPA_FROZEN: f64 = 1.0;

#[test]
fn torus_index_100_quality() {
    let h = Hnf::from_rows(&[vec![10, 0], vec![0, 10]]).unwrap();
    let r = rebuild_unipotent(&UnipotentTower::abelian(2), &SubgroupSpec::from_hnf(&h)).unwrap();
    assert_eq!(r.source.total_cells(), 400);
    let q = quality(&r, 100.0).unwrap();
    assert_eq!(q.cell_ratios, vec![1.0; 3]);
    assert!(q.kappa_min <= KAPPA_FROZEN, "{q:?}");
}

#[test]
fn heisenberg_sweep_kappa_regression() {
    let tower = UnipotentTower::heisenberg();
    for n in 2..=8u64 {
        let r = rebuild_unipotent(&tower, &SubgroupSpec::heisenberg_mod(n)).unwrap();
        let q = quality(&r, n.pow(3) as f64).unwrap();
        assert!(q.kappa_min <= KAPPA_FROZEN, "N = {n}: {q:?}");
        assert!(q.norm_kappa() < 0.7, "N = {n}: {}", q.norm_kappa());
    }
}

#[test]
fn theta_norm_growth() {
    let dehn = CellularSelfMap::dehn_twist_torus();
    let rows = theta_power_norm_scan(&dehn, 400);
    let slope = fit_log_slope(&rows, 10);
    assert!((0.9..=1.1).contains(&slope), "{slope}");
    let twist = CellularSelfMap::torus(vec![vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]]).unwrap();
    let slope = fit_log_slope(&theta_power_norm_scan(&twist, 400), 10);
    assert!((1.8..=2.1).contains(&slope), "{slope}");
    let id = CellularSelfMap::torus(vec![vec![1, 0], vec![0, 1]]).unwrap();
    assert_eq!(fit_log_slope(&theta_power_norm_scan(&id, 50), 1), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_planar_lattices_rebuild(a in 1i64..7, b in 1i64..7, c in 0i64..7) {
        let h = Hnf::from_rows(&[vec![a, c % a], vec![0, b]]).unwrap();
        let r = rebuild_unipotent(&UnipotentTower::abelian(2), &SubgroupSpec::from_hnf(&h)).unwrap();
        prop_assert!(r.verify().unwrap().is_empty());
        prop_assert_eq!(r.target.dims(), &[1usize, 2, 1][..]);
    }
}
