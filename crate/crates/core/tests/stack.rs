use chainrebuild::chain::{homology_all, HomologyResult};
use chainrebuild::circle::{build_circle_cover, circle_rebuilding};
use chainrebuild::nilpotent::{build_mapping_torus, glue_rebuilding, rebuild_lattice, CubicalLift, Hnf, LatticeCover, MappingTorusSpec};
use chainrebuild::rebuild::Rebuilding;
use chainrebuild::stack::{mapping_torus_as_stack, rebuild_stack, BaseCell, StackComplex, StackError};
use chainrebuild::{Caps, ChainComplex, GradedMap, IntMatrix};
use num_traits::Zero;
use proptest::prelude::*;
use std::collections::BTreeMap;

fn homology(c: &ChainComplex) -> Vec<HomologyResult> {
    homology_all(c, &[2], &Caps::default()).unwrap()
}

fn betti(c: &ChainComplex) -> Vec<usize> {
    homology(c).iter().map(|h| h.betti_rational).collect()
}

/// `e_j ↦ e_{j+r}` on `X_N`.
fn rotation(n: usize, r: usize) -> GradedMap {
    let p = IntMatrix::from_columns_i64(n, (0..n).map(|j| vec![(((j + r) % n) as u32, 1)]).collect());
    GradedMap::new(0, vec![p.clone(), p])
}

#[test]
fn vertex_base_gives_the_fiber() {
    let c = build_circle_cover(7);
    let s = StackComplex::new(vec![BaseCell::new("p", 0)], vec![c.clone()], BTreeMap::new()).unwrap();
    assert_eq!(s.total_complex().unwrap(), c);
}

#[test]
fn interval_from_point_fibers() {
    let pt = ChainComplex::point();
    let mut hor = BTreeMap::new();
    hor.insert((2, 0), GradedMap::new(0, vec![IntMatrix::from_dense(&[vec![-1]])]));
    hor.insert((2, 1), GradedMap::new(0, vec![IntMatrix::from_dense(&[vec![1]])]));
    let base = vec![BaseCell::new("a", 0), BaseCell::new("b", 0), BaseCell::new("ab", 1)];
    let s = StackComplex::new(base, vec![pt.clone(), pt.clone(), pt], hor).unwrap();
    let t = s.total_complex().unwrap();
    assert_eq!(t.dims(), &[2, 1]);
    assert_eq!(*t.boundary(1), IntMatrix::from_dense(&[vec![-1], vec![1]]));
}

#[test]
fn mapping_torus_stack_matches_direct_assembly() {
    let c = build_circle_cover(6);
    for r in [0, 1, 4] {
        let theta = rotation(6, r);
        let s = mapping_torus_as_stack(&c, &theta).unwrap();
        let direct = build_mapping_torus(&MappingTorusSpec { fiber: c.clone(), monodromy: theta }).unwrap();
        assert_eq!(s.total_complex().unwrap(), direct);
    }
    let cover = LatticeCover::new(Hnf::from_rows(&[vec![2, 1], vec![0, 4]]).unwrap()).unwrap();
    let theta = CubicalLift::new(vec![vec![1, 1], vec![0, 1]]).unwrap().descend(&cover, &cover, &[0, 0]).unwrap();
    let s = mapping_torus_as_stack(cover.complex(), &theta).unwrap();
    let direct = build_mapping_torus(&MappingTorusSpec { fiber: cover.complex().clone(), monodromy: theta }).unwrap();
    assert_eq!(s.total_complex().unwrap(), direct);
}

#[test]
fn bad_horizontal_reports_bidegree() {
    let c = build_circle_cover(2);
    let mut hor = BTreeMap::new();
    hor.insert((1, 0), GradedMap::new(0, vec![IntMatrix::zeros(2, 2), IntMatrix::identity(2)]));
    let err = StackComplex::new(vec![BaseCell::new("v", 0), BaseCell::new("e", 1)], vec![c.clone(), c], hor).unwrap_err();
    assert_eq!(err, StackError::NotAComplex { degree: 2, cell: 1 });
}

#[test]
fn horizontal_must_lower_base_dimension() {
    let pt = ChainComplex::point();
    let mut hor = BTreeMap::new();
    hor.insert((0, 1), GradedMap::new(0, vec![IntMatrix::zeros(1, 1)]));
    let err = StackComplex::new(vec![BaseCell::new("a", 0), BaseCell::new("b", 0)], vec![pt.clone(), pt], hor).unwrap_err();
    assert_eq!(err, StackError::Filtration { from: 0, to: 1 });
}

#[test]
fn identity_fiber_rebuildings_change_nothing() {
    let c = build_circle_cover(5);
    let s = mapping_torus_as_stack(&c, &rotation(5, 2)).unwrap();
    let ids = vec![Rebuilding::identity(&c, 1), Rebuilding::identity(&c, 1)];
    let (s2, r) = rebuild_stack(&s, &ids).unwrap();
    assert_eq!(s2, s);
    assert_eq!(r.target, r.source);
    for (j, g) in r.g.components().iter().enumerate() {
        assert_eq!(*g, IntMatrix::identity(r.source.dim(j)));
        assert_eq!(r.h.components()[j], *g);
    }
    assert!(r.rho.components().iter().all(IntMatrix::is_zero));
}

#[test]
fn circle_rebuilding_over_circle_keeps_torus_homology() {
    let c = build_circle_cover(100);
    let s = mapping_torus_as_stack(&c, &GradedMap::identity(&c, 1)).unwrap();
    let fr = circle_rebuilding(100, 10.0).unwrap();
    let (s2, r) = rebuild_stack(&s, &[fr.clone(), fr]).unwrap();
    assert_eq!(r.alpha, 2);
    assert_eq!(r.target.total_cells(), 40);
    assert_eq!(s2.fibers()[0].dims(), &[10, 10]);
    assert!(r.verify().unwrap().is_empty());
    assert_eq!(betti(&r.target), vec![1, 2, 1]);
    assert!(homology(&r.target).iter().all(|h| h.torsion_factors.is_empty()));
}

#[test]
fn glue_with_circle_fiber_rebuilding() {
    let c = build_circle_cover(100);
    let spec = MappingTorusSpec { fiber: c.clone(), monodromy: GradedMap::identity(&c, 1) };
    let r = glue_rebuilding(&spec, &circle_rebuilding(100, 10.0).unwrap()).unwrap();
    assert_eq!(r.alpha, 2);
    assert_eq!(r.target.total_cells(), 40);
    assert!(r.verify().unwrap().is_empty());
    assert_eq!(betti(&r.target), vec![1, 2, 1]);
}

fn agree_with_glue(c: &ChainComplex, theta: GradedMap, fr: Rebuilding) {
    let spec = MappingTorusSpec { fiber: c.clone(), monodromy: theta.clone() };
    let glued = glue_rebuilding(&spec, &fr).unwrap();
    let (_, stacked) = rebuild_stack(&mapping_torus_as_stack(c, &theta).unwrap(), &[fr.clone(), fr]).unwrap();
    assert_eq!(stacked.alpha, glued.alpha);
    assert_eq!(stacked.source, glued.source);
    let (hs, hg) = (homology(&stacked.target), homology(&glued.target));
    for j in 0..stacked.alpha {
        assert_eq!(hs[j].betti_rational, hg[j].betti_rational, "degree {j}");
        assert_eq!(hs[j].torsion_factors, hg[j].torsion_factors, "degree {j}");
    }
    // Both follow the same perturbation formulas on a one-edge base.
    assert_eq!(stacked.target, glued.target);
}

#[test]
fn stack_rebuilding_agrees_with_glue() {
    let c = build_circle_cover(24);
    agree_with_glue(&c, rotation(24, 5), circle_rebuilding(24, 4.0).unwrap());
    let h = Hnf::from_rows(&[vec![3, 0], vec![0, 6]]).unwrap();
    let cover = LatticeCover::new(h.clone()).unwrap();
    let theta = CubicalLift::new(vec![vec![1, 1], vec![0, 1]]).unwrap().descend(&cover, &cover, &[0, 0]).unwrap();
    let fr = rebuild_lattice(&h).unwrap();
    assert_eq!(fr.source, *cover.complex());
    agree_with_glue(cover.complex(), theta, fr);
}

/// Square base with constant fiber `C` and transports `θ` along bottom and
/// right, `θ²` along top: `∂bottom = θ·v10 − v00`, `∂right = θ·v11 − v10`,
/// `∂top = θ²·v11 − v01`, `∂left = v01 − v00`,
/// `∂face = bottom + θ·right − top − left`.
fn square_stack(c: &ChainComplex, theta: &GradedMap) -> StackComplex {
    let base = vec![
        BaseCell::new("v00", 0),
        BaseCell::new("v10", 0),
        BaseCell::new("v01", 0),
        BaseCell::new("v11", 0),
        BaseCell::new("bottom", 1),
        BaseCell::new("top", 1),
        BaseCell::new("left", 1),
        BaseCell::new("right", 1),
        BaseCell::new("face", 2),
    ];
    let incid = [
        (4, 1, 1, 1), (4, 0, -1, 0), (5, 3, 1, 2), (5, 2, -1, 0),
        (6, 2, 1, 0), (6, 0, -1, 0), (7, 3, 1, 1), (7, 1, -1, 0),
        (8, 4, 1, 0), (8, 7, 1, 1), (8, 5, -1, 0), (8, 6, -1, 0),
    ];
    let mut hor = BTreeMap::new();
    for (e, f, s, power) in incid {
        let comps = (0..=c.top_degree())
            .map(|k| {
                let t = &theta.components()[k];
                let mut m = IntMatrix::identity(c.dim(k));
                for _ in 0..power {
                    m = t.mul(&m);
                }
                m.scale(if k % 2 == 0 { s } else { -s })
            })
            .collect();
        hor.insert((e, f), GradedMap::new(0, comps));
    }
    StackComplex::new(base, vec![c.clone(); 9], hor).unwrap()
}

fn d(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_dense(rows)
}

/// Cells `v; e; f, f′; g, g′; q` with `∂f = e`, `∂g = f′`, `∂q = g′`,
/// collapsed onto `v`; and the chain map `f ↦ f′`, `g ↦ g′`, `v ↦ v`.
fn staircase() -> (Rebuilding, GradedMap) {
    let c = ChainComplex::new(
        vec![1, 1, 2, 2, 1],
        vec![IntMatrix::zeros(1, 1), d(&[vec![1, 0]]), d(&[vec![0, 0], vec![1, 0]]), d(&[vec![0], vec![1]])],
    )
    .unwrap();
    let pt = ChainComplex::new(vec![1, 0, 0, 0, 0], (0..4).map(|j| IntMatrix::zeros(usize::from(j == 0), 0)).collect()).unwrap();
    let g = GradedMap::new(0, (0..5).map(|j| if j == 0 { IntMatrix::identity(1) } else { IntMatrix::zeros(0, c.dim(j)) }).collect());
    let h = GradedMap::new(0, (0..5).map(|j| if j == 0 { IntMatrix::identity(1) } else { IntMatrix::zeros(c.dim(j), 0) }).collect());
    let rho = GradedMap::new(1, vec![IntMatrix::zeros(1, 1), d(&[vec![-1], vec![0]]), d(&[vec![0, -1], vec![0, 0]]), d(&[vec![0, -1]])]);
    let r = Rebuilding::new(4, c, pt, g, h, rho).unwrap();
    let shift = d(&[vec![0, 0], vec![1, 0]]);
    let t = GradedMap::new(0, vec![IntMatrix::identity(1), IntMatrix::zeros(1, 1), shift.clone(), shift, IntMatrix::zeros(1, 1)]);
    (r, t)
}

#[test]
fn depth_two_base_series() {
    let (fr, t) = staircase();
    assert!(fr.verify().unwrap().is_empty());
    assert!(fr.is_full().unwrap());
    let s = square_stack(&fr.source, &t);
    assert_eq!(s.depth(), 2);
    let (s2, r) = rebuild_stack(&s, &vec![fr.clone(); 9]).unwrap();
    assert_eq!(r.alpha, 6);
    assert!(r.verify().unwrap().is_empty());
    assert_eq!(r.target.dims(), &[4, 4, 1, 0, 0, 0, 0]);
    assert_eq!(betti(&r.target), betti(&r.source));
    assert_eq!(betti(&r.target)[..3], [1, 0, 0]);
    for &(e, f) in s2.horizontal().keys() {
        assert!(s2.base()[f].dim < s2.base()[e].dim);
    }
    // ρ from the face fiber's e into v11's q: σ∂ʰσ∂ʰσ, the second-order term.
    let rho3 = &r.rho.components()[3];
    assert_eq!(rho3.shape(), (14, 17));
    assert!(!rho3.get(3, 16).is_zero());
}

#[test]
fn stack_text_round_trip() {
    let c = build_circle_cover(4);
    let s = mapping_torus_as_stack(&c, &rotation(4, 1)).unwrap();
    let (text, files) = s.to_text("mt");
    assert!(text.starts_with("stack 2\ncell v 0 mt.v.chain\n"));
    let files: BTreeMap<String, String> = files.into_iter().collect();
    let back = StackComplex::parse_with(&text, |p| files.get(p).cloned().ok_or_else(|| "missing".to_string())).unwrap();
    assert_eq!(back, s);

    let dir = tempfile::tempdir().unwrap();
    s.save(dir.path(), "mt").unwrap();
    assert_eq!(StackComplex::load(&dir.path().join("mt.stack")).unwrap(), s);
}

#[test]
fn stack_parse_errors_carry_lines() {
    let fiber = ChainComplex::point().to_string();
    let get = |_: &str| Ok(fiber.clone());
    let e = StackComplex::parse_with("stack 1\ncell p 0 f\nhorizontal p q 0\n", get).unwrap_err();
    assert!(matches!(e, StackError::Parse(ref p) if p.line == 3), "{e}");
    let e = StackComplex::parse_with("stack 2\ncell p 0 f\n", get).unwrap_err();
    assert!(matches!(e, StackError::Parse(ref p) if p.line == 3), "{e}");
    let e = StackComplex::parse_with("stack 1\ncell p 0 f\n", |_| Err("gone".into())).unwrap_err();
    assert!(matches!(e, StackError::Io { .. }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn random_circle_tori_agree(n in 8usize..48, r in 0usize..48, t in 2usize..6) {
        prop_assume!(n >= 4 * t);
        let c = build_circle_cover(n);
        agree_with_glue(&c, rotation(n, r % n), circle_rebuilding(n, t as f64).unwrap());
    }
}
