//! Property suites over the public API: group law, characters, Fourier
//! transforms, normal-ordering determinism and pipeline invariants.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use hecke_core::chars::CharTables;
use hecke_core::curve::{ClosedPoint, CurveSpec, EllipticCurve};
use hecke_core::ehall::{EngineOptions, Gamma2Mode, TowerAlgebra};
use hecke_core::heckegraph::{twist, Execution, HeckePipeline};
use hecke_core::scalars::{CycloScalar, RationalFunctionV as Rfv};
use hecke_core::sheaves::{bundles_in_window, path_of, polygon_contains, CoherentSheaf, KVector};
use hecke_core::symfunc::{hl_to_p, p_to_hl, partitions, Partition};
use proptest::prelude::*;

const PRESETS: [&str; 4] = ["f2-one-point", "f3-one-point", "f4-one-point", "f2-five-points"];

fn curve(name: &str) -> EllipticCurve {
    EllipticCurve::new(CurveSpec::preset(name).unwrap()).unwrap()
}

/// Every `(curve, n)` whose group `X(F_{q^n})` has order at most 30.
fn small_groups() -> Vec<(EllipticCurve, u32)> {
    let mut out = Vec::new();
    for name in PRESETS {
        let c = curve(name);
        for n in 1..=c.max_degree() {
            if c.count(n) <= 30 {
                out.push((c.clone(), n));
            }
        }
    }
    out
}

#[test]
fn group_law_exhaustive() {
    let groups = small_groups();
    assert!(groups.len() >= 8);
    for (c, n) in &groups {
        let n = *n;
        let size = c.count(n) as u32;
        let o = c.origin_index(n);
        for a in 0..size {
            assert_eq!(c.add_idx(n, a, o), a);
            assert_eq!(c.add_idx(n, a, c.neg_idx(n, a)), o);
            // table against chord-tangent arithmetic
            let pa = c.point_at(n, a);
            for b in 0..size {
                let ab = c.add_idx(n, a, b);
                assert_eq!(ab, c.add_idx(n, b, a));
                let direct = c.group_add(pa, c.point_at(n, b)).unwrap();
                assert_eq!(c.point_index(direct).unwrap(), ab);
                let fa = c.frob_idx(n, a);
                let fb = c.frob_idx(n, b);
                assert_eq!(c.frob_idx(n, ab), c.add_idx(n, fa, fb));
                for d in 0..size {
                    assert_eq!(c.add_idx(n, ab, d), c.add_idx(n, a, c.add_idx(n, b, d)));
                }
            }
            let mut f = a;
            for _ in 0..n {
                f = c.frob_idx(n, f);
            }
            assert_eq!(f, a, "Frobenius has order dividing {n}");
        }
    }
}

#[test]
fn character_orthogonality_exhaustive() {
    for (c, n) in small_groups() {
        let t = CharTables::new(&c, n).unwrap();
        let size = c.count(n) as i64;
        let chars = t.characters(n).unwrap();
        assert_eq!(chars.len() as i64, size);
        let val = |chi, p| t.char_value(chi, p).unwrap();
        for (i, &a) in chars.iter().enumerate() {
            for (j, &b) in chars.iter().enumerate() {
                let mut acc = CycloScalar::zero();
                for p in 0..size as u32 {
                    acc.add_assign(&val(a, p).mul(&val(b, c.neg_idx(n, p))));
                }
                let want = if i == j { size } else { 0 };
                assert_eq!(acc.to_rfv().unwrap(), Rfv::from_int(want));
            }
        }
        for p in 0..size as u32 {
            for p2 in 0..size as u32 {
                let mut acc = CycloScalar::zero();
                for &chi in &chars {
                    acc.add_assign(&val(chi, p).mul(&val(chi, c.neg_idx(n, p2))));
                }
                let want = if p == p2 { size } else { 0 };
                assert_eq!(acc.to_rfv().unwrap(), Rfv::from_int(want));
            }
        }
    }
}

fn closed_dividing(c: &EllipticCurve, d: u32) -> Vec<ClosedPoint> {
    c.closed_points(d)
        .unwrap()
        .into_iter()
        .filter(|x| d.is_multiple_of(x.degree))
        .collect()
}

fn five_point_pipeline() -> &'static HeckePipeline<'static> {
    static C: OnceLock<EllipticCurve> = OnceLock::new();
    static T: OnceLock<CharTables> = OnceLock::new();
    static P: OnceLock<HeckePipeline<'static>> = OnceLock::new();
    let c = C.get_or_init(|| curve("f2-five-points"));
    let t = T.get_or_init(|| CharTables::new(c, 2).unwrap());
    P.get_or_init(|| HeckePipeline::new(c, t, EngineOptions::default()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fourier_roundtrip(ci in 0usize..4, d in 1u32..=3, seed in prop::collection::vec(-9i64..=9, 64)) {
        let c = curve(PRESETS[ci]);
        let t = CharTables::new(&c, 3).unwrap();
        let mut m = BTreeMap::new();
        for (x, k) in closed_dividing(&c, d).into_iter().zip(seed.iter().cycle()) {
            m.insert(x, CycloScalar::from_rfv(Rfv::from_int(*k)));
        }
        let chars = t.to_char_basis(&c, d, &m).unwrap();
        let back = t.to_point_basis(&c, d, &chars).unwrap();
        for (x, v) in &m {
            prop_assert_eq!(&back[x], v);
        }
        // and the other way round
        let mut o = BTreeMap::new();
        for (orb, k) in t.orbits(d).unwrap().into_iter().zip(seed.iter().cycle()) {
            o.insert(orb, CycloScalar::from_rfv(Rfv::from_int(*k)));
        }
        let pts = t.to_point_basis(&c, d, &o).unwrap();
        let again = t.to_char_basis(&c, d, &pts).unwrap();
        for (orb, v) in &o {
            prop_assert!(again[orb].add(&v.neg()).is_zero());
        }
    }

    #[test]
    fn hall_littlewood_transitions_invert(w in 1usize..=5, t_exp in prop::sample::select(vec![2i64, 4, 6])) {
        for mu in partitions(w) {
            let hl = p_to_hl(&mu, t_exp).unwrap();
            let mut acc: BTreeMap<Partition, Rfv> = BTreeMap::new();
            for (l, c) in &hl.terms {
                for (nu, d) in hl_to_p(l, t_exp).unwrap().terms {
                    *acc.entry(nu).or_default() += &(c * &d);
                }
            }
            acc.retain(|_, c| !c.is_zero());
            prop_assert_eq!(acc, BTreeMap::from([(mu.clone(), Rfv::one())]));
        }
    }

    #[test]
    fn curve_reduction_is_a_ring_map(
        a in prop::collection::vec(-5i64..=5, 1..6),
        b in prop::collection::vec(-5i64..=5, 1..6),
        la in -4i64..=4,
        lb in -4i64..=4,
        q in prop::sample::select(vec![2u64, 3, 4]),
    ) {
        let x = Rfv::laurent(la, &a);
        let y = Rfv::laurent(lb, &b);
        let r = |z: &Rfv| z.reduce_at_curve(q).unwrap();
        prop_assert_eq!(r(&(&x * &y)), r(&(&r(&x) * &r(&y))));
        prop_assert_eq!(r(&(&x + &y)), r(&(&r(&x) + &r(&y))));
    }

    #[test]
    fn neighborhoods_commute_with_twists(idx in 0usize..64, k in -2i64..=2, p in 0u32..5) {
        let pipe = five_point_pipeline();
        let c = pipe.curve();
        let x = c.rational_closed(1);
        let vs = bundles_in_window(c, 2, 0, 1).unwrap();
        let e = &vs[idx % vs.len()];
        let moved = twist(c, e, k, p).unwrap();
        let a: Vec<_> = pipe
            .neighborhood(e, x, 1)
            .unwrap()
            .into_iter()
            .map(|h| (twist(c, &h.target, k, p).unwrap(), h.multiplicity))
            .collect();
        let mut b: Vec<_> = pipe
            .neighborhood(&moved, x, 1)
            .unwrap()
            .into_iter()
            .map(|h| (h.target, h.multiplicity))
            .collect();
        let mut a = a;
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn normal_order_ignores_split_order() {
    let kv = KVector::raw;
    let pairs = [
        (kv(0, 3), kv(3, 1)),
        (kv(0, 4), kv(3, -1)),
        (kv(1, 3), kv(2, -1)),
        (kv(0, 2), kv(3, 1)),
        (kv(2, 3), kv(1, -2)),
    ];
    let base_alg = TowerAlgebra::new(1, 2, 1, EngineOptions::default());
    let base: Vec<_> = pairs.iter().map(|&(z, w)| base_alg.bracket(z, w).unwrap()).collect();
    for seed in 0..100u64 {
        let opts = EngineOptions {
            split_seed: Some(seed),
            ..Default::default()
        };
        let alg = TowerAlgebra::new(1, 2, 1, opts);
        for (i, &(z, w)) in pairs.iter().enumerate() {
            assert_eq!(alg.bracket(z, w).unwrap(), base[i], "seed {seed}");
        }
    }
}

#[test]
fn pipeline_product_ignores_split_order() {
    let c = curve("f2-one-point");
    let t = CharTables::new(&c, 3).unwrap();
    let x = c.rational_closed(0);
    let e = &bundles_in_window(&c, 3, 0, 1).unwrap()[7];
    let run = |seed| {
        let p = HeckePipeline::new(
            &c,
            &t,
            EngineOptions {
                split_seed: seed,
                ..Default::default()
            },
        );
        p.product(e, x, 1).unwrap()
    };
    let base = run(None);
    for seed in (0..100u64).step_by(10) {
        assert_eq!(run(Some(seed)), base);
    }
}

fn check_slice_invariants(c: &EllipticCurve, t: &CharTables, n: i64, r: u32, window: (i64, i64), opts: EngineOptions) {
    let p = HeckePipeline::new(c, t, opts);
    let x = c.rational_closed(0);
    let g = p.full_graph(x, r, n, window, Execution::Parallel).unwrap();
    assert!(!g.edges.is_empty());
    let shift = r as i64 * x.degree as i64;
    for e in &g.edges {
        assert_eq!(e.source.class(), e.target.class().add(&KVector::raw(0, shift)));
        assert!(e.target.is_vector_bundle());
        assert!(polygon_contains(&path_of(&e.source), shift, &path_of(&e.target)), "{e}");
        assert!(e.multiplicity > 0);
    }
}

#[test]
fn class_and_polygon_invariants() {
    let c = curve("f2-five-points");
    let t = CharTables::new(&c, 2).unwrap();
    check_slice_invariants(&c, &t, 2, 1, (0, 1), EngineOptions::default());
    let c = curve("f2-one-point");
    let t = CharTables::new(&c, 3).unwrap();
    check_slice_invariants(&c, &t, 2, 1, (-1, 1), EngineOptions::default());
    check_slice_invariants(&c, &t, 3, 1, (0, 1), EngineOptions::default());
    let (k, _) = TowerAlgebra::probe_gamma2_constant(1, 2, 1).unwrap();
    let opts = EngineOptions {
        gamma2: Gamma2Mode::Constant(k),
        ..Default::default()
    };
    check_slice_invariants(&c, &t, 3, 2, (0, 1), opts);
}

#[test]
fn empty_window_gives_empty_slice() {
    let c = curve("f2-one-point");
    let t = CharTables::new(&c, 2).unwrap();
    let p = HeckePipeline::new(&c, &t, EngineOptions::default());
    let g = p
        .full_graph(c.rational_closed(0), 1, 2, (1, 0), Execution::Sequential)
        .unwrap();
    assert!(g.vertices.is_empty());
    assert!(g.edges.is_empty());
}

#[test]
fn parallel_and_sequential_agree() {
    let c = curve("f3-one-point");
    let t = CharTables::new(&c, 2).unwrap();
    let p = HeckePipeline::new(&c, &t, EngineOptions::default());
    let x = c.rational_closed(0);
    let a = p.full_graph(x, 1, 2, (-2, 2), Execution::Parallel).unwrap();
    let p2 = HeckePipeline::new(&c, &t, EngineOptions::default());
    let b = p2.full_graph(x, 1, 2, (-2, 2), Execution::Sequential).unwrap();
    assert_eq!(a, b);
}

#[test]
fn unsupported_relation_is_reported() {
    let c = curve("f2-one-point");
    let t = CharTables::new(&c, 3).unwrap();
    let p = HeckePipeline::new(&c, &t, EngineOptions::default());
    let x = c.rational_closed(0);
    let e = CoherentSheaf::new(
        bundles_in_window(&c, 1, 0, 0).unwrap()[0]
            .parts()
            .iter()
            .cycle()
            .take(3)
            .copied()
            .collect(),
    );
    let err = p.neighborhood(&e, x, 2).unwrap_err();
    assert!(matches!(err, hecke_core::HeckeError::UnsupportedRelation { .. }), "{err}");
}
