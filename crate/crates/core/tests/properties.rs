use cat0_boundary::boundary::{
    moran_metric, ray_product_at, sandwich_constants, ComparisonFn, MetricParams, VisualNetMetric, DEFAULT_MORAN_TOL,
};
use cat0_boundary::buildings::BuildingHandle;
use cat0_boundary::covers::{cover_stats, greedy_colored_cover, multiplicities, DistanceMatrix, GreedyOptions};
use cat0_boundary::spaces::{build_space, BoundaryPoint, NetResolution, ProductEnd, Space, SpaceSpec, TreeEnd};
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

const TOL: f64 = 1e-9;

fn tree() -> Space {
    build_space(&SpaceSpec::tree(3, 10)).unwrap()
}

fn tree_end() -> impl Strategy<Value = BoundaryPoint> {
    prop::collection::vec(0u32..3, 0..10).prop_map(|p| BoundaryPoint::Tree(TreeEnd::with_zero_tail(p)))
}

fn angle() -> impl Strategy<Value = BoundaryPoint> {
    (0.0..TAU).prop_map(BoundaryPoint::angle)
}

fn product_end() -> impl Strategy<Value = BoundaryPoint> {
    let factor = || prop::collection::vec(0u32..2, 0..8).prop_map(|p| BoundaryPoint::Tree(TreeEnd::with_zero_tail(p)));
    (factor(), factor(), 0.05..FRAC_PI_2 - 0.05)
        .prop_map(|(first, second, alpha)| BoundaryPoint::Product(Box::new(ProductEnd { first, second, alpha })))
}

fn product() -> Space {
    build_space(&SpaceSpec::product(SpaceSpec::tree(2, 12), SpaceSpec::tree(2, 12))).unwrap()
}

/// Triangle excess and asymmetry for points at the given ray parameters.
fn triangle(sp: &Space, pts: [(&BoundaryPoint, f64); 3]) -> (f64, f64) {
    let [x, y, z] = pts.map(|(xi, t)| sp.ray_eval(xi, t).unwrap());
    let d = |p, q| sp.distance(p, q).unwrap();
    (d(&x, &z) - d(&x, &y) - d(&y, &z), (d(&x, &y) - d(&y, &x)).abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tree_distance_is_exact_metric(a in tree_end(), b in tree_end(), c in tree_end(), s in 0.0..10.0f64, t in 0.0..10.0f64, u in 0.0..10.0f64) {
        let (excess, asym) = triangle(&tree(), [(&a, s), (&b, t), (&c, u)]);
        prop_assert!(excess <= 1e-12);
        prop_assert_eq!(asym, 0.0);
    }

    #[test]
    fn plane_and_h2_triangle(a in angle(), b in angle(), c in angle(), s in 0.0..20.0f64, t in 0.0..20.0f64, u in 0.0..20.0f64) {
        for sp in [build_space(&SpaceSpec::plane()).unwrap(), build_space(&SpaceSpec::hyperbolic_plane()).unwrap()] {
            let (excess, asym) = triangle(&sp, [(&a, s), (&b, t), (&c, u)]);
            prop_assert!(excess <= TOL);
            prop_assert!(asym <= TOL);
        }
    }

    #[test]
    fn product_triangle(a in product_end(), b in product_end(), c in product_end(), s in 0.0..10.0f64, t in 0.0..10.0f64, u in 0.0..10.0f64) {
        let (excess, asym) = triangle(&product(), [(&a, s), (&b, t), (&c, u)]);
        prop_assert!(excess <= TOL);
        prop_assert!(asym <= TOL);
    }

    #[test]
    fn rays_have_unit_speed(a in angle(), s in 0.0..50.0f64, t in 0.0..50.0f64) {
        let h2 = build_space(&SpaceSpec::hyperbolic_plane()).unwrap();
        let d = h2.distance(&h2.ray_eval(&a, s).unwrap(), &h2.ray_eval(&a, t).unwrap()).unwrap();
        prop_assert!((d - (s - t).abs()).abs() <= TOL);
    }

    #[test]
    fn convexity_ratio_on_h2(a in angle(), b in angle(), t in 0.01..30.0f64, frac in 0.0..=1.0f64) {
        let h2 = build_space(&SpaceSpec::hyperbolic_plane()).unwrap();
        let s = frac * t;
        let lhs = h2.displacement(&a, &b, s).unwrap();
        prop_assert!(lhs <= s / t * h2.displacement(&a, &b, t).unwrap() + TOL);
    }

    #[test]
    fn convexity_ratio_is_equality_on_plane(a in angle(), b in angle(), t in 0.01..30.0f64, frac in 0.0..=1.0f64) {
        let plane = build_space(&SpaceSpec::plane()).unwrap();
        let s = frac * t;
        let gap = plane.displacement(&a, &b, s).unwrap() - s / t * plane.displacement(&a, &b, t).unwrap();
        prop_assert!(gap.abs() <= TOL);
    }

    #[test]
    fn ray_products_are_monotone_on_trees(a in tree_end(), b in tree_end(), s in 0.0..10.0f64, t in 0.0..10.0f64) {
        let sp = tree();
        let (lo, hi) = (s.min(t), s.max(t));
        prop_assert!(sp.displacement(&a, &b, lo).unwrap() <= sp.displacement(&a, &b, hi).unwrap());
        prop_assert!(ray_product_at(&sp, &a, &b, lo).unwrap() <= ray_product_at(&sp, &a, &b, hi).unwrap() + 1e-12);
    }

    #[test]
    fn moran_tree_matches_divergence(a in tree_end(), b in tree_end()) {
        let sp = tree();
        let d = moran_metric(&sp, 1.0, &a, &b, DEFAULT_MORAN_TOL).unwrap();
        let (BoundaryPoint::Tree(x), BoundaryPoint::Tree(y)) = (&a, &b) else { unreachable!() };
        let expected = x.divergence_index(y).map_or(0.0, |k| 1.0 / (k as f64 + 0.5));
        prop_assert!((d - expected).abs() <= TOL);
    }

    #[test]
    fn moran_is_symmetric_with_triangle(a in angle(), b in angle(), c in angle()) {
        let h2 = build_space(&SpaceSpec::hyperbolic_plane()).unwrap();
        let d = |p: &BoundaryPoint, q: &BoundaryPoint| moran_metric(&h2, 1.0, p, q, DEFAULT_MORAN_TOL).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + TOL);
    }

    #[test]
    fn plane_moran_closed_form(u in 0.0..TAU, v in 0.0..TAU, a in 0.2..5.0f64) {
        prop_assume!((u - v).abs() > 1e-6);
        let plane = build_space(&SpaceSpec::plane()).unwrap();
        let d = moran_metric(&plane, a, &BoundaryPoint::angle(u), &BoundaryPoint::angle(v), DEFAULT_MORAN_TOL).unwrap();
        prop_assert!((d - 2.0 * (0.5 * (u - v)).sin().abs() / a).abs() <= TOL);
    }

    #[test]
    fn comparison_function_scales_concavely(x in 1e-6..(-2.0f64).exp(), c in 0.05..0.95f64, r in 0.5..8.0f64) {
        let consts = sandwich_constants(&MetricParams::new(0.5, 0.0, 1.0).unwrap(), r, 1.0).unwrap();
        let f = ComparisonFn::lower(&consts);
        prop_assert!(f.eval(c * x).unwrap() >= c * f.eval(x).unwrap() - 1e-15);
        prop_assert!(f.eval(c * x).unwrap() + f.eval((1.0 - c) * x).unwrap() >= f.eval(x).unwrap() - 1e-15);
    }

    #[test]
    fn retraction_is_contracting(a in product_end(), b in product_end(), s in 0.0..10.0f64, t in 0.0..10.0f64) {
        let bh = BuildingHandle::from_spec(&SpaceSpec::product(SpaceSpec::tree(2, 12), SpaceSpec::tree(2, 12))).unwrap();
        let sp = &bh.space;
        let (x, y) = (sp.ray_eval(&a, s).unwrap(), sp.ray_eval(&b, t).unwrap());
        let (rx, ry) = (bh.apartment_retraction(&x).unwrap(), bh.apartment_retraction(&y).unwrap());
        prop_assert!(sp.distance(&rx, &ry).unwrap() <= sp.distance(&x, &y).unwrap() + 1e-12);
        let p = sp.basepoint();
        prop_assert!((sp.distance(&p, &rx).unwrap() - sp.distance(&p, &x).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn greedy_covers_are_separated(n in 8usize..80, factor in 1.0..4.0f64, colors in 1usize..4) {
        let plane = build_space(&SpaceSpec::plane()).unwrap();
        let net = plane.boundary_net(&NetResolution::Angles(n)).unwrap();
        let dm = DistanceMatrix::moran(&plane, 1.0, &net).unwrap();
        let l = factor * dm.spacing();
        let opts = GreedyOptions { absorption: None, max_merge_diameter: Some(4.0 * l) };
        if let Ok(cover) = greedy_colored_cover(&dm, &MetricParams::moran(1.0).unwrap(), &net, l, colors, &opts) {
            let st = cover_stats(&dm, &cover, Some(l)).unwrap();
            prop_assert!(st.min_family_separation.iter().all(|&d| d >= l));
            prop_assert_eq!(st.order, multiplicities(&cover).into_iter().max().unwrap());
        }
    }
}

#[test]
fn visual_certificate_on_h2_nets() {
    let h2 = build_space(&SpaceSpec::hyperbolic_plane()).unwrap();
    for m in [8, 24, 40] {
        let net = h2.boundary_net(&NetResolution::Angles(m)).unwrap();
        let vm = VisualNetMetric::new(&h2, &MetricParams::new(0.3, h2.delta().unwrap(), 1.0).unwrap(), &net).unwrap();
        assert!(vm.certificate_violation() <= 1e-12);
        assert!((0..m).all(|i| (0..m).all(|j| vm.get(i, j) <= vm.rho(i, j))));
    }
}

#[test]
fn antipodal_h2_moran_distance() {
    let h2 = build_space(&SpaceSpec::hyperbolic_plane()).unwrap();
    let d = moran_metric(&h2, 1.0, &BoundaryPoint::angle(0.0), &BoundaryPoint::angle(PI), DEFAULT_MORAN_TOL).unwrap();
    assert!((d - 2.0).abs() <= TOL);
}
