mod common;

use std::sync::OnceLock;

use proptest::prelude::*;

use curve_recon::curve::{make_curve, CurveFamily, CurveModel};
use curve_recon::delaunay::triangulate;
use curve_recon::gadget::gadget_loop;
use curve_recon::geom::{
    compatibility_margin_deg, is_compatible, is_compatible_oracle, xab_radius, xab_witness,
};
use curve_recon::medial::LfsField;
use curve_recon::predicates::{incircle, orient2d};
use curve_recon::recon::{compatible_crust, nn_compatible};
use curve_recon::sampling::{default_density, ground_truth_graph, greedy_sample_with, SampleSet, Validator};
use curve_recon::{CompatParams, Point};

use common::check_lemmas;

fn vecs(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, dim)
}

fn triple() -> impl Strategy<Value = (Point, Point, Point)> {
    (2usize..=5)
        .prop_flat_map(|d| (vecs(d), vecs(d), vecs(d)))
        .prop_map(|(a, b, c)| (Point::new(a).unwrap(), Point::new(b).unwrap(), Point::new(c).unwrap()))
        .prop_filter("distinct, spread out", |(a, b, c)| {
            let d = |p: &Point, q: &Point| curve_recon::geom::distance(p, q).unwrap();
            d(a, b) > 1e-3 && d(b, c) > 1e-3 && d(a, c) > 1e-3
        })
}

fn eps() -> impl Strategy<Value = CompatParams> {
    (0.05f64..1.41).prop_map(|e| CompatParams::new(e).unwrap())
}

fn near_tie(a: &Point, b: &Point, c: &Point, p: &CompatParams) -> bool {
    compatibility_margin_deg(a, b, c, p).unwrap().abs() < 1e-6
}

fn rotate2(p: &Point, t: f64, s: f64, shift: [f64; 2]) -> Point {
    let (sn, cs) = t.sin_cos();
    Point::xy(s * (cs * p[0] - sn * p[1]) + shift[0], s * (sn * p[0] + cs * p[1]) + shift[1])
}

/// Rotation by unit quaternion `q`, then scale and shift.
fn rotate3(p: &Point, q: [f64; 4], s: f64, shift: [f64; 3]) -> Point {
    let [w, x, y, z] = q;
    let m = [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ];
    let v: Vec<f64> = (0..3)
        .map(|r| s * (m[r][0] * p[0] + m[r][1] * p[1] + m[r][2] * p[2]) + shift[r])
        .collect();
    Point::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn compatibility_is_symmetric((a, b, c) in triple(), p in eps()) {
        prop_assert_eq!(is_compatible(&a, &b, &c, &p).unwrap(), is_compatible(&c, &b, &a, &p).unwrap());
    }

    #[test]
    fn compatibility_is_similarity_invariant_2d(
        a in vecs(2), b in vecs(2), c in vecs(2),
        t in 0.0f64..std::f64::consts::TAU, s in 1e-3f64..1e3, sx in -50.0f64..50.0, sy in -50.0f64..50.0,
    ) {
        let (a, b, c) = (Point::new(a).unwrap(), Point::new(b).unwrap(), Point::new(c).unwrap());
        let p = CompatParams::default();
        prop_assume!(is_compatible(&a, &b, &c, &p).is_ok() && !near_tie(&a, &b, &c, &p));
        let (a2, b2, c2) = (rotate2(&a, t, s, [sx, sy]), rotate2(&b, t, s, [sx, sy]), rotate2(&c, t, s, [sx, sy]));
        prop_assert_eq!(is_compatible(&a, &b, &c, &p).unwrap(), is_compatible(&a2, &b2, &c2, &p).unwrap());
    }

    #[test]
    fn compatibility_is_similarity_invariant_3d(
        a in vecs(3), b in vecs(3), c in vecs(3),
        q in prop::array::uniform4(-1.0f64..1.0), s in 1e-3f64..1e3, shift in prop::array::uniform3(-50.0f64..50.0),
    ) {
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(n > 1e-3);
        let q = q.map(|v| v / n);
        let (a, b, c) = (Point::new(a).unwrap(), Point::new(b).unwrap(), Point::new(c).unwrap());
        let p = CompatParams::default();
        prop_assume!(is_compatible(&a, &b, &c, &p).is_ok() && !near_tie(&a, &b, &c, &p));
        let (a2, b2, c2) = (rotate3(&a, q, s, shift), rotate3(&b, q, s, shift), rotate3(&c, q, s, shift));
        prop_assert_eq!(is_compatible(&a, &b, &c, &p).unwrap(), is_compatible(&a2, &b2, &c2, &p).unwrap());
    }

    #[test]
    fn closed_form_matches_oracle((a, b, c) in triple(), p in eps()) {
        prop_assume!(!near_tie(&a, &b, &c, &p));
        match is_compatible_oracle(&a, &b, &c, &p, 256) {
            Ok(o) => prop_assert_eq!(o, is_compatible(&a, &b, &c, &p).unwrap()),
            Err(_) => {} // collinear triples are outside the oracle's domain
        }
    }

    #[test]
    fn witness_is_equidistant((a, b, c) in triple(), p in eps()) {
        if let Ok(w) = xab_witness(&a, &b, &c, &p) {
            let d = |p: &Point, q: &Point| curve_recon::geom::distance(p, q).unwrap();
            let r = xab_radius(&a, &b, &p).unwrap();
            let tol = 1e-10 * d(&a, &b);
            prop_assert!((d(&w, &a) - r).abs() <= tol);
            prop_assert!((d(&w, &b) - r).abs() <= tol);
        }
    }

    #[test]
    fn equal_arms_flip_at_twice_arccos_k(p in eps(), t in 0.0f64..std::f64::consts::TAU) {
        let b = Point::xy(0.3, -0.7);
        let arm = |ang: f64| Point::xy(b[0] + (t + ang).cos(), b[1] + (t + ang).sin());
        let a = arm(0.0);
        let compat = |deg: f64| is_compatible(&a, &b, &arm(deg.to_radians()), &p).unwrap();
        let (mut lo, mut hi) = (1.0f64, 180.0f64);
        prop_assume!(!compat(lo) && compat(hi - 1e-9));
        while hi - lo > 1e-7 {
            let mid = 0.5 * (lo + hi);
            if compat(mid) { hi = mid } else { lo = mid }
        }
        let expect = 2.0 * p.k().acos().to_degrees();
        prop_assert!((lo - expect).abs() < 1e-6, "flip at {lo}, expected {expect}");
    }
}

fn planar_points() -> impl Strategy<Value = Vec<[f64; 2]>> {
    let free = prop::collection::vec(prop::array::uniform2(-1.0f64..1.0), 3..60);
    // Integer grids produce many cocircular quadruples.
    let grid = prop::collection::vec(prop::array::uniform2(0i32..6), 3..40)
        .prop_map(|v| v.into_iter().map(|[x, y]| [x as f64, y as f64]).collect());
    prop_oneof![free, grid].prop_map(|mut v: Vec<[f64; 2]>| {
        v.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
        v.dedup();
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn delaunay_empty_circles(pts in planar_points()) {
        prop_assume!(pts.len() >= 3 && pts.iter().any(|&p| orient2d(pts[0], pts[1], p) != 0));
        let t = triangulate(&pts).unwrap();
        for tri in t.triangles() {
            let [a, b, c] = tri.map(|i| pts[i]);
            prop_assert_eq!(orient2d(a, b, c), 1);
            for (k, &q) in pts.iter().enumerate() {
                if !tri.contains(&k) {
                    prop_assert!(incircle(a, b, c, q).unwrap() <= 0);
                }
            }
        }
        prop_assert!(t.edges().len() <= 3 * pts.len() - 6 || pts.len() == 3);
        let again = triangulate(&pts).unwrap();
        prop_assert_eq!(again.edges(), t.edges());
    }
}

const FAMILIES: [&str; 4] = ["circle", "ellipse 2:1", "nested circles", "gadget loop"];

fn family(i: usize) -> CurveModel {
    match i {
        0 => make_curve(&CurveFamily::Circle { center: [0.0, 0.0], radius: 1.0 }),
        1 => make_curve(&CurveFamily::Ellipse { center: [0.0, 0.0], a: 2.0, b: 1.0 }),
        2 => make_curve(&CurveFamily::Concentric { center: [0.0, 0.0], inner: 1.0, outer: 3.0 }),
        _ => gadget_loop(),
    }
    .unwrap()
}

fn validators() -> &'static Vec<Validator> {
    static V: OnceLock<Vec<Validator>> = OnceLock::new();
    V.get_or_init(|| {
        (0..FAMILIES.len())
            .map(|i| {
                let c = family(i);
                Validator::new(&c, default_density(&c)).unwrap()
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valid_samples_satisfy_the_lemmas(fam in 0usize..4, seed in any::<u64>(), target in 0.3f64..0.66) {
        let v = &validators()[fam];
        let sample = greedy_sample_with(v, target, seed, 0.95).unwrap();
        let rep = v.epsilon_star(&sample).unwrap();
        prop_assert!(rep.eps_star <= 0.66);
        let params = CompatParams::default();
        let lemmas = check_lemmas(v.curve(), &sample, &params, default_density(v.curve()) / 4.0);
        for (name, t) in lemmas.all() {
            prop_assert_eq!(t.violations, 0, "{} on {}: {:?}", name, FAMILIES[fam], t.example);
        }
        let gt = ground_truth_graph(v.curve(), &sample).unwrap();
        prop_assert_eq!(&nn_compatible(&sample, &params).unwrap(), &gt);
        prop_assert_eq!(&compatible_crust(&sample, &params).unwrap(), &gt);
        prop_assert_eq!(gt.component_count(), v.curve().components().len());
    }

    #[test]
    fn eps_star_converges_with_density(fam in 0usize..4, seed in any::<u64>()) {
        let curve = family(fam);
        let base = default_density(&curve);
        let field = LfsField::for_curve(&curve, base / 4.0).unwrap();
        let tagged = greedy_sample_with(&validators()[fam], 0.6, seed, 0.95).unwrap();
        let plain = SampleSet::new(tagged.points().to_vec()).unwrap();
        let h = 2.0 * base;
        let coarse = Validator::with_field(&curve, field.clone(), h).unwrap();
        let fine = Validator::with_field(&curve, field, h / 2.0).unwrap();
        let (e1, e2) = (coarse.epsilon_star(&plain).unwrap().eps_star, fine.epsilon_star(&plain).unwrap().eps_star);
        let lfs_min = fine.dense_lfs().iter().copied().fold(f64::INFINITY, f64::min);
        let lipschitz = (1.0 + e1.max(e2)) / lfs_min;
        prop_assert!((e1 - e2).abs() <= lipschitz * h, "{} vs {} (bound {})", e1, e2, lipschitz * h);
    }
}
