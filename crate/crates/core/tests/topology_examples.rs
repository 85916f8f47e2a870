mod common;

use flowtopo_core::{
    equivalent, find_singular_points, index_sum, integrate_streamline, separatrices, signature,
    verify, Decision, OrbitEnd, Poly, PolyVectorField, Rect, SearchOptions, SignatureOptions,
    StreamlineOptions, Vec2, VerifyOptions, WindingOptions,
};
use proptest::prelude::*;

use common::{normal_family, push_x, push_y, shear, signatures_across, topology_half_width};

/// Field of the figure-eight family on its three-root side, with a box around
/// the three zeros.
fn figure_eight() -> (PolyVectorField, Rect) {
    let fam = normal_family(1.0, -1.0, 1.0, 3, 3, shear());
    let rep = verify(&fam, Vec2::ZERO, &VerifyOptions::default()).unwrap();
    let eps = 1e-2 * rep.prediction.side.unwrap() as f64;
    let bbox = Rect::centered(Vec2::ZERO, topology_half_width(&rep, eps));
    (fam.perturbed(eps), bbox)
}

#[test]
fn homoclinic_orbit_returns_to_its_saddle() {
    let (f, bbox) = figure_eight();
    let zeros = find_singular_points(&f, &bbox, &SearchOptions::default()).unwrap();
    let saddle = zeros.iter().find(|z| z.kind == flowtopo_core::PointKind::Saddle).unwrap();
    let mut opts = StreamlineOptions::for_box(bbox);
    opts.capture_points = zeros.iter().map(|z| z.location).collect();
    let own = opts.capture_points.iter().position(|&p| p == saddle.location).unwrap();
    let seps = separatrices(&f, saddle, 1e-6 * bbox.diameter(), &opts).unwrap();
    assert_eq!(seps.len(), 4);
    for s in &seps {
        // forward and backward both come back to the same saddle
        assert_eq!(s.orbit.end, OrbitEnd::Singular(own), "stable={}", s.stable);
        let last = *s.orbit.points.last().unwrap();
        assert!(last.dist(saddle.location) <= opts.capture_radius);
    }
}

#[test]
fn perturbed_s4_has_a_double_saddle_connection() {
    let fam = normal_family(1.0, 1.0, 1.0, 2, 3, push_x());
    let rep = verify(&fam, Vec2::ZERO, &VerifyOptions::default()).unwrap();
    let (minus, plus) = signatures_across(&fam, &rep);
    let three = if rep.prediction.side == Some(1) { &plus } else { &minus };
    assert_eq!((three.saddles(), three.centers()), (2, 1));
    assert_eq!(three.connections(), 2);
    assert!(!three.ambiguous);
    for (i, n) in three.nodes.iter().enumerate() {
        if n.kind == flowtopo_core::topology::NodeKind::Saddle {
            assert_eq!(three.degree(i), 4);
        }
    }
    assert!(!equivalent(&minus, &plus));
}

#[test]
fn figure_eight_saddle_closes_on_itself() {
    let (f, bbox) = figure_eight();
    let sig = signature(&f, &bbox, &SignatureOptions::default()).unwrap();
    assert_eq!((sig.saddles(), sig.centers()), (1, 2));
    assert_eq!(sig.self_loops(), 2);
    assert_eq!(sig.connections(), 0);
}

#[test]
fn node_counts_decide_equivalence() {
    let saddle = common::field(&[(1, 0, 1.0)], &[(0, 1, -1.0)]);
    let b = Rect::new(-1.0, -1.0, 1.0, 1.0);
    let one = signature(&saddle, &b, &SignatureOptions::default()).unwrap();
    let fam = normal_family(1.0, 1.0, 1.0, 2, 3, push_x());
    let rep = verify(&fam, Vec2::ZERO, &VerifyOptions::default()).unwrap();
    let (minus, plus) = signatures_across(&fam, &rep);
    let three = if minus.nodes.len() == 3 { minus } else { plus };
    assert!(!equivalent(&one, &three));
    assert!(!equivalent(&three, &one));
    assert!(equivalent(&three, &three));
}

#[test]
fn no_bifurcation_keeps_the_picture() {
    for (name, fam) in [
        ("S4", normal_family(1.0, 1.0, 1.0, 2, 3, push_y())),
        ("S3", normal_family(1.0, -1.0, 1.0, 3, 3, push_y())),
    ] {
        let rep = verify(&fam, Vec2::ZERO, &VerifyOptions::default()).unwrap();
        assert_eq!(rep.decision(), Decision::NoBifurcation, "{name}");
        let (minus, plus) = signatures_across(&fam, &rep);
        assert!(equivalent(&minus, &plus), "{name}");
    }
}

#[test]
fn signature_indices_match_the_box() {
    let (eight, eight_box) = figure_eight();
    let cases = [
        (common::field(&[(1, 0, 1.0)], &[(0, 1, -1.0)]), Rect::new(-1.0, -1.0, 1.0, 1.0)),
        (common::field(&[(0, 1, -1.0)], &[(1, 0, 1.0)]), Rect::new(-1.0, -1.0, 1.0, 1.0)),
        // u = y, v = x − x³: centers at ±1, saddle at 0
        (common::field(&[(0, 1, 1.0)], &[(1, 0, 1.0), (3, 0, -1.0)]), Rect::new(-1.5, -1.0, 1.5, 1.0)),
        (eight, eight_box),
    ];
    for (f, b) in cases {
        let sig = signature(&f, &b, &SignatureOptions::default()).unwrap();
        let boxed = index_sum(&f, &b, &WindingOptions::default()).unwrap().winding;
        assert_eq!(sig.index_sum, Some(boxed));
        assert_eq!(sig.node_index_total(), Some(boxed));
    }
}

/// `u = ψ_y`, `v = −ψ_x`
fn from_stream(psi: &Poly) -> PolyVectorField {
    PolyVectorField::new(psi.d_dy(), psi.d_dx().scale(-1.0)).unwrap()
}

prop_compose! {
    fn stream()(terms in prop::collection::vec((0u32..=3, 0u32..=3, -1.0..1.0f64), 2..8)) -> Poly {
        let mut p = Poly::from_terms(&[(2, 0, 0.5), (0, 2, 0.5)]);
        for (i, j, c) in terms {
            if i + j >= 2 && i + j <= 4 {
                p.add_term(i, j, 0.3 * c);
            }
        }
        p
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn orbits_follow_the_field(psi in stream(), sx in -0.8..0.8f64, sy in -0.8..0.8f64) {
        let f = from_stream(&psi);
        let seed = Vec2::new(sx, sy);
        let speed = f.eval(seed).norm();
        prop_assume!(speed > 1e-2);
        let opts = StreamlineOptions::for_box(Rect::new(-1.0, -1.0, 1.0, 1.0));
        let Ok(o) = integrate_streamline(&f, seed, &opts) else { return Ok(()) };
        for w in o.points.windows(3) {
            let chord = w[2] - w[0];
            let dir = f.eval(w[1]);
            // only where the field is not vanishing and the polyline resolves it
            if dir.norm() < 1e-6 || chord.norm() < 1e-12 {
                continue;
            }
            let angle = chord.cross(dir).atan2(chord.dot(dir)).abs();
            prop_assert!(angle.to_degrees() <= 5.0, "{:.2} deg at {:?}", angle.to_degrees(), w[1]);
        }
        for w in o.points.windows(2) {
            prop_assert!(w[0].dist(w[1]) <= opts.max_step * (1.0 + 1e-9));
        }
    }

    #[test]
    fn backward_retraces_forward(psi in stream(), sx in -0.8..0.8f64, sy in -0.8..0.8f64) {
        let f = from_stream(&psi);
        let seed = Vec2::new(sx, sy);
        prop_assume!(f.eval(seed).norm() > 1e-2);
        let bbox = Rect::new(-1.0, -1.0, 1.0, 1.0);
        let opts = StreamlineOptions::for_box(bbox);
        let Ok(fwd) = integrate_streamline(&f, seed, &opts) else { return Ok(()) };
        prop_assume!(fwd.end == OrbitEnd::BoxExit && !fwd.ambiguous);
        // step back inside the box before reversing
        let end = fwd.points[fwd.points.len() - 2];
        let back = integrate_streamline(
            &f,
            end,
            &StreamlineOptions { backward: true, capture_points: vec![seed], capture_radius: 10.0 * opts.closure_tol, ..opts.clone() },
        ).unwrap();
        let nearest = back.points.iter().map(|p| p.dist(seed)).fold(f64::INFINITY, f64::min);
        prop_assert!(nearest <= 10.0 * opts.closure_tol, "missed the seed by {nearest:e}");
    }
}
