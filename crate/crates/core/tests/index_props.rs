mod common;

use flowtopo_core::{
    find_singular_points, index_sum, make_normal_form, winding_index, Frame, IndexError,
    PointKind, Poly, PolyVectorField, Rect, SearchOptions, Vec2, WindingOptions,
};
use proptest::prelude::*;

/// `u = y − b`, `v = c Π (x − aᵢ)`, turned by `angle` about the origin.
fn product_field(xs: &[f64], b: f64, c: f64, angle: f64) -> PolyVectorField {
    let mut v = Poly::constant(c);
    for &a in xs {
        v = v.mul(&Poly::from_terms(&[(1, 0, 1.0), (0, 0, -a)]));
    }
    let f = PolyVectorField::new(Poly::from_terms(&[(0, 1, 1.0), (0, 0, -b)]), v).unwrap();
    f.recenter_and_rotate(&Frame::from_direction(Vec2::ZERO, Vec2::new(angle.cos(), angle.sin())).unwrap())
}

prop_compose! {
    fn spread_roots()(xs in prop::collection::vec(-0.7..0.7f64, 1..=4)) -> Vec<f64> {
        let mut xs = xs;
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() < 0.15);
        xs
    }
}

fn wopts() -> WindingOptions {
    WindingOptions::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn box_sum_is_sum_of_point_indices(xs in spread_roots(), b in -0.4..0.4f64, c in 0.5..2.0f64, angle in 0.0..6.3f64) {
        let f = product_field(&xs, b, c, angle);
        let bbox = Rect::new(-1.0, -1.0, 1.0, 1.0);
        let zeros = find_singular_points(&f, &bbox, &SearchOptions::default()).unwrap();
        prop_assert_eq!(zeros.len(), xs.len());
        let mut total = 0;
        for z in &zeros {
            let w = winding_index(&f, z.location, 0.05, &wopts()).unwrap().winding;
            // nondegenerate zeros wind like the sign of det Du
            prop_assert_eq!(w, z.jac.det().signum() as i32);
            prop_assert_eq!(Some(w), z.kind.index());
            total += w;
        }
        prop_assert_eq!(index_sum(&f, &bbox, &wopts()).unwrap().winding, total);
    }

    #[test]
    fn radius_does_not_matter(xs in spread_roots(), b in -0.4..0.4f64, c in 0.5..2.0f64, pick in 0usize..4, t in 0.1..0.9f64) {
        let f = product_field(&xs, b, c, 0.0);
        let i = pick % xs.len();
        let centre = Vec2::new(xs[i], b);
        let gap = xs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, a)| (a - xs[i]).abs()).fold(1.0, f64::min);
        let (r1, r2) = (0.05 * gap, (0.05 + 0.4 * t) * gap);
        let w1 = winding_index(&f, centre, r1, &wopts()).unwrap().winding;
        let w2 = winding_index(&f, centre, r2, &wopts()).unwrap().winding;
        prop_assert_eq!(w1, w2);
    }

    #[test]
    fn adaptive_agrees_with_dense_sampling(xs in spread_roots(), b in -0.4..0.4f64, c in 0.5..2.0f64, cx in -0.9..0.9f64, cy in -0.9..0.9f64, h in 0.05..0.5f64) {
        let f = product_field(&xs, b, c, 0.0);
        let cell = Rect::centered(Vec2::new(cx, cy), h);
        // keep away from zeros on the boundary, where dense sampling is unreliable
        let clear = xs.iter().all(|&a| {
            let p = Vec2::new(a, b);
            let dx = (p.x - cell.x0).abs().min((p.x - cell.x1).abs());
            let dy = (p.y - cell.y0).abs().min((p.y - cell.y1).abs());
            dx.min(dy) > 0.02 || !cell.expanded(0.02).contains(p)
        });
        prop_assume!(clear);
        let dense = common::sampled_winding(&f, &cell, 4000);
        prop_assume!(dense.is_some());
        prop_assert_eq!(Some(index_sum(&f, &cell, &wopts()).unwrap().winding), dense);
    }
}

#[test]
fn degenerate_indices_are_radius_independent() {
    for ((a, b, l, k, n), want) in [
        ((1.0, 1.0, 1.0, 2, 2), 0),
        ((1.0, 1.0, 1.0, 3, 3), -1),
        ((1.0, -1.0, 1.0, 3, 3), 1),
        ((1.0, 1.0, 1.0, 2, 3), -1),
        ((1.0, -3.0, 1.0, 2, 3), 1),
        ((1.0, 1.0, 1.0, 2, 5), -1),
    ] {
        let f = make_normal_form(a, b, l, k, n).unwrap();
        for r in [1e-3, 1e-2, 0.1, 0.5] {
            let w = winding_index(&f, Vec2::ZERO, r, &wopts()).unwrap().winding;
            assert_eq!(w, want, "({a}, {b}, {l}, {k}, {n}) at r={r}");
        }
    }
}

#[test]
fn zero_on_circle_is_an_error() {
    // saddle at the origin, circle of radius 1 about (1, 0) passes through it
    let f = common::field(&[(1, 0, 1.0)], &[(0, 1, -1.0)]);
    let err = winding_index(&f, Vec2::new(1.0, 0.0), 1.0, &wopts()).unwrap_err();
    assert!(matches!(err, IndexError::ZeroOnCurve { .. }), "{err:?}");
}

#[test]
fn located_zeros_carry_their_index() {
    let f = make_normal_form(1.0, 1.0, 1.0, 2, 3).unwrap();
    let zeros = find_singular_points(&f, &Rect::centered(Vec2::ZERO, 0.5), &SearchOptions::default()).unwrap();
    assert_eq!(zeros.len(), 1);
    assert!(matches!(zeros[0].kind, PointKind::Degenerate(_)));
    assert_eq!(zeros[0].kind.index(), Some(-1));
}
