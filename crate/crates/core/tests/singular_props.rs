mod common;

use flowtopo_core::{
    classify_case, extract_degeneracy, find_singular_points, make_normal_form, CaseLabel,
    ExtractOptions, Frame, Invariants, PointIndex, PointKind, Poly, PolyVectorField, Rect,
    SearchOptions, Vec2,
};
use proptest::prelude::*;

/// Case and index by direct case analysis of `(k, n, αβ, λ²k + αβ)`.
fn table(inv: &Invariants) -> (CaseLabel, i32) {
    let (two_k, n1) = (2 * inv.k, inv.n + 1);
    let ab = inv.alpha * inv.beta;
    let disc = inv.lambda * inv.lambda * inv.k as f64 + ab;
    if two_k > n1 {
        if inv.n % 2 == 0 {
            (CaseLabel::S1, 0)
        } else if ab > 0.0 {
            (CaseLabel::S2, -1)
        } else {
            (CaseLabel::S3, 1)
        }
    } else if two_k == n1 {
        if disc > 0.0 {
            (CaseLabel::S4, -1)
        } else if disc < 0.0 {
            (CaseLabel::S6, 1)
        } else {
            (CaseLabel::S5, 0)
        }
    } else {
        (CaseLabel::S7, -1)
    }
}

fn magnitude() -> impl Strategy<Value = f64> {
    (0.3..2.0f64, any::<bool>()).prop_map(|(m, s)| if s { m } else { -m })
}

prop_compose! {
    fn invariants()(alpha in magnitude(), beta in magnitude(), lambda in magnitude(), k in 2u32..=6, n in 2u32..=6) -> Invariants {
        Invariants { alpha, beta, lambda, k, n }
    }
}

fn s5_band(inv: &Invariants) -> bool {
    2 * inv.k == inv.n + 1 && (inv.lambda * inv.lambda * inv.k as f64 + inv.alpha * inv.beta).abs() <= 1e-6
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn normal_form_round_trip(inv in invariants()) {
        prop_assume!(!s5_band(&inv));
        let f = make_normal_form(inv.alpha, inv.beta, inv.lambda, inv.k, inv.n).unwrap();
        let d = extract_degeneracy(&f, Vec2::ZERO, &ExtractOptions::default()).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs();
        prop_assert_eq!((d.k, d.n), (inv.k, inv.n));
        prop_assert!(rel(d.alpha, inv.alpha) && rel(d.beta, inv.beta) && rel(d.lambda, inv.lambda), "{d:?}");
        prop_assert_eq!(d.case_label, table(&inv).0);
    }

    #[test]
    fn label_survives_rigid_motion(inv in invariants(), angle in 0.0..6.3f64, ox in -1.0..1.0f64, oy in -1.0..1.0f64) {
        prop_assume!(!s5_band(&inv));
        let f = make_normal_form(inv.alpha, inv.beta, inv.lambda, inv.k, inv.n).unwrap();
        let frame = Frame::from_direction(Vec2::new(ox, oy), Vec2::new(angle.cos(), angle.sin())).unwrap();
        let moved = f.recenter_and_rotate(&frame);
        let zero = frame.to_local(Vec2::ZERO);
        let d0 = extract_degeneracy(&f, Vec2::ZERO, &ExtractOptions::default()).unwrap();
        let d1 = extract_degeneracy(&moved, zero, &ExtractOptions::default()).unwrap();
        prop_assert_eq!((d1.case_label, d1.index), (d0.case_label, d0.index));
        prop_assert_eq!((d1.k, d1.n), (d0.k, d0.n));
    }

    #[test]
    fn labels_partition(inv in invariants()) {
        prop_assume!(!s5_band(&inv));
        let (label, index) = classify_case(&inv, &ExtractOptions::default()).unwrap();
        let (want, want_index) = table(&inv);
        prop_assert_eq!(label, want);
        prop_assert_eq!(index.value(), Some(want_index));
        prop_assert!(label != CaseLabel::S5);
        if matches!(label, CaseLabel::S2 | CaseLabel::S3) {
            prop_assert!(inv.n % 2 == 1);
        }
        if label == CaseLabel::S1 {
            prop_assert!(inv.n % 2 == 0);
        }
    }

    #[test]
    fn symmetric_orders_never_give_s1(inv in invariants(), anti in any::<bool>()) {
        // anti-symmetric normal forms have k, n odd; reflectional ones k even, n odd
        let k = if anti { 2 * (inv.k / 2) + 1 } else { 2 * (inv.k / 2) };
        let n = 2 * (inv.n / 2) + 1;
        let inv = Invariants { k, n, ..inv };
        prop_assume!(!s5_band(&inv));
        let f = make_normal_form(inv.alpha, inv.beta, inv.lambda, k, n).unwrap();
        if anti {
            prop_assert!(f.check_antisymmetric(Vec2::ZERO));
        } else {
            prop_assert!(f.check_reflectional(Vec2::ZERO));
        }
        let (label, _) = classify_case(&inv, &ExtractOptions::default()).unwrap();
        prop_assert!(label != CaseLabel::S1);
    }

    #[test]
    fn finds_every_translate(xs in prop::collection::vec(-0.8..0.8f64, 1..=4), b in -0.5..0.5f64, c in magnitude()) {
        let mut xs = xs;
        xs.sort_by(f64::total_cmp);
        prop_assume!(xs.windows(2).all(|w| w[1] - w[0] > 0.1));
        // u = y − b, v = c Π (x − aᵢ): zeros exactly at (aᵢ, b)
        let mut v = Poly::constant(c);
        for &a in &xs {
            v = v.mul(&Poly::from_terms(&[(1, 0, 1.0), (0, 0, -a)]));
        }
        let f = PolyVectorField::new(Poly::from_terms(&[(0, 1, 1.0), (0, 0, -b)]), v).unwrap();
        let found = find_singular_points(&f, &Rect::new(-1.0, -1.0, 1.0, 1.0), &SearchOptions::default()).unwrap();
        prop_assert_eq!(found.len(), xs.len(), "{:?}", found);
        for (z, &a) in found.iter().zip(&xs) {
            prop_assert!(z.location.dist(Vec2::new(a, b)) < 1e-8, "{:?} vs {a}", z.location);
            prop_assert!(matches!(z.kind, PointKind::Saddle | PointKind::Center));
        }
        // alternate saddle / center along x
        for w in found.windows(2) {
            prop_assert!(w[0].kind != w[1].kind);
        }
    }
}

#[test]
fn degenerate_zero_is_found_and_labelled() {
    for ((a, b, l, k, n), label) in [
        ((1.0, 1.0, 1.0, 2, 3), CaseLabel::S4),
        ((1.0, -1.0, 1.0, 3, 3), CaseLabel::S3),
        ((1.0, 1.0, 1.0, 2, 5), CaseLabel::S7),
    ] {
        let f = make_normal_form(a, b, l, k, n).unwrap();
        let found = find_singular_points(&f, &Rect::centered(Vec2::ZERO, 0.5), &SearchOptions::default()).unwrap();
        assert_eq!(found.len(), 1, "{label}: {found:?}");
        match found[0].kind {
            PointKind::Degenerate(d) => assert_eq!(d.case_label, label),
            other => panic!("{label}: {other:?}"),
        }
    }
}

#[test]
fn s5_is_reported_not_guessed() {
    let f = make_normal_form(1.0, -2.0, 1.0, 2, 3).unwrap();
    let d = extract_degeneracy(&f, Vec2::ZERO, &ExtractOptions::default()).unwrap();
    assert_eq!(d.case_label, CaseLabel::S5);
    assert_eq!(d.index, PointIndex::Indeterminate);
}
