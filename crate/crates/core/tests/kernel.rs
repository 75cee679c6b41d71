use mcmullen_core::{generators, vector, ConvexBody, Homothet, Vector, TAU};
use proptest::prelude::*;

fn body(kind: usize, seed: u64) -> ConvexBody {
    match kind {
        0 => generators::disk(),
        1 => generators::square(),
        2 => ConvexBody::ball(3).unwrap(),
        3 => generators::cube().unwrap(),
        4 => generators::ellipse(2.0, 1.0, 512).unwrap(),
        5 => generators::random_polytope(2, 9, seed).unwrap(),
        _ => generators::random_polytope(3, 12, seed).unwrap(),
    }
}

fn vec_in(d: usize) -> impl Strategy<Value = Vector> {
    proptest::collection::vec(-3.0f64..3.0, d).prop_map(|v| Vector::from_vec(v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn support_is_sublinear(kind in 0usize..7, seed in 0u64..50, a in vec_in(3), b in vec_in(3), lam in 0.01f64..50.0) {
        let p = body(kind, seed);
        let d = p.dim();
        let (u, v) = (a.rows(0, d).into_owned(), b.rows(0, d).into_owned());
        let (hu, hv) = (p.support_value(&u), p.support_value(&v));
        prop_assert!(p.support_value(&(&u + &v)) <= hu + hv + TAU);
        prop_assert!((p.support_value(&(&u * lam)) - lam * hu).abs() <= TAU * lam.max(1.0));
    }

    #[test]
    fn homothets_compose_exactly(w1 in vec_in(2), w2 in vec_in(2), t1 in 0.01f64..5.0, t2 in 0.01f64..5.0, x in vec_in(2)) {
        let outer = Homothet::new(w1.clone(), t1);
        let inner = Homothet::new(w2.clone(), t2);
        let c = outer.compose(&inner);
        prop_assert_eq!(&c.center, &(&w1 + &w2 * t1));
        prop_assert_eq!(c.scale, t1 * t2);
        let direct = outer.apply(&inner.apply(&x));
        prop_assert!((c.apply(&x) - &direct).norm() <= 1e-12 * (1.0 + direct.norm()));
    }

    #[test]
    fn the_minimal_copy_covers_and_touches(kind in 0usize..7, seed in 0u64..50, pts in proptest::collection::vec(vec_in(3), 1..7)) {
        let p = body(kind, seed);
        let d = p.dim();
        let pts: Vec<Vector> = pts.iter().map(|x| x.rows(0, d).into_owned()).collect();
        let h = p.min_enclosing_homothet(&pts).unwrap();
        prop_assert!(pts.iter().all(|x| p.contains_point(&h, x)));
        // Some point sits on the boundary unless every point coincides.
        let worst = pts.iter().map(|x| p.signed_distance(&h, x)).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(h.scale <= TAU || worst.abs() <= 1e-7 * h.scale.max(1.0), "{}", worst);
    }

    #[test]
    fn max_chords_are_long_and_inside(kind in 0usize..7, seed in 0u64..50, a in vec_in(3)) {
        let p = body(kind, seed);
        let u = a.rows(0, p.dim()).into_owned();
        prop_assume!(u.norm() > 1e-3);
        let (len, seg) = p.max_chord(&(&u / u.norm())).unwrap();
        prop_assert!(len >= 2.0 * p.inradius() - TAU);
        let id = Homothet::identity(p.dim());
        prop_assert!(p.contains_point(&id, &seg.x) && p.contains_point(&id, &seg.y));
        prop_assert!(len <= 2.0 * p.circumradius() + TAU);
    }
}

#[test]
fn square_support_and_chords() {
    let sq = generators::square();
    assert_eq!(sq.support_value(&vector(&[1.0, 1.0])), 2.0);
    let (len, _) = sq.max_chord(&vector(&[1.0, 0.0])).unwrap();
    assert!((len - 2.0).abs() < 1e-12);
}
