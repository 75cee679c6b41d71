use mcmullen_core::cones::{
    build_cone_family, refined_family_2d, thinning_homogeneous, verify_partial_homogeneity, ColoredPointSet,
};
use mcmullen_core::{vector, Vector};
use proptest::prelude::*;
use std::f64::consts::PI;

fn unit2() -> impl Strategy<Value = Vector> {
    (0.0f64..2.0 * PI).prop_map(|a| vector(&[a.cos(), a.sin()]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cones_cover_and_pair_with_their_negatives(normals in proptest::collection::vec(unit2(), 1..6), v in unit2(), r in 1e-3f64..10.0) {
        let fam = build_cone_family(&normals).unwrap();
        let v = v * r;
        let m = fam.cone_of_vector(&v).unwrap();
        for (n, &s) in fam.normals.iter().zip(&fam.cones[m.cone]) {
            let dot = n.dot(&v);
            prop_assert!(dot == 0.0 || dot.signum() as i8 == s * m.sign);
        }
        let neg = fam.cone_of_vector(&-&v).unwrap();
        prop_assert_eq!(neg.cone, m.cone);
        if m.interior {
            prop_assert_eq!(neg.sign, -m.sign);
        }
    }

    #[test]
    fn refined_families_are_narrow(max_angle in 0.02f64..1.5, seeds in proptest::collection::vec(unit2(), 0..3)) {
        let fam = refined_family_2d(max_angle, &seeds).unwrap();
        prop_assert!(fam.max_gap_2d().unwrap() < max_angle);
    }

    #[test]
    fn thinning_witnesses_verify(
        pts in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..48),
        colors in 1usize..5,
        k in 1usize..3,
        r in 0.05f64..0.6,
        salt in 0usize..1000,
    ) {
        let pts: Vec<Vector> = pts.into_iter().map(|(x, y)| vector(&[x, y])).collect();
        let n = pts.len();
        let data = ColoredPointSet::from_fn(pts, colors, r, k, |a, b| 1 + (a.min(b) * 31 + a.max(b) * 17 + salt) % colors).unwrap();
        prop_assert_eq!(n, data.points.len());
        let res = thinning_homogeneous(&data).unwrap();
        if let Some((b, c)) = res.witness {
            prop_assert!(verify_partial_homogeneity(&data, &b, c));
        }
    }
}
