use flute_core::hyp::{
    cross_ratio, distance, foot_of_perpendicular, shear_of_quad, signed_distance_along,
    trirectangle_relations, BoundaryPoint, Geodesic, Isometry,
};
use num_complex::Complex64;
use proptest::prelude::*;
use BoundaryPoint::*;

fn sorted4() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-10.0f64..10.0)
        .prop_map(|mut a| {
            a.sort_by(|x, y| x.partial_cmp(y).unwrap());
            a
        })
        .prop_filter("separated", |a| a.windows(2).all(|w| w[1] - w[0] > 1e-2))
}

fn isometry() -> impl Strategy<Value = Isometry> {
    (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0)
        .prop_filter_map("det > 0.1", |(a, b, c, d)| {
            if a * d - b * c > 0.1 {
                Isometry::new(a, b, c, d).ok()
            } else {
                None
            }
        })
}

fn unwrap_finite(x: BoundaryPoint) -> Option<f64> {
    match x {
        Finite(v) => Some(v),
        Infinity => None,
    }
}

proptest! {
    #[test]
    fn cross_ratio_translation_invariant(a in sorted4(), s in -5.0f64..5.0) {
        let pts = a.map(Finite);
        let moved = a.map(|x| Finite(x + s));
        let c0 = cross_ratio(pts[0], pts[2], pts[1], pts[3]).unwrap();
        let c1 = cross_ratio(moved[0], moved[2], moved[1], moved[3]).unwrap();
        prop_assert!((c0 - c1).abs() < 1e-12 * c0.abs().max(1.0));
    }

    #[test]
    fn cross_ratio_isometry_invariant(a in sorted4(), m in isometry()) {
        let pts = a.map(Finite);
        let img = pts.map(|p| m.apply_boundary(p));
        let c0 = cross_ratio(pts[0], pts[1], pts[2], pts[3]).unwrap();
        let c1 = cross_ratio(img[0], img[1], img[2], img[3]).unwrap();
        prop_assert!((c0 - c1).abs() < 1e-12 * c0.abs().max(1.0) * 1e3);
    }

    #[test]
    fn shear_swap_symmetry(a in sorted4(), rot in 0usize..4) {
        let mut pts = [a[0], a[3], a[2], a[1]].map(Finite);
        pts.rotate_left(rot);
        let [p, q, r, t] = pts;
        let s0 = shear_of_quad(p, q, r, t).unwrap();
        let s1 = shear_of_quad(r, t, p, q).unwrap();
        prop_assert!((s0 - s1).abs() < 1e-10);
    }

    #[test]
    fn shear_matches_feet_of_perpendiculars(a in sorted4(), with_inf in any::<bool>()) {
        // Walking x1 -> x3 over the top, x4 lies on the left and x2 on the right.
        let mut pts = [Finite(a[0]), Finite(a[3]), Finite(a[2]), Finite(a[1])];
        if with_inf {
            pts[1] = Infinity;
        }
        let [p, q, r, t] = pts;
        let g = Geodesic::new(p, r).unwrap();
        let fq = foot_of_perpendicular(q, &g).unwrap();
        let ft = foot_of_perpendicular(t, &g).unwrap();
        let measured = signed_distance_along(&g, fq, ft).unwrap();
        let pinned = shear_of_quad(p, q, r, t).unwrap();
        prop_assert!((measured - pinned).abs() < 1e-10, "{measured} vs {pinned}");
    }

    #[test]
    fn foot_is_orthogonal(a in sorted4()) {
        let g = Geodesic::new(Finite(a[0]), Finite(a[2])).unwrap();
        for x in [a[1], a[3]] {
            let z = foot_of_perpendicular(Finite(x), &g).unwrap();
            let c_g = 0.5 * (a[0] + a[2]);
            let y = c_g + (0.5 * (a[2] - a[0])).powi(2) / (x - c_g);
            let c_p = 0.5 * (x + y);
            // Radii of the two circles at z are perpendicular iff the tangents are.
            let dot = ((z - c_g) * (z - c_p).conj()).re;
            prop_assert!(dot.abs() < 1e-10 * (z - c_g).norm() * (z - c_p).norm());
            prop_assert!(((z - c_p).norm() - 0.5 * (x - y).abs()).abs() < 1e-9 * (x - y).abs());
        }
    }

    #[test]
    fn trirectangle_matches_explicit_development(a in 0.05f64..1.5, b in 0.05f64..1.5) {
        prop_assume!(a.sinh() * b.sinh() < 0.98);
        let t = trirectangle_relations(a, b).unwrap();
        // Right angle at i between the imaginary axis and the unit circle.
        let pa = Complex64::new(0.0, a.exp());
        let pb = Complex64::new(b.tanh(), 1.0 / b.cosh());
        // Perpendicular to the axis at pa is |z| = e^a; to the unit circle at pb
        // is the geodesic centred at coth b with radius 1 / sinh b.
        let (c2, r2) = (1.0 / b.tanh(), 1.0 / b.sinh());
        let r1 = a.exp();
        let x = (r1 * r1 - r2 * r2 + c2 * c2) / (2.0 * c2);
        let pc = Complex64::new(x, (r1 * r1 - x * x).sqrt());
        let beta = distance(pa, pc);
        let alpha = distance(pb, pc);
        // Angle at pc between the two circles equals the angle between their radii.
        let cos_phi = {
            let u = pc;
            let v = pc - c2;
            ((u.re * v.re + u.im * v.im) / (u.norm() * v.norm())).abs()
        };
        prop_assert!((t.beta - beta).abs() < 1e-10, "beta {} vs {}", t.beta, beta);
        prop_assert!((t.alpha - alpha).abs() < 1e-10, "alpha {} vs {}", t.alpha, alpha);
        prop_assert!((t.phi.cos() - cos_phi).abs() < 1e-10);
    }
}

#[test]
fn boundary_point_rejects_nan() {
    assert!(BoundaryPoint::finite(f64::NAN).is_err());
    assert!(BoundaryPoint::finite(f64::INFINITY).is_err());
    assert_eq!(unwrap_finite(BoundaryPoint::finite(2.0).unwrap()), Some(2.0));
}
