use kakeya_arcs::area::{monte_carlo_swept_area, swept_area_upper_bound};
use kakeya_arcs::geometry::{circle_circle_intersection, horn_area, rotate_point, Circle, DirectedArc, Isometry, Point};
use kakeya_arcs::lemmas::{check_lemma1, Sense};
use kakeya_arcs::motion::{pose_at, validate_plan, ArcPose, MotionPlan, MotionStep};
use kakeya_arcs::sprouting::DyadicIndex;
use kakeya_arcs::{Precision, Scalar};
use proptest::prelude::*;
use std::f64::consts::TAU;

const HW: Precision = Precision::Hardware;
const B128: Precision = Precision::Big(128);

fn pt(x: f64, y: f64) -> Point {
    Point::from_f64(x, y, HW)
}

fn unit_arc(start: f64, sweep: f64) -> DirectedArc {
    DirectedArc::new(Circle::unit(pt(0.0, 0.0)), Scalar::Hw(start), Scalar::Hw(sweep)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rotation_preserves_distance(x in -3.0..3.0f64, y in -3.0..3.0f64, cx in -3.0..3.0f64, cy in -3.0..3.0f64, a in -7.0..7.0f64) {
        let p = Point::from_f64(x, y, B128);
        let c = Point::from_f64(cx, cy, B128);
        let q = rotate_point(&p, &c, &Scalar::from_f64(a, B128));
        let err = (&q.dist(&c) - &p.dist(&c)).abs();
        prop_assert!(err.to_f64() < 1e-30);
    }

    #[test]
    fn isometry_composition(ax in -2.0..2.0f64, ay in -2.0..2.0f64, t0 in -3.0..3.0f64, t1 in -3.0..3.0f64, reflect: bool, x in -2.0..2.0f64, y in -2.0..2.0f64) {
        let f = Isometry::from_frames(&pt(0.0, 0.0), &pt(t0.cos(), t0.sin()), &pt(ax, ay), &pt(t1.cos(), t1.sin()), reflect);
        let g = Isometry::rotation(&pt(ay, ax), &Scalar::Hw(t0 - t1));
        let p = pt(x, y);
        let lhs = g.compose(&f).apply(&p);
        let rhs = g.apply(&f.apply(&p));
        prop_assert!(lhs.dist(&rhs).to_f64() < 1e-12);
        prop_assert!((f.apply(&p).dist(&f.apply(&pt(0.0, 0.0))).to_f64() - p.norm().to_f64()).abs() < 1e-12);
    }

    #[test]
    fn intersections_lie_on_both(d in 0.01..1.99f64, t in -3.0..3.0f64) {
        let a = Circle::unit(Point::from_f64(0.0, 0.0, B128));
        let b = Circle::unit(Point::from_f64(d * t.cos(), d * t.sin(), B128));
        let pts = circle_circle_intersection(&a, &b).unwrap();
        prop_assert_eq!(pts.len(), 2);
        for p in pts {
            prop_assert!(a.signed_distance(&p).abs().to_f64() < 1e-30);
            prop_assert!(b.signed_distance(&p).abs().to_f64() < 1e-30);
        }
    }

    #[test]
    fn horn_area_formula(chord in 0.0..2.0f64, angle in 0.0..3.0f64) {
        let a = horn_area(&Scalar::Hw(chord), &Scalar::Hw(angle)).unwrap().to_f64();
        prop_assert!((a - chord * chord * angle / 2.0).abs() <= 1e-15 * (1.0 + a));
    }

    #[test]
    fn dyadic_levels(level in 0u32..20, num in 0u64..(1 << 20)) {
        let num = num % ((1u64 << level) + 1);
        let d = DyadicIndex::new(level, num).unwrap();
        let c = d.canonical();
        prop_assert!(c.level <= level);
        prop_assert_eq!(d.at_level(level), Some(num));
        prop_assert_eq!(c.at_level(level + 3), Some(num << 3));
        prop_assert!((d.value(HW).to_f64() - num as f64 / (1u64 << level) as f64).abs() < 1e-15);
    }

    #[test]
    fn big_and_hw_arithmetic_agree(a in -10.0..10.0f64, b in 0.1..10.0f64) {
        let (x, y) = (Scalar::from_f64(a, B128), Scalar::from_f64(b, B128));
        prop_assert!((((&x * &y) / &y).to_f64() - a).abs() < 1e-14);
        prop_assert!(((&x + &y).to_f64() - (a + b)).abs() < 1e-14);
        prop_assert!((y.sqrt().to_f64() - b.sqrt()).abs() < 1e-14);
        prop_assert!((x.sin().to_f64() - a.sin()).abs() < 1e-14);
    }

    #[test]
    fn lemma1_interior(phi in -3.0..3.0f64, ld in -8.0..-0.5f64, psi in 0.0..TAU) {
        let d = 10f64.powf(ld);
        let o = pt(0.0, 0.0);
        let k = Circle::unit(o.clone());
        let p = pt((1.0 - d) * phi.cos(), (1.0 - d) * phi.sin());
        let q = pt((phi + psi).cos(), (phi + psi).sin());
        let orient = o.sub(&p).cross(&q.sub(&p));
        prop_assume!(orient.to_f64() > 0.0 && q.dist(&p).to_f64() >= 2.0 * d.sqrt());
        let r = check_lemma1(&k, &q, &p, Sense::Positive).unwrap();
        prop_assert!(r.hypotheses_met && r.pass, "{r:?}");
    }

    #[test]
    fn lemma1_exterior(phi in -3.0..3.0f64, ld in -8.0..-0.7f64, psi in 0.0..TAU) {
        let d = 10f64.powf(ld);
        let o = pt(0.0, 0.0);
        let k = Circle::unit(o.clone());
        let p = pt((1.0 + d) * phi.cos(), (1.0 + d) * phi.sin());
        let q = pt((phi + psi).cos(), (phi + psi).sin());
        let orient = o.sub(&p).cross(&q.sub(&p));
        let qp = q.dist(&p).to_f64();
        prop_assume!(orient.to_f64() > 0.0 && qp >= 3.0 * d.sqrt() && qp <= 2.0 - d);
        let r = check_lemma1(&k, &q, &p, Sense::Negative).unwrap();
        prop_assert!(r.hypotheses_met && r.pass, "{r:?}");
    }

    #[test]
    fn pose_interpolation_endpoints(s0 in 0.0..6.0f64, len in 0.1..1.3f64, a in -1.0..1.0f64, b in -1.0..1.0f64) {
        let pose = ArcPose::new(unit_arc(s0, len));
        let p1 = MotionStep::pivot(&pose, &pose.start(), Scalar::Hw(a), None);
        let p2 = MotionStep::slide(&p1.end_pose, Scalar::Hw(b), None);
        let plan = MotionPlan::new(vec![p1, p2], HW);
        prop_assert!(validate_plan(&plan).pass);
        prop_assert!(pose_at(&plan, &Scalar::Hw(0.0)).unwrap().distance(&pose).to_f64() < 1e-12);
        prop_assert!(pose_at(&plan, &Scalar::Hw(1.0)).unwrap().distance(plan.last_pose().unwrap()).to_f64() < 1e-12);
        prop_assert!(pose_at(&plan, &Scalar::Hw(1.5)).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn union_never_exceeds_sum(s0 in 0.0..6.0f64, len in 0.2..1.3f64, a in -2.0..2.0f64, b in -2.0..2.0f64, at_end: bool, seed in 0u64..1000) {
        let pose = ArcPose::new(unit_arc(s0, len));
        let c1 = if at_end { pose.end() } else { pose.start() };
        let p1 = MotionStep::pivot(&pose, &c1, Scalar::Hw(a), None);
        let c2 = p1.end_pose.end();
        let p2 = MotionStep::pivot(&p1.end_pose, &c2, Scalar::Hw(b), None);
        let plan = MotionPlan::new(vec![p1, p2], HW);
        let mc = monte_carlo_swept_area(&plan, 100_000, seed).unwrap();
        let ub = swept_area_upper_bound(&plan).value.to_f64();
        prop_assert!(mc.value.to_f64() <= ub + 3.0 * mc.stderr.to_f64(), "{mc:?} vs {ub}");
    }
}
