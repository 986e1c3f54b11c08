mod common;

use proptest::prelude::*;
use rug::Rational;

use ksol::catalog;
use ksol::geometry::{self, Polytope, RationalPoint};
use ksol::{Interval, Precision};

fn rat() -> impl Strategy<Value = Rational> {
    (-10_000i64..10_000, 1i64..500).prop_map(|(n, d)| Rational::from((n, d)))
}

fn prec() -> impl Strategy<Value = Precision> {
    prop_oneof![Just(11u32), Just(53), Just(106), Just(256)].prop_map(|b| Precision::new(b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn arithmetic_encloses_exact_results(a in rat(), b in rat(), p in prec()) {
        let x = Interval::from_rational(&a, p);
        let y = Interval::from_rational(&b, p);
        prop_assert!((&x + &y).contains_rational(&Rational::from(&a + &b)));
        prop_assert!((&x - &y).contains_rational(&Rational::from(&a - &b)));
        prop_assert!((&x * &y).contains_rational(&Rational::from(&a * &b)));
        if b.cmp0().is_ne() {
            prop_assert!((&x / &y).contains_rational(&Rational::from(&a / &b)));
        }
        prop_assert!(x.sqr().contains_rational(&Rational::from(&a * &a)));
    }

    #[test]
    fn hull_and_intersection(a in rat(), b in rat(), c in rat()) {
        let p = Precision::DEFAULT;
        let (lo, hi) = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        let x = Interval::from_rational_bounds(&lo, &hi, p);
        let y = Interval::from_rational(&c, p);
        let h = x.hull(&y);
        prop_assert!(h.contains(&x) && h.contains(&y));
        match x.intersect(&y) {
            Some(i) => prop_assert!(x.contains(&i) && y.contains(&i)),
            None => prop_assert!(!x.overlaps(&y)),
        }
    }

    #[test]
    fn refine_precision_doubles_and_clamps(bits in 11u32..5000) {
        let p = Precision::new(bits).unwrap();
        let cap = Precision::DEFAULT_CAP;
        match ksol::rigor::refine_precision(p, cap) {
            Ok(q) => prop_assert_eq!(q.bits(), (bits * 2).min(cap.bits())),
            Err(_) => prop_assert!(bits >= cap.bits()),
        }
    }

    #[test]
    fn halfspace_round_trip(pts in proptest::collection::vec((-8i64..8, -8i64..8), 3..9)) {
        let points: Vec<RationalPoint> = pts.iter().map(|&(x, y)| RationalPoint::from_ints(&[x, y])).collect();
        if let Ok(p) = Polytope::from_points(2, &points) {
            if p.is_full_dimensional() {
                let back = Polytope::from_halfspaces(2, &p.halfspaces()).unwrap();
                prop_assert_eq!(back.vertices(), p.vertices());
                let tri: Rational = p.triangulate().iter().map(|s| geometry::simplex_volume(s)).sum();
                prop_assert_eq!(tri, p.volume());
            }
        }
    }
}

#[test]
fn exp_matches_series_oracle() {
    common::exp_series_suite(10_000, 7).unwrap();
}

#[test]
fn expint_matches_quadrature_oracle() {
    common::expint_oracle_suite(200, 11).unwrap();
}

#[test]
fn futaki_is_independent_of_the_fiber() {
    common::fiber_independence_suite(13).unwrap();
}

#[test]
fn futaki_is_linear_in_the_direction() {
    common::linearity_suite(17).unwrap();
}

#[test]
fn futaki_is_symmetry_equivariant() {
    common::equivariance_suite(19).unwrap();
}

#[test]
fn divided_differences_are_continuous() {
    common::continuity_suite(300, 23).unwrap();
}

#[test]
fn discrete_futaki_converges() {
    let msg = common::discrete_convergence_suite().unwrap();
    println!("{msg}");
}

#[test]
fn degrees_are_exact_for_every_builtin() {
    for e in catalog::builtin() {
        assert_eq!(Some(geometry::degree(&e.dp).unwrap()), e.expected.degree, "{}", e.id);
    }
}
