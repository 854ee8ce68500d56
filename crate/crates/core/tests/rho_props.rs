use diffkap_core::{RhoConstant, RhoRational};
use proptest::prelude::*;

fn rho_rational() -> impl Strategy<Value = RhoRational> {
    (
        prop::collection::vec(-6i64..=6, 1..=3),
        prop::collection::vec(-4i64..=4, 1..=2),
    )
        .prop_filter_map("zero denominator", |(n, d)| {
            let num = RhoRational::from_int_poly(&n);
            let den = RhoRational::from_int_poly(&d);
            num.checked_div(&den).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_axioms(a in rho_rational(), b in rho_rational(), c in rho_rational()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn inverses(a in rho_rational()) {
        prop_assume!(!a.is_zero());
        prop_assert!((&a * &a.inv().unwrap()).is_one());
        prop_assert_eq!(a.pow(-2).unwrap(), (&a * &a).inv().unwrap());
    }

    #[test]
    fn order_is_compatible(a in rho_rational(), b in rho_rational(), c in rho_rational()) {
        if a < b {
            prop_assert!(&a + &c < &b + &c);
            if c.is_positive() {
                prop_assert!(&a * &c < &b * &c);
            }
        }
        prop_assert_eq!(a.cmp(&b), (&a - &b).sign().cmp(&0));
    }

    #[test]
    fn order_agrees_with_floats(a in rho_rational(), b in rho_rational()) {
        let (x, y) = (a.to_f64(), b.to_f64());
        if (x - y).abs() > 1e-9 * (1.0 + x.abs().max(y.abs())) {
            prop_assert_eq!(a < b, x < y);
        }
    }
}

#[test]
fn order_depends_on_the_constant() {
    // r - 3 is positive for pi and negative for e
    let x = &RhoRational::rho() - &RhoRational::from_int(3);
    assert_eq!(x.sign_with(RhoConstant::Pi), 1);
    assert_eq!(x.sign_with(RhoConstant::E), -1);
}
