use diffkap_core::{AlgebraicScalar, Extended, HahnSeries, RhoRational};
use proptest::prelude::*;

fn exponent() -> impl Strategy<Value = RhoRational> {
    (-4i64..=6, 0i64..=2, 1i64..=3).prop_map(|(a, b, d)| {
        let e = &RhoRational::from_int(a) + &(&RhoRational::from_int(b) * &RhoRational::rho());
        &e / &RhoRational::from_int(d)
    })
}

fn exact_series() -> impl Strategy<Value = HahnSeries> {
    prop::collection::vec((exponent(), -5i64..=5), 0..=4).prop_map(|ts| {
        let terms = ts.into_iter().map(|(e, c)| (e, AlgebraicScalar::from_int(c))).collect();
        HahnSeries::new(terms, None)
    })
}

fn val(x: &HahnSeries) -> Extended {
    x.valuation().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ring_laws(x in exact_series(), y in exact_series(), z in exact_series()) {
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        prop_assert!((&x - &x).is_zero());
    }

    #[test]
    fn valuation_is_additive(x in exact_series(), y in exact_series()) {
        let expected = match (val(&x), val(&y)) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(&a + &b),
            _ => Extended::Infinity,
        };
        prop_assert_eq!(val(&(&x * &y)), expected);
    }

    #[test]
    fn ultrametric(x in exact_series(), y in exact_series()) {
        let s = val(&(&x + &y));
        prop_assert!(s >= val(&x).min(val(&y)));
    }

    #[test]
    fn sigma_is_multiplicative_and_scales_the_valuation(x in exact_series(), y in exact_series()) {
        prop_assert_eq!((&x * &y).apply_sigma(), &x.apply_sigma() * &y.apply_sigma());
        if let Extended::Finite(v) = val(&x) {
            prop_assert_eq!(val(&x.apply_sigma()), Extended::Finite(v.sigma_gamma()));
        }
    }

    #[test]
    fn inverse_up_to_the_target(x in exact_series()) {
        prop_assume!(!x.is_zero());
        let target = RhoRational::from_int(4);
        let inv = x.invert(&target).unwrap();
        let v = x.valuation().unwrap().finite().unwrap().clone();
        let err = &(&x * &inv) - &HahnSeries::one();
        prop_assert!(err.has_no_terms());
        prop_assert!(err.valuation_bound() >= Extended::Finite(&target + &v));
    }
}

#[test]
fn residue_and_splitting() {
    let x = HahnSeries::new(
        vec![
            (RhoRational::zero(), AlgebraicScalar::from_int(3)),
            (RhoRational::rho(), AlgebraicScalar::from_int(1)),
        ],
        None,
    );
    assert_eq!(x.residue().unwrap(), AlgebraicScalar::from_int(3));
    let g = RhoRational::from_ratio(1, 2);
    assert_eq!(HahnSeries::splitting(&g).valuation().unwrap(), Extended::Finite(g));
    assert!(HahnSeries::splitting(&RhoRational::from_int(-1)).residue().is_err());
}
