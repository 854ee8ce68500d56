use diffkap::json::{certificate_from_json, certificate_to_json, complex_from_json, complex_to_json, from_str, hahn_from_json, hahn_to_json, to_string};
use diffkap::parse::{parse_poly, parse_rho};
use diffkap_core::newton::lift_univariate;
use diffkap_core::polyhedral::hypersurface;
use diffkap_core::random::{self, PolyShape};
use diffkap_core::residue::IdentityField;
use diffkap_core::{AlgebraicScalar, RhoRational};

#[test]
fn printed_polynomials_parse_back() {
    let mut rng = random::rng(21);
    for n in 1..=3 {
        for _ in 0..40 {
            let f = random::poly(&mut rng, &PolyShape::new(n, 6, 3));
            let g = parse_poly(&f.to_string(), Some(n)).unwrap();
            assert_eq!(g, f, "{f}");
        }
    }
}

#[test]
fn printed_exponents_parse_back() {
    let mut rng = random::rng(22);
    for _ in 0..200 {
        let q = random::rho_rational(&mut rng);
        assert_eq!(parse_rho(&q.to_string()).unwrap(), q);
    }
}

#[test]
fn complexes_survive_json() {
    let mut rng = random::rng(23);
    let mut shape = PolyShape::new(2, 6, 2);
    shape.min_terms = 2;
    for n in [2usize, 2, 2, 3] {
        shape.nvars = n;
        let f = random::poly(&mut rng, &shape);
        let hs = hypersurface(&f).unwrap();
        let text = to_string(&complex_to_json(&hs));
        let back = complex_from_json(&from_str(&text).unwrap(), n).unwrap();
        assert_eq!(back, hs);
        assert_eq!(to_string(&complex_to_json(&back)), text);
    }
}

#[test]
fn certificates_survive_json() {
    // x1 s(x1) = t has the exact root t^(1/(1+r))
    let f = parse_poly("x1*s(x1) - t", None).unwrap();
    let w = RhoRational::one().checked_div(&(&RhoRational::one() + &RhoRational::rho())).unwrap();
    let c = lift_univariate(&f, &w, &AlgebraicScalar::from_int(1), &RhoRational::from_int(3), &IdentityField).unwrap();
    let back = certificate_from_json(&from_str(&to_string(&certificate_to_json(&c).unwrap())).unwrap()).unwrap();
    assert_eq!(back, c);
}

#[test]
fn series_with_algebraic_coefficients_survive_json() {
    let f = parse_poly("x1^2 - 2*t + t^3", None).unwrap();
    let sqrt2 = AlgebraicScalar::root_of(&[(-2).into(), 0.into(), 1.into()], 1).unwrap();
    let c = lift_univariate(&f, &RhoRational::from_ratio(1, 2), &sqrt2, &RhoRational::from_int(4), &IdentityField).unwrap();
    assert!(!c.root.leading().unwrap().1.is_rational());
    let back = hahn_from_json(&from_str(&to_string(&hahn_to_json(&c.root).unwrap())).unwrap()).unwrap();
    assert_eq!(back, c.root);
}
