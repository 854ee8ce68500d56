//! Seeded random inputs for property checks and the verification harness.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diffpoly::{KDiffPoly, Monomial, SigmaExponent};
use crate::hahn::HahnSeries;
use crate::residue::AlgebraicScalar;
use crate::rho::RhoRational;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bounds for [`poly`].
#[derive(Clone, Debug)]
pub struct PolyShape {
    pub nvars: usize,
    pub min_terms: usize,
    pub max_terms: usize,
    /// Highest sigma-power `j` in `sigma^j`.
    pub sigma_order: usize,
    /// Bound on the sum of the absolute exponent entries per variable.
    pub max_degree: i64,
    /// Allow negative exponent entries.
    pub laurent: bool,
    /// Allow `r`-dependent coefficient exponents.
    pub rho_exponents: bool,
}

impl PolyShape {
    pub fn new(nvars: usize, max_terms: usize, sigma_order: usize) -> PolyShape {
        PolyShape {
            nvars,
            min_terms: 1,
            max_terms,
            sigma_order,
            max_degree: 3,
            laurent: true,
            rho_exponents: true,
        }
    }
}

fn nonzero(rng: &mut Rng64, bound: i64) -> i64 {
    let v = rng.gen_range(1..=bound);
    if rng.gen_bool(0.5) {
        -v
    } else {
        v
    }
}

/// A small element of `Q(r)`: `(a + b r) / d`, occasionally over `1 + r`.
pub fn rho_rational(rng: &mut Rng64) -> RhoRational {
    let a = rng.gen_range(-6..=6);
    let b = if rng.gen_bool(0.4) { rng.gen_range(-2..=2) } else { 0 };
    let d = rng.gen_range(1..=3);
    let x = &RhoRational::from_int_poly(&[a, b]) / &RhoRational::from_int(d);
    if rng.gen_bool(0.15) {
        &x / &RhoRational::from_int_poly(&[1, 1])
    } else {
        x
    }
}

pub fn point(rng: &mut Rng64, n: usize) -> Vec<RhoRational> {
    (0..n).map(|_| rho_rational(rng)).collect()
}

fn exponent(rng: &mut Rng64, rho: bool) -> RhoRational {
    if rho && rng.gen_bool(0.2) {
        RhoRational::from_int_poly(&[rng.gen_range(0..=1), 1])
    } else {
        RhoRational::from_ratio(rng.gen_range(0..=6), rng.gen_range(1..=2))
    }
}

/// An exact coefficient with one or two terms and small integer scalars.
pub fn coefficient(rng: &mut Rng64, rho: bool) -> HahnSeries {
    let e = exponent(rng, rho);
    let mut s = HahnSeries::monomial(AlgebraicScalar::from_int(nonzero(rng, 3)), e.clone());
    if rng.gen_bool(0.3) {
        let e2 = &e + &RhoRational::from_int(rng.gen_range(1..=2));
        s = &s + &HahnSeries::monomial(AlgebraicScalar::from_int(nonzero(rng, 3)), e2);
    }
    s
}

fn sigma_exponent(rng: &mut Rng64, shape: &PolyShape) -> SigmaExponent {
    let mut budget = rng.gen_range(0..=shape.max_degree);
    let mut a = alloc::vec![0; shape.sigma_order + 1];
    while budget > 0 {
        let j = rng.gen_range(0..=shape.sigma_order);
        let neg = shape.laurent && rng.gen_bool(0.25);
        a[j] += if neg { -1 } else { 1 };
        budget -= 1;
    }
    SigmaExponent::new(a)
}

/// A random polynomial with between `min_terms` and `max_terms` distinct
/// monomials.
pub fn poly(rng: &mut Rng64, shape: &PolyShape) -> KDiffPoly {
    let want = rng.gen_range(shape.min_terms..=shape.max_terms);
    let mut monos: Vec<Monomial> = Vec::new();
    let mut tries = 0;
    while monos.len() < want && tries < 64 * want {
        tries += 1;
        let m: Monomial = (0..shape.nvars).map(|_| sigma_exponent(rng, shape)).collect();
        if !monos.contains(&m) {
            monos.push(m);
        }
    }
    monos.shuffle(rng);
    let terms: Vec<_> = monos.into_iter().map(|m| (m, coefficient(rng, shape.rho_exponents))).collect();
    KDiffPoly::from_terms(shape.nvars, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_bounded() {
        let shape = PolyShape {
            min_terms: 2,
            ..PolyShape::new(2, 6, 2)
        };
        let a: Vec<_> = (0..5).map(|_| poly(&mut rng(7), &shape)).collect();
        assert!(a.windows(2).all(|p| p[0] == p[1]));
        let mut r = rng(1);
        for _ in 0..50 {
            let f = poly(&mut r, &shape);
            assert!(f.len() >= 2 && f.len() <= 6);
            assert!(f.sigma_len() <= 3);
        }
    }
}
