//! Truncated Hahn series `sum a_g t^g` with exponents in `Q(r)` and algebraic
//! coefficients.
//!
//! A series carries finitely many known terms and a truncation `T`: every
//! coefficient at an exponent below `T` is known (absent means zero), nothing
//! is known at or above it. `T = +inf` marks an exact element.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::residue::AlgebraicScalar;
use crate::rho::{Extended, RhoRational};

/// Iteration cap of the geometric series in [`HahnSeries::invert`].
const INVERT_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HahnSeries {
    terms: Vec<(RhoRational, AlgebraicScalar)>,
    trunc: Option<RhoRational>,
}

fn ext_add(a: &Extended, b: &Extended) -> Extended {
    match (a, b) {
        (Extended::Finite(x), Extended::Finite(y)) => Extended::Finite(x + y),
        _ => Extended::Infinity,
    }
}

fn opt_min(a: &Option<RhoRational>, b: &Option<RhoRational>) -> Option<RhoRational> {
    match (a, b) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (Some(x), Some(y)) => Some(if x <= y { x.clone() } else { y.clone() }),
    }
}

fn to_opt(e: Extended) -> Option<RhoRational> {
    match e {
        Extended::Finite(v) => Some(v),
        Extended::Infinity => None,
    }
}

impl HahnSeries {
    /// Builds a normalized series: sorted, merged, zero-free, below truncation.
    pub fn new(mut terms: Vec<(RhoRational, AlgebraicScalar)>, trunc: Option<RhoRational>) -> HahnSeries {
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(RhoRational, AlgebraicScalar)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            if let Some(t) = &trunc {
                if e >= *t {
                    continue;
                }
            }
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 = &last.1 + &c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        HahnSeries { terms: out, trunc }
    }

    pub fn zero() -> HahnSeries {
        HahnSeries {
            terms: Vec::new(),
            trunc: None,
        }
    }

    pub fn one() -> HahnSeries {
        Self::constant(AlgebraicScalar::one())
    }

    pub fn from_int(v: i64) -> HahnSeries {
        Self::constant(AlgebraicScalar::from_int(v))
    }

    pub fn constant(c: AlgebraicScalar) -> HahnSeries {
        Self::monomial(c, RhoRational::zero())
    }

    pub fn monomial(c: AlgebraicScalar, e: RhoRational) -> HahnSeries {
        if c.is_zero() {
            return Self::zero();
        }
        HahnSeries {
            terms: alloc::vec![(e, c)],
            trunc: None,
        }
    }

    /// The section `g -> t^g` of the valuation.
    pub fn splitting(g: &RhoRational) -> HahnSeries {
        Self::monomial(AlgebraicScalar::one(), g.clone())
    }

    /// Nothing known below `t`: `O(t^T)`.
    pub fn unknown(t: RhoRational) -> HahnSeries {
        HahnSeries {
            terms: Vec::new(),
            trunc: Some(t),
        }
    }

    pub fn terms(&self) -> &[(RhoRational, AlgebraicScalar)] {
        &self.terms
    }

    pub fn truncation(&self) -> Extended {
        match &self.trunc {
            Some(t) => Extended::Finite(t.clone()),
            None => Extended::Infinity,
        }
    }

    pub fn trunc(&self) -> Option<&RhoRational> {
        self.trunc.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    /// The exact zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_none()
    }

    /// True when no term is known (exact zero or pure `O(.)`).
    pub fn has_no_terms(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn valuation(&self) -> Result<Extended> {
        match (self.terms.first(), &self.trunc) {
            (Some((e, _)), _) => Ok(Extended::Finite(e.clone())),
            (None, None) => Ok(Extended::Infinity),
            (None, Some(_)) => Err(Error::ValuationUnknown),
        }
    }

    /// The valuation when known, otherwise the truncation (a lower bound).
    pub fn valuation_bound(&self) -> Extended {
        match self.terms.first() {
            Some((e, _)) => Extended::Finite(e.clone()),
            None => self.truncation(),
        }
    }

    pub fn leading(&self) -> Option<(&RhoRational, &AlgebraicScalar)> {
        self.terms.first().map(|(e, c)| (e, c))
    }

    pub fn coefficient(&self, e: &RhoRational) -> AlgebraicScalar {
        self.terms
            .iter()
            .find(|(x, _)| x == e)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(AlgebraicScalar::zero)
    }

    /// Drops everything at or above `bound`.
    pub fn truncate(&self, bound: &RhoRational) -> HahnSeries {
        let trunc = opt_min(&self.trunc, &Some(bound.clone()));
        let terms = self.terms.iter().filter(|(e, _)| e < bound).cloned().collect();
        HahnSeries { terms, trunc }
    }

    /// Multiplication by `t^g`.
    pub fn shift(&self, g: &RhoRational) -> HahnSeries {
        HahnSeries {
            terms: self.terms.iter().map(|(e, c)| (e + g, c.clone())).collect(),
            trunc: self.trunc.as_ref().map(|t| t + g),
        }
    }

    pub fn scale(&self, s: &AlgebraicScalar) -> HahnSeries {
        if s.is_zero() {
            return match &self.trunc {
                None => Self::zero(),
                Some(_) => HahnSeries {
                    terms: Vec::new(),
                    trunc: to_opt(self.valuation_bound()),
                },
            };
        }
        HahnSeries {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
            trunc: self.trunc.clone(),
        }
    }

    /// Product known below `min(natural truncation, bound)`.
    pub fn mul_trunc(&self, o: &HahnSeries, bound: Option<&RhoRational>) -> HahnSeries {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let natural = {
            let a = match &self.trunc {
                Some(t) => ext_add(&Extended::Finite(t.clone()), &o.valuation_bound()),
                None => Extended::Infinity,
            };
            let b = match &o.trunc {
                Some(t) => ext_add(&Extended::Finite(t.clone()), &self.valuation_bound()),
                None => Extended::Infinity,
            };
            to_opt(a.min(b))
        };
        let trunc = opt_min(&natural, &bound.cloned());
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (ex, cx) in &self.terms {
            for (ey, cy) in &o.terms {
                let e = ex + ey;
                if let Some(t) = &trunc {
                    if e >= *t {
                        break;
                    }
                }
                terms.push((e, cx * cy));
            }
        }
        HahnSeries::new(terms, trunc)
    }

    /// `self^n` known below `bound` (or exactly when everything is exact).
    pub fn pow_trunc(&self, n: u32, bound: Option<&RhoRational>) -> HahnSeries {
        if n == 0 {
            return Self::one();
        }
        let v = self.valuation_bound();
        // the k-th partial power must be known below bound - (n - k) v
        let partial = |k: u32| -> Option<RhoRational> {
            match (bound, &v) {
                (Some(b), Extended::Finite(v)) => Some(b - &(v * &RhoRational::from_int((n - k) as i64))),
                (Some(b), Extended::Infinity) => Some(b.clone()),
                (None, _) => None,
            }
        };
        let base = match partial(1) {
            Some(b) => self.truncate(&b),
            None => self.clone(),
        };
        let mut acc = base.clone();
        for k in 2..=n {
            acc = acc.mul_trunc(&base, partial(k).as_ref());
        }
        acc
    }

    /// `1/self`, known below `target`.
    pub fn invert(&self, target: &RhoRational) -> Result<HahnSeries> {
        let Some((v, c)) = self.leading() else {
            return Err(if self.is_zero() { Error::DivisionByZero } else { Error::ValuationUnknown });
        };
        let v = v.clone();
        let cinv = c.checked_inv()?;
        // self = c t^v (1 + u)
        let unit = self.shift(&-&v).scale(&cinv);
        let u = &unit - &Self::one();
        let neg_u = -&u;
        let bound = target + &v;
        let mut s = Self::one();
        let mut p = Self::one();
        let mut steps = 0;
        loop {
            p = p.mul_trunc(&neg_u, Some(&bound));
            s = &s + &p;
            if p.has_no_terms() {
                break;
            }
            steps += 1;
            if steps > INVERT_CAP {
                return Err(Error::InsufficientPrecision(format!(
                    "geometric series for the inverse needs more than {INVERT_CAP} terms"
                )));
            }
        }
        Ok(s.scale(&cinv).shift(&-&v))
    }

    /// The automorphism: `t^g -> t^(r g)`, coefficients through the identity.
    pub fn apply_sigma(&self) -> HahnSeries {
        self.apply_sigma_pow(1)
    }

    /// `sigma^j`.
    pub fn apply_sigma_pow(&self, j: usize) -> HahnSeries {
        self.apply_sigma_with(j, &|c: &AlgebraicScalar| c.clone())
    }

    /// `sigma^j` with a given action on coefficients (applied `j` times).
    pub fn apply_sigma_with(&self, j: usize, sigma_bar: &dyn Fn(&AlgebraicScalar) -> AlgebraicScalar) -> HahnSeries {
        if j == 0 {
            return self.clone();
        }
        let f = RhoRational::rho_pow(j);
        let bar = |c: &AlgebraicScalar| {
            let mut c = c.clone();
            for _ in 0..j {
                c = sigma_bar(&c);
            }
            c
        };
        HahnSeries {
            terms: self.terms.iter().map(|(e, c)| (e * &f, bar(c))).collect(),
            trunc: self.trunc.as_ref().map(|t| t * &f),
        }
    }

    /// Coefficient at exponent 0 of an element of the valuation ring.
    pub fn residue(&self) -> Result<AlgebraicScalar> {
        if let Some((e, _)) = self.terms.first() {
            if e.is_negative() {
                return Err(Error::NegativeValuation);
            }
        }
        if let Some(t) = &self.trunc {
            if !t.is_positive() {
                return Err(Error::InsufficientPrecision(format!(
                    "residue needs truncation above 0, have {t}"
                )));
            }
        }
        Ok(self.coefficient(&RhoRational::zero()))
    }

    pub fn to_text(&self) -> String {
        format!("{self}")
    }
}

fn fmt_exp(e: &RhoRational) -> String {
    if e.is_one() {
        return String::from("t");
    }
    match e.as_integer() {
        Some(k) if k >= num_bigint::BigInt::from(0) => format!("t^{k}"),
        _ => format!("t^({})", e.to_text()),
    }
}

impl fmt::Display for HahnSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            let (neg, mag) = match c.as_rational() {
                Some(r) if r < &num_rational::BigRational::from_integer(0.into()) => (true, AlgebraicScalar::from_rational(-r)),
                _ => (false, c.clone()),
            };
            let body = if e.is_zero() {
                if mag.is_rational() {
                    format!("{mag}")
                } else {
                    format!("({mag})")
                }
            } else if mag.is_one() {
                fmt_exp(e)
            } else if mag.is_rational() {
                format!("{mag}*{}", fmt_exp(e))
            } else {
                format!("({mag})*{}", fmt_exp(e))
            };
            match (first, neg) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        match (&self.trunc, first) {
            (None, true) => write!(f, "0"),
            (None, false) => Ok(()),
            (Some(t), true) => write!(f, "O(t^({}))", t.to_text()),
            (Some(t), false) => write!(f, " + O(t^({}))", t.to_text()),
        }
    }
}

impl<'a> Add<&'a HahnSeries> for &'a HahnSeries {
    type Output = HahnSeries;
    fn add(self, o: &HahnSeries) -> HahnSeries {
        let trunc = opt_min(&self.trunc, &o.trunc);
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        HahnSeries::new(terms, trunc)
    }
}

impl Neg for &HahnSeries {
    type Output = HahnSeries;
    fn neg(self) -> HahnSeries {
        HahnSeries {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            trunc: self.trunc.clone(),
        }
    }
}

impl Neg for HahnSeries {
    type Output = HahnSeries;
    fn neg(self) -> HahnSeries {
        -&self
    }
}

impl<'a> Sub<&'a HahnSeries> for &'a HahnSeries {
    type Output = HahnSeries;
    fn sub(self, o: &HahnSeries) -> HahnSeries {
        self + &(-o)
    }
}

impl<'a> Mul<&'a HahnSeries> for &'a HahnSeries {
    type Output = HahnSeries;
    fn mul(self, o: &HahnSeries) -> HahnSeries {
        self.mul_trunc(o, None)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<HahnSeries> for HahnSeries {
            type Output = HahnSeries;
            fn $m(self, o: HahnSeries) -> HahnSeries {
                (&self).$m(&o)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn t(e: i64) -> HahnSeries {
        HahnSeries::splitting(&RhoRational::from_int(e))
    }

    fn q(n: i64, d: i64) -> RhoRational {
        RhoRational::from_ratio(n, d)
    }

    #[test]
    fn valuations() {
        assert_eq!((&t(2) + &t(3)).valuation().unwrap(), Extended::Finite(RhoRational::from_int(2)));
        assert_eq!(HahnSeries::zero().valuation().unwrap(), Extended::Infinity);
        assert_eq!(HahnSeries::unknown(q(1, 1)).valuation(), Err(Error::ValuationUnknown));
        let g = RhoRational::from_int_poly(&[1, 1]).inv().unwrap();
        let x = &(&HahnSeries::one() + &t(1)) * &HahnSeries::splitting(&g);
        assert_eq!(x.valuation().unwrap(), Extended::Finite(g));
    }

    #[test]
    fn ring_examples() {
        let one = HahnSeries::one();
        assert_eq!(&(&one + &t(1)) + &HahnSeries::from_int(-1), t(1));
        let a = RhoRational::rho();
        let b = q(1, 3);
        assert_eq!(&HahnSeries::splitting(&a) * &HahnSeries::splitting(&b), HahnSeries::splitting(&(&a + &b)));
        assert_eq!(&(&one + &t(1)) * &(&one - &t(1)), &one - &t(2));
    }

    #[test]
    fn inverses() {
        assert_eq!(t(1).invert(&q(5, 1)).unwrap(), t(-1));
        let inv = (&HahnSeries::one() + &t(1)).invert(&q(3, 1)).unwrap();
        let expect = HahnSeries::new(
            alloc::vec![
                (q(0, 1), AlgebraicScalar::one()),
                (q(1, 1), AlgebraicScalar::from_int(-1)),
                (q(2, 1), AlgebraicScalar::one()),
            ],
            Some(q(3, 1)),
        );
        assert_eq!(inv, expect);
        assert_eq!(HahnSeries::from_int(2).invert(&q(1, 1)).unwrap(), HahnSeries::constant(AlgebraicScalar::from_ratio(1, 2)));
        assert_eq!(HahnSeries::zero().invert(&q(1, 1)), Err(Error::DivisionByZero));
    }

    #[test]
    fn sigma_and_residue() {
        assert_eq!(t(1).apply_sigma(), HahnSeries::splitting(&RhoRational::rho()));
        let x = &HahnSeries::one() + &t(2);
        let y = &HahnSeries::one() + &HahnSeries::splitting(&RhoRational::from_int_poly(&[0, 2]));
        assert_eq!(x.apply_sigma(), y);
        assert_eq!(HahnSeries::splitting(&RhoRational::zero()), HahnSeries::one());
        assert_eq!((&HahnSeries::from_int(3) + &t(1)).residue().unwrap(), AlgebraicScalar::from_int(3));
        assert_eq!(t(-1).residue(), Err(Error::NegativeValuation));
    }

    #[test]
    fn truncated_products_propagate() {
        // (1 + t + O(t^2)) * (t + O(t^3)) = t + t^2 + O(t^3)
        let a = HahnSeries::new(alloc::vec![(q(0, 1), AlgebraicScalar::one()), (q(1, 1), AlgebraicScalar::one())], Some(q(2, 1)));
        let b = HahnSeries::new(alloc::vec![(q(1, 1), AlgebraicScalar::one())], Some(q(3, 1)));
        let p = &a * &b;
        assert_eq!(p.trunc(), Some(&q(3, 1)));
        assert_eq!(p.terms().len(), 2);
    }

    #[test]
    fn display() {
        let x = HahnSeries::new(
            alloc::vec![
                (q(1, 2), AlgebraicScalar::from_int(3)),
                (RhoRational::from_polys(alloc::vec![0.into(), 1.into()], alloc::vec![1.into(), 1.into()]).unwrap(), AlgebraicScalar::from_int(-1)),
            ],
            Some(q(2, 1)),
        );
        assert_eq!(x.to_text(), "3*t^(1/2) - t^(r/(r + 1)) + O(t^(2))");
    }
}
