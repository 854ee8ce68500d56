//! Exact arithmetic in `Q(r)`, the field of rational functions in the symbol
//! `r` standing for a fixed transcendental real (pi by default, e on request).
//!
//! Every element of the value group and every evaluated exponent `u(r)` lives
//! here. Equality is symbolic; ordering is decided by evaluating at certified
//! enclosures of the constant, which always terminates because the constant is
//! not algebraic.

mod constant;
mod digits;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use constant::RhoConstant;

use crate::error::{Error, Result};
use crate::upoly::{self, ZPoly};

/// A floating enclosure `[lo, hi]` of the value at one constant.
#[derive(Debug, Clone, Copy)]
struct Approx {
    lo: f64,
    hi: f64,
}

impl Approx {
    const UNKNOWN: Approx = Approx {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    fn of_poly(p: &[BigInt], x: f64) -> Option<(f64, f64)> {
        let mut v = 0.0f64;
        let mut mag = 0.0f64;
        for c in p.iter().rev() {
            let cf = c.to_f64()?;
            v = v * x + cf;
            mag = mag * x + cf.abs();
        }
        if !v.is_finite() || !mag.is_finite() {
            return None;
        }
        let d = p.len().max(1) as f64;
        let err = 4.0 * (4.0 * d + 8.0) * f64::EPSILON * mag;
        Some((v, err))
    }

    fn of_ratio(num: &[BigInt], den: &[BigInt], x: f64) -> Approx {
        if num.is_empty() {
            return Approx { lo: 0.0, hi: 0.0 };
        }
        let (Some((n, en)), Some((d, ed))) = (Self::of_poly(num, x), Self::of_poly(den, x)) else {
            return Approx::UNKNOWN;
        };
        let ad = d.abs();
        if ad <= 2.0 * ed || ad == 0.0 {
            return Approx::UNKNOWN;
        }
        let v = n / d;
        let err = 2.0 * ((en + v.abs() * ed) / (ad - ed) + v.abs() * 4.0 * f64::EPSILON);
        if !err.is_finite() {
            return Approx::UNKNOWN;
        }
        Approx {
            lo: v - err,
            hi: v + err,
        }
    }
}

/// An element of `Q(r)` in canonical form.
///
/// `num / den` with integer coefficient polynomials, no common factor over the
/// rationals, no common integer content, and `den` with positive leading
/// coefficient. Canonical form makes equality structural.
#[derive(Clone)]
pub struct RhoRational {
    num: ZPoly,
    den: ZPoly,
    approx: [Approx; 2],
}

impl RhoRational {
    fn from_canonical(num: ZPoly, den: ZPoly) -> RhoRational {
        let approx = [
            Approx::of_ratio(&num, &den, RhoConstant::Pi.to_f64()),
            Approx::of_ratio(&num, &den, RhoConstant::E.to_f64()),
        ];
        RhoRational { num, den, approx }
    }

    /// Builds `num / den` from integer coefficient vectors (constant term first).
    pub fn from_polys(num: ZPoly, den: ZPoly) -> Result<RhoRational> {
        let num = upoly::trimmed(num);
        let den = upoly::trimmed(den);
        if den.is_empty() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(mut num: ZPoly, mut den: ZPoly) -> RhoRational {
        if num.is_empty() {
            return Self::zero();
        }
        if num.len() > 1 && den.len() > 1 {
            let g = upoly::gcd(&num, &den);
            if g.len() > 1 {
                let (qn, dn) = upoly::div_exact_rational(&num, &g).expect("gcd divides numerator");
                let (qd, dd) = upoly::div_exact_rational(&den, &g).expect("gcd divides denominator");
                num = upoly::scale(&qn, &dd);
                den = upoly::scale(&qd, &dn);
            }
        }
        let c = num_integer::Integer::gcd(&upoly::content(&num), &upoly::content(&den));
        let mut c = if c.is_zero() { BigInt::one() } else { c };
        if den.last().unwrap().is_negative() {
            c = -c;
        }
        if !c.is_one() {
            for x in num.iter_mut() {
                *x /= &c;
            }
            for x in den.iter_mut() {
                *x /= &c;
            }
        }
        Self::from_canonical(num, den)
    }

    pub fn zero() -> RhoRational {
        Self::from_canonical(Vec::new(), vec![BigInt::one()])
    }

    pub fn one() -> RhoRational {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> RhoRational {
        Self::from_canonical(upoly::constant(BigInt::from(n)), vec![BigInt::one()])
    }

    pub fn from_bigint(n: BigInt) -> RhoRational {
        Self::from_canonical(upoly::constant(n), vec![BigInt::one()])
    }

    pub fn from_ratio(n: i64, d: i64) -> RhoRational {
        Self::from_rational(&BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(q: &BigRational) -> RhoRational {
        Self::from_canonical(upoly::constant(q.numer().clone()), vec![q.denom().clone()])
    }

    /// The symbol `r` itself.
    pub fn rho() -> RhoRational {
        Self::from_canonical(vec![BigInt::zero(), BigInt::one()], vec![BigInt::one()])
    }

    /// `r^k`.
    pub fn rho_pow(k: usize) -> RhoRational {
        Self::from_canonical(upoly::monomial(BigInt::one(), k), vec![BigInt::one()])
    }

    /// Integer polynomial `sum c_j r^j`.
    pub fn from_int_poly(coeffs: &[i64]) -> RhoRational {
        let num = upoly::trimmed(coeffs.iter().map(|&c| BigInt::from(c)).collect());
        Self::from_canonical(num, vec![BigInt::one()])
    }

    pub fn numer(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denom(&self) -> &[BigInt] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.num.len() == 1 && self.den.len() == 1 && self.num[0] == self.den[0]
    }

    /// Rational value when the element does not involve `r`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num.len() <= 1 && self.den.len() == 1 {
            let n = self.num.first().cloned().unwrap_or_default();
            Some(BigRational::new(n, self.den[0].clone()))
        } else {
            None
        }
    }

    /// Integer value when the element is an integer constant.
    pub fn as_integer(&self) -> Option<BigInt> {
        let q = self.as_rational()?;
        q.is_integer().then(|| q.to_integer())
    }

    /// Sign at the active constant.
    pub fn sign(&self) -> i8 {
        self.sign_with(RhoConstant::active())
    }

    /// Sign at the given constant.
    pub fn sign_with(&self, c: RhoConstant) -> i8 {
        if self.num.is_empty() {
            return 0;
        }
        let a = self.approx[c.index()];
        if a.lo > 0.0 {
            return 1;
        }
        if a.hi < 0.0 {
            return -1;
        }
        poly_sign_at(&self.num, c) * poly_sign_at(&self.den, c)
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    pub fn cmp_with(&self, other: &RhoRational, c: RhoConstant) -> Ordering {
        let a = self.approx[c.index()];
        let b = other.approx[c.index()];
        if a.hi < b.lo {
            return Ordering::Less;
        }
        if a.lo > b.hi {
            return Ordering::Greater;
        }
        if self == other {
            return Ordering::Equal;
        }
        // sign(na/da - nb/db) = sign(na db - nb da) * sign(da db)
        let cross = upoly::sub(&upoly::mul(&self.num, &other.den), &upoly::mul(&other.num, &self.den));
        let s = poly_sign_at(&cross, c) * poly_sign_at(&self.den, c) * poly_sign_at(&other.den, c);
        match s {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }

    /// Floating approximation at the active constant.
    pub fn to_f64(&self) -> f64 {
        self.to_f64_with(RhoConstant::active())
    }

    pub fn to_f64_with(&self, c: RhoConstant) -> f64 {
        let a = self.approx[c.index()];
        if a.lo.is_finite() && a.hi.is_finite() {
            return 0.5 * (a.lo + a.hi);
        }
        let x = c.to_f64();
        let eval = |p: &[BigInt]| p.iter().rev().fold(0.0f64, |acc, k| acc * x + k.to_f64().unwrap_or(f64::NAN));
        eval(&self.num) / eval(&self.den)
    }

    /// The value-group automorphism `g -> r * g`.
    pub fn sigma_gamma(&self) -> RhoRational {
        self * &RhoRational::rho()
    }

    pub fn checked_div(&self, other: &RhoRational) -> Result<RhoRational> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(
            upoly::mul(&self.num, &other.den),
            upoly::mul(&self.den, &other.num),
        ))
    }

    pub fn inv(&self) -> Result<RhoRational> {
        RhoRational::one().checked_div(self)
    }

    pub fn pow(&self, e: i64) -> Result<RhoRational> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let e = e.unsigned_abs() as u32;
        Ok(Self::canonical(upoly::pow(&base.num, e), upoly::pow(&base.den, e)))
    }

    pub fn min(self, other: RhoRational) -> RhoRational {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: RhoRational) -> RhoRational {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Text form in the symbol `r`, e.g. `(3*r^2 - 2)/(r + 1)`.
    pub fn to_text(&self) -> String {
        alloc::format!("{self}")
    }
}

/// Exact sign of an integer polynomial at the constant, by interval
/// refinement. Zero only for the zero polynomial.
fn poly_sign_at(p: &[BigInt], c: RhoConstant) -> i8 {
    if p.is_empty() {
        return 0;
    }
    if p.len() == 1 {
        return if p[0].is_positive() { 1 } else { -1 };
    }
    let mut bits = 64u32;
    loop {
        let (lo, hi) = c.enclosure(bits);
        // acc = [a, b] carries the scale 2^(bits * k) after k Horner steps
        let mut a = p.last().unwrap().clone();
        let mut b = a.clone();
        for (k, coef) in p.iter().rev().skip(1).enumerate() {
            let (p1, p2) = (&a * &lo, &a * &hi);
            let (q1, q2) = (&b * &lo, &b * &hi);
            let shifted = coef << (bits as usize * (k + 1));
            a = if p1 < p2 { p1 } else { p2 } + &shifted;
            b = if q1 > q2 { q1 } else { q2 } + &shifted;
        }
        if a.is_positive() {
            return 1;
        }
        if b.is_negative() {
            return -1;
        }
        bits = bits.checked_mul(2).expect("sign refinement overflow");
    }
}

impl PartialEq for RhoRational {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl Eq for RhoRational {}

impl Hash for RhoRational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl PartialOrd for RhoRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RhoRational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_with(other, RhoConstant::active())
    }
}

impl fmt::Debug for RhoRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RhoRational({self})")
    }
}

fn fmt_poly(p: &[BigInt], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_empty() {
        return write!(f, "0");
    }
    let mut first = true;
    for (i, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        first = false;
        match (i, mag.is_one()) {
            (0, _) => write!(f, "{mag}")?,
            (1, true) => write!(f, "r")?,
            (1, false) => write!(f, "{mag}*r")?,
            (_, true) => write!(f, "r^{i}")?,
            (_, false) => write!(f, "{mag}*r^{i}")?,
        }
    }
    Ok(())
}

fn is_atom(p: &[BigInt]) -> bool {
    let nonzero = p.iter().filter(|c| !c.is_zero()).count();
    nonzero <= 1 && !p.last().is_some_and(|c| c.is_negative() && p.len() > 1)
}

impl fmt::Display for RhoRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den_one = self.den.len() == 1 && self.den[0].is_one();
        if den_one {
            return fmt_poly(&self.num, f);
        }
        if is_atom(&self.num) {
            fmt_poly(&self.num, f)?;
        } else {
            write!(f, "(")?;
            fmt_poly(&self.num, f)?;
            write!(f, ")")?;
        }
        write!(f, "/")?;
        if self.den.len() == 1 {
            fmt_poly(&self.den, f)
        } else {
            write!(f, "(")?;
            fmt_poly(&self.den, f)?;
            write!(f, ")")
        }
    }
}

impl<'a> Add<&'a RhoRational> for &'a RhoRational {
    type Output = RhoRational;
    fn add(self, o: &RhoRational) -> RhoRational {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RhoRational::canonical(upoly::add(&self.num, &o.num), self.den.clone());
        }
        RhoRational::canonical(
            upoly::add(&upoly::mul(&self.num, &o.den), &upoly::mul(&o.num, &self.den)),
            upoly::mul(&self.den, &o.den),
        )
    }
}

impl<'a> Sub<&'a RhoRational> for &'a RhoRational {
    type Output = RhoRational;
    fn sub(self, o: &RhoRational) -> RhoRational {
        self + &(-o)
    }
}

impl<'a> Mul<&'a RhoRational> for &'a RhoRational {
    type Output = RhoRational;
    fn mul(self, o: &RhoRational) -> RhoRational {
        if self.is_zero() || o.is_zero() {
            return RhoRational::zero();
        }
        RhoRational::canonical(upoly::mul(&self.num, &o.num), upoly::mul(&self.den, &o.den))
    }
}

impl<'a> Div<&'a RhoRational> for &'a RhoRational {
    type Output = RhoRational;
    /// Panics on division by zero; see [`RhoRational::checked_div`].
    fn div(self, o: &RhoRational) -> RhoRational {
        self.checked_div(o).expect("division by zero in Q(r)")
    }
}

impl Neg for &RhoRational {
    type Output = RhoRational;
    fn neg(self) -> RhoRational {
        RhoRational::from_canonical(upoly::neg(&self.num), self.den.clone())
    }
}

impl Neg for RhoRational {
    type Output = RhoRational;
    fn neg(self) -> RhoRational {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RhoRational> for RhoRational {
            type Output = RhoRational;
            fn $m(self, o: RhoRational) -> RhoRational {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a RhoRational> for RhoRational {
            type Output = RhoRational;
            fn $m(self, o: &RhoRational) -> RhoRational {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<RhoRational> for &'a RhoRational {
            type Output = RhoRational;
            fn $m(self, o: RhoRational) -> RhoRational {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Default for RhoRational {
    fn default() -> Self {
        RhoRational::zero()
    }
}

impl From<i64> for RhoRational {
    fn from(n: i64) -> Self {
        RhoRational::from_int(n)
    }
}

/// `+infinity`-extended value, used for valuations of zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extended {
    Finite(RhoRational),
    Infinity,
}

impl Extended {
    pub fn finite(&self) -> Option<&RhoRational> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinity => write!(f, "inf"),
        }
    }
}
