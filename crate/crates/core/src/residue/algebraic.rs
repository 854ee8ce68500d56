//! Exact elements of the algebraic closure of the rationals.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::{self, common_field, embed, locate, NumberField};
use super::isolate::{cmp_centers, Cq, Rect};
use super::qpoly::{self, QPoly};
use crate::error::{Error, Result};
use crate::upoly::{self, ZPoly};

#[derive(Clone, Debug)]
pub(crate) enum Repr {
    Rat(BigRational),
    /// Coordinates over the generator, reduced, of degree at least one.
    Alg(Arc<NumberField>, QPoly),
}

/// An algebraic number: a rational, or an element of a number field `Q(g)`
/// with `g` pinned down by its minimal polynomial and an isolating square.
#[derive(Clone, Debug)]
pub struct AlgebraicScalar(pub(crate) Repr);

impl AlgebraicScalar {
    pub fn zero() -> Self {
        AlgebraicScalar(Repr::Rat(BigRational::zero()))
    }

    pub fn one() -> Self {
        AlgebraicScalar(Repr::Rat(BigRational::one()))
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_bigint(BigInt::from(v))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        AlgebraicScalar(Repr::Rat(BigRational::from_integer(v)))
    }

    pub fn from_rational(v: BigRational) -> Self {
        AlgebraicScalar(Repr::Rat(v))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub(crate) fn in_field(field: &Arc<NumberField>, coords: QPoly) -> Self {
        let mut c = if coords.len() > field.degree() {
            qpoly::rem(&coords, &field.monic)
        } else {
            coords
        };
        qpoly::trim(&mut c);
        match c.len() {
            0 => Self::zero(),
            1 => AlgebraicScalar(Repr::Rat(c.pop().expect("one coefficient"))),
            _ => AlgebraicScalar(Repr::Alg(field.clone(), c)),
        }
    }

    /// The root with canonical index `index` of the irreducible `minpoly`.
    /// Roots are indexed by (real part, imaginary part) of their isolating
    /// squares.
    pub fn root_of(minpoly: &[BigInt], index: usize) -> Result<Self> {
        let p = upoly::primitive(minpoly);
        match p.len() {
            0 | 1 => Err(Error::ZeroPolynomial),
            2 => Ok(Self::from_rational(BigRational::new(-p[0].clone(), p[1].clone()))),
            _ => {
                let f = NumberField::new(p, index, Vec::new())?;
                Ok(Self::in_field(&f, vec![BigRational::zero(), BigRational::one()]))
            }
        }
    }

    /// The unique root of `poly` inside `rect`.
    pub fn from_poly_and_rect(poly: &[BigRational], rect: &Rect) -> Result<Self> {
        let p = upoly::squarefree(&qpoly::to_z(poly));
        if p.len() < 2 {
            return Err(Error::ZeroPolynomial);
        }
        let mut target = |_: usize| Ok(rect.clone());
        let idx = locate(&p, &mut target)?;
        let g = field::factor_containing(&p, idx, 1)?;
        let index = locate(&g, &mut target)?;
        Self::root_of(&g, index)
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Rat(r) => Some(r),
            Repr::Alg(..) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.0, Repr::Rat(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Rat(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.0, Repr::Rat(r) if r.is_one())
    }

    pub(crate) fn field(&self) -> Option<&Arc<NumberField>> {
        match &self.0 {
            Repr::Rat(_) => None,
            Repr::Alg(f, _) => Some(f),
        }
    }

    /// Coordinates over the generator of `f`, when `f` contains this element's field.
    pub(crate) fn coords_in(&self, f: &Arc<NumberField>) -> Option<QPoly> {
        match &self.0 {
            Repr::Rat(r) if r.is_zero() => Some(Vec::new()),
            Repr::Rat(r) => Some(vec![r.clone()]),
            Repr::Alg(g, c) => embed(c, g, f),
        }
    }

    /// Rewrites all values over one common field.
    pub fn unify(values: &[AlgebraicScalar]) -> Result<Vec<AlgebraicScalar>> {
        let mut common: Option<Arc<NumberField>> = None;
        for v in values {
            if let Some(f) = v.field() {
                common = Some(match common {
                    None => f.clone(),
                    Some(c) => common_field(&c, f)?,
                });
            }
        }
        let Some(c) = common else {
            return Ok(values.to_vec());
        };
        values
            .iter()
            .map(|v| {
                v.coords_in(&c)
                    .map(|co| Self::in_field(&c, co))
                    .ok_or_else(|| Error::Consistency("embedding lost".into()))
            })
            .collect()
    }

    /// Certified enclosure; `level` trades time for width.
    pub fn enclosure(&self, level: usize) -> Result<Rect> {
        match &self.0 {
            Repr::Rat(r) => Ok(Rect::point(&Cq::real(r.clone()))),
            Repr::Alg(f, c) => Ok(qpoly::eval_rect(c, &f.rect_at(level)?)),
        }
    }

    /// Index of this value among the roots of its minimal polynomial `m`.
    fn root_index(&self, m: &ZPoly) -> Result<usize> {
        locate(m, &mut |level| self.enclosure(level))
    }

    /// An enclosure that contains no other root of the minimal polynomial,
    /// so that `from_poly_and_rect` recovers this value.
    pub fn isolating_rect(&self) -> Result<Rect> {
        let m: Vec<BigRational> = self.minpoly().into_iter().map(BigRational::from_integer).collect();
        for level in 0..super::isolate::LEVELS + 2 {
            let r = self.enclosure(level)?;
            // the enclosure holds this root, so a unique hit is this root
            if Self::from_poly_and_rect(&m, &r).is_ok() {
                return Ok(r);
            }
        }
        Err(Error::Isolation("no isolating enclosure".into()))
    }

    pub fn approx(&self) -> Complex64 {
        match &self.0 {
            Repr::Rat(r) => Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0),
            Repr::Alg(f, c) => qpoly::eval_rect(c, &f.rect).center().to_c64(),
        }
    }

    /// Primitive irreducible integer polynomial with positive leading coefficient.
    pub fn minpoly(&self) -> ZPoly {
        match &self.0 {
            Repr::Rat(r) => upoly::primitive(&[-r.numer().clone(), r.denom().clone()]),
            Repr::Alg(f, c) => {
                // characteristic polynomial of multiplication by the element
                let psi = vec![qpoly::neg(c), vec![BigRational::one()]];
                let charpoly = field::norm_shift(&upoly::primitive(&f.minpoly), &psi, 0);
                upoly::squarefree(&charpoly)
            }
        }
    }

    pub fn checked_inv(&self) -> Result<Self> {
        match &self.0 {
            Repr::Rat(r) if r.is_zero() => Err(Error::DivisionByZero),
            Repr::Rat(r) => Ok(Self::from_rational(r.recip())),
            Repr::Alg(f, c) => {
                let inv = qpoly::inv_mod(c, &f.monic).ok_or_else(|| Error::Consistency("defining polynomial is reducible".into()))?;
                Ok(Self::in_field(f, inv))
            }
        }
    }

    pub fn inv(&self) -> Self {
        self.checked_inv().expect("inverse of zero")
    }

    pub fn pow(&self, e: i64) -> Self {
        let mut base = if e < 0 { self.inv() } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        match &self.0 {
            Repr::Rat(_) => self.clone(),
            Repr::Alg(f, c) => {
                let mut target = |level: usize| Ok(f.rect_at(level)?.conj());
                let idx = locate(&f.minpoly, &mut target).expect("conjugate root");
                if idx == f.index {
                    return self.clone();
                }
                let g = NumberField::new(f.minpoly.clone(), idx, Vec::new()).expect("conjugate field");
                Self::in_field(&g, c.clone())
            }
        }
    }

    /// Orders by the center of the level-0 enclosure: real part, then imaginary.
    pub fn cmp_canonical(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Rat(a), Repr::Rat(b)) => a.cmp(b),
            _ => {
                let a = self.enclosure(0).expect("level 0 enclosure").center();
                let b = other.enclosure(0).expect("level 0 enclosure").center();
                cmp_centers(&a, &b)
            }
        }
    }

    fn binary(&self, other: &Self, op: impl Fn(&[BigRational], &[BigRational], &Arc<NumberField>) -> QPoly) -> Self {
        let f = match (self.field(), other.field()) {
            (None, None) => unreachable!("rational pair handled by caller"),
            (Some(f), None) | (None, Some(f)) => f.clone(),
            (Some(f), Some(g)) => {
                if NumberField::same(f, g) {
                    f.clone()
                } else {
                    common_field(f, g).expect("common field of two number fields")
                }
            }
        };
        let a = self.coords_in(&f).expect("embedding");
        let b = other.coords_in(&f).expect("embedding");
        Self::in_field(&f, op(&a, &b, &f))
    }

    pub fn to_text(&self) -> String {
        format!("{self}")
    }
}

impl PartialEq for AlgebraicScalar {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Rat(a), Repr::Rat(b)) => a == b,
            (Repr::Rat(_), Repr::Alg(..)) | (Repr::Alg(..), Repr::Rat(_)) => false,
            (Repr::Alg(f, a), Repr::Alg(g, b)) => {
                if NumberField::same(f, g) {
                    return a == b;
                }
                let ea = self.enclosure(0).expect("enclosure");
                let eb = other.enclosure(0).expect("enclosure");
                if !ea.intersects(&eb) {
                    return false;
                }
                // conjugates share a minimal polynomial and differ in root index
                let m = self.minpoly();
                if m != other.minpoly() {
                    return false;
                }
                match (self.root_index(&m), other.root_index(&m)) {
                    (Ok(i), Ok(j)) => i == j,
                    _ => (self - other).is_zero(),
                }
            }
        }
    }
}

impl Eq for AlgebraicScalar {}

impl fmt::Display for AlgebraicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Rat(r) => write!(f, "{r}"),
            Repr::Alg(..) => {
                let z = self.approx();
                let m = self.minpoly();
                let mut terms = Vec::new();
                for (i, c) in m.iter().enumerate().rev() {
                    if c.is_zero() {
                        continue;
                    }
                    let mon = match i {
                        0 => String::new(),
                        1 => String::from("x"),
                        _ => format!("x^{i}"),
                    };
                    let body = if i > 0 && c.abs().is_one() { mon } else if i > 0 { format!("{}*{mon}", c.abs()) } else { format!("{}", c.abs()) };
                    let sign = if c.is_negative() { "-" } else { "+" };
                    if terms.is_empty() {
                        terms.push(if c.is_negative() { format!("-{body}") } else { body });
                    } else {
                        terms.push(format!("{sign} {body}"));
                    }
                }
                write!(f, "root({}; {:.12}{:+.12}i)", terms.join(" "), z.re, z.im)
            }
        }
    }
}

impl<'a> Add<&'a AlgebraicScalar> for &'a AlgebraicScalar {
    type Output = AlgebraicScalar;
    fn add(self, o: &AlgebraicScalar) -> AlgebraicScalar {
        if let (Repr::Rat(a), Repr::Rat(b)) = (&self.0, &o.0) {
            return AlgebraicScalar(Repr::Rat(a + b));
        }
        self.binary(o, |a, b, _| qpoly::add(a, b))
    }
}

impl<'a> Sub<&'a AlgebraicScalar> for &'a AlgebraicScalar {
    type Output = AlgebraicScalar;
    fn sub(self, o: &AlgebraicScalar) -> AlgebraicScalar {
        if let (Repr::Rat(a), Repr::Rat(b)) = (&self.0, &o.0) {
            return AlgebraicScalar(Repr::Rat(a - b));
        }
        self.binary(o, |a, b, _| qpoly::sub(a, b))
    }
}

impl<'a> Mul<&'a AlgebraicScalar> for &'a AlgebraicScalar {
    type Output = AlgebraicScalar;
    fn mul(self, o: &AlgebraicScalar) -> AlgebraicScalar {
        match (&self.0, &o.0) {
            (Repr::Rat(a), Repr::Rat(b)) => AlgebraicScalar(Repr::Rat(a * b)),
            (Repr::Rat(r), Repr::Alg(f, c)) | (Repr::Alg(f, c), Repr::Rat(r)) => AlgebraicScalar::in_field(f, qpoly::scale(c, r)),
            _ => self.binary(o, |a, b, f| qpoly::rem(&qpoly::mul(a, b), &f.monic)),
        }
    }
}

impl<'a> Div<&'a AlgebraicScalar> for &'a AlgebraicScalar {
    type Output = AlgebraicScalar;
    fn div(self, o: &AlgebraicScalar) -> AlgebraicScalar {
        self * &o.inv()
    }
}

impl Neg for &AlgebraicScalar {
    type Output = AlgebraicScalar;
    fn neg(self) -> AlgebraicScalar {
        match &self.0 {
            Repr::Rat(r) => AlgebraicScalar(Repr::Rat(-r)),
            Repr::Alg(f, c) => AlgebraicScalar(Repr::Alg(f.clone(), qpoly::neg(c))),
        }
    }
}

impl Neg for AlgebraicScalar {
    type Output = AlgebraicScalar;
    fn neg(self) -> AlgebraicScalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<AlgebraicScalar> for AlgebraicScalar {
            type Output = AlgebraicScalar;
            fn $m(self, o: AlgebraicScalar) -> AlgebraicScalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a AlgebraicScalar> for AlgebraicScalar {
            type Output = AlgebraicScalar;
            fn $m(self, o: &'a AlgebraicScalar) -> AlgebraicScalar {
                (&self).$m(o)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl From<i64> for AlgebraicScalar {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl From<BigRational> for AlgebraicScalar {
    fn from(v: BigRational) -> Self {
        Self::from_rational(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> AlgebraicScalar {
        // positive root of x^2 - 2 has canonical index 1
        AlgebraicScalar::root_of(&[BigInt::from(-2), BigInt::zero(), BigInt::one()], 1).unwrap()
    }

    #[test]
    fn sqrt2_squared_is_two() {
        let s = sqrt2();
        assert!(s.approx().re > 1.41 && s.approx().re < 1.42);
        assert_eq!(&s * &s, AlgebraicScalar::from_int(2));
    }

    #[test]
    fn conjugates_cancel() {
        let s = sqrt2();
        let one = AlgebraicScalar::one();
        assert_eq!(&(&one + &s) + &(&one - &s), AlgebraicScalar::from_int(2));
    }

    #[test]
    fn inverse_in_quadratic_field() {
        let s = sqrt2();
        let x = &AlgebraicScalar::one() + &s;
        assert_eq!(&x * &x.inv(), AlgebraicScalar::one());
        assert_eq!(AlgebraicScalar::zero().checked_inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn mixed_fields_meet_in_a_compositum() {
        let s2 = sqrt2();
        let s3 = AlgebraicScalar::root_of(&[BigInt::from(-3), BigInt::zero(), BigInt::one()], 1).unwrap();
        let x = &s2 + &s3;
        // (sqrt2 + sqrt3)^2 = 5 + 2 sqrt6
        let six = &s2 * &s3;
        assert_eq!(&x * &x, &AlgebraicScalar::from_int(5) + &(&AlgebraicScalar::from_int(2) * &six));
        assert_eq!(&six * &six, AlgebraicScalar::from_int(6));
        assert_eq!(x.minpoly(), vec![1, 0, -10, 0, 1].into_iter().map(BigInt::from).collect::<Vec<_>>());
    }

    #[test]
    fn same_number_in_two_fields_is_equal() {
        let s2 = sqrt2();
        // 1 + sqrt2 is the positive root of x^2 - 2x - 1
        let t = AlgebraicScalar::root_of(&[BigInt::from(-1), BigInt::from(-2), BigInt::one()], 1).unwrap();
        assert_eq!(&t - &AlgebraicScalar::one(), s2);
        assert_ne!(t, s2);
    }

    #[test]
    fn conjugation_of_i() {
        let i = AlgebraicScalar::root_of(&[BigInt::one(), BigInt::zero(), BigInt::one()], 1).unwrap();
        assert!(i.approx().im > 0.0);
        let ci = i.conj();
        assert!(ci.approx().im < 0.0);
        assert_eq!(&i * &ci, AlgebraicScalar::one());
        assert_eq!(&i + &ci, AlgebraicScalar::zero());
    }

    #[test]
    fn tiny_roots_with_large_leading_coefficient() {
        // 3^13 x^4 + 2: four roots of modulus about 0.02
        let m: ZPoly = [2i64, 0, 0, 0, 1_594_323].iter().map(|&c| BigInt::from(c)).collect();
        for i in 0..4 {
            let a = AlgebraicScalar::root_of(&m, i).unwrap();
            let r = a.isolating_rect().unwrap();
            let q: Vec<BigRational> = m.iter().cloned().map(BigRational::from_integer).collect();
            assert_eq!(AlgebraicScalar::from_poly_and_rect(&q, &r).unwrap(), a);
        }
    }
}
