//! Certified isolation of the complex roots of a square-free integer
//! polynomial.
//!
//! Approximations come from Aberth iteration (floating point first, then
//! rounded rational arithmetic at increasing precision). A set of
//! approximations is accepted only when the Weierstrass-correction disks,
//! computed exactly over the rationals and enclosed in axis-aligned squares,
//! are pairwise disjoint; each square then holds exactly one root.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::upoly::ZPoly;

/// Complex number with rational parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Cq {
    pub re: BigRational,
    pub im: BigRational,
}

impl Cq {
    pub fn zero() -> Cq {
        Cq {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn real(re: BigRational) -> Cq {
        Cq {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_c64(z: Complex64) -> Option<Cq> {
        Some(Cq {
            re: BigRational::from_f64(z.re)?,
            im: BigRational::from_f64(z.im)?,
        })
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn add(&self, o: &Cq) -> Cq {
        Cq {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn sub(&self, o: &Cq) -> Cq {
        Cq {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    pub fn mul(&self, o: &Cq) -> Cq {
        Cq {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn div(&self, o: &Cq) -> Option<Cq> {
        let d = o.norm_sqr();
        if d.is_zero() {
            return None;
        }
        Some(Cq {
            re: (&self.re * &o.re + &self.im * &o.im) / &d,
            im: (&self.im * &o.re - &self.re * &o.im) / &d,
        })
    }

    fn round(&self, prec: u32) -> Cq {
        Cq {
            re: round_dyadic(&self.re, prec),
            im: round_dyadic(&self.im, prec),
        }
    }
}

fn round_dyadic(x: &BigRational, prec: u32) -> BigRational {
    let scale = BigInt::one() << prec;
    let scaled = x * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.round().to_integer(), scale)
}

pub(crate) fn eval_cq(p: &[BigInt], z: &Cq) -> Cq {
    let mut acc = Cq::zero();
    for c in p.iter().rev() {
        acc = acc.mul(z);
        acc.re += BigRational::from_integer(c.clone());
    }
    acc
}

/// A root enclosed in the closed square `center +- half` (both axes).
#[derive(Debug, Clone)]
pub(crate) struct IsolatedRoot {
    pub center: Cq,
    pub half: BigRational,
}

impl IsolatedRoot {
    pub fn rect(&self) -> Rect {
        Rect {
            re: (&self.center.re - &self.half, &self.center.re + &self.half),
            im: (&self.center.im - &self.half, &self.center.im + &self.half),
        }
    }

    pub fn approx(&self) -> Complex64 {
        self.center.to_c64()
    }
}

/// Closed rational rectangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rect {
    pub re: (BigRational, BigRational),
    pub im: (BigRational, BigRational),
}

fn imul(a: &(BigRational, BigRational), b: &(BigRational, BigRational)) -> (BigRational, BigRational) {
    let c = [&a.0 * &b.0, &a.0 * &b.1, &a.1 * &b.0, &a.1 * &b.1];
    let mut lo = c[0].clone();
    let mut hi = c[0].clone();
    for v in &c[1..] {
        if *v < lo {
            lo = v.clone();
        }
        if *v > hi {
            hi = v.clone();
        }
    }
    (lo, hi)
}

fn iadd(a: &(BigRational, BigRational), b: &(BigRational, BigRational)) -> (BigRational, BigRational) {
    (&a.0 + &b.0, &a.1 + &b.1)
}

fn ineg(a: &(BigRational, BigRational)) -> (BigRational, BigRational) {
    (-&a.1, -&a.0)
}

impl Rect {
    pub(crate) fn point(z: &Cq) -> Rect {
        Rect {
            re: (z.re.clone(), z.re.clone()),
            im: (z.im.clone(), z.im.clone()),
        }
    }

    pub fn intersects(&self, o: &Rect) -> bool {
        self.re.0 <= o.re.1 && o.re.0 <= self.re.1 && self.im.0 <= o.im.1 && o.im.0 <= self.im.1
    }

    pub fn contains_zero(&self) -> bool {
        let z = BigRational::zero();
        self.re.0 <= z && z <= self.re.1 && self.im.0 <= z && z <= self.im.1
    }

    pub fn add(&self, o: &Rect) -> Rect {
        Rect {
            re: iadd(&self.re, &o.re),
            im: iadd(&self.im, &o.im),
        }
    }

    pub fn neg(&self) -> Rect {
        Rect {
            re: ineg(&self.re),
            im: ineg(&self.im),
        }
    }

    pub fn conj(&self) -> Rect {
        Rect {
            re: self.re.clone(),
            im: ineg(&self.im),
        }
    }

    pub fn mul(&self, o: &Rect) -> Rect {
        Rect {
            re: iadd(&imul(&self.re, &o.re), &ineg(&imul(&self.im, &o.im))),
            im: iadd(&imul(&self.re, &o.im), &imul(&self.im, &o.re)),
        }
    }

    /// Enclosure of `1/z`; `None` when the rectangle touches zero.
    pub fn inv(&self) -> Option<Rect> {
        if self.contains_zero() {
            return None;
        }
        let sq = |a: &(BigRational, BigRational)| {
            let z = BigRational::zero();
            let (l, h) = imul(a, a);
            if a.0 <= z && z <= a.1 {
                (z, h)
            } else {
                (l, h)
            }
        };
        let n = iadd(&sq(&self.re), &sq(&self.im));
        if n.0.is_zero() {
            return None;
        }
        let ninv = (n.1.recip(), n.0.recip());
        Some(Rect {
            re: imul(&self.re, &ninv),
            im: ineg(&imul(&self.im, &ninv)),
        })
    }

    pub(crate) fn center(&self) -> Cq {
        let two = BigRational::from_integer(BigInt::from(2));
        Cq {
            re: (&self.re.0 + &self.re.1) / &two,
            im: (&self.im.0 + &self.im.1) / &two,
        }
    }
}

fn coeffs_f64(p: &[BigInt]) -> Option<Vec<f64>> {
    p.iter().map(|c| c.to_f64().filter(|v| v.is_finite())).collect()
}

fn horner_c64(p: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        d = d * z + v;
        v = v * z + c;
    }
    (v, d)
}

fn aberth_f64(p: &[f64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    let lc = p[n];
    let bound = 1.0 + p[..n].iter().map(|c| (c / lc).abs()).fold(0.0f64, f64::max);
    let radius = bound.min(1e6).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let ang = 2.0 * core::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            Complex64::from_polar(radius * 0.9, ang)
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (v, d) = horner_c64(p, z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    s += (z[k] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved < 1e-17 {
            break;
        }
    }
    z
}

fn aberth_rational(p: &[BigInt], z: &mut [Cq], prec: u32) {
    let n = z.len();
    let dp = crate::upoly::derivative(p);
    let tol = BigRational::new(BigInt::one(), BigInt::one() << (2 * prec.saturating_sub(4)));
    let work = prec + 32;
    for _ in 0..80 {
        let mut all_small = true;
        for k in 0..n {
            let v = eval_cq(p, &z[k]);
            if v.re.is_zero() && v.im.is_zero() {
                continue;
            }
            let d = eval_cq(&dp, &z[k]);
            let Some(ratio) = v.div(&d).map(|r| r.round(work)) else { continue };
            let mut s = Cq::zero();
            for j in 0..n {
                if j != k {
                    if let Some(t) = Cq::real(BigRational::one()).div(&z[k].sub(&z[j])) {
                        s = s.add(&t.round(work));
                    }
                }
            }
            let denom = Cq::real(BigRational::one()).sub(&ratio.mul(&s));
            let Some(step) = ratio.div(&denom).map(|r| r.round(work)) else { continue };
            // relative to the size of the root
            if step.norm_sqr() > &tol * (BigRational::one() + z[k].norm_sqr()) {
                all_small = false;
            }
            z[k] = z[k].sub(&step).round(prec);
        }
        if all_small {
            break;
        }
    }
}

/// Rational upper bound for `sqrt(x)` (x >= 0), close to the true value.
fn sqrt_upper(x: &BigRational) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    let approx = num_traits::Float::sqrt(x.to_f64().unwrap_or(f64::MAX));
    let mut guess = BigRational::from_f64(approx * (1.0 + 1e-9) + f64::MIN_POSITIVE)
        .unwrap_or_else(|| x.clone() + BigRational::one());
    if guess.is_zero() {
        guess = BigRational::new(BigInt::one(), BigInt::one() << 1100u32);
    }
    while &guess * &guess < *x {
        guess = &guess * BigRational::from_integer(BigInt::from(2));
    }
    guess
}

fn certify(p: &[BigInt], z: &[Cq]) -> Option<Vec<IsolatedRoot>> {
    let n = z.len();
    let lc = BigRational::from_integer(p.last()?.clone());
    let nn = BigRational::from_integer(BigInt::from((n * n) as u64));
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let v = eval_cq(p, &z[k]);
        let mut prod = lc.clone() * &lc;
        for j in 0..n {
            if j != k {
                let d = z[k].sub(&z[j]).norm_sqr();
                if d.is_zero() {
                    return None;
                }
                prod *= d;
            }
        }
        let w2 = v.norm_sqr() / prod;
        let r = sqrt_upper(&(w2 * &nn));
        // a zero radius only happens for an exact root; keep a positive box
        let half = if r.is_zero() {
            BigRational::new(BigInt::one(), BigInt::one() << 200u32)
        } else {
            r
        };
        out.push(IsolatedRoot {
            center: z[k].clone(),
            half,
        });
    }
    for i in 0..n {
        for j in i + 1..n {
            let sep = &out[i].half + &out[j].half;
            let dre = (&out[i].center.re - &out[j].center.re).abs();
            let dim = (&out[i].center.im - &out[j].center.im).abs();
            if dre <= sep && dim <= sep {
                return None;
            }
        }
    }
    Some(out)
}

/// Canonical ordering: by real part of the center, then imaginary part.
pub(crate) fn cmp_centers(a: &Cq, b: &Cq) -> Ordering {
    a.re.cmp(&b.re).then_with(|| a.im.cmp(&b.im))
}

/// Precision ladder; level 0 is the floating-point stage.
pub(crate) const LEVELS: usize = 6;

fn level_prec(level: usize) -> u32 {
    48 << level
}

/// Isolates all roots of a square-free integer polynomial of degree >= 1.
///
/// The result at level 0 is sorted canonically and is a deterministic function
/// of `p`. Higher levels return tighter squares in arbitrary order.
pub(crate) fn isolate(p: &ZPoly, level: usize) -> Result<Vec<IsolatedRoot>> {
    let n = p.len().checked_sub(1).filter(|&n| n >= 1).ok_or(Error::ZeroPolynomial)?;
    if n == 1 {
        let root = BigRational::new(-p[0].clone(), p[1].clone());
        return Ok(vec![IsolatedRoot {
            center: Cq::real(root),
            half: BigRational::new(BigInt::one(), BigInt::one() << (64 + level_prec(level))),
        }]);
    }
    let coeffs = coeffs_f64(p).ok_or_else(|| Error::Isolation("coefficients overflow f64".into()))?;
    let approx = aberth_f64(&coeffs);
    let mut z: Vec<Cq> = approx
        .iter()
        .map(|c| Cq::from_c64(*c).unwrap_or_else(Cq::zero))
        .collect();
    if level == 0 {
        if let Some(mut roots) = certify(p, &z) {
            roots.sort_by(|a, b| cmp_centers(&a.center, &b.center));
            return Ok(roots);
        }
    }
    for lvl in level.max(1)..LEVELS + 4 {
        // break the conjugate symmetry that traps clusters of real roots
        for (k, zk) in z.iter_mut().enumerate() {
            let mag = 1.0 + zk.to_c64().norm();
            let w = Complex64::from_polar(mag * (lvl as f64) * 1e-9, 0.7 + 1.3 * k as f64);
            if let Some(d) = Cq::from_c64(w) {
                *zk = zk.add(&d);
            }
        }
        aberth_rational(p, &mut z, level_prec(lvl));
        if let Some(mut roots) = certify(p, &z) {
            roots.sort_by(|a, b| cmp_centers(&a.center, &b.center));
            return Ok(roots);
        }
    }
    Err(Error::Isolation("roots not separated at maximum precision".into()))
}

/// Tightens a level-0 isolation to `level`, keeping the order of `roots0`:
/// the i-th returned square meets only the i-th old square, hence holds the
/// same root.
pub(crate) fn refine(p: &ZPoly, roots0: &[IsolatedRoot], level: usize) -> Result<Vec<IsolatedRoot>> {
    if level == 0 {
        return Ok(roots0.to_vec());
    }
    if roots0.len() == 1 && p.len() == 2 {
        let mut r = roots0[0].clone();
        r.half = BigRational::new(BigInt::one(), BigInt::one() << (64 + level_prec(level)));
        return Ok(vec![r]);
    }
    let old: Vec<Rect> = roots0.iter().map(|r| r.rect()).collect();
    let mut z: Vec<Cq> = roots0.iter().map(|r| r.center.clone()).collect();
    for lvl in level..level + 4 {
        aberth_rational(p, &mut z, level_prec(lvl));
        if let Some(roots) = certify(p, &z) {
            let consistent = roots.iter().enumerate().all(|(i, r)| {
                let rr = r.rect();
                old.iter().enumerate().all(|(j, o)| (i == j) == rr.intersects(o))
            });
            if consistent {
                return Ok(roots);
            }
        }
    }
    Err(Error::Isolation("refinement lost track of a root".into()))
}

/// Number of times `g` (positive degree) divides `p` over the rationals.
pub(crate) fn multiplicity(p: &ZPoly, g: &ZPoly) -> usize {
    let mut q = p.clone();
    let mut m = 0;
    while let Some((next, _)) = crate::upoly::div_exact_rational(&q, g) {
        m += 1;
        q = crate::upoly::primitive(&next);
        if q.len() < g.len() {
            break;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::upoly::trimmed;

    fn z(v: &[i64]) -> ZPoly {
        trimmed(v.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn isolates_quadratics() {
        let roots = isolate(&z(&[-2, 0, 1]), 0).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].approx().re < 0.0 && roots[1].approx().re > 0.0);
        let roots = isolate(&z(&[1, 1, 1]), 0).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].approx().im < 0.0);
    }

    #[test]
    fn close_roots_need_rational_refinement() {
        // (x - 1)(x - 1 - 2^-40) scaled to integers: roots 1e-12 apart
        let a: BigInt = BigInt::one() << 40u32;
        let p: ZPoly = vec![&a + BigInt::one(), -(&a * BigInt::from(2) + BigInt::one()), a.clone()];
        let roots = isolate(&p, 0).unwrap();
        assert_eq!(roots.len(), 2);
        let r0 = roots[0].rect();
        let r1 = roots[1].rect();
        assert!(!r0.intersects(&r1));
    }

    #[test]
    fn multiplicities_by_division() {
        // (x-1)^3 (x+2)^2 (x^2+1)
        let mut p = z(&[1]);
        for _ in 0..3 {
            p = crate::upoly::mul(&p, &z(&[-1, 1]));
        }
        for _ in 0..2 {
            p = crate::upoly::mul(&p, &z(&[2, 1]));
        }
        p = crate::upoly::mul(&p, &z(&[1, 0, 1]));
        assert_eq!(multiplicity(&p, &z(&[-1, 1])), 3);
        assert_eq!(multiplicity(&p, &z(&[2, 1])), 2);
        assert_eq!(multiplicity(&p, &z(&[1, 0, 1])), 1);
        assert_eq!(multiplicity(&p, &z(&[3, 1])), 0);
    }
}
