//! Univariate polynomials with algebraic coefficients, and their roots.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::algebraic::AlgebraicScalar;
use super::field::{self, Extension, NumberField};
use super::isolate::{isolate, multiplicity, refine, Rect, LEVELS};
use super::qpoly;
use crate::error::{Error, Result};
use crate::upoly;

pub type KPoly = Vec<AlgebraicScalar>;

pub(crate) fn trim(p: &mut KPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub(crate) fn add(a: &[AlgebraicScalar], b: &[AlgebraicScalar]) -> KPoly {
    let n = a.len().max(b.len());
    let mut out: KPoly = (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => unreachable!(),
        })
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn mul(a: &[AlgebraicScalar], b: &[AlgebraicScalar]) -> KPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![AlgebraicScalar::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim(&mut out);
    out
}

pub(crate) fn divrem(a: &[AlgebraicScalar], b: &[AlgebraicScalar]) -> (KPoly, KPoly) {
    let db = b.len() - 1;
    let mut r: KPoly = a.to_vec();
    trim(&mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let inv = b[db].inv();
    let mut q = vec![AlgebraicScalar::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = &r[k + db] * &inv;
        if c.is_zero() {
            continue;
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + k] = &r[i + k] - &(&c * bc);
        }
        q[k] = c;
    }
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

pub(crate) fn monic(a: &[AlgebraicScalar]) -> KPoly {
    match a.last() {
        None => Vec::new(),
        Some(lc) => {
            let inv = lc.inv();
            a.iter().map(|c| c * &inv).collect()
        }
    }
}

/// Monic greatest common divisor.
pub(crate) fn gcd(a: &[AlgebraicScalar], b: &[AlgebraicScalar]) -> KPoly {
    let mut x: KPoly = a.to_vec();
    let mut y: KPoly = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = divrem(&x, &y).1;
        x = core::mem::replace(&mut y, r);
    }
    monic(&x)
}

pub(crate) fn derivative(a: &[AlgebraicScalar]) -> KPoly {
    let mut out: KPoly = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * &AlgebraicScalar::from_int(i as i64))
        .collect();
    trim(&mut out);
    out
}

pub fn eval(a: &[AlgebraicScalar], x: &AlgebraicScalar) -> AlgebraicScalar {
    let mut acc = AlgebraicScalar::zero();
    for c in a.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

/// Square-free decomposition by Yun's algorithm: pairs `(g_i, i)` with
/// `p = lc * prod g_i^i`, each `g_i` monic and square-free.
pub(crate) fn yun(p: &[AlgebraicScalar]) -> Vec<(KPoly, usize)> {
    let dp = derivative(p);
    let mut c = gcd(p, &dp);
    let mut w = divrem(p, &c).0;
    let mut out = Vec::new();
    let mut i = 1;
    while w.len() > 1 {
        let y = gcd(&w, &c);
        let z = divrem(&w, &y).0;
        if z.len() > 1 {
            out.push((monic(&z), i));
        }
        c = divrem(&c, &y).0;
        w = y;
        i += 1;
    }
    out
}

fn eval_rect(coeffs: &[Rect], z: &Rect) -> Rect {
    let mut acc = Rect::point(&super::isolate::Cq::zero());
    for c in coeffs.iter().rev() {
        acc = acc.mul(z).add(c);
    }
    acc
}

fn realize(field: Option<&alloc::sync::Arc<NumberField>>, ext: Extension) -> Result<AlgebraicScalar> {
    Ok(match ext {
        Extension::Rational(r) => AlgebraicScalar::from_rational(r),
        Extension::Same(c) => AlgebraicScalar::in_field(field.expect("same field needs a field"), c),
        Extension::New {
            minpoly,
            index,
            alpha,
            z,
        } => {
            let parents = match field {
                Some(f) => vec![(f.clone(), alpha)],
                None => Vec::new(),
            };
            let h = NumberField::new(minpoly, index, parents)?;
            AlgebraicScalar::in_field(&h, z)
        }
    })
}

/// All roots of `p` with their multiplicities, distinct roots sorted by the
/// canonical order (real part, then imaginary part).
pub fn roots_with_multiplicity(p: &[AlgebraicScalar]) -> Result<Vec<(AlgebraicScalar, usize)>> {
    let mut p: KPoly = p.to_vec();
    trim(&mut p);
    if p.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    let p = AlgebraicScalar::unify(&p)?;
    let field = p.iter().find_map(|c| c.field()).cloned();
    let mut out = Vec::new();
    match &field {
        None => {
            let q: Vec<BigRational> = p.iter().map(|c| c.as_rational().cloned().expect("rational")).collect();
            let pz = qpoly::to_z(&q);
            if pz.len() < 2 {
                return Ok(out);
            }
            let sq = upoly::squarefree(&pz);
            let roots0 = isolate(&sq, 0)?;
            let sqs: KPoly = sq.iter().map(|c| AlgebraicScalar::from_bigint(c.clone())).collect();
            for i in 0..roots0.len() {
                let mut z_rect = |level: usize| Ok(refine(&sq, &roots0, level)?[i].rect());
                let root = realize(None, field::extend(None, &sqs, &mut z_rect)?)?;
                let m = multiplicity(&pz, &root.minpoly());
                out.push((root, m));
            }
        }
        Some(f) => {
            for (g, mult) in yun(&p) {
                if g.len() == 2 {
                    out.push((-&g[0], mult));
                    continue;
                }
                let coords: Vec<qpoly::QPoly> = g.iter().map(|c| c.coords_in(f).expect("unified")).collect();
                let norm = upoly::squarefree(&field::norm_shift(&upoly::primitive(&f.minpoly), &coords, 0));
                let roots0 = isolate(&norm, 0)?;
                let deg = g.len() - 1;
                let mut chosen = None;
                for level in 0..LEVELS + 2 {
                    let rects = refine(&norm, &roots0, level)?;
                    let cr: Vec<Rect> = g.iter().map(|c| c.enclosure(level)).collect::<Result<_>>()?;
                    let hits: Vec<usize> = (0..rects.len()).filter(|&j| eval_rect(&cr, &rects[j].rect()).contains_zero()).collect();
                    if hits.len() < deg {
                        return Err(Error::Consistency("fewer roots than the degree".into()));
                    }
                    if hits.len() == deg {
                        chosen = Some(hits);
                        break;
                    }
                }
                let hits = chosen.ok_or_else(|| Error::Isolation("roots of conjugate polynomials not separated".into()))?;
                for j in hits {
                    let mut z_rect = |level: usize| Ok(refine(&norm, &roots0, level)?[j].rect());
                    let root = realize(Some(f), field::extend(Some(f), &g, &mut z_rect)?)?;
                    out.push((root, mult));
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp_canonical(&b.0));
    Ok(out)
}

/// Roots as a multiset: each root repeated by its multiplicity.
pub fn roots_univariate(p: &[AlgebraicScalar]) -> Result<Vec<AlgebraicScalar>> {
    let mut out = Vec::new();
    for (r, m) in roots_with_multiplicity(p)? {
        for _ in 0..m {
            out.push(r.clone());
        }
    }
    Ok(out)
}

/// Integer polynomial as algebraic coefficients.
pub fn from_ints(v: &[i64]) -> KPoly {
    v.iter().map(|&c| AlgebraicScalar::from_bigint(BigInt::from(c))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radicals_and_linear() {
        let r = roots_univariate(&from_ints(&[-2, 0, 1])).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(&r[0] + &r[1], AlgebraicScalar::zero());
        assert_eq!(&r[0] * &r[0], AlgebraicScalar::from_int(2));
        assert!(r[0].approx().re < 0.0);
        assert_eq!(roots_univariate(&from_ints(&[-1, 1])).unwrap(), vec![AlgebraicScalar::one()]);
    }

    #[test]
    fn cube_roots_of_unity_resubstitute() {
        let p = from_ints(&[1, 1, 1]);
        let r = roots_univariate(&p).unwrap();
        assert_eq!(r.len(), 2);
        for z in &r {
            assert!(eval(&p, z).is_zero());
        }
        assert_eq!(&r[0] * &r[1], AlgebraicScalar::one());
    }

    #[test]
    fn roots_of_x2_plus_1_multiply_to_one() {
        let r = roots_univariate(&from_ints(&[1, 0, 1])).unwrap();
        assert_eq!(&r[0] * &r[1], AlgebraicScalar::one());
    }

    #[test]
    fn double_root() {
        let r = roots_with_multiplicity(&from_ints(&[1, 2, 1])).unwrap();
        assert_eq!(r, vec![(AlgebraicScalar::from_int(-1), 2)]);
    }

    #[test]
    fn reducible_rational_polynomial() {
        // (x^2 - 2)(x - 3)^2
        let p = mul(&mul(&from_ints(&[-2, 0, 1]), &from_ints(&[-3, 1])), &from_ints(&[-3, 1]));
        let r = roots_with_multiplicity(&p).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r[2], (AlgebraicScalar::from_int(3), 2));
        assert_eq!(r.iter().map(|x| x.1).sum::<usize>(), 4);
    }

    #[test]
    fn algebraic_coefficients() {
        let s2 = roots_univariate(&from_ints(&[-2, 0, 1])).unwrap()[1].clone();
        // x^2 - sqrt2: roots are the real and imaginary fourth roots of 2
        let p = vec![-&s2, AlgebraicScalar::zero(), AlgebraicScalar::one()];
        let r = roots_univariate(&p).unwrap();
        assert_eq!(r.len(), 2);
        for z in &r {
            assert!(eval(&p, z).is_zero());
            assert_eq!(z.minpoly(), vec![-2, 0, 0, 0, 1].into_iter().map(BigInt::from).collect::<Vec<_>>());
        }
        // x - sqrt2 times x + sqrt2, expanded over the field
        let q = mul(&[-&s2, AlgebraicScalar::one()], &[s2.clone(), AlgebraicScalar::one()]);
        let rq = roots_univariate(&q).unwrap();
        assert_eq!(rq[1], s2);
    }
}
