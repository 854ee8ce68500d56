//! Dense univariate polynomials over the rationals, constant term first.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::isolate::Rect;
use crate::upoly::ZPoly;

pub(crate) type QPoly = Vec<BigRational>;

pub(crate) fn trim(p: &mut QPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub(crate) fn to_z(p: &[BigRational]) -> ZPoly {
    crate::upoly::rational_to_primitive(p)
}

pub(crate) fn add(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut c = a.get(i).cloned().unwrap_or_else(BigRational::zero);
        if let Some(d) = b.get(i) {
            c += d;
        }
        out.push(c);
    }
    trim(&mut out);
    out
}

pub(crate) fn neg(a: &[BigRational]) -> QPoly {
    a.iter().map(|c| -c).collect()
}

pub(crate) fn sub(a: &[BigRational], b: &[BigRational]) -> QPoly {
    add(a, &neg(b))
}

pub(crate) fn scale(a: &[BigRational], s: &BigRational) -> QPoly {
    if s.is_zero() {
        return Vec::new();
    }
    a.iter().map(|c| c * s).collect()
}

pub(crate) fn mul(a: &[BigRational], b: &[BigRational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

/// Quotient and remainder; `b` nonzero.
pub(crate) fn divrem(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
    let db = b.len() - 1;
    let mut r: QPoly = a.to_vec();
    trim(&mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let inv = b[db].recip();
    let mut q = vec![BigRational::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = &r[k + db] * &inv;
        if c.is_zero() {
            continue;
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + k] -= &c * bc;
        }
        q[k] = c;
    }
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

pub(crate) fn rem(a: &[BigRational], b: &[BigRational]) -> QPoly {
    divrem(a, b).1
}

/// Inverse of `a` modulo `m`, if they are coprime.
pub(crate) fn inv_mod(a: &[BigRational], m: &[BigRational]) -> Option<QPoly> {
    // extended Euclid tracking the cofactor of `a`
    let mut r0: QPoly = m.to_vec();
    let mut r1: QPoly = rem(a, m);
    let mut s0: QPoly = Vec::new();
    let mut s1: QPoly = vec![BigRational::one()];
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1);
        let s = sub(&s0, &mul(&q, &s1));
        r0 = core::mem::replace(&mut r1, r);
        s0 = core::mem::replace(&mut s1, s);
    }
    if r0.len() != 1 {
        return None;
    }
    let c = r0[0].recip();
    Some(rem(&scale(&s0, &c), m))
}

/// `c(g) mod m` by Horner.
pub(crate) fn compose_mod(c: &[BigRational], g: &[BigRational], m: &[BigRational]) -> QPoly {
    let mut acc: QPoly = Vec::new();
    for coef in c.iter().rev() {
        acc = rem(&mul(&acc, g), m);
        acc = add(&acc, core::slice::from_ref(coef));
    }
    acc
}

pub(crate) fn eval_rect(c: &[BigRational], z: &Rect) -> Rect {
    let zero = BigRational::zero();
    let mut acc = Rect {
        re: (zero.clone(), zero.clone()),
        im: (zero.clone(), zero),
    };
    for coef in c.iter().rev() {
        acc = acc.mul(z);
        acc.re.0 += coef;
        acc.re.1 += coef;
    }
    acc
}

/// Solves the square system `m x = b` over the rationals; `None` if singular.
pub(crate) fn solve(mut m: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        b.swap(col, piv);
        let inv = m[col][col].recip();
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] * &inv;
            for k in col..n {
                let v = &f * &m[col][k];
                m[r][k] -= v;
            }
            let v = &f * &b[col];
            b[r] -= v;
        }
    }
    Some((0..n).map(|i| &b[i] / &m[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(v: &[i64]) -> QPoly {
        v.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect()
    }

    #[test]
    fn inverse_modulo_irreducible() {
        // (1 + x) * inv == 1 mod x^2 - 2
        let m = q(&[-2, 0, 1]);
        let a = q(&[1, 1]);
        let inv = inv_mod(&a, &m).unwrap();
        assert_eq!(rem(&mul(&a, &inv), &m), q(&[1]));
    }

    #[test]
    fn linear_solve() {
        let m = vec![q(&[2, 1]), q(&[1, 3])];
        let x = solve(m, q(&[3, 5])).unwrap();
        assert_eq!(x, vec![BigRational::new(4.into(), 5.into()), BigRational::new(7.into(), 5.into())]);
    }
}
