//! Dense univariate polynomials with integer coefficients.
//!
//! Coefficients are stored constant term first; the zero polynomial is the
//! empty vector and no representation carries a trailing zero.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type ZPoly = Vec<BigInt>;

pub fn trim(p: &mut ZPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

pub fn trimmed(mut p: ZPoly) -> ZPoly {
    trim(&mut p);
    p
}

/// Degree of a nonzero polynomial; `None` for zero.
pub fn degree(p: &[BigInt]) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub fn constant(c: BigInt) -> ZPoly {
    trimmed(vec![c])
}

pub fn add(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_default();
        let y = b.get(i).cloned().unwrap_or_default();
        out.push(x + y);
    }
    trimmed(out)
}

pub fn sub(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_default();
        let y = b.get(i).cloned().unwrap_or_default();
        out.push(x - y);
    }
    trimmed(out)
}

pub fn neg(a: &[BigInt]) -> ZPoly {
    a.iter().map(|c| -c).collect()
}

pub fn mul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trimmed(out)
}

pub fn scale(a: &[BigInt], c: &BigInt) -> ZPoly {
    if c.is_zero() {
        return Vec::new();
    }
    a.iter().map(|x| x * c).collect()
}

pub fn pow(a: &[BigInt], e: u32) -> ZPoly {
    let mut acc = vec![BigInt::one()];
    let mut base = a.to_vec();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base);
        }
    }
    acc
}

/// Monomial `c * x^k`.
pub fn monomial(c: BigInt, k: usize) -> ZPoly {
    if c.is_zero() {
        return Vec::new();
    }
    let mut v = vec![BigInt::zero(); k + 1];
    v[k] = c;
    v
}

pub fn content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Divides out the content and makes the leading coefficient positive.
pub fn primitive(a: &[BigInt]) -> ZPoly {
    if a.is_empty() {
        return Vec::new();
    }
    let mut g = content(a);
    if a.last().unwrap().is_negative() {
        g = -g;
    }
    a.iter().map(|c| c / &g).collect()
}

pub fn derivative(a: &[BigInt]) -> ZPoly {
    trimmed(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect(),
    )
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b`.
pub fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let db = degree(b).expect("pseudo_rem by zero");
    let lb = b[db].clone();
    let mut r = a.to_vec();
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= c * &lr;
        }
        trim(&mut r);
    }
    r
}

/// Primitive gcd over `Z[x]` (equivalently over `Q[x]` up to units).
pub fn gcd(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let mut x = primitive(a);
    let mut y = primitive(b);
    if x.is_empty() {
        return y;
    }
    if y.is_empty() {
        return x;
    }
    if x.len() < y.len() {
        core::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = pseudo_rem(&x, &y);
        x = y;
        y = primitive(&r);
    }
    x
}

/// Exact quotient `a / b` over `Q[x]`, returned with a rational scaling:
/// `a = b * q / d` where `q` is integral. Returns `None` if `b` does not divide
/// `a` over the rationals.
pub fn div_exact_rational(a: &[BigInt], b: &[BigInt]) -> Option<(ZPoly, BigInt)> {
    let db = degree(b).expect("division by zero polynomial");
    let Some(da) = degree(a) else {
        return Some((Vec::new(), BigInt::one()));
    };
    if da < db {
        return None;
    }
    let lb = b[db].clone();
    // Work with scaled remainder: lb^(k) * a to stay integral.
    let steps = da - db + 1;
    let mult = num_traits::pow(lb.clone(), steps);
    let mut r: ZPoly = a.iter().map(|c| c * &mult).collect();
    let mut q = vec![BigInt::zero(); steps];
    for k in (0..steps).rev() {
        let coef = r[k + db].clone();
        if coef.is_zero() {
            continue;
        }
        debug_assert!((&coef % &lb).is_zero());
        let qc = &coef / &lb;
        for (i, c) in b.iter().enumerate() {
            r[i + k] -= c * &qc;
        }
        q[k] = qc;
    }
    trim(&mut r);
    if !r.is_empty() {
        return None;
    }
    Some((trimmed(q), mult))
}

/// Exact division in `Z[x]` when `b` divides `a` with integral quotient.
pub fn div_exact(a: &[BigInt], b: &[BigInt]) -> Option<ZPoly> {
    let (q, d) = div_exact_rational(a, b)?;
    let mut out = Vec::with_capacity(q.len());
    for c in q {
        let (qq, rr) = c.div_rem(&d);
        if !rr.is_zero() {
            return None;
        }
        out.push(qq);
    }
    Some(out)
}

/// Square-free part, primitive.
pub fn squarefree(a: &[BigInt]) -> ZPoly {
    let d = derivative(a);
    if d.is_empty() {
        return primitive(a);
    }
    let g = gcd(a, &d);
    if degree(&g) == Some(0) {
        return primitive(a);
    }
    let (q, _) = div_exact_rational(a, &g).expect("gcd divides");
    primitive(&q)
}

pub fn eval_rational(a: &[BigInt], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in a.iter().rev() {
        acc = acc * x + BigRational::from_integer(c.clone());
    }
    acc
}

/// `a(-x)`.
pub fn reflect(a: &[BigInt]) -> ZPoly {
    a.iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
        .collect()
}

/// `x^deg a * a(1/x)`.
pub fn reverse(a: &[BigInt]) -> ZPoly {
    let mut r: ZPoly = a.iter().rev().cloned().collect();
    trim(&mut r);
    r
}

/// Integer polynomial proportional to `a(x - r)` for rational `r`.
pub fn shift(a: &[BigInt], r: &BigRational) -> ZPoly {
    // a(x - p/q) * q^d = sum c_i (q x - p)^i q^(d-i)
    let Some(d) = degree(a) else {
        return Vec::new();
    };
    let p = r.numer().clone();
    let q = r.denom().clone();
    let lin = vec![-p, q.clone()];
    let mut out = Vec::new();
    for (i, c) in a.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = scale(&pow(&lin, i as u32), &(c * num_traits::pow(q.clone(), d - i)));
        out = add(&out, &term);
    }
    primitive(&out)
}

/// Integer polynomial proportional to `a(x / r)` for nonzero rational `r`.
pub fn dilate(a: &[BigInt], r: &BigRational) -> ZPoly {
    // a(x q / p) * p^d = sum c_i q^i p^(d-i) x^i
    let Some(d) = degree(a) else {
        return Vec::new();
    };
    let p = r.numer().clone();
    let q = r.denom().clone();
    let out: ZPoly = a
        .iter()
        .enumerate()
        .map(|(i, c)| c * num_traits::pow(q.clone(), i) * num_traits::pow(p.clone(), d - i))
        .collect();
    primitive(&out)
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(piv) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, piv);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Resultant of two nonzero integer polynomials via the Sylvester matrix.
pub fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let da = degree(a).expect("resultant of zero polynomial");
    let db = degree(b).expect("resultant of zero polynomial");
    if da == 0 {
        return num_traits::pow(a[0].clone(), db);
    }
    if db == 0 {
        return num_traits::pow(b[0].clone(), da);
    }
    let n = da + db;
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for row in 0..db {
        for (i, c) in a.iter().rev().enumerate() {
            m[row][row + i] = c.clone();
        }
    }
    for row in 0..da {
        for (i, c) in b.iter().rev().enumerate() {
            m[db + row][row + i] = c.clone();
        }
    }
    det_bareiss(m)
}

/// Interpolates the unique polynomial of degree `< xs.len()` through the
/// integer nodes `(xs[i], ys[i])`, over the rationals, then scales it to a
/// primitive integer polynomial (sign normalized).
pub fn interpolate_primitive(xs: &[BigInt], ys: &[BigInt]) -> ZPoly {
    // Newton divided differences over Q.
    let n = xs.len();
    let mut coef: Vec<BigRational> = ys.iter().map(|y| BigRational::from_integer(y.clone())).collect();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = &coef[i] - &coef[i - 1];
            let den = BigRational::from_integer(&xs[i] - &xs[i - j]);
            coef[i] = num / den;
        }
    }
    // Expand Newton form.
    let mut acc: Vec<BigRational> = Vec::new();
    for i in (0..n).rev() {
        // acc = acc * (x - xs[i]) + coef[i]
        let mut next = vec![BigRational::zero(); acc.len() + 1];
        for (k, c) in acc.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * BigRational::from_integer(xs[i].clone());
        }
        next[0] += &coef[i];
        acc = next;
    }
    rational_to_primitive(&acc)
}

/// Clears denominators and returns the primitive integer associate.
pub fn rational_to_primitive(p: &[BigRational]) -> ZPoly {
    let l = p.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let v: ZPoly = p.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
    primitive(&trimmed(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> ZPoly {
        trimmed(v.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn gcd_of_difference_of_squares() {
        // (x^2 - 1, x - 1) -> x - 1
        assert_eq!(gcd(&z(&[-1, 0, 1]), &z(&[-1, 1])), z(&[-1, 1]));
        assert_eq!(gcd(&z(&[1, 0, 1]), &z(&[-1, 1])), z(&[1]));
    }

    #[test]
    fn resultant_detects_common_root() {
        assert!(resultant(&z(&[-2, 0, 1]), &z(&[2, 0, -1])).is_zero());
        // Res(x^2 - 2, x - 1) = 1 - 2 = -1
        assert_eq!(resultant(&z(&[-2, 0, 1]), &z(&[-1, 1])), BigInt::from(-1));
    }

    #[test]
    fn squarefree_removes_repeated_factor() {
        // (x-1)^2 (x+2)
        let p = mul(&mul(&z(&[-1, 1]), &z(&[-1, 1])), &z(&[2, 1]));
        assert_eq!(squarefree(&p), mul(&z(&[-1, 1]), &z(&[2, 1])));
    }

    #[test]
    fn interpolation_recovers_cubic() {
        let p = z(&[3, -1, 0, 2]);
        let xs: Vec<BigInt> = (0..4).map(BigInt::from).collect();
        let ys: Vec<BigInt> = xs
            .iter()
            .map(|x| eval_rational(&p, &BigRational::from_integer(x.clone())).to_integer())
            .collect();
        assert_eq!(interpolate_primitive(&xs, &ys), p);
    }

    #[test]
    fn exact_division() {
        let p = mul(&z(&[1, 1]), &z(&[-3, 0, 2]));
        assert_eq!(div_exact(&p, &z(&[1, 1])), Some(z(&[-3, 0, 2])));
        assert_eq!(div_exact(&p, &z(&[2, 1])), None);
    }
}
