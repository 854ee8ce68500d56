//! Laurent difference polynomials `sum c_u x^u(sigma)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::hahn::HahnSeries;
use crate::residue::AlgebraicScalar;
use crate::rho::RhoRational;

/// Coefficient rings of difference polynomials: the Hahn field and its
/// residue field.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Residue-field constants have valuation 0.
    fn valuation(&self) -> Result<RhoRational>;
    /// Prints as a factor without parentheses.
    fn is_atomic(&self) -> bool;
    /// `Some(-c)` when `c` prints as a negated atom.
    fn strip_sign(&self) -> Option<Self>;
}

impl Coefficient for HahnSeries {
    fn zero() -> Self {
        HahnSeries::zero()
    }
    fn one() -> Self {
        HahnSeries::one()
    }
    fn from_int(v: i64) -> Self {
        HahnSeries::from_int(v)
    }
    fn is_zero(&self) -> bool {
        HahnSeries::is_zero(self)
    }
    fn is_one(&self) -> bool {
        *self == HahnSeries::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn valuation(&self) -> Result<RhoRational> {
        self.valuation()?.finite().cloned().ok_or(Error::DivisionByZero)
    }
    fn is_atomic(&self) -> bool {
        self.is_exact() && self.terms().len() == 1 && self.terms()[0].1.is_rational()
    }
    fn strip_sign(&self) -> Option<Self> {
        if !self.is_atomic() {
            return None;
        }
        let c = self.terms()[0].1.as_rational()?;
        if c.is_negative() {
            Some(-self)
        } else {
            None
        }
    }
}

impl Coefficient for AlgebraicScalar {
    fn zero() -> Self {
        AlgebraicScalar::zero()
    }
    fn one() -> Self {
        AlgebraicScalar::one()
    }
    fn from_int(v: i64) -> Self {
        AlgebraicScalar::from_int(v)
    }
    fn is_zero(&self) -> bool {
        AlgebraicScalar::is_zero(self)
    }
    fn is_one(&self) -> bool {
        AlgebraicScalar::is_one(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn valuation(&self) -> Result<RhoRational> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RhoRational::zero())
    }
    fn is_atomic(&self) -> bool {
        self.is_rational()
    }
    fn strip_sign(&self) -> Option<Self> {
        match self.as_rational() {
            Some(r) if r.is_negative() => Some(-self),
            _ => None,
        }
    }
}

/// A sigma-power `sum_j a_j sigma^j` of one variable, `a[j]` dense with
/// trailing zeros trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SigmaExponent(Vec<i64>);

impl SigmaExponent {
    pub fn new(mut a: Vec<i64>) -> SigmaExponent {
        while a.last() == Some(&0) {
            a.pop();
        }
        SigmaExponent(a)
    }

    pub fn zero() -> SigmaExponent {
        SigmaExponent(Vec::new())
    }

    /// `k sigma^j`.
    pub fn single(j: usize, k: i64) -> SigmaExponent {
        let mut a = vec![0; j + 1];
        a[j] = k;
        SigmaExponent::new(a)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn get(&self, j: usize) -> i64 {
        self.0.get(j).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Highest sigma-order present plus one.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &SigmaExponent) -> SigmaExponent {
        let n = self.len().max(o.len());
        SigmaExponent::new((0..n).map(|j| self.get(j) + o.get(j)).collect())
    }

    pub fn sub(&self, o: &SigmaExponent) -> SigmaExponent {
        self.add(&o.scale(-1))
    }

    pub fn scale(&self, k: i64) -> SigmaExponent {
        SigmaExponent::new(self.0.iter().map(|a| a * k).collect())
    }

    /// `u(rho)`.
    pub fn eval(&self) -> RhoRational {
        RhoRational::from_int_poly(&self.0)
    }

    /// `u(1)`: the ordinary degree once sigma acts trivially.
    pub fn collapse(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Entries all nonnegative.
    pub fn is_polynomial(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }
}

/// Exponent vector of a monomial, one sigma-power per variable.
pub type Monomial = Vec<SigmaExponent>;

/// `(j_0, ..., j_m)`, the exponents of `x, sigma(x), ..., sigma^m(x)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn length(&self) -> usize {
        self.0.iter().sum()
    }

    /// `|J|_rho = sum rho^i j_i`.
    pub fn rho_length(&self) -> RhoRational {
        let c: Vec<i64> = self.0.iter().map(|&j| j as i64).collect();
        RhoRational::from_int_poly(&c)
    }

    /// All `J <= bound` componentwise with `|J| >= 1`.
    pub fn all_below(bound: &[usize]) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0usize; bound.len()];
        loop {
            let mut k = 0;
            while k < bound.len() && cur[k] == bound[k] {
                cur[k] = 0;
                k += 1;
            }
            if k == bound.len() {
                break;
            }
            cur[k] += 1;
            out.push(MultiIndex(cur.clone()));
        }
        out.sort_by(|a, b| a.length().cmp(&b.length()).then_with(|| a.cmp(b)));
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiffPolynomial<C> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

pub type KDiffPoly = DiffPolynomial<HahnSeries>;
pub type ResidueDiffPoly = DiffPolynomial<AlgebraicScalar>;

fn pad(mut u: Monomial, n: usize) -> Monomial {
    u.resize(n, SigmaExponent::zero());
    u
}

impl<C: Coefficient> DiffPolynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        DiffPolynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::from_terms(nvars, vec![(vec![SigmaExponent::zero(); nvars], c)])
    }

    /// Sums like terms and drops zero coefficients.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut out = Self::zero(nvars);
        for (u, c) in terms {
            out.add_term(pad(u, nvars), c);
        }
        out
    }

    /// The single-variable monomial `c x_i^u`.
    pub fn monomial(nvars: usize, i: usize, u: SigmaExponent, c: C) -> Self {
        let mut m = vec![SigmaExponent::zero(); nvars];
        m[i] = u;
        Self::from_terms(nvars, vec![(m, c)])
    }

    /// `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, i, SigmaExponent::single(0, 1), C::one())
    }

    fn add_term(&mut self, u: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&u) {
            Some(d) => {
                let s = d.add(&c);
                if s.is_zero() {
                    self.terms.remove(&u);
                } else {
                    *d = s;
                }
            }
            None => {
                self.terms.insert(u, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, u: &[SigmaExponent]) -> Option<&C> {
        self.terms.get(u)
    }

    pub fn exponents(&self) -> Vec<Monomial> {
        self.terms.keys().cloned().collect()
    }

    /// Largest sigma-order over all variables plus one.
    pub fn sigma_len(&self) -> usize {
        self.terms.keys().flat_map(|u| u.iter().map(|e| e.len())).max().unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (u, c) in &o.terms {
            out.add_term(u.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        DiffPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(u, c)| (u.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &C) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(u, c)| (u.clone(), c.mul(s))))
    }

    /// Product; exponent keys add.
    pub fn multiply(&self, o: &Self) -> Result<Self> {
        if self.nvars != o.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: o.nvars,
            });
        }
        let mut out = Self::zero(self.nvars);
        for (u, c) in &self.terms {
            for (v, d) in &o.terms {
                let w: Monomial = u.iter().zip(v).map(|(a, b)| a.add(b)).collect();
                out.add_term(w, c.mul(d));
            }
        }
        Ok(out)
    }

    /// Multiplies by the monomial `x^shift`.
    pub fn shift(&self, shift: &[SigmaExponent]) -> Self {
        DiffPolynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(u, c)| (u.iter().zip(shift).map(|(a, b)| a.add(b)).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> DiffPolynomial<D> {
        DiffPolynomial::from_terms(self.nvars, self.terms.iter().map(|(u, c)| (u.clone(), f(c))))
    }

    /// `min_u v(c_u) + u(rho) . w` and the exponents attaining it.
    pub fn tropicalize(&self, w: &[RhoRational]) -> Result<(RhoRational, Vec<Monomial>)> {
        if w.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: w.len(),
            });
        }
        let mut best: Option<RhoRational> = None;
        let mut att = Vec::new();
        for (u, c) in &self.terms {
            let val = tropical_term(u, &c.valuation()?, w);
            match &best {
                Some(b) if val > *b => {}
                Some(b) if val == *b => att.push(u.clone()),
                _ => {
                    best = Some(val);
                    att = vec![u.clone()];
                }
            }
        }
        best.map(|b| (b, att)).ok_or(Error::EmptyPolynomial)
    }

    /// `g = f x^shift` with all sigma-powers nonnegative and the shift
    /// componentwise minimal.
    pub fn laurent_normalize(&self) -> (Self, Monomial) {
        let mut shift = vec![SigmaExponent::zero(); self.nvars];
        for u in self.terms.keys() {
            for (i, e) in u.iter().enumerate() {
                let n = shift[i].len().max(e.len());
                shift[i] = SigmaExponent::new((0..n).map(|j| shift[i].get(j).max(-e.get(j))).collect());
            }
        }
        (self.shift(&shift), shift)
    }

    /// Substitution `x_i -> x_i x_n^(l^i)` for `i < n` (1-based), `x_n` fixed.
    pub fn apply_phi_l(&self, l: u64) -> Self {
        let n = self.nvars;
        if n < 2 {
            return self.clone();
        }
        Self::from_terms(
            n,
            self.terms.iter().map(|(u, c)| {
                let mut v = u.clone();
                let mut last = u[n - 1].clone();
                for (i, e) in u.iter().enumerate().take(n - 1) {
                    last = last.add(&e.scale((l as i64).pow(i as u32 + 1)));
                }
                v[n - 1] = last;
                (v, c.clone())
            }),
        )
    }

    /// True when the images of all monomials under `phi_l` carry pairwise
    /// distinct sigma-powers of the last variable.
    pub fn phi_l_distinct(&self, l: u64) -> bool {
        if self.nvars < 2 {
            return true;
        }
        let n = self.nvars;
        let mut seen: Vec<SigmaExponent> = self
            .terms
            .keys()
            .map(|u| {
                let mut last = u[n - 1].clone();
                for (i, e) in u.iter().enumerate().take(n - 1) {
                    last = last.add(&e.scale((l as i64).pow(i as u32 + 1)));
                }
                last
            })
            .collect();
        let k = seen.len();
        seen.sort();
        seen.dedup();
        seen.len() == k
    }

    /// Smallest `l >= 1` passing [`Self::phi_l_distinct`], searched up to a
    /// Cauchy bound that guarantees success.
    pub fn choose_l(&self) -> u64 {
        let bound = self.cauchy_l_bound();
        (1..=bound).find(|&l| self.phi_l_distinct(l)).unwrap_or(bound)
    }

    fn cauchy_l_bound(&self) -> u64 {
        let n = self.nvars;
        if n < 2 {
            return 1;
        }
        let keys: Vec<&Monomial> = self.terms.keys().collect();
        let orders = self.sigma_len();
        let mut bound: u64 = 1;
        for a in 0..keys.len() {
            for b in a + 1..keys.len() {
                // per sigma-degree j: d_j(l) = du_n[j] + sum_i l^(i+1) du_i[j]
                let mut pair: Option<u64> = None;
                for j in 0..orders {
                    let mut c: Vec<i64> = vec![keys[a][n - 1].get(j) - keys[b][n - 1].get(j)];
                    for i in 0..n - 1 {
                        c.push(keys[a][i].get(j) - keys[b][i].get(j));
                    }
                    while c.last() == Some(&0) {
                        c.pop();
                    }
                    let Some(&top) = c.last() else { continue };
                    let m = c.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
                    let cb = 2 + m / top.unsigned_abs();
                    pair = Some(pair.map_or(cb, |p| p.min(cb)));
                }
                bound = bound.max(pair.unwrap_or(1));
            }
        }
        bound
    }

    /// Monomials listed graded by total collapsed degree, then lexicographically.
    pub fn display_order(&self) -> Vec<(&Monomial, &C)> {
        let mut v: Vec<(&Monomial, &C)> = self.terms.iter().collect();
        v.sort_by(|a, b| {
            let da: i64 = a.0.iter().map(|e| e.collapse()).sum();
            let db: i64 = b.0.iter().map(|e| e.collapse()).sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        v
    }
}

pub(crate) fn tropical_term(u: &[SigmaExponent], vc: &RhoRational, w: &[RhoRational]) -> RhoRational {
    let mut val = vc.clone();
    for (e, wi) in u.iter().zip(w) {
        if !e.is_zero() {
            val = &val + &(&e.eval() * wi);
        }
    }
    val
}

/// `u(rho)` per variable.
pub fn eval_exponent(u: &[SigmaExponent]) -> Vec<RhoRational> {
    u.iter().map(|e| e.eval()).collect()
}

/// `sigma^j(x)^a` known below `bound`.
fn sigma_power(x: &HahnSeries, j: usize, a: i64, bound: Option<&RhoRational>) -> Result<HahnSeries> {
    let s = x.apply_sigma_pow(j);
    if a >= 0 {
        return Ok(s.pow_trunc(a as u32, bound));
    }
    let k = a.unsigned_abs() as u32;
    let v = match s.valuation()? {
        crate::rho::Extended::Finite(v) => v,
        crate::rho::Extended::Infinity => return Err(Error::DivisionByZero),
    };
    let inv_target = match bound {
        Some(b) => b - &(&(-&v) * &RhoRational::from_int(k as i64 - 1)),
        None => {
            if !(s.is_exact() && s.terms().len() == 1) {
                return Err(Error::Precondition(
                    "exact evaluation of a negative power needs a monomial coordinate".into(),
                ));
            }
            -&v + RhoRational::one()
        }
    };
    let inv = s.invert(&inv_target)?;
    Ok(inv.pow_trunc(k, bound))
}

impl DiffPolynomial<AlgebraicScalar> {
    /// Evaluation in the residue field with trivial automorphism: each
    /// `x^u(sigma)` collapses to `x^u(1)`.
    pub fn eval_collapsed(&self, point: &[AlgebraicScalar]) -> Result<AlgebraicScalar> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let mut acc = AlgebraicScalar::zero();
        for (u, c) in &self.terms {
            let mut m = c.clone();
            for (e, x) in u.iter().zip(point) {
                let k = e.collapse();
                if k < 0 && x.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                m = &m * &x.pow(k);
            }
            acc = &acc + &m;
        }
        Ok(acc)
    }
}

impl DiffPolynomial<HahnSeries> {
    /// `f(point)`; with a target every factor is carried just far enough for
    /// the result to be known below it, without one the evaluation is exact.
    pub fn evaluate(&self, point: &[HahnSeries], target: Option<&RhoRational>) -> Result<HahnSeries> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let mut acc = HahnSeries::zero();
        for (u, c) in &self.terms {
            acc = &acc + &self.eval_monomial(u, c, point, target)?;
        }
        Ok(match target {
            Some(t) => acc.truncate(t),
            None => acc,
        })
    }

    fn eval_monomial(&self, u: &[SigmaExponent], c: &HahnSeries, point: &[HahnSeries], target: Option<&RhoRational>) -> Result<HahnSeries> {
        // factors and lower bounds of their valuations
        let mut factors: Vec<(usize, usize, i64)> = Vec::new();
        let mut vals: Vec<RhoRational> = vec![c.valuation_bound().finite().cloned().unwrap_or_else(RhoRational::zero)];
        for (i, e) in u.iter().enumerate() {
            for (j, &a) in e.coeffs().iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let x = &point[i];
                if a > 0 && x.is_zero() {
                    return Ok(HahnSeries::zero());
                }
                let vx = match (a > 0, x.valuation()) {
                    (_, Ok(crate::rho::Extended::Finite(v))) => v,
                    (true, _) => x.valuation_bound().finite().cloned().unwrap_or_else(RhoRational::zero),
                    (false, Ok(_)) => return Err(Error::DivisionByZero),
                    (false, Err(e)) => return Err(e),
                };
                vals.push(&(&vx * &RhoRational::rho_pow(j)) * &RhoRational::from_int(a));
                factors.push((i, j, a));
            }
        }
        let total = vals.iter().fold(RhoRational::zero(), |s, v| &s + v);
        let bound_for = |k: usize| target.map(|t| &(t - &total) + &vals[k]);
        let mut acc = match bound_for(0) {
            Some(b) => c.truncate(&b),
            None => c.clone(),
        };
        for (k, &(i, j, a)) in factors.iter().enumerate() {
            let fac = sigma_power(&point[i], j, a, bound_for(k + 1).as_ref())?;
            acc = acc.mul_trunc(&fac, target);
        }
        Ok(acc)
    }

    /// Initial form at `w`: residues of the unit-normalized coefficients of
    /// the monomials attaining the tropical minimum.
    pub fn initial_form(&self, w: &[RhoRational]) -> Result<ResidueDiffPoly> {
        let (_, att) = self.tropicalize(w)?;
        let mut out = ResidueDiffPoly::zero(self.nvars);
        for u in att {
            let c = &self.terms[&u];
            let (_, lead) = c.leading().ok_or(Error::ValuationUnknown)?;
            out.add_term(u, lead.clone());
        }
        Ok(out)
    }

    /// `f_(J)`: the scaled partial derivative `(1/J!) d^J P` of the
    /// associated commutative polynomial, as a difference polynomial.
    pub fn taylor_poly(&self, j: &MultiIndex) -> Result<KDiffPoly> {
        if self.nvars != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: self.nvars,
            });
        }
        let mut out = KDiffPoly::zero(1);
        'terms: for (u, c) in &self.terms {
            let e = &u[0];
            if !e.is_polynomial() {
                return Err(Error::Precondition("Taylor coefficients need nonnegative sigma-powers".into()));
            }
            let mut scale = BigInt::from(1);
            let mut rest = Vec::new();
            for idx in 0..e.len().max(j.0.len()) {
                let a = e.get(idx);
                let ji = j.0.get(idx).copied().unwrap_or(0) as i64;
                if a < ji {
                    continue 'terms;
                }
                scale *= binomial(BigInt::from(a), BigInt::from(ji));
                rest.push(a - ji);
            }
            let s = scale.to_i64().map(HahnSeries::from_int).unwrap_or_else(|| {
                HahnSeries::constant(AlgebraicScalar::from_bigint(scale.clone()))
            });
            out.add_term(vec![SigmaExponent::new(rest)], c * &s);
        }
        Ok(out)
    }

    /// `f_(J)(b)`.
    pub fn taylor_coeff(&self, j: &MultiIndex, b: &HahnSeries, target: Option<&RhoRational>) -> Result<HahnSeries> {
        self.taylor_poly(j)?.evaluate(core::slice::from_ref(b), target)
    }

    /// Per-position maxima of the sigma-power entries (univariate).
    pub fn index_bound(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.sigma_len()];
        for u in self.terms.keys() {
            for (k, &a) in u[0].coeffs().iter().enumerate() {
                out[k] = out[k].max(a.max(0) as usize);
            }
        }
        out
    }

    /// Substitutes the exact values `ys` for the first `ys.len()` variables,
    /// leaving a polynomial in the remaining ones.
    pub fn substitute_prefix(&self, ys: &[HahnSeries]) -> Result<KDiffPoly> {
        let k = ys.len();
        if k > self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: k,
            });
        }
        let mut out = KDiffPoly::zero(self.nvars - k);
        for (u, c) in &self.terms {
            let head = KDiffPoly::from_terms(k, vec![(u[..k].to_vec(), c.clone())]);
            let val = head.evaluate(ys, None)?;
            out.add_term(u[k..].to_vec(), val);
        }
        Ok(out)
    }
}

fn fmt_monomial(u: &[SigmaExponent]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, e) in u.iter().enumerate() {
        for (j, &a) in e.coeffs().iter().enumerate() {
            if a == 0 {
                continue;
            }
            let base = match j {
                0 => format!("x{}", i + 1),
                1 => format!("s(x{})", i + 1),
                _ => format!("s^{j}(x{})", i + 1),
            };
            parts.push(match a {
                1 => base,
                a if a > 0 => format!("{base}^{a}"),
                a => format!("{base}^({a})"),
            });
        }
    }
    parts.join("*")
}

impl<C: Coefficient> fmt::Display for DiffPolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (u, c)) in self.display_order().into_iter().enumerate() {
            let m = fmt_monomial(u);
            let (neg, c) = match c.strip_sign() {
                Some(p) => (true, p),
                None => (false, c.clone()),
            };
            let body = if m.is_empty() {
                if c.is_atomic() {
                    format!("{c}")
                } else {
                    format!("({c})")
                }
            } else if c.is_one() {
                m
            } else if c.is_atomic() {
                format!("{c}*{m}")
            } else {
                format!("({c})*{m}")
            };
            match (k == 0, neg) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn se(a: &[i64]) -> SigmaExponent {
        SigmaExponent::new(a.to_vec())
    }

    fn t(e: RhoRational) -> HahnSeries {
        HahnSeries::splitting(&e)
    }

    fn one_plus_t() -> HahnSeries {
        &HahnSeries::one() + &t(RhoRational::one())
    }

    /// (1+t) x1 s^3(x2) + t^2 s(x2) + 1
    fn extrop() -> KDiffPoly {
        KDiffPoly::from_terms(
            2,
            vec![
                (vec![se(&[1]), se(&[0, 0, 0, 1])], one_plus_t()),
                (vec![se(&[]), se(&[0, 1])], t(RhoRational::from_int(2))),
                (vec![se(&[]), se(&[])], HahnSeries::one()),
            ],
        )
    }

    #[test]
    fn exponent_evaluation() {
        assert_eq!(se(&[0, 0, 0, 1]).eval(), RhoRational::rho_pow(3));
        assert_eq!(se(&[2, 4]).eval(), RhoRational::from_int_poly(&[2, 4]));
        assert_eq!(eval_exponent(&[se(&[1, 1])]), vec![RhoRational::from_int_poly(&[1, 1])]);
    }

    #[test]
    fn extrop_tropicalization_and_initial_form() {
        let f = extrop();
        let r = RhoRational::rho();
        let w = vec![&RhoRational::from_int(3) * &(&r * &r), &RhoRational::from_int(-2) / &r];
        let (val, att) = f.tropicalize(&w).unwrap();
        assert_eq!(val, RhoRational::zero());
        assert_eq!(att.len(), 2);
        let init = f.initial_form(&w).unwrap();
        let expect = ResidueDiffPoly::from_terms(
            2,
            vec![(vec![se(&[]), se(&[0, 1])], AlgebraicScalar::one()), (vec![se(&[]), se(&[])], AlgebraicScalar::one())],
        );
        assert_eq!(init, expect);
        assert_eq!(f.to_string(), "(1 + t)*x1*s^3(x2) + t^2*s(x2) + 1");
    }

    #[test]
    fn evaluation_examples() {
        let f = extrop();
        let v = f.evaluate(&[HahnSeries::one(), HahnSeries::one()], None).unwrap();
        assert_eq!(v, &(&HahnSeries::from_int(2) + &t(RhoRational::one())) + &t(RhoRational::from_int(2)));
        // x^(1+s) - t at t^(1/(1+r))
        let g = KDiffPoly::from_terms(1, vec![(vec![se(&[1, 1])], HahnSeries::one()), (vec![se(&[])], -t(RhoRational::one()))]);
        let w = RhoRational::from_int_poly(&[1, 1]).inv().unwrap();
        assert!(g.evaluate(&[t(w.clone())], None).unwrap().is_zero());
        assert!(g.evaluate(&[t(w)], Some(&RhoRational::from_int(4))).unwrap().has_no_terms());
    }

    #[test]
    fn laurent_evaluation_with_target() {
        // x^(-1) at 1 + t, to target 3: 1 - t + t^2
        let f = KDiffPoly::from_terms(1, vec![(vec![se(&[-1])], HahnSeries::one())]);
        let v = f.evaluate(&[one_plus_t()], Some(&RhoRational::from_int(3))).unwrap();
        assert_eq!(v.terms().len(), 3);
        assert_eq!(v.trunc(), Some(&RhoRational::from_int(3)));
    }

    #[test]
    fn normalization() {
        let f = KDiffPoly::from_terms(1, vec![(vec![se(&[-1])], HahnSeries::one()), (vec![se(&[])], HahnSeries::one())]);
        let (g, s) = f.laurent_normalize();
        assert_eq!(s, vec![se(&[1])]);
        assert_eq!(g.to_string(), "x1 + 1");
        let f = KDiffPoly::from_terms(1, vec![(vec![se(&[0, -1])], HahnSeries::one()), (vec![se(&[1])], HahnSeries::one())]);
        let (g, s) = f.laurent_normalize();
        assert_eq!(s, vec![se(&[0, 1])]);
        assert_eq!(g.to_string(), "x1*s(x1) + 1");
    }

    #[test]
    fn taylor_coefficients() {
        // x^2: J = (2) gives 1, J = (1) at b gives 2b
        let f = KDiffPoly::from_terms(1, vec![(vec![se(&[2])], HahnSeries::one())]);
        let b = HahnSeries::from_int(5);
        assert_eq!(f.taylor_coeff(&MultiIndex(vec![2]), &b, None).unwrap(), HahnSeries::one());
        assert_eq!(f.taylor_coeff(&MultiIndex(vec![1]), &b, None).unwrap(), HahnSeries::from_int(10));
        let g = extrop().substitute_prefix(&[HahnSeries::one()]).unwrap();
        assert_eq!(g.taylor_coeff(&MultiIndex(vec![0, 1]), &HahnSeries::zero(), None).unwrap(), t(RhoRational::from_int(2)));
    }

    #[test]
    fn multi_indices() {
        let all = MultiIndex::all_below(&[1, 1]);
        assert_eq!(all.len(), 3);
        assert_eq!(all[2], MultiIndex(vec![1, 1]));
        assert_eq!(all[2].rho_length(), RhoRational::from_int_poly(&[1, 1]));
    }

    #[test]
    fn phi_l() {
        let f = ResidueDiffPoly::var(2, 0).multiply(&ResidueDiffPoly::var(2, 1)).unwrap();
        let g = f.apply_phi_l(3);
        assert_eq!(g.exponents(), vec![vec![se(&[1]), se(&[4])]]);
        let h = ResidueDiffPoly::var(2, 0).add(&ResidueDiffPoly::var(2, 1));
        let l = h.choose_l();
        assert!(h.phi_l_distinct(l));
        // x1 s(x2) and x1^2 x2^(-1) s(x2) collide at l = 1
        let k = ResidueDiffPoly::from_terms(
            2,
            vec![(vec![se(&[1]), se(&[0, 1])], AlgebraicScalar::one()), (vec![se(&[2]), se(&[-1, 1])], AlgebraicScalar::one())],
        );
        assert!(!k.phi_l_distinct(1));
        assert_eq!(k.choose_l(), 2);
    }

    #[test]
    fn products() {
        let x = ResidueDiffPoly::var(1, 0);
        let sx = ResidueDiffPoly::monomial(1, 0, se(&[0, 1]), AlgebraicScalar::one());
        assert_eq!(x.multiply(&sx).unwrap().exponents(), vec![vec![se(&[1, 1])]]);
        let one = ResidueDiffPoly::constant(1, AlgebraicScalar::one());
        let p = x.add(&one).multiply(&x.sub(&one)).unwrap();
        assert_eq!(p.to_string(), "x1^2 - 1");
    }
}
