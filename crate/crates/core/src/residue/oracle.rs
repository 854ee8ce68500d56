//! Root finding for difference polynomials over the residue field.
//!
//! The implemented field is the algebraic closure of the rationals with the
//! identity automorphism. Every `x^u(sigma)` then collapses to the ordinary
//! power `x^u(1)`, so difference equations become polynomial ones. Fields with
//! a nontrivial automorphism plug in through [`ResidueField`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::algebraic::AlgebraicScalar;
use super::kpoly::{self, KPoly};
use crate::diffpoly::{Monomial, ResidueDiffPoly, SigmaExponent};
use crate::error::{Error, Result};

/// Candidate budget of the nonroot enumeration.
const NONROOT_BUDGET: usize = 200_000;

pub trait ResidueField: Send + Sync {
    fn sigma_bar(&self, a: &AlgebraicScalar) -> AlgebraicScalar;

    fn is_identity(&self) -> bool {
        false
    }

    fn roots_univariate(&self, p: &[AlgebraicScalar]) -> Result<Vec<AlgebraicScalar>> {
        kpoly::roots_univariate(p)
    }

    /// A nonzero root of a one-variable difference polynomial.
    fn solve_difference_univariate(&self, phi: &ResidueDiffPoly) -> Result<AlgebraicScalar>;

    /// All distinct nonzero roots, for branch exploration; by default only
    /// the selected one.
    fn difference_roots(&self, phi: &ResidueDiffPoly) -> Result<Vec<AlgebraicScalar>> {
        Ok(vec![self.solve_difference_univariate(phi)?])
    }

    /// `f(point)` with `sigma^j(x)` read as `sigma_bar^j(x)`.
    fn eval(&self, f: &ResidueDiffPoly, point: &[AlgebraicScalar]) -> Result<AlgebraicScalar> {
        if point.len() != f.nvars() {
            return Err(Error::DimensionMismatch {
                expected: f.nvars(),
                found: point.len(),
            });
        }
        let mut acc = AlgebraicScalar::zero();
        for (u, c) in f.terms() {
            let mut m = c.clone();
            for (e, x) in u.iter().zip(point) {
                let mut y = x.clone();
                for &a in e.coeffs() {
                    if a != 0 {
                        if a < 0 && y.is_zero() {
                            return Err(Error::DivisionByZero);
                        }
                        m = &m * &y.pow(a);
                    }
                    y = self.sigma_bar(&y);
                }
            }
            acc = &acc + &m;
        }
        Ok(acc)
    }

    /// The polynomial whose roots are the roots of `f`; the identity field
    /// collapses sigma-powers here.
    fn reduce(&self, f: &ResidueDiffPoly) -> ResidueDiffPoly {
        f.clone()
    }

    /// A root of `f` in `(k*)^n`.
    fn find_root_nonmonomial(&self, f: &ResidueDiffPoly) -> Result<Vec<AlgebraicScalar>> {
        find_root(self, f)
    }
}

/// The algebraic closure of the rationals with the identity automorphism.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityField;

/// Complex conjugation as the automorphism. No difference-equation solver is
/// known for it; the solver reports the missing oracle.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConjugationField;

/// `x^u(sigma) -> x^u(1)` in every variable.
pub fn collapse(f: &ResidueDiffPoly) -> ResidueDiffPoly {
    ResidueDiffPoly::from_terms(
        f.nvars(),
        f.terms().map(|(u, c)| {
            let v: Monomial = u.iter().map(|e| SigmaExponent::single(0, e.collapse())).collect();
            (v, c.clone())
        }),
    )
}

impl ResidueField for IdentityField {
    fn sigma_bar(&self, a: &AlgebraicScalar) -> AlgebraicScalar {
        a.clone()
    }

    fn is_identity(&self) -> bool {
        true
    }

    fn eval(&self, f: &ResidueDiffPoly, point: &[AlgebraicScalar]) -> Result<AlgebraicScalar> {
        f.eval_collapsed(point)
    }

    fn reduce(&self, f: &ResidueDiffPoly) -> ResidueDiffPoly {
        collapse(f)
    }

    fn solve_difference_univariate(&self, phi: &ResidueDiffPoly) -> Result<AlgebraicScalar> {
        solve_difference_univariate(phi)
    }

    fn difference_roots(&self, phi: &ResidueDiffPoly) -> Result<Vec<AlgebraicScalar>> {
        difference_roots(phi)
    }
}

impl ResidueField for ConjugationField {
    fn sigma_bar(&self, a: &AlgebraicScalar) -> AlgebraicScalar {
        a.conj()
    }

    fn solve_difference_univariate(&self, phi: &ResidueDiffPoly) -> Result<AlgebraicScalar> {
        if phi.is_monomial() {
            return Err(Error::MonomialInput);
        }
        Err(Error::OracleUnavailable)
    }
}

/// Nonzero root of a one-variable difference polynomial over the identity
/// field: the least root in the canonical order of the collapsed polynomial.
pub fn solve_difference_univariate(phi: &ResidueDiffPoly) -> Result<AlgebraicScalar> {
    Ok(difference_roots(phi)?.swap_remove(0))
}

/// All distinct nonzero roots over the identity field, in canonical order.
/// A polynomial vanishing identically after collapsing yields `[1]`.
pub fn difference_roots(phi: &ResidueDiffPoly) -> Result<Vec<AlgebraicScalar>> {
    if phi.nvars() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: phi.nvars(),
        });
    }
    if phi.is_monomial() {
        return Err(Error::MonomialInput);
    }
    let p = collapse(phi);
    if p.is_empty() {
        return Ok(vec![AlgebraicScalar::one()]);
    }
    if p.is_monomial() {
        return Err(Error::NoNonzeroRoot(format!("{phi} collapses to the monomial {p}")));
    }
    let low = p.terms().map(|(u, _)| u[0].get(0)).min().unwrap_or(0);
    let mut dense: KPoly = Vec::new();
    for (u, c) in p.terms() {
        let k = (u[0].get(0) - low) as usize;
        if dense.len() <= k {
            dense.resize(k + 1, AlgebraicScalar::zero());
        }
        dense[k] = c.clone();
    }
    let roots: Vec<AlgebraicScalar> = kpoly::roots_with_multiplicity(&dense)?.into_iter().map(|r| r.0).filter(|r| !r.is_zero()).collect();
    if roots.is_empty() {
        return Err(Error::NoNonzeroRoot(format!("{phi}")));
    }
    Ok(roots)
}

/// Integer candidates `1, -1, 2, -2, ...`.
fn candidate(k: usize) -> AlgebraicScalar {
    let m = (k / 2 + 1) as i64;
    AlgebraicScalar::from_int(if k.is_multiple_of(2) { m } else { -m })
}

/// Points of `(k*)^m` over the candidate values, by increasing height.
fn candidates(m: usize) -> impl Iterator<Item = Vec<AlgebraicScalar>> {
    (0usize..).flat_map(move |h| {
        // all index tuples with max exactly h
        let total = (h + 1).pow(m as u32);
        (0..total).filter_map(move |mut code| {
            let mut idx = vec![0usize; m];
            for slot in idx.iter_mut() {
                *slot = code % (h + 1);
                code /= h + 1;
            }
            if m > 0 && !idx.contains(&h) {
                return None;
            }
            Some(idx.into_iter().map(candidate).collect())
        })
    })
}

/// A nonroot of `h` in `(k*)^m` by enumeration.
pub fn find_nonroot<F: ResidueField + ?Sized>(field: &F, h: &ResidueDiffPoly) -> Result<Vec<AlgebraicScalar>> {
    for (count, p) in candidates(h.nvars()).enumerate() {
        if count >= NONROOT_BUDGET {
            return Err(Error::NonrootSearchExhausted(count));
        }
        if !field.eval(h, &p)?.is_zero() {
            return Ok(p);
        }
        if h.nvars() == 0 {
            break;
        }
    }
    Err(Error::NonrootSearchExhausted(1))
}

/// A root in `(k*)^n` of a non-monomial polynomial: choose a variable with
/// two distinct powers, make the product of its coefficient polynomials
/// nonzero, then solve in that variable.
pub fn find_root<F: ResidueField + ?Sized>(field: &F, f: &ResidueDiffPoly) -> Result<Vec<AlgebraicScalar>> {
    let n = f.nvars();
    if f.is_monomial() {
        return Err(Error::MonomialInput);
    }
    let g = field.reduce(f);
    if g.is_empty() {
        return Ok(vec![AlgebraicScalar::one(); n]);
    }
    if g.is_monomial() {
        return Err(Error::NoNonzeroRoot(format!("{f} reduces to the monomial {g}")));
    }
    if n == 1 {
        return Ok(vec![field.solve_difference_univariate(&g)?]);
    }
    let var = (0..n)
        .rev()
        .find(|&i| {
            let mut e: Vec<&SigmaExponent> = g.terms().map(|(u, _)| &u[i]).collect();
            e.sort();
            e.dedup();
            e.len() >= 2
        })
        .ok_or_else(|| Error::Consistency("distinct monomials share every exponent".into()))?;
    // coefficient polynomial of each power of the chosen variable
    let mut groups: BTreeMap<SigmaExponent, Vec<(Monomial, AlgebraicScalar)>> = BTreeMap::new();
    for (u, c) in g.terms() {
        let mut rest = u.clone();
        let e = rest.remove(var);
        groups.entry(e).or_default().push((rest, c.clone()));
    }
    let coeffs: Vec<(SigmaExponent, ResidueDiffPoly)> =
        groups.into_iter().map(|(e, t)| (e, ResidueDiffPoly::from_terms(n - 1, t))).collect();
    let mut h = ResidueDiffPoly::constant(n - 1, AlgebraicScalar::one());
    for (_, c) in &coeffs {
        h = h.multiply(c)?;
    }
    let a = find_nonroot(field, &h)?;
    let mut phi = ResidueDiffPoly::zero(1);
    for (e, c) in &coeffs {
        phi = phi.add(&ResidueDiffPoly::monomial(1, 0, e.clone(), field.eval(c, &a)?));
    }
    let x = field.solve_difference_univariate(&phi)?;
    let mut out = a;
    out.insert(var, x);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn se(a: &[i64]) -> SigmaExponent {
        SigmaExponent::new(a.to_vec())
    }

    fn poly(n: usize, t: &[(&[&[i64]], i64)]) -> ResidueDiffPoly {
        ResidueDiffPoly::from_terms(
            n,
            t.iter().map(|(u, c)| (u.iter().map(|e| se(e)).collect(), AlgebraicScalar::from_int(*c))),
        )
    }

    #[test]
    fn univariate_solver() {
        let f = poly(1, &[(&[&[1]], 1), (&[&[]], 1)]);
        assert_eq!(solve_difference_univariate(&f).unwrap(), AlgebraicScalar::from_int(-1));
        let g = poly(1, &[(&[&[0, 1]], 1), (&[&[]], 1)]);
        assert_eq!(solve_difference_univariate(&g).unwrap(), AlgebraicScalar::from_int(-1));
        let d = poly(1, &[(&[&[2]], 1), (&[&[1]], 2), (&[&[]], 1)]);
        assert_eq!(solve_difference_univariate(&d).unwrap(), AlgebraicScalar::from_int(-1));
        assert_eq!(solve_difference_univariate(&poly(1, &[(&[&[2]], 3)])), Err(Error::MonomialInput));
        // x^s + x collapses to 2x
        assert!(matches!(
            solve_difference_univariate(&poly(1, &[(&[&[0, 1]], 1), (&[&[1]], 1)])),
            Err(Error::NoNonzeroRoot(_))
        ));
    }

    #[test]
    fn multivariate_roots() {
        let one = AlgebraicScalar::one();
        let f = poly(2, &[(&[&[1], &[]], 1), (&[&[], &[1]], 1)]);
        assert_eq!(find_root(&IdentityField, &f).unwrap(), vec![one.clone(), -&one]);
        let g = poly(2, &[(&[&[1], &[1]], 1), (&[&[], &[]], -1)]);
        assert_eq!(find_root(&IdentityField, &g).unwrap(), vec![one.clone(), one.clone()]);
        let h = poly(2, &[(&[&[2], &[]], 1), (&[&[], &[2]], 1), (&[&[], &[]], -2)]);
        let p = find_root(&IdentityField, &h).unwrap();
        assert!(IdentityField.eval(&h, &p).unwrap().is_zero());
        assert!(p.iter().all(|x| !x.is_zero()));
    }

    #[test]
    fn nonroot_enumeration_skips_roots() {
        // x1 - 1 vanishes at the first candidate
        let h = poly(1, &[(&[&[1]], 1), (&[&[]], -1)]);
        assert_eq!(find_nonroot(&IdentityField, &h).unwrap(), vec![AlgebraicScalar::from_int(-1)]);
    }

    #[test]
    fn conjugation_oracle() {
        let i = kpoly::roots_univariate(&kpoly::from_ints(&[1, 0, 1])).unwrap()[1].clone();
        assert_eq!(ConjugationField.sigma_bar(&i), -&i);
        let f = poly(1, &[(&[&[0, 1]], 1), (&[&[]], 1)]);
        assert_eq!(ConjugationField.solve_difference_univariate(&f), Err(Error::OracleUnavailable));
        // x * s(x) at i is i * conj(i) = 1
        let g = poly(1, &[(&[&[1, 1]], 1)]);
        assert_eq!(ConjugationField.eval(&g, &[i]).unwrap(), AlgebraicScalar::one());
    }
}
