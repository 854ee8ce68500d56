//! Number fields `Q(g)` given by an irreducible integer polynomial and an
//! isolated root, together with the constructions that relate them:
//! root location, factor search, norms and primitive elements.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::algebraic::AlgebraicScalar;
use super::isolate::{isolate, refine, IsolatedRoot, Rect, LEVELS};
use super::kpoly;
use super::qpoly::{self, QPoly};
use crate::error::{Error, Result};
use crate::upoly::{self, ZPoly};

/// `Q(g)` for the root `g` of `minpoly` with canonical index `index` in the
/// level-0 isolation. `parents` lists subfields with the image of their
/// generator in this field.
#[derive(Debug)]
pub(crate) struct NumberField {
    pub minpoly: ZPoly,
    pub monic: QPoly,
    pub index: usize,
    pub rect: Rect,
    pub parents: Vec<(Arc<NumberField>, QPoly)>,
}

impl NumberField {
    pub fn new(minpoly: ZPoly, index: usize, parents: Vec<(Arc<NumberField>, QPoly)>) -> Result<Arc<NumberField>> {
        let roots = isolate(&minpoly, 0)?;
        let rect = roots
            .get(index)
            .ok_or_else(|| Error::Consistency("root index out of range".into()))?
            .rect();
        let lc = BigRational::from_integer(minpoly.last().cloned().unwrap_or_else(BigInt::one));
        let monic = minpoly.iter().map(|c| BigRational::from_integer(c.clone()) / &lc).collect();
        Ok(Arc::new(NumberField {
            minpoly,
            monic,
            index,
            rect,
            parents,
        }))
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn same(a: &Arc<NumberField>, b: &Arc<NumberField>) -> bool {
        Arc::ptr_eq(a, b) || (a.index == b.index && a.minpoly == b.minpoly)
    }

    /// Isolating square of the generator at the given precision level.
    pub fn rect_at(&self, level: usize) -> Result<Rect> {
        if level == 0 {
            return Ok(self.rect.clone());
        }
        let roots0 = isolate(&self.minpoly, 0)?;
        Ok(refine(&self.minpoly, &roots0, level)?[self.index].rect())
    }

    /// A copy with one more subfield recorded.
    pub fn with_parent(self: &Arc<Self>, parent: Arc<NumberField>, image: QPoly) -> Arc<NumberField> {
        let mut parents = self.parents.clone();
        parents.push((parent, image));
        Arc::new(NumberField {
            minpoly: self.minpoly.clone(),
            monic: self.monic.clone(),
            index: self.index,
            rect: self.rect.clone(),
            parents,
        })
    }

    pub fn contains_subfield(self: &Arc<Self>, sub: &Arc<NumberField>) -> bool {
        NumberField::same(self, sub) || self.parents.iter().any(|(p, _)| p.contains_subfield(sub))
    }
}

/// Maps coordinates over `from` into `to`, if `from` is a recorded subfield.
pub(crate) fn embed(coords: &[BigRational], from: &Arc<NumberField>, to: &Arc<NumberField>) -> Option<QPoly> {
    if NumberField::same(from, to) {
        return Some(coords.to_vec());
    }
    for (p, image) in &to.parents {
        if let Some(c) = embed(coords, from, p) {
            return Some(qpoly::compose_mod(&c, image, &to.monic));
        }
    }
    None
}

/// Canonical index (level-0 order) of the unique root of the square-free `p`
/// inside the enclosures produced by `target`, refined until unambiguous.
pub(crate) fn locate(p: &ZPoly, target: &mut dyn FnMut(usize) -> Result<Rect>) -> Result<usize> {
    let roots0 = isolate(p, 0)?;
    for level in 0..LEVELS + 2 {
        let roots = refine(p, &roots0, level)?;
        let t = target(level)?;
        let hits: Vec<usize> = (0..roots.len()).filter(|&i| roots[i].rect().intersects(&t)).collect();
        match hits.len() {
            1 => return Ok(hits[0]),
            0 => return Err(Error::Consistency("enclosure misses every root".into())),
            _ => {}
        }
    }
    Err(Error::Isolation("could not separate a root from its neighbours".into()))
}

const SUBSET_BUDGET: usize = 1 << 21;

enum Check {
    Reject,
    Ambiguous,
    Candidate(ZPoly),
}

/// Floating-point screen of a subset product with a rigorous error budget.
fn check_f64(roots: &[(Complex64, f64)], subset: &[usize]) -> Option<Check> {
    let s = subset.len();
    let mut prod = vec![Complex64::new(1.0, 0.0)];
    let mut mag = vec![1.0f64];
    let mut magh = vec![1.0f64];
    for &i in subset {
        let (z, h) = roots[i];
        let mut next = vec![Complex64::new(0.0, 0.0); prod.len() + 1];
        let mut nm = vec![0.0; prod.len() + 1];
        let mut nmh = vec![0.0; prod.len() + 1];
        for k in 0..prod.len() {
            next[k + 1] += prod[k];
            next[k] -= prod[k] * z;
            nm[k + 1] += mag[k];
            nm[k] += mag[k] * z.norm();
            nmh[k + 1] += magh[k];
            nmh[k] += magh[k] * (z.norm() + h);
        }
        prod = next;
        mag = nm;
        magh = nmh;
    }
    let mut out = Vec::with_capacity(s + 1);
    for k in 0..=s {
        if !(magh[k] < 4.0e15) {
            return None;
        }
        let tol = (magh[k] - mag[k]) * 1.01 + 1e-9 * magh[k] + 1e-9;
        let c = prod[k];
        if c.im.abs() > tol {
            return Some(Check::Reject);
        }
        let r = num_traits::Float::round(c.re);
        if (c.re - r).abs() > tol {
            return Some(Check::Reject);
        }
        if tol >= 0.5 {
            // floating point cannot decide; the interval check tightens with the level
            return None;
        }
        out.push(BigInt::from(r as i64));
    }
    Some(Check::Candidate(out))
}

/// Exact interval screen of a subset product.
fn check_exact(rects: &[Rect], subset: &[usize]) -> Check {
    let zero = BigRational::zero();
    let one = BigRational::one();
    let pt = |v: &BigRational| Rect {
        re: (v.clone(), v.clone()),
        im: (zero.clone(), zero.clone()),
    };
    let mut prod = vec![pt(&one)];
    for &i in subset {
        let r = &rects[i];
        let mut next = vec![pt(&zero); prod.len() + 1];
        for k in 0..prod.len() {
            next[k + 1] = next[k + 1].add(&prod[k]);
            next[k] = next[k].add(&prod[k].mul(r).neg());
        }
        prod = next;
    }
    let mut out = Vec::with_capacity(prod.len());
    for c in &prod {
        if c.im.0 > zero || c.im.1 < zero {
            return Check::Reject;
        }
        if &c.re.1 - &c.re.0 >= one {
            return Check::Ambiguous;
        }
        let k = c.re.0.ceil();
        if k > c.re.1 {
            return Check::Reject;
        }
        out.push(k.to_integer());
    }
    Check::Candidate(out)
}

struct Search<'a> {
    monic: &'a ZPoly,
    approx: Vec<(Complex64, f64)>,
    rects: Vec<Rect>,
    budget: usize,
    ambiguous: bool,
}

impl Search<'_> {
    fn test(&mut self, subset: &[usize]) -> Result<Option<ZPoly>> {
        if self.budget == 0 {
            return Err(Error::Isolation("factor search budget exhausted".into()));
        }
        self.budget -= 1;
        let check = match check_f64(&self.approx, subset) {
            Some(c) => c,
            None => check_exact(&self.rects, subset),
        };
        match check {
            Check::Reject => Ok(None),
            Check::Ambiguous => {
                self.ambiguous = true;
                Ok(None)
            }
            Check::Candidate(q) => Ok(upoly::div_exact(self.monic, &q).map(|_| q)),
        }
    }

    /// First subset of `pool` of size `size` (extending `chosen`) whose product divides.
    fn dfs(&mut self, pool: &[usize], start: usize, size: usize, chosen: &mut Vec<usize>) -> Result<Option<ZPoly>> {
        if chosen.len() == size {
            return self.test(chosen);
        }
        let need = size - chosen.len();
        for i in start..pool.len() {
            if pool.len() - i < need {
                break;
            }
            chosen.push(pool[i]);
            let r = self.dfs(pool, i + 1, size, chosen)?;
            chosen.pop();
            if r.is_some() || self.ambiguous {
                return Ok(r);
            }
        }
        Ok(None)
    }
}

/// The irreducible factor over Q of the square-free primitive `p` vanishing at
/// its root with canonical index `idx`. Only factor degrees divisible by `step`
/// are considered.
pub(crate) fn factor_containing(p: &ZPoly, idx: usize, step: usize) -> Result<ZPoly> {
    let n = p.len() - 1;
    if n <= step || n == 1 {
        return Ok(p.clone());
    }
    let lc = p[n].clone();
    // monic transform lc^(n-1) p(y / lc): roots are lc * root
    let monic: ZPoly = (0..=n)
        .map(|i| if i == n { BigInt::one() } else { &p[i] * num_traits::pow(lc.clone(), n - 1 - i) })
        .collect();
    let lcq = BigRational::from_integer(lc.clone());
    let lcr = Rect::point(&super::isolate::Cq::real(lcq));
    let roots0 = isolate(p, 0)?;
    let others: Vec<usize> = (0..n).filter(|&i| i != idx).collect();
    for level in 0..LEVELS + 2 {
        let roots: Vec<IsolatedRoot> = refine(p, &roots0, level)?;
        let rects: Vec<Rect> = roots.iter().map(|r| r.rect().mul(&lcr)).collect();
        let lcf = lc.to_f64().unwrap_or(f64::INFINITY);
        let approx = roots
            .iter()
            .map(|r| {
                let h = r.half.to_f64().unwrap_or(f64::INFINITY) * lcf.abs() * 1.5;
                (r.approx() * lcf, h)
            })
            .collect();
        let mut search = Search {
            monic: &monic,
            approx,
            rects,
            budget: SUBSET_BUDGET,
            ambiguous: false,
        };
        let mut found = None;
        let mut s = step;
        while s < n {
            if s <= n - s {
                if let Some(q) = dfs_with(&mut search, &others, s - 1, idx)? {
                    found = Some(q);
                    break;
                }
            } else if let Some(q) = search.dfs(&others, 0, n - s, &mut Vec::new())? {
                found = Some(upoly::div_exact(&monic, &q).expect("checked division"));
                break;
            }
            if search.ambiguous {
                break;
            }
            s += step;
        }
        if let Some(q) = found {
            // undo the transform: q(lc x), made primitive
            let scaled: ZPoly = q.iter().enumerate().map(|(i, c)| c * num_traits::pow(lc.clone(), i)).collect();
            return Ok(upoly::primitive(&scaled));
        }
        if !search.ambiguous {
            return Ok(p.clone());
        }
    }
    Err(Error::Isolation("factor search stayed ambiguous at maximum precision".into()))
}

fn dfs_with(search: &mut Search<'_>, pool: &[usize], size: usize, idx: usize) -> Result<Option<ZPoly>> {
    fn go(
        search: &mut Search<'_>,
        pool: &[usize],
        start: usize,
        size: usize,
        chosen: &mut Vec<usize>,
    ) -> Result<Option<ZPoly>> {
        if chosen.len() == size + 1 {
            return search.test(chosen);
        }
        let need = size + 1 - chosen.len();
        for i in start..pool.len() {
            if pool.len() - i < need {
                break;
            }
            chosen.push(pool[i]);
            let r = go(search, pool, i + 1, size, chosen)?;
            chosen.pop();
            if r.is_some() || search.ambiguous {
                return Ok(r);
            }
        }
        Ok(None)
    }
    let mut chosen = vec![idx];
    go(search, pool, 0, size, &mut chosen)
}

/// `Res_y(m(y), Psi(x - k y, y))` where `Psi(x, y) = sum_i psi[i](y) x^i`,
/// returned primitive. Up to a constant this is the norm from `Q(root of m)`.
pub(crate) fn norm_shift(m: &ZPoly, psi: &[QPoly], k: i64) -> ZPoly {
    let l = psi
        .iter()
        .flat_map(|c| c.iter())
        .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let lq = BigRational::from_integer(l);
    let ci: Vec<ZPoly> = psi
        .iter()
        .map(|c| upoly::trimmed(c.iter().map(|v| (v * &lq).to_integer()).collect()))
        .collect();
    let d = m.len() - 1;
    let dx = psi.len() - 1;
    let dy = ci
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_empty())
        .map(|(i, c)| c.len() - 1 + if k != 0 { i } else { 0 })
        .max()
        .unwrap_or(0);
    let lcm_m = m[d].clone();
    let npts = d * dx + 1;
    let mut xs = Vec::with_capacity(npts);
    let mut ys = Vec::with_capacity(npts);
    for j in 0..npts {
        let xj = BigInt::from(j as u64);
        let lin: ZPoly = upoly::trimmed(vec![xj.clone(), BigInt::from(-k)]);
        let mut acc: ZPoly = Vec::new();
        for c in ci.iter().rev() {
            acc = upoly::add(&upoly::mul(&acc, &lin), c);
        }
        let v = match upoly::degree(&acc) {
            None => BigInt::zero(),
            Some(db) => upoly::resultant(m, &acc) * num_traits::pow(lcm_m.clone(), dy - db),
        };
        xs.push(xj);
        ys.push(v);
    }
    upoly::interpolate_primitive(&xs, &ys)
}

/// How a root `z` of a polynomial over a field `F` is represented.
pub(crate) enum Extension {
    /// `z` is rational.
    Rational(BigRational),
    /// `z` lies in `F`; coordinates over its generator.
    Same(QPoly),
    /// `z` generates, together with `F`, the field `Q(minpoly, index)`;
    /// `alpha` is the generator of `F` there (empty without `F`).
    New {
        minpoly: ZPoly,
        index: usize,
        alpha: QPoly,
        z: QPoly,
    },
}

/// Locates the root `z` (enclosed by `z_rect`) of the square-free `psi`,
/// whose coefficients live in `field` (or are rational when `field` is None),
/// and returns a primitive-element representation of `F(z)`.
pub(crate) fn extend(
    field: Option<&Arc<NumberField>>,
    psi: &[AlgebraicScalar],
    z_rect: &mut dyn FnMut(usize) -> Result<Rect>,
) -> Result<Extension> {
    let Some(f) = field else {
        let q: QPoly = psi
            .iter()
            .map(|c| c.as_rational().cloned().ok_or_else(|| Error::Consistency("coefficient outside Q".into())))
            .collect::<Result<_>>()?;
        let p = upoly::squarefree(&qpoly::to_z(&q));
        let idx = locate(&p, z_rect)?;
        let g = factor_containing(&p, idx, 1)?;
        if g.len() == 2 {
            return Ok(Extension::Rational(BigRational::new(-g[0].clone(), g[1].clone())));
        }
        let index = locate(&g, z_rect)?;
        return Ok(Extension::New {
            minpoly: g,
            index,
            alpha: Vec::new(),
            z: vec![BigRational::zero(), BigRational::one()],
        });
    };
    let d = f.degree();
    let coords: Vec<QPoly> = psi
        .iter()
        .map(|c| c.coords_in(f).ok_or_else(|| Error::Consistency("coefficient outside field".into())))
        .collect::<Result<_>>()?;
    let minpoly_f = upoly::primitive(&f.minpoly);
    for step in 1..=40i64 {
        let k = if step % 2 == 1 { (step + 1) / 2 } else { -(step / 2) };
        let n = norm_shift(&minpoly_f, &coords, k);
        let dn = upoly::derivative(&n);
        if upoly::degree(&upoly::gcd(&n, &dn)) != Some(0) {
            continue;
        }
        let kq = BigRational::from_integer(BigInt::from(k));
        let kr = Rect::point(&super::isolate::Cq::real(kq.clone()));
        let mut target = |level: usize| -> Result<Rect> { Ok(z_rect(level)?.add(&f.rect_at(level)?.mul(&kr))) };
        let idx = locate(&n, &mut target)?;
        let m = factor_containing(&n, idx, d)?;
        let index = locate(&m, &mut target)?;
        let h = NumberField::new(m.clone(), index, Vec::new())?;
        let gamma = AlgebraicScalar::in_field(&h, vec![BigRational::zero(), BigRational::one()]);
        let kk = AlgebraicScalar::from_rational(kq.clone());
        // alpha is the common root of minpoly_f(y) and Psi(gamma - k y, y)
        let lin = vec![gamma.clone(), -&kk];
        let mut s: Vec<AlgebraicScalar> = Vec::new();
        for c in coords.iter().rev() {
            let cy: Vec<AlgebraicScalar> = c.iter().map(|v| AlgebraicScalar::from_rational(v.clone())).collect();
            s = kpoly::add(&kpoly::mul(&s, &lin), &cy);
        }
        let mf: Vec<AlgebraicScalar> = f.minpoly.iter().map(|c| AlgebraicScalar::from_bigint(c.clone())).collect();
        let g = kpoly::gcd(&mf, &s);
        if g.len() != 2 {
            return Err(Error::Consistency("primitive element gcd is not linear".into()));
        }
        let alpha = -&(&g[0] / &g[1]);
        let z = &gamma - &(&kk * &alpha);
        let alpha_c = alpha.coords_in(&h).expect("element of h");
        let z_c = z.coords_in(&h).expect("element of h");
        if m.len() - 1 == d {
            // F(z) = F: rewrite gamma over the generator of F
            let mut cols: Vec<QPoly> = Vec::with_capacity(d);
            let mut pw: QPoly = vec![BigRational::one()];
            for _ in 0..d {
                let mut col = pw.clone();
                col.resize(d, BigRational::zero());
                cols.push(col);
                pw = qpoly::rem(&qpoly::mul(&pw, &alpha_c), &h.monic);
            }
            let mat: Vec<Vec<BigRational>> = (0..d).map(|r| (0..d).map(|c| cols[c][r].clone()).collect()).collect();
            let mut rhs = vec![BigRational::zero(); d];
            rhs[1] = BigRational::one();
            let gamma_in_f = qpoly::solve(mat, rhs).ok_or_else(|| Error::Consistency("singular change of basis".into()))?;
            let mut gamma_in_f = gamma_in_f;
            qpoly::trim(&mut gamma_in_f);
            let z_f = qpoly::compose_mod(&z_c, &gamma_in_f, &f.monic);
            return Ok(Extension::Same(z_f));
        }
        return Ok(Extension::New {
            minpoly: m,
            index,
            alpha: alpha_c,
            z: z_c,
        });
    }
    Err(Error::Consistency("no separating primitive element found".into()))
}

/// A field containing both `a` and `b` as recorded subfields.
pub(crate) fn common_field(a: &Arc<NumberField>, b: &Arc<NumberField>) -> Result<Arc<NumberField>> {
    if a.contains_subfield(b) {
        return Ok(a.clone());
    }
    if b.contains_subfield(a) {
        return Ok(b.clone());
    }
    let (big, small) = if a.degree() >= b.degree() { (a, b) } else { (b, a) };
    let psi: Vec<AlgebraicScalar> = small.monic.iter().map(|c| AlgebraicScalar::from_rational(c.clone())).collect();
    let mut z_rect = |level: usize| small.rect_at(level);
    match extend(Some(big), &psi, &mut z_rect)? {
        Extension::Same(z) => Ok(big.with_parent(small.clone(), z)),
        Extension::New {
            minpoly,
            index,
            alpha,
            z,
        } => NumberField::new(minpoly, index, vec![(big.clone(), alpha), (small.clone(), z)]),
        Extension::Rational(_) => Err(Error::Consistency("generator of a proper field is rational".into())),
    }
}
