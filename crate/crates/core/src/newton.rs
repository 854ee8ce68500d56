//! Newton iteration for difference polynomials over the Hahn field.
//!
//! Iterates stay finitely supported: each step adds one term `u t^eps`, so
//! every valuation below is computed exactly.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::binomial;

use crate::diffpoly::{KDiffPoly, MultiIndex, ResidueDiffPoly, SigmaExponent};
use crate::error::{Error, Result};
use crate::hahn::HahnSeries;
use crate::residue::{AlgebraicScalar, ResidueField};
use crate::rho::{Extended, RhoRational};

/// Hard ceiling on refinement steps, whatever the increments suggest.
pub const HARD_CAP: usize = 256;
/// Consecutive equal increment ratios that count as a geometric stall.
pub const STALL_RUN: usize = 3;
/// Longest interleaving of geometric progressions the stall test looks for.
pub const MAX_PERIOD: usize = 4;
/// Slack added to the estimated number of steps.
pub const CAP_SLACK: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonReport {
    pub epsilon: RhoRational,
    pub argmax: Vec<MultiIndex>,
    /// `eps_J` for every `J` with `f_(J)(b) != 0`.
    pub per_j: Vec<(MultiIndex, RhoRational)>,
    /// `f(b)`.
    pub value: HahnSeries,
    /// Nonzero `f_(J)(b)`.
    pub taylor: BTreeMap<MultiIndex, HahnSeries>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiftCertificate {
    pub root: HahnSeries,
    pub target: RhoRational,
    /// `v(f(root))`, infinite for an exact root.
    pub residual_valuation: Extended,
    pub steps: usize,
    pub branch_choices: Vec<AlgebraicScalar>,
    /// `eps` of every accepted step.
    pub epsilons: Vec<RhoRational>,
}

/// One accepted refinement `b -> a`.
#[derive(Clone, Debug)]
pub struct RefineStep {
    pub a: HahnSeries,
    pub report: EpsilonReport,
    pub choice: AlgebraicScalar,
    /// `v(f(a))`.
    pub residual: Extended,
    /// The report at `a` when `f(a) != 0`.
    pub next: Option<EpsilonReport>,
}

/// `sigma^j(b)^k`, memoized.
struct Powers {
    sig: Vec<HahnSeries>,
    cache: BTreeMap<(usize, i64), HahnSeries>,
}

impl Powers {
    fn new(b: &HahnSeries, orders: usize) -> Powers {
        Powers {
            sig: (0..orders.max(1)).map(|j| b.apply_sigma_pow(j)).collect(),
            cache: BTreeMap::new(),
        }
    }

    fn get(&mut self, j: usize, k: i64) -> HahnSeries {
        if k == 0 {
            return HahnSeries::one();
        }
        if let Some(v) = self.cache.get(&(j, k)) {
            return v.clone();
        }
        let v = &self.get(j, k - 1) * &self.sig[j];
        self.cache.insert((j, k), v.clone());
        v
    }
}

fn check_polynomial(f: &KDiffPoly) -> Result<()> {
    if f.nvars() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: f.nvars(),
        });
    }
    if f.terms().any(|(u, _)| !u[0].is_polynomial()) {
        return Err(Error::Precondition("Newton steps need nonnegative sigma-powers".into()));
    }
    if f.terms().all(|(u, _)| u[0].is_zero()) {
        return Err(Error::Precondition("constant polynomial".into()));
    }
    Ok(())
}

/// `f_(J)(b)` from the power cache; `J = 0` gives `f(b)`.
fn taylor_at(f: &KDiffPoly, j: &[usize], pw: &mut Powers) -> HahnSeries {
    let mut acc = HahnSeries::zero();
    'terms: for (u, c) in f.terms() {
        let e = &u[0];
        let mut scale = BigInt::from(1);
        let mut prod = c.clone();
        for idx in 0..e.len().max(j.len()) {
            let a = e.get(idx);
            let ji = j.get(idx).copied().unwrap_or(0) as i64;
            if a < ji {
                continue 'terms;
            }
            scale *= binomial(BigInt::from(a), BigInt::from(ji));
            if a > ji {
                prod = &prod * &pw.get(idx, a - ji);
                if prod.is_zero() {
                    continue 'terms;
                }
            }
        }
        let s = HahnSeries::constant(AlgebraicScalar::from_bigint(scale));
        acc = &acc + &(&prod * &s);
    }
    acc
}

fn finite_valuation(x: &HahnSeries) -> Result<RhoRational> {
    match x.valuation()? {
        Extended::Finite(v) => Ok(v),
        Extended::Infinity => Err(Error::Precondition("f(b) = 0: b is already a root".into())),
    }
}

/// `eps = max_J (v(f(b)) - v(f_(J)(b))) / |J|_rho` over `|J| >= 1`.
pub fn epsilon(f: &KDiffPoly, b: &HahnSeries) -> Result<EpsilonReport> {
    check_polynomial(f)?;
    if !b.is_exact() {
        return Err(Error::Precondition("the Newton start must be finitely supported".into()));
    }
    let mut pw = Powers::new(b, f.sigma_len());
    epsilon_with(f, &mut pw)
}

fn epsilon_with(f: &KDiffPoly, pw: &mut Powers) -> Result<EpsilonReport> {
    let value = taylor_at(f, &[], pw);
    let v = finite_valuation(&value)?;
    let mut per_j = Vec::new();
    let mut taylor = BTreeMap::new();
    for j in MultiIndex::all_below(&f.index_bound()) {
        let fj = taylor_at(f, &j.0, pw);
        if fj.is_zero() {
            continue;
        }
        let vj = finite_valuation(&fj)?;
        let eps = &(&v - &vj) / &j.rho_length();
        per_j.push((j.clone(), eps));
        taylor.insert(j, fj);
    }
    let epsilon = per_j
        .iter()
        .map(|(_, e)| e.clone())
        .max()
        .ok_or_else(|| Error::Consistency("no nonvanishing Taylor coefficient".into()))?;
    let argmax = per_j.iter().filter(|(_, e)| *e == epsilon).map(|(j, _)| j.clone()).collect();
    Ok(EpsilonReport {
        epsilon,
        argmax,
        per_j,
        value,
        taylor,
    })
}

/// `phi(x) = 1 + sum_I res(f_(I)(b) sigma^I(t^eps) / f(b)) x^I`; only the
/// argmax indices have residue-level terms.
pub fn phi(report: &EpsilonReport) -> Result<ResidueDiffPoly> {
    let (_, lc) = report.value.leading().ok_or(Error::ValuationUnknown)?;
    let inv = lc.checked_inv()?;
    let mut terms = vec![(vec![SigmaExponent::zero()], AlgebraicScalar::one())];
    for j in &report.argmax {
        let (_, c) = report.taylor[j].leading().ok_or(Error::ValuationUnknown)?;
        let e = SigmaExponent::new(j.0.iter().map(|&x| x as i64).collect());
        terms.push((vec![e], c * &inv));
    }
    Ok(ResidueDiffPoly::from_terms(1, terms))
}

fn step_to(f: &KDiffPoly, b: &HahnSeries, report: EpsilonReport, u: AlgebraicScalar) -> Result<RefineStep> {
    let eps = report.epsilon.clone();
    let a = b + &HahnSeries::monomial(u.clone(), eps.clone());
    let d = (&a - b).valuation()?;
    if d != Extended::Finite(eps.clone()) {
        return Err(Error::Consistency(format!("v(a - b) = {d}, expected {eps}")));
    }
    let vb = finite_valuation(&report.value)?;
    let mut pw = Powers::new(&a, f.sigma_len());
    let fa = taylor_at(f, &[], &mut pw);
    let residual = fa.valuation()?;
    if residual <= Extended::Finite(vb.clone()) {
        return Err(Error::Consistency(format!("v(f(a)) = {residual} does not exceed v(f(b)) = {vb}")));
    }
    let next = if fa.is_zero() {
        None
    } else {
        let r = epsilon_with(f, &mut pw)?;
        if r.epsilon <= eps {
            return Err(Error::Consistency(format!("eps did not increase: {} after {eps}", r.epsilon)));
        }
        Some(r)
    };
    Ok(RefineStep {
        a,
        report,
        choice: u,
        residual,
        next,
    })
}

/// One Newton step from `b` with the deterministic residue root.
pub fn refine(f: &KDiffPoly, b: &HahnSeries, field: &dyn ResidueField) -> Result<RefineStep> {
    let report = epsilon(f, b)?;
    refine_from(f, b, report, field)
}

fn refine_from(f: &KDiffPoly, b: &HahnSeries, report: EpsilonReport, field: &dyn ResidueField) -> Result<RefineStep> {
    let p = phi(&report)?;
    let u = field.solve_difference_univariate(&p).map_err(|e| match e {
        Error::MonomialInput => Error::Consistency("phi degenerated to a monomial".into()),
        e => e,
    })?;
    step_to(f, b, report, u)
}

/// Every branch of one Newton step: one per distinct residue root.
pub fn refine_all(f: &KDiffPoly, b: &HahnSeries, report: EpsilonReport, field: &dyn ResidueField) -> Result<Vec<RefineStep>> {
    let p = phi(&report)?;
    let roots = field.difference_roots(&p)?;
    roots.into_iter().map(|u| step_to(f, b, report.clone(), u)).collect()
}

/// Iteration cap from the slowest observed growth of the residual valuation.
fn cap(start: &RhoRational, target: &RhoRational, worst: Option<&RhoRational>) -> usize {
    let Some(d) = worst else { return HARD_CAP };
    let need = num_traits::Float::ceil((target - start).to_f64() / d.to_f64()).max(0.0);
    if !need.is_finite() || need > HARD_CAP as f64 {
        return HARD_CAP;
    }
    (CAP_SLACK + need as usize).min(HARD_CAP)
}

struct Prepared {
    g: KDiffPoly,
    shift_val: RhoRational,
    b0: HahnSeries,
}

/// Checks the preconditions and normalizes to nonnegative sigma-powers.
fn prepare(f: &KDiffPoly, w: &RhoRational, alpha: &AlgebraicScalar, target: &RhoRational, field: &dyn ResidueField) -> Result<Prepared> {
    if f.nvars() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: f.nvars(),
        });
    }
    if alpha.is_zero() {
        return Err(Error::Precondition("residue root must be nonzero".into()));
    }
    if target <= w {
        return Err(Error::Precondition(format!("target {target} must exceed w = {w}")));
    }
    let init = f.initial_form(core::slice::from_ref(w))?;
    if init.is_monomial() {
        return Err(Error::Precondition(format!("initial form at {w} is a monomial")));
    }
    if !field.eval(&init, core::slice::from_ref(alpha))?.is_zero() {
        return Err(Error::Precondition(format!("{alpha} is not a root of the initial form {init}")));
    }
    let (g, shift) = f.laurent_normalize();
    Ok(Prepared {
        g,
        shift_val: &shift[0].eval() * w,
        b0: HahnSeries::monomial(alpha.clone(), w.clone()),
    })
}

/// `K -> g_(K)(b)` for every `K` up to the index bound, kept exact only
/// below `lim_K = goal - |K|_r w`: an index whose value vanishes below that
/// has `eps_K < w` and cannot attain the maximum, since `eps > w` throughout.
#[derive(Clone)]
struct Table {
    vals: BTreeMap<Vec<usize>, HahnSeries>,
    lim: BTreeMap<Vec<usize>, RhoRational>,
    zero: Vec<usize>,
}

impl Table {
    fn new(g: &KDiffPoly, b0: &HahnSeries, goal: &RhoRational, w: &RhoRational) -> Table {
        let bound = g.index_bound();
        let zero = vec![0; bound.len()];
        let mut pw = Powers::new(b0, g.sigma_len());
        let mut vals = BTreeMap::new();
        let mut lim = BTreeMap::new();
        let keys = core::iter::once(zero.clone()).chain(MultiIndex::all_below(&bound).into_iter().map(|j| j.0));
        for k in keys {
            let l = goal - &(&MultiIndex(k.clone()).rho_length() * w);
            vals.insert(k.clone(), taylor_at(g, &k, &mut pw).truncate(&l));
            lim.insert(k, l);
        }
        Table { vals, lim, zero }
    }

    fn value(&self) -> &HahnSeries {
        &self.vals[&self.zero]
    }

    fn report(&self) -> Result<EpsilonReport> {
        let value = self.value().clone();
        let v = finite_valuation(&value)?;
        let mut per_j = Vec::new();
        let mut taylor = BTreeMap::new();
        for (k, s) in &self.vals {
            if *k == self.zero || s.has_no_terms() {
                continue;
            }
            let j = MultiIndex(k.clone());
            let eps = &(&v - &finite_valuation(s)?) / &j.rho_length();
            per_j.push((j.clone(), eps));
            taylor.insert(j, s.clone());
        }
        per_j.sort_by(|a, b| a.0.length().cmp(&b.0.length()).then_with(|| a.0.cmp(&b.0)));
        let epsilon = per_j
            .iter()
            .map(|(_, e)| e.clone())
            .max()
            .ok_or_else(|| Error::Consistency("no Taylor coefficient with eps above w".into()))?;
        let argmax = per_j.iter().filter(|(_, e)| *e == epsilon).map(|(j, _)| j.clone()).collect();
        Ok(EpsilonReport {
            epsilon,
            argmax,
            per_j,
            value,
            taylor,
        })
    }

    /// The table at `b + u t^eps`: `g_(I)(b + d) = sum_J C(I+J, I) g_(I+J)(b) sigma^J(d)`.
    fn shifted(&self, u: &AlgebraicScalar, eps: &RhoRational, field: &dyn ResidueField) -> Table {
        let len = self.zero.len();
        let mut sig = Vec::with_capacity(len);
        let mut x = u.clone();
        for _ in 0..len {
            sig.push(x.clone());
            x = field.sigma_bar(&x);
        }
        let mut vals = BTreeMap::new();
        for (i, li) in &self.lim {
            let mut acc = HahnSeries::zero();
            for (k, s) in &self.vals {
                if s.has_no_terms() || k.iter().zip(i).any(|(a, b)| a < b) {
                    continue;
                }
                let j: Vec<usize> = k.iter().zip(i).map(|(a, b)| a - b).collect();
                let mut c = AlgebraicScalar::one();
                let mut scale = BigInt::from(1);
                for (idx, (&jj, &kk)) in j.iter().zip(k).enumerate() {
                    if jj > 0 {
                        c = &c * &sig[idx].pow(jj as i64);
                        scale *= binomial(BigInt::from(kk), BigInt::from(jj));
                    }
                }
                let c = &c * &AlgebraicScalar::from_bigint(scale);
                let e = eps * &MultiIndex(j).rho_length();
                acc = &acc + &s.shift(&e).scale(&c);
            }
            vals.insert(i.clone(), acc.truncate(li));
        }
        Table {
            vals,
            lim: self.lim.clone(),
            zero: self.zero.clone(),
        }
    }
}

/// A tracked Newton iterate.
#[derive(Clone)]
struct Node {
    cert: LiftCertificate,
    table: Table,
    report: EpsilonReport,
    /// Increments of `v(g(b))` so far.
    incs: Vec<RhoRational>,
}

enum Advance {
    Done(LiftCertificate),
    Open(Node),
}

struct Lifter<'a> {
    p: Prepared,
    w: RhoRational,
    target: RhoRational,
    /// `g` needs `v(g(b)) > goal`.
    goal: RhoRational,
    field: &'a dyn ResidueField,
}

impl<'a> Lifter<'a> {
    fn new(f: &'a KDiffPoly, w: &RhoRational, alpha: &AlgebraicScalar, target: &RhoRational, field: &'a dyn ResidueField) -> Result<Self> {
        let p = prepare(f, w, alpha, target, field)?;
        let goal = target + &p.shift_val;
        Ok(Lifter {
            p,
            w: w.clone(),
            target: target.clone(),
            goal,
            field,
        })
    }

    /// The start `alpha t^w`, or a finished certificate when it already is one.
    fn start(&self) -> Result<Advance> {
        let cert = LiftCertificate {
            root: self.p.b0.clone(),
            target: self.target.clone(),
            residual_valuation: Extended::Infinity,
            steps: 0,
            branch_choices: Vec::new(),
            epsilons: Vec::new(),
        };
        // one above the goal, so an empty value means v(g(b)) > goal
        let table = Table::new(&self.p.g, &self.p.b0, &(&self.goal + &RhoRational::one()), &self.w);
        if table.value().has_no_terms() {
            return self.finish(cert);
        }
        let report = table.report()?;
        if report.epsilon <= self.w {
            return Err(Error::Consistency(format!("first eps {} does not exceed w = {}", report.epsilon, self.w)));
        }
        Ok(Advance::Open(Node {
            cert,
            table,
            report,
            incs: Vec::new(),
        }))
    }

    fn finish(&self, mut cert: LiftCertificate) -> Result<Advance> {
        cert.residual_valuation = self.exact_residual(&cert.root)?;
        if cert.residual_valuation <= Extended::Finite(self.target.clone()) {
            return Err(Error::Consistency(format!("residual {} does not exceed the target", cert.residual_valuation)));
        }
        Ok(Advance::Done(cert))
    }

    /// `v(f(root))` by truncated evaluation, widening the window as needed.
    fn exact_residual(&self, root: &HahnSeries) -> Result<Extended> {
        let pt = core::slice::from_ref(root);
        for extra in [2, 4, 8, 16] {
            let bound = &self.goal + &RhoRational::from_int(extra);
            let v = self.p.g.evaluate(pt, Some(&bound))?;
            if !v.has_no_terms() {
                return Ok(residual_of(&self.p, &v.valuation()?));
            }
        }
        Ok(residual_of(&self.p, &self.p.g.evaluate(pt, None)?.valuation()?))
    }

    fn roots(&self, report: &EpsilonReport, all: bool) -> Result<Vec<AlgebraicScalar>> {
        let phi = phi(report)?;
        let r = if all {
            self.field.difference_roots(&phi)
        } else {
            self.field.solve_difference_univariate(&phi).map(|u| vec![u])
        };
        r.map_err(|e| match e {
            Error::MonomialInput => Error::Consistency("phi degenerated to a monomial".into()),
            e => e,
        })
    }

    /// One checked step `b -> b + u t^eps`.
    fn advance(&self, node: &Node, u: AlgebraicScalar) -> Result<Advance> {
        let eps = node.report.epsilon.clone();
        let mut cert = node.cert.clone();
        let a = &cert.root + &HahnSeries::monomial(u.clone(), eps.clone());
        if (&a - &cert.root).valuation()? != Extended::Finite(eps.clone()) {
            return Err(Error::Consistency(format!("v(a - b) differs from eps = {eps}")));
        }
        cert.root = a;
        cert.steps += 1;
        cert.epsilons.push(eps.clone());
        cert.branch_choices.push(u.clone());
        let table = node.table.shifted(&u, &eps, self.field);
        if table.value().has_no_terms() {
            return self.finish(cert);
        }
        let vb = finite_valuation(&node.report.value)?;
        let va = finite_valuation(table.value())?;
        if va <= vb {
            return Err(Error::Consistency(format!("v(f(a)) = {va} does not exceed v(f(b)) = {vb}")));
        }
        if va > self.goal {
            return self.finish(cert);
        }
        let report = table.report()?;
        if report.epsilon <= eps {
            return Err(Error::Consistency(format!("eps did not increase: {} after {eps}", report.epsilon)));
        }
        cert.residual_valuation = residual_of(&self.p, &Extended::Finite(va.clone()));
        let mut incs = node.incs.clone();
        incs.push(&va - &vb);
        let next = Node { cert, table, report, incs };
        self.check_progress(&next)?;
        Ok(Advance::Open(next))
    }

    /// Stops a geometric stall below the goal, or a run past the cap.
    fn check_progress(&self, node: &Node) -> Result<()> {
        let res = finite_valuation(&node.report.value)?;
        if let Some(limit) = geometric_limit(&res, &node.incs) {
            if limit <= self.goal {
                return Err(Error::Stalled {
                    steps: node.cert.steps,
                    limit: &limit - &self.p.shift_val,
                });
            }
        }
        let start = node.incs.iter().fold(res, |s, d| &s - d);
        let limit = cap(&start, &self.goal, node.incs.iter().min());
        if node.cert.steps >= limit {
            return Err(Error::IterationCap { cap: limit });
        }
        Ok(())
    }
}

/// Residual valuation of the original Laurent polynomial from that of `g`.
fn residual_of(p: &Prepared, vg: &Extended) -> Extended {
    match vg {
        Extended::Finite(v) => Extended::Finite(v - &p.shift_val),
        Extended::Infinity => Extended::Infinity,
    }
}

/// A root `a` with `v(a) = w`, residue of `t^(-w) a` equal to `alpha` and
/// `v(f(a)) > target`, by Newton steps from `alpha t^w`.
pub fn lift_univariate(f: &KDiffPoly, w: &RhoRational, alpha: &AlgebraicScalar, target: &RhoRational, field: &dyn ResidueField) -> Result<LiftCertificate> {
    let lf = Lifter::new(f, w, alpha, target, field)?;
    let mut node = match lf.start()? {
        Advance::Done(c) => return Ok(c),
        Advance::Open(n) => n,
    };
    loop {
        let u = lf.roots(&node.report, false)?.swap_remove(0);
        node = match lf.advance(&node, u)? {
            Advance::Done(c) => return Ok(c),
            Advance::Open(n) => n,
        };
    }
}

/// When the increments are `p` interleaved geometric progressions with one
/// ratio `q < 1` (`d_k = q d_(k-p)` for the last [`STALL_RUN`] steps), the
/// limit `res + (d_(k-p+1) + ... + d_k) q / (1 - q)` the residuals approach.
fn geometric_limit(res: &RhoRational, incs: &[RhoRational]) -> Option<RhoRational> {
    let one = RhoRational::one();
    for period in 1..=MAX_PERIOD {
        if incs.len() < period + STALL_RUN {
            return None;
        }
        let k = incs.len() - 1;
        let q = &incs[k] / &incs[k - period];
        if q >= one || (1..STALL_RUN).any(|i| &incs[k - i] / &incs[k - i - period] != q) {
            continue;
        }
        let tail = incs[k + 1 - period..].iter().fold(RhoRational::zero(), |s, d| &s + d);
        return Some(res + &(&(&tail * &q) / &(&one - &q)));
    }
    None
}

/// Outcome of branch exploration.
#[derive(Clone, Debug, Default)]
pub struct Branches {
    pub lifts: Vec<LiftCertificate>,
    /// Branch choices and residual limit of branches that stalled.
    pub stalled: Vec<(Vec<AlgebraicScalar>, RhoRational)>,
}

/// All branches: every residue root at every step, breadth first. Fails
/// once more than `budget` iterates have been expanded.
pub fn lift_univariate_branches(
    f: &KDiffPoly,
    w: &RhoRational,
    alpha: &AlgebraicScalar,
    target: &RhoRational,
    field: &dyn ResidueField,
    budget: usize,
) -> Result<Branches> {
    let lf = Lifter::new(f, w, alpha, target, field)?;
    let mut out = Branches::default();
    let first = match lf.start()? {
        Advance::Done(c) => {
            out.lifts.push(c);
            return Ok(out);
        }
        Advance::Open(n) => n,
    };
    let mut queue = VecDeque::from([first]);
    let mut expanded = 0usize;
    while let Some(node) = queue.pop_front() {
        expanded += 1;
        if expanded > budget {
            return Err(Error::IterationCap { cap: budget });
        }
        for u in lf.roots(&node.report, true)? {
            let mut choices = node.cert.branch_choices.clone();
            choices.push(u.clone());
            match lf.advance(&node, u) {
                Ok(Advance::Done(c)) => out.lifts.push(c),
                Ok(Advance::Open(n)) => queue.push_back(n),
                Err(Error::Stalled { limit, .. }) => out.stalled.push((choices, limit)),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// A point `y` of `(K*)^n` with `v(y) = w`, residues `alpha` and
/// `v(f(y)) > target`: substitute `x_i -> x_i x_n^(l^i)`, fix the first
/// `n - 1` coordinates as `t^(w'_i) alpha'_i`, lift the last one, undo.
///
/// When that lift stalls or hits its cap, each coordinate `k` (last first)
/// is tried on its own: the others are fixed as `alpha_i t^(w_i)` and `x_k`
/// is lifted directly, which works whenever `in_w(f)(alpha)` stays a
/// nontrivial equation in `x_k`. The first error is returned if none does.
pub fn lift_multivariate(
    f: &KDiffPoly,
    w: &[RhoRational],
    alpha: &[AlgebraicScalar],
    target: &RhoRational,
    field: &dyn ResidueField,
) -> Result<Vec<LiftCertificate>> {
    let n = f.nvars();
    if w.len() != n || alpha.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: w.len().min(alpha.len()),
        });
    }
    if n == 1 {
        return Ok(vec![lift_univariate(f, &w[0], &alpha[0], target, field)?]);
    }
    if alpha.iter().any(|a| a.is_zero()) {
        return Err(Error::Precondition("residue point must lie in (k*)^n".into()));
    }
    let init = f.initial_form(w)?;
    if init.is_monomial() {
        return Err(Error::Precondition("initial form is a monomial".into()));
    }
    if !field.eval(&init, alpha)?.is_zero() {
        return Err(Error::Precondition("alpha is not a root of the initial form".into()));
    }
    let first = match lift_substituted(f, w, alpha, target, field) {
        Err(e @ (Error::Stalled { .. } | Error::IterationCap { .. })) => e,
        other => return other,
    };
    for k in (0..n).rev() {
        if let Ok(c) = lift_coordinate(f, w, alpha, target, field, k) {
            return Ok(c);
        }
    }
    Err(first)
}

fn lift_substituted(
    f: &KDiffPoly,
    w: &[RhoRational],
    alpha: &[AlgebraicScalar],
    target: &RhoRational,
    field: &dyn ResidueField,
) -> Result<Vec<LiftCertificate>> {
    let n = f.nvars();
    let l = f.choose_l();
    let g = f.apply_phi_l(l);
    let last = n - 1;
    let mut fixed = Vec::with_capacity(last);
    let mut powers = Vec::with_capacity(last);
    for i in 0..last {
        let k = (l as i64).checked_pow(i as u32 + 1).ok_or_else(|| Error::Precondition("substitution exponent overflow".into()))?;
        let wi = &w[i] - &(&w[last] * &RhoRational::from_int(k));
        let ai = &alpha[i] * &alpha[last].pow(-k);
        fixed.push(HahnSeries::monomial(ai, wi));
        powers.push(k);
    }
    let h = g.substitute_prefix(&fixed)?;
    let c = lift_univariate(&h, &w[last], &alpha[last], target, field)?;
    let mut out = Vec::with_capacity(n);
    for i in 0..last {
        let y = &fixed[i] * &c.root.pow_trunc(powers[i] as u32, None);
        out.push(LiftCertificate {
            root: y,
            ..c.clone()
        });
    }
    out.push(c);
    Ok(out)
}

/// Fixes every coordinate but `k` at `alpha_i t^(w_i)` and lifts `x_k`.
fn lift_coordinate(
    f: &KDiffPoly,
    w: &[RhoRational],
    alpha: &[AlgebraicScalar],
    target: &RhoRational,
    field: &dyn ResidueField,
    k: usize,
) -> Result<Vec<LiftCertificate>> {
    let n = f.nvars();
    // move x_k to the end so the others form a prefix
    let order: Vec<usize> = (0..n).filter(|&i| i != k).chain([k]).collect();
    let moved = KDiffPoly::from_terms(n, f.terms().map(|(u, c)| (order.iter().map(|&i| u[i].clone()).collect(), c.clone())));
    let fixed: Vec<HahnSeries> = order[..n - 1].iter().map(|&i| HahnSeries::monomial(alpha[i].clone(), w[i].clone())).collect();
    let h = moved.substitute_prefix(&fixed)?;
    let c = lift_univariate(&h, &w[k], &alpha[k], target, field)?;
    let mut out: Vec<LiftCertificate> = (0..n)
        .map(|i| LiftCertificate {
            root: HahnSeries::monomial(alpha[i].clone(), w[i].clone()),
            ..c.clone()
        })
        .collect();
    out[k] = c;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::IdentityField;

    fn se(a: &[i64]) -> SigmaExponent {
        SigmaExponent::new(a.to_vec())
    }

    fn t(e: RhoRational) -> HahnSeries {
        HahnSeries::splitting(&e)
    }

    fn q(n: i64, d: i64) -> RhoRational {
        RhoRational::from_ratio(n, d)
    }

    fn x_minus_t() -> KDiffPoly {
        KDiffPoly::from_terms(1, vec![(vec![se(&[1])], HahnSeries::one()), (vec![se(&[])], -t(q(1, 1)))])
    }

    fn x1s_minus_t() -> KDiffPoly {
        KDiffPoly::from_terms(1, vec![(vec![se(&[1, 1])], HahnSeries::one()), (vec![se(&[])], -t(q(1, 1)))])
    }

    fn sqrt_1_plus_t() -> KDiffPoly {
        KDiffPoly::from_terms(
            1,
            vec![(vec![se(&[2])], HahnSeries::one()), (vec![se(&[])], -(&HahnSeries::one() + &t(q(1, 1))))],
        )
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon(&x_minus_t(), &HahnSeries::zero()).unwrap().epsilon, q(1, 1));
        let f = KDiffPoly::from_terms(1, vec![(vec![se(&[2])], HahnSeries::one()), (vec![se(&[])], -t(q(2, 1)))]);
        let r = epsilon(&f, &HahnSeries::zero()).unwrap();
        assert_eq!(r.epsilon, q(1, 1));
        assert_eq!(r.per_j.len(), 1);
        let r = epsilon(&x1s_minus_t(), &HahnSeries::zero()).unwrap();
        assert_eq!(r.epsilon, RhoRational::from_int_poly(&[1, 1]).inv().unwrap());
        assert_eq!(r.argmax, vec![MultiIndex(vec![1, 1])]);
    }

    #[test]
    fn refine_examples() {
        let st = refine(&x_minus_t(), &HahnSeries::zero(), &IdentityField).unwrap();
        assert_eq!(st.a, t(q(1, 1)));
        assert_eq!(st.residual, Extended::Infinity);
        let st = refine(&sqrt_1_plus_t(), &HahnSeries::one(), &IdentityField).unwrap();
        assert_eq!(st.a, &HahnSeries::one() + &HahnSeries::monomial(AlgebraicScalar::from_ratio(1, 2), q(1, 1)));
        assert_eq!(st.residual, Extended::Finite(q(2, 1)));
        let st = refine(&x1s_minus_t(), &HahnSeries::zero(), &IdentityField).unwrap();
        assert_eq!(st.residual, Extended::Infinity);
        assert_eq!(st.choice, AlgebraicScalar::from_int(-1));
    }

    #[test]
    fn lifts() {
        let c = lift_univariate(&x_minus_t(), &q(1, 1), &AlgebraicScalar::one(), &q(6, 1), &IdentityField).unwrap();
        assert_eq!(c.root, t(q(1, 1)));
        assert_eq!(c.residual_valuation, Extended::Infinity);
        let w = RhoRational::from_int_poly(&[1, 1]).inv().unwrap();
        let c = lift_univariate(&x1s_minus_t(), &w, &AlgebraicScalar::one(), &(&w + &q(5, 1)), &IdentityField).unwrap();
        assert_eq!(c.root, t(w));
        assert_eq!(c.steps, 0);
        let c = lift_univariate(&sqrt_1_plus_t(), &q(0, 1), &AlgebraicScalar::one(), &q(3, 1), &IdentityField).unwrap();
        let expect = [(0, 1, 1), (1, 1, 2), (2, -1, 8), (3, 1, 16)];
        for (e, n, d) in expect {
            assert_eq!(c.root.coefficient(&q(e, 1)), AlgebraicScalar::from_ratio(n, d));
        }
        assert!(c.residual_valuation > Extended::Finite(q(3, 1)));
        assert!(c.epsilons.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn multivariate_lifts() {
        let f = KDiffPoly::from_terms(
            2,
            vec![
                (vec![se(&[1]), se(&[])], HahnSeries::one()),
                (vec![se(&[]), se(&[1])], HahnSeries::one()),
                (vec![se(&[]), se(&[])], HahnSeries::one()),
            ],
        );
        let a = [AlgebraicScalar::one(), AlgebraicScalar::from_int(-2)];
        let y = lift_multivariate(&f, &[q(0, 1), q(0, 1)], &a, &q(5, 1), &IdentityField).unwrap();
        assert_eq!(y[0].root, HahnSeries::one());
        assert_eq!(y[1].root, HahnSeries::from_int(-2));
        let g = KDiffPoly::from_terms(2, vec![(vec![se(&[1]), se(&[1])], HahnSeries::one()), (vec![se(&[]), se(&[])], -t(q(1, 1)))]);
        let one = AlgebraicScalar::one();
        let y = lift_multivariate(&g, &[q(1, 2), q(1, 2)], &[one.clone(), one], &q(5, 1), &IdentityField).unwrap();
        assert_eq!(y[0].root, t(q(1, 2)));
        assert_eq!(y[1].root, t(q(1, 2)));
    }

    #[test]
    fn branches_are_distinct() {
        // x^2 - t - t^2 ... from 0 all square-root branches
        let f = KDiffPoly::from_terms(
            1,
            vec![(vec![se(&[3])], HahnSeries::one()), (vec![se(&[1])], -t(q(1, 1))), (vec![se(&[])], t(q(3, 1)))],
        );
        let cs = lift_univariate_branches(&f, &q(1, 2), &AlgebraicScalar::one(), &q(4, 1), &IdentityField, 200).unwrap().lifts;
        assert!(!cs.is_empty());
        for (i, a) in cs.iter().enumerate() {
            for b in &cs[i + 1..] {
                assert_ne!(a.root, b.root);
            }
        }
    }

    #[test]
    fn preconditions() {
        let e = lift_univariate(&x_minus_t(), &q(1, 1), &AlgebraicScalar::from_int(2), &q(3, 1), &IdentityField);
        assert!(matches!(e, Err(Error::Precondition(_))));
        let e = lift_univariate(&x_minus_t(), &q(1, 1), &AlgebraicScalar::one(), &q(1, 2), &IdentityField);
        assert!(matches!(e, Err(Error::Precondition(_))));
    }
}
