//! Exact polyhedral geometry over Q(r): hulls, lower faces of lifted point
//! sets, regular subdivisions, dual complexes and tropical hypersurfaces.
//!
//! Facets are found by scanning point subsets, which is plenty at desk scale
//! (a handful of ambient dimensions, a few dozen points).

mod linalg;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::diffpoly::{eval_exponent, Coefficient, DiffPolynomial};
use crate::error::{Error, Result};
use crate::rho::RhoRational as R;
use linalg::{dot, null_space, rank, solve_any, sub, Frame};

pub type RhoPoint = Vec<R>;

/// `normal . x <= bound`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Halfspace {
    pub normal: RhoPoint,
    pub bound: R,
}

impl Halfspace {
    pub fn contains(&self, w: &[R]) -> bool {
        dot(&self.normal, w) <= self.bound
    }

    pub fn is_tight(&self, w: &[R]) -> bool {
        dot(&self.normal, w) == self.bound
    }
}

/// A cell of a complex. `support` lists the indices of the defining points
/// (the lower face it comes from), `sample` is a relative-interior point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyhedron {
    pub dim: usize,
    pub h: Vec<Halfspace>,
    pub vertices: Option<Vec<RhoPoint>>,
    pub faces: Vec<usize>,
    pub support: Vec<usize>,
    pub sample: RhoPoint,
}

impl Polyhedron {
    pub fn contains(&self, w: &[R]) -> bool {
        self.h.iter().all(|hs| hs.contains(w))
    }

    pub fn is_bounded(&self) -> bool {
        self.vertices.is_some()
    }

    pub fn ambient(&self) -> usize {
        self.sample.len()
    }

    /// Dimension of the affine span: the constraints tight at a relative
    /// interior point are the implicit equalities.
    pub fn affine_dim(&self) -> usize {
        if let Some(v) = &self.vertices {
            let refs: Vec<&[R]> = v.iter().map(|p| p.as_slice()).collect();
            return Frame::new(&refs).dim();
        }
        let tight: Vec<Vec<R>> = self.h.iter().filter(|hs| hs.is_tight(&self.sample)).map(|hs| hs.normal.clone()).collect();
        self.ambient() - rank(&tight, self.ambient())
    }
}

/// Cells with their face relation; `faces` of a cell index its proper faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyComplex {
    pub ambient: usize,
    pub cells: Vec<Polyhedron>,
    /// Notes about degenerate input, e.g. repeated points.
    pub diagnostics: Vec<String>,
}

impl PolyComplex {
    pub fn empty(ambient: usize) -> PolyComplex {
        PolyComplex {
            ambient,
            cells: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Largest cell dimension.
    pub fn dim(&self) -> Option<usize> {
        self.cells.iter().map(|c| c.dim).max()
    }

    pub fn contains(&self, w: &[R]) -> bool {
        self.cells.iter().any(|c| c.contains(w))
    }

    /// Indices of cells containing `w`.
    pub fn locate(&self, w: &[R]) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].contains(w)).collect()
    }

    /// Cells that are not a proper face of another cell.
    pub fn facets(&self) -> Vec<usize> {
        let mut is_face = vec![false; self.cells.len()];
        for c in &self.cells {
            for &f in &c.faces {
                is_face[f] = true;
            }
        }
        (0..self.cells.len()).filter(|&i| !is_face[i]).collect()
    }

    pub fn cells_of_dim(&self, k: usize) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].dim == k).collect()
    }

    /// Pure of dimension `k`: every facet has dimension `k`.
    pub fn is_pure(&self, k: usize) -> bool {
        self.facets().iter().all(|&i| self.cells[i].dim == k)
    }
}

/// Cells of dimension at most `k`, face relation restricted.
pub fn skeleton(c: &PolyComplex, k: usize) -> PolyComplex {
    let keep: Vec<usize> = (0..c.cells.len()).filter(|&i| c.cells[i].dim <= k).collect();
    let remap: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let cells = keep
        .iter()
        .map(|&i| {
            let mut cell = c.cells[i].clone();
            cell.faces = cell.faces.iter().filter_map(|f| remap.get(f).copied()).collect();
            cell
        })
        .collect();
    PolyComplex {
        ambient: c.ambient,
        cells,
        diagnostics: c.diagnostics.clone(),
    }
}

fn combinations(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Facets of a full-dimensional configuration in `R^e`: inner normal `a`,
/// offset `b` with `a . q >= b` on all points, and the points on the facet.
fn facets_full(pts: &[RhoPoint], e: usize) -> Vec<(RhoPoint, R, Vec<usize>)> {
    let mut out: Vec<(RhoPoint, R, Vec<usize>)> = Vec::new();
    if e == 0 {
        return out;
    }
    combinations(pts.len(), e, |c| {
        if out.iter().any(|(_, _, s)| c.iter().all(|i| s.contains(i))) {
            return;
        }
        let rows: Vec<RhoPoint> = c[1..].iter().map(|&k| sub(&pts[k], &pts[c[0]])).collect();
        let ns = null_space(&rows, e);
        if ns.len() != 1 {
            return;
        }
        let mut a = ns[0].clone();
        let s: Vec<R> = pts.iter().map(|q| dot(&a, &sub(q, &pts[c[0]]))).collect();
        let pos = s.iter().any(|x| x.is_positive());
        let neg = s.iter().any(|x| x.is_negative());
        if pos && neg {
            return;
        }
        if neg {
            a = a.iter().map(|x| -x).collect();
        }
        let set: Vec<usize> = (0..pts.len()).filter(|&j| s[j].is_zero()).collect();
        let b = dot(&a, &pts[c[0]]);
        out.push((a, b, set));
    });
    out
}

fn frame_of(points: &[RhoPoint], idx: &[usize]) -> Frame {
    let refs: Vec<&[R]> = idx.iter().map(|&i| points[i].as_slice()).collect();
    Frame::new(&refs)
}

/// All nonempty faces of `conv(points[idx])`, keyed by point set.
fn face_lattice(points: &[RhoPoint], idx: Vec<usize>, out: &mut BTreeMap<Vec<usize>, usize>) {
    if out.contains_key(&idx) {
        return;
    }
    let fr = frame_of(points, &idx);
    let e = fr.dim();
    out.insert(idx.clone(), e);
    if e == 0 {
        return;
    }
    let local: Vec<RhoPoint> = idx.iter().map(|&i| fr.coords(&points[i])).collect();
    for (_, _, set) in facets_full(&local, e) {
        face_lattice(points, set.iter().map(|&j| idx[j]).collect(), out);
    }
}

/// H-description of `conv(points[idx])` in the ambient space.
fn hull_h(points: &[RhoPoint], idx: &[usize]) -> Vec<Halfspace> {
    let fr = frame_of(points, idx);
    let mut h = Vec::new();
    for c in fr.normals() {
        let b = dot(&c, &fr.origin);
        h.push(Halfspace {
            normal: c.iter().map(|x| -x).collect(),
            bound: -&b,
        });
        h.push(Halfspace { normal: c, bound: b });
    }
    if fr.dim() > 0 {
        let local: Vec<RhoPoint> = idx.iter().map(|&i| fr.coords(&points[i])).collect();
        for (a, off, _) in facets_full(&local, fr.dim()) {
            let w = fr.lift_covector(&a);
            let b = &dot(&w, &fr.origin) + &off;
            h.push(Halfspace {
                normal: w.iter().map(|x| -x).collect(),
                bound: -&b,
            });
        }
    }
    h
}

fn centroid(points: &[RhoPoint]) -> RhoPoint {
    let n = points[0].len();
    let k = R::from_int(points.len() as i64);
    (0..n)
        .map(|c| {
            let s = points.iter().fold(R::zero(), |s, p| &s + &p[c]);
            &s / &k
        })
        .collect()
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// A bounded cell for each face of a point configuration (sorted by
/// dimension, then point set), faces linked.
fn bounded_complex(points: &[RhoPoint], faces: &[(Vec<usize>, usize)]) -> Vec<Polyhedron> {
    faces
        .iter()
        .map(|(set, dim)| {
            let verts: Vec<RhoPoint> = faces
                .iter()
                .filter(|(s, d)| *d == 0 && is_subset(s, set))
                .map(|(s, _)| points[s[0]].clone())
                .collect();
            Polyhedron {
                dim: *dim,
                h: hull_h(points, set),
                sample: centroid(&verts),
                vertices: Some(verts),
                faces: (0..faces.len()).filter(|&j| faces[j].0 != *set && is_subset(&faces[j].0, set)).collect(),
                support: set.clone(),
            }
        })
        .collect()
}

fn sorted_faces(m: BTreeMap<Vec<usize>, usize>) -> Vec<(Vec<usize>, usize)> {
    let mut v: Vec<(Vec<usize>, usize)> = m.into_iter().collect();
    v.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    v
}

/// Removes repeated points (keeping the least weight) and reports them.
fn dedup(points: &[RhoPoint], weights: &[R]) -> (Vec<RhoPoint>, Vec<R>, Vec<String>) {
    let mut seen: BTreeMap<RhoPoint, usize> = BTreeMap::new();
    let mut pts = Vec::new();
    let mut ws: Vec<R> = Vec::new();
    let mut diag = Vec::new();
    for (i, (p, w)) in points.iter().zip(weights).enumerate() {
        match seen.get(p) {
            Some(&j) => {
                diag.push(format!("point {i} repeats point {j}; kept the smaller weight"));
                if *w < ws[j] {
                    ws[j] = w.clone();
                }
            }
            None => {
                seen.insert(p.clone(), pts.len());
                pts.push(p.clone());
                ws.push(w.clone());
            }
        }
    }
    (pts, ws, diag)
}

/// Convex hull with its full face lattice: one bounded cell per nonempty
/// face, the polytope itself last.
pub fn convex_hull(points: &[RhoPoint]) -> Result<PolyComplex> {
    let ambient = points.first().ok_or(Error::EmptyPolynomial)?.len();
    let zeros = vec![R::zero(); points.len()];
    let (pts, _, diagnostics) = dedup(points, &zeros);
    let mut lat = BTreeMap::new();
    face_lattice(&pts, (0..pts.len()).collect(), &mut lat);
    let faces = sorted_faces(lat);
    Ok(PolyComplex {
        ambient,
        cells: bounded_complex(&pts, &faces),
        diagnostics,
    })
}

/// A lower face of a lifted configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerFace {
    /// All points on the face.
    pub points: Vec<usize>,
    pub vertices: Vec<usize>,
    pub dim: usize,
}

/// The lower faces of `P_val` with everything the complexes need.
struct Lower {
    n: usize,
    u: Vec<RhoPoint>,
    h: Vec<R>,
    faces: Vec<(Vec<usize>, usize)>,
    samples: Vec<RhoPoint>,
    newton_facets: Option<Vec<Vec<usize>>>,
    diagnostics: Vec<String>,
}

fn lower(points: &[RhoPoint], weights: &[R]) -> Result<Lower> {
    if points.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            found: weights.len(),
        });
    }
    let n = points.first().ok_or(Error::EmptyPolynomial)?.len();
    let (u, h, diagnostics) = dedup(points, weights);
    let m = u.len();
    let all: Vec<usize> = (0..m).collect();
    let fr = frame_of(&u, &all);
    let d = fr.dim();
    let lam: Vec<RhoPoint> = u.iter().map(|p| fr.coords(p)).collect();
    let lifted: Vec<RhoPoint> = lam
        .iter()
        .zip(&h)
        .map(|(l, w)| {
            let mut v = l.clone();
            v.push(w.clone());
            v
        })
        .collect();
    let big_d = frame_of(&lifted, &all).dim();
    let newton = facets_full(&lam, d);
    let newton_facets = (d == n).then(|| newton.iter().map(|f| f.2.clone()).collect());
    let mut lat = BTreeMap::new();
    let faces;
    let mut samples = Vec::new();
    if big_d == d + 1 {
        let all_facets = facets_full(&lifted, d + 1);
        for (a, _, set) in &all_facets {
            if a[d].is_positive() {
                face_lattice(&lifted, set.clone(), &mut lat);
            }
        }
        faces = sorted_faces(lat);
        for (s, _) in &faces {
            let containing: Vec<&RhoPoint> = all_facets.iter().filter(|f| is_subset(s, &f.2)).map(|f| &f.0).collect();
            let (mut sl, mut so) = (R::zero(), R::zero());
            for a in &containing {
                if a[d].is_positive() {
                    sl = &sl + &a[d];
                } else {
                    so = &so + &a[d];
                }
            }
            if !sl.is_positive() {
                return Err(Error::Consistency("lower face outside every lower facet".into()));
            }
            let weight_lower = if so.is_negative() { &R::one() + &(&(-&so) / &sl) } else { R::one() };
            let mut acc = vec![R::zero(); d + 1];
            for a in &containing {
                let k = if a[d].is_positive() { weight_lower.clone() } else { R::one() };
                acc = linalg::add(&acc, &linalg::scale(a, &k));
            }
            let s_last = acc[d].clone();
            let wl: Vec<R> = acc[..d].iter().map(|x| x / &s_last).collect();
            samples.push(fr.lift_covector(&wl));
        }
    } else {
        // heights affine on the Newton points: h = g . lambda + h0
        let rows: Vec<RhoPoint> = lam
            .iter()
            .map(|l| {
                let mut r = l.clone();
                r.push(R::one());
                r
            })
            .collect();
        let gh = solve_any(&rows, &h, d + 1).ok_or_else(|| Error::Consistency("heights not affine".into()))?;
        let g = &gh[..d];
        face_lattice(&lam, all.clone(), &mut lat);
        faces = sorted_faces(lat);
        for (s, _) in &faces {
            let mut acc: Vec<R> = g.iter().map(|x| -x).collect();
            for (a, _, set) in &newton {
                if is_subset(s, set) {
                    acc = linalg::add(&acc, a);
                }
            }
            samples.push(fr.lift_covector(&acc));
        }
    }
    Ok(Lower {
        n,
        u,
        h,
        faces,
        samples,
        newton_facets,
        diagnostics,
    })
}

/// Lower faces of a lifted point set in `R^(n+1)` (last coordinate the
/// height): faces with a defining normal of positive last coordinate.
pub fn lower_faces(lifted: &[RhoPoint]) -> Result<Vec<LowerFace>> {
    let (u, h): (Vec<RhoPoint>, Vec<R>) = lifted
        .iter()
        .map(|p| {
            let k = p.len() - 1;
            (p[..k].to_vec(), p[k].clone())
        })
        .unzip();
    let lw = lower(&u, &h)?;
    Ok(lw
        .faces
        .iter()
        .map(|(s, dim)| LowerFace {
            points: s.clone(),
            vertices: lw.faces.iter().filter(|(t, d)| *d == 0 && is_subset(t, s)).map(|(t, _)| t[0]).collect(),
            dim: *dim,
        })
        .collect())
}

/// The regular subdivision induced by `weights`: cells are the projections
/// of the lower faces.
pub fn regular_subdivision(points: &[RhoPoint], weights: &[R]) -> Result<PolyComplex> {
    let lw = lower(points, weights)?;
    Ok(PolyComplex {
        ambient: lw.n,
        cells: bounded_complex(&lw.u, &lw.faces),
        diagnostics: lw.diagnostics,
    })
}

/// The complex dual to the regular subdivision: for a lower face `F` the cell
/// `{w : (w,1) . x <= (w,1) . y for x in F, y in P}`.
pub fn dual_complex(points: &[RhoPoint], weights: &[R]) -> Result<PolyComplex> {
    let lw = lower(points, weights)?;
    let n = lw.n;
    let nf = lw.faces.len();
    let mut cells = Vec::with_capacity(nf);
    for (k, (s, fdim)) in lw.faces.iter().enumerate() {
        let x0 = s[0];
        let mut h = Vec::new();
        for y in 0..lw.u.len() {
            if y == x0 {
                continue;
            }
            let normal = sub(&lw.u[x0], &lw.u[y]);
            let bound = &lw.h[y] - &lw.h[x0];
            if s.contains(&y) {
                h.push(Halfspace {
                    normal: normal.iter().map(|x| -x).collect(),
                    bound: -&bound,
                });
            }
            h.push(Halfspace { normal, bound });
        }
        let bounded = match &lw.newton_facets {
            Some(facets) => !facets.iter().any(|f| is_subset(s, f)),
            None => false,
        };
        let vertices = bounded.then(|| {
            (0..nf)
                .filter(|&j| lw.faces[j].1 == n && is_subset(s, &lw.faces[j].0))
                .map(|j| lw.samples[j].clone())
                .collect()
        });
        cells.push(Polyhedron {
            dim: n - fdim,
            h,
            vertices,
            faces: (0..nf).filter(|&j| j != k && is_subset(s, &lw.faces[j].0)).collect(),
            support: s.clone(),
            sample: lw.samples[k].clone(),
        });
    }
    // largest cells first
    let mut order: Vec<usize> = (0..nf).collect();
    order.sort_by(|&a, &b| cells[b].dim.cmp(&cells[a].dim).then_with(|| cells[a].support.cmp(&cells[b].support)));
    let pos: BTreeMap<usize, usize> = order.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let cells = order
        .iter()
        .map(|&i| {
            let mut c = cells[i].clone();
            c.faces = c.faces.iter().map(|f| pos[f]).collect();
            c.faces.sort_unstable();
            c
        })
        .collect();
    Ok(PolyComplex {
        ambient: n,
        cells,
        diagnostics: lw.diagnostics,
    })
}

/// Newton points `u(r)` and weights `v(c_u)`.
pub fn newton_data<C: Coefficient>(f: &DiffPolynomial<C>) -> Result<(Vec<RhoPoint>, Vec<R>)> {
    let mut pts = Vec::new();
    let mut ws = Vec::new();
    for (u, c) in f.terms() {
        pts.push(eval_exponent(u));
        ws.push(c.valuation()?);
    }
    Ok((pts, ws))
}

/// The tropical hypersurface: `(n-1)`-skeleton of the dual complex.
pub fn hypersurface<C: Coefficient>(f: &DiffPolynomial<C>) -> Result<PolyComplex> {
    if f.is_empty() {
        return Err(Error::EmptyPolynomial);
    }
    let (pts, ws) = newton_data(f)?;
    let n = f.nvars();
    if n == 0 {
        return Ok(PolyComplex::empty(0));
    }
    Ok(skeleton(&dual_complex(&pts, &ws)?, n - 1))
}

/// Membership of `w` by the definition: the minimum is attained twice.
pub fn min_attained_twice<C: Coefficient>(f: &DiffPolynomial<C>, w: &[R]) -> Result<bool> {
    Ok(f.tropicalize(w)?.1.len() >= 2)
}

/// Point sets of the cells, for checking the complex conditions.
pub fn supports(c: &PolyComplex) -> BTreeSet<Vec<usize>> {
    c.cells.iter().map(|x| x.support.clone()).collect()
}
