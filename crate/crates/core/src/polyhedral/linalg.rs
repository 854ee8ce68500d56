//! Exact linear algebra over Q(r).

use alloc::vec;
use alloc::vec::Vec;

use crate::rho::RhoRational as R;

pub(crate) fn dot(a: &[R], b: &[R]) -> R {
    a.iter().zip(b).fold(R::zero(), |s, (x, y)| if x.is_zero() || y.is_zero() { s } else { &s + &(x * y) })
}

pub(crate) fn sub(a: &[R], b: &[R]) -> Vec<R> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn scale(a: &[R], s: &R) -> Vec<R> {
    a.iter().map(|x| x * s).collect()
}

pub(crate) fn add(a: &[R], b: &[R]) -> Vec<R> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub(crate) fn rref(m: &mut Vec<Vec<R>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row >= m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].inv().expect("nonzero pivot");
        m[row] = scale(&m[row], &inv);
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let sub_row = scale(&m[row], &f);
                m[r] = sub(&m[r], &sub_row);
            }
        }
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    pivots
}

pub(crate) fn rank(m: &[Vec<R>], ncols: usize) -> usize {
    let mut m = m.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{x : m x = 0}`.
pub(crate) fn null_space(m: &[Vec<R>], ncols: usize) -> Vec<Vec<R>> {
    let mut m = m.to_vec();
    let piv = rref(&mut m, ncols);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !piv.contains(c)) {
        let mut v = vec![R::zero(); ncols];
        v[free] = R::one();
        for (r, &pc) in piv.iter().enumerate() {
            v[pc] = -&m[r][free];
        }
        out.push(v);
    }
    out
}

/// A solution of `a x = b` with free variables zero, if consistent.
pub(crate) fn solve_any(a: &[Vec<R>], b: &[R], ncols: usize) -> Option<Vec<R>> {
    let mut m: Vec<Vec<R>> = a
        .iter()
        .zip(b)
        .map(|(row, v)| {
            let mut r = row.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let piv = rref(&mut m, ncols + 1);
    if piv.contains(&ncols) {
        return None;
    }
    let mut x = vec![R::zero(); ncols];
    for (r, &pc) in piv.iter().enumerate() {
        x[pc] = m[r][ncols].clone();
    }
    Some(x)
}

/// An affine frame `origin + span(basis)` of a point set.
#[derive(Clone, Debug)]
pub(crate) struct Frame {
    pub origin: Vec<R>,
    /// `d x n`, rows independent.
    pub basis: Vec<Vec<R>>,
    /// Columns on which the basis restricts to an invertible matrix.
    pivots: Vec<usize>,
    /// Inverse of the restriction, `d x d`.
    inv: Vec<Vec<R>>,
}

impl Frame {
    pub fn new(points: &[&[R]]) -> Frame {
        let n = points.first().map_or(0, |p| p.len());
        let origin = points.first().map_or_else(Vec::new, |p| p.to_vec());
        let mut basis: Vec<Vec<R>> = Vec::new();
        for p in points.iter().skip(1) {
            let d = sub(p, &origin);
            let mut trial = basis.clone();
            trial.push(d.clone());
            if rank(&trial, n) > basis.len() {
                basis = trial;
            }
            if basis.len() == n {
                break;
            }
        }
        let mut echelon = basis.clone();
        let pivots = rref(&mut echelon, n);
        let k = basis.len();
        // restriction M[c][k] = basis[k][pivots[c]]
        let mut aug: Vec<Vec<R>> = (0..k)
            .map(|c| {
                let mut row: Vec<R> = (0..k).map(|j| basis[j][pivots[c]].clone()).collect();
                row.extend((0..k).map(|j| if j == c { R::one() } else { R::zero() }));
                row
            })
            .collect();
        rref(&mut aug, 2 * k);
        let inv = aug.into_iter().map(|r| r[k..].to_vec()).collect();
        Frame {
            origin,
            basis,
            pivots,
            inv,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.origin.len()
    }

    /// Coordinates of a point of the affine hull.
    pub fn coords(&self, p: &[R]) -> Vec<R> {
        let d = sub(p, &self.origin);
        let rhs: Vec<R> = self.pivots.iter().map(|&c| d[c].clone()).collect();
        self.inv.iter().map(|row| dot(row, &rhs)).collect()
    }

    /// An ambient covector `w` with `w . (basis^T l) = a . l` for all `l`.
    pub fn lift_covector(&self, a: &[R]) -> Vec<R> {
        solve_any(&self.basis, a, self.ambient()).expect("independent basis rows")
    }

    /// Normals of the affine hull inside the ambient space.
    pub fn normals(&self) -> Vec<Vec<R>> {
        null_space(&self.basis, self.ambient())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: &[i64]) -> Vec<R> {
        a.iter().map(|&x| R::from_int(x)).collect()
    }

    #[test]
    fn null_space_and_solve() {
        let m = vec![v(&[1, 1, 0]), v(&[0, 1, 1])];
        let ns = null_space(&m, 3);
        assert_eq!(ns.len(), 1);
        for row in &m {
            assert!(dot(row, &ns[0]).is_zero());
        }
        let x = solve_any(&m, &v(&[2, 3]), 3).unwrap();
        assert_eq!(dot(&m[0], &x), R::from_int(2));
        assert!(solve_any(&[v(&[1, 1]), v(&[2, 2])], &v(&[1, 3]), 2).is_none());
    }

    #[test]
    fn frames() {
        let pts = [v(&[1, 1, 1]), v(&[2, 1, 1]), v(&[3, 1, 1]), v(&[1, 2, 1])];
        let refs: Vec<&[R]> = pts.iter().map(|p| p.as_slice()).collect();
        let f = Frame::new(&refs);
        assert_eq!(f.dim(), 2);
        let c = f.coords(&pts[2]);
        assert_eq!(c, v(&[2, 0]));
        assert_eq!(f.normals().len(), 1);
        let w = f.lift_covector(&v(&[5, 7]));
        assert_eq!(dot(&w, &sub(&pts[3], &pts[0])), R::from_int(7));
    }
}
