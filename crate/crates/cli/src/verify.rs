//! Grid verification: compare the tropical hypersurface with the set of
//! weights whose initial form is not a monomial, and lift a root at a
//! sample point of every cell.

use std::str::FromStr;

use diffkap_core::newton::{lift_multivariate, LiftCertificate};
use diffkap_core::polyhedral::{hypersurface, PolyComplex};
use diffkap_core::residue::ResidueField;
use diffkap_core::{AlgebraicScalar, Error, Extended, KDiffPoly, Result, RhoConstant, RhoRational};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::json::{algebraic_to_json, certificate_to_json, point_to_json, rho_to_json};
use crate::parse::{parse_rho, shift_column};

const MAX_POINTS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub lo: RhoRational,
    pub hi: RhoRational,
    pub count: usize,
}

impl Axis {
    fn values(&self) -> Vec<RhoRational> {
        if self.count == 1 {
            return vec![self.lo.clone()];
        }
        let step = &(&self.hi - &self.lo) / &RhoRational::from_int(self.count as i64 - 1);
        (0..self.count).map(|k| &self.lo + &(&step * &RhoRational::from_int(k as i64))).collect()
    }
}

/// `lo:hi:count` with inclusive ends, either once for every axis or once per
/// axis separated by commas, e.g. `-5:5:11` or `-5:5:11,0:r:3`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<GridSpec> {
        let mut axes = Vec::new();
        let mut offset = 0;
        for part in s.split(',') {
            let fields: Vec<&str> = part.split(':').collect();
            let fail = |msg: &str| Error::Parse {
                line: 1,
                column: offset + 1,
                message: msg.into(),
            };
            if fields.len() != 3 {
                return Err(fail("grid axis must be lo:hi:count"));
            }
            let lo = parse_rho(fields[0]).map_err(|e| shift_column(e, offset))?;
            let hi_off = offset + fields[0].len() + 1;
            let hi = parse_rho(fields[1]).map_err(|e| shift_column(e, hi_off))?;
            let count: usize = fields[2].trim().parse().map_err(|_| fail("grid count must be a positive integer"))?;
            if count == 0 {
                return Err(fail("grid count must be a positive integer"));
            }
            if hi < lo {
                return Err(fail("grid axis has hi < lo"));
            }
            axes.push(Axis { lo, hi, count });
            offset += part.len() + 1;
        }
        Ok(GridSpec { axes })
    }
}

impl GridSpec {
    /// All points in lexicographic order, first coordinate outermost.
    pub fn points(&self, n: usize) -> Result<Vec<Vec<RhoRational>>> {
        let axes: Vec<&Axis> = match self.axes.len() {
            1 => vec![&self.axes[0]; n],
            k if k == n => self.axes.iter().collect(),
            k => return Err(Error::DimensionMismatch { expected: n, found: k }),
        };
        let total = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.count)).filter(|&t| t <= MAX_POINTS);
        if total.is_none() {
            return Err(Error::Precondition(format!("grid exceeds {MAX_POINTS} points")));
        }
        let mut out = vec![Vec::new()];
        for a in axes {
            let vals = a.values();
            out = out.into_iter().flat_map(|p| vals.iter().map(move |v| [p.clone(), vec![v.clone()]].concat())).collect();
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct GridEntry {
    pub w: Vec<RhoRational>,
    /// `w` lies on the tropical hypersurface.
    pub in_hypersurface: bool,
    /// `in_w(f)` is not a monomial.
    pub non_monomial: bool,
}

#[derive(Clone, Debug)]
pub enum LiftOutcome {
    Lifted {
        coordinates: Vec<LiftCertificate>,
        valuation: Vec<RhoRational>,
        in_hypersurface: bool,
    },
    /// Residual valuations converge to `limit` at or below the target.
    Stalled { steps: usize, limit: RhoRational },
    /// The initial form has no root in the torus over the residue field.
    NoResidueRoot(String),
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct CellLift {
    pub cell: usize,
    pub dim: usize,
    pub w: Vec<RhoRational>,
    pub alpha: Option<Vec<AlgebraicScalar>>,
    pub target: RhoRational,
    pub outcome: LiftOutcome,
}

impl CellLift {
    /// Lifted with `v(y) = w` on the hypersurface.
    pub fn succeeded(&self) -> bool {
        matches!(&self.outcome, LiftOutcome::Lifted { valuation, in_hypersurface: true, .. } if *valuation == self.w)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub grid_points: usize,
    pub in_hypersurface: usize,
    pub non_monomial: usize,
    pub mismatches: Vec<usize>,
    pub cells: usize,
    pub lifted: usize,
    pub stalled: usize,
    pub no_residue_root: usize,
    pub failed: usize,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub polynomial: String,
    pub rho: RhoConstant,
    pub target_offset: RhoRational,
    pub grid: Vec<GridEntry>,
    pub lifts: Vec<CellLift>,
    pub summary: Summary,
}

impl VerifyReport {
    /// No mismatch and every cell sample lifted.
    pub fn ok(&self) -> bool {
        self.summary.mismatches.is_empty() && self.lifts.iter().all(CellLift::succeeded)
    }

    pub fn to_json(&self) -> Result<Value> {
        let grid: Vec<Value> = self
            .grid
            .iter()
            .map(|g| json!({"w": point_to_json(&g.w), "set1": g.in_hypersurface, "set2": g.non_monomial}))
            .collect();
        let lifts = self.lifts.iter().map(lift_to_json).collect::<Result<Vec<_>>>()?;
        let s = &self.summary;
        Ok(json!({
            "polynomial": self.polynomial,
            "rho": self.rho.name(),
            "target_offset": rho_to_json(&self.target_offset),
            "grid": grid,
            "lift_results": lifts,
            "summary": {
                "grid_points": s.grid_points,
                "set1_size": s.in_hypersurface,
                "set2_size": s.non_monomial,
                "mismatches": s.mismatches,
                "cells": s.cells,
                "lifted": s.lifted,
                "stalled": s.stalled,
                "no_residue_root": s.no_residue_root,
                "failed": s.failed,
                "ok": self.ok(),
            },
        }))
    }
}

fn lift_to_json(l: &CellLift) -> Result<Value> {
    let alpha = match &l.alpha {
        Some(a) => Value::Array(a.iter().map(algebraic_to_json).collect::<Result<_>>()?),
        None => Value::Null,
    };
    let mut v = json!({
        "cell": l.cell,
        "dim": l.dim,
        "w": point_to_json(&l.w),
        "alpha": alpha,
        "target": rho_to_json(&l.target),
    });
    let o = v.as_object_mut().expect("object literal");
    match &l.outcome {
        LiftOutcome::Lifted {
            coordinates,
            valuation,
            in_hypersurface,
        } => {
            o.insert("status".into(), json!("lifted"));
            o.insert("coordinates".into(), Value::Array(coordinates.iter().map(certificate_to_json).collect::<Result<_>>()?));
            o.insert("valuation".into(), point_to_json(valuation));
            o.insert("in_hypersurface".into(), json!(in_hypersurface));
        }
        LiftOutcome::Stalled { steps, limit } => {
            o.insert("status".into(), json!("stalled"));
            o.insert("steps".into(), json!(steps));
            o.insert("limit".into(), rho_to_json(limit));
        }
        LiftOutcome::NoResidueRoot(m) => {
            o.insert("status".into(), json!("no_residue_root"));
            o.insert("message".into(), json!(m));
        }
        LiftOutcome::Failed(m) => {
            o.insert("status".into(), json!("failed"));
            o.insert("message".into(), json!(m));
        }
    }
    Ok(v)
}

fn grid_entry(f: &KDiffPoly, hs: &PolyComplex, w: Vec<RhoRational>) -> Result<GridEntry> {
    let in_hypersurface = hs.contains(&w);
    let non_monomial = !f.initial_form(&w)?.is_monomial();
    Ok(GridEntry {
        w,
        in_hypersurface,
        non_monomial,
    })
}

fn valuations(cs: &[LiftCertificate]) -> Result<Vec<RhoRational>> {
    cs.iter()
        .map(|c| match c.root.valuation()? {
            Extended::Finite(v) => Ok(v),
            Extended::Infinity => Err(Error::Consistency("lifted coordinate is zero".into())),
        })
        .collect()
}

/// `max(trop f(w), w_1, ..., w_n) + offset`: the residual bound used for
/// lifts at `w`. It stays above each coordinate valuation, as the Newton
/// step requires.
pub fn lift_target(f: &KDiffPoly, w: &[RhoRational], offset: &RhoRational) -> Result<RhoRational> {
    let (min, _) = f.tropicalize(w)?;
    Ok(&w.iter().cloned().fold(min, RhoRational::max) + offset)
}

/// Lifts a root at the sample of one cell up to [`lift_target`].
pub fn lift_cell(f: &KDiffPoly, hs: &PolyComplex, cell: usize, offset: &RhoRational, field: &dyn ResidueField) -> Result<CellLift> {
    let c = &hs.cells[cell];
    let w = c.sample.clone();
    let target = lift_target(f, &w, offset)?;
    let mut out = CellLift {
        cell,
        dim: c.dim,
        w: w.clone(),
        alpha: None,
        target: target.clone(),
        outcome: LiftOutcome::Failed(String::new()),
    };
    let init = f.initial_form(&w)?;
    let alpha = match field.find_root_nonmonomial(&init) {
        Ok(a) => a,
        Err(e @ (Error::NoNonzeroRoot(_) | Error::NonrootSearchExhausted(_))) => {
            out.outcome = LiftOutcome::NoResidueRoot(e.to_string());
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    out.alpha = Some(alpha.clone());
    out.outcome = match lift_multivariate(f, &w, &alpha, &target, field) {
        Ok(cs) => {
            let valuation = valuations(&cs)?;
            LiftOutcome::Lifted {
                in_hypersurface: hs.contains(&valuation),
                valuation,
                coordinates: cs,
            }
        }
        Err(Error::Stalled { steps, limit }) => LiftOutcome::Stalled { steps, limit },
        Err(e) if e.is_internal() => return Err(e),
        Err(e) => LiftOutcome::Failed(e.to_string()),
    };
    Ok(out)
}

/// Runs the grid comparison and the cell lifts. Work items run in parallel;
/// the report keeps input order, so it depends only on the arguments and
/// the active constant.
pub fn verify_kapranov(f: &KDiffPoly, grid: &GridSpec, offset: &RhoRational, field: &dyn ResidueField) -> Result<VerifyReport> {
    if !offset.is_positive() {
        return Err(Error::Precondition("target offset must be positive".into()));
    }
    let hs = hypersurface(f)?;
    let points = grid.points(f.nvars())?;
    let entries = points.into_par_iter().map(|w| grid_entry(f, &hs, w)).collect::<Result<Vec<_>>>()?;
    let lifts = (0..hs.cells.len()).into_par_iter().map(|i| lift_cell(f, &hs, i, offset, field)).collect::<Result<Vec<_>>>()?;
    let mut s = Summary {
        grid_points: entries.len(),
        cells: lifts.len(),
        ..Summary::default()
    };
    for (i, e) in entries.iter().enumerate() {
        s.in_hypersurface += e.in_hypersurface as usize;
        s.non_monomial += e.non_monomial as usize;
        if e.in_hypersurface != e.non_monomial {
            s.mismatches.push(i);
        }
    }
    for l in &lifts {
        match &l.outcome {
            LiftOutcome::Lifted { .. } if l.succeeded() => s.lifted += 1,
            LiftOutcome::Lifted { .. } | LiftOutcome::Failed(_) => s.failed += 1,
            LiftOutcome::Stalled { .. } => s.stalled += 1,
            LiftOutcome::NoResidueRoot(_) => s.no_residue_root += 1,
        }
    }
    Ok(VerifyReport {
        polynomial: f.to_string(),
        rho: RhoConstant::active(),
        target_offset: offset.clone(),
        grid: entries,
        lifts,
        summary: s,
    })
}
