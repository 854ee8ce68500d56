//! JSON encodings. Integers that fit in `i64` are JSON numbers, larger ones
//! decimal strings; rationals that are not integers are `"p/q"` strings.
//! Objects use sorted keys so output is byte-stable.

use diffkap_core::newton::LiftCertificate;
use diffkap_core::polyhedral::{Halfspace, PolyComplex, Polyhedron};
use diffkap_core::residue::Rect;
use diffkap_core::{AlgebraicScalar, Error, Extended, HahnSeries, Result, RhoRational};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Map, Value};

fn bad(msg: impl Into<String>) -> Error {
    Error::Precondition(format!("malformed JSON: {}", msg.into()))
}

pub fn int_to_json(n: &BigInt) -> Value {
    match i64::try_from(n) {
        Ok(v) => json!(v),
        Err(_) => json!(n.to_string()),
    }
}

pub fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| bad(format!("not an integer: {n}"))),
        Value::String(s) => s.trim().parse().map_err(|_| bad(format!("not an integer: {s}"))),
        _ => Err(bad("expected an integer")),
    }
}

pub fn rational_to_json(q: &BigRational) -> Value {
    if q.is_integer() {
        int_to_json(q.numer())
    } else {
        json!(format!("{}/{}", q.numer(), q.denom()))
    }
}

pub fn rational_from_json(v: &Value) -> Result<BigRational> {
    if let Value::String(s) = v {
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad(format!("not a rational: {s}")))?;
            let q: BigInt = q.trim().parse().map_err(|_| bad(format!("not a rational: {s}")))?;
            if q.is_zero() {
                return Err(bad("zero denominator"));
            }
            return Ok(BigRational::new(p, q));
        }
    }
    Ok(BigRational::from_integer(int_from_json(v)?))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(format!("{what} must be an array")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing \"{key}\"")))
}

fn usize_from_json(v: &Value) -> Result<usize> {
    v.as_u64().and_then(|k| usize::try_from(k).ok()).ok_or_else(|| bad("expected a non-negative integer"))
}

pub fn rho_to_json(q: &RhoRational) -> Value {
    json!({
        "num": q.numer().iter().map(int_to_json).collect::<Vec<_>>(),
        "den": q.denom().iter().map(int_to_json).collect::<Vec<_>>(),
    })
}

pub fn rho_from_json(v: &Value) -> Result<RhoRational> {
    let poly = |key| -> Result<Vec<BigInt>> { array(field(v, key)?, key)?.iter().map(int_from_json).collect() };
    RhoRational::from_polys(poly("num")?, poly("den")?).map_err(|_| bad("zero denominator"))
}

pub fn extended_to_json(e: &Extended) -> Value {
    match e {
        Extended::Finite(q) => rho_to_json(q),
        Extended::Infinity => json!("inf"),
    }
}

pub fn extended_from_json(v: &Value) -> Result<Extended> {
    match v {
        Value::String(s) if s == "inf" => Ok(Extended::Infinity),
        v => Ok(Extended::Finite(rho_from_json(v)?)),
    }
}

pub fn point_to_json(p: &[RhoRational]) -> Value {
    Value::Array(p.iter().map(rho_to_json).collect())
}

pub fn point_from_json(v: &Value) -> Result<Vec<RhoRational>> {
    array(v, "point")?.iter().map(rho_from_json).collect()
}

fn interval(lo: &BigRational, hi: &BigRational) -> Value {
    json!([rational_to_json(lo), rational_to_json(hi)])
}

fn interval_from(v: &Value) -> Result<(BigRational, BigRational)> {
    match array(v, "interval")?.as_slice() {
        [lo, hi] => Ok((rational_from_json(lo)?, rational_from_json(hi)?)),
        _ => Err(bad("interval needs two bounds")),
    }
}

/// `{"minpoly", "re", "im"}` with a rectangle isolating the value among the
/// roots of its minimal polynomial.
pub fn algebraic_to_json(a: &AlgebraicScalar) -> Result<Value> {
    let rect = a.isolating_rect()?;
    Ok(json!({
        "minpoly": a.minpoly().iter().map(int_to_json).collect::<Vec<_>>(),
        "re": interval(&rect.re.0, &rect.re.1),
        "im": interval(&rect.im.0, &rect.im.1),
    }))
}

pub fn algebraic_from_json(v: &Value) -> Result<AlgebraicScalar> {
    let m: Vec<BigRational> = array(field(v, "minpoly")?, "minpoly")?.iter().map(rational_from_json).collect::<Result<_>>()?;
    let rect = Rect {
        re: interval_from(field(v, "re")?)?,
        im: interval_from(field(v, "im")?)?,
    };
    if m.len() == 2 {
        if m[1].is_zero() {
            return Err(bad("degenerate minimal polynomial"));
        }
        return Ok(AlgebraicScalar::from_rational(-&m[0] / &m[1]));
    }
    AlgebraicScalar::from_poly_and_rect(&m, &rect)
}

pub fn hahn_to_json(s: &HahnSeries) -> Result<Value> {
    let terms = s
        .terms()
        .iter()
        .map(|(e, c)| Ok(json!({"exp": rho_to_json(e), "coeff": algebraic_to_json(c)?})))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({"terms": terms, "trunc": extended_to_json(&s.truncation())}))
}

pub fn hahn_from_json(v: &Value) -> Result<HahnSeries> {
    let terms = array(field(v, "terms")?, "terms")?
        .iter()
        .map(|t| Ok((rho_from_json(field(t, "exp")?)?, algebraic_from_json(field(t, "coeff")?)?)))
        .collect::<Result<Vec<_>>>()?;
    let trunc = match extended_from_json(field(v, "trunc")?)? {
        Extended::Finite(q) => Some(q),
        Extended::Infinity => None,
    };
    Ok(HahnSeries::new(terms, trunc))
}

fn cell_to_json(c: &Polyhedron) -> Value {
    let h: Vec<Value> = c.h.iter().map(|hs| json!({"normal": point_to_json(&hs.normal), "bound": rho_to_json(&hs.bound)})).collect();
    let vertices = match &c.vertices {
        Some(vs) => Value::Array(vs.iter().map(|p| point_to_json(p)).collect()),
        None => Value::Null,
    };
    json!({
        "dim": c.dim,
        "H": h,
        "vertices": vertices,
        "faces": c.faces,
        "support": c.support,
        "sample": point_to_json(&c.sample),
    })
}

fn cell_from_json(v: &Value) -> Result<Polyhedron> {
    let h = array(field(v, "H")?, "H")?
        .iter()
        .map(|hs| {
            Ok(Halfspace {
                normal: point_from_json(field(hs, "normal")?)?,
                bound: rho_from_json(field(hs, "bound")?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let vertices = match field(v, "vertices")? {
        Value::Null => None,
        vs => Some(array(vs, "vertices")?.iter().map(point_from_json).collect::<Result<Vec<_>>>()?),
    };
    let indices = |key| -> Result<Vec<usize>> {
        match v.get(key) {
            Some(a) => array(a, key)?.iter().map(usize_from_json).collect(),
            None => Ok(Vec::new()),
        }
    };
    // other producers may omit the sample; the vertex barycenter is interior
    let sample = match (v.get("sample"), &vertices) {
        (Some(s), _) => point_from_json(s)?,
        (None, Some(vs)) if !vs.is_empty() => barycenter(vs),
        (None, _) => return Err(bad("an unbounded cell needs a \"sample\"")),
    };
    Ok(Polyhedron {
        dim: usize_from_json(field(v, "dim")?)?,
        h,
        vertices,
        faces: indices("faces")?,
        support: indices("support")?,
        sample,
    })
}

fn barycenter(vs: &[Vec<RhoRational>]) -> Vec<RhoRational> {
    let k = RhoRational::from_int(vs.len() as i64);
    (0..vs[0].len())
        .map(|i| &vs.iter().fold(RhoRational::zero(), |acc, p| &acc + &p[i]) / &k)
        .collect()
}

/// `{"cells": [...]}`; the empty complex is `{"cells": []}`.
pub fn complex_to_json(c: &PolyComplex) -> Value {
    let mut m = Map::new();
    m.insert("cells".into(), Value::Array(c.cells.iter().map(cell_to_json).collect()));
    if !c.diagnostics.is_empty() {
        m.insert("diagnostics".into(), json!(c.diagnostics));
    }
    Value::Object(m)
}

/// The ambient dimension is read off the cells, falling back to `ambient`
/// for the empty complex.
pub fn complex_from_json(v: &Value, ambient: usize) -> Result<PolyComplex> {
    let cells = array(field(v, "cells")?, "cells")?.iter().map(cell_from_json).collect::<Result<Vec<_>>>()?;
    let ambient = cells.first().map_or(ambient, |c| c.sample.len());
    for (i, c) in cells.iter().enumerate() {
        if c.sample.len() != ambient || c.h.iter().any(|hs| hs.normal.len() != ambient) {
            return Err(bad(format!("cell {i} has the wrong ambient dimension")));
        }
        if c.faces.iter().any(|&j| j >= cells.len()) {
            return Err(bad(format!("cell {i} names a missing face")));
        }
    }
    let diagnostics = match v.get("diagnostics") {
        Some(d) => array(d, "diagnostics")?.iter().map(|s| s.as_str().map(String::from).ok_or_else(|| bad("diagnostics must be strings"))).collect::<Result<_>>()?,
        None => Vec::new(),
    };
    Ok(PolyComplex { ambient, cells, diagnostics })
}

pub fn certificate_to_json(c: &LiftCertificate) -> Result<Value> {
    Ok(json!({
        "root": hahn_to_json(&c.root)?,
        "target": rho_to_json(&c.target),
        "residual_valuation": extended_to_json(&c.residual_valuation),
        "steps": c.steps,
        "branch_choices": c.branch_choices.iter().map(algebraic_to_json).collect::<Result<Vec<_>>>()?,
        "epsilons": point_to_json(&c.epsilons),
    }))
}

pub fn certificate_from_json(v: &Value) -> Result<LiftCertificate> {
    Ok(LiftCertificate {
        root: hahn_from_json(field(v, "root")?)?,
        target: rho_from_json(field(v, "target")?)?,
        residual_valuation: extended_from_json(field(v, "residual_valuation")?)?,
        steps: usize_from_json(field(v, "steps")?)?,
        branch_choices: array(field(v, "branch_choices")?, "branch_choices")?.iter().map(algebraic_from_json).collect::<Result<_>>()?,
        epsilons: point_from_json(field(v, "epsilons")?)?,
    })
}

/// Serialized with a trailing newline.
pub fn to_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn from_str(s: &str) -> Result<Value> {
    serde_json::from_str(s).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}
