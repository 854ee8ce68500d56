//! SVG drawings of complexes in the plane. Rays and lines are drawn long
//! and clipped by the view box.

use std::fmt::Write;

use diffkap_core::polyhedral::{PolyComplex, Polyhedron};
use diffkap_core::{Error, Result};

type P = (f64, f64);

fn approx(p: &[diffkap_core::RhoRational]) -> P {
    (p[0].to_f64(), p[1].to_f64())
}

struct Frame {
    lo: P,
    hi: P,
}

impl Frame {
    fn around(points: &[P]) -> Frame {
        let mut lo = (f64::INFINITY, f64::INFINITY);
        let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            lo = (lo.0.min(p.0), lo.1.min(p.1));
            hi = (hi.0.max(p.0), hi.1.max(p.1));
        }
        if points.is_empty() {
            lo = (0.0, 0.0);
            hi = (0.0, 0.0);
        }
        let pad = (0.25 * (hi.0 - lo.0).max(hi.1 - lo.1)).max(1.0);
        Frame {
            lo: (lo.0 - pad, lo.1 - pad),
            hi: (hi.0 + pad, hi.1 + pad),
        }
    }

    fn reach(&self) -> f64 {
        2.0 * ((self.hi.0 - self.lo.0).powi(2) + (self.hi.1 - self.lo.1).powi(2)).sqrt()
    }
}

/// Direction of the affine hull of a one-dimensional cell without two
/// vertices.
fn line_direction(c: &Polyhedron) -> Option<P> {
    let s = &c.sample;
    let n = c.h.iter().find(|h| h.is_tight(s))?;
    let (a, b) = approx(&n.normal);
    let len = (a * a + b * b).sqrt();
    (len > 0.0).then(|| (-b / len, a / len))
}

fn normalized(d: P) -> P {
    let len = (d.0 * d.0 + d.1 * d.1).sqrt();
    (d.0 / len, d.1 / len)
}

/// Bounded polygon corners in counterclockwise order.
fn polygon(vs: &[P]) -> Vec<P> {
    let k = vs.len() as f64;
    let c = (vs.iter().map(|p| p.0).sum::<f64>() / k, vs.iter().map(|p| p.1).sum::<f64>() / k);
    let mut out = vs.to_vec();
    out.sort_by(|p, q| (p.1 - c.1).atan2(p.0 - c.0).total_cmp(&(q.1 - c.1).atan2(q.0 - c.0)));
    out
}

/// Renders a complex in `R^2`: 2-cells with vertices as filled polygons,
/// 1-cells as segments, rays or lines, 0-cells as dots.
pub fn render(c: &PolyComplex) -> Result<String> {
    if c.ambient != 2 && !c.cells.is_empty() {
        return Err(Error::Precondition(format!("SVG output needs ambient dimension 2, not {}", c.ambient)));
    }
    let mut pts: Vec<P> = Vec::new();
    for cell in &c.cells {
        match &cell.vertices {
            Some(vs) => pts.extend(vs.iter().map(|v| approx(v))),
            None => pts.push(approx(&cell.sample)),
        }
    }
    let fr = Frame::around(&pts);
    let far = fr.reach();
    let (w, h) = (fr.hi.0 - fr.lo.0, fr.hi.1 - fr.lo.1);
    let stroke = w.max(h) / 200.0;
    let mut s = String::new();
    // y grows upward in the picture, so flip it
    let xy = |p: P| format!("{:.4},{:.4}", p.0, -p.1);
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.4} {:.4} {:.4} {:.4}" width="480" height="{:.0}">"#,
        fr.lo.0,
        -fr.hi.1,
        w,
        h,
        480.0 * h / w
    )
    .unwrap();
    writeln!(s, r##"<g fill="#cfe0f5" stroke="none">"##).unwrap();
    for cell in c.cells.iter().filter(|c| c.dim == 2) {
        if let Some(vs) = &cell.vertices {
            let ps: Vec<String> = polygon(&vs.iter().map(|v| approx(v)).collect::<Vec<_>>()).into_iter().map(xy).collect();
            writeln!(s, r#"<polygon points="{}"/>"#, ps.join(" ")).unwrap();
        }
    }
    writeln!(s, "</g>").unwrap();
    writeln!(s, r##"<g stroke="#1f4e8c" stroke-width="{stroke:.4}" fill="none">"##).unwrap();
    for cell in c.cells.iter().filter(|c| c.dim == 1) {
        let ends: Vec<P> = cell.faces.iter().filter(|&&j| c.cells[j].dim == 0).map(|&j| approx(&c.cells[j].sample)).collect();
        let m = approx(&cell.sample);
        let (a, b) = match ends.as_slice() {
            [a, b, ..] => (*a, *b),
            [a] => {
                let d = normalized((m.0 - a.0, m.1 - a.1));
                (*a, (a.0 + far * d.0, a.1 + far * d.1))
            }
            [] => match line_direction(cell) {
                Some(d) => ((m.0 - far * d.0, m.1 - far * d.1), (m.0 + far * d.0, m.1 + far * d.1)),
                None => continue,
            },
        };
        writeln!(s, r#"<line x1="{:.4}" y1="{:.4}" x2="{:.4}" y2="{:.4}"/>"#, a.0, -a.1, b.0, -b.1).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(s, r##"<g fill="#1f4e8c">"##).unwrap();
    for cell in c.cells.iter().filter(|c| c.dim == 0) {
        let p = approx(&cell.sample);
        writeln!(s, r#"<circle cx="{:.4}" cy="{:.4}" r="{:.4}"/>"#, p.0, -p.1, 3.0 * stroke).unwrap();
    }
    writeln!(s, "</g>\n</svg>").unwrap();
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use diffkap_core::polyhedral::hypersurface;

    #[test]
    fn tropical_line_has_three_rays() {
        let f = parse_poly("x1 + x2 + 1", None).unwrap();
        let svg = render(&hypersurface(&f).unwrap()).unwrap();
        assert_eq!(svg.matches("<line").count(), 3);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn rejects_other_dimensions() {
        let f = parse_poly("x1 + x2 + x3 + 1", None).unwrap();
        assert!(render(&hypersurface(&f).unwrap()).is_err());
    }
}
