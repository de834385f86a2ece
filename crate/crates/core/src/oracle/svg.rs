//! Poincaré disk rendering of a developed chain.
//!
//! The Cayley transform `z ↦ (z - i)/(z + i)` carries ℍ to the unit disk and
//! `∞` to `1`. Geodesics become arcs of circles orthogonal to the unit circle,
//! or diameters.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::develop::LiftChain;
use super::horocycle::horocyclic_path_points;
use crate::error::{domain, Result};
use crate::hyp::BoundaryPoint;
use crate::real::Real;

/// Rendering options. Every field has a default, so `{}` is a valid style.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvgStyle {
    /// Width and height of the image in pixels.
    pub size: f64,
    pub stroke_width: f64,
    /// Decimal places for every coordinate.
    pub decimals: usize,
    pub vertex_marks: bool,
    pub horocycle: bool,
    /// Samples per wedge on the horocyclic overlay.
    pub horocycle_samples: usize,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            size: 512.0,
            stroke_width: 1.0,
            decimals: 4,
            vertex_marks: true,
            horocycle: false,
            horocycle_samples: 16,
        }
    }
}

fn cayley(z: Complex64) -> Complex64 {
    (z - Complex64::i()) / (z + Complex64::i())
}

fn cayley_boundary(x: BoundaryPoint) -> Complex64 {
    match x {
        BoundaryPoint::Finite(x) => cayley(Complex64::new(x, 0.0)),
        BoundaryPoint::Infinity => Complex64::new(1.0, 0.0),
    }
}

struct Canvas<'a> {
    style: &'a SvgStyle,
}

impl Canvas<'_> {
    fn half(&self) -> f64 {
        self.style.size / 2.0
    }
    fn radius(&self) -> f64 {
        self.half() - 4.0 * self.style.stroke_width
    }
    fn num(&self, x: f64) -> String {
        let s = format!("{:.*}", self.style.decimals, x);
        if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
            format!("{:.*}", self.style.decimals, 0.0)
        } else {
            s
        }
    }
    fn pt(&self, w: Complex64) -> String {
        format!(
            "{} {}",
            self.num(self.half() + self.radius() * w.re),
            self.num(self.half() - self.radius() * w.im)
        )
    }
}

fn geodesic_path(c: &Canvas, p: Complex64, q: Complex64) -> String {
    let cross = p.re * q.im - p.im * q.re;
    let dot = p.re * q.re + p.im * q.im;
    let delta = cross.atan2(dot).abs();
    if cross.abs() < 1e-12 || delta > std::f64::consts::PI - 1e-9 {
        return format!("M {} L {}", c.pt(p), c.pt(q));
    }
    let r = (delta / 2.0).tan() * c.radius();
    // The arc inside the disk turns counterclockwise (as drawn, y up) from p
    // to q exactly when q lies counterclockwise of p.
    let sweep = if cross > 0.0 { 0 } else { 1 };
    format!(
        "M {} A {} {} 0 0 {} {}",
        c.pt(p),
        c.num(r),
        c.num(r),
        sweep,
        c.pt(q)
    )
}

/// SVG 1.1 document for `chain`.
pub fn disk_svg<T: Real>(chain: &LiftChain<T>, style: &SvgStyle) -> Result<String> {
    if chain.is_empty() {
        return domain("cannot render an empty chain");
    }
    if !(style.size > 0.0 && style.stroke_width > 0.0) {
        return domain("size and stroke width must be positive");
    }
    let chain = chain.to_f64();
    let c = Canvas { style };
    let mut out = String::new();
    let sw = c.num(style.stroke_width);
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        c.num(style.size)
    );
    let _ = writeln!(
        out,
        r#"<circle class="boundary" cx="{0}" cy="{0}" r="{1}" fill="none" stroke="black" stroke-width="{2}"/>"#,
        c.num(c.half()),
        c.num(c.radius()),
        sw
    );
    for g in chain.geodesics() {
        let d = geodesic_path(&c, cayley_boundary(g.start), cayley_boundary(g.end));
        let _ = writeln!(
            out,
            r#"<path class="geodesic" d="{d}" fill="none" stroke="navy" stroke-width="{sw}"/>"#
        );
    }
    if style.vertex_marks {
        for v in chain.ideal_vertices() {
            let w = cayley_boundary(v);
            let inner = w * (1.0 - 6.0 * style.stroke_width / c.radius());
            let (a, b) = (c.pt(inner), c.pt(w));
            let (a, b) = (a.split_once(' ').unwrap(), b.split_once(' ').unwrap());
            let _ = writeln!(
                out,
                r#"<line class="vertex" x1="{}" y1="{}" x2="{}" y2="{}" stroke="crimson" stroke-width="{sw}"/>"#,
                a.0, a.1, b.0, b.1
            );
        }
    }
    if style.horocycle {
        let pts = horocyclic_path_points(&chain, style.horocycle_samples)?;
        let list = pts
            .iter()
            .map(|&(x, y)| c.pt(cayley(Complex64::new(x, y))).replace(' ', ","))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            out,
            r#"<polyline class="horocycle" points="{list}" fill="none" stroke="darkgreen" stroke-width="{sw}"/>"#
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes [`disk_svg`] to `path`.
pub fn render_disk_svg<T: Real>(chain: &LiftChain<T>, path: &Path, style: &SvgStyle) -> Result<()> {
    let doc = disk_svg(chain, style)?;
    std::fs::write(path, doc)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::develop_exact;

    #[test]
    fn three_geodesics_three_paths() {
        let chain = develop_exact::<f64>(&[0.0], 53).unwrap();
        assert_eq!(chain.len(), 3);
        let doc = disk_svg(&chain, &SvgStyle::default()).unwrap();
        assert_eq!(doc.matches("<path").count(), 3);
        assert_eq!(doc.matches("<circle").count(), 1);
    }

    #[test]
    fn arcs_pass_inside_the_disk() {
        // g_3 = (1/2, 1) maps to an arc; its midpoint must be inside.
        let c = Canvas {
            style: &SvgStyle::default(),
        };
        let p = cayley_boundary(BoundaryPoint::Finite(0.5));
        let q = cayley_boundary(BoundaryPoint::Finite(1.0));
        let d = geodesic_path(&c, p, q);
        assert!(d.contains(" A "));
        // Geodesic top point 0.75 + 0.25i lies on the rendered circle.
        let top = cayley(Complex64::new(0.75, 0.25));
        let cross = p.re * q.im - p.im * q.re;
        let delta = cross.atan2(p.re * q.re + p.im * q.im).abs();
        let centre = (p + q) / (p + q).norm() / (delta / 2.0).cos();
        assert!(((top - centre).norm() - (delta / 2.0).tan()).abs() < 1e-12);
        // and the sweep flag picks the arc through it: the centre of the
        // rendered circle must lie on the side of pq away from `top`.
        let side = |z: Complex64| ((q - p).conj() * (z - p)).im;
        assert!(side(top) * side(centre) < 0.0);
        let sweep_ccw = d.contains(" 0 0 0 ");
        assert_eq!(sweep_ccw, cross > 0.0);
    }
}
