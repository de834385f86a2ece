//! Upper half-plane primitives: ideal points, oriented geodesics, Möbius maps,
//! cross-ratios, shears and trirectangle trigonometry.
//!
//! Conventions:
//! * `cr(a,b;c,d) = ((a-c)(b-d)) / ((a-d)(b-c))`, limits taken symbolically at ∞.
//! * `shear_of_quad(p,q,r,t) = ln |cr(t,q;p,r)|` for the diagonal `p → r`
//!   with `q` on its left and `t` on its right. It is the signed distance along
//!   the diagonal from the foot of `q` to the foot of `t`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, FluteError, Result};
use crate::real::Real;

/// A point of ∂ℍ = ℝ ∪ {∞}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPoint<T = f64> {
    Finite(T),
    Infinity,
}

impl BoundaryPoint<f64> {
    /// Finite point; rejects NaN and infinities (use [`BoundaryPoint::Infinity`]).
    pub fn finite(x: f64) -> Result<Self> {
        if x.is_finite() {
            Ok(BoundaryPoint::Finite(x))
        } else {
            domain(format!("boundary point must be finite, got {x}"))
        }
    }
}

impl<T: Real> BoundaryPoint<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }

    pub fn value(&self) -> Option<&T> {
        match self {
            BoundaryPoint::Finite(x) => Some(x),
            BoundaryPoint::Infinity => None,
        }
    }

    pub fn to_f64(&self) -> BoundaryPoint<f64> {
        match self {
            BoundaryPoint::Finite(x) => BoundaryPoint::Finite(x.to_f64()),
            BoundaryPoint::Infinity => BoundaryPoint::Infinity,
        }
    }
}

/// Oriented geodesic from `start` to `end`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Geodesic<T = f64> {
    pub start: BoundaryPoint<T>,
    pub end: BoundaryPoint<T>,
}

impl<T: Real> Geodesic<T> {
    pub fn new(start: BoundaryPoint<T>, end: BoundaryPoint<T>) -> Result<Self> {
        if start == end {
            return domain("geodesic endpoints coincide");
        }
        Ok(Geodesic { start, end })
    }

    pub fn reversed(&self) -> Self {
        Geodesic {
            start: self.end.clone(),
            end: self.start.clone(),
        }
    }
}

/// Element of PSL(2,ℝ), stored with unit determinant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Renormalizes to determinant one. Fails unless `ad - bc > 0`.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return domain(format!("matrix determinant {det} is not positive"));
        }
        let s = det.sqrt();
        Ok(Isometry {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    pub fn translation(x: f64) -> Self {
        Isometry {
            a: 1.0,
            b: x,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn dilation(k: f64) -> Result<Self> {
        Isometry::new(k, 0.0, 0.0, 1.0)
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Isometry {
        Isometry {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn apply_boundary(&self, x: BoundaryPoint) -> BoundaryPoint {
        match x {
            BoundaryPoint::Infinity => {
                if self.c == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.a / self.c)
                }
            }
            BoundaryPoint::Finite(x) => {
                let den = self.c * x + self.d;
                if den == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((self.a * x + self.b) / den)
                }
            }
        }
    }

    pub fn apply_geodesic(&self, g: &Geodesic) -> Geodesic {
        Geodesic {
            start: self.apply_boundary(g.start),
            end: self.apply_boundary(g.end),
        }
    }

    /// Equality in PSL(2,ℝ), i.e. up to global sign.
    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        let close = |s: f64| {
            (self.a - s * other.a).abs() < tol
                && (self.b - s * other.b).abs() < tol
                && (self.c - s * other.c).abs() < tol
                && (self.d - s * other.d).abs() < tol
        };
        close(1.0) || close(-1.0)
    }
}

fn distinct4<T: Real>(pts: [&BoundaryPoint<T>; 4]) -> Result<()> {
    for i in 0..4 {
        for j in i + 1..4 {
            if pts[i] == pts[j] {
                return domain("cross-ratio needs four distinct points");
            }
        }
    }
    Ok(())
}

/// Cross-ratio `((a-c)(b-d)) / ((a-d)(b-c))`.
pub fn cross_ratio<T: Real>(
    a: BoundaryPoint<T>,
    b: BoundaryPoint<T>,
    c: BoundaryPoint<T>,
    d: BoundaryPoint<T>,
) -> Result<T> {
    use BoundaryPoint::*;
    distinct4([&a, &b, &c, &d])?;
    Ok(match (a, b, c, d) {
        (Infinity, Finite(b), Finite(c), Finite(d)) => (b.clone() - d) / (b - c),
        (Finite(a), Infinity, Finite(c), Finite(d)) => (a.clone() - c) / (a - d),
        (Finite(a), Finite(b), Infinity, Finite(d)) => (b - d.clone()) / (a - d),
        (Finite(a), Finite(b), Finite(c), Infinity) => (a - c.clone()) / (b - c),
        (Finite(a), Finite(b), Finite(c), Finite(d)) => {
            ((a.clone() - c.clone()) * (b.clone() - d.clone())) / ((a - d) * (b - c))
        }
        _ => unreachable!("distinctness allows at most one infinite point"),
    })
}

/// Shear across the diagonal `p → r` of the ideal quadrilateral `(p, q, r, t)`.
pub fn shear_of_quad<T: Real>(
    p: BoundaryPoint<T>,
    q: BoundaryPoint<T>,
    r: BoundaryPoint<T>,
    t: BoundaryPoint<T>,
) -> Result<T> {
    let cr = cross_ratio(t, q, p, r)?;
    let m = cr.abs();
    if m.is_zero() || !m.is_finite() {
        return domain("degenerate quadrilateral");
    }
    Ok(m.ln())
}

fn finite_or(x: BoundaryPoint, what: &str) -> Result<f64> {
    match x {
        BoundaryPoint::Finite(v) => Ok(v),
        BoundaryPoint::Infinity => domain(format!("{what} is at infinity")),
    }
}

/// Intersection in ℍ of two semicircles centered on ℝ.
fn circle_meet(c1: f64, r1: f64, c2: f64, r2: f64) -> Result<Complex64> {
    if c1 == c2 {
        return domain("concentric circles do not meet");
    }
    let x = (r1 * r1 - r2 * r2 + c2 * c2 - c1 * c1) / (2.0 * (c2 - c1));
    let h = r1 * r1 - (x - c1) * (x - c1);
    if !(h > 0.0) {
        return domain("geodesics do not meet in the upper half-plane");
    }
    Ok(Complex64::new(x, h.sqrt()))
}

/// Foot on `g` of the perpendicular dropped from the ideal point `x`.
pub fn foot_of_perpendicular(x: BoundaryPoint, g: &Geodesic) -> Result<Complex64> {
    if x == g.start || x == g.end {
        return domain("ideal point is an endpoint of the geodesic");
    }
    match (g.start, g.end) {
        (BoundaryPoint::Infinity, BoundaryPoint::Finite(a))
        | (BoundaryPoint::Finite(a), BoundaryPoint::Infinity) => {
            let x = finite_or(x, "ideal point")?;
            Ok(Complex64::new(a, (x - a).abs()))
        }
        (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => {
            let c = 0.5 * (a + b);
            let r = 0.5 * (b - a).abs();
            match x {
                BoundaryPoint::Infinity => Ok(Complex64::new(c, r)),
                BoundaryPoint::Finite(x) if x == c => Ok(Complex64::new(c, r)),
                BoundaryPoint::Finite(x) => {
                    // The perpendicular ends at the inversion of x in g's circle.
                    let y = c + r * r / (x - c);
                    circle_meet(c, r, 0.5 * (x + y), 0.5 * (x - y).abs())
                }
            }
        }
        _ => unreachable!(),
    }
}

/// Orientation-preserving map sending `p ↦ 0` and `r ↦ ∞`.
pub fn to_axis(p: BoundaryPoint, r: BoundaryPoint) -> Result<Isometry> {
    use BoundaryPoint::*;
    match (p, r) {
        (Finite(p), Infinity) => Ok(Isometry::translation(-p)),
        (Infinity, Finite(r)) => Isometry::new(0.0, -1.0, 1.0, -r),
        (Finite(p), Finite(r)) if p > r => Isometry::new(1.0, -p, 1.0, -r),
        (Finite(p), Finite(r)) if p < r => Isometry::new(-1.0, p, 1.0, -r),
        _ => domain("geodesic endpoints coincide"),
    }
}

/// Hyperbolic distance between interior points.
pub fn distance(z: Complex64, w: Complex64) -> f64 {
    let num = (z - w).norm();
    let den = (z - w.conj()).norm();
    2.0 * (num / den).atanh()
}

/// Signed distance from `z` to `w`, both on `g`, positive along the orientation of `g`.
pub fn signed_distance_along(g: &Geodesic, z: Complex64, w: Complex64) -> Result<f64> {
    let m = to_axis(g.start, g.end)?;
    let (mz, mw) = (m.apply(z), m.apply(w));
    Ok((mw.norm() / mz.norm()).ln())
}

/// Length of the common perpendicular of two disjoint, non-asymptotic geodesics.
pub fn geodesic_distance<T: Real>(g: &Geodesic<T>, h: &Geodesic<T>) -> Result<T> {
    for (x, y) in [(&g.start, &h.start), (&g.start, &h.end), (&g.end, &h.start), (&g.end, &h.end)] {
        if x == y {
            return domain("asymptotic geodesics have no common perpendicular");
        }
    }
    // With g sent to (0, ∞) and h to (x, y), k = x / y is the cross-ratio below.
    let k = cross_ratio(
        g.start.clone(),
        g.end.clone(),
        h.start.clone(),
        h.end.clone(),
    )?;
    let k = if k.to_f64().abs() > 1.0 {
        k.lift(1.0) / k
    } else {
        k
    };
    if k <= k.lift(0.0) {
        return domain("geodesics cross");
    }
    // cosh d = (1 + k) / (1 - k), so e^d = (1 + √k) / (1 - √k).
    let s = k.sqrt();
    let one = s.lift(1.0);
    Ok(((one.clone() + s.clone()) / (one - s)).ln())
}

/// Trirectangle with acute angle `phi` and legs `a`, `b` at the opposite corner.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Trirectangle {
    pub phi: f64,
    pub beta: f64,
    pub alpha: f64,
}

/// `cos φ = sinh a sinh b`, `cosh a = tanh β coth b`, `sinh α = sinh a cosh β`.
///
/// `phi` is undefined when `sinh a sinh b > 1`; that case is an error.
/// At `sinh a sinh b = 1` the fourth vertex is ideal: `phi = 0` and both
/// remaining sides are infinite.
pub fn trirectangle_relations(a: f64, b: f64) -> Result<Trirectangle> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return domain("trirectangle legs must be positive and finite");
    }
    let prod = a.sinh() * b.sinh();
    if prod > 1.0 {
        return Err(FluteError::Domain(format!(
            "phi undefined: sinh(a)sinh(b) = {prod} > 1, no trirectangle with these legs"
        )));
    }
    let phi = prod.acos();
    let tb = a.cosh() * b.tanh();
    if tb >= 1.0 {
        return Ok(Trirectangle {
            phi,
            beta: f64::INFINITY,
            alpha: f64::INFINITY,
        });
    }
    let beta = tb.atanh();
    let alpha = (a.sinh() * beta.cosh()).asinh();
    Ok(Trirectangle { phi, beta, alpha })
}
