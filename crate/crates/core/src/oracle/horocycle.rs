//! The piecewise horocyclic path through the wedges of a developed chain.

use super::develop::LiftChain;
use crate::error::{domain, Result};
use crate::hyp::BoundaryPoint;
use crate::real::Real;

use BoundaryPoint::{Finite, Infinity};

#[derive(Clone, Debug)]
struct Pt<T> {
    re: T,
    im: T,
}

/// `z ↦ -1/(z - v)`, sending `v` to ∞.
fn away<T: Real>(z: &Pt<T>, v: &BoundaryPoint<T>) -> Pt<T> {
    match v {
        Infinity => z.clone(),
        Finite(v) => {
            let x = z.re.clone() - v.clone();
            let y = z.im.clone();
            let m = x.clone() * x.clone() + y.clone() * y.clone();
            Pt {
                re: -x / m.clone(),
                im: y / m,
            }
        }
    }
}

fn back<T: Real>(w: &Pt<T>, v: &BoundaryPoint<T>) -> Pt<T> {
    match v {
        Infinity => w.clone(),
        Finite(v) => {
            let m = w.re.clone() * w.re.clone() + w.im.clone() * w.im.clone();
            Pt {
                re: v.clone() - w.re.clone() / m.clone(),
                im: w.im.clone() / m,
            }
        }
    }
}

fn away_boundary<T: Real>(x: &BoundaryPoint<T>, v: &BoundaryPoint<T>) -> Result<T> {
    match (x, v) {
        (Finite(x), Infinity) => Ok(x.clone()),
        (Infinity, Finite(v)) => Ok(v.lift(0.0)),
        (Finite(x), Finite(v)) => Ok(-(x.lift(1.0)) / (x.clone() - v.clone())),
        (Infinity, Infinity) => domain("endpoint coincides with the wedge vertex"),
    }
}

fn other<'a, T: Real>(a: &'a BoundaryPoint<T>, b: &'a BoundaryPoint<T>, v: &BoundaryPoint<T>) -> &'a BoundaryPoint<T> {
    if a == v {
        b
    } else {
        a
    }
}

/// Lengths of the horocyclic arcs crossing the wedges between `g_n` and
/// `g_{n+1}`, starting from the point `i` on `g_1`. Entry `n - 1` is the
/// arc in the `n`-th wedge. The chain must be in the normalized chart.
pub fn horocyclic_arcs<T: Real>(chain: &LiftChain<T>) -> Result<Vec<T>> {
    if chain.a.first().and_then(|x| x.value()).is_none_or(|x| x.to_f64() != 0.0)
        || !chain.b[0].is_infinite()
    {
        return domain("horocyclic path starts on g_1 = (0, ∞) of the normalized chart");
    }
    let one = chain.a[0].value().expect("checked").lift(1.0);
    let mut z = Pt {
        re: one.lift(0.0),
        im: one.clone(),
    };
    let vertices = chain.ideal_vertices();
    let mut out = Vec::with_capacity(vertices.len());
    for (i, v) in vertices.iter().enumerate() {
        let g = chain.geodesic(i + 1);
        let h = chain.geodesic(i + 2);
        let x1 = away_boundary(other(&g.start, &g.end, v), v)?;
        let x2 = away_boundary(other(&h.start, &h.end, v), v)?;
        let w = away(&z, v);
        out.push((x2.clone() - x1).abs() / w.im.clone());
        z = back(&Pt { re: x2, im: w.im }, v);
    }
    Ok(out)
}

/// Points along the horocyclic path in ℍ, `samples` per wedge (at least 2).
pub fn horocyclic_path_points(chain: &LiftChain<f64>, samples: usize) -> Result<Vec<(f64, f64)>> {
    horocyclic_arcs(chain)?;
    let samples = samples.max(2);
    let mut z = Pt { re: 0.0, im: 1.0 };
    let mut out = vec![(0.0, 1.0)];
    for (i, v) in chain.ideal_vertices().iter().enumerate() {
        let g = chain.geodesic(i + 1);
        let h = chain.geodesic(i + 2);
        let x1 = away_boundary(other(&g.start, &g.end, v), v)?;
        let x2 = away_boundary(other(&h.start, &h.end, v), v)?;
        let w = away(&z, v);
        for j in 1..samples {
            let s = j as f64 / (samples - 1) as f64;
            let p = back(&Pt { re: x1 + s * (x2 - x1), im: w.im }, v);
            out.push((p.re, p.im));
        }
        z = back(&Pt { re: x2, im: w.im }, v);
    }
    Ok(out)
}
