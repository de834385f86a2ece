//! Pentagon-by-pentagon development, kept separate from the shear-coordinate
//! development so that it can check it.
//!
//! Each cuff lift gets its own frame: the cuff is the imaginary axis, oriented
//! upward, and the foot of the incoming common perpendicular sits at `i`. The
//! next cuff lies on the right at the distance where a right-angled pentagon
//! with one ideal vertex closes up; it is attached at a signed offset along
//! the cuff read off from which half-cuffs the patchwork pentagons occupy.
//! Nothing here uses the closed forms for `η_n`, the shears or `u'_n`.

use crate::error::{domain, FluteError, Result};
use crate::flute::FluteSurface;
use crate::hyp::{geodesic_distance, shear_of_quad, to_axis, BoundaryPoint, Geodesic, Isometry};
use crate::patchwork::Patchwork;

use num_complex::Complex64;
use BoundaryPoint::{Finite, Infinity};

/// Maps the standard frame to the frame of the cuff at distance `eta` on the
/// right of the imaginary axis, with their common perpendicular on `|z| = 1`.
fn neighbour(eta: f64) -> Result<Isometry> {
    let (x, y) = ((eta / 2.0).tanh(), 1.0 / (eta / 2.0).tanh());
    let c = eta.tanh();
    let foot = Complex64::new(c, (1.0 - c * c).sqrt());
    let t = to_axis(Finite(x), Finite(y))?;
    let kappa = t.apply(foot).norm();
    Ok(t.inverse().compose(&Isometry::dilation(kappa)?))
}

/// Where the perpendicular to the next cuff, `lb/2` further along it, lands on
/// the boundary (log of its position).
fn closure_gap(eta: f64, la: f64, lb: f64) -> Result<f64> {
    let m = neighbour(eta)?;
    match m.apply_boundary(Finite(-(lb / 2.0).exp())) {
        Finite(v) if v > 0.0 => Ok(v.ln() - la / 2.0),
        // Too close: the perpendicular wraps past ∞.
        _ => Ok(f64::INFINITY),
    }
}

/// Length of the finite side between two cuff sides `la/2`, `lb/2` of a
/// right-angled pentagon with one ideal vertex, found by bisection on the
/// closing condition.
pub fn pentagon_eta(la: f64, lb: f64) -> Result<f64> {
    if !(la > 0.0 && lb > 0.0 && la.is_finite() && lb.is_finite()) {
        return domain(format!("cuff lengths must be positive, got {la}, {lb}"));
    }
    let (mut lo, mut hi) = (1e-8_f64, 25.0_f64);
    let f_lo = closure_gap(lo, la, lb)?;
    let f_hi = closure_gap(hi, la, lb)?;
    if f_lo.signum() == f_hi.signum() {
        return domain(format!("pentagon does not close for {la}, {lb}"));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if closure_gap(mid, la, lb)?.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Signed offset along a cuff, in units of its length, from the foot of the
/// incoming perpendicular to the foot of the outgoing one.
///
/// Positions are measured on the cuff with the incoming foot at `0`; the
/// pentagons of the earlier pants cover `[0, 1/2]` (sign `+1`) or `[1/2, 1]`,
/// those of the later pants `[t, t+1/2]` or `[t+1/2, t+1]`. The chosen
/// pentagons must overlap along the cuff (exactly one integer shift does),
/// and the `w` flags say which end of each half-cuff the path leaves from.
pub fn half_cuff_offset(t: f64, exit: (i8, u8), next: (i8, u8)) -> Result<f64> {
    let (f, wb) = exit;
    let (e, wc) = next;
    let out: (f64, f64) = if f == 1 { (0.0, 0.5) } else { (0.5, 1.0) };
    let inc = if e == 1 { (t, t + 0.5) } else { (t + 0.5, t + 1.0) };
    let q = match (wb, f == 1) {
        (1, true) | (0, false) => 1.0,
        _ => 0.0,
    };
    let r = match (wc, e == 1) {
        (1, true) | (0, false) => t + 1.0,
        _ => t,
    };
    let shifts: Vec<f64> = (-3..=3)
        .map(f64::from)
        .filter(|k| out.1.min(inc.1 + k) - out.0.max(inc.0 + k) > 1e-12)
        .collect();
    match shifts.as_slice() {
        [k] => Ok(r + k - q),
        _ => domain(format!(
            "half-cuffs overlap for {} shifts at t = {t}",
            shifts.len()
        )),
    }
}

/// Cuff lifts developed pentagon by pentagon.
#[derive(Clone, Debug)]
pub struct PentagonChain {
    /// `η_k` from the closing condition, `k = 1..K-1`.
    pub etas: Vec<f64>,
    /// Signed attachment offsets `d_k` along cuff `k` (`d_1 = 0`).
    pub offsets: Vec<f64>,
    /// `steps[k-1]` maps cuff `k+1`'s frame into cuff `k`'s frame.
    pub steps: Vec<Isometry>,
}

fn axis() -> Geodesic {
    Geodesic {
        start: Finite(0.0),
        end: Infinity,
    }
}

impl PentagonChain {
    /// Number of cuff lifts.
    pub fn cuffs(&self) -> usize {
        self.steps.len() + 1
    }

    /// Shear across `g_n`, measured in the frame of cuff `⌈n/2⌉`, for
    /// `2 ≤ n ≤ 2K - 2`.
    pub fn shear(&self, n: usize) -> Result<f64> {
        let k = n.div_ceil(2);
        if n < 2 || n > 2 * self.cuffs() - 2 {
            return domain(format!("shear across g_{n} is outside the developed cuffs"));
        }
        let next = &self.steps[k - 1];
        if n % 2 == 0 {
            shear_of_quad(
                Finite(0.0),
                Infinity,
                next.apply_boundary(Infinity),
                next.apply_boundary(Finite(0.0)),
            )
        } else {
            let prev = self.steps[k - 2].inverse();
            shear_of_quad(
                Finite(0.0),
                prev.apply_boundary(Finite(0.0)),
                Infinity,
                next.apply_boundary(Infinity),
            )
        }
    }

    /// Distance between cuff lifts `k` and `k+1`, measured from their endpoints.
    pub fn measured_eta(&self, k: usize) -> Result<f64> {
        if k == 0 || k >= self.cuffs() {
            return domain(format!("η_{k} is outside the developed cuffs"));
        }
        let m = &self.steps[k - 1];
        geodesic_distance(&axis(), &m.apply_geodesic(&axis()))
    }
}

fn switch_rule(p: &Patchwork, pants: usize) -> Result<()> {
    for m in 2..=pants {
        let (e, we) = p.entry(2 * m - 1);
        let (x, wx) = p.entry(2 * m);
        let flip = if (we + wx) % 2 == 0 { 1 } else { -1 };
        if x != e * flip {
            return Err(FluteError::RuleViolation {
                index: 2 * m,
                rule: "v'_{2n} = v'_{2n-1}·(-1)^(w_{2n-1}+w_{2n})".into(),
            });
        }
    }
    Ok(())
}

/// Develops `cuffs` cuff lifts along `p`. Needs `cuffs` pairs of pants
/// satisfying the pentagon switching rule inside each pair of pants.
pub fn develop_pentagons(surface: &FluteSurface, p: &Patchwork, cuffs: usize) -> Result<PentagonChain> {
    if cuffs < 2 {
        return domain("at least two cuffs are needed");
    }
    if p.pants() < cuffs {
        return Err(FluteError::Validation {
            field: "patchwork",
            index: p.pants() + 1,
            message: format!("{} pairs of pants given, {cuffs} needed", p.pants()),
        });
    }
    p.check(true)?;
    switch_rule(p, cuffs)?;
    let mut etas = Vec::with_capacity(cuffs - 1);
    let mut offsets = Vec::with_capacity(cuffs - 1);
    let mut steps = Vec::with_capacity(cuffs - 1);
    for k in 1..cuffs {
        let (la, lb) = (surface.length(k)?, surface.length(k + 1)?);
        let eta = pentagon_eta(la, lb)?;
        let d = if k == 1 {
            0.0
        } else {
            half_cuff_offset(surface.twist(k)?, p.entry(2 * k), p.entry(2 * k + 1))? * la
        };
        steps.push(Isometry::dilation(d.exp())?.compose(&neighbour(eta)?));
        etas.push(eta);
        offsets.push(d);
    }
    Ok(PentagonChain {
        etas,
        offsets,
        steps,
    })
}

/// A local patchwork configuration around one cuff: the pants before it and
/// the pants after it, each as (entry sign, entry flag, exit flag).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub before: (i8, u8, u8),
    pub after: (i8, u8, u8),
}

const FLAG_PAIRS: [(u8, u8); 3] = [(0, 0), (1, 0), (0, 1)];

/// The 28 admissible configurations: flag pairs in `{00, 10, 01}`, not both
/// `00`, and no flags raised on both sides of the shared cuff.
pub fn admissible_configurations() -> Vec<Configuration> {
    let mut out = Vec::new();
    for e1 in [1i8, -1] {
        for e2 in [1i8, -1] {
            for &(a0, a1) in &FLAG_PAIRS {
                for &(b0, b1) in &FLAG_PAIRS {
                    if (a0, a1, b0, b1) == (0, 0, 0, 0) || a1 + b0 == 2 {
                        continue;
                    }
                    out.push(Configuration {
                        before: (e1, a0, a1),
                        after: (e2, b0, b1),
                    });
                }
            }
        }
    }
    out
}

/// Patchwork of `pants` pairs of pants repeating `c` with period three; every
/// third pair of pants carries no flags and takes its entry sign from
/// `filler`. Exit signs follow the switching rule.
pub fn configuration_patchwork(c: Configuration, pants: usize, mut filler: impl FnMut() -> i8) -> Patchwork {
    let mut v_prime = Vec::with_capacity(2 * pants);
    let mut w = Vec::with_capacity(2 * pants);
    for m in 0..pants {
        let (e, w0, w1) = match m % 3 {
            0 => c.before,
            1 => c.after,
            _ => (filler(), 0, 0),
        };
        let x = if (w0 + w1) % 2 == 0 { e } else { -e };
        v_prime.extend([e, x]);
        w.extend([w0, w1]);
    }
    Patchwork::new(v_prime, w).expect("signs and flags are well formed")
}
