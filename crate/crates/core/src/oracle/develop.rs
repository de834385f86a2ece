//! Development of the nested chain `g_1, g_2, …` in ℍ from its shears, at any
//! working precision.
//!
//! Chart: `g_{2k-1} = (a_k, b_k)` and `g_{2k} = (a_k, b_{k+1})`, each oriented
//! `a → b` with the rest of the chain on its right, normalized by `a_1 = 0`,
//! `b_1 = ∞`, `b_2 = 1`. Then `0 = a_1 < a_2 < … < b_3 < b_2 = 1`.

use serde::Serialize;

use crate::error::{domain, FluteError, Result};
use crate::hyp::{cross_ratio, geodesic_distance, shear_of_quad, BoundaryPoint, Geodesic, Isometry};
use crate::real::{BigReal, Real};

use BoundaryPoint::{Finite, Infinity};

/// Developed chain of geodesics with ideal endpoints in the normalized chart.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftChain<T = f64> {
    pub a: Vec<BoundaryPoint<T>>,
    pub b: Vec<BoundaryPoint<T>>,
    pub bits: u32,
}

/// A development that may have stopped early for lack of precision.
#[derive(Clone, Debug)]
pub struct Development<T> {
    pub chain: LiftChain<T>,
    /// Index of the first shear that could not be realized.
    pub exhausted_at: Option<usize>,
}

impl<T: Real> LiftChain<T> {
    /// Number of geodesics `g_n`.
    pub fn len(&self) -> usize {
        if self.b.len() > self.a.len() {
            2 * self.a.len()
        } else {
            2 * self.a.len() - 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `g_n`, 1-based.
    pub fn geodesic(&self, n: usize) -> Geodesic<T> {
        let k = n.div_ceil(2);
        let end = if n % 2 == 1 { &self.b[k - 1] } else { &self.b[k] };
        Geodesic {
            start: self.a[k - 1].clone(),
            end: end.clone(),
        }
    }

    pub fn geodesics(&self) -> Vec<Geodesic<T>> {
        (1..=self.len()).map(|n| self.geodesic(n)).collect()
    }

    /// Wedge vertices in chain order: the common endpoint of `g_n` and `g_{n+1}`.
    pub fn ideal_vertices(&self) -> Vec<BoundaryPoint<T>> {
        (1..self.len())
            .map(|n| {
                if n % 2 == 1 {
                    self.a[n.div_ceil(2) - 1].clone()
                } else {
                    self.b[n / 2].clone()
                }
            })
            .collect()
    }

    /// The four ideal points `(p, q, r, t)` of the quadrilateral with diagonal `g_n`.
    pub fn quadrilateral(&self, n: usize) -> Result<[BoundaryPoint<T>; 4]> {
        if n < 2 || n >= self.len() {
            return Err(FluteError::Domain(format!(
                "shear across g_{n} needs 2 ≤ n < {}",
                self.len()
            )));
        }
        let k = n / 2;
        Ok(if n % 2 == 0 {
            [
                self.a[k - 1].clone(),
                self.b[k - 1].clone(),
                self.b[k].clone(),
                self.a[k].clone(),
            ]
        } else {
            [
                self.a[k].clone(),
                self.a[k - 1].clone(),
                self.b[k].clone(),
                self.b[k + 1].clone(),
            ]
        })
    }

    pub fn to_f64(&self) -> LiftChain<f64> {
        LiftChain {
            a: self.a.iter().map(|x| x.to_f64()).collect(),
            b: self.b.iter().map(|x| x.to_f64()).collect(),
            bits: 53,
        }
    }

    /// Per-step maps sending the standard frame `(0, -1, ∞)` to the frame
    /// `(p, q, r)` of each developed quadrilateral, rounded to double precision.
    pub fn development_maps(&self) -> Vec<Isometry> {
        (2..self.len())
            .filter_map(|n| {
                let [p, q, r, _] = self.quadrilateral(n).ok()?;
                frame_map(p.to_f64(), q.to_f64(), r.to_f64()).ok()
            })
            .collect()
    }
}

impl LiftChain<f64> {
    /// Image of the chain under a global isometry (leaves the normalized chart).
    pub fn transformed(&self, m: &Isometry) -> LiftChain<f64> {
        LiftChain {
            a: self.a.iter().map(|&x| m.apply_boundary(x)).collect(),
            b: self.b.iter().map(|&x| m.apply_boundary(x)).collect(),
            bits: self.bits,
        }
    }
}

/// Isometry with `0 ↦ p`, `-1 ↦ q`, `∞ ↦ r`.
fn frame_map(p: BoundaryPoint, q: BoundaryPoint, r: BoundaryPoint) -> Result<Isometry> {
    // z ↦ (r·k·z + p) / (k·z + 1) sends 0 ↦ p, ∞ ↦ r; pick k from q.
    match (p, q, r) {
        (Finite(p), Finite(q), Finite(r)) => {
            let k = (q - p) / (q - r);
            Isometry::new(r * k, p, k, 1.0)
        }
        (Finite(p), Infinity, Finite(r)) => Isometry::new(r, p, 1.0, 1.0),
        _ => domain("frame with an infinite p or r"),
    }
}

/// Inverse of `z ↦ -((z-p)(q-r)) / ((z-r)(q-p))` at `y`: the ideal point whose
/// shear across `p → r` against `q` equals `ln y`.
fn place<T: Real>(p: &BoundaryPoint<T>, q: &BoundaryPoint<T>, r: &BoundaryPoint<T>, y: T) -> Result<T> {
    let (p, r) = match (p, r) {
        (Finite(p), Finite(r)) => (p.clone(), r.clone()),
        _ => return domain("development needs finite p and r"),
    };
    Ok(match q {
        Infinity => (p + y.clone() * r) / (y.lift(1.0) + y),
        Finite(q) => {
            let qr = q.clone() - r.clone();
            let qp = q.clone() - p.clone();
            (p * qr.clone() + y.clone() * r * qp.clone()) / (qr + y * qp)
        }
    })
}

fn finite<T: Real>(x: &BoundaryPoint<T>) -> Option<&T> {
    x.value()
}

/// Separation, in ulps, that keeps every cross ratio measured on the chain
/// good to about `1e-10`.
pub const HEADROOM: f64 = 1e10;

/// `|x - y| > HEADROOM·ε·max(|x|, |y|)`.
fn resolved<T: Real>(x: &T, y: &T, eps: f64) -> bool {
    let d = (x.clone() - y.clone()).abs();
    let m = if x.abs() > y.abs() { x.abs() } else { y.abs() };
    d > m * x.lift(HEADROOM * eps)
}

/// Develops `g_1, …, g_{M+1}` from shears `s_2, …, s_M` (given as
/// `shears[0] = s_2`). Stops at the first shear whose new endpoint cannot be
/// separated from its neighbours with [`HEADROOM`] to spare at `bits` of
/// precision, or once the chart gap drops below `HEADROOM` ulps.
pub fn develop_shears<T: Real>(shears: &[f64], bits: u32) -> Development<T> {
    let zero = T::with_bits(0.0, bits);
    let eps = zero.lift(1.0).epsilon();
    let mut a = vec![Finite(zero.clone())];
    let mut b = vec![Infinity, Finite(zero.lift(1.0))];
    for (i, &s) in shears.iter().enumerate() {
        let n = i + 2;
        let k = n / 2;
        let y = zero.lift(s).exp();
        let placed = if n % 2 == 0 {
            place(&a[k - 1], &b[k - 1], &b[k], y)
        } else {
            place(&a[k], &a[k - 1], &b[k], y)
        };
        let ok = match &placed {
            Ok(x) if x.is_finite() => {
                let (lo, hi) = if n % 2 == 0 {
                    (finite(&a[k - 1]), finite(&b[k]))
                } else {
                    (finite(&a[k]), finite(&b[k]))
                };
                match (lo, hi) {
                    (Some(lo), Some(hi)) => {
                        *lo < *x
                            && *x < *hi
                            && resolved(x, lo, eps)
                            && resolved(x, hi, eps)
                            && chart_gap(lo, hi).to_f64() >= HEADROOM * eps
                    }
                    _ => false,
                }
            }
            _ => false,
        };
        if !ok {
            return Development {
                chain: LiftChain { a, b, bits },
                exhausted_at: Some(n),
            };
        }
        let x = placed.expect("checked above");
        if n % 2 == 0 {
            a.push(Finite(x));
        } else {
            b.push(Finite(x));
        }
    }
    Development {
        chain: LiftChain { a, b, bits },
        exhausted_at: None,
    }
}

/// `2(atan hi - atan lo)`: boundary distance after the Cayley transform.
fn chart_gap<T: Real>(lo: &T, hi: &T) -> T {
    (hi.atan() - lo.atan()) * lo.lift(2.0)
}

/// Like [`develop_shears`] but precision exhaustion is an error.
pub fn develop_exact<T: Real>(shears: &[f64], bits: u32) -> Result<LiftChain<T>> {
    let d = develop_shears::<T>(shears, bits);
    match d.exhausted_at {
        Some(index) => Err(FluteError::PrecisionExhausted { index, bits }),
        None => Ok(d.chain),
    }
}

pub const PRECISION_LADDER: [u32; 3] = [53, 113, 256];

/// Runs the ladder 53 → 113 → 256 bits (and `max_bits` if larger), returning
/// the first complete development, or the most precise partial one.
pub fn develop_with_ladder(shears: &[f64], max_bits: u32) -> Development<BigReal> {
    let mut rungs: Vec<u32> = PRECISION_LADDER.iter().copied().filter(|&b| b <= max_bits.max(53)).collect();
    if max_bits > 256 {
        rungs.push(max_bits);
    }
    let mut last = None;
    for bits in rungs {
        let d = develop_shears::<BigReal>(shears, bits);
        if d.exhausted_at.is_none() {
            return d;
        }
        last = Some(d);
    }
    last.expect("ladder has at least one rung")
}

/// Shear across `g_n` measured from the four ideal points around it.
pub fn measure_shear<T: Real>(chain: &LiftChain<T>, n: usize) -> Result<T> {
    let [p, q, r, t] = chain.quadrilateral(n)?;
    shear_of_quad(p, q, r, t)
}

/// Distance between `g_{2n-1}` and `g_{2n+1}`.
pub fn measure_eta<T: Real>(chain: &LiftChain<T>, n: usize) -> Result<T> {
    if n == 0 || 2 * n + 1 > chain.len() {
        return domain(format!("η_{n} needs g_{} in the chain", 2 * n + 1));
    }
    geodesic_distance(&chain.geodesic(2 * n - 1), &chain.geodesic(2 * n + 1))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AccumulationEstimate {
    /// `a_k` in the normalized chart, increasing.
    pub left_limit_track: Vec<f64>,
    /// `b_k` in the normalized chart (`b_1 = ∞` omitted), decreasing.
    pub right_limit_track: Vec<f64>,
    /// Angle-metric width of `g_n` after normalization, `n = 1..len`.
    pub gap: Vec<f64>,
}

impl AccumulationEstimate {
    pub fn final_gap(&self) -> f64 {
        *self.gap.last().unwrap_or(&std::f64::consts::PI)
    }
}

/// Image of `z` under the chart map `a_1 ↦ 0`, `b_1 ↦ ∞`, `b_2 ↦ 1`.
fn normalize<T: Real>(
    z: &BoundaryPoint<T>,
    a1: &BoundaryPoint<T>,
    b1: &BoundaryPoint<T>,
    b2: &BoundaryPoint<T>,
    unit: &T,
) -> Result<BoundaryPoint<T>> {
    if z == a1 {
        Ok(Finite(unit.lift(0.0)))
    } else if z == b1 {
        Ok(Infinity)
    } else if z == b2 {
        Ok(Finite(unit.lift(1.0)))
    } else {
        Ok(Finite(cross_ratio(z.clone(), b2.clone(), a1.clone(), b1.clone())?))
    }
}

/// Widths of the nested geodesics in the normalized chart.
pub fn accumulation_gap<T: Real>(chain: &LiftChain<T>) -> Result<AccumulationEstimate> {
    if chain.len() < 3 {
        return domain("accumulation needs at least three geodesics");
    }
    let unit = match chain.a.iter().chain(chain.b.iter()).find_map(|x| x.value().cloned()) {
        Some(x) => x.lift(1.0),
        None => return domain("chain has no finite endpoint"),
    };
    let (a1, b1, b2) = (&chain.a[0], &chain.b[0], &chain.b[1]);
    let norm = |z: &BoundaryPoint<T>| normalize(z, a1, b1, b2, &unit);
    let a = chain.a.iter().map(norm).collect::<Result<Vec<_>>>()?;
    let b = chain.b.iter().map(norm).collect::<Result<Vec<_>>>()?;
    let angle = |x: &BoundaryPoint<T>| match x {
        Finite(v) => v.atan(),
        Infinity => unit.lift(std::f64::consts::FRAC_PI_2),
    };
    let mut gap = Vec::with_capacity(chain.len());
    for n in 1..=chain.len() {
        let k = n.div_ceil(2);
        let end = if n % 2 == 1 { &b[k - 1] } else { &b[k] };
        gap.push(((angle(end) - angle(&a[k - 1])) * unit.lift(2.0)).to_f64());
    }
    let val = |x: &BoundaryPoint<T>| x.value().map(|v| v.to_f64()).unwrap_or(f64::INFINITY);
    Ok(AccumulationEstimate {
        left_limit_track: a.iter().map(val).collect(),
        right_limit_track: b[1..].iter().map(val).collect(),
        gap,
    })
}
