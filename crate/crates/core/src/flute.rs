//! Flute surfaces given by Fenchel-Nielsen sequences `(ℓ_n, t_n)`, and the
//! length of the common perpendicular between consecutive cuff lifts.

use std::collections::HashMap;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, FluteError, Result};
use crate::real::log_add_exp;

/// Parametric family used past the explicit prefix. Evaluated at the
/// absolute index `n`, not at the offset into the tail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Tail {
    Constant { c: f64 },
    /// `a·n + b`
    Linear { a: f64, b: f64 },
    /// `c·ln(n + d)`
    Logarithmic { c: f64, d: f64 },
    /// `c·n^p`
    Power { c: f64, p: f64 },
    /// `cycle[(n - 1) mod len]`
    Periodic { cycle: Vec<f64> },
}

impl Tail {
    pub fn eval(&self, n: usize) -> f64 {
        let x = n as f64;
        match self {
            Tail::Constant { c } => *c,
            Tail::Linear { a, b } => a * x + b,
            Tail::Logarithmic { c, d } => c * (x + d).ln(),
            Tail::Power { c, p } => c * x.powf(*p),
            Tail::Periodic { cycle } => {
                if cycle.is_empty() {
                    f64::NAN
                } else {
                    cycle[(n - 1) % cycle.len()]
                }
            }
        }
    }

    /// Whether the family stays bounded as `n → ∞`.
    pub fn is_bounded(&self) -> bool {
        match self {
            Tail::Constant { .. } | Tail::Periodic { .. } => true,
            Tail::Linear { a, .. } => *a == 0.0,
            Tail::Logarithmic { c, .. } => *c == 0.0,
            Tail::Power { c, p } => *p <= 0.0 || *c == 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    #[serde(default)]
    pub prefix: Vec<f64>,
    pub tail: Tail,
}

impl SequenceSpec {
    pub fn constant(c: f64) -> Self {
        SequenceSpec {
            prefix: Vec::new(),
            tail: Tail::Constant { c },
        }
    }

    pub fn tail(tail: Tail) -> Self {
        SequenceSpec {
            prefix: Vec::new(),
            tail,
        }
    }

    pub fn with_prefix(mut self, prefix: Vec<f64>) -> Self {
        self.prefix = prefix;
        self
    }

    /// Value at `n ≥ 1`; prefix entries take precedence over the tail.
    pub fn eval(&self, n: usize) -> f64 {
        if n >= 1 && n <= self.prefix.len() {
            self.prefix[n - 1]
        } else {
            self.tail.eval(n)
        }
    }

    /// The set of values the tail can take, when it is finite.
    pub fn tail_values(&self) -> Option<Vec<f64>> {
        match &self.tail {
            Tail::Constant { c } => Some(vec![*c]),
            Tail::Periodic { cycle } => Some(cycle.clone()),
            Tail::Linear { a, b } if *a == 0.0 => Some(vec![*b]),
            Tail::Logarithmic { c, .. } if *c == 0.0 => Some(vec![0.0]),
            Tail::Power { c, .. } if *c == 0.0 => Some(vec![0.0]),
            _ => None,
        }
    }
}

/// Flute surface with lazily evaluated, cached coordinates.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluteSurface {
    pub lengths: SequenceSpec,
    pub twists: SequenceSpec,
    #[serde(skip)]
    cache: RwLock<HashMap<usize, (f64, f64)>>,
}

impl Clone for FluteSurface {
    fn clone(&self) -> Self {
        FluteSurface::new(self.lengths.clone(), self.twists.clone())
    }
}

impl PartialEq for FluteSurface {
    fn eq(&self, other: &Self) -> bool {
        self.lengths == other.lengths && self.twists == other.twists
    }
}

impl FluteSurface {
    pub fn new(lengths: SequenceSpec, twists: SequenceSpec) -> Self {
        FluteSurface {
            lengths,
            twists,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn constant(length: f64, twist: f64) -> Self {
        FluteSurface::new(SequenceSpec::constant(length), SequenceSpec::constant(twist))
    }

    /// `(ℓ_n, t_n)`, validated: `ℓ_n > 0` and `t_n ∈ (-1/2, 1/2]`.
    pub fn eval_coordinates(&self, n: usize) -> Result<(f64, f64)> {
        if n == 0 {
            return Err(FluteError::Validation {
                field: "index",
                index: 0,
                message: "indices start at 1".into(),
            });
        }
        if let Some(v) = self.cache.read().expect("coordinate cache").get(&n) {
            return Ok(*v);
        }
        let l = self.lengths.eval(n);
        let t = self.twists.eval(n);
        if !(l.is_finite() && l > 0.0) {
            return Err(FluteError::Validation {
                field: "lengths",
                index: n,
                message: format!("length {l} must be positive and finite"),
            });
        }
        if !(t.is_finite() && t > -0.5 && t <= 0.5) {
            return Err(FluteError::Validation {
                field: "twists",
                index: n,
                message: format!("twist {t} outside (-1/2, 1/2]"),
            });
        }
        // Re-inserting the same pair is harmless, so racing writers agree.
        self.cache.write().expect("coordinate cache").insert(n, (l, t));
        Ok((l, t))
    }

    pub fn length(&self, n: usize) -> Result<f64> {
        Ok(self.eval_coordinates(n)?.0)
    }

    pub fn twist(&self, n: usize) -> Result<f64> {
        Ok(self.eval_coordinates(n)?.1)
    }

    /// `(ℓ_1..ℓ_n, t_1..t_n)`.
    pub fn coordinates(&self, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut ls = Vec::with_capacity(n);
        let mut ts = Vec::with_capacity(n);
        for k in 1..=n {
            let (l, t) = self.eval_coordinates(k)?;
            ls.push(l);
            ts.push(t);
        }
        Ok((ls, ts))
    }

    /// True when every probed twist through `n` is `0` or `1/2`.
    pub fn is_symmetric_through(&self, n: usize) -> Result<bool> {
        for k in 1..=n {
            let t = self.twist(k)?;
            if t != 0.0 && t != 0.5 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// ℓ(η_n) / (e^{-ℓ_{n+1}/2} + e^{-ℓ_n/2}).
    pub fn eta_comparability(&self, n: usize) -> Result<f64> {
        let a = self.length(n)?;
        let b = self.length(n + 1)?;
        let den = log_add_exp(-a / 2.0, -b / 2.0);
        Ok((ln_eta_length(a, b)? - den).exp())
    }
}

/// `asinh(1/sinh(ℓ_a/2)) + asinh(1/sinh(ℓ_b/2))`.
pub fn eta_length(la: f64, lb: f64) -> Result<f64> {
    Ok(ln_eta_length(la, lb)?.exp())
}

/// Natural log of [`eta_length`], finite for arbitrarily long cuffs.
pub fn ln_eta_length(la: f64, lb: f64) -> Result<f64> {
    if !(la > 0.0 && lb > 0.0) || la.is_nan() || lb.is_nan() {
        return domain(format!("cuff lengths must be positive, got {la}, {lb}"));
    }
    Ok(log_add_exp(ln_half_eta(la / 2.0), ln_half_eta(lb / 2.0)))
}

/// `ln asinh(1/sinh x)`.
fn ln_half_eta(x: f64) -> f64 {
    if x > 30.0 {
        // 1/sinh x = 2e^{-x}(1 + O(e^{-2x})) and asinh y = y(1 + O(y²)).
        std::f64::consts::LN_2 - x
    } else {
        (1.0 / x.sinh()).asinh().ln()
    }
}

/// `asinh(1/sinh η) = -ln tanh(η/2)` from `ln η`.
pub fn asinh_inv_sinh_from_ln(ln_eta: f64) -> f64 {
    if ln_eta < -30.0 {
        // tanh(h) = h(1 - h²/3 + ...), h = η/2.
        std::f64::consts::LN_2 - ln_eta
    } else {
        let eta = ln_eta.exp();
        if eta > 40.0 {
            2.0 * (-eta).exp()
        } else {
            -(eta / 2.0).tanh().ln()
        }
    }
}

/// `2 ln sinh(η/2)` from `ln η`.
pub fn two_ln_sinh_half_from_ln(ln_eta: f64) -> f64 {
    let ln_h = ln_eta - std::f64::consts::LN_2;
    if ln_h < -8.0 {
        let h = ln_h.exp();
        2.0 * (ln_h + h * h / 6.0)
    } else {
        let h = ln_h.exp();
        if h > 40.0 {
            2.0 * (h - std::f64::consts::LN_2)
        } else {
            2.0 * h.sinh().ln()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_prefix_precedence() {
        let s = FluteSurface::constant(5.0, 0.0);
        assert_eq!(s.eval_coordinates(17).unwrap(), (5.0, 0.0));
        let spec = SequenceSpec::tail(Tail::Linear { a: 1.0, b: 0.0 }).with_prefix(vec![2.0, 3.0]);
        let s = FluteSurface::new(spec, SequenceSpec::constant(0.0));
        assert_eq!(s.length(2).unwrap(), 3.0);
        assert_eq!(s.length(3).unwrap(), 3.0);
        assert_eq!(s.length(4).unwrap(), 4.0);
    }

    #[test]
    fn bad_twist_names_field_and_index() {
        let s = FluteSurface::constant(5.0, 0.7);
        match s.eval_coordinates(3) {
            Err(FluteError::Validation { field, index, .. }) => {
                assert_eq!(field, "twists");
                assert_eq!(index, 3);
            }
            other => panic!("{other:?}"),
        }
        assert!(FluteSurface::constant(5.0, -0.5).eval_coordinates(1).is_err());
        assert!(FluteSurface::constant(5.0, 0.5).eval_coordinates(1).is_ok());
        assert!(FluteSurface::constant(0.0, 0.0).eval_coordinates(1).is_err());
    }

    #[test]
    fn eta_fixed_point() {
        let l = 2.0 * 1f64.asinh();
        assert!((eta_length(l, l).unwrap() - l).abs() < 1e-12);
        assert!(eta_length(0.0, 1.0).is_err());
    }

    #[test]
    fn eta_asymptotics() {
        let l = 30.0;
        let r = eta_length(l, l).unwrap() / (2.0 * 2.0 * (-l / 2.0f64).exp());
        assert!((r - 1.0).abs() < 1e-6);
        // Far past double-precision underflow the log form stays exact.
        let ln = ln_eta_length(4000.0, 4000.0).unwrap();
        assert!((ln - (2f64.ln() + 2f64.ln() - 2000.0)).abs() < 1e-12);
    }

    #[test]
    fn log_helpers_match_direct_formulas() {
        for eta in [1e-3, 0.1, 1.0, 3.0, 12.0] {
            let ln = f64::ln(eta);
            assert!((asinh_inv_sinh_from_ln(ln) - (1.0 / eta.sinh()).asinh()).abs() < 1e-12);
            assert!((two_ln_sinh_half_from_ln(ln) - 2.0 * (eta / 2.0).sinh().ln()).abs() < 1e-12);
        }
        let ln = -50.0;
        assert!((asinh_inv_sinh_from_ln(ln) - (2f64.ln() + 50.0)).abs() < 1e-12);
        assert!((two_ln_sinh_half_from_ln(ln) - 2.0 * (ln - 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn periodic_tail_uses_absolute_index() {
        let spec = SequenceSpec::tail(Tail::Periodic { cycle: vec![0.0, 0.5] }).with_prefix(vec![0.25]);
        assert_eq!(spec.eval(1), 0.25);
        assert_eq!(spec.eval(2), 0.5);
        assert_eq!(spec.eval(3), 0.0);
    }
}
