//! Shear sequences of a patchwork chain, the piecewise horocyclic length,
//! criterion series in log space, the β sequence and classification.

mod registry;

pub use registry::{classify, comparison_test, ClassifyOptions, Comparison, Thresholds};

use serde::{Deserialize, Serialize};

use crate::error::{domain, FluteError, Result};
use crate::flute::{asinh_inv_sinh_from_ln, ln_eta_length, two_ln_sinh_half_from_ln, FluteSurface};
use crate::patchwork::{RestrictedPatchwork, USequence};
use crate::real::{log_add_exp, log_cosh, LogValue};

/// `2 ln sinh(η/2)`.
pub fn shear_even(eta: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return domain(format!("eta must be positive, got {eta}"));
    }
    Ok(two_ln_sinh_half_from_ln(eta.ln()))
}

/// `asinh(1/sinh η_n) + asinh(1/sinh η_{n+1}) + u_{n+1} ℓ_{n+1}`.
pub fn shear_odd(eta_n: f64, eta_next: f64, u_next: f64, ell_next: f64) -> Result<f64> {
    if !(eta_n > 0.0 && eta_next > 0.0) {
        return domain("eta must be positive");
    }
    Ok(asinh_inv_sinh_from_ln(eta_n.ln()) + asinh_inv_sinh_from_ln(eta_next.ln()) + u_next * ell_next)
}

/// Shears `s_1..s_{2N+1}` with `s_1 = 0`, and their running sums.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShearSequence {
    pub s: Vec<f64>,
    pub cumulative: Vec<f64>,
}

impl ShearSequence {
    pub fn from_shears(s: Vec<f64>) -> Self {
        let mut acc = 0.0;
        let cumulative = s
            .iter()
            .map(|x| {
                acc += x;
                acc
            })
            .collect();
        ShearSequence { s, cumulative }
    }

    /// `s_k`, 1-based.
    pub fn at(&self, k: usize) -> f64 {
        self.s[k - 1]
    }

    /// `s_1 + … + s_k`.
    pub fn sum_to(&self, k: usize) -> f64 {
        self.cumulative[k - 1]
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

/// Shears through `s_{2N+1}`. Needs `u_1..u_{N+1}` and `ℓ_1..ℓ_{N+2}`.
pub fn shear_sequence(surface: &FluteSurface, u: &USequence, n_max: usize) -> Result<ShearSequence> {
    if u.len() < n_max + 1 {
        return Err(FluteError::Domain(format!(
            "shears through s_{} need u_1..u_{}, got {}",
            2 * n_max + 1,
            n_max + 1,
            u.len()
        )));
    }
    let ls = (1..=n_max + 2)
        .map(|k| surface.length(k))
        .collect::<Result<Vec<_>>>()?;
    let ln_eta = (1..=n_max + 1)
        .map(|k| ln_eta_length(ls[k - 1], ls[k]))
        .collect::<Result<Vec<_>>>()?;
    let mut s = Vec::with_capacity(2 * n_max + 1);
    s.push(0.0);
    for n in 1..=n_max {
        s.push(two_ln_sinh_half_from_ln(ln_eta[n - 1]));
        s.push(
            asinh_inv_sinh_from_ln(ln_eta[n - 1])
                + asinh_inv_sinh_from_ln(ln_eta[n])
                + u.at(n + 1) * ls[n],
        );
    }
    Ok(ShearSequence::from_shears(s))
}

/// `Σ_{n≤N} e^{s_1+…+s_{2n}} + Σ_{n≤N} e^{-(s_1+…+s_{2n+1})}` in log space.
pub fn horocyclic_partial_length(s: &ShearSequence, n_max: usize) -> Result<LogValue> {
    Ok(*horocyclic_partial_lengths(s, n_max)?
        .last()
        .unwrap_or(&LogValue::ZERO))
}

/// Running values of [`horocyclic_partial_length`] for `N = 1..=n_max`.
pub fn horocyclic_partial_lengths(s: &ShearSequence, n_max: usize) -> Result<Vec<LogValue>> {
    if s.len() < 2 * n_max + 1 {
        return domain(format!(
            "horocyclic length through N = {n_max} needs {} shears, got {}",
            2 * n_max + 1,
            s.len()
        ));
    }
    let mut acc = LogValue::ZERO;
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        acc = acc
            .add(LogValue::from_ln(s.sum_to(2 * n)))
            .add(LogValue::from_ln(-s.sum_to(2 * n + 1)));
        out.push(acc);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermForm {
    Cosh,
    SignedExp,
}

/// `ln[(e^{-ℓ_{n+1}/2} + e^{-ℓ_n/2}) cosh S_n]`, even in `S_n` bit for bit.
pub fn log_term(l: f64, l_next: f64, s: f64) -> f64 {
    log_add_exp(-l_next / 2.0, -l / 2.0) + log_cosh(s)
}

/// Criterion terms and partial sums, all as natural logs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionSeries {
    pub form: TermForm,
    /// `S_n = u_1ℓ_1 + … + u_nℓ_n`.
    pub s: Vec<f64>,
    pub log_terms: Vec<f64>,
    pub log_partial_sums: Vec<f64>,
}

impl CriterionSeries {
    pub fn log_partial(&self) -> f64 {
        *self.log_partial_sums.last().unwrap_or(&f64::NEG_INFINITY)
    }
}

pub fn twisted_sums(surface: &FluteSurface, u: &USequence, n_max: usize) -> Result<Vec<f64>> {
    let mut acc = 0.0;
    (1..=n_max)
        .map(|n| {
            acc += u.at(n) * surface.length(n)?;
            Ok(acc)
        })
        .collect()
}

/// Terms `(e^{-ℓ_{n+1}/2} + e^{-ℓ_n/2})·cosh(S_n)` for `n = 1..=N`, or with
/// `e^{-v_{n+1}S_n}` in place of the cosh. The signed form needs `v` and
/// non-decreasing lengths through `ℓ_{N+1}`.
pub fn criterion_terms(
    surface: &FluteSurface,
    u: &USequence,
    n_max: usize,
    form: TermForm,
    v: Option<&RestrictedPatchwork>,
) -> Result<CriterionSeries> {
    if u.len() < n_max {
        return domain(format!("u has {} entries, {} needed", u.len(), n_max));
    }
    let ls = (1..=n_max + 1)
        .map(|k| surface.length(k))
        .collect::<Result<Vec<_>>>()?;
    if form == TermForm::SignedExp {
        let v = v.ok_or_else(|| {
            FluteError::Refused("the signed exponential form needs a restricted patchwork".into())
        })?;
        if v.len() < n_max + 1 {
            return Err(FluteError::Refused(format!(
                "signed exponential form needs v_1..v_{}",
                n_max + 1
            )));
        }
        if let Some(k) = ls.windows(2).position(|w| w[1] < w[0]) {
            return Err(FluteError::Refused(format!(
                "signed exponential form only holds for increasing cuff lengths; ℓ_{} > ℓ_{}",
                k + 1,
                k + 2
            )));
        }
    }
    let s = twisted_sums(surface, u, n_max)?;
    let mut log_terms = Vec::with_capacity(n_max);
    let mut log_partial_sums = Vec::with_capacity(n_max);
    let mut acc = f64::NEG_INFINITY;
    for n in 1..=n_max {
        let base = log_add_exp(-ls[n] / 2.0, -ls[n - 1] / 2.0);
        let lt = match form {
            TermForm::Cosh => base + log_cosh(s[n - 1]),
            TermForm::SignedExp => {
                let vn1 = f64::from(v.expect("checked above").at(n + 1));
                base - vn1 * s[n - 1]
            }
        };
        acc = log_add_exp(acc, lt);
        log_terms.push(lt);
        log_partial_sums.push(acc);
    }
    Ok(CriterionSeries {
        form,
        s,
        log_terms,
        log_partial_sums,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaSequence {
    pub beta: Vec<f64>,
    /// Whether `β_n ≥ 0` was asserted (lengths increasing).
    pub nonnegativity_checked: bool,
}

/// `β_1 = -v_2u_1ℓ_1`, `β_{n+1} = v_{n+1}v_{n+2}(β_n - v_{n+1}ℓ_{n+1}u_{n+1})`,
/// checked against `β_n = -v_{n+1}S_n`.
pub fn beta_sequence(
    v: &RestrictedPatchwork,
    u: &USequence,
    surface: &FluteSurface,
    n_max: usize,
) -> Result<BetaSequence> {
    if n_max == 0 {
        return domain("beta sequence needs N ≥ 1");
    }
    if v.len() < n_max + 1 || u.len() < n_max {
        return domain(format!("beta through N = {n_max} needs v_1..v_{} and u_1..u_{n_max}", n_max + 1));
    }
    for n in 1..=n_max + 1 {
        let t = surface.twist(n)?;
        if t != 0.0 && t != 0.5 {
            return Err(FluteError::Refused(format!(
                "beta sequence is defined for twists in {{0, 1/2}}; t_{n} = {t}"
            )));
        }
    }
    let ls = (1..=n_max + 1)
        .map(|k| surface.length(k))
        .collect::<Result<Vec<_>>>()?;
    let increasing = ls.windows(2).all(|w| w[1] > w[0]);
    let vf = |n: usize| f64::from(v.at(n));
    let mut beta = Vec::with_capacity(n_max);
    let mut b = -vf(2) * u.at(1) * ls[0];
    beta.push(b);
    for n in 1..n_max {
        b = vf(n + 1) * vf(n + 2) * (b - vf(n + 1) * ls[n] * u.at(n + 1));
        beta.push(b);
    }
    let s = twisted_sums(surface, u, n_max)?;
    for n in 1..=n_max {
        let closed = -vf(n + 1) * s[n - 1];
        let tol = 1e-12 * s[n - 1].abs().max(1.0);
        if (beta[n - 1] - closed).abs() > tol {
            return domain(format!(
                "beta recursion {} disagrees with closed form {} at n = {n}",
                beta[n - 1],
                closed
            ));
        }
        if increasing && beta[n - 1] < -tol {
            return domain(format!("beta_{n} = {} is negative for increasing lengths", beta[n - 1]));
        }
    }
    Ok(BetaSequence {
        beta,
        nonnegativity_checked: increasing,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    DivergentConfirmed,
    ConvergentConfirmed,
    HeuristicDivergent,
    HeuristicConvergent,
    Inconclusive,
}

impl Verdict {
    pub fn is_divergent_side(self) -> bool {
        matches!(self, Verdict::DivergentConfirmed | Verdict::HeuristicDivergent)
    }

    pub fn is_confirmed(self) -> bool {
        matches!(self, Verdict::DivergentConfirmed | Verdict::ConvergentConfirmed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    FirstKind,
    NotFirstKind,
    Parabolic,
    NotParabolic,
    Undetermined,
}

/// Least-squares slopes over the last half of the window, against `ln n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub window_start: usize,
    pub window_end: usize,
    /// Slope of `ln(partial sum)`.
    pub partial_slope: Option<f64>,
    /// Slope of `ln(term)`.
    pub term_slope: Option<f64>,
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 3 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

pub fn growth_fit(series: &CriterionSeries) -> GrowthFit {
    let n = series.log_terms.len();
    let start = (n / 2).max(1);
    let xs: Vec<f64> = (start..=n).map(|k| (k as f64).ln()).collect();
    let window = |v: &[f64]| v[start - 1..n].to_vec();
    GrowthFit {
        window_start: start,
        window_end: n,
        partial_slope: if n == 0 { None } else { ls_slope(&xs, &window(&series.log_partial_sums)) },
        term_slope: if n == 0 { None } else { ls_slope(&xs, &window(&series.log_terms)) },
    }
}

/// Verdict from the fitted slopes alone; never a confirmed one. Partial sums
/// still growing across the window outweigh fast-looking term decay, which
/// a patchwork with occasional large terms can fake.
pub fn heuristic_verdict(fit: &GrowthFit, th: &Thresholds) -> Verdict {
    match (fit.term_slope, fit.partial_slope) {
        (_, Some(ps)) if ps > th.divergent_slope => Verdict::HeuristicDivergent,
        (Some(ts), _) if ts < -th.convergent_term_decay => Verdict::HeuristicConvergent,
        _ => Verdict::Inconclusive,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BoundedLengths,
    SymmetricRestricted,
    LengthLowerBound,
    MinimizingSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchSummary {
    pub strategy: crate::patchwork::SearchStrategy,
    pub exact: bool,
    pub v_prime: Vec<i8>,
    pub w: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub depth: usize,
    pub method: Method,
    pub form: TermForm,
    /// Restricted patchwork used for the terms, when one was.
    pub v: Option<Vec<i8>>,
    pub search: Option<SearchSummary>,
    pub comparison: Option<Comparison>,
    pub log_terms: Vec<f64>,
    pub log_partial_sums: Vec<f64>,
    pub growth_fit: GrowthFit,
    pub verdict: Verdict,
    pub first_kind: Classification,
    pub parabolic: Classification,
    pub justification: String,
}
