//! Closed-form comparison tests for registered tails, and the classification
//! pipeline built on them.

use serde::{Deserialize, Serialize};

use super::{
    criterion_terms, growth_fit, heuristic_verdict, Classification, CriterionReport,
    CriterionSeries, Method, SearchSummary, TermForm, Verdict,
};
use crate::error::Result;
use crate::flute::{FluteSurface, SequenceSpec, Tail};
use crate::patchwork::{
    minimizing_patchwork_search, u_sequence, RestrictedPatchwork, SearchStrategy,
    EXHAUSTIVE_SEARCH_CAP,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Partial-sum log-slope above which a series is called heuristically divergent.
    pub divergent_slope: f64,
    /// Terms decaying faster than `n^{-this}` are called heuristically convergent.
    pub convergent_term_decay: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            divergent_slope: 0.1,
            convergent_term_decay: 1.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub depth: usize,
    pub beam_width: usize,
    /// Exhaustive search is used up to this depth, beam search beyond.
    pub exhaustive_up_to: usize,
    pub thresholds: Thresholds,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            depth: 200,
            beam_width: 64,
            exhaustive_up_to: 10,
            thresholds: Thresholds::default(),
        }
    }
}

/// Outcome of a registered comparison test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub test: String,
    pub divergent: bool,
    pub detail: String,
}

enum Growth {
    Bounded,
    Logarithmic(f64),
    Superlogarithmic,
    Unregistered,
}

fn length_growth(spec: &SequenceSpec) -> Growth {
    match spec.tail {
        ref t if t.is_bounded() => Growth::Bounded,
        Tail::Logarithmic { c, .. } if c > 0.0 => Growth::Logarithmic(c),
        Tail::Linear { a, .. } if a > 0.0 => Growth::Superlogarithmic,
        Tail::Power { c, p } if c > 0.0 && p > 0.0 => Growth::Superlogarithmic,
        _ => Growth::Unregistered,
    }
}

fn is_half_or_zero(t: f64) -> bool {
    t == 0.0 || t == 0.5
}

/// Cycle of tail twists, when every twist (prefix and tail) is `0` or `1/2`.
fn symmetric_twist_cycle(spec: &SequenceSpec) -> Option<Vec<f64>> {
    if !spec.prefix.iter().all(|&t| is_half_or_zero(t)) {
        return None;
    }
    let cycle = match &spec.tail {
        Tail::Periodic { cycle } if !cycle.is_empty() => cycle.clone(),
        Tail::Periodic { .. } => return None,
        _ => spec.tail_values()?,
    };
    cycle.iter().all(|&t| is_half_or_zero(t)).then_some(cycle)
}

/// Fraction of indices at which an odd number of half twists has occurred,
/// over one full period of that parity pattern.
fn odd_parity_fraction(cycle: &[f64]) -> f64 {
    let m = cycle.iter().filter(|&&t| t == 0.5).count();
    let reps = if m % 2 == 0 { 1 } else { 2 };
    let mut count = 0usize;
    let mut odd = 0usize;
    for k in 0..reps * cycle.len() {
        if cycle[k % cycle.len()] == 0.5 {
            count += 1;
        }
        if count % 2 == 1 {
            odd += 1;
        }
    }
    odd as f64 / (reps * cycle.len()) as f64
}

/// Registered comparison test for the restricted-patchwork series of a
/// surface whose twists all lie in `{0, 1/2}`.
///
/// Along the restricted patchwork, `|S_n|` grows like `M·ℓ_n/2` with
/// `M = max(f, 1-f)` and `f` the odd-parity fraction above (`M = 1` when
/// there are no half twists). Terms then behave like `e^{-(1-M)ℓ_n/2}`,
/// except that with no half twists `S_n` is eventually constant and the
/// terms are `≍ e^{-ℓ_n/2}`.
pub fn comparison_test(surface: &FluteSurface) -> Option<Comparison> {
    let cycle = symmetric_twist_cycle(&surface.twists)?;
    let m = cycle.iter().filter(|&&t| t == 0.5).count();
    let growth = length_growth(&surface.lengths);
    if let Growth::Bounded = growth {
        return Some(Comparison {
            test: "bounded lengths".into(),
            divergent: true,
            detail: "terms are bounded below by a positive constant".into(),
        });
    }
    let decay = if m == 0 {
        0.5
    } else {
        let f = odd_parity_fraction(&cycle);
        0.5 * (1.0 - f.max(1.0 - f))
    };
    match growth {
        Growth::Logarithmic(c) => {
            let p = c * decay;
            Some(Comparison {
                test: "p-series".into(),
                divergent: p <= 1.0,
                detail: format!("terms comparable to n^-{p}"),
            })
        }
        Growth::Superlogarithmic => Some(Comparison {
            test: "geometric domination".into(),
            divergent: false,
            detail: format!("terms bounded by e^(-{decay}·ℓ_n) up to constants"),
        }),
        _ => None,
    }
}

#[allow(clippy::too_many_arguments)]
fn report(
    depth: usize,
    method: Method,
    series: CriterionSeries,
    v: Option<Vec<i8>>,
    search: Option<SearchSummary>,
    comparison: Option<Comparison>,
    verdict: Verdict,
    first_kind: Classification,
    parabolic: Classification,
    justification: String,
) -> CriterionReport {
    let fit = growth_fit(&series);
    CriterionReport {
        depth,
        method,
        form: series.form,
        v,
        search,
        comparison,
        growth_fit: fit,
        log_terms: series.log_terms,
        log_partial_sums: series.log_partial_sums,
        verdict,
        first_kind,
        parabolic,
        justification,
    }
}

/// Classification pipeline:
/// 1. bounded cuff lengths: parabolic, hence first kind;
/// 2. all twists in `{0, 1/2}`: restricted-patchwork series, decided by a
///    registered comparison test when one applies;
/// 3. otherwise: a divergent lower bound `Σ e^{-ℓ_n/2}` settles first kind,
///    else the minimizing patchwork search yields a heuristic verdict only.
pub fn classify(surface: &FluteSurface, options: &ClassifyOptions) -> Result<CriterionReport> {
    use Classification::*;
    let depth = options.depth.max(2);
    let th = &options.thresholds;

    let symmetric_probe = surface.is_symmetric_through(depth + 1)?;
    let restricted = if symmetric_probe || surface.lengths.tail.is_bounded() {
        let v = RestrictedPatchwork::canonical(surface, depth + 1)?;
        let u = u_sequence(&v, surface, depth)?;
        Some((criterion_terms(surface, &u, depth, TermForm::Cosh, None)?, v))
    } else {
        None
    };

    if surface.lengths.tail.is_bounded() {
        let (series, v) = restricted.expect("computed for bounded lengths");
        return Ok(report(
            depth,
            Method::BoundedLengths,
            series,
            Some(v.v),
            None,
            comparison_test(surface),
            Verdict::DivergentConfirmed,
            FirstKind,
            Parabolic,
            "cuff lengths are bounded: the surface is parabolic, and every criterion \
             term is bounded below by a positive constant"
                .into(),
        ));
    }

    if let Some((series, v)) = restricted {
        let cmp = comparison_test(surface);
        let (verdict, fk, par, why) = match &cmp {
            Some(c) if c.divergent => (
                Verdict::DivergentConfirmed,
                FirstKind,
                Parabolic,
                format!("restricted patchwork series diverges ({}: {})", c.test, c.detail),
            ),
            Some(c) => (
                Verdict::ConvergentConfirmed,
                NotFirstKind,
                NotParabolic,
                format!("restricted patchwork series converges ({}: {})", c.test, c.detail),
            ),
            None => {
                let fit = growth_fit(&series);
                (
                    heuristic_verdict(&fit, th),
                    Undetermined,
                    Undetermined,
                    format!(
                        "twists in {{0, 1/2}} through depth {depth} but no registered comparison \
                         test for these tails; heuristic only (partial-sum slope {:?}, term slope {:?})",
                        fit.partial_slope, fit.term_slope
                    ),
                )
            }
        };
        return Ok(report(
            depth,
            Method::SymmetricRestricted,
            series,
            Some(v.v),
            None,
            cmp,
            verdict,
            fk,
            par,
            why,
        ));
    }

    let strategy = if depth <= options.exhaustive_up_to.min(EXHAUSTIVE_SEARCH_CAP) {
        SearchStrategy::Exhaustive
    } else {
        SearchStrategy::Beam {
            width: options.beam_width,
        }
    };
    let found = minimizing_patchwork_search(surface, depth, strategy)?;
    let series = criterion_terms(surface, &found.u, depth, TermForm::Cosh, None)?;
    let search = SearchSummary {
        strategy,
        exact: found.exact,
        v_prime: found.patchwork.v_prime.clone(),
        w: found.patchwork.w.clone(),
    };

    if let Growth::Logarithmic(c) = length_growth(&surface.lengths) {
        if c <= 2.0 {
            return Ok(report(
                depth,
                Method::LengthLowerBound,
                series,
                None,
                Some(search),
                Some(Comparison {
                    test: "lower bound".into(),
                    divergent: true,
                    detail: format!(
                        "every term is at least e^(-ℓ_n/2), comparable to n^-{}",
                        c / 2.0
                    ),
                }),
                Verdict::DivergentConfirmed,
                FirstKind,
                Undetermined,
                "the series diverges for every patchwork since cosh ≥ 1; first kind does \
                 not decide parabolicity for general twists"
                    .into(),
            ));
        }
    }

    let fit = growth_fit(&series);
    let verdict = heuristic_verdict(&fit, th);
    let why = format!(
        "generic twists: minimizing patchwork search ({}) to depth {depth}; heuristic \
         verdict from partial-sum slope {:?} and term slope {:?}",
        if found.exact { "exhaustive" } else { "beam, heuristic" },
        fit.partial_slope,
        fit.term_slope
    );
    Ok(report(
        depth,
        Method::MinimizingSearch,
        series,
        None,
        Some(search),
        None,
        verdict,
        Undetermined,
        Undetermined,
        why,
    ))
}
