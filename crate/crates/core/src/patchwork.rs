//! Restricted patchworks `(v_n)` and generalized patchworks `((v'_n), (w_n))`,
//! the twist sequences `u_n`, `u'_n` they induce, enumeration and the search
//! for the patchwork minimizing the partial criterion sum.
//!
//! Index conventions (all 1-based, `v[0]` holds `v_1`):
//! * a restricted patchwork of length `L` yields `u_1..u_{L-1}`;
//! * a generalized patchwork with `k` pants carries `v'_1..v'_{2k}` and
//!   `w_1..w_{2k}`; pants `P_k` owns entries `2k-1` and `2k`, and yields
//!   `u'_1..u'_{k-1}`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::criterion::log_term;
use crate::error::{FluteError, Result};
use crate::flute::FluteSurface;
use crate::real::log_add_exp;

pub const RESTRICTED_ENUMERATION_CAP: usize = 24;
pub const GENERALIZED_ENUMERATION_CAP: usize = 8;
pub const EXHAUSTIVE_SEARCH_CAP: usize = 12;
pub const BEAM_DEPTH_CAP: usize = 100_000;

const RULE_ZERO: &str = "if t_n = 0 then v_{n+1} = v_n";
const RULE_HALF: &str = "if t_n = 1/2 then v_{n+1} = -v_n";

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RestrictedPatchwork {
    pub v: Vec<i8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Patchwork {
    pub v_prime: Vec<i8>,
    pub w: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Restricted,
    Generalized,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct USequence {
    pub u: Vec<f64>,
    pub provenance: Provenance,
}

impl USequence {
    /// `u_n`, 1-based.
    pub fn at(&self, n: usize) -> f64 {
        self.u[n - 1]
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

fn sign_ok(x: i8) -> bool {
    x == 1 || x == -1
}

/// Forced continuation of `v` across a cuff with twist `t`, if any.
fn forced_next(t: f64, v: i8) -> Option<i8> {
    if t == 0.0 {
        Some(v)
    } else if t == 0.5 {
        Some(-v)
    } else {
        None
    }
}

impl RestrictedPatchwork {
    pub fn new(v: Vec<i8>) -> Result<Self> {
        if let Some(i) = v.iter().position(|&x| !sign_ok(x)) {
            return Err(FluteError::Validation {
                field: "v",
                index: i + 1,
                message: format!("entry {} is not ±1", v[i]),
            });
        }
        Ok(RestrictedPatchwork { v })
    }

    /// `v_n`, 1-based.
    pub fn at(&self, n: usize) -> i8 {
        self.v[n - 1]
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// The patchwork with the given `v_2`, `v_1` chosen coherently with `t_1`
    /// (and `v_1 = -v_2` when `t_1` is generic), later signs forced by the
    /// twists where they are `0` or `1/2` and kept constant otherwise.
    pub fn with_v2(surface: &FluteSurface, len: usize, v2: i8) -> Result<Self> {
        if !sign_ok(v2) || len < 2 {
            return Err(FluteError::Domain("need v_2 = ±1 and length ≥ 2".into()));
        }
        let t1 = surface.twist(1)?;
        let v1 = match (t1 == 0.0, t1 == 0.5) {
            (true, _) => v2,
            (_, true) => -v2,
            _ => -v2,
        };
        let mut v = vec![v1, v2];
        for n in 2..len {
            let t = surface.twist(n)?;
            let prev = v[n - 1];
            v.push(forced_next(t, prev).unwrap_or(prev));
        }
        Ok(RestrictedPatchwork { v })
    }

    /// Default choice, `v_2 = +1` (so `v_1 = -1` off the symmetric cases).
    pub fn canonical(surface: &FluteSurface, len: usize) -> Result<Self> {
        Self::with_v2(surface, len, 1)
    }
}

/// Checks the coherence rule for every `n` with `v_{n+1}` inside `1..=depth`.
pub fn validate_restricted(
    v: &RestrictedPatchwork,
    surface: &FluteSurface,
    depth: usize,
) -> Result<()> {
    if depth < 2 {
        return Err(FluteError::Domain("validation depth must be at least 2".into()));
    }
    if v.len() < depth {
        return Err(FluteError::Validation {
            field: "v",
            index: v.len() + 1,
            message: format!("patchwork has {} signs, {} needed", v.len(), depth),
        });
    }
    for n in 1..depth {
        let t = surface.twist(n)?;
        if let Some(want) = forced_next(t, v.at(n)) {
            if v.at(n + 1) != want {
                let rule = if t == 0.0 { RULE_ZERO } else { RULE_HALF };
                return Err(FluteError::RuleViolation {
                    index: n + 1,
                    rule: rule.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// `u_n = t_n` if `v_n v_{n+1} = 1` or `v_n t_n > 0`, else `v_n + t_n`.
pub fn restricted_u(t: f64, v: i8, v_next: i8) -> f64 {
    if v * v_next == 1 || f64::from(v) * t > 0.0 {
        t
    } else {
        f64::from(v) + t
    }
}

pub fn u_sequence(
    v: &RestrictedPatchwork,
    surface: &FluteSurface,
    depth: usize,
) -> Result<USequence> {
    validate_restricted(v, surface, (depth + 1).max(2))?;
    let mut u = Vec::with_capacity(depth);
    for n in 1..=depth {
        u.push(restricted_u(surface.twist(n)?, v.at(n), v.at(n + 1)));
    }
    Ok(USequence {
        u,
        provenance: Provenance::Restricted,
    })
}

/// Inputs of `u'_n`: `(v'_{2n-1}, w_{2n-1})`, `(v'_{2n}, w_{2n})`, `(v'_{2n+1}, w_{2n+1})`.
pub fn generalized_u(t: f64, entry: (i8, u8), exit: (i8, u8), next: (i8, u8)) -> f64 {
    let (ve, we) = entry;
    let (vx, wx) = exit;
    let (vn, wn) = next;
    let ws = f64::from(wx + wn);
    let flip = 1.0 - 2.0 * ws;
    if vx * vn == 1 {
        t + ws * f64::from(ve) * (1.0 - 2.0 * f64::from(we))
    } else if f64::from(vx) * flip * t > 0.0 {
        t
    } else {
        t + f64::from(vx) * flip
    }
}

impl Patchwork {
    pub fn new(v_prime: Vec<i8>, w: Vec<u8>) -> Result<Self> {
        if v_prime.len() != w.len() || v_prime.len() % 2 != 0 {
            return Err(FluteError::Domain(
                "v' and w must have equal, even length (two entries per pair of pants)".into(),
            ));
        }
        if let Some(i) = v_prime.iter().position(|&x| !sign_ok(x)) {
            return Err(FluteError::Validation {
                field: "v_prime",
                index: i + 1,
                message: "entries must be ±1".into(),
            });
        }
        if let Some(i) = w.iter().position(|&x| x > 1) {
            return Err(FluteError::Validation {
                field: "w",
                index: i + 1,
                message: "entries must be 0 or 1".into(),
            });
        }
        Ok(Patchwork { v_prime, w })
    }

    pub fn pants(&self) -> usize {
        self.v_prime.len() / 2
    }

    /// `(v'_k, w_k)`, 1-based.
    pub fn entry(&self, k: usize) -> (i8, u8) {
        (self.v_prime[k - 1], self.w[k - 1])
    }

    /// First violated w-constraint, if any. `admissible` adds the
    /// `w_{2n} + w_{2n+1} ≠ 2` condition across consecutive pants.
    pub fn check(&self, admissible: bool) -> Result<()> {
        let k = self.pants();
        for n in 2..=k {
            if self.w[2 * n - 2] + self.w[2 * n - 1] == 2 {
                return Err(FluteError::RuleViolation {
                    index: 2 * n - 1,
                    rule: "w_{2n-1} + w_{2n} ≠ 2".into(),
                });
            }
        }
        if admissible {
            for n in 1..k {
                if self.w[2 * n - 1] + self.w[2 * n] == 2 {
                    return Err(FluteError::RuleViolation {
                        index: 2 * n,
                        rule: "w_{2n} + w_{2n+1} ≠ 2".into(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_admissible(&self) -> bool {
        self.check(true).is_ok()
    }
}

pub fn u_prime_sequence(p: &Patchwork, surface: &FluteSurface, depth: usize) -> Result<USequence> {
    if p.pants() < depth + 1 {
        return Err(FluteError::Validation {
            field: "patchwork",
            index: p.pants() + 1,
            message: format!("{} pairs of pants given, {} needed", p.pants(), depth + 1),
        });
    }
    p.check(true)?;
    let mut u = Vec::with_capacity(depth);
    for n in 1..=depth {
        let t = surface.twist(n)?;
        u.push(generalized_u(
            t,
            p.entry(2 * n - 1),
            p.entry(2 * n),
            p.entry(2 * n + 1),
        ));
    }
    Ok(USequence {
        u,
        provenance: Provenance::Generalized,
    })
}

/// `v'_{2n-1} = v'_{2n} = v_n`, `w ≡ 0`.
pub fn reduce_to_patchwork(v: &RestrictedPatchwork) -> Patchwork {
    let v_prime = v.v.iter().flat_map(|&x| [x, x]).collect::<Vec<_>>();
    let w = vec![0; v_prime.len()];
    Patchwork { v_prime, w }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatchworkKind {
    Restricted,
    Generalized,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum AnyPatchwork {
    Restricted(RestrictedPatchwork),
    Generalized(Patchwork),
}

/// Depth-first walk over prefixes, emitting full-length ones in the order the
/// per-position choice lists are given.
struct PrefixWalk<C, F> {
    depth: usize,
    choices: F,
    prefix: Vec<C>,
    stack: Vec<(Vec<C>, usize)>,
}

impl<C: Clone, F: FnMut(&[C]) -> Vec<C>> PrefixWalk<C, F> {
    fn new(depth: usize, mut choices: F) -> Self {
        let first = if depth == 0 { Vec::new() } else { choices(&[]) };
        PrefixWalk {
            depth,
            choices,
            prefix: Vec::new(),
            stack: vec![(first, 0)],
        }
    }
}

impl<C: Clone, F: FnMut(&[C]) -> Vec<C>> Iterator for PrefixWalk<C, F> {
    type Item = Vec<C>;

    fn next(&mut self) -> Option<Vec<C>> {
        if self.depth == 0 {
            return None;
        }
        loop {
            let (opts, idx) = self.stack.last_mut()?;
            if *idx >= opts.len() {
                self.stack.pop();
                self.prefix.pop();
                continue;
            }
            let c = opts[*idx].clone();
            *idx += 1;
            self.prefix.push(c);
            if self.prefix.len() == self.depth {
                let out = self.prefix.clone();
                self.prefix.pop();
                return Some(out);
            }
            let next = (self.choices)(&self.prefix);
            self.stack.push((next, 0));
        }
    }
}

/// Every restricted sign prefix `v_1..v_depth` coherent with the twists.
pub fn enumerate_restricted(
    surface: &FluteSurface,
    depth: usize,
) -> Result<impl Iterator<Item = RestrictedPatchwork>> {
    if depth > RESTRICTED_ENUMERATION_CAP {
        return Err(FluteError::Resource(format!(
            "restricted enumeration depth {depth} exceeds cap {RESTRICTED_ENUMERATION_CAP}"
        )));
    }
    let twists = (1..depth.max(1))
        .map(|n| surface.twist(n))
        .collect::<Result<Vec<_>>>()?;
    let walk = PrefixWalk::new(depth, move |prefix: &[i8]| match prefix.last() {
        None => vec![1, -1],
        Some(&v) => match forced_next(twists[prefix.len() - 1], v) {
            Some(f) => vec![f],
            None => vec![1, -1],
        },
    });
    Ok(walk.map(|v| RestrictedPatchwork { v }))
}

type PantsChoice = (i8, i8, u8, u8);

fn pants_choices(prefix: &[PantsChoice]) -> Vec<PantsChoice> {
    let k = prefix.len() + 1;
    let mut out = Vec::with_capacity(16);
    for a in [1i8, -1] {
        for b in [1i8, -1] {
            for wa in [0u8, 1] {
                for wb in [0u8, 1] {
                    if k > 1 && wa + wb == 2 {
                        continue;
                    }
                    if let Some(&(_, _, _, prev_wb)) = prefix.last() {
                        if prev_wb + wa == 2 {
                            continue;
                        }
                    }
                    out.push((a, b, wa, wb));
                }
            }
        }
    }
    out
}

/// Every admissible generalized patchwork with `depth` pairs of pants.
pub fn enumerate_generalized(depth: usize) -> Result<impl Iterator<Item = Patchwork>> {
    if depth > GENERALIZED_ENUMERATION_CAP {
        return Err(FluteError::Resource(format!(
            "generalized enumeration depth {depth} exceeds cap {GENERALIZED_ENUMERATION_CAP}"
        )));
    }
    let walk = PrefixWalk::new(depth, pants_choices);
    Ok(walk.map(|pants| {
        let mut v_prime = Vec::with_capacity(2 * pants.len());
        let mut w = Vec::with_capacity(2 * pants.len());
        for (a, b, wa, wb) in pants {
            v_prime.extend([a, b]);
            w.extend([wa, wb]);
        }
        Patchwork { v_prime, w }
    }))
}

pub fn enumerate_patchworks(
    surface: &FluteSurface,
    depth: usize,
    kind: PatchworkKind,
) -> Result<Box<dyn Iterator<Item = AnyPatchwork>>> {
    Ok(match kind {
        PatchworkKind::Restricted => Box::new(
            enumerate_restricted(surface, depth)?
                .collect::<Vec<_>>()
                .into_iter()
                .map(AnyPatchwork::Restricted),
        ),
        PatchworkKind::Generalized => {
            Box::new(enumerate_generalized(depth)?.map(AnyPatchwork::Generalized))
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SearchStrategy {
    Exhaustive,
    Beam { width: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub patchwork: Patchwork,
    pub u: USequence,
    /// `ln Σ_{n≤N} term_n` of the returned patchwork.
    pub log_partial: f64,
    pub strategy: SearchStrategy,
    /// False for beam search.
    pub exact: bool,
}

#[derive(Clone)]
struct Node {
    log_sum: f64,
    s: f64,
    parent: usize,
    /// `(v'_{2n}, w_{2n})` chosen at this step; unused at the root.
    exit: (i8, u8),
    /// `(v'_{2n+1}, w_{2n+1})`, the entry of the next pair of pants.
    next: (i8, u8),
}

/// Patchwork over `depth + 1` pants minimizing `Σ_{n≤depth} term_n`.
pub fn minimizing_patchwork_search(
    surface: &FluteSurface,
    depth: usize,
    strategy: SearchStrategy,
) -> Result<SearchResult> {
    if depth == 0 {
        return Err(FluteError::Domain("search depth must be positive".into()));
    }
    match strategy {
        SearchStrategy::Exhaustive if depth > EXHAUSTIVE_SEARCH_CAP => {
            return Err(FluteError::Resource(format!(
                "exhaustive search depth {depth} exceeds cap {EXHAUSTIVE_SEARCH_CAP}"
            )))
        }
        SearchStrategy::Beam { width } if width == 0 => {
            return Err(FluteError::Domain("beam width must be positive".into()))
        }
        SearchStrategy::Beam { .. } if depth > BEAM_DEPTH_CAP => {
            return Err(FluteError::Resource(format!(
                "beam search depth {depth} exceeds cap {BEAM_DEPTH_CAP}"
            )))
        }
        _ => {}
    }
    let (ls, ts) = surface.coordinates(depth + 1)?;

    // Arena of DP nodes; layer holds indices keyed by the state that matters
    // for the future: (v'_{2n+1}, w_{2n+1}, S_n).
    let mut arena: Vec<Node> = Vec::new();
    let mut layer: Vec<usize> = Vec::new();
    for v in [1i8, -1] {
        for w in [0u8, 1] {
            arena.push(Node {
                log_sum: f64::NEG_INFINITY,
                s: 0.0,
                parent: usize::MAX,
                exit: (0, 0),
                next: (v, w),
            });
            layer.push(arena.len() - 1);
        }
    }

    for n in 1..=depth {
        let (l, t, l_next) = (ls[n - 1], ts[n - 1], ls[n]);
        let mut best: HashMap<(i8, u8, u64), usize> = HashMap::new();
        let mut next_layer: Vec<usize> = Vec::new();
        for &idx in &layer {
            let node = arena[idx].clone();
            let (ve, we) = node.next;
            for vx in [1i8, -1] {
                for wx in [0u8, 1] {
                    if we + wx == 2 && n > 1 {
                        continue;
                    }
                    for vn in [1i8, -1] {
                        for wn in [0u8, 1] {
                            if wx + wn == 2 {
                                continue;
                            }
                            let u = generalized_u(t, (ve, we), (vx, wx), (vn, wn));
                            let s = node.s + u * l;
                            let log_sum = log_add_exp(node.log_sum, log_term(l, l_next, s));
                            let key = (vn, wn, s.to_bits());
                            let cand = Node {
                                log_sum,
                                s,
                                parent: idx,
                                exit: (vx, wx),
                                next: (vn, wn),
                            };
                            match best.get(&key) {
                                Some(&j) if arena[j].log_sum <= log_sum => {}
                                Some(&j) => arena[j] = cand,
                                None => {
                                    arena.push(cand);
                                    best.insert(key, arena.len() - 1);
                                    next_layer.push(arena.len() - 1);
                                }
                            }
                        }
                    }
                }
            }
        }
        if let SearchStrategy::Beam { width } = strategy {
            next_layer.sort_by(|&a, &b| {
                let (na, nb) = (&arena[a], &arena[b]);
                na.s.abs()
                    .total_cmp(&nb.s.abs())
                    .then(na.log_sum.total_cmp(&nb.log_sum))
            });
            next_layer.truncate(width);
        }
        layer = next_layer;
    }

    let &end = layer
        .iter()
        .min_by(|&&a, &&b| arena[a].log_sum.total_cmp(&arena[b].log_sum))
        .expect("search layer is never empty");

    let mut chain = Vec::with_capacity(depth + 1);
    let mut idx = end;
    loop {
        chain.push(idx);
        if arena[idx].parent == usize::MAX {
            break;
        }
        idx = arena[idx].parent;
    }
    chain.reverse();
    let mut v_prime = vec![arena[chain[0]].next.0];
    let mut w = vec![arena[chain[0]].next.1];
    for &i in &chain[1..] {
        let node = &arena[i];
        v_prime.extend([node.exit.0, node.next.0]);
        w.extend([node.exit.1, node.next.1]);
    }
    // Exit of the last pair of pants does not enter u'_1..u'_depth.
    v_prime.push(1);
    w.push(0);
    let patchwork = Patchwork::new(v_prime, w)?;
    let u = u_prime_sequence(&patchwork, surface, depth)?;
    Ok(SearchResult {
        patchwork,
        u,
        log_partial: arena[end].log_sum,
        strategy,
        exact: matches!(strategy, SearchStrategy::Exhaustive),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flute::{SequenceSpec, Tail};

    fn surf(t: f64) -> FluteSurface {
        FluteSurface::new(
            SequenceSpec::tail(Tail::Linear { a: 1.0, b: 2.0 }),
            SequenceSpec::constant(t),
        )
    }

    #[test]
    fn def_3_1_cases() {
        let s0 = surf(0.0);
        let ones = RestrictedPatchwork::new(vec![1; 6]).unwrap();
        assert!(validate_restricted(&ones, &s0, 6).is_ok());
        let sh = surf(0.5);
        let alt = RestrictedPatchwork::new(vec![1, -1, 1, -1, 1, -1]).unwrap();
        assert!(validate_restricted(&alt, &sh, 6).is_ok());
        match validate_restricted(&ones, &sh, 6) {
            Err(FluteError::RuleViolation { index, rule }) => {
                assert_eq!(index, 2);
                assert_eq!(rule, RULE_HALF);
            }
            other => panic!("{other:?}"),
        }
        let sq = surf(0.25);
        let any = RestrictedPatchwork::new(vec![1, 1, -1, 1, -1, -1]).unwrap();
        assert!(validate_restricted(&any, &sq, 6).is_ok());
    }

    #[test]
    fn def_3_2_cases() {
        let u = u_sequence(&RestrictedPatchwork::new(vec![1; 5]).unwrap(), &surf(0.0), 4).unwrap();
        assert_eq!(u.u, vec![0.0; 4]);
        let alt = RestrictedPatchwork::new(vec![1, -1, 1, -1, 1]).unwrap();
        let u = u_sequence(&alt, &surf(0.5), 4).unwrap();
        assert_eq!(u.u, vec![0.5, -0.5, 0.5, -0.5]);
        assert_eq!(restricted_u(-0.25, 1, -1), 0.75);
    }

    #[test]
    fn generalized_branches() {
        assert_eq!(generalized_u(0.1, (1, 0), (1, 1), (1, 0)), 1.1);
        assert_eq!(generalized_u(0.25, (1, 0), (1, 0), (-1, 0)), 0.25);
        assert_eq!(generalized_u(-0.25, (1, 0), (1, 0), (-1, 0)), 0.75);
    }

    #[test]
    fn reduction_doubles_signs() {
        let v = RestrictedPatchwork::new(vec![1, -1, 1]).unwrap();
        let p = reduce_to_patchwork(&v);
        assert_eq!(p.v_prime, vec![1, 1, -1, -1, 1, 1]);
        assert_eq!(p.w, vec![0; 6]);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_restricted(&surf(0.0), 5).unwrap().count(), 2);
        assert_eq!(enumerate_restricted(&surf(0.25), 4).unwrap().count(), 16);
        assert!(enumerate_restricted(&surf(0.25), 40).is_err());
        assert!(enumerate_generalized(GENERALIZED_ENUMERATION_CAP + 1).is_err());
    }

    #[test]
    fn zero_twist_search_finds_zero_shear() {
        let s = surf(0.0);
        let r = minimizing_patchwork_search(&s, 6, SearchStrategy::Exhaustive).unwrap();
        assert!(r.u.u.iter().all(|&u| u == 0.0));
    }
}
