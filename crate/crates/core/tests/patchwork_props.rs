use flute_core::criterion::{criterion_terms, TermForm};
use flute_core::patchwork::{
    enumerate_generalized, enumerate_restricted, minimizing_patchwork_search, reduce_to_patchwork,
    u_prime_sequence, u_sequence, validate_restricted, Patchwork, RestrictedPatchwork,
    SearchStrategy,
};
use flute_core::{FluteError, FluteSurface, SequenceSpec};
use proptest::prelude::*;

fn twist() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(0.0),
        Just(0.5),
        (-0.499f64..0.5).prop_filter("generic", |t| *t != 0.0),
    ]
}

fn surface_of(ls: Vec<f64>, ts: Vec<f64>) -> FluteSurface {
    FluteSurface::new(
        SequenceSpec::constant(1.0).with_prefix(ls),
        SequenceSpec::constant(0.0).with_prefix(ts),
    )
}

/// Twists and a coherent restricted patchwork built from free sign choices.
fn restricted_case() -> impl Strategy<Value = (FluteSurface, RestrictedPatchwork, usize)> {
    (2usize..30).prop_flat_map(|len| {
        (
            prop::collection::vec(0.5f64..12.0, len),
            prop::collection::vec(twist(), len),
            prop::collection::vec(prop::bool::ANY, len),
        )
            .prop_map(move |(ls, ts, free)| {
                let mut v = vec![if free[0] { 1i8 } else { -1 }];
                for n in 1..len {
                    let prev = v[n - 1];
                    let t = ts[n - 1];
                    v.push(if t == 0.0 {
                        prev
                    } else if t == 0.5 {
                        -prev
                    } else if free[n] {
                        1
                    } else {
                        -1
                    });
                }
                (
                    surface_of(ls, ts),
                    RestrictedPatchwork::new(v).unwrap(),
                    len - 1,
                )
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn reduction_preserves_u((surface, v, depth) in restricted_case()) {
        let u = u_sequence(&v, &surface, depth).unwrap();
        let mut p = reduce_to_patchwork(&v);
        // u'_n reads the entry of pants n+1.
        p.v_prime.extend([v.v[depth], v.v[depth]]);
        p.w.extend([0, 0]);
        let up = u_prime_sequence(&p, &surface, depth).unwrap();
        prop_assert_eq!(u.u.len(), up.u.len());
        for (a, b) in u.u.iter().zip(&up.u) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

proptest! {
    #[test]
    fn coherence_violation_names_index((surface, v, depth) in restricted_case(), at in 0usize..28) {
        let n = at % depth.max(1) + 1;
        let t = surface.twist(n).unwrap();
        prop_assume!(t == 0.0 || t == 0.5);
        let mut bad = v.v.clone();
        bad[n] = -bad[n];
        let bad = RestrictedPatchwork::new(bad).unwrap();
        match validate_restricted(&bad, &surface, depth + 1) {
            Err(FluteError::RuleViolation { index, .. }) => prop_assert!(index <= n + 1),
            other => prop_assert!(false, "expected a rule violation, got {:?}", other),
        }
    }
}

fn brute_restricted(surface: &FluteSurface, depth: usize) -> usize {
    (0..1u32 << depth)
        .filter(|bits| {
            let v: Vec<i8> = (0..depth).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect();
            let v = RestrictedPatchwork::new(v).unwrap();
            depth < 2 || validate_restricted(&v, surface, depth).is_ok()
        })
        .count()
}

#[test]
fn restricted_enumeration_matches_brute_force() {
    let ts = vec![0.0, 0.5, 0.2, 0.0, -0.3, 0.5, 0.1, 0.25, 0.0, 0.5, 0.4, -0.1];
    let surface = surface_of(vec![1.0; 12], ts);
    for depth in 1..=12 {
        let listed: Vec<_> = enumerate_restricted(&surface, depth).unwrap().collect();
        assert_eq!(listed.len(), brute_restricted(&surface, depth), "depth {depth}");
        for v in &listed {
            if depth >= 2 {
                validate_restricted(v, &surface, depth).unwrap();
            }
        }
        let mut dedup = listed.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), listed.len());
    }
}

#[test]
fn generalized_enumeration_matches_brute_force() {
    for pants in 1..=4usize {
        let m = 2 * pants;
        let mut count = 0usize;
        for vs in 0..1u32 << m {
            for ws in 0..1u32 << m {
                let v: Vec<i8> = (0..m).map(|i| if vs >> i & 1 == 1 { -1 } else { 1 }).collect();
                let w: Vec<u8> = (0..m).map(|i| (ws >> i & 1) as u8).collect();
                if Patchwork::new(v, w).unwrap().is_admissible() {
                    count += 1;
                }
            }
        }
        let listed: Vec<_> = enumerate_generalized(pants).unwrap().collect();
        assert_eq!(listed.len(), count, "{pants} pants");
        assert!(listed.iter().all(Patchwork::is_admissible));
    }
}

fn generic_surface() -> FluteSurface {
    surface_of(
        vec![2.0, 3.5, 1.2, 4.0, 2.2, 5.0, 1.7, 3.0, 2.6, 4.4, 3.3, 2.8],
        vec![0.3, -0.2, 0.45, 0.1, -0.4, 0.35, -0.05, 0.2, -0.3, 0.15, 0.4, -0.25],
    )
}

#[test]
fn exhaustive_search_is_the_true_minimum() {
    let surface = generic_surface();
    for depth in 1..=4 {
        let found = minimizing_patchwork_search(&surface, depth, SearchStrategy::Exhaustive).unwrap();
        assert!(found.exact);
        let best = enumerate_generalized(depth + 1)
            .unwrap()
            .map(|p| {
                let u = u_prime_sequence(&p, &surface, depth).unwrap();
                criterion_terms(&surface, &u, depth, TermForm::Cosh, None)
                    .unwrap()
                    .log_partial()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((found.log_partial - best).abs() < 1e-12, "depth {depth}");
        let u = u_prime_sequence(&found.patchwork, &surface, depth).unwrap();
        let own = criterion_terms(&surface, &u, depth, TermForm::Cosh, None).unwrap();
        assert!((own.log_partial() - found.log_partial).abs() < 1e-12);
    }
}

#[test]
fn beam_never_beats_exhaustive() {
    let surface = generic_surface();
    for depth in [6, 8, 10] {
        let exact = minimizing_patchwork_search(&surface, depth, SearchStrategy::Exhaustive).unwrap();
        for width in [1, 4, 64] {
            let beam =
                minimizing_patchwork_search(&surface, depth, SearchStrategy::Beam { width }).unwrap();
            assert!(!beam.exact);
            assert!(beam.log_partial >= exact.log_partial - 1e-12);
        }
        let wide =
            minimizing_patchwork_search(&surface, depth, SearchStrategy::Beam { width: 1 << 20 }).unwrap();
        assert!((wide.log_partial - exact.log_partial).abs() < 1e-12);
    }
}

#[test]
fn caps_are_resource_errors() {
    let surface = generic_surface();
    assert!(matches!(enumerate_generalized(9), Err(FluteError::Resource(_))));
    assert!(matches!(
        minimizing_patchwork_search(&surface, 13, SearchStrategy::Exhaustive),
        Err(FluteError::Resource(_))
    ));
}
