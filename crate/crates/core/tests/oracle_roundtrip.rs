use std::path::PathBuf;

use flute_core::hyp::{BoundaryPoint, Isometry};
use flute_core::oracle::pentagon::{
    admissible_configurations, configuration_patchwork, develop_pentagons, pentagon_eta,
};
use flute_core::oracle::{
    accumulation_gap, develop_exact, develop_lift, develop_shears, disk_svg, horocyclic_arcs,
    lift_shears, measure_eta, measure_shear, SvgStyle,
};
use flute_core::patchwork::{reduce_to_patchwork, Patchwork, RestrictedPatchwork};
use flute_core::real::{BigReal, Real};
use flute_core::{eta_length, families, FluteSurface, SequenceSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_surface(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> FluteSurface {
    let ls = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
    let ts = (0..n).map(|_| 0.5 - rng.gen::<f64>()).collect();
    FluteSurface::new(
        SequenceSpec::constant(lo).with_prefix(ls),
        SequenceSpec::constant(0.0).with_prefix(ts),
    )
}

fn random_sign(rng: &mut ChaCha8Rng) -> i8 {
    if rng.gen() {
        1
    } else {
        -1
    }
}

#[test]
fn pentagon_shears_match_closed_form_on_every_configuration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for c in admissible_configurations() {
        for _ in 0..5 {
            let surface = random_surface(&mut rng, 30, 4.0, 16.0);
            let mut signs = ChaCha8Rng::seed_from_u64(rng.gen());
            let p = configuration_patchwork(c, 27, || random_sign(&mut signs));
            let closed = lift_shears(&surface, &p, 25).unwrap();
            let chain = develop_pentagons(&surface, &p, 26).unwrap();
            for n in 2..=50 {
                let d = (chain.shear(n).unwrap() - closed[n - 2]).abs();
                assert!(d < 1e-8, "{c:?} n={n}: {d}");
            }
        }
    }
}

#[test]
fn pentagon_pairs_match_eta_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..400 {
        let (la, lb) = (rng.gen_range(1.0..20.0), rng.gen_range(1.0..20.0));
        let surface = FluteSurface::new(
            SequenceSpec::constant(1.0).with_prefix(vec![la, lb]),
            SequenceSpec::constant(0.0),
        );
        let p = Patchwork::new(vec![1; 4], vec![0; 4]).unwrap();
        let chain = develop_pentagons(&surface, &p, 2).unwrap();
        let expect = eta_length(la, lb).unwrap();
        assert!((chain.measured_eta(1).unwrap() - expect).abs() < 1e-9, "{la} {lb}");
        assert!((pentagon_eta(la, lb).unwrap() - expect).abs() < 1e-9);
    }
}

#[test]
fn symmetric_pentagon_pair() {
    let l = 2.0 * 1f64.asinh();
    let surface = FluteSurface::constant(l, 0.0);
    let p = Patchwork::new(vec![1; 6], vec![0; 6]).unwrap();
    let chain = develop_pentagons(&surface, &p, 3).unwrap();
    assert!((chain.measured_eta(1).unwrap() - l).abs() < 1e-12);
    assert!((chain.measured_eta(2).unwrap() - l).abs() < 1e-12);
}

#[test]
fn pentagon_oracle_rejects_broken_switching() {
    let surface = FluteSurface::constant(5.0, 0.1);
    // Second pants: entry +1 with flags 1,0 must exit -1.
    let p = Patchwork::new(vec![1, 1, 1, 1, 1, 1], vec![0, 0, 1, 0, 0, 0]).unwrap();
    assert!(develop_pentagons(&surface, &p, 3).is_err());
}

#[test]
fn zero_shear_fan_measures_zero() {
    let chain = develop_exact::<BigReal>(&[0.0; 60], 256).unwrap();
    for n in 2..chain.len() {
        assert!(measure_shear(&chain, n).unwrap().to_f64().abs() < 1e-12);
    }
    let gaps = accumulation_gap(&chain).unwrap().gap;
    assert!(gaps.windows(2).all(|w| w[1] <= w[0]));
    assert!(*gaps.last().unwrap() < 0.05 * gaps[2]);
}

#[test]
fn lift_round_trip_random_surfaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let surface = random_surface(&mut rng, 60, 1.0, 4.0);
        let p = reduce_to_patchwork(&RestrictedPatchwork::canonical(&surface, 60).unwrap());
        let closed = lift_shears(&surface, &p, 50).unwrap();
        let chain = develop_lift(&surface, &p, 50, 1024).unwrap();
        assert_eq!(chain.len(), 102);
        for n in 2..chain.len() {
            let d = (measure_shear(&chain, n).unwrap().to_f64() - closed[n - 2]).abs();
            assert!(d < 1e-8, "n={n}: {d}");
        }
        for k in 1..=50 {
            let expect = eta_length(surface.length(k).unwrap(), surface.length(k + 1).unwrap()).unwrap();
            let d = (measure_eta(&chain, k).unwrap().to_f64() - expect).abs();
            assert!(d < 1e-9, "η_{k}: {d}");
        }
    }
}

#[test]
fn configurations_round_trip_at_256_bits() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for c in admissible_configurations() {
        let surface = random_surface(&mut rng, 12, 4.0, 16.0);
        let mut signs = ChaCha8Rng::seed_from_u64(rng.gen());
        let p = configuration_patchwork(c, 10, || random_sign(&mut signs));
        let closed = lift_shears(&surface, &p, 4).unwrap();
        let chain = develop_exact::<BigReal>(&closed, 256).unwrap();
        for n in 2..chain.len() {
            let m = measure_shear(&chain, n).unwrap();
            let d = (m - BigReal::new(closed[n - 2], 256)).abs();
            assert!(d.to_f64() < 1e-20, "{c:?} n={n}: {:e}", d.to_f64());
        }
    }
}

#[test]
fn doubling_precision_moves_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let surface = random_surface(&mut rng, 110, 1.0, 3.0);
    let p = reduce_to_patchwork(&RestrictedPatchwork::canonical(&surface, 110).unwrap());
    let lo = develop_lift(&surface, &p, 100, 1024).unwrap();
    let hi = develop_lift(&surface, &p, 100, 2048).unwrap();
    let diff = |x: &BoundaryPoint<BigReal>, y: &BoundaryPoint<BigReal>| match (x, y) {
        (BoundaryPoint::Finite(x), BoundaryPoint::Finite(y)) => (x.clone() - y.clone()).abs().to_f64(),
        (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => 0.0,
        _ => f64::INFINITY,
    };
    for (x, y) in lo.a.iter().zip(&hi.a).chain(lo.b.iter().zip(&hi.b)) {
        assert!(diff(x, y) < 1e-10);
    }
}

#[test]
fn measurements_survive_global_isometry() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let shears: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let chain = develop_exact::<f64>(&shears, 53).unwrap();
    let m = Isometry::new(2.0, -1.0, 0.5, 0.75).unwrap();
    let moved = chain.transformed(&m);
    for n in 2..chain.len() {
        let d = measure_shear(&chain, n).unwrap() - measure_shear(&moved, n).unwrap();
        assert!(d.abs() < 1e-10, "n={n}");
    }
    for k in 1..chain.len() / 2 {
        let d = measure_eta(&chain, k).unwrap() - measure_eta(&moved, k).unwrap();
        assert!(d.abs() < 1e-10);
    }
    let g0 = accumulation_gap(&chain).unwrap().gap;
    let g1 = accumulation_gap(&moved).unwrap().gap;
    for (x, y) in g0.iter().zip(&g1) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn horocyclic_arcs_match_running_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let surface = random_surface(&mut rng, 12, 1.0, 3.0);
    let p = reduce_to_patchwork(&RestrictedPatchwork::canonical(&surface, 12).unwrap());
    let shears = lift_shears(&surface, &p, 8).unwrap();
    let chain = develop_exact::<BigReal>(&shears, 256).unwrap();
    let arcs = horocyclic_arcs(&chain).unwrap();
    let mut sum = 0.0;
    for (i, len) in arcs.iter().enumerate() {
        let n = i + 1;
        if n >= 2 {
            sum += shears[n - 2];
        }
        let expect = if n % 2 == 0 { sum } else { -sum };
        assert!((len.ln().to_f64() - expect).abs() < 1e-12, "arc {n}");
    }
}

#[test]
fn precision_exhaustion_names_the_index() {
    let d = develop_shears::<f64>(&[-30.0; 30], 53);
    let n = d.exhausted_at.expect("doubles cannot follow this chain");
    assert!(n >= 2 && n < 32);
    assert_eq!(d.chain.len(), n);
}

#[test]
fn convergent_family_gap_floor() {
    let f = families::by_name("log4-untwisted").unwrap();
    let p = reduce_to_patchwork(&RestrictedPatchwork::canonical(&f.surface, 202).unwrap());
    let shears = lift_shears(&f.surface, &p, 200).unwrap();
    let d = develop_shears::<BigReal>(&shears, 256);
    assert!(d.exhausted_at.is_none());
    let gap = accumulation_gap(&d.chain).unwrap();
    assert!(gap.gap.windows(2).all(|w| w[1] <= w[0]));
    assert!(gap.left_limit_track.windows(2).all(|w| w[0] < w[1]));
    assert!(gap.right_limit_track.windows(2).all(|w| w[1] < w[0]));
    // Frozen from the first 256-bit run.
    let last = gap.final_gap();
    assert!((last - GAP_FLOOR_LOG4).abs() < 1e-9, "{last}");
    let mid = gap.gap[200];
    assert!(mid - last < 0.01);
}

const GAP_FLOOR_LOG4: f64 = 0.317_102_123_6;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn zero_fan_svg_matches_golden() {
    let chain = develop_exact::<BigReal>(&[0.0; 20], 256).unwrap();
    let doc = disk_svg(&chain, &SvgStyle::default()).unwrap();
    let path = golden("zero_fan_depth10.svg");
    if std::env::var_os("FLUTE_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &doc).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap();
    assert_eq!(doc, want);
    assert_eq!(doc.matches("<path").count(), 22);
}

#[test]
fn svg_style_defaults_from_empty_table() {
    let s: SvgStyle = serde_json::from_str("{}").unwrap();
    assert_eq!(s, SvgStyle::default());
}
