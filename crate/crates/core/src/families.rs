//! Named surfaces used by the test suites, the benchmarks and `flute enumerate`.

use crate::flute::{FluteSurface, SequenceSpec, Tail};

#[derive(Clone, Debug)]
pub struct Family {
    pub name: &'static str,
    pub surface: FluteSurface,
}

fn log_len(c: f64) -> SequenceSpec {
    SequenceSpec::tail(Tail::Logarithmic { c, d: 1.0 })
}

fn family(name: &'static str, lengths: SequenceSpec, twist: f64) -> Family {
    Family {
        name,
        surface: FluteSurface::new(lengths, SequenceSpec::constant(twist)),
    }
}

/// Every named family.
pub fn all() -> Vec<Family> {
    vec![
        family("log2-untwisted", log_len(2.0), 0.0),
        family("log3-untwisted", log_len(3.0), 0.0),
        family("log4-untwisted", log_len(4.0), 0.0),
        family("log4-half", log_len(4.0), 0.5),
        family("log5-half", log_len(5.0), 0.5),
        family("log4-quarter", log_len(4.0), 0.25),
        family("log2-quarter", log_len(2.0), 0.25),
        family("linear-half", SequenceSpec::tail(Tail::Linear { a: 1.0, b: 2.0 }), 0.5),
        family("linear-untwisted", SequenceSpec::tail(Tail::Linear { a: 1.0, b: 2.0 }), 0.0),
        family("constant-one", SequenceSpec::constant(1.0), 0.0),
        family("constant-one-quarter", SequenceSpec::constant(1.0), 0.25),
        family(
            "periodic-lengths-third",
            SequenceSpec::tail(Tail::Periodic {
                cycle: vec![1.0, 2.0, 3.0],
            }),
            1.0 / 3.0,
        ),
    ]
}

pub fn by_name(name: &str) -> Option<Family> {
    all().into_iter().find(|f| f.name == name)
}
