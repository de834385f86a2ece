//! Explicit development of the lifted chain in ℍ, direct geometric
//! measurements on it, and disk rendering. Serves as ground truth for the
//! closed forms in [`crate::criterion`].

mod develop;
mod horocycle;
pub mod pentagon;
mod svg;
pub use svg::{disk_svg, render_disk_svg, SvgStyle};

pub use develop::{
    accumulation_gap, develop_exact, develop_shears, develop_with_ladder, measure_eta,
    measure_shear, AccumulationEstimate, Development, LiftChain, HEADROOM, PRECISION_LADDER,
};
pub use horocycle::{horocyclic_arcs, horocyclic_path_points};


use crate::criterion::shear_sequence;
use crate::error::{FluteError, Result};
use crate::flute::FluteSurface;
use crate::patchwork::{u_prime_sequence, Patchwork};
use crate::real::BigReal;

/// Largest `N` accepted by [`develop_lift`].
pub const LIFT_DEPTH_CAP: usize = 5000;

/// Develops `g_1, …, g_{2N+2}` for `surface` along patchwork `p`, at
/// `precision` bits. The shears used are the closed-form `s_2, …, s_{2N+1}`.
pub fn develop_lift(
    surface: &FluteSurface,
    p: &Patchwork,
    n: usize,
    precision: u32,
) -> Result<LiftChain<BigReal>> {
    let shears = lift_shears(surface, p, n)?;
    if precision < 53 {
        return Err(FluteError::Validation {
            field: "precision",
            index: 0,
            message: format!("at least 53 bits required, got {precision}"),
        });
    }
    develop_exact(&shears, precision)
}

/// Closed-form `s_2, …, s_{2N+1}` along `p`.
pub fn lift_shears(surface: &FluteSurface, p: &Patchwork, n: usize) -> Result<Vec<f64>> {
    if n == 0 || n > LIFT_DEPTH_CAP {
        return Err(FluteError::Validation {
            field: "depth",
            index: n,
            message: format!("must lie in 1..={LIFT_DEPTH_CAP}"),
        });
    }
    let u = u_prime_sequence(p, surface, n + 1)?;
    let s = shear_sequence(surface, &u, n)?;
    Ok(s.s[1..].to_vec())
}

/// Both sides of the accumulation/horocycle equivalence on one patchwork.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct EquivalenceProbe {
    pub depth: usize,
    /// `ln` of the horocyclic partial length through `N = depth`.
    pub log_horocyclic_length: f64,
    /// Normalized-chart gap of the last geodesic developed.
    pub final_gap: f64,
    /// Index of the first shear the ladder could not realize, if any.
    pub exhausted_at: Option<usize>,
    pub bits: u32,
}

/// Horocyclic partial length and accumulation gap at depth `n` along `p`,
/// developing with the precision ladder up to `max_bits`. When precision
/// runs out the last resolved gap is reported; it bounds the true gap at
/// depth `n` from above.
pub fn equivalence_probe(
    surface: &FluteSurface,
    p: &Patchwork,
    n: usize,
    max_bits: u32,
) -> Result<EquivalenceProbe> {
    let shears = lift_shears(surface, p, n)?;
    let mut s = vec![0.0];
    s.extend_from_slice(&shears);
    let seq = crate::criterion::ShearSequence::from_shears(s);
    let log_len = crate::criterion::horocyclic_partial_length(&seq, n)?.ln;
    let dev = develop_with_ladder(&shears, max_bits);
    let gap = if dev.chain.len() >= 3 {
        accumulation_gap(&dev.chain)?.final_gap()
    } else {
        std::f64::consts::PI
    };
    Ok(EquivalenceProbe {
        depth: n,
        log_horocyclic_length: log_len,
        final_gap: gap,
        exhausted_at: dev.exhausted_at,
        bits: dev.chain.bits,
    })
}
