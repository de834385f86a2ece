use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use flute_core::criterion::{
    criterion_terms, growth_fit, heuristic_verdict, horocyclic_partial_length, GrowthFit,
    ShearSequence, TermForm,
};
use flute_core::oracle::pentagon::{admissible_configurations, configuration_patchwork, develop_pentagons};
use flute_core::oracle::{
    accumulation_gap, develop_with_ladder, disk_svg, lift_shears, measure_eta, measure_shear,
    EquivalenceProbe,
};
use flute_core::patchwork::{enumerate_patchworks, AnyPatchwork, u_prime_sequence, PatchworkKind};
use flute_core::real::Real;
use flute_core::{
    eta_length, Classification, CriterionReport, FluteError, FluteSurface, Patchwork, SequenceSpec,
    Verdict,
};
use serde::Serialize;

use crate::config::{read_config, resolve, parse_patchwork, PatchworkConfig, Resolved};
use crate::error::{exit, CliError};
use crate::report::{CountOf, Envelope, Streamed};

/// Residual bound for `oracle-check`.
pub const TOLERANCE: f64 = 1e-8;

/// Shears compared against the pentagon oracle, `s_2..s_{2K-2}`.
const PENTAGON_CUFFS: usize = 26;

/// Flags shared by every command.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub depth: Option<usize>,
    pub precision: Option<u32>,
    pub patchwork: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub strict: bool,
    pub no_timestamp: bool,
}

/// Reads `path`, applies the command-line overrides, then validates.
pub fn load(path: &Path, o: &Overrides) -> Result<Resolved, CliError> {
    let mut config = read_config(path)?;
    if let Some(d) = o.depth {
        config.depth = d;
    }
    if let Some(p) = o.precision {
        config.precision = p;
    }
    if let Some(p) = &o.patchwork {
        config.patchwork = parse_patchwork(p)?;
    }
    resolve(config)
}

fn report_sink(r: &Resolved, o: &Overrides) -> Result<Box<dyn Write>, CliError> {
    match o.output.as_ref().or(r.config.output.report.as_ref()) {
        Some(path) => {
            let f = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn emit<R: Serialize>(command: &str, r: &Resolved, o: &Overrides, result: R) -> Result<(), CliError> {
    let mut out = report_sink(r, o)?;
    Envelope::new(command, &r.config, result, !o.no_timestamp).write_to(&mut out)
}

/// Criterion series along an explicitly given patchwork.
#[derive(Clone, Debug, Serialize)]
pub struct ExplicitSeries {
    pub v_prime: Vec<i8>,
    pub w: Vec<u8>,
    pub log_terms: Vec<f64>,
    pub log_partial_sums: Vec<f64>,
    pub growth_fit: GrowthFit,
    pub heuristic_verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyResult {
    pub report: CriterionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explicit_patchwork: Option<ExplicitSeries>,
}

pub fn classify_result(r: &Resolved) -> Result<ClassifyResult, CliError> {
    let report = flute_core::classify(&r.surface, &r.classify_options())?;
    let explicit_patchwork = match r.config.patchwork {
        PatchworkConfig::Explicit { .. } => {
            let n = r.config.depth;
            let p = r.patchwork(n + 1)?;
            let u = u_prime_sequence(&p, &r.surface, n)?;
            let series = criterion_terms(&r.surface, &u, n, TermForm::Cosh, None)?;
            let fit = growth_fit(&series);
            Some(ExplicitSeries {
                v_prime: p.v_prime,
                w: p.w,
                heuristic_verdict: heuristic_verdict(&fit, &r.config.thresholds),
                log_terms: series.log_terms,
                log_partial_sums: series.log_partial_sums,
                growth_fit: fit,
            })
        }
        _ => None,
    };
    Ok(ClassifyResult {
        report,
        explicit_patchwork,
    })
}

pub fn classification_exit(c: Classification) -> u8 {
    match c {
        Classification::FirstKind => exit::FIRST_KIND,
        Classification::NotFirstKind => exit::NOT_FIRST_KIND,
        _ => exit::UNDETERMINED,
    }
}

pub fn cmd_classify(r: &Resolved, o: &Overrides) -> Result<u8, CliError> {
    let result = classify_result(r)?;
    let code = classification_exit(result.report.first_kind);
    emit("classify", r, o, &result)?;
    Ok(code)
}

/// Largest absolute differences between measured and closed-form values.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Residuals {
    pub even_shear: f64,
    pub odd_shear: f64,
    pub eta: f64,
    pub shears_checked: usize,
    pub etas_checked: usize,
}

impl Residuals {
    fn record_shear(&mut self, n: usize, d: f64) {
        let slot = if n % 2 == 0 { &mut self.even_shear } else { &mut self.odd_shear };
        *slot = slot.max(d.abs());
        self.shears_checked += 1;
    }

    fn record_eta(&mut self, d: f64) {
        self.eta = self.eta.max(d.abs());
        self.etas_checked += 1;
    }

    pub fn max(&self) -> f64 {
        self.even_shear.max(self.odd_shear).max(self.eta)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Exhaustion {
    pub index: usize,
    pub bits: u32,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PentagonCheck {
    Checked { cuffs: usize, residuals: Residuals },
    Skipped { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepEntry {
    /// Entry sign, entry flag and exit flag of the pants before the cuff.
    pub before: (i8, u8, u8),
    pub after: (i8, u8, u8),
    pub max_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleCheck {
    pub depth: usize,
    pub tolerance: f64,
    pub lift: Residuals,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustion: Option<Exhaustion>,
    pub pentagon: PentagonCheck,
    pub equivalence: EquivalenceProbe,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepEntry>>,
    pub passed: bool,
}

fn pentagon_residuals(surface: &FluteSurface, p: &Patchwork, cuffs: usize) -> Result<Residuals, FluteError> {
    let closed = lift_shears(surface, p, cuffs - 1)?;
    let chain = develop_pentagons(surface, p, cuffs)?;
    let mut res = Residuals::default();
    for n in 2..=2 * cuffs - 2 {
        res.record_shear(n, chain.shear(n)? - closed[n - 2]);
    }
    for k in 1..cuffs {
        let want = eta_length(surface.length(k)?, surface.length(k + 1)?)?;
        res.record_eta(chain.measured_eta(k)? - want);
    }
    Ok(res)
}

/// Twists for the sweep: `frac(kφ) - 1/2`, never `0` or `1/2`, where the
/// pentagons of mismatched signs would only touch.
pub fn sweep_twist(k: usize) -> f64 {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    (k as f64 * phi).fract() - 0.5
}

fn sweep_surface(r: &Resolved) -> Result<FluteSurface, FluteError> {
    let lengths = (1..=PENTAGON_CUFFS + 1)
        .map(|k| r.surface.length(k))
        .collect::<Result<Vec<_>, _>>()?;
    let twists = (1..=PENTAGON_CUFFS + 1).map(sweep_twist).collect();
    Ok(FluteSurface::new(
        SequenceSpec::constant(1.0).with_prefix(lengths),
        SequenceSpec::constant(0.1).with_prefix(twists),
    ))
}

/// Alternating entry signs for the unflagged pants of the sweep.
fn alternating() -> impl FnMut() -> i8 {
    let mut s = -1i8;
    move || {
        s = -s;
        s
    }
}

pub fn oracle_check(r: &Resolved, sweep: bool, strict: bool) -> Result<OracleCheck, CliError> {
    let n = r.config.depth;
    let p = r.patchwork(n + 2)?;
    let shears = lift_shears(&r.surface, &p, n)?;
    let dev = develop_with_ladder(&shears, r.config.precision);
    let chain = &dev.chain;
    let exhaustion = dev.exhausted_at.map(|index| Exhaustion {
        index,
        bits: chain.bits,
        message: FluteError::PrecisionExhausted {
            index,
            bits: chain.bits,
        }
        .to_string(),
    });
    if let (true, Some(e)) = (strict, &exhaustion) {
        return Err(CliError::Computation(e.message.clone()));
    }

    let mut lift = Residuals::default();
    for k in 2..chain.len() {
        lift.record_shear(k, measure_shear(chain, k)?.to_f64() - shears[k - 2]);
    }
    for k in 1..=chain.len().saturating_sub(1) / 2 {
        let want = eta_length(r.surface.length(k)?, r.surface.length(k + 1)?)?;
        lift.record_eta(measure_eta(chain, k)?.to_f64() - want);
    }

    let cuffs = PENTAGON_CUFFS.min(n + 1);
    let pentagon = match pentagon_residuals(&r.surface, &p, cuffs) {
        Ok(residuals) => PentagonCheck::Checked { cuffs, residuals },
        Err(e @ (FluteError::RuleViolation { .. } | FluteError::Validation { .. })) => {
            PentagonCheck::Skipped { reason: e.to_string() }
        }
        Err(e) => return Err(e.into()),
    };

    let mut s = vec![0.0];
    s.extend_from_slice(&shears);
    let log_len = horocyclic_partial_length(&ShearSequence::from_shears(s), n)?.ln;
    let final_gap = if chain.len() >= 3 {
        accumulation_gap(chain)?.final_gap()
    } else {
        std::f64::consts::PI
    };
    let equivalence = EquivalenceProbe {
        depth: n,
        log_horocyclic_length: log_len,
        final_gap,
        exhausted_at: dev.exhausted_at,
        bits: chain.bits,
    };

    let sweep = if sweep {
        let surface = sweep_surface(r)?;
        let mut out = Vec::new();
        for c in admissible_configurations() {
            let p = configuration_patchwork(c, PENTAGON_CUFFS + 1, alternating());
            let res = pentagon_residuals(&surface, &p, PENTAGON_CUFFS)?;
            out.push(SweepEntry {
                before: c.before,
                after: c.after,
                max_residual: res.max(),
            });
        }
        Some(out)
    } else {
        None
    };

    let within = |x: f64| x <= TOLERANCE;
    let passed = exhaustion.is_none()
        && within(lift.max())
        && match &pentagon {
            PentagonCheck::Checked { residuals, .. } => within(residuals.max()),
            PentagonCheck::Skipped { .. } => true,
        }
        && sweep.iter().flatten().all(|e| within(e.max_residual));
    Ok(OracleCheck {
        depth: n,
        tolerance: TOLERANCE,
        lift,
        exhaustion,
        pentagon,
        equivalence,
        sweep,
        passed,
    })
}

/// Exit 0 when every residual is within [`TOLERANCE`] and the development
/// completed, 1 otherwise.
pub fn cmd_oracle_check(r: &Resolved, o: &Overrides, sweep: bool) -> Result<u8, CliError> {
    let result = oracle_check(r, sweep, o.strict)?;
    let code = if result.passed { 0 } else { 1 };
    emit("oracle-check", r, o, &result)?;
    Ok(code)
}

/// The SVG document for the configured patchwork's lift.
pub fn render_svg(r: &Resolved, overlay: bool, strict: bool) -> Result<String, CliError> {
    let n = r.config.depth;
    let p = r.patchwork(n + 2)?;
    let shears = lift_shears(&r.surface, &p, n)?;
    let dev = develop_with_ladder(&shears, r.config.precision);
    if let Some(index) = dev.exhausted_at {
        let e = FluteError::PrecisionExhausted {
            index,
            bits: dev.chain.bits,
        };
        if strict {
            return Err(CliError::Computation(e.to_string()));
        }
        eprintln!("warning: {e}; rendering the {} geodesics developed", dev.chain.len());
    }
    let mut style = r.config.render.clone();
    style.horocycle |= overlay;
    Ok(disk_svg(&dev.chain, &style)?)
}

pub fn cmd_render(r: &Resolved, o: &Overrides, overlay: bool) -> Result<u8, CliError> {
    let path = o
        .output
        .as_ref()
        .or(r.config.output.svg.as_ref())
        .ok_or_else(|| CliError::Config("output.svg: render needs --output or output.svg".into()))?;
    let doc = render_svg(r, overlay, o.strict)?;
    std::fs::write(path, doc).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(0)
}

type PatchworkStream = Box<dyn Iterator<Item = AnyPatchwork>>;

#[derive(Serialize)]
struct EnumerateResult<'a> {
    kind: PatchworkKind,
    depth: usize,
    patchworks: &'a Streamed<PatchworkStream>,
    count: CountOf<'a, PatchworkStream>,
}

/// Streams every admissible patchwork with `depth` entries (restricted) or
/// pairs of pants (generalized).
pub fn cmd_enumerate(r: &Resolved, o: &Overrides, kind: PatchworkKind) -> Result<u8, CliError> {
    let depth = r.config.depth;
    let items = enumerate_patchworks(&r.surface, depth, kind)?;
    let stream = Streamed::new(items);
    let result = EnumerateResult {
        kind,
        depth,
        patchworks: &stream,
        count: CountOf(&stream),
    };
    emit("enumerate", r, o, result)?;
    Ok(0)
}
