//! Logic behind the `qcl` binary: point evaluation, sweeps, the verification
//! suites and protocol reports. Argument parsing lives in the binary.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::capacities::{c_ea, c_ea_numeric, chi_star, coherent_info, ic_zero_crossing, q1_lower, LOG2_3};
use crate::channels::{DensityMatrix, KrausChannel, TRACE_PRESERVATION_TOLERANCE};
use crate::error::Error;
use crate::ls_family::{
    adjoint_rotation, apply_closed, complement_closed, endpoint_checks, kraus_for, kraus_representation, spectrum, spin_rotation, LsParam,
};
use crate::matcore::{hermitian_eigenvalues, sample_so3, sample_su3, ComplexMatrix};
use crate::optim::derive_seed;
use crate::protocols::{bell_protocol, phase_protocol, ProtocolResult, PROTOCOL_RATE};
use crate::sdp::{bound_crossing, q_flag, q_gamma};

pub const DEFAULT_STARTS: usize = 50;
pub const DEFAULT_STEPS: usize = 101;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error(transparent)]
    Compute(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Verification(_) | CliError::Compute(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantity {
    ChiStar,
    CEa,
    Q1Lower,
    QSdp,
    QFlag,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [Quantity::ChiStar, Quantity::CEa, Quantity::Q1Lower, Quantity::QSdp, Quantity::QFlag];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::ChiStar => "chi_star",
            Quantity::CEa => "c_ea",
            Quantity::Q1Lower => "q1_lower",
            Quantity::QSdp => "q_sdp",
            Quantity::QFlag => "q_flag",
        }
    }
}

impl FromStr for Quantity {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s.trim())
            .ok_or_else(|| CliError::Usage(format!("unknown quantity '{s}' (expected one of chi_star, c_ea, q1_lower, q_sdp, q_flag)")))
    }
}

/// Comma-separated list; output order is always the canonical column order.
pub fn parse_quantities(list: &str) -> CliResult<Vec<Quantity>> {
    let mut wanted: Vec<Quantity> = list.split(',').filter(|s| !s.trim().is_empty()).map(Quantity::from_str).collect::<CliResult<_>>()?;
    if wanted.is_empty() {
        return Err(CliError::Usage("no quantities requested".into()));
    }
    wanted.sort_by_key(|q| Quantity::ALL.iter().position(|a| a == q));
    wanted.dedup();
    Ok(wanted)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Usage(format!("unknown format '{s}' (expected csv or json)"))),
        }
    }
}

/// Fixed 12 decimals, `.` separator, no negative zero.
pub fn format_number(v: f64) -> String {
    let s = format!("{v:.12}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn parse_x(x: f64) -> CliResult<LsParam> {
    LsParam::new(x).map_err(|_| CliError::Usage(format!("x out of range: {x} (must lie in [0, 1])")))
}

/// One evaluated grid point, restricted to the requested quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub x: f64,
    pub values: Vec<(Quantity, f64)>,
}

impl Record {
    pub fn get(&self, q: Quantity) -> Option<f64> {
        self.values.iter().find(|(k, _)| *k == q).map(|(_, v)| *v)
    }
}

/// Seed used for the optimizer at `x`, independent of the grid it sits on.
pub fn point_seed(seed: u64, x: f64) -> u64 {
    derive_seed(seed, x.to_bits())
}

pub fn evaluate(x: f64, quantities: &[Quantity], starts: usize, seed: u64) -> CliResult<Record> {
    let p = parse_x(x)?;
    let values = quantities
        .iter()
        .map(|&q| {
            let v = match q {
                Quantity::ChiStar => chi_star(p),
                Quantity::CEa => c_ea(p),
                Quantity::Q1Lower => q1_lower(p, starts, point_seed(seed, x)).best_value,
                Quantity::QSdp => q_gamma(p)?,
                Quantity::QFlag => q_flag(p),
            };
            Ok((q, v))
        })
        .collect::<crate::Result<_>>()?;
    Ok(Record { x, values })
}

pub fn point_line(record: &Record) -> String {
    let mut parts = vec![format!("x={}", format_number(record.x))];
    parts.extend(record.values.iter().map(|(q, v)| format!("{}={}", q.name(), format_number(*v))));
    parts.join(", ")
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub steps: usize,
    pub quantities: Vec<Quantity>,
    pub seed: u64,
    pub starts: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            x_min: 0.0,
            x_max: 1.0,
            steps: DEFAULT_STEPS,
            quantities: Quantity::ALL.to_vec(),
            seed: DEFAULT_SEED,
            starts: DEFAULT_STARTS,
            out: None,
            format: Format::Csv,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> CliResult<()> {
        parse_x(self.x_min)?;
        parse_x(self.x_max)?;
        if self.x_min > self.x_max {
            return Err(CliError::Usage(format!("x-min {} exceeds x-max {}", self.x_min, self.x_max)));
        }
        if self.steps == 0 {
            return Err(CliError::Usage("steps must be at least 1".into()));
        }
        if self.quantities.is_empty() {
            return Err(CliError::Usage("no quantities requested".into()));
        }
        if self.starts == 0 {
            return Err(CliError::Usage("starts must be at least 1".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.x_min];
        }
        let h = (self.x_max - self.x_min) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| if i == self.steps - 1 { self.x_max } else { self.x_min + i as f64 * h }).collect()
    }
}

/// Evaluate every grid point (in parallel); rows come back in x order.
pub fn sweep(cfg: &SweepConfig) -> CliResult<Vec<Record>> {
    cfg.validate()?;
    cfg.grid()
        .into_par_iter()
        .map(|x| {
            let r = evaluate(x, &cfg.quantities, cfg.starts, cfg.seed);
            log::info!("x = {x}: done");
            r
        })
        .collect()
}

pub fn to_csv(records: &[Record], quantities: &[Quantity]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = std::iter::once("x").chain(quantities.iter().map(|q| q.name())).collect();
    w.write_record(&header).map_err(|e| CliError::Io(e.to_string()))?;
    for r in records {
        let row: Vec<String> = std::iter::once(format_number(r.x)).chain(quantities.iter().map(|&q| r.get(q).map_or_else(String::new, format_number))).collect();
        w.write_record(&row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn json_number(v: f64) -> Value {
    let rounded: f64 = format_number(v).parse().expect("formatted number parses");
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

pub fn to_json(records: &[Record], quantities: &[Quantity]) -> CliResult<String> {
    let rows: Vec<Value> = records
        .iter()
        .map(|r| {
            let mut obj = Map::new();
            obj.insert("x".into(), json_number(r.x));
            for &q in quantities {
                if let Some(v) = r.get(q) {
                    obj.insert(q.name().into(), json_number(v));
                }
            }
            Value::Object(obj)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Parse a sweep CSV back into records.
pub fn read_csv(text: &str) -> CliResult<(Vec<Quantity>, Vec<Record>)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(|e| CliError::Io(e.to_string()))?.clone();
    if headers.get(0) != Some("x") {
        return Err(CliError::Io("first column must be x".into()));
    }
    let quantities: Vec<Quantity> = headers.iter().skip(1).map(Quantity::from_str).collect::<CliResult<_>>()?;
    let mut records = Vec::new();
    for row in r.records() {
        let row = row.map_err(|e| CliError::Io(e.to_string()))?;
        let num = |s: &str| s.parse::<f64>().map_err(|e| CliError::Io(format!("bad number '{s}': {e}")));
        let x = num(&row[0])?;
        let values = quantities.iter().zip(row.iter().skip(1)).map(|(&q, s)| Ok((q, num(s)?))).collect::<CliResult<_>>()?;
        records.push(Record { x, values });
    }
    Ok((quantities, records))
}

pub fn render(records: &[Record], cfg: &SweepConfig) -> CliResult<String> {
    match cfg.format {
        Format::Csv => to_csv(records, &cfg.quantities),
        Format::Json => to_json(records, &cfg.quantities),
    }
}

/// Run a sweep and write it to `cfg.out` (or return it for stdout).
pub fn run_sweep(cfg: &SweepConfig) -> CliResult<Option<String>> {
    cfg.validate()?;
    if let Some(path) = &cfg.out {
        // Fail on an unwritable destination before spending minutes computing.
        std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let records = sweep(cfg)?;
    let text = render(&records, cfg)?;
    match &cfg.out {
        Some(path) => {
            let mut f = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            f.write_all(text.as_bytes()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(CliError::Usage(format!("unknown level '{s}' (expected quick or full)"))),
        }
    }
}

/// Deliberate defects for exercising the verifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Scale `K₀` by 1.1, breaking trace preservation.
    CorruptKrausNormalization,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    /// `Ok(summary)` or `Err(first failing assertion)`.
    pub result: Result<String, String>,
    pub seconds: f64,
}

impl SuiteOutcome {
    pub fn line(&self) -> String {
        match &self.result {
            Ok(msg) => format!("PASS {:<22} {msg} ({:.2}s)", self.name, self.seconds),
            Err(msg) => format!("FAIL {:<22} {msg} ({:.2}s)", self.name, self.seconds),
        }
    }
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn grid(n: usize) -> Vec<LsParam> {
    LsParam::grid(n)
}

fn suite_cpt(fault: Option<Fault>) -> Check {
    for p in grid(11) {
        let mut kraus = kraus_for(p).kraus().to_vec();
        if fault == Some(Fault::CorruptKrausNormalization) {
            kraus[0] = kraus[0].scale_real(1.1);
        }
        let ch = KrausChannel::new_unchecked(format!("x={}", p.x()), kraus).map_err(|e| e.to_string())?;
        let defect = ch.trace_preservation_defect();
        ensure(defect <= TRACE_PRESERVATION_TOLERANCE, || {
            format!("CPT invariant violated: sum K_i^dag K_i deviates from I by {defect:.3e} at x = {}", p.x())
        })?;
        let min_eig = ch.choi().min_eigenvalue().map_err(|e| e.to_string())?;
        ensure(min_eig >= -1e-12, || format!("CPT invariant violated: Choi matrix eigenvalue {min_eig:.3e} at x = {}", p.x()))?;
    }
    Ok("trace preservation and Choi positivity at 11 points".into())
}

fn suite_closed_forms() -> Check {
    let checks: [(&str, f64, f64); 4] = [
        ("chi_star(0)", chi_star(grid(2)[0]), LOG2_3),
        ("chi_star(1)", chi_star(grid(2)[1]), LOG2_3 - 1.0),
        ("c_ea(0)", c_ea(grid(2)[0]), 2.0 * LOG2_3),
        ("c_ea(1)", c_ea(grid(2)[1]), LOG2_3),
    ];
    for (name, got, want) in checks {
        ensure((got - want).abs() <= 1e-12, || format!("{name} = {got}, expected {want}"))?;
    }
    for p in grid(101) {
        let (num, closed) = (c_ea_numeric(p), c_ea(p));
        ensure((num - closed).abs() <= 1e-9, || format!("numeric C_ea {num} differs from closed form {closed} at x = {}", p.x()))?;
        ensure(chi_star(p) <= c_ea(p) + 1e-9, || format!("chi_star exceeds c_ea at x = {}", p.x()))?;
    }
    for p in grid(21) {
        let s = spectrum(p);
        let t = kraus_for(p).transfer_matrix().map_err(|e| e.to_string())?;
        let mut ev = hermitian_eigenvalues(&t).map_err(|e| e.to_string())?;
        ev.sort_by(f64::total_cmp);
        let dev = ev.iter().zip(s.eigenvalues()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(dev <= 1e-9, || format!("transfer-matrix spectrum off by {dev:.3e} at x = {}", p.x()))?;
        let det = t.determinant().map_err(|e| e.to_string())?.re;
        ensure((det - s.determinant).abs() <= 1e-9, || format!("determinant {det} vs {} at x = {}", s.determinant, p.x()))?;
    }
    let mut rng_seed = 0u64;
    for p in grid(11) {
        let ch = kraus_for(p);
        let comp = ch.complement();
        for _ in 0..10 {
            rng_seed += 1;
            let m = random_matrix(rng_seed);
            let dev_c = complement_closed(p, &m).map_err(|e| e.to_string())?.max_abs_diff(&comp.apply_matrix(&m).map_err(|e| e.to_string())?);
            ensure(dev_c <= 1e-12, || format!("closed-form complement differs from Kraus recipe by {dev_c:.3e} at x = {}", p.x()))?;
            let dev_a = apply_closed(p, &m).map_err(|e| e.to_string())?.max_abs_diff(&ch.apply_matrix(&m).map_err(|e| e.to_string())?);
            ensure(dev_a <= 1e-12, || format!("closed-form channel differs from Kraus form by {dev_a:.3e} at x = {}", p.x()))?;
        }
    }
    Ok("endpoint capacities, numeric C_ea, spectrum, complement".into())
}

fn random_matrix(seed: u64) -> ComplexMatrix {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(3, 3, |_, _| num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn suite_endpoints() -> Check {
    let r = endpoint_checks(7).map_err(|e| e.to_string())?;
    Ok(format!("self-complementary at x=1 (defect {:.1e}), trace complement at x=0 ({} inputs)", r.self_complementarity_defect, r.samples))
}

fn suite_covariance() -> Check {
    let mut worst = 0.0f64;
    for (i, p) in grid(11).into_iter().enumerate() {
        let ch = kraus_for(p);
        for k in 0..5u64 {
            let s = derive_seed(i as u64, k) as f64 / u64::MAX as f64;
            let u = sample_so3(6.0 * s, 4.0 * s + 0.3, 2.0 * s - 1.0);
            let d = ch.covariance_defect(&u, &u).map_err(|e| e.to_string())?;
            worst = worst.max(d);
            ensure(d <= 1e-10, || format!("SO(3) covariance defect {d:.3e} at x = {}", p.x()))?;
        }
    }
    let full = kraus_for(grid(2)[1]);
    for seed in 0..5 {
        let u = sample_su3(seed);
        let d = full.covariance_defect(&u, &u.conj()).map_err(|e| e.to_string())?;
        worst = worst.max(d);
        ensure(d <= 1e-10, || format!("SU(3) covariance defect {d:.3e} for seed {seed}"))?;
    }
    let ch = kraus_for(LsParam::new(0.4).expect("in range"));
    for theta in [0.3, 1.7] {
        let axis = [0.2, -0.5, 0.9];
        let u = spin_rotation(theta, axis);
        let d = ch.omega_defect(&u, &u, &kraus_representation(theta, axis)).map_err(|e| e.to_string())?;
        worst = worst.max(d);
        ensure(d <= 1e-10, || format!("Kraus representation defect {d:.3e} at theta = {theta}"))?;
        let r = adjoint_rotation(theta, axis);
        ensure(r.unitarity_defect() <= 1e-10, || "adjoint rotation is not orthogonal".into())?;
    }
    Ok(format!("worst defect {worst:.1e}"))
}

fn suite_protocols() -> Check {
    for r in [phase_protocol().map_err(|e| e.to_string())?, bell_protocol().map_err(|e| e.to_string())?] {
        ensure((r.mutual_information - PROTOCOL_RATE).abs() <= 1e-9, || format!("{} protocol MI {} != log2(3) - 1", r.protocol_name, r.mutual_information))?;
        ensure(r.mutual_information <= LOG2_3 + 1e-9, || format!("{} protocol beats C_ea", r.protocol_name))?;
    }
    Ok("phase and Bell protocols reach log2(3) - 1".into())
}

fn suite_coherent_information(starts: usize, seed: u64) -> Check {
    let mixed = DensityMatrix::maximally_mixed(3);
    let cases = [(0.0, Some(LOG2_3)), (0.1, None), (0.2, None), (0.3, None), (0.5, Some(0.0)), (0.75, Some(0.0)), (1.0, Some(0.0))];
    for (x, want) in cases {
        let p = LsParam::new(x).expect("in range");
        let want = want.unwrap_or_else(|| coherent_info(p, &mixed));
        let got = q1_lower(p, starts, point_seed(seed, x)).best_value;
        ensure((got - want).abs() <= 1e-6, || format!("q1_lower({x}) = {got}, expected {want}"))?;
    }
    let r = ic_zero_crossing();
    ensure(r > 0.37 && r < 0.39, || format!("ic_zero_crossing = {r:.9} outside (0.37, 0.39)"))?;
    Ok(format!("q1_lower at 7 points, zero crossing {r:.6}"))
}

fn suite_sdp(starts: usize, seed: u64) -> Check {
    for p in grid(11) {
        let qg = q_gamma(p).map_err(|e| e.to_string())?;
        let q1 = q1_lower(p, starts, point_seed(seed, p.x())).best_value;
        ensure(qg >= q1 - 1e-5, || format!("q_gamma {qg} below q1_lower {q1} at x = {}", p.x()))?;
        ensure(q1 <= q_flag(p) + 1e-5, || format!("q1_lower {q1} above q_flag at x = {}", p.x()))?;
        if p.x() == 0.0 {
            ensure((qg - LOG2_3).abs() <= 1e-4, || format!("q_gamma(0) = {qg}, expected log2(3)"))?;
        }
    }
    let c = bound_crossing().map_err(|e| e.to_string())?;
    ensure(c > 0.70 && c < 0.80, || format!("bound_crossing = {c} outside (0.70, 0.80)"))?;
    Ok(format!("sandwich at 11 points, bound crossing {c:.4}"))
}

pub fn verify(level: Level, fault: Option<Fault>, starts: usize, seed: u64) -> Vec<SuiteOutcome> {
    let mut suites: Vec<(&'static str, Box<dyn Fn() -> Check>)> = vec![
        ("cpt", Box::new(move || suite_cpt(fault))),
        ("closed-forms", Box::new(suite_closed_forms)),
        ("endpoints", Box::new(suite_endpoints)),
        ("covariance", Box::new(suite_covariance)),
        ("protocols", Box::new(suite_protocols)),
    ];
    if level == Level::Full {
        suites.push(("coherent-information", Box::new(move || suite_coherent_information(starts, seed))));
        suites.push(("sdp-grid", Box::new(move || suite_sdp(starts, seed))));
    }
    suites
        .into_iter()
        .map(|(name, f)| {
            let t = Instant::now();
            let result = f();
            SuiteOutcome { name, result, seconds: t.elapsed().as_secs_f64() }
        })
        .collect()
}

/// Print-ready report; `Err` carries the first failing assertion.
pub fn run_verify(level: Level, fault: Option<Fault>, starts: usize, seed: u64) -> (String, CliResult<()>) {
    let outcomes = verify(level, fault, starts, seed);
    let mut text = String::new();
    for o in &outcomes {
        let _ = writeln!(text, "{}", o.line());
    }
    let first = outcomes.iter().find_map(|o| o.result.as_ref().err().map(|m| format!("{}: {m}", o.name)));
    match first {
        Some(msg) => (text, Err(CliError::Verification(msg))),
        None => (text, Ok(())),
    }
}

pub fn protocol_report(r: &ProtocolResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "protocol: {}", r.protocol_name);
    let _ = writeln!(s, "joint distribution P(message, outcome):");
    for (i, row) in r.joint_distribution.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|p| format!("{p:.6}")).collect();
        let _ = writeln!(s, "  {i}: {}", cells.join(" "));
    }
    let _ = writeln!(s, "mutual information: {:.6} bits", r.mutual_information);
    let _ = writeln!(s, "C_ea(Lambda_1) = {:.6} bits; gap {:.6} bits", LOG2_3, r.gap_to_capacity);
    s
}

pub fn run_protocol(name: &str) -> CliResult<String> {
    let r = match name {
        "phase" => phase_protocol()?,
        "bell" => bell_protocol()?,
        _ => return Err(CliError::Usage(format!("unknown protocol '{name}' (expected phase or bell)"))),
    };
    Ok(protocol_report(&r))
}
