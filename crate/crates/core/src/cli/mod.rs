//! Command-line front end.
//!
//! Exit codes: 0 success, 1 internal inconsistency, 2 invalid input or a
//! violated precondition, 3 exact tier unavailable under `--strict-exact`.

pub mod input;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::arith::field::{ExactField, Field, NumericField};
use crate::arith::symbolic::SymbolicComplex;
use crate::error::{Error, Result};
use crate::group_closure::{closure_decomposition, ClosureConfig, ClosureDecomposition};
use crate::lie_log::{AdditiveGroupGens, GenLabel};
use crate::normal_form::{
    internal_digits, normal_form_of_spec, with_tiers, BackendConfig, GroupSpec, TierPreference,
};
use crate::orbit_engine::orbit_order;
use crate::sampler::{enumerate_orbit, oracle_compare};

use input::{field_name, tier_name, InputDocument};
use report::{write_closure, write_normal_form, write_orbit, write_sample, ReportWriter};

pub const DEFAULT_PRECISION: u32 = 60;
pub const DEFAULT_WORD_LENGTH: usize = 20;
pub const DEFAULT_RADIUS_FACTOR: f64 = 1e6;

#[derive(Parser, Debug)]
#[command(name = "orbitreg", version, about = "Regularity order of orbits of abelian linear groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Order, classification and structure of each vector's orbit.
    Analyze(CommonArgs),
    /// Simultaneous block-triangular normal form of the generators.
    NormalForm(CommonArgs),
    /// Closure of the additive group generated by the listed real vectors.
    Closure(CommonArgs),
    /// Enumerate orbit points and compare a box-counting estimate with the order.
    Sample(CommonArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Input file.
    pub file: PathBuf,
    /// Working precision in decimal digits.
    #[arg(long, env = "ORBITREG_PRECISION")]
    pub precision: Option<u32>,
    /// Acceptance threshold for numeric integer relations, e.g. 1e-50.
    #[arg(long, env = "ORBITREG_TAU", value_parser = parse_tau_arg)]
    pub tau: Option<f64>,
    /// Fail with exit code 3 instead of falling back to floating point.
    #[arg(long, env = "ORBITREG_STRICT_EXACT")]
    pub strict_exact: bool,
    /// Sampler bound L on each exponent.
    #[arg(long, env = "ORBITREG_WORD_LENGTH")]
    pub word_length: Option<usize>,
    /// Write sampled points here (sample command).
    #[arg(long, env = "ORBITREG_EXPORT")]
    pub export: Option<PathBuf>,
}

fn parse_tau_arg(s: &str) -> std::result::Result<f64, String> {
    input::parse_tau(s).map_err(|e| e.to_string())
}

/// Effective settings: flags and environment over file options over defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub precision: u32,
    pub tau: Option<f64>,
    pub tier: TierPreference,
    pub word_length: usize,
    pub radius_factor: f64,
    pub export: Option<PathBuf>,
}

impl Settings {
    pub fn resolve(args: &CommonArgs, doc: &InputDocument) -> Self {
        let o = &doc.options;
        Settings {
            precision: args.precision.or(o.precision).unwrap_or(DEFAULT_PRECISION),
            tau: args.tau.or(o.tau),
            tier: if args.strict_exact {
                TierPreference::StrictExact
            } else {
                o.tier.unwrap_or(TierPreference::ExactThenNumeric)
            },
            word_length: args.word_length.or(o.word_length).unwrap_or(DEFAULT_WORD_LENGTH),
            radius_factor: o.radius.unwrap_or(DEFAULT_RADIUS_FACTOR),
            export: args.export.clone(),
        }
    }

    pub fn backend(&self) -> BackendConfig {
        BackendConfig { digits: self.precision, tau_log10: self.tau.map(f64::log10), tier: self.tier }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_tier_limit() {
        return 3;
    }
    match e {
        Error::Internal(_) | Error::Inconsistent(_) => 1,
        _ => 2,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match exit_code(e) {
        3 => "tier",
        1 => "internal",
        _ => "validation",
    }
}

/// What a command produced: report text for stdout, diagnostics, exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn failure(e: &Error) -> Self {
        Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: exit_code(e) }
    }
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn header(w: &mut ReportWriter, command: &str, bytes: &[u8], doc: &InputDocument, s: &Settings) {
    w.section("report");
    w.kv("tool", "orbitreg");
    w.kv("version", env!("CARGO_PKG_VERSION"));
    w.kv("command", command);
    w.kv("input_sha256", digest(bytes));

    w.section("assumptions");
    let names: Vec<&str> = doc.basis.constants().iter().map(|c| c.name.as_str()).collect();
    w.kv("constants", names.join(", "));
    for c in doc.basis.declared() {
        w.kv(&format!("constant.{}", c.name), &c.def);
    }
    w.kv(
        "independence",
        "the constants above are declared linearly independent over Q; exact results are conditional on this",
    );

    w.section("settings");
    w.kv("field", field_name(doc.field));
    if let Some(n) = doc.n() {
        w.kv("n", n);
    }
    w.kv("generators", doc.generators.len());
    w.kv("precision", s.precision);
    match s.tau {
        Some(t) => w.kv("tau", format!("{t:e}")),
        None => w.kv("tau", format!("1e{}", 10 - s.precision as i64)),
    }
    w.kv("tier", tier_name(s.tier));
}

fn error_section(w: &mut ReportWriter, e: &Error) {
    w.kv("status", "error");
    w.kv("error.kind", error_kind(e));
    w.kv("error.message", e);
}

fn group_spec(doc: &InputDocument, s: &Settings) -> Result<GroupSpec> {
    if doc.generators.is_empty() {
        return Err(Error::InvalidArgument("the input has no [generators]".into()));
    }
    GroupSpec::new(doc.field, doc.generators.clone(), doc.basis.clone(), s.backend())
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Outcome {
    let (name, args) = match &cli.command {
        Command::Analyze(a) => ("analyze", a),
        Command::NormalForm(a) => ("normal-form", a),
        Command::Closure(a) => ("closure", a),
        Command::Sample(a) => ("sample", a),
    };
    let bytes = match std::fs::read(&args.file) {
        Ok(b) => b,
        Err(e) => {
            return Outcome::failure(&Error::InvalidArgument(format!("cannot read {}: {e}", args.file.display())))
        }
    };
    run_bytes(name, args, &bytes)
}

/// Runs `command` on in-memory input.
pub fn run_bytes(command: &str, args: &CommonArgs, bytes: &[u8]) -> Outcome {
    let text = match std::str::from_utf8(bytes) {
        Ok(t) => t,
        Err(_) => return Outcome::failure(&Error::Parse("input is not UTF-8".into())),
    };
    let doc = match InputDocument::parse(text) {
        Ok(d) => d,
        Err(e) => return Outcome::failure(&e),
    };
    let settings = Settings::resolve(args, &doc);
    let mut w = ReportWriter::new();
    header(&mut w, command, bytes, &doc, &settings);
    let result = match command {
        "analyze" => cmd_analyze(&mut w, &doc, &settings),
        "normal-form" => cmd_normal_form(&mut w, &doc, &settings),
        "closure" => cmd_closure(&mut w, &doc, &settings),
        "sample" => cmd_sample(&mut w, &doc, &settings),
        other => Err(Error::InvalidArgument(format!("unknown command `{other}`"))),
    };
    match result {
        Ok((code, stderr)) => Outcome { stdout: w.finish(), stderr, code },
        Err(e) => Outcome::failure(&e),
    }
}

/// Per-vector outcome: exit code 0 on success.
type VectorResult<T> = std::result::Result<T, Error>;

fn summarize<T>(results: &[(String, VectorResult<T>)]) -> (i32, String) {
    let mut stderr = String::new();
    let mut code = 0;
    for (name, r) in results {
        if let Err(e) = r {
            stderr.push_str(&format!("error: vector `{name}`: {e}\n"));
            code = code.max(exit_code(e));
        }
    }
    (code, stderr)
}

fn require_vectors(doc: &InputDocument) -> Result<()> {
    if doc.vectors.is_empty() {
        return Err(Error::InvalidArgument("the input has no [vectors]".into()));
    }
    Ok(())
}

pub fn cmd_analyze(w: &mut ReportWriter, doc: &InputDocument, s: &Settings) -> Result<(i32, String)> {
    let spec = group_spec(doc, s)?;
    require_vectors(doc)?;
    let results: Vec<(String, VectorResult<_>)> = doc
        .vectors
        .par_iter()
        .map(|v| (v.name.clone(), orbit_order(&spec, &v.entries)))
        .collect();
    for (name, r) in &results {
        w.section(&format!("vector.{name}"));
        match r {
            Ok(rep) => write_orbit(w, rep, &doc.basis),
            Err(e) => error_section(w, e),
        }
    }
    Ok(summarize(&results))
}

pub fn cmd_normal_form(w: &mut ReportWriter, doc: &InputDocument, s: &Settings) -> Result<(i32, String)> {
    let spec = group_spec(doc, s)?;
    let (nf, note) = normal_form_of_spec(&spec)?;
    w.section("normal_form");
    write_normal_form(w, &nf, &doc.basis);
    if let Some(why) = note {
        w.kv("note", format!("numeric tier: {why}"));
    }
    Ok((0, String::new()))
}

fn closure_gens<F: Field>(f: &F, vectors: &[Vec<F::Elem>]) -> AdditiveGroupGens<F::Elem> {
    let _ = f;
    AdditiveGroupGens {
        d: vectors.first().map_or(0, Vec::len),
        vectors: vectors.to_vec(),
        labels: (0..vectors.len()).map(GenLabel::Input).collect(),
    }
}

/// Closure of the subgroup of ℝ^d generated by the document's vectors.
pub fn closure_of_vectors(doc: &InputDocument, s: &Settings) -> Result<(ClosureDecomposition, Option<String>)> {
    require_vectors(doc)?;
    if let Some(v) = doc.vectors.iter().find(|v| v.entries.iter().any(|x| !x.is_real())) {
        return Err(Error::NotReal(format!("vector `{}`", v.name)));
    }
    if s.precision < 30 {
        return Err(Error::InvalidArgument(format!("precision {} is below 30 digits", s.precision)));
    }
    let cfg = ClosureConfig {
        digits: s.precision,
        tau_log10: s.tau.map_or(-(s.precision as f64 - 10.0), f64::log10),
    };
    let raw: Vec<Vec<SymbolicComplex>> = doc.vectors.iter().map(|v| v.entries.clone()).collect();
    with_tiers(
        s.tier,
        || {
            let f = ExactField::new(doc.basis.clone(), s.precision);
            let c = closure_decomposition(&f, &closure_gens(&f, &raw), &cfg)?;
            match (&c.downgrade, s.tier) {
                (Some(why), TierPreference::StrictExact) => Err(Error::ExactUnavailable(format!("closure lattice: {why}"))),
                _ => Ok(c),
            }
        },
        || {
            let d = raw[0].len();
            let f = NumericField::new(s.precision, internal_digits(s.precision, d));
            let vals = doc.basis.values(f.prec() + 16);
            let num: Vec<Vec<_>> =
                raw.iter().map(|v| v.iter().map(|x| x.eval(&vals).with_prec(f.prec())).collect()).collect();
            closure_decomposition(&f, &closure_gens(&f, &num), &cfg)
        },
    )
}

pub fn cmd_closure(w: &mut ReportWriter, doc: &InputDocument, s: &Settings) -> Result<(i32, String)> {
    let (c, note) = closure_of_vectors(doc, s)?;
    w.section("closure");
    w.kv("generators", doc.vectors.iter().map(|v| v.name.as_str()).collect::<Vec<_>>().join(", "));
    write_closure(w, "", &c);
    w.kv("dense_in_span", c.dim == c.span_dim);
    w.kv("discrete", c.dim == 0);
    if let Some(why) = note {
        w.kv("note", format!("numeric tier: {why}"));
    }
    Ok((0, String::new()))
}

/// `base` itself for a single vector, else `base` with `.<name>` appended.
pub fn export_path(base: &Path, name: &str, several: bool) -> PathBuf {
    if !several {
        return base.to_path_buf();
    }
    let mut s = base.as_os_str().to_os_string();
    s.push(format!(".{name}"));
    PathBuf::from(s)
}

pub fn cmd_sample(w: &mut ReportWriter, doc: &InputDocument, s: &Settings) -> Result<(i32, String)> {
    let spec = group_spec(doc, s)?;
    require_vectors(doc)?;
    let several = doc.vectors.len() > 1;
    let results: Vec<(String, VectorResult<_>)> = doc
        .vectors
        .par_iter()
        .map(|v| {
            let run = || -> Result<_> {
                let report = orbit_order(&spec, &v.entries)?;
                let vals = spec.basis.values(64);
                let norm = v.entries.iter().map(|x| x.eval(&vals).norm_sqr().to_f64()).sum::<f64>().sqrt();
                let cloud = enumerate_orbit(&spec, &v.entries, s.word_length, s.radius_factor * norm)?;
                if let Some(base) = &s.export {
                    let path = export_path(base, &v.name, several);
                    let mut file = std::fs::File::create(&path)
                        .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
                    cloud
                        .write_to(&mut file)
                        .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
                }
                let diag = oracle_compare(&report, &cloud)?;
                Ok((report, cloud, diag))
            };
            (v.name.clone(), run())
        })
        .collect();
    for (name, r) in &results {
        w.section(&format!("sample.{name}"));
        match r {
            Ok((rep, cloud, diag)) => write_sample(w, rep, cloud, diag),
            Err(e) => error_section(w, e),
        }
    }
    Ok(summarize(&results))
}
