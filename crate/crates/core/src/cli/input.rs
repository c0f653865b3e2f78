//! The sectioned text format read by the command-line tool.
//!
//! ```text
//! [field]
//! R
//!
//! [constants]
//! sqrt2 = sqrt(2)   # optional description
//!
//! [generators]
//! 1, 0; 1, 1
//!
//! 2, 0
//! 0, 2
//!
//! [vectors]
//! u = 1, sqrt2
//!
//! [options]
//! precision = 60
//! ```
//!
//! Matrices are separated by blank lines; rows are separated by `;` or line
//! breaks. Lines starting with `#` are comments; a trailing `# ...` on a
//! constant line is kept as its description.

use std::fmt::Write as _;

use crate::arith::linalg::Matrix;
use crate::arith::parse::{format_scalar, q_decompose};
use crate::arith::symbolic::{Constant, ConstantBasis, ConstantDef, SymbolicComplex};
use crate::error::{Error, Result};
use crate::normal_form::{FieldMarker, TierPreference};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FileOptions {
    pub precision: Option<u32>,
    pub tau: Option<f64>,
    pub tier: Option<TierPreference>,
    pub word_length: Option<usize>,
    /// Sampler guard radius as a multiple of `‖u‖`.
    pub radius: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedVector {
    pub name: String,
    pub entries: Vec<SymbolicComplex>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InputDocument {
    pub field: FieldMarker,
    pub basis: ConstantBasis,
    pub generators: Vec<Matrix<SymbolicComplex>>,
    pub vectors: Vec<NamedVector>,
    pub options: FileOptions,
}

pub fn tier_name(t: TierPreference) -> &'static str {
    match t {
        TierPreference::ExactThenNumeric => "exact-then-numeric",
        TierPreference::StrictExact => "strict-exact",
        TierPreference::Numeric => "numeric",
    }
}

fn parse_tier(s: &str) -> Result<TierPreference> {
    match s {
        "exact-then-numeric" => Ok(TierPreference::ExactThenNumeric),
        "strict-exact" => Ok(TierPreference::StrictExact),
        "numeric" => Ok(TierPreference::Numeric),
        _ => Err(Error::Parse(format!("unknown tier `{s}`"))),
    }
}

pub fn field_name(f: FieldMarker) -> &'static str {
    match f {
        FieldMarker::Real => "R",
        FieldMarker::Complex => "C",
    }
}

/// Parses a τ value such as `1e-50`; must lie in (0, 1).
pub fn parse_tau(s: &str) -> Result<f64> {
    let t: f64 = s.trim().parse().map_err(|_| Error::Parse(format!("bad tau `{s}`")))?;
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Parse(format!("tau must lie in (0, 1), got `{s}`")));
    }
    Ok(t)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Field,
    Constants,
    Generators,
    Vectors,
    Options,
}

struct Raw {
    field: Option<(usize, String)>,
    constants: Vec<(usize, String)>,
    /// Matrices as lists of (line, row text).
    generators: Vec<Vec<(usize, String)>>,
    vectors: Vec<(usize, String)>,
    options: Vec<(usize, String)>,
}

fn at(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

fn split_sections(text: &str) -> Result<Raw> {
    let mut raw = Raw { field: None, constants: vec![], generators: vec![], vectors: vec![], options: vec![] };
    let mut section = Section::None;
    let mut seen = Vec::new();
    let mut open_matrix = false;
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let t = line.trim();
        if t.starts_with('#') {
            continue;
        }
        if t.is_empty() {
            open_matrix = false;
            continue;
        }
        if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            section = match name.trim() {
                "field" => Section::Field,
                "constants" => Section::Constants,
                "generators" => Section::Generators,
                "vectors" => Section::Vectors,
                "options" => Section::Options,
                other => return Err(at(ln, format!("unknown section [{other}]"))),
            };
            if seen.contains(&name.trim().to_string()) {
                return Err(at(ln, format!("duplicate section [{}]", name.trim())));
            }
            seen.push(name.trim().to_string());
            open_matrix = false;
            continue;
        }
        match section {
            Section::None => return Err(at(ln, "content before the first section")),
            Section::Field => {
                if raw.field.is_some() {
                    return Err(at(ln, "[field] takes a single line"));
                }
                raw.field = Some((ln, strip_comment(t).to_string()));
            }
            // Keep the comment: it becomes the description.
            Section::Constants => raw.constants.push((ln, t.to_string())),
            Section::Generators => {
                let body = strip_comment(t);
                if !open_matrix {
                    raw.generators.push(Vec::new());
                    open_matrix = true;
                }
                let m = raw.generators.last_mut().unwrap();
                for row in body.split(';').map(str::trim).filter(|r| !r.is_empty()) {
                    m.push((ln, row.to_string()));
                }
            }
            Section::Vectors => raw.vectors.push((ln, strip_comment(t).to_string())),
            Section::Options => raw.options.push((ln, strip_comment(t).to_string())),
        }
    }
    Ok(raw)
}

fn strip_comment(s: &str) -> &str {
    s.split_once('#').map_or(s, |(a, _)| a).trim()
}

fn key_value(ln: usize, s: &str) -> Result<(String, String)> {
    let (k, v) = s.split_once('=').ok_or_else(|| at(ln, format!("expected `name = value`, got `{s}`")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn parse_list(ln: usize, s: &str, basis: &ConstantBasis) -> Result<Vec<SymbolicComplex>> {
    s.split(',')
        .map(|x| q_decompose(x.trim(), basis).map_err(|e| at(ln, e)))
        .collect()
}

impl InputDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let raw = split_sections(text)?;
        let field = match &raw.field {
            None => FieldMarker::Complex,
            Some((ln, s)) => match s.as_str() {
                "R" => FieldMarker::Real,
                "C" => FieldMarker::Complex,
                other => return Err(at(*ln, format!("field must be R or C, got `{other}`"))),
            },
        };

        let mut declared = Vec::new();
        for (ln, line) in &raw.constants {
            let (body, description) = match line.split_once('#') {
                Some((b, d)) => (b.trim(), d.trim().to_string()),
                None => (line.as_str(), String::new()),
            };
            let (name, def) = key_value(*ln, body)?;
            let def = ConstantDef::parse(&def).map_err(|e| at(*ln, e))?;
            declared.push(Constant { name, def, description });
        }
        let basis = ConstantBasis::new(declared)?;

        let mut generators = Vec::new();
        for (k, rows) in raw.generators.iter().enumerate() {
            let parsed = rows
                .iter()
                .map(|(ln, r)| parse_list(*ln, r, &basis))
                .collect::<Result<Vec<_>>>()?;
            let cols = parsed[0].len();
            if parsed.iter().any(|r| r.len() != cols) || parsed.len() != cols {
                return Err(Error::Dimension(format!(
                    "generator A{} is not square ({} rows, row lengths {:?})",
                    k + 1,
                    parsed.len(),
                    parsed.iter().map(Vec::len).collect::<Vec<_>>()
                )));
            }
            generators.push(Matrix::from_rows(parsed, cols));
        }
        if let Some(n) = generators.first().map(|g: &Matrix<SymbolicComplex>| g.rows) {
            if let Some(k) = generators.iter().position(|g| g.rows != n) {
                return Err(Error::Dimension(format!("generator A{} is {}x{0}, expected {n}x{n}", k + 1, generators[k].rows)));
            }
        }

        let mut vectors: Vec<NamedVector> = Vec::new();
        for (ln, line) in &raw.vectors {
            let (name, list) = key_value(*ln, line)?;
            if !crate::arith::symbolic::is_identifier(&name) {
                return Err(at(*ln, format!("`{name}` is not a valid vector name")));
            }
            if vectors.iter().any(|v| v.name == name) {
                return Err(at(*ln, format!("duplicate vector `{name}`")));
            }
            let entries = parse_list(*ln, &list, &basis)?;
            let expected = generators.first().map(|g| g.rows).or(vectors.first().map(|v| v.entries.len()));
            if let Some(n) = expected {
                if entries.len() != n {
                    return Err(Error::Dimension(format!("vector `{name}` has length {}, expected {n}", entries.len())));
                }
            }
            vectors.push(NamedVector { name, entries });
        }

        let mut options = FileOptions::default();
        for (ln, line) in &raw.options {
            let (k, v) = key_value(*ln, line)?;
            let bad = |what: &str| at(*ln, format!("bad {what} `{v}`"));
            match k.replace('-', "_").as_str() {
                "precision" => options.precision = Some(v.parse().map_err(|_| bad("precision"))?),
                "tau" => options.tau = Some(parse_tau(&v).map_err(|e| at(*ln, e))?),
                "tier" => options.tier = Some(parse_tier(&v).map_err(|e| at(*ln, e))?),
                "word_length" => options.word_length = Some(v.parse().map_err(|_| bad("word length"))?),
                "radius" => {
                    let r: f64 = v.parse().map_err(|_| bad("radius"))?;
                    if !(r > 1.0 && r.is_finite()) {
                        return Err(bad("radius (must exceed 1)"));
                    }
                    options.radius = Some(r);
                }
                other => return Err(at(*ln, format!("unknown option `{other}`"))),
            }
        }

        Ok(InputDocument { field, basis, generators, vectors, options })
    }

    pub fn n(&self) -> Option<usize> {
        self.generators.first().map(|g| g.rows).or(self.vectors.first().map(|v| v.entries.len()))
    }

    /// Canonical text; parsing it yields an equal document.
    pub fn print(&self) -> String {
        let b = &self.basis;
        let mut out = String::new();
        let _ = writeln!(out, "[field]\n{}", field_name(self.field));
        if !b.declared().is_empty() {
            out.push_str("\n[constants]\n");
            for c in b.declared() {
                let _ = write!(out, "{} = {}", c.name, c.def);
                if !c.description.is_empty() {
                    let _ = write!(out, " # {}", c.description);
                }
                out.push('\n');
            }
        }
        if !self.generators.is_empty() {
            out.push_str("\n[generators]\n");
            for (k, g) in self.generators.iter().enumerate() {
                if k > 0 {
                    out.push('\n');
                }
                for i in 0..g.rows {
                    let row: Vec<String> = g.row(i).iter().map(|x| format_scalar(x, b)).collect();
                    let _ = writeln!(out, "{}", row.join(", "));
                }
            }
        }
        if !self.vectors.is_empty() {
            out.push_str("\n[vectors]\n");
            for v in &self.vectors {
                let e: Vec<String> = v.entries.iter().map(|x| format_scalar(x, b)).collect();
                let _ = writeln!(out, "{} = {}", v.name, e.join(", "));
            }
        }
        let o = &self.options;
        let mut lines = Vec::new();
        if let Some(q) = o.precision {
            lines.push(format!("precision = {q}"));
        }
        if let Some(t) = o.tau {
            lines.push(format!("tau = {t:e}"));
        }
        if let Some(t) = o.tier {
            lines.push(format!("tier = {}", tier_name(t)));
        }
        if let Some(l) = o.word_length {
            lines.push(format!("word_length = {l}"));
        }
        if let Some(r) = o.radius {
            lines.push(format!("radius = {r:e}"));
        }
        if !lines.is_empty() {
            let _ = writeln!(out, "\n[options]\n{}", lines.join("\n"));
        }
        out
    }
}
