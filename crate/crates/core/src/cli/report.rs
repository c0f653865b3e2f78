//! Structured text reports: `key = value` lines grouped under `[section]`
//! headers. Exact scalars are written in the input grammar.

use std::fmt::Write as _;

use crate::arith::field::Scalar;
use crate::arith::symbolic::{ConstantBasis, SymbolicComplex};
use crate::arith::{Float, FloatComplex};
use crate::group_closure::{ClosureDecomposition, LatticeTier};
use crate::lie_log::AdditiveGroupGens;
use crate::normal_form::AnyNormalForm;
use crate::orbit_engine::OrbitReport;
use crate::sampler::{OracleDiagnostic, OrbitCloud};

/// Significant digits for floating values.
pub const REPORT_DIGITS: u32 = 30;

#[derive(Default)]
pub struct ReportWriter {
    out: String,
}

impl ReportWriter {
    pub fn new() -> Self {
        ReportWriter::default()
    }

    pub fn section(&mut self, name: &str) {
        if !self.out.is_empty() {
            self.out.push('\n');
        }
        let _ = writeln!(self.out, "[{name}]");
    }

    pub fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.out, "{key} = {value}");
    }

    pub fn comment(&mut self, text: &str) {
        let _ = writeln!(self.out, "# {text}");
    }

    pub fn finish(self) -> String {
        self.out
    }
}

pub fn scalars(v: &[Scalar], basis: &ConstantBasis) -> String {
    v.iter().map(|x| x.render(basis, REPORT_DIGITS)).collect::<Vec<_>>().join(", ")
}

pub fn floats(v: &[Float]) -> String {
    v.iter().map(|x| x.to_decimal(REPORT_DIGITS)).collect::<Vec<_>>().join(", ")
}

/// Reassembles a θ-vector `(Re, Im)` into complex entries.
pub fn untheta(v: &[Scalar]) -> Vec<Scalar> {
    let n = v.len() / 2;
    (0..n)
        .map(|i| match (&v[i], &v[n + i]) {
            (Scalar::Exact(a, fa), Scalar::Exact(b, fb)) => Scalar::Exact(
                SymbolicComplex::new(a.re.clone(), b.re.clone()),
                FloatComplex::new(fa.re.clone(), fb.re.clone()),
            ),
            (a, b) => Scalar::Numeric(FloatComplex::new(a.float().re.clone(), b.float().re.clone())),
        })
        .collect()
}

pub fn log10_value(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.1}")
    }
}

fn lattice_tier(t: &LatticeTier) -> String {
    match t {
        LatticeTier::Exact => "exact".into(),
        LatticeTier::Heuristic { tau_log10 } => format!("heuristic (tau = 1e{tau_log10:.0})"),
    }
}

fn ints(v: &[num_bigint::BigInt]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

pub fn write_closure(w: &mut ReportWriter, prefix: &str, c: &ClosureDecomposition) {
    w.kv(&format!("{prefix}ambient_dim"), c.d);
    w.kv(&format!("{prefix}span_dim"), c.span_dim);
    w.kv(&format!("{prefix}dim"), c.dim);
    w.kv(&format!("{prefix}lattice_tier"), lattice_tier(&c.tier));
    if let Some(why) = &c.downgrade {
        w.kv(&format!("{prefix}downgrade"), why);
    }
    w.kv(&format!("{prefix}relation_rank"), c.dual_lattice.len());
    for (i, m) in c.dual_lattice.iter().enumerate() {
        w.kv(&format!("{prefix}relation.{}", i + 1), ints(m));
    }
    for (i, v) in c.v_basis.iter().enumerate() {
        w.kv(&format!("{prefix}v_basis.{}", i + 1), floats(v));
    }
    for (i, v) in c.lattice_basis.iter().enumerate() {
        w.kv(&format!("{prefix}lattice.{}", i + 1), floats(v));
    }
    if let Some(x) = &c.min_lattice_norm {
        w.kv(&format!("{prefix}min_lattice_norm"), x.to_decimal(REPORT_DIGITS));
    }
}

fn write_gens(w: &mut ReportWriter, prefix: &str, g: &AdditiveGroupGens<Scalar>, basis: &ConstantBasis) {
    for (i, (v, label)) in g.vectors.iter().zip(&g.labels).enumerate() {
        w.kv(&format!("{prefix}.{}", i + 1), format!("{}  # {label}", scalars(&untheta(v), basis)));
    }
}

pub fn write_orbit(w: &mut ReportWriter, r: &OrbitReport, basis: &ConstantBasis) {
    w.kv("status", "ok");
    w.kv("u", scalars(&r.u, basis));
    w.kv("tier", r.tier.as_str());
    w.kv("order", r.m);
    w.kv("classification", r.classification);
    w.kv("flags.discrete", r.flags.discrete);
    w.kv("flags.closure_is_subspace", r.flags.closure_is_subspace);
    w.kv("flags.dense_in_ambient", r.flags.dense_in_ambient);
    if r.m == 0 && r.r_u > 0 {
        w.comment("order 0: the orbit is discrete, but its closure may still accumulate at points outside U_u");
    }
    w.kv("r_u", r.r_u);
    w.kv("eta", r.eta.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "));
    for (i, b) in r.e_basis.iter().enumerate() {
        w.kv(&format!("e_basis.{}", i + 1), scalars(b, basis));
    }
    write_gens(w, "g_u", &r.g_u, basis);
    write_gens(w, "g_u_normal", &r.g_u_normal, basis);
    write_closure(w, "closure.", &r.closure);
    for (i, h) in r.hyperplanes.iter().enumerate() {
        w.kv(&format!("hyperplane.{}", i + 1), scalars(h, basis));
    }
    w.kv("residual.exp_log10", log10_value(r.exp_residual_log10));
    w.kv("residual.inverse_log10", log10_value(r.inverse_residual_log10));
    for (i, note) in r.notes.iter().enumerate() {
        w.kv(&format!("note.{}", i + 1), note);
    }
}

pub fn write_normal_form(w: &mut ReportWriter, nf: &AnyNormalForm, basis: &ConstantBasis) {
    fn body<F: crate::arith::Field>(
        w: &mut ReportWriter,
        f: &F,
        nf: &crate::normal_form::NormalForm<F::Elem>,
        basis: &ConstantBasis,
    ) {
        let row = |m: &crate::arith::linalg::Matrix<F::Elem>, i: usize| {
            scalars(&m.row(i).iter().map(|x| f.export(x)).collect::<Vec<_>>(), basis)
        };
        w.kv("tier", nf.tier.as_str());
        w.kv("eta", nf.eta.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "));
        for i in 0..nf.p.rows {
            w.kv(&format!("P.{}", i + 1), row(&nf.p, i));
        }
        for i in 0..nf.p_inv.rows {
            w.kv(&format!("P_inv.{}", i + 1), row(&nf.p_inv, i));
        }
        for (k, t) in nf.transformed.iter().enumerate() {
            for i in 0..t.rows {
                w.kv(&format!("A{}.{}", k + 1, i + 1), row(t, i));
            }
        }
        for (k, ev) in nf.eigenvalues.iter().enumerate() {
            w.kv(&format!("eigenvalues.A{}", k + 1), scalars(&ev.iter().map(|x| f.export(x)).collect::<Vec<_>>(), basis));
        }
    }
    match nf {
        AnyNormalForm::Exact(f, nf) => body(w, f, nf, basis),
        AnyNormalForm::Numeric(f, nf) => body(w, f, nf, basis),
    }
}

pub fn write_sample(w: &mut ReportWriter, r: &OrbitReport, cloud: &OrbitCloud, diag: &OracleDiagnostic) {
    let e = &diag.estimate;
    w.kv("status", "ok");
    w.kv("order", r.m);
    w.kv("word_length", cloud.bound);
    w.kv("radius", format!("{:e}", cloud.radius));
    w.kv("words", cloud.attempted);
    w.kv("kept", cloud.points.len());
    w.kv("discarded", cloud.discarded);
    w.kv("window_points", e.window_points);
    w.kv("scales", e.scales.iter().map(|s| format!("{s:.6e}")).collect::<Vec<_>>().join(", "));
    w.kv("counts", e.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "));
    w.kv("fitted_scales", e.fitted);
    w.kv("estimate", format!("{:.4}", e.estimate));
    w.kv("fit_residual", format!("{:.4}", e.residual));
    w.kv("min_relative_norm", format!("{:.3e}", cloud.min_relative_norm()));
    w.kv("verdict", diag.verdict());
}
