//! End-to-end orbit analysis: E(u), restriction, normal form, logarithms,
//! g_u and its closure, classification and the singular locus.

use std::fmt;

use crate::arith::field::{Field, NumericField, Scalar, Tier};
use crate::arith::linalg::{
    identity, is_zero_vec, kernel, mat_add, mat_mul, mat_scale, mat_vec, rank, rref, scale_log10, solve, Echelon,
    Matrix,
};
use crate::arith::symbolic::SymbolicComplex;
use crate::arith::FloatComplex;
use crate::error::{Error, Result};
use crate::group_closure::{closure_decomposition, ClosureConfig, ClosureDecomposition};
use crate::lie_log::{exp_residual_log10, g_u_generators, group_log_shifted, theta, theta_inv, AdditiveGroupGens};
use crate::normal_form::{build_normal_form_anchored, restrict, with_tiers, FieldMarker, GroupSpec, NormalForm, TierPreference};

/// Canonical basis of an invariant subspace: RREF rows, with their pivot coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis<E> {
    pub vectors: Vec<Vec<E>>,
    pub pivots: Vec<usize>,
}

impl<E: Clone> SubspaceBasis<E> {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Coordinates of a member vector.
    pub fn coords(&self, v: &[E]) -> Vec<E> {
        self.pivots.iter().map(|&p| v[p].clone()).collect()
    }
}

/// `E(u)`: the smallest subspace containing `u` and invariant under the generators.
///
/// Only forward images are needed: a generator maps a finite-dimensional
/// invariant subspace injectively into itself, so its inverse preserves it too.
pub fn orbit_span_in<F: Field>(f: &F, gens: &[Matrix<F::Elem>], u: &[F::Elem]) -> Result<SubspaceBasis<F::Elem>> {
    let n = u.len();
    let mut ech = Echelon::new();
    let mut raw: Vec<Vec<F::Elem>> = Vec::new();
    if ech.insert(f, u)? {
        raw.push(u.to_vec());
    }
    let mut next = 0;
    while next < raw.len() {
        let v = raw[next].clone();
        for a in gens {
            let w = mat_vec(f, a, &v)?;
            if ech.insert(f, &w)? {
                raw.push(w);
            }
        }
        next += 1;
    }
    if raw.is_empty() {
        return Ok(SubspaceBasis { vectors: Vec::new(), pivots: Vec::new() });
    }
    let r = rref(f, &Matrix::from_rows(raw, n))?;
    let vectors = (0..r.pivots.len()).map(|i| r.mat.row(i)).collect();
    Ok(SubspaceBasis { vectors, pivots: r.pivots })
}

/// Generators acting on an invariant subspace, in its coordinates.
pub fn restrict_generators<F: Field>(
    f: &F,
    gens: &[Matrix<F::Elem>],
    basis: &[Vec<F::Elem>],
) -> Result<Vec<Matrix<F::Elem>>> {
    gens.iter()
        .enumerate()
        .map(|(k, a)| restrict(f, a, basis)?.ok_or(Error::NotInvariant(k + 1)))
        .collect()
}

/// The group restricted to an invariant subspace, revalidated.
pub fn restrict_group(spec: &GroupSpec, basis: &[Vec<SymbolicComplex>]) -> Result<GroupSpec> {
    if basis.is_empty() {
        return Err(Error::InvalidArgument("cannot restrict to the zero subspace".into()));
    }
    if basis.iter().any(|b| b.len() != spec.n) {
        return Err(Error::Dimension(format!("subspace vectors must have length {}", spec.n)));
    }
    let f = spec.exact_field();
    let gens = restrict_generators(&f, &spec.generators, basis)?;
    GroupSpec::new(spec.field, gens, spec.basis.clone(), spec.config.clone())
}

/// Functionals (on the ambient space) whose zero sets are the block-leading
/// hyperplanes of `E(u)` ∖ `U_u`.
pub fn singular_locus<F: Field>(f: &F, nf: &NormalForm<F::Elem>, sub: &SubspaceBasis<F::Elem>, n: usize) -> Vec<Vec<F::Elem>> {
    nf.block_starts()
        .iter()
        .map(|&s| {
            let mut h = vec![f.zero(); n];
            for (i, &p) in sub.pivots.iter().enumerate() {
                h[p] = nf.p_inv.get(s, i).clone();
            }
            h
        })
        .collect()
}

fn apply_functional<F: Field>(f: &F, h: &[F::Elem], v: &[F::Elem]) -> Result<F::Elem> {
    let mut acc = f.zero();
    for (a, b) in h.iter().zip(v) {
        if !f.is_zero(a) && !f.is_zero(b) {
            acc = f.add(&acc, &f.mul(a, b)?);
        }
    }
    Ok(acc)
}

/// Basis of the algebra spanned by the group: closure of `{I}` under
/// multiplication by the generators.
pub fn group_span_in<F: Field>(f: &F, gens: &[Matrix<F::Elem>]) -> Result<Vec<Matrix<F::Elem>>> {
    let n = gens[0].rows;
    let mut ech = Echelon::new();
    let mut basis = vec![identity(f, n)];
    ech.insert(f, &basis[0].data)?;
    let mut next = 0;
    while next < basis.len() {
        let m = basis[next].clone();
        for a in gens {
            let p = mat_mul(f, a, &m)?;
            if ech.insert(f, &p.data)? {
                basis.push(p);
            }
        }
        next += 1;
    }
    Ok(basis)
}

/// An invertible `B` in the group algebra with `B u = v`, for `v ∈ U_u`.
pub fn map_orbit_in<F: Field>(
    f: &F,
    gens: &[Matrix<F::Elem>],
    u: &[F::Elem],
    v: &[F::Elem],
) -> Result<Matrix<F::Elem>> {
    let n = u.len();
    let sub = orbit_span_in(f, gens, u)?;
    if sub.dim() == 0 {
        return Err(Error::NotInRegularRegion);
    }
    // v must lie in E(u) ...
    let mut back = vec![f.zero(); n];
    for (c, b) in sub.coords(v).iter().zip(&sub.vectors) {
        for (x, y) in back.iter_mut().zip(b) {
            *x = f.add(x, &f.mul(c, y)?);
        }
    }
    let diff: Vec<F::Elem> = back.iter().zip(v).map(|(a, b)| f.sub(a, b)).collect();
    if !is_zero_vec(f, &diff, scale_log10(f, v)) {
        return Err(Error::NotInRegularRegion);
    }
    // ... and off every block-leading hyperplane
    let restricted = restrict_generators(f, gens, &sub.vectors)?;
    let nf = anchored(f, &restricted, &sub.coords(u))?;
    let scale = scale_log10(f, v);
    for h in singular_locus(f, &nf, &sub, n) {
        if f.is_negligible(&apply_functional(f, &h, v)?, scale) {
            return Err(Error::NotInRegularRegion);
        }
    }
    let span = group_span_in(f, gens)?;
    let cols: Vec<Vec<F::Elem>> = span.iter().map(|g| mat_vec(f, g, u)).collect::<Result<_>>()?;
    let system = Matrix::from_columns(&cols, n);
    let c = solve(f, &system, v)?
        .ok_or_else(|| Error::Inconsistent("no element of the group algebra maps u to v".into()))?;
    let combine = |coeffs: &[F::Elem]| -> Result<Matrix<F::Elem>> {
        let mut acc = Matrix { rows: n, cols: n, data: vec![f.zero(); n * n] };
        for (k, g) in coeffs.iter().zip(&span) {
            if !f.is_zero(k) {
                acc = mat_add(f, &acc, &mat_scale(f, g, k)?);
            }
        }
        Ok(acc)
    };
    let b = combine(&c)?;
    if rank(f, &b)? == n {
        return Ok(b);
    }
    // the solution set is affine; walk along a moment curve of its directions
    let dirs: Vec<Matrix<F::Elem>> = kernel(f, &system)?.iter().map(|k| combine(k)).collect::<Result<_>>()?;
    for t in 1..=(2 * n as i64 + 2) {
        let mut cand = b.clone();
        let mut power = t;
        for d in &dirs {
            cand = mat_add(f, &cand, &mat_scale(f, d, &f.from_int(power))?);
            power = power.saturating_mul(t);
        }
        if rank(f, &cand)? == n {
            return Ok(cand);
        }
    }
    Err(Error::Inconsistent("no invertible solution found in the group algebra".into()))
}

fn anchored<F: Field>(f: &F, restricted: &[Matrix<F::Elem>], anchor: &[F::Elem]) -> Result<NormalForm<F::Elem>> {
    build_normal_form_anchored(f, restricted, Some(anchor)).map_err(|e| match e {
        Error::NotInU(b) => Error::Inconsistent(format!(
            "u has a vanishing leading coordinate in block {b} of its own orbit span; increase the precision"
        )),
        other => other,
    })
}

/// Orbit classification tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Discrete,
    Regular(usize),
    ClosureIsSubspace,
    DenseInAmbient,
}

impl fmt::Display for Classification {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Discrete => write!(fm, "discrete"),
            Classification::Regular(m) => write!(fm, "regular({m})"),
            Classification::ClosureIsSubspace => write!(fm, "closure_is_subspace"),
            Classification::DenseInAmbient => write!(fm, "dense_in_ambient"),
        }
    }
}

/// All properties that hold; several can hold at once.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ClassFlags {
    pub discrete: bool,
    pub closure_is_subspace: bool,
    pub dense_in_ambient: bool,
}

pub fn class_flags(m: usize, r_u: usize, n: usize, field: FieldMarker) -> ClassFlags {
    ClassFlags {
        discrete: m == 0,
        closure_is_subspace: m == 2 * r_u,
        dense_in_ambient: match field {
            FieldMarker::Complex => m == 2 * n,
            FieldMarker::Real => m == n,
        },
    }
}

/// Most specific tag: dense, then discrete, then subspace, else regular(m).
pub fn classify(m: usize, flags: ClassFlags) -> Classification {
    if flags.dense_in_ambient && m > 0 {
        Classification::DenseInAmbient
    } else if flags.discrete {
        Classification::Discrete
    } else if flags.closure_is_subspace {
        Classification::ClosureIsSubspace
    } else {
        Classification::Regular(m)
    }
}

pub fn classify_orbit(report: &OrbitReport) -> Classification {
    classify(report.m, report.flags)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OrbitOptions {
    /// Multiples of 2πi added to the block logarithms, cycled over (generator, block).
    pub branch_shift: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitReport {
    pub n: usize,
    pub field: FieldMarker,
    pub u: Vec<Scalar>,
    /// RREF basis of E(u).
    pub e_basis: Vec<Vec<Scalar>>,
    pub r_u: usize,
    pub eta: Vec<usize>,
    /// g_u generators, θ-embedded, in the original coordinates (`d = 2n`).
    pub g_u: AdditiveGroupGens<Scalar>,
    /// The same generators in normal coordinates of E(u), where `u = u_0` (`d = 2 r_u`).
    pub g_u_normal: AdditiveGroupGens<Scalar>,
    pub closure: ClosureDecomposition,
    pub m: usize,
    pub flags: ClassFlags,
    pub classification: Classification,
    /// Functionals whose zero sets bound `U_u` inside E(u).
    pub hyperplanes: Vec<Vec<Scalar>>,
    pub tier: Tier,
    pub notes: Vec<String>,
    pub exp_residual_log10: f64,
    pub inverse_residual_log10: f64,
}

impl OrbitReport {
    fn zero(spec: &GroupSpec, u: Vec<Scalar>, tier: Tier) -> Self {
        let flags = class_flags(0, 0, spec.n, spec.field);
        OrbitReport {
            n: spec.n,
            field: spec.field,
            u,
            e_basis: Vec::new(),
            r_u: 0,
            eta: Vec::new(),
            g_u: AdditiveGroupGens { d: 2 * spec.n, vectors: Vec::new(), labels: Vec::new() },
            g_u_normal: AdditiveGroupGens { d: 0, vectors: Vec::new(), labels: Vec::new() },
            closure: ClosureDecomposition {
                d: 0,
                span_dim: 0,
                dim: 0,
                dual_lattice: Vec::new(),
                v_basis: Vec::new(),
                w_basis: Vec::new(),
                lattice_basis: Vec::new(),
                min_lattice_norm: None,
                tier: crate::group_closure::LatticeTier::Exact,
                downgrade: None,
            },
            m: 0,
            flags,
            classification: classify(0, flags),
            hyperplanes: Vec::new(),
            tier,
            notes: Vec::new(),
            exp_residual_log10: f64::NEG_INFINITY,
            inverse_residual_log10: f64::NEG_INFINITY,
        }
    }
}

fn float_residual<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> f64 {
    let nf = NumericField::from_bits(30, f.prec());
    let a = a.map(|x| f.to_float(x));
    let b = b.map(|x| f.to_float(x));
    crate::arith::linalg::residual_log10(&nf, &a, &b)
}

/// θ-vector in normal coordinates of E(u) → θ-vector in the ambient space.
fn to_original<F: Field>(
    f: &F,
    nf: &NormalForm<F::Elem>,
    sub: &SubspaceBasis<F::Elem>,
    n: usize,
    v: &[F::Elem],
) -> Result<Vec<F::Elem>> {
    let y = mat_vec(f, &nf.p, &theta_inv(f, v))?;
    let mut x = vec![f.zero(); n];
    for (c, b) in y.iter().zip(&sub.vectors) {
        if f.is_zero(c) {
            continue;
        }
        for (xi, bi) in x.iter_mut().zip(b) {
            if !f.is_zero(bi) {
                *xi = f.add(xi, &f.mul(c, bi)?);
            }
        }
    }
    Ok(theta(f, &x))
}

fn export_original<F: Field>(
    f: &F,
    nf: &NormalForm<F::Elem>,
    sub: &SubspaceBasis<F::Elem>,
    n: usize,
    v: &[F::Elem],
) -> Result<Vec<Scalar>> {
    match to_original(f, nf, sub, n, v) {
        Ok(x) => Ok(x.iter().map(|e| f.export(e)).collect()),
        Err(e) if e.is_tier_limit() => {
            // products leave the declared span: report this vector in floats
            let num = NumericField::from_bits(30, f.prec());
            let nf_f = NormalForm {
                p: nf.p.map(|x| f.to_float(x)),
                p_inv: nf.p_inv.map(|x| f.to_float(x)),
                eta: nf.eta.clone(),
                transformed: Vec::new(),
                eigenvalues: Vec::new(),
                tier: Tier::Numeric,
            };
            let sub_f = SubspaceBasis {
                vectors: sub.vectors.iter().map(|b| b.iter().map(|x| f.to_float(x)).collect()).collect(),
                pivots: sub.pivots.clone(),
            };
            let v_f: Vec<FloatComplex> = v.iter().map(|x| f.to_float(x)).collect();
            Ok(to_original(&num, &nf_f, &sub_f, n, &v_f)?.into_iter().map(Scalar::Numeric).collect())
        }
        Err(e) => Err(e),
    }
}

/// The whole pipeline inside one field.
fn analyze_in<F: Field>(
    f: &F,
    spec: &GroupSpec,
    gens: &[Matrix<F::Elem>],
    u: &[F::Elem],
    opts: &OrbitOptions,
) -> Result<OrbitReport> {
    let n = spec.n;
    let u_export: Vec<Scalar> = u.iter().map(|x| f.export(x)).collect();
    let sub = orbit_span_in(f, gens, u)?;
    if sub.dim() == 0 {
        return Ok(OrbitReport::zero(spec, u_export, f.tier()));
    }
    let restricted = restrict_generators(f, gens, &sub.vectors)?;
    let nf = anchored(f, &restricted, &sub.coords(u))?;
    let r = nf.r();
    let shifts: Vec<Vec<i64>> = (0..gens.len())
        .map(|k| {
            (0..r)
                .map(|b| match &opts.branch_shift {
                    Some(pat) if !pat.is_empty() => pat[(k * r + b) % pat.len()],
                    _ => 0,
                })
                .collect()
        })
        .collect();
    let lg = group_log_shifted(f, &nf, &shifts)?;
    let u_normal = mat_vec(f, &nf.p_inv, &sub.coords(u))?;
    let gens_normal = g_u_generators(f, &lg, &nf, &u_normal)?;
    let cfg = ClosureConfig { digits: spec.config.digits, tau_log10: spec.config.tau_log10() };
    let closure = closure_decomposition(f, &gens_normal, &cfg)?;
    let mut notes = Vec::new();
    if let Some(why) = &closure.downgrade {
        if spec.config.tier == TierPreference::StrictExact {
            return Err(Error::ExactUnavailable(format!("closure lattice: {why}")));
        }
        notes.push(format!("closure lattice computed heuristically: {why}"));
    }
    let m = closure.dim;
    let r_u = sub.dim();
    if spec.field == FieldMarker::Real && m > n {
        return Err(Error::Inconsistent(format!("real orbit with order {m} > n = {n}")));
    }
    if m > 2 * r_u {
        return Err(Error::Inconsistent(format!("order {m} exceeds 2 r(u) = {}", 2 * r_u)));
    }
    let flags = class_flags(m, r_u, n, spec.field);
    let hyperplanes = singular_locus(f, &nf, &sub, n).iter().map(|h| h.iter().map(|x| f.export(x)).collect()).collect();
    let g_u = AdditiveGroupGens {
        d: 2 * n,
        vectors: gens_normal
            .vectors
            .iter()
            .map(|v| export_original(f, &nf, &sub, n, v))
            .collect::<Result<_>>()?,
        labels: gens_normal.labels.clone(),
    };
    let inverse_residual_log10 = float_residual(f, &mat_mul(f, &nf.p, &nf.p_inv)?, &identity(f, r_u));
    Ok(OrbitReport {
        n,
        field: spec.field,
        u: u_export,
        e_basis: sub.vectors.iter().map(|b| b.iter().map(|x| f.export(x)).collect()).collect(),
        r_u,
        eta: nf.eta.clone(),
        g_u_normal: AdditiveGroupGens {
            d: gens_normal.d,
            vectors: gens_normal.vectors.iter().map(|v| v.iter().map(|x| f.export(x)).collect()).collect(),
            labels: gens_normal.labels.clone(),
        },
        g_u,
        closure,
        m,
        flags,
        classification: classify(m, flags),
        hyperplanes,
        tier: f.tier(),
        notes,
        exp_residual_log10: exp_residual_log10(f, &nf, &lg)?,
        inverse_residual_log10,
    })
}

fn check_vector(spec: &GroupSpec, u: &[SymbolicComplex]) -> Result<()> {
    if u.len() != spec.n {
        return Err(Error::Dimension(format!("vector has length {}, expected {}", u.len(), spec.n)));
    }
    if u.iter().any(|x| x.len() != spec.basis.len()) {
        return Err(Error::Dimension("vector uses a different constant basis".into()));
    }
    if spec.field == FieldMarker::Real {
        if let Some(x) = u.iter().find(|x| !x.is_real()) {
            return Err(Error::NotReal(format!("vector entry {}", crate::arith::format_scalar(x, &spec.basis))));
        }
    }
    Ok(())
}

fn numeric_vector(spec: &GroupSpec, nf: &NumericField, u: &[SymbolicComplex]) -> Vec<FloatComplex> {
    let vals = spec.basis.values(nf.prec() + 16);
    u.iter().map(|x| x.eval(&vals).with_prec(nf.prec())).collect()
}

/// Runs `body` in the exact field, then in the numeric field as configured.
fn tiered<T>(
    spec: &GroupSpec,
    exact: impl FnOnce(&crate::arith::ExactField) -> Result<T>,
    numeric: impl FnOnce(&NumericField, Vec<Matrix<FloatComplex>>) -> Result<T>,
) -> Result<(T, Option<String>)> {
    with_tiers(
        spec.config.tier,
        || exact(&spec.exact_field()),
        || {
            let nf = spec.numeric_field();
            let gens = spec.numeric_generators(&nf);
            numeric(&nf, gens)
        },
    )
}

/// Basis of E(u) in the first tier that succeeds.
pub fn orbit_span(spec: &GroupSpec, u: &[SymbolicComplex]) -> Result<Vec<Vec<Scalar>>> {
    check_vector(spec, u)?;
    let (basis, _) = tiered(
        spec,
        |f| {
            let s = orbit_span_in(f, &spec.generators, u)?;
            Ok(s.vectors.iter().map(|v| v.iter().map(|x| f.export(x)).collect()).collect())
        },
        |f, gens| {
            let s = orbit_span_in(f, &gens, &numeric_vector(spec, f, u))?;
            Ok(s.vectors.iter().map(|v| v.iter().map(|x| f.export(x)).collect()).collect())
        },
    )?;
    Ok(basis)
}

pub fn orbit_order(spec: &GroupSpec, u: &[SymbolicComplex]) -> Result<OrbitReport> {
    orbit_order_with(spec, u, &OrbitOptions::default())
}

pub fn orbit_order_with(spec: &GroupSpec, u: &[SymbolicComplex], opts: &OrbitOptions) -> Result<OrbitReport> {
    check_vector(spec, u)?;
    let (mut report, note) = tiered(
        spec,
        |f| analyze_in(f, spec, &spec.generators, u, opts),
        |f, gens| analyze_in(f, spec, &gens, &numeric_vector(spec, f, u), opts),
    )?;
    if let Some(why) = note {
        report.notes.insert(0, format!("numeric tier: {why}"));
    }
    Ok(report)
}

/// Basis of the group algebra.
pub fn group_span(spec: &GroupSpec) -> Result<Vec<Matrix<Scalar>>> {
    let (span, _) = tiered(
        spec,
        |f| Ok(group_span_in(f, &spec.generators)?.iter().map(|m| m.map(|x| f.export(x))).collect()),
        |f, gens| Ok(group_span_in(f, &gens)?.iter().map(|m| m.map(|x| f.export(x))).collect()),
    )?;
    Ok(span)
}

pub fn map_orbit(spec: &GroupSpec, u: &[SymbolicComplex], v: &[SymbolicComplex]) -> Result<Matrix<Scalar>> {
    check_vector(spec, u)?;
    check_vector(spec, v)?;
    let (b, _) = tiered(
        spec,
        |f| Ok(map_orbit_in(f, &spec.generators, u, v)?.map(|x| f.export(x))),
        |f, gens| {
            let (un, vn) = (numeric_vector(spec, f, u), numeric_vector(spec, f, v));
            Ok(map_orbit_in(f, &gens, &un, &vn)?.map(|x| f.export(x)))
        },
    )?;
    Ok(b)
}
