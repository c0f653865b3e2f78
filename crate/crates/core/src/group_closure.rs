//! Closure of a finitely generated additive subgroup of ℝ^d.
//!
//! With `U` the matrix whose columns are the generators, the closure splits as
//! `V ⊕ (F̄ ∩ W)` where the lattice part is cut out by the integer vectors of
//! the row space of `U`: `M = ℤ^p ∩ rowspace(U)` and `dim V = rank U − rank M`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::field::{ExactField, Field, NumericField, Tier};
use crate::arith::lattice::{hnf, integer_kernel, IVec};
use crate::arith::linalg::{kernel, rank, rref, solve, Matrix};
use crate::arith::relations::integer_relations_numeric_vec;
use crate::arith::symbolic::SymbolicComplex;
use crate::arith::{Float, FloatComplex};
use crate::error::{Error, Result};
use crate::lie_log::AdditiveGroupGens;

/// How integer lattices were obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum LatticeTier {
    Exact,
    /// LLL candidates accepted below `10^tau_log10`.
    Heuristic { tau_log10: f64 },
}

impl LatticeTier {
    pub fn is_exact(&self) -> bool {
        matches!(self, LatticeTier::Exact)
    }
}

/// Settings for the numeric parts.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureConfig {
    pub digits: u32,
    pub tau_log10: f64,
}

impl ClosureConfig {
    pub fn new(digits: u32) -> Self {
        ClosureConfig { digits, tau_log10: -(digits as f64 - 10.0) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureDecomposition {
    pub d: usize,
    /// `d′ = dim span(generators)`.
    pub span_dim: usize,
    /// `dim V`, the closure dimension.
    pub dim: usize,
    /// ℤ-basis of `M = ℤ^p ∩ rowspace(U)`, HNF.
    pub dual_lattice: Vec<IVec>,
    pub v_basis: Vec<Vec<Float>>,
    pub w_basis: Vec<Vec<Float>>,
    /// ℤ-basis of `F̄ ∩ W`.
    pub lattice_basis: Vec<Vec<Float>>,
    /// Shortest nonzero vector of the closure when it is discrete.
    pub min_lattice_norm: Option<Float>,
    pub tier: LatticeTier,
    /// Why the exact tier was not used, when it was not.
    pub downgrade: Option<String>,
}

/// Real-valued generators as floats at the field precision.
fn to_real_floats<F: Field>(f: &F, gens: &AdditiveGroupGens<F::Elem>) -> Vec<Vec<Float>> {
    gens.vectors.iter().map(|v| v.iter().map(|x| f.to_float(x).re).collect()).collect()
}

fn column_matrix<E: Clone>(vectors: &[Vec<E>], d: usize) -> Matrix<E> {
    Matrix::from_columns(vectors, d)
}

fn lift(vs: &[Vec<Float>]) -> Vec<Vec<FloatComplex>> {
    vs.iter().map(|v| v.iter().map(|x| FloatComplex::real(x.clone())).collect()).collect()
}

/// Exact `M` when the kernel of `U` has entries in the declared span.
fn rowspace_lattice_exact(f: &ExactField, u: &Matrix<SymbolicComplex>) -> Result<Vec<IVec>> {
    let p = u.cols;
    let ker = exact_kernel_any_order(f, u)?;
    if ker.is_empty() {
        return Ok(unit_basis(p));
    }
    // m ∈ rowspace(U) iff k·m = 0 for every kernel vector k; split by constant
    let len = f.basis().len();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for k in &ker {
        if k.iter().any(|x| !x.is_real()) {
            return Err(Error::Internal("kernel of a real matrix has complex entries".into()));
        }
        for j in 0..len {
            rows.push(k.iter().map(|x| x.re.coeffs[j].clone()).collect());
        }
    }
    Ok(integer_kernel(&rows, p))
}

/// Column orders to try: as given, mostly-rational columns first, then (for
/// small p) every permutation.
fn column_orders(u: &Matrix<SymbolicComplex>) -> Vec<Vec<usize>> {
    let p = u.cols;
    let mut orders = vec![(0..p).collect::<Vec<_>>()];
    let mut by_rational: Vec<usize> = (0..p).collect();
    by_rational.sort_by_key(|&c| u.column(c).iter().filter(|x| x.as_gauss().is_none()).count());
    orders.push(by_rational);
    if p <= 5 {
        let mut perm: Vec<usize> = (0..p).collect();
        permutations(&mut perm, 0, &mut orders);
    }
    orders
}

fn permutations(perm: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == perm.len() {
        out.push(perm.clone());
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permutations(perm, k + 1, out);
        perm.swap(k, i);
    }
}

/// Exact kernel of `u`. Elimination divides by pivots, which can leave the
/// declared span even when the kernel itself lies in it, so several column
/// orders are tried.
fn exact_kernel_any_order(f: &ExactField, u: &Matrix<SymbolicComplex>) -> Result<Vec<Vec<SymbolicComplex>>> {
    let mut first_err = None;
    for order in column_orders(u) {
        let permuted = Matrix::from_columns(&order.iter().map(|&c| u.column(c)).collect::<Vec<_>>(), u.rows);
        match kernel(f, &permuted) {
            Ok(ker) => {
                return Ok(ker
                    .into_iter()
                    .map(|k| {
                        let mut out = vec![f.zero(); u.cols];
                        for (i, &c) in order.iter().enumerate() {
                            out[c] = k[i].clone();
                        }
                        out
                    })
                    .collect())
            }
            Err(e) if e.is_tier_limit() => {
                first_err.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(first_err.unwrap_or_else(|| Error::Internal("no column order tried".into())))
}

fn unit_basis(p: usize) -> Vec<IVec> {
    (0..p).map(|i| (0..p).map(|k| BigInt::from((i == k) as i64)).collect()).collect()
}

/// LLL search for `M` on `(e_i | N·K^T e_i)`.
fn rowspace_lattice_numeric(vectors: &[Vec<Float>], d: usize, cfg: &ClosureConfig) -> Result<Vec<IVec>> {
    let p = vectors.len();
    let prec = vectors.iter().flatten().map(|x| x.prec()).max().unwrap_or(64);
    let nf = NumericField::from_bits(cfg.digits, prec);
    let u = column_matrix(&lift(vectors), d);
    let ker = kernel(&nf, &u)?;
    if ker.is_empty() {
        return Ok(unit_basis(p));
    }
    // value of generator i: its components in every kernel vector
    let values: Vec<Vec<Float>> = (0..p).map(|i| ker.iter().map(|k| k[i].re.clone()).collect()).collect();
    Ok(integer_relations_numeric_vec(&values, cfg.digits, cfg.tau_log10)?.basis)
}

/// ℤ-basis of `M = ℤ^p ∩ rowspace(U)` with its tier.
pub fn integer_rowspace_lattice<F: Field>(
    f: &F,
    gens: &AdditiveGroupGens<F::Elem>,
    cfg: &ClosureConfig,
) -> Result<(Vec<IVec>, LatticeTier, Option<String>)> {
    let heuristic = LatticeTier::Heuristic { tau_log10: cfg.tau_log10 };
    if gens.vectors.is_empty() {
        return Ok((Vec::new(), LatticeTier::Exact, None));
    }
    let floats = to_real_floats(f, gens);
    if let Some(ex) = f.as_exact() {
        let u = column_matrix(&exact_vectors(f, gens), gens.d);
        match rowspace_lattice_exact(ex, &u) {
            Ok(m) => return Ok((m, LatticeTier::Exact, None)),
            Err(e) if e.is_tier_limit() => {
                let m = rowspace_lattice_numeric(&floats, gens.d, cfg)?;
                return Ok((m, heuristic, Some(e.to_string())));
            }
            Err(e) => return Err(e),
        }
    }
    Ok((rowspace_lattice_numeric(&floats, gens.d, cfg)?, heuristic, None))
}

fn exact_vectors<F: Field>(f: &F, gens: &AdditiveGroupGens<F::Elem>) -> Vec<Vec<SymbolicComplex>> {
    gens.vectors
        .iter()
        .map(|v| v.iter().map(|x| f.as_symbolic(x).expect("symbolic element of an exact field")).collect())
        .collect()
}

/// Relation lattice `{s : Σ s_k v_k = 0}`.
pub fn relation_lattice<F: Field>(
    f: &F,
    gens: &AdditiveGroupGens<F::Elem>,
    cfg: &ClosureConfig,
) -> Result<(Vec<IVec>, LatticeTier)> {
    let p = gens.vectors.len();
    if let Some(ex) = f.as_exact() {
        let vs = exact_vectors(f, gens);
        let len = ex.basis().len();
        let mut rows: Vec<Vec<BigRational>> = Vec::new();
        for c in 0..gens.d {
            for part in 0..2 {
                for j in 0..len {
                    rows.push(
                        vs.iter()
                            .map(|v| if part == 0 { v[c].re.coeffs[j].clone() } else { v[c].im.coeffs[j].clone() })
                            .collect(),
                    );
                }
            }
        }
        let rows: Vec<Vec<BigRational>> = rows.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
        return Ok((integer_kernel(&rows, p), LatticeTier::Exact));
    }
    let floats = to_real_floats(f, gens);
    let rel = integer_relations_numeric_vec(&floats, cfg.digits, cfg.tau_log10)?;
    Ok((rel.basis, LatticeTier::Heuristic { tau_log10: cfg.tau_log10 }))
}

fn dot(a: &[Float], b: &[Float]) -> Float {
    let prec = a.first().map(|x| x.prec()).unwrap_or(64);
    a.iter().zip(b).fold(Float::zero(prec), |acc, (x, y)| acc.add(&x.mul(y)))
}

fn norm(a: &[Float]) -> Float {
    dot(a, a).sqrt()
}

/// Shortest nonzero vector of the lattice spanned by independent `basis`.
///
/// LLL on the Gram matrix in floats, then a small enumeration.
fn shortest_vector(basis: &[Vec<Float>]) -> Option<Float> {
    let k = basis.len();
    if k == 0 {
        return None;
    }
    let mut b: Vec<Vec<Float>> = basis.to_vec();
    // size reduction + Lovász swaps with δ = 3/4
    let mut i = 1;
    let mut guard = 0;
    while i < k && guard < 10_000 {
        guard += 1;
        let gs = gram_schmidt(&b);
        for j in (0..i).rev() {
            let gs = gram_schmidt(&b);
            let mu = dot(&b[i], &gs[j]).div(&dot(&gs[j], &gs[j]));
            let q = mu.round_to_int();
            if !q.is_zero() {
                let qf = Float::from_bigint(&q, mu.prec());
                let bj = b[j].clone();
                for (x, y) in b[i].iter_mut().zip(&bj) {
                    *x = x.sub(&y.mul(&qf));
                }
            }
        }
        let mu = dot(&b[i], &gs[i - 1]).div(&dot(&gs[i - 1], &gs[i - 1]));
        let lhs = dot(&gs[i], &gs[i]);
        let rhs = dot(&gs[i - 1], &gs[i - 1]).mul(&Float::from_f64(0.75, mu.prec()).sub(&mu.mul(&mu)));
        if lhs.cmp(&rhs) == std::cmp::Ordering::Less {
            b.swap(i, i - 1);
            i = (i - 1).max(1);
        } else {
            i += 1;
        }
    }
    let range: i64 = if k <= 4 { 3 } else { 1 };
    let mut best: Option<Float> = None;
    let mut coeffs = vec![-range; k];
    loop {
        if coeffs.iter().any(|&c| c != 0) {
            let prec = b[0][0].prec();
            let mut v = vec![Float::zero(prec); b[0].len()];
            for (c, bv) in coeffs.iter().zip(&b) {
                if *c != 0 {
                    for (x, y) in v.iter_mut().zip(bv) {
                        *x = x.add(&y.mul_i64(*c));
                    }
                }
            }
            let nv = norm(&v);
            if best.as_ref().map_or(true, |bst| nv.cmp(bst) == std::cmp::Ordering::Less) {
                best = Some(nv);
            }
        }
        let mut pos = 0;
        while pos < k {
            coeffs[pos] += 1;
            if coeffs[pos] <= range {
                break;
            }
            coeffs[pos] = -range;
            pos += 1;
        }
        if pos == k {
            break;
        }
    }
    best
}

fn gram_schmidt(b: &[Vec<Float>]) -> Vec<Vec<Float>> {
    let mut out: Vec<Vec<Float>> = Vec::with_capacity(b.len());
    for v in b {
        let mut w = v.clone();
        for g in &out {
            let mu = dot(v, g).div(&dot(g, g));
            for (x, y) in w.iter_mut().zip(g) {
                *x = x.sub(&y.mul(&mu));
            }
        }
        out.push(w);
    }
    out
}

/// Full closure decomposition of the group generated by `gens`.
pub fn closure_decomposition<F: Field>(
    f: &F,
    gens: &AdditiveGroupGens<F::Elem>,
    cfg: &ClosureConfig,
) -> Result<ClosureDecomposition> {
    let d = gens.d;
    let p = gens.vectors.len();
    let floats = to_real_floats(f, gens);
    let prec = f.prec();
    let nf = NumericField::from_bits(cfg.digits, prec);
    // d′ in the field's own arithmetic (exact when possible)
    let u_field = column_matrix(&gens.vectors, d);
    let span_dim = match rank(f, &u_field) {
        Ok(r) => r,
        Err(e) if e.is_tier_limit() => rank(&nf, &column_matrix(&lift(&floats), d))?,
        Err(e) => return Err(e),
    };
    if p == 0 || span_dim == 0 {
        return Ok(ClosureDecomposition {
            d,
            span_dim: 0,
            dim: 0,
            dual_lattice: Vec::new(),
            v_basis: Vec::new(),
            w_basis: Vec::new(),
            lattice_basis: Vec::new(),
            min_lattice_norm: None,
            tier: LatticeTier::Exact,
            downgrade: None,
        });
    }
    let (m, tier, downgrade) = integer_rowspace_lattice(f, gens, cfg)?;
    let dim = span_dim - m.len();

    // geometry in floats
    let u = column_matrix(&lift(&floats), d);
    let pivots = rref(&nf, &u)?.pivots;
    let q: Vec<Vec<FloatComplex>> = pivots.iter().map(|&c| u.column(c)).collect();
    let qm = column_matrix(&q, d);
    let ut_q = {
        // (U^T Q)_{i,j} = <u_i, q_j>
        let cols = u.columns();
        Matrix::from_fn(p, q.len(), |i, j| {
            FloatComplex::real(dot(
                &cols[i].iter().map(|x| x.re.clone()).collect::<Vec<_>>(),
                &q[j].iter().map(|x| x.re.clone()).collect::<Vec<_>>(),
            ))
        })
    };
    let mut w_basis: Vec<Vec<Float>> = Vec::new();
    for mv in &m {
        let rhs: Vec<FloatComplex> = mv.iter().map(|x| FloatComplex::real(Float::from_bigint(x, prec))).collect();
        let a = solve(&nf, &ut_q, &rhs)?
            .ok_or_else(|| Error::Internal("integer vector is not in the row space".into()))?;
        let y = crate::arith::linalg::mat_vec(&nf, &qm, &a)?;
        w_basis.push(y.iter().map(|x| x.re.clone()).collect());
    }
    // V: vectors Q c orthogonal to every y
    let v_basis: Vec<Vec<Float>> = if w_basis.is_empty() {
        q.iter().map(|v| v.iter().map(|x| x.re.clone()).collect()).collect()
    } else {
        let yq = Matrix::from_fn(w_basis.len(), q.len(), |i, j| {
            FloatComplex::real(dot(&w_basis[i], &q[j].iter().map(|x| x.re.clone()).collect::<Vec<_>>()))
        });
        kernel(&nf, &yq)?
            .iter()
            .map(|c| crate::arith::linalg::mat_vec(&nf, &qm, c).map(|v| v.iter().map(|x| x.re.clone()).collect()))
            .collect::<Result<_>>()?
    };
    // lattice basis dual to the y's inside W
    let k = w_basis.len();
    let mut lattice_basis = Vec::with_capacity(k);
    if k > 0 {
        let gram = Matrix::from_fn(k, k, |i, j| FloatComplex::real(dot(&w_basis[i], &w_basis[j])));
        let ginv = crate::arith::linalg::inverse(&nf, &gram)?;
        for i in 0..k {
            let mut v = vec![Float::zero(prec); d];
            for j in 0..k {
                let c = &ginv.get(i, j).re;
                for (x, y) in v.iter_mut().zip(&w_basis[j]) {
                    *x = x.add(&y.mul(c));
                }
            }
            lattice_basis.push(v);
        }
    }
    let min_lattice_norm = if dim == 0 { shortest_vector(&lattice_basis) } else { None };
    Ok(ClosureDecomposition {
        d,
        span_dim,
        dim,
        dual_lattice: hnf(&m),
        v_basis,
        w_basis,
        lattice_basis,
        min_lattice_norm,
        tier,
        downgrade,
    })
}

/// True iff the group is dense in a space of dimension `target_dim`
/// (its closure dimension reaches the span dimension and equals `target_dim`).
pub fn density_test<F: Field>(
    f: &F,
    gens: &AdditiveGroupGens<F::Elem>,
    target_dim: usize,
    cfg: &ClosureConfig,
) -> Result<bool> {
    let c = closure_decomposition(f, gens, cfg)?;
    Ok(c.dim == target_dim && c.dim == c.span_dim)
}

/// Property D(m) for `u_1..u_p`: the first `n` vectors (n = rank of the family)
/// must be independent and `u_{n+1}..u_p` must lie in the span of the last
/// `m` of them; the property then holds iff `ℤu_{n−m+1} + … + ℤu_p` is dense
/// in that m-dimensional span.
pub fn property_d<F: Field>(
    f: &F,
    vectors: &[Vec<F::Elem>],
    m: usize,
    cfg: &ClosureConfig,
) -> Result<bool> {
    let p = vectors.len();
    let d = vectors.first().map(|v| v.len()).unwrap_or(0);
    let all = column_matrix(vectors, d);
    let n = rank(f, &all)?;
    if m > n {
        return Err(Error::Hypothesis(format!("m = {m} exceeds the rank {n}")));
    }
    if rank(f, &column_matrix(&vectors[..n], d))? != n {
        return Err(Error::Hypothesis(format!("the first {n} vectors are not independent")));
    }
    let tail_span = &vectors[n - m..n];
    for (i, v) in vectors.iter().enumerate().skip(n) {
        let mut cols = tail_span.to_vec();
        cols.push(v.clone());
        if rank(f, &column_matrix(&cols, d))? != m {
            return Err(Error::Hypothesis(format!("u{} is outside the span of the last {m} basis vectors", i + 1)));
        }
    }
    let sub = AdditiveGroupGens {
        d,
        vectors: vectors[n - m..p].to_vec(),
        labels: (n - m..p).map(crate::lie_log::GenLabel::Input).collect(),
    };
    let c = closure_decomposition(f, &sub, cfg)?;
    Ok(c.dim == m)
}

impl ClosureDecomposition {
    pub fn tier_name(&self) -> &'static str {
        match self.tier {
            LatticeTier::Exact => Tier::Exact.as_str(),
            LatticeTier::Heuristic { .. } => "heuristic",
        }
    }
}
