//! Simultaneous block-triangular normal form of a commuting family.

use std::cmp::Ordering;

use crate::arith::field::{ExactField, Field, NumericField, Tier};
use crate::arith::linalg::{
    identity, inverse, is_zero_vec, kernel, kernel_at_scale, mat_mul, mat_sub, mat_vec, residual_log10, scale_log10, solve,
    Echelon, Matrix,
};
use crate::arith::symbolic::{ConstantBasis, SymbolicComplex};
use crate::arith::FloatComplex;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldMarker {
    Real,
    Complex,
}

/// Which scalar tier to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TierPreference {
    /// Exact first, numeric when exact arithmetic leaves the declared span.
    ExactThenNumeric,
    /// Exact only; fail instead of falling back.
    StrictExact,
    Numeric,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BackendConfig {
    /// Working digits q.
    pub digits: u32,
    /// `log10 τ` for numeric relations; default `-(q - 10)`.
    pub tau_log10: Option<f64>,
    pub tier: TierPreference,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig { digits: 60, tau_log10: None, tier: TierPreference::ExactThenNumeric }
    }
}

impl BackendConfig {
    pub fn tau_log10(&self) -> f64 {
        self.tau_log10.unwrap_or(-(self.digits as f64 - 10.0))
    }
}

/// Digits used internally by the numeric tier for an n-dimensional problem.
///
/// Defective eigenvalues are only determined to about `ε^(1/k)`, so the
/// working precision grows with n.
pub fn internal_digits(digits: u32, n: usize) -> u32 {
    digits * (n.max(2) as u32) + 20
}

/// A validated commuting family of invertible matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSpec {
    pub n: usize,
    pub field: FieldMarker,
    pub generators: Vec<Matrix<SymbolicComplex>>,
    pub basis: ConstantBasis,
    pub config: BackendConfig,
}

impl GroupSpec {
    pub fn new(
        field: FieldMarker,
        generators: Vec<Matrix<SymbolicComplex>>,
        basis: ConstantBasis,
        config: BackendConfig,
    ) -> Result<Self> {
        if config.digits < 30 {
            return Err(Error::InvalidArgument(format!("precision {} is below 30 digits", config.digits)));
        }
        let first = generators.first().ok_or_else(|| Error::InvalidArgument("no generators".into()))?;
        let n = first.rows;
        for (k, g) in generators.iter().enumerate() {
            if !g.is_square() || g.rows != n {
                return Err(Error::Dimension(format!("generator A{} is {}x{}, expected {n}x{n}", k + 1, g.rows, g.cols)));
            }
            if g.data.iter().any(|x| x.len() != basis.len()) {
                return Err(Error::Dimension(format!("generator A{} uses a different constant basis", k + 1)));
            }
            if field == FieldMarker::Real {
                if let Some(x) = g.data.iter().find(|x| !x.is_real()) {
                    return Err(Error::NotReal(format!(
                        "generator A{} entry {}",
                        k + 1,
                        crate::arith::format_scalar(x, &basis)
                    )));
                }
            }
        }
        let spec = GroupSpec { n, field, generators, basis, config };
        spec.check_commuting()?;
        spec.check_invertible()?;
        Ok(spec)
    }

    pub fn p(&self) -> usize {
        self.generators.len()
    }

    pub fn exact_field(&self) -> ExactField {
        ExactField::new(self.basis.clone(), self.config.digits)
    }

    pub fn numeric_field(&self) -> NumericField {
        NumericField::new(self.config.digits, internal_digits(self.config.digits, self.n))
    }

    pub fn numeric_generators(&self, f: &NumericField) -> Vec<Matrix<FloatComplex>> {
        let vals = self.basis.values(f.prec() + 16);
        self.generators
            .iter()
            .map(|g| g.map(|x| x.eval(&vals).with_prec(f.prec())))
            .collect()
    }

    fn check_commuting(&self) -> Result<()> {
        let ex = self.exact_field();
        let nf = self.numeric_field();
        let num = self.numeric_generators(&nf);
        for j in 0..self.p() {
            for k in j + 1..self.p() {
                let (a, b) = (&self.generators[j], &self.generators[k]);
                let exact = mat_mul(&ex, a, b).and_then(|ab| Ok((ab, mat_mul(&ex, b, a)?)));
                let commute = match exact {
                    Ok((ab, ba)) => ab == ba,
                    Err(e) if e.is_tier_limit() => {
                        let ab = mat_mul(&nf, &num[j], &num[k])?;
                        let ba = mat_mul(&nf, &num[k], &num[j])?;
                        let scale = scale_log10(&nf, &ab.data).max(0.0);
                        residual_log10(&nf, &ab, &ba) < nf.tol_log10() + scale
                    }
                    Err(e) => return Err(e),
                };
                if !commute {
                    return Err(Error::NonCommuting(j + 1, k + 1));
                }
            }
        }
        Ok(())
    }

    fn check_invertible(&self) -> Result<()> {
        let ex = self.exact_field();
        let nf = self.numeric_field();
        for (k, g) in self.generators.iter().enumerate() {
            let r = match crate::arith::linalg::rank(&ex, g) {
                Ok(r) => r,
                Err(e) if e.is_tier_limit() => {
                    let vals = self.basis.values(nf.prec() + 16);
                    crate::arith::linalg::rank(&nf, &g.map(|x| x.eval(&vals).with_prec(nf.prec())))?
                }
                Err(e) => return Err(e),
            };
            if r < self.n {
                return Err(Error::SingularGenerator(k + 1));
            }
        }
        Ok(())
    }
}

/// One diagonal block of a matrix in normal form.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangularBlock<E> {
    pub size: usize,
    pub mu: E,
    /// The full block (lower triangular, diagonal `mu`).
    pub block: Matrix<E>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm<E> {
    pub p: Matrix<E>,
    pub p_inv: Matrix<E>,
    pub eta: Vec<usize>,
    /// `P_inv · A_k · P`.
    pub transformed: Vec<Matrix<E>>,
    /// `eigenvalues[k][b]`: value of generator k on block b.
    pub eigenvalues: Vec<Vec<E>>,
    pub tier: Tier,
}

impl<E: Clone> NormalForm<E> {
    pub fn r(&self) -> usize {
        self.eta.len()
    }

    /// Offset of each block's first coordinate.
    pub fn block_starts(&self) -> Vec<usize> {
        block_starts(&self.eta)
    }

    pub fn block(&self, k: usize, b: usize) -> TriangularBlock<E> {
        let s = self.block_starts()[b];
        let m = self.eta[b];
        TriangularBlock {
            size: m,
            mu: self.eigenvalues[k][b].clone(),
            block: self.transformed[k].submatrix(s, s, m, m),
        }
    }
}

pub fn block_starts(eta: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(eta.len());
    let mut s = 0;
    for &m in eta {
        out.push(s);
        s += m;
    }
    out
}

/// A common generalized eigenspace with the eigenvalue of each generator.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenspace<E> {
    pub basis: Vec<Vec<E>>,
    pub eigenvalues: Vec<E>,
}

const MIX: [i64; 10] = [1, 3, 7, 13, 2, 19, 5, 29, 11, 37];

fn char_poly<F: Field>(f: &F, c: &Matrix<F::Elem>) -> Result<Vec<F::Elem>> {
    // Faddeev–LeVerrier, coefficients low degree first
    let n = c.rows;
    let mut coeffs = vec![f.zero(); n + 1];
    coeffs[n] = f.one();
    let id = identity(f, n);
    let mut m = id.clone();
    for k in 1..=n {
        if k > 1 {
            let cm = mat_mul(f, c, &m)?;
            let shift = id.map(|x| x.clone());
            let mut next = cm;
            for i in 0..n {
                let v = f.add(next.get(i, i), &f.mul(shift.get(i, i), &coeffs[n - k + 1])?);
                next.set(i, i, v);
            }
            m = next;
        }
        let cm = mat_mul(f, c, &m)?;
        let mut tr = f.zero();
        for i in 0..n {
            tr = f.add(&tr, cm.get(i, i));
        }
        coeffs[n - k] = f.neg(&f.div(&tr, &f.from_int(k as i64))?);
    }
    Ok(coeffs)
}

fn mat_pow<F: Field>(f: &F, a: &Matrix<F::Elem>, e: usize) -> Result<Matrix<F::Elem>> {
    let mut out = identity(f, a.rows);
    for _ in 0..e {
        out = mat_mul(f, &out, a)?;
    }
    Ok(out)
}

/// Matrix of `A` on an invariant subspace, in the coordinates of `basis`.
pub fn restrict<F: Field>(f: &F, a: &Matrix<F::Elem>, basis: &[Vec<F::Elem>]) -> Result<Option<Matrix<F::Elem>>> {
    let s = Matrix::from_columns(basis, a.rows);
    let mut cols = Vec::with_capacity(basis.len());
    for b in basis {
        let image = mat_vec(f, a, b)?;
        match solve(f, &s, &image)? {
            Some(x) => {
                // confirm within tolerance: numeric solves drop tiny inconsistencies
                let back = mat_vec(f, &s, &x)?;
                let scale = scale_log10(f, &image);
                let diff: Vec<F::Elem> = back.iter().zip(&image).map(|(p, q)| f.sub(p, q)).collect();
                if !is_zero_vec(f, &diff, scale.max(scale_log10(f, &a.data))) {
                    return Ok(None);
                }
                cols.push(x);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(Matrix::from_columns(&cols, basis.len())))
}

fn trace<F: Field>(f: &F, a: &Matrix<F::Elem>) -> F::Elem {
    (0..a.rows).fold(f.zero(), |acc, i| f.add(&acc, a.get(i, i)))
}

/// Splits the space into common generalized eigenspaces of the generators.
pub fn common_generalized_eigenspaces<F: Field>(f: &F, gens: &[Matrix<F::Elem>]) -> Result<Vec<Eigenspace<F::Elem>>> {
    let n = gens[0].rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut last_err = None;
    for attempt in 0..8 {
        let mut c = Matrix { rows: n, cols: n, data: vec![f.zero(); n * n] };
        for (k, g) in gens.iter().enumerate() {
            let r = f.from_int(MIX[(k * (attempt + 1) + attempt) % MIX.len()]);
            for (x, y) in c.data.iter_mut().zip(&g.data) {
                *x = f.add(x, &f.mul(y, &r)?);
            }
        }
        let poly = char_poly(f, &c)?;
        let roots = f.roots(&poly)?;
        let mut spaces = Vec::new();
        let mut ok = true;
        for (mu, mult) in roots {
            let shifted = mat_sub(f, &c, &identity(f, n).try_map(|x| f.mul(x, &mu))?);
            // the power is nearly zero on the eigenspace; measure it against C
            let reference = scale_log10(f, &c.data).max(f.log10_mag(&mu)).max(0.0) * mult as f64;
            let w = kernel_at_scale(f, &mat_pow(f, &shifted, mult)?, reference)?;
            if w.len() != mult {
                if f.tier() == Tier::Numeric {
                    return Err(Error::Clustering(format!(
                        "generalized eigenspace has dimension {} but multiplicity {mult}",
                        w.len()
                    )));
                }
                return Err(Error::Internal("generalized eigenspace dimension mismatch".into()));
            }
            let mut eigenvalues = Vec::with_capacity(gens.len());
            for g in gens {
                let Some(r) = restrict(f, g, &w)? else {
                    return Err(Error::Internal("eigenspace of the combination is not invariant".into()));
                };
                let lambda = f.div(&trace(f, &r), &f.from_int(mult as i64))?;
                let nil = mat_sub(f, &r, &identity(f, mult).try_map(|x| f.mul(x, &lambda))?);
                let power = mat_pow(f, &nil, mult)?;
                let scale = scale_log10(f, &r.data).max(0.0) * mult as f64;
                if !is_zero_vec(f, &power.data, scale) {
                    ok = false;
                    break;
                }
                eigenvalues.push(lambda);
            }
            if !ok {
                break;
            }
            spaces.push(Eigenspace { basis: w, eigenvalues });
        }
        if ok {
            return Ok(spaces);
        }
        last_err = Some(Error::Internal(format!("combination {attempt} merges distinct eigenvalues")));
    }
    Err(last_err.unwrap())
}

/// Basis of a space with commuting nilpotent operators `ns` in which all of
/// them are strictly lower triangular; `anchor` (if given) comes first.
///
/// Returns `Ok(None)` when the anchor lies in a proper invariant layer.
/// `scale` is the magnitude of the operators the `ns` were split off from;
/// numerically the `ns` may be pure rounding noise.
fn flag_basis<F: Field>(
    f: &F,
    ns: &[Matrix<F::Elem>],
    anchor: Option<&[F::Elem]>,
    scale: f64,
) -> Result<Option<Vec<Vec<F::Elem>>>> {
    let d = ns[0].rows;
    // layers[j] = basis of K_{j+1}; K_1 = common kernel, K_{j+1} = {x : N x ∈ K_j}
    let mut layers: Vec<Vec<Vec<F::Elem>>> = Vec::new();
    loop {
        let annihilator: Vec<Vec<F::Elem>> = match layers.last() {
            None => (0..d).map(|i| (0..d).map(|j| if i == j { f.one() } else { f.zero() }).collect()).collect(),
            Some(k) => kernel(f, &Matrix::from_rows(k.clone(), d))?,
        };
        if annihilator.is_empty() {
            break;
        }
        let mut rows = Vec::new();
        for n in ns {
            let a = Matrix::from_rows(annihilator.clone(), d);
            let prod = mat_mul(f, &a, n)?;
            for i in 0..prod.rows {
                rows.push(prod.row(i));
            }
        }
        let next = kernel_at_scale(f, &Matrix::from_rows(rows, d), scale)?;
        let prev = layers.last().map(|k| k.len()).unwrap_or(0);
        if next.len() <= prev {
            return Err(Error::Internal("operators are not nilpotent".into()));
        }
        layers.push(next);
        if layers.last().unwrap().len() == d {
            break;
        }
    }
    let mut ordered: Vec<Vec<Vec<F::Elem>>> = Vec::new();
    let mut above: Vec<Vec<F::Elem>> = Vec::new();
    for j in (0..layers.len()).rev() {
        let mut ech = Echelon::new();
        if j > 0 {
            for v in &layers[j - 1] {
                ech.insert(f, v)?;
            }
        }
        let want = layers[j].len() - if j > 0 { layers[j - 1].len() } else { 0 };
        let mut chosen = Vec::new();
        if j + 1 == layers.len() {
            if let Some(a) = anchor {
                if !ech.insert(f, a)? {
                    return Ok(None);
                }
                chosen.push(a.to_vec());
            }
        }
        let mut images = Vec::new();
        for v in &above {
            for n in ns {
                let image = mat_vec(f, n, v)?;
                if !is_zero_vec(f, &image, scale + scale_log10(f, v)) {
                    images.push(image);
                }
            }
        }
        for cand in layers[j].iter().chain(images.iter()) {
            if chosen.len() == want {
                break;
            }
            if ech.insert(f, cand)? {
                chosen.push(cand.clone());
            }
        }
        if chosen.len() != want {
            return Err(Error::Internal("failed to complete a flag layer".into()));
        }
        above = chosen.clone();
        ordered.push(chosen);
    }
    Ok(Some(ordered.into_iter().flatten().collect()))
}

/// Checks the block-diagonal, lower-triangular, constant-diagonal shape.
pub fn verify_k_structure<F: Field>(f: &F, m: &Matrix<F::Elem>, eta: &[usize]) -> bool {
    let n: usize = eta.iter().sum();
    if m.rows != n || m.cols != n {
        return false;
    }
    let scale = scale_log10(f, &m.data).max(0.0);
    let starts = block_starts(eta);
    let block_of = |i: usize| starts.iter().rposition(|&s| s <= i).unwrap();
    for i in 0..n {
        for j in 0..n {
            let x = m.get(i, j);
            let structural_zero = block_of(i) != block_of(j) || j > i;
            if structural_zero && !f.is_negligible(x, scale) {
                return false;
            }
        }
        let s = starts[block_of(i)];
        if !f.is_negligible(&f.sub(m.get(i, i), m.get(s, s)), scale) {
            return false;
        }
    }
    true
}

/// Invertible elements additionally have nonzero block diagonals.
pub fn verify_k_star_structure<F: Field>(f: &F, m: &Matrix<F::Elem>, eta: &[usize]) -> bool {
    verify_k_structure(f, m, eta) && block_starts(eta).iter().all(|&s| !f.is_zero(m.get(s, s)))
}

/// Zeroes structural entries and equalizes block diagonals (a no-op when exact).
fn snap<F: Field>(f: &F, m: &Matrix<F::Elem>, eta: &[usize], mus: &[F::Elem]) -> Matrix<F::Elem> {
    let starts = block_starts(eta);
    let block_of = |i: usize| starts.iter().rposition(|&s| s <= i).unwrap();
    Matrix::from_fn(m.rows, m.cols, |i, j| {
        if block_of(i) != block_of(j) || j > i {
            f.zero()
        } else if i == j {
            mus[block_of(i)].clone()
        } else {
            m.get(i, j).clone()
        }
    })
}

/// Normal form with an optional anchor vector placed first in every block.
pub fn build_normal_form_anchored<F: Field>(
    f: &F,
    gens: &[Matrix<F::Elem>],
    anchor: Option<&[F::Elem]>,
) -> Result<NormalForm<F::Elem>> {
    let n = gens[0].rows;
    let spaces = common_generalized_eigenspaces(f, gens)?;
    // canonical order: larger blocks first, then by the eigenvalue of A_1
    let mut order: Vec<usize> = (0..spaces.len()).collect();
    order.sort_by(|&a, &b| {
        spaces[b].basis.len().cmp(&spaces[a].basis.len()).then_with(|| {
            let ord = f.cmp_value(&spaces[a].eigenvalues[0], &spaces[b].eigenvalues[0]);
            if ord != Ordering::Equal {
                return ord;
            }
            for k in 1..gens.len() {
                let o = f.cmp_value(&spaces[a].eigenvalues[k], &spaces[b].eigenvalues[k]);
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
    });
    // projections of the anchor onto each space
    let anchor_coords = match anchor {
        Some(u) => {
            let all: Vec<Vec<F::Elem>> = order.iter().flat_map(|&s| spaces[s].basis.clone()).collect();
            let m = Matrix::from_columns(&all, n);
            Some(solve(f, &m, u)?.ok_or_else(|| Error::Internal("eigenspaces do not span".into()))?)
        }
        None => None,
    };
    let mut columns = Vec::with_capacity(n);
    let mut eta = Vec::new();
    let mut offset = 0;
    for (b, &s) in order.iter().enumerate() {
        let space = &spaces[s];
        let d = space.basis.len();
        let mut ns = Vec::new();
        let mut scale = 0.0f64;
        for (g, lambda) in gens.iter().zip(&space.eigenvalues) {
            let r = restrict(f, g, &space.basis)?.ok_or_else(|| Error::Internal("eigenspace not invariant".into()))?;
            scale = scale.max(scale_log10(f, &r.data));
            ns.push(mat_sub(f, &r, &identity(f, d).try_map(|x| f.mul(x, lambda))?));
        }
        let local_anchor = anchor_coords.as_ref().map(|c| c[offset..offset + d].to_vec());
        let basis = flag_basis(f, &ns, local_anchor.as_deref(), scale)?.ok_or(Error::NotInU(b + 1))?;
        let wmat = Matrix::from_columns(&space.basis, n);
        for v in &basis {
            columns.push(mat_vec(f, &wmat, v)?);
        }
        eta.push(d);
        offset += d;
    }
    let p = Matrix::from_columns(&columns, n);
    let p_inv = inverse(f, &p)?;
    let eigenvalues: Vec<Vec<F::Elem>> =
        (0..gens.len()).map(|k| order.iter().map(|&s| spaces[s].eigenvalues[k].clone()).collect()).collect();
    let mut transformed = Vec::with_capacity(gens.len());
    for (k, g) in gens.iter().enumerate() {
        let t = mat_mul(f, &mat_mul(f, &p_inv, g)?, &p)?;
        if !verify_k_structure(f, &t, &eta) {
            return Err(Error::Internal(format!("conjugated A{} is not block triangular", k + 1)));
        }
        transformed.push(snap(f, &t, &eta, &eigenvalues[k]));
    }
    Ok(NormalForm { p, p_inv, eta, transformed, eigenvalues, tier: f.tier() })
}

pub fn build_normal_form<F: Field>(f: &F, gens: &[Matrix<F::Elem>]) -> Result<NormalForm<F::Elem>> {
    build_normal_form_anchored(f, gens, None)
}

/// Normal form of a validated spec in either tier.
#[derive(Clone, Debug)]
pub enum AnyNormalForm {
    Exact(ExactField, NormalForm<SymbolicComplex>),
    Numeric(NumericField, NormalForm<FloatComplex>),
}

impl AnyNormalForm {
    pub fn tier(&self) -> Tier {
        match self {
            AnyNormalForm::Exact(..) => Tier::Exact,
            AnyNormalForm::Numeric(..) => Tier::Numeric,
        }
    }

    pub fn eta(&self) -> &[usize] {
        match self {
            AnyNormalForm::Exact(_, nf) => &nf.eta,
            AnyNormalForm::Numeric(_, nf) => &nf.eta,
        }
    }
}

/// Runs `exact`, falling back to `numeric` on tier limits as configured.
pub fn with_tiers<T>(
    pref: TierPreference,
    exact: impl FnOnce() -> Result<T>,
    numeric: impl FnOnce() -> Result<T>,
) -> Result<(T, Option<String>)> {
    match pref {
        TierPreference::Numeric => Ok((numeric()?, None)),
        TierPreference::StrictExact => Ok((exact()?, None)),
        TierPreference::ExactThenNumeric => match exact() {
            Ok(v) => Ok((v, None)),
            Err(e) if e.is_tier_limit() => Ok((numeric()?, Some(e.to_string()))),
            Err(e) => Err(e),
        },
    }
}

pub fn normal_form_of_spec(spec: &GroupSpec) -> Result<(AnyNormalForm, Option<String>)> {
    with_tiers(
        spec.config.tier,
        || {
            let f = spec.exact_field();
            let nf = build_normal_form(&f, &spec.generators)?;
            Ok(AnyNormalForm::Exact(f, nf))
        },
        || {
            let f = spec.numeric_field();
            let gens = spec.numeric_generators(&f);
            let nf = build_normal_form(&f, &gens)?;
            Ok(AnyNormalForm::Numeric(f, nf))
        },
    )
}
