//! Logarithms of normal-form generators and generators of the additive group g_u.

use crate::arith::field::{Field, NumericField};
use crate::arith::linalg::{identity, mat_add, mat_mul, mat_sub, mat_vec, residual_log10, Matrix};
use crate::arith::FloatComplex;
use crate::error::{Error, Result};
use crate::normal_form::{block_starts, NormalForm, TriangularBlock};

/// Principal logarithm of `mu·(I + M)` with `M` strictly lower triangular.
pub fn block_log<F: Field>(f: &F, t: &TriangularBlock<F::Elem>) -> Result<TriangularBlock<F::Elem>> {
    block_log_indexed(f, t, 0)
}

fn block_log_indexed<F: Field>(f: &F, t: &TriangularBlock<F::Elem>, index: usize) -> Result<TriangularBlock<F::Elem>> {
    let m = t.size;
    if f.is_zero(&t.mu) {
        return Err(Error::SingularBlock(index + 1));
    }
    let log_mu = f.log(&t.mu)?;
    let id = identity(f, m);
    let nil = mat_sub(f, &t.block.try_map(|x| f.div(x, &t.mu))?, &id);
    let mut out = id.try_map(|x| f.mul(x, &log_mu))?;
    let mut power = id;
    for j in 1..m {
        power = mat_mul(f, &power, &nil)?;
        let sign = if j % 2 == 1 { 1 } else { -1 };
        let c = f.div(&f.from_int(sign), &f.from_int(j as i64))?;
        out = mat_add(f, &out, &power.try_map(|x| f.mul(x, &c))?);
    }
    Ok(TriangularBlock { size: m, mu: log_mu, block: out })
}

/// `exp` of a block `L·I + N`, `N` nilpotent, given `e^L`.
pub fn block_exp_with<F: Field>(f: &F, b: &Matrix<F::Elem>, exp_diag: &F::Elem) -> Result<Matrix<F::Elem>> {
    let m = b.rows;
    let id = identity(f, m);
    let diag = b.get(0, 0).clone();
    let nil = mat_sub(f, b, &id.try_map(|x| f.mul(x, &diag))?);
    let mut out = id.clone();
    let mut power = id;
    let mut fact = 1i64;
    for j in 1..m {
        power = mat_mul(f, &power, &nil)?;
        fact *= j as i64;
        let c = f.div(&f.one(), &f.from_int(fact))?;
        out = mat_add(f, &out, &power.try_map(|x| f.mul(x, &c))?);
    }
    out.try_map(|x| f.mul(x, exp_diag))
}

/// Block-diagonal logarithms `B_k` (normal coordinates) and the lattice vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct LieGenerators<E> {
    pub logs: Vec<Matrix<E>>,
    /// `2πi·P·e^(k)` in the coordinates `P` maps into.
    pub lattice: Vec<Vec<E>>,
    /// Multiple of `2πi` added to each block of each logarithm (principal: 0).
    pub branch: Vec<Vec<i64>>,
}

pub fn group_log<F: Field>(f: &F, nf: &NormalForm<F::Elem>) -> Result<LieGenerators<F::Elem>> {
    let zero = vec![vec![0; nf.r()]; nf.transformed.len()];
    group_log_shifted(f, nf, &zero)
}

/// Logarithms with `branch[k][b]·2πi` added on block `b` of `B_k`.
pub fn group_log_shifted<F: Field>(
    f: &F,
    nf: &NormalForm<F::Elem>,
    branch: &[Vec<i64>],
) -> Result<LieGenerators<F::Elem>> {
    let n = nf.p.rows;
    let starts = nf.block_starts();
    let needs_pi = branch.iter().flatten().any(|&s| s != 0);
    let two_pi_i = if needs_pi || nf.r() > 0 { Some(f.two_pi_i()?) } else { None };
    let mut logs = Vec::with_capacity(nf.transformed.len());
    for k in 0..nf.transformed.len() {
        let mut b = Matrix { rows: n, cols: n, data: vec![f.zero(); n * n] };
        for (blk, &s) in starts.iter().enumerate() {
            let lb = block_log_indexed(f, &nf.block(k, blk), blk)?;
            let shift = branch[k][blk];
            for i in 0..lb.size {
                for j in 0..lb.size {
                    let mut v = lb.block.get(i, j).clone();
                    if i == j && shift != 0 {
                        let extra = f.mul(two_pi_i.as_ref().unwrap(), &f.from_int(shift))?;
                        v = f.add(&v, &extra);
                    }
                    b.set(s + i, s + j, v);
                }
            }
        }
        logs.push(b);
    }
    let mut lattice = Vec::with_capacity(nf.r());
    if let Some(w) = &two_pi_i {
        for &s in &starts {
            let col = nf.p.column(s);
            lattice.push(col.iter().map(|x| f.mul(x, w)).collect::<Result<Vec<_>>>()?);
        }
    }
    Ok(LieGenerators { logs, lattice, branch: branch.to_vec() })
}

/// Largest `log10 ‖exp(B_k) − Ã_k‖_max`, evaluated in floats at the field precision.
pub fn exp_residual_log10<F: Field>(f: &F, nf: &NormalForm<F::Elem>, lg: &LieGenerators<F::Elem>) -> Result<f64> {
    let num = NumericField::from_bits(40, f.prec());
    let starts = nf.block_starts();
    let mut worst = f64::NEG_INFINITY;
    for (k, b) in lg.logs.iter().enumerate() {
        let bf = b.map(|x| f.to_float(x));
        let target = nf.transformed[k].map(|x| f.to_float(x));
        let mut full = Matrix { rows: bf.rows, cols: bf.cols, data: vec![FloatComplex::zero(f.prec()); bf.data.len()] };
        for (blk, &s) in starts.iter().enumerate() {
            let m = nf.eta[blk];
            let sub = bf.submatrix(s, s, m, m);
            let e = block_exp_with(&num, &sub, &sub.get(0, 0).exp())?;
            for i in 0..m {
                for j in 0..m {
                    full.set(s + i, s + j, e.get(i, j).clone());
                }
            }
        }
        worst = worst.max(residual_log10(&num, &full, &target));
    }
    Ok(worst)
}

/// Where a generator of g_u comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GenLabel {
    /// `B_k u` (0-based generator index)
    OrbitLog(usize),
    /// `2πi` times the block-`k` part of `u`
    Lattice(usize),
    /// A generator supplied directly (0-based)
    Input(usize),
}

impl std::fmt::Display for GenLabel {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GenLabel::OrbitLog(k) => write!(fm, "B{} u", k + 1),
            GenLabel::Lattice(k) => write!(fm, "2 pi i u[block {}]", k + 1),
            GenLabel::Input(k) => write!(fm, "v{}", k + 1),
        }
    }
}

/// Generators of an additive subgroup of ℝ^d, stored as real-valued elements.
#[derive(Clone, Debug, PartialEq)]
pub struct AdditiveGroupGens<E> {
    pub d: usize,
    pub vectors: Vec<Vec<E>>,
    pub labels: Vec<GenLabel>,
}

/// `(Re z_1, .., Re z_n, Im z_1, .., Im z_n)`.
pub fn theta<F: Field>(f: &F, v: &[F::Elem]) -> Vec<F::Elem> {
    v.iter().map(|x| f.re(x)).chain(v.iter().map(|x| f.im(x))).collect()
}

/// Inverse of [`theta`].
pub fn theta_inv<F: Field>(f: &F, v: &[F::Elem]) -> Vec<F::Elem> {
    let n = v.len() / 2;
    (0..n).map(|j| f.add(&v[j], &f.mul_i(&v[n + j]))).collect()
}

/// θ-images of `B_k u` and `2πi·π_k(u)`; `u` in normal coordinates.
pub fn g_u_generators<F: Field>(
    f: &F,
    lg: &LieGenerators<F::Elem>,
    nf: &NormalForm<F::Elem>,
    u: &[F::Elem],
) -> Result<AdditiveGroupGens<F::Elem>> {
    let n = u.len();
    let starts = block_starts(&nf.eta);
    for (b, &s) in starts.iter().enumerate() {
        if f.is_zero(&u[s]) {
            return Err(Error::NotInU(b + 1));
        }
    }
    let mut vectors = Vec::new();
    let mut labels = Vec::new();
    for (k, b) in lg.logs.iter().enumerate() {
        vectors.push(theta(f, &mat_vec(f, b, u)?));
        labels.push(GenLabel::OrbitLog(k));
    }
    let w = f.two_pi_i()?;
    for (b, &s) in starts.iter().enumerate() {
        let mut v = vec![f.zero(); n];
        for j in s..s + nf.eta[b] {
            v[j] = f.mul(&u[j], &w)?;
        }
        vectors.push(theta(f, &v));
        labels.push(GenLabel::Lattice(b));
    }
    Ok(AdditiveGroupGens { d: 2 * n, vectors, labels })
}
