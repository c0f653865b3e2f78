//! Dense matrices over a [`Field`], row-major.

use super::field::Field;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<E>>, cols: usize) -> Self {
        let r = rows.len();
        let data: Vec<E> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * cols);
        Matrix { rows: r, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<E>], rows: usize) -> Self {
        Matrix::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<E> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<E>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn map<T: Clone>(&self, f: impl Fn(&E) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<T: Clone>(&self, f: impl Fn(&E) -> Result<T>) -> Result<Matrix<T>> {
        let data: Result<Vec<T>> = self.data.iter().map(f).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data: data? })
    }
}

pub fn zeros<F: Field>(f: &F, rows: usize, cols: usize) -> Matrix<F::Elem> {
    Matrix { rows, cols, data: vec![f.zero(); rows * cols] }
}

pub fn identity<F: Field>(f: &F, n: usize) -> Matrix<F::Elem> {
    Matrix::from_fn(n, n, |i, j| if i == j { f.one() } else { f.zero() })
}

pub fn mat_add<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    Matrix { rows: a.rows, cols: a.cols, data: a.data.iter().zip(&b.data).map(|(x, y)| f.add(x, y)).collect() }
}

pub fn mat_sub<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    Matrix { rows: a.rows, cols: a.cols, data: a.data.iter().zip(&b.data).map(|(x, y)| f.sub(x, y)).collect() }
}

pub fn mat_scale<F: Field>(f: &F, a: &Matrix<F::Elem>, k: &F::Elem) -> Result<Matrix<F::Elem>> {
    a.try_map(|x| f.mul(x, k))
}

pub fn mat_mul<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Result<Matrix<F::Elem>> {
    if a.cols != b.rows {
        return Err(Error::Dimension(format!("{}x{} times {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    let mut out = zeros(f, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if f.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                let y = b.get(k, j);
                if f.is_zero(y) {
                    continue;
                }
                let v = f.add(out.get(i, j), &f.mul(x, y)?);
                out.set(i, j, v);
            }
        }
    }
    Ok(out)
}

pub fn mat_vec<F: Field>(f: &F, a: &Matrix<F::Elem>, v: &[F::Elem]) -> Result<Vec<F::Elem>> {
    let mut out = Vec::with_capacity(a.rows);
    for i in 0..a.rows {
        let mut acc = f.zero();
        for (j, x) in v.iter().enumerate() {
            let m = a.get(i, j);
            if f.is_zero(m) || f.is_zero(x) {
                continue;
            }
            acc = f.add(&acc, &f.mul(m, x)?);
        }
        out.push(acc);
    }
    Ok(out)
}

pub fn vec_add<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    a.iter().zip(b).map(|(x, y)| f.add(x, y)).collect()
}

pub fn vec_sub<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    a.iter().zip(b).map(|(x, y)| f.sub(x, y)).collect()
}

pub fn vec_scale<F: Field>(f: &F, a: &[F::Elem], k: &F::Elem) -> Result<Vec<F::Elem>> {
    a.iter().map(|x| f.mul(x, k)).collect()
}

/// `log10` of the largest entry magnitude (`-inf` when all vanish).
pub fn scale_log10<F: Field>(f: &F, entries: &[F::Elem]) -> f64 {
    entries.iter().map(|x| f.log10_mag(x)).fold(f64::NEG_INFINITY, f64::max)
}

pub fn is_zero_vec<F: Field>(f: &F, v: &[F::Elem], scale: f64) -> bool {
    v.iter().all(|x| f.is_negligible(x, scale))
}

/// Max-entry residual `log10 ‖a − b‖_max`.
pub fn residual_log10<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> f64 {
    scale_log10(f, &mat_sub(f, a, b).data)
}

#[derive(Clone, Debug)]
pub struct Rref<E> {
    pub mat: Matrix<E>,
    /// Pivot column of each nonzero row.
    pub pivots: Vec<usize>,
}

/// Reduced row echelon form. Numeric entries below tolerance (relative to the
/// largest input entry) are treated as zero and flushed.
pub fn rref<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Result<Rref<F::Elem>> {
    rref_at_scale(f, m, scale_log10(f, &m.data))
}

/// RREF with entries below the tolerance relative to `10^scale` treated as zero.
///
/// Needed when `m` is itself (nearly) zero, e.g. a power of a nilpotent
/// operator: its own magnitude is then rounding noise, not a reference.
pub fn rref_at_scale<F: Field>(f: &F, m: &Matrix<F::Elem>, scale: f64) -> Result<Rref<F::Elem>> {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let mut best: Option<usize> = None;
        for i in r..a.rows {
            let x = a.get(i, c);
            if f.is_negligible(x, scale) {
                continue;
            }
            best = match best {
                Some(b) if f.pivot_order(x, a.get(b, c)) != std::cmp::Ordering::Greater => Some(b),
                _ => Some(i),
            };
        }
        let Some(p) = best else {
            for i in r..a.rows {
                a.set(i, c, f.zero());
            }
            continue;
        };
        if p != r {
            for j in 0..a.cols {
                a.data.swap(p * a.cols + j, r * a.cols + j);
            }
        }
        let piv = a.get(r, c).clone();
        for j in c..a.cols {
            let v = if j == c { f.one() } else { f.div(a.get(r, j), &piv)? };
            a.set(r, j, v);
        }
        for i in 0..a.rows {
            if i == r {
                continue;
            }
            let factor = a.get(i, c).clone();
            if f.is_zero(&factor) {
                continue;
            }
            for j in c..a.cols {
                let v = if j == c {
                    f.zero()
                } else {
                    f.sub(a.get(i, j), &f.mul(&factor, a.get(r, j))?)
                };
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    for i in r..a.rows {
        for j in 0..a.cols {
            a.set(i, j, f.zero());
        }
    }
    Ok(Rref { mat: a, pivots })
}

pub fn rank<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Result<usize> {
    Ok(rref(f, m)?.pivots.len())
}

/// Basis of the right kernel `{x : m x = 0}`, one vector per free column.
pub fn kernel<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Result<Vec<Vec<F::Elem>>> {
    let r = rref(f, m)?;
    Ok(kernel_from_rref(f, &r, m.cols))
}

/// Kernel with an explicit magnitude reference, see [`rref_at_scale`].
pub fn kernel_at_scale<F: Field>(f: &F, m: &Matrix<F::Elem>, scale: f64) -> Result<Vec<Vec<F::Elem>>> {
    let r = rref_at_scale(f, m, scale)?;
    Ok(kernel_from_rref(f, &r, m.cols))
}

pub fn kernel_from_rref<F: Field>(f: &F, r: &Rref<F::Elem>, cols: usize) -> Vec<Vec<F::Elem>> {
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !r.pivots.contains(c)) {
        let mut v = vec![f.zero(); cols];
        v[free] = f.one();
        for (row, &pc) in r.pivots.iter().enumerate() {
            v[pc] = f.neg(r.mat.get(row, free));
        }
        out.push(v);
    }
    out
}

/// A solution of `a x = b` (free variables zero), or `None` if inconsistent.
pub fn solve<F: Field>(f: &F, a: &Matrix<F::Elem>, b: &[F::Elem]) -> Result<Option<Vec<F::Elem>>> {
    let aug = Matrix::from_fn(a.rows, a.cols + 1, |i, j| if j < a.cols { a.get(i, j).clone() } else { b[i].clone() });
    let r = rref(f, &aug)?;
    if r.pivots.last() == Some(&a.cols) {
        return Ok(None);
    }
    let mut x = vec![f.zero(); a.cols];
    for (row, &pc) in r.pivots.iter().enumerate() {
        x[pc] = r.mat.get(row, a.cols).clone();
    }
    Ok(Some(x))
}

pub fn inverse<F: Field>(f: &F, a: &Matrix<F::Elem>) -> Result<Matrix<F::Elem>> {
    let n = a.rows;
    let aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            a.get(i, j).clone()
        } else if j - n == i {
            f.one()
        } else {
            f.zero()
        }
    });
    let r = rref(f, &aug)?;
    if r.pivots.len() < n || r.pivots[n - 1] != n - 1 {
        return Err(Error::Inconsistent("matrix is singular".into()));
    }
    Ok(r.mat.submatrix(0, n, n, n))
}

/// Incrementally built echelon basis used for span membership tests.
#[derive(Clone, Debug)]
pub struct Echelon<E> {
    /// (pivot column, row normalized to 1 at the pivot)
    rows: Vec<(usize, Vec<E>)>,
}

impl<E: Clone + PartialEq + std::fmt::Debug> Echelon<E> {
    pub fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Residual of `v` after eliminating the stored pivots.
    pub fn reduce<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Result<Vec<E>> {
        let mut r = v.to_vec();
        for (pc, row) in &self.rows {
            let k = r[*pc].clone();
            if f.is_zero(&k) {
                continue;
            }
            for (j, x) in row.iter().enumerate() {
                if !f.is_zero(x) {
                    r[j] = f.sub(&r[j], &f.mul(&k, x)?);
                }
            }
            r[*pc] = f.zero();
        }
        Ok(r)
    }

    /// Adds `v` if independent; returns whether it was added.
    pub fn insert<F: Field<Elem = E>>(&mut self, f: &F, v: &[E]) -> Result<bool> {
        let scale = scale_log10(f, v);
        let r = self.reduce(f, v)?;
        let mut best: Option<usize> = None;
        for (j, x) in r.iter().enumerate() {
            if f.is_negligible(x, scale) {
                continue;
            }
            best = match best {
                Some(b) if f.pivot_order(x, &r[b]) != std::cmp::Ordering::Greater => Some(b),
                _ => Some(j),
            };
        }
        let Some(pc) = best else { return Ok(false) };
        let piv = r[pc].clone();
        let mut row = Vec::with_capacity(r.len());
        for (j, x) in r.iter().enumerate() {
            row.push(if j == pc {
                f.one()
            } else if f.is_negligible(x, scale) {
                f.zero()
            } else {
                f.div(x, &piv)?
            });
        }
        // keep earlier rows free of the new pivot
        for (_, other) in self.rows.iter_mut() {
            let k = other[pc].clone();
            if f.is_zero(&k) {
                continue;
            }
            for j in 0..other.len() {
                if !f.is_zero(&row[j]) {
                    other[j] = f.sub(&other[j], &f.mul(&k, &row[j])?);
                }
            }
            other[pc] = f.zero();
        }
        self.rows.push((pc, row));
        Ok(true)
    }

    pub fn contains<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> Result<bool> {
        let scale = scale_log10(f, v);
        Ok(is_zero_vec(f, &self.reduce(f, v)?, scale))
    }
}

impl<E: Clone + PartialEq + std::fmt::Debug> Default for Echelon<E> {
    fn default() -> Self {
        Echelon::new()
    }
}
