//! Integer lattices given by row vectors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IVec = Vec<BigInt>;

fn is_zero_row(r: &[BigInt]) -> bool {
    r.iter().all(|x| x.is_zero())
}

/// `a -= k * b` on whole rows.
fn axpy(a: &mut [BigInt], k: &BigInt, b: &[BigInt]) {
    if k.is_zero() {
        return;
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x -= k * y;
    }
}

/// Unimodular row reduction on the first `ncols` columns: afterwards the rows
/// are in echelon form there (positive pivots, entries above pivots reduced into
/// `[0, pivot)`); rows vanishing on those columns are moved to the bottom.
/// Returns the number of nonzero rows.
fn echelon(rows: &mut [IVec], ncols: usize) -> usize {
    let m = rows.len();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..ncols {
        if r == m {
            break;
        }
        loop {
            // smallest nonzero |entry| in column c among rows r..
            let best = (r..m)
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&i, &j| rows[i][c].abs().cmp(&rows[j][c].abs()));
            let Some(b) = best else { break };
            rows.swap(r, b);
            let mut done = true;
            for i in r + 1..m {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let (head, tail) = rows.split_at_mut(i);
                axpy(&mut tail[0], &q, &head[r]);
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < m && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            pivots.push((r, c));
            r += 1;
        }
    }
    // reduce above pivots
    for &(pr, pc) in &pivots {
        for i in 0..pr {
            let q = rows[i][pc].div_floor(&rows[pr][pc]);
            let (head, tail) = rows.split_at_mut(pr);
            axpy(&mut head[i], &q, &tail[0]);
        }
    }
    r
}

/// Hermite normal form basis of the lattice spanned by `rows`.
pub fn hnf(rows: &[IVec]) -> Vec<IVec> {
    if rows.is_empty() {
        return Vec::new();
    }
    let n = rows[0].len();
    let mut a = rows.to_vec();
    let r = echelon(&mut a, n);
    a.truncate(r);
    a
}

/// ℤ-basis (in HNF) of `{s ∈ ℤ^n : A s = 0}` for a rational matrix `A` given
/// by rows of length `n`.
pub fn integer_kernel(a: &[Vec<BigRational>], n: usize) -> Vec<IVec> {
    // clear denominators row-wise
    let int_rows: Vec<IVec> = a
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect()
        })
        .filter(|r: &IVec| !is_zero_row(r))
        .collect();
    let m = int_rows.len();
    // rows [A^T | I]
    let mut aug: Vec<IVec> = (0..n)
        .map(|j| {
            let mut r: IVec = int_rows.iter().map(|row| row[j].clone()).collect();
            r.extend((0..n).map(|k| if k == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let rank = echelon(&mut aug, m);
    let ker: Vec<IVec> = aug[rank..].iter().map(|r| r[m..].to_vec()).collect();
    hnf(&ker)
}

/// Integer kernel of an integer matrix.
pub fn integer_kernel_int(a: &[IVec], n: usize) -> Vec<IVec> {
    let q: Vec<Vec<BigRational>> = a
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    integer_kernel(&q, n)
}

/// `ℤ^n ∩ span_Q(rows)`, in HNF.
pub fn saturate(rows: &[IVec], n: usize) -> Vec<IVec> {
    if rows.iter().all(|r| is_zero_row(r)) {
        return Vec::new();
    }
    let perp = integer_kernel_int(rows, n);
    if perp.is_empty() {
        return (0..n)
            .map(|j| (0..n).map(|k| if k == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
    }
    integer_kernel_int(&perp, n)
}

fn dot_q(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// Exact LLL reduction (δ = 99/100) of linearly independent integer rows.
pub fn lll(basis: &[IVec]) -> Vec<IVec> {
    let mut b: Vec<IVec> = basis.to_vec();
    let k_max = b.len();
    if k_max <= 1 {
        return b;
    }
    let delta = BigRational::new(BigInt::from(99), BigInt::from(100));
    let to_q = |v: &IVec| -> Vec<BigRational> { v.iter().map(|x| BigRational::from_integer(x.clone())).collect() };
    let gso = |b: &[IVec]| -> (Vec<Vec<BigRational>>, Vec<Vec<BigRational>>, Vec<BigRational>) {
        let n = b.len();
        let mut bs: Vec<Vec<BigRational>> = Vec::with_capacity(n);
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        let mut norms = Vec::with_capacity(n);
        for i in 0..n {
            let bi = to_q(&b[i]);
            let mut v = bi.clone();
            for j in 0..i {
                if norms[j] == BigRational::zero() {
                    continue;
                }
                let m = dot_q(&bi, &bs[j]) / &norms[j];
                for (x, y) in v.iter_mut().zip(&bs[j]) {
                    *x -= &m * y;
                }
                mu[i][j] = m;
            }
            norms.push(dot_q(&v, &v));
            bs.push(v);
        }
        (bs, mu, norms)
    };
    let (mut _bs, mut mu, mut norms) = gso(&b);
    let mut k = 1;
    let mut guard = 0usize;
    while k < k_max {
        guard += 1;
        if guard > 1_000_000 {
            break;
        }
        for j in (0..k).rev() {
            let q = mu[k][j].round().to_integer();
            if !q.is_zero() {
                let bj = b[j].clone();
                axpy(&mut b[k], &q, &bj);
                let qq = BigRational::from_integer(q);
                for l in 0..j {
                    let t = &qq * &mu[j][l];
                    mu[k][l] -= t;
                }
                mu[k][j] -= &qq;
            }
        }
        let lhs = &norms[k];
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            let r = gso(&b);
            _bs = r.0;
            mu = r.1;
            norms = r.2;
            k = (k - 1).max(1);
        }
    }
    b
}
