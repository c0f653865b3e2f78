#![allow(dead_code)]

pub mod checks;

use orbitreg::arith::{q_decompose, ConstantBasis, Matrix, SymbolicComplex};
use orbitreg::normal_form::{BackendConfig, FieldMarker, GroupSpec, TierPreference};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn basis(defs: &[(&str, &str)]) -> ConstantBasis {
    ConstantBasis::from_defs(defs).unwrap()
}

pub fn sqrt2_basis() -> ConstantBasis {
    basis(&[("sqrt2", "sqrt(2)"), ("pi", "pi")])
}

pub fn scalar(b: &ConstantBasis, s: &str) -> SymbolicComplex {
    q_decompose(s, b).unwrap()
}

pub fn vector(b: &ConstantBasis, s: &str) -> Vec<SymbolicComplex> {
    s.split(',').map(|x| scalar(b, x.trim())).collect()
}

/// Rows separated by `;`, entries by `,`.
pub fn matrix(b: &ConstantBasis, s: &str) -> Matrix<SymbolicComplex> {
    let rows: Vec<Vec<SymbolicComplex>> = s.split(';').map(|r| vector(b, r)).collect();
    let n = rows.len();
    Matrix::from_rows(rows, n)
}

pub fn spec(field: FieldMarker, b: &ConstantBasis, gens: &[&str], tier: TierPreference) -> GroupSpec {
    let gens = gens.iter().map(|g| matrix(b, g)).collect();
    GroupSpec::new(field, gens, b.clone(), BackendConfig { digits: 60, tau_log10: None, tier }).unwrap()
}

pub const SHEAR_PAIR_A: &str = "1,0,0,0; 0,1,0,0; 0,0,1,0; 1,0,0,1";
pub const SHEAR_PAIR_B: &str = "1,0,0,0; 0,1,0,0; 0,0,1,0; 0,1,0,1";

pub fn shear_pair(tier: TierPreference) -> GroupSpec {
    spec(FieldMarker::Real, &sqrt2_basis(), &[SHEAR_PAIR_A, SHEAR_PAIR_B], tier)
}

/// `λ·id` on ℝ with λ = 2.
pub fn scalar_two() -> GroupSpec {
    spec(FieldMarker::Real, &ConstantBasis::rational(), &["2"], TierPreference::ExactThenNumeric)
}

/// `⟨2, 3e^i⟩ ⊂ GL(1, ℂ)`.
pub fn dense_pair() -> GroupSpec {
    let b = basis(&[("c1", "cos(1)"), ("s1", "sin(1)")]);
    spec(FieldMarker::Complex, &b, &["2", "3*c1 + 3*s1 i"], TierPreference::ExactThenNumeric)
}

/// Named (spec, vector) pairs used across suites.
pub fn corpus() -> Vec<(&'static str, GroupSpec, Vec<SymbolicComplex>)> {
    let s6 = shear_pair(TierPreference::ExactThenNumeric);
    let b = s6.basis.clone();
    let two = scalar_two();
    let one = vector(&two.basis, "1");
    let dense = dense_pair();
    let du = vector(&dense.basis, "1");
    vec![
        ("shear_pair-rational", s6.clone(), vector(&b, "1, 1, 0, 0")),
        ("shear_pair-sqrt2", s6, vector(&b, "1, sqrt2, 0, 0")),
        ("scalar-two", two, one),
        ("dense-pair", dense, du),
    ]
}

fn small_int(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> i64 {
    rng.gen_range(lo..=hi)
}

/// `a + b·sqrt2` (real) with small integers, `b ≠ 0` a third of the time.
pub fn real_entry(rng: &mut ChaCha8Rng) -> String {
    let a = small_int(rng, -2, 2);
    let b = if rng.gen_bool(1.0 / 3.0) { small_int(rng, -1, 1) } else { 0 };
    format!("{a} {} {}*sqrt2", if b < 0 { "-" } else { "+" }, b.abs())
}

/// A nonzero diagonal value: Gaussian rational or involving sqrt2.
fn diagonal_value(rng: &mut ChaCha8Rng, real: bool) -> String {
    let reals = ["1", "2", "-1", "3", "1/2", "-2", "3/2", "sqrt2", "1 + sqrt2", "-1/2*sqrt2"];
    let complex = ["i", "1 + i", "2 - i", "-1/2 i", "1 + sqrt2 i", "3/5 + 4/5 i"];
    if real || rng.gen_bool(0.5) {
        reals[rng.gen_range(0..reals.len())].to_string()
    } else {
        complex[rng.gen_range(0..complex.len())].to_string()
    }
}

fn off_diagonal(rng: &mut ChaCha8Rng) -> String {
    ["0", "0", "1", "-1", "2", "1/2", "sqrt2"][rng.gen_range(0..7)].to_string()
}

/// Unimodular integer matrix (product of elementary operations) and its inverse.
fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let mut s: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let mut inv = s.clone();
    for _ in 0..n * 2 {
        if n < 2 {
            break;
        }
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        let k = small_int(rng, -1, 1);
        // S ← S·(I + k E_ij), S⁻¹ ← (I − k E_ij)·S⁻¹
        for row in s.iter_mut() {
            row[j] += k * row[i];
        }
        let ri = inv[j].clone();
        for (x, y) in inv[i].iter_mut().zip(&ri) {
            *x -= k * y;
        }
    }
    (s, inv)
}

/// Random commuting family `S·D_k·S⁻¹` with `D_k` block lower-triangular
/// Toeplitz (blocks commute), rendered as matrix strings.
pub struct RandomGroup {
    pub field: FieldMarker,
    pub gens: Vec<String>,
    pub n: usize,
}

pub fn random_group(rng: &mut ChaCha8Rng, max_n: usize, max_p: usize) -> RandomGroup {
    let n = rng.gen_range(1..=max_n);
    let p = rng.gen_range(1..=max_p);
    let real = rng.gen_bool(0.5);
    let field = if real { FieldMarker::Real } else { FieldMarker::Complex };
    // partition of n into blocks
    let mut eta = Vec::new();
    let mut left = n;
    while left > 0 {
        let k = rng.gen_range(1..=left);
        eta.push(k);
        left -= k;
    }
    let (s, s_inv) = unimodular(rng, n);
    let b = sqrt2_basis();
    let mut gens = Vec::new();
    for _ in 0..p {
        // D as symbolic entries
        let mut d = vec![vec![scalar(&b, "0"); n]; n];
        let mut start = 0;
        for &k in &eta {
            let diag = diagonal_value(rng, real);
            let sub: Vec<String> = (1..k).map(|_| off_diagonal(rng)).collect();
            for i in 0..k {
                d[start + i][start + i] = scalar(&b, &diag);
                for j in 0..i {
                    d[start + i][start + j] = scalar(&b, &sub[i - j - 1]);
                }
            }
            start += k;
        }
        // S D S⁻¹ with integer S: only rational scalings of span elements
        let mut out = vec![vec![scalar(&b, "0"); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = scalar(&b, "0");
                for a in 0..n {
                    for c in 0..n {
                        let k = s[i][a] * s_inv[c][j];
                        if k != 0 {
                            acc = acc.add(&d[a][c].mul(&scalar(&b, &k.to_string())).unwrap());
                        }
                    }
                }
                out[i][j] = acc;
            }
        }
        let rows: Vec<String> = out
            .iter()
            .map(|r| r.iter().map(|x| orbitreg::arith::format_scalar(x, &b)).collect::<Vec<_>>().join(", "))
            .collect();
        gens.push(rows.join("; "));
    }
    RandomGroup { field, gens, n }
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize, real: bool) -> String {
    (0..n)
        .map(|_| {
            let e = real_entry(rng);
            if real || rng.gen_bool(0.6) {
                e
            } else {
                let im = small_int(rng, -2, 2);
                format!("{e} {} {} i", if im < 0 { "-" } else { "+" }, im.abs())
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Brute-force closure dimension of `ℤv_1 + … + ℤv_p ⊂ ℝ^d`.
///
/// A maximal independent subfamily `B` spans the same space; every group
/// element is `Σ t_k e_k + B s` with `e_k` the remaining generators. For each
/// excess coefficient vector `|t| ≤ S` the nearby points of the coset are found
/// by rounding onto `B` (plus a ±2 neighborhood). If the shortest such point
/// keeps shrinking between a small and a large `S`, it lies in the closure's
/// subspace; the generators are projected off its direction and the search
/// repeats on the quotient.
pub fn oracle_closure_dim(vs: &[Vec<f64>]) -> usize {
    closure_dim_above(vs, 0.0)
}

/// Points shorter than `floor` are treated as rounding noise from earlier projections.
fn closure_dim_above(vs: &[Vec<f64>], floor: f64) -> usize {
    let d = vs.first().map_or(0, Vec::len);
    if vs.is_empty() || d == 0 {
        return 0;
    }
    let scale = vs.iter().map(|v| norm(v)).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    let (mut basis, mut excess) = (Vec::new(), Vec::new());
    for v in vs {
        let r = residual(v, &ortho);
        let n = norm(&r);
        if n > 1e-9 * scale {
            ortho.push(r.iter().map(|x| x / n).collect());
            basis.push(v.clone());
        } else if norm(v) > 1e-9 * scale {
            excess.push(v.clone());
        }
    }
    if excess.is_empty() {
        return 0;
    }
    let (small, large) = match excess.len() {
        1 => (64, 4096),
        2 => (16, 256),
        _ => (8, 32),
    };
    let floor = floor.max(1e-8 * scale);
    let (Some((a, xa)), Some((b, xb))) =
        (shortest(&basis, &excess, small, floor), shortest(&basis, &excess, large, floor))
    else {
        return 0;
    };
    if b >= 0.5 * a {
        return 0;
    }
    // A short-coefficient vector on the same line gives a far more accurate direction.
    let cos = xa.iter().zip(&xb).map(|(p, q)| p * q).sum::<f64>() / (a * b);
    let (x, len, bound) = if cos.abs() > 1.0 - 1e-12 { (xa, a, small) } else { (xb, b, large) };
    let dir: Vec<f64> = x.iter().map(|y| y / len).collect();
    let dir_err = 1e-16 * bound as f64 * scale * vs.len() as f64 / len;
    let projected: Vec<Vec<f64>> = vs.iter().map(|v| residual(v, std::slice::from_ref(&dir))).collect();
    1 + closure_dim_above(&projected, floor.max(40.0 * dir_err * 4096.0 * scale))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Component of `v` orthogonal to the orthonormal `basis`.
fn residual(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut r = v.to_vec();
    for b in basis {
        let c: f64 = r.iter().zip(b).map(|(x, y)| x * y).sum();
        for (x, y) in r.iter_mut().zip(b) {
            *x -= c * y;
        }
    }
    r
}

/// Solves the normal equations `G c = Bᵀ y` (tiny systems, Gaussian elimination).
fn coords(basis: &[Vec<f64>], gram_inv: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let bt: Vec<f64> = basis.iter().map(|b| b.iter().zip(y).map(|(p, q)| p * q).sum()).collect();
    gram_inv.iter().map(|row| row.iter().zip(&bt).map(|(p, q)| p * q).sum()).collect()
}

fn invert(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| r.iter().cloned().chain((0..k).map(|j| (i == j) as i64 as f64)).collect())
        .collect();
    for c in 0..k {
        let piv = (c..k).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        a.swap(c, piv);
        let pv = a[c][c];
        for x in a[c].iter_mut() {
            *x /= pv;
        }
        for r in 0..k {
            if r != c {
                let f = a[r][c];
                let rc = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(&rc) {
                    *x -= f * y;
                }
            }
        }
    }
    a.into_iter().map(|r| r[k..].to_vec()).collect()
}

/// Visits every integer vector in `[-bound, bound]^len`.
fn for_each_box(len: usize, bound: i64, mut f: impl FnMut(&[i64])) {
    let mut t = vec![-bound; len];
    loop {
        f(&t);
        let mut pos = 0;
        while pos < len {
            t[pos] += 1;
            if t[pos] <= bound {
                break;
            }
            t[pos] = -bound;
            pos += 1;
        }
        if pos == len {
            return;
        }
    }
}

/// Shortest nonzero group element reachable with excess coefficients `|t| ≤ bound`.
fn shortest(basis: &[Vec<f64>], excess: &[Vec<f64>], bound: i64, zero_tol: f64) -> Option<(f64, Vec<f64>)> {
    use rayon::prelude::*;
    let d = basis[0].len();
    let k = basis.len();
    let gram: Vec<Vec<f64>> =
        basis.iter().map(|a| basis.iter().map(|b| a.iter().zip(b).map(|(p, q)| p * q).sum()).collect()).collect();
    let gram_inv = invert(&gram);
    (-bound..=bound)
        .into_par_iter()
        .filter_map(|first| {
            let mut best: Option<(f64, Vec<f64>)> = None;
            let mut x = vec![0.0; d];
            for_each_box(excess.len() - 1, bound, |rest| {
                let mut y = vec![0.0; d];
                for (c, e) in std::iter::once(&first).chain(rest).zip(excess) {
                    for (yi, ei) in y.iter_mut().zip(e) {
                        *yi += *c as f64 * ei;
                    }
                }
                let c = coords(basis, &gram_inv, &y);
                for_each_box(k, 2, |off| {
                    x.copy_from_slice(&y);
                    for ((ci, o), b) in c.iter().zip(off).zip(basis) {
                        let s = -ci.round() + *o as f64;
                        if s != 0.0 {
                            for (xi, bi) in x.iter_mut().zip(b) {
                                *xi += s * bi;
                            }
                        }
                    }
                    let nx = norm(&x);
                    if nx > zero_tol && best.as_ref().map_or(true, |(b, _)| nx < *b) {
                        best = Some((nx, x.clone()));
                    }
                });
            });
            best
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
}

/// Writes `contents` to a per-process temporary file.
pub fn temp_input(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("orbitreg-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}
