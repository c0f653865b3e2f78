//! Univariate polynomials: coefficients stored low degree first.

use num_bigint::BigInt;
use num_traits::One;

use super::complex::FloatComplex;
use super::float::Float;
use super::gauss::GaussRat;

pub fn eval_float(p: &[FloatComplex], x: &FloatComplex) -> FloatComplex {
    let mut acc = FloatComplex::zero(x.prec());
    for c in p.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

fn derivative_float(p: &[FloatComplex]) -> Vec<FloatComplex> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.scale(&Float::from_i64(k as i64, c.prec())))
        .collect()
}

/// `|p(x)|` is within rounding noise of the evaluation.
fn at_noise_level(p: &[FloatComplex], x: &FloatComplex, px: &FloatComplex, prec: u32) -> bool {
    let ax = x.max_abs();
    let mut bound = Float::zero(prec);
    for c in p.iter().rev() {
        bound = bound.mul(&ax).add(&c.max_abs());
    }
    match (px.max_abs().ilog2(), bound.ilog2()) {
        (Some(v), Some(b)) => v < b - (prec as i64 - 24),
        _ => true,
    }
}

/// Sharpens the centre `x` of a cluster of `m` roots.
///
/// Iterates on `x` to a multiple root, which is only determined to about
/// `ε^(1/m)`; the `(m-1)`-th derivative has a simple root there, so Newton on
/// it recovers the full precision. The original centre is kept if the iteration
/// wanders away from it.
pub fn refine_multiple_root(p: &[FloatComplex], x: &FloatComplex, m: usize, prec: u32) -> FloatComplex {
    if m < 2 {
        return x.clone();
    }
    let mut q: Vec<FloatComplex> = p.iter().map(|c| c.with_prec(prec)).collect();
    for _ in 1..m {
        q = derivative_float(&q);
    }
    let dq = derivative_float(&q);
    let start = x.with_prec(prec);
    let mut z = start.clone();
    for _ in 0..4 * prec as usize {
        let d = eval_float(&dq, &z);
        if d.is_zero() {
            break;
        }
        let step = eval_float(&q, &z).div(&d);
        z = z.sub(&step);
        let scale = z.max_abs().ilog2().unwrap_or(0).max(0);
        match step.max_abs().ilog2() {
            Some(e) if e - scale >= -(prec as i64 - 8) => {}
            _ => break,
        }
    }
    let moved = z.sub(&start).max_abs().log10_abs();
    let spread = start.max_abs().log10_abs().max(0.0) - (prec as f64 * std::f64::consts::LOG10_2) / (2.0 * m as f64) + 2.0;
    if moved.is_finite() && moved > spread {
        start
    } else {
        z
    }
}

/// All roots of a monic polynomial by Aberth–Ehrlich iteration at `prec` bits.
pub fn aberth(p: &[FloatComplex], prec: u32) -> Vec<FloatComplex> {
    let n = p.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let p: Vec<FloatComplex> = p.iter().map(|c| c.with_prec(prec)).collect();
    if n == 1 {
        return vec![p[0].neg()];
    }
    let dp = derivative_float(&p);
    // Cauchy bound for the starting circle, centred at the root mean.
    let center = p[n - 1].neg().scale(&Float::one(prec).div_i64(n as i64));
    let bound = p[..n]
        .iter()
        .map(|c| c.to_c64().norm())
        .fold(0.0f64, f64::max)
        + 1.0;
    let radius = bound.clamp(1e-3, 1e300);
    let mut z: Vec<FloatComplex> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            center.add(&FloatComplex::from_f64(radius * ang.cos(), radius * ang.sin(), prec))
        })
        .collect();
    let stop = -(prec as i64 - 12);
    let mut settled = 0;
    for _ in 0..(200 + 60 * prec as usize) {
        let mut worst = i64::MIN;
        for k in 0..n {
            let pv = eval_float(&p, &z[k]);
            if pv.is_zero() || at_noise_level(&p, &z[k], &pv, prec) {
                continue;
            }
            let ratio = pv.div(&eval_float(&dp, &z[k]));
            let mut sum = FloatComplex::zero(prec);
            for j in 0..n {
                if j != k {
                    let d = z[k].sub(&z[j]);
                    if !d.is_zero() {
                        sum = sum.add(&d.inv());
                    }
                }
            }
            let denom = FloatComplex::one(prec).sub(&ratio.mul(&sum));
            let step = if denom.is_zero() { ratio } else { ratio.div(&denom) };
            z[k] = z[k].sub(&step);
            let scale = z[k].max_abs().ilog2().unwrap_or(0).max(0);
            let size = step.max_abs().ilog2().map(|e| e - scale).unwrap_or(i64::MIN);
            worst = worst.max(size);
        }
        if worst == i64::MIN {
            break;
        }
        if worst < stop {
            settled += 1;
            if settled >= 2 {
                break;
            }
        } else {
            settled = 0;
        }
    }
    z
}

pub fn trim_gauss(p: &mut Vec<GaussRat>) {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
}

pub fn eval_gauss(p: &[GaussRat], x: &GaussRat) -> GaussRat {
    let mut acc = GaussRat::zero();
    for c in p.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

/// Quotient and remainder of `a / b`, `b` nonzero.
pub fn divrem_gauss(a: &[GaussRat], b: &[GaussRat]) -> (Vec<GaussRat>, Vec<GaussRat>) {
    let mut r = a.to_vec();
    trim_gauss(&mut r);
    let mut b = b.to_vec();
    trim_gauss(&mut b);
    let db = b.len() - 1;
    let lead_inv = b[db].inv().expect("zero divisor polynomial");
    if r.len() < b.len() {
        return (vec![GaussRat::zero()], r);
    }
    let mut q = vec![GaussRat::zero(); r.len() - db];
    while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
        let shift = r.len() - 1 - db;
        let c = r.last().unwrap().mul(&lead_inv);
        for (k, bk) in b.iter().enumerate() {
            r[shift + k] = r[shift + k].sub(&c.mul(bk));
        }
        q[shift] = c;
        r.pop();
        trim_gauss(&mut r);
        if r.is_empty() {
            r.push(GaussRat::zero());
        }
    }
    (q, r)
}

pub fn derivative_gauss(p: &[GaussRat]) -> Vec<GaussRat> {
    let d: Vec<GaussRat> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.mul(&GaussRat::from_int(k as i64)))
        .collect();
    if d.is_empty() {
        vec![GaussRat::zero()]
    } else {
        d
    }
}

fn is_zero_poly(p: &[GaussRat]) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn monic(p: &[GaussRat]) -> Vec<GaussRat> {
    let inv = p.last().unwrap().inv().unwrap();
    p.iter().map(|c| c.mul(&inv)).collect()
}

pub fn gcd_gauss(a: &[GaussRat], b: &[GaussRat]) -> Vec<GaussRat> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    trim_gauss(&mut a);
    trim_gauss(&mut b);
    while !is_zero_poly(&b) {
        let (_, r) = divrem_gauss(&a, &b);
        a = b;
        b = r;
    }
    monic(&a)
}

/// Exact roots with multiplicities when `p` splits over Q(i); `None` otherwise.
///
/// Candidate roots come from the square-free part by numeric iteration and are
/// confirmed by exact evaluation.
pub fn split_gauss(p: &[GaussRat], prec: u32) -> Option<Vec<(GaussRat, usize)>> {
    let mut p = p.to_vec();
    trim_gauss(&mut p);
    let deg = p.len() - 1;
    if deg == 0 {
        return Some(Vec::new());
    }
    let g = gcd_gauss(&p, &derivative_gauss(&p));
    let (sqf, _) = divrem_gauss(&p, &g);
    let sqf = monic(&sqf);
    let coeffs: Vec<FloatComplex> = sqf.iter().map(|c| c.to_float(prec)).collect();
    let approx = aberth(&coeffs, prec);
    let max_den = BigInt::one() << (prec / 3).max(40);
    let mut roots = Vec::new();
    for z in &approx {
        let cand = GaussRat::approximate(z, &max_den);
        if !eval_gauss(&sqf, &cand).is_zero() {
            return None;
        }
        if roots.iter().any(|(r, _): &(GaussRat, usize)| *r == cand) {
            return None;
        }
        // multiplicity in p
        let lin = vec![cand.neg(), GaussRat::one()];
        let mut rest = p.clone();
        let mut mult = 0;
        loop {
            let (q, r) = divrem_gauss(&rest, &lin);
            if !is_zero_poly(&r) {
                break;
            }
            rest = q;
            mult += 1;
        }
        roots.push((cand, mult));
    }
    if roots.iter().map(|(_, m)| m).sum::<usize>() != deg {
        return None;
    }
    Some(roots)
}

/// Groups roots whose distance is below `10^tol_log10` times `max(1, max |root|)`.
///
/// Returns cluster means with sizes, or `Err` with the closest inter-cluster
/// distance when clusters are closer than ten tolerances.
pub fn cluster_roots(
    roots: &[FloatComplex],
    tol_log10: f64,
) -> std::result::Result<Vec<(FloatComplex, usize)>, String> {
    let n = roots.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let prec = roots[0].prec();
    let scale = roots
        .iter()
        .map(|r| r.max_abs().log10_abs())
        .fold(0.0f64, f64::max);
    let close = |a: &FloatComplex, b: &FloatComplex, slack: f64| {
        let d = a.sub(b).max_abs();
        d.is_zero() || d.log10_abs() < tol_log10 + scale + slack
    };
    // union-find by single linkage
    let mut label: Vec<usize> = (0..n).collect();
    fn find(l: &mut [usize], k: usize) -> usize {
        let mut k = k;
        while l[k] != k {
            l[k] = l[l[k]];
            k = l[k];
        }
        k
    }
    for a in 0..n {
        for b in a + 1..n {
            if close(&roots[a], &roots[b], 0.0) {
                let (ra, rb) = (find(&mut label, a), find(&mut label, b));
                label[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for k in 0..n {
        let r = find(&mut label, k);
        match groups.iter_mut().find(|(g, _)| *g == r) {
            Some((_, members)) => members.push(k),
            None => groups.push((r, vec![k])),
        }
    }
    for (i, (_, ga)) in groups.iter().enumerate() {
        for (_, gb) in groups.iter().skip(i + 1) {
            for &a in ga {
                for &b in gb {
                    if close(&roots[a], &roots[b], 1.0) {
                        return Err(format!(
                            "roots {} and {} are within ten tolerances",
                            roots[a].to_decimal(12),
                            roots[b].to_decimal(12)
                        ));
                    }
                }
            }
        }
    }
    Ok(groups
        .into_iter()
        .map(|(_, members)| {
            let mut sum = FloatComplex::zero(prec);
            for &k in &members {
                sum = sum.add(&roots[k]);
            }
            let m = members.len();
            (sum.scale(&Float::one(prec).div_i64(m as i64)), m)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::float::bits_for_digits;
    use crate::arith::gauss::rat;

    fn g(re: i64, im: i64) -> GaussRat {
        GaussRat::new(rat(re, 1), rat(im, 1))
    }

    fn expand(roots: &[GaussRat]) -> Vec<GaussRat> {
        let mut p = vec![GaussRat::one()];
        for r in roots {
            let mut next = vec![GaussRat::zero(); p.len() + 1];
            for (k, c) in p.iter().enumerate() {
                next[k + 1] = next[k + 1].add(c);
                next[k] = next[k].sub(&c.mul(r));
            }
            p = next;
        }
        p
    }

    #[test]
    fn refines_clustered_roots() {
        let prec = bits_for_digits(140);
        let p: Vec<FloatComplex> = expand(&[g(1, 0), g(1, 0), g(1, 0), g(-2, 1)])
            .iter()
            .map(|c| c.to_float(prec))
            .collect();
        let approx = aberth(&p, prec);
        let clusters = cluster_roots(&approx, -30.0).unwrap();
        let (x, m) = clusters.iter().find(|(_, m)| *m == 3).unwrap();
        let err = |y: &FloatComplex| y.sub(&FloatComplex::one(prec)).max_abs().log10_abs();
        assert!(err(x) > -130.0, "cluster mean unexpectedly sharp");
        assert!(err(&refine_multiple_root(&p, x, *m, prec)) < -130.0);
    }

    #[test]
    fn splits_with_multiplicity() {
        let half = GaussRat::new(rat(1, 2), rat(-3, 1));
        let p = expand(&[g(1, 0), g(1, 0), g(1, 0), half.clone(), g(0, 1)]);
        let mut roots = split_gauss(&p, bits_for_digits(60)).unwrap();
        roots.sort_by_key(|(_, m)| *m);
        assert_eq!(roots.len(), 3);
        assert_eq!(roots[2], (g(1, 0), 3));
        assert!(roots.iter().any(|(r, m)| *r == half && *m == 1));
    }

    #[test]
    fn irreducible_quadratic_does_not_split() {
        // x^2 - 2
        let p = vec![g(-2, 0), g(0, 0), g(1, 0)];
        assert!(split_gauss(&p, bits_for_digits(60)).is_none());
        // x^2 + 1 splits as ±i
        let p = vec![g(1, 0), g(0, 0), g(1, 0)];
        assert_eq!(split_gauss(&p, bits_for_digits(60)).unwrap().len(), 2);
    }

    #[test]
    fn clusters_a_perturbed_double_root() {
        let prec = bits_for_digits(140);
        // (x-2)^2 (x+1) evaluated in floats
        let p: Vec<FloatComplex> = expand(&[g(2, 0), g(2, 0), g(-1, 0)])
            .iter()
            .map(|c| c.to_float(prec))
            .collect();
        let roots = aberth(&p, prec);
        let clusters = cluster_roots(&roots, -30.0).unwrap();
        assert_eq!(clusters.len(), 2);
        let two = clusters.iter().find(|(_, m)| *m == 2).unwrap();
        let err = two.0.sub(&FloatComplex::from_f64(2.0, 0.0, prec)).abs();
        assert!(err.is_zero() || err.log10_abs() < -60.0);
    }

    #[test]
    fn near_collision_is_reported() {
        let prec = bits_for_digits(80);
        let eps = Float::pow10(-40, prec).mul_i64(5);
        let a = FloatComplex::one(prec);
        let b = FloatComplex::real(Float::one(prec).add(&eps));
        assert!(cluster_roots(&[a, b], -40.0).is_err());
    }
}
