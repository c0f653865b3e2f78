//! Empirical cross-check: enumerate orbit points by exponent vectors and
//! estimate the local dimension by box counting.

use std::collections::HashSet;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::arith::field::{Field, NumericField};
use crate::arith::linalg::{identity, inverse, mat_mul, mat_vec, Matrix};
use crate::arith::symbolic::SymbolicComplex;
use crate::arith::{bits_for_digits, FloatComplex};
use crate::error::{Error, Result};
use crate::normal_form::GroupSpec;
use crate::orbit_engine::OrbitReport;

/// Points needed inside the largest box-counting scale.
pub const MIN_WINDOW_POINTS: usize = 100;
pub const DEFAULT_SCALES: usize = 8;

/// Powers `A_k^j`, `|j| ≤ L`, by repeated multiplication.
#[derive(Clone, Debug)]
pub struct WordCache {
    pub field: NumericField,
    pub bound: usize,
    /// `powers[k][j + L] = A_k^j`
    powers: Vec<Vec<Matrix<FloatComplex>>>,
}

impl WordCache {
    pub fn new(spec: &GroupSpec, bound: usize) -> Result<Self> {
        let digits = spec.config.digits;
        let field = NumericField::from_bits(digits, bits_for_digits(digits + 10));
        let vals = spec.basis.values(field.prec() + 16);
        let mut powers = Vec::with_capacity(spec.p());
        for g in &spec.generators {
            let a = g.map(|x| x.eval(&vals).with_prec(field.prec()));
            let a_inv = inverse(&field, &a)?;
            let mut pos = vec![identity(&field, spec.n)];
            let mut neg = vec![identity(&field, spec.n)];
            for _ in 0..bound {
                pos.push(mat_mul(&field, pos.last().unwrap(), &a)?);
                neg.push(mat_mul(&field, neg.last().unwrap(), &a_inv)?);
            }
            let mut row: Vec<Matrix<FloatComplex>> = neg.into_iter().skip(1).rev().collect();
            row.extend(pos);
            powers.push(row);
        }
        Ok(WordCache { field, bound, powers })
    }

    pub fn power(&self, k: usize, j: i64) -> &Matrix<FloatComplex> {
        &self.powers[k][(j + self.bound as i64) as usize]
    }

    /// `A_1^{w_1} ⋯ A_p^{w_p} v`.
    pub fn apply(&self, word: &[i64], v: &[FloatComplex]) -> Result<Vec<FloatComplex>> {
        let mut out = v.to_vec();
        for (k, &j) in word.iter().enumerate().rev() {
            out = mat_vec(&self.field, self.power(k, j), &out)?;
        }
        Ok(out)
    }

    pub fn apply_inverse(&self, word: &[i64], v: &[FloatComplex]) -> Result<Vec<FloatComplex>> {
        let inv: Vec<i64> = word.iter().map(|j| -j).collect();
        self.apply(&inv, v)
    }
}

#[derive(Clone, Debug)]
pub struct OrbitCloud {
    pub n: usize,
    pub center: Vec<FloatComplex>,
    pub points: Vec<Vec<FloatComplex>>,
    /// Exponent vector of each kept point.
    pub words: Vec<Vec<i64>>,
    pub bound: usize,
    pub radius: f64,
    pub attempted: usize,
    pub discarded: usize,
}

pub(crate) fn norm_f64(v: &[FloatComplex]) -> f64 {
    v.iter().map(|z| z.norm_sqr().to_f64()).sum::<f64>().sqrt()
}

/// `‖u‖ · 10^6`.
pub fn default_radius(u_norm: f64) -> f64 {
    u_norm * 1e6
}

/// All words with `|m_k| ≤ L`, in lexicographic exponent order.
pub fn enumerate_orbit(spec: &GroupSpec, u: &[SymbolicComplex], bound: usize, radius: f64) -> Result<OrbitCloud> {
    if bound == 0 {
        return Err(Error::InvalidArgument("word bound L must be at least 1".into()));
    }
    if u.len() != spec.n {
        return Err(Error::Dimension(format!("vector has length {}, expected {}", u.len(), spec.n)));
    }
    let cache = WordCache::new(spec, bound)?;
    let vals = spec.basis.values(cache.field.prec() + 16);
    let center: Vec<FloatComplex> = u.iter().map(|x| x.eval(&vals).with_prec(cache.field.prec())).collect();
    enumerate_with(&cache, &center, radius)
}

pub fn enumerate_with(cache: &WordCache, center: &[FloatComplex], radius: f64) -> Result<OrbitCloud> {
    let u_norm = norm_f64(center);
    if !(radius > u_norm) {
        return Err(Error::InvalidArgument(format!("guard radius {radius} must exceed |u| = {u_norm}")));
    }
    let p = cache.powers.len();
    let l = cache.bound as i64;
    let f = &cache.field;
    // build from the last generator outwards: level k holds A_k^{..} ⋯ A_p^{..} u
    let mut level: Vec<(Vec<i64>, Vec<FloatComplex>)> = vec![(Vec::new(), center.to_vec())];
    for k in (0..p).rev() {
        let next: Result<Vec<Vec<(Vec<i64>, Vec<FloatComplex>)>>> = (-l..=l)
            .into_par_iter()
            .map(|j| {
                level
                    .iter()
                    .map(|(w, v)| {
                        let mut word = Vec::with_capacity(w.len() + 1);
                        word.push(j);
                        word.extend_from_slice(w);
                        Ok((word, mat_vec(f, cache.power(k, j), v)?))
                    })
                    .collect()
            })
            .collect();
        level = next?.into_iter().flatten().collect();
    }
    let attempted = level.len();
    let (mut words, mut points) = (Vec::new(), Vec::new());
    let mut discarded = 0;
    for (w, v) in level {
        let nv = norm_f64(&v);
        if nv.is_finite() && nv <= radius {
            words.push(w);
            points.push(v);
        } else {
            discarded += 1;
        }
    }
    Ok(OrbitCloud {
        n: center.len(),
        center: center.to_vec(),
        points,
        words,
        bound: cache.bound,
        radius,
        attempted,
        discarded,
    })
}

/// `(Re z_1, .., Re z_n, Im z_1, .., Im z_n)` in f64.
pub fn theta_f64(v: &[FloatComplex]) -> Vec<f64> {
    v.iter().map(|z| z.re.to_f64()).chain(v.iter().map(|z| z.im.to_f64())).collect()
}

impl OrbitCloud {
    pub fn theta_points(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| theta_f64(p)).collect()
    }

    /// Smallest point norm relative to `‖u‖`.
    pub fn min_relative_norm(&self) -> f64 {
        let un = norm_f64(&self.center);
        self.points.iter().map(|p| norm_f64(p) / un).fold(f64::INFINITY, f64::min)
    }

    /// Plain-text export: header, then one point per line (θ coordinates).
    pub fn write_to(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "# n={} L={} discarded={}", self.n, self.bound, self.discarded)?;
        for p in &self.points {
            let coords: Vec<String> = theta_f64(p).iter().map(|x| format!("{x:e}")).collect();
            writeln!(out, "{}", coords.join(" "))?;
        }
        Ok(())
    }
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Halving ladder starting at `max(‖u‖/4, distance to the 100th nearest point)`.
pub fn default_ladder(points: &[Vec<f64>], center: &[f64]) -> Result<Vec<f64>> {
    if points.len() < MIN_WINDOW_POINTS {
        return Err(Error::InsufficientPoints { found: points.len(), needed: MIN_WINDOW_POINTS });
    }
    let mut d: Vec<f64> = points.iter().map(|p| sup_dist(p, center)).collect();
    d.sort_by(|a, b| a.total_cmp(b));
    let u_norm = center.iter().map(|x| x * x).sum::<f64>().sqrt();
    // nudge up so the 100th point lies inside the closed window
    let r0 = (u_norm / 4.0).max(d[MIN_WINDOW_POINTS - 1]) * (1.0 + 1e-9);
    Ok((0..DEFAULT_SCALES).map(|j| r0 / f64::powi(2.0, j as i32)).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoxEstimate {
    pub estimate: f64,
    /// RMS deviation of the fit in log space.
    pub residual: f64,
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    /// Scales actually fitted (prefix of `scales`).
    pub fitted: usize,
    pub window_points: usize,
}

/// Least-squares slope of `log N(s)` against `log(1/s)`.
///
/// Points are restricted to the sup-norm window of half-width `scales[0]`
/// around `center`; the grid is anchored at the window corner. Scales at
/// which the count exceeds a quarter of the window population are dropped as
/// under-sampled (the coarsest three are always kept).
pub fn box_dimension(points: &[Vec<f64>], center: &[f64], scales: &[f64]) -> Result<BoxEstimate> {
    if scales.len() < 2 {
        return Err(Error::InvalidArgument("box counting needs at least two scales".into()));
    }
    let r0 = scales[0];
    let window: Vec<&Vec<f64>> = points.iter().filter(|p| sup_dist(p, center) <= r0).collect();
    if window.len() < MIN_WINDOW_POINTS {
        return Err(Error::InsufficientPoints { found: window.len(), needed: MIN_WINDOW_POINTS });
    }
    let counts: Vec<usize> = scales
        .par_iter()
        .map(|&s| {
            window
                .iter()
                .map(|p| p.iter().zip(center).map(|(x, c)| ((x - c + r0) / s).floor() as i64).collect::<Vec<_>>())
                .collect::<HashSet<_>>()
                .len()
        })
        .collect();
    let limit = window.len() as f64 / 4.0;
    let mut fitted = counts.iter().take_while(|&&c| c as f64 <= limit).count();
    fitted = fitted.max(3.min(scales.len()));
    let xs: Vec<f64> = scales[..fitted].iter().map(|s| (1.0 / s).ln()).collect();
    let ys: Vec<f64> = counts[..fitted].iter().map(|&c| (c as f64).ln()).collect();
    let (slope, residual) = least_squares(&xs, &ys);
    Ok(BoxEstimate { estimate: slope, residual, scales: scales.to_vec(), counts, fitted, window_points: window.len() })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let rms = (xs.iter().zip(ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum::<f64>() / k).sqrt();
    (slope, rms)
}

/// Box-dimension estimate of a cloud with the default ladder.
pub fn cloud_dimension(cloud: &OrbitCloud) -> Result<BoxEstimate> {
    let pts = cloud.theta_points();
    let c = theta_f64(&cloud.center);
    let scales = default_ladder(&pts, &c)?;
    box_dimension(&pts, &c, &scales)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleDiagnostic {
    pub analytic: usize,
    pub estimate: BoxEstimate,
    pub consistent: bool,
}

impl OracleDiagnostic {
    pub fn verdict(&self) -> &'static str {
        if self.consistent {
            "consistent"
        } else {
            "inconsistent"
        }
    }
}

/// Compares the analytic order with the empirical estimate (never overrides it).
pub fn oracle_compare(report: &OrbitReport, cloud: &OrbitCloud) -> Result<OracleDiagnostic> {
    Ok(compare_order(report.m, cloud_dimension(cloud)?))
}

pub fn compare_order(m: usize, estimate: BoxEstimate) -> OracleDiagnostic {
    let consistent = (estimate.estimate - m as f64).abs() <= 0.5;
    OracleDiagnostic { analytic: m, estimate, consistent }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse::q_decompose;
    use crate::arith::symbolic::ConstantBasis;
    use crate::normal_form::{BackendConfig, FieldMarker};

    fn spec(gens: &[&[&str]]) -> GroupSpec {
        let b = ConstantBasis::from_defs(&[("sqrt2", "sqrt(2)")]).unwrap();
        let gens = gens
            .iter()
            .map(|g| {
                let rows: Vec<Vec<SymbolicComplex>> =
                    g.iter().map(|r| r.split(',').map(|s| q_decompose(s, &b).unwrap()).collect()).collect();
                let n = rows.len();
                Matrix::from_rows(rows, n)
            })
            .collect();
        GroupSpec::new(FieldMarker::Real, gens, b, BackendConfig::default()).unwrap()
    }

    fn vector(s: &GroupSpec, v: &str) -> Vec<SymbolicComplex> {
        v.split(',').map(|x| q_decompose(x, &s.basis).unwrap()).collect()
    }

    #[test]
    fn counts_words() {
        let s = spec(&[&["1,0", "1,1"], &["1,0", "2,1"]]);
        let c = enumerate_orbit(&s, &vector(&s, "1,0"), 3, 1e6).unwrap();
        assert_eq!(c.attempted, 49);
        assert_eq!(c.points.len() + c.discarded, 49);
    }

    #[test]
    fn powers_of_two() {
        let s = spec(&[&["2"]]);
        let c = enumerate_orbit(&s, &vector(&s, "1"), 5, 1e6).unwrap();
        let mut xs: Vec<f64> = c.points.iter().map(|p| p[0].re.to_f64()).collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        let expect: Vec<f64> = (-5..=5).map(|j| f64::powi(2.0, j)).collect();
        assert_eq!(xs, expect);
        // tight guard drops the large powers
        let c = enumerate_orbit(&s, &vector(&s, "1"), 5, 10.0).unwrap();
        assert_eq!((c.points.len(), c.discarded), (9, 2));
    }

    #[test]
    fn shear_pair_cloud_lies_on_the_line() {
        let s = spec(&[&["1,0,0,0", "0,1,0,0", "0,0,1,0", "1,0,0,1"], &["1,0,0,0", "0,1,0,0", "0,0,1,0", "0,1,0,1"]]);
        let c = enumerate_orbit(&s, &vector(&s, "1,sqrt2,0,0"), 20, 1e9).unwrap();
        let r2 = std::f64::consts::SQRT_2;
        for (w, p) in c.words.iter().zip(&c.points) {
            let t = theta_f64(p);
            assert_eq!(&t[..3], &[1.0, r2, 0.0]);
            assert!((t[3] - (w[0] as f64 + w[1] as f64 * r2)).abs() < 1e-12);
        }
    }

    #[test]
    fn word_inverse_recovers_center() {
        let s = spec(&[&["2,1", "1,1"]]);
        let cache = WordCache::new(&s, 6).unwrap();
        let u = vec![FloatComplex::from_f64(1.0, 0.0, cache.field.prec()), FloatComplex::from_f64(-3.0, 0.0, cache.field.prec())];
        let cloud = enumerate_with(&cache, &u, 1e12).unwrap();
        for (w, p) in cloud.words.iter().zip(&cloud.points) {
            let back = cache.apply_inverse(w, p).unwrap();
            let err: Vec<FloatComplex> = back.iter().zip(&u).map(|(a, b)| a.sub(b)).collect();
            assert!(norm_f64(&err) < 1e-45 * norm_f64(&u));
        }
    }

    fn grid(dim: usize, half: i64, h: f64) -> Vec<Vec<f64>> {
        let mut out = vec![vec![]];
        for _ in 0..dim {
            out = out
                .into_iter()
                .flat_map(|p: Vec<f64>| {
                    (-half..=half).map(move |k| {
                        let mut q = p.clone();
                        // off the box edges
                        q.push((k as f64 + 0.5) * h);
                        q
                    })
                })
                .collect();
        }
        // pad to the plane so all grids live in ℝ^2
        out.into_iter().map(|mut p| {
            p.resize(2, 0.0);
            p
        }).collect()
    }

    #[test]
    fn synthetic_grids() {
        // fine grid: dimension j at scales well above the spacing
        for (dim, half, h) in [(1usize, 4000i64, 1.0 / 2000.0), (2, 200, 1.0 / 100.0)] {
            let pts = grid(dim, half, h);
            let scales: Vec<f64> = (0..6).map(|j| 1.0 / f64::powi(2.0, j)).collect();
            let e = box_dimension(&pts, &[0.0, 0.0], &scales).unwrap();
            assert!((e.estimate - dim as f64).abs() <= 0.2, "dim {dim}: {e:?}");
        }
        // lattice ℤ² seen below its spacing: only the center box
        let mut pts = grid(2, 3, 1.0);
        pts.extend(std::iter::repeat(vec![0.5, 0.5]).take(120));
        let scales: Vec<f64> = (0..6).map(|j| 0.4 / f64::powi(2.0, j)).collect();
        let e = box_dimension(&pts, &[0.5, 0.5], &scales).unwrap();
        assert!(e.estimate.abs() <= 0.2, "{e:?}");
    }

    #[test]
    fn insufficient_points() {
        let pts = vec![vec![0.0]; 10];
        assert!(matches!(
            box_dimension(&pts, &[0.0], &[1.0, 0.5]),
            Err(Error::InsufficientPoints { found: 10, needed: 100 })
        ));
    }

    #[test]
    fn verdicts() {
        let est = |e| BoxEstimate { estimate: e, residual: 0.0, scales: vec![], counts: vec![], fitted: 0, window_points: 0 };
        assert!(compare_order(0, est(0.2)).consistent);
        assert!(compare_order(1, est(1.4)).consistent);
        assert!(!compare_order(0, est(1.9)).consistent);
    }

    #[test]
    fn export_format() {
        let s = spec(&[&["2"]]);
        let c = enumerate_orbit(&s, &vector(&s, "1"), 2, 3.0).unwrap();
        let mut buf = Vec::new();
        c.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# n=1 L=2 discarded=1");
        assert_eq!(lines.count(), 4);
    }
}
