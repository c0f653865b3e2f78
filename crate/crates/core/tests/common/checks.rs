//! Randomized invariant checks shared by the invariants and acceptance suites.
//! Each returns the number of instances examined and a list of violations.

use orbitreg::arith::{q_decompose, ExactField, Field, GaussRat, NumericField, Scalar, SymbolicComplex};
use orbitreg::group_closure::{closure_decomposition, ClosureConfig, ClosureDecomposition};
use orbitreg::lie_log::{AdditiveGroupGens, GenLabel};
use orbitreg::normal_form::{internal_digits, FieldMarker, GroupSpec, TierPreference};
use orbitreg::orbit_engine::{orbit_order, orbit_order_with, orbit_span, Classification, OrbitOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{corpus, oracle_closure_dim, random_group, random_vector, real_entry, spec, sqrt2_basis, vector};

#[derive(Debug, Default)]
pub struct Outcome {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl Outcome {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn fail(&mut self, what: String) {
        self.violations.push(what);
    }
}

pub struct Instance {
    pub label: String,
    pub spec: GroupSpec,
    pub u: Vec<SymbolicComplex>,
}

/// Random commuting groups with `n ≤ max_n`, `p ≤ max_p` and a matching vector.
pub fn random_instances(seed: u64, count: usize, max_n: usize, max_p: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = sqrt2_basis();
    (0..count)
        .map(|i| {
            let g = random_group(&mut rng, max_n, max_p);
            let real = g.field == FieldMarker::Real;
            let gens: Vec<&str> = g.gens.iter().map(String::as_str).collect();
            let u = random_vector(&mut rng, g.n, real);
            Instance {
                label: format!("#{i} {:?} gens={:?} u=({u})", g.field, g.gens),
                spec: spec(g.field, &b, &gens, TierPreference::ExactThenNumeric),
                u: vector(&b, &u),
            }
        })
        .collect()
}

/// `m ≤ 2n`, `m ≤ 2r(u)`, `m = 2r(u)` exactly when the closure is a subspace,
/// and `m ≤ n` for real groups.
pub fn bound_invariants(instances: &[Instance]) -> Outcome {
    let mut out = Outcome::default();
    for inst in instances {
        out.checked += 1;
        let r = match orbit_order(&inst.spec, &inst.u) {
            Ok(r) => r,
            Err(e) => {
                out.fail(format!("{}: {e}", inst.label));
                continue;
            }
        };
        let n = inst.spec.n;
        let full = r.closure.dim == r.closure.d && r.closure.lattice_basis.is_empty();
        let checks = [
            (r.m <= 2 * n, "m <= 2n"),
            (r.m <= 2 * r.r_u, "m <= 2r(u)"),
            ((r.m == 2 * r.r_u) == r.flags.closure_is_subspace, "m = 2r(u) <=> closure_is_subspace"),
            (r.flags.closure_is_subspace == full, "closure_is_subspace <=> closure fills E(u)"),
            (inst.spec.field == FieldMarker::Complex || r.m <= n, "real group: m <= n"),
            (r.m == r.closure.dim, "m = dim of the closure"),
        ];
        for (holds, what) in checks {
            if !holds {
                out.fail(format!("{}: {what} (m={}, r={}, n={n})", inst.label, r.m, r.r_u));
            }
        }
    }
    out
}

/// Exponential and `P·P⁻¹` residuals below `10^max_log10`.
pub fn residuals(instances: &[Instance], max_log10: f64) -> Outcome {
    let mut out = Outcome::default();
    for inst in instances {
        out.checked += 1;
        match orbit_order(&inst.spec, &inst.u) {
            Ok(r) => {
                if !(r.exp_residual_log10 < max_log10) {
                    out.fail(format!("{}: exp residual 1e{:.1}", inst.label, r.exp_residual_log10));
                }
                if !(r.inverse_residual_log10 < max_log10) {
                    out.fail(format!("{}: P·P_inv residual 1e{:.1}", inst.label, r.inverse_residual_log10));
                }
            }
            Err(e) => out.fail(format!("{}: {e}", inst.label)),
        }
    }
    out
}

/// The order does not depend on which branch of each block logarithm is used.
pub fn branch_shift_invariance(instances: &[Instance], seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Outcome::default();
    for inst in instances {
        out.checked += 1;
        let shift: Vec<i64> = (0..6).map(|_| rng.gen_range(-3..=3)).collect();
        let opts = OrbitOptions { branch_shift: Some(shift.clone()) };
        match (orbit_order(&inst.spec, &inst.u), orbit_order_with(&inst.spec, &inst.u, &opts)) {
            (Ok(a), Ok(b)) if a.m == b.m => {}
            (Ok(a), Ok(b)) => out.fail(format!("{}: m={} but m={} with shift {shift:?}", inst.label, a.m, b.m)),
            (a, b) => out.fail(format!("{}: {:?} / {:?}", inst.label, a.err(), b.err())),
        }
    }
    out
}

fn random_rational(rng: &mut ChaCha8Rng) -> String {
    let mut a = 0;
    while a == 0 {
        a = rng.gen_range(-9..=9);
    }
    format!("{a}/{}", rng.gen_range(1..=7))
}

fn exact_rows(rows: &[Vec<Scalar>]) -> Option<Vec<Vec<SymbolicComplex>>> {
    rows.iter().map(|r| r.iter().map(|x| x.symbolic().cloned()).collect()).collect()
}

fn dot_f64(h: &[Scalar], v: &[SymbolicComplex], approx: &[f64]) -> (f64, f64) {
    let mut acc = (0.0, 0.0);
    for (a, b) in h.iter().zip(v) {
        let z = a.float().to_c64();
        let (ar, ai) = (z.re, z.im);
        let (br, bi) = b.approx(approx);
        acc.0 += ar * br - ai * bi;
        acc.1 += ar * bi + ai * br;
    }
    acc
}

/// For each corpus instance: `order(λu) = order(u)` for random real `λ ≠ 0`, and
/// `E(v) = E(u)`, `order(v) = order(u)` for random `v` in `U_u`.
///
/// `λ` ranges over nonzero rationals, times a declared constant when `u` is
/// rational (products of two irrational values leave the exact span).
pub fn homogeneity_and_region(samples: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Outcome::default();
    for (name, spec, u) in corpus() {
        let b = spec.basis.clone();
        let base = match orbit_order(&spec, &u) {
            Ok(r) => r,
            Err(e) => {
                out.fail(format!("{name}: {e}"));
                continue;
            }
        };
        let rational_u = u.iter().all(|x| x.as_gauss().is_some());
        for k in 0..samples {
            out.checked += 1;
            let mut lambda = random_rational(&mut rng);
            let declared = b.declared();
            if rational_u && !declared.is_empty() && k % 2 == 1 {
                lambda = format!("{lambda}*{}", declared[rng.gen_range(0..declared.len())].name);
            }
            let l = q_decompose(&lambda, &b).unwrap();
            let scaled: Vec<SymbolicComplex> = u.iter().map(|x| x.mul(&l).unwrap()).collect();
            match orbit_order(&spec, &scaled) {
                Ok(r) if r.m == base.m => {}
                Ok(r) => out.fail(format!("{name}: order({lambda}·u) = {} ≠ {}", r.m, base.m)),
                Err(e) => out.fail(format!("{name}: λ = {lambda}: {e}")),
            }
        }

        // the span itself needs no logarithms, so it stays exact even when the report does not
        let Some(e_basis) = orbit_span(&spec, &u).ok().and_then(|s| exact_rows(&s)) else {
            out.fail(format!("{name}: E(u) basis is not exact"));
            continue;
        };
        let approx = b.approx().to_vec();
        let mut drawn = 0;
        while drawn < samples {
            let coeffs: Vec<GaussRat> = e_basis
                .iter()
                .map(|_| {
                    let re = q_decompose(&random_rational(&mut rng), &b).unwrap().as_gauss().unwrap();
                    if spec.field == FieldMarker::Complex && rng.gen_bool(0.5) {
                        let im = q_decompose(&format!("{} i", random_rational(&mut rng)), &b).unwrap();
                        re.add(&im.as_gauss().unwrap())
                    } else {
                        re
                    }
                })
                .collect();
            let mut v = vec![SymbolicComplex::zero(b.len()); spec.n];
            for (c, e) in coeffs.iter().zip(&e_basis) {
                for (vi, ei) in v.iter_mut().zip(e) {
                    *vi = vi.add(&ei.scale_gauss(c));
                }
            }
            // stay off the hyperplanes bounding U_u
            let vn = v.iter().map(|x| x.approx(&approx)).map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            if base.hyperplanes.iter().any(|h| {
                let (re, im) = dot_f64(h, &v, &approx);
                re.hypot(im) < 1e-9 * vn.max(1e-300)
            }) {
                continue;
            }
            drawn += 1;
            out.checked += 1;
            match (orbit_span(&spec, &v), orbit_order(&spec, &v)) {
                (Ok(span), Ok(r)) => {
                    if exact_rows(&span).as_ref() != Some(&e_basis) {
                        out.fail(format!("{name}: E(v) ≠ E(u) for v in U_u"));
                    }
                    if r.m != base.m {
                        out.fail(format!("{name}: order(v) = {} ≠ {}", r.m, base.m));
                    }
                }
                (a, b) => out.fail(format!("{name}: {:?} / {:?}", a.err(), b.err())),
            }
        }
    }
    out
}

pub fn classification_of(spec: &GroupSpec, u: &[SymbolicComplex]) -> Option<(usize, Classification)> {
    orbit_order(spec, u).ok().map(|r| (r.m, r.classification))
}

pub fn additive<E: Clone>(vectors: Vec<Vec<E>>) -> AdditiveGroupGens<E> {
    AdditiveGroupGens {
        d: vectors[0].len(),
        labels: (0..vectors.len()).map(GenLabel::Input).collect(),
        vectors,
    }
}

pub fn exact_closure(vs: &[Vec<SymbolicComplex>]) -> ClosureDecomposition {
    let f = ExactField::new(sqrt2_basis(), 60);
    closure_decomposition(&f, &additive(vs.to_vec()), &ClosureConfig::new(60)).unwrap()
}

pub fn numeric_closure(vs: &[Vec<SymbolicComplex>]) -> ClosureDecomposition {
    let ex = ExactField::new(sqrt2_basis(), 60);
    let f = NumericField::new(60, internal_digits(60, vs[0].len()));
    let floats = vs.iter().map(|v| v.iter().map(|x| ex.to_float(x).with_prec(f.prec())).collect()).collect();
    closure_decomposition(&f, &additive(floats), &ClosureConfig::new(60)).unwrap()
}

pub fn to_f64(vs: &[Vec<SymbolicComplex>]) -> Vec<Vec<f64>> {
    let ex = ExactField::new(sqrt2_basis(), 60);
    vs.iter().map(|v| v.iter().map(|x| ex.to_float(x).re.to_f64()).collect()).collect()
}

/// `p ≤ 4` vectors in `ℝ^d`, `d ≤ 3`, entries `a + b√2` with small integers.
pub fn random_closure_instances(seed: u64, count: usize) -> Vec<Vec<Vec<SymbolicComplex>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = sqrt2_basis();
    (0..count)
        .map(|_| {
            let d = rng.gen_range(1..=3);
            let p = rng.gen_range(1..=4);
            (0..p)
                .map(|_| {
                    let entries: Vec<String> = (0..d).map(|_| real_entry(&mut rng)).collect();
                    vector(&b, &entries.join(", "))
                })
                .collect()
        })
        .collect()
}

/// Closure dimension against the brute-force oracle; also tallies the
/// dimensions seen (`0, 1, 2, ≥3`).
pub fn closure_oracle_agreement(instances: &[Vec<Vec<SymbolicComplex>>]) -> (Outcome, [usize; 4]) {
    let mut out = Outcome::default();
    let mut seen = [0usize; 4];
    for (i, vs) in instances.iter().enumerate() {
        out.checked += 1;
        let main = exact_closure(vs).dim;
        seen[main.min(3)] += 1;
        let oracle = oracle_closure_dim(&to_f64(vs));
        if main != oracle {
            out.fail(format!("#{i}: main {main}, oracle {oracle}, vectors {:?}", to_f64(vs)));
        }
    }
    (out, seen)
}

pub fn numeric_exact_agreement(instances: &[Vec<Vec<SymbolicComplex>>]) -> Outcome {
    let mut out = Outcome::default();
    for (i, vs) in instances.iter().enumerate() {
        out.checked += 1;
        let (e, n) = (exact_closure(vs), numeric_closure(vs));
        if (e.dim, e.span_dim) != (n.dim, n.span_dim) {
            out.fail(format!("#{i}: exact {:?}, numeric {:?}", (e.dim, e.span_dim), (n.dim, n.span_dim)));
        }
    }
    out
}
