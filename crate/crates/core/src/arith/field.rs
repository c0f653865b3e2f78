use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::complex::FloatComplex;
use super::float::{bits_for_digits, Float};
use super::gauss::{approximate_real, rat, GaussRat};
use super::parse::format_scalar;
use super::poly;
use super::symbolic::{ConstantBasis, ConstantDef, SymbolicComplex, SymbolicReal};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tier {
    Exact,
    Numeric,
}

impl Tier {
    pub fn as_str(&self) -> &'static str {
        match self {
            Tier::Exact => "exact",
            Tier::Numeric => "numeric",
        }
    }
}

/// Scalar arithmetic used by the matrix algorithms. Exact elements may refuse a
/// product or quotient that leaves the declared span.
pub trait Field: Send + Sync {
    type Elem: Clone + Debug + PartialEq + Send + Sync;

    fn tier(&self) -> Tier;
    /// Working precision in bits for float conversions.
    fn prec(&self) -> u32;
    fn zero(&self) -> Self::Elem;
    fn from_gauss(&self, g: &GaussRat) -> Self::Elem;
    fn one(&self) -> Self::Elem {
        self.from_gauss(&GaussRat::one())
    }
    fn from_int(&self, k: i64) -> Self::Elem {
        self.from_gauss(&GaussRat::from_int(k))
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn conj(&self, a: &Self::Elem) -> Self::Elem;
    /// Real part as a (real) element.
    fn re(&self, a: &Self::Elem) -> Self::Elem;
    fn im(&self, a: &Self::Elem) -> Self::Elem;
    fn mul_i(&self, a: &Self::Elem) -> Self::Elem;
    /// `log10 |a|`, `-inf` for zero; approximate.
    fn log10_mag(&self, a: &Self::Elem) -> f64;
    /// Zero test; numeric elements count as zero below the tolerance times `10^scale_log10`.
    fn is_negligible(&self, a: &Self::Elem, scale_log10: f64) -> bool;
    /// Preference for pivots (larger is better).
    fn pivot_order(&self, a: &Self::Elem, b: &Self::Elem) -> Ordering;
    fn to_float(&self, a: &Self::Elem) -> FloatComplex;
    fn as_gauss(&self, a: &Self::Elem) -> Option<GaussRat>;
    /// Principal logarithm (imaginary part in `(-pi, pi]`).
    fn log(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn two_pi_i(&self) -> Result<Self::Elem>;
    /// Distinct roots with multiplicities of a monic polynomial (low degree first).
    fn roots(&self, p: &[Self::Elem]) -> Result<Vec<(Self::Elem, usize)>>;
    fn render(&self, a: &Self::Elem) -> String;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        self.is_negligible(a, 0.0)
    }
    fn cmp_value(&self, a: &Self::Elem, b: &Self::Elem) -> Ordering {
        self.to_float(a).cmp_lex(&self.to_float(b))
    }
    /// The exact tier behind this field, if any.
    fn as_exact(&self) -> Option<&ExactField> {
        None
    }
    fn as_symbolic(&self, _a: &Self::Elem) -> Option<SymbolicComplex> {
        None
    }
    /// Tier-independent copy for reports.
    fn export(&self, a: &Self::Elem) -> Scalar {
        match self.as_symbolic(a) {
            Some(s) => Scalar::Exact(s, self.to_float(a)),
            None => Scalar::Numeric(self.to_float(a)),
        }
    }
}

/// A scalar detached from its field: symbolic with a float shadow, or a float.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(SymbolicComplex, FloatComplex),
    Numeric(FloatComplex),
}

impl Scalar {
    pub fn float(&self) -> &FloatComplex {
        match self {
            Scalar::Exact(_, x) | Scalar::Numeric(x) => x,
        }
    }

    pub fn symbolic(&self) -> Option<&SymbolicComplex> {
        match self {
            Scalar::Exact(s, _) => Some(s),
            Scalar::Numeric(_) => None,
        }
    }

    /// Exact values in the input grammar, floats with `digits` significant digits.
    pub fn render(&self, basis: &ConstantBasis, digits: u32) -> String {
        match self {
            Scalar::Exact(s, _) => format_scalar(s, basis),
            Scalar::Numeric(x) => x.to_decimal(digits),
        }
    }
}

/// Exact tier: symbolic scalars over a constant basis.
#[derive(Clone, Debug)]
pub struct ExactField {
    basis: ConstantBasis,
    digits: u32,
    prec: u32,
    values: Vec<Float>,
}

impl ExactField {
    pub fn new(basis: ConstantBasis, digits: u32) -> Self {
        let prec = bits_for_digits(digits + 10);
        let values = basis.values(prec);
        ExactField { basis, digits, prec, values }
    }

    pub fn basis(&self) -> &ConstantBasis {
        &self.basis
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn values(&self) -> &[Float] {
        &self.values
    }

    /// Index `j` and rational `r` with `c_j = r·pi`.
    fn pi_constant(&self) -> Option<(usize, BigRational)> {
        if let Some(j) = self.basis.constants().iter().position(|c| c.def == ConstantDef::Pi) {
            return Some((j, BigRational::one()));
        }
        let pi = Float::pi(self.prec);
        self.find_multiple(&pi)
    }

    /// Basis constant that is a small rational multiple of `target`.
    fn find_multiple(&self, target: &Float) -> Option<(usize, BigRational)> {
        let den = BigInt::from(1000);
        for (j, v) in self.values.iter().enumerate().skip(1) {
            let q = v.div(target);
            let r = approximate_real(&q, &den);
            if r.is_zero() {
                continue;
            }
            let err = q.sub(&Float::from_ratio(&r, self.prec));
            if err.is_zero() || err.log10_abs() < -(self.digits as f64 - 5.0) {
                return Some((j, r));
            }
        }
        None
    }

    fn log_prime(&self, p: &BigInt) -> Option<(usize, BigRational)> {
        let target = BigRational::from_integer(p.clone());
        if let Some(j) = self
            .basis
            .constants()
            .iter()
            .position(|c| c.def == ConstantDef::Log(target.clone()))
        {
            return Some((j, BigRational::one()));
        }
        self.find_multiple(&Float::from_bigint(p, self.prec).ln())
    }

    /// Exact `log|g| + i arg g` when every needed constant is declared.
    fn log_gauss(&self, g: &GaussRat) -> Result<SymbolicComplex> {
        let len = self.basis.len();
        let mut re = SymbolicReal::zero(len);
        let norm = g.norm();
        let mut exps: Vec<(BigInt, i64)> = Vec::new();
        for (n, sign) in [(norm.numer().clone(), 1i64), (norm.denom().clone(), -1)] {
            for (p, e) in factor(&n).ok_or_else(|| {
                Error::NotRepresentable(format!("modulus of {g} has a large prime factor"))
            })? {
                exps.push((p, sign * e as i64));
            }
        }
        for (p, e) in exps {
            let (j, r) = self.log_prime(&p).ok_or_else(|| {
                Error::NotRepresentable(format!("log({p}) is not a declared constant"))
            })?;
            // log p = c_j / r, and log|g| = (1/2) log norm
            re.coeffs[j] += BigRational::new(BigInt::from(e), BigInt::from(2)) / r;
        }
        let mut im = SymbolicReal::zero(len);
        if let Some(frac) = argument_fraction(g) {
            if !frac.is_zero() {
                let (j, r) = self.pi_constant().ok_or_else(|| {
                    Error::NotRepresentable("argument needs pi, which is not declared".into())
                })?;
                im.coeffs[j] = frac / r;
            }
        } else {
            return Err(Error::NotRepresentable(format!("argument of {g} is not a rational multiple of pi")));
        }
        Ok(SymbolicComplex::new(re, im))
    }
}

/// `arg g / pi` when it is one of the eighth-turn fractions.
fn argument_fraction(g: &GaussRat) -> Option<BigRational> {
    let (x, y) = (&g.re, &g.im);
    let f = |n, d| Some(rat(n, d));
    match (x.signum().to_i32()?, y.signum().to_i32()?) {
        (1, 0) => f(0, 1),
        (-1, 0) => f(1, 1),
        (0, 1) => f(1, 2),
        (0, -1) => f(-1, 2),
        (sx, sy) if x.abs() == y.abs() => match (sx, sy) {
            (1, 1) => f(1, 4),
            (1, -1) => f(-1, 4),
            (-1, 1) => f(3, 4),
            _ => f(-3, 4),
        },
        _ => None,
    }
}

/// Trial-division factorization; `None` if a prime factor exceeds 10^6.
fn factor(n: &BigInt) -> Option<Vec<(BigInt, u32)>> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(1_000_000);
    while n > BigInt::one() {
        if &p * &p > n {
            out.push((n.clone(), 1));
            break;
        }
        if p > limit {
            return None;
        }
        let mut e = 0;
        while n.is_multiple_of(&p) {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    if out.iter().any(|(p, _)| p > &limit) {
        return None;
    }
    let mut merged: Vec<(BigInt, u32)> = Vec::new();
    for (p, e) in out {
        match merged.iter_mut().find(|(q, _)| *q == p) {
            Some(m) => m.1 += e,
            None => merged.push((p, e)),
        }
    }
    Some(merged)
}

impl Field for ExactField {
    type Elem = SymbolicComplex;

    fn as_exact(&self) -> Option<&ExactField> {
        Some(self)
    }
    fn as_symbolic(&self, a: &SymbolicComplex) -> Option<SymbolicComplex> {
        Some(a.clone())
    }

    fn tier(&self) -> Tier {
        Tier::Exact
    }
    fn prec(&self) -> u32 {
        self.prec
    }
    fn zero(&self) -> SymbolicComplex {
        SymbolicComplex::zero(self.basis.len())
    }
    fn from_gauss(&self, g: &GaussRat) -> SymbolicComplex {
        SymbolicComplex::from_gauss(g, self.basis.len())
    }
    fn add(&self, a: &SymbolicComplex, b: &SymbolicComplex) -> SymbolicComplex {
        a.add(b)
    }
    fn sub(&self, a: &SymbolicComplex, b: &SymbolicComplex) -> SymbolicComplex {
        a.sub(b)
    }
    fn neg(&self, a: &SymbolicComplex) -> SymbolicComplex {
        a.neg()
    }
    fn mul(&self, a: &SymbolicComplex, b: &SymbolicComplex) -> Result<SymbolicComplex> {
        a.mul(b)
    }
    fn div(&self, a: &SymbolicComplex, b: &SymbolicComplex) -> Result<SymbolicComplex> {
        a.div(b)
    }
    fn conj(&self, a: &SymbolicComplex) -> SymbolicComplex {
        a.conj()
    }
    fn re(&self, a: &SymbolicComplex) -> SymbolicComplex {
        SymbolicComplex::from_real(a.re.clone())
    }
    fn im(&self, a: &SymbolicComplex) -> SymbolicComplex {
        SymbolicComplex::from_real(a.im.clone())
    }
    fn mul_i(&self, a: &SymbolicComplex) -> SymbolicComplex {
        a.mul_i()
    }
    fn log10_mag(&self, a: &SymbolicComplex) -> f64 {
        if a.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (x, y) = a.approx(self.basis.approx());
        let m = x.hypot(y);
        if m > 0.0 {
            m.log10()
        } else {
            self.to_float(a).max_abs().log10_abs()
        }
    }
    fn is_negligible(&self, a: &SymbolicComplex, _scale_log10: f64) -> bool {
        a.is_zero()
    }
    fn pivot_order(&self, a: &SymbolicComplex, b: &SymbolicComplex) -> Ordering {
        let rank = |x: &SymbolicComplex| match (x.is_zero(), x.as_gauss().is_some()) {
            (true, _) => 0,
            (false, false) => 1,
            (false, true) => 2,
        };
        rank(a).cmp(&rank(b)).then_with(|| {
            // simplest rational first: smaller height wins
            height(b).cmp(&height(a))
        })
    }
    fn to_float(&self, a: &SymbolicComplex) -> FloatComplex {
        a.eval(&self.values)
    }
    fn as_gauss(&self, a: &SymbolicComplex) -> Option<GaussRat> {
        a.as_gauss()
    }
    fn log(&self, a: &SymbolicComplex) -> Result<SymbolicComplex> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let g = a
            .as_gauss()
            .ok_or_else(|| Error::NotRepresentable("logarithm of an irrational scalar".into()))?;
        self.log_gauss(&g)
    }
    fn two_pi_i(&self) -> Result<SymbolicComplex> {
        let (j, r) = self
            .pi_constant()
            .ok_or_else(|| Error::NotRepresentable("2*pi*i needs a declared pi constant".into()))?;
        let mut im = SymbolicReal::zero(self.basis.len());
        im.coeffs[j] = rat(2, 1) / r;
        Ok(SymbolicComplex::new(SymbolicReal::zero(self.basis.len()), im))
    }
    fn roots(&self, p: &[SymbolicComplex]) -> Result<Vec<(SymbolicComplex, usize)>> {
        let g: Option<Vec<GaussRat>> = p.iter().map(|c| c.as_gauss()).collect();
        let g = g.ok_or_else(|| {
            Error::ExactUnavailable("characteristic polynomial has irrational coefficients".into())
        })?;
        let roots = poly::split_gauss(&g, bits_for_digits(self.digits.max(30) * 2))
            .ok_or_else(|| Error::ExactUnavailable("characteristic polynomial does not split over Q(i)".into()))?;
        Ok(roots.into_iter().map(|(r, m)| (self.from_gauss(&r), m)).collect())
    }
    fn render(&self, a: &SymbolicComplex) -> String {
        format_scalar(a, &self.basis)
    }
    fn cmp_value(&self, a: &SymbolicComplex, b: &SymbolicComplex) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        let ord = self.to_float(a).cmp_lex(&self.to_float(b));
        if ord != Ordering::Equal {
            return ord;
        }
        // numerically tied but symbolically distinct: fall back to coefficients
        format!("{a:?}").cmp(&format!("{b:?}"))
    }
}

fn height(x: &SymbolicComplex) -> usize {
    x.re.coeffs
        .iter()
        .chain(&x.im.coeffs)
        .map(|c| (c.numer().bits() + c.denom().bits()) as usize)
        .sum()
}

/// Numeric tier: complex floats with a relative zero tolerance.
#[derive(Clone, Debug)]
pub struct NumericField {
    digits: u32,
    prec: u32,
    tol_log10: f64,
}

impl NumericField {
    /// `digits` is the reported precision q; arithmetic runs at `internal_digits`.
    pub fn new(digits: u32, internal_digits: u32) -> Self {
        NumericField {
            digits,
            prec: bits_for_digits(internal_digits.max(digits)),
            tol_log10: -(digits as f64 - 10.0),
        }
    }

    /// Same tolerances, explicit working precision in bits.
    pub fn from_bits(digits: u32, prec: u32) -> Self {
        NumericField { digits, prec, tol_log10: -(digits as f64 - 10.0) }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn tol_log10(&self) -> f64 {
        self.tol_log10
    }

    /// Eigenvalue clustering tolerance, `10^(-q/2)`.
    pub fn cluster_log10(&self) -> f64 {
        -(self.digits as f64) / 2.0
    }

    pub fn lift(&self, x: &FloatComplex) -> FloatComplex {
        x.with_prec(self.prec)
    }
}

impl Field for NumericField {
    type Elem = FloatComplex;

    fn tier(&self) -> Tier {
        Tier::Numeric
    }
    fn prec(&self) -> u32 {
        self.prec
    }
    fn zero(&self) -> FloatComplex {
        FloatComplex::zero(self.prec)
    }
    fn from_gauss(&self, g: &GaussRat) -> FloatComplex {
        g.to_float(self.prec)
    }
    fn add(&self, a: &FloatComplex, b: &FloatComplex) -> FloatComplex {
        a.add(b)
    }
    fn sub(&self, a: &FloatComplex, b: &FloatComplex) -> FloatComplex {
        a.sub(b)
    }
    fn neg(&self, a: &FloatComplex) -> FloatComplex {
        a.neg()
    }
    fn mul(&self, a: &FloatComplex, b: &FloatComplex) -> Result<FloatComplex> {
        Ok(a.mul(b))
    }
    fn div(&self, a: &FloatComplex, b: &FloatComplex) -> Result<FloatComplex> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(a.div(b))
    }
    fn conj(&self, a: &FloatComplex) -> FloatComplex {
        a.conj()
    }
    fn re(&self, a: &FloatComplex) -> FloatComplex {
        FloatComplex::real(a.re.clone())
    }
    fn im(&self, a: &FloatComplex) -> FloatComplex {
        FloatComplex::real(a.im.clone())
    }
    fn mul_i(&self, a: &FloatComplex) -> FloatComplex {
        a.mul_i()
    }
    fn log10_mag(&self, a: &FloatComplex) -> f64 {
        a.max_abs().log10_abs()
    }
    fn is_negligible(&self, a: &FloatComplex, scale_log10: f64) -> bool {
        if a.is_zero() {
            return true;
        }
        let scale = if scale_log10.is_finite() { scale_log10 } else { 0.0 };
        a.max_abs().log10_abs() < self.tol_log10 + scale
    }
    fn pivot_order(&self, a: &FloatComplex, b: &FloatComplex) -> Ordering {
        a.max_abs().cmp(&b.max_abs())
    }
    fn to_float(&self, a: &FloatComplex) -> FloatComplex {
        a.clone()
    }
    fn as_gauss(&self, _a: &FloatComplex) -> Option<GaussRat> {
        None
    }
    fn log(&self, a: &FloatComplex) -> Result<FloatComplex> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut l = a.ln();
        // exact negative reals take +pi; guard the sign of a signed-zero-free imaginary part
        if a.im.is_zero() && a.re.is_negative() {
            l.im = Float::pi(self.prec);
        }
        Ok(l)
    }
    fn two_pi_i(&self) -> Result<FloatComplex> {
        Ok(FloatComplex::new(Float::zero(self.prec), Float::pi(self.prec).mul_i64(2)))
    }
    fn roots(&self, p: &[FloatComplex]) -> Result<Vec<(FloatComplex, usize)>> {
        let approx = poly::aberth(p, self.prec);
        let clusters = poly::cluster_roots(&approx, self.cluster_log10()).map_err(Error::Clustering)?;
        Ok(clusters.into_iter().map(|(x, m)| (poly::refine_multiple_root(p, &x, m, self.prec), m)).collect())
    }
    fn render(&self, a: &FloatComplex) -> String {
        a.to_decimal(self.digits)
    }
}
