//! Integer relations `Σ s_i v_i = 0` among scalars.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::float::Float;
use super::lattice::{hnf, lll, saturate, IVec};
use super::symbolic::SymbolicReal;
use crate::error::{Error, Result};

/// Relation lattice of symbolic reals over one basis: an exact ℤ-basis in HNF.
pub fn integer_relations_exact(values: &[SymbolicReal]) -> Vec<IVec> {
    if values.is_empty() {
        return Vec::new();
    }
    let len = values[0].len();
    // one row per basis constant, one column per value
    let rows: Vec<Vec<BigRational>> =
        (0..len).map(|j| values.iter().map(|v| v.coeffs[j].clone()).collect()).collect();
    super::lattice::integer_kernel(&rows, values.len())
}

/// Heuristic relations found by LLL; each satisfies `|Σ s_i v_i| < τ`.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericRelations {
    pub basis: Vec<IVec>,
    pub tau_log10: f64,
    pub heuristic: bool,
}

/// `|Σ s_i v_i|` at the working precision of `values`.
pub fn relation_residual(s: &[BigInt], values: &[Float]) -> Float {
    let prec = values.iter().map(|v| v.prec()).max().unwrap_or(64);
    let mut acc = Float::zero(prec);
    for (k, v) in s.iter().zip(values) {
        if !k.is_zero() {
            acc = acc.add(&v.mul(&Float::from_bigint(k, prec)));
        }
    }
    acc.abs()
}

fn below(x: &Float, log10: f64) -> bool {
    x.is_zero() || x.log10_abs() < log10
}

/// Integer relations of real floats by LLL on `(e_i | round(N v_i))`, `N = 10^(q-15)`.
///
/// `tau_log10` is `log10 τ`; thresholds of `10^-5` or looser are refused.
pub fn integer_relations_numeric(values: &[Float], digits: u32, tau_log10: f64) -> Result<NumericRelations> {
    let rows: Vec<Vec<Float>> = values.iter().map(|v| vec![v.clone()]).collect();
    integer_relations_numeric_vec(&rows, digits, tau_log10)
}

/// Simultaneous relations `Σ s_i v_i = 0` of real vectors `v_i`; the residual
/// is the largest component of `|Σ s_i v_i|`, after scaling the largest entry to 1.
pub fn integer_relations_numeric_vec(values: &[Vec<Float>], digits: u32, tau_log10: f64) -> Result<NumericRelations> {
    if tau_log10 >= -5.0 {
        return Err(Error::InvalidArgument(format!(
            "relation threshold 1e{tau_log10} is too permissive (must be below 1e-5)"
        )));
    }
    let p = values.len();
    let unit = |i: usize| -> IVec { (0..p).map(|k| BigInt::from((i == k) as i64)).collect() };
    if p == 0 {
        return Ok(NumericRelations { basis: Vec::new(), tau_log10, heuristic: true });
    }
    let c = values[0].len();
    let prec = values.iter().flatten().map(|v| v.prec()).max().unwrap_or(64);
    let top = values.iter().flatten().map(|v| v.log10_abs()).fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        // all zero: every integer vector is a relation
        return Ok(NumericRelations { basis: (0..p).map(unit).collect(), tau_log10, heuristic: true });
    }
    let shift = top.floor() as i64;
    let norm = Float::pow10(-shift, prec);
    let scaled: Vec<Vec<Float>> = values.iter().map(|v| v.iter().map(|x| x.mul(&norm)).collect()).collect();
    let mag = Float::pow10(digits as i64 - 15, prec);
    let lattice: Vec<IVec> = (0..p)
        .map(|i| {
            let mut row = unit(i);
            row.extend(scaled[i].iter().map(|x| x.mul(&mag).round_to_int()));
            row
        })
        .collect();
    let accept = |s: &IVec| -> bool {
        (0..c).all(|j| {
            let col: Vec<Float> = scaled.iter().map(|v| v[j].clone()).collect();
            below(&relation_residual(s, &col), tau_log10)
        })
    };
    let reduced = lll(&lattice);
    let candidates: Vec<IVec> = reduced
        .iter()
        .map(|r| r[..p].to_vec())
        .filter(|s| s.iter().any(|x| !x.is_zero()))
        .filter(|s| accept(s))
        .collect();
    let mut basis = saturate(&candidates, p);
    basis.retain(|s| accept(s));
    Ok(NumericRelations { basis: hnf(&basis), tau_log10, heuristic: true })
}
