//! Binary floating point with a configurable mantissa width, built on `BigInt`.
//!
//! A value is `man * 2^exp` with `|man| < 2^prec`. Every operation rounds its
//! exact result to nearest (ties to even) at the wider of the operand
//! precisions. Transcendental functions evaluate in fixed point with guard
//! bits and round once at the end.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

const LOG2_10: f64 = 3.321_928_094_887_362_3;

/// Number of mantissa bits needed to carry `digits` significant decimal digits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32 + 8
}

#[derive(Clone, Debug)]
pub struct Float {
    man: BigInt,
    exp: i64,
    prec: u32,
}

fn round_shift(mag: &BigUint, shift: u64) -> BigUint {
    if shift == 0 {
        return mag.clone();
    }
    let q = mag >> shift;
    let half = BigUint::one() << (shift - 1);
    let rem = mag - (&q << shift);
    match rem.cmp(&half) {
        Ordering::Greater => q + 1u32,
        Ordering::Less => q,
        Ordering::Equal => {
            if q.is_odd() {
                q + 1u32
            } else {
                q
            }
        }
    }
}

impl Float {
    pub fn zero(prec: u32) -> Self {
        Float { man: BigInt::zero(), exp: 0, prec }
    }

    pub fn one(prec: u32) -> Self {
        Float::from_i64(1, prec)
    }

    /// Rounds `man * 2^exp` to `prec` bits.
    fn make(man: BigInt, exp: i64, prec: u32) -> Self {
        if man.is_zero() {
            return Float::zero(prec);
        }
        let bits = man.bits();
        if bits <= prec as u64 {
            return Float { man, exp, prec };
        }
        let shift = bits - prec as u64;
        let (sign, mag) = (man.sign(), man.magnitude().clone());
        let mut rounded = round_shift(&mag, shift);
        let mut exp = exp + shift as i64;
        if rounded.bits() > prec as u64 {
            rounded >>= 1;
            exp += 1;
        }
        Float { man: BigInt::from_biguint(sign, rounded), exp, prec }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Float::make(BigInt::from(v), 0, prec)
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        Float::make(v.clone(), 0, prec)
    }

    /// `man * 2^exp`, rounded.
    pub fn from_parts(man: BigInt, exp: i64, prec: u32) -> Self {
        Float::make(man, exp, prec)
    }

    pub fn from_ratio(r: &BigRational, prec: u32) -> Self {
        if r.is_zero() {
            return Float::zero(prec);
        }
        let num = r.numer();
        let den = r.denom();
        // scale numerator so the quotient carries prec + 2 bits
        let shift = prec as i64 + 2 + den.bits() as i64 - num.bits() as i64;
        let shift = shift.max(0);
        let scaled = num << shift as usize;
        let (q, rem) = scaled.div_rem(den);
        // sticky bit keeps round-to-nearest honest when the division is inexact
        let sticky = if rem.is_zero() { BigInt::zero() } else { q.signum() };
        let q = (q << 1usize) + sticky;
        Float::make(q, -shift - 1, prec)
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        if v == 0.0 || !v.is_finite() {
            return Float::zero(prec);
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (man, exp) = if exp_bits == 0 {
            (frac as i64, -1074)
        } else {
            ((frac | (1u64 << 52)) as i64, exp_bits - 1075)
        };
        Float::make(BigInt::from(sign * man), exp, prec)
    }

    /// Parses a decimal literal such as `-12.5e-3`.
    pub fn parse_decimal(s: &str, prec: u32) -> Option<Self> {
        decimal_to_ratio(s).map(|r| Float::from_ratio(&r, prec))
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Float::make(self.man.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn neg(&self) -> Self {
        Float { man: -&self.man, exp: self.exp, prec: self.prec }
    }

    pub fn abs(&self) -> Self {
        Float { man: self.man.abs(), exp: self.exp, prec: self.prec }
    }

    /// Binary exponent of the leading bit; `None` for zero.
    pub fn ilog2(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.man.bits() as i64 - 1)
        }
    }

    /// Approximate `log10 |x|`; `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.man.bits() as i64;
        let keep = bits.min(60);
        let top = (self.man.abs() >> (bits - keep) as usize).to_f64().unwrap_or(1.0);
        (top.log2() + (self.exp + bits - keep) as f64) / LOG2_10
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits() as i64;
        let keep = bits.min(60);
        let top = (&self.man >> (bits - keep) as usize).to_f64().unwrap_or(0.0);
        let e = self.exp + bits - keep;
        if e > 2000 {
            return top.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        top * 2f64.powi(e as i32)
    }

    /// Exact rational value.
    pub fn to_ratio(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as usize)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Nearest integer (ties away from zero).
    pub fn round_to_int(&self) -> BigInt {
        if self.exp >= 0 {
            return &self.man << self.exp as usize;
        }
        let shift = (-self.exp) as u64;
        let mag = self.man.magnitude();
        let q = mag >> shift;
        let rem = mag - (&q << shift);
        let half = BigUint::one() << (shift - 1);
        let q = if rem >= half { q + 1u32 } else { q };
        BigInt::from_biguint(self.man.sign(), q)
    }

    pub fn floor_to_int(&self) -> BigInt {
        if self.exp >= 0 {
            return &self.man << self.exp as usize;
        }
        self.man.div_floor(&(BigInt::one() << (-self.exp) as usize))
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Float { man: self.man.clone(), exp: self.exp + k, prec: self.prec }
    }

    fn exact_add(a: &Float, b: &Float) -> (BigInt, i64) {
        if a.exp >= b.exp {
            ((&a.man << (a.exp - b.exp) as usize) + &b.man, b.exp)
        } else {
            (&a.man + (&b.man << (b.exp - a.exp) as usize), a.exp)
        }
    }

    pub fn add(&self, other: &Float) -> Float {
        let prec = self.prec.max(other.prec);
        if self.is_zero() {
            return other.with_prec(prec);
        }
        if other.is_zero() {
            return self.with_prec(prec);
        }
        let (ta, tb) = (self.ilog2().unwrap(), other.ilog2().unwrap());
        // an addend far below the last kept bit only matters through rounding
        let gap = prec as i64 + 4;
        if ta - tb > gap {
            let tiny = Float { man: other.man.signum(), exp: ta - gap, prec };
            let (m, e) = Float::exact_add(self, &tiny);
            return Float::make(m, e, prec);
        }
        if tb - ta > gap {
            let tiny = Float { man: self.man.signum(), exp: tb - gap, prec };
            let (m, e) = Float::exact_add(other, &tiny);
            return Float::make(m, e, prec);
        }
        let (m, e) = Float::exact_add(self, other);
        Float::make(m, e, prec)
    }

    pub fn sub(&self, other: &Float) -> Float {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Float) -> Float {
        let prec = self.prec.max(other.prec);
        Float::make(&self.man * &other.man, self.exp + other.exp, prec)
    }

    pub fn mul_i64(&self, k: i64) -> Float {
        Float::make(&self.man * k, self.exp, self.prec)
    }

    /// Division; panics on a zero divisor.
    pub fn div(&self, other: &Float) -> Float {
        assert!(!other.is_zero(), "Float division by zero");
        let prec = self.prec.max(other.prec);
        if self.is_zero() {
            return Float::zero(prec);
        }
        let shift = prec as i64 + 2 + other.man.bits() as i64 - self.man.bits() as i64;
        let shift = shift.max(0);
        let num = &self.man << shift as usize;
        let (q, rem) = num.div_rem(&other.man);
        let q = if rem.is_zero() { q << 1usize } else { (q << 1usize) + (self.man.signum() * other.man.signum()) };
        Float::make(q, self.exp - other.exp - shift - 1, prec)
    }

    pub fn div_i64(&self, k: i64) -> Float {
        self.div(&Float::from_i64(k, self.prec))
    }

    pub fn sqrt(&self) -> Float {
        assert!(!self.is_negative(), "sqrt of negative Float");
        if self.is_zero() {
            return self.clone();
        }
        let prec = self.prec;
        // mantissa of at least 2*prec + 4 bits with an even exponent
        let mut shift = (2 * prec as i64 + 4 - self.man.bits() as i64).max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let m = (&self.man << shift as usize).to_biguint().unwrap();
        let r = m.sqrt();
        let sticky = if &r * &r == m { 0u32 } else { 1 };
        let r = (r << 1usize) + sticky;
        Float::make(BigInt::from(r), (self.exp - shift) / 2 - 1, prec)
    }

    pub fn cmp(&self, other: &Float) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let mag = self.cmp_abs(other);
        if sa > 0 {
            mag
        } else {
            mag.reverse()
        }
    }

    pub fn cmp_abs(&self, other: &Float) -> Ordering {
        match (self.ilog2(), other.ilog2()) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) if a != b => a.cmp(&b),
            _ => {
                let (a, b) = (self.man.abs(), other.man.abs());
                if self.exp >= other.exp {
                    (a << (self.exp - other.exp) as usize).cmp(&b)
                } else {
                    a.cmp(&(b << (other.exp - self.exp) as usize))
                }
            }
        }
    }

    /// `10^k` at this precision.
    pub fn pow10(k: i64, prec: u32) -> Float {
        let p = BigInt::from(10u32).pow(k.unsigned_abs() as u32);
        if k >= 0 {
            Float::from_bigint(&p, prec)
        } else {
            Float::from_ratio(&BigRational::new(BigInt::one(), p), prec)
        }
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: u32) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let lower = BigInt::from(10u32).pow(digits - 1);
        let upper = BigInt::from(10u32).pow(digits);
        let mut e10 = self.log10_abs().floor() as i64;
        let mut n = self.scaled_decimal(digits as i64 - 1 - e10);
        if n >= upper {
            e10 += 1;
            n = self.scaled_decimal(digits as i64 - 1 - e10);
        } else if n < lower {
            e10 -= 1;
            n = self.scaled_decimal(digits as i64 - 1 - e10);
        }
        if n >= upper {
            n = lower.clone();
            e10 += 1;
        }
        let s = n.to_string();
        let sign = if self.is_negative() { "-" } else { "" };
        // trim trailing zeros of the fraction
        let mut body = s;
        while body.len() > 1 && body.ends_with('0') {
            body.pop();
        }
        if (-6..=digits as i64 + 6).contains(&e10) {
            if e10 >= 0 {
                let int_len = (e10 + 1) as usize;
                if body.len() <= int_len {
                    let mut out = body.clone();
                    out.extend(std::iter::repeat('0').take(int_len - body.len()));
                    format!("{sign}{out}")
                } else {
                    format!("{sign}{}.{}", &body[..int_len], &body[int_len..])
                }
            } else {
                let zeros = "0".repeat((-e10 - 1) as usize);
                format!("{sign}0.{zeros}{body}")
            }
        } else if body.len() == 1 {
            format!("{sign}{body}e{e10}")
        } else {
            format!("{sign}{}.{}e{e10}", &body[..1], &body[1..])
        }
    }

    /// `round(|x| * 10^k)`.
    fn scaled_decimal(&self, k: i64) -> BigInt {
        let mag = self.man.abs();
        let ten = BigInt::from(10u32);
        let (num, den) = if k >= 0 {
            (mag * ten.pow(k as u32), BigInt::one())
        } else {
            (mag, ten.pow((-k) as u32))
        };
        let (num, den) = if self.exp >= 0 {
            (num << self.exp as usize, den)
        } else {
            (num, den << (-self.exp) as usize)
        };
        let (q, r) = num.div_rem(&den);
        if (r << 1usize) >= den {
            q + 1
        } else {
            q
        }
    }

    // ---------------------------------------------------------------------
    // elementary functions

    pub fn pi(prec: u32) -> Float {
        let w = prec as u64 + 32;
        Float::make(pi_fixed(w), -(w as i64), prec)
    }

    pub fn ln2(prec: u32) -> Float {
        let w = prec as u64 + 32;
        Float::make(ln2_fixed(w), -(w as i64), prec)
    }

    pub fn exp(&self) -> Float {
        let prec = self.prec;
        if self.is_zero() {
            return Float::one(prec);
        }
        let mag = self.ilog2().unwrap().max(0) as u32;
        let wp = prec + mag + 40;
        let x = self.with_prec(wp);
        let ln2 = Float::ln2(wp);
        let k = x.div(&ln2).round_to_int();
        let r = x.sub(&ln2.mul(&Float::from_bigint(&k, wp)));
        let k = k.to_i64().expect("exponent overflow in exp");
        let s = ((prec as f64).sqrt() / 2.0).ceil() as u64 + 1;
        let w = wp as u64 + s + 16;
        let rf = to_fixed(&r.mul_pow2(-(s as i64)), w);
        let mut e = exp_fixed_small(&rf, w);
        let one = BigInt::one() << w as usize;
        for _ in 0..s {
            e = (&e * &e) >> w as usize;
        }
        debug_assert!(e > BigInt::zero() && e < (one << 2usize));
        Float::make(e, k - w as i64, prec)
    }

    /// Natural logarithm of a positive value.
    pub fn ln(&self) -> Float {
        assert!(self.signum() > 0, "ln of non-positive Float");
        let prec = self.prec;
        let e = self.ilog2().unwrap() + 1;
        let s: u32 = 12;
        let wp = prec + 64 + s;
        // m in [1/2, 1)
        let mut m = self.with_prec(wp).mul_pow2(-e);
        for _ in 0..s {
            m = m.sqrt();
        }
        let z = m.sub(&Float::one(wp)).div(&m.add(&Float::one(wp)));
        let w = wp as u64 + 8;
        let zf = to_fixed(&z, w);
        let at = atanh_fixed(&zf, w);
        let lnm = Float::make(at, -(w as i64) + 1 + s as i64, wp);
        let res = lnm.add(&Float::ln2(wp).mul(&Float::from_i64(e, wp)));
        res.with_prec(prec)
    }

    /// Returns `(sin x, cos x)`.
    pub fn sin_cos(&self) -> (Float, Float) {
        let prec = self.prec;
        if self.is_zero() {
            return (Float::zero(prec), Float::one(prec));
        }
        let mag = self.ilog2().unwrap().max(0) as u32;
        let wp = prec + mag + 48;
        let x = self.with_prec(wp);
        let two_pi = Float::pi(wp).mul_pow2(1);
        let k = x.div(&two_pi).round_to_int();
        let r = x.sub(&two_pi.mul(&Float::from_bigint(&k, wp)));
        let s = ((prec as f64).sqrt() / 2.0).ceil() as u64 + 2;
        let w = wp as u64 + 2 * s + 16;
        let rf = to_fixed(&r.mul_pow2(-(s as i64)), w);
        let (mut sn, mut cs) = sin_cos_fixed(&rf, w);
        let one = BigInt::one() << w as usize;
        for _ in 0..s {
            let sn2 = (&sn * &cs) >> (w as usize - 1);
            let cs2 = &one - ((&sn * &sn) >> (w as usize - 1));
            sn = sn2;
            cs = cs2;
        }
        (Float::make(sn, -(w as i64), prec), Float::make(cs, -(w as i64), prec))
    }

    pub fn atan(&self) -> Float {
        let prec = self.prec;
        if self.is_zero() {
            return Float::zero(prec);
        }
        let wp = prec + 48;
        let one = Float::one(wp);
        let x = self.with_prec(wp);
        if x.cmp_abs(&one) == Ordering::Greater {
            let half_pi = Float::pi(wp).mul_pow2(-1);
            let inner = one.div(&x).atan_reduced();
            let r = if x.is_negative() { half_pi.neg().sub(&inner) } else { half_pi.sub(&inner) };
            return r.with_prec(prec);
        }
        x.atan_reduced().with_prec(prec)
    }

    fn atan_reduced(&self) -> Float {
        let wp = self.prec;
        let one = Float::one(wp);
        let s = 8;
        let mut z = self.clone();
        for _ in 0..s {
            z = z.div(&one.add(&one.add(&z.mul(&z)).sqrt()));
        }
        let w = wp as u64 + 16;
        let zf = to_fixed(&z, w);
        let at = atan_fixed(&zf, w);
        Float::make(at, -(w as i64) + s, wp)
    }

    /// `atan2(y, x)` in `(-pi, pi]`; zero for the origin.
    pub fn atan2(y: &Float, x: &Float) -> Float {
        let prec = y.prec.max(x.prec);
        if x.is_zero() && y.is_zero() {
            return Float::zero(prec);
        }
        let pi = Float::pi(prec + 16);
        if x.is_zero() {
            let h = pi.mul_pow2(-1);
            return if y.is_negative() { h.neg() } else { h }.with_prec(prec);
        }
        let base = y.with_prec(prec + 16).div(&x.with_prec(prec + 16)).atan();
        let r = if x.signum() > 0 {
            base
        } else if y.is_negative() {
            base.sub(&pi)
        } else {
            base.add(&pi)
        };
        r.with_prec(prec)
    }
}

impl PartialEq for Float {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl fmt::Display for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.prec as f64) / LOG2_10).floor() as u32;
        write!(f, "{}", self.to_decimal(digits.max(1)))
    }
}

/// Parses `[-]digits[.digits][e[-]digits]` exactly.
pub fn decimal_to_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let (mant, exp) = match s.find(|c| c == 'e' || c == 'E') {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = digits.parse().ok()?;
    let e = exp - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let mut r = if e >= 0 {
        BigRational::from_integer(n * ten.pow(e as u32))
    } else {
        BigRational::new(n, ten.pow((-e) as u32))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

// -------------------------------------------------------------------------
// fixed-point kernels: an integer X stands for X / 2^w

fn to_fixed(x: &Float, w: u64) -> BigInt {
    let e = x.exp + w as i64;
    if e >= 0 {
        &x.man << e as usize
    } else {
        let shift = (-e) as u64;
        let q = BigInt::from_biguint(x.man.sign(), round_shift(x.man.magnitude(), shift));
        q
    }
}

/// `sum_n (-1)^n / ((2n+1) k^(2n+1))` scaled by 2^w.
fn atan_inv_fixed(k: u32, w: u64) -> BigInt {
    let k2 = BigInt::from(k) * BigInt::from(k);
    let mut term = (BigInt::one() << w as usize) / BigInt::from(k);
    let mut sum = BigInt::zero();
    let mut n: u64 = 0;
    while !term.is_zero() {
        let t = &term / BigInt::from(2 * n + 1);
        if n % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        term /= &k2;
        n += 1;
    }
    sum
}

fn pi_fixed(w: u64) -> BigInt {
    let g = w + 16;
    let v = atan_inv_fixed(5, g) * 16 - atan_inv_fixed(239, g) * 4;
    v >> 16usize
}

fn ln2_fixed(w: u64) -> BigInt {
    // ln 2 = 2 atanh(1/3)
    let g = w + 16;
    let nine = BigInt::from(9);
    let mut term = (BigInt::one() << g as usize) / BigInt::from(3);
    let mut sum = BigInt::zero();
    let mut n: u64 = 0;
    while !term.is_zero() {
        sum += &term / BigInt::from(2 * n + 1);
        term /= &nine;
        n += 1;
    }
    (sum * 2) >> 16usize
}

fn exp_fixed_small(x: &BigInt, w: u64) -> BigInt {
    let one = BigInt::one() << w as usize;
    let mut sum = one.clone();
    let mut term = one;
    let mut n = 1i64;
    loop {
        term = (&term * x) >> w as usize;
        term /= BigInt::from(n);
        if term.is_zero() {
            break;
        }
        sum += &term;
        n += 1;
    }
    sum
}

fn atanh_fixed(z: &BigInt, w: u64) -> BigInt {
    let z2 = (z * z) >> w as usize;
    let mut pow = z.clone();
    let mut sum = BigInt::zero();
    let mut n: i64 = 0;
    loop {
        let t = &pow / BigInt::from(2 * n + 1);
        if t.is_zero() {
            break;
        }
        sum += t;
        pow = (&pow * &z2) >> w as usize;
        n += 1;
    }
    sum
}

fn atan_fixed(z: &BigInt, w: u64) -> BigInt {
    let z2 = (z * z) >> w as usize;
    let mut pow = z.clone();
    let mut sum = BigInt::zero();
    let mut n: i64 = 0;
    loop {
        let t = &pow / BigInt::from(2 * n + 1);
        if t.is_zero() {
            break;
        }
        if n % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        pow = (&pow * &z2) >> w as usize;
        n += 1;
    }
    sum
}

fn sin_cos_fixed(x: &BigInt, w: u64) -> (BigInt, BigInt) {
    let one = BigInt::one() << w as usize;
    let x2 = (x * x) >> w as usize;
    let mut sn = x.clone();
    let mut term = x.clone();
    let mut n = 1i64;
    loop {
        term = -((&term * &x2) >> w as usize) / BigInt::from((2 * n) * (2 * n + 1));
        if term.is_zero() {
            break;
        }
        sn += &term;
        n += 1;
    }
    let mut cs = one.clone();
    let mut term = one;
    let mut n = 1i64;
    loop {
        term = -((&term * &x2) >> w as usize) / BigInt::from((2 * n - 1) * (2 * n));
        if term.is_zero() {
            break;
        }
        cs += &term;
        n += 1;
    }
    (sn, cs)
}
