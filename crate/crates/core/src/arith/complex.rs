use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;

use super::float::Float;

/// Complex number with `Float` parts sharing one precision.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatComplex {
    pub re: Float,
    pub im: Float,
}

impl FloatComplex {
    pub fn new(re: Float, im: Float) -> Self {
        FloatComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        FloatComplex::new(Float::zero(prec), Float::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        FloatComplex::new(Float::one(prec), Float::zero(prec))
    }

    pub fn real(re: Float) -> Self {
        let p = re.prec();
        FloatComplex::new(re, Float::zero(p))
    }

    pub fn i(prec: u32) -> Self {
        FloatComplex::new(Float::zero(prec), Float::one(prec))
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        FloatComplex::new(Float::from_f64(re, prec), Float::from_f64(im, prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        FloatComplex::new(self.re.with_prec(prec), self.im.with_prec(prec))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        FloatComplex::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        FloatComplex::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn neg(&self) -> Self {
        FloatComplex::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> Self {
        FloatComplex::new(self.re.clone(), self.im.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        FloatComplex::new(re, im)
    }

    pub fn scale(&self, k: &Float) -> Self {
        FloatComplex::new(self.re.mul(k), self.im.mul(k))
    }

    pub fn mul_i(&self) -> Self {
        FloatComplex::new(self.im.neg(), self.re.clone())
    }

    pub fn norm_sqr(&self) -> Float {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    /// Largest of `|re|`, `|im|`; cheap magnitude proxy.
    pub fn max_abs(&self) -> Float {
        if self.re.cmp_abs(&self.im) == Ordering::Less {
            self.im.abs()
        } else {
            self.re.abs()
        }
    }

    pub fn inv(&self) -> Self {
        let d = self.norm_sqr();
        FloatComplex::new(self.re.div(&d), self.im.neg().div(&d))
    }

    pub fn div(&self, o: &Self) -> Self {
        if o.im.is_zero() {
            return FloatComplex::new(self.re.div(&o.re), self.im.div(&o.re));
        }
        self.mul(&o.inv())
    }

    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        FloatComplex::new(m.mul(&c), m.mul(&s))
    }

    /// Principal logarithm; the negative real axis maps to imaginary part `+pi`.
    pub fn ln(&self) -> Self {
        assert!(!self.is_zero(), "logarithm of zero");
        let re = self.abs().ln();
        let im = Float::atan2(&self.im, &self.re);
        FloatComplex::new(re, im)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// Lexicographic order on (re, im).
    pub fn cmp_lex(&self, o: &Self) -> Ordering {
        self.re.cmp(&o.re).then_with(|| self.im.cmp(&o.im))
    }

    pub fn to_decimal(&self, digits: u32) -> String {
        if self.im.is_zero() {
            return self.re.to_decimal(digits);
        }
        if self.re.is_zero() {
            return format!("{} i", self.im.to_decimal(digits));
        }
        let im = self.im.to_decimal(digits);
        match im.strip_prefix('-') {
            Some(rest) => format!("{} - {} i", self.re.to_decimal(digits), rest),
            None => format!("{} + {} i", self.re.to_decimal(digits), im),
        }
    }
}

impl fmt::Display for FloatComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.prec() as f64 / 3.3219).floor() as u32;
        write!(f, "{}", self.to_decimal(digits.max(1)))
    }
}
