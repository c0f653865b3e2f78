use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::complex::FloatComplex;
use super::float::{bits_for_digits, decimal_to_ratio, Float};
use super::gauss::GaussRat;
use crate::error::{Error, Result};

/// How a declared constant is evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstantDef {
    One,
    /// A decimal literal, taken as the exact value.
    Decimal(String),
    Pi,
    E,
    Sqrt(BigRational),
    Log(BigRational),
    Exp(BigRational),
    Cos(BigRational),
    Sin(BigRational),
}

fn parse_arg(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    decimal_to_ratio(s)
}

fn render_ratio(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl ConstantDef {
    /// Parses `pi`, `e`, `sqrt(r)`, `log(r)`, `exp(r)`, `cos(r)`, `sin(r)` or a decimal literal.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "pi" => return Ok(ConstantDef::Pi),
            "e" => return Ok(ConstantDef::E),
            "1" => return Ok(ConstantDef::One),
            _ => {}
        }
        if let Some(open) = s.find('(') {
            let name = s[..open].trim();
            let inner = s[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced parenthesis in `{s}`")))?;
            let arg = parse_arg(inner)
                .ok_or_else(|| Error::Parse(format!("bad argument `{inner}` in `{s}`")))?;
            let def = match name {
                "sqrt" if arg.is_positive() => ConstantDef::Sqrt(arg),
                "log" if arg.is_positive() => ConstantDef::Log(arg),
                "exp" => ConstantDef::Exp(arg),
                "cos" => ConstantDef::Cos(arg),
                "sin" => ConstantDef::Sin(arg),
                _ => return Err(Error::Parse(format!("unsupported constant expression `{s}`"))),
            };
            return Ok(def);
        }
        if decimal_to_ratio(s).is_none() {
            return Err(Error::Parse(format!("malformed decimal `{s}`")));
        }
        Ok(ConstantDef::Decimal(s.to_string()))
    }

    pub fn eval(&self, prec: u32) -> Float {
        let w = prec + 32;
        let v = match self {
            ConstantDef::One => Float::one(w),
            ConstantDef::Decimal(s) => Float::from_ratio(&decimal_to_ratio(s).unwrap(), w),
            ConstantDef::Pi => Float::pi(w),
            ConstantDef::E => Float::one(w).exp(),
            ConstantDef::Sqrt(r) => Float::from_ratio(r, w).sqrt(),
            ConstantDef::Log(r) => Float::from_ratio(r, w).ln(),
            ConstantDef::Exp(r) => Float::from_ratio(r, w).exp(),
            ConstantDef::Cos(r) => Float::from_ratio(r, w).sin_cos().1,
            ConstantDef::Sin(r) => Float::from_ratio(r, w).sin_cos().0,
        };
        v.with_prec(prec)
    }
}

impl fmt::Display for ConstantDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstantDef::One => write!(f, "1"),
            ConstantDef::Decimal(s) => write!(f, "{s}"),
            ConstantDef::Pi => write!(f, "pi"),
            ConstantDef::E => write!(f, "e"),
            ConstantDef::Sqrt(r) => write!(f, "sqrt({})", render_ratio(r)),
            ConstantDef::Log(r) => write!(f, "log({})", render_ratio(r)),
            ConstantDef::Exp(r) => write!(f, "exp({})", render_ratio(r)),
            ConstantDef::Cos(r) => write!(f, "cos({})", render_ratio(r)),
            ConstantDef::Sin(r) => write!(f, "sin({})", render_ratio(r)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constant {
    pub name: String,
    pub def: ConstantDef,
    pub description: String,
}

/// Ordered constants `1, c_1, .., c_k`, declared Q-linearly independent.
///
/// Independence is an input contract: it is recorded, never checked.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantBasis {
    constants: Vec<Constant>,
    approx: Vec<f64>,
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl ConstantBasis {
    /// Builds a basis; the constant `1` is prepended automatically.
    pub fn new(declared: Vec<Constant>) -> Result<Self> {
        let mut constants = vec![Constant {
            name: "1".into(),
            def: ConstantDef::One,
            description: "unit".into(),
        }];
        for c in declared {
            if !is_identifier(&c.name) || c.name == "i" {
                return Err(Error::InvalidBasis(format!("`{}` is not a valid constant name", c.name)));
            }
            if constants.iter().any(|o| o.name == c.name) {
                return Err(Error::InvalidBasis(format!("duplicate constant `{}`", c.name)));
            }
            if c.def == ConstantDef::One {
                return Err(Error::InvalidBasis(format!("`{}` duplicates the unit constant", c.name)));
            }
            let probe = c.def.eval(128);
            if probe.is_zero() || probe.log10_abs() < -30.0 {
                return Err(Error::InvalidBasis(format!("constant `{}` is zero", c.name)));
            }
            constants.push(c);
        }
        let approx = constants.iter().map(|c| c.def.eval(64).to_f64()).collect();
        Ok(ConstantBasis { constants, approx })
    }

    /// The basis `{1}`.
    pub fn rational() -> Self {
        ConstantBasis::new(Vec::new()).unwrap()
    }

    /// Convenience constructor from `(name, definition)` pairs.
    pub fn from_defs(defs: &[(&str, &str)]) -> Result<Self> {
        let mut list = Vec::new();
        for (name, def) in defs {
            list.push(Constant {
                name: name.to_string(),
                def: ConstantDef::parse(def)?,
                description: String::new(),
            });
        }
        ConstantBasis::new(list)
    }

    pub fn len(&self) -> usize {
        self.constants.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn constants(&self) -> &[Constant] {
        &self.constants
    }

    /// User-declared constants, i.e. everything after `1`.
    pub fn declared(&self) -> &[Constant] {
        &self.constants[1..]
    }

    pub fn name(&self, j: usize) -> &str {
        &self.constants[j].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c.name == name)
    }

    pub fn approx(&self) -> &[f64] {
        &self.approx
    }

    /// Values of all constants at `prec` bits.
    pub fn values(&self, prec: u32) -> Vec<Float> {
        self.constants.iter().map(|c| c.def.eval(prec)).collect()
    }
}

/// `Σ coeffs_j · c_j` over a [`ConstantBasis`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicReal {
    pub coeffs: Vec<BigRational>,
}

impl SymbolicReal {
    pub fn zero(len: usize) -> Self {
        SymbolicReal { coeffs: vec![BigRational::zero(); len] }
    }

    pub fn from_rational(r: BigRational, len: usize) -> Self {
        let mut x = SymbolicReal::zero(len);
        x.coeffs[0] = r;
        x
    }

    /// The basis constant `j` itself.
    pub fn unit(j: usize, len: usize) -> Self {
        let mut x = SymbolicReal::zero(len);
        x.coeffs[j] = BigRational::one();
        x
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        SymbolicReal { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        SymbolicReal { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Self {
        SymbolicReal { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        SymbolicReal { coeffs: self.coeffs.iter().map(|a| a * k).collect() }
    }

    /// `Some(k)` with `self = k · o`, when `o ≠ 0`.
    pub fn ratio_to(&self, o: &Self) -> Option<BigRational> {
        let j = o.coeffs.iter().position(|c| !c.is_zero())?;
        let k = &self.coeffs[j] / &o.coeffs[j];
        if self.coeffs.iter().zip(&o.coeffs).all(|(a, b)| *a == b * &k) {
            Some(k)
        } else {
            None
        }
    }

    pub fn approx(&self, basis_approx: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(basis_approx)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, v)| ratio_to_f64(c) * v)
            .sum()
    }

    pub fn eval(&self, values: &[Float]) -> Float {
        let prec = values[0].prec();
        let mut acc = Float::zero(prec);
        for (c, v) in self.coeffs.iter().zip(values) {
            if c.is_zero() {
                continue;
            }
            let term = if c.is_integer() {
                v.mul(&Float::from_bigint(c.numer(), prec))
            } else {
                v.mul(&Float::from_bigint(c.numer(), prec)).div(&Float::from_bigint(c.denom(), prec))
            };
            acc = acc.add(&term);
        }
        acc
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    Float::from_ratio(r, 60).to_f64()
}

/// `re + i·im` with both parts symbolic reals over the same basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicComplex {
    pub re: SymbolicReal,
    pub im: SymbolicReal,
}

impl SymbolicComplex {
    pub fn new(re: SymbolicReal, im: SymbolicReal) -> Self {
        SymbolicComplex { re, im }
    }

    pub fn zero(len: usize) -> Self {
        SymbolicComplex::new(SymbolicReal::zero(len), SymbolicReal::zero(len))
    }

    pub fn from_gauss(g: &GaussRat, len: usize) -> Self {
        SymbolicComplex::new(
            SymbolicReal::from_rational(g.re.clone(), len),
            SymbolicReal::from_rational(g.im.clone(), len),
        )
    }

    pub fn from_real(re: SymbolicReal) -> Self {
        let len = re.len();
        SymbolicComplex::new(re, SymbolicReal::zero(len))
    }

    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn as_gauss(&self) -> Option<GaussRat> {
        Some(GaussRat::new(self.re.as_rational()?, self.im.as_rational()?))
    }

    pub fn add(&self, o: &Self) -> Self {
        SymbolicComplex::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        SymbolicComplex::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn neg(&self) -> Self {
        SymbolicComplex::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> Self {
        SymbolicComplex::new(self.re.clone(), self.im.neg())
    }

    pub fn mul_i(&self) -> Self {
        SymbolicComplex::new(self.im.neg(), self.re.clone())
    }

    pub fn scale_gauss(&self, g: &GaussRat) -> Self {
        let re = self.re.scale(&g.re).sub(&self.im.scale(&g.im));
        let im = self.re.scale(&g.im).add(&self.im.scale(&g.re));
        SymbolicComplex::new(re, im)
    }

    /// Product; defined when one factor lies in Q(i).
    pub fn mul(&self, o: &Self) -> Result<Self> {
        if let Some(g) = o.as_gauss() {
            return Ok(self.scale_gauss(&g));
        }
        if let Some(g) = self.as_gauss() {
            return Ok(o.scale_gauss(&g));
        }
        Err(Error::NotRepresentable("product of two irrational scalars".into()))
    }

    /// Quotient; defined for divisors in Q(i) or when `self` is a Q(i)-multiple of `o`.
    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(g) = o.as_gauss() {
            return Ok(self.scale_gauss(&g.inv().unwrap()));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        if let Some(k) = self.gauss_ratio(o) {
            return Ok(SymbolicComplex::from_gauss(&k, self.len()));
        }
        Err(Error::NotRepresentable("quotient outside the declared span".into()))
    }

    /// `k ∈ Q(i)` with `self = k · o`. Both parts of `o` are compared against the
    /// constant-wise 2×2 system `[a -b; b a](x, y) = (c, d)`.
    fn gauss_ratio(&self, o: &Self) -> Option<GaussRat> {
        let len = self.len();
        // pick a constant index where o is nonzero
        let j = (0..len).find(|&j| !o.re.coeffs[j].is_zero() || !o.im.coeffs[j].is_zero())?;
        let (a, b) = (&o.re.coeffs[j], &o.im.coeffs[j]);
        let (c, d) = (&self.re.coeffs[j], &self.im.coeffs[j]);
        let det = a * a + b * b;
        let k = GaussRat::new((a * c + b * d) / &det, (a * d - b * c) / &det);
        if o.scale_gauss(&k) == *self {
            Some(k)
        } else {
            None
        }
    }

    pub fn approx(&self, basis_approx: &[f64]) -> (f64, f64) {
        (self.re.approx(basis_approx), self.im.approx(basis_approx))
    }

    pub fn eval(&self, values: &[Float]) -> FloatComplex {
        FloatComplex::new(self.re.eval(values), self.im.eval(values))
    }
}

/// Value of `x` to `digits` significant decimal digits (error below `10^(1-digits)`).
pub fn evaluate(x: &SymbolicComplex, basis: &ConstantBasis, digits: u32) -> FloatComplex {
    let prec = bits_for_digits(digits);
    let vals = basis.values(prec + 16);
    x.eval(&vals).with_prec(prec)
}
