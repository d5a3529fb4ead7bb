//! Configurable-precision binary floating point.
//!
//! Every value carries the significand width it was rounded to. All
//! primitives round to nearest, ties to even, so each operation satisfies
//! `computed = exact * (1 + theta)` with `|theta| <= 2^-b`. Complex
//! arithmetic is composed from the real primitives, one rounding per real
//! operation.

mod constants;

pub use constants::{Angle, Constant};

use std::cmp::Ordering;
use std::fmt;

use rug::float::Round;
use rug::{Assign, Float, Integer};
use thiserror::Error;

/// Smallest supported significand width.
pub const MIN_BITS: u32 = 2;
/// Largest supported significand width.
pub const MAX_BITS: u32 = 256;
/// Significand width of the ground-truth reference runs.
pub const REFERENCE_BITS: u32 = 128;

/// Extra bits used for intermediate evaluations (constants, distances).
pub(crate) const GUARD_BITS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("significand width {0} outside [{MIN_BITS}, {MAX_BITS}]")]
    InvalidPrecision(u32),
    #[error("mixed precision operands ({0} and {1} bits)")]
    MixedPrecision(u32, u32),
    #[error("exponent overflow")]
    Overflow,
    #[error("exponent underflow")]
    Underflow,
    #[error("value is not finite")]
    NonFinite,
    #[error("invalid angle literal `{0}`")]
    InvalidAngle(String),
    #[error("invalid decimal literal `{0}`")]
    InvalidLiteral(String),
}

pub type Result<T, E = NumericsError> = std::result::Result<T, E>;

/// Significand width `b`; rounding is always to nearest, ties to even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrecConfig {
    bits: u32,
}

impl PrecConfig {
    pub const SINGLE: PrecConfig = PrecConfig { bits: 24 };
    pub const DOUBLE: PrecConfig = PrecConfig { bits: 53 };
    pub const REFERENCE: PrecConfig = PrecConfig {
        bits: REFERENCE_BITS,
    };

    pub fn new(bits: u32) -> Result<Self> {
        if (MIN_BITS..=MAX_BITS).contains(&bits) {
            Ok(PrecConfig { bits })
        } else {
            Err(NumericsError::InvalidPrecision(bits))
        }
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    /// Unit roundoff `2^-b`.
    pub fn unit_roundoff(self) -> f64 {
        (-(self.bits as f64)).exp2()
    }

    fn check(self, other: PrecConfig) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(NumericsError::MixedPrecision(self.bits, other.bits))
        }
    }
}

impl fmt::Display for PrecConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.bits)
    }
}

/// A real number with `b` significand bits.
#[derive(Clone, Debug)]
pub struct PrecValue {
    cfg: PrecConfig,
    value: Float,
}

fn finite(value: Float) -> Result<Float> {
    if value.is_finite() {
        Ok(value)
    } else if value.is_infinite() {
        Err(NumericsError::Overflow)
    } else {
        Err(NumericsError::NonFinite)
    }
}

impl PrecValue {
    pub fn zero(cfg: PrecConfig) -> Self {
        PrecValue {
            cfg,
            value: Float::new(cfg.bits),
        }
    }

    pub fn one(cfg: PrecConfig) -> Self {
        PrecValue {
            cfg,
            value: Float::with_val(cfg.bits, 1u32),
        }
    }

    /// Rounds `x` (of any precision) to the nearest `b`-bit value.
    pub fn round_to(cfg: PrecConfig, x: &Float) -> Result<Self> {
        if !x.is_finite() {
            return Err(NumericsError::NonFinite);
        }
        let value = finite(Float::with_val(cfg.bits, x))?;
        if value.is_zero() && !x.is_zero() {
            return Err(NumericsError::Underflow);
        }
        Ok(PrecValue { cfg, value })
    }

    pub fn from_f64(cfg: PrecConfig, x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(NumericsError::NonFinite);
        }
        PrecValue::round_to(cfg, &Float::with_val(53, x))
    }

    /// Correctly rounded `num / den`.
    pub fn from_ratio(cfg: PrecConfig, num: i64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(NumericsError::NonFinite);
        }
        let exact = Float::with_val(64, num);
        let value = Float::with_val(cfg.bits, &exact / den);
        Ok(PrecValue { cfg, value })
    }

    /// Correctly rounded decimal literal (`-1.25e-3`).
    pub fn parse_decimal(cfg: PrecConfig, text: &str) -> Result<Self> {
        if !constants::is_decimal_literal(text) {
            return Err(NumericsError::InvalidLiteral(text.to_string()));
        }
        let parsed =
            Float::parse(text).map_err(|_| NumericsError::InvalidLiteral(text.to_string()))?;
        let value = finite(Float::with_val(cfg.bits, parsed))?;
        Ok(PrecValue { cfg, value })
    }

    pub fn config(&self) -> PrecConfig {
        self.cfg
    }

    pub fn as_float(&self) -> &Float {
        &self.value
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Same value re-rounded to another width (exact when widening).
    pub fn convert(&self, cfg: PrecConfig) -> Result<Self> {
        PrecValue::round_to(cfg, &self.value)
    }

    pub fn add(&self, rhs: &PrecValue) -> Result<Self> {
        self.cfg.check(rhs.cfg)?;
        let value = finite(Float::with_val(self.cfg.bits, &self.value + &rhs.value))?;
        Ok(PrecValue {
            cfg: self.cfg,
            value,
        })
    }

    pub fn sub(&self, rhs: &PrecValue) -> Result<Self> {
        self.cfg.check(rhs.cfg)?;
        let value = finite(Float::with_val(self.cfg.bits, &self.value - &rhs.value))?;
        Ok(PrecValue {
            cfg: self.cfg,
            value,
        })
    }

    pub fn mul(&self, rhs: &PrecValue) -> Result<Self> {
        self.cfg.check(rhs.cfg)?;
        let value = finite(Float::with_val(self.cfg.bits, &self.value * &rhs.value))?;
        if value.is_zero() && !self.value.is_zero() && !rhs.value.is_zero() {
            return Err(NumericsError::Underflow);
        }
        Ok(PrecValue {
            cfg: self.cfg,
            value,
        })
    }

    pub fn div(&self, rhs: &PrecValue) -> Result<Self> {
        self.cfg.check(rhs.cfg)?;
        if rhs.value.is_zero() {
            return Err(NumericsError::NonFinite);
        }
        let value = finite(Float::with_val(self.cfg.bits, &self.value / &rhs.value))?;
        if value.is_zero() && !self.value.is_zero() {
            return Err(NumericsError::Underflow);
        }
        Ok(PrecValue {
            cfg: self.cfg,
            value,
        })
    }

    pub fn neg(&self) -> Self {
        PrecValue {
            cfg: self.cfg,
            value: Float::with_val(self.cfg.bits, -&self.value),
        }
    }

    /// Exact key: equal values (including `+0`/`-0`) give equal keys.
    pub(crate) fn exact_key(&self) -> Option<(Integer, i32)> {
        self.value.to_integer_exp().map(|(mut m, e)| {
            let shift = m.find_one(0).unwrap_or(0);
            m >>= shift;
            (m, e + shift as i32)
        })
    }
}

/// Values compare by number; the precision tag must also agree.
impl PartialEq for PrecValue {
    fn eq(&self, other: &Self) -> bool {
        self.cfg == other.cfg && self.value == other.value
    }
}

impl PartialOrd for PrecValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.cfg != other.cfg {
            return None;
        }
        self.value.partial_cmp(&other.value)
    }
}

impl fmt::Display for PrecValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&full_precision_string(&self.value))
    }
}

/// Shortest decimal string that reads back to the same value at its precision.
pub(crate) fn full_precision_string(x: &Float) -> String {
    if x.is_zero() {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let s = x.to_string_radix(10, None);
    match s.split_once('e') {
        Some((mant, "0")) => mant.to_string(),
        _ => s,
    }
}

/// Complex number whose parts share one precision.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecComplex {
    pub re: PrecValue,
    pub im: PrecValue,
}

impl PrecComplex {
    pub fn new(re: PrecValue, im: PrecValue) -> Result<Self> {
        re.cfg.check(im.cfg)?;
        Ok(PrecComplex { re, im })
    }

    pub fn real(re: PrecValue) -> Self {
        let im = PrecValue::zero(re.cfg);
        PrecComplex { re, im }
    }

    pub fn zero(cfg: PrecConfig) -> Self {
        PrecComplex::real(PrecValue::zero(cfg))
    }

    pub fn one(cfg: PrecConfig) -> Self {
        PrecComplex::real(PrecValue::one(cfg))
    }

    pub fn from_f64(cfg: PrecConfig, re: f64, im: f64) -> Result<Self> {
        Ok(PrecComplex {
            re: PrecValue::from_f64(cfg, re)?,
            im: PrecValue::from_f64(cfg, im)?,
        })
    }

    pub fn config(&self) -> PrecConfig {
        self.re.cfg
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn convert(&self, cfg: PrecConfig) -> Result<Self> {
        Ok(PrecComplex {
            re: self.re.convert(cfg)?,
            im: self.im.convert(cfg)?,
        })
    }

    /// Two rounded real additions.
    pub fn add(&self, rhs: &PrecComplex) -> Result<Self> {
        Ok(PrecComplex {
            re: self.re.add(&rhs.re)?,
            im: self.im.add(&rhs.im)?,
        })
    }

    pub fn sub(&self, rhs: &PrecComplex) -> Result<Self> {
        Ok(PrecComplex {
            re: self.re.sub(&rhs.re)?,
            im: self.im.sub(&rhs.im)?,
        })
    }

    /// `(a+bi)(c+di) = (ac - bd) + (ad + bc)i` with four rounded products
    /// and two rounded sums.
    pub fn mul(&self, rhs: &PrecComplex) -> Result<Self> {
        let ac = self.re.mul(&rhs.re)?;
        let bd = self.im.mul(&rhs.im)?;
        let ad = self.re.mul(&rhs.im)?;
        let bc = self.im.mul(&rhs.re)?;
        Ok(PrecComplex {
            re: ac.sub(&bd)?,
            im: ad.add(&bc)?,
        })
    }

    pub fn neg(&self) -> Self {
        PrecComplex {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    /// `|self - other|` evaluated with guard bits, for values of any precisions.
    pub fn distance(&self, other: &PrecComplex) -> Float {
        let prec = self.config().bits.max(other.config().bits) + GUARD_BITS;
        modulus_of_difference(prec, self, other)
    }

    /// `|self|^2` with guard bits.
    pub fn norm_sqr(&self) -> Float {
        let prec = self.config().bits * 2 + GUARD_BITS;
        let mut acc = Float::with_val(prec, self.re.as_float().square_ref());
        acc += Float::with_val(prec, self.im.as_float().square_ref());
        acc
    }

    pub fn modulus(&self) -> Float {
        self.norm_sqr().sqrt()
    }
}

pub(crate) fn modulus_of_difference(prec: u32, a: &PrecComplex, b: &PrecComplex) -> Float {
    let mut dr = Float::new(prec);
    dr.assign(a.re.as_float() - b.re.as_float());
    let mut di = Float::new(prec);
    di.assign(a.im.as_float() - b.im.as_float());
    dr.square_round(Round::Nearest);
    di.square_round(Round::Nearest);
    dr += &di;
    dr.sqrt()
}

impl fmt::Display for PrecComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.im.as_float().is_sign_negative() {
            write!(f, "{}-{}i", self.re, self.im.neg())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}
