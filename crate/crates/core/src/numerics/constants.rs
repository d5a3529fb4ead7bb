use std::fmt;
use std::str::FromStr;

use rug::float::Constant as MpConstant;
use rug::Float;

use super::{NumericsError, PrecComplex, PrecConfig, PrecValue, Result, GUARD_BITS};

/// An angle in radians, kept in the exact form it was written in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Angle {
    /// `±pi / denominator`.
    PiFraction { negative: bool, denominator: u64 },
    /// A finite decimal literal, stored verbatim.
    Decimal(String),
}

impl Angle {
    pub fn pi_over(denominator: u64) -> Self {
        Angle::PiFraction {
            negative: false,
            denominator,
        }
    }

    pub fn minus_pi_over(denominator: u64) -> Self {
        Angle::PiFraction {
            negative: true,
            denominator,
        }
    }

    pub fn decimal(text: &str) -> Result<Self> {
        if is_decimal_literal(text) {
            Ok(Angle::Decimal(text.to_string()))
        } else {
            Err(NumericsError::InvalidAngle(text.to_string()))
        }
    }

    /// Decimal literal carrying `digits` significant digits of `x`, in
    /// positional notation unless the exponent is extreme.
    pub fn from_float(x: &Float, digits: usize) -> Self {
        if x.is_zero() {
            return Angle::Decimal("0".to_string());
        }
        let s = x.to_string_radix(10, Some(digits.max(1)));
        Angle::Decimal(positional(&s))
    }

    pub fn negated(&self) -> Self {
        match self {
            Angle::PiFraction {
                negative,
                denominator,
            } => Angle::PiFraction {
                negative: !negative,
                denominator: *denominator,
            },
            Angle::Decimal(s) => Angle::Decimal(match s.strip_prefix('-') {
                Some(rest) => rest.to_string(),
                None => format!("-{}", s.strip_prefix('+').unwrap_or(s)),
            }),
        }
    }

    /// `angle * 2^scale` at `prec` bits.
    fn eval_scaled(&self, prec: u32, scale: i32) -> Result<Float> {
        let mut v = match self {
            Angle::PiFraction {
                negative,
                denominator,
            } => {
                if *denominator == 0 {
                    return Err(NumericsError::InvalidAngle(self.to_string()));
                }
                let v = Float::with_val(prec, MpConstant::Pi) / *denominator;
                if *negative {
                    -v
                } else {
                    v
                }
            }
            Angle::Decimal(s) => {
                let parsed =
                    Float::parse(s).map_err(|_| NumericsError::InvalidAngle(s.clone()))?;
                Float::with_val(prec, parsed)
            }
        };
        if scale >= 0 {
            v <<= scale as u32;
        } else {
            v >>= scale.unsigned_abs();
        }
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumericsError::NonFinite)
        }
    }

    /// Radians at `prec` bits.
    pub fn value(&self, prec: u32) -> Result<Float> {
        self.eval_scaled(prec, 0)
    }

    /// `(cos, sin)` of `angle * 2^scale` when it is an integer multiple of
    /// `pi/2`.
    fn quadrant(&self, scale: i32) -> Option<(i32, i32)> {
        let Angle::PiFraction {
            negative,
            denominator,
        } = self
        else {
            return None;
        };
        // angle * 2^scale = ±pi * 2^scale / den; a multiple of pi/2 iff
        // 2^(scale+1) / den is an integer.
        let den = *denominator as u128;
        let exp = scale + 1;
        let quarter_turns: u128 = if exp >= 0 {
            if exp > 64 {
                return None;
            }
            let num = 1u128 << exp;
            if !num.is_multiple_of(den) {
                return None;
            }
            num / den
        } else {
            return None;
        };
        let q = (quarter_turns % 4) as i32;
        let q = if *negative { (4 - q) % 4 } else { q };
        Some(match q {
            0 => (1, 0),
            1 => (0, 1),
            2 => (-1, 0),
            _ => (0, -1),
        })
    }

    /// `cos(angle * 2^scale)` and `sin(angle * 2^scale)` rounded to `cfg`.
    ///
    /// The argument is evaluated with 64 guard bits and the functions are
    /// correctly rounded for that argument, so the result is within one ulp
    /// of the true value (exact at multiples of `pi/2`).
    pub(crate) fn cos_sin_scaled(
        &self,
        cfg: PrecConfig,
        scale: i32,
    ) -> Result<(PrecValue, PrecValue)> {
        if let Some((c, s)) = self.quadrant(scale) {
            return Ok((
                PrecValue::from_ratio(cfg, c as i64, 1)?,
                PrecValue::from_ratio(cfg, s as i64, 1)?,
            ));
        }
        let arg = self.eval_scaled(cfg.bits() + GUARD_BITS, scale)?;
        let wide = cfg.bits() + GUARD_BITS;
        let cos = PrecValue::round_to(cfg, &Float::with_val(wide, arg.cos_ref()))?;
        let sin = PrecValue::round_to(cfg, &Float::with_val(wide, arg.sin_ref()))?;
        Ok((cos, sin))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::PiFraction {
                negative,
                denominator,
            } => write!(f, "{}pi/{}", if *negative { "-" } else { "" }, denominator),
            Angle::Decimal(s) => f.write_str(s),
        }
    }
}

impl FromStr for Angle {
    type Err = NumericsError;

    /// Accepts a decimal literal, `[-]pi/<int>` or `[-]pi/2^<int>`.
    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        let (negative, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        if let Some(den) = body.strip_prefix("pi/") {
            let bad = || NumericsError::InvalidAngle(text.to_string());
            let denominator = if let Some(exp) = den.strip_prefix("2^") {
                let e: u32 = parse_digits(exp).ok_or_else(bad)?;
                if e > 63 {
                    return Err(bad());
                }
                1u64 << e
            } else {
                parse_digits(den).ok_or_else(bad)?
            };
            if denominator == 0 {
                return Err(bad());
            }
            return Ok(Angle::PiFraction {
                negative,
                denominator,
            });
        }
        Angle::decimal(t)
    }
}

/// Rewrites MPFR's `[-]d.ddd[e<exp>]` as a plain decimal when `|exp| <= 30`,
/// dropping trailing fractional zeros.
fn positional(s: &str) -> String {
    let (mant, exp) = match s.split_once('e') {
        Some((m, e)) => (m, e.parse::<i32>().unwrap_or(i32::MAX)),
        None => (s, 0),
    };
    if exp.abs() > 30 {
        return s.to_string();
    }
    let (sign, mant) = match mant.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mant),
    };
    let digits: String = mant.chars().filter(|c| *c != '.').collect();
    let point = mant.find('.').unwrap_or(mant.len()) as i32 + exp;
    let (int, frac) = if point <= 0 {
        ("0".to_string(), "0".repeat((-point) as usize) + &digits)
    } else if point as usize >= digits.len() {
        (digits.clone() + &"0".repeat(point as usize - digits.len()), String::new())
    } else {
        let (i, f) = digits.split_at(point as usize);
        (i.to_string(), f.to_string())
    };
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

fn parse_digits<T: FromStr>(s: &str) -> Option<T> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// `[+-]? (digits [. digits?] | . digits) ([eE] [+-]? digits)?`
pub(crate) fn is_decimal_literal(s: &str) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return false;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return false;
        }
    }
    i == b.len()
}

/// Named constants that occur as gate-matrix elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constant {
    /// `1/sqrt(2)`, correctly rounded.
    SqrtHalf,
    Cos(Angle),
    Sin(Angle),
    /// `e^{i theta} = cos(theta) + i sin(theta)`.
    ExpI(Angle),
}

impl Constant {
    pub fn eval(&self, cfg: PrecConfig) -> Result<PrecComplex> {
        match self {
            Constant::SqrtHalf => {
                let half = Float::with_val(cfg.bits(), 0.5f64);
                let v = Float::with_val(cfg.bits(), half.sqrt_ref());
                Ok(PrecComplex::real(PrecValue::round_to(cfg, &v)?))
            }
            Constant::Cos(a) => Ok(PrecComplex::real(a.cos_sin_scaled(cfg, 0)?.0)),
            Constant::Sin(a) => Ok(PrecComplex::real(a.cos_sin_scaled(cfg, 0)?.1)),
            Constant::ExpI(a) => {
                let (c, s) = a.cos_sin_scaled(cfg, 0)?;
                PrecComplex::new(c, s)
            }
        }
    }
}
