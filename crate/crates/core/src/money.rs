//! Exact monetary arithmetic.
//!
//! Every amount (budget, cost, balance, payoff) is an arbitrary-precision
//! rational kept in reduced form.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Money = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoneyError {
    #[error("malformed amount {0:?}")]
    Malformed(String),
}

/// Whole-number amount.
pub fn int(n: i64) -> Money {
    Money::from_integer(BigInt::from(n))
}

/// `n / d`, reduced. Panics when `d` is zero.
pub fn ratio(n: i64, d: i64) -> Money {
    Money::new(BigInt::from(n), BigInt::from(d))
}

/// Parse a decimal (`"12"`, `"-0.25"`, `"1e3"`) or a fraction (`"7/3"`)
/// without any floating-point intermediary.
pub fn parse(text: &str) -> Result<Money, MoneyError> {
    let bad = || MoneyError::Malformed(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = parse_int(n.trim()).ok_or_else(bad)?;
        let d: BigInt = parse_int(d.trim()).ok_or_else(bad)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Money::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{whole}{frac}");
    let mut n: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| bad())? };
    if neg {
        n = -n;
    }
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        Money::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Money::new(n, num_traits::pow(ten, (-scale) as usize))
    })
}

fn parse_int(s: &str) -> Option<BigInt> {
    let body = s.strip_prefix('-').unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// True when the value has a finite decimal expansion.
pub fn is_decimal(m: &Money) -> bool {
    let mut d = m.denom().clone();
    for f in [2u32, 5] {
        let f = BigInt::from(f);
        while (&d % &f).is_zero() {
            d /= &f;
        }
    }
    d.is_one()
}

/// Decimal rendering with at most `max_frac` fractional digits, rounded half
/// away from zero. The flag reports whether the rendering is exact.
pub fn to_decimal(m: &Money, max_frac: usize) -> (String, bool) {
    let neg = m.is_negative();
    let a = m.abs();
    let scale = num_traits::pow(BigInt::from(10), max_frac);
    let scaled = a.numer() * &scale;
    let (q, r) = scaled.div_rem(a.denom());
    let exact = r.is_zero();
    let q = if &r * 2 >= *a.denom() && !exact { q + 1 } else { q };
    let (int_part, frac_part) = q.div_rem(&scale);
    let mut frac = format!("{:0>width$}", frac_part.to_string(), width = max_frac);
    while frac.ends_with('0') {
        frac.pop();
    }
    let body = if frac.is_empty() { int_part.to_string() } else { format!("{int_part}.{frac}") };
    let zero = int_part.is_zero() && frac.is_empty();
    (if neg && !zero { format!("-{body}") } else { body }, exact)
}

/// Shortest exact text: decimal when finite, otherwise `n/d`.
pub fn to_text(m: &Money) -> String {
    if is_decimal(m) {
        let digits = decimal_digits(m.denom());
        to_decimal(m, digits).0
    } else {
        format!("{}/{}", m.numer(), m.denom())
    }
}

fn decimal_digits(den: &BigInt) -> usize {
    let mut k = 0;
    let mut p = BigInt::one();
    while !(&p % den).is_zero() {
        p *= 10;
        k += 1;
    }
    k
}

/// Lossy conversion for reporting only.
pub fn to_f64(m: &Money) -> f64 {
    m.to_f64().unwrap_or(f64::NAN)
}

/// Round a positive value to a dyadic rational with 64 significant bits.
/// `up` selects the rounding direction.
pub fn round_significand(m: &Money, up: bool) -> Money {
    debug_assert!(m.is_positive());
    let n = m.numer();
    let d = m.denom();
    let shift = 64 - (n.bits() as i64 - d.bits() as i64);
    let (num, den) = if shift >= 0 { (n << shift as usize, d.clone()) } else { (n.clone(), d << (-shift) as usize) };
    let (q, r) = num.div_rem(&den);
    let q = if up && !r.is_zero() { q + 1 } else { q };
    let scaled = Money::from_integer(q);
    if shift >= 0 {
        scaled / Money::from_integer(BigInt::one() << shift as usize)
    } else {
        scaled * Money::from_integer(BigInt::one() << (-shift) as usize)
    }
}

/// Sign of a value as -1, 0 or 1.
pub fn sign(m: &Money) -> i8 {
    match m.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse("0.1").unwrap(), ratio(1, 10));
        assert_eq!(parse("1011000").unwrap(), int(1011000));
        assert_eq!(parse("-2.50").unwrap(), ratio(-5, 2));
        assert_eq!(parse("1.5e2").unwrap(), int(150));
        assert_eq!(parse("7/21").unwrap(), ratio(1, 3));
        assert_eq!(parse(".5").unwrap(), ratio(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1.2.3", "--1", "1/0", "1,5", ".", "1e", "0x10"] {
            assert!(parse(s).is_err(), "{s}");
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&ratio(1, 3), 12), ("0.333333333333".to_string(), false));
        assert_eq!(to_decimal(&ratio(2, 3), 3), ("0.667".to_string(), false));
        assert_eq!(to_decimal(&ratio(-5, 2), 12), ("-2.5".to_string(), true));
        assert_eq!(to_text(&ratio(1, 3)), "1/3");
        assert_eq!(to_text(&ratio(3, 8)), "0.375");
        assert_eq!(to_text(&int(-4)), "-4");
    }

    #[test]
    fn significand_rounding_brackets_value() {
        let v = ratio(1, 3);
        let lo = round_significand(&v, false);
        let hi = round_significand(&v, true);
        assert!(lo < v && v < hi);
        assert!(is_decimal(&lo));
        let exact = ratio(3, 4);
        assert_eq!(round_significand(&exact, true), exact);
    }
}
