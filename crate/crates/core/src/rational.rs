//! Exact rational helpers on top of `num_rational::BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"` or `"p"`. Any valid fraction is accepted and reduced; negative
/// values and zero denominators are rejected.
pub fn parse_nonneg(s: &str) -> Result<Rational, Error> {
    let r = parse(s)?;
    if r.is_negative() {
        return Err(Error::Parse(format!("negative rational {s:?}")));
    }
    Ok(r)
}

/// Parses a signed rational literal.
pub fn parse(s: &str) -> Result<Rational, Error> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational literal: {s:?}"));
    let (p, q) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let ok_digits = |x: &str, signed: bool| {
        let body = if signed { x.strip_prefix('-').or_else(|| x.strip_prefix('+')).unwrap_or(x) } else { x };
        !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
    };
    if !ok_digits(p, true) || !ok_digits(q, false) {
        return Err(bad());
    }
    let num: BigInt = p.parse().map_err(|_| bad())?;
    let den: BigInt = q.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// `"p/q"` in lowest terms, or `"p"` for integers.
pub fn to_string(r: &Rational) -> String {
    r.to_string()
}

/// `base^exp` for any integer exponent; `base` must be nonzero when `exp < 0`.
pub fn pow(base: &Rational, exp: i64) -> Rational {
    let mut acc = Rational::one();
    let mut b = base.clone();
    let mut e = exp.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    if exp < 0 {
        acc.recip()
    } else {
        acc
    }
}

fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a positive rational, accurate near 1 as well.
pub fn ln(r: &Rational) -> f64 {
    debug_assert!(r.is_positive());
    let near_one = (r - Rational::one()).abs() < frac(1, 2);
    if near_one {
        if let Some(d) = (r - Rational::one()).to_f64() {
            return d.ln_1p();
        }
    }
    match r.to_f64() {
        Some(x) if x.is_finite() && x > 0.0 && x.is_normal() => x.ln(),
        _ => ln_bigint(r.numer()) - ln_bigint(r.denom()),
    }
}

/// Rounds to 12 significant digits for "approx" report fields.
pub fn approx12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_nonneg("7/5").unwrap(), frac(7, 5));
        assert_eq!(parse_nonneg("14/10").unwrap(), frac(7, 5));
        assert_eq!(parse_nonneg("3").unwrap(), int(3));
        assert_eq!(parse_nonneg(" 0 ").unwrap(), int(0));
    }

    #[test]
    fn rejects_bad_literals() {
        assert!(parse_nonneg("-1/3").is_err());
        assert!(parse_nonneg("1/0").is_err());
        assert!(parse_nonneg("abc").is_err());
        assert!(parse_nonneg("1.5").is_err());
        assert!(parse_nonneg("1/-3").is_err());
        assert!(parse_nonneg("").is_err());
    }

    #[test]
    fn display_is_lowest_terms() {
        assert_eq!(to_string(&frac(686, 250)), "343/125");
        assert_eq!(to_string(&frac(5, 5)), "1");
    }

    #[test]
    fn pow_handles_negative_exponents() {
        assert_eq!(pow(&frac(7, 5), 3), frac(343, 125));
        assert_eq!(pow(&frac(7, 5), -2), frac(25, 49));
        assert_eq!(pow(&frac(7, 5), 0), int(1));
    }

    #[test]
    fn ln_matches_f64_and_is_accurate_near_one() {
        assert!((ln(&frac(343, 125)) - (343.0f64 / 125.0).ln()).abs() < 1e-15);
        let r = frac(1_000_000_001, 1_000_000_000);
        assert!((ln(&r) - (1e-9f64).ln_1p()).abs() < 1e-24);
        let huge = pow(&frac(7, 5), 5000);
        assert!((ln(&huge) - 5000.0 * 1.4f64.ln()).abs() < 1e-9);
    }
}
