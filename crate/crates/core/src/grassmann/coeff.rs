//! Exact complex coefficients: rational real and imaginary parts.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;
pub type Coeff = Complex<BigRational>;

pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn real(num: i64) -> Coeff {
    Complex::new(BigRational::from_integer(num.into()), BigRational::zero())
}

pub fn complex(re: Rational, im: Rational) -> Coeff {
    Complex::new(re, im)
}

pub fn imag_unit() -> Coeff {
    Complex::new(BigRational::zero(), BigRational::one())
}

/// `i^degree` with the exponent reduced mod 2 into `{1, i}`.
pub fn i_power_reduced(degree: usize) -> Coeff {
    if degree.is_multiple_of(2) {
        Coeff::one()
    } else {
        imag_unit()
    }
}

pub fn to_f64_pair(c: &Coeff) -> (f64, f64) {
    (
        c.re.to_f64().unwrap_or(f64::NAN),
        c.im.to_f64().unwrap_or(f64::NAN),
    )
}

/// Exact rational from a decimal literal such as `12`, `0.25` or `1.5e-3`.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    })
}

fn fmt_rational(r: &Rational, out: &mut String) {
    if r.is_integer() {
        let _ = write!(out, "{}", r.numer());
    } else {
        let _ = write!(out, "{}/{}", r.numer(), r.denom());
    }
}

/// Renders a coefficient so that the result re-parses to the same value:
/// `3/2`, `-i`, `1/2*i`, `(1-2*i)`.
pub fn format_coeff(c: &Coeff) -> String {
    let mut out = String::new();
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => fmt_rational(&c.re, &mut out),
        (true, false) => fmt_imag(&c.im, &mut out, true),
        (false, false) => {
            out.push('(');
            fmt_rational(&c.re, &mut out);
            out.push(if c.im.is_negative() { '-' } else { '+' });
            fmt_imag(&c.im.abs(), &mut out, false);
            out.push(')');
        }
    }
    out
}

fn fmt_imag(im: &Rational, out: &mut String, keep_sign: bool) {
    let mag = if keep_sign { im.clone() } else { im.abs() };
    if mag.is_one() {
        out.push('i');
    } else if (-mag.clone()).is_one() {
        out.push_str("-i");
    } else {
        fmt_rational(&mag, out);
        out.push_str("*i");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_decimal("0.5").unwrap(), rational(1, 2));
        assert_eq!(parse_decimal("12").unwrap(), rational(12, 1));
        assert_eq!(parse_decimal("1.25e-2").unwrap(), rational(1, 80));
        assert_eq!(parse_decimal("3e2").unwrap(), rational(300, 1));
        assert!(parse_decimal(".").is_none());
        assert!(parse_decimal("1x").is_none());
    }

    #[test]
    fn formatting() {
        assert_eq!(format_coeff(&real(5)), "5");
        assert_eq!(format_coeff(&imag_unit()), "i");
        assert_eq!(format_coeff(&-imag_unit()), "-i");
        assert_eq!(format_coeff(&complex(rational(0, 1), rational(1, 2))), "1/2*i");
        assert_eq!(format_coeff(&complex(rational(1, 1), rational(-2, 1))), "(1-2*i)");
        assert_eq!(format_coeff(&complex(rational(-3, 2), rational(1, 1))), "(-3/2+i)");
    }

    #[test]
    fn reduced_i_powers() {
        assert_eq!(i_power_reduced(0), Coeff::one());
        assert_eq!(i_power_reduced(1), imag_unit());
        assert_eq!(i_power_reduced(2), Coeff::one());
        assert_eq!(i_power_reduced(7), imag_unit());
    }
}
