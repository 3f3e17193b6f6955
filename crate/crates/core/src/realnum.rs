//! Exact rationals and directed-rounding evaluation of real roots.
//!
//! Irrational quantities (square roots, `n^{(D-1)/D}`) are bracketed by
//! rationals with denominator `2^bits` using integer `k`-th roots, so every
//! reported upper bound really is an upper bound.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Fractional bits used for root bracketing in reports.
pub const REPORT_BITS: u32 = 128;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Parses `"3"`, `"-2/5"` or a finite decimal such as `"1.25"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole_abs = whole.trim_start_matches(['-', '+']);
        let digits: BigInt = format!("{}{}", if whole_abs.is_empty() { "0" } else { whole_abs }, frac)
            .parse()
            .ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let value = BigRational::new(digits, scale);
        return Some(if negative { -value } else { value });
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn to_biguint(x: &BigInt) -> BigUint {
    assert!(!x.is_negative(), "negative value where a magnitude was expected");
    x.magnitude().clone()
}

/// `floor(q)` for a rational `q`.
pub fn floor(q: &BigRational) -> BigInt {
    q.numer().div_floor(q.denom())
}

/// `ceil(q)` for a rational `q`.
pub fn ceil(q: &BigRational) -> BigInt {
    -((-q.numer()).div_floor(q.denom()))
}

/// Rational brackets `lo ≤ q^{1/k} ≤ hi` with `hi - lo ≤ 2^-bits`; `q ≥ 0`.
pub fn root_bracket(q: &BigRational, k: u32, bits: u32) -> (BigRational, BigRational) {
    assert!(k >= 1);
    assert!(!q.is_negative(), "root of a negative rational");
    let scale = BigInt::one() << bits;
    let scaled = q * BigRational::from_integer(num_traits::pow(scale.clone(), k as usize));
    let fl = to_biguint(&floor(&scaled));
    let r = fl.nth_root(k);
    let r_big = BigInt::from_biguint(Sign::Plus, r);
    let lo = BigRational::new(r_big.clone(), scale.clone());
    let exact = BigRational::from_integer(num_traits::pow(r_big.clone(), k as usize)) == scaled;
    let hi = if exact { lo.clone() } else { BigRational::new(r_big + 1, scale) };
    (lo, hi)
}

pub fn root_upper(q: &BigRational, k: u32, bits: u32) -> BigRational {
    root_bracket(q, k, bits).1
}

pub fn root_lower(q: &BigRational, k: u32, bits: u32) -> BigRational {
    root_bracket(q, k, bits).0
}

/// Largest integer `t ≥ 0` with `t² ≤ q`.
pub fn floor_sqrt(q: &BigRational) -> BigInt {
    assert!(!q.is_negative());
    let f = to_biguint(&floor(q));
    BigInt::from_biguint(Sign::Plus, f.sqrt())
}

/// Smallest `f64` that is `≥ q`.
pub fn to_f64_up(q: &BigRational) -> f64 {
    let mut f = approx_f64(q);
    while BigRational::from_float(f).is_some_and(|r| &r < q) {
        f = f.next_up();
    }
    while let Some(prev) = BigRational::from_float(f.next_down()) {
        if &prev >= q {
            f = f.next_down();
        } else {
            break;
        }
    }
    f
}

/// Largest `f64` that is `≤ q`.
pub fn to_f64_down(q: &BigRational) -> f64 {
    -to_f64_up(&-q)
}

fn approx_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::MIN
        } else {
            f64::MAX
        }
    })
}

/// Decimal rendering of `q` rounded up at `digits` fractional digits.
pub fn decimal_up(q: &BigRational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = ceil(&(q * BigRational::from_integer(scale.clone())));
    render_scaled(&scaled, digits)
}

fn render_scaled(scaled: &BigInt, digits: usize) -> String {
    let negative = scaled.is_negative();
    let mut s = scaled.magnitude().to_string();
    if digits > 0 {
        if s.len() <= digits {
            s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
        }
        s.insert(s.len() - digits, '.');
    }
    if negative {
        s.insert(0, '-');
    }
    s
}

/// A rational serialized as `"p/q"` (or `"p"`) for auditability.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct ExactRational(pub BigRational);

impl From<ExactRational> for String {
    fn from(r: ExactRational) -> Self {
        format_rational(&r.0)
    }
}

impl TryFrom<String> for ExactRational {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        parse_rational(&s).map(ExactRational).ok_or_else(|| format!("not a rational: {s}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3"), Some(int(3)));
        assert_eq!(parse_rational("-2/4"), Some(rat(-1, 2)));
        assert_eq!(parse_rational("1.25"), Some(rat(5, 4)));
        assert_eq!(parse_rational("-0.5"), Some(rat(-1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn root_brackets_contain_the_root() {
        let (lo, hi) = root_bracket(&int(2), 2, 64);
        assert!(&lo * &lo <= int(2) && &hi * &hi >= int(2));
        assert!(&hi - &lo <= BigRational::new(BigInt::one(), BigInt::one() << 64));
        let (lo, hi) = root_bracket(&int(81), 2, 10);
        assert_eq!(lo, int(9));
        assert_eq!(hi, int(9));
        let (lo, hi) = root_bracket(&rat(4, 3), 4, 80);
        let four = |x: &BigRational| x * x * x * x;
        assert!(four(&lo) <= rat(4, 3) && four(&hi) >= rat(4, 3));
    }

    #[test]
    fn floor_sqrt_is_exact() {
        assert_eq!(floor_sqrt(&int(49)), big(7));
        assert_eq!(floor_sqrt(&rat(195, 4)), big(6));
        assert_eq!(floor_sqrt(&rat(196, 4)), big(7));
    }

    #[test]
    fn directed_f64_rounding() {
        let third = rat(1, 3);
        let up = to_f64_up(&third);
        let down = to_f64_down(&third);
        assert!(BigRational::from_float(up).unwrap() > third);
        assert!(BigRational::from_float(down).unwrap() < third);
        assert_eq!(up, down.next_up());
        assert_eq!(to_f64_up(&int(5)), 5.0);
    }

    #[test]
    fn decimal_rounding_up() {
        assert_eq!(decimal_up(&rat(1, 3), 4), "0.3334");
        assert_eq!(decimal_up(&rat(-1, 3), 4), "-0.3333");
        assert_eq!(decimal_up(&int(12), 2), "12.00");
    }
}
