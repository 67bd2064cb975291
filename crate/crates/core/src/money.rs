//! Exact rational amounts.
//!
//! Every amount flowing through the sharing computation is an exact
//! rational. Nothing is rounded until [`Money::round_half_even`] is called
//! by the payout rounding pass.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational used for quantities, quotas, ratios and fractions.
pub type Rational = BigRational;

/// Builds a rational from an integer numerator and denominator.
///
/// Panics if `den` is zero.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// A signed, exact monetary amount.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Money(Rational);

impl Money {
    pub fn zero() -> Self {
        Money(Rational::zero())
    }

    pub fn from_integer(value: i64) -> Self {
        Money(integer(value))
    }

    pub fn from_rational(value: Rational) -> Self {
        Money(value)
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }

    pub fn into_rational(self) -> Rational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// Quotient of two amounts as a dimensionless rational. `None` when
    /// `divisor` is zero.
    pub fn ratio_to(&self, divisor: &Money) -> Option<Rational> {
        if divisor.is_zero() {
            None
        } else {
            Some(&self.0 / &divisor.0)
        }
    }

    /// Divides by a dimensionless rational. `None` when `divisor` is zero.
    pub fn divide(&self, divisor: &Rational) -> Option<Money> {
        if divisor.is_zero() {
            None
        } else {
            Some(Money(&self.0 / divisor))
        }
    }

    /// Rounds to `places` decimal places, ties to even.
    pub fn round_half_even(&self, places: u32) -> Money {
        Money(round_half_even(&self.0, places))
    }

    /// Fixed-point rendering with exactly `places` decimals, after rounding
    /// half-even.
    pub fn to_fixed(&self, places: u32) -> String {
        let scale = BigInt::from(10u32).pow(places);
        let scaled = round_half_even(&self.0, places) * Rational::from_integer(scale.clone());
        let units = scaled.to_integer();
        let negative = units.is_negative();
        let (whole, frac) = units.abs().div_rem(&scale);
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        out.push_str(&whole.to_string());
        if places > 0 {
            out.push('.');
            let frac = frac.to_string();
            for _ in frac.len()..places as usize {
                out.push('0');
            }
            out.push_str(&frac);
        }
        out
    }
}

/// Half-even rounding of an exact rational to `places` decimals.
pub fn round_half_even(value: &Rational, places: u32) -> Rational {
    let scale = Rational::from_integer(BigInt::from(10u32).pow(places));
    let scaled = value * &scale;
    let floor = scaled.floor();
    let remainder = &scaled - &floor;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let rounded = match remainder.cmp(&half) {
        std::cmp::Ordering::Less => floor,
        std::cmp::Ordering::Greater => floor + Rational::one(),
        std::cmp::Ordering::Equal => {
            if floor.to_integer().is_even() {
                floor
            } else {
                floor + Rational::one()
            }
        }
    };
    rounded / scale
}

/// Renders a rational as a plain decimal literal (no exponent, no trailing
/// zeros) when its expansion terminates. Returns `None` otherwise.
pub fn to_decimal_literal(value: &Rational) -> Option<String> {
    let mut den = value.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut twos = 0u32;
    let mut fives = 0u32;
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scale = BigInt::from(10u32).pow(places);
    let units = (value * Rational::from_integer(scale.clone())).to_integer();
    let negative = units.is_negative();
    let (whole, frac) = units.abs().div_rem(&scale);
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(&whole.to_string());
    if places > 0 {
        let mut digits = frac.to_string();
        while digits.len() < places as usize {
            digits.insert(0, '0');
        }
        let trimmed = digits.trim_end_matches('0');
        if !trimmed.is_empty() {
            out.push('.');
            out.push_str(trimmed);
        }
    }
    Some(out)
}

/// Parses a JSON number literal (`-?int(.frac)?([eE][+-]?exp)?`) exactly.
pub fn parse_decimal_literal(text: &str) -> Option<Rational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa),
    };
    let (whole, frac) = match digits.split_once('.') {
        Some((w, f)) => (w, f),
        None => (digits, ""),
    };
    if whole.is_empty() || !whole.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if digits.contains('.') && frac.is_empty() {
        return None;
    }
    if !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut units: BigInt = format!("{whole}{frac}").parse().ok()?;
    if negative {
        units = -units;
    }
    let shift = exponent - frac.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if shift >= 0 {
        Rational::from_integer(units * ten.pow(shift as u32))
    } else {
        Rational::new(units, ten.pow(shift.unsigned_abs()))
    };
    Some(value)
}

/// Parses an exact fraction of the form `p/q` or a bare integer `p`.
pub fn parse_fraction(text: &str) -> Option<Rational> {
    fn int(s: &str) -> Option<BigInt> {
        let digits = s.strip_prefix('-').unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        s.parse().ok()
    }
    match text.split_once('/') {
        Some((n, d)) => {
            let den = int(d)?;
            if den.is_zero() || den.is_negative() {
                return None;
            }
            Some(Rational::new(int(n)?, den))
        }
        None => Some(Rational::from_integer(int(text)?)),
    }
}

/// Reduced `p/q` form, or `p` for integers.
pub fn fraction_string(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fraction_string(&self.0))
    }
}

impl fmt::Debug for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Money({})", fraction_string(&self.0))
    }
}

impl Default for Money {
    fn default() -> Self {
        Money::zero()
    }
}

impl FromStr for Money {
    type Err = ParseMoneyError;

    /// Accepts `p/q`, integers and decimal literals.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_fraction(s)
            .or_else(|| parse_decimal_literal(s))
            .map(Money)
            .ok_or_else(|| ParseMoneyError(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not an exact amount: {0:?}")]
pub struct ParseMoneyError(pub String);

impl From<Rational> for Money {
    fn from(value: Rational) -> Self {
        Money(value)
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Money> for &'a Money {
    type Output = Money;
    fn add(self, rhs: &Money) -> Money {
        Money(&self.0 + &rhs.0)
    }
}

impl AddAssign<&Money> for Money {
    fn add_assign(&mut self, rhs: &Money) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl<'a> Sub<&'a Money> for &'a Money {
    type Output = Money;
    fn sub(self, rhs: &Money) -> Money {
        Money(&self.0 - &rhs.0)
    }
}

impl SubAssign<&Money> for Money {
    fn sub_assign(&mut self, rhs: &Money) {
        self.0 -= &rhs.0;
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

impl Mul<&Rational> for &Money {
    type Output = Money;
    fn mul(self, rhs: &Rational) -> Money {
        Money(&self.0 * rhs)
    }
}

impl Mul<&Rational> for Money {
    type Output = Money;
    fn mul(self, rhs: &Rational) -> Money {
        Money(self.0 * rhs)
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::zero(), |acc, m| acc + m)
    }
}

impl<'a> Sum<&'a Money> for Money {
    fn sum<I: Iterator<Item = &'a Money>>(iter: I) -> Money {
        iter.fold(Money::zero(), |mut acc, m| {
            acc += m;
            acc
        })
    }
}
