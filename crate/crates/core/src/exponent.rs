//! Rational exponents `m/n` with odd, coprime `m` and `n`.
//!
//! For such exponents `t ↦ t^{m/n}` is an odd bijection of the reals, so
//! powers of negative numbers stay real: the odd root is taken first and the
//! sign is carried through unchanged.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExponentError {
    #[error("exponent numerator {0} is even")]
    EvenNumerator(u32),
    #[error("exponent denominator {0} is even")]
    EvenDenominator(u32),
    #[error("exponent {0}/{1} is not in lowest terms")]
    NotCoprime(u32, u32),
    #[error("exponent parts must be positive")]
    NonPositive,
    #[error("cannot parse exponent `{0}`: expected `m/n` or `m`")]
    Syntax(String),
}

/// A power result did not fit in an `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("power {base}^{num}/{den} overflows")]
pub struct RangeError {
    pub base: f64,
    pub num: u32,
    pub den: u32,
}

/// The exponent `α = m/n`, kept exact as an integer pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalExponent {
    num: u32,
    den: u32,
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl RationalExponent {
    pub fn new(num: u32, den: u32) -> Result<Self, ExponentError> {
        if num == 0 || den == 0 {
            return Err(ExponentError::NonPositive);
        }
        if num.is_multiple_of(2) {
            return Err(ExponentError::EvenNumerator(num));
        }
        if den.is_multiple_of(2) {
            return Err(ExponentError::EvenDenominator(den));
        }
        if gcd(num as u64, den as u64) != 1 {
            return Err(ExponentError::NotCoprime(num, den));
        }
        Ok(Self { num, den })
    }

    pub const ONE: Self = Self { num: 1, den: 1 };

    pub fn num(self) -> u32 {
        self.num
    }

    pub fn den(self) -> u32 {
        self.den
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `1/α`, which is again odd over odd.
    pub fn recip(self) -> Self {
        Self {
            num: self.den,
            den: self.num,
        }
    }

    pub fn is_at_least_one(self) -> bool {
        self.num >= self.den
    }

    /// `sign(t)·|t|^{m/n}`.
    pub fn apply(self, t: f64) -> Result<f64, RangeError> {
        signed_pow(t, self)
    }
}

impl fmt::Display for RationalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for RationalExponent {
    type Err = ExponentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || ExponentError::Syntax(s.to_string());
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: u32 = n.parse().map_err(|_| syntax())?;
        let den: u32 = d.parse().map_err(|_| syntax())?;
        Self::new(num, den)
    }
}

/// `|t|^{1/n}` for odd `n`, using the exact library roots where available.
fn odd_root(a: f64, den: u32) -> f64 {
    match den {
        1 => a,
        3 => a.cbrt(),
        _ => a.powf(1.0 / den as f64),
    }
}

/// `sign(t)·|t|^{num/den}` for a valid odd/odd exponent.
///
/// The magnitude is computed on `|t|` and the sign is copied back on, so
/// `signed_pow(-t, e) == -signed_pow(t, e)` bit for bit.
pub fn signed_pow(t: f64, e: RationalExponent) -> Result<f64, RangeError> {
    let a = t.abs();
    let mag = if a == 0.0 {
        0.0
    } else if e.num == 1 && e.den == 1 {
        a
    } else if e.den <= 3 && e.num <= 16 {
        odd_root(a, e.den).powi(e.num as i32)
    } else {
        a.powf(e.value())
    };
    if !mag.is_finite() && t.is_finite() {
        return Err(RangeError {
            base: t,
            num: e.num,
            den: e.den,
        });
    }
    Ok(mag.copysign(t))
}

/// Real `t^{p/n}` for odd `n` and any integer `p`.
///
/// When `p` is even the result is `|t|^{p/n}`; when odd, the sign of `t` is
/// kept. Used for exponents like `α − 1`, whose numerator `m − n` is even.
pub fn real_ratio_pow(t: f64, p: i64, n: u32) -> f64 {
    debug_assert!(n % 2 == 1);
    let root = odd_root(t.abs(), n);
    let mag = if p.unsigned_abs() <= 64 {
        root.powi(p as i32)
    } else {
        root.powf(p as f64)
    };
    if p % 2 != 0 {
        mag.copysign(t)
    } else {
        mag
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(m: u32, n: u32) -> RationalExponent {
        RationalExponent::new(m, n).unwrap()
    }

    #[test]
    fn cube_roots_are_exact() {
        assert_eq!(signed_pow(8.0, e(1, 3)).unwrap(), 2.0);
        assert_eq!(signed_pow(-8.0, e(1, 3)).unwrap(), -2.0);
        assert_eq!(signed_pow(0.0, e(5, 3)).unwrap(), 0.0);
    }

    #[test]
    fn five_thirds_of_two() {
        // oracle: exp(5/3 ln 2), and the cube root of 2 multiplied out by hand
        let oracle = ((5.0 / 3.0) * 2f64.ln()).exp();
        let c = 2f64.cbrt();
        let by_squaring = (c * c) * (c * c) * c;
        let got = signed_pow(2.0, e(5, 3)).unwrap();
        assert!((got - 3.174_802_103_936_399).abs() < 1e-14);
        assert!((got - oracle).abs() < 1e-14);
        assert!((got - by_squaring).abs() < 1e-14);
    }

    #[test]
    fn overflow_is_a_range_error() {
        assert!(signed_pow(1e300, e(5, 3)).is_err());
        assert!(signed_pow(-1e300, e(7, 1)).is_err());
    }

    #[test]
    fn rejects_even_or_reducible() {
        assert_eq!(
            RationalExponent::new(2, 3),
            Err(ExponentError::EvenNumerator(2))
        );
        assert_eq!(
            RationalExponent::new(3, 4),
            Err(ExponentError::EvenDenominator(4))
        );
        assert_eq!(
            RationalExponent::new(3, 9),
            Err(ExponentError::NotCoprime(3, 9))
        );
        assert!("2/3".parse::<RationalExponent>().is_err());
        assert_eq!("5/3".parse::<RationalExponent>().unwrap(), e(5, 3));
        assert_eq!("1".parse::<RationalExponent>().unwrap(), RationalExponent::ONE);
    }

    #[test]
    fn even_ratio_powers_drop_the_sign() {
        // (-8)^(2/3) = 4
        assert!((real_ratio_pow(-8.0, 2, 3) - 4.0).abs() < 1e-14);
        assert!((real_ratio_pow(-8.0, 1, 3) + 2.0).abs() < 1e-14);
        assert!((real_ratio_pow(8.0, -2, 3) - 0.25).abs() < 1e-15);
        assert_eq!(real_ratio_pow(3.0, 0, 5), 1.0);
    }
}
