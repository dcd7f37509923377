//! Exact complex rational scalars.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `a + b·i` with `a, b` rational in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar(pub Complex<BigRational>);

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Scalar {
        Scalar(Complex::new(re, im))
    }

    pub fn zero() -> Scalar {
        Scalar(Complex::zero())
    }

    pub fn one() -> Scalar {
        Scalar(Complex::one())
    }

    pub fn i() -> Scalar {
        Scalar(Complex::i())
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// `p/q + (r/s)·i`.
    pub fn from_ratios(p: i64, q: i64, r: i64, s: i64) -> Scalar {
        Scalar::new(
            BigRational::new(BigInt::from(p), BigInt::from(q)),
            BigRational::new(BigInt::from(r), BigInt::from(s)),
        )
    }

    pub fn re(&self) -> &BigRational {
        &self.0.re
    }

    pub fn im(&self) -> &BigRational {
        &self.0.im
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn conj(&self) -> Scalar {
        Scalar(self.0.conj())
    }

    /// `|z|² = a² + b²`.
    pub fn norm_sqr(&self) -> BigRational {
        self.0.norm_sqr()
    }

    pub fn inv(&self) -> Option<Scalar> {
        (!self.is_zero()).then(|| Scalar(self.0.inv()))
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.0.re.to_f64().unwrap_or(f64::NAN),
            self.0.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on `(re, im)`; used only for canonical ordering.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.0.re, &self.0.im).cmp(&(&other.0.re, &other.0.im))
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar(&self.0 + &rhs.0)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 = &self.0 + &rhs.0;
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 - rhs.0)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar(&self.0 - &rhs.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar(&self.0 * &rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0.clone())
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("invalid rational `{text}`"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Accepts `p/q`, `r/s i`, `p/q+r/s i`, `p/q-r/s i`, with `i` alone
/// standing for `1 i`. Whitespace is ignored.
impl FromStr for Scalar {
    type Err = Error;

    fn from_str(text: &str) -> Result<Scalar> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        let Some(body) = s.strip_suffix('i') else {
            return Ok(Scalar::new(parse_rational(&s)?, BigRational::zero()));
        };
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last();
        let (re, im) = match split {
            Some(k) => (parse_rational(&body[..k])?, &body[k..]),
            None => (BigRational::zero(), body),
        };
        let im = match im {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_rational(other.strip_prefix('+').unwrap_or(other))?,
        };
        Ok(Scalar::new(re, im))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = (&self.0.re, &self.0.im);
        let imag = |f: &mut fmt::Formatter<'_>, v: &BigRational| {
            if v.is_one() {
                write!(f, "i")
            } else {
                write!(f, "{v} i")
            }
        };
        match (re.is_zero(), im.is_zero()) {
            (_, true) => write!(f, "{re}"),
            (true, false) => {
                if im.is_negative() {
                    write!(f, "-")?;
                }
                imag(f, &im.abs())
            }
            (false, false) => {
                write!(f, "{re}{}", if im.is_negative() { "-" } else { "+" })?;
                imag(f, &im.abs())
            }
        }
    }
}
