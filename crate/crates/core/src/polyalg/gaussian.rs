use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use rug::{Integer, Rational};

use super::PolyError;

/// Exact complex number with rational real and imaginary parts.
///
/// `rug::Rational` keeps every value canonical (lowest terms, positive
/// denominator), so structural equality is exact equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: impl Into<Rational>, im: impl Into<Rational>) -> Self {
        GaussianRational {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn real(re: impl Into<Rational>) -> Self {
        Self::new(re, 0)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::real(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.cmp0().is_eq() && self.im.cmp0().is_eq()
    }

    pub fn is_real(&self) -> bool {
        self.im.cmp0().is_eq()
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: Rational::from(-&self.im),
        }
    }

    /// `re² + im²`, exact.
    pub fn norm_sqr(&self) -> Rational {
        Rational::from(&self.re * &self.re) + Rational::from(&self.im * &self.im)
    }

    /// Modulus as a double; only used where a float bound is all that is needed.
    pub fn abs_f64(&self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    pub fn recip(&self) -> Result<Self, PolyError> {
        let n = self.norm_sqr();
        if n.cmp0().is_eq() {
            return Err(PolyError::DivisionByZero);
        }
        Ok(GaussianRational {
            re: Rational::from(&self.re / &n),
            im: Rational::from(-&self.im) / &n,
        })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, PolyError> {
        Ok(self * &rhs.recip()?)
    }

    pub fn mul_int(&self, k: &Integer) -> Self {
        GaussianRational {
            re: Rational::from(&self.re * k),
            im: Rational::from(&self.im * k),
        }
    }

    pub fn mul_rational(&self, k: &Rational) -> Self {
        GaussianRational {
            re: Rational::from(&self.re * k),
            im: Rational::from(&self.im * k),
        }
    }

    /// Largest bit length among the numerators and denominators of both parts.
    pub fn bit_len(&self) -> u32 {
        [
            self.re.numer().significant_bits(),
            self.re.denom().significant_bits(),
            self.im.numer().significant_bits(),
            self.im.denom().significant_bits(),
        ]
        .into_iter()
        .max()
        .unwrap_or(0)
    }

    /// `[re, im]` as exact strings, `"num/den"` or `"num"` when den = 1.
    pub fn to_strings(&self) -> [String; 2] {
        [rational_to_string(&self.re), rational_to_string(&self.im)]
    }

    pub fn parse(re: &str, im: &str) -> Result<Self, PolyError> {
        Ok(GaussianRational {
            re: parse_rational(re)?,
            im: parse_rational(im)?,
        })
    }
}

pub fn rational_to_string(q: &Rational) -> String {
    // rug prints "n" for integers and "n/d" otherwise
    q.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational, PolyError> {
    let t = s.trim();
    let bad = || PolyError::Parse(s.to_string());
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (t, None),
    };
    let num: Integer = num.parse().map_err(|_| bad())?;
    match den {
        None => Ok(Rational::from(num)),
        Some(d) => {
            let den: Integer = d.parse().map_err(|_| bad())?;
            if den.cmp0().is_eq() {
                return Err(bad());
            }
            Ok(Rational::from((num, den)))
        }
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_real() {
            write!(f, "{}", self.re)
        } else if self.re.cmp0().is_eq() {
            write!(f, "{}i", self.im)
        } else if self.im.cmp0().is_lt() {
            write!(f, "({}-{}i)", self.re, Rational::from(-&self.im))
        } else {
            write!(f, "({}+{}i)", self.re, self.im)
        }
    }
}

impl From<i64> for GaussianRational {
    fn from(v: i64) -> Self {
        Self::real(v)
    }
}

impl From<Rational> for GaussianRational {
    fn from(v: Rational) -> Self {
        Self::real(v)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: Rational::from(&self.re + &rhs.re),
            im: Rational::from(&self.im + &rhs.im),
        }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: Rational::from(&self.re - &rhs.re),
            im: Rational::from(&self.im - &rhs.im),
        }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        if self.is_real() && rhs.is_real() {
            return GaussianRational::real(Rational::from(&self.re * &rhs.re));
        }
        let re = Rational::from(&self.re * &rhs.re) - Rational::from(&self.im * &rhs.im);
        let im = Rational::from(&self.re * &rhs.im) + Rational::from(&self.im * &rhs.re);
        GaussianRational { re, im }
    }
}

/// Panics on a zero divisor; use [`GaussianRational::checked_div`] when that is possible.
impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self.checked_div(rhs)
            .expect("division by zero Gaussian rational")
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -self.clone()
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}
