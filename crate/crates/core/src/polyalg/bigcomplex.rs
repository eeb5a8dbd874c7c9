use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::{Assign, Float};

use super::GaussianRational;

/// Smallest working precision accepted anywhere in the crate.
pub const MIN_PRECISION: u32 = 64;

/// Multiprecision complex number built on two MPFR floats.
///
/// Binary operations produce results at the larger of the operand precisions.
#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl BigComplex {
    pub fn new(re: Float, im: Float) -> Self {
        BigComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        BigComplex {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        BigComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    /// Rounds an exact value once, to nearest, at `prec` bits.
    pub fn from_gaussian(q: &GaussianRational, prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        BigComplex {
            re: Float::with_val(prec, &q.re),
            im: Float::with_val(prec, &q.im),
        }
    }

    /// `r·(cos θ + i sin θ)` at `prec` bits.
    pub fn from_polar(r: &Float, theta: &Float, prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        let (s, c) = Float::with_val(prec, theta).sin_cos(Float::new(prec));
        BigComplex {
            re: Float::with_val(prec, r * &c),
            im: Float::with_val(prec, r * &s),
        }
    }

    /// `e^{2πi·k/m + iφ}` at `prec` bits.
    pub fn unit_root(k: usize, m: usize, offset: f64, prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        let mut theta = Float::with_val(prec, Constant::Pi) * 2u32;
        theta *= k as u64;
        theta /= m as u64;
        theta += offset;
        Self::from_polar(&Float::with_val(prec, 1), &theta, prec)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        BigComplex {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            re: self.re.clone(),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        let mut n = Float::with_val(p, self.re.square_ref());
        n += Float::with_val(p, self.im.square_ref());
        n
    }

    pub fn abs(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn scale(&self, k: &Float) -> Self {
        let p = self.prec().max(k.prec());
        BigComplex {
            re: Float::with_val(p, &self.re * k),
            im: Float::with_val(p, &self.im * k),
        }
    }

    pub fn div_real(&self, k: &Float) -> Self {
        let p = self.prec().max(k.prec());
        BigComplex {
            re: Float::with_val(p, &self.re / k),
            im: Float::with_val(p, &self.im / k),
        }
    }

    /// Complex reciprocal; infinite parts when `self` is zero.
    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        let p = self.prec();
        BigComplex {
            re: Float::with_val(p, &self.re / &n),
            im: Float::with_val(p, -&self.im) / &n,
        }
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut acc = BigComplex::from_f64(1.0, 0.0, self.prec());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// In-place `self = self·z + c`, the Horner step. `t` holds scratch floats
    /// so the hot loop allocates nothing.
    pub(crate) fn mul_add_assign(&mut self, z: &BigComplex, c: &BigComplex, t: &mut Scratch) {
        t.a.assign(&self.re * &z.re);
        t.b.assign(&self.im * &z.im);
        t.a -= &t.b;
        t.c.assign(&self.re * &z.im);
        t.b.assign(&self.im * &z.re);
        t.c += &t.b;
        self.re.assign(&t.a + &c.re);
        self.im.assign(&t.c + &c.im);
    }

    /// Accumulates `1/(a − b)` into `self`, reusing scratch space.
    pub(crate) fn add_recip_diff(&mut self, a: &BigComplex, b: &BigComplex, t: &mut Scratch) {
        t.a.assign(&a.re - &b.re);
        t.b.assign(&a.im - &b.im);
        t.c.assign(t.a.square_ref());
        t.d.assign(t.b.square_ref());
        t.c += &t.d;
        t.a /= &t.c;
        t.b /= &t.c;
        self.re += &t.a;
        self.im -= &t.b;
    }
}

/// Temporaries for allocation-free complex kernels.
pub(crate) struct Scratch {
    pub a: Float,
    pub b: Float,
    pub c: Float,
    pub d: Float,
}

impl Scratch {
    pub fn new(prec: u32) -> Self {
        Scratch {
            a: Float::new(prec),
            b: Float::new(prec),
            c: Float::new(prec),
            d: Float::new(prec),
        }
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64();
        if im < 0.0 {
            write!(f, "{re}-{}i", -im)
        } else {
            write!(f, "{re}+{im}i")
        }
    }
}

impl<'a> Add<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec().max(rhs.prec());
        BigComplex {
            re: Float::with_val(p, &self.re + &rhs.re),
            im: Float::with_val(p, &self.im + &rhs.im),
        }
    }
}

impl<'a> Sub<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec().max(rhs.prec());
        BigComplex {
            re: Float::with_val(p, &self.re - &rhs.re),
            im: Float::with_val(p, &self.im - &rhs.im),
        }
    }
}

impl<'a> Mul<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec().max(rhs.prec());
        let mut re = Float::with_val(p, &self.re * &rhs.re);
        re -= Float::with_val(p, &self.im * &rhs.im);
        let mut im = Float::with_val(p, &self.re * &rhs.im);
        im += Float::with_val(p, &self.im * &rhs.re);
        BigComplex { re, im }
    }
}

impl<'a> Div<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec().max(rhs.prec());
        let n = rhs.with_prec(p).norm_sqr();
        let num = self * &rhs.conj();
        BigComplex {
            re: Float::with_val(p, &num.re / &n),
            im: Float::with_val(p, &num.im / &n),
        }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            re: Float::with_val(self.re.prec(), -&self.re),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }
}
