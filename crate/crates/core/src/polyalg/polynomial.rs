use std::fmt;

use rug::{Assign, Float, Integer, Rational};

use super::bigcomplex::Scratch;
use super::{falling_factorial, BigComplex, GaussianRational, PolyError, MIN_PRECISION};

/// Univariate polynomial with exact Gaussian-rational coefficients, ascending powers.
///
/// Trailing zeros are always trimmed, so the zero polynomial is the empty vector
/// and a nonzero polynomial has a nonzero leading coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<GaussianRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(GaussianRational::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| GaussianRational::from(c)).collect())
    }

    pub fn monomial(c: GaussianRational, power: usize) -> Self {
        let mut coeffs = vec![GaussianRational::zero(); power];
        coeffs.push(c);
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<GaussianRational> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> GaussianRational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&GaussianRational> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading()
            .is_some_and(|c| *c == GaussianRational::one())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => {
                let inv = lc.recip().expect("leading coefficient is nonzero");
                self.scale_coeffs(&inv)
            }
        }
    }

    pub fn scale_coeffs(&self, k: &GaussianRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Largest bit length over all numerators and denominators.
    pub fn max_coeff_bits(&self) -> u32 {
        self.coeffs
            .iter()
            .map(GaussianRational::bit_len)
            .max()
            .unwrap_or(0)
    }

    /// Exact `j`-th derivative.
    pub fn derivative(&self, j: usize) -> Self {
        if j == 0 {
            return self.clone();
        }
        if self.coeffs.len() <= j {
            return Self::zero();
        }
        let coeffs = (j..self.coeffs.len())
            .map(|m| self.coeffs[m].mul_int(&falling_factorial(m as u64, j as u64)))
            .collect();
        Self::new(coeffs)
    }

    /// Exact `q(z) = p(s·z)` for a nonzero Gaussian-rational `s`.
    pub fn scale_arg(&self, s: &GaussianRational) -> Result<Self, PolyError> {
        if s.is_zero() {
            return Err(PolyError::InvalidScale);
        }
        let mut pow = GaussianRational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * &pow);
            pow = &pow * s;
        }
        Ok(Self::new(out))
    }

    /// Numeric `q(z) = p(s·z)` at the precision of `s`; `s` is used as given,
    /// so its rounding happens once, where the caller built it.
    pub fn scale_arg_numeric(&self, s: &BigComplex) -> Result<NumericPolynomial, PolyError> {
        if s.is_zero() {
            return Err(PolyError::InvalidScale);
        }
        let prec = s.prec();
        let mut pow = BigComplex::from_f64(1.0, 0.0, prec);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(&BigComplex::from_gaussian(c, prec) * &pow);
            pow = &pow * s;
        }
        Ok(NumericPolynomial::new(out, prec))
    }

    /// Horner evaluation at the precision of `z`; each coefficient is rounded
    /// once, when it is consumed.
    pub fn eval(&self, z: &BigComplex) -> BigComplex {
        let prec = z.prec();
        let mut acc = BigComplex::zero(prec);
        let mut t = Scratch::new(prec);
        for c in self.coeffs.iter().rev() {
            let c = BigComplex::from_gaussian(c, prec);
            acc.mul_add_assign(z, &c, &mut t);
        }
        acc
    }

    /// `Σ |aᵢ|·|z|ⁱ`, the scale against which evaluation error is measured.
    pub fn eval_abs_bound(&self, z: &BigComplex) -> Float {
        let prec = z.prec();
        let r = z.abs();
        let mut acc = Float::new(prec);
        for c in self.coeffs.iter().rev() {
            acc *= &r;
            acc += BigComplex::from_gaussian(c, prec).abs();
        }
        acc
    }

    /// Exact evaluation at a Gaussian-rational point.
    pub fn eval_exact(&self, z: &GaussianRational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    pub fn to_numeric(&self, prec: u32) -> NumericPolynomial {
        NumericPolynomial::new(
            self.coeffs
                .iter()
                .map(|c| BigComplex::from_gaussian(c, prec))
                .collect(),
            prec,
        )
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|i| &self.coeff(i) - &rhs.coeff(i)).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![GaussianRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Self::new(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (neg, mag) = if c.is_real() && c.re.cmp0().is_lt() {
                (true, GaussianRational::real(Rational::from(-&c.re)))
            } else {
                (false, c.clone())
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag == GaussianRational::one();
            match (i, unit) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) => write!(f, "{mag}")?,
            }
            match i {
                0 => {}
                1 => write!(f, "z")?,
                _ => write!(f, "z^{i}")?,
            }
        }
        Ok(())
    }
}

/// Polynomial with multiprecision floating coefficients and a recorded working precision.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericPolynomial {
    pub coeffs: Vec<BigComplex>,
    pub precision_bits: u32,
}

impl NumericPolynomial {
    pub fn new(coeffs: Vec<BigComplex>, precision_bits: u32) -> Self {
        NumericPolynomial {
            coeffs,
            precision_bits: precision_bits.max(MIN_PRECISION),
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, z: &BigComplex) -> BigComplex {
        let prec = z.prec().max(self.precision_bits);
        let mut acc = BigComplex::zero(prec);
        let mut t = Scratch::new(prec);
        for c in self.coeffs.iter().rev() {
            acc.mul_add_assign(z, c, &mut t);
        }
        acc
    }

    /// `(p(z), p′(z))` in one Horner pass, written into `val` and `der`.
    pub(crate) fn eval_with_derivative_into(
        &self,
        z: &BigComplex,
        val: &mut BigComplex,
        der: &mut BigComplex,
        t: &mut Scratch,
    ) {
        val.re.assign(0);
        val.im.assign(0);
        der.re.assign(0);
        der.im.assign(0);
        for c in self.coeffs.iter().rev() {
            der.mul_add_assign(z, val, t);
            val.mul_add_assign(z, c, t);
        }
    }
}

/// `m(m−1)…(m−j+1)`; zero when `m < j`, one when `j = 0`.
pub fn falling_factorial_impl(m: u64, j: u64) -> Integer {
    if m < j {
        return Integer::new();
    }
    let mut acc = Integer::from(1);
    for t in 0..j {
        acc *= m - t;
    }
    acc
}
