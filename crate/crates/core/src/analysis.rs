//! Measurements on eigenpolynomial root clouds: scaling by `n^d`, growth of the
//! largest root, Cauchy transforms of the root measures and the algebraic
//! equation they approach, the inequalities bounding `r_n`, and interlacing.

use std::fmt;

use rayon::prelude::*;
use rug::{Float, Integer, Rational};
use thiserror::Error;

use crate::eigensolver::{eigenpolynomial_cached, EigenCache, EigenError, Eigenpair};
use crate::operator::{classify, exponent_b, exponent_d, Operator, OperatorError};
use crate::polyalg::{BigComplex, GaussianRational, Polynomial, MIN_PRECISION};
use crate::rootfinder::{largest_modulus, roots, RootCloud, RootError};

/// Two real parts closer than this are treated as tied.
pub const INTERLACE_TIE: f64 = 1e-12;
/// Radius multiplier for the circle on which Cauchy-modulus margins are sampled.
pub const MARGIN_RADIUS_NUDGE: f64 = 1.0001;
const EVAL_DOUBLINGS: u32 = 4;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("degree {n}: {source}")]
    Eigen { n: usize, source: EigenError },
    #[error("degree {n}: {source}")]
    Root { n: usize, source: RootError },
    #[error("scaling exponent must be positive, got {0}")]
    NonPositiveExponent(Rational),
    #[error("derivative order {j} is out of range for degree {n}")]
    InvalidOrder { j: usize, n: usize },
    #[error("evaluation point is numerically a root of the denominator")]
    EvaluationAtRoot,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("roots are not real: largest |Im| is {max_imag:e}")]
    NotRealRooted { max_imag: f64 },
    #[error("interlacing needs clouds of sizes m+1 and m, got {a} and {b}")]
    SizeMismatch { a: usize, b: usize },
}

type Result<T> = std::result::Result<T, AnalysisError>;

/// `n^d` at `prec` bits: the exact integer `n^num` rounded once, then its
/// `den`-th root.
pub fn scale_factor(n: usize, d: &Rational, prec: u32) -> Result<Float> {
    if d.cmp0().is_le() {
        return Err(AnalysisError::NonPositiveExponent(d.clone()));
    }
    let num = d.numer().to_u32().ok_or_else(|| {
        AnalysisError::Precondition(format!("exponent numerator of {d} is too large"))
    })?;
    let den = d.denom().to_u32().ok_or_else(|| {
        AnalysisError::Precondition(format!("exponent denominator of {d} is too large"))
    })?;
    let base = u32::try_from(n)
        .map_err(|_| AnalysisError::Precondition(format!("degree {n} is too large to scale")))?;
    let power = Integer::from(Integer::u_pow_u(base, num));
    Ok(Float::with_val(prec.max(MIN_PRECISION), &power).root(den))
}

/// Roots of `q_n(z) = p_n(n^d z)`, i.e. the roots of `p_n` divided by `n^d`.
pub fn scaled_cloud(e: &Eigenpair, d: &Rational, precision_bits: u32) -> Result<RootCloud> {
    let cloud =
        roots(&e.p, precision_bits).map_err(|source| AnalysisError::Root { n: e.n, source })?;
    let s = scale_factor(e.n, d, cloud.precision_bits)?;
    Ok(cloud.scaled_down(&s))
}

fn cloud_for(e: &Eigenpair, precision_bits: u32) -> Result<RootCloud> {
    roots(&e.p, precision_bits).map_err(|source| AnalysisError::Root { n: e.n, source })
}

fn eigenpair(t: &Operator, n: usize, cache: Option<&EigenCache>) -> Result<Eigenpair> {
    eigenpolynomial_cached(t, n, cache).map_err(|source| AnalysisError::Eigen { n, source })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRow {
    pub n: usize,
    pub r_n: f64,
    /// `ln(r_n/prefactor)/ln n`; absent without a prefactor or for `n = 1`.
    pub exponent_n: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// Least-squares slope of `ln r_n` against `ln n`; needs two distinct `n`.
    pub fitted_gamma: Option<f64>,
    /// `exp` of the least-squares intercept.
    pub fitted_c: Option<f64>,
    pub prefactor_used: Option<f64>,
}

/// Least-squares line through `(x, y)`: `(slope, intercept)`.
pub fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let m = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Growth report from already computed `(n, r_n)` pairs.
pub fn growth_from_radii(radii: &[(usize, f64)], prefactor: Option<f64>) -> GrowthReport {
    let rows: Vec<GrowthRow> = radii
        .iter()
        .map(|&(n, r_n)| GrowthRow {
            n,
            r_n,
            exponent_n: prefactor
                .filter(|_| n >= 2)
                .map(|c| (r_n / c).ln() / (n as f64).ln()),
        })
        .collect();
    let logs: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.r_n > 0.0)
        .map(|r| ((r.n as f64).ln(), r.r_n.ln()))
        .collect();
    let fit = least_squares(&logs);
    GrowthReport {
        rows,
        fitted_gamma: fit.map(|f| f.0),
        fitted_c: fit.map(|f| f.1.exp()),
        prefactor_used: prefactor,
    }
}

fn check_grid(n_grid: &[usize]) -> Result<()> {
    if n_grid.is_empty() {
        return Err(AnalysisError::Precondition("degree grid is empty".into()));
    }
    if n_grid.contains(&0) || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalysisError::Precondition(
            "degree grid must be positive and strictly ascending".into(),
        ));
    }
    Ok(())
}

/// `r_n` for every degree in the grid, in grid order.
pub fn largest_roots(
    t: &Operator,
    n_grid: &[usize],
    precision_bits: u32,
    cache: Option<&EigenCache>,
) -> Result<Vec<(usize, f64)>> {
    n_grid
        .par_iter()
        .map(|&n| {
            let e = eigenpair(t, n, cache)?;
            Ok((n, largest_modulus(&cloud_for(&e, precision_bits)?).modulus))
        })
        .collect()
}

pub fn growth_report(
    t: &Operator,
    n_grid: &[usize],
    prefactor: Option<f64>,
    precision_bits: u32,
    cache: Option<&EigenCache>,
) -> Result<GrowthReport> {
    exponent_d(t)?;
    check_grid(n_grid)?;
    let radii = largest_roots(t, n_grid, precision_bits, cache)?;
    Ok(growth_from_radii(&radii, prefactor))
}

pub fn is_strictly_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] < w[1])
}

/// `r_n / n^{b/2}` per row, the quantity that grows without bound for every
/// exponent below `b`.
pub fn normalized_by_half_b(t: &Operator, radii: &[(usize, f64)]) -> Result<Vec<f64>> {
    let b = exponent_b(t)?
        .ok_or_else(|| AnalysisError::Precondition("operator has no exponent b".into()))?;
    let gamma = b.to_f64() / 2.0;
    Ok(radii
        .iter()
        .map(|&(n, r)| r / (n as f64).powf(gamma))
        .collect())
}

/// Exact derivatives `p, p′, …, p^{(m)}`.
pub fn derivatives(p: &Polynomial, m: usize) -> Vec<Polynomial> {
    let mut out = Vec::with_capacity(m + 1);
    out.push(p.clone());
    for j in 0..m {
        out.push(out[j].derivative(1));
    }
    out
}

/// `p(z)` with the precision raised until at least half the working bits
/// survive cancellation. The flag is false if that never happened.
fn eval_carefully(p: &Polynomial, z: &BigComplex) -> (BigComplex, bool) {
    let mut prec = z.prec();
    let mut last = BigComplex::zero(prec);
    for _ in 0..=EVAL_DOUBLINGS {
        let zp = z.with_prec(prec);
        let v = p.eval(&zp);
        let bound = p.eval_abs_bound(&zp);
        if v.abs() > (bound >> (prec / 2)) {
            return (v, true);
        }
        last = v;
        prec *= 2;
    }
    (last, false)
}

/// `p^{(j+1)}(z) / ((n−j)·p^{(j)}(z))` from a table of exact derivatives.
fn cauchy_from_table(
    ders: &[Polynomial],
    n: usize,
    j: usize,
    z: &BigComplex,
) -> Result<BigComplex> {
    if j >= n || j + 1 >= ders.len() {
        return Err(AnalysisError::InvalidOrder { j, n });
    }
    let (den, ok) = eval_carefully(&ders[j], z);
    if !ok {
        return Err(AnalysisError::EvaluationAtRoot);
    }
    let (num, _) = eval_carefully(&ders[j + 1], z);
    let prec = z.prec();
    let den = den.with_prec(prec);
    let num = num.with_prec(prec);
    let scale = Float::with_val(prec, (n - j) as u64);
    Ok(&num / &den.scale(&scale))
}

/// Cauchy transform of the root measure of `p_n^{(j)}` at `z`.
pub fn empirical_cauchy(e: &Eigenpair, j: usize, z: &BigComplex) -> Result<BigComplex> {
    if j >= e.n {
        return Err(AnalysisError::InvalidOrder { j, n: e.n });
    }
    cauchy_from_table(&derivatives(&e.p, j + 1), e.n, j, z)
}

/// Cauchy transform of `q_n^{(j)}` for `q_n(z) = p_n(s·z)`: `s·C_{n,j}(s·z)`.
fn scaled_cauchy(
    ders: &[Polynomial],
    n: usize,
    j: usize,
    s: &Float,
    z: &BigComplex,
) -> Result<BigComplex> {
    Ok(cauchy_from_table(ders, n, j, &z.scale(s))?.scale(s))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CauchyTerm {
    pub j: usize,
    pub coeff: GaussianRational,
    pub zpow: usize,
}

/// `Σ coeff·z^zpow·C^j = 1`, with the `j0` term first.
#[derive(Clone, Debug, PartialEq)]
pub struct CauchyEquation {
    pub j0: usize,
    pub terms: Vec<CauchyTerm>,
}

impl CauchyEquation {
    /// Left-hand side at numeric `z` and `C`.
    pub fn lhs(&self, z: &BigComplex, c: &BigComplex) -> BigComplex {
        let prec = z.prec().max(c.prec());
        let mut acc = BigComplex::zero(prec);
        for t in &self.terms {
            let coeff = BigComplex::from_gaussian(&t.coeff, prec);
            let term = &(&coeff * &z.powi(t.zpow as u32)) * &c.powi(t.j as u32);
            acc = &acc + &term;
        }
        acc
    }

    /// The equation at a fixed exact `z`, as a polynomial in `C` whose roots
    /// are the values of `C` satisfying it.
    pub fn polynomial_in_c(&self, z: &GaussianRational) -> Polynomial {
        let top = self.terms.iter().map(|t| t.j).max().unwrap_or(0);
        let mut coeffs = vec![GaussianRational::zero(); top + 1];
        coeffs[0] = GaussianRational::from(-1);
        for t in &self.terms {
            let mut zp = GaussianRational::one();
            for _ in 0..t.zpow {
                zp = &zp * z;
            }
            coeffs[t.j] = &coeffs[t.j] + &(&t.coeff * &zp);
        }
        Polynomial::new(coeffs)
    }
}

fn power_suffix(f: &mut fmt::Formatter<'_>, base: &str, e: usize) -> fmt::Result {
    match e {
        0 => Ok(()),
        1 => write!(f, "{base}"),
        _ => write!(f, "{base}^{e}"),
    }
}

impl fmt::Display for CauchyEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            let one = GaussianRational::one();
            let coeff = if t.coeff == one {
                String::new()
            } else if t.coeff == -one {
                "-".to_string()
            } else {
                t.coeff.to_string()
            };
            if i > 0 && !coeff.starts_with('-') {
                write!(f, "+")?;
            }
            write!(f, "{coeff}")?;
            power_suffix(f, "z", t.zpow)?;
            power_suffix(f, "C", t.j)?;
        }
        write!(f, "=1")
    }
}

/// The algebraic equation for the limiting Cauchy transform: the `j0` term
/// plus one term per order in the attainment set, all divided by `α_{j0,j0}`.
pub fn cauchy_equation(t: &Operator) -> Result<CauchyEquation> {
    let c = classify(t)?;
    exponent_d(t)?;
    let j0 = c.j0.ok_or(AnalysisError::Operator(OperatorError::NoJ0))?;
    let lead = t.alpha(j0, j0);
    let mut terms = vec![CauchyTerm {
        j: j0,
        coeff: GaussianRational::one(),
        zpow: j0,
    }];
    for &j in &c.attainment {
        let deg = t.degree_of(j).expect("attainment orders are present");
        let coeff = t
            .alpha(j, deg)
            .checked_div(&lead)
            .expect("leading coefficient of Q_{j0} is nonzero");
        terms.push(CauchyTerm {
            j,
            coeff,
            zpow: deg,
        });
    }
    Ok(CauchyEquation { j0, terms })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub n: usize,
    pub sample_points: Vec<BigComplex>,
    /// `|LHS − 1|` at each evaluated sample, aligned with `sample_points`.
    pub residuals: Vec<f64>,
    pub median: f64,
    /// Indices of samples skipped because they sat on a root.
    pub skipped: Vec<usize>,
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// `count` equispaced points on the circle `|z| = radius`, starting on the
/// positive real axis.
pub fn circle_samples(radius: &Float, count: usize, prec: u32) -> Vec<BigComplex> {
    (0..count)
        .map(|m| BigComplex::unit_root(m, count, 0.0, prec).scale(radius))
        .collect()
}

fn sample_radius(cloud: &RootCloud, radius_factor: f64, prec: u32) -> Float {
    let r = largest_modulus(cloud).modulus;
    let r = if r > 0.0 { r } else { 1.0 };
    Float::with_val(prec, r * radius_factor)
}

fn check_radius_factor(radius_factor: f64) -> Result<()> {
    if radius_factor > 1.0 && radius_factor.is_finite() {
        Ok(())
    } else {
        Err(AnalysisError::Precondition(format!(
            "radius factor must exceed 1, got {radius_factor}"
        )))
    }
}

/// Residual of the limiting Cauchy equation for the empirical transform of
/// `q_n` on a circle outside the scaled cloud.
pub fn cauchy_residual(
    t: &Operator,
    e: &Eigenpair,
    d: &Rational,
    num_samples: usize,
    radius_factor: f64,
    precision_bits: u32,
) -> Result<ResidualReport> {
    check_radius_factor(radius_factor)?;
    let eq = cauchy_equation(t)?;
    let cloud = scaled_cloud(e, d, precision_bits)?;
    let prec = precision_bits.max(MIN_PRECISION);
    let s = scale_factor(e.n, d, prec)?;
    let ders = derivatives(&e.p, 1);
    let samples = circle_samples(
        &sample_radius(&cloud, radius_factor, prec),
        num_samples,
        prec,
    );
    let mut residuals = Vec::with_capacity(samples.len());
    let mut kept = Vec::with_capacity(samples.len());
    let mut skipped = Vec::new();
    let one = BigComplex::from_f64(1.0, 0.0, prec);
    for (i, z) in samples.into_iter().enumerate() {
        match scaled_cauchy(&ders, e.n, 0, &s, &z) {
            Ok(c) => {
                residuals.push((&eq.lhs(&z, &c) - &one).abs_f64());
                kept.push(z);
            }
            Err(AnalysisError::EvaluationAtRoot) => skipped.push(i),
            Err(other) => return Err(other),
        }
    }
    Ok(ResidualReport {
        n: e.n,
        median: median(&residuals),
        sample_points: kept,
        residuals,
        skipped,
    })
}

/// `|C_{n,j}(z0)| − 1/(2|z0|)` for `|z0| ≥ r_n`.
pub fn cauchy_modulus_margin(e: &Eigenpair, j: usize, z0: &BigComplex, r_n: f64) -> Result<f64> {
    let m = z0.abs_f64();
    if m < r_n {
        return Err(AnalysisError::Precondition(format!(
            "|z0| = {m} is inside the largest root modulus {r_n}"
        )));
    }
    let c = empirical_cauchy(e, j, z0)?;
    Ok(c.abs_f64() - 1.0 / (2.0 * m))
}

/// Smallest Cauchy-modulus margin over orders `0..orders` and `samples` points of
/// the circle `|z| = MARGIN_RADIUS_NUDGE·r_n`.
pub fn min_cauchy_modulus_margin(
    e: &Eigenpair,
    orders: usize,
    r_n: f64,
    samples: usize,
    prec: u32,
) -> Result<f64> {
    let ders = derivatives(&e.p, orders.min(e.n));
    let radius = Float::with_val(prec, r_n * MARGIN_RADIUS_NUDGE);
    let mut worst = f64::INFINITY;
    for z in circle_samples(&radius, samples, prec) {
        for j in 0..orders.min(e.n) {
            let c = cauchy_from_table(&ders, e.n, j, &z)?;
            worst = worst.min(c.abs_f64() - 1.0 / (2.0 * z.abs_f64()));
        }
    }
    Ok(worst)
}

/// Right-hand side of the inequality satisfied by the largest root modulus,
/// with `Q_k` normalized monic:
/// `Σ_{j<k} Σ_i |α_{j,i}| 2^{k−j} r^{k−j−deg Q_k+i} / (n−k+1)^{k−j}
///  + Σ_{i<deg Q_k} |α_{k,i}| / r^{deg Q_k−i}`.
pub fn radius_bound_rhs(t: &Operator, n: usize, r_n: f64) -> Result<f64> {
    exponent_d(t)?;
    let k = t.order();
    if n <= k {
        return Err(AnalysisError::Precondition(format!(
            "need n > k = {k}, got n = {n}"
        )));
    }
    if r_n <= 0.0 || !r_n.is_finite() {
        return Err(AnalysisError::Precondition(format!(
            "need r_n > 0, got {r_n}"
        )));
    }
    let qk = t.term(k).expect("leading term present");
    let dk = qk.degree().expect("leading term nonzero");
    let lead = qk.coeff(dk);
    let norm = |a: &GaussianRational| a.checked_div(&lead).expect("nonzero lead").abs_f64();
    let base = (n - k + 1) as f64;
    let mut rhs = 0.0;
    for (j, q) in t.terms().filter(|(j, _)| *j < k) {
        let kj = (k - j) as i32;
        for (i, a) in q.coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let pow = kj - dk as i32 + i as i32;
            rhs += norm(a) * 2f64.powi(kj) * r_n.powi(pow) / base.powi(kj);
        }
    }
    for (i, a) in qk.coeffs().iter().enumerate().take(dk) {
        if !a.is_zero() {
            rhs += norm(a) / r_n.powi((dk - i) as i32);
        }
    }
    Ok(rhs)
}

/// Whether the roots of `p^{(j+1)}` lie within `tol_rel·r_n` of the hull of
/// the roots of `p^{(j)}`, for `j = 0..orders` (stopping at degree one).
pub fn gauss_lucas_chain(
    e: &Eigenpair,
    orders: usize,
    tol_rel: f64,
    precision_bits: u32,
) -> Result<Vec<(usize, bool)>> {
    let last = orders.min(e.n.saturating_sub(1));
    let ders = derivatives(&e.p, last + 1);
    let clouds: Vec<RootCloud> = ders[..=last]
        .iter()
        .map(|p| roots(p, precision_bits).map_err(|source| AnalysisError::Root { n: e.n, source }))
        .collect::<Result<_>>()?;
    let tol = tol_rel * largest_modulus(&clouds[0]).modulus;
    Ok((0..last)
        .map(|j| {
            (
                j,
                crate::rootfinder::hull_contains(&clouds[j], &clouds[j + 1], tol),
            )
        })
        .collect())
}

/// Largest gap between the Cauchy transforms of `q_n^{(a)}` and `q_n^{(b)}`
/// over all pairs of `orders`, sampled on a circle outside the scaled cloud.
pub fn derivative_measure_distance(
    e: &Eigenpair,
    d: &Rational,
    orders: &[usize],
    num_samples: usize,
    radius_factor: f64,
    precision_bits: u32,
) -> Result<f64> {
    check_radius_factor(radius_factor)?;
    let top = orders.iter().copied().max().unwrap_or(0);
    if top >= e.n {
        return Err(AnalysisError::InvalidOrder { j: top, n: e.n });
    }
    if orders.len() < 2 {
        return Ok(0.0);
    }
    let prec = precision_bits.max(MIN_PRECISION);
    let cloud = scaled_cloud(e, d, precision_bits)?;
    let s = scale_factor(e.n, d, prec)?;
    let ders = derivatives(&e.p, top + 1);
    let mut worst = 0f64;
    for z in circle_samples(
        &sample_radius(&cloud, radius_factor, prec),
        num_samples,
        prec,
    ) {
        let values: Vec<BigComplex> = match orders
            .iter()
            .map(|&j| scaled_cauchy(&ders, e.n, j, &s, &z))
            .collect::<Result<_>>()
        {
            Ok(v) => v,
            Err(AnalysisError::EvaluationAtRoot) => continue,
            Err(other) => return Err(other),
        };
        for a in 0..values.len() {
            for b in a + 1..values.len() {
                worst = worst.max((&values[a] - &values[b]).abs_f64());
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interlacing {
    Interlaced,
    NotInterlaced,
    /// Two real parts tie within `INTERLACE_TIE`, so the order is not decided.
    Indeterminate,
}

impl fmt::Display for Interlacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Interlacing::Interlaced => "true",
            Interlacing::NotInterlaced => "false",
            Interlacing::Indeterminate => "indeterminate",
        })
    }
}

fn real_parts(c: &RootCloud, imag_tol: f64) -> Result<Vec<f64>> {
    let max_imag = c
        .roots
        .iter()
        .map(|r| r.value.im.to_f64().abs())
        .fold(0.0, f64::max);
    if max_imag > imag_tol {
        return Err(AnalysisError::NotRealRooted { max_imag });
    }
    let mut v: Vec<f64> = c.roots.iter().map(|r| r.value.re.to_f64()).collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Whether the real roots of `b` strictly separate those of `a`, which has
/// exactly one more root.
pub fn interlace_real(a: &RootCloud, b: &RootCloud, imag_tol: f64) -> Result<Interlacing> {
    if a.len() != b.len() + 1 {
        return Err(AnalysisError::SizeMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    let ra = real_parts(a, imag_tol)?;
    let rb = real_parts(b, imag_tol)?;
    let mut merged = Vec::with_capacity(ra.len() + rb.len());
    for (i, x) in ra.iter().enumerate() {
        merged.push(*x);
        if let Some(y) = rb.get(i) {
            merged.push(*y);
        }
    }
    if merged
        .windows(2)
        .any(|w| (w[1] - w[0]).abs() <= INTERLACE_TIE)
    {
        return Ok(Interlacing::Indeterminate);
    }
    Ok(if is_strictly_increasing(&merged) {
        Interlacing::Interlaced
    } else {
        Interlacing::NotInterlaced
    })
}

/// Symmetric Hausdorff distance between two point clouds.
pub fn hausdorff_distance(a: &RootCloud, b: &RootCloud) -> f64 {
    let pa = a.points();
    let pb = b.points();
    let directed = |from: &[(f64, f64)], to: &[(f64, f64)]| {
        from.iter()
            .map(|p| {
                to.iter()
                    .map(|q| (p.0 - q.0).hypot(p.1 - q.1))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    directed(&pa, &pb).max(directed(&pb, &pa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolver::eigenpolynomial;
    use crate::operator::fixtures::*;
    use crate::rootfinder::DEFAULT_PRECISION;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn pair(p: Polynomial) -> Eigenpair {
        Eigenpair {
            n: p.degree().unwrap(),
            lambda: GaussianRational::zero(),
            p,
            operator_digest: String::new(),
        }
    }

    fn q(a: i64, b: i64) -> Rational {
        Rational::from((a, b))
    }

    fn c64(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(re, im, 192)
    }

    /// Largest eigenvalue of the symmetric tridiagonal matrix with the given
    /// diagonal and off-diagonal.
    fn jacobi_max(diag: &[f64], off: &[f64]) -> f64 {
        let n = diag.len();
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else if i + 1 == j {
                off[i]
            } else if j + 1 == i {
                off[j]
            } else {
                0.0
            }
        });
        SymmetricEigen::new(m)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::MIN, f64::max)
    }

    /// Monic Hermite (weight e^{−z²}): `p_{k+1} = z p_k − (k/2) p_{k−1}`.
    fn hermite_oracle(n: usize) -> f64 {
        let off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
        jacobi_max(&vec![0.0; n], &off)
    }

    /// Monic Laguerre: `p_{k+1} = (z − (2k+1)) p_k − k² p_{k−1}`.
    fn laguerre_oracle(n: usize) -> f64 {
        let diag: Vec<f64> = (0..n).map(|k| (2 * k + 1) as f64).collect();
        let off: Vec<f64> = (1..n).map(|k| k as f64).collect();
        jacobi_max(&diag, &off)
    }

    #[test]
    fn scale_factor_is_exact_root_of_integer_power() {
        let s = scale_factor(100, &q(2, 3), 192).unwrap();
        let cube = Float::with_val(192, s.square_ref()) * &s;
        assert!((cube - 10000u32).abs() < 1e-40);
        assert_eq!(scale_factor(1, &q(5, 7), 192).unwrap(), 1);
        assert!(matches!(
            scale_factor(3, &q(0, 1), 192),
            Err(AnalysisError::NonPositiveExponent(_))
        ));
    }

    #[test]
    fn scaled_cloud_examples() {
        let c = scaled_cloud(&pair(Polynomial::from_ints(&[2, -4, 1])), &q(1, 1), 192).unwrap();
        let s = 2f64.sqrt();
        let got: Vec<f64> = c.roots.iter().map(|r| r.value.re.to_f64()).collect();
        assert!((got[0] - (2.0 - s) / 2.0).abs() < 1e-15);
        assert!((got[1] - (2.0 + s) / 2.0).abs() < 1e-15);

        let lin = pair(Polynomial::from_ints(&[-3, 1]));
        let c = scaled_cloud(&lin, &q(5, 7), 192).unwrap();
        assert_eq!(c.roots[0].value.re.to_f64(), 3.0);
    }

    #[test]
    fn t1_scaled_cloud_is_bounded() {
        let e = eigenpolynomial(&t1(), 100).unwrap();
        let c = scaled_cloud(&e, &q(1, 1), DEFAULT_PRECISION).unwrap();
        assert_eq!(c.len(), 100);
        assert!(largest_modulus(&c).modulus <= 3.0);
    }

    #[test]
    fn scaling_consistency() {
        for (t, n, d) in [
            (t2(), 40, q(5, 7)),
            (t4(), 30, q(2, 3)),
            (hermite(), 30, q(1, 2)),
        ] {
            let e = eigenpolynomial(&t, n).unwrap();
            let raw = largest_modulus(&roots(&e.p, DEFAULT_PRECISION).unwrap());
            let scaled = largest_modulus(&scaled_cloud(&e, &d, DEFAULT_PRECISION).unwrap());
            let s = scale_factor(n, &d, 64).unwrap().to_f64();
            let tol = raw.err_radius / s + scaled.err_radius + 1e-13 * scaled.modulus;
            assert!((raw.modulus / s - scaled.modulus).abs() <= tol);
        }
    }

    #[test]
    fn least_squares_recovers_power_law() {
        let radii: Vec<(usize, f64)> = [10, 20, 40, 80]
            .iter()
            .map(|&n| (n, 1.7 * (n as f64).powf(0.6)))
            .collect();
        let g = growth_from_radii(&radii, Some(1.7));
        assert!((g.fitted_gamma.unwrap() - 0.6).abs() < 1e-12);
        assert!((g.fitted_c.unwrap() - 1.7).abs() < 1e-10);
        for r in &g.rows {
            assert!((r.exponent_n.unwrap() - 0.6).abs() < 1e-12);
        }
        let single = growth_from_radii(&[(5, 2.0)], None);
        assert_eq!(single.fitted_gamma, None);
        assert_eq!(single.rows[0].exponent_n, None);
    }

    #[test]
    fn growth_report_table_rows() {
        let g = growth_report(&t2(), &[50], Some(1.3), DEFAULT_PRECISION, None).unwrap();
        assert!((g.rows[0].exponent_n.unwrap() - 0.671977).abs() < 1e-3);
        assert!(growth_report(&t2(), &[50, 40], None, 192, None).is_err());
        assert!(growth_report(&t2(), &[], None, 192, None).is_err());
    }

    #[test]
    fn hermite_growth_matches_jacobi_oracle() {
        let grid = [10, 20, 40, 80];
        let g = growth_report(&hermite(), &grid, None, DEFAULT_PRECISION, None).unwrap();
        let oracle: Vec<(usize, f64)> = grid.iter().map(|&n| (n, hermite_oracle(n))).collect();
        for (row, (_, r)) in g.rows.iter().zip(&oracle) {
            assert!((row.r_n / r - 1.0).abs() < 1e-8, "{} vs {r}", row.r_n);
        }
        let want = growth_from_radii(&oracle, None).fitted_gamma.unwrap();
        assert!((g.fitted_gamma.unwrap() - want).abs() < 1e-8);
    }

    #[test]
    fn laguerre_largest_roots_match_jacobi_oracle() {
        for n in [5, 30, 60] {
            let e = eigenpolynomial(&laguerre(), n).unwrap();
            let r = largest_modulus(&roots(&e.p, DEFAULT_PRECISION).unwrap()).modulus;
            assert!((r / laguerre_oracle(n) - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn empirical_cauchy_examples() {
        let z2 = pair(Polynomial::from_ints(&[0, 0, 1]));
        let c = empirical_cauchy(&z2, 0, &c64(2.0, 0.0)).unwrap();
        assert!((c.re.to_f64() - 0.5).abs() < 1e-40 && c.im.is_zero());

        let half = pair(Polynomial::new(vec![
            GaussianRational::real(q(-1, 2)),
            GaussianRational::zero(),
            GaussianRational::one(),
        ]));
        let c0 = empirical_cauchy(&half, 0, &c64(1.0, 0.0)).unwrap();
        assert!((c0.re.to_f64() - 2.0).abs() < 1e-40);
        let c1 = empirical_cauchy(&half, 1, &c64(1.0, 0.0)).unwrap();
        assert!((c1.re.to_f64() - 1.0).abs() < 1e-40);

        assert!(matches!(
            empirical_cauchy(&half, 2, &c64(1.0, 0.0)),
            Err(AnalysisError::InvalidOrder { j: 2, n: 2 })
        ));
        assert!(matches!(
            empirical_cauchy(&z2, 0, &c64(0.0, 0.0)),
            Err(AnalysisError::EvaluationAtRoot)
        ));
    }

    #[test]
    fn cauchy_equations_render_like_the_printed_ones() {
        assert_eq!(
            cauchy_equation(&t4()).unwrap().to_string(),
            "z^3C^3+z^2C^5=1"
        );
        assert_eq!(
            cauchy_equation(&t5()).unwrap().to_string(),
            "z^5C^5+z^4C^6+z^2C^8=1"
        );
        assert_eq!(
            cauchy_equation(&t1()).unwrap().to_string(),
            "zC+zC^2+zC^3+zC^4+zC^5=1"
        );
        let eq = cauchy_equation(&t5()).unwrap();
        assert_eq!(eq.terms.len(), 3);
        assert_eq!(
            eq.terms[0],
            CauchyTerm {
                j: 5,
                coeff: GaussianRational::one(),
                zpow: 5
            }
        );
    }

    #[test]
    fn cauchy_equation_normalizes_by_leading_j0_coefficient() {
        let t = op(&[(2, &[0, 0, 4]), (5, &[-6])]);
        let eq = cauchy_equation(&t).unwrap();
        assert_eq!(eq.to_string(), "z^2C^2-3/2C^5=1");
        assert!(cauchy_equation(&laguerre()).is_ok());
        let nondeg = op(&[(1, &[0, 1])]);
        assert!(cauchy_equation(&nondeg).is_err());
    }

    #[test]
    fn exact_algebraic_solution_has_zero_residual() {
        let eq = cauchy_equation(&t4()).unwrap();
        let z = GaussianRational::new(2, 1);
        let in_c = eq.polynomial_in_c(&z);
        let cands = roots(&in_c, 256).unwrap();
        let zn = BigComplex::from_gaussian(&z, 256);
        let one = BigComplex::from_f64(1.0, 0.0, 256);
        for c in &cands.roots {
            assert!((&eq.lhs(&zn, &c.value) - &one).abs_f64() < 1e-40);
        }
    }

    #[test]
    fn degree_one_transform_is_single_point_mass() {
        // p₁ = z − a for any T: C(z) = 1/(z − a)
        let e = eigenpolynomial(&op(&[(1, &[0, 1]), (3, &[1])]), 1).unwrap();
        let a = e.p.coeff(0);
        let z = c64(0.3, 1.7);
        let c = empirical_cauchy(&e, 0, &z).unwrap();
        let want = (&z + &BigComplex::from_gaussian(&a, 192)).recip();
        assert!((&c - &want).abs_f64() < 1e-50);
    }

    #[test]
    fn residual_report_shape() {
        let e = eigenpolynomial(&t4(), 20).unwrap();
        let r = cauchy_residual(&t4(), &e, &q(2, 3), 16, 2.0, 192).unwrap();
        assert_eq!(r.residuals.len() + r.skipped.len(), 16);
        assert_eq!(r.median, median(&r.residuals));
        assert!(cauchy_residual(&t4(), &e, &q(2, 3), 16, 1.0, 192).is_err());
    }

    #[test]
    fn cauchy_modulus_margin_examples() {
        let half = pair(Polynomial::new(vec![
            GaussianRational::real(q(-1, 2)),
            GaussianRational::zero(),
            GaussianRational::one(),
        ]));
        let m = cauchy_modulus_margin(&half, 0, &c64(1.0, 0.0), 0.5f64.sqrt()).unwrap();
        assert!((m - 1.5).abs() < 1e-15);
        assert!(cauchy_modulus_margin(&half, 0, &c64(0.5, 0.0), 0.5f64.sqrt()).is_err());

        let cluster = pair(Polynomial::monomial(GaussianRational::one(), 6));
        let big_r = 3.0;
        let m = cauchy_modulus_margin(&cluster, 0, &c64(0.0, big_r), 0.0).unwrap();
        assert!((m - 1.0 / (2.0 * big_r)).abs() < 1e-15);

        let lag2 = eigenpolynomial(&laguerre(), 2).unwrap();
        let r2 = 2.0 + 2f64.sqrt();
        let z0 = c64(MARGIN_RADIUS_NUDGE * r2, 0.0);
        assert!(cauchy_modulus_margin(&lag2, 0, &z0, r2).unwrap() >= 0.0);
        assert!(min_cauchy_modulus_margin(&lag2, 2, r2, 32, 192).unwrap() >= -1e-9);
    }

    #[test]
    fn radius_bound_examples() {
        // Hermite-type: RHS = 4r²/(n−1)
        let rhs = radius_bound_rhs(&hermite(), 50, 10.0).unwrap();
        assert!((rhs - 400.0 / 49.0).abs() < 1e-12);
        let r = hermite_oracle(50);
        assert!(radius_bound_rhs(&hermite(), 50, r).unwrap() >= 1.0);

        // two monomial terms: K r^{k−deg Q_k}/(n−k+1)^{k−j0} with K = 2^{k−j0}
        let rhs = radius_bound_rhs(&t2(), 30, 5.0).unwrap();
        let want = 2f64.powi(5) * 5f64.powi(7) / 24f64.powi(5);
        assert!((rhs / want - 1.0).abs() < 1e-12);

        assert!(radius_bound_rhs(&t2(), 7, 5.0).is_err());
        assert!(radius_bound_rhs(&t2(), 30, 0.0).is_err());
    }

    #[test]
    fn radius_bound_normalizes_leading_term() {
        let a = op(&[(2, &[0, 0, 1]), (3, &[1])]);
        let b = op(&[(2, &[0, 0, 3]), (3, &[3])]);
        assert_eq!(
            radius_bound_rhs(&a, 20, 4.0).unwrap(),
            radius_bound_rhs(&b, 20, 4.0).unwrap()
        );
    }

    #[test]
    fn gauss_lucas_chain_holds() {
        let e = eigenpolynomial(&t3(), 30).unwrap();
        let chain = gauss_lucas_chain(&e, 5, 1e-6, 192).unwrap();
        assert_eq!(chain.len(), 5);
        assert!(chain.iter().all(|(_, ok)| *ok));
    }

    #[test]
    fn derivative_distance_examples() {
        let lin = pair(Polynomial::from_ints(&[1, 1]));
        assert_eq!(
            derivative_measure_distance(&lin, &q(1, 1), &[0], 8, 2.0, 192).unwrap(),
            0.0
        );
        let mono = pair(Polynomial::monomial(GaussianRational::one(), 7));
        let dist =
            derivative_measure_distance(&mono, &q(1, 2), &[0, 1, 2, 3], 16, 2.0, 192).unwrap();
        assert!(dist < 1e-45, "{dist}");
        assert!(derivative_measure_distance(&mono, &q(1, 2), &[0, 7], 16, 2.0, 192).is_err());
    }

    fn cloud_of(points: &[f64]) -> RootCloud {
        RootCloud::from_values(points.iter().map(|&x| c64(x, 0.0)).collect())
    }

    #[test]
    fn interlacing_examples() {
        let lag2 = roots(&Polynomial::from_ints(&[2, -4, 1]), 192).unwrap();
        assert_eq!(
            interlace_real(&lag2, &cloud_of(&[1.0]), 1e-9).unwrap(),
            Interlacing::Interlaced
        );
        assert_eq!(
            interlace_real(&cloud_of(&[0.0, 2.0]), &cloud_of(&[3.0]), 1e-9).unwrap(),
            Interlacing::NotInterlaced
        );
        let h = (1.5f64).sqrt();
        let g = 0.5f64.sqrt();
        assert_eq!(
            interlace_real(&cloud_of(&[-h, 0.0, h]), &cloud_of(&[-g, g]), 1e-9).unwrap(),
            Interlacing::Interlaced
        );
        assert_eq!(
            interlace_real(&cloud_of(&[0.0, 1.0]), &cloud_of(&[1.0]), 1e-9).unwrap(),
            Interlacing::Indeterminate
        );
        assert!(matches!(
            interlace_real(&cloud_of(&[0.0, 1.0]), &cloud_of(&[0.5, 0.7]), 1e-9),
            Err(AnalysisError::SizeMismatch { a: 2, b: 2 })
        ));
        let complex = roots(&Polynomial::from_ints(&[1, 0, 1]), 192).unwrap();
        assert!(matches!(
            interlace_real(&complex, &cloud_of(&[0.0]), 1e-9),
            Err(AnalysisError::NotRealRooted { .. })
        ));
    }

    #[test]
    fn consecutive_scaled_laguerre_clouds_interlace() {
        let d = q(1, 1);
        let a = scaled_cloud(&eigenpolynomial(&laguerre(), 20).unwrap(), &d, 192).unwrap();
        let b = scaled_cloud(&eigenpolynomial(&laguerre(), 19).unwrap(), &d, 192).unwrap();
        assert_eq!(
            interlace_real(&a, &b, 1e-9).unwrap(),
            Interlacing::Interlaced
        );
    }

    #[test]
    fn hausdorff_basics() {
        let a = cloud_of(&[0.0, 1.0]);
        let b = cloud_of(&[0.0, 1.0, 3.0]);
        assert_eq!(hausdorff_distance(&a, &a), 0.0);
        assert_eq!(hausdorff_distance(&a, &b), 2.0);
        assert_eq!(hausdorff_distance(&b, &a), 2.0);
    }

    #[test]
    fn median_handles_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }
}
