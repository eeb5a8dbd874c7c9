//! All roots of an exact polynomial by multiprecision Aberth–Ehrlich iteration.
//!
//! Exact zero roots are split off symbolically. The rest start on the Fujiwara
//! circle with a fixed angular offset, so clouds are reproducible bit for bit.
//! The long far-field contraction from that circle runs first in double
//! precision with an extended exponent; the multiprecision sweeps then take
//! over. Each root is frozen once its update drops below `2^{−prec/2}(1+|z|)`
//! or it sits at the rounding-noise floor. An attempt is accepted when every
//! root satisfies the error-radius bound `deg·|p/p′| ≤ 2^{−prec/4}(1+|z|)`,
//! which also admits clustered roots that never meet the update threshold.
//! Otherwise precision doubles and the iteration resumes from the current
//! iterates.

use std::cmp::Ordering;

use num_complex::Complex64;
use rug::float::Round;
use rug::{Assign, Float};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::polyalg::{BigComplex, NumericPolynomial, Polynomial, Scratch, MIN_PRECISION};

pub const DEFAULT_PRECISION: u32 = 192;
pub const MAX_DOUBLINGS: u32 = 4;
const ANGULAR_OFFSET: f64 = 0.376;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("polynomial has degree zero or is zero")]
    ZeroDegree,
    #[error("no convergence for degree {degree} after raising precision to {precision_bits} bits")]
    NoConvergence { degree: usize, precision_bits: u32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub value: BigComplex,
    /// First-order Newton bound `deg·|p(z)/p′(z)|`; heuristic, not a proof.
    pub err_radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootCloud {
    pub roots: Vec<Root>,
    pub degree: usize,
    pub precision_bits: u32,
    pub source_digest: String,
}

/// Largest root modulus together with the widest error radius among roots
/// that could be the maximum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LargestModulus {
    pub modulus: f64,
    pub err_radius: f64,
}

impl RootCloud {
    /// Cloud of given points with zero error radii, for geometric queries.
    pub fn from_values(values: Vec<BigComplex>) -> Self {
        let precision_bits = values
            .iter()
            .map(BigComplex::prec)
            .max()
            .unwrap_or(MIN_PRECISION);
        RootCloud {
            degree: values.len(),
            roots: values
                .into_iter()
                .map(|value| Root {
                    value,
                    err_radius: 0.0,
                })
                .collect(),
            precision_bits,
            source_digest: String::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.roots.iter().map(|r| r.value.to_f64()).collect()
    }

    /// Every root multiplied by `1/s`.
    pub fn scaled_down(&self, s: &Float) -> Self {
        let mut out = self.clone();
        let sf = s.to_f64();
        for r in &mut out.roots {
            r.value = r.value.div_real(s);
            r.err_radius /= sf;
        }
        out
    }
}

/// SHA-256 over the exact coefficient strings.
pub fn polynomial_digest(p: &Polynomial) -> String {
    let mut h = Sha256::new();
    for c in p.coeffs() {
        let [re, im] = c.to_strings();
        h.update(re.as_bytes());
        h.update(b",");
        h.update(im.as_bytes());
        h.update(b";");
    }
    hex::encode(h.finalize())
}

/// `2·max_i |a_{n−i}/a_n|^{1/i}`, with the constant term halved first.
fn fujiwara_bound(p: &NumericPolynomial, prec: u32) -> Float {
    let n = p.coeffs.len() - 1;
    let lead = p.coeffs[n].abs();
    let mut best = Float::new(prec);
    for i in 1..=n {
        let mut a = Float::with_val(prec, p.coeffs[n - i].abs() / &lead);
        if i == n {
            a /= 2u32;
        }
        if a.is_zero() {
            continue;
        }
        let r = a.root(i as u32);
        if r > best {
            best = r;
        }
    }
    if best.is_zero() {
        best.assign(1);
    }
    best * 2u32
}

fn initial_guesses(p: &NumericPolynomial, prec: u32) -> Vec<BigComplex> {
    let n = p.coeffs.len() - 1;
    let radius = fujiwara_bound(p, prec);
    let start: Vec<BigComplex> = (0..n)
        .map(|k| BigComplex::unit_root(k, n, ANGULAR_OFFSET, prec).scale(&radius))
        .collect();
    match coarse_aberth(p, &start) {
        Some(z) => z
            .into_iter()
            .map(|z| BigComplex::from_f64(z.re, z.im, prec))
            .collect(),
        None => start,
    }
}

/// Complex double mantissa with a separate binary exponent.
#[derive(Clone, Copy)]
struct Wide {
    m: Complex64,
    e: i64,
}

impl Wide {
    const ZERO: Wide = Wide {
        m: Complex64::new(0.0, 0.0),
        e: 0,
    };

    fn from_big(c: &BigComplex) -> Wide {
        let scale = c.re.get_exp().into_iter().chain(c.im.get_exp()).max();
        match scale {
            None => Wide::ZERO,
            Some(e) => {
                let re = Float::with_val(64, &c.re >> e).to_f64();
                let im = Float::with_val(64, &c.im >> e).to_f64();
                Wide {
                    m: Complex64::new(re, im),
                    e: e as i64,
                }
            }
        }
    }

    fn normalized(m: Complex64, e: i64) -> Wide {
        let big = m.re.abs().max(m.im.abs());
        if !(2f64.powi(-400)..2f64.powi(400)).contains(&big) {
            if big == 0.0 {
                return Wide::ZERO;
            }
            if big.is_finite() {
                let shift = ((big.to_bits() >> 52) & 0x7ff) as i64 - 1022;
                return Wide {
                    m: m * pow2(-shift),
                    e: e + shift,
                };
            }
        }
        Wide { m, e }
    }

    /// `self·z + c`
    fn mul_add(self, z: Complex64, c: Wide) -> Wide {
        let v = self.m * z;
        if c.m.re == 0.0 && c.m.im == 0.0 {
            return Wide::normalized(v, self.e);
        }
        if v.re == 0.0 && v.im == 0.0 {
            return c;
        }
        let gap = c.e - self.e;
        if gap <= 0 {
            Wide::normalized(v + c.m * pow2(gap), self.e)
        } else {
            Wide::normalized(v * pow2(-gap) + c.m, c.e)
        }
    }

    fn norm_log2(self) -> f64 {
        self.m.norm().log2() + self.e as f64
    }
}

/// `2^e`, flushing to zero below the normal range.
fn pow2(e: i64) -> f64 {
    if e < -1022 {
        0.0
    } else {
        f64::from_bits(((e.min(1023) + 1023) as u64) << 52)
    }
}

/// The far-field stretch of the iteration in double precision with extended
/// exponent range, stopped at double-precision accuracy or noise. `None` if
/// the starting circle or any iterate falls outside the double range.
fn coarse_aberth(p: &NumericPolynomial, start: &[BigComplex]) -> Option<Vec<Complex64>> {
    let n = start.len();
    let coeffs: Vec<Wide> = p.coeffs.iter().map(Wide::from_big).collect();
    let moduli: Vec<Wide> = coeffs
        .iter()
        .map(|c| Wide {
            m: Complex64::new(c.m.norm(), 0.0),
            e: c.e,
        })
        .collect();
    let mut z: Vec<Complex64> = start
        .iter()
        .map(|s| {
            let (re, im) = s.to_f64();
            Complex64::new(re, im)
        })
        .collect();
    if !z.iter().all(|z| z.is_finite() && z.norm() < 1e300) {
        return None;
    }
    // stop only once hardly any significant bits of p(z) survive cancellation
    let noise_log2 = -50.0;
    let mut active = vec![true; n];
    for _ in 0..(100 + 10 * n) {
        for i in 0..n {
            if !active[i] {
                continue;
            }
            let (mut v, mut d, mut b) = (Wide::ZERO, Wide::ZERO, Wide::ZERO);
            let r = Complex64::new(z[i].norm(), 0.0);
            for (c, m) in coeffs.iter().zip(&moduli).rev() {
                d = d.mul_add(z[i], v);
                v = v.mul_add(z[i], *c);
                b = b.mul_add(r, *m);
            }
            if v.m == Complex64::new(0.0, 0.0) || v.norm_log2() <= b.norm_log2() + noise_log2 {
                active[i] = false;
                continue;
            }
            let newton = v.m / d.m * pow2(v.e - d.e);
            let s: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let w = newton / (1.0 - newton * s);
            if !w.is_finite() {
                active[i] = false;
                continue;
            }
            z[i] -= w;
            if w.norm() <= 1e-13 * (1.0 + z[i].norm()) {
                active[i] = false;
            }
        }
        if active.iter().all(|a| !a) {
            break;
        }
    }
    z.iter().all(|z| z.is_finite()).then_some(z)
}

#[derive(Debug, PartialEq, Eq)]
enum Outcome {
    Converged,
    Stalled,
}

/// `Σ |a_k|·|z|^k` at low precision; only its magnitude matters.
fn abs_bound(moduli: &[Float], z: &BigComplex, acc: &mut Float) {
    let r = Float::with_val(NOISE_PRECISION, z.re.hypot_ref(&z.im));
    acc.assign(0);
    for m in moduli.iter().rev() {
        *acc *= &r;
        *acc += m;
    }
}

const NOISE_PRECISION: u32 = 64;
const NOISY_SWEEPS: usize = 2;

/// Gauss–Seidel Aberth sweeps at `prec` bits.
///
/// A root is frozen once its update is below `2^{−prec/2}(1+|z|)`, or once it
/// has sat at the rounding-noise floor `|p(z)| ≲ n·2^{−prec}·Σ|a_k||z|^k` for
/// consecutive sweeps, since this precision cannot place it any better. The
/// attempt is `Converged` only if no root was frozen for noise.
fn aberth(p: &NumericPolynomial, z: &mut [BigComplex], prec: u32) -> Outcome {
    let n = z.len();
    let tol = Float::with_val(prec, Float::u_exp(1, -((prec / 2) as i32)));
    let noise = Float::with_val(
        NOISE_PRECISION,
        Float::u_exp(16 * (n as u32 + 1), -(prec as i32)),
    );
    let moduli: Vec<Float> = p
        .coeffs
        .iter()
        .map(|c| Float::with_val(NOISE_PRECISION, c.re.hypot_ref(&c.im)))
        .collect();
    let one = Float::with_val(prec, 1);
    let mut noisy = vec![0usize; n];
    let mut active = vec![true; n];
    let mut t = Scratch::new(prec);
    let mut val = BigComplex::zero(prec);
    let mut der = BigComplex::zero(prec);
    let mut sum = BigComplex::zero(prec);
    let mut rel = Float::new(prec);
    let mut bound = Float::new(NOISE_PRECISION);
    let mut approx: Vec<Complex64> = z.iter().map(to_complex64).collect();

    for _ in 0..(200 + 10 * n) {
        for i in 0..n {
            if !active[i] {
                continue;
            }
            p.eval_with_derivative_into(&z[i], &mut val, &mut der, &mut t);
            if val.is_zero() {
                active[i] = false;
                continue;
            }
            abs_bound(&moduli, &z[i], &mut bound);
            bound *= &noise;
            if val.abs() <= bound {
                noisy[i] += 1;
                if noisy[i] >= NOISY_SWEEPS {
                    active[i] = false;
                    continue;
                }
            } else {
                noisy[i] = 0;
            }
            let newton = &val / &der;
            match separated_sum(&approx, i) {
                Some(s) => {
                    sum.re.assign(s.re);
                    sum.im.assign(s.im);
                }
                None => {
                    sum.re.assign(0);
                    sum.im.assign(0);
                    for (j, zj) in z.iter().enumerate() {
                        if j != i {
                            sum.add_recip_diff(&z[i], zj, &mut t);
                        }
                    }
                }
            }
            let mut denom = &newton * &sum;
            denom.re = Float::with_val(prec, &one - &denom.re);
            denom.im = Float::with_val(prec, -&denom.im);
            let w = &newton / &denom;
            if !w.is_finite() {
                continue;
            }
            z[i] = &z[i] - &w;
            approx[i] = to_complex64(&z[i]);
            rel.assign(z[i].abs() + 1u32);
            rel.assign(w.abs() / &rel);
            if rel < tol {
                active[i] = false;
                noisy[i] = 0;
            }
        }
        if active.iter().all(|a| !a) {
            break;
        }
    }
    if active.iter().any(|a| *a) || noisy.iter().any(|c| *c >= NOISY_SWEEPS) {
        Outcome::Stalled
    } else {
        Outcome::Converged
    }
}

fn to_complex64(z: &BigComplex) -> Complex64 {
    let (re, im) = z.to_f64();
    Complex64::new(re, im)
}

/// `Σ_{j≠i} 1/(z_i − z_j)` in double precision, or `None` when some pair is
/// too close (or too large) for doubles to resolve. The sum only steers the
/// iteration; the fixed point `p(z) = 0` does not depend on it.
fn separated_sum(z: &[Complex64], i: usize) -> Option<Complex64> {
    let zi = z[i];
    let scale = zi.norm();
    if !(1e-150..1e150).contains(&scale) {
        return None;
    }
    let min_gap = 1e-6 * scale;
    let mut s = Complex64::new(0.0, 0.0);
    for (j, zj) in z.iter().enumerate() {
        if j == i {
            continue;
        }
        let d = zi - zj;
        let m = d.re.abs().max(d.im.abs());
        if !(m > min_gap) || !m.is_finite() {
            return None;
        }
        s += d.inv();
    }
    Some(s)
}

/// `deg·|p(z)|/|p′(z)|` at twice the working precision; `None` if not finite.
fn error_radius(hi: &NumericPolynomial, z: &BigComplex, deg: usize) -> Option<Float> {
    let prec = hi.precision_bits;
    let z = z.with_prec(prec);
    let mut val = BigComplex::zero(prec);
    let mut der = BigComplex::zero(prec);
    let mut t = Scratch::new(prec);
    hi.eval_with_derivative_into(&z, &mut val, &mut der, &mut t);
    if val.is_zero() {
        return Some(Float::new(prec));
    }
    let r = Float::with_val(prec, val.abs() / der.abs()) * (deg as u64);
    r.is_finite().then_some(r)
}

fn certified(z: &BigComplex, err: &Float, prec: u32) -> bool {
    let bound = Float::with_val(prec, z.abs() + 1u32) >> (prec / 4);
    *err <= bound
}

fn cmp_roots(a: &Root, b: &Root) -> Ordering {
    a.value
        .re
        .partial_cmp(&b.value.re)
        .unwrap_or(Ordering::Equal)
        .then(
            a.value
                .im
                .partial_cmp(&b.value.im)
                .unwrap_or(Ordering::Equal),
        )
}

/// Working precision: the request, raised to a floor of one eighth of the
/// largest coefficient bit length.
pub fn working_precision(p: &Polynomial, precision_bits: u32) -> u32 {
    precision_bits
        .max(p.max_coeff_bits() / 8)
        .max(MIN_PRECISION)
}

/// All `deg p` roots of `p`, sorted by real then imaginary part.
pub fn roots(p: &Polynomial, precision_bits: u32) -> Result<RootCloud, RootError> {
    let degree = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(RootError::ZeroDegree),
    };
    let mut prec = working_precision(p, precision_bits);
    let zeros_at_origin = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    let reduced = Polynomial::new(p.coeffs()[zeros_at_origin..].to_vec()).monic();
    let m = degree - zeros_at_origin;

    let mut found: Vec<Root> = Vec::with_capacity(degree);
    if m > 0 {
        let mut z = initial_guesses(&reduced.to_numeric(prec), prec);
        let mut doublings = 0;
        loop {
            let lo = reduced.to_numeric(prec);
            if z.iter().all(BigComplex::is_finite) {
                z = z.iter().map(|v| v.with_prec(prec)).collect();
            } else {
                z = initial_guesses(&lo, prec);
            }
            let outcome = aberth(&lo, &mut z, prec);
            let hi = reduced.to_numeric(2 * prec);
            let errs: Vec<Option<Float>> = z.iter().map(|v| error_radius(&hi, v, m)).collect();
            let all_certified = z
                .iter()
                .zip(&errs)
                .all(|(v, e)| e.as_ref().is_some_and(|e| certified(v, e, prec)));
            log::debug!("degree {m} at {prec} bits: {outcome:?}, certified: {all_certified}");
            if all_certified {
                found.extend(z.into_iter().zip(errs).map(|(value, e)| Root {
                    value,
                    err_radius: e.expect("certified").to_f64_round(Round::Up),
                }));
                break;
            }
            if doublings == MAX_DOUBLINGS {
                return Err(RootError::NoConvergence {
                    degree,
                    precision_bits: prec,
                });
            }
            doublings += 1;
            prec *= 2;
        }
    }
    found.extend((0..zeros_at_origin).map(|_| Root {
        value: BigComplex::zero(prec),
        err_radius: 0.0,
    }));
    found.sort_by(cmp_roots);
    Ok(RootCloud {
        roots: found,
        degree,
        precision_bits: prec,
        source_digest: polynomial_digest(p),
    })
}

/// Largest `|value|`; ties are judged up to each candidate's error radius.
pub fn largest_modulus(c: &RootCloud) -> LargestModulus {
    let mods: Vec<f64> = c.roots.iter().map(|r| r.value.abs_f64()).collect();
    let modulus = mods.iter().copied().fold(0.0, f64::max);
    let err_radius = c
        .roots
        .iter()
        .zip(&mods)
        .filter(|(r, m)| **m + 2.0 * r.err_radius >= modulus)
        .map(|(r, _)| r.err_radius)
        .fold(0.0, f64::max);
    LargestModulus {
        modulus,
        err_radius,
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Counter-clockwise hull without collinear points (monotone chain).
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
}

/// Euclidean distance from `p` to the convex polygon `hull` (zero inside).
pub fn distance_to_hull(p: (f64, f64), hull: &[(f64, f64)]) -> f64 {
    match hull.len() {
        0 => f64::INFINITY,
        1 => (p.0 - hull[0].0).hypot(p.1 - hull[0].1),
        2 => segment_distance(p, hull[0], hull[1]),
        n => {
            let edges = (0..n).map(|i| (hull[i], hull[(i + 1) % n]));
            if edges.clone().all(|(a, b)| cross(a, b, p) >= 0.0) {
                return 0.0;
            }
            edges
                .map(|(a, b)| segment_distance(p, a, b))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// True iff every inner root is within `tol` of the convex hull of the outer roots.
pub fn hull_contains(outer: &RootCloud, inner: &RootCloud, tol: f64) -> bool {
    let hull = convex_hull(&outer.points());
    inner
        .points()
        .into_iter()
        .all(|p| distance_to_hull(p, &hull) <= tol)
}
