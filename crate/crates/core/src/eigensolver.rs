//! Exact eigenvalues `λ_n` and monic eigenpolynomials `p_n` with `T(p_n) = λ_n p_n`.
//!
//! Writing `T(z^m)` out term by term, the coefficient of `z^s` picks up
//! `α_{j,i}·m!/(m−j)!·a_m` from every `(j, i)` with `m = s + j − i`. Exact
//! solvability (`i ≤ j`) means `m ≥ s`, so the system for `a_0, …, a_{n−1}` is
//! upper triangular with diagonal `Σ_j α_{j,j}(s!/(s−j)! − n!/(n−j)!)` and is
//! solved by back-substitution from `s = n − 1` down to `0`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operator::{self, classify, Operator, OperatorError};
use crate::polyalg::{falling_factorial, GaussianRational, PolyError, Polynomial};

#[derive(Debug, Error)]
pub enum EigenError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("eigenpolynomial of degree {n} is not unique: diagonal vanishes at s = {singular:?}")]
    NonUnique { n: usize, singular: Vec<usize> },
    #[error("internal error: T(p) − λp is nonzero for n = {n}")]
    ResidualNonzero { n: usize },
    #[error("diagonal index s = {s} out of range for n = {n}")]
    IndexOutOfRange { n: usize, s: usize },
    #[error("cache I/O: {0}")]
    CacheIo(#[from] std::io::Error),
    #[error("cache entry is malformed: {0}")]
    CacheFormat(String),
}

impl From<PolyError> for EigenError {
    fn from(e: PolyError) -> Self {
        EigenError::CacheFormat(e.to_string())
    }
}

/// A degree-`n` eigenpolynomial together with its eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenpair {
    pub n: usize,
    pub lambda: GaussianRational,
    /// Monic, degree exactly `n`.
    pub p: Polynomial,
    pub operator_digest: String,
}

impl Eigenpair {
    /// `T(p) − λp`, which is the zero polynomial for every valid pair.
    pub fn residual(&self, t: &Operator) -> Polynomial {
        t.apply(&self.p).sub(&self.p.scale_coeffs(&self.lambda))
    }
}

fn require_solvable(t: &Operator) -> Result<(), EigenError> {
    classify(t)?;
    Ok(())
}

/// `λ_n = Σ_j α_{j,j}·n!/(n−j)!`.
pub fn eigenvalue(t: &Operator, n: usize) -> Result<GaussianRational, EigenError> {
    require_solvable(t)?;
    Ok(operator::lambda_unchecked(t, n as u64))
}

fn diagonal_unchecked(t: &Operator, n: u64, s: u64) -> GaussianRational {
    t.terms().filter(|(j, q)| q.degree() == Some(*j)).fold(
        GaussianRational::zero(),
        |acc, (j, q)| {
            let j = j as u64;
            let diff = falling_factorial(s, j) - falling_factorial(n, j);
            &acc + &q.coeff(j as usize).mul_int(&diff)
        },
    )
}

/// Diagonal entry for unknown `a_s`: `Σ_j α_{j,j}(s!/(s−j)! − n!/(n−j)!)`.
pub fn diagonal_entry(t: &Operator, n: usize, s: usize) -> Result<GaussianRational, EigenError> {
    require_solvable(t)?;
    if s >= n {
        return Err(EigenError::IndexOutOfRange { n, s });
    }
    Ok(diagonal_unchecked(t, n as u64, s as u64))
}

/// The unique monic eigenpolynomial of degree `n`, verified exactly before return.
pub fn eigenpolynomial(t: &Operator, n: usize) -> Result<Eigenpair, EigenError> {
    require_solvable(t)?;
    if n == 0 {
        return Err(EigenError::ZeroDegree);
    }
    let n64 = n as u64;
    let diagonals: Vec<GaussianRational> =
        (0..n64).map(|s| diagonal_unchecked(t, n64, s)).collect();
    let singular: Vec<usize> = diagonals
        .iter()
        .enumerate()
        .filter(|(_, d)| d.is_zero())
        .map(|(s, _)| s)
        .collect();
    if !singular.is_empty() {
        return Err(EigenError::NonUnique { n, singular });
    }

    // off-diagonal couplings: (shift = j − i > 0, j, α_{j,i})
    let couplings: Vec<(usize, u64, GaussianRational)> = t
        .terms()
        .flat_map(|(j, q)| {
            q.coeffs()
                .iter()
                .enumerate()
                .filter(move |(i, a)| *i < j && !a.is_zero())
                .map(move |(i, a)| (j - i, j as u64, a.clone()))
        })
        .collect();

    let mut a = vec![GaussianRational::zero(); n + 1];
    a[n] = GaussianRational::one();
    for s in (0..n).rev() {
        let mut rhs = GaussianRational::zero();
        for (shift, j, alpha) in &couplings {
            let m = s + shift;
            if m > n || a[m].is_zero() {
                continue;
            }
            let c = alpha.mul_int(&falling_factorial(m as u64, *j));
            rhs += &(&c * &a[m]);
        }
        if !rhs.is_zero() {
            a[s] = (-rhs)
                .checked_div(&diagonals[s])
                .expect("diagonal checked nonzero");
        }
    }

    let pair = Eigenpair {
        n,
        lambda: operator::lambda_unchecked(t, n64),
        p: Polynomial::new(a),
        operator_digest: t.digest(),
    };
    verify(t, &pair)?;
    Ok(pair)
}

fn verify(t: &Operator, e: &Eigenpair) -> Result<(), EigenError> {
    if e.p.degree() != Some(e.n) || !e.p.is_monic() || !e.residual(t).is_zero() {
        return Err(EigenError::ResidualNonzero { n: e.n });
    }
    Ok(())
}

/// Serialized form of a cached eigenpair.
#[derive(Debug, Serialize, Deserialize)]
pub struct CacheEntry {
    pub n: usize,
    pub lambda: [String; 2],
    pub coeffs: Vec<[String; 2]>,
}

impl CacheEntry {
    pub fn from_pair(e: &Eigenpair) -> Self {
        CacheEntry {
            n: e.n,
            lambda: e.lambda.to_strings(),
            coeffs: e
                .p
                .coeffs()
                .iter()
                .map(GaussianRational::to_strings)
                .collect(),
        }
    }

    pub fn into_pair(self, digest: &str) -> Result<Eigenpair, EigenError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|[re, im]| GaussianRational::parse(re, im))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Eigenpair {
            n: self.n,
            lambda: GaussianRational::parse(&self.lambda[0], &self.lambda[1])?,
            p: Polynomial::new(coeffs),
            operator_digest: digest.to_string(),
        })
    }
}

/// Directory of `<digest>-<n>.json` files holding exact eigenpairs.
#[derive(Clone, Debug)]
pub struct EigenCache {
    dir: PathBuf,
}

impl EigenCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        EigenCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, digest: &str, n: usize) -> PathBuf {
        self.dir.join(format!("{digest}-{n}.json"))
    }

    /// Loads and re-verifies a cached pair; `Ok(None)` on a miss or on an
    /// entry that does not check out against `t`.
    pub fn load(&self, t: &Operator, n: usize) -> Result<Option<Eigenpair>, EigenError> {
        let digest = t.digest();
        let path = self.path_for(&digest, n);
        let text = match fs::read_to_string(&path) {
            Ok(s) => s,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let entry: CacheEntry = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(err) => {
                log::warn!("ignoring unreadable cache entry {}: {err}", path.display());
                return Ok(None);
            }
        };
        if entry.n != n {
            return Ok(None);
        }
        let pair = match entry.into_pair(&digest) {
            Ok(p) => p,
            Err(_) => return Ok(None),
        };
        if verify(t, &pair).is_err() || pair.lambda != operator::lambda_unchecked(t, n as u64) {
            log::warn!(
                "cache entry {} fails verification; recomputing",
                path.display()
            );
            return Ok(None);
        }
        Ok(Some(pair))
    }

    /// Writes atomically: temp file in the cache directory, then rename.
    pub fn store(&self, e: &Eigenpair) -> Result<PathBuf, EigenError> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(&e.operator_digest, e.n);
        let body = serde_json::to_string(&CacheEntry::from_pair(e))
            .map_err(|err| EigenError::CacheFormat(err.to_string()))?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(body.as_bytes())?;
        tmp.flush()?;
        tmp.persist(&path)
            .map_err(|err| EigenError::CacheIo(err.error))?;
        Ok(path)
    }
}

/// Cached or freshly computed eigenpair.
pub fn eigenpolynomial_cached(
    t: &Operator,
    n: usize,
    cache: Option<&EigenCache>,
) -> Result<Eigenpair, EigenError> {
    if let Some(c) = cache {
        if let Some(hit) = c.load(t, n)? {
            return Ok(hit);
        }
    }
    let e = eigenpolynomial(t, n)?;
    if let Some(c) = cache {
        c.store(&e)?;
    }
    Ok(e)
}

/// Batch driver: one result per requested degree, in input order; a failing
/// degree does not stop the others.
pub fn eigenpolynomial_range(
    t: &Operator,
    ns: &[usize],
    cache: Option<&EigenCache>,
) -> Vec<Result<Eigenpair, EigenError>> {
    ns.par_iter()
        .map(|&n| eigenpolynomial_cached(t, n, cache))
        .collect()
}
