//! Differential operators `T = Σ_j Q_j(z) D^j` and the exponents derived from
//! the degrees of their coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use rug::Rational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::polyalg::{falling_factorial, GaussianRational, PolyError, Polynomial};

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("operator has no terms")]
    Empty,
    #[error("derivative order must be at least 1")]
    ZeroOrder,
    #[error("duplicate derivative order {0}")]
    DuplicateOrder(usize),
    #[error("not exactly-solvable: deg Q_{order} = {degree} > {order}")]
    NotExactlySolvable { order: usize, degree: usize },
    #[error("no order j with deg Q_j = j; every eigenvalue would vanish")]
    NoJ0,
    #[error("operator is not degenerate (deg Q_k = k)")]
    NotDegenerate,
    #[error("b = d condition is inapplicable: b is undefined for this operator")]
    ConditionInapplicable,
    #[error(transparent)]
    Coefficient(#[from] PolyError),
    #[error("invalid operator JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read operator file: {0}")]
    Io(#[from] std::io::Error),
}

/// `T = Σ_{j} Q_j D^j` with every stored `Q_j` nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operator {
    terms: BTreeMap<usize, Polynomial>,
    name: Option<String>,
}

impl Operator {
    /// Builds an operator from `(order, Q_j)` pairs. Zero coefficients are
    /// dropped; duplicate or zero orders are rejected.
    pub fn new<I>(terms: I) -> Result<Self, OperatorError>
    where
        I: IntoIterator<Item = (usize, Polynomial)>,
    {
        let mut map = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for (order, q) in terms {
            if order == 0 {
                return Err(OperatorError::ZeroOrder);
            }
            if !seen.insert(order) {
                return Err(OperatorError::DuplicateOrder(order));
            }
            if !q.is_zero() {
                map.insert(order, q);
            }
        }
        if map.is_empty() {
            return Err(OperatorError::Empty);
        }
        Ok(Operator {
            terms: map,
            name: None,
        })
    }

    /// Convenience constructor for operators with integer coefficients.
    pub fn from_int_terms(terms: &[(usize, &[i64])]) -> Result<Self, OperatorError> {
        Self::new(terms.iter().map(|(j, c)| (*j, Polynomial::from_ints(c))))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Polynomial)> {
        self.terms.iter().map(|(j, q)| (*j, q))
    }

    pub fn term(&self, j: usize) -> Option<&Polynomial> {
        self.terms.get(&j)
    }

    /// Highest derivative order.
    pub fn order(&self) -> usize {
        *self.terms.keys().next_back().expect("operator has a term")
    }

    /// `deg Q_j`, `None` when the term is absent.
    pub fn degree_of(&self, j: usize) -> Option<usize> {
        self.terms.get(&j).and_then(Polynomial::degree)
    }

    /// `α_{j,i}`, the coefficient of `z^i` in `Q_j`.
    pub fn alpha(&self, j: usize, i: usize) -> GaussianRational {
        self.terms.get(&j).map(|q| q.coeff(i)).unwrap_or_default()
    }

    /// Multiplies every `Q_j` by the same constant.
    pub fn scaled(&self, k: &GaussianRational) -> Self {
        Operator {
            terms: self
                .terms
                .iter()
                .map(|(j, q)| (*j, q.scale_coeffs(k)))
                .collect(),
            name: self.name.clone(),
        }
    }

    /// Exact `T(p) = Σ_j Q_j·p^{(j)}`.
    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        self.terms.iter().fold(Polynomial::zero(), |acc, (j, q)| {
            acc.add(&q.mul(&p.derivative(*j)))
        })
    }

    /// Canonical JSON used for hashing: name omitted, orders ascending,
    /// coefficients trimmed and in lowest terms.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.file_terms()).expect("operator terms serialize")
    }

    /// SHA-256 (hex) over the canonical serialization; identifies `T` by content.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    fn file_terms(&self) -> Vec<TermFile> {
        self.terms
            .iter()
            .map(|(j, q)| TermFile {
                order: *j,
                coeffs: q
                    .coeffs()
                    .iter()
                    .map(GaussianRational::to_strings)
                    .collect(),
            })
            .collect()
    }

    pub fn to_file(&self) -> OperatorFile {
        OperatorFile {
            name: self.name.clone().unwrap_or_default(),
            terms: self.file_terms(),
        }
    }

    pub fn from_file(file: &OperatorFile) -> Result<Self, OperatorError> {
        let mut terms = Vec::with_capacity(file.terms.len());
        for t in &file.terms {
            let coeffs = t
                .coeffs
                .iter()
                .map(|[re, im]| GaussianRational::parse(re, im))
                .collect::<Result<Vec<_>, _>>()?;
            terms.push((t.order, Polynomial::new(coeffs)));
        }
        let op = Operator::new(terms)?;
        Ok(if file.name.is_empty() {
            op
        } else {
            op.with_name(file.name.clone())
        })
    }

    pub fn from_json(s: &str) -> Result<Self, OperatorError> {
        Self::from_file(&serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("operator serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, OperatorError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, q) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{q}]D^{j}")?;
        }
        Ok(())
    }
}

/// On-disk operator format.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OperatorFile {
    #[serde(default)]
    pub name: String,
    pub terms: Vec<TermFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermFile {
    pub order: usize,
    /// `[re, im]` exact rational strings, ascending powers.
    pub coeffs: Vec<[String; 2]>,
}

/// Everything derived from the degree pattern of `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub k: usize,
    pub exactly_solvable: bool,
    pub degenerate: bool,
    pub j0: Option<usize>,
    pub d: Option<Rational>,
    pub b: Option<Rational>,
    pub attainment: BTreeSet<usize>,
}

impl Classification {
    pub fn b_equals_d(&self) -> Option<bool> {
        match (&self.b, &self.d) {
            (Some(b), Some(d)) => Some(b == d),
            _ => None,
        }
    }
}

/// Classifies `T`: order, flags, `j0`, and (when degenerate) `d`, `b` and `A`.
pub fn classify(t: &Operator) -> Result<Classification, OperatorError> {
    let k = t.order();
    for (j, q) in t.terms() {
        let deg = q.degree().expect("stored terms are nonzero");
        if deg > j {
            return Err(OperatorError::NotExactlySolvable {
                order: j,
                degree: deg,
            });
        }
    }
    let j0 = t
        .terms()
        .filter(|(j, q)| q.degree() == Some(*j))
        .map(|(j, _)| j)
        .max()
        .ok_or(OperatorError::NoJ0)?;
    let deg_k = t.degree_of(k).expect("leading term present");
    let degenerate = deg_k < k;

    let (d, b, attainment) = if degenerate {
        let (d, a) = max_ratio(t, j0);
        (Some(d), min_plus_ratio(t), a)
    } else {
        (None, None, BTreeSet::new())
    };

    Ok(Classification {
        k,
        exactly_solvable: true,
        degenerate,
        j0: Some(j0),
        d,
        b,
        attainment,
    })
}

/// `max_{j ∈ [j0+1, k]} (j − j0)/(j − deg Q_j)` over present terms, with its argmax set.
fn max_ratio(t: &Operator, j0: usize) -> (Rational, BTreeSet<usize>) {
    let mut best: Option<Rational> = None;
    let mut set = BTreeSet::new();
    for (j, q) in t.terms().filter(|(j, _)| *j > j0) {
        let deg = q.degree().expect("nonzero");
        // j > j0 implies deg Q_j < j
        let r = Rational::from(((j - j0) as u64, (j - deg) as u64));
        match &best {
            Some(b) if r < *b => {}
            Some(b) if r == *b => {
                set.insert(j);
            }
            _ => {
                best = Some(r);
                set.clear();
                set.insert(j);
            }
        }
    }
    (
        best.expect("degenerate operators have a term above j0"),
        set,
    )
}

/// `min⁺_{j ∈ [1, k−1]} (k − j)/(k − j + deg Q_j − deg Q_k)`, over present terms
/// with a positive denominator only.
fn min_plus_ratio(t: &Operator) -> Option<Rational> {
    let k = t.order() as i64;
    let deg_k = t.degree_of(t.order()).expect("leading term") as i64;
    t.terms()
        .filter(|(j, _)| (*j as i64) < k)
        .filter_map(|(j, q)| {
            let j = j as i64;
            let den = k - j + q.degree().expect("nonzero") as i64 - deg_k;
            (den > 0).then(|| Rational::from((k - j, den)))
        })
        .min()
}

fn require_degenerate(t: &Operator) -> Result<Classification, OperatorError> {
    let c = classify(t)?;
    if !c.degenerate {
        return Err(OperatorError::NotDegenerate);
    }
    Ok(c)
}

/// Conjectured growth exponent `d` of the largest root modulus.
pub fn exponent_d(t: &Operator) -> Result<Rational, OperatorError> {
    Ok(require_degenerate(t)?
        .d
        .expect("degenerate operators have d"))
}

/// Proven lower-bound exponent `b`; `None` when no term gives a positive denominator.
pub fn exponent_b(t: &Operator) -> Result<Option<Rational>, OperatorError> {
    Ok(require_degenerate(t)?.b)
}

/// Orders at which the maximum defining `d` is attained.
pub fn attainment_set(t: &Operator) -> Result<BTreeSet<usize>, OperatorError> {
    Ok(require_degenerate(t)?.attainment)
}

/// Whether `b = d` exactly, the hypothesis under which an upper bound on the
/// growth of `r_n` implies the matching lower bound.
pub fn check_b_equals_d(t: &Operator) -> Result<bool, OperatorError> {
    let c = require_degenerate(t)?;
    let b = c.b.ok_or(OperatorError::ConditionInapplicable)?;
    Ok(b == c.d.expect("degenerate"))
}

/// `λ_n = Σ_j α_{j,j}·n!/(n−j)!` without validation; see `eigensolver::eigenvalue`.
pub(crate) fn lambda_unchecked(t: &Operator, n: u64) -> GaussianRational {
    t.terms()
        .filter(|(j, q)| q.degree() == Some(*j))
        .fold(GaussianRational::zero(), |acc, (j, q)| {
            &acc + &q.coeff(j).mul_int(&falling_factorial(n, j as u64))
        })
}
