//! Probabilistic polynomials: seeded samplers with certified degree bounds,
//! error measurement, error reduction, and the composition calculus.
//!
//! A [`ProbPolynomial`] is a distribution over [`Polynomial`]s, represented
//! by a pure sampler `seed -> Polynomial`. Samplers additionally support
//! point evaluation of a sampled polynomial without materializing it, and
//! structural composition (substituting inner polynomials into the sampler's
//! formal expression before any reduction). For every Boolean point of the
//! base variables, all routes agree; that is the contract the tests pin down.
//!
//! The definition requires finite support. PRNG-driven samplers have support
//! of size at most `2^64`, which we treat as finite; distributions that are
//! explicitly enumerable at small size also carry their support for exact
//! error computation.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolfn::{index_to_bits, BooleanFunction, Projection, Restriction};
use crate::error::{Error, Result};
use crate::poly::{
    compose, interpolate_values, majority_extension_value, mask_to_point, rational_string,
    Polynomial,
};
use crate::seed::mix;

/// Base arity cap for materializing error-reduced samples (interpolation
/// over the cube).
pub const REDUCE_MATERIALIZE_CAP: usize = 16;

/// Explicit supports are enumerated only up to this size.
pub const SUPPORT_CAP: usize = 1 << 20;

/// Default two-sided confidence level for Monte Carlo radii.
pub const DEFAULT_CONFIDENCE: f64 = 0.999;

/// A sampler of polynomials, pure in the seed.
///
/// `eval_sample` must equal `sample(seed).evaluate(point)` at every Boolean
/// point; composite samplers evaluate their formal (unreduced) expression,
/// which can differ off the cube, where nothing here is ever measured.
pub trait Sampler: Send + Sync {
    fn sample(&self, seed: u64) -> Polynomial;

    fn eval_sample(&self, seed: u64, point: &[BigRational]) -> BigRational {
        self.sample(seed)
            .evaluate(point)
            .expect("sampler evaluated at wrong arity")
    }

    /// Substitute `inners` for the sampler's variables, reducing in the inner
    /// base space. The default route materializes the sample first; factored
    /// constructions override this to avoid blowing up in their own space.
    fn sample_composed(&self, seed: u64, inners: &[Polynomial]) -> Polynomial {
        compose(&self.sample(seed), inners).expect("composition arity checked at construction")
    }

    /// Explicit support, when enumerable.
    fn support(&self) -> Option<Vec<(Polynomial, BigRational)>> {
        None
    }
}

/// A random polynomial with a certified degree bound.
#[derive(Clone)]
pub struct ProbPolynomial {
    arity: usize,
    degree_bound: usize,
    sampler: Arc<dyn Sampler>,
}

impl std::fmt::Debug for ProbPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ProbPolynomial(arity={}, degree_bound={})",
            self.arity, self.degree_bound
        )
    }
}

impl ProbPolynomial {
    pub fn new(arity: usize, degree_bound: usize, sampler: Arc<dyn Sampler>) -> Self {
        Self {
            arity,
            degree_bound,
            sampler,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    /// Point distribution on a single polynomial.
    pub fn lift_exact(p: Polynomial) -> Self {
        Self::from_support(vec![(p, BigRational::one())]).expect("singleton support is valid")
    }

    /// Explicit finite distribution. Probabilities must be positive and sum
    /// to exactly 1; all polynomials share one arity.
    pub fn from_support(items: Vec<(Polynomial, BigRational)>) -> Result<Self> {
        if items.is_empty() || items.len() > SUPPORT_CAP {
            return Err(Error::InvalidParameter(format!(
                "support size {} outside 1..={SUPPORT_CAP}",
                items.len()
            )));
        }
        let arity = items[0].0.arity();
        let mut total = BigRational::zero();
        for (p, prob) in &items {
            if p.arity() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    got: p.arity(),
                });
            }
            if !prob.is_positive() {
                return Err(Error::InvalidParameter(
                    "support probabilities must be positive".into(),
                ));
            }
            total += prob;
        }
        if !total.is_one() {
            return Err(Error::InvalidParameter(format!(
                "support probabilities sum to {}, not 1",
                rational_string(&total)
            )));
        }
        let degree_bound = items.iter().map(|(p, _)| p.degree()).max().unwrap_or(0);
        Ok(Self {
            arity,
            degree_bound,
            sampler: Arc::new(SupportSampler::new(items)),
        })
    }

    /// Draw the polynomial for `seed`. Every sample must respect the degree
    /// bound; test builds assert it on each draw.
    pub fn sample(&self, seed: u64) -> Polynomial {
        let p = self.sampler.sample(seed);
        debug_assert!(
            p.degree() <= self.degree_bound,
            "sampled degree {} exceeds certified bound {}",
            p.degree(),
            self.degree_bound
        );
        debug_assert_eq!(p.arity(), self.arity);
        p
    }

    /// Value of the seed's polynomial at `point` without materializing it.
    pub fn eval_sample(&self, seed: u64, point: &[BigRational]) -> Result<BigRational> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: point.len(),
            });
        }
        Ok(self.sampler.eval_sample(seed, point))
    }

    pub fn support(&self) -> Option<Vec<(Polynomial, BigRational)>> {
        self.sampler.support()
    }

    pub(crate) fn sampler(&self) -> &Arc<dyn Sampler> {
        &self.sampler
    }

    // ---- shape transforms (the degree bound never increases) ---------------

    fn transformed(&self, transform: VarTransform) -> Self {
        let arity = transform.target_arity();
        Self {
            arity,
            degree_bound: self.degree_bound,
            sampler: Arc::new(TransformSampler {
                inner: self.clone(),
                transform,
            }),
        }
    }

    /// Substitute the constants of `rho`; surviving variables renumber in
    /// ascending order, matching [`BooleanFunction::restrict`].
    pub fn restrict(&self, rho: &Restriction) -> Result<Self> {
        if rho.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: rho.len(),
            });
        }
        Ok(self.transformed(VarTransform::Restrict(rho.clone())))
    }

    /// Identify variables along `nu`.
    pub fn project(&self, nu: &Projection) -> Result<Self> {
        if nu.map.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: nu.map.len(),
            });
        }
        nu.validate()?;
        Ok(self.transformed(VarTransform::Project(nu.clone())))
    }

    /// Substitute `x -> x ⊕ shift`.
    pub fn xor_shift(&self, shift: &[bool]) -> Result<Self> {
        if shift.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: shift.len(),
            });
        }
        Ok(self.transformed(VarTransform::Shift(shift.to_vec())))
    }

    /// `1 - P`, the probabilistic polynomial for the complemented function.
    pub fn complement(&self) -> Self {
        self.transformed(VarTransform::Complement(self.arity))
    }

    // ---- calculus -----------------------------------------------------------

    /// Error reduction by majority vote: compose `ell` independent copies
    /// under the exact majority polynomial, where `ell` is the smallest odd
    /// integer whose exact binomial tail `Pr[Bin(ell, eps) >= ell/2]` is at
    /// most `delta`. The degree bound multiplies by `ell`.
    pub fn reduce_error(&self, eps: &BigRational, delta: &BigRational) -> Result<Self> {
        let ell = error_reduction_copies(eps, delta)?;
        if ell == 1 {
            return Ok(self.clone());
        }
        if self.arity > REDUCE_MATERIALIZE_CAP {
            return Err(Error::ArityCap {
                what: "error reduction",
                arity: self.arity,
                cap: REDUCE_MATERIALIZE_CAP,
            });
        }
        Ok(Self {
            arity: self.arity,
            degree_bound: self.degree_bound * ell,
            sampler: Arc::new(MajorityReduceSampler {
                inner: self.clone(),
                ell,
            }),
        })
    }

    /// Composition: the sampler draws `outer` and each inner with independent
    /// derived seeds and substitutes. Degree bounds multiply.
    pub fn compose(outer: &ProbPolynomial, inners: &[ProbPolynomial]) -> Result<Self> {
        if inners.len() != outer.arity {
            return Err(Error::ArityMismatch {
                expected: outer.arity,
                got: inners.len(),
            });
        }
        let Some(first) = inners.first() else {
            return Err(Error::InvalidParameter(
                "composition needs at least one inner polynomial".into(),
            ));
        };
        let base = first.arity;
        for p in inners {
            if p.arity != base {
                return Err(Error::ArityMismatch {
                    expected: base,
                    got: p.arity,
                });
            }
        }
        let degree_bound =
            outer.degree_bound * inners.iter().map(|p| p.degree_bound).max().unwrap_or(0);
        Ok(Self {
            arity: base,
            degree_bound,
            sampler: Arc::new(ComposeSampler {
                outer: outer.clone(),
                inners: inners.to_vec(),
            }),
        })
    }

    // ---- error measurement ----------------------------------------------------

    /// Error of the distribution against `f` at input index `a`.
    pub fn error_at(&self, f: &BooleanFunction, a: u64, mode: ErrorMode) -> Result<ErrorEstimate> {
        if f.arity() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: f.arity(),
            });
        }
        let target = BigRational::from_integer(BigInt::from(f.value(a) as u8));
        let point = mask_to_point(a, self.arity);
        match mode {
            ErrorMode::Exact => {
                let support = self.support().ok_or(Error::NoSupport)?;
                let mut err = BigRational::zero();
                for (p, prob) in &support {
                    if p.evaluate_mask(a) != target {
                        err += prob;
                    }
                }
                Ok(ErrorEstimate::Exact(err))
            }
            ErrorMode::MonteCarlo {
                trials,
                seed0,
                confidence,
            } => {
                let errors = (0..trials)
                    .filter(|t| {
                        self.sampler.eval_sample(seed0.wrapping_add(*t), &point) != target
                    })
                    .count() as u64;
                Ok(ErrorEstimate::MonteCarlo {
                    errors,
                    trials,
                    radius: hoeffding_radius(trials, confidence),
                    confidence,
                })
            }
        }
    }

    /// Per-input error table over `inputs`, parallelized across inputs.
    pub fn scan_errors(
        &self,
        f: &BooleanFunction,
        inputs: &[u64],
        mode: ErrorMode,
    ) -> Result<ErrorReport> {
        let records: Vec<InputErrorRecord> = inputs
            .par_iter()
            .map(|&a| -> Result<InputErrorRecord> {
                let est = self.error_at(f, a, mode)?;
                Ok(InputErrorRecord::new(a, self.arity, &est))
            })
            .collect::<Result<_>>()?;
        let max_error = records.iter().map(|r| r.estimate).fold(0.0, f64::max);
        let (trials, confidence, radius) = match mode {
            ErrorMode::Exact => (None, None, None),
            ErrorMode::MonteCarlo {
                trials, confidence, ..
            } => (
                Some(trials),
                Some(confidence),
                Some(hoeffding_radius(trials, confidence)),
            ),
        };
        Ok(ErrorReport {
            inputs: records,
            summary: ErrorSummary {
                max_error,
                degree_bound: self.degree_bound,
                seed_0: match mode {
                    ErrorMode::MonteCarlo { seed0, .. } => Some(seed0),
                    ErrorMode::Exact => None,
                },
                trials,
                confidence,
                radius,
            },
        })
    }
}

/// How to measure `Pr[P(a) != f(a)]`.
#[derive(Clone, Copy, Debug)]
pub enum ErrorMode {
    /// Sum support probabilities exactly (requires an explicit support).
    Exact,
    /// Frequency over trial seeds `seed0 .. seed0 + trials - 1`, with a
    /// two-sided Hoeffding radius at the given confidence level.
    MonteCarlo {
        trials: u64,
        seed0: u64,
        confidence: f64,
    },
}

impl ErrorMode {
    pub fn monte_carlo(trials: u64, seed0: u64) -> Self {
        ErrorMode::MonteCarlo {
            trials,
            seed0,
            confidence: DEFAULT_CONFIDENCE,
        }
    }
}

/// One measured error value.
#[derive(Clone, Debug)]
pub enum ErrorEstimate {
    Exact(BigRational),
    MonteCarlo {
        errors: u64,
        trials: u64,
        radius: f64,
        confidence: f64,
    },
}

impl ErrorEstimate {
    pub fn value(&self) -> f64 {
        match self {
            ErrorEstimate::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            ErrorEstimate::MonteCarlo { errors, trials, .. } => {
                if *trials == 0 {
                    0.0
                } else {
                    *errors as f64 / *trials as f64
                }
            }
        }
    }

    pub fn radius(&self) -> f64 {
        match self {
            ErrorEstimate::Exact(_) => 0.0,
            ErrorEstimate::MonteCarlo { radius, .. } => *radius,
        }
    }
}

/// Two-sided Hoeffding radius: `Pr[|p̂ - p| >= r] <= 1 - confidence`.
pub fn hoeffding_radius(trials: u64, confidence: f64) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    ((2.0 / (1.0 - confidence)).ln() / (2.0 * trials as f64)).sqrt()
}

/// Smallest odd `ell` with `Pr[Bin(ell, eps) >= ell/2] <= delta`, by exact
/// rational tail evaluation. Requires `eps <= 1/3`; `eps = 0` or
/// `delta >= eps` give `ell = 1`.
pub fn error_reduction_copies(eps: &BigRational, delta: &BigRational) -> Result<usize> {
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    if eps.is_negative() || eps > &third {
        return Err(Error::InvalidParameter(format!(
            "error reduction requires 0 <= eps <= 1/3, got {}",
            rational_string(eps)
        )));
    }
    if delta.is_negative() || (delta.is_zero() && !eps.is_zero()) {
        return Err(Error::InvalidParameter(format!(
            "unreachable target error {}",
            rational_string(delta)
        )));
    }
    let mut ell = 1usize;
    loop {
        if &majority_error_tail(ell, eps) <= delta {
            return Ok(ell);
        }
        ell += 2;
        if ell > 10_001 {
            return Err(Error::InvalidParameter(
                "error reduction did not converge within 10001 copies".into(),
            ));
        }
    }
}

/// `Pr[Bin(ell, eps) >= ceil(ell/2)]`, exactly.
pub fn majority_error_tail(ell: usize, eps: &BigRational) -> BigRational {
    let one_minus = BigRational::one() - eps;
    let mut total = BigRational::zero();
    for k in (ell + 1) / 2..=ell {
        let binom: BigInt = num_integer::binomial(BigInt::from(ell), BigInt::from(k));
        let mut term = BigRational::from_integer(binom);
        for _ in 0..k {
            term *= eps;
        }
        for _ in 0..ell - k {
            term *= &one_minus;
        }
        total += term;
    }
    total
}

// ---- samplers ------------------------------------------------------------------

const SUPPORT_SALT: u64 = 0x00F0_0D5A_17ED_CAFE;

struct SupportItem {
    poly: Polynomial,
    prob: BigRational,
    // lazily memoized cube values, for small arities
    table: std::sync::OnceLock<Vec<BigRational>>,
}

impl SupportItem {
    fn value_at_mask(&self, mask: u64) -> BigRational {
        if self.poly.arity() <= 12 {
            let table = self.table.get_or_init(|| {
                (0..1u64 << self.poly.arity())
                    .map(|k| self.poly.evaluate_mask(k))
                    .collect()
            });
            table[mask as usize].clone()
        } else {
            self.poly.evaluate_mask(mask)
        }
    }
}

struct SupportSampler {
    items: Vec<SupportItem>,
}

impl SupportSampler {
    fn new(items: Vec<(Polynomial, BigRational)>) -> Self {
        Self {
            items: items
                .into_iter()
                .map(|(poly, prob)| SupportItem {
                    poly,
                    prob,
                    table: std::sync::OnceLock::new(),
                })
                .collect(),
        }
    }

    fn pick(&self, seed: u64) -> &SupportItem {
        // map the mixed seed to [0, 1) as an exact dyadic rational
        let u = BigRational::new(
            BigInt::from(mix(seed, SUPPORT_SALT)),
            BigInt::from(2u8).pow(64),
        );
        let mut acc = BigRational::zero();
        for item in &self.items {
            acc += &item.prob;
            if u < acc {
                return item;
            }
        }
        self.items.last().expect("support is nonempty")
    }
}

impl Sampler for SupportSampler {
    fn sample(&self, seed: u64) -> Polynomial {
        self.pick(seed).poly.clone()
    }

    fn eval_sample(&self, seed: u64, point: &[BigRational]) -> BigRational {
        let item = self.pick(seed);
        if let Some(mask) = boolean_point_mask(point) {
            item.value_at_mask(mask)
        } else {
            item.poly.evaluate(point).expect("arity checked")
        }
    }

    fn support(&self) -> Option<Vec<(Polynomial, BigRational)>> {
        Some(
            self.items
                .iter()
                .map(|i| (i.poly.clone(), i.prob.clone()))
                .collect(),
        )
    }
}

pub(crate) fn boolean_point_mask(point: &[BigRational]) -> Option<u64> {
    if point.len() > 64 {
        return None;
    }
    let mut mask = 0u64;
    for (i, v) in point.iter().enumerate() {
        if v.is_one() {
            mask |= 1 << i;
        } else if !v.is_zero() {
            return None;
        }
    }
    Some(mask)
}

enum VarTransform {
    Restrict(Restriction),
    Project(Projection),
    Shift(Vec<bool>),
    Complement(usize),
}

impl VarTransform {
    fn target_arity(&self) -> usize {
        match self {
            VarTransform::Restrict(rho) => rho.star_positions().len(),
            VarTransform::Project(nu) => nu.target_arity,
            VarTransform::Shift(s) => s.len(),
            VarTransform::Complement(n) => *n,
        }
    }

    fn apply(&self, p: &Polynomial) -> Polynomial {
        match self {
            VarTransform::Restrict(rho) => p.restrict(rho).expect("arity fixed at construction"),
            VarTransform::Project(nu) => p.project(nu).expect("arity fixed at construction"),
            VarTransform::Shift(s) => p.xor_shift(s).expect("arity fixed at construction"),
            VarTransform::Complement(_) => p.one_minus(),
        }
    }

    /// Pull an outer evaluation point back to the inner variable space.
    fn pull_back(&self, point: &[BigRational]) -> Vec<BigRational> {
        match self {
            VarTransform::Restrict(rho) => {
                let mut inner = Vec::with_capacity(rho.len());
                let mut star = 0usize;
                for v in &rho.map {
                    inner.push(match v {
                        crate::boolfn::RestrictionValue::Zero => BigRational::zero(),
                        crate::boolfn::RestrictionValue::One => BigRational::one(),
                        crate::boolfn::RestrictionValue::Star => {
                            let x = point[star].clone();
                            star += 1;
                            x
                        }
                    });
                }
                inner
            }
            VarTransform::Project(nu) => nu.map.iter().map(|&img| point[img].clone()).collect(),
            VarTransform::Shift(s) => point
                .iter()
                .zip(s)
                .map(|(x, &flip)| {
                    if flip {
                        BigRational::one() - x
                    } else {
                        x.clone()
                    }
                })
                .collect(),
            VarTransform::Complement(_) => point.to_vec(),
        }
    }
}

struct TransformSampler {
    inner: ProbPolynomial,
    transform: VarTransform,
}

impl Sampler for TransformSampler {
    fn sample(&self, seed: u64) -> Polynomial {
        self.transform.apply(&self.inner.sampler().sample(seed))
    }

    fn eval_sample(&self, seed: u64, point: &[BigRational]) -> BigRational {
        let inner_point = self.transform.pull_back(point);
        let v = self.inner.sampler().eval_sample(seed, &inner_point);
        match self.transform {
            VarTransform::Complement(_) => BigRational::one() - v,
            _ => v,
        }
    }

    fn support(&self) -> Option<Vec<(Polynomial, BigRational)>> {
        let inner = self.inner.support()?;
        Some(
            inner
                .into_iter()
                .map(|(p, prob)| (self.transform.apply(&p), prob))
                .collect(),
        )
    }
}

struct ComposeSampler {
    outer: ProbPolynomial,
    inners: Vec<ProbPolynomial>,
}

impl Sampler for ComposeSampler {
    fn sample(&self, seed: u64) -> Polynomial {
        let inner: Vec<Polynomial> = self
            .inners
            .iter()
            .enumerate()
            .map(|(i, pp)| pp.sampler().sample(mix(seed, 1 + i as u64)))
            .collect();
        self.outer.sampler().sample_composed(mix(seed, 0), &inner)
    }

    fn eval_sample(&self, seed: u64, point: &[BigRational]) -> BigRational {
        let values: Vec<BigRational> = self
            .inners
            .iter()
            .enumerate()
            .map(|(i, pp)| pp.sampler().eval_sample(mix(seed, 1 + i as u64), point))
            .collect();
        self.outer.sampler().eval_sample(mix(seed, 0), &values)
    }

    fn sample_composed(&self, seed: u64, deeper: &[Polynomial]) -> Polynomial {
        let inner: Vec<Polynomial> = self
            .inners
            .iter()
            .enumerate()
            .map(|(i, pp)| {
                compose(&pp.sampler().sample(mix(seed, 1 + i as u64)), deeper)
                    .expect("arity checked at construction")
            })
            .collect();
        self.outer.sampler().sample_composed(mix(seed, 0), &inner)
    }
}

struct MajorityReduceSampler {
    inner: ProbPolynomial,
    ell: usize,
}

impl MajorityReduceSampler {
    fn copy_values(&self, seed: u64, point: &[BigRational]) -> Vec<BigRational> {
        (0..self.ell)
            .map(|j| self.inner.sampler().eval_sample(mix(seed, j as u64), point))
            .collect()
    }
}

impl Sampler for MajorityReduceSampler {
    fn sample(&self, seed: u64) -> Polynomial {
        // interpolating the pointwise values over the base cube equals the
        // symbolic majority composition reduced in the base variables
        let arity = self.inner.arity();
        let values: Vec<BigRational> = (0..1u64 << arity)
            .map(|k| {
                let point = mask_to_point(k, arity);
                majority_extension_value(&self.copy_values(seed, &point))
            })
            .collect();
        interpolate_values(arity, &values).expect("arity within cap")
    }

    fn eval_sample(&self, seed: u64, point: &[BigRational]) -> BigRational {
        majority_extension_value(&self.copy_values(seed, point))
    }
}

// ---- report schema ----------------------------------------------------------------

/// Per-input error records plus a summary, ready for JSON reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorReport {
    pub inputs: Vec<InputErrorRecord>,
    pub summary: ErrorSummary,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InputErrorRecord {
    /// Bit string, variable 0 first.
    pub input: String,
    pub mode: String,
    pub estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub errors: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub max_error: f64,
    pub degree_bound: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_0: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

/// Render an input index as a bit string, variable 0 first.
pub fn input_string(a: u64, arity: usize) -> String {
    index_to_bits(a, arity)
        .iter()
        .map(|&b| if b { '1' } else { '0' })
        .collect()
}

impl InputErrorRecord {
    fn new(a: u64, arity: usize, est: &ErrorEstimate) -> Self {
        match est {
            ErrorEstimate::Exact(q) => Self {
                input: input_string(a, arity),
                mode: "exact".into(),
                estimate: est.value(),
                exact: Some(rational_string(q)),
                errors: None,
                trials: None,
                radius: None,
            },
            ErrorEstimate::MonteCarlo {
                errors,
                trials,
                radius,
                ..
            } => Self {
                input: input_string(a, arity),
                mode: "monte_carlo".into(),
                estimate: est.value(),
                exact: None,
                errors: Some(*errors),
                trials: Some(*trials),
                radius: Some(*radius),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::RestrictionValue;
    use crate::poly::{majority_poly, mobius_interpolate, rat, ratio};

    fn bf(spec: &str) -> BooleanFunction {
        BooleanFunction::parse_spec(spec).unwrap()
    }

    fn exact_lift(spec: &str) -> (BooleanFunction, ProbPolynomial) {
        let f = bf(spec);
        let pp = ProbPolynomial::lift_exact(mobius_interpolate(&f));
        (f, pp)
    }

    #[test]
    fn lift_exact_has_zero_error_everywhere() {
        let (f, pp) = exact_lift("MAJ:3");
        assert_eq!(pp.degree_bound(), 3);
        for a in 0..8 {
            let ErrorEstimate::Exact(e) = pp.error_at(&f, a, ErrorMode::Exact).unwrap() else {
                panic!()
            };
            assert!(e.is_zero());
        }
        // point mass: any two seeds sample the same polynomial
        assert_eq!(pp.sample(0), pp.sample(123456));
    }

    #[test]
    fn sampling_is_deterministic() {
        let items = vec![
            (Polynomial::one(2), ratio(1, 3)),
            (Polynomial::zero(2), ratio(2, 3)),
        ];
        let pp = ProbPolynomial::from_support(items).unwrap();
        for seed in [0u64, 7, 99, u64::MAX] {
            assert_eq!(pp.sample(seed), pp.sample(seed));
        }
    }

    #[test]
    fn support_must_sum_to_one() {
        let items = vec![(Polynomial::one(1), ratio(1, 2))];
        assert!(ProbPolynomial::from_support(items).is_err());
    }

    #[test]
    fn support_frequencies_match_probabilities() {
        let items = vec![
            (Polynomial::one(1), ratio(1, 4)),
            (Polynomial::zero(1), ratio(3, 4)),
        ];
        let pp = ProbPolynomial::from_support(items).unwrap();
        let trials = 20_000u64;
        let zeros = (0..trials).filter(|&s| pp.sample(s).is_zero()).count() as f64;
        let freq = zeros / trials as f64;
        assert!((freq - 0.75).abs() < 0.02, "frequency {freq}");
    }

    #[test]
    fn exact_matches_monte_carlo_within_radius() {
        let (f, _) = exact_lift("OR:2");
        let right = mobius_interpolate(&f);
        let pp = ProbPolynomial::from_support(vec![
            (right, ratio(7, 10)),
            (Polynomial::zero(2), ratio(3, 10)),
        ])
        .unwrap();
        for a in 0..4 {
            let exact = pp.error_at(&f, a, ErrorMode::Exact).unwrap().value();
            let mc = pp
                .error_at(&f, a, ErrorMode::monte_carlo(10_000, 5))
                .unwrap();
            assert!(
                (exact - mc.value()).abs() <= mc.radius(),
                "input {a}: exact {exact} vs mc {}",
                mc.value()
            );
        }
    }

    #[test]
    fn error_reduction_copy_counts() {
        let third = ratio(1, 3);
        assert_eq!(error_reduction_copies(&third, &third).unwrap(), 1);
        assert_eq!(error_reduction_copies(&rat(0), &rat(0)).unwrap(), 1);

        let delta = ratio(1, 20);
        let ell = error_reduction_copies(&third, &delta).unwrap();
        assert!(ell % 2 == 1 && ell > 1);
        assert!(majority_error_tail(ell, &third) <= delta);
        assert!(majority_error_tail(ell - 2, &third) > delta);

        assert!(error_reduction_copies(&ratio(1, 2), &delta).is_err());
        assert!(error_reduction_copies(&third, &rat(0)).is_err());
    }

    #[test]
    fn reduce_error_degree_and_measured_error() {
        // 0.3-error distribution for XOR_2: right with 7/10, complement with 3/10
        let f = bf("XOR:2");
        let right = mobius_interpolate(&f);
        let wrong = right.one_minus();
        let pp =
            ProbPolynomial::from_support(vec![(right, ratio(7, 10)), (wrong, ratio(3, 10))])
                .unwrap();
        let eps = ratio(3, 10);
        let delta = ratio(1, 10);
        let reduced = pp.reduce_error(&eps, &delta).unwrap();
        let ell = error_reduction_copies(&eps, &delta).unwrap();
        assert_eq!(reduced.degree_bound(), ell * pp.degree_bound());

        let tail = majority_error_tail(ell, &eps).to_f64().unwrap();
        for a in 0..4 {
            let mc = reduced
                .error_at(&f, a, ErrorMode::monte_carlo(4000, 11))
                .unwrap();
            assert!(
                mc.value() <= tail + mc.radius(),
                "input {a}: {} > {tail} + {}",
                mc.value(),
                mc.radius()
            );
        }
    }

    #[test]
    fn reduced_sample_matches_pointwise_eval_on_cube() {
        let f = bf("OR:2");
        let right = mobius_interpolate(&f);
        let pp = ProbPolynomial::from_support(vec![
            (right, ratio(7, 10)),
            (Polynomial::zero(2), ratio(3, 10)),
        ])
        .unwrap();
        let reduced = pp.reduce_error(&ratio(3, 10), &ratio(1, 10)).unwrap();
        for seed in 0..8u64 {
            let p = reduced.sample(seed);
            for k in 0..4u64 {
                let point = mask_to_point(k, 2);
                assert_eq!(
                    p.evaluate_mask(k),
                    reduced.eval_sample(seed, &point).unwrap()
                );
            }
        }
    }

    #[test]
    fn compose_identity_outer_behaves_like_inner() {
        let (f, pp) = exact_lift("XOR:3");
        let outer = ProbPolynomial::lift_exact(Polynomial::variable(1, 0));
        let composed = ProbPolynomial::compose(&outer, &[pp]).unwrap();
        for a in 0..8 {
            let v = composed.eval_sample(9, &mask_to_point(a, 3)).unwrap();
            assert_eq!(v, rat(f.value(a) as i64));
        }
    }

    #[test]
    fn compose_majority_of_three_noisy_copies() {
        // three independent 0.3-error copies under exact Maj_3: the composed
        // error is at most the binomial tail 0.216 at every input
        let f = bf("OR:2");
        let right = mobius_interpolate(&f);
        let pp = ProbPolynomial::from_support(vec![
            (right, ratio(7, 10)),
            (Polynomial::one(2).scale(&rat(5)), ratio(3, 10)),
        ])
        .unwrap();
        let outer = ProbPolynomial::lift_exact(majority_poly(3).unwrap());
        let composed = ProbPolynomial::compose(&outer, &[pp.clone(), pp.clone(), pp]).unwrap();
        assert_eq!(composed.degree_bound(), 3 * 2);
        let tail = majority_error_tail(3, &ratio(3, 10)).to_f64().unwrap();
        assert!((tail - 0.216).abs() < 1e-12);
        for a in 0..4 {
            let mc = composed
                .error_at(&f, a, ErrorMode::monte_carlo(6000, 3))
                .unwrap();
            assert!(mc.value() <= tail + mc.radius());
        }
    }

    #[test]
    fn transforms_match_function_transforms_for_exact_lifts() {
        let (f, pp) = exact_lift("MAJ:3");

        let rho = Restriction::new(vec![
            RestrictionValue::Star,
            RestrictionValue::One,
            RestrictionValue::Star,
        ]);
        let restricted = pp.restrict(&rho).unwrap();
        let expected = mobius_interpolate(&f.restrict(&rho).unwrap());
        assert_eq!(restricted.sample(3), expected);
        assert_eq!(restricted.degree_bound(), pp.degree_bound());

        let nu = Projection::new(vec![0, 0, 1], 2).unwrap();
        let projected = pp.project(&nu).unwrap();
        assert_eq!(
            projected.sample(4),
            mobius_interpolate(&f.project(&nu).unwrap())
        );

        let shift = [true, false, true];
        let shifted = pp.xor_shift(&shift).unwrap();
        assert_eq!(
            shifted.sample(5),
            mobius_interpolate(&f.xor_shift(&shift).unwrap())
        );
        // shift by 0 is the identity per seed
        let zero_shift = pp.xor_shift(&[false; 3]).unwrap();
        assert_eq!(zero_shift.sample(6), pp.sample(6));

        let comp = pp.complement();
        assert_eq!(comp.sample(7), mobius_interpolate(&f.complement()));
    }

    #[test]
    fn transform_eval_agrees_with_sample() {
        let (_, pp) = exact_lift("ADDR:2");
        let rho = Restriction::zero_outside(6, 0b001111);
        let restricted = pp.restrict(&rho).unwrap();
        let sample = restricted.sample(0);
        for k in 0..16u64 {
            let point = mask_to_point(k, 4);
            assert_eq!(
                restricted.eval_sample(0, &point).unwrap(),
                sample.evaluate_mask(k)
            );
        }
    }

    #[test]
    fn exact_mode_without_support_errors() {
        let (f, pp) = exact_lift("OR:2");
        let outer = ProbPolynomial::lift_exact(Polynomial::variable(1, 0));
        let composed = ProbPolynomial::compose(&outer, &[pp]).unwrap();
        assert!(matches!(
            composed.error_at(&f, 0, ErrorMode::Exact),
            Err(Error::NoSupport)
        ));
    }

    #[test]
    fn hoeffding_radius_sanity() {
        let r = hoeffding_radius(20_000, 0.999);
        assert!((r - 0.01379).abs() < 1e-4, "radius {r}");
        assert!(hoeffding_radius(0, 0.999) >= 1.0);
    }

    #[test]
    fn scan_report_shape() {
        let (f, pp) = exact_lift("OR:2");
        let report = pp.scan_errors(&f, &[0, 1, 2, 3], ErrorMode::Exact).unwrap();
        assert_eq!(report.inputs.len(), 4);
        assert_eq!(report.summary.max_error, 0.0);
        assert_eq!(report.inputs[1].input, "10");
        assert_eq!(report.summary.degree_bound, pp.degree_bound());
    }
}
