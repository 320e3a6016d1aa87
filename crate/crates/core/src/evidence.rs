//! Odds-form Bayesian updating with Bayes factors.
//!
//! Skill and difficulty act as independent pieces of evidence for and
//! against success: with even prior odds, a skill factor `a` and a difficulty
//! factor `1/x` give odds `a/x`, which is the ratio model. The task's innate
//! difficulty may equally be supplied as the prior odds instead of as a
//! factor; both call patterns give the same answer.

use thiserror::Error;

use crate::logistic::Odds;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvidenceError {
    #[error("Bayes factor must be positive and finite, got {0}")]
    NonPositiveFactor(f64),
    #[error("reliability must be finite, got {0}")]
    NonFiniteReliability(f64),
}

/// A likelihood ratio.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BayesFactor(f64);

impl BayesFactor {
    pub fn new(value: f64) -> Result<Self, EvidenceError> {
        if value > 0.0 && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(EvidenceError::NonPositiveFactor(value))
        }
    }

    /// The same evidence read against the hypothesis.
    pub fn reciprocal(self) -> Self {
        Self(1.0 / self.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A Bayes factor discounted by how reliable (or relevant) the evidence is.
///
/// Reliability usually lies in `[0, 1]`; values above one are allowed and
/// behave as a logistic slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedFactor {
    pub factor: BayesFactor,
    reliability: f64,
}

impl WeightedFactor {
    pub fn new(factor: BayesFactor, reliability: f64) -> Result<Self, EvidenceError> {
        if !reliability.is_finite() {
            return Err(EvidenceError::NonFiniteReliability(reliability));
        }
        Ok(Self { factor, reliability })
    }

    pub fn reliability(&self) -> f64 {
        self.reliability
    }
}

fn apply_log(prior: Odds, log_sum: f64) -> Odds {
    let p = prior.value();
    // Zero and infinite priors are fixed points of Bayes' rule.
    if p == 0.0 || p.is_infinite() {
        return prior;
    }
    Odds::new((p.ln() + log_sum).exp()).expect("exp is non-negative")
}

/// Posterior odds: the prior times every factor. Combined in log space so
/// long chains of factors do not overflow.
pub fn update(prior: Odds, factors: &[BayesFactor]) -> Odds {
    let log_sum: f64 = factors.iter().map(|f| f.0.ln()).sum();
    apply_log(prior, log_sum)
}

/// Posterior odds with a reliability-discounted factor: `prior * L^r`.
pub fn update_reliable(prior: Odds, wf: WeightedFactor) -> Odds {
    apply_log(prior, wf.reliability * wf.factor.0.ln())
}

/// Weight of evidence in base-10 log units. Additive where factors
/// multiply.
pub fn weight_of_evidence(f: BayesFactor) -> f64 {
    f.0.log10()
}

/// Lower bounds of grades 1 through 5: `1, 10^0.5, 10, 10^1.5, 100`.
pub fn grade_boundaries() -> [f64; 5] {
    [1.0, 10f64.powf(0.5), 10.0, 10f64.powf(1.5), 100.0]
}

const GRADE_LABELS: [&str; 6] = [
    "The evidence is against the hypothesis.",
    "The evidence is barely worth a mention.",
    "The evidence is substantial.",
    "The evidence is strong.",
    "The evidence is very strong.",
    "The evidence is decisive.",
];

/// One of Jeffreys' six grades of evidence strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EvidenceGrade(u8);

impl EvidenceGrade {
    pub fn new(grade: u8) -> Option<Self> {
        (grade <= 5).then_some(Self(grade))
    }

    pub fn grade(self) -> u8 {
        self.0
    }

    pub fn label(self) -> &'static str {
        GRADE_LABELS[self.0 as usize]
    }
}

/// Grades a Bayes factor. A factor sitting exactly on a boundary gets the
/// higher grade.
pub fn jeffreys_grade(f: BayesFactor) -> EvidenceGrade {
    let grade = grade_boundaries().iter().filter(|&&b| f.0 >= b).count();
    EvidenceGrade(grade as u8)
}
