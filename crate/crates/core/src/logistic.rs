//! Probability, odds and logit scales, the multiplicative ratio model, and
//! the four-parameter logistic.
//!
//! The logit scale is canonical: abilities and difficulties are additive
//! log-odds. The ratio form `a / (a + x)` is the same model viewed on the
//! multiplicative scale, where `a = e^ability` and `x = e^difficulty`.
//!
//! `lower` and `upper` are the asymptotes of the *success* probability:
//! `lower` is the chance of succeeding however unskilled (guessing), and
//! `1 - upper` the chance of failing however skilled.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LogisticError {
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("odds {0} must be non-negative")]
    NegativeOdds(f64),
    #[error("logit must be finite, got {0}")]
    NonFiniteLogit(f64),
    #[error("logit of {0} is undefined; model certainty with the asymptote parameters")]
    LogitOfCertainty(f64),
    #[error("skill on the ratio scale must be positive and finite, got {0}")]
    NonPositiveSkill(f64),
    #[error("{name} must be positive and finite, got {value}")]
    NonPositiveScale { name: &'static str, value: f64 },
    #[error("slope must be finite and non-negative, got {0}")]
    NegativeSlope(f64),
    #[error("asymptotes must satisfy 0 <= lower <= upper <= 1, got lower={lower}, upper={upper}")]
    AsymptoteOrder { lower: f64, upper: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self, LogisticError> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(LogisticError::ProbabilityOutOfRange(value))
        }
    }

    /// Clamps into `[0, 1]`. For values produced by arithmetic that can
    /// overshoot by an ulp.
    pub(crate) fn clamped(value: f64) -> Self {
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Odds for:against. `+inf` represents certainty.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Odds(f64);

impl Odds {
    pub fn new(value: f64) -> Result<Self, LogisticError> {
        if value >= 0.0 {
            Ok(Self(value))
        } else {
            Err(LogisticError::NegativeOdds(value))
        }
    }

    pub fn even() -> Self {
        Self(1.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Log-odds.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Logit(f64);

impl Logit {
    pub fn new(value: f64) -> Result<Self, LogisticError> {
        if value.is_finite() {
            Ok(Self(value))
        } else {
            Err(LogisticError::NonFiniteLogit(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Logit {
    type Error = LogisticError;
    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Logit::new(v)
    }
}

impl From<Logit> for f64 {
    fn from(l: Logit) -> f64 {
        l.0
    }
}

/// Skill or difficulty on the ratio scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MultiplicativeSkill(f64);

impl MultiplicativeSkill {
    pub fn new(value: f64) -> Result<Self, LogisticError> {
        if value > 0.0 && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(LogisticError::NonPositiveSkill(value))
        }
    }

    pub fn from_logit(l: Logit) -> Result<Self, LogisticError> {
        Self::new(l.0.exp())
    }

    pub fn to_logit(self) -> Logit {
        Logit(self.0.ln())
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn prob_to_odds(p: Probability) -> Odds {
    if p.0 == 1.0 {
        Odds(f64::INFINITY)
    } else {
        Odds(p.0 / (1.0 - p.0))
    }
}

pub fn odds_to_prob(o: Odds) -> Probability {
    if o.0.is_infinite() {
        Probability(1.0)
    } else {
        Probability::clamped(o.0 / (1.0 + o.0))
    }
}

/// Log-odds of `p`. Exactly 0 and 1 have no logit.
pub fn logit(p: Probability) -> Result<Logit, LogisticError> {
    if p.0 <= 0.0 || p.0 >= 1.0 {
        return Err(LogisticError::LogitOfCertainty(p.0));
    }
    Ok(Logit((p.0 / (1.0 - p.0)).ln()))
}

/// `1 / (1 + e^-t)` on plain floats, evaluated without overflow for any `t`.
pub fn sigmoid_f64(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

pub fn sigmoid(t: Logit) -> Probability {
    Probability(sigmoid_f64(t.0))
}

/// Ratio-scale success probability `a / (a + x)`.
pub fn rasch_ratio(a: MultiplicativeSkill, x: MultiplicativeSkill) -> Probability {
    Probability::clamped(a.0 / (a.0 + x.0))
}

/// Four-parameter logistic: success probability for an ability/difficulty
/// pairing with slope `r` and asymptotes `lower`/`upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Model4PLJson")]
pub struct Model4PL {
    ability: Logit,
    difficulty: Logit,
    slope: f64,
    lower: f64,
    upper: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Model4PLJson {
    ability: f64,
    difficulty: f64,
    #[serde(default = "one")]
    slope: f64,
    #[serde(default)]
    lower: f64,
    #[serde(default = "one")]
    upper: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<Model4PLJson> for Model4PL {
    type Error = LogisticError;
    fn try_from(j: Model4PLJson) -> Result<Self, Self::Error> {
        Model4PL::new(j.ability, j.difficulty, j.slope, j.lower, j.upper)
    }
}

impl Model4PL {
    pub fn new(ability: f64, difficulty: f64, slope: f64, lower: f64, upper: f64) -> Result<Self, LogisticError> {
        let ability = Logit::new(ability)?;
        let difficulty = Logit::new(difficulty)?;
        if !(slope >= 0.0 && slope.is_finite()) {
            return Err(LogisticError::NegativeSlope(slope));
        }
        if !(0.0 <= lower && lower <= upper && upper <= 1.0) {
            return Err(LogisticError::AsymptoteOrder { lower, upper });
        }
        Ok(Self {
            ability,
            difficulty,
            slope,
            lower,
            upper,
        })
    }

    /// The 1PL: slope 1, asymptotes 0 and 1.
    pub fn rasch(ability: f64, difficulty: f64) -> Result<Self, LogisticError> {
        Self::new(ability, difficulty, 1.0, 0.0, 1.0)
    }

    pub fn two_pl(ability: f64, difficulty: f64, slope: f64) -> Result<Self, LogisticError> {
        Self::new(ability, difficulty, slope, 0.0, 1.0)
    }

    pub fn three_pl(ability: f64, difficulty: f64, slope: f64, lower: f64) -> Result<Self, LogisticError> {
        Self::new(ability, difficulty, slope, lower, 1.0)
    }

    /// The same task with ability and difficulty exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            ability: self.difficulty,
            difficulty: self.ability,
            ..*self
        }
    }

    pub fn ability(&self) -> Logit {
        self.ability
    }

    pub fn difficulty(&self) -> Logit {
        self.difficulty
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }
}

pub fn p4(model: &Model4PL) -> Probability {
    let z = model.slope * (model.ability.0 - model.difficulty.0);
    let p = model.lower + (model.upper - model.lower) * sigmoid_f64(z);
    Probability::clamped(p)
}

fn check_scale(name: &'static str, value: f64) -> Result<(), LogisticError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(LogisticError::NonPositiveScale { name, value })
    }
}

pub fn logistic_cdf(t: f64, mean: f64, scale: f64) -> Result<Probability, LogisticError> {
    check_scale("scale", scale)?;
    Ok(Probability(sigmoid_f64((t - mean) / scale)))
}

/// Normal CDF via the C library `erfc` (FreeBSD msun port), accurate to a
/// few ulps, far inside the 1e-7 needed here.
pub fn normal_cdf(t: f64, mean: f64, sd: f64) -> Result<Probability, LogisticError> {
    check_scale("sd", sd)?;
    Ok(Probability(normal_cdf_f64((t - mean) / sd)))
}

pub(crate) fn normal_cdf_f64(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// CDF of the uniform distribution on `[mean - halfwidth, mean + halfwidth]`.
pub fn uniform_cdf(t: f64, mean: f64, halfwidth: f64) -> Result<Probability, LogisticError> {
    check_scale("halfwidth", halfwidth)?;
    Ok(Probability(uniform_cdf_f64(t, mean, halfwidth)))
}

pub(crate) fn uniform_cdf_f64(t: f64, mean: f64, halfwidth: f64) -> f64 {
    ((t - (mean - halfwidth)) / (2.0 * halfwidth)).clamp(0.0, 1.0)
}
