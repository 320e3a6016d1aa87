//! Seeded task resolution, opposed checks and Elo updates.
//!
//! The generator is SplitMix64: 64 bits of state, fully determined by the
//! seed. Results are reproducible within a build of this crate; no promise
//! is made across other implementations. Samplers take the generator by
//! `&mut` so nothing is shared implicitly between threads.

use rand::distr::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

use crate::dice::{success_probability, DiceError, Mechanic};
use crate::logistic::{p4, sigmoid_f64, LogisticError, Model4PL, MultiplicativeSkill, Probability};

pub type SimRng = rand_xoshiro::SplitMix64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResolveError {
    #[error("score must be 0, 0.5 or 1, got {0}")]
    InvalidScore(f64),
    #[error("K factor must be positive and finite, got {0}")]
    InvalidKFactor(f64),
    #[error("rating must be finite, got {0}")]
    NonFiniteRating(f64),
    #[error(transparent)]
    Dice(#[from] DiceError),
    #[error(transparent)]
    Logistic(#[from] LogisticError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> SimRng {
        SimRng::seed_from_u64(self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckResult {
    pub success: bool,
    pub probability_used: Probability,
    /// The mechanic's outcome variable; `None` for model checks.
    pub raw_roll: Option<i64>,
}

/// Something that can be resolved repeatedly: a 4PL model or a die
/// mechanic with its exact success probability computed once up front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Check {
    Model(Model4PL),
    Mechanic { mechanic: Mechanic, probability: f64 },
}

impl Check {
    pub fn model(m: Model4PL) -> Self {
        Check::Model(m)
    }

    pub fn mechanic(m: Mechanic) -> Result<Self, ResolveError> {
        let probability = success_probability(&m)?.to_f64();
        Ok(Check::Mechanic {
            mechanic: m,
            probability,
        })
    }

    /// Exact success probability.
    pub fn probability(&self) -> f64 {
        match self {
            Check::Model(m) => p4(m).value(),
            Check::Mechanic { probability, .. } => *probability,
        }
    }

    pub fn resolve<R: Rng + ?Sized>(&self, rng: &mut R) -> CheckResult {
        match self {
            Check::Model(m) => {
                let p = p4(m);
                CheckResult {
                    success: rng.random::<f64>() < p.value(),
                    probability_used: p,
                    raw_roll: None,
                }
            }
            Check::Mechanic {
                mechanic,
                probability,
            } => {
                let outcome = roll(mechanic, rng);
                CheckResult {
                    success: mechanic.succeeds(outcome),
                    probability_used: Probability::clamped(*probability),
                    raw_roll: Some(outcome),
                }
            }
        }
    }

    /// Resolves `n` independent checks.
    pub fn simulate<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<CheckResult> {
        (0..n).map(|_| self.resolve(rng)).collect()
    }
}

/// Rolls the mechanic's dice and returns its outcome variable. Faces come
/// from `Uniform`, which rejects out-of-zone draws rather than reducing
/// modulo the die size.
pub fn roll<R: Rng + ?Sized>(m: &Mechanic, rng: &mut R) -> i64 {
    let die = Uniform::new_inclusive(1u32, m.sides()).expect("validated die size");
    let faces: Vec<u32> = (0..m.dice()).map(|_| die.sample(rng)).collect();
    m.outcome_of(&faces)
}

/// One Bernoulli draw with success probability `p4(m)`.
pub fn resolve_model<R: Rng + ?Sized>(m: &Model4PL, rng: &mut R) -> CheckResult {
    Check::Model(*m).resolve(rng)
}

pub fn resolve_mechanic<R: Rng + ?Sized>(m: &Mechanic, rng: &mut R) -> Result<CheckResult, ResolveError> {
    Ok(Check::mechanic(*m)?.resolve(rng))
}

/// Chance that skill `a` beats skill `b`: odds `a : b`.
pub fn opposed(a: MultiplicativeSkill, b: MultiplicativeSkill) -> Probability {
    Probability::clamped(a.value() / (a.value() + b.value()))
}

/// [`opposed`] on the logit scale.
pub fn opposed_logit(theta_a: f64, theta_b: f64) -> Probability {
    Probability::clamped(sigmoid_f64(theta_a - theta_b))
}

/// Elo points per factor of ten in odds.
pub const ELO_SCALE: f64 = 400.0;

// Exchanged points are rounded to this grid so that adding and subtracting
// them is exact for ratings on the same grid below 2^20 in magnitude.
const ELO_QUANTUM: f64 = 1.0 / 4_294_967_296.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rating {
    pub value: f64,
    k_factor: f64,
}

impl Rating {
    pub fn new(value: f64, k_factor: f64) -> Result<Self, ResolveError> {
        if !value.is_finite() {
            return Err(ResolveError::NonFiniteRating(value));
        }
        if !(k_factor > 0.0 && k_factor.is_finite()) {
            return Err(ResolveError::InvalidKFactor(k_factor));
        }
        Ok(Self { value, k_factor })
    }

    pub fn k_factor(&self) -> f64 {
        self.k_factor
    }
}

/// Expected score of `a` against `b`; a 400 point lead is 10:1 odds.
pub fn elo_expected(a: f64, b: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf(-(a - b) / ELO_SCALE))
}

/// Updates both ratings after a game with score `score_a` (1 win, 0.5 draw,
/// 0 loss) for `a`.
///
/// Both sides exchange the same number of points, `K * (score - expected)`
/// with `K` the mean of the two K factors, so the rating total is conserved.
pub fn elo_update(a: Rating, b: Rating, score_a: f64) -> Result<(Rating, Rating), ResolveError> {
    if ![0.0, 0.5, 1.0].contains(&score_a) {
        return Err(ResolveError::InvalidScore(score_a));
    }
    let k = 0.5 * (a.k_factor + b.k_factor);
    let raw = k * (score_a - elo_expected(a.value, b.value));
    let delta = (raw / ELO_QUANTUM).round() * ELO_QUANTUM;
    Ok((
        Rating {
            value: a.value + delta,
            ..a
        },
        Rating {
            value: b.value - delta,
            ..b
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evidence::{update, BayesFactor};
    use crate::logistic::{odds_to_prob, Odds};

    fn skill(v: f64) -> MultiplicativeSkill {
        MultiplicativeSkill::new(v).unwrap()
    }

    #[test]
    fn degenerate_models_are_certain() {
        let mut rng = Seed(7).rng();
        let always = Model4PL::new(-30.0, 30.0, 1.0, 1.0, 1.0).unwrap();
        let never = Model4PL::new(30.0, -30.0, 1.0, 0.0, 0.0).unwrap();
        for _ in 0..10_000 {
            assert!(resolve_model(&always, &mut rng).success);
            assert!(!resolve_model(&never, &mut rng).success);
        }
    }

    #[test]
    fn roll_under_extremes() {
        let mut rng = Seed(1).rng();
        let always = Check::mechanic(Mechanic::UniformRollUnder {
            sides: 100,
            target: 100,
        })
        .unwrap();
        let never = Check::mechanic(Mechanic::UniformRollUnder {
            sides: 100,
            target: 0,
        })
        .unwrap();
        for _ in 0..10_000 {
            let r = always.resolve(&mut rng);
            assert!(r.success);
            assert!((1..=100).contains(&r.raw_roll.unwrap()));
            assert!(!never.resolve(&mut rng).success);
        }
    }

    #[test]
    fn rasch_midpoint_rate() {
        let m = Model4PL::rasch(0.3, 0.3).unwrap();
        let mut rng = Seed(2024).rng();
        let n = 100_000;
        let hits = (0..n).filter(|_| resolve_model(&m, &mut rng).success).count();
        let rate = hits as f64 / n as f64;
        assert!((rate - 0.5).abs() < 3.0 * (0.25f64 / n as f64).sqrt(), "rate {rate}");
    }

    #[test]
    fn same_seed_same_stream() {
        let c = Check::mechanic(Mechanic::SumRollOver {
            count: 3,
            sides: 6,
            modifier: 0,
            difficulty: 11,
        })
        .unwrap();
        let a = c.simulate(1000, &mut Seed(99).rng());
        let b = c.simulate(1000, &mut Seed(99).rng());
        assert_eq!(a, b);
        let other = c.simulate(1000, &mut Seed(100).rng());
        assert_ne!(a, other);
    }

    #[test]
    fn opposed_examples() {
        assert_eq!(opposed(skill(2.0), skill(2.0)).value(), 0.5);
        assert!((opposed(skill(10.0), skill(1.0)).value() - 10.0 / 11.0).abs() < 1e-15);
        let s = opposed(skill(3.3), skill(0.7)).value() + opposed(skill(0.7), skill(3.3)).value();
        assert!((s - 1.0).abs() < 1e-15);
        assert_eq!(opposed_logit(1.2, 1.2).value(), 0.5);
    }

    #[test]
    fn opposed_matches_evidence_pipeline() {
        for (ta, tb) in [(0.0, 0.0), (1.5, -0.25), (-3.0, 2.0), (7.0, 6.5)] {
            let via_odds = odds_to_prob(update(
                Odds::even(),
                &[
                    BayesFactor::new(f64::exp(ta)).unwrap(),
                    BayesFactor::new(f64::exp(-tb)).unwrap(),
                ],
            ));
            assert!((opposed_logit(ta, tb).value() - via_odds.value()).abs() < 1e-12);
        }
    }

    #[test]
    fn elo_examples() {
        let a = Rating::new(1500.0, 32.0).unwrap();
        let b = Rating::new(1500.0, 32.0).unwrap();
        let (a1, b1) = elo_update(a, b, 1.0).unwrap();
        assert_eq!(a1.value, 1516.0);
        assert_eq!(b1.value, 1484.0);
        let (a2, b2) = elo_update(a, b, 0.5).unwrap();
        assert_eq!((a2.value, b2.value), (1500.0, 1500.0));
        assert!((elo_expected(1900.0, 1500.0) - 10.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn elo_rejects_bad_input() {
        let a = Rating::new(1500.0, 32.0).unwrap();
        assert_eq!(elo_update(a, a, 0.7), Err(ResolveError::InvalidScore(0.7)));
        assert!(Rating::new(1500.0, 0.0).is_err());
        assert!(Rating::new(f64::NAN, 10.0).is_err());
    }
}
