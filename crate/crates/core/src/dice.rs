//! Exact outcome distributions for the classical die mechanics.
//!
//! Success rules: roll-under mechanics succeed when the roll is *equal to or
//! less than* the target; every roll-over mechanic (including pools and step
//! dice) succeeds when the outcome *meets or beats* the difficulty. Games
//! differ on this point, so callers porting a system with strict inequality
//! should shift the difficulty by one.
//!
//! Modifiers may push the success probability to exactly 0 or 1. That cap is
//! part of the modeled behavior and is not an error.

use std::collections::BTreeMap;
use std::io::Write;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub};
use thiserror::Error;

use crate::format::float12;
use crate::rational::{Overflow, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiceError {
    #[error("die size must be at least 2, got {0}")]
    DieTooSmall(u32),
    #[error("at least one die is required")]
    NoDice,
    #[error("threshold {threshold} outside 1..={sides}")]
    ThresholdOutOfRange { threshold: u32, sides: u32 },
    #[error("required successes {required} outside 0..={dice}")]
    RequiredOutOfRange { required: u32, dice: u32 },
    #[error("distribution is invalid: {0}")]
    InvalidDistribution(&'static str),
    #[error(transparent)]
    Overflow(#[from] Overflow),
}

/// Exact probability mass over integer outcomes.
///
/// Support is strictly increasing, every mass is positive, and the masses sum
/// to exactly one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteDist {
    support: Vec<i64>,
    mass: Vec<Rational>,
}

impl DiscreteDist {
    /// Builds a distribution from `(outcome, mass)` pairs. Pairs may arrive
    /// in any order; repeated outcomes are merged and zero masses dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, Rational)>) -> Result<Self, DiceError> {
        let mut acc: BTreeMap<i64, Rational> = BTreeMap::new();
        for (k, p) in pairs {
            let slot = acc.entry(k).or_insert_with(Rational::zero);
            *slot = slot.checked_add(&p)?;
        }
        acc.retain(|_, p| !p.is_zero());
        if acc.is_empty() {
            return Err(DiceError::InvalidDistribution("empty support"));
        }
        if Rational::checked_sum(acc.values())? != Rational::one() {
            return Err(DiceError::InvalidDistribution("masses do not sum to one"));
        }
        let (support, mass) = acc.into_iter().unzip();
        Ok(Self { support, mass })
    }

    pub fn point(value: i64) -> Self {
        Self {
            support: vec![value],
            mass: vec![Rational::one()],
        }
    }

    /// A fair die with faces `1..=sides`.
    pub fn die(sides: u32) -> Result<Self, DiceError> {
        check_sides(sides)?;
        let p = Rational::new(1, sides as u128).unwrap();
        Ok(Self {
            support: (1..=sides as i64).collect(),
            mass: vec![p; sides as usize],
        })
    }

    /// Outcome 1 with probability `p`, 0 otherwise.
    pub fn bernoulli(p: Rational) -> Result<Self, DiceError> {
        let q = Rational::one()
            .checked_sub(&p)
            .ok_or(DiceError::InvalidDistribution("bernoulli p above one"))?;
        Self::from_pairs([(0, q), (1, p)])
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn mass(&self) -> &[Rational] {
        &self.mass
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> + '_ {
        self.support.iter().copied().zip(self.mass.iter())
    }

    /// Exact `P(X = k)`; zero outside the support.
    pub fn pmf(&self, k: i64) -> Rational {
        match self.support.binary_search(&k) {
            Ok(i) => self.mass[i],
            Err(_) => Rational::zero(),
        }
    }

    /// `P(X <= t)` as a float.
    pub fn cdf_at(&self, t: f64) -> f64 {
        self.iter()
            .take_while(|(k, _)| (*k as f64) <= t)
            .map(|(_, p)| p.to_f64())
            .sum()
    }

    /// `P(X < t)` as a float.
    pub fn cdf_below(&self, t: f64) -> f64 {
        self.iter()
            .take_while(|(k, _)| (*k as f64) < t)
            .map(|(_, p)| p.to_f64())
            .sum()
    }

    /// Exact `P(X satisfies pred)`.
    pub fn probability_where(&self, pred: impl Fn(i64) -> bool) -> Result<Rational, DiceError> {
        let hits: Vec<&Rational> = self.iter().filter(|(k, _)| pred(*k)).map(|(_, p)| p).collect();
        Ok(Rational::checked_sum(hits)?)
    }

    /// Exact mean and variance.
    pub fn moments(&self) -> Result<(Ratio<i128>, Ratio<i128>), DiceError> {
        let mut mean = Ratio::from_integer(0i128);
        let mut second = Ratio::from_integer(0i128);
        for (k, p) in self.iter() {
            let r = p.as_ratio();
            let p = Ratio::new(
                i128::try_from(*r.numer()).map_err(|_| Overflow)?,
                i128::try_from(*r.denom()).map_err(|_| Overflow)?,
            );
            let k = Ratio::from_integer(k as i128);
            let kp = checked(k.checked_mul(&p))?;
            mean = checked(mean.checked_add(&kp))?;
            second = checked(second.checked_add(&checked(kp.checked_mul(&k))?))?;
        }
        let var = checked(second.checked_sub(&checked(mean.checked_mul(&mean))?))?;
        Ok((mean, var))
    }

    pub fn mean(&self) -> Result<f64, DiceError> {
        Ok(ratio_f64(&self.moments()?.0))
    }

    pub fn variance(&self) -> Result<f64, DiceError> {
        Ok(ratio_f64(&self.moments()?.1))
    }

    /// Writes the `outcome,num,den,float` CSV dump.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "outcome,num,den,float")?;
        for (k, p) in self.iter() {
            writeln!(
                out,
                "{},{},{},{}",
                k,
                p.numerator(),
                p.denominator(),
                float12(p.to_f64())
            )?;
        }
        Ok(())
    }
}

fn checked<T>(v: Option<T>) -> Result<T, DiceError> {
    v.ok_or(DiceError::Overflow(Overflow))
}

pub(crate) fn ratio_f64(r: &Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Distribution of the sum of independent draws from `a` and `b`.
pub fn convolve(a: &DiscreteDist, b: &DiscreteDist) -> Result<DiscreteDist, DiceError> {
    let mut acc: BTreeMap<i64, Rational> = BTreeMap::new();
    for (x, p) in a.iter() {
        for (y, q) in b.iter() {
            let k = x.checked_add(y).ok_or(Overflow)?;
            let pq = p.checked_mul(q)?;
            let slot = acc.entry(k).or_insert_with(Rational::zero);
            *slot = slot.checked_add(&pq)?;
        }
    }
    let (support, mass) = acc.into_iter().unzip();
    Ok(DiscreteDist { support, mass })
}

fn convolve_power(base: &DiscreteDist, n: u32) -> Result<DiscreteDist, DiceError> {
    let mut out = base.clone();
    for _ in 1..n {
        out = convolve(&out, base)?;
    }
    Ok(out)
}

/// One of the surveyed die mechanics together with its success rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mechanic {
    /// Roll one die; success iff roll <= target.
    UniformRollUnder { sides: u32, target: i64 },
    /// Roll one die; success iff roll + modifier >= difficulty.
    UniformRollOver { sides: u32, modifier: i64, difficulty: i64 },
    /// Roll `count` dice; success iff sum + modifier >= difficulty.
    SumRollOver { count: u32, sides: u32, modifier: i64, difficulty: i64 },
    /// Roll `dice` dice; each face >= threshold is a success; the check
    /// succeeds iff at least `required` dice succeed.
    BinomialPool { dice: u32, sides: u32, threshold: u32, required: u32 },
    /// Skill sets the number of dice; success iff sum >= difficulty.
    GeneralPool { dice: u32, sides: u32, difficulty: i64 },
    /// Skill sets the die size; success iff roll >= difficulty.
    StepDie { sides: u32, difficulty: i64 },
    /// Skill sets the number of dice; success iff the highest die >= difficulty.
    MaxPool { dice: u32, sides: u32, difficulty: i64 },
}

impl Mechanic {
    pub fn validate(&self) -> Result<(), DiceError> {
        check_sides(self.sides())?;
        if self.dice() == 0 {
            return Err(DiceError::NoDice);
        }
        if let Mechanic::BinomialPool {
            dice,
            sides,
            threshold,
            required,
        } = *self
        {
            if threshold < 1 || threshold > sides {
                return Err(DiceError::ThresholdOutOfRange { threshold, sides });
            }
            if required > dice {
                return Err(DiceError::RequiredOutOfRange { required, dice });
            }
        }
        Ok(())
    }

    pub fn sides(&self) -> u32 {
        match *self {
            Mechanic::UniformRollUnder { sides, .. }
            | Mechanic::UniformRollOver { sides, .. }
            | Mechanic::SumRollOver { sides, .. }
            | Mechanic::BinomialPool { sides, .. }
            | Mechanic::GeneralPool { sides, .. }
            | Mechanic::StepDie { sides, .. }
            | Mechanic::MaxPool { sides, .. } => sides,
        }
    }

    /// Number of dice rolled per check.
    pub fn dice(&self) -> u32 {
        match *self {
            Mechanic::UniformRollUnder { .. }
            | Mechanic::UniformRollOver { .. }
            | Mechanic::StepDie { .. } => 1,
            Mechanic::SumRollOver { count, .. } => count,
            Mechanic::BinomialPool { dice, .. }
            | Mechanic::GeneralPool { dice, .. }
            | Mechanic::MaxPool { dice, .. } => dice,
        }
    }

    /// Maps rolled faces to the mechanic's outcome variable.
    pub fn outcome_of(&self, faces: &[u32]) -> i64 {
        match *self {
            Mechanic::UniformRollUnder { .. }
            | Mechanic::UniformRollOver { .. }
            | Mechanic::StepDie { .. } => faces[0] as i64,
            Mechanic::SumRollOver { .. } | Mechanic::GeneralPool { .. } => {
                faces.iter().map(|&f| f as i64).sum()
            }
            Mechanic::BinomialPool { threshold, .. } => {
                faces.iter().filter(|&&f| f >= threshold).count() as i64
            }
            Mechanic::MaxPool { .. } => faces.iter().copied().max().unwrap_or(0) as i64,
        }
    }

    /// Applies the success rule to an outcome.
    pub fn succeeds(&self, outcome: i64) -> bool {
        match *self {
            Mechanic::UniformRollUnder { target, .. } => outcome <= target,
            Mechanic::UniformRollOver {
                modifier,
                difficulty,
                ..
            }
            | Mechanic::SumRollOver {
                modifier,
                difficulty,
                ..
            } => outcome.saturating_add(modifier) >= difficulty,
            Mechanic::BinomialPool { required, .. } => outcome >= required as i64,
            Mechanic::GeneralPool { difficulty, .. }
            | Mechanic::StepDie { difficulty, .. }
            | Mechanic::MaxPool { difficulty, .. } => outcome >= difficulty,
        }
    }
}

fn check_sides(sides: u32) -> Result<(), DiceError> {
    if sides < 2 {
        Err(DiceError::DieTooSmall(sides))
    } else {
        Ok(())
    }
}

/// Exact distribution of the mechanic's outcome variable, before the
/// success rule is applied: the single roll, the dice sum, the success
/// count, or the highest die.
pub fn outcome_distribution(m: &Mechanic) -> Result<DiscreteDist, DiceError> {
    m.validate()?;
    match *m {
        Mechanic::UniformRollUnder { sides, .. }
        | Mechanic::UniformRollOver { sides, .. }
        | Mechanic::StepDie { sides, .. } => DiscreteDist::die(sides),
        Mechanic::SumRollOver { count, sides, .. } => convolve_power(&DiscreteDist::die(sides)?, count),
        Mechanic::GeneralPool { dice, sides, .. } => convolve_power(&DiscreteDist::die(sides)?, dice),
        Mechanic::BinomialPool {
            dice,
            sides,
            threshold,
            ..
        } => {
            let hit = Rational::new((sides - threshold + 1) as u128, sides as u128).unwrap();
            convolve_power(&DiscreteDist::bernoulli(hit)?, dice)
        }
        Mechanic::MaxPool { dice, sides, .. } => {
            // P(max <= k) = (k/d)^n, so P(max = k) = (k^n - (k-1)^n) / d^n.
            let den = (sides as u128).checked_pow(dice).ok_or(Overflow)?;
            let mut pairs = Vec::with_capacity(sides as usize);
            for k in 1..=sides as u128 {
                let hi = k.checked_pow(dice).ok_or(Overflow)?;
                let lo = (k - 1).pow(dice);
                pairs.push((k as i64, Rational::new(hi - lo, den).unwrap()));
            }
            DiscreteDist::from_pairs(pairs)
        }
    }
}

/// Exact probability that the mechanic's success rule fires.
pub fn success_probability(m: &Mechanic) -> Result<Rational, DiceError> {
    outcome_distribution(m)?.probability_where(|k| m.succeeds(k))
}
