use std::collections::BTreeMap;

use logitskill::dice::{convolve, outcome_distribution, success_probability, DiscreteDist, Mechanic};
use logitskill::Rational;
use proptest::prelude::*;

/// Counts every ordered roll of `n` dice with `d` sides, mapping faces to an
/// outcome with `f`. Returns outcome -> count and the total `d^n`.
fn enumerate(n: u32, d: u32, f: impl Fn(&[u32]) -> i64) -> (BTreeMap<i64, u128>, u128) {
    let mut faces = vec![1u32; n as usize];
    let mut counts = BTreeMap::new();
    let mut total = 0u128;
    loop {
        *counts.entry(f(&faces)).or_insert(0) += 1;
        total += 1;
        let mut i = 0;
        loop {
            if i == faces.len() {
                return (counts, total);
            }
            if faces[i] < d {
                faces[i] += 1;
                break;
            }
            faces[i] = 1;
            i += 1;
        }
    }
}

fn oracle(m: &Mechanic) -> (BTreeMap<i64, u128>, u128) {
    match *m {
        Mechanic::UniformRollUnder { sides, .. }
        | Mechanic::UniformRollOver { sides, .. }
        | Mechanic::StepDie { sides, .. } => enumerate(1, sides, |f| f[0] as i64),
        Mechanic::SumRollOver { count, sides, .. } => enumerate(count, sides, |f| f.iter().map(|&x| x as i64).sum()),
        Mechanic::GeneralPool { dice, sides, .. } => enumerate(dice, sides, |f| f.iter().map(|&x| x as i64).sum()),
        Mechanic::BinomialPool {
            dice,
            sides,
            threshold,
            ..
        } => enumerate(dice, sides, |f| f.iter().filter(|&&x| x >= threshold).count() as i64),
        Mechanic::MaxPool { dice, sides, .. } => enumerate(dice, sides, |f| *f.iter().max().unwrap() as i64),
    }
}

fn oracle_success(m: &Mechanic, counts: &BTreeMap<i64, u128>, total: u128) -> Rational {
    let hits: u128 = counts
        .iter()
        .filter(|(&k, _)| match *m {
            Mechanic::UniformRollUnder { target, .. } => k <= target,
            Mechanic::UniformRollOver {
                modifier,
                difficulty,
                ..
            }
            | Mechanic::SumRollOver {
                modifier,
                difficulty,
                ..
            } => k + modifier >= difficulty,
            Mechanic::BinomialPool { required, .. } => k >= required as i64,
            Mechanic::GeneralPool { difficulty, .. }
            | Mechanic::StepDie { difficulty, .. }
            | Mechanic::MaxPool { difficulty, .. } => k >= difficulty,
        })
        .map(|(_, c)| c)
        .sum();
    Rational::new(hits, total).unwrap()
}

fn assert_matches_enumeration(m: &Mechanic) {
    let (counts, total) = oracle(m);
    let dist = outcome_distribution(m).unwrap();
    let expected: Vec<(i64, Rational)> = counts
        .iter()
        .map(|(&k, &c)| (k, Rational::new(c, total).unwrap()))
        .collect();
    let got: Vec<(i64, Rational)> = dist.iter().map(|(k, p)| (k, *p)).collect();
    assert_eq!(got, expected, "{m:?}");
    assert_eq!(Rational::checked_sum(dist.mass()).unwrap(), Rational::one());
    assert_eq!(success_probability(m).unwrap(), oracle_success(m, &counts, total), "{m:?}");
}

fn mechanic_strategy() -> impl Strategy<Value = Mechanic> {
    let dice = 1u32..=6;
    let sides = 2u32..=10;
    prop_oneof![
        (sides.clone(), -2i64..=12).prop_map(|(sides, target)| Mechanic::UniformRollUnder { sides, target }),
        (sides.clone(), -5i64..=5, -3i64..=15).prop_map(|(sides, modifier, difficulty)| {
            Mechanic::UniformRollOver {
                sides,
                modifier,
                difficulty,
            }
        }),
        (1u32..=4, sides.clone(), -5i64..=5, 0i64..=40).prop_map(|(count, sides, modifier, difficulty)| {
            Mechanic::SumRollOver {
                count,
                sides,
                modifier,
                difficulty,
            }
        }),
        (dice.clone(), sides.clone())
            .prop_flat_map(|(dice, sides)| (Just(dice), Just(sides), 1..=sides, 0..=dice))
            .prop_map(|(dice, sides, threshold, required)| Mechanic::BinomialPool {
                dice,
                sides,
                threshold,
                required,
            }),
        (1u32..=4, sides.clone(), 0i64..=40).prop_map(|(dice, sides, difficulty)| Mechanic::GeneralPool {
            dice,
            sides,
            difficulty,
        }),
        (sides.clone(), 0i64..=12).prop_map(|(sides, difficulty)| Mechanic::StepDie { sides, difficulty }),
        (dice, sides, 0i64..=12).prop_map(|(dice, sides, difficulty)| Mechanic::MaxPool {
            dice,
            sides,
            difficulty,
        }),
    ]
}

#[test]
fn six_d10_families_match_enumeration() {
    // The largest instances, enumerated once rather than under proptest.
    for m in [
        Mechanic::SumRollOver {
            count: 6,
            sides: 10,
            modifier: 2,
            difficulty: 35,
        },
        Mechanic::GeneralPool {
            dice: 6,
            sides: 10,
            difficulty: 30,
        },
        Mechanic::BinomialPool {
            dice: 6,
            sides: 10,
            threshold: 7,
            required: 2,
        },
        Mechanic::MaxPool {
            dice: 6,
            sides: 10,
            difficulty: 9,
        },
    ] {
        assert_matches_enumeration(&m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distribution_matches_enumeration(m in mechanic_strategy()) {
        assert_matches_enumeration(&m);
    }

    #[test]
    fn success_monotone_in_target_and_difficulty(m in mechanic_strategy()) {
        let p = success_probability(&m).unwrap();
        let (easier, harder) = match m {
            Mechanic::UniformRollUnder { sides, target } => (
                Mechanic::UniformRollUnder { sides, target: target + 1 },
                Mechanic::UniformRollUnder { sides, target: target - 1 },
            ),
            Mechanic::UniformRollOver { sides, modifier, difficulty } => (
                Mechanic::UniformRollOver { sides, modifier: modifier + 1, difficulty },
                Mechanic::UniformRollOver { sides, modifier, difficulty: difficulty + 1 },
            ),
            Mechanic::SumRollOver { count, sides, modifier, difficulty } => (
                Mechanic::SumRollOver { count, sides, modifier: modifier + 1, difficulty },
                Mechanic::SumRollOver { count, sides, modifier, difficulty: difficulty + 1 },
            ),
            Mechanic::BinomialPool { dice, sides, threshold, required } => (
                Mechanic::BinomialPool { dice, sides, threshold, required: required.saturating_sub(1) },
                Mechanic::BinomialPool { dice, sides, threshold: (threshold + 1).min(sides), required },
            ),
            Mechanic::GeneralPool { dice, sides, difficulty } => (
                Mechanic::GeneralPool { dice, sides, difficulty: difficulty - 1 },
                Mechanic::GeneralPool { dice, sides, difficulty: difficulty + 1 },
            ),
            Mechanic::StepDie { sides, difficulty } => (
                Mechanic::StepDie { sides: sides + 1, difficulty },
                Mechanic::StepDie { sides, difficulty: difficulty + 1 },
            ),
            Mechanic::MaxPool { dice, sides, difficulty } => (
                Mechanic::MaxPool { dice: dice + 1, sides, difficulty },
                Mechanic::MaxPool { dice, sides, difficulty: difficulty + 1 },
            ),
        };
        prop_assert!(success_probability(&easier).unwrap() >= p);
        prop_assert!(success_probability(&harder).unwrap() <= p);
    }

    #[test]
    fn convolution_commutes_and_associates(a in 2u32..=6, b in 2u32..=8, c in 2u32..=5, shift in -3i64..=3) {
        let da = convolve(&DiscreteDist::die(a).unwrap(), &DiscreteDist::point(shift)).unwrap();
        let db = DiscreteDist::die(b).unwrap();
        let dc = convolve(&DiscreteDist::die(c).unwrap(), &DiscreteDist::die(2).unwrap()).unwrap();
        prop_assert_eq!(convolve(&da, &db).unwrap(), convolve(&db, &da).unwrap());
        prop_assert_eq!(
            convolve(&convolve(&da, &db).unwrap(), &dc).unwrap(),
            convolve(&da, &convolve(&db, &dc).unwrap()).unwrap()
        );
        let total = Rational::checked_sum(convolve(&da, &dc).unwrap().mass()).unwrap();
        prop_assert_eq!(total, Rational::one());
    }
}
