use logitskill::evidence::{grade_boundaries, jeffreys_grade, update, update_reliable, BayesFactor, WeightedFactor};
use logitskill::logistic::{odds_to_prob, p4, rasch_ratio, sigmoid, Logit, Model4PL, MultiplicativeSkill, Odds};
use proptest::prelude::*;

fn skill(v: f64) -> MultiplicativeSkill {
    MultiplicativeSkill::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn rasch_complement(la in -3.0f64..3.0, lx in -3.0f64..3.0) {
        let (a, x) = (10f64.powf(la), 10f64.powf(lx));
        let s = rasch_ratio(skill(a), skill(x)).value() + rasch_ratio(skill(x), skill(a)).value();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_and_logit_scales_agree(s in -20.0f64..20.0, d in -20.0f64..20.0) {
        let ratio = rasch_ratio(skill(s.exp()), skill(d.exp())).value();
        let logit = sigmoid(Logit::new(s - d).unwrap()).value();
        prop_assert!((ratio - logit).abs() < 1e-12);
    }

    #[test]
    fn four_pl_complement(a in -15.0f64..15.0, x in -15.0f64..15.0, r in 0.0f64..5.0,
                          lo in 0.0f64..1.0, hi in 0.0f64..1.0) {
        let (l, u) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let m = Model4PL::new(a, x, r, l, u).unwrap();
        let s = p4(&m).value() + p4(&m.swapped()).value();
        prop_assert!((s - (l + u)).abs() < 1e-12);
    }

    // Kept where r * (a - x) stays below ~25 so the sigmoid has not
    // saturated to 1.0 in f64.
    #[test]
    fn four_pl_monotone(a in -2.0f64..2.0, x in -2.0f64..2.0, step in 0.01f64..2.0,
                        r in 0.05f64..5.0, l in 0.0f64..0.45, u in 0.55f64..1.0) {
        let base = p4(&Model4PL::new(a, x, r, l, u).unwrap()).value();
        let abler = p4(&Model4PL::new(a + step, x, r, l, u).unwrap()).value();
        let harder = p4(&Model4PL::new(a, x + step, r, l, u).unwrap()).value();
        prop_assert!(abler > base);
        prop_assert!(harder < base);
    }

    #[test]
    fn four_pl_asymptotes(r in 1.0f64..5.0, l in 0.0f64..0.5, u in 0.5f64..1.0, x in -5.0f64..5.0) {
        let low = p4(&Model4PL::new(x - 50.0, x, r, l, u).unwrap()).value();
        let high = p4(&Model4PL::new(x + 50.0, x, r, l, u).unwrap()).value();
        prop_assert!((low - l).abs() < 1e-10);
        prop_assert!((high - u).abs() < 1e-10);
    }

    #[test]
    fn batch_and_sequential_updates_agree(prior in 0.01f64..100.0, fs in prop::collection::vec(0.001f64..1000.0, 0..12)) {
        let factors: Vec<BayesFactor> = fs.iter().map(|&f| BayesFactor::new(f).unwrap()).collect();
        let batch = update(Odds::new(prior).unwrap(), &factors).value();
        let seq = factors.iter().fold(Odds::new(prior).unwrap(), |o, f| update(o, std::slice::from_ref(f))).value();
        prop_assert!((batch.ln() - seq.ln()).abs() < 1e-12);
        let mut rev = factors.clone();
        rev.reverse();
        prop_assert!((update(Odds::new(prior).unwrap(), &rev).value().ln() - batch.ln()).abs() < 1e-12);
    }

    #[test]
    fn reciprocal_factors_cancel(prior in 0.01f64..100.0, l in 1e-4f64..1e4) {
        let f = BayesFactor::new(l).unwrap();
        let o = update(Odds::new(prior).unwrap(), &[f, f.reciprocal()]).value();
        prop_assert!((o - prior).abs() < 1e-12 * prior.max(1.0));
    }

    #[test]
    fn odds_pipeline_is_the_ratio_model(a in 1e-3f64..1e3, x in 1e-3f64..1e3) {
        let via_odds = odds_to_prob(update(Odds::even(), &[BayesFactor::new(a).unwrap(), BayesFactor::new(x).unwrap().reciprocal()])).value();
        prop_assert!((via_odds - rasch_ratio(skill(a), skill(x)).value()).abs() < 1e-12);
    }

    #[test]
    fn reliability_one_is_plain_update(prior in 0.01f64..100.0, l in 1e-3f64..1e3) {
        let f = BayesFactor::new(l).unwrap();
        let a = update_reliable(Odds::new(prior).unwrap(), WeightedFactor::new(f, 1.0).unwrap()).value();
        let b = update(Odds::new(prior).unwrap(), &[f]).value();
        prop_assert!((a.ln() - b.ln()).abs() < 1e-12);
    }
}

#[test]
fn zero_slope_is_flat() {
    for d in [-30.0, -3.0, 0.0, 0.1, 29.0] {
        let p = p4(&Model4PL::new(d, 0.0, 0.0, 0.1, 0.8).unwrap()).value();
        assert_eq!(p, 0.1 + (0.8 - 0.1) / 2.0);
    }
}

#[test]
fn jeffreys_grade_monotone_on_log_grid() {
    let mut prev = 0;
    for i in 0..10_000 {
        let l = 10f64.powf(-4.0 + 8.0 * i as f64 / 9_999.0);
        let g = jeffreys_grade(BayesFactor::new(l).unwrap()).grade();
        assert!(g >= prev);
        prev = g;
    }
    assert_eq!(prev, 5);
    for (i, b) in grade_boundaries().into_iter().enumerate() {
        assert_eq!(jeffreys_grade(BayesFactor::new(b).unwrap()).grade() as usize, i + 1);
    }
}
