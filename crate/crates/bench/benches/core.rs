use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use logitskill::compare::{default_grid, figure_data, Figure};
use logitskill::estimate::SyntheticRasch;
use logitskill::resolve::Check;
use logitskill::{
    discrete_vs_logistic, fit, match_normal_to_logistic, outcome_distribution, sup_distance, ContinuousCdf, FitConfig,
    LogisticParams, Mechanic, Seed,
};

fn dice(c: &mut Criterion) {
    let sum = Mechanic::GeneralPool {
        dice: 6,
        sides: 10,
        difficulty: 30,
    };
    let binomial = Mechanic::BinomialPool {
        dice: 10,
        sides: 10,
        threshold: 8,
        required: 3,
    };
    c.bench_function("outcome_distribution 6d10 sum", |b| b.iter(|| outcome_distribution(black_box(&sum)).unwrap()));
    c.bench_function("outcome_distribution 10d10 binomial", |b| {
        b.iter(|| outcome_distribution(black_box(&binomial)).unwrap())
    });
    let d = outcome_distribution(&Mechanic::GeneralPool {
        dice: 3,
        sides: 6,
        difficulty: 0,
    })
    .unwrap();
    c.bench_function("discrete_vs_logistic 3d6", |b| b.iter(|| discrete_vs_logistic(black_box(&d)).unwrap()));
}

fn comparisons(c: &mut Criterion) {
    let lp = LogisticParams::new(0.0, 1.0).unwrap();
    let (mean, sd) = match_normal_to_logistic(lp);
    let normal = ContinuousCdf::Normal { mean, sd };
    let (lo, hi, step) = default_grid(lp.mean, lp.sd());
    c.bench_function("sup_distance normal 1201 points", |b| {
        b.iter(|| sup_distance(&lp, black_box(&normal), lo, hi, step).unwrap())
    });
    c.bench_function("figure_data fig3", |b| b.iter(|| figure_data(black_box(Figure::Fig3)).unwrap()));
}

fn sampling(c: &mut Criterion) {
    let check = Check::mechanic(Mechanic::SumRollOver {
        count: 3,
        sides: 6,
        modifier: 0,
        difficulty: 11,
    })
    .unwrap();
    c.bench_function("simulate 3d6 x 10000", |b| {
        b.iter(|| check.simulate(10_000, &mut Seed(1).rng()))
    });
}

fn estimation(c: &mut Criterion) {
    let data = SyntheticRasch::generate(200, 50, 2.0, &mut Seed(8).rng());
    let config = FitConfig::default();
    let mut group = c.benchmark_group("fit");
    group.sample_size(10);
    group.bench_function("200 persons x 50 tasks", |b| b.iter(|| fit(black_box(&data.records), &config).unwrap()));
    group.finish();
}

criterion_group!(benches, dice, comparisons, sampling, estimation);
criterion_main!(benches);
