//! Logistic task resolution for games.
//!
//! Skill and difficulty live on a log-odds scale and resolve through the
//! four-parameter logistic model. Next to it sit exact distributions for the
//! classical die mechanics, Bayes-factor evidence algebra, CDF comparison
//! tooling, a seeded resolver with Elo updates, and a joint penalized
//! maximum-likelihood fitter for Rasch data.

pub mod compare;
pub mod dice;
pub mod estimate;
pub mod evidence;
pub mod format;
pub mod logistic;
pub mod rational;
pub mod resolve;

pub use compare::{
    discrete_vs_logistic, figure_data, match_normal_to_logistic, match_uniform_to_logistic,
    moment_match_logistic, sup_distance, Cdf, ComparisonReport, ContinuousCdf, Figure,
    FigureTable, LogisticParams,
};
pub use dice::{convolve, outcome_distribution, success_probability, DiscreteDist, Mechanic};
pub use estimate::{fit, FitConfig, FitResult, OutcomeRecord, Slope};
pub use evidence::{
    jeffreys_grade, update, update_reliable, weight_of_evidence, BayesFactor, EvidenceGrade,
    WeightedFactor,
};
pub use logistic::{
    logistic_cdf, normal_cdf, odds_to_prob, p4, prob_to_odds, rasch_ratio, sigmoid, uniform_cdf,
    Logit, Model4PL, MultiplicativeSkill, Odds, Probability,
};
pub use rational::Rational;
pub use resolve::{
    elo_update, opposed, opposed_logit, resolve_mechanic, resolve_model, CheckResult, Rating,
    Seed, SimRng,
};
