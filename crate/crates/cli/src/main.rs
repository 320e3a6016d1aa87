//! `logitskill` command-line front end.
//!
//! Exit status: 0 on success, 2 on usage errors, 1 on domain errors.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use logitskill::compare::{
    default_grid, discrete_vs_logistic, figure_data, match_normal_to_logistic, match_uniform_to_logistic,
    moment_match_logistic, sup_distance, ContinuousCdf, Figure, LogisticParams,
};
use logitskill::dice::{outcome_distribution, success_probability, Mechanic};
use logitskill::estimate::{fit, read_outcomes, FitConfig, Slope};
use logitskill::evidence::{jeffreys_grade, update, update_reliable, weight_of_evidence, BayesFactor, WeightedFactor};
use logitskill::format::float12;
use logitskill::logistic::{logit, odds_to_prob, prob_to_odds, Model4PL, MultiplicativeSkill, Odds, Probability};
use logitskill::resolve::{elo_expected, elo_update, opposed, opposed_logit, Check, Rating, Seed};

#[derive(Parser)]
#[command(name = "logitskill", version, about = "Logistic task resolution, dice distributions and skill estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact outcome distribution of a die mechanic.
    ///
    /// Columns: outcome,num,den,float (float has 12 significant digits).
    /// With --success, prints the exact success probability as num,den,float.
    Dist {
        #[command(flatten)]
        mechanic: MechanicArgs,
        /// Print the success probability instead of the distribution.
        #[arg(long)]
        success: bool,
    },
    /// Resolve one check with a seeded generator.
    ///
    /// Columns: success,probability,raw_roll (raw_roll empty for models).
    Check {
        #[command(flatten)]
        target: CheckArgs,
        #[arg(long)]
        seed: u64,
    },
    /// Opposed-skill probability or an Elo rating update.
    ///
    /// Ratio skills (--skill-a/--skill-b) or logits (--logit-a/--logit-b)
    /// print `probability`. Elo ratings (--elo-a/--elo-b with --score) print
    /// expected_a,rating_a,rating_b.
    Opposed {
        #[arg(long, requires = "skill_b", conflicts_with_all = ["logit_a", "elo_a"])]
        skill_a: Option<f64>,
        #[arg(long, requires = "skill_a")]
        skill_b: Option<f64>,
        #[arg(long, requires = "logit_b", conflicts_with = "elo_a", allow_hyphen_values = true)]
        logit_a: Option<f64>,
        #[arg(long, requires = "logit_a", allow_hyphen_values = true)]
        logit_b: Option<f64>,
        #[arg(long, requires_all = ["elo_b", "score"])]
        elo_a: Option<f64>,
        #[arg(long, requires = "elo_a")]
        elo_b: Option<f64>,
        /// Score for A: 1 win, 0.5 draw, 0 loss.
        #[arg(long)]
        score: Option<f64>,
        /// K factor shared by both players.
        #[arg(long, default_value_t = 32.0)]
        k: f64,
    },
    /// Jeffreys grade of a Bayes factor. Columns: grade,label,log10L.
    Grade {
        #[arg(long, allow_hyphen_values = true)]
        factor: f64,
    },
    /// Odds update from a prior and Bayes factors.
    ///
    /// Columns: odds,probability,logit. The prior is given as odds
    /// (--prior, default 1) or as a probability (--prior-prob).
    Evidence {
        #[arg(long, conflicts_with = "prior_prob", allow_hyphen_values = true)]
        prior: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        prior_prob: Option<f64>,
        /// A Bayes factor; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        factor: Vec<f64>,
        /// A factor discounted by reliability, as `L:r`; repeatable.
        #[arg(long)]
        weighted: Vec<String>,
    },
    /// Sup-norm distance between a logistic and an approximation.
    ///
    /// `normal` and `uniform` compare the variance-matched distribution to
    /// the logistic with --mean/--scale over mean ± 6 sd (1201 points);
    /// columns: sup_distance,argmax. `dice` compares the sum of --dice
    /// --sides dice to its moment-matched logistic at half-integer points;
    /// columns: mean,scale,sup_distance,argmax.
    Compare {
        #[arg(value_enum)]
        target: CompareTarget,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        mean: f64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 3)]
        dice: u32,
        #[arg(long, default_value_t = 6)]
        sides: u32,
    },
    /// CSV series behind a comparison figure (fig2, fig3, fig4, fig5).
    ///
    /// fig2: series,easy,hard (percent).
    /// fig3: modifier,logistic,uniform,abs_diff.
    /// fig4: modifier,logistic,normal,abs_diff.
    /// fig5: outcome,dice_cdf,logistic_cdf,abs_diff (logistic at outcome+0.5).
    Figure { which: String },
    /// Fit abilities and difficulties from an outcome log (person,task,success).
    ///
    /// Prints the fit as JSON.
    Fit {
        /// Input CSV path, or `-` for standard input.
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 0.01)]
        ridge: f64,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Known slope applied to every task.
        #[arg(long, default_value_t = 1.0)]
        slope: f64,
    },
    /// Resolve many checks with a seeded generator.
    ///
    /// Prints n,successes,rate,probability, or with --trials one
    /// trial,success row per draw.
    Simulate {
        #[command(flatten)]
        target: CheckArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        trials: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CompareTarget {
    Normal,
    Uniform,
    Dice,
}

#[derive(Clone, Copy, ValueEnum)]
enum MechanicKind {
    RollUnder,
    RollOver,
    Sum,
    Binomial,
    Pool,
    Step,
    Max,
}

#[derive(Args)]
struct MechanicArgs {
    /// Mechanic family.
    #[arg(long, value_enum)]
    mechanic: Option<MechanicKind>,
    /// Number of dice (sum, binomial, pool, max).
    #[arg(long, default_value_t = 1)]
    dice: u32,
    #[arg(long)]
    sides: Option<u32>,
    /// Roll-under target (modified skill).
    #[arg(long, allow_hyphen_values = true)]
    target: Option<i64>,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    modifier: i64,
    #[arg(long, allow_hyphen_values = true)]
    difficulty: Option<i64>,
    /// Binomial pool: faces at or above this count as successes.
    #[arg(long)]
    threshold: Option<u32>,
    /// Binomial pool: successes needed.
    #[arg(long)]
    required: Option<u32>,
}

#[derive(Args)]
struct CheckArgs {
    /// 4PL model as JSON: {"ability":..,"difficulty":..,"slope":..,"lower":..,"upper":..}.
    #[arg(long, conflicts_with = "mechanic")]
    model: Option<String>,
    #[command(flatten)]
    mechanic: MechanicArgs,
}

fn usage_error(msg: impl std::fmt::Display) -> ! {
    Cli::command().error(ErrorKind::MissingRequiredArgument, msg).exit()
}

fn require<T>(v: Option<T>, flag: &str, kind: &str) -> T {
    v.unwrap_or_else(|| usage_error(format!("--{flag} is required for --mechanic {kind}")))
}

impl MechanicArgs {
    fn build(&self) -> Mechanic {
        let kind = self.mechanic.unwrap_or_else(|| usage_error("--mechanic (or --model) is required"));
        let name = kind.to_possible_value().unwrap().get_name().to_string();
        let sides = require(self.sides, "sides", &name);
        let difficulty = || require(self.difficulty, "difficulty", &name);
        match kind {
            MechanicKind::RollUnder => Mechanic::UniformRollUnder {
                sides,
                target: require(self.target, "target", &name),
            },
            MechanicKind::RollOver => Mechanic::UniformRollOver {
                sides,
                modifier: self.modifier,
                difficulty: difficulty(),
            },
            MechanicKind::Sum => Mechanic::SumRollOver {
                count: self.dice,
                sides,
                modifier: self.modifier,
                difficulty: self.difficulty.unwrap_or(0),
            },
            MechanicKind::Binomial => Mechanic::BinomialPool {
                dice: self.dice,
                sides,
                threshold: require(self.threshold, "threshold", &name),
                required: require(self.required, "required", &name),
            },
            MechanicKind::Pool => Mechanic::GeneralPool {
                dice: self.dice,
                sides,
                difficulty: self.difficulty.unwrap_or(0),
            },
            MechanicKind::Step => Mechanic::StepDie {
                sides,
                difficulty: difficulty(),
            },
            MechanicKind::Max => Mechanic::MaxPool {
                dice: self.dice,
                sides,
                difficulty: self.difficulty.unwrap_or(0),
            },
        }
    }
}

impl CheckArgs {
    fn build(&self) -> Result<Check> {
        match &self.model {
            Some(json) => {
                let m: Model4PL = serde_json::from_str(json).context("invalid --model JSON")?;
                Ok(Check::model(m))
            }
            None => Ok(Check::mechanic(self.mechanic.build())?),
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Dist { mechanic, success } => {
            let m = mechanic.build();
            if success {
                let p = success_probability(&m)?;
                writeln!(out, "num,den,float")?;
                writeln!(out, "{},{},{}", p.numerator(), p.denominator(), float12(p.to_f64()))?;
            } else {
                outcome_distribution(&m)?.write_csv(&mut *out)?;
            }
        }
        Command::Check { target, seed } => {
            let check = target.build()?;
            let r = check.resolve(&mut Seed(seed).rng());
            writeln!(out, "success,probability,raw_roll")?;
            writeln!(
                out,
                "{},{},{}",
                u8::from(r.success),
                float12(r.probability_used.value()),
                r.raw_roll.map(|v| v.to_string()).unwrap_or_default()
            )?;
        }
        Command::Opposed {
            skill_a,
            skill_b,
            logit_a,
            logit_b,
            elo_a,
            elo_b,
            score,
            k,
        } => {
            if let (Some(a), Some(b)) = (skill_a, skill_b) {
                let p = opposed(MultiplicativeSkill::new(a)?, MultiplicativeSkill::new(b)?);
                writeln!(out, "probability\n{}", float12(p.value()))?;
            } else if let (Some(a), Some(b)) = (logit_a, logit_b) {
                writeln!(out, "probability\n{}", float12(opposed_logit(a, b).value()))?;
            } else if let (Some(a), Some(b), Some(s)) = (elo_a, elo_b, score) {
                let (ra, rb) = elo_update(Rating::new(a, k)?, Rating::new(b, k)?, s)?;
                writeln!(out, "expected_a,rating_a,rating_b")?;
                writeln!(out, "{},{},{}", float12(elo_expected(a, b)), float12(ra.value), float12(rb.value))?;
            } else {
                usage_error("give --skill-a/--skill-b, --logit-a/--logit-b, or --elo-a/--elo-b/--score");
            }
        }
        Command::Grade { factor } => {
            let f = BayesFactor::new(factor)?;
            let g = jeffreys_grade(f);
            writeln!(out, "grade,label,log10L")?;
            writeln!(out, "{},\"{}\",{}", g.grade(), g.label(), float12(weight_of_evidence(f)))?;
        }
        Command::Evidence {
            prior,
            prior_prob,
            factor,
            weighted,
        } => {
            let mut odds = match prior_prob {
                Some(p) => prob_to_odds(Probability::new(p)?),
                None => Odds::new(prior.unwrap_or(1.0))?,
            };
            let factors = factor.into_iter().map(BayesFactor::new).collect::<Result<Vec<_>, _>>()?;
            odds = update(odds, &factors);
            for w in &weighted {
                let (l, r) = w
                    .split_once(':')
                    .ok_or_else(|| anyhow!("--weighted expects L:r, got {w:?}"))?;
                let wf = WeightedFactor::new(BayesFactor::new(l.parse()?)?, r.parse()?)?;
                odds = update_reliable(odds, wf);
            }
            let p = odds_to_prob(odds);
            let lg = logit(p).map(|l| float12(l.value())).unwrap_or_else(|_| {
                if p.value() >= 1.0 { "inf" } else { "-inf" }.to_string()
            });
            writeln!(out, "odds,probability,logit")?;
            writeln!(out, "{},{},{}", float12(odds.value()), float12(p.value()), lg)?;
        }
        Command::Compare {
            target,
            mean,
            scale,
            dice,
            sides,
        } => match target {
            CompareTarget::Normal | CompareTarget::Uniform => {
                let lp = LogisticParams::new(mean, scale)?;
                let other = if matches!(target, CompareTarget::Normal) {
                    let (mean, sd) = match_normal_to_logistic(lp);
                    ContinuousCdf::Normal { mean, sd }
                } else {
                    let (mean, halfwidth) = match_uniform_to_logistic(lp);
                    ContinuousCdf::Uniform { mean, halfwidth }
                };
                let (lo, hi, step) = default_grid(lp.mean, lp.sd());
                let r = sup_distance(&lp, &other, lo, hi, step)?;
                writeln!(out, "sup_distance,argmax")?;
                writeln!(out, "{},{}", float12(r.sup_distance), float12(r.argmax_point))?;
            }
            CompareTarget::Dice => {
                let d = outcome_distribution(&Mechanic::GeneralPool {
                    dice,
                    sides,
                    difficulty: 0,
                })?;
                let lp = moment_match_logistic(&d)?;
                let r = discrete_vs_logistic(&d)?;
                writeln!(out, "mean,scale,sup_distance,argmax")?;
                writeln!(
                    out,
                    "{},{},{},{}",
                    float12(lp.mean),
                    float12(lp.scale),
                    float12(r.sup_distance),
                    float12(r.argmax_point)
                )?;
            }
        },
        Command::Figure { which } => {
            let fig: Figure = which.parse().unwrap_or_else(|e| {
                Cli::command().error(ErrorKind::InvalidValue, e).exit()
            });
            figure_data(fig)?.write_csv(&mut *out)?;
        }
        Command::Fit {
            input,
            ridge,
            max_iter,
            tol,
            slope,
        } => {
            let records = if input == "-" {
                let mut buf = Vec::new();
                io::stdin().read_to_end(&mut buf)?;
                read_outcomes(buf.as_slice())
            } else {
                read_outcomes(File::open(&input).with_context(|| format!("cannot open {input}"))?)
            }
            .with_context(|| format!("reading {input}"))?;
            let cfg = FitConfig {
                max_iterations: max_iter,
                gradient_tolerance: tol,
                ridge,
                slope: Slope::Global(slope),
            };
            writeln!(out, "{}", fit(&records, &cfg)?.to_json())?;
        }
        Command::Simulate { target, n, seed, trials } => {
            let check = target.build()?;
            let results = check.simulate(n, &mut Seed(seed).rng());
            if trials {
                writeln!(out, "trial,success")?;
                for (i, r) in results.iter().enumerate() {
                    writeln!(out, "{},{}", i + 1, u8::from(r.success))?;
                }
            } else {
                let hits = results.iter().filter(|r| r.success).count();
                let rate = if n == 0 { 0.0 } else { hits as f64 / n as f64 };
                writeln!(out, "n,successes,rate,probability")?;
                writeln!(out, "{},{},{},{}", n, hits, float12(rate), float12(check.probability()))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli, &mut out).and_then(|()| out.flush().map_err(Into::into));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
