//! Moment matching and sup-norm CDF comparison between the logistic and its
//! uniform, normal and dice-sum approximations, plus the CSV series behind
//! the comparison figures.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::dice::{ratio_f64, DiceError, DiscreteDist, Mechanic};
use crate::format::float12;
use crate::logistic::{normal_cdf_f64, sigmoid_f64, uniform_cdf_f64};

/// Points in the default continuous comparison grid, spanning mean ± 6 sd.
pub const DEFAULT_GRID_POINTS: usize = 1201;
/// Half-width of the uniform used by the modifier figures: a 50% base chance
/// that reaches 0% and 100% at a modifier of ∓50.
pub const FIGURE_UNIFORM_HALFWIDTH: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompareError {
    #[error("distribution has a single support point; zero variance has no logistic match")]
    Degenerate,
    #[error("invalid grid: need lo < hi and a positive step (lo={lo}, hi={hi}, step={step})")]
    InvalidGrid { lo: f64, hi: f64, step: f64 },
    #[error("unknown figure {0:?}; expected fig2, fig3, fig4 or fig5")]
    UnknownFigure(String),
    #[error(transparent)]
    Dice(#[from] DiceError),
}

/// Logistic distribution with location `mean` and scale `scale`; its
/// variance is `scale² π² / 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogisticParams {
    pub mean: f64,
    pub scale: f64,
}

impl LogisticParams {
    pub fn new(mean: f64, scale: f64) -> Result<Self, CompareError> {
        if scale > 0.0 && scale.is_finite() && mean.is_finite() {
            Ok(Self { mean, scale })
        } else {
            Err(CompareError::Degenerate)
        }
    }

    /// The logistic with the given mean and variance.
    pub fn from_moments(mean: f64, variance: f64) -> Result<Self, CompareError> {
        Self::new(mean, (3.0 * variance).sqrt() / PI)
    }

    pub fn variance(&self) -> f64 {
        self.scale * self.scale * PI * PI / 3.0
    }

    pub fn sd(&self) -> f64 {
        self.variance().sqrt()
    }
}

/// A continuous reference CDF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContinuousCdf {
    Logistic { mean: f64, scale: f64 },
    Normal { mean: f64, sd: f64 },
    Uniform { mean: f64, halfwidth: f64 },
}

impl From<LogisticParams> for ContinuousCdf {
    fn from(lp: LogisticParams) -> Self {
        ContinuousCdf::Logistic {
            mean: lp.mean,
            scale: lp.scale,
        }
    }
}

/// Something with a cumulative distribution function.
pub trait Cdf {
    /// `P(X <= t)`.
    fn cdf(&self, t: f64) -> f64;

    /// `P(X < t)`; equal to `cdf` for continuous distributions.
    fn left_limit(&self, t: f64) -> f64 {
        self.cdf(t)
    }

    /// Points where the CDF jumps.
    fn jumps(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl Cdf for ContinuousCdf {
    fn cdf(&self, t: f64) -> f64 {
        match *self {
            ContinuousCdf::Logistic { mean, scale } => sigmoid_f64((t - mean) / scale),
            ContinuousCdf::Normal { mean, sd } => normal_cdf_f64((t - mean) / sd),
            ContinuousCdf::Uniform { mean, halfwidth } => uniform_cdf_f64(t, mean, halfwidth),
        }
    }
}

impl Cdf for LogisticParams {
    fn cdf(&self, t: f64) -> f64 {
        sigmoid_f64((t - self.mean) / self.scale)
    }
}

impl Cdf for DiscreteDist {
    fn cdf(&self, t: f64) -> f64 {
        self.cdf_at(t)
    }

    fn left_limit(&self, t: f64) -> f64 {
        self.cdf_below(t)
    }

    fn jumps(&self) -> Vec<f64> {
        self.support().iter().map(|&k| k as f64).collect()
    }
}

/// Two CDFs evaluated side by side and their largest absolute gap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub grid: Vec<f64>,
    pub cdf_a: Vec<f64>,
    pub cdf_b: Vec<f64>,
    pub sup_distance: f64,
    pub argmax_point: f64,
}

impl ComparisonReport {
    fn from_rows(rows: Vec<(f64, f64, f64)>) -> Self {
        let mut sup = 0.0;
        let mut argmax = rows.first().map_or(0.0, |r| r.0);
        for &(x, a, b) in &rows {
            let d = (a - b).abs();
            if d > sup {
                sup = d;
                argmax = x;
            }
        }
        let mut report = ComparisonReport {
            grid: Vec::with_capacity(rows.len()),
            cdf_a: Vec::with_capacity(rows.len()),
            cdf_b: Vec::with_capacity(rows.len()),
            sup_distance: sup,
            argmax_point: argmax,
        };
        for (x, a, b) in rows {
            report.grid.push(x);
            report.cdf_a.push(a);
            report.cdf_b.push(b);
        }
        report
    }
}

/// Mean and variance matched logistic for a dice distribution. Moments are
/// exact; only the final parameters are rounded to floats.
pub fn moment_match_logistic(d: &DiscreteDist) -> Result<LogisticParams, CompareError> {
    if d.support().len() < 2 {
        return Err(CompareError::Degenerate);
    }
    let (mean, var) = d.moments()?;
    LogisticParams::from_moments(ratio_f64(&mean), ratio_f64(&var))
}

/// Uniform with the logistic's mean and variance, as `(mean, halfwidth)`.
pub fn match_uniform_to_logistic(lp: LogisticParams) -> (f64, f64) {
    (lp.mean, (3.0 * lp.variance()).sqrt())
}

/// Normal with the logistic's mean and variance, as `(mean, sd)`.
pub fn match_normal_to_logistic(lp: LogisticParams) -> (f64, f64) {
    (lp.mean, lp.sd())
}

/// `(lo, hi, step)` for the default grid: mean ± 6 sd in
/// [`DEFAULT_GRID_POINTS`] points.
pub fn default_grid(mean: f64, sd: f64) -> (f64, f64, f64) {
    let half = 6.0 * sd;
    (mean - half, mean + half, 2.0 * half / (DEFAULT_GRID_POINTS - 1) as f64)
}

fn grid_points(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, CompareError> {
    if !(lo < hi && step > 0.0 && lo.is_finite() && hi.is_finite() && step.is_finite()) {
        return Err(CompareError::InvalidGrid { lo, hi, step });
    }
    // Tolerate rounding in (hi - lo) / step so that hi itself is included.
    let n = ((hi - lo) / step * (1.0 + 1e-12)).floor() as usize + 1;
    Ok((0..n).map(|i| lo + i as f64 * step).collect())
}

/// Sup-norm distance between two CDFs over `lo..=hi` in steps of `step`.
///
/// Jump points of either operand inside the range are evaluated at both
/// one-sided limits as well, so a step CDF's discontinuities are never
/// missed by the grid.
pub fn sup_distance(a: &dyn Cdf, b: &dyn Cdf, lo: f64, hi: f64, step: f64) -> Result<ComparisonReport, CompareError> {
    let mut rows: Vec<(f64, f64, f64)> = grid_points(lo, hi, step)?
        .into_iter()
        .map(|x| (x, a.cdf(x), b.cdf(x)))
        .collect();
    let mut jumps: Vec<f64> = a.jumps().into_iter().chain(b.jumps()).filter(|x| (lo..=hi).contains(x)).collect();
    jumps.sort_by(f64::total_cmp);
    jumps.dedup();
    for x in jumps {
        rows.push((x, a.left_limit(x), b.left_limit(x)));
        rows.push((x, a.cdf(x), b.cdf(x)));
    }
    rows.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(ComparisonReport::from_rows(rows))
}

/// Step CDF of `d` against its moment-matched logistic, compared at the
/// half-integer points `k + 0.5` (continuity correction) from one below the
/// smallest outcome to the largest. The logistic is evaluated at `k + 0.5`
/// and the step CDF gives `P(X <= k)` there.
pub fn discrete_vs_logistic(d: &DiscreteDist) -> Result<ComparisonReport, CompareError> {
    let lp = moment_match_logistic(d)?;
    let support = d.support();
    let (first, last) = (support[0], support[support.len() - 1]);
    let rows = (first - 1..=last)
        .map(|k| {
            let x = k as f64 + 0.5;
            (x, d.cdf(x), lp.cdf(x))
        })
        .collect();
    Ok(ComparisonReport::from_rows(rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Easy-vs-hard success under the linear model, with the two persons'
    /// threshold guides.
    Fig2,
    /// Logistic against the clamped-linear uniform model.
    Fig3,
    /// Logistic against the normal.
    Fig4,
    /// 3d6 step CDF against its moment-matched logistic.
    Fig5,
}

impl FromStr for Figure {
    type Err = CompareError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            "fig5" => Ok(Figure::Fig5),
            other => Err(CompareError::UnknownFigure(other.to_string())),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
        })
    }
}

/// A CSV table: a header row and pre-formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureTable {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl FigureTable {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Parses a numeric column back out; panics if the column is missing.
    pub fn column(&self, name: &str) -> Vec<f64> {
        let i = self.header.iter().position(|h| *h == name).expect("column");
        self.rows.iter().map(|r| r[i].parse().unwrap_or(f64::NAN)).collect()
    }
}

/// The logistic behind the modifier figures: a 50% base chance whose
/// variance matches the ±50 uniform.
pub fn figure_logistic() -> LogisticParams {
    let var = FIGURE_UNIFORM_HALFWIDTH * FIGURE_UNIFORM_HALFWIDTH / 3.0;
    LogisticParams::from_moments(0.0, var).expect("positive variance")
}

fn modifier_series(other: ContinuousCdf, name: &'static str) -> FigureTable {
    let lp = figure_logistic();
    let rows = (0..=400)
        .map(|i| {
            let m = -100.0 + 0.5 * i as f64;
            let (l, o) = (lp.cdf(m), other.cdf(m));
            vec![float12(m), float12(l), float12(o), float12((l - o).abs())]
        })
        .collect();
    FigureTable {
        header: vec!["modifier", "logistic", name, "abs_diff"],
        rows,
    }
}

/// CSV series for one figure.
///
/// Column layouts:
/// - fig2: `series,easy,hard` in percent. Series `linear` is the uniform
///   model's hard-task success against easy-task success; `person_a` and
///   `person_b` are the threshold guide polylines.
/// - fig3: `modifier,logistic,uniform,abs_diff`, probabilities in `[0, 1]`
///   for modifiers −100..=100 in steps of 0.5.
/// - fig4: `modifier,logistic,normal,abs_diff`, same grid.
/// - fig5: `outcome,dice_cdf,logistic_cdf,abs_diff` for outcomes 2..=18;
///   `dice_cdf` is `P(3d6 <= outcome)` and `logistic_cdf` is the matched
///   logistic evaluated at `outcome + 0.5`.
pub fn figure_data(which: Figure) -> Result<FigureTable, CompareError> {
    match which {
        Figure::Fig2 => {
            let mut rows: Vec<Vec<String>> = (0..=100)
                .map(|easy| {
                    let hard = (easy - 25).clamp(0, 100);
                    vec!["linear".into(), easy.to_string(), hard.to_string()]
                })
                .collect();
            for (name, easy, hard) in [("person_a", 75, 50), ("person_b", 50, 25)] {
                for (x, y) in [(easy, 0), (easy, hard), (0, hard)] {
                    rows.push(vec![name.into(), x.to_string(), y.to_string()]);
                }
            }
            Ok(FigureTable {
                header: vec!["series", "easy", "hard"],
                rows,
            })
        }
        Figure::Fig3 => {
            let (mean, halfwidth) = match_uniform_to_logistic(figure_logistic());
            Ok(modifier_series(ContinuousCdf::Uniform { mean, halfwidth }, "uniform"))
        }
        Figure::Fig4 => {
            let (mean, sd) = match_normal_to_logistic(figure_logistic());
            Ok(modifier_series(ContinuousCdf::Normal { mean, sd }, "normal"))
        }
        Figure::Fig5 => {
            let d = crate::dice::outcome_distribution(&Mechanic::SumRollOver {
                count: 3,
                sides: 6,
                modifier: 0,
                difficulty: 0,
            })?;
            let report = discrete_vs_logistic(&d)?;
            let rows = report
                .grid
                .iter()
                .zip(report.cdf_a.iter().zip(&report.cdf_b))
                .map(|(x, (a, b))| {
                    vec![
                        format!("{}", (x - 0.5) as i64),
                        float12(*a),
                        float12(*b),
                        float12((a - b).abs()),
                    ]
                })
                .collect();
            Ok(FigureTable {
                header: vec!["outcome", "dice_cdf", "logistic_cdf", "abs_diff"],
                rows,
            })
        }
    }
}
