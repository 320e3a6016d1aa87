//! Joint penalized maximum-likelihood estimation of Rasch abilities and
//! difficulties from success/failure records.
//!
//! The objective is the Bernoulli log-likelihood under
//! `P(success) = sigmoid(r * (ability - difficulty))` minus a ridge penalty
//! `ridge / 2 * sum(param^2)`. Slopes are known inputs, never estimated, so
//! the objective stays concave and damped Newton with step-halving converges
//! from the all-zero start. After convergence the difficulties are shifted to
//! mean zero and the same shift is applied to the abilities; only the
//! differences `ability - difficulty` are identified by the data.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::logistic::{sigmoid_f64, Model4PL};
use crate::resolve::resolve_model;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error("no outcome records")]
    Empty,
    #[error("record has an empty {0} identifier")]
    EmptyIdentifier(&'static str),
    #[error("no parameter for {kind} {id:?}")]
    MissingParameter { kind: &'static str, id: String },
    #[error("no slope for task {0:?}")]
    MissingSlope(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct OutcomeRecord {
    pub person: String,
    pub task: String,
    pub success: bool,
}

impl OutcomeRecord {
    pub fn new(person: impl Into<String>, task: impl Into<String>, success: bool) -> Result<Self, EstimateError> {
        let r = Self {
            person: person.into(),
            task: task.into(),
            success,
        };
        r.validate()?;
        Ok(r)
    }

    fn validate(&self) -> Result<(), EstimateError> {
        if self.person.is_empty() {
            return Err(EstimateError::EmptyIdentifier("person"));
        }
        if self.task.is_empty() {
            return Err(EstimateError::EmptyIdentifier("task"));
        }
        Ok(())
    }
}

/// Discrimination used for every record: one global value or one per task.
#[derive(Debug, Clone, PartialEq)]
pub enum Slope {
    Global(f64),
    PerTask(BTreeMap<String, f64>),
}

impl Default for Slope {
    fn default() -> Self {
        Slope::Global(1.0)
    }
}

impl Slope {
    fn for_task(&self, task: &str) -> Result<f64, EstimateError> {
        match self {
            Slope::Global(r) => Ok(*r),
            Slope::PerTask(map) => map
                .get(task)
                .copied()
                .ok_or_else(|| EstimateError::MissingSlope(task.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub ridge: f64,
    pub slope: Slope,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            gradient_tolerance: 1e-8,
            ridge: 0.01,
            slope: Slope::default(),
        }
    }
}

impl FitConfig {
    fn validate(&self) -> Result<(), EstimateError> {
        if self.max_iterations == 0 {
            return Err(EstimateError::InvalidConfig("max_iterations must be positive"));
        }
        if self.gradient_tolerance.is_nan() || self.gradient_tolerance <= 0.0 {
            return Err(EstimateError::InvalidConfig("gradient_tolerance must be positive"));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(EstimateError::InvalidConfig("ridge must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub abilities: BTreeMap<String, f64>,
    pub difficulties: BTreeMap<String, f64>,
    /// Penalized log-likelihood at the reported (re-centered) estimates.
    pub log_likelihood: f64,
    /// True iff the gradient max-norm fell below tolerance. Forced false
    /// when the ridge is zero and some person or task is extreme, since the
    /// unpenalized estimate for it does not exist.
    pub converged: bool,
    pub iterations: usize,
    /// Persons and tasks whose records are all successes or all failures.
    pub extreme: BTreeSet<String>,
    /// Connected components of the person–task graph. Above one, estimates
    /// are only comparable within a component.
    pub components: usize,
    /// Penalized objective after each accepted step, starting at the origin.
    #[serde(skip)]
    pub objective_trace: Vec<f64>,
}

impl FitResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("FitResult serializes")
    }
}

/// Analytic gradient of the penalized objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub abilities: BTreeMap<String, f64>,
    pub difficulties: BTreeMap<String, f64>,
}

struct Obs {
    person: usize,
    task: usize,
    y: f64,
    slope: f64,
}

/// Records indexed by position. Persons and tasks are numbered in sorted
/// identifier order and observations sorted, so every sum is evaluated in
/// the same order however the input was arranged.
struct Problem {
    persons: Vec<String>,
    tasks: Vec<String>,
    obs: Vec<Obs>,
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

impl Problem {
    fn new(records: &[OutcomeRecord], slope: &Slope) -> Result<Self, EstimateError> {
        if records.is_empty() {
            return Err(EstimateError::Empty);
        }
        for r in records {
            r.validate()?;
        }
        let persons: Vec<String> = records
            .iter()
            .map(|r| r.person.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let tasks: Vec<String> = records
            .iter()
            .map(|r| r.task.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut obs = Vec::with_capacity(records.len());
        for r in records {
            obs.push(Obs {
                person: persons.binary_search(&r.person).unwrap(),
                task: tasks.binary_search(&r.task).unwrap(),
                y: if r.success { 1.0 } else { 0.0 },
                slope: slope.for_task(&r.task)?,
            });
        }
        obs.sort_by_key(|o| (o.person, o.task, o.y as u8));
        Ok(Self { persons, tasks, obs })
    }

    fn dim(&self) -> usize {
        self.persons.len() + self.tasks.len()
    }

    fn task_index(&self, t: usize) -> usize {
        self.persons.len() + t
    }

    fn params_from_maps(
        &self,
        abilities: &BTreeMap<String, f64>,
        difficulties: &BTreeMap<String, f64>,
    ) -> Result<DVector<f64>, EstimateError> {
        let mut x = DVector::zeros(self.dim());
        for (i, p) in self.persons.iter().enumerate() {
            x[i] = *abilities.get(p).ok_or_else(|| EstimateError::MissingParameter {
                kind: "person",
                id: p.clone(),
            })?;
        }
        for (j, t) in self.tasks.iter().enumerate() {
            x[self.task_index(j)] = *difficulties.get(t).ok_or_else(|| EstimateError::MissingParameter {
                kind: "task",
                id: t.clone(),
            })?;
        }
        Ok(x)
    }

    fn split(&self, x: &DVector<f64>) -> (BTreeMap<String, f64>, BTreeMap<String, f64>) {
        let a = self.persons.iter().enumerate().map(|(i, p)| (p.clone(), x[i])).collect();
        let d = self
            .tasks
            .iter()
            .enumerate()
            .map(|(j, t)| (t.clone(), x[self.task_index(j)]))
            .collect();
        (a, d)
    }

    fn logit(&self, o: &Obs, x: &DVector<f64>) -> f64 {
        o.slope * (x[o.person] - x[self.task_index(o.task)])
    }

    fn objective(&self, x: &DVector<f64>, ridge: f64) -> f64 {
        let ll: f64 = self
            .obs
            .iter()
            .map(|o| {
                let z = self.logit(o, x);
                // y ln s(z) + (1-y) ln(1 - s(z)) without forming s(z).
                -(o.y * softplus(-z) + (1.0 - o.y) * softplus(z))
            })
            .sum();
        ll - 0.5 * ridge * x.norm_squared()
    }

    fn gradient(&self, x: &DVector<f64>, ridge: f64) -> DVector<f64> {
        let mut g = -ridge * x;
        for o in &self.obs {
            let resid = o.slope * (o.y - sigmoid_f64(self.logit(o, x)));
            g[o.person] += resid;
            g[self.task_index(o.task)] -= resid;
        }
        g
    }

    /// Negative Hessian of the objective (positive semi-definite).
    fn information(&self, x: &DVector<f64>, ridge: f64) -> DMatrix<f64> {
        let n = self.dim();
        let mut h = DMatrix::from_diagonal_element(n, n, ridge);
        for o in &self.obs {
            let p = sigmoid_f64(self.logit(o, x));
            let w = o.slope * o.slope * p * (1.0 - p);
            let (i, j) = (o.person, self.task_index(o.task));
            h[(i, i)] += w;
            h[(j, j)] += w;
            h[(i, j)] -= w;
            h[(j, i)] -= w;
        }
        h
    }

    fn components(&self) -> usize {
        let n = self.dim();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for o in &self.obs {
            let a = find(&mut parent, o.person);
            let b = find(&mut parent, self.task_index(o.task));
            if a != b {
                parent[a] = b;
            }
        }
        (0..n).filter(|&i| find(&mut parent, i) == i).count()
    }

    fn extremes(&self) -> BTreeSet<String> {
        let mut person = vec![(0usize, 0usize); self.persons.len()];
        let mut task = vec![(0usize, 0usize); self.tasks.len()];
        for o in &self.obs {
            let s = o.y as usize;
            person[o.person].0 += s;
            person[o.person].1 += 1;
            task[o.task].0 += s;
            task[o.task].1 += 1;
        }
        let is_extreme = |(s, n): (usize, usize)| s == 0 || s == n;
        let mut out = BTreeSet::new();
        for (i, c) in person.into_iter().enumerate() {
            if is_extreme(c) {
                out.insert(self.persons[i].clone());
            }
        }
        for (j, c) in task.into_iter().enumerate() {
            if is_extreme(c) {
                out.insert(self.tasks[j].clone());
            }
        }
        out
    }
}

/// Penalized log-likelihood
/// `sum(y ln p + (1-y) ln(1-p)) - ridge/2 * sum(param^2)` over the persons
/// and tasks that appear in `records`.
pub fn log_likelihood(
    records: &[OutcomeRecord],
    abilities: &BTreeMap<String, f64>,
    difficulties: &BTreeMap<String, f64>,
    slope: &Slope,
    ridge: f64,
) -> Result<f64, EstimateError> {
    let problem = Problem::new(records, slope)?;
    let x = problem.params_from_maps(abilities, difficulties)?;
    Ok(problem.objective(&x, ridge))
}

/// Analytic gradient of [`log_likelihood`].
pub fn gradient(
    records: &[OutcomeRecord],
    abilities: &BTreeMap<String, f64>,
    difficulties: &BTreeMap<String, f64>,
    slope: &Slope,
    ridge: f64,
) -> Result<Gradient, EstimateError> {
    let problem = Problem::new(records, slope)?;
    let x = problem.params_from_maps(abilities, difficulties)?;
    let (abilities, difficulties) = problem.split(&problem.gradient(&x, ridge));
    Ok(Gradient {
        abilities,
        difficulties,
    })
}

fn max_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Newton direction `info^-1 * grad`. A singular information matrix (zero
/// ridge leaves the common shift unidentified) gets a small Levenberg
/// damping term; if even that fails, fall back to diagonally scaled
/// gradient ascent.
fn ascent_direction(info: DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    if let Some(ch) = info.clone().cholesky() {
        return ch.solve(g);
    }
    let scale = info.diagonal().iter().fold(0.0f64, |m, x| m.max(*x)).max(1.0);
    let n = info.nrows();
    let damped = info + DMatrix::from_diagonal_element(n, n, 1e-10 * scale);
    if let Some(ch) = damped.cholesky() {
        return ch.solve(g);
    }
    g / scale
}

/// Fits abilities and difficulties by damped Newton iteration.
pub fn fit(records: &[OutcomeRecord], config: &FitConfig) -> Result<FitResult, EstimateError> {
    config.validate()?;
    let problem = Problem::new(records, &config.slope)?;
    let ridge = config.ridge;

    let mut x = DVector::zeros(problem.dim());
    let mut value = problem.objective(&x, ridge);
    let mut trace = vec![value];
    let mut iterations = 0;
    let mut converged = false;

    loop {
        let g = problem.gradient(&x, ridge);
        if max_norm(&g) < config.gradient_tolerance {
            converged = true;
            break;
        }
        if iterations == config.max_iterations {
            break;
        }
        let direction = ascent_direction(problem.information(&x, ridge), &g);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let candidate = &x + step * &direction;
            let v = problem.objective(&candidate, ridge);
            if v >= value {
                accepted = Some((candidate, v));
                break;
            }
            step *= 0.5;
        }
        let Some((next, v)) = accepted else {
            // No ascent left at machine precision.
            break;
        };
        x = next;
        value = v;
        trace.push(v);
        iterations += 1;
    }

    let extreme = problem.extremes();
    if ridge == 0.0 && !extreme.is_empty() {
        converged = false;
    }

    let n_persons = problem.persons.len();
    let shift = x.rows(n_persons, problem.tasks.len()).mean();
    x.add_scalar_mut(-shift);

    let (abilities, difficulties) = problem.split(&x);
    Ok(FitResult {
        abilities,
        difficulties,
        log_likelihood: problem.objective(&x, ridge),
        converged,
        iterations,
        extreme,
        components: problem.components(),
        objective_trace: trace,
    })
}

/// Reads an outcome log with header `person,task,success` and success
/// coded `0` or `1`.
pub fn read_outcomes<R: Read>(reader: R) -> Result<Vec<OutcomeRecord>, EstimateError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| EstimateError::Csv {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().collect::<Vec<_>>() != ["person", "task", "success"] {
        return Err(EstimateError::Csv {
            line: 1,
            message: format!("expected header person,task,success, found {}", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| EstimateError::Csv {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let bad = |message: String| EstimateError::Csv { line, message };
        let success = match &row[2] {
            "0" => false,
            "1" => true,
            other => return Err(bad(format!("success must be 0 or 1, got {other:?}"))),
        };
        let rec = OutcomeRecord::new(&row[0], &row[1], success).map_err(|e| bad(e.to_string()))?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_outcomes<W: Write>(records: &[OutcomeRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "person,task,success")?;
    for r in records {
        writeln!(out, "{},{},{}", r.person, r.task, u8::from(r.success))?;
    }
    Ok(())
}

/// A synthetic Rasch data set with known logits.
#[derive(Debug, Clone)]
pub struct SyntheticRasch {
    pub abilities: BTreeMap<String, f64>,
    pub difficulties: BTreeMap<String, f64>,
    pub records: Vec<OutcomeRecord>,
}

impl SyntheticRasch {
    /// Every person attempts every task once. True logits are drawn
    /// uniformly from `[-spread, spread]`; outcomes are resolved through the
    /// 1PL sampler.
    pub fn generate<R: Rng + ?Sized>(n_persons: usize, n_tasks: usize, spread: f64, rng: &mut R) -> Self {
        let abilities: BTreeMap<String, f64> = (0..n_persons)
            .map(|i| (format!("p{i:04}"), rng.random_range(-spread..=spread)))
            .collect();
        let difficulties: BTreeMap<String, f64> = (0..n_tasks)
            .map(|j| (format!("t{j:04}"), rng.random_range(-spread..=spread)))
            .collect();
        Self::from_truth(abilities, difficulties, rng)
    }

    pub fn from_truth<R: Rng + ?Sized>(
        abilities: BTreeMap<String, f64>,
        difficulties: BTreeMap<String, f64>,
        rng: &mut R,
    ) -> Self {
        let mut records = Vec::with_capacity(abilities.len() * difficulties.len());
        for (p, a) in &abilities {
            for (t, d) in &difficulties {
                let model = Model4PL::rasch(*a, *d).expect("finite logits");
                records.push(OutcomeRecord {
                    person: p.clone(),
                    task: t.clone(),
                    success: resolve_model(&model, rng).success,
                });
            }
        }
        Self {
            abilities,
            difficulties,
            records,
        }
    }
}
