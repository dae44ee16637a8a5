use serde::{Deserialize, Serialize};

use super::sure::{sure, RiskReport};
use crate::error::{Result, SbiteError};
use crate::fixed_point::{solve, FixedPointSolution, ProblemInstance, SolverOptions, UpdateRule};
use crate::thresholding::{default_smoothness, Hyperparameters};

pub const DEFAULT_NUS: [f64; 7] = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0];
pub const DEFAULT_LAMBDA_MIN: f64 = 1e-3;
pub const DEFAULT_LAMBDA_POINTS: usize = 50;
pub const DEFAULT_REFINE_POINTS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Sure,
    Gsure,
}

impl Criterion {
    pub fn pick(self, report: &RiskReport) -> f64 {
        match self {
            Criterion::Sure => report.sure,
            Criterion::Gsure => report.gsure,
        }
    }
}

impl std::str::FromStr for Criterion {
    type Err = SbiteError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sure" => Ok(Criterion::Sure),
            "gsure" => Ok(Criterion::Gsure),
            other => Err(SbiteError::Config(format!("unknown criterion '{other}' (expected sure or gsure)"))),
        }
    }
}

/// How the smoothness exponent is chosen on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothness {
    Fixed(f64),
    /// `s = 2 ln ν + 1`.
    FromNu,
}

impl Smoothness {
    pub fn at(self, nu: f64) -> f64 {
        match self {
            Smoothness::Fixed(s) => s,
            Smoothness::FromNu => default_smoothness(nu),
        }
    }
}

/// Grids of the two-stage search. Stage one scans `(λ, ν)` at `s = 1`;
/// stage two rescans `[λ̂/10, 10λ̂] × ν` with `s = 2 ln ν + 1`.
#[derive(Debug, Clone)]
pub struct SearchGrids {
    pub nus: Vec<f64>,
    pub lambda_min: f64,
    pub lambda_points: usize,
    /// Explicit stage-one λ grid, overriding `lambda_min`/`lambda_points`.
    pub lambdas: Option<Vec<f64>>,
    pub refine: bool,
    pub refine_points: usize,
}

impl Default for SearchGrids {
    fn default() -> Self {
        Self {
            nus: DEFAULT_NUS.to_vec(),
            lambda_min: DEFAULT_LAMBDA_MIN,
            lambda_points: DEFAULT_LAMBDA_POINTS,
            lambdas: None,
            refine: true,
            refine_points: DEFAULT_REFINE_POINTS,
        }
    }
}

impl SearchGrids {
    /// `ν = 1`, `s = 1`: the lasso path.
    pub fn lasso() -> Self {
        Self { nus: vec![1.0], refine: false, ..Self::default() }
    }

    /// Stage one only: `s = 1` over the full ν grid.
    pub fn unsmoothed() -> Self {
        Self { refine: false, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.nus.is_empty() || self.nus.iter().any(|&nu| !(nu >= 1.0) || !nu.is_finite()) {
            return Err(SbiteError::Config("ν grid must be nonempty with finite entries ≥ 1".into()));
        }
        if let Some(l) = &self.lambdas {
            if l.is_empty() || l.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                return Err(SbiteError::Config("λ grid must be nonempty with finite entries ≥ 0".into()));
            }
        } else if self.lambda_points == 0 || !(self.lambda_min > 0.0) {
            return Err(SbiteError::Config("λ grid needs at least one point and a positive lower end".into()));
        }
        if self.refine && self.refine_points == 0 {
            return Err(SbiteError::Config("refinement grid needs at least one point".into()));
        }
        Ok(())
    }
}

/// `n` log-spaced points on `[lo, hi]`; one point gives the geometric mean.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![(lo * hi).sqrt()],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
        }
    }
}

/// Minimizer of a grid evaluation.
#[derive(Debug, Clone)]
pub struct SearchOutcome<R> {
    pub hp: Hyperparameters,
    pub value: f64,
    pub result: R,
    /// Stage-one minimizer.
    pub stage_one: Hyperparameters,
    pub evaluated: usize,
    pub skipped: usize,
}

struct GridBest<R> {
    best: Option<(Hyperparameters, f64, R)>,
    evaluated: usize,
    skipped: usize,
}

/// Evaluates every point (concurrently) and keeps the smallest value; ties go
/// to the larger λ. `eval` returns `None` for points to skip.
fn grid_minimize<R, F>(points: &[Hyperparameters], eval: &F) -> GridBest<R>
where
    R: Send,
    F: Fn(&Hyperparameters) -> Option<(f64, R)> + Sync,
{
    let results: Vec<Option<(f64, R)>> = crate::par::map_slice(points, eval);
    let mut out = GridBest { best: None, evaluated: 0, skipped: 0 };
    for (hp, res) in points.iter().zip(results) {
        match res {
            Some((v, r)) if !v.is_nan() => {
                out.evaluated += 1;
                let better = match &out.best {
                    None => true,
                    Some((bh, bv, _)) => v < *bv || (v == *bv && hp.lambda > bh.lambda),
                };
                if better {
                    out.best = Some((*hp, v, r));
                }
            }
            _ => out.skipped += 1,
        }
    }
    out
}

/// Two-stage search of a criterion over `(λ, ν, s)`.
///
/// `lambda_max(ν)` bounds the automatic stage-one λ grid; `eval` maps a grid
/// point to the criterion and any by-product worth keeping.
pub fn two_stage_search<R, L, F>(grids: &SearchGrids, lambda_max: L, eval: F) -> Result<SearchOutcome<R>>
where
    R: Send,
    L: Fn(f64) -> f64,
    F: Fn(&Hyperparameters) -> Option<(f64, R)> + Sync,
{
    grids.validate()?;
    let mut stage1 = Vec::new();
    for &nu in &grids.nus {
        let lambdas = match &grids.lambdas {
            Some(l) => l.clone(),
            None => {
                let hi = lambda_max(nu).max(10.0 * grids.lambda_min);
                log_grid(grids.lambda_min, hi, grids.lambda_points)
            }
        };
        for lambda in lambdas {
            stage1.push(Hyperparameters::new(lambda, nu, 1.0)?);
        }
    }
    let first = grid_minimize(&stage1, &eval);
    let Some((hp1, v1, r1)) = first.best else {
        return Err(SbiteError::Domain(format!(
            "no stage-one grid point could be evaluated ({} skipped)",
            first.skipped
        )));
    };
    if first.skipped > 0 {
        log::info!("stage one skipped {} of {} grid points", first.skipped, stage1.len());
    }
    if !grids.refine {
        return Ok(SearchOutcome {
            hp: hp1,
            value: v1,
            result: r1,
            stage_one: hp1,
            evaluated: first.evaluated,
            skipped: first.skipped,
        });
    }

    let centre = if hp1.lambda > 0.0 { hp1.lambda } else { grids.lambda_min };
    let lambdas = log_grid(centre / 10.0, centre * 10.0, grids.refine_points);
    let mut stage2 = Vec::new();
    for &nu in &grids.nus {
        for &lambda in &lambdas {
            stage2.push(Hyperparameters::with_default_smoothness(lambda, nu)?);
        }
    }
    let second = grid_minimize(&stage2, &eval);
    let total_eval = first.evaluated + second.evaluated;
    let total_skip = first.skipped + second.skipped;
    if second.skipped > 0 {
        log::info!("stage two skipped {} of {} grid points", second.skipped, stage2.len());
    }
    match second.best {
        Some((hp, value, result)) => {
            Ok(SearchOutcome { hp, value, result, stage_one: hp1, evaluated: total_eval, skipped: total_skip })
        }
        None => {
            Err(SbiteError::Domain(format!("no stage-two grid point could be evaluated ({} skipped)", second.skipped)))
        }
    }
}

/// Smallest λ for which zero is the fixed point at exponent ν.
pub fn lambda_max(inst: &ProblemInstance, nu: f64) -> f64 {
    let part = inst.partition();
    let peak = (0..part.num_blocks())
        .map(|j| inst.pilot_weight(j, nu) * inst.xty().rows_range(part.range(j)).norm())
        .fold(0.0, f64::max);
    peak.powf(1.0 / nu)
}

/// A fit at one grid point.
#[derive(Debug, Clone)]
pub struct RegressionFit {
    pub solution: FixedPointSolution,
    pub report: RiskReport,
}

/// Solves and scores a single grid point; `None` (with a log line) when the
/// solver does not converge or the gradient system is singular.
pub fn evaluate_point(
    inst: &ProblemInstance,
    hp: &Hyperparameters,
    rule: UpdateRule,
    opts: &SolverOptions,
) -> Option<RegressionFit> {
    let solution = match solve(inst, hp, opts, rule) {
        Ok(s) if s.converged => s,
        Ok(s) => {
            log::debug!("skipping λ={} ν={} s={}: not converged after {} cycles", hp.lambda, hp.nu, hp.s, s.iterations);
            return None;
        }
        Err(e) => {
            log::debug!("skipping λ={} ν={} s={}: {e}", hp.lambda, hp.nu, hp.s);
            return None;
        }
    };
    match sure(inst, &solution, hp) {
        Ok(report) => Some(RegressionFit { solution, report }),
        Err(e) => {
            log::debug!("skipping λ={} ν={} s={}: {e}", hp.lambda, hp.nu, hp.s);
            None
        }
    }
}

/// Two-stage SURE/GSURE selection for a regression instance.
pub fn search_hyperparameters(
    inst: &ProblemInstance,
    criterion: Criterion,
    grids: &SearchGrids,
) -> Result<SearchOutcome<RegressionFit>> {
    search_hyperparameters_with(inst, criterion, grids, UpdateRule::Sbite, &SolverOptions::default())
}

pub fn search_hyperparameters_with(
    inst: &ProblemInstance,
    criterion: Criterion,
    grids: &SearchGrids,
    rule: UpdateRule,
    opts: &SolverOptions,
) -> Result<SearchOutcome<RegressionFit>> {
    two_stage_search(
        grids,
        |nu| lambda_max(inst, nu),
        |hp| evaluate_point(inst, hp, rule, opts).map(|fit| (criterion.pick(&fit.report), fit)),
    )
}

/// One cell of a criterion surface.
#[derive(Debug, Clone, Serialize)]
pub struct SurfacePoint {
    pub hp: Hyperparameters,
    pub report: Option<RiskReport>,
}

/// Risk reports over `lambdas × nus`, row-major in ν.
pub fn criterion_surface(
    inst: &ProblemInstance,
    lambdas: &[f64],
    nus: &[f64],
    smoothness: Smoothness,
    rule: UpdateRule,
    opts: &SolverOptions,
) -> Result<Vec<SurfacePoint>> {
    let mut points = Vec::with_capacity(lambdas.len() * nus.len());
    for &nu in nus {
        for &lambda in lambdas {
            points.push(Hyperparameters::new(lambda, nu, smoothness.at(nu))?);
        }
    }
    Ok(crate::par::map_slice(&points, |hp| SurfacePoint {
        hp: *hp,
        report: evaluate_point(inst, hp, rule, opts).map(|f| f.report),
    }))
}
