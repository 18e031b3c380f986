//! Root finding for the gap conditions `K_i(λ) = 0`.
//!
//! Newton directions come from the analytic Jacobian; globalization is a
//! Powell dogleg trust region on `½‖K‖²`. Steps are shortened so that every
//! iterate keeps each `λ_m` inside `[−1 + clamp, 1 − clamp]`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{BandSystem, GapOrigin, IfsSystem};
use crate::kernel::{self, GapVariables, KernelEvaluator};
use crate::quadrature::{QuadratureRule, DEFAULT_ORDER};

/// Extra node counts tried when a quadrature node lands on a root.
const MAX_ORDER_BUMPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub residual_tol: f64,
    pub max_iterations: usize,
    pub step_clamp: f64,
    pub quadrature_order: usize,
    #[serde(default)]
    pub evaluator: KernelEvaluator,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-12,
            max_iterations: 200,
            step_clamp: 1e-9,
            quadrature_order: DEFAULT_ORDER,
            evaluator: KernelEvaluator::Grouped,
        }
    }
}

impl SolverConfig {
    pub fn with_order(mut self, order: usize) -> Self {
        self.quadrature_order = order;
        self
    }

    pub fn with_evaluator(mut self, evaluator: KernelEvaluator) -> Self {
        self.evaluator = evaluator;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0) {
            return Err(Error::InvalidSolverConfig(format!(
                "residual_tol must be positive, got {}",
                self.residual_tol
            )));
        }
        if !(self.step_clamp > 0.0 && self.step_clamp < 1.0) {
            return Err(Error::InvalidSolverConfig(format!(
                "step_clamp must lie in (0, 1), got {}",
                self.step_clamp
            )));
        }
        if self.quadrature_order == 0 {
            return Err(Error::InvalidSolverConfig("quadrature_order must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidSolverConfig("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

/// Converged state of one generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    pub generation: usize,
    pub bands: BandSystem,
    pub vars: GapVariables,
    /// `|K_i|` at the start of the solve.
    pub initial_residuals: Vec<f64>,
    /// `|K_i|` at `vars`.
    pub residuals: Vec<f64>,
    pub iterations_used: usize,
    /// Node count actually used (the configured one unless a collision forced
    /// a bump).
    pub quadrature_order: usize,
    /// Harmonic frequencies `ω_i`, one per band.
    pub omegas: Vec<f64>,
    /// Integrated measures `Ω_m = Σ_{i≤m} ω_i`.
    pub cumulative: Vec<f64>,
}

impl EquilibriumSolution {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a: f64, &r| a.max(r))
    }

    pub fn total_mass(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn rule(&self) -> QuadratureRule {
        QuadratureRule::chebyshev(self.quadrature_order).expect("positive order")
    }
}

/// Best iterate when the solver gives up.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverFailure {
    pub generation: usize,
    pub lambdas: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl SolverFailure {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a: f64, &r| a.max(r.abs()))
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a: f64, &r| a.max(r.abs()))
}

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|r| r * r).sum()
}

struct Problem<'a> {
    bands: &'a BandSystem,
    rule: QuadratureRule,
    evaluator: KernelEvaluator,
    bumps: usize,
}

impl Problem<'_> {
    /// Retries with one more node whenever a node collides with a root.
    fn retry<T>(&mut self, mut eval: impl FnMut(&Self) -> Result<T>) -> Result<T> {
        loop {
            match eval(self) {
                Err(Error::ExactNodeCollision { .. }) if self.bumps < MAX_ORDER_BUMPS => {
                    self.bumps += 1;
                    self.rule = QuadratureRule::chebyshev(self.rule.order() + 1)?;
                }
                other => return other,
            }
        }
    }

    fn linearize(&mut self, lambdas: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let vars = GapVariables::from_raw(lambdas.to_vec());
        let (f, rows) = self.retry(|p| kernel::residuals_and_jacobian(p.bands, &vars, &p.rule, p.evaluator))?;
        let n = f.len();
        let jac = DMatrix::from_fn(n, n, |i, m| rows[i][m]);
        Ok((f, jac))
    }
}

/// Powell dogleg step inside a ball of radius `radius`.
fn dogleg(newton: &DVector<f64>, jac: &DMatrix<f64>, f: &DVector<f64>, radius: f64) -> DVector<f64> {
    if newton.norm() <= radius {
        return newton.clone();
    }
    let grad = jac.transpose() * f;
    let g_norm = grad.norm();
    if g_norm == 0.0 {
        return newton * (radius / newton.norm());
    }
    let jg = jac * &grad;
    let t = g_norm * g_norm / jg.norm_squared();
    let cauchy = &grad * (-t);
    let c_norm = cauchy.norm();
    if c_norm >= radius {
        return &grad * (-radius / g_norm);
    }
    // |cauchy + τ d| = radius, τ ∈ [0, 1]
    let d = newton - &cauchy;
    let a = d.norm_squared();
    let b = 2.0 * cauchy.dot(&d);
    let c = c_norm * c_norm - radius * radius;
    let tau = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
    cauchy + d * tau
}

/// Solves `K_i(λ) = 0` for all gaps of `bands`, starting at `initial`.
pub fn solve_generation(bands: &BandSystem, initial: &GapVariables, cfg: &SolverConfig) -> Result<EquilibriumSolution> {
    cfg.validate()?;
    if initial.len() != bands.gap_count() {
        return Err(Error::VariableCount {
            expected: bands.gap_count(),
            got: initial.len(),
        });
    }
    let generation = bands.generation();
    let lower = -1.0 + cfg.step_clamp;
    let upper = 1.0 - cfg.step_clamp;
    let mut problem = Problem {
        bands,
        rule: QuadratureRule::chebyshev(cfg.quadrature_order)?,
        evaluator: cfg.evaluator,
        bumps: 0,
    };

    let mut x: Vec<f64> = initial.lambdas().iter().map(|l| l.clamp(lower, upper)).collect();
    let mut iterations = 0;
    let initial_residuals: Vec<f64>;
    let mut final_residuals = Vec::new();
    if x.is_empty() {
        initial_residuals = Vec::new();
    } else {
        let (mut f, mut jac) = problem.linearize(&x)?;
        initial_residuals = f.iter().map(|r| r.abs()).collect();
        let mut radius = 1.0;
        let fail = |x: &[f64], f: &[f64], iterations| {
            Box::new(SolverFailure {
                generation,
                lambdas: x.to_vec(),
                residuals: f.iter().map(|r| r.abs()).collect(),
                iterations,
            })
        };
        while inf_norm(&f) > cfg.residual_tol {
            if iterations >= cfg.max_iterations {
                return Err(Error::NoConvergence(fail(&x, &f, iterations)));
            }
            iterations += 1;
            let fv = DVector::from_column_slice(&f);
            let Some(newton) = jac.clone().lu().solve(&(-&fv)) else {
                return Err(Error::SingularJacobian(fail(&x, &f, iterations)));
            };
            if !newton.iter().all(|v| v.is_finite()) {
                return Err(Error::SingularJacobian(fail(&x, &f, iterations)));
            }

            let mut step = dogleg(&newton, &jac, &fv, radius);
            let mut scale: f64 = 1.0;
            for (xi, si) in x.iter().zip(step.iter()) {
                let target = xi + si;
                if target > upper {
                    scale = scale.min((upper - xi) / si);
                } else if target < lower {
                    scale = scale.min((lower - xi) / si);
                }
            }
            step *= scale.max(0.0);
            let trial: Vec<f64> = x
                .iter()
                .zip(step.iter())
                .map(|(xi, si)| (xi + si).clamp(lower, upper))
                .collect();
            let (f_trial, jac_trial) = problem.linearize(&trial)?;

            let current = sq_norm(&f);
            let linear = (&fv + &jac * &step).norm_squared();
            let predicted = current - linear;
            let actual = current - sq_norm(&f_trial);
            let ratio = if predicted > 0.0 { actual / predicted } else { -1.0 };
            let step_norm = step.norm();

            if ratio < 0.25 {
                radius = 0.5 * step_norm.max(radius * 0.25);
            } else if ratio > 0.75 {
                radius = radius.max(2.0 * step_norm);
            }
            if ratio > 1e-4 || inf_norm(&f_trial) < inf_norm(&f) {
                x = trial;
                f = f_trial;
                jac = jac_trial;
            } else if radius < 1e-15 {
                return Err(Error::NoConvergence(fail(&x, &f, iterations)));
            }
        }
        final_residuals = f;
    }

    let vars = GapVariables::from_raw(x);
    let residuals: Vec<f64> = final_residuals.iter().map(|r| r.abs()).collect();
    let omegas = kernel::harmonic_frequencies(bands, &vars, &problem.rule)?;
    let cumulative = omegas
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    Ok(EquilibriumSolution {
        generation,
        bands: bands.clone(),
        vars,
        initial_residuals,
        residuals,
        iterations_used: iterations,
        quadrature_order: problem.rule.order(),
        omegas,
        cumulative,
    })
}

/// Initial roots for `bands` from the previous generation: gaps that already
/// existed keep their `λ`, new gaps start at their midpoint.
pub fn warm_start(bands: &BandSystem, previous: &GapVariables) -> GapVariables {
    let lambdas = bands
        .genealogy()
        .iter()
        .map(|origin| match *origin {
            GapOrigin::Old(parent) => previous.lambdas()[parent],
            GapOrigin::New => 0.0,
        })
        .collect();
    GapVariables::from_raw(lambdas)
}

/// Solves generations `1..=n_max`, each warm-started from the one before.
pub fn hierarchical_solve(ifs: &IfsSystem, n_max: usize, cfg: &SolverConfig) -> Result<Vec<EquilibriumSolution>> {
    let mut out: Vec<EquilibriumSolution> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let bands = ifs.generate_bands(n)?;
        let initial = match out.last() {
            Some(prev) => warm_start(&bands, &prev.vars),
            None => GapVariables::zeros(&bands),
        };
        out.push(solve_generation(&bands, &initial, cfg)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{AffineMap, Interval};

    #[test]
    fn symmetric_two_band_is_already_solved() {
        let bands = IfsSystem::ternary_cantor().generate_bands(1).unwrap();
        let sol = solve_generation(&bands, &GapVariables::zeros(&bands), &SolverConfig::default()).unwrap();
        assert!(sol.iterations_used <= 1);
        assert!(sol.vars.lambdas()[0].abs() < 1e-14);
        assert!((sol.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_interval_needs_no_iterations() {
        let bands = BandSystem::from_intervals(vec![Interval { lo: -1.0, hi: 1.0 }]).unwrap();
        let sol = solve_generation(&bands, &GapVariables::zeros(&bands), &SolverConfig::default()).unwrap();
        assert_eq!(sol.iterations_used, 0);
        assert_eq!(sol.omegas, vec![1.0]);
    }

    #[test]
    fn asymmetric_two_band_converges_from_off_center() {
        let ifs = IfsSystem::new(vec![AffineMap::new(0.8, -1.0), AffineMap::new(0.1, 1.0)]).unwrap();
        let bands = ifs.generate_bands(1).unwrap();
        let start = GapVariables::new(vec![0.9], &bands).unwrap();
        let sol = solve_generation(&bands, &start, &SolverConfig::default().with_order(512)).unwrap();
        assert!(sol.max_residual() < 1e-12);
    }

    #[test]
    fn rejects_bad_config() {
        let bands = IfsSystem::ternary_cantor().generate_bands(1).unwrap();
        let cfg = SolverConfig {
            step_clamp: 1.5,
            ..SolverConfig::default()
        };
        assert!(matches!(
            solve_generation(&bands, &GapVariables::zeros(&bands), &cfg),
            Err(Error::InvalidSolverConfig(_))
        ));
    }

    #[test]
    fn iteration_cap_reports_best_iterate() {
        let bands = IfsSystem::ternary_cantor().generate_bands(3).unwrap();
        let cfg = SolverConfig {
            max_iterations: 1,
            residual_tol: 1e-300,
            ..SolverConfig::default().with_order(64)
        };
        match solve_generation(&bands, &GapVariables::zeros(&bands), &cfg) {
            Err(Error::NoConvergence(f)) => {
                assert_eq!(f.generation, 3);
                assert_eq!(f.lambdas.len(), 7);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }
}
