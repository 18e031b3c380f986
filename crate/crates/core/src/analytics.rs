//! Quantities derived from a converged equilibrium measure: the integrated
//! measure `Ω(x)`, the logarithmic potential `V(σ; z)`, capacities and their
//! extrapolation to the attractor.
//!
//! On band `i`, in local coordinates `t = ψ_i(s)`, the measure reads
//! `h_i(t) dt / (π√(1 − t²))` with `h_i = |Z̄|/√|Ỹ|` smooth on `[-1, 1]`. The
//! potential of one band is computed by product integration: `h_i` is
//! expanded in Chebyshev polynomials from its values at the Chebyshev nodes,
//! and each `T_j` is integrated against `log|z − t|` in closed form,
//!
//! ```text
//! ∫ log|z − t| T_j(t) dt/(π√(1−t²)) = log|w/2|           (j = 0)
//!                                    = −Re(w^{−j}) / j    (j ≥ 1)
//! ```
//!
//! with `w = z + √(z−1)√(z+1)`, `|w| ≥ 1`. This removes the logarithmic
//! singularity when `z` sits on a band. The plain node sum is kept as
//! [`PotentialMethod::NodeSum`].

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{BandSystem, UnitMap};
use crate::kernel::{self, Frame, LocalView};
use crate::quadrature::QuadratureRule;
use crate::solver::EquilibriumSolution;

/// Legendre order for partial band integrals in `θ`.
pub const PARTIAL_BAND_ORDER: usize = 64;

/// Distance to a node, relative to the band width, that counts as a hit.
pub const NODE_HIT_TOLERANCE: f64 = 1e-12;

/// Maximal share of sample points that may be dropped from a mean.
pub const MAX_EXCLUDED_FRACTION: f64 = 1e-3;

/// Integrated measure `Ω(x) = σ([γ_1, x])`.
///
/// On a gap the value is the plateau `Ω_m`; inside band `i` it adds the
/// partial band integral, computed in `θ` with `t = cos θ` so the endpoint
/// singularity disappears.
pub fn integrated_measure_at(x: f64, solution: &EquilibriumSolution) -> Result<f64> {
    let bands = &solution.bands;
    let hull = bands.hull();
    if !(hull.lo <= x && x <= hull.hi) {
        return Err(Error::OutOfHull(x));
    }
    let i = bands.bands().partition_point(|b| b.hi < x);
    let before = if i == 0 { 0.0 } else { solution.cumulative[i - 1] };
    let band = bands.bands()[i];
    if x <= band.lo {
        return Ok(before);
    }
    if x >= band.hi {
        return Ok(solution.cumulative[i]);
    }
    let view = LocalView::new(bands, &solution.vars, Frame::Band(i));
    let t = view.unit_map().forward(x).clamp(-1.0, 1.0);
    let rule = GaussLegendre::new(NonZeroUsize::new(PARTIAL_BAND_ORDER).unwrap());
    let mut err = None;
    let partial = rule.integrate(t.acos(), std::f64::consts::PI, |theta| {
        match view.log_space_value(theta.cos()) {
            Ok(v) => v.abs(),
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(before + partial / std::f64::consts::PI)
}

/// How band integrals of `log|z − s|` are discretized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialMethod {
    /// Chebyshev expansion of the density, integrated exactly against the
    /// logarithm.
    #[default]
    ProductIntegration,
    /// `Σ_k w_k h(x_k) (−log|z − s_k|)` on the same nodes; retried with more
    /// nodes when `z` lands on one.
    NodeSum,
}

#[derive(Debug, Clone)]
struct BandMeasure {
    map: UnitMap,
    log_half: f64,
    mass: f64,
    /// Chebyshev coefficients `a_j / j`, `j ≥ 1`, trailing negligible ones
    /// dropped.
    scaled_coefficients: Vec<f64>,
    /// `w_k h(x_k)` for the node sum.
    weighted_density: Vec<f64>,
}

/// A converged measure prepared for repeated potential evaluations.
#[derive(Debug, Clone)]
pub struct EquilibriumMeasure<'a> {
    solution: &'a EquilibriumSolution,
    rule: QuadratureRule,
    method: PotentialMethod,
    bands: Vec<BandMeasure>,
}

/// Chebyshev coefficients of a function sampled at the nodes of `rule`,
/// `a_j = (2/K) Σ_k f(x_k) T_j(x_k)`, stopping once the tail is negligible.
fn chebyshev_coefficients(rule: &QuadratureRule, values: &[f64]) -> Vec<f64> {
    let k = rule.order();
    let scale = 2.0 / k as f64;
    let a0 = scale * values.iter().sum::<f64>();
    let mut coeffs = vec![a0];
    let floor = 64.0 * f64::EPSILON * a0.abs().max(f64::MIN_POSITIVE);
    let mut prev: Vec<f64> = vec![1.0; k];
    let mut curr: Vec<f64> = rule.nodes().to_vec();
    let mut quiet = 0;
    for _ in 1..k {
        let a = scale * curr.iter().zip(values).map(|(t, v)| t * v).sum::<f64>();
        coeffs.push(a);
        quiet = if a.abs() < floor { quiet + 1 } else { 0 };
        if quiet == 8 {
            break;
        }
        for ((p, c), &x) in prev.iter_mut().zip(curr.iter_mut()).zip(rule.nodes()) {
            let next = 2.0 * x * *c - *p;
            *p = *c;
            *c = next;
        }
    }
    while coeffs.len() > 1 && coeffs.last().is_some_and(|a| a.abs() < floor) {
        coeffs.pop();
    }
    coeffs
}

/// `w = z + √(z − 1)√(z + 1)`, the exterior Joukowski inverse with `|w| ≥ 1`.
#[inline]
fn joukowski_inverse(z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    z + (z - one).sqrt() * (z + one).sqrt()
}

impl<'a> EquilibriumMeasure<'a> {
    pub fn new(solution: &'a EquilibriumSolution, method: PotentialMethod) -> Result<Self> {
        Self::with_order(solution, solution.quadrature_order, method)
    }

    pub fn with_order(solution: &'a EquilibriumSolution, order: usize, method: PotentialMethod) -> Result<Self> {
        let rule = QuadratureRule::chebyshev(order)?;
        let bands = (0..solution.bands.band_count())
            .into_par_iter()
            .map(|i| {
                let density = kernel::band_density(i, &solution.bands, &solution.vars, &rule)?;
                let coeffs = match method {
                    PotentialMethod::ProductIntegration => chebyshev_coefficients(&rule, &density),
                    PotentialMethod::NodeSum => vec![2.0 * rule.weight() * density.iter().sum::<f64>()],
                };
                let map = solution.bands.bands()[i].unit_map();
                let weighted_density = match method {
                    PotentialMethod::NodeSum => density.iter().map(|h| h * rule.weight()).collect(),
                    PotentialMethod::ProductIntegration => Vec::new(),
                };
                Ok(BandMeasure {
                    map,
                    log_half: map.half_width().ln(),
                    mass: 0.5 * coeffs[0],
                    scaled_coefficients: coeffs.iter().enumerate().skip(1).map(|(j, a)| a / j as f64).collect(),
                    weighted_density,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            solution,
            rule,
            method,
            bands,
        })
    }

    pub fn solution(&self) -> &EquilibriumSolution {
        self.solution
    }

    pub fn method(&self) -> PotentialMethod {
        self.method
    }

    /// Band masses as seen by this discretization.
    pub fn masses(&self) -> Vec<f64> {
        self.bands.iter().map(|b| b.mass).collect()
    }

    fn product_potential(&self, z: Complex64) -> f64 {
        let mut v = 0.0;
        for b in &self.bands {
            let local = Complex64::new(b.map.forward(z.re), z.im * b.map.scale());
            let w = joukowski_inverse(local);
            let mut band = b.mass * (b.log_half + (w.norm() * 0.5).ln());
            let u = w.inv();
            let mut power = u;
            let u_abs = u.norm();
            let mut decay = u_abs;
            for &c in &b.scaled_coefficients {
                band -= c * power.re;
                power *= u;
                decay *= u_abs;
                if decay < 1e-18 {
                    break;
                }
            }
            v -= band;
        }
        v
    }

    /// Node sum; `None` when `z` is within the hit tolerance of a node.
    fn node_potential(&self, z: Complex64) -> Option<f64> {
        let nodes = self.rule.nodes();
        let mut v = 0.0;
        for b in &self.bands {
            let re = b.map.forward(z.re);
            let im = z.im * b.map.scale();
            let im2 = im * im;
            let hit = 2.0 * NODE_HIT_TOLERANCE;
            let mut band = b.mass * b.log_half;
            for (&x, &wh) in nodes.iter().zip(&b.weighted_density) {
                let d = re - x;
                let r2 = d * d + im2;
                if r2 < hit * hit {
                    return None;
                }
                band += 0.5 * wh * r2.ln();
            }
            v -= band;
        }
        Some(v)
    }

    /// `V(σ; z) = −∫ log|z − s| dσ(s)` for complex `z`.
    pub fn potential(&self, z: Complex64) -> Result<f64> {
        match self.method {
            PotentialMethod::ProductIntegration => Ok(self.product_potential(z)),
            PotentialMethod::NodeSum => {
                if let Some(v) = self.node_potential(z) {
                    return Ok(v);
                }
                for extra in [1, 3] {
                    let retry = Self::with_order(self.solution, self.rule.order() + extra, self.method)?;
                    if let Some(v) = retry.node_potential(z) {
                        return Ok(v);
                    }
                }
                Err(Error::PersistentCollision { x: z.re })
            }
        }
    }

    pub fn potential_real(&self, x: f64) -> Result<f64> {
        self.potential(Complex64::new(x, 0.0))
    }

    /// Energy `∫ V dσ`, with `V` sampled at `order` Chebyshev nodes per band.
    pub fn energy(&self, order: usize) -> Result<f64> {
        let rule = QuadratureRule::chebyshev(order)?;
        let bands = &self.solution.bands;
        let per_band: Vec<f64> = (0..bands.band_count())
            .into_par_iter()
            .map(|i| -> Result<f64> {
                let density = kernel::band_density(i, bands, &self.solution.vars, &rule)?;
                let map = bands.bands()[i].unit_map();
                let mut acc = 0.0;
                for (&t, h) in rule.nodes().iter().zip(density) {
                    acc += h * self.potential_real(map.inverse(t))?;
                }
                Ok(acc * rule.weight())
            })
            .collect::<Result<_>>()?;
        Ok(per_band.iter().sum())
    }
}

/// `V(σⁿ; z)` with the default method and the solution's node count.
pub fn potential_at(z: Complex64, solution: &EquilibriumSolution) -> Result<f64> {
    EquilibriumMeasure::new(solution, PotentialMethod::default())?.potential(z)
}

/// `count` points spread over the bands of `deepest`: each band receives an
/// equal share (the first bands one extra when `count` does not divide
/// evenly), placed at the images of Chebyshev nodes of that size. Points in
/// `E^{n_max}` lie in every coarser `Eⁿ`.
pub fn attractor_sample_points(deepest: &BandSystem, count: usize) -> Vec<f64> {
    let n = deepest.band_count();
    let base = count / n;
    let extra = count % n;
    let mut points = Vec::with_capacity(count);
    for (i, band) in deepest.bands().iter().enumerate() {
        let share = base + usize::from(i < extra);
        if share == 0 {
            continue;
        }
        let map = band.unit_map();
        let rule = QuadratureRule::chebyshev(share).expect("share is positive");
        // Nodes come out in descending order.
        points.extend(rule.nodes().iter().rev().map(|&t| map.inverse(t)));
    }
    points
}

/// Summary of potential values over a point set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialStats {
    pub mean: f64,
    pub std_dev: f64,
    pub max_abs_deviation: f64,
    pub used: usize,
    /// Points dropped after persistent node collisions.
    pub excluded: Vec<f64>,
}

/// Mean of `V(σⁿ; x_l)` over `points`, accumulated in point order.
pub fn mean_potential(measure: &EquilibriumMeasure<'_>, points: &[f64]) -> Result<PotentialStats> {
    let values: Vec<Result<f64>> = points.par_iter().map(|&x| measure.potential_real(x)).collect();
    let mut kept = Vec::with_capacity(points.len());
    let mut excluded = Vec::new();
    for (&x, v) in points.iter().zip(values) {
        match v {
            Ok(v) => kept.push(v),
            Err(Error::PersistentCollision { .. }) => excluded.push(x),
            Err(e) => return Err(e),
        }
    }
    if kept.is_empty() || excluded.len() as f64 > MAX_EXCLUDED_FRACTION * points.len() as f64 {
        return Err(Error::PersistentCollision {
            x: excluded.first().copied().unwrap_or(f64::NAN),
        });
    }
    let n = kept.len() as f64;
    let mean = kept.iter().sum::<f64>() / n;
    let var = kept.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let max_abs_deviation = kept.iter().fold(0.0f64, |a, v| a.max((v - mean).abs()));
    Ok(PotentialStats {
        mean,
        std_dev: var.sqrt(),
        max_abs_deviation,
        used: kept.len(),
        excluded,
    })
}

/// Mean potential of `solution` over `count` points of `deepest`.
pub fn mean_potential_on_attractor_points(
    solution: &EquilibriumSolution,
    deepest: &BandSystem,
    count: usize,
    method: PotentialMethod,
) -> Result<PotentialStats> {
    let measure = EquilibriumMeasure::new(solution, method)?;
    mean_potential(&measure, &attractor_sample_points(deepest, count))
}

/// `f(n) = a + b·e^{−c n}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ExponentialFit {
    pub fn eval(&self, n: f64) -> f64 {
        self.a + self.b * (-self.c * n).exp()
    }
}

/// Decay rate through three points, exact for the model.
fn three_point_rate(p: [(f64, f64); 3]) -> Result<f64> {
    let [(n1, y1), (n2, y2), (n3, y3)] = p;
    let ratio = (y3 - y2) / (y2 - y1);
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::NonMonotoneInput);
    }
    if ratio >= 1.0 && ((n3 - n2) - (n2 - n1)).abs() <= 1e-12 * n3.abs().max(1.0) {
        return Err(Error::NonDecayingInput);
    }
    let h1 = n2 - n1;
    let h2 = n3 - n2;
    if (h1 - h2).abs() <= 1e-12 * h1.abs().max(1.0) {
        return Ok(-ratio.ln() / h1);
    }
    // Unequal spacing: solve (e^{-c h2}·(1 - e^{-c h2})...) by bisection on c.
    let g = |c: f64| {
        let e1 = (-c * n1).exp();
        let e2 = (-c * n2).exp();
        let e3 = (-c * n3).exp();
        (e3 - e2) / (e2 - e1) - ratio
    };
    let (mut lo, mut hi) = (1e-12, 50.0 / h1.min(h2));
    if g(lo) * g(hi) > 0.0 {
        return Err(Error::NonDecayingInput);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(lo) * g(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn linear_coefficients(points: &[(f64, f64)], c: f64) -> (f64, f64) {
    // Least squares for a, b at fixed c.
    let n = points.len() as f64;
    let (mut se, mut see, mut sy, mut sey) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let e = (-c * x).exp();
        se += e;
        see += e * e;
        sy += y;
        sey += e * y;
    }
    let det = n * see - se * se;
    let b = (n * sey - se * sy) / det;
    let a = (sy - b * se) / n;
    (a, b)
}

/// Fits `a + b e^{−cn}` to `points`.
///
/// Three equally spaced points are solved in closed form; more points are
/// fitted by least squares (Levenberg–Marquardt), started from the closed
/// form through the last three.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<ExponentialFit> {
    let mut pts = points.to_vec();
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    if pts.len() < 3 || pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::TooFewPoints);
    }
    let diffs: Vec<f64> = pts.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let first = diffs[0].signum();
    if diffs.iter().any(|d| *d == 0.0 || d.signum() != first) {
        return Err(Error::NonMonotoneInput);
    }
    let last3 = [pts[pts.len() - 3], pts[pts.len() - 2], pts[pts.len() - 1]];
    let c0 = three_point_rate(last3)?;
    let (a0, b0) = linear_coefficients(&last3, c0);
    let mut fit = ExponentialFit { a: a0, b: b0, c: c0 };
    if pts.len() > 3 {
        fit = levenberg_marquardt(&pts, fit)?;
    }
    if !(fit.c > 0.0) {
        return Err(Error::NonDecayingInput);
    }
    Ok(fit)
}

fn sum_sq(points: &[(f64, f64)], f: &ExponentialFit) -> f64 {
    points.iter().map(|&(x, y)| (f.eval(x) - y).powi(2)).sum()
}

fn levenberg_marquardt(points: &[(f64, f64)], start: ExponentialFit) -> Result<ExponentialFit> {
    use nalgebra::{Matrix3, Vector3};
    let mut fit = start;
    let mut cost = sum_sq(points, &fit);
    let mut mu = 1e-3;
    let scale: f64 = points.iter().map(|p| p.1 * p.1).sum::<f64>().max(f64::MIN_POSITIVE);
    for _ in 0..500 {
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for &(x, y) in points {
            let e = (-fit.c * x).exp();
            let r = fit.a + fit.b * e - y;
            let j = Vector3::new(1.0, e, -fit.b * x * e);
            jtj += j * j.transpose();
            jtr += j * r;
        }
        if jtr.norm() <= 1e-30 * scale {
            return Ok(fit);
        }
        let mut improved = false;
        for _ in 0..60 {
            let mut damped = jtj;
            for d in 0..3 {
                damped[(d, d)] *= 1.0 + mu;
            }
            let Some(step) = damped.lu().solve(&(-jtr)) else {
                mu *= 10.0;
                continue;
            };
            let trial = ExponentialFit {
                a: fit.a + step[0],
                b: fit.b + step[1],
                c: fit.c + step[2],
            };
            let trial_cost = sum_sq(points, &trial);
            if trial_cost.is_finite() && trial_cost <= cost {
                let done = step.norm() <= 1e-15 * (fit.a.abs() + fit.b.abs() + fit.c.abs());
                fit = trial;
                cost = trial_cost;
                mu = (mu * 0.3).max(1e-12);
                improved = true;
                if done {
                    return Ok(fit);
                }
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            // No descent possible: stationary to rounding.
            return Ok(fit);
        }
    }
    if cost.is_finite() {
        Ok(fit)
    } else {
        Err(Error::FitDiverged)
    }
}

/// Per-generation `−log C(Eⁿ)` and the extrapolated attractor capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub per_generation: Vec<(usize, f64)>,
    /// `None` when the sequence is already constant (nothing to extrapolate).
    pub fit: Option<ExponentialFit>,
    pub extrapolated_capacity: f64,
}

/// Number of trailing generations used by the fit.
pub const CAPACITY_FIT_WINDOW: usize = 4;

impl CapacityEstimate {
    /// Fits the last four generations and takes `C(A) = e^{−a}`.
    pub fn from_potentials(per_generation: Vec<(usize, f64)>) -> Result<Self> {
        if per_generation.len() < CAPACITY_FIT_WINDOW {
            return Err(Error::TooFewPoints);
        }
        let window: Vec<(f64, f64)> = per_generation[per_generation.len() - CAPACITY_FIT_WINDOW..]
            .iter()
            .map(|&(n, v)| (n as f64, v))
            .collect();
        let last = window[window.len() - 1].1;
        let constant = window
            .iter()
            .all(|&(_, v)| (v - last).abs() <= 1e-13 * last.abs().max(1.0));
        if constant {
            return Ok(Self {
                per_generation,
                fit: None,
                extrapolated_capacity: (-last).exp(),
            });
        }
        let fit = fit_exponential(&window)?;
        Ok(Self {
            per_generation,
            fit: Some(fit),
            extrapolated_capacity: (-fit.a).exp(),
        })
    }
}

/// Where the on-set potential of each generation is read.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampling {
    /// Mean over points placed in the deepest generation.
    Mean { points: Vec<f64> },
    /// A single point of the attractor hull.
    Point(f64),
}

impl Sampling {
    pub fn mean_over(deepest: &BandSystem, count: usize) -> Self {
        Sampling::Mean {
            points: attractor_sample_points(deepest, count),
        }
    }
}

/// `−log C(Eⁿ) = V(σⁿ; x ∈ Eⁿ)` for each solution, plus the extrapolation.
pub fn capacity_estimate(
    solutions: &[EquilibriumSolution],
    sampling: &Sampling,
    method: PotentialMethod,
) -> Result<CapacityEstimate> {
    let per_generation = solutions
        .iter()
        .map(|s| {
            let measure = EquilibriumMeasure::new(s, method)?;
            let v = match sampling {
                Sampling::Mean { points } => mean_potential(&measure, points)?.mean,
                Sampling::Point(x) => measure.potential_real(*x)?,
            };
            Ok((s.generation, v))
        })
        .collect::<Result<Vec<_>>>()?;
    CapacityEstimate::from_potentials(per_generation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::Interval;
    use crate::kernel::GapVariables;
    use crate::solver::{solve_generation, SolverConfig};

    fn unit_interval(order: usize) -> EquilibriumSolution {
        let bands = BandSystem::from_intervals(vec![Interval { lo: -1.0, hi: 1.0 }]).unwrap();
        solve_generation(
            &bands,
            &GapVariables::zeros(&bands),
            &SolverConfig::default().with_order(order),
        )
        .unwrap()
    }

    #[test]
    fn arcsine_law() {
        let s = unit_interval(64);
        for x in [-1.0, -0.7, 0.0, 0.2, 0.99, 1.0] {
            let got = integrated_measure_at(x, &s).unwrap();
            let want = 0.5 + f64::asin(x) / std::f64::consts::PI;
            assert!((got - want).abs() < 1e-12, "{x}: {got} vs {want}");
        }
        assert!(matches!(integrated_measure_at(1.5, &s), Err(Error::OutOfHull(_))));
    }

    #[test]
    fn interval_potential_is_log_two_inside() {
        let s = unit_interval(2048);
        let m = EquilibriumMeasure::new(&s, PotentialMethod::ProductIntegration).unwrap();
        for x in [0.0, 0.3, -0.999, 1.0] {
            let v = m.potential_real(x).unwrap();
            assert!((v - 2f64.ln()).abs() < 1e-14, "{x}: {v}");
        }
        // Outside: −log|(z + √(z²−1))/2|.
        let z = 3.0f64;
        let want = -((z + (z * z - 1.0).sqrt()) / 2.0).ln();
        assert!((m.potential_real(z).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn node_sum_error_is_chebyshev_polynomial() {
        // For one interval the node sum equals log 2 − log(2|T_K(z)|)/K.
        let s = unit_interval(16);
        let m = EquilibriumMeasure::new(&s, PotentialMethod::NodeSum).unwrap();
        let z: f64 = 0.3;
        let tk = (16.0 * z.acos()).cos();
        let want = 2f64.ln() - (2.0 * tk.abs()).ln() / 16.0;
        assert!((m.potential_real(z).unwrap() - want).abs() < 1e-13);
    }

    #[test]
    fn fit_closed_form_and_errors() {
        let pts: Vec<(f64, f64)> = (1..=3).map(|n| (n as f64, 1.0 + 0.5f64.powi(n))).collect();
        let f = fit_exponential(&pts).unwrap();
        assert!((f.a - 1.0).abs() < 1e-12 && (f.c - 2f64.ln()).abs() < 1e-12 && (f.b - 1.0).abs() < 1e-12);
        let constant = [(1.0, 5.0), (2.0, 5.0), (3.0, 5.0)];
        assert!(matches!(fit_exponential(&constant), Err(Error::NonMonotoneInput)));
        let zigzag = [(1.0, 1.0), (2.0, 2.0), (3.0, 1.5)];
        assert!(matches!(fit_exponential(&zigzag), Err(Error::NonMonotoneInput)));
        let growing = [(1.0, 1.0), (2.0, 2.0), (3.0, 4.0)];
        assert!(matches!(fit_exponential(&growing), Err(Error::NonDecayingInput)));
        assert!(matches!(fit_exponential(&pts[..2]), Err(Error::TooFewPoints)));
    }

    #[test]
    fn sample_points_are_spread_over_bands() {
        let bands = crate::ifs::IfsSystem::ternary_cantor().generate_bands(3).unwrap();
        let pts = attractor_sample_points(&bands, 20);
        assert_eq!(pts.len(), 20);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert!(pts.iter().all(|&x| bands.band_containing(x).is_some()));
    }
}
