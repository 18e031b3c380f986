//! Evaluation of the singular kernel `Z(s)/√|Y(s)|` and its Gauss–Chebyshev
//! integrals over gaps and bands.
//!
//! `Y` has a root at every band endpoint and `Z` is monic with one root
//! `ζ_m` per gap. Neither is ever expanded into coefficients: every
//! evaluation works on the roots, expressed in the local coordinates of the
//! interval being integrated (the *frame*), where that interval is `[-1, 1]`.
//! The frame's own two endpoints are absorbed into the Chebyshev weight, so
//! the integrand left for the rule is `Z̄(x)/√|Ỹ(x)|`.
//!
//! The change of variables is scale free (`Z` has degree `N − 1`, `Y` has
//! degree `2N`), so no Jacobian factor appears.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{BandSystem, Interval, UnitMap};
use crate::quadrature::QuadratureRule;

/// Relative distance below which an evaluation point is treated as sitting
/// on a root or endpoint.
pub const COLLISION_TOLERANCE: f64 = 1e-15;

/// Normalized gap roots `λ_m = ψ_m(ζ_m) ∈ (−1, 1)`, one per gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapVariables {
    lambdas: Vec<f64>,
}

impl GapVariables {
    pub fn new(lambdas: Vec<f64>, bands: &BandSystem) -> Result<Self> {
        if lambdas.len() != bands.gap_count() {
            return Err(Error::VariableCount {
                expected: bands.gap_count(),
                got: lambdas.len(),
            });
        }
        if let Some((index, &value)) = lambdas.iter().enumerate().find(|(_, l)| !(l.abs() < 1.0)) {
            return Err(Error::VariableOutOfRange { index, value });
        }
        Ok(Self { lambdas })
    }

    /// Every root at the midpoint of its gap.
    pub fn zeros(bands: &BandSystem) -> Self {
        Self {
            lambdas: vec![0.0; bands.gap_count()],
        }
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Roots in original coordinates, `ζ_m = ψ_m⁻¹(λ_m)`.
    pub fn zetas(&self, bands: &BandSystem) -> Vec<f64> {
        bands
            .gaps()
            .iter()
            .zip(&self.lambdas)
            .map(|(g, &l)| g.unit_map().inverse(l))
            .collect()
    }

    pub(crate) fn from_raw(lambdas: Vec<f64>) -> Self {
        Self { lambdas }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Lo,
    Hi,
}

/// One endpoint of one band: `α_band` (`Lo`) or `β_band` (`Hi`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Endpoint {
    pub band: usize,
    pub side: Side,
}

impl Endpoint {
    pub fn lo(band: usize) -> Self {
        Self { band, side: Side::Lo }
    }

    pub fn hi(band: usize) -> Self {
        Self { band, side: Side::Hi }
    }
}

/// The interval mapped onto `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Gap(usize),
    Band(usize),
}

impl Frame {
    pub fn interval(&self, bands: &BandSystem) -> Interval {
        match *self {
            Frame::Gap(i) => bands.gaps()[i],
            Frame::Band(i) => bands.bands()[i],
        }
    }

    /// The two endpoint factors carried by the Chebyshev weight.
    pub fn absorbed(&self) -> [Endpoint; 2] {
        match *self {
            Frame::Gap(i) => [Endpoint::hi(i), Endpoint::lo(i + 1)],
            Frame::Band(i) => [Endpoint::lo(i), Endpoint::hi(i)],
        }
    }
}

/// Which of the two equivalent evaluation routes to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelEvaluator {
    /// Each gap root paired with the endpoints of a neighbouring band so
    /// every grouped ratio is close to one.
    #[default]
    Grouped,
    /// Sum of logarithms, exponentiated once.
    LogSpace,
}

/// Roots and band endpoints in the local coordinates of a frame.
#[derive(Debug, Clone)]
pub struct LocalView {
    frame: Frame,
    map: UnitMap,
    zetas: Vec<f64>,
    lows: Vec<f64>,
    highs: Vec<f64>,
}

#[inline]
fn collides(x: f64, p: f64) -> bool {
    (x - p).abs() <= COLLISION_TOLERANCE * x.abs().max(p.abs()).max(1.0)
}

impl LocalView {
    pub fn new(bands: &BandSystem, vars: &GapVariables, frame: Frame) -> Self {
        let map = frame.interval(bands).unit_map();
        let zetas = bands
            .gaps()
            .iter()
            .zip(vars.lambdas())
            .enumerate()
            .map(|(l, (g, &lambda))| {
                if frame == Frame::Gap(l) {
                    lambda
                } else {
                    map.forward(g.unit_map().inverse(lambda))
                }
            })
            .collect();
        let lows = bands.bands().iter().map(|b| map.forward(b.lo)).collect();
        let highs = bands.bands().iter().map(|b| map.forward(b.hi)).collect();
        Self {
            frame,
            map,
            zetas,
            lows,
            highs,
        }
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn unit_map(&self) -> UnitMap {
        self.map
    }

    /// Local gap roots `ψ(ζ_l)`.
    pub fn zetas(&self) -> &[f64] {
        &self.zetas
    }

    fn endpoint(&self, e: Endpoint) -> f64 {
        match e.side {
            Side::Lo => self.lows[e.band],
            Side::Hi => self.highs[e.band],
        }
    }

    /// Sign and `log |Z̄(x)| − ½ log |Ỹ(x)|`, where `Ỹ` omits the endpoint
    /// factors listed in `excluded`.
    ///
    /// Factors are taken band by band, each root with the band to its left,
    /// and a logarithm is taken once per block of four bands. The summed
    /// terms stay small, so the total does not lose digits to cancellation.
    pub fn log_magnitude(&self, x: f64, excluded: [Endpoint; 2]) -> Result<(f64, f64)> {
        const BLOCK: usize = 4;
        let mut log = 0.0;
        let mut negatives = 0usize;
        let mut num = 1.0;
        let mut den = 1.0;
        for band in 0..self.lows.len() {
            for e in [Endpoint::lo(band), Endpoint::hi(band)] {
                if excluded.contains(&e) {
                    continue;
                }
                let p = self.endpoint(e);
                if collides(x, p) {
                    return Err(Error::ExactNodeCollision { x });
                }
                den *= (x - p).abs();
            }
            if let Some(&z) = self.zetas.get(band) {
                if collides(x, z) {
                    return Err(Error::ExactNodeCollision { x });
                }
                let d = x - z;
                if d < 0.0 {
                    negatives += 1;
                }
                num *= d * d;
            }
            if (band + 1) % BLOCK == 0 {
                log += (num / den).ln();
                num = 1.0;
                den = 1.0;
            }
        }
        log += (num / den).ln();
        let sign = if negatives.is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok((sign, 0.5 * log))
    }

    /// `Z̄(x)/√|Ỹ(x)|` through the log-space route, with the frame's own
    /// endpoints absorbed.
    pub fn log_space_value(&self, x: f64) -> Result<f64> {
        let (sign, log) = self.log_magnitude(x, self.frame.absorbed())?;
        Ok(sign * log.exp())
    }

    /// Grouped evaluation for a gap frame.
    ///
    /// Returns `(x − λ_i, rest)` with the kernel equal to their product: the
    /// own root is kept apart so that `∂/∂λ_i` can use `rest` directly.
    pub fn grouped_parts(&self, x: f64) -> Result<(f64, f64)> {
        let Frame::Gap(i) = self.frame else {
            panic!("grouped evaluation needs a gap frame");
        };
        // The endpoints left unpaired are α_i and β_{i+1}, the closest to
        // [-1, 1] after the absorbed β_i and α_{i+1}.
        let a = self.lows[i];
        let b = self.highs[i + 1];
        let own = self.zetas[i];
        if collides(x, own) || collides(x, a) || collides(x, b) {
            return Err(Error::ExactNodeCollision { x });
        }
        // Squared ratios (x − ζ)² / ((x − α)(x − β)) are positive (bands lie
        // outside [-1, 1]) and close to one. Numerators and denominators are
        // multiplied in blocks small enough not to overflow, and only one
        // square root is taken. Paired points all lie outside [-1, 1] and
        // cannot collide with an interior x.
        const BLOCK: usize = 8;
        let mut squared = 1.0 / ((x - a) * (x - b)).abs();
        let mut num = 1.0;
        let mut den = 1.0;
        let mut filled = 0;
        let pairs = (0..i)
            .map(|m| (m, m))
            .chain((i + 1..self.zetas.len()).map(|m| (m, m + 1)));
        for (m, band) in pairs {
            let d = x - self.zetas[m];
            num *= d * d;
            den *= (x - self.lows[band]) * (x - self.highs[band]);
            filled += 1;
            if filled == BLOCK {
                squared *= num / den;
                num = 1.0;
                den = 1.0;
                filled = 0;
            }
        }
        squared *= num / den;
        let right_roots = self.zetas.len() - 1 - i;
        let sign = if right_roots.is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok((x - own, sign * squared.sqrt()))
    }

    pub fn grouped_value(&self, x: f64) -> Result<f64> {
        let (near, rest) = self.grouped_parts(x)?;
        Ok(near * rest)
    }

    /// Kernel value and the value with the own-root factor removed.
    fn parts(&self, x: f64, evaluator: KernelEvaluator) -> Result<(f64, f64)> {
        match evaluator {
            KernelEvaluator::Grouped => {
                let (near, rest) = self.grouped_parts(x)?;
                Ok((near * rest, rest))
            }
            KernelEvaluator::LogSpace => {
                let value = self.log_space_value(x)?;
                let own = match self.frame {
                    Frame::Gap(i) => x - self.zetas[i],
                    Frame::Band(_) => 1.0,
                };
                Ok((value, value / own))
            }
        }
    }
}

/// Sign and log-magnitude of `Z/√|Ỹ|` at local coordinate `x` of `frame`,
/// omitting the endpoint factors in `excluded`.
pub fn kernel_log_magnitude(
    x: f64,
    bands: &BandSystem,
    vars: &GapVariables,
    frame: Frame,
    excluded: [Endpoint; 2],
) -> Result<(f64, f64)> {
    LocalView::new(bands, vars, frame).log_magnitude(x, excluded)
}

/// Grouped evaluation of `Z̄_i(x)/√|Ỹ_i(x)|` in the frame of gap `gap`.
pub fn kernel_grouped(x: f64, gap: usize, bands: &BandSystem, vars: &GapVariables) -> Result<f64> {
    LocalView::new(bands, vars, Frame::Gap(gap)).grouped_value(x)
}

/// `K_i ≈ Σ_k w_k Z̄_i(x_k)/√|Ỹ_i(x_k)|`.
pub fn gap_integral(
    gap: usize,
    bands: &BandSystem,
    vars: &GapVariables,
    rule: &QuadratureRule,
    evaluator: KernelEvaluator,
) -> Result<f64> {
    let view = LocalView::new(bands, vars, Frame::Gap(gap));
    rule.try_integrate(|x| view.parts(x, evaluator).map(|p| p.0))
}

/// `K_i` together with the row `∂K_i/∂λ_m`, `m = 0..N−1`.
///
/// `∂ψ_i(ζ_m)/∂λ_m = A_i/A_m`, the ratio of half widths of gap `m` and gap
/// `i`; the derivative of the kernel with respect to its `m`-th root is the
/// kernel with that root factor dropped.
pub fn gap_row(
    gap: usize,
    bands: &BandSystem,
    vars: &GapVariables,
    rule: &QuadratureRule,
    evaluator: KernelEvaluator,
) -> Result<(f64, Vec<f64>)> {
    let view = LocalView::new(bands, vars, Frame::Gap(gap));
    let n = vars.len();
    let mut value = 0.0;
    let mut diagonal = 0.0;
    let mut row = vec![0.0; n];
    for &x in rule.nodes() {
        let (g, rest) = view.parts(x, evaluator)?;
        value += g;
        diagonal += rest;
        for (r, &z) in row.iter_mut().zip(view.zetas()) {
            *r += g / (x - z);
        }
    }
    row[gap] = diagonal;
    let w = rule.weight();
    let half_i = bands.gaps()[gap].width();
    for (m, r) in row.iter_mut().enumerate() {
        let chain = bands.gaps()[m].width() / half_i;
        *r *= -chain * w;
    }
    Ok((value * w, row))
}

/// Single Jacobian entry `∂K_i/∂λ_m`.
pub fn gap_jacobian(
    gap: usize,
    wrt: usize,
    bands: &BandSystem,
    vars: &GapVariables,
    rule: &QuadratureRule,
    evaluator: KernelEvaluator,
) -> Result<f64> {
    Ok(gap_row(gap, bands, vars, rule, evaluator)?.1[wrt])
}

/// All `K_i`, evaluated in parallel over gaps.
pub fn residuals(
    bands: &BandSystem,
    vars: &GapVariables,
    rule: &QuadratureRule,
    evaluator: KernelEvaluator,
) -> Result<Vec<f64>> {
    (0..bands.gap_count())
        .into_par_iter()
        .map(|i| gap_integral(i, bands, vars, rule, evaluator))
        .collect()
}

/// All `K_i` and the dense Jacobian, row-major.
pub fn residuals_and_jacobian(
    bands: &BandSystem,
    vars: &GapVariables,
    rule: &QuadratureRule,
    evaluator: KernelEvaluator,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let rows: Vec<(f64, Vec<f64>)> = (0..bands.gap_count())
        .into_par_iter()
        .map(|i| gap_row(i, bands, vars, rule, evaluator))
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().unzip())
}

/// Values of `|Z̄|/√|Ỹ|` at the rule's nodes in the frame of band `band`.
pub fn band_density(band: usize, bands: &BandSystem, vars: &GapVariables, rule: &QuadratureRule) -> Result<Vec<f64>> {
    let view = LocalView::new(bands, vars, Frame::Band(band));
    rule.nodes()
        .iter()
        .map(|&x| view.log_space_value(x).map(f64::abs))
        .collect()
}

/// Harmonic frequency `ω_i = (1/π)∫_{E_i} |Z|/√|Y| ds`.
pub fn band_integral(band: usize, bands: &BandSystem, vars: &GapVariables, rule: &QuadratureRule) -> Result<f64> {
    let view = LocalView::new(bands, vars, Frame::Band(band));
    rule.try_integrate(|x| view.log_space_value(x).map(f64::abs))
}

/// All harmonic frequencies.
pub fn harmonic_frequencies(bands: &BandSystem, vars: &GapVariables, rule: &QuadratureRule) -> Result<Vec<f64>> {
    (0..bands.band_count())
        .into_par_iter()
        .map(|i| band_integral(i, bands, vars, rule))
        .collect()
}
