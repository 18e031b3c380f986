//! Gauss–Chebyshev rule for the normalized weight `ds / (π √(1 − s²))`.

use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 2048;

/// Nodes `x_k = cos((2k − 1)π / 2K)`, all weights `1/K`.
///
/// Exact for polynomials of degree `≤ 2K − 1` against the normalized
/// Chebyshev weight.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weight: f64,
}

impl QuadratureRule {
    pub fn chebyshev(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::EmptyRule);
        }
        let k = order as f64;
        let nodes = (1..=order)
            .map(|i| ((2 * i - 1) as f64 * std::f64::consts::PI / (2.0 * k)).cos())
            .collect();
        Ok(Self { nodes, weight: 1.0 / k })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// `Σ_k w_k f(x_k)`, summed in node order.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().map(|&x| f(x)).sum::<f64>() * self.weight
    }

    /// Same as [`integrate`](Self::integrate) for a fallible integrand.
    pub fn try_integrate<E>(&self, mut f: impl FnMut(f64) -> Result<f64, E>) -> Result<f64, E> {
        let mut acc = 0.0;
        for &x in &self.nodes {
            acc += f(x)?;
        }
        Ok(acc * self.weight)
    }
}
