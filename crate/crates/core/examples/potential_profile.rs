// V(sigma^n; x) on [0, 1]: flat on the bands, lower in the gaps.

use ifs_equilibrium::analytics::{EquilibriumMeasure, PotentialMethod};
use ifs_equilibrium::solver::hierarchical_solve;
use ifs_equilibrium::{IfsSystem, Result, SolverConfig};

pub fn run_example() -> Result<Vec<(f64, Vec<f64>)>> {
    let sols = hierarchical_solve(&IfsSystem::ternary_cantor(), 3, &SolverConfig::default())?;
    let measures = sols
        .iter()
        .map(|s| EquilibriumMeasure::new(s, PotentialMethod::ProductIntegration))
        .collect::<Result<Vec<_>>>()?;
    let mut profile = Vec::new();
    for k in 0..=10 {
        let x = 0.1 * k as f64;
        let values = measures
            .iter()
            .map(|m| m.potential_real(x))
            .collect::<Result<Vec<_>>>()?;
        println!(
            "x={x:.1} {}",
            values.iter().map(|v| format!(" {v:.8}")).collect::<String>()
        );
        profile.push((x, values));
    }
    Ok(profile)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
