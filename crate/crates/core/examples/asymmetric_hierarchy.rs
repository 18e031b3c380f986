// Generation-by-generation solve of an asymmetric two-map IFS, each
// generation warm-started from the one before.

use ifs_equilibrium::solver::hierarchical_solve;
use ifs_equilibrium::{AffineMap, EquilibriumSolution, IfsSystem, Result, SolverConfig};

pub fn run_example() -> Result<Vec<EquilibriumSolution>> {
    let ifs = IfsSystem::new(vec![AffineMap::new(0.8, -1.0), AffineMap::new(0.1, 1.0)])?;
    let sols = hierarchical_solve(&ifs, 6, &SolverConfig::default().with_order(512))?;
    for s in &sols {
        let max_lambda = s.vars.lambdas().iter().fold(0.0f64, |a, l| a.max(l.abs()));
        println!(
            "n={} gaps={:3} iterations={} warm-start |K| {:.1e} -> {:.1e}  max|lambda| {:.4}",
            s.generation,
            s.vars.len(),
            s.iterations_used,
            s.initial_residuals.iter().fold(0.0f64, |a, r| a.max(*r)),
            s.max_residual(),
            max_lambda
        );
    }
    Ok(sols)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
