// Equilibrium measure of the middle-third Cantor construction at one
// generation, solved from a cold start.

use ifs_equilibrium::kernel::GapVariables;
use ifs_equilibrium::solver::solve_generation;
use ifs_equilibrium::{EquilibriumSolution, IfsSystem, Result, SolverConfig};

pub fn run_example() -> Result<EquilibriumSolution> {
    let bands = IfsSystem::ternary_cantor().generate_bands(4)?;
    let cfg = SolverConfig::default();
    let sol = solve_generation(&bands, &GapVariables::zeros(&bands), &cfg)?;
    println!(
        "n=4: {} gaps, {} iterations, max |K| {:.2e}",
        sol.vars.len(),
        sol.iterations_used,
        sol.max_residual()
    );
    for (i, (band, w)) in sol.bands.bands().iter().zip(&sol.omegas).enumerate().take(4) {
        println!("  band {i} [{:+.5}, {:+.5}]  omega = {w:.12}", band.lo, band.hi);
    }
    println!("  total mass {:.15}", sol.total_mass());
    Ok(sol)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
