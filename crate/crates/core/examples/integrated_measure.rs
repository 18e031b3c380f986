// The staircase Omega(x) = sigma([gamma_1, x]) for a few generations of the
// ternary construction.

use ifs_equilibrium::analytics::integrated_measure_at;
use ifs_equilibrium::solver::hierarchical_solve;
use ifs_equilibrium::{IfsSystem, Result, SolverConfig};

pub fn run_example() -> Result<Vec<Vec<f64>>> {
    let sols = hierarchical_solve(
        &IfsSystem::ternary_cantor(),
        3,
        &SolverConfig::default().with_order(256),
    )?;
    let grid: Vec<f64> = (0..=8).map(|k| -1.0 + 0.25 * k as f64).collect();
    println!(
        "{:>7} {}",
        "x",
        sols.iter()
            .map(|s| format!("{:>10}", format!("n={}", s.generation)))
            .collect::<String>()
    );
    let mut table = Vec::new();
    for &x in &grid {
        let row = sols
            .iter()
            .map(|s| integrated_measure_at(x, s))
            .collect::<Result<Vec<_>>>()?;
        println!(
            "{x:>7.3} {}",
            row.iter().map(|v| format!("{v:>10.6}")).collect::<String>()
        );
        table.push(row);
    }
    Ok(table)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
