// Capacity of the ternary Cantor set, extrapolated from the capacities of
// seven generations.

use ifs_equilibrium::analytics::{capacity_estimate, PotentialMethod, Sampling};
use ifs_equilibrium::solver::hierarchical_solve;
use ifs_equilibrium::{CapacityEstimate, IfsSystem, Result, SolverConfig};

pub fn run_example() -> Result<(CapacityEstimate, CapacityEstimate)> {
    let sols = hierarchical_solve(&IfsSystem::ternary_cantor(), 7, &SolverConfig::default())?;
    let deepest = &sols.last().expect("seven generations").bands;
    let method = PotentialMethod::ProductIntegration;
    let mean = capacity_estimate(&sols, &Sampling::mean_over(deepest, 4096), method)?;
    let point = capacity_estimate(&sols, &Sampling::Point(-0.999996236647154), method)?;
    for ((n, vm), (_, vp)) in mean.per_generation.iter().zip(&point.per_generation) {
        println!("n={n}  <V> = {vm:.9}  V(x0) = {vp:.9}");
    }
    println!("fit {:?}", mean.fit);
    println!("C(A) from the mean: {:.10}", mean.extrapolated_capacity);
    println!("C(A) from one point: {:.10}", point.extrapolated_capacity);
    Ok((mean, point))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
