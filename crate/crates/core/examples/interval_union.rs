// Equilibrium measure and capacity of an arbitrary union of intervals, with
// the symmetric two-interval closed form as a check.

use ifs_equilibrium::analytics::{EquilibriumMeasure, PotentialMethod};
use ifs_equilibrium::kernel::GapVariables;
use ifs_equilibrium::solver::solve_generation;
use ifs_equilibrium::{BandSystem, Interval, Result, SolverConfig};

pub struct Summary {
    pub symmetric_capacity: f64,
    pub closed_form: f64,
    pub skewed_omegas: Vec<f64>,
}

fn capacity(bands: Vec<Interval>) -> Result<(f64, Vec<f64>)> {
    let bands = BandSystem::from_intervals(bands)?;
    let sol = solve_generation(&bands, &GapVariables::zeros(&bands), &SolverConfig::default())?;
    let m = EquilibriumMeasure::new(&sol, PotentialMethod::ProductIntegration)?;
    let v = m.potential_real(bands.bands()[0].lo)?;
    Ok(((-v).exp(), sol.omegas))
}

pub fn run_example() -> Result<Summary> {
    let a = 0.4;
    let (symmetric_capacity, _) = capacity(vec![Interval::new(-1.0, -a)?, Interval::new(a, 1.0)?])?;
    let closed_form = (1.0 - a * a).sqrt() / 2.0;
    println!("[-1,-{a}] u [{a},1]: C = {symmetric_capacity:.12} (closed form {closed_form:.12})");

    let skewed = vec![
        Interval::new(-1.0, -0.2)?,
        Interval::new(0.1, 0.5)?,
        Interval::new(0.7, 1.0)?,
    ];
    let (c, skewed_omegas) = capacity(skewed)?;
    println!("three bands: C = {c:.12}, band masses {skewed_omegas:.6?}");
    Ok(Summary {
        symmetric_capacity,
        closed_form,
        skewed_omegas,
    })
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
