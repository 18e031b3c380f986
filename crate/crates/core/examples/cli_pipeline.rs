// The solve / figures / capacity pipeline driven from code instead of the
// `ifs-eq` binary, writing into a scratch directory.

use std::path::PathBuf;

use ifs_equilibrium::runner::{self, Figure, RunError};
use ifs_equilibrium::RunConfig;

pub fn run_example(output_dir: PathBuf) -> Result<Vec<PathBuf>, RunError> {
    let cfg = RunConfig {
        output_dir,
        quadrature_order: 512,
        sample_count: 512,
        ..RunConfig::ternary(5)
    };
    let first = runner::solve(&cfg)?;
    let again = runner::solve(&cfg)?;
    println!(
        "solved {} generations; rerun took {} solver iterations",
        first.len(),
        again.iter().map(|o| o.solution.iterations_used).sum::<usize>()
    );
    let files = runner::figures(&cfg, Figure::All)?;
    for f in &files {
        println!("wrote {}", f.display());
    }
    Ok(files)
}

fn main() -> Result<(), RunError> {
    run_example(std::env::temp_dir().join("ifs-eq-example")).map(|_| ())
}
