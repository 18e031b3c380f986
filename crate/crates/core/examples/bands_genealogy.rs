// Band structure of the first generations of two IFS, with the origin of
// every gap.

use ifs_equilibrium::{AffineMap, GapOrigin, IfsSystem, Result};

pub struct Summary {
    pub band_counts: Vec<usize>,
    pub old_gaps: Vec<usize>,
}

pub fn run_example() -> Result<Summary> {
    let asymmetric = IfsSystem::new(vec![AffineMap::new(0.8, -1.0), AffineMap::new(0.1, 1.0)])?;
    let mut band_counts = Vec::new();
    let mut old_gaps = Vec::new();
    for (name, ifs) in [("ternary", IfsSystem::ternary_cantor()), ("asymmetric", asymmetric)] {
        println!("{name}: hull {:?}", ifs.hull());
        for n in 1..=3 {
            let bands = ifs.generate_bands(n)?;
            let old = bands
                .genealogy()
                .iter()
                .filter(|g| matches!(g, GapOrigin::Old(_)))
                .count();
            println!(
                "  n={n}: {} bands, total length {:.6}, {} gaps ({old} inherited)",
                bands.band_count(),
                bands.total_length(),
                bands.gap_count()
            );
            if n == 2 {
                for (gap, origin) in bands.gaps().iter().zip(bands.genealogy()) {
                    println!("    gap ({:+.4}, {:+.4}) {origin:?}", gap.lo, gap.hi);
                }
            }
            band_counts.push(bands.band_count());
            old_gaps.push(old);
        }
    }
    Ok(Summary { band_counts, old_gaps })
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
