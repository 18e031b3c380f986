use std::sync::OnceLock;

use ifs_equilibrium::analytics::{
    attractor_sample_points, capacity_estimate, fit_exponential, integrated_measure_at, mean_potential,
    EquilibriumMeasure, PotentialMethod, Sampling,
};
use ifs_equilibrium::kernel::GapVariables;
use ifs_equilibrium::solver::{hierarchical_solve, solve_generation};
use ifs_equilibrium::{BandSystem, EquilibriumSolution, Error, IfsSystem, Interval, SolverConfig};

const X0: f64 = -0.999996236647154;

fn ternary() -> &'static [EquilibriumSolution] {
    static SOLS: OnceLock<Vec<EquilibriumSolution>> = OnceLock::new();
    SOLS.get_or_init(|| hierarchical_solve(&IfsSystem::ternary_cantor(), 7, &SolverConfig::default()).unwrap())
}

fn samples() -> &'static [f64] {
    static PTS: OnceLock<Vec<f64>> = OnceLock::new();
    PTS.get_or_init(|| attractor_sample_points(&ternary()[6].bands, 4096))
}

fn unit_interval() -> EquilibriumSolution {
    let bands = BandSystem::from_intervals(vec![Interval::new(-1.0, 1.0).unwrap()]).unwrap();
    solve_generation(&bands, &GapVariables::zeros(&bands), &SolverConfig::default()).unwrap()
}

#[test]
fn fit_examples() {
    let (a, b, c) = (0.8166889, -0.1278376, 0.66927525);
    let pts: Vec<(f64, f64)> = (4..=7).map(|n| (n as f64, a + b * (-c * n as f64).exp())).collect();
    let fit = fit_exponential(&pts).unwrap();
    assert!(
        (fit.a - a).abs() < 1e-9 && (fit.b - b).abs() < 1e-9 && (fit.c - c).abs() < 1e-9,
        "{fit:?}"
    );

    let constant: Vec<(f64, f64)> = (1..=4).map(|n| (n as f64, 5.0)).collect();
    assert!(matches!(fit_exponential(&constant), Err(Error::NonMonotoneInput)));

    for range in [1..=3, 1..=6] {
        let geometric: Vec<(f64, f64)> = range.map(|n| (n as f64, 1.0 + 0.5f64.powi(n))).collect();
        let fit = fit_exponential(&geometric).unwrap();
        assert!(
            (fit.a - 1.0).abs() < 1e-12 && (fit.c - 2f64.ln()).abs() < 1e-12,
            "{fit:?}"
        );
    }
}

#[test]
fn single_interval_capacity_is_one_half() {
    let sol = unit_interval();
    let generations: Vec<EquilibriumSolution> = (1..=5)
        .map(|n| EquilibriumSolution {
            generation: n,
            ..sol.clone()
        })
        .collect();
    let est = capacity_estimate(
        &generations,
        &Sampling::mean_over(&sol.bands, 64),
        PotentialMethod::ProductIntegration,
    )
    .unwrap();
    assert!(est.fit.is_none());
    assert!((est.extrapolated_capacity - 0.5).abs() < 1e-15);

    let m = EquilibriumMeasure::new(&sol, PotentialMethod::ProductIntegration).unwrap();
    assert!((m.energy(64).unwrap() - 2f64.ln()).abs() < 1e-14);
    assert!((m.potential_real(0.0).unwrap() - 2f64.ln()).abs() < 1e-14);
}

#[test]
fn integrated_measure_examples() {
    let sols = ternary();
    assert!((integrated_measure_at(0.0, &sols[0]).unwrap() - 0.5).abs() < 1e-15);
    for s in sols {
        assert!((integrated_measure_at(1.0, s).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(integrated_measure_at(-1.0, s).unwrap(), 0.0);
    }
    assert!(matches!(
        integrated_measure_at(1.0 + 1e-9, &sols[0]),
        Err(Error::OutOfHull(_))
    ));
}

#[test]
fn point_potentials_match_the_table() {
    let sols = ternary();
    for (s, want) in [(&sols[0], 0.751845), (&sols[6], 0.815506)] {
        let m = EquilibriumMeasure::new(s, PotentialMethod::ProductIntegration).unwrap();
        let v = m.potential_real(X0).unwrap();
        assert!((v - want).abs() < 5e-4, "n={}: {v}", s.generation);
    }
}

#[test]
fn potential_is_constant_on_the_set() {
    let s = &ternary()[6];
    let m = EquilibriumMeasure::new(s, PotentialMethod::ProductIntegration).unwrap();
    let stats = mean_potential(&m, samples()).unwrap();
    assert!(stats.excluded.is_empty());
    assert_eq!(stats.used, 4096);
    assert!(stats.max_abs_deviation < 1e-3);
    assert!(stats.std_dev < 1e-3 * stats.mean.abs());
    assert!((stats.mean - 0.815509).abs() < 5e-4);
}

#[test]
fn capacities_decrease_with_generation() {
    let values: Vec<f64> = ternary()
        .iter()
        .map(|s| {
            let m = EquilibriumMeasure::new(s, PotentialMethod::ProductIntegration).unwrap();
            mean_potential(&m, samples()).unwrap().mean
        })
        .collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]), "{values:?}");
}

#[test]
fn extrapolated_capacity_both_paths() {
    let sols = ternary();
    let method = PotentialMethod::ProductIntegration;
    let mean = capacity_estimate(
        sols,
        &Sampling::Mean {
            points: samples().to_vec(),
        },
        method,
    )
    .unwrap();
    let point = capacity_estimate(sols, &Sampling::Point(X0), method).unwrap();
    assert!(mean.fit.unwrap().c > 0.0);
    assert!(
        (mean.extrapolated_capacity - 0.44189726).abs() < 2e-6,
        "{}",
        mean.extrapolated_capacity
    );
    assert!(
        (point.extrapolated_capacity - 0.44189238).abs() < 1e-5,
        "{}",
        point.extrapolated_capacity
    );
}

#[test]
fn gap_potential_converges_geometrically() {
    // x = 0 is the middle of the generation-1 gap.
    let values: Vec<f64> = ternary()
        .iter()
        .map(|s| {
            EquilibriumMeasure::new(s, PotentialMethod::ProductIntegration)
                .unwrap()
                .potential_real(0.0)
                .unwrap()
        })
        .collect();
    let steps: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let ratios: Vec<f64> = steps.windows(2).map(|w| w[1] / w[0]).collect();
    assert!(ratios.iter().all(|&r| r > 0.0 && r < 0.6), "{ratios:?}");
}

#[test]
fn node_sum_reproduces_the_point_sample_column() {
    // With the plain node sum, one-point values carry the quadrature's
    // oscillating error, which shrinks with the generation.
    let sols = ternary();
    let discrepancy = |s: &EquilibriumSolution| {
        let m = EquilibriumMeasure::new(s, PotentialMethod::NodeSum).unwrap();
        (m.potential_real(X0).unwrap() - mean_potential(&m, samples()).unwrap().mean).abs()
    };
    let first = discrepancy(&sols[0]);
    let last = discrepancy(&sols[6]);
    assert!((1e-4..3e-4).contains(&first), "{first}");
    assert!(last < first / 10.0, "{last} vs {first}");

    let m = EquilibriumMeasure::new(&sols[0], PotentialMethod::NodeSum).unwrap();
    assert!((m.potential_real(X0).unwrap() - 0.751845).abs() < 1e-6);
}

#[test]
fn node_sum_retries_when_landing_on_a_node() {
    let sol = unit_interval();
    let m = EquilibriumMeasure::with_order(&sol, 16, PotentialMethod::NodeSum).unwrap();
    let node = (std::f64::consts::PI / 32.0).cos();
    let v = m.potential_real(node).unwrap();
    assert!(v.is_finite());
    assert!((v - 2f64.ln()).abs() < 0.2);
}

#[test]
fn sample_points_serve_every_generation() {
    let pts = samples();
    assert_eq!(pts.len(), 4096);
    for s in ternary() {
        assert!(pts.iter().all(|&x| s.bands.band_containing(x).is_some()));
    }
}
