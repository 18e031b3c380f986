use std::fs;
use std::path::Path;
use std::process::Command;

use ifs_equilibrium::runner::{self, Figure, RunError};
use ifs_equilibrium::RunConfig;

fn config(dir: &Path) -> RunConfig {
    RunConfig {
        output_dir: dir.to_path_buf(),
        quadrature_order: 256,
        sample_count: 256,
        ..RunConfig::ternary(4)
    }
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn records_round_trip_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let solved = runner::solve(&cfg).unwrap();
    let loaded = runner::load_solutions(&cfg).unwrap();
    assert_eq!(solved.len(), 4);
    for (o, l) in solved.iter().zip(&loaded) {
        assert!(!o.from_cache);
        assert_eq!(&o.solution, l);
        assert!(o.solution.max_residual() < 1e-12);
    }
}

#[test]
fn cache_is_reused_only_for_the_same_fingerprint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    runner::solve(&cfg).unwrap();
    let again = runner::solve(&cfg).unwrap();
    assert!(again.iter().all(|o| o.from_cache && o.solution.iterations_used == 0));

    let changed = [
        RunConfig {
            quadrature_order: 257,
            ..cfg.clone()
        },
        RunConfig {
            residual_tol: 1e-13,
            ..cfg.clone()
        },
        RunConfig {
            ifs: vec![[0.3, -1.0], [1.0 / 3.0, 1.0]],
            ..cfg.clone()
        },
    ];
    for c in &changed {
        assert_ne!(c.fingerprint(), cfg.fingerprint());
        let outcomes = runner::solve(&RunConfig {
            cache: true,
            ..c.clone()
        })
        .unwrap();
        assert!(outcomes.iter().all(|o| !o.from_cache));
        // Put the original records back for the next variant.
        runner::solve(&RunConfig {
            cache: false,
            ..cfg.clone()
        })
        .unwrap();
    }

    let uncached = runner::solve(&RunConfig { cache: false, ..cfg }).unwrap();
    assert!(uncached.iter().all(|o| !o.from_cache));
}

#[test]
fn invalid_config_reports_everything_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = RunConfig {
        ifs: vec![[1.2, -1.0], [0.3, 1.0]],
        n_max: 0,
        sample_count: 0,
        output_dir: out.clone(),
        ..RunConfig::default()
    };
    let err = runner::solve(&cfg).unwrap_err();
    let RunError::Config(problems) = &err else {
        panic!("{err}");
    };
    assert_eq!(problems.len(), 3, "{problems:?}");
    assert_eq!(err.exit_code(), 2);
    assert!(!out.exists());
}

#[test]
fn figures_need_records() {
    let dir = tempfile::tempdir().unwrap();
    let err = runner::figures(&config(dir.path()), Figure::All).unwrap_err();
    assert!(matches!(err, RunError::MissingGeneration(1)));
    assert_eq!(err.exit_code(), 4);
}

#[test]
fn every_figure_file_has_a_fixed_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    runner::solve(&cfg).unwrap();
    let files = runner::figures(&cfg, Figure::All).unwrap();
    assert_eq!(files.len(), 8);
    let expect: [(&str, &[&str], usize); 8] = [
        (
            "residuals_before_after.csv",
            &["generation", "gap", "residual_before", "residual_after"],
            1 + 3 + 7 + 15,
        ),
        (
            "jacobian_decay.csv",
            &["generation", "i", "m", "i_minus_m", "abs_derivative"],
            15 * 15,
        ),
        (
            "lambda_vs_n.csv",
            &["generation", "gap", "line_id", "origin", "lambda"],
            26,
        ),
        (
            "Omega_vs_n.csv",
            &["generation", "gap", "line_id", "origin", "Omega"],
            26,
        ),
        ("Omega_of_x.csv", &["generation", "x", "Omega"], 4 * 1001),
        (
            "gapmeasure_fit.csv",
            &["generation", "gap", "Omega", "fit_a", "fit_b", "fit_c", "fit_value"],
            4,
        ),
        ("potential_profile.csv", &["generation", "x", "V"], 4 * 1001),
        (
            "capacity_table.csv",
            &[
                "n",
                "V_point",
                "V_mean",
                "point_fit_a",
                "point_fit_b",
                "point_fit_c",
                "point_capacity",
                "mean_fit_a",
                "mean_fit_b",
                "mean_fit_c",
                "mean_capacity",
            ],
            4,
        ),
    ];
    for (name, header, rows) in expect {
        let (h, r) = read_csv(&dir.path().join(name));
        assert_eq!(h, header, "{name}");
        assert_eq!(r.len(), rows, "{name}");
    }
    // Floats carry 17 significant digits and parse back to the same bits.
    let (_, rows) = read_csv(&dir.path().join("lambda_vs_n.csv"));
    let loaded = runner::load_solutions(&cfg).unwrap();
    for row in rows {
        let n: usize = row[0].parse().unwrap();
        let m: usize = row[1].parse().unwrap();
        let mantissa = row[4].split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.len(), 18, "{}", row[4]);
        assert_eq!(row[4].parse::<f64>().unwrap(), loaded[n - 1].vars.lambdas()[m]);
    }
    // Gap lines: the generation-1 gap is line 0 and sits at index M·m + M − 1.
    let (_, rows) = read_csv(&dir.path().join("Omega_vs_n.csv"));
    let line0: Vec<(usize, usize)> = rows
        .iter()
        .filter(|r| r[2] == "0")
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    assert_eq!(line0, vec![(1, 0), (2, 1), (3, 3), (4, 7)]);
}

#[test]
fn asymmetric_lambda_lines_stay_below_a_tenth() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        ifs: vec![[0.8, -1.0], [0.1, 1.0]],
        n_max: 5,
        quadrature_order: 512,
        sample_count: 256,
        output_dir: dir.path().to_path_buf(),
        ..RunConfig::default()
    };
    runner::solve(&cfg).unwrap();
    runner::figures(&cfg, Figure::Lambda).unwrap();
    let (_, rows) = read_csv(&dir.path().join("lambda_vs_n.csv"));
    assert_eq!(rows.len(), 1 + 3 + 7 + 15 + 31);
    assert!(rows.iter().all(|r| r[4].parse::<f64>().unwrap().abs() < 0.1));
}

#[test]
fn solver_failure_keeps_earlier_generations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        ifs: vec![[0.8, -1.0], [0.1, 1.0]],
        n_max: 3,
        max_iterations: 1,
        quadrature_order: 256,
        output_dir: dir.path().to_path_buf(),
        ..RunConfig::default()
    };
    let err = runner::solve(&cfg).unwrap_err();
    assert!(matches!(err, RunError::Solver { generation: 2, .. }), "{err}");
    assert_eq!(err.exit_code(), 3);
    assert!(cfg.record_path(1).exists());
    assert!(!cfg.record_path(2).exists());
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ifs-eq"))
}

#[test]
fn command_line_round() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.json");
    let out = dir.path().join("from-env");
    fs::write(
        &cfg_path,
        r#"{"ifs": [[0.3333333333333333, -1.0], [0.3333333333333333, 1.0]], "n_max": 4,
            "quadrature_order": 256, "sample_count": 128, "output_dir": "ignored"}"#,
    )
    .unwrap();
    let run = |args: &[&str]| {
        bin()
            .args(args)
            .arg("--config")
            .arg(&cfg_path)
            .env("IFS_EQ_OUTPUT_DIR", &out)
            .output()
            .unwrap()
    };

    let early = run(&["figures", "--which", "fig8"]);
    assert_eq!(early.status.code(), Some(4));

    let solve = run(&["solve"]);
    assert!(solve.status.success(), "{}", String::from_utf8_lossy(&solve.stderr));
    assert!(out.join("gen_4.json").exists());
    let again = run(&["solve"]);
    assert!(String::from_utf8_lossy(&again.stdout).matches("(cached)").count() == 4);

    assert!(run(&["figures", "--which", "table1"]).status.success());
    assert!(out.join("capacity_table.csv").exists());
    let cap = run(&["capacity"]);
    assert!(String::from_utf8_lossy(&cap.stdout).contains("capacity (mean)"));

    let pts = dir.path().join("points.txt");
    fs::write(&pts, "0.0\n# comment\n0.5, 0.25\n").unwrap();
    assert!(run(&["potential", "--points", pts.to_str().unwrap()]).status.success());
    let (_, rows) = read_csv(&out.join("potential_points.csv"));
    assert_eq!(rows.len(), 4 * 2);
    assert!(run(&["potential", "--points", "-2:2:9"]).status.success());
    let (_, rows) = read_csv(&out.join("potential_points.csv"));
    assert_eq!(rows.len(), 4 * 9);

    fs::write(&cfg_path, r#"{"ifs": [[1.2, -1.0], [0.3, 1.0]], "n_max": 2}"#).unwrap();
    let bad = run(&["solve"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("contraction ratio 1.2"));
}
