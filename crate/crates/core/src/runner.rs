//! Configuration, per-generation records and CSV export behind the `ifs-eq`
//! command line.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytics::{
    self, CapacityEstimate, EquilibriumMeasure, ExponentialFit, PotentialMethod, CAPACITY_FIT_WINDOW,
};
use crate::error::Error;
use crate::ifs::{AffineMap, GapOrigin, IfsSystem, Interval};
use crate::kernel::{self, GapVariables, KernelEvaluator};
use crate::quadrature::DEFAULT_ORDER;
use crate::solver::{self, EquilibriumSolution, SolverConfig};

/// Overrides `output_dir` from the config file.
pub const OUTPUT_DIR_ENV: &str = "IFS_EQ_OUTPUT_DIR";

/// Default single sample point, as a fraction of the hull width from its
/// left end.
pub const DEFAULT_POINT_FRACTION: f64 = 1.881676423e-6;

const DEFAULT_GRID_POINTS: usize = 1001;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),
    #[error("generation {generation} failed: {source}")]
    Solver { generation: usize, source: Error },
    #[error(transparent)]
    Analysis(#[from] Error),
    #[error("no valid record for generation {0}; run `solve` first")]
    MissingGeneration(usize),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl RunError {
    /// 2 for configuration errors, 3 for numerical failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Solver { .. } | RunError::Analysis(_) => 3,
            RunError::MissingGeneration(_) | RunError::Io { .. } | RunError::Json { .. } | RunError::Csv(_) => 4,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Uniform grid `lo..=hi` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k + 1 == self.count {
                    self.hi
                } else {
                    self.lo + k as f64 * step
                }
            })
            .collect()
    }

    fn over(iv: Interval) -> Self {
        Grid {
            lo: iv.lo,
            hi: iv.hi,
            count: DEFAULT_GRID_POINTS,
        }
    }

    fn check(&self, name: &str, problems: &mut Vec<String>) {
        if self.count == 0 || !(self.lo <= self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            problems.push(format!("{name}: need finite lo <= hi and count >= 1"));
        }
    }
}

impl std::str::FromStr for Grid {
    type Err = String;

    /// `lo:hi:count`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, count] = parts[..] else {
            return Err(format!("expected lo:hi:count, got {s:?}"));
        };
        let bad = |e: &dyn std::fmt::Display| format!("{s:?}: {e}");
        let grid = Grid {
            lo: lo.trim().parse().map_err(|e| bad(&e))?,
            hi: hi.trim().parse().map_err(|e| bad(&e))?,
            count: count.trim().parse().map_err(|e| bad(&e))?,
        };
        let mut problems = Vec::new();
        grid.check("grid", &mut problems);
        match problems.pop() {
            Some(p) => Err(p),
            None => Ok(grid),
        }
    }
}

/// A run, as read from a JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// `[delta, gamma]` per map.
    pub ifs: Vec<[f64; 2]>,
    pub n_max: usize,
    pub quadrature_order: usize,
    pub residual_tol: f64,
    pub max_iterations: usize,
    pub step_clamp: f64,
    pub evaluator: KernelEvaluator,
    pub sample_count: usize,
    pub output_dir: PathBuf,
    pub cache: bool,
    pub potential_method: PotentialMethod,
    /// Single point for the point-sample capacity path.
    pub point_sample: Option<f64>,
    pub omega_grid: Option<Grid>,
    pub potential_grid: Option<Grid>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let solver = SolverConfig::default();
        Self {
            ifs: Vec::new(),
            n_max: 0,
            quadrature_order: DEFAULT_ORDER,
            residual_tol: solver.residual_tol,
            max_iterations: solver.max_iterations,
            step_clamp: solver.step_clamp,
            evaluator: solver.evaluator,
            sample_count: 4096,
            output_dir: PathBuf::from("out"),
            cache: true,
            potential_method: PotentialMethod::default(),
            point_sample: None,
            omega_grid: None,
            potential_grid: None,
        }
    }
}

impl RunConfig {
    pub fn ternary(n_max: usize) -> Self {
        Self {
            ifs: vec![[1.0 / 3.0, -1.0], [1.0 / 3.0, 1.0]],
            n_max,
            ..Self::default()
        }
    }

    /// Reads and validates a config file, applying [`OUTPUT_DIR_ENV`].
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| RunError::Config(vec![format!("{}: {e}", path.display())]))?;
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            cfg.output_dir = PathBuf::from(dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Every problem found, in one report.
    pub fn validate(&self) -> Result<(), RunError> {
        let mut problems = Vec::new();
        let ifs = match self.ifs_system() {
            Ok(ifs) => Some(ifs),
            Err(e) => {
                problems.push(format!("ifs: {e}"));
                None
            }
        };
        if self.n_max == 0 {
            problems.push("n_max must be at least 1".into());
        }
        if let Err(Error::InvalidSolverConfig(msg)) = self.solver_config().validate() {
            problems.push(msg);
        }
        if self.sample_count == 0 {
            problems.push("sample_count must be positive".into());
        }
        if let Some(g) = &self.omega_grid {
            g.check("omega_grid", &mut problems);
        }
        if let Some(g) = &self.potential_grid {
            g.check("potential_grid", &mut problems);
        }
        if let (Some(x), Some(ifs)) = (self.point_sample, &ifs) {
            if !ifs.hull().contains(x) {
                problems.push(format!("point_sample {x} is outside the hull"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(RunError::Config(problems))
        }
    }

    pub fn ifs_system(&self) -> crate::Result<IfsSystem> {
        IfsSystem::new(self.ifs.iter().map(|&[d, g]| AffineMap::new(d, g)).collect())
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            residual_tol: self.residual_tol,
            max_iterations: self.max_iterations,
            step_clamp: self.step_clamp,
            quadrature_order: self.quadrature_order,
            evaluator: self.evaluator,
        }
    }

    /// SHA-256 over the parameters that determine a solution.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::json!({
            "ifs": self.ifs,
            "quadrature_order": self.quadrature_order,
            "residual_tol": self.residual_tol,
            "step_clamp": self.step_clamp,
            "evaluator": self.evaluator,
        });
        Sha256::digest(canonical.to_string().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn record_path(&self, generation: usize) -> PathBuf {
        self.output_dir.join(format!("gen_{generation}.json"))
    }

    fn hull(&self) -> crate::Result<Interval> {
        Ok(self.ifs_system()?.hull())
    }

    pub fn point(&self) -> crate::Result<f64> {
        let hull = self.hull()?;
        Ok(self
            .point_sample
            .unwrap_or(hull.lo + DEFAULT_POINT_FRACTION * hull.width()))
    }
}

/// One `gen_<n>.json` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub fingerprint: String,
    pub config: RunConfig,
    pub solution: EquilibriumSolution,
}

/// Writes `bytes` next to `path` and renames over it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn read_record(cfg: &RunConfig, generation: usize) -> Result<Option<GenerationRecord>, RunError> {
    let path = cfg.record_path(generation);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(io_err(&path)(e)),
    };
    let record: GenerationRecord = serde_json::from_str(&text).map_err(|source| RunError::Json { path, source })?;
    Ok((record.fingerprint == cfg.fingerprint() && record.solution.generation == generation).then_some(record))
}

fn write_record(cfg: &RunConfig, solution: &EquilibriumSolution) -> Result<(), RunError> {
    let path = cfg.record_path(solution.generation);
    let record = GenerationRecord {
        fingerprint: cfg.fingerprint(),
        config: cfg.clone(),
        solution: solution.clone(),
    };
    let text = serde_json::to_string_pretty(&record).map_err(|source| RunError::Json {
        path: path.clone(),
        source,
    })?;
    write_atomic(&path, text.as_bytes())
}

/// One solved generation and whether it came from a record.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solution: EquilibriumSolution,
    pub from_cache: bool,
}

/// Solves generations `1..=n_max`, reusing records whose fingerprint matches.
/// Generations before a failure keep their records.
pub fn solve(cfg: &RunConfig) -> Result<Vec<SolveOutcome>, RunError> {
    cfg.validate()?;
    let ifs = cfg.ifs_system()?;
    let solver_cfg = cfg.solver_config();
    let mut out: Vec<SolveOutcome> = Vec::with_capacity(cfg.n_max);
    for n in 1..=cfg.n_max {
        if cfg.cache {
            if let Some(record) = read_record(cfg, n)? {
                let mut solution = record.solution;
                solution.iterations_used = 0;
                out.push(SolveOutcome {
                    solution,
                    from_cache: true,
                });
                continue;
            }
        }
        let failed = |source| RunError::Solver { generation: n, source };
        let bands = ifs.generate_bands(n).map_err(failed)?;
        let initial = match out.last() {
            Some(prev) => solver::warm_start(&bands, &prev.solution.vars),
            None => GapVariables::zeros(&bands),
        };
        let solution = solver::solve_generation(&bands, &initial, &solver_cfg).map_err(failed)?;
        write_record(cfg, &solution)?;
        out.push(SolveOutcome {
            solution,
            from_cache: false,
        });
    }
    Ok(out)
}

/// Reads the records of generations `1..=n_max`.
pub fn load_solutions(cfg: &RunConfig) -> Result<Vec<EquilibriumSolution>, RunError> {
    (1..=cfg.n_max)
        .map(|n| {
            read_record(cfg, n)?
                .map(|r| r.solution)
                .ok_or(RunError::MissingGeneration(n))
        })
        .collect()
}

/// Fixed-width decimal with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), RunError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| io_err(path)(e.into_error()))?;
    write_atomic(path, &bytes)
}

/// Data file selector for `figures`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    #[value(alias = "fig1")]
    Residuals,
    #[value(alias = "fig2")]
    Jacobian,
    #[value(alias = "fig3")]
    Lambda,
    #[value(alias = "fig4")]
    Omega,
    #[value(alias = "fig5")]
    OmegaOfX,
    #[value(alias = "fig6")]
    GapMeasure,
    #[value(alias = "fig7")]
    Potential,
    #[value(alias = "fig8", alias = "table1")]
    Capacity,
    All,
}

impl Figure {
    const EACH: [Figure; 8] = [
        Figure::Residuals,
        Figure::Jacobian,
        Figure::Lambda,
        Figure::Omega,
        Figure::OmegaOfX,
        Figure::GapMeasure,
        Figure::Potential,
        Figure::Capacity,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            Figure::Residuals => "residuals_before_after.csv",
            Figure::Jacobian => "jacobian_decay.csv",
            Figure::Lambda => "lambda_vs_n.csv",
            Figure::Omega => "Omega_vs_n.csv",
            Figure::OmegaOfX => "Omega_of_x.csv",
            Figure::GapMeasure => "gapmeasure_fit.csv",
            Figure::Potential => "potential_profile.csv",
            Figure::Capacity => "capacity_table.csv",
            Figure::All => "",
        }
    }
}

/// Identifiers that follow each gap across generations: an old gap keeps the
/// id it had in the previous generation, a new gap gets the next free id.
pub fn gap_lines(solutions: &[EquilibriumSolution]) -> Vec<Vec<usize>> {
    let mut next = 0;
    let mut lines: Vec<Vec<usize>> = Vec::with_capacity(solutions.len());
    for s in solutions {
        let ids = s
            .bands
            .genealogy()
            .iter()
            .map(|origin| match (origin, lines.last()) {
                (GapOrigin::Old(p), Some(prev)) => prev[*p],
                _ => {
                    next += 1;
                    next - 1
                }
            })
            .collect();
        lines.push(ids);
    }
    lines
}

fn fit_columns(fit: Option<&ExponentialFit>) -> Vec<String> {
    match fit {
        Some(f) => vec![fmt_float(f.a), fmt_float(f.b), fmt_float(f.c)],
        None => vec![String::new(); 3],
    }
}

/// Both capacity paths over all generations.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityTable {
    pub point: f64,
    pub point_values: Vec<f64>,
    pub mean_values: Vec<f64>,
    pub point_estimate: Option<CapacityEstimate>,
    pub mean_estimate: Option<CapacityEstimate>,
}

pub fn capacity_table(cfg: &RunConfig, solutions: &[EquilibriumSolution]) -> Result<CapacityTable, RunError> {
    let point = cfg.point()?;
    let deepest = &solutions.last().ok_or(RunError::MissingGeneration(1))?.bands;
    let points = analytics::attractor_sample_points(deepest, cfg.sample_count);
    let mut point_values = Vec::with_capacity(solutions.len());
    let mut mean_values = Vec::with_capacity(solutions.len());
    for s in solutions {
        let m = EquilibriumMeasure::new(s, cfg.potential_method)?;
        point_values.push(m.potential_real(point)?);
        mean_values.push(analytics::mean_potential(&m, &points)?.mean);
    }
    let estimate = |values: &[f64]| -> Result<Option<CapacityEstimate>, RunError> {
        if values.len() < CAPACITY_FIT_WINDOW {
            return Ok(None);
        }
        let per_generation = solutions
            .iter()
            .map(|s| s.generation)
            .zip(values.iter().copied())
            .collect();
        Ok(Some(CapacityEstimate::from_potentials(per_generation)?))
    };
    Ok(CapacityTable {
        point,
        point_estimate: estimate(&point_values)?,
        mean_estimate: estimate(&mean_values)?,
        point_values,
        mean_values,
    })
}

fn write_capacity_table(path: &Path, solutions: &[EquilibriumSolution], table: &CapacityTable) -> Result<(), RunError> {
    let header = [
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
    ];
    let tail = |e: &Option<CapacityEstimate>| {
        let mut cols = fit_columns(e.as_ref().and_then(|e| e.fit.as_ref()));
        cols.push(e.as_ref().map_or(String::new(), |e| fmt_float(e.extrapolated_capacity)));
        cols
    };
    let point_tail = tail(&table.point_estimate);
    let mean_tail = tail(&table.mean_estimate);
    let rows = solutions
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let mut row = vec![
                s.generation.to_string(),
                fmt_float(table.point_values[k]),
                fmt_float(table.mean_values[k]),
            ];
            row.extend(point_tail.iter().cloned());
            row.extend(mean_tail.iter().cloned());
            row
        })
        .collect();
    write_csv(path, &header, rows)
}

fn figure_rows(
    cfg: &RunConfig,
    which: Figure,
    solutions: &[EquilibriumSolution],
) -> Result<(Vec<&'static str>, Vec<Vec<String>>), RunError> {
    let hull = cfg.hull()?;
    let lines = gap_lines(solutions);
    let mut rows = Vec::new();
    let header = match which {
        Figure::Residuals => {
            for s in solutions {
                for (i, (b, a)) in s.initial_residuals.iter().zip(&s.residuals).enumerate() {
                    rows.push(vec![
                        s.generation.to_string(),
                        i.to_string(),
                        fmt_float(*b),
                        fmt_float(*a),
                    ]);
                }
            }
            vec!["generation", "gap", "residual_before", "residual_after"]
        }
        Figure::Jacobian => {
            let s = solutions.last().ok_or(RunError::MissingGeneration(1))?;
            let rule = s.rule();
            let (_, jac) = kernel::residuals_and_jacobian(&s.bands, &s.vars, &rule, cfg.evaluator)?;
            for (i, row) in jac.iter().enumerate() {
                for (m, d) in row.iter().enumerate() {
                    rows.push(vec![
                        s.generation.to_string(),
                        i.to_string(),
                        m.to_string(),
                        (i as i64 - m as i64).to_string(),
                        fmt_float(d.abs()),
                    ]);
                }
            }
            vec!["generation", "i", "m", "i_minus_m", "abs_derivative"]
        }
        Figure::Lambda | Figure::Omega => {
            for (s, ids) in solutions.iter().zip(&lines) {
                for (m, id) in ids.iter().enumerate() {
                    let value = match which {
                        Figure::Lambda => s.vars.lambdas()[m],
                        _ => s.cumulative[m],
                    };
                    let origin = match s.bands.genealogy()[m] {
                        GapOrigin::Old(_) => "old",
                        GapOrigin::New => "new",
                    };
                    rows.push(vec![
                        s.generation.to_string(),
                        m.to_string(),
                        id.to_string(),
                        origin.to_string(),
                        fmt_float(value),
                    ]);
                }
            }
            let name = if which == Figure::Lambda { "lambda" } else { "Omega" };
            vec!["generation", "gap", "line_id", "origin", name]
        }
        Figure::OmegaOfX => {
            let grid = cfg.omega_grid.unwrap_or(Grid::over(hull)).points();
            for s in solutions {
                for &x in &grid {
                    let v = analytics::integrated_measure_at(x, s)?;
                    rows.push(vec![s.generation.to_string(), fmt_float(x), fmt_float(v)]);
                }
            }
            vec!["generation", "x", "Omega"]
        }
        Figure::GapMeasure => {
            // The gap of generation 1 lying furthest left, followed down.
            let series: Vec<(usize, usize, f64)> = solutions
                .iter()
                .zip(&lines)
                .filter_map(|(s, ids)| {
                    let m = ids.iter().position(|&id| id == 0)?;
                    Some((s.generation, m, s.cumulative[m]))
                })
                .collect();
            let window = &series[series.len().saturating_sub(CAPACITY_FIT_WINDOW)..];
            let pts: Vec<(f64, f64)> = window.iter().map(|&(n, _, v)| (n as f64, v)).collect();
            let fit = analytics::fit_exponential(&pts).ok();
            for &(n, m, v) in &series {
                let mut row = vec![n.to_string(), m.to_string(), fmt_float(v)];
                row.extend(fit_columns(fit.as_ref()));
                row.push(fit.map_or(String::new(), |f| fmt_float(f.eval(n as f64))));
                rows.push(row);
            }
            vec!["generation", "gap", "Omega", "fit_a", "fit_b", "fit_c", "fit_value"]
        }
        Figure::Potential => {
            let grid = cfg.potential_grid.unwrap_or(Grid::over(hull)).points();
            for s in solutions {
                let m = EquilibriumMeasure::new(s, cfg.potential_method)?;
                for &x in &grid {
                    rows.push(vec![
                        s.generation.to_string(),
                        fmt_float(x),
                        fmt_float(m.potential_real(x)?),
                    ]);
                }
            }
            vec!["generation", "x", "V"]
        }
        Figure::Capacity | Figure::All => unreachable!("handled by the caller"),
    };
    Ok((header, rows))
}

/// Writes the data files for `which`, returning their paths.
pub fn figures(cfg: &RunConfig, which: Figure) -> Result<Vec<PathBuf>, RunError> {
    cfg.validate()?;
    let solutions = load_solutions(cfg)?;
    let selected: Vec<Figure> = match which {
        Figure::All => Figure::EACH.to_vec(),
        one => vec![one],
    };
    let mut written = Vec::new();
    for fig in selected {
        let path = cfg.output_dir.join(fig.file_name());
        if fig == Figure::Capacity {
            let table = capacity_table(cfg, &solutions)?;
            write_capacity_table(&path, &solutions, &table)?;
        } else {
            let (header, rows) = figure_rows(cfg, fig, &solutions)?;
            write_csv(&path, &header, rows)?;
        }
        written.push(path);
    }
    Ok(written)
}

/// Where `potential` is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSpec {
    Grid(Grid),
    /// One point per line, `x` or `x,y`.
    File(PathBuf),
}

impl std::str::FromStr for PointSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.contains(':') && !Path::new(s).exists() {
            s.parse().map(PointSpec::Grid)
        } else {
            Ok(PointSpec::File(PathBuf::from(s)))
        }
    }
}

impl PointSpec {
    pub fn points(&self) -> Result<Vec<Complex64>, RunError> {
        match self {
            PointSpec::Grid(g) => Ok(g.points().into_iter().map(|x| Complex64::new(x, 0.0)).collect()),
            PointSpec::File(path) => {
                let text = fs::read_to_string(path).map_err(io_err(path))?;
                let mut out = Vec::new();
                for (k, line) in text.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let parse = |s: &str| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|e| RunError::Config(vec![format!("{}:{}: {e}", path.display(), k + 1)]))
                    };
                    let z = match line.split_once(',') {
                        Some((re, im)) => Complex64::new(parse(re)?, parse(im)?),
                        None => Complex64::new(parse(line)?, 0.0),
                    };
                    out.push(z);
                }
                Ok(out)
            }
        }
    }
}

/// `V(σⁿ; z)` for every generation and point, written to
/// `potential_points.csv`.
pub fn potential(cfg: &RunConfig, spec: &PointSpec) -> Result<PathBuf, RunError> {
    cfg.validate()?;
    let points = spec.points()?;
    let solutions = load_solutions(cfg)?;
    let mut rows = Vec::new();
    for s in &solutions {
        let m = EquilibriumMeasure::new(s, cfg.potential_method)?;
        for z in &points {
            rows.push(vec![
                s.generation.to_string(),
                fmt_float(z.re),
                fmt_float(z.im),
                fmt_float(m.potential(*z)?),
            ]);
        }
    }
    let path = cfg.output_dir.join("potential_points.csv");
    write_csv(&path, &["generation", "re", "im", "V"], rows)?;
    Ok(path)
}

#[derive(Debug, Parser)]
#[command(
    name = "ifs-eq",
    version,
    about = "Equilibrium measures and capacities of IFS Cantor sets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve every generation up to n_max and write gen_<n>.json records.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write figure data files from existing records.
    Figures {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        which: Figure,
    },
    /// Tabulate on-set potentials and extrapolate the capacity.
    Capacity {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate potentials at given points (`lo:hi:count` or a file).
    Potential {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        points: PointSpec,
    },
}

/// Runs one subcommand; the returned text is a human-readable summary.
pub fn execute(cli: &Cli) -> Result<String, RunError> {
    let mut out = String::new();
    match &cli.command {
        Command::Solve { config } => {
            let cfg = RunConfig::load(config)?;
            for o in solve(&cfg)? {
                let s = &o.solution;
                out += &format!(
                    "n={} gaps={} iterations={}{} max|K|={:.3e} mass-1={:.3e}\n",
                    s.generation,
                    s.vars.len(),
                    s.iterations_used,
                    if o.from_cache { " (cached)" } else { "" },
                    s.max_residual(),
                    s.total_mass() - 1.0,
                );
            }
        }
        Command::Figures { config, which } => {
            let cfg = RunConfig::load(config)?;
            for p in figures(&cfg, *which)? {
                out += &format!("wrote {}\n", p.display());
            }
        }
        Command::Capacity { config } => {
            let cfg = RunConfig::load(config)?;
            let solutions = load_solutions(&cfg)?;
            let table = capacity_table(&cfg, &solutions)?;
            let path = cfg.output_dir.join(Figure::Capacity.file_name());
            write_capacity_table(&path, &solutions, &table)?;
            out += &format!("{:>3} {:>20} {:>20}\n", "n", "V_point", "V_mean");
            for (k, s) in solutions.iter().enumerate() {
                out += &format!(
                    "{:>3} {:>20.12} {:>20.12}\n",
                    s.generation, table.point_values[k], table.mean_values[k]
                );
            }
            for (name, est) in [("point", &table.point_estimate), ("mean", &table.mean_estimate)] {
                match est {
                    Some(e) => out += &format!("capacity ({name}): {:.10}\n", e.extrapolated_capacity),
                    None => out += &format!("capacity ({name}): needs {CAPACITY_FIT_WINDOW} generations\n"),
                }
            }
            out += &format!("wrote {}\n", path.display());
        }
        Command::Potential { config, points } => {
            let cfg = RunConfig::load(config)?;
            out += &format!("wrote {}\n", potential(&cfg, points)?.display());
        }
    }
    Ok(out)
}
