//! Command-line front end: every solver and matching study as a reproducible
//! command writing CSV plus a JSON sidecar.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dirichlet::{build_e, build_h, ModelMsk, RootDifference};
use crate::dispersion::omega_squared;
use crate::etalon::{evaluate_etalon_grid, EtalonKind};
use crate::field::Grid;
use crate::hardy::{hardy, inner_scale, HardyQuery};
use crate::matching::{self, Scenario, ScenarioKind};
use crate::series::{self, HolomorphicSeed, Part, SeriesOrder};
use crate::spectral::{self, Mode, SineSeriesState};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ACCURACY: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] crate::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Numeric(crate::Error::Domain(_)) => EXIT_USAGE,
            Self::Numeric(_) => EXIT_ACCURACY,
            Self::Io { .. } => EXIT_IO,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Debug, Parser)]
#[command(name = "rod-asymptotics", version, about = "Singular solutions of the compressed-rod equation")]
pub struct Cli {
    /// CSV destination; `<out>.json` receives the run metadata. Standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Dispersion relation ω² = k² − ε²k⁴ on a wavenumber range.
    Dispersion(DispersionArgs),
    /// Hinged rod evolved by the sine spectral solver.
    SolveRod(SolveRodArgs),
    /// Whole-line etalon solutions by Fourier quadrature.
    Etalon(EtalonArgs),
    /// Generalised Hardy integral at one point.
    Hardy(HardyArgs),
    /// Outer perturbation series of a holomorphic seed.
    Series(SeriesArgs),
    /// Rectangle Dirichlet constructions and the model solution.
    Dirichlet(DirichletArgs),
    /// Matching studies over a list of ε values.
    Match(MatchArgs),
    /// Exact solution of a named scenario.
    Scenario(ScenarioArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Dispersion(_) => "dispersion",
            Self::SolveRod(_) => "solve-rod",
            Self::Etalon(_) => "etalon",
            Self::Hardy(_) => "hardy",
            Self::Series(_) => "series",
            Self::Dirichlet(_) => "dirichlet",
            Self::Match(_) => "match",
            Self::Scenario(_) => "scenario",
        }
    }
}

/// Lattice flags; unset values take per-command defaults.
#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub y_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y_max: Option<f64>,
    #[arg(long)]
    pub ny: Option<usize>,
}

impl GridArgs {
    fn resolve(&self, x: (f64, f64), y: (f64, f64)) -> CliResult<Grid> {
        Ok(Grid::new(
            self.x_min.unwrap_or(x.0),
            self.x_max.unwrap_or(x.1),
            self.nx.unwrap_or(41),
            self.y_min.unwrap_or(y.0),
            self.y_max.unwrap_or(y.1),
            self.ny.unwrap_or(11),
        )?)
    }
}

fn check_within_rod(grid: &Grid, half_length: f64) -> CliResult<()> {
    let slack = 1e-12 * half_length;
    if grid.x_min < -half_length - slack || grid.x_max > half_length + slack {
        return usage(format!(
            "x range [{}, {}] leaves the rod [-{half_length}, {half_length}]",
            grid.x_min, grid.x_max
        ));
    }
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct DispersionArgs {
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 12.0)]
    pub k_max: f64,
    #[arg(long, default_value_t = 121)]
    pub nk: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RodData {
    /// Tolstov periodic data on L = π, given at y = −1.
    Tolstov,
    /// One sine mode with amplitude `a` and velocity `b` at y = −1.
    Mode,
}

#[derive(Debug, Args, Serialize)]
pub struct SolveRodArgs {
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value = "tolstov")]
    pub data: RodData,
    #[arg(long, default_value_t = 60)]
    pub harmonics: usize,
    /// Mode index for `--data mode`.
    #[arg(long, default_value_t = 1)]
    pub mode: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, default_value_t = PI)]
    pub half_length: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct EtalonArgs {
    /// pole-re, pole-im, root-d2 or root.
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct HardyArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub nu: f64,
    #[arg(long, default_value_t = 3.0)]
    pub m: f64,
    #[arg(long = "X", default_value_t = 0.0, allow_negative_numbers = true)]
    pub big_x: f64,
    #[arg(long = "Y", default_value_t = 0.0, allow_negative_numbers = true)]
    pub big_y: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Report outer coordinates `x = ε^{2/3}X`, `y = ε^{2/3}Y`.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct SeriesArgs {
    /// pole-re, pole-im, root or tolstov.
    #[arg(long)]
    pub seed: String,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1)]
    pub order: usize,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirichletField {
    /// Harmonic H with the root function's traces on [−L, L] × [−3, 1].
    H,
    /// S = Q − H.
    S,
    /// Harmonic E with side traces c₁ + c₂y.
    E,
    /// Model solution evolved from S's Cauchy data at y = −1.
    Msk,
}

#[derive(Debug, Args, Serialize)]
pub struct DirichletArgs {
    #[arg(long, value_enum)]
    pub field: DirichletField,
    #[arg(long, default_value_t = 3.0)]
    pub half_length: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub c1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c2: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub y_top: f64,
    #[arg(long, default_value_t = crate::dirichlet::DEFAULT_TERMS)]
    pub terms: usize,
    /// Required for `--field msk`.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Study {
    Outer,
    Inner,
    Overlap,
    Growth,
    Wavenumber,
}

#[derive(Debug, Args, Serialize)]
pub struct MatchArgs {
    /// pole-re, pole-im, tolstov, root-etalon or model-msk.
    #[arg(long)]
    pub scenario: String,
    #[arg(long, value_enum)]
    pub study: Study,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05")]
    pub epsilons: Vec<f64>,
    /// Inner box half-width in stretched units.
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
    /// Outer annulus radii; the inner one defaults to 3ε^{2/3}.
    #[arg(long)]
    pub r_in: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub r_out: f64,
    #[arg(long, default_value_t = 0)]
    pub order: usize,
    #[arg(long, default_value_t = 8.0)]
    pub threshold: f64,
    /// Rows of the growth scan.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "-0.5,-0.25,0,0.1,0.2,0.3,0.4,0.5")]
    pub y_values: Vec<f64>,
    /// Row of the wavenumber study.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub y: f64,
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ScenarioArgs {
    /// pole-re, pole-im, tolstov, root-etalon or model-msk.
    pub name: String,
    #[arg(long)]
    pub epsilon: f64,
    /// Evaluate a single row at this height instead of a lattice.
    #[arg(long, allow_negative_numbers = true)]
    pub y: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub shift: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

/// CSV content with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(extra: &[&'static str]) -> Self {
        let mut header = vec!["x", "y", "value"];
        header.extend_from_slice(extra);
        Self { header, rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Shortest decimal that round-trips the value rounded to 12 significant digits.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    if rounded == 0.0 {
        return "0".into();
    }
    if (1e-6..1e16).contains(&rounded.abs()) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

#[derive(Debug, Serialize)]
struct Sidecar<'a> {
    command: &'static str,
    config: &'a Command,
    argv: Vec<String>,
    paper_scenario: String,
    versions: Versions,
}

#[derive(Debug, Serialize)]
struct Versions {
    #[serde(rename = "rod-asymptotics")]
    crate_version: &'static str,
    format: u32,
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli, &argv) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, argv: &[OsString]) -> CliResult<()> {
    let (table, scenario) = compute(&cli.command)?;
    let csv = table.to_csv();
    match &cli.out {
        None => {
            io::stdout()
                .write_all(csv.as_bytes())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
        }
        Some(path) => {
            let sidecar = Sidecar {
                command: cli.command.name(),
                config: &cli.command,
                argv: argv.iter().map(|a| a.to_string_lossy().into_owned()).collect(),
                paper_scenario: scenario,
                versions: Versions {
                    crate_version: env!("CARGO_PKG_VERSION"),
                    format: 1,
                },
            };
            let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serialises") + "\n";
            write_atomically(path, csv.as_bytes())?;
            write_atomically(&sidecar_path(path), json.as_bytes())?;
        }
    }
    Ok(())
}

/// `<out>.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_atomically(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let io_err = |source| CliError::Io { path: path.to_path_buf(), source };
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("output path {} has no file name", path.display())))?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = fs::write(&tmp, bytes).and_then(|()| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io_err)
}

fn compute(command: &Command) -> CliResult<(Table, String)> {
    match command {
        Command::Dispersion(a) => dispersion(a),
        Command::SolveRod(a) => solve_rod(a),
        Command::Etalon(a) => etalon(a),
        Command::Hardy(a) => hardy_point(a),
        Command::Series(a) => series_field(a),
        Command::Dirichlet(a) => dirichlet(a),
        Command::Match(a) => match_study(a),
        Command::Scenario(a) => scenario(a),
    }
}

fn positive(name: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        usage(format!("--{name} must be positive, got {v}"))
    }
}

fn dispersion(a: &DispersionArgs) -> CliResult<(Table, String)> {
    positive("epsilon", a.epsilon)?;
    positive("k-max", a.k_max)?;
    if a.nk < 2 {
        return usage("--nk must be at least 2");
    }
    let mut t = Table::new(&["k", "omega2", "rate"]);
    for i in 0..a.nk {
        let k = a.k_max * i as f64 / (a.nk - 1) as f64;
        let w2 = omega_squared(k, a.epsilon);
        t.rows.push(vec![k, 0.0, w2, k, w2, w2.max(0.0).sqrt()]);
    }
    Ok((t, "dispersion relation of the compressed rod".into()))
}

fn grid_rows(grid: &Grid, mut row: impl FnMut(f64, &[f64]) -> CliResult<Vec<f64>>) -> CliResult<Table> {
    let xs: Vec<f64> = (0..grid.nx).map(|i| grid.x(i)).collect();
    let mut t = Table::new(&[]);
    for j in 0..grid.ny {
        let y = grid.y(j);
        for (x, v) in xs.iter().zip(row(y, &xs)?) {
            t.rows.push(vec![*x, y, v]);
        }
    }
    Ok(t)
}

fn solve_rod(a: &SolveRodArgs) -> CliResult<(Table, String)> {
    positive("epsilon", a.epsilon)?;
    match a.data {
        RodData::Tolstov => {
            let grid = a.grid.resolve((-PI, PI), (-1.0, 0.0))?;
            check_within_rod(&grid, PI)?;
            let t = grid_rows(&grid, |y, xs| {
                Ok(series::tolstov_evolved_state(a.harmonics, a.epsilon, y)?.synthesize(xs)?)
            })?;
            Ok((t, "Tolstov periodic data on a hinged rod".into()))
        }
        RodData::Mode => {
            positive("half-length", a.half_length)?;
            if a.mode == 0 {
                return usage("--mode must be at least 1");
            }
            let l = a.half_length;
            let grid = a.grid.resolve((-l, l), (-1.0, 0.0))?;
            check_within_rod(&grid, l)?;
            let initial = SineSeriesState::from_modes(l, -1.0, vec![Mode { n: a.mode, a: a.a, b: a.b }])?;
            let t = grid_rows(&grid, |y, xs| Ok(initial.evolve(a.epsilon, y + 1.0)?.synthesize(xs)?))?;
            Ok((t, "single sine mode on a hinged rod".into()))
        }
    }
}

fn etalon(a: &EtalonArgs) -> CliResult<(Table, String)> {
    let kind: EtalonKind = a.kind.parse()?;
    let grid = a.grid.resolve((-2.0, 2.0), (-1.0, 0.0))?;
    let field = evaluate_etalon_grid(kind, &grid, a.epsilon, a.tol)?;
    let mut t = Table::new(&[]);
    for ((x, y), v) in grid.points().into_iter().zip(field.values) {
        t.rows.push(vec![x, y, v]);
    }
    Ok((t, format!("{kind} etalon solution")))
}

fn hardy_point(a: &HardyArgs) -> CliResult<(Table, String)> {
    let q = HardyQuery::with_exponent(a.nu, a.m, a.big_x, a.big_y)?;
    let v = hardy(q, a.tol)?;
    let scale = match a.epsilon {
        Some(eps) => {
            positive("epsilon", eps)?;
            inner_scale(eps)
        }
        None => 1.0,
    };
    let mut t = Table::new(&["X", "Y", "re", "im"]);
    t.rows
        .push(vec![scale * a.big_x, scale * a.big_y, v.re, a.big_x, a.big_y, v.re, v.im]);
    Ok((t, "generalised Hardy integral".into()))
}

fn holomorphic_seed(name: &str) -> CliResult<HolomorphicSeed> {
    Ok(match name {
        "pole-re" => HolomorphicSeed::pole(Part::Re),
        "pole-im" => HolomorphicSeed::pole(Part::Im),
        "root" => HolomorphicSeed::root(),
        "tolstov" => HolomorphicSeed::tolstov(),
        other => return usage(format!("unknown seed '{other}'")),
    })
}

fn series_field(a: &SeriesArgs) -> CliResult<(Table, String)> {
    positive("epsilon", a.epsilon)?;
    let seed = holomorphic_seed(&a.seed)?;
    let order = SeriesOrder::new(a.order)?;
    let grid = a.grid.resolve((-2.0, 2.0), (-1.0, -0.1))?;
    let t = grid_rows(&grid, |y, xs| {
        Ok(xs
            .par_iter()
            .map(|&x| series::series_eval(&seed, x, y, a.epsilon, order))
            .collect::<crate::Result<Vec<_>>>()?)
    })?;
    Ok((t, format!("outer series of the {} seed", a.seed)))
}

fn dirichlet(a: &DirichletArgs) -> CliResult<(Table, String)> {
    positive("half-length", a.half_length)?;
    let l = a.half_length;
    let (table, label) = match a.field {
        DirichletField::H => {
            let grid = a.grid.resolve((-l, l), (-3.0, 1.0))?;
            check_within_rod(&grid, l)?;
            let h = build_h(l, a.terms)?;
            (grid_rows(&grid, |y, xs| values(xs, |x| h.value(x, y)))?, "harmonic H")
        }
        DirichletField::S => {
            let grid = a.grid.resolve((-l, l), (-1.0, 0.0))?;
            check_within_rod(&grid, l)?;
            let s = RootDifference::new(l, a.terms)?;
            (grid_rows(&grid, |y, xs| values(xs, |x| s.value(x, y)))?, "root difference S = Q - H")
        }
        DirichletField::E => {
            let grid = a.grid.resolve((-l, l), (-1.0, a.y_top))?;
            check_within_rod(&grid, l)?;
            let e = build_e(l, a.c1, a.c2, a.y_top, a.terms)?;
            (grid_rows(&grid, |y, xs| values(xs, |x| e.value(x, y)))?, "harmonic E")
        }
        DirichletField::Msk => {
            let eps = a.epsilon.ok_or_else(|| CliError::Usage("--field msk needs --epsilon".into()))?;
            positive("epsilon", eps)?;
            let grid = a.grid.resolve((-l, l), (-1.0, 0.0))?;
            check_within_rod(&grid, l)?;
            let model = ModelMsk::new(l, a.terms, spectral::DEFAULT_MODES)?;
            (grid_rows(&grid, |y, xs| Ok(model.profile(eps, y, xs)?))?, "model solution")
        }
    };
    Ok((table, label.into()))
}

fn values(xs: &[f64], f: impl Fn(f64) -> crate::Result<f64> + Sync) -> CliResult<Vec<f64>> {
    Ok(xs.par_iter().map(|&x| f(x)).collect::<crate::Result<Vec<_>>>()?)
}

fn scenario_kind(name: &str) -> CliResult<ScenarioKind> {
    Ok(name.parse()?)
}

fn scenario_row_xs(s: &Scenario, samples: usize) -> Vec<f64> {
    let half = if s.half_length.is_finite() { s.half_length } else { 3.0 };
    (0..samples)
        .map(|i| s.shift - half + 2.0 * half * (i as f64 + 0.5) / samples as f64)
        .collect()
}

fn match_study(a: &MatchArgs) -> CliResult<(Table, String)> {
    let kind = scenario_kind(&a.scenario)?;
    if a.epsilons.is_empty() {
        return usage("--epsilons must list at least one value");
    }
    let mut t = match a.study {
        Study::Growth => Table::new(&["epsilon", "x_left", "x_right"]),
        Study::Wavenumber => Table::new(&["epsilon", "k"]),
        _ => Table::new(&["epsilon", "mismatch"]),
    };
    for &eps in &a.epsilons {
        positive("epsilons", eps)?;
        let s = Scenario::new(kind, eps)?;
        match a.study {
            Study::Outer => {
                let r_in = a.r_in.unwrap_or(3.0 * inner_scale(eps));
                let m = matching::outer_mismatch(&s, r_in, a.r_out, a.order)?;
                t.rows.push(vec![r_in, a.order as f64, m.relative(), eps, m.sup_abs]);
            }
            Study::Inner => {
                let m = matching::inner_mismatch(&s, a.radius)?;
                t.rows.push(vec![a.radius, 0.0, m.relative(), eps, m.sup_abs]);
            }
            Study::Overlap => {
                let v = matching::overlap_agreement(&s)?;
                t.rows.push(vec![2.0 * inner_scale(eps), 0.0, v, eps, v]);
            }
            Study::Growth => {
                let xs = scenario_row_xs(&s, a.samples);
                for r in matching::growth_region_scan(&s, &a.y_values, &xs, a.threshold)? {
                    let (l, rr) = r.extent.unwrap_or((f64::NAN, f64::NAN));
                    t.rows.push(vec![(l + rr) / 2.0, r.y, r.width(), eps, l, rr]);
                }
            }
            Study::Wavenumber => {
                if !s.half_length.is_finite() {
                    return usage("the wavenumber study needs a bounded scenario");
                }
                let l = s.half_length;
                let n = a.samples.max(3);
                let xs: Vec<f64> = (0..=n).map(|i| -l + 2.0 * l * i as f64 / n as f64).collect();
                let k = matching::dominant_wavenumber(&s.exact_row(a.y, &xs)?, l)?;
                t.rows.push(vec![0.0, a.y, k, eps, k]);
            }
        }
    }
    Ok((t, format!("{kind} scenario, {:?} study", a.study).to_lowercase()))
}

fn scenario(a: &ScenarioArgs) -> CliResult<(Table, String)> {
    let kind = scenario_kind(&a.name)?;
    let s = Scenario::new(kind, a.epsilon)?.with_shift(a.shift)?;
    let (lo, hi) = if s.half_length.is_finite() {
        (-s.half_length, s.half_length)
    } else {
        (a.shift - 2.0, a.shift + 2.0)
    };
    let grid = match a.y {
        Some(y) => GridArgs {
            y_min: Some(y),
            y_max: Some(y + 1.0),
            ny: Some(2),
            nx: Some(a.grid.nx.unwrap_or(201)),
            ..a.grid.clone()
        }
        .resolve((lo, hi), (y, y + 1.0))?,
        None => a.grid.resolve((lo, hi), (-1.0, 0.0))?,
    };
    if s.half_length.is_finite() {
        check_within_rod(&grid, s.half_length)?;
    }
    let ny = if a.y.is_some() { 1 } else { grid.ny };
    let xs: Vec<f64> = (0..grid.nx).map(|i| grid.x(i)).collect();
    let mut t = Table::new(&[]);
    for j in 0..ny {
        let y = grid.y(j);
        for (x, v) in xs.iter().zip(s.exact_row(y, &xs)?) {
            t.rows.push(vec![*x, y, v]);
        }
    }
    let seed_note = match kind {
        ScenarioKind::ModelMsk => "model solution seeded by the root difference",
        ScenarioKind::Tolstov => "Tolstov periodic data",
        _ => "whole-line etalon",
    };
    Ok((t, format!("{kind}: {seed_note}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(1.1250836837509395), "1.12508368375");
        assert_eq!(format_number(1e-20), "1e-20");
        assert_eq!(format_number(-2.5e300), "-2.5e300");
        assert_eq!(format_number(f64::NAN), "nan");
        assert_eq!(format_number(2.0 / 3.0), "0.666666666667");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), EXIT_USAGE);
        assert_eq!(CliError::Numeric(crate::Error::Domain("x".into())).exit_code(), EXIT_USAGE);
        let acc = crate::Error::Accuracy { estimate: 1.0, tolerance: 0.1 };
        assert_eq!(CliError::Numeric(acc).exit_code(), EXIT_ACCURACY);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("/tmp/a.csv")), PathBuf::from("/tmp/a.csv.json"));
    }
}
