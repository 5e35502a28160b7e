//! Front end shared by the `fraclap` binary: `key = value` configuration,
//! command dispatch and CSV emission.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::control::{cross_check, ControlConfig, StepRule};
use crate::discretize::{assemble, Grid, GridFunction};
use crate::error::{Error, Result};
use crate::forward::{solve_poisson, validate_forward};
use crate::limitlab::{
    gamma_check, geometric_ladder, run_sweep, scale_to_norm, GammaTolerances, SweepConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

/// Order used by single-order commands when the configuration holds a ladder.
pub const DEFAULT_ORDER: f64 = 0.5;
/// Tolerance on the finest relative error reported by `validate`.
pub const VALIDATE_TOL: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Solve,
    Control,
    Sweep,
    Gamma,
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "validate" => Command::Validate,
            "solve" => Command::Solve,
            "control" => Command::Control,
            "sweep" => Command::Sweep,
            "gamma" => Command::Gamma,
            other => return Err(Error::config(format!("unknown command `{other}`"))),
        })
    }
}

/// Named right-hand sides, written in the coordinate `x̂ ∈ (-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rhs {
    /// `1`
    One,
    /// `cos(π x̂ / 2)`
    Sine,
    /// `1 - |x̂|`
    Hat,
}

impl Rhs {
    pub fn sample(self, grid: &Grid) -> GridFunction {
        GridFunction(
            (0..grid.n())
                .map(|i| {
                    let t = grid.reference_coordinate(i);
                    match self {
                        Rhs::One => 1.0,
                        Rhs::Sine => (0.5 * std::f64::consts::PI * t).cos(),
                        Rhs::Hat => 1.0 - t.abs(),
                    }
                })
                .collect(),
        )
    }
}

impl FromStr for Rhs {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" => Ok(Rhs::One),
            "sine" => Ok(Rhs::Sine),
            "hat" => Ok(Rhs::Hat),
            other => Err(Error::config(format!(
                "unknown rhs preset `{other}` (expected one, sine or hat)"
            ))),
        }
    }
}

/// Quadrature scheme for the singular integral. Only one is implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Stencil,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stencil" => Ok(Scheme::Stencil),
            other => Err(Error::config(format!(
                "unknown scheme `{other}` (expected stencil)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Orders {
    Single(f64),
    Ladder(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub x_left: f64,
    pub x_right: f64,
    pub n: usize,
    pub orders: Orders,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub step_rule: StepRule,
    pub scheme: Scheme,
    pub seed: u64,
    /// `0` lets the pool pick the thread count
    pub workers: usize,
    pub out_dir: PathBuf,
    pub rhs: Rhs,
}

impl Default for RunConfig {
    fn default() -> Self {
        let control = ControlConfig::default();
        Self {
            x_left: -1.0,
            x_right: 1.0,
            n: 256,
            orders: Orders::Ladder(geometric_ladder(10)),
            mu: control.mu,
            a: control.a,
            b: control.b,
            tol: control.tol,
            max_iter: control.max_iter,
            step_rule: control.step_rule,
            scheme: Scheme::Stencil,
            seed: 0,
            workers: 0,
            out_dir: PathBuf::from("."),
            rhs: Rhs::One,
        }
    }
}

impl RunConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.x_left, self.x_right, self.n)
    }

    pub fn control(&self) -> ControlConfig {
        ControlConfig {
            mu: self.mu,
            a: self.a,
            b: self.b,
            tol: self.tol,
            max_iter: self.max_iter,
            step_rule: self.step_rule,
        }
    }

    pub fn single_order(&self) -> f64 {
        match self.orders {
            Orders::Single(s) => s,
            Orders::Ladder(_) => DEFAULT_ORDER,
        }
    }

    pub fn ladder(&self) -> Vec<f64> {
        match &self.orders {
            Orders::Single(s) => vec![*s],
            Orders::Ladder(list) => list.clone(),
        }
    }
}

/// Command-line values that take precedence over the configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub n: Option<usize>,
    pub s: Option<f64>,
    pub mu: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub tol: Option<f64>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
}

const KEYS: &[&str] = &[
    "x_left",
    "x_right",
    "n",
    "s",
    "s_list",
    "mu",
    "a",
    "b",
    "tol",
    "max_iter",
    "step_rule",
    "scheme",
    "seed",
    "workers",
    "out_dir",
    "rhs",
];

fn config_error(line: Option<usize>, key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        key: Some(key.to_string()),
        message: message.into(),
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e: T::Err| config_error(Some(line), key, format!("cannot parse `{value}`: {e}")))
}

/// Parse `key = value` lines and validate. Equivalent to
/// [`load_config`] without overrides.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    load_config(text, &Overrides::default())
}

pub fn load_config(text: &str, overrides: &Overrides) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut lines: HashMap<&'static str, usize> = HashMap::new();
    let mut single: Option<f64> = None;
    let mut ladder: Option<Vec<f64>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line: Some(line),
            key: None,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let key: &'static str = KEYS
            .iter()
            .find(|&&k| k == key)
            .ok_or_else(|| config_error(Some(line), key, "unknown key"))?;
        if lines.insert(key, line).is_some() {
            return Err(config_error(Some(line), key, "duplicate key"));
        }
        match key {
            "x_left" => cfg.x_left = parse_value(line, key, value)?,
            "x_right" => cfg.x_right = parse_value(line, key, value)?,
            "n" => cfg.n = parse_value(line, key, value)?,
            "s" => single = Some(parse_value(line, key, value)?),
            "s_list" => {
                ladder = Some(
                    value
                        .split(',')
                        .map(|v| parse_value(line, key, v.trim()))
                        .collect::<Result<_>>()?,
                )
            }
            "mu" => cfg.mu = parse_value(line, key, value)?,
            "a" => cfg.a = parse_value(line, key, value)?,
            "b" => cfg.b = parse_value(line, key, value)?,
            "tol" => cfg.tol = parse_value(line, key, value)?,
            "max_iter" => cfg.max_iter = parse_value(line, key, value)?,
            "step_rule" => {
                cfg.step_rule = value
                    .parse()
                    .map_err(|e: Error| with_location(e, line, key))?
            }
            "scheme" => {
                cfg.scheme = value
                    .parse()
                    .map_err(|e: Error| with_location(e, line, key))?
            }
            "seed" => cfg.seed = parse_value(line, key, value)?,
            "workers" => cfg.workers = parse_value(line, key, value)?,
            "out_dir" => cfg.out_dir = PathBuf::from(value),
            "rhs" => {
                cfg.rhs = value
                    .parse()
                    .map_err(|e: Error| with_location(e, line, key))?
            }
            _ => unreachable!("key list and match arms disagree"),
        }
    }

    if let (Some(_), Some(_)) = (single, &ladder) {
        return Err(config_error(
            lines.get("s_list").copied(),
            "s_list",
            "give either `s` or `s_list`, not both",
        ));
    }
    macro_rules! apply {
        ($field:ident, $key:literal) => {
            if let Some(v) = overrides.$field.clone() {
                cfg.$field = v;
                lines.remove($key);
            }
        };
    }
    apply!(n, "n");
    apply!(mu, "mu");
    apply!(a, "a");
    apply!(b, "b");
    apply!(tol, "tol");
    apply!(workers, "workers");
    apply!(seed, "seed");
    if let Some(dir) = &overrides.out_dir {
        cfg.out_dir = dir.clone();
        lines.remove("out_dir");
    }
    if let Some(s) = overrides.s {
        single = Some(s);
        ladder = None;
        lines.remove("s");
        lines.remove("s_list");
    }
    cfg.orders = match (single, ladder) {
        (Some(s), _) => Orders::Single(s),
        (None, Some(list)) => Orders::Ladder(list),
        (None, None) => cfg.orders,
    };
    validate(&cfg, &lines)?;
    Ok(cfg)
}

fn with_location(err: Error, line: usize, key: &str) -> Error {
    match err {
        Error::Config { message, .. } => config_error(Some(line), key, message),
        other => other,
    }
}

fn validate(cfg: &RunConfig, lines: &HashMap<&'static str, usize>) -> Result<()> {
    let at = |key: &str, message: String| config_error(lines.get(key).copied(), key, message);
    if !(cfg.x_left.is_finite() && cfg.x_right.is_finite() && cfg.x_left < cfg.x_right) {
        let key = if lines.get("x_right") >= lines.get("x_left") {
            "x_right"
        } else {
            "x_left"
        };
        return Err(at(
            key,
            format!(
                "need x_left < x_right, got ({}, {})",
                cfg.x_left, cfg.x_right
            ),
        ));
    }
    if cfg.n < Grid::MIN_NODES {
        return Err(at(
            "n",
            format!("n must be at least {}, got {}", Grid::MIN_NODES, cfg.n),
        ));
    }
    match &cfg.orders {
        Orders::Single(s) if !(*s > 0.0 && *s < 1.0) => {
            return Err(at("s", format!("s must lie in (0, 1), got {s}")));
        }
        Orders::Ladder(list) => {
            crate::limitlab::validate_ladder(list).map_err(|e| with_key(e, lines, "s_list"))?;
        }
        _ => {}
    }
    if !(cfg.mu > 0.0 && cfg.mu.is_finite()) {
        return Err(at("mu", format!("mu must be positive, got {}", cfg.mu)));
    }
    if !(cfg.a >= 0.0 && cfg.a.is_finite()) {
        return Err(at(
            "a",
            format!("a must be finite and nonnegative, got {}", cfg.a),
        ));
    }
    if !cfg.b.is_finite() {
        return Err(at("b", format!("b must be finite, got {}", cfg.b)));
    }
    if cfg.a > cfg.b {
        let key = if lines.get("a") > lines.get("b") {
            "a"
        } else {
            "b"
        };
        return Err(at(key, format!("a > b ({} > {})", cfg.a, cfg.b)));
    }
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(at("tol", format!("tol must be positive, got {}", cfg.tol)));
    }
    if cfg.max_iter == 0 {
        return Err(at("max_iter", "max_iter must be positive".into()));
    }
    Ok(())
}

fn with_key(err: Error, lines: &HashMap<&'static str, usize>, key: &str) -> Error {
    match err {
        Error::Config { message, .. } => config_error(lines.get(key).copied(), key, message),
        other => other,
    }
}

/// Write a CSV file atomically: rows go to a temporary file in the target
/// directory which is renamed into place only after a successful flush.
pub fn write_csv_atomic(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    {
        let mut w = csv::Writer::from_writer(tmp.as_file());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush().map_err(io)?;
    }
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x}")
}

fn float_row(values: &[f64]) -> Vec<String> {
    values.iter().map(|&v| fmt_float(v)).collect()
}

/// Run `command` and map the outcome to a process exit code. Reports go to
/// `out`, diagnostics to `err`.
pub fn dispatch(
    cfg: &RunConfig,
    command: Command,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    match run(cfg, command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_NUMERICAL
            }
        }
    }
}

fn run(cfg: &RunConfig, command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Validate => run_validate(cfg, out),
        Command::Solve => run_solve(cfg, out),
        Command::Control => run_control(cfg, out),
        Command::Sweep => run_sweep_command(cfg, out),
        Command::Gamma => run_gamma(cfg, out),
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

fn run_validate(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    if cfg.rhs != Rhs::One {
        return Err(config_error(
            None,
            "rhs",
            "validate compares against the closed form for rhs = one",
        ));
    }
    let s = cfg.single_order();
    let counts: Vec<usize> = [8, 4, 2, 1]
        .iter()
        .map(|d| cfg.n / d)
        .filter(|&n| n >= Grid::MIN_NODES)
        .collect();
    let report = validate_forward(cfg.x_left, cfg.x_right, &counts, s)?;
    writeln!(out, "s = {s}").map_err(io_err)?;
    writeln!(
        out,
        "{:>8} {:>12} {:>14} {:>12} {:>12}",
        "n", "h", "rel_l2_error", "u_mid", "exact_mid"
    )
    .map_err(io_err)?;
    for r in &report.rows {
        writeln!(
            out,
            "{:>8} {:>12.4e} {:>14.6e} {:>12.6} {:>12.6}",
            r.n, r.h, r.rel_l2_error, r.u_mid, r.exact_mid
        )
        .map_err(io_err)?;
    }
    let passed = report.passes(VALIDATE_TOL);
    writeln!(
        out,
        "{}: finest error {:.3e} (tolerance {VALIDATE_TOL}), monotone: {}",
        if passed { "PASS" } else { "FAIL" },
        report.finest_error(),
        report.monotone()
    )
    .map_err(io_err)?;
    Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn run_solve(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let grid = cfg.grid()?;
    let op = assemble(&grid, cfg.single_order())?;
    let f = cfg.rhs.sample(&grid);
    let sol = solve_poisson(&op, &f)?;
    let rows: Vec<Vec<String>> = (0..grid.n())
        .map(|i| float_row(&[grid.node(i), sol.u[i], sol.f[i]]))
        .collect();
    let path = cfg.out_dir.join("solution.csv");
    write_csv_atomic(&path, &["x", "u", "f"], &rows)?;
    writeln!(
        out,
        "s = {}, n = {}, |u|_h = {}, <f,u>_h = {} -> {}",
        sol.s,
        grid.n(),
        sol.l2_norm_u,
        sol.seminorm_sq,
        path.display()
    )
    .map_err(io_err)?;
    Ok(EXIT_OK)
}

/// Seeded random start for projected gradient.
pub fn random_start(n: usize, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridFunction((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
}

fn run_control(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let grid = cfg.grid()?;
    let control = cfg.control();
    let op = assemble(&grid, cfg.single_order())?;
    let start = random_start(grid.n(), cfg.seed);
    let check = cross_check(&op, &control, Some(&start))?;
    let res = &check.eigen;
    let rows: Vec<Vec<String>> = (0..grid.n())
        .map(|i| float_row(&[grid.node(i), res.f_star[i], res.u_star[i]]))
        .collect();
    let path = cfg.out_dir.join("control.csv");
    write_csv_atomic(&path, &["x", "f_star", "u_star"], &rows)?;
    writeln!(
        out,
        "s = {} J* = {} active = {:?} | projected gradient J = {} iters = {} converged = {} gap = {:e} ({:?}) -> {}",
        op.order(),
        fmt_float(res.j_star),
        res.active_bound,
        fmt_float(check.pgd.j_star),
        check.pgd.iters,
        check.pgd.converged,
        check.relative_gap,
        check.verdict,
        path.display()
    )
    .map_err(io_err)?;
    Ok(EXIT_OK)
}

fn run_sweep_command(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let sweep = SweepConfig {
        grid: cfg.grid()?,
        s_list: cfg.ladder(),
        control: cfg.control(),
        workers: cfg.workers,
        pgd_cross_check: false,
    };
    let report = run_sweep(&sweep)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            float_row(&[
                r.s,
                r.j_star,
                r.dist_f,
                r.dist_u,
                r.align,
                r.lambda_max,
                r.seminorm_sq,
                r.poincare_c,
            ])
        })
        .collect();
    let path = cfg.out_dir.join("sweep.csv");
    write_csv_atomic(
        &path,
        &[
            "s",
            "J_star",
            "dist_f",
            "dist_u",
            "align",
            "lambda_max",
            "seminorm_sq",
            "poincare_c",
        ],
        &rows,
    )?;
    writeln!(
        out,
        "reference J*_1 = {}",
        fmt_float(report.reference.j_star)
    )
    .map_err(io_err)?;
    for r in report.rows.iter().filter(|r| r.error.is_some()) {
        writeln!(
            out,
            "s = {}: {}",
            r.s,
            r.error.as_deref().unwrap_or_default()
        )
        .map_err(io_err)?;
    }
    writeln!(out, "{} rows -> {}", report.rows.len(), path.display()).map_err(io_err)?;
    Ok(EXIT_OK)
}

fn run_gamma(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let grid = cfg.grid()?;
    let control = cfg.control();
    let f = scale_to_norm(&cfg.rhs.sample(&grid), &grid, 0.5 * (control.a + control.b))?;
    let amplitude = 0.1 * crate::discretize::norm_h(&f, &grid)?;
    let report = gamma_check(
        &grid,
        &f,
        amplitude,
        &cfg.ladder(),
        &control,
        GammaTolerances::default(),
    )?;
    let mut rows = Vec::with_capacity(report.recovery.len() + report.liminf.len());
    for (i, r) in report.recovery.iter().enumerate() {
        let mut row = vec!["recovery".to_string(), (i + 1).to_string()];
        row.extend(float_row(&[r.s, r.value, r.limit, r.gap]));
        rows.push(row);
    }
    for r in &report.liminf {
        let mut row = vec!["liminf".to_string(), r.k.to_string()];
        row.extend(float_row(&[r.s, r.value, r.limit, r.margin]));
        rows.push(row);
    }
    let path = cfg.out_dir.join("gamma.csv");
    write_csv_atomic(
        &path,
        &["clause", "index", "s", "F_s", "F", "margin"],
        &rows,
    )?;
    writeln!(
        out,
        "recovery: {} liminf: {} -> {}",
        if report.recovery_passed {
            "PASS"
        } else {
            "FAIL"
        },
        if report.liminf_passed { "PASS" } else { "FAIL" },
        path.display()
    )
    .map_err(io_err)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), RunConfig::default());
        assert_eq!(
            parse_config("# only a comment\n\n").unwrap(),
            RunConfig::default()
        );
    }

    #[test]
    fn single_order_mode() {
        let cfg = parse_config("n = 128\ns = 0.5").unwrap();
        assert_eq!(cfg.n, 128);
        assert_eq!(cfg.orders, Orders::Single(0.5));
        assert_eq!(cfg.ladder(), vec![0.5]);
    }

    #[test]
    fn bounds_error_names_later_line() {
        let err = parse_config("a = 2\nb = 1").unwrap_err();
        match err {
            Error::Config { line, key, message } => {
                assert_eq!(line, Some(2));
                assert_eq!(key.as_deref(), Some("b"));
                assert!(message.contains("a > b"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_config("b = 1\n\na = 2 # too big").unwrap_err();
        assert!(matches!(err, Error::Config { line: Some(3), .. }), "{err}");
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        let err = parse_config("n = 16\nfoo = 1").unwrap_err();
        assert!(matches!(&err, Error::Config { line: Some(2), key: Some(k), .. } if k == "foo"));
        let err = parse_config("mu = abc").unwrap_err();
        assert!(matches!(&err, Error::Config { line: Some(1), key: Some(k), .. } if k == "mu"));
        assert!(parse_config("n = 2").is_err());
        assert!(parse_config("s = 1.0").is_err());
        assert!(parse_config("s = 0").is_err());
        assert!(parse_config("s_list = 0.5, 0.4").is_err());
        assert!(parse_config("s = 0.5\ns_list = 0.5").is_err());
        assert!(parse_config("n 16").is_err());
        assert!(parse_config("n = 16\nn = 32").is_err());
        assert!(parse_config("rhs = exp(x)").is_err());
        assert!(parse_config("scheme = spectral").is_err());
    }

    #[test]
    fn parses_every_key() {
        let text = "x_left = 0\nx_right = 2\nn = 64\ns_list = 0.5, 0.9\nmu = 0.2\na = 0.5\nb = 3\n\
                    tol = 1e-8\nmax_iter = 100\nstep_rule = fixed\nscheme = stencil\nseed = 7\n\
                    workers = 3\nout_dir = /tmp/x\nrhs = hat";
        let cfg = parse_config(text).unwrap();
        assert_eq!((cfg.x_left, cfg.x_right, cfg.n), (0.0, 2.0, 64));
        assert_eq!(cfg.orders, Orders::Ladder(vec![0.5, 0.9]));
        assert_eq!(cfg.step_rule, StepRule::FixedLipschitz);
        assert_eq!((cfg.seed, cfg.workers, cfg.rhs), (7, 3, Rhs::Hat));
        assert_eq!(cfg.out_dir, PathBuf::from("/tmp/x"));
    }

    #[test]
    fn overrides_take_precedence() {
        let ov = Overrides {
            n: Some(32),
            s: Some(0.7),
            b: Some(5.0),
            ..Default::default()
        };
        let cfg = load_config("n = 16\ns_list = 0.5, 0.9\na = 3", &ov).unwrap();
        assert_eq!(cfg.n, 32);
        assert_eq!(cfg.orders, Orders::Single(0.7));
        assert_eq!(cfg.b, 5.0);
        // an override that breaks a constraint has no line to point at
        let ov = Overrides {
            a: Some(9.0),
            ..Default::default()
        };
        let err = load_config("b = 2", &ov).unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, f64::MIN_POSITIVE, 0.0] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(
            fmt_float(f64::INFINITY).parse::<f64>().unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn presets_vanish_or_not_at_ends() {
        let grid = Grid::symmetric_unit(9).unwrap();
        assert!(Rhs::One.sample(&grid).iter().all(|&v| v == 1.0));
        let hat = Rhs::Hat.sample(&grid);
        assert!((hat[4] - 1.0).abs() < 1e-15 && hat[0] > 0.0 && hat[0] < 0.25);
        let sine = Rhs::Sine.sample(&grid);
        assert!((sine[4] - 1.0).abs() < 1e-15 && sine[0] > 0.0);
    }
}
