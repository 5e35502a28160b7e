//! Experiments along a ladder `s_k -> 1⁻` on a fixed grid: convergence of
//! optimal controls, states and costs to the classical problem, the
//! seminorm limit, and the two clauses of Γ-convergence for the extended
//! cost functionals (`+∞` outside the admissible annulus).

use rayon::prelude::*;

use crate::control::{eigen_solve_control, pgd_solve, ControlConfig, ReducedProblem};
use crate::discretize::{assemble, inner_product_h, norm_h, quadratic_form, Grid, GridFunction};
use crate::error::{Error, Result};
use crate::forward::{poincare_constant, StateSolver};
use crate::linalg::{eig_extreme, Extreme};

/// `s_k = 1 - 2^{-k}` for `k = 1..=count`.
pub fn geometric_ladder(count: usize) -> Vec<f64> {
    (1..=count).map(|k| 1.0 - 0.5f64.powi(k as i32)).collect()
}

pub fn validate_ladder(s_list: &[f64]) -> Result<()> {
    if s_list.is_empty() {
        return Err(Error::config("s ladder is empty"));
    }
    if let Some(&s) = s_list.iter().find(|&&s| !(s > 0.0 && s < 1.0)) {
        return Err(Error::config(format!(
            "every s must lie in (0, 1), got {s}"
        )));
    }
    if s_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("s ladder must be strictly ascending"));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub grid: Grid,
    pub s_list: Vec<f64>,
    pub control: ControlConfig,
    /// worker threads; `0` lets rayon decide
    pub workers: usize,
    /// also run projected gradient at every rung and record its cost gap
    pub pgd_cross_check: bool,
}

/// Optimal control at a single order (`s = 1` is the classical problem).
#[derive(Debug, Clone)]
pub struct OrderSolution {
    pub s: f64,
    pub f_star: GridFunction,
    pub u_star: GridFunction,
    pub j_star: f64,
    pub lambda_max: f64,
    pub seminorm_sq: f64,
    pub poincare_c: f64,
}

pub fn solve_order(grid: &Grid, s: f64, control: &ControlConfig) -> Result<OrderSolution> {
    let op = assemble(grid, s)?;
    let opt = eigen_solve_control(&op, control)?;
    let lambda_max = eig_extreme(&op, Extreme::Largest, 1e-12)?.value;
    Ok(OrderSolution {
        s,
        seminorm_sq: inner_product_h(&opt.f_star, &opt.u_star, grid)?,
        poincare_c: poincare_constant(&op)?,
        f_star: opt.f_star,
        u_star: opt.u_star,
        j_star: opt.j_star,
        lambda_max,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub s: f64,
    pub j_star: f64,
    /// `‖f*_s - f*_1‖_h` after sign normalization
    pub dist_f: f64,
    pub dist_u: f64,
    /// `|<f*_s, f*_1>_h| / (‖f*_s‖ ‖f*_1‖)`
    pub align: f64,
    pub lambda_max: f64,
    pub seminorm_sq: f64,
    pub poincare_c: f64,
    /// relative cost gap of projected gradient, when requested
    pub pgd_gap: Option<f64>,
    /// failure at this rung; the numeric fields are NaN when set
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(s: f64, err: &Error) -> Self {
        Self {
            s,
            j_star: f64::NAN,
            dist_f: f64::NAN,
            dist_u: f64::NAN,
            align: f64::NAN,
            lambda_max: f64::NAN,
            seminorm_sq: f64::NAN,
            poincare_c: f64::NAN,
            pgd_gap: None,
            error: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub grid: Grid,
    pub control: ControlConfig,
    pub reference: OrderSolution,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn cost_gaps(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| (r.j_star - self.reference.j_star).abs())
            .collect()
    }
}

fn alignment(f: &GridFunction, g: &GridFunction, grid: &Grid) -> Result<f64> {
    let nf = norm_h(f, grid)?;
    let ng = norm_h(g, grid)?;
    Ok(match (nf == 0.0, ng == 0.0) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        _ => (inner_product_h(f, g, grid)?.abs() / (nf * ng)).min(1.0),
    })
}

fn sweep_row(cfg: &SweepConfig, reference: &OrderSolution, s: f64) -> Result<SweepRow> {
    let grid = &cfg.grid;
    let sol = solve_order(grid, s, &cfg.control)?;
    let pgd_gap = if cfg.pgd_cross_check {
        let op = assemble(grid, s)?;
        let pgd = pgd_solve(&op, &cfg.control, None)?;
        Some((pgd.j_star - sol.j_star).abs() / sol.j_star.max(f64::MIN_POSITIVE))
    } else {
        None
    };
    Ok(SweepRow {
        s,
        j_star: sol.j_star,
        dist_f: norm_h(&sol.f_star.sub(&reference.f_star), grid)?,
        dist_u: norm_h(&sol.u_star.sub(&reference.u_star), grid)?,
        align: alignment(&sol.f_star, &reference.f_star, grid)?,
        lambda_max: sol.lambda_max,
        seminorm_sq: sol.seminorm_sq,
        poincare_c: sol.poincare_c,
        pgd_gap,
        error: None,
    })
}

fn with_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(job))
}

/// Solve the control problem at every rung and compare with the classical
/// reference. A failing rung is recorded in its row; a failing reference
/// aborts the sweep.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    validate_ladder(&cfg.s_list)?;
    cfg.control.validate()?;
    let reference = solve_order(&cfg.grid, 1.0, &cfg.control)?;
    let mut rows = with_pool(cfg.workers, || {
        cfg.s_list
            .par_iter()
            .map(|&s| sweep_row(cfg, &reference, s).unwrap_or_else(|e| SweepRow::failed(s, &e)))
            .collect::<Vec<_>>()
    })?;
    rows.sort_by(|a, b| a.s.total_cmp(&b.s));
    Ok(SweepReport {
        grid: cfg.grid,
        control: cfg.control,
        reference,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateConvergenceRow {
    pub s: f64,
    /// `‖u_s - u_1‖_h`
    pub dist_u: f64,
    /// `|<f, u_s>_h - <f, u_1>_h|`
    pub seminorm_gap: f64,
}

#[derive(Debug, Clone)]
pub struct StateConvergenceReport {
    pub reference_l2_norm: f64,
    pub reference_seminorm_sq: f64,
    pub rows: Vec<StateConvergenceRow>,
}

/// States for a fixed right-hand side along the ladder against the
/// classical state.
pub fn state_convergence_check(
    grid: &Grid,
    f: &GridFunction,
    s_list: &[f64],
) -> Result<StateConvergenceReport> {
    validate_ladder(s_list)?;
    let reference = StateSolver::new(&assemble(grid, 1.0)?)?.solve(f)?;
    let rows = s_list
        .iter()
        .map(|&s| {
            let sol = StateSolver::new(&assemble(grid, s)?)?.solve(f)?;
            Ok(StateConvergenceRow {
                s,
                dist_u: norm_h(&sol.u.sub(&reference.u), grid)?,
                seminorm_gap: (sol.seminorm_sq - reference.seminorm_sq).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StateConvergenceReport {
        reference_l2_norm: reference.l2_norm_u,
        reference_seminorm_sq: reference.seminorm_sq,
        rows,
    })
}

#[derive(Debug, Clone)]
pub struct BbmReport {
    /// `<A_1 v, v>_h`
    pub classical: f64,
    /// `(s, <A_s v, v>_h)`
    pub rows: Vec<(f64, f64)>,
}

impl BbmReport {
    pub fn relative_gaps(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|&(_, q)| (q - self.classical).abs() / self.classical.abs().max(f64::MIN_POSITIVE))
            .collect()
    }
}

/// Weighted fractional energy of a fixed function along the ladder.
pub fn bbm_limit_check(grid: &Grid, v: &GridFunction, s_list: &[f64]) -> Result<BbmReport> {
    validate_ladder(s_list)?;
    let classical = quadratic_form(&assemble(grid, 1.0)?, v)?;
    let rows = s_list
        .iter()
        .map(|&s| Ok((s, quadratic_form(&assemble(grid, s)?, v)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(BbmReport { classical, rows })
}

/// Extended cost: the reduced cost on the annulus, `+∞` outside it.
pub fn extended_cost(
    problem: &ReducedProblem,
    cfg: &ControlConfig,
    f: &GridFunction,
) -> Result<f64> {
    let norm = norm_h(f, problem.grid())?;
    if cfg.admits(norm, 1e-12 * cfg.b.max(1.0)) {
        problem.cost(f)
    } else {
        Ok(f64::INFINITY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryRow {
    pub s: f64,
    /// `F_s(f)`
    pub value: f64,
    /// `F(f)` for the classical problem
    pub limit: f64,
    /// `|F_s(f) - F(f)|`; zero when both are infinite
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiminfRow {
    pub k: usize,
    pub s: f64,
    /// `F_k(f_k)`
    pub value: f64,
    /// `F(f)`
    pub limit: f64,
    /// `F_k(f_k) - F(f)`, signed
    pub margin: f64,
}

fn extended_gap(value: f64, limit: f64) -> f64 {
    if value.is_infinite() && limit.is_infinite() {
        0.0
    } else {
        (value - limit).abs()
    }
}

/// Constant recovery sequence `f_k = f`: `F_s(f)` along the ladder.
pub fn recovery_sequence_check(
    grid: &Grid,
    f: &GridFunction,
    s_list: &[f64],
    cfg: &ControlConfig,
) -> Result<Vec<RecoveryRow>> {
    validate_ladder(s_list)?;
    cfg.validate()?;
    let limit = extended_cost(&ReducedProblem::new(&assemble(grid, 1.0)?, cfg.mu)?, cfg, f)?;
    s_list
        .iter()
        .map(|&s| {
            let value = extended_cost(&ReducedProblem::new(&assemble(grid, s)?, cfg.mu)?, cfg, f)?;
            Ok(RecoveryRow {
                s,
                value,
                limit,
                gap: extended_gap(value, limit),
            })
        })
        .collect()
}

/// `f + c sin(kπ x̂)` with `x̂` the node coordinate mapped to `(-1, 1)`;
/// weakly null perturbations as `k` grows.
pub fn oscillating_perturbation(
    grid: &Grid,
    f: &GridFunction,
    amplitude: f64,
    k: usize,
) -> GridFunction {
    let freq = k as f64 * std::f64::consts::PI;
    GridFunction(
        (0..grid.n())
            .map(|i| f[i] + amplitude * (freq * grid.reference_coordinate(i)).sin())
            .collect(),
    )
}

/// Pair `f_k = f + c sin(kπx)` with `s_k` and report `F_k(f_k) - F(f)`.
pub fn liminf_check(
    grid: &Grid,
    f: &GridFunction,
    amplitude: f64,
    s_list: &[f64],
    cfg: &ControlConfig,
) -> Result<Vec<LiminfRow>> {
    validate_ladder(s_list)?;
    cfg.validate()?;
    let limit_problem = ReducedProblem::new(&assemble(grid, 1.0)?, cfg.mu)?;
    let limit = extended_cost(&limit_problem, cfg, f)?;
    if limit.is_infinite() {
        return Err(Error::config(
            "liminf check needs f inside the admissible annulus",
        ));
    }
    let family: Vec<GridFunction> = (1..=s_list.len())
        .map(|k| oscillating_perturbation(grid, f, amplitude, k))
        .collect();
    for (k, fk) in family.iter().enumerate() {
        let norm = norm_h(fk, grid)?;
        if !cfg.admits(norm, 0.0) {
            return Err(Error::config(format!(
                "perturbation k = {} leaves the admissible annulus (norm {norm})",
                k + 1
            )));
        }
    }
    s_list
        .iter()
        .zip(family)
        .enumerate()
        .map(|(i, (&s, fk))| {
            let value =
                extended_cost(&ReducedProblem::new(&assemble(grid, s)?, cfg.mu)?, cfg, &fk)?;
            Ok(LiminfRow {
                k: i + 1,
                s,
                value,
                limit,
                margin: value - limit,
            })
        })
        .collect()
}

/// Pass/fail thresholds for [`gamma_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaTolerances {
    /// bound on `|F_s(f) - F(f)| / F(f)` at the last rung
    pub recovery_rel: f64,
    /// lower bound on the liminf margins over the last third of the ladder
    pub liminf_margin: f64,
}

impl Default for GammaTolerances {
    fn default() -> Self {
        Self {
            recovery_rel: 0.02,
            liminf_margin: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GammaCheckReport {
    pub recovery: Vec<RecoveryRow>,
    pub liminf: Vec<LiminfRow>,
    pub recovery_passed: bool,
    pub liminf_passed: bool,
}

impl GammaCheckReport {
    pub fn passed(&self) -> bool {
        self.recovery_passed && self.liminf_passed
    }
}

/// Smallest margin over the last third (rounded up) of the rows.
pub fn tail_min_margin(rows: &[LiminfRow]) -> f64 {
    let tail = rows.len().div_ceil(3);
    rows[rows.len() - tail..]
        .iter()
        .map(|r| r.margin)
        .fold(f64::INFINITY, f64::min)
}

pub fn gamma_check(
    grid: &Grid,
    f: &GridFunction,
    amplitude: f64,
    s_list: &[f64],
    cfg: &ControlConfig,
    tol: GammaTolerances,
) -> Result<GammaCheckReport> {
    let recovery = recovery_sequence_check(grid, f, s_list, cfg)?;
    let liminf = liminf_check(grid, f, amplitude, s_list, cfg)?;
    let recovery_passed = recovery.last().is_some_and(|r| {
        r.gap == 0.0 || (r.limit.is_finite() && r.gap <= tol.recovery_rel * r.limit.abs())
    });
    let liminf_passed = tail_min_margin(&liminf) >= -tol.liminf_margin;
    Ok(GammaCheckReport {
        recovery,
        liminf,
        recovery_passed,
        liminf_passed,
    })
}

/// Rescale `f` to `‖f‖_h = target`.
pub fn scale_to_norm(f: &GridFunction, grid: &Grid, target: f64) -> Result<GridFunction> {
    let norm = norm_h(f, grid)?;
    if norm == 0.0 {
        return Err(Error::domain("cannot rescale the zero function"));
    }
    Ok(f.scaled(target / norm))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg(grid: Grid) -> SweepConfig {
        SweepConfig {
            grid,
            s_list: vec![0.5, 0.75, 0.875, 0.9375],
            control: ControlConfig::default(),
            workers: 2,
            pgd_cross_check: false,
        }
    }

    #[test]
    fn ladder_construction_and_validation() {
        let l = geometric_ladder(3);
        assert_eq!(l, vec![0.5, 0.75, 0.875]);
        assert!(validate_ladder(&l).is_ok());
        assert!(validate_ladder(&[]).is_err());
        assert!(validate_ladder(&[0.5, 0.5]).is_err());
        assert!(validate_ladder(&[0.6, 0.5]).is_err());
        assert!(validate_ladder(&[0.5, 1.0]).is_err());
    }

    #[test]
    fn sweep_rows_sorted_and_converging() {
        let grid = Grid::symmetric_unit(64).unwrap();
        let report = run_sweep(&small_cfg(grid)).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert!(report.rows.windows(2).all(|w| w[0].s < w[1].s));
        let gaps = report.cost_gaps();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        assert!(report
            .rows
            .iter()
            .all(|r| r.error.is_none() && (0.0..=1.0).contains(&r.align)));
    }

    #[test]
    fn sweep_identical_across_worker_counts() {
        let grid = Grid::symmetric_unit(48).unwrap();
        let mut cfg = small_cfg(grid);
        cfg.workers = 1;
        let a = run_sweep(&cfg).unwrap();
        cfg.workers = 4;
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn sweep_with_pgd_cross_check() {
        let grid = Grid::symmetric_unit(12).unwrap();
        let mut cfg = small_cfg(grid);
        cfg.pgd_cross_check = true;
        let report = run_sweep(&cfg).unwrap();
        assert!(report.rows.iter().all(|r| r.pgd_gap.is_some()));
    }

    #[test]
    fn sweep_rejects_bad_config() {
        let grid = Grid::symmetric_unit(8).unwrap();
        let mut cfg = small_cfg(grid);
        cfg.s_list = vec![0.9, 0.5];
        assert!(run_sweep(&cfg).is_err());
        let mut cfg = small_cfg(grid);
        cfg.control.a = 5.0;
        assert!(run_sweep(&cfg).is_err());
    }

    #[test]
    fn zero_rhs_gives_zero_distances() {
        let grid = Grid::symmetric_unit(32).unwrap();
        let r = state_convergence_check(&grid, &GridFunction::zeros(32), &[0.5, 0.9]).unwrap();
        assert!(r
            .rows
            .iter()
            .all(|row| row.dist_u == 0.0 && row.seminorm_gap == 0.0));
        let b = bbm_limit_check(&grid, &GridFunction::zeros(32), &[0.5, 0.9]).unwrap();
        assert!(b.rows.iter().all(|&(_, q)| q == 0.0));
    }

    #[test]
    fn recovery_rows_infinite_outside_annulus() {
        let grid = Grid::symmetric_unit(16).unwrap();
        let cfg = ControlConfig::default();
        let f = scale_to_norm(&GridFunction::constant(16, 1.0), &grid, 3.0).unwrap();
        let rows = recovery_sequence_check(&grid, &f, &[0.5, 0.9], &cfg).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.value.is_infinite() && r.limit.is_infinite() && r.gap == 0.0));
    }

    #[test]
    fn zero_amplitude_liminf_equals_recovery() {
        let grid = Grid::symmetric_unit(32).unwrap();
        let cfg = ControlConfig::default();
        let f = scale_to_norm(&GridFunction::constant(32, 1.0), &grid, 1.5).unwrap();
        let s = [0.5, 0.75, 0.875];
        let rec = recovery_sequence_check(&grid, &f, &s, &cfg).unwrap();
        let lim = liminf_check(&grid, &f, 0.0, &s, &cfg).unwrap();
        for (r, l) in rec.iter().zip(&lim) {
            assert_eq!(r.gap, l.margin.abs());
        }
    }

    #[test]
    fn liminf_rejects_perturbation_leaving_annulus() {
        let grid = Grid::symmetric_unit(32).unwrap();
        let cfg = ControlConfig::default();
        let f = scale_to_norm(&GridFunction::constant(32, 1.0), &grid, 1.9).unwrap();
        let err = liminf_check(&grid, &f, 1.0, &[0.5, 0.9], &cfg).unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn tail_of_ladder() {
        let rows: Vec<LiminfRow> = (1..=7)
            .map(|k| LiminfRow {
                k,
                s: 1.0 - 0.5f64.powi(k as i32),
                value: 0.0,
                limit: 0.0,
                margin: -(k as f64),
            })
            .collect();
        // last ceil(7/3) = 3 rows
        assert_eq!(tail_min_margin(&rows), -7.0);
        assert_eq!(tail_min_margin(&rows[..3]), -3.0);
    }
}
