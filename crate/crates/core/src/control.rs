//! Reduced optimal-control problem
//!
//! ```text
//! min_f  J(f) = ½ <f, S f>_h + (μ/2) ‖f‖²_h   subject to  a <= ‖f‖_h <= b
//! ```
//!
//! where `S = A⁻¹` is the state operator, so `<f, S f>_h` is the weighted
//! seminorm of the state. `S` is self-adjoint and the gradient in the
//! `h`-inner product is `S f + μ f`.
//!
//! For `a > 0` the lower bound is always active and the minimizers are
//! `±a v` with `v` the eigenvector of the largest eigenvalue of `A`.
//! [`eigen_solve_control`] computes that directly; [`pgd_solve`] is an
//! iterative cross-check that can stall at other stationary points of the
//! nonconvex annulus.

use std::collections::VecDeque;

use crate::discretize::{inner_product_h, norm_h, Grid, GridFunction, Operator};
use crate::error::{Error, Result};
use crate::forward::{poincare_constant, StateSolver};
use crate::linalg::{eig_extreme, Extreme};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// `1 / L` with `L = C_poincare + μ`, an upper bound on the curvature.
    FixedLipschitz,
    /// Barzilai-Borwein trial step with nonmonotone Armijo backtracking.
    Armijo,
}

impl std::str::FromStr for StepRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(StepRule::FixedLipschitz),
            "armijo" => Ok(StepRule::Armijo),
            other => Err(Error::config(format!(
                "unknown step rule `{other}` (expected `fixed` or `armijo`)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlConfig {
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub step_rule: StepRule,
}

impl Default for ControlConfig {
    fn default() -> Self {
        Self {
            mu: 0.1,
            a: 1.0,
            b: 2.0,
            tol: 1e-10,
            max_iter: 50_000,
            step_rule: StepRule::Armijo,
        }
    }
}

impl ControlConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::config(format!(
                "mu must be positive, got {}",
                self.mu
            )));
        }
        check_bounds(self.a, self.b)?;
        if !(self.tol > 0.0) {
            return Err(Error::config(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::config("max_iter must be positive"));
        }
        Ok(())
    }

    /// Whether `‖f‖_h` lies in `[a, b]` up to `slack`.
    pub fn admits(&self, norm: f64, slack: f64) -> bool {
        norm >= self.a - slack && norm <= self.b + slack
    }
}

fn check_bounds(a: f64, b: f64) -> Result<()> {
    if !(a >= 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::config(format!(
            "annulus bounds must be finite with a >= 0, got a = {a}, b = {b}"
        )));
    }
    if a > b {
        return Err(Error::config(format!("a > b ({a} > {b})")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActiveBound {
    None,
    Lower,
    Upper,
}

impl ActiveBound {
    fn classify(norm: f64, a: f64, b: f64) -> Self {
        let eps = 1e-9 * b.max(1.0);
        if a > 0.0 && (norm - a).abs() <= eps {
            ActiveBound::Lower
        } else if (norm - b).abs() <= eps {
            ActiveBound::Upper
        } else {
            ActiveBound::None
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimResult {
    /// optimal control, sign-normalized
    pub f_star: GridFunction,
    pub u_star: GridFunction,
    pub j_star: f64,
    /// `‖P(f - ∇J(f)) - f‖_h`, zero at stationary points
    pub grad_norm: f64,
    pub iters: usize,
    pub converged: bool,
    pub active_bound: ActiveBound,
    /// the start (or the answer) hit the `f = 0, a > 0` projection convention
    pub degenerate: bool,
}

/// Reduced cost and gradient with the state operator factored once.
#[derive(Debug, Clone)]
pub struct ReducedProblem {
    state: StateSolver,
    mu: f64,
}

impl ReducedProblem {
    pub fn new(op: &Operator, mu: f64) -> Result<Self> {
        Ok(Self {
            state: StateSolver::new(op)?,
            mu,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.state.grid()
    }

    pub fn state(&self, f: &GridFunction) -> Result<GridFunction> {
        self.state.state(f)
    }

    pub fn cost(&self, f: &GridFunction) -> Result<f64> {
        let u = self.state(f)?;
        self.cost_with_state(f, &u)
    }

    fn cost_with_state(&self, f: &GridFunction, u: &GridFunction) -> Result<f64> {
        let g = self.grid();
        Ok(0.5 * inner_product_h(u, f, g)? + 0.5 * self.mu * inner_product_h(f, f, g)?)
    }

    pub fn gradient(&self, f: &GridFunction) -> Result<GridFunction> {
        Ok(self.state(f)?.axpy(self.mu, f))
    }

    /// `(J(f), ∇J(f), u_f)` from a single solve.
    pub fn evaluate(&self, f: &GridFunction) -> Result<(f64, GridFunction, GridFunction)> {
        let u = self.state(f)?;
        let j = self.cost_with_state(f, &u)?;
        let grad = u.axpy(self.mu, f);
        Ok((j, grad, u))
    }
}

/// `½ <u_f, f>_h + (μ/2) <f, f>_h` with `A u_f = f`.
pub fn reduced_cost(op: &Operator, f: &GridFunction, mu: f64) -> Result<f64> {
    ReducedProblem::new(op, mu)?.cost(f)
}

/// `u_f + μ f`, the gradient of [`reduced_cost`] in the `h`-inner product.
pub fn reduced_gradient(op: &Operator, f: &GridFunction, mu: f64) -> Result<GridFunction> {
    ReducedProblem::new(op, mu)?.gradient(f)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub f: GridFunction,
    /// `f` was zero and `a > 0`: the constant direction was used
    pub degenerate: bool,
}

/// Radial projection onto `{a <= ‖f‖_h <= b}`.
pub fn project_annulus(f: &GridFunction, grid: &Grid, a: f64, b: f64) -> Result<Projection> {
    check_bounds(a, b)?;
    let norm = norm_h(f, grid)?;
    if norm == 0.0 {
        if a == 0.0 {
            return Ok(Projection {
                f: f.clone(),
                degenerate: false,
            });
        }
        let n = grid.n();
        let unit = 1.0 / (grid.h() * n as f64).sqrt();
        return Ok(Projection {
            f: GridFunction::constant(n, a * unit),
            degenerate: true,
        });
    }
    let target = norm.clamp(a, b);
    let f = if target == norm {
        f.clone()
    } else {
        f.scaled(target / norm)
    };
    Ok(Projection {
        f,
        degenerate: false,
    })
}

/// Flip the sign so that the largest-magnitude entry is positive. Entries
/// within a relative `1e-6` of the maximum count as ties and the lowest
/// index wins, which keeps antisymmetric vectors deterministic.
pub fn sign_normalize(v: &GridFunction) -> GridFunction {
    sign_of(v).map_or_else(|| v.clone(), |s| v.scaled(s))
}

const SIGN_TIE: f64 = 1e-6;

fn sign_of(v: &GridFunction) -> Option<f64> {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return None;
    }
    let lead = v.iter().find(|x| x.abs() >= (1.0 - SIGN_TIE) * max)?;
    Some(if *lead < 0.0 { -1.0 } else { 1.0 })
}

fn finish(
    problem: &ReducedProblem,
    cfg: &ControlConfig,
    f: GridFunction,
    iters: usize,
    converged: bool,
    degenerate: bool,
) -> Result<OptimResult> {
    let grid = *problem.grid();
    let f_star = sign_normalize(&f);
    let (j_star, grad, u_star) = problem.evaluate(&f_star)?;
    let grad_norm = projected_residual(&f_star, &grad, &grid, cfg)?;
    let norm = norm_h(&f_star, &grid)?;
    Ok(OptimResult {
        f_star,
        u_star,
        j_star,
        grad_norm,
        iters,
        converged,
        active_bound: ActiveBound::classify(norm, cfg.a, cfg.b),
        degenerate,
    })
}

fn projected_residual(
    f: &GridFunction,
    grad: &GridFunction,
    grid: &Grid,
    cfg: &ControlConfig,
) -> Result<f64> {
    let p = project_annulus(&f.axpy(-1.0, grad), grid, cfg.a, cfg.b)?;
    norm_h(&p.f.sub(f), grid)
}

const NONMONOTONE_MEMORY: usize = 10;
const ARMIJO_GAMMA: f64 = 1e-4;
const BB_MIN: f64 = 1e-10;
const BB_MAX: f64 = 1e10;

/// Projected gradient descent on the annulus.
///
/// Starts from `f0` (default: the projected all-ones vector) and stops when
/// the unit-step projected-gradient residual drops below `cfg.tol` or after
/// `cfg.max_iter` iterations. Running out of iterations is reported through
/// `converged = false`, not as an error.
pub fn pgd_solve(
    op: &Operator,
    cfg: &ControlConfig,
    f0: Option<&GridFunction>,
) -> Result<OptimResult> {
    cfg.validate()?;
    let grid = *op.grid();
    let problem = ReducedProblem::new(op, cfg.mu)?;
    let start = match f0 {
        Some(f) => {
            if f.len() != grid.n() {
                return Err(Error::Shape {
                    expected: grid.n(),
                    got: f.len(),
                });
            }
            if !f.is_finite() {
                return Err(Error::domain("initial control has non-finite entries"));
            }
            f.clone()
        }
        None => GridFunction::constant(grid.n(), 1.0),
    };
    let Projection { mut f, degenerate } = project_annulus(&start, &grid, cfg.a, cfg.b)?;
    let lipschitz = poincare_constant(op)? + cfg.mu;
    let fixed_step = 1.0 / lipschitz;

    let (mut j, mut grad, _) = problem.evaluate(&f)?;
    let mut history: VecDeque<f64> = VecDeque::from([j]);
    let mut tau = fixed_step;
    for it in 0..cfg.max_iter {
        if projected_residual(&f, &grad, &grid, cfg)? <= cfg.tol {
            return finish(&problem, cfg, f, it, true, degenerate);
        }
        let next = match cfg.step_rule {
            StepRule::FixedLipschitz => {
                project_annulus(&f.axpy(-fixed_step, &grad), &grid, cfg.a, cfg.b)?.f
            }
            StepRule::Armijo => {
                let target = project_annulus(&f.axpy(-tau, &grad), &grid, cfg.a, cfg.b)?.f;
                let d = target.sub(&f);
                let slope = inner_product_h(&grad, &d, &grid)?;
                let reference = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut lambda = 1.0;
                loop {
                    let trial = project_annulus(&f.axpy(lambda, &d), &grid, cfg.a, cfg.b)?.f;
                    let jt = problem.cost(&trial)?;
                    if jt <= reference + ARMIJO_GAMMA * lambda * slope || lambda < 1e-12 {
                        break trial;
                    }
                    lambda *= 0.5;
                }
            }
        };
        let (j_next, grad_next, _) = problem.evaluate(&next)?;
        if cfg.step_rule == StepRule::Armijo {
            let s = next.sub(&f);
            let y = grad_next.sub(&grad);
            let sy = inner_product_h(&s, &y, &grid)?;
            tau = if sy > 0.0 {
                (inner_product_h(&s, &s, &grid)? / sy).clamp(BB_MIN, BB_MAX)
            } else {
                fixed_step
            };
            history.push_back(j_next);
            if history.len() > NONMONOTONE_MEMORY {
                history.pop_front();
            }
        }
        f = next;
        j = j_next;
        grad = grad_next;
    }
    let _ = j;
    let converged = projected_residual(&f, &grad, &grid, cfg)? <= cfg.tol;
    finish(&problem, cfg, f, cfg.max_iter, converged, degenerate)
}

/// Global minimizer from the largest eigenpair of `A`.
pub fn eigen_solve_control(op: &Operator, cfg: &ControlConfig) -> Result<OptimResult> {
    cfg.validate()?;
    let grid = *op.grid();
    let problem = ReducedProblem::new(op, cfg.mu)?;
    if cfg.a == 0.0 {
        return finish(&problem, cfg, GridFunction::zeros(grid.n()), 0, true, false);
    }
    let top = eig_extreme(op, Extreme::Largest, 1e-12)?;
    let f = GridFunction(top.vector).scaled(cfg.a);
    finish(&problem, cfg, f, 0, true, false)
}

/// `a²/(2λ_max) + μa²/2`, the optimal cost for `a > 0`.
pub fn optimal_cost_from_eigenvalue(lambda_max: f64, cfg: &ControlConfig) -> f64 {
    let a2 = cfg.a * cfg.a;
    a2 / (2.0 * lambda_max) + 0.5 * cfg.mu * a2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossCheckVerdict {
    /// both solvers reach the same cost
    Agree,
    /// projected gradient converged to a stationary point with a higher cost
    StationaryPoint,
    /// projected gradient ran out of iterations above the optimum
    NotConverged,
    /// projected gradient found a lower cost than the eigen solver
    EigenSuboptimal,
}

#[derive(Debug, Clone)]
pub struct CrossCheck {
    pub pgd: OptimResult,
    pub eigen: OptimResult,
    /// `|J_pgd - J_eigen| / J_eigen` (absolute when `J_eigen = 0`)
    pub relative_gap: f64,
    pub verdict: CrossCheckVerdict,
}

/// Relative cost gap below which the two solvers are considered to agree.
pub const AGREEMENT_TOL: f64 = 1e-8;

pub fn cross_check(
    op: &Operator,
    cfg: &ControlConfig,
    f0: Option<&GridFunction>,
) -> Result<CrossCheck> {
    let eigen = eigen_solve_control(op, cfg)?;
    let pgd = pgd_solve(op, cfg, f0)?;
    let diff = pgd.j_star - eigen.j_star;
    let relative_gap = if eigen.j_star > 0.0 {
        diff.abs() / eigen.j_star
    } else {
        diff.abs()
    };
    let verdict = if relative_gap <= AGREEMENT_TOL {
        CrossCheckVerdict::Agree
    } else if diff < 0.0 {
        CrossCheckVerdict::EigenSuboptimal
    } else if pgd.converged {
        CrossCheckVerdict::StationaryPoint
    } else {
        CrossCheckVerdict::NotConverged
    };
    Ok(CrossCheck {
        pgd,
        eigen,
        relative_gap,
        verdict,
    })
}
