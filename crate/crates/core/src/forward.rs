//! Forward (state) problem: `A_s u = f` with zero exterior data, seminorms
//! of states, the discrete Poincaré constant and the analytic validation
//! target for a constant right-hand side.

use crate::discretize::{inner_product_h, norm_h, Grid, GridFunction, Operator, OperatorKind};
use crate::error::{Error, Result};
use crate::linalg::{eig_extreme, Cholesky, Extreme, SymmetricOperator};
use crate::specfun::gamma;

/// State `u` for a right-hand side `f`, with `seminorm_sq = <f, u>_h`.
#[derive(Debug, Clone)]
pub struct ForwardSolution {
    /// Order of the operator; `1.0` for the classical Laplacian.
    pub s: f64,
    pub f: GridFunction,
    pub u: GridFunction,
    pub seminorm_sq: f64,
    pub l2_norm_u: f64,
}

/// Factorized state operator `S = A⁻¹`, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct StateSolver {
    grid: Grid,
    order: f64,
    factor: Cholesky,
}

impl StateSolver {
    pub fn new(op: &Operator) -> Result<Self> {
        Ok(Self {
            grid: *op.grid(),
            order: op.order(),
            factor: Cholesky::factor(op.matrix())?,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    /// `u = A⁻¹ f`
    pub fn state(&self, f: &GridFunction) -> Result<GridFunction> {
        if f.len() != self.grid.n() {
            return Err(Error::Shape {
                expected: self.grid.n(),
                got: f.len(),
            });
        }
        if !f.is_finite() {
            return Err(Error::domain("right-hand side has non-finite entries"));
        }
        Ok(GridFunction(self.factor.solve(f.values())?))
    }

    pub fn solve(&self, f: &GridFunction) -> Result<ForwardSolution> {
        let u = self.state(f)?;
        let seminorm_sq = inner_product_h(f, &u, &self.grid)?;
        let l2_norm_u = norm_h(&u, &self.grid)?;
        Ok(ForwardSolution {
            s: self.order,
            f: f.clone(),
            u,
            seminorm_sq,
            l2_norm_u,
        })
    }
}

/// Solve the (fractional or classical) Poisson problem by Cholesky.
pub fn solve_poisson(op: &Operator, f: &GridFunction) -> Result<ForwardSolution> {
    StateSolver::new(op)?.solve(f)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaxPrinciple {
    /// `f >= 0` and the computed state is nonnegative.
    Holds,
    /// first node where the state went negative
    Violated { index: usize, value: f64 },
    /// `f` has negative entries, so there is nothing to check.
    Skipped,
}

impl MaxPrinciple {
    pub fn holds(&self) -> bool {
        matches!(self, MaxPrinciple::Holds)
    }
}

/// Check that a nonnegative right-hand side yields a nonnegative state.
pub fn maximum_principle_check(op: &Operator, f: &GridFunction) -> Result<MaxPrinciple> {
    if f.iter().any(|&v| v < 0.0) {
        return Ok(MaxPrinciple::Skipped);
    }
    let sol = solve_poisson(op, f)?;
    Ok(match sol.u.iter().position(|&v| v < 0.0) {
        Some(index) => MaxPrinciple::Violated {
            index,
            value: sol.u[index],
        },
        None => MaxPrinciple::Holds,
    })
}

/// Smallest `C` with `‖u‖²_h <= C <A u, u>_h` on the grid, i.e. `1 / λ_min`.
pub fn poincare_constant(op: &Operator) -> Result<f64> {
    let pair = eig_extreme(op, Extreme::Smallest, 1e-10)?;
    Ok(1.0 / pair.value)
}

/// `<A_t v, v>_h` for an operator of fractional order `t`: a weaker-norm
/// distance used to report state convergence.
pub fn cross_seminorm(op_t: &Operator, v: &GridFunction) -> Result<f64> {
    match op_t.kind() {
        OperatorKind::Fractional(_) => crate::discretize::quadratic_form(op_t, v),
        OperatorKind::Classical => Err(Error::domain(
            "cross seminorm needs an operator of fractional order t in (0, 1)",
        )),
    }
}

/// Constant in the closed-form solution `K (r² - |x - c|²)^s` of
/// `(-Δ)^s u = 1` on a ball of radius `r` in one dimension.
pub fn ball_solution_constant(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain(format!("order must lie in (0, 1), got {s}")));
    }
    Ok(4f64.powf(-s) * gamma(0.5)? / (gamma(0.5 + s)? * gamma(1.0 + s)?))
}

/// Exact state for `f ≡ 1` on the grid's interval, sampled at the nodes.
pub fn ball_solution(grid: &Grid, s: f64) -> Result<GridFunction> {
    let k = ball_solution_constant(s)?;
    let r = 0.5 * grid.length();
    let c = grid.center();
    Ok(grid.sample(|x| k * (r * r - (x - c) * (x - c)).max(0.0).powf(s)))
}

/// `‖approx - exact‖_h / ‖exact‖_h`
pub fn relative_error_h(approx: &GridFunction, exact: &GridFunction, grid: &Grid) -> Result<f64> {
    let diff = approx.sub(exact);
    Ok(norm_h(&diff, grid)? / norm_h(exact, grid)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationRow {
    pub n: usize,
    pub h: f64,
    pub rel_l2_error: f64,
    /// state at the node closest to the midpoint
    pub u_mid: f64,
    pub exact_mid: f64,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub s: f64,
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn monotone(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].rel_l2_error < w[0].rel_l2_error)
    }

    pub fn finest_error(&self) -> f64 {
        self.rows.last().map_or(f64::INFINITY, |r| r.rel_l2_error)
    }

    /// Finest-grid error within `tol` and errors decreasing under refinement.
    pub fn passes(&self, tol: f64) -> bool {
        self.monotone() && self.finest_error() <= tol
    }
}

/// Solve `(-Δ)^s u = 1` on each node count and compare against the
/// closed-form solution.
pub fn validate_forward(
    x_left: f64,
    x_right: f64,
    node_counts: &[usize],
    s: f64,
) -> Result<ValidationReport> {
    let mut rows = Vec::with_capacity(node_counts.len());
    for &n in node_counts {
        let grid = Grid::new(x_left, x_right, n)?;
        let op = crate::discretize::assemble_fractional(&grid, s)?;
        let f = GridFunction::constant(n, 1.0);
        let sol = solve_poisson(&op, &f)?;
        let exact = ball_solution(&grid, s)?;
        let mid = n / 2;
        rows.push(ValidationRow {
            n,
            h: grid.h(),
            rel_l2_error: relative_error_h(&sol.u, &exact, &grid)?,
            u_mid: sol.u[mid],
            exact_mid: exact[mid],
        });
    }
    Ok(ValidationReport { s, rows })
}
