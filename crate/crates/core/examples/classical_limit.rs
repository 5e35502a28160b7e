//! Stencil weights and discrete states approach the classical second
//! difference as `s -> 1`.

use fraclap::discretize::{assemble, stencil_weights, Grid, GridFunction};
use fraclap::forward::solve_poisson;
use fraclap::limitlab::state_convergence_check;

fn main() -> fraclap::error::Result<()> {
    let grid = Grid::symmetric_unit(256)?;
    let h2 = grid.h() * grid.h();
    for s in [0.5, 0.9, 0.99, 0.999] {
        let w = stencil_weights(s, grid.h(), grid.n())?;
        println!(
            "s = {s:<6} w1 h^2 = {:.6}  w2 h^2 = {:.3e}  tail h^2 = {:.3e}",
            w.weight(1) * h2,
            w.weight(2) * h2,
            w.tail * h2
        );
    }

    let f = GridFunction::constant(grid.n(), 1.0);
    let u1 = solve_poisson(&assemble(&grid, 1.0)?, &f)?;
    let report = state_convergence_check(&grid, &f, &[0.9, 0.99, 0.999, 0.9999])?;
    for row in &report.rows {
        println!(
            "s = {:<6} |u_s - u_1| / |u_1| = {:.3e}  seminorm gap = {:.3e}",
            row.s,
            row.dist_u / u1.l2_norm_u,
            row.seminorm_gap
        );
    }
    Ok(())
}
