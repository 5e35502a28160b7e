//! Minimize `½<u_f, f> + μ/2 |f|²` over the annulus `a ≤ |f| ≤ b` with
//! projected gradient and compare with the eigenvector solution.

use fraclap::cli::random_start;
use fraclap::control::{cross_check, ControlConfig};
use fraclap::discretize::{assemble, Grid};

fn main() -> fraclap::error::Result<()> {
    let grid = Grid::symmetric_unit(128)?;
    let cfg = ControlConfig::default();
    for s in [0.3, 0.5, 0.8] {
        let op = assemble(&grid, s)?;
        let start = random_start(grid.n(), 1);
        let check = cross_check(&op, &cfg, Some(&start))?;
        println!(
            "s = {s}: J_pgd = {:.12} ({} iters, {:?})  J_eig = {:.12}  gap = {:.2e}  {:?}",
            check.pgd.j_star,
            check.pgd.iters,
            check.pgd.active_bound,
            check.eigen.j_star,
            check.relative_gap,
            check.verdict
        );
    }
    Ok(())
}
