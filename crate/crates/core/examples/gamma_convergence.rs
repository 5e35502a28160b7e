//! Recovery and liminf clauses for the extended cost functionals.

use fraclap::control::ControlConfig;
use fraclap::discretize::{norm_h, Grid, GridFunction};
use fraclap::limitlab::{
    gamma_check, geometric_ladder, scale_to_norm, tail_min_margin, GammaTolerances,
};

fn main() -> fraclap::error::Result<()> {
    let grid = Grid::symmetric_unit(256)?;
    let cfg = ControlConfig::default();
    let f = scale_to_norm(
        &GridFunction::constant(grid.n(), 1.0),
        &grid,
        0.5 * (cfg.a + cfg.b),
    )?;
    let c = 0.1 * norm_h(&f, &grid)?;
    let report = gamma_check(
        &grid,
        &f,
        c,
        &geometric_ladder(12),
        &cfg,
        GammaTolerances::default(),
    )?;
    for r in &report.recovery {
        println!(
            "recovery s = {:<12.9} F_s = {:.8} F = {:.8} gap = {:.3e}",
            r.s, r.value, r.limit, r.gap
        );
    }
    for r in &report.liminf {
        println!(
            "liminf   k = {:<2} s = {:<12.9} F_k(f_k) = {:.8} margin = {:+.3e}",
            r.k, r.s, r.value, r.margin
        );
    }
    println!(
        "tail margin {:+.3e}; recovery {}, liminf {}",
        tail_min_margin(&report.liminf),
        report.recovery_passed,
        report.liminf_passed
    );
    Ok(())
}
