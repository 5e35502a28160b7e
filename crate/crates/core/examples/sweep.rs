//! Optimal controls along `s_k = 1 - 2^-k` against the classical problem.

use fraclap::control::ControlConfig;
use fraclap::discretize::Grid;
use fraclap::limitlab::{geometric_ladder, run_sweep, SweepConfig};

fn main() -> fraclap::error::Result<()> {
    let cfg = SweepConfig {
        grid: Grid::symmetric_unit(256)?,
        s_list: geometric_ladder(10),
        control: ControlConfig::default(),
        workers: 0,
        pgd_cross_check: false,
    };
    let report = run_sweep(&cfg)?;
    println!("J*_1 = {:.10}", report.reference.j_star);
    println!(
        "{:>12} {:>14} {:>11} {:>11} {:>12}",
        "s", "J*_s", "dist_f", "dist_u", "1 - align"
    );
    for r in &report.rows {
        println!(
            "{:>12.9} {:>14.10} {:>11.3e} {:>11.3e} {:>12.3e}",
            r.s,
            r.j_star,
            r.dist_f,
            r.dist_u,
            1.0 - r.align
        );
    }
    Ok(())
}
