//! The weighted fractional energy of a fixed function tends to its
//! Dirichlet energy.

use fraclap::discretize::Grid;
use fraclap::limitlab::bbm_limit_check;

fn main() -> fraclap::error::Result<()> {
    let grid = Grid::symmetric_unit(1024)?;
    type Case = (&'static str, fn(f64) -> f64, f64);
    let cases: [Case; 2] = [
        ("1 - x^2", |x| 1.0 - x * x, 8.0 / 3.0),
        ("1 - |x|", |x| 1.0 - x.abs(), 2.0),
    ];
    for (name, v, exact) in cases {
        let report = bbm_limit_check(&grid, &grid.sample(v), &[0.5, 0.9, 0.99, 0.999])?;
        println!(
            "v = {name}: classical discrete {:.6}, continuum {exact:.6}",
            report.classical
        );
        for (&(s, q), gap) in report.rows.iter().zip(report.relative_gaps()) {
            println!("  s = {s:<6} <A_s v, v> = {q:.6}  rel gap = {gap:.3e}");
        }
    }
    Ok(())
}
