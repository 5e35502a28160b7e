//! Extreme eigenpairs by certified shifted inverse iteration against the
//! full Jacobi decomposition.

use fraclap::discretize::{assemble, Grid};
use fraclap::linalg::{eig_extreme, eig_full_jacobi, Extreme};

fn main() -> fraclap::error::Result<()> {
    let grid = Grid::symmetric_unit(96)?;
    for s in [0.2, 0.5, 0.95] {
        let op = assemble(&grid, s)?;
        let full = eig_full_jacobi(&op)?;
        let lo = eig_extreme(&op, Extreme::Smallest, 1e-12)?;
        let hi = eig_extreme(&op, Extreme::Largest, 1e-12)?;
        println!(
            "s = {s}: lambda_min {:.12e} (jacobi {:.12e})  lambda_max {:.12e} (jacobi {:.12e})",
            lo.value,
            full.first().map_or(f64::NAN, |p| p.value),
            hi.value,
            full.last().map_or(f64::NAN, |p| p.value)
        );
    }
    Ok(())
}
