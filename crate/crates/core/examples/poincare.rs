//! Poincaré constants `1/λ_min` and the discrete maximum principle.

use fraclap::discretize::{assemble, Grid};
use fraclap::forward::{maximum_principle_check, poincare_constant};
use fraclap::linalg::{eig_extreme, Extreme};

fn main() -> fraclap::error::Result<()> {
    let grid = Grid::symmetric_unit(128)?;
    let hat = grid.sample(|x| 1.0 - x.abs());
    for s in [0.1, 0.5, 0.9, 1.0] {
        let op = assemble(&grid, s)?;
        let lmax = eig_extreme(&op, Extreme::Largest, 1e-12)?.value;
        println!(
            "s = {s:<4} C = {:.6}  lambda_max = {:.6e}  max principle: {:?}",
            poincare_constant(&op)?,
            lmax,
            maximum_principle_check(&op, &hat)?
        );
    }
    Ok(())
}
