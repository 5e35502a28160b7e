//! Solve `(-Δ)^s u = 1` on (-1, 1) and compare with the closed-form
//! solution `K (1 - x²)^s` on a sequence of grids.

use fraclap::forward::validate_forward;

fn main() -> fraclap::error::Result<()> {
    for s in [0.25, 0.5, 0.75] {
        let report = validate_forward(-1.0, 1.0, &[64, 128, 256, 512], s)?;
        println!("s = {s}");
        for r in &report.rows {
            println!(
                "  n = {:4}  rel L2 error = {:.3e}  u(0) = {:.6} (exact {:.6})",
                r.n, r.rel_l2_error, r.u_mid, r.exact_mid
            );
        }
        println!("  monotone: {}", report.monotone());
    }
    Ok(())
}
