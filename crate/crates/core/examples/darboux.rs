//! Propagates a Darboux partner of a linear map from a single seed point.

use flatfront::gauss::{affine_lifts, darboux_propagate};
use flatfront::grid::{EdgeLabelling, QuadGrid, Vertex};
use flatfront::holo::make_linear;
use num_complex::Complex64;

fn main() -> flatfront::Result<()> {
    let grid = QuadGrid::new(10, 10)?;
    let h = make_linear(grid, 1.0, 0.5)?;
    let b = EdgeLabelling::uniform(grid, -1.0, 0.25)?;
    let seed = [Complex64::new(0.7, -1.1), Complex64::new(1.0, 0.0)];
    let (pair, propagation) = darboux_propagate(&affine_lifts(&h), &b, 0.25, seed, Vertex::new(0, 0))?;
    propagation.ensure(1e-10)?;
    println!("two-path consistency {:.2e}", propagation.max_residual());
    println!("cross-ratio laws {:.2e}", pair.check().max_residual());
    let corner = pair.hminus[Vertex::new(9, 9)];
    println!("h-(9, 9) = {:.6}", corner[0] / corner[1]);
    Ok(())
}
