//! Discrete holomorphic maps: a linear grid, a Moebius image of it and the
//! Christoffel dual with its factorizing function.

use flatfront::grid::{QuadGrid, Vertex};
use flatfront::holo::{make_linear, make_moebius, DualData, Moebius};
use num_complex::Complex64;

fn main() -> flatfront::Result<()> {
    let grid = QuadGrid::new(6, 6)?;
    let h = make_linear(grid, 1.0, 0.5)?;
    let face_cr = h.face_cross_ratio(grid.faces().next().unwrap())?;
    println!("linear map: face cross ratio {face_cr:.6}, holom residual {:.2e}", h.validate(1e-12).max_residual);

    let m = Moebius::new(
        Complex64::new(1.0, 0.5),
        Complex64::new(-0.3, 0.2),
        Complex64::new(0.05, -0.02),
        Complex64::new(1.0, 0.0),
    );
    let moved = make_moebius(&h, &m)?;
    println!("Moebius image: holom residual {:.2e}", moved.validate(1e-12).max_residual);

    let dual = DualData::compute(&h, Vertex::new(0, 0))?;
    let (product, quotient) = dual.check(&h);
    println!("dual: r_i r_j a_ij = |dg|^2 to {product:.2e}, dg* = dg/(r_i r_j) to {quotient:.2e}");
    Ok(())
}
