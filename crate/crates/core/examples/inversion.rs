//! Recovers Weierstrass data from a Darboux pair, first for a pair taken
//! from a known front and then for a propagated one.

use flatfront::front::FlatFrontFamily;
use flatfront::gauss::{affine_lifts, darboux_propagate, DarbouxPair};
use flatfront::grid::{EdgeLabelling, QuadGrid, Vertex};
use flatfront::holo::make_linear;
use flatfront::invert::{invert_pair, invert_pair_with, pair_distance, round_trip_report, InvertOptions};
use flatfront::io::{validate_family, Tolerances};
use num_complex::Complex64;

fn main() -> flatfront::Result<()> {
    let one = Complex64::new(1.0, 0.0);
    let h = make_linear(QuadGrid::new(6, 6)?, 1.0, 1.0)?;
    let family = FlatFrontFamily::build(&h, 0.5)?;
    let pair = DarbouxPair::from_front(&family)?;
    let data = invert_pair(&pair, one, Complex64::new(0.0, 0.0))?;
    let rt = round_trip_report(&h, &data.g)?;
    println!(
        "front pair: face cross ratios to {:.2e}, dg ratio {:?} (spread {:.2e})",
        rt.cross_ratio, rt.dg_ratio, rt.dg_ratio_spread
    );

    let grid = QuadGrid::new(12, 12)?;
    let g = make_linear(grid, 1.0, 0.5)?;
    let b = EdgeLabelling::uniform(grid, -1.0, 0.25)?;
    let seed = [Complex64::new(-0.4, 1.3), one];
    let (pair, _) = darboux_propagate(&affine_lifts(&g), &b, 0.25, seed, Vertex::new(0, 0))?;
    let inv = invert_pair_with(&pair, &InvertOptions::default())?;
    let rebuilt = inv.rebuild(Vertex::new(0, 0))?;
    println!("propagated pair: rebuilt Gauss maps match to {:.2e}", pair_distance(&rebuilt, &pair));
    let report = validate_family(&rebuilt, &[-0.5, 0.0, 0.5], &Tolerances::default());
    println!("rebuilt front passes all {} checks: {}", report.checks.len(), report.passed);
    Ok(())
}
