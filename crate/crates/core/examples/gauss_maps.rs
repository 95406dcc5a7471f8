//! Extracts the hyperbolic Gauss maps of a front and checks the cross-ratio
//! laws of the resulting Darboux pair.

use flatfront::front::FlatFrontFamily;
use flatfront::gauss::{gauss_maps, verify_local_pair_cross_ratios, DarbouxPair};
use flatfront::grid::QuadGrid;
use flatfront::holo::make_linear;

fn main() -> flatfront::Result<()> {
    let h = make_linear(QuadGrid::new(8, 8)?, 1.0, 1.0)?;
    let family = FlatFrontFamily::build(&h, 0.5)?;

    let maps = gauss_maps(&family).check();
    println!("H = 2 h h*: lightlike {:.2e}, dyadic {:.2e}", maps.lightlike, maps.dyadic);

    let pair = DarbouxPair::from_front(&family)?;
    let report = pair.check();
    println!(
        "pair labels ({}, {}), face laws {:.2e}, edge laws {:.2e}",
        pair.b.labels().next().unwrap(),
        pair.b.labels().last().unwrap(),
        report.max_face_residual(),
        report.max_edge_residual(),
    );
    let local = verify_local_pair_cross_ratios(&family);
    println!("frame-local laws: {:.2e}, min separation {:.2e}", local.max_residual(), local.min_separation);
    Ok(())
}
