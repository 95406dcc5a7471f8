//! Builds the parallel family of flat fronts of a linear map and runs the
//! full validation suite on three members.

use flatfront::front::FlatFrontFamily;
use flatfront::grid::{QuadGrid, Vertex};
use flatfront::holo::make_linear;
use flatfront::io::{run_validation, Tolerances};

fn main() -> flatfront::Result<()> {
    let h = make_linear(QuadGrid::new(12, 12)?, 1.0, 1.0)?;
    let family = FlatFrontFamily::build(&h, 0.5)?;
    let x = family.eval(0.0).x[Vertex::new(3, 4)];
    println!("X(3, 4) = {:?}, det X = {:.15}", x.0, x.det());

    let report = run_validation(&h, 0.5, &[-0.5, 0.0, 0.5], &Tolerances::default());
    for check in &report.checks {
        let s = check.s.map_or(String::new(), |s| format!(" (s = {s})"));
        let value = check.max_residual.map_or("-".into(), |r| format!("{r:.2e}"));
        println!("{:<20}{s:<12} {value:>10} / {:.0e}  {:?}", check.name, check.tolerance, check.status);
    }
    println!("passed: {}", report.passed);
    Ok(())
}
