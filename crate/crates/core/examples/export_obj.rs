//! Writes a front as an OBJ quad mesh in the Poincare ball and its
//! holomorphic data as JSON.

use flatfront::front::FlatFrontFamily;
use flatfront::grid::QuadGrid;
use flatfront::holo::make_linear;
use flatfront::io::{export_obj, parse_obj, save_json, HoloDoc};

fn main() -> flatfront::Result<()> {
    let h = make_linear(QuadGrid::new(10, 10)?, 1.0, 1.0)?;
    let sample = FlatFrontFamily::build(&h, 0.5)?.eval(0.0);
    let dir = std::env::temp_dir().join("flatfront-example");
    std::fs::create_dir_all(&dir)?;

    let obj = dir.join("front.obj");
    export_obj(&sample, &obj)?;
    let mesh = parse_obj(&std::fs::read_to_string(&obj)?)?;
    println!("{}: {} vertices, {} faces", obj.display(), mesh.vertices.len(), mesh.faces.len());

    let json = dir.join("holo.json");
    save_json(&HoloDoc::from_map(&h), &json)?;
    println!("{}", json.display());
    Ok(())
}
