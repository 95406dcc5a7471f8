//! End-to-end acceptance suite. Prints one line per criterion and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flatfront::frame::{build_connection, check_flat, FLAT_TOL};
use flatfront::front::{
    lie_lift_check, local_collinearity_check, local_curvature_sphere_check, FlatFrontFamily,
};
use flatfront::gauss::{
    affine_lifts, darboux_propagate, pair_labelling, verify_local_pair_cross_ratios,
    verify_pair_cross_ratios, DarbouxPair,
};
use flatfront::grid::{EdgeLabelling, Face, QuadGrid, Vertex};
use flatfront::holo::{make_linear, make_moebius, validate_holomorphic, HolomorphicMap, Moebius};
use flatfront::invert::{
    invert_pair_with, normalize_lifts, pair_distance, round_trip_report, InvertOptions,
};
use flatfront::io::{
    from_json, obj_string, parse_obj, poincare_project, run_validation, to_json, validate_family,
    FrontDoc, HoloDoc, PairDoc, Tolerances, ValidationReport, WeierstrassDoc,
};
use flatfront::Error;

const FAMILY: [f64; 3] = [-0.5, 0.0, 0.5];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn standard(size: usize) -> HolomorphicMap {
    make_linear(QuadGrid::new(size, size).unwrap(), 1.0, 1.0).unwrap()
}

/// Collects measured quantities against their thresholds.
#[derive(Default)]
struct Outcome {
    lines: Vec<String>,
    failed: bool,
}

impl Outcome {
    fn below(&mut self, what: &str, value: f64, tolerance: f64) {
        let ok = value < tolerance;
        self.failed |= !ok;
        self.lines.push(format!("{what} = {value:.2e} (< {tolerance:.0e}){}", if ok { "" } else { " FAILED" }));
    }

    fn holds(&mut self, what: &str, ok: bool) {
        self.failed |= !ok;
        self.lines.push(format!("{what}{}", if ok { "" } else { " FAILED" }));
    }

    fn suite(&mut self, label: &str, report: &ValidationReport) {
        let worst = report
            .checks
            .iter()
            .filter_map(|c| c.max_residual.map(|r| (r / c.tolerance.max(f64::MIN_POSITIVE), c)))
            .max_by(|a, b| a.0.total_cmp(&b.0));
        let failures: Vec<String> = report.failures().map(|c| format!("{}@{:?}", c.name, c.s)).collect();
        self.holds(
            &format!(
                "{label}: {} checks, tightest {}",
                report.checks.len(),
                worst.map_or("-".into(), |(_, c)| format!("{} {:.2e}/{:.0e}", c.name, c.max_residual.unwrap(), c.tolerance))
            ),
            report.passed,
        );
        if !failures.is_empty() {
            self.lines.push(format!("failing: {}", failures.join(", ")));
        }
    }
}

fn forward_pipeline() -> Outcome {
    let mut out = Outcome::default();
    let report = run_validation(&standard(20), 0.5, &FAMILY, &Tolerances::default());
    out.suite("20x20, s in {-0.5, 0, 0.5}", &report);
    out
}

fn gauss_map_laws() -> Outcome {
    let mut out = Outcome::default();
    let family = FlatFrontFamily::build(&standard(20), 0.5).unwrap();
    let local = verify_local_pair_cross_ratios(&family);
    out.below("20x20 face/edge cross ratios (frame-local)", local.max_residual(), 1e-10);

    let small = FlatFrontFamily::build(&standard(8), 0.5).unwrap();
    let pair = DarbouxPair::from_front(&small).unwrap();
    let ambient = verify_pair_cross_ratios(&pair.hplus, &pair.hminus, small.holo().labelling(), 0.5);
    out.below("8x8 face/edge cross ratios (ambient)", ambient.max_residual(), 1e-10);

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let (a, t): (f64, f64) = (rng.random_range(-4.0..4.0), rng.random_range(-1.0..1.0));
        if (1.0 - t * a).abs() < 0.05 {
            continue;
        }
        let b = pair_labelling(a, t).unwrap();
        worst = worst.max(((1.0 - t * a) * (1.0 - t * b) - 1.0).abs());
    }
    out.below("(1 - ta)(1 - tb) - 1 over random (a, t)", worst, 1e-14);
    out
}

fn lie_lifts() -> Outcome {
    let mut out = Outcome::default();
    let family = FlatFrontFamily::build(&standard(20), 0.5).unwrap();
    let (mut lifts, mut rank, mut collinear) = (0.0f64, 0.0f64, 0.0f64);
    for s in FAMILY {
        lifts = lifts.max(lie_lift_check(&family.eval(s)).max_residual());
        match local_curvature_sphere_check(&family, s) {
            Ok(r) => rank = rank.max(r.max_rank_residual()),
            Err(e) => {
                out.holds(&format!("curvature sphere at s = {s}: {e}"), false);
                rank = f64::INFINITY;
            }
        }
        collinear = collinear.max(local_collinearity_check(&family, s).unwrap().max_residual());
    }
    out.below("(x,x), (n,n), (x,n)", lifts, 1e-10);
    out.below("curvature sphere rank-3 residual, every edge", rank, 1e-9);
    out.below("reflection vector / Gauss map difference collinearity", collinear, 1e-9);
    out
}

fn round_trip_a() -> Outcome {
    let mut out = Outcome::default();
    let h = standard(8);
    let family = FlatFrontFamily::build(&h, 0.5).unwrap();
    let pair = DarbouxPair::from_front(&family).unwrap();
    let options = InvertOptions {
        w_root: c(0.8, 0.3),
        g_root: c(-2.0, 1.0),
        ..Default::default()
    };
    match invert_pair_with(&pair, &options) {
        Ok(inv) => {
            let r = round_trip_report(&h, &inv.data.g).unwrap();
            out.below("8x8 face cross ratios vs original", r.cross_ratio, 1e-8);
            out.below("8x8 spread of dg / dg0", r.dg_ratio_spread, 1e-8);
        }
        Err(e) => out.holds(&format!("8x8 inversion: {e}"), false),
    }
    out
}

fn round_trip_b() -> Outcome {
    let mut out = Outcome::default();
    let grid = QuadGrid::new(12, 12).unwrap();
    // Pair labelling (-1, 1/4) at t = 1/4; the map's labels 1 and -1/4 are
    // proportional to it. The recovered dg grows geometrically across the
    // grid at a rate set by t b, which bounds the usable size (see README).
    let t = 0.25;
    let g = make_linear(grid, 1.0, 0.5).unwrap();
    let b = EdgeLabelling::uniform(grid, -1.0, 0.25).unwrap();
    let root = Vertex::new(0, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut consistency, mut laws, mut distance) = (0.0f64, 0.0f64, 0.0f64);
    let mut reports = Vec::new();
    for _ in 0..10 {
        let seed = [c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)), c(1.0, 0.0)];
        let run = darboux_propagate(&affine_lifts(&g), &b, t, seed, root).and_then(|(pair, propagation)| {
            let inv = invert_pair_with(&pair, &InvertOptions::default())?;
            let rebuilt = inv.rebuild(root)?;
            Ok((pair, propagation, rebuilt))
        });
        match run {
            Ok((pair, propagation, rebuilt)) => {
                consistency = consistency.max(propagation.max_residual());
                laws = laws.max(pair.check().max_residual());
                distance = distance.max(pair_distance(&rebuilt, &pair));
                reports.push((seed[0], validate_family(&rebuilt, &FAMILY, &Tolerances::default())));
            }
            Err(e) => out.holds(&format!("seed {:.3}: {e}", seed[0]), false),
        }
    }
    out.below("12x12 propagated pairs, two-path face consistency", consistency, 1e-10);
    out.below("propagated pair cross-ratio laws", laws, 1e-10);
    out.below("rebuilt Gauss maps vs pair (projective)", distance, 1e-8);
    for (seed, report) in &reports {
        out.suite(&format!("seed {seed:.3}, rebuilt front, s in {{-0.5, 0, 0.5}}"), report);
    }
    out
}

fn negative_tests() -> Outcome {
    let mut out = Outcome::default();
    let h = standard(6);
    let grid = h.grid();
    let mut localized = true;
    for v in grid.vertices() {
        let mut g = h.g().clone();
        g[v] += c(1e-3, 0.0);
        let mut around = grid.faces_around(v);
        around.sort_by_key(|f| (f.n, f.m));
        let holom = validate_holomorphic(&g, h.labelling(), 1e-12);
        let mut flagged = holom.offending_faces.clone();
        flagged.sort_by_key(|f| (f.n, f.m));
        let perturbed = HolomorphicMap::new(g, h.labelling().clone()).unwrap();
        let flat = check_flat(&build_connection(&perturbed, 0.5).unwrap());
        let mut flat_faces: Vec<Face> = flat.offending(FLAT_TOL);
        flat_faces.sort_by_key(|f| (f.n, f.m));
        localized &= flagged == around && flat_faces == around;
    }
    out.holds("g + 1e-3 at each vertex of 6x6: holom and flatness flag exactly the incident faces", localized);

    let excluded = [0.0, 1.0, -1.0].map(|t| FlatFrontFamily::build(&h, t));
    out.holds(
        "t in {0, 1/a} rejected",
        excluded.iter().all(|r| matches!(r, Err(Error::InvalidParameter { .. }))),
    );

    let family = FlatFrontFamily::build(&standard(4), 0.5).unwrap();
    let mut pair = DarbouxPair::from_front(&family).unwrap();
    let v = Vertex::new(2, 1);
    pair.hminus[v] = pair.hplus[v].map(|z| z * c(0.0, 3.0));
    out.holds(
        "coincident pair points rejected",
        matches!(normalize_lifts(&pair), Err(Error::CoincidentPoints(w)) if w == v),
    );
    out
}

fn moebius_invariance() -> Outcome {
    let mut out = Outcome::default();
    let h = standard(20);
    let m = Moebius::new(c(1.0, 0.5), c(-0.3, 0.2), c(0.05, -0.02), c(1.0, 0.0));
    let mapped = match make_moebius(&h, &m) {
        Ok(x) => x,
        Err(e) => {
            out.holds(&format!("transformation: {e}"), false);
            return out;
        }
    };
    let worst = h
        .grid()
        .faces()
        .map(|f| {
            let (p, q) = (h.face_cross_ratio(f).unwrap(), mapped.face_cross_ratio(f).unwrap());
            (p - q).norm() / p.norm().max(1.0)
        })
        .fold(0.0, f64::max);
    out.below("20x20 face cross ratios after Moebius map", worst, 1e-12);
    out.suite("transformed front, s in {-0.5, 0, 0.5}", &run_validation(&mapped, 0.5, &FAMILY, &Tolerances::default()));
    out
}

fn export() -> Outcome {
    let mut out = Outcome::default();
    let size = 10;
    let family = FlatFrontFamily::build(&standard(size), 0.5).unwrap();
    let mut radius = 0.0f64;
    for s in FAMILY {
        for (_, x) in family.eval(s).x.iter() {
            let y = poincare_project(x).unwrap();
            radius = radius.max((y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt());
        }
    }
    out.holds(
        &format!("10x10 largest |y| = 1 - {:.2e}, inside 1 - 1e-12", 1.0 - radius),
        radius < 1.0 - 1e-12,
    );

    let sample = family.eval(0.5);
    let mesh = parse_obj(&obj_string(&sample).unwrap()).unwrap();
    out.holds(
        "OBJ has M*N vertices and (M-1)(N-1) faces",
        mesh.vertices.len() == size * size && mesh.faces.len() == (size - 1) * (size - 1),
    );
    let grid = family.grid();
    let exact = sample.x.iter().all(|(v, x)| {
        let y = poincare_project(x).unwrap();
        mesh.vertices[grid.index(v)].iter().zip(y).all(|(a, b)| a.to_bits() == b.to_bits())
    });
    out.holds("OBJ re-import is bit-exact", exact);

    let holo = HoloDoc::from_map(family.holo());
    let front = FrontDoc::from_family(&family, &FAMILY);
    let pair = PairDoc::from_pair(&DarbouxPair::from_front(&family).unwrap());
    let data = invert_pair_with(
        &DarbouxPair::from_front(&FlatFrontFamily::build(&standard(5), 0.5).unwrap()).unwrap(),
        &InvertOptions::default(),
    )
    .unwrap();
    let weierstrass = WeierstrassDoc::from_data(&data.data);
    let json_exact = from_json::<HoloDoc>(&to_json(&holo).unwrap()).unwrap() == holo
        && from_json::<FrontDoc>(&to_json(&front).unwrap()).unwrap() == front
        && from_json::<PairDoc>(&to_json(&pair).unwrap()).unwrap() == pair
        && from_json::<WeierstrassDoc>(&to_json(&weierstrass).unwrap()).unwrap() == weierstrass;
    out.holds("JSON round trips are bit-exact for every document", json_exact);
    out
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("forward pipeline", forward_pipeline),
        ("Gauss-map cross-ratio laws", gauss_map_laws),
        ("Lie lifts and curvature spheres", lie_lifts),
        ("round trip from forward data", round_trip_a),
        ("round trip from a propagated pair", round_trip_b),
        ("negative tests", negative_tests),
        ("Moebius invariance", moebius_invariance),
        ("export", export),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        all &= !outcome.failed;
        let verdict = if outcome.failed { "FAIL" } else { "PASS" };
        println!("criterion {}: {verdict} {name} ({:.2?})", i + 1, start.elapsed());
        for line in &outcome.lines {
            println!("    {line}");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
