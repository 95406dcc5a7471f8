//! JSON documents, Poincaré-ball projection, OBJ export and validation runs.

mod config;
mod validation;

pub use config::{RunConfig, Tolerances};
pub use validation::{run_validation, validate_family, CheckResult, CheckStatus, ValidationReport};

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{HermitianMat, Mat2};
use crate::front::{FlatFrontFamily, FrontSample, GEO_TOL};
use crate::gauss::{DarbouxPair, Lift};
use crate::grid::{EdgeLabelling, QuadGrid, VertexField};
use crate::holo::{DualData, HolomorphicMap};
use crate::invert::WeierstrassData;

type Pair = [f64; 2];

fn pack(z: &Complex64) -> Pair {
    [z.re, z.im]
}

fn unpack(p: &Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn field<T: Clone>(grid: QuadGrid, values: &[T], what: &'static str) -> Result<VertexField<T>> {
    if values.len() != grid.vertex_count() {
        return Err(Error::LengthMismatch {
            what,
            expected: grid.vertex_count(),
            actual: values.len(),
        });
    }
    VertexField::from_vec(grid, values.to_vec())
}

/// A holomorphic map: vertex values in index order `n * rows + m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoloDoc {
    pub rows: usize,
    pub cols: usize,
    pub g: Vec<Pair>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl HoloDoc {
    pub fn from_map(h: &HolomorphicMap) -> Self {
        let grid = h.grid();
        Self {
            rows: grid.rows(),
            cols: grid.cols(),
            g: h.g().values().iter().map(pack).collect(),
            alpha: h.labelling().alpha().to_vec(),
            beta: h.labelling().beta().to_vec(),
        }
    }

    pub fn grid(&self) -> Result<QuadGrid> {
        QuadGrid::new(self.rows, self.cols)
    }

    pub fn to_map(&self) -> Result<HolomorphicMap> {
        let grid = self.grid()?;
        let g: Vec<Complex64> = self.g.iter().map(unpack).collect();
        let labelling = EdgeLabelling::new(grid, self.alpha.clone(), self.beta.clone())?;
        HolomorphicMap::new(field(grid, &g, "g")?, labelling)
    }
}

/// Christoffel dual `g*` and the factorizing function `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualDoc {
    pub rows: usize,
    pub cols: usize,
    pub gstar: Vec<Pair>,
    pub r: Vec<f64>,
}

impl DualDoc {
    pub fn from_data(grid: QuadGrid, d: &DualData) -> Self {
        Self {
            rows: grid.rows(),
            cols: grid.cols(),
            gstar: d.gstar.values().iter().map(pack).collect(),
            r: d.r.values().to_vec(),
        }
    }
}

/// One member of the parallel family: Pauli coordinates of `X` and `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleDoc {
    pub s: f64,
    pub x: Vec<[f64; 4]>,
    pub n: Vec<[f64; 4]>,
}

impl SampleDoc {
    pub fn from_sample(sample: &FrontSample) -> Self {
        Self {
            s: sample.s,
            x: sample.x.values().iter().map(|h| h.0).collect(),
            n: sample.n.values().iter().map(|h| h.0).collect(),
        }
    }

    pub fn to_sample(&self, grid: QuadGrid) -> Result<FrontSample> {
        let conv = |v: &[[f64; 4]]| v.iter().map(|c| HermitianMat(*c)).collect::<Vec<_>>();
        Ok(FrontSample {
            s: self.s,
            x: field(grid, &conv(&self.x), "x")?,
            n: field(grid, &conv(&self.n), "n")?,
        })
    }
}

/// A flat front family: its data, frame entries `[a, b, c, d]` and samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontDoc {
    pub holo: HoloDoc,
    pub t: f64,
    pub frame: Vec<[Pair; 4]>,
    pub samples: Vec<SampleDoc>,
}

impl FrontDoc {
    pub fn from_family(family: &FlatFrontFamily, s: &[f64]) -> Self {
        let frame = family
            .frame()
            .field()
            .values()
            .iter()
            .map(|m| [pack(&m.a), pack(&m.b), pack(&m.c), pack(&m.d)])
            .collect();
        Self {
            holo: HoloDoc::from_map(family.holo()),
            t: family.t(),
            frame,
            samples: s.iter().map(|&s| SampleDoc::from_sample(&family.eval(s))).collect(),
        }
    }

    pub fn frame_field(&self) -> Result<VertexField<Mat2>> {
        let grid = self.holo.grid()?;
        let m: Vec<Mat2> = self
            .frame
            .iter()
            .map(|e| Mat2::new(unpack(&e[0]), unpack(&e[1]), unpack(&e[2]), unpack(&e[3])))
            .collect();
        field(grid, &m, "frame")
    }
}

/// A Darboux pair: lifts `[[re, im], [re, im]]` per vertex for each leg.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDoc {
    pub rows: usize,
    pub cols: usize,
    pub t: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub hplus: Vec<[Pair; 2]>,
    pub hminus: Vec<[Pair; 2]>,
}

impl PairDoc {
    pub fn from_pair(pair: &DarbouxPair) -> Self {
        let grid = pair.grid();
        let lifts = |f: &VertexField<Lift>| f.values().iter().map(|l| [pack(&l[0]), pack(&l[1])]).collect();
        Self {
            rows: grid.rows(),
            cols: grid.cols(),
            t: pair.t,
            alpha: pair.b.alpha().to_vec(),
            beta: pair.b.beta().to_vec(),
            hplus: lifts(&pair.hplus),
            hminus: lifts(&pair.hminus),
        }
    }

    pub fn to_pair(&self) -> Result<DarbouxPair> {
        let grid = QuadGrid::new(self.rows, self.cols)?;
        let lifts = |v: &[[Pair; 2]], what| {
            let l: Vec<Lift> = v.iter().map(|p| [unpack(&p[0]), unpack(&p[1])]).collect();
            field(grid, &l, what)
        };
        let b = EdgeLabelling::new(grid, self.alpha.clone(), self.beta.clone())?;
        DarbouxPair::new(lifts(&self.hplus, "hplus")?, lifts(&self.hminus, "hminus")?, b, self.t)
    }
}

/// Recovered Weierstrass data: the holomorphic map, `t` and the gauge `w`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassDoc {
    pub holo: HoloDoc,
    pub t: f64,
    pub w: Vec<Pair>,
}

impl WeierstrassDoc {
    pub fn from_data(d: &WeierstrassData) -> Self {
        Self {
            holo: HoloDoc::from_map(&d.g),
            t: d.t,
            w: d.w.values().iter().map(pack).collect(),
        }
    }

    pub fn to_data(&self) -> Result<WeierstrassData> {
        let g = self.holo.to_map()?;
        let w: Vec<Complex64> = self.w.iter().map(unpack).collect();
        let w = field(g.grid(), &w, "w")?;
        Ok(WeierstrassData { g, t: self.t, w })
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(doc)?)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub fn save_json<T: Serialize>(doc: &T, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(doc)? + "\n")?;
    Ok(())
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    from_json(&std::fs::read_to_string(path)?)
}

/// Stereographic projection of the forward unit hyperboloid into the unit
/// ball: `y = (x1, x2, x3) / (1 + x0)`.
///
/// `(X, X) = -1` is checked relative to `x0^2`.
pub fn poincare_project(x: &HermitianMat) -> Result<[f64; 3]> {
    let [x0, x1, x2, x3] = x.0;
    let norm = x.dot(x);
    if !((norm + 1.0).abs() <= GEO_TOL * x0.abs().max(1.0).powi(2)) {
        return Err(Error::NotUnitTimelike { norm });
    }
    if x0 <= 0.0 {
        return Err(Error::WrongSheet { x0 });
    }
    let d = 1.0 + x0;
    Ok([x1 / d, x2 / d, x3 / d])
}

/// OBJ text of a front sample: one `v` line per vertex in index order and one
/// counterclockwise `f` line per face. Coordinates are written in their
/// shortest round-trip decimal form.
pub fn obj_string(sample: &FrontSample) -> Result<String> {
    let grid = sample.grid();
    let mut out = String::new();
    for (_, x) in sample.x.iter() {
        let [a, b, c] = poincare_project(x)?;
        writeln!(out, "v {a} {b} {c}").expect("writing to a string");
    }
    for face in grid.faces() {
        let [i, j, k, l] = face.vertices().map(|v| grid.index(v) + 1);
        writeln!(out, "f {i} {j} {k} {l}").expect("writing to a string");
    }
    Ok(out)
}

pub fn export_obj(sample: &FrontSample, path: &Path) -> Result<()> {
    std::fs::write(path, obj_string(sample)?)?;
    Ok(())
}

/// Vertices and 1-based quad faces of an OBJ file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObjMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 4]>,
}

/// Reads the `v` and `f` lines written by [`obj_string`]; other lines are ignored.
pub fn parse_obj(text: &str) -> Result<ObjMesh> {
    let mut mesh = ObjMesh::default();
    for (no, line) in text.lines().enumerate() {
        let mut parts = line.split_whitespace();
        let bad = || Error::Format(format!("line {}: {line:?}", no + 1));
        match parts.next() {
            Some("v") => {
                let v: Vec<f64> = parts.map(str::parse).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
                mesh.vertices.push(v.try_into().map_err(|_| bad())?);
            }
            Some("f") => {
                let f: Vec<usize> = parts.map(str::parse).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
                mesh.faces.push(f.try_into().map_err(|_| bad())?);
            }
            _ => {}
        }
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{affine_lifts, darboux_propagate};
    use crate::grid::Vertex;
    use crate::holo::make_linear;
    use crate::invert::invert_pair;
    use proptest::prelude::*;

    fn standard(size: usize) -> FlatFrontFamily {
        let h = make_linear(QuadGrid::new(size, size).unwrap(), 1.0, 1.0).unwrap();
        FlatFrontFamily::build(&h, 0.5).unwrap()
    }

    #[test]
    fn projection_examples() {
        assert_eq!(poincare_project(&HermitianMat::E0).unwrap(), [0.0; 3]);
        for u in [0.1, 1.0, 3.5] {
            let y = poincare_project(&HermitianMat([f64::cosh(u), f64::sinh(u), 0.0, 0.0])).unwrap();
            assert!((y[0] - (u / 2.0).tanh()).abs() < 1e-15);
        }
        assert!(matches!(
            poincare_project(&HermitianMat([-1.0, 0.0, 0.0, 0.0])),
            Err(Error::WrongSheet { .. })
        ));
        assert!(matches!(
            poincare_project(&HermitianMat([1.0, 1.0, 0.0, 0.0])),
            Err(Error::NotUnitTimelike { .. })
        ));
    }

    proptest! {
        #[test]
        fn projection_lands_in_the_ball(u in 0.0f64..12.0, theta in 0.0f64..3.1, phi in 0.0f64..6.3) {
            let (s, c) = (u.sinh(), u.cosh());
            let x = HermitianMat([c, s * theta.sin() * phi.cos(), s * theta.sin() * phi.sin(), s * theta.cos()]);
            let y = poincare_project(&x).unwrap();
            let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
            prop_assert!(r < 1.0);
            prop_assert!((r - (u / 2.0).tanh()).abs() < 1e-14);
        }
    }

    #[test]
    fn obj_layout() {
        let family = standard(2);
        let text = obj_string(&family.eval(0.0)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "v 0 0 0");
        assert_eq!(lines[4], "f 1 2 4 3");
    }

    #[test]
    fn obj_round_trip_is_exact() {
        let family = standard(6);
        let sample = family.eval(0.3);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("front.obj");
        export_obj(&sample, &path).unwrap();
        let mesh = parse_obj(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(mesh.vertices.len(), 36);
        assert_eq!(mesh.faces.len(), 25);
        for (v, x) in sample.x.iter() {
            let y = poincare_project(x).unwrap();
            assert_eq!(mesh.vertices[family.grid().index(v)], y);
        }
    }

    #[test]
    fn json_round_trips_are_exact() {
        let family = standard(5);
        let holo = HoloDoc::from_map(family.holo());
        let back: HoloDoc = from_json(&to_json(&holo).unwrap()).unwrap();
        assert_eq!(back, holo);
        assert_eq!(back.to_map().unwrap(), *family.holo());

        let front = FrontDoc::from_family(&family, &[-0.5, 0.0, 0.5]);
        let back: FrontDoc = from_json(&to_json(&front).unwrap()).unwrap();
        assert_eq!(back, front);
        assert_eq!(back.frame_field().unwrap(), *family.frame().field());

        let grid = family.grid();
        let dual = DualDoc::from_data(grid, &DualData::compute(family.holo(), Vertex::new(0, 0)).unwrap());
        assert_eq!(from_json::<DualDoc>(&to_json(&dual).unwrap()).unwrap(), dual);

        let g = make_linear(grid, 2f64.sqrt(), (2.0f64 / 3.0).sqrt()).unwrap();
        let b = EdgeLabelling::uniform(grid, -2.0, 2.0 / 3.0).unwrap();
        let seed = [Complex64::new(0.1, 0.9), Complex64::new(1.0, 0.0)];
        let (pair, _) = darboux_propagate(&affine_lifts(&g), &b, 0.5, seed, Vertex::new(0, 0)).unwrap();
        let doc = PairDoc::from_pair(&pair);
        let back: PairDoc = from_json(&to_json(&doc).unwrap()).unwrap();
        assert_eq!(back.to_pair().unwrap(), pair);

        let data = invert_pair(&pair, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        let doc = WeierstrassDoc::from_data(&data);
        let back: WeierstrassDoc = from_json(&to_json(&doc).unwrap()).unwrap();
        assert_eq!(back.to_data().unwrap(), data);
    }

    proptest! {
        #[test]
        fn arbitrary_doubles_survive_json(values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 4)) {
            let doc = HoloDoc { rows: 2, cols: 2, g: vec![[values[0], values[1]], [values[2], values[3]], [0.0, 0.0], [1.0, 1.0]], alpha: vec![values[0]], beta: vec![values[3]] };
            let back: HoloDoc = from_json(&to_json(&doc).unwrap()).unwrap();
            for (a, b) in doc.g.iter().flatten().zip(back.g.iter().flatten()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let mut doc = HoloDoc::from_map(standard(3).holo());
        doc.g.pop();
        assert!(matches!(doc.to_map(), Err(Error::LengthMismatch { .. })));
        assert!(matches!(from_json::<HoloDoc>("{\"rows\": 2}"), Err(Error::Json(_))));
        assert!(matches!(parse_obj("v 1 2"), Err(Error::Format(_))));
    }
}
