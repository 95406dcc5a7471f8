//! Concircularity of face quadruples: planarity plus a real cross ratio.

use nalgebra::Matrix4x3;
use num_complex::Complex64;
use serde::Serialize;

use super::{FlatFrontFamily, FrontSample};
use crate::frame::HermitianMat;
use crate::grid::Face;
use crate::holo::cross_ratio;

/// Planes whose Minkowski Gram matrix is this close to singular are
/// treated as degenerate and get no cross-ratio test.
const DEGENERATE_PLANE_TOL: f64 = 1e-8;

/// Signature of the plane spanned by a quadruple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CircleKind {
    /// Spacelike plane: points are complex numbers.
    Elliptic,
    /// Timelike plane: points are split-complex numbers.
    Hyperbolic,
    /// Lightlike or numerically rank-deficient plane.
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Circularity {
    /// Third over first singular value of the three edge vectors from `P_i`.
    pub planarity: f64,
    pub kind: CircleKind,
    /// Both components of the cross ratio: real and imaginary part for
    /// elliptic planes, the two null-coordinate cross ratios for hyperbolic ones.
    pub cross_ratio: Option<[f64; 2]>,
    /// Deviation of the cross ratio from a real value, relative to its size.
    pub reality: Option<f64>,
}

impl Circularity {
    pub fn residual(&self) -> f64 {
        self.planarity.max(self.reality.unwrap_or(0.0))
    }
}

/// Tests four points of Minkowski space for lying on a common circle.
///
/// The plane coordinates come from a Minkowski Gram-Schmidt step on the
/// chords `P_j - P_i` and `P_l - P_i`, so no Euclidean projection enters
/// the cross ratio.
pub fn face_circularity(points: &[HermitianMat; 4]) -> Circularity {
    let origin = points[0];
    let diffs = [points[1] - origin, points[2] - origin, points[3] - origin];
    let m = Matrix4x3::from_fn(|r, c| diffs[c].0[r]);
    let sv = m.singular_values();
    let (lo, hi) = sv.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let planarity = if hi > 0.0 { lo / hi } else { 0.0 };

    // Chords of the hyperboloid are spacelike; take the longer of the two
    // edges at P_i as first axis and split the other off it.
    let (first, second) = if diffs[0].dot(&diffs[0]).abs() >= diffs[2].dot(&diffs[2]).abs() {
        (diffs[0], diffs[2])
    } else {
        (diffs[2], diffs[0])
    };
    let n1 = first.dot(&first);
    let scale = n1.abs().max(second.dot(&second).abs()).max(f64::MIN_POSITIVE);
    let e1 = (n1 != 0.0).then(|| first * (1.0 / n1.abs().sqrt()));
    let rest = e1.map(|e1| second - e1 * (second.dot(&e1) * n1.signum()));
    let n2 = rest.map_or(0.0, |r| r.dot(&r));
    let kind = if e1.is_none() || n2.abs() <= DEGENERATE_PLANE_TOL * scale {
        CircleKind::Degenerate
    } else if n1 > 0.0 && n2 > 0.0 {
        CircleKind::Elliptic
    } else {
        CircleKind::Hyperbolic
    };

    let coords = |e1: HermitianMat, e2: HermitianMat| -> Vec<[f64; 2]> {
        points
            .iter()
            .map(|p| {
                let d = *p - origin;
                [d.dot(&e1), d.dot(&e2)]
            })
            .collect()
    };
    let (cross_ratio, reality) = match (kind, e1, rest) {
        (CircleKind::Elliptic, Some(e1), Some(r)) => {
            let z: Vec<Complex64> = coords(e1, r * (1.0 / n2.sqrt()))
                .iter()
                .map(|c| Complex64::new(c[0], c[1]))
                .collect();
            match cross_ratio(z[0], z[1], z[2], z[3]) {
                Ok(cr) => (Some([cr.re, cr.im]), Some(cr.im.abs() / cr.norm().max(1.0))),
                Err(_) => (None, None),
            }
        }
        (CircleKind::Hyperbolic, Some(e1), Some(r)) => {
            // Null coordinates; sign flips of either axis only swap or keep
            // the two cross ratios.
            let c = coords(e1, r * (1.0 / n2.abs().sqrt()));
            let real_cr = |sign: f64| {
                let w: Vec<Complex64> = c.iter().map(|c| Complex64::new(c[0] - sign * c[1], 0.0)).collect();
                cross_ratio(w[0], w[1], w[2], w[3]).map(|cr| cr.re)
            };
            match (real_cr(1.0), real_cr(-1.0)) {
                (Ok(a), Ok(b)) => (
                    Some([a, b]),
                    Some((a - b).abs() / a.abs().max(b.abs()).max(1.0)),
                ),
                _ => (None, None),
            }
        }
        _ => (None, None),
    };
    Circularity {
        planarity,
        kind,
        cross_ratio,
        reality,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FaceCircularity {
    pub face: Face,
    pub circularity: Circularity,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CircularityReport {
    pub faces: Vec<FaceCircularity>,
}

impl CircularityReport {
    pub fn max_planarity(&self) -> f64 {
        self.faces.iter().map(|f| f.circularity.planarity).fold(0.0, f64::max)
    }

    pub fn max_reality(&self) -> f64 {
        self.faces
            .iter()
            .filter_map(|f| f.circularity.reality)
            .fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.max_planarity().max(self.max_reality())
    }

    /// Faces whose cross ratio could not be tested.
    pub fn untested(&self) -> Vec<Face> {
        self.faces
            .iter()
            .filter(|f| f.circularity.reality.is_none())
            .map(|f| f.face)
            .collect()
    }
}

pub fn circularity_check(sample: &FrontSample) -> CircularityReport {
    let faces = sample
        .grid()
        .faces()
        .map(|face| FaceCircularity {
            face,
            circularity: face_circularity(&face.vertices().map(|v| sample.x[v])),
        })
        .collect();
    CircularityReport { faces }
}

/// Circularity of the frame-local copy of every face.
pub fn local_circularity_check(family: &FlatFrontFamily, s: f64) -> CircularityReport {
    let faces = family
        .grid()
        .faces()
        .map(|face| FaceCircularity {
            face,
            circularity: face_circularity(&family.local_face(face, s).x),
        })
        .collect();
    CircularityReport { faces }
}
