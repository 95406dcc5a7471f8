//! Parallel families of discrete flat fronts and their geometric checks.
//!
//! A frame `F` yields, for every `s`, the point and normal fields
//!
//! ```text
//! X = F (E0 cosh s + E3 sinh s) F*,   N = F (E0 sinh s + E3 cosh s) F*
//! ```
//!
//! with `det X = 1`, `det N = -1` and `(X, N) = 0`.
//!
//! Residuals throughout this module are relative to the natural size of the
//! quantities involved: fronts built from a few dozen connection steps
//! reach points whose coordinates span many orders of magnitude.

mod circular;
mod curvature;
mod lie;
mod reflection;

pub use circular::{
    circularity_check, face_circularity, local_circularity_check, CircleKind, Circularity, CircularityReport,
    FaceCircularity,
};
pub use curvature::{
    face_curvature, gauss_curvature, local_gauss_curvature, mixed_area, wedge, Bivector, CurvatureReport, FaceCurvature,
};
pub use lie::{
    curvature_sphere, curvature_sphere_check, lie_lift, local_curvature_sphere_check, lie_lift_check, parallel_transform_check,
    CurvatureSphere, LieLiftReport, LieVec, SphereEdge, SphereReport, RANK_TOL,
};
pub use reflection::{
    ambient_propagation_check, collinearity_check, local_collinearity_check, local_rodrigues_check, propagation_check, reflect, reflect_by_determinants, reflection_check,
    closed_form_k, local_reflection_vector, reflection_vector, rodrigues_check, EdgeResidual, ReflectionReport, RodriguesEdge,
    RodriguesReport,
};

use crate::error::Result;
use crate::frame::{
    build_connection_with, integrate_frame, sl2_act, BranchMode, EdgeConnection, FrameDiagnostics,
    HermitianMat, Mat2, Sl2Frame,
};
use crate::grid::{Edge, Face, QuadGrid, Vertex, VertexField};
use crate::holo::HolomorphicMap;

/// Default geometric tolerance (relative).
pub const GEO_TOL: f64 = 1e-9;

/// Threshold for singular edges and faces, relative to the local scale.
pub const SINGULAR_TOL: f64 = 1e-8;

/// Holomorphic data, its connection and integrated frame.
#[derive(Clone, Debug)]
pub struct FlatFrontFamily {
    holo: HolomorphicMap,
    t: f64,
    connection: EdgeConnection,
    frame: Sl2Frame,
    diagnostics: FrameDiagnostics,
}

impl FlatFrontFamily {
    /// Builds the family with `F = I` at vertex `(0, 0)`.
    pub fn build(h: &HolomorphicMap, t: f64) -> Result<Self> {
        Self::build_with(h, t, Vertex::new(0, 0), Mat2::IDENTITY, BranchMode::Real)
    }

    pub fn build_with(
        h: &HolomorphicMap,
        t: f64,
        root: Vertex,
        f_root: Mat2,
        mode: BranchMode,
    ) -> Result<Self> {
        let connection = build_connection_with(h, t, mode)?;
        let (frame, diagnostics) = integrate_frame(&connection, root, f_root)?;
        Ok(Self {
            holo: h.clone(),
            t,
            connection,
            frame,
            diagnostics,
        })
    }

    /// Replaces the frame, keeping the holomorphic data and connection.
    pub fn with_frame(mut self, frame: Sl2Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn grid(&self) -> QuadGrid {
        self.holo.grid()
    }

    pub fn holo(&self) -> &HolomorphicMap {
        &self.holo
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn connection(&self) -> &EdgeConnection {
        &self.connection
    }

    pub fn frame(&self) -> &Sl2Frame {
        &self.frame
    }

    pub fn diagnostics(&self) -> &FrameDiagnostics {
        &self.diagnostics
    }

    pub fn eval(&self, s: f64) -> FrontSample {
        eval_front(self, s)
    }
}

/// A face of the front moved by the isometry `F_i^{-1}` of its first vertex.
///
/// Every per-face claim is invariant under isometries, and this copy is
/// computed from connection matrices alone, so it stays well conditioned
/// where the ambient points grow large.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalFace {
    pub face: Face,
    pub x: [HermitianMat; 4],
    pub n: [HermitianMat; 4],
}

impl FlatFrontFamily {
    /// `F_i^{-1} F_v` for the four vertices `v` of a face, via `W` only.
    pub fn relative_frames(&self, face: Face) -> [Mat2; 4] {
        let [ij, jk, _, li] = face.edges();
        let w_ij = self.connection.get(ij);
        [
            Mat2::IDENTITY,
            w_ij,
            w_ij * self.connection.get(jk),
            self.connection.get(li.reversed()),
        ]
    }

    pub fn local_face(&self, face: Face, s: f64) -> LocalFace {
        let (point, normal) = base_pair(s);
        let g = self.relative_frames(face);
        LocalFace {
            face,
            x: g.map(|m| sl2_act(&m, &point)),
            n: g.map(|m| sl2_act(&m, &normal)),
        }
    }

    /// Endpoints of an edge in the frame of `e.from`: `([X_i, X_j], [N_i, N_j])`.
    pub fn local_edge(&self, e: Edge, s: f64) -> ([HermitianMat; 2], [HermitianMat; 2]) {
        let (point, normal) = base_pair(s);
        let w = self.connection.get(e);
        ([point, sl2_act(&w, &point)], [normal, sl2_act(&w, &normal)])
    }
}

/// `(E0 cosh s + E3 sinh s, E0 sinh s + E3 cosh s)`.
fn base_pair(s: f64) -> (HermitianMat, HermitianMat) {
    let (ch, sh) = (s.cosh(), s.sinh());
    (HermitianMat([ch, 0.0, 0.0, sh]), HermitianMat([sh, 0.0, 0.0, ch]))
}

/// Point and normal fields of one member of the parallel family.
#[derive(Clone, Debug, PartialEq)]
pub struct FrontSample {
    pub s: f64,
    pub x: VertexField<HermitianMat>,
    pub n: VertexField<HermitianMat>,
}

impl FrontSample {
    pub fn grid(&self) -> QuadGrid {
        self.x.grid()
    }

    /// Hyperbolic Gauss maps `H+ = X + N` and `H- = X - N` at a vertex.
    pub fn gauss_points(&self, v: Vertex) -> (HermitianMat, HermitianMat) {
        (self.x[v] + self.n[v], self.x[v] - self.n[v])
    }
}

pub fn eval_front(family: &FlatFrontFamily, s: f64) -> FrontSample {
    let (point, normal) = base_pair(s);
    let f = family.frame.field();
    FrontSample {
        s,
        x: f.map(|m| sl2_act(m, &point)),
        n: f.map(|m| sl2_act(m, &normal)),
    }
}

/// `(X(0) cosh s + N(0) sinh s, X(0) sinh s + N(0) cosh s)`.
pub fn parallel_shift(base: &FrontSample, s: f64) -> FrontSample {
    let (ch, sh) = (s.cosh(), s.sinh());
    let grid = base.grid();
    FrontSample {
        s: base.s + s,
        x: VertexField::from_fn(grid, |v| base.x[v] * ch + base.n[v] * sh),
        n: VertexField::from_fn(grid, |v| base.x[v] * sh + base.n[v] * ch),
    }
}

/// Worst-case pointwise invariants of a front sample.
#[derive(Clone, Copy, Debug, Default)]
pub struct FrontInvariants {
    /// `|det X - 1| / max(1, |X|^2)`.
    pub det_x: f64,
    /// `|det N + 1| / max(1, |N|^2)`.
    pub det_n: f64,
    /// `|(X, N)| / max(1, |X| |N|)`.
    pub orthogonality: f64,
    pub min_trace: f64,
    pub worst_vertex: Option<Vertex>,
}

impl FrontInvariants {
    pub fn max_residual(&self) -> f64 {
        self.det_x.max(self.det_n).max(self.orthogonality)
    }
}

pub fn front_invariants(sample: &FrontSample) -> FrontInvariants {
    let mut out = FrontInvariants {
        min_trace: f64::INFINITY,
        ..Default::default()
    };
    let mut worst = 0.0;
    for (v, x) in sample.x.iter() {
        let n = sample.n[v];
        let (nx, nn) = (x.euclidean_norm(), n.euclidean_norm());
        let det_x = (x.det() - 1.0).abs() / (nx * nx).max(1.0);
        let det_n = (n.det() + 1.0).abs() / (nn * nn).max(1.0);
        let orth = x.dot(&n).abs() / (nx * nn).max(1.0);
        out.det_x = out.det_x.max(det_x);
        out.det_n = out.det_n.max(det_n);
        out.orthogonality = out.orthogonality.max(orth);
        out.min_trace = out.min_trace.min(x.trace());
        let local = det_x.max(det_n).max(orth);
        if local > worst || out.worst_vertex.is_none() {
            worst = local;
            out.worst_vertex = Some(v);
        }
    }
    out
}

/// Largest relative gap between two samples, vertex by vertex.
pub fn sample_gap(a: &FrontSample, b: &FrontSample) -> f64 {
    let rel = |p: &HermitianMat, q: &HermitianMat| {
        (*p - *q).euclidean_norm() / p.euclidean_norm().max(q.euclidean_norm()).max(1.0)
    };
    a.x.iter()
        .map(|(v, x)| rel(x, &b.x[v]).max(rel(&a.n[v], &b.n[v])))
        .fold(0.0, f64::max)
}
