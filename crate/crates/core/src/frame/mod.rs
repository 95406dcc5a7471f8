//! The Weierstrass connection of a discrete holomorphic map and its frame.
//!
//! For an edge `(ij)` with label `a_ij` and spectral parameter `t`,
//!
//! ```text
//! W_ij = [[1, dg_ij], [t a_ij / dg_ij, 1]] / sqrt(1 - t a_ij)
//! ```
//!
//! and the frame solves `F_j = F_i W_ij`.

mod matrix;

pub use matrix::{
    det2, dyadic_square, pauli_pack, pauli_unpack, sl2_act, HermitianMat, Mat2, HERMITIAN_TOL,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Edge, EdgeLabelling, Face, QuadGrid, Vertex, VertexField};
use crate::holo::{HolomorphicMap, DEGENERACY_REL_TOL};

/// Relative flatness tolerance: residual over the largest entry of the
/// two face products.
pub const FLAT_TOL: f64 = 1e-10;

/// Tolerance for `det F = 1`, relative to the cancellation scale of `det`.
pub const DET_TOL: f64 = 1e-10;

/// Which square root of `1 - t a` is admissible.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BranchMode {
    /// Require `1 - t a > 0` on every edge.
    #[default]
    Real,
    /// Allow `1 - t a < 0` and use the principal complex root.
    Complex,
}

/// Connection matrices on both orientations of every edge.
#[derive(Clone, Debug)]
pub struct EdgeConnection {
    grid: QuadGrid,
    t: f64,
    labelling: EdgeLabelling,
    forward: Vec<Mat2>,
    backward: Vec<Mat2>,
}

impl EdgeConnection {
    pub fn grid(&self) -> QuadGrid {
        self.grid
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn labelling(&self) -> &EdgeLabelling {
        &self.labelling
    }

    pub fn get(&self, e: Edge) -> Mat2 {
        let i = self.grid.edge_index(e);
        if e.is_forward() {
            self.forward[i]
        } else {
            self.backward[i]
        }
    }

    /// Worst `max |W_ij W_ji - I|` over all edges.
    pub fn inverse_residual(&self) -> f64 {
        self.forward
            .iter()
            .zip(&self.backward)
            .map(|(f, b)| (*f * *b - Mat2::IDENTITY).max_abs())
            .fold(0.0, f64::max)
    }

    /// Worst `|det W - 1|` over both orientations of every edge.
    pub fn det_residual(&self) -> f64 {
        self.forward
            .iter()
            .chain(&self.backward)
            .map(|w| (w.det() - 1.0).norm())
            .fold(0.0, f64::max)
    }
}

/// The single connection matrix for an edge.
pub fn connection_matrix(dg: Complex64, a: f64, t: f64) -> Mat2 {
    let s = Complex64::new(1.0 - t * a, 0.0).sqrt();
    let one = Complex64::new(1.0, 0.0);
    Mat2::new(one, dg, t * a / dg, one) * (one / s)
}

/// Checks `t` against the excluded set `{0} ∪ {1/a_ij}`.
pub fn check_parameter(labelling: &EdgeLabelling, t: f64, mode: BranchMode) -> Result<()> {
    if !t.is_finite() || t.abs() <= DEGENERACY_REL_TOL {
        return Err(Error::InvalidParameter {
            t,
            reason: "t must be nonzero".into(),
        });
    }
    for a in labelling.labels() {
        let gap = 1.0 - t * a;
        if gap.abs() <= DEGENERACY_REL_TOL * (t * a).abs().max(1.0) {
            return Err(Error::InvalidParameter {
                t,
                reason: format!("t equals 1/a for label a = {a}"),
            });
        }
        if gap < 0.0 && mode == BranchMode::Real {
            return Err(Error::InvalidParameter {
                t,
                reason: format!("1 - t a < 0 for label a = {a}"),
            });
        }
    }
    Ok(())
}

pub fn build_connection(h: &HolomorphicMap, t: f64) -> Result<EdgeConnection> {
    build_connection_with(h, t, BranchMode::Real)
}

pub fn build_connection_with(
    h: &HolomorphicMap,
    t: f64,
    mode: BranchMode,
) -> Result<EdgeConnection> {
    match check_parameter(h.labelling(), t, mode) {
        Err(Error::InvalidParameter { reason, .. }) if reason.starts_with("1 - t a < 0") => {
            let edge = h
                .grid()
                .edges()
                .find(|&e| 1.0 - t * h.label(e) < 0.0)
                .expect("some edge has 1 - t a < 0");
            return Err(Error::NegativeBranch { edge });
        }
        other => other?,
    }
    let grid = h.grid();
    let mut forward = Vec::with_capacity(grid.edge_count());
    let mut backward = Vec::with_capacity(grid.edge_count());
    for e in grid.edges() {
        let a = h.label(e);
        let dg = h.dg(e);
        if dg.norm() == 0.0 {
            return Err(Error::RegularityViolation(format!("dg vanishes on edge {e}")));
        }
        forward.push(connection_matrix(dg, a, t));
        backward.push(connection_matrix(-dg, a, t));
    }
    Ok(EdgeConnection {
        grid,
        t,
        labelling: h.labelling().clone(),
        forward,
        backward,
    })
}

/// Per-face flatness residuals `|W_ij W_jk - W_il W_lk|`, relative to the
/// largest entry of the two products.
#[derive(Clone, Debug)]
pub struct FlatnessReport {
    pub residuals: Vec<(Face, f64)>,
    pub max_residual: f64,
    pub worst_face: Option<Face>,
}

impl FlatnessReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_residual <= tolerance
    }

    pub fn offending(&self, tolerance: f64) -> Vec<Face> {
        self.residuals
            .iter()
            .filter(|(_, r)| *r > tolerance)
            .map(|(f, _)| *f)
            .collect()
    }
}

pub fn face_holonomy_residual(w: &EdgeConnection, face: Face) -> f64 {
    let [i, j, k, l] = face.vertices();
    let lhs = w.get(Edge::new(i, j)) * w.get(Edge::new(j, k));
    let rhs = w.get(Edge::new(i, l)) * w.get(Edge::new(l, k));
    let scale = lhs.max_abs().max(rhs.max_abs());
    (lhs - rhs).max_abs() / scale
}

pub fn check_flat(w: &EdgeConnection) -> FlatnessReport {
    let residuals: Vec<_> = w
        .grid
        .faces()
        .map(|f| (f, face_holonomy_residual(w, f)))
        .collect();
    let (worst_face, max_residual) = residuals
        .iter()
        .fold((None, 0.0), |(wf, wr), &(f, r)| if r > wr { (Some(f), r) } else { (wf, wr) });
    FlatnessReport {
        residuals,
        max_residual,
        worst_face,
    }
}

/// A frame `F: vertices -> SL(2, C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sl2Frame {
    f: VertexField<Mat2>,
}

impl Sl2Frame {
    pub fn new(f: VertexField<Mat2>) -> Self {
        Self { f }
    }

    pub fn grid(&self) -> QuadGrid {
        self.f.grid()
    }

    pub fn field(&self) -> &VertexField<Mat2> {
        &self.f
    }

    pub fn get(&self, v: Vertex) -> Mat2 {
        self.f[v]
    }

    /// Worst `|det F - 1|`, relative to the cancellation scale of the
    /// determinant (floored at one).
    pub fn det_drift(&self) -> f64 {
        self.f
            .values()
            .iter()
            .map(|m| (m.det() - 1.0).norm() / m.det_scale().max(1.0))
            .fold(0.0, f64::max)
    }
}

/// Consistency measures of an integrated frame, all relative to `|F|`.
#[derive(Clone, Copy, Debug)]
pub struct FrameDiagnostics {
    /// Worst `|F_j - F_i W_ij|` over edges not in the spanning tree.
    pub closure_residual: f64,
    /// Disagreement of the two monotone paths from the root to the far corner.
    pub path_residual: f64,
    pub path_steps: usize,
    pub det_drift: f64,
}

/// Integrates `F_j = F_i W_ij` from `F(root) = f_root` along the grid's
/// spanning tree.
pub fn integrate_frame(
    w: &EdgeConnection,
    root: Vertex,
    f_root: Mat2,
) -> Result<(Sl2Frame, FrameDiagnostics)> {
    let grid = w.grid;
    grid.check_vertex(root)?;
    let flat = check_flat(w);
    if !flat.passed(FLAT_TOL) {
        return Err(Error::NotFlat {
            face: flat.worst_face.unwrap_or(Face::new(0, 0)),
            residual: flat.max_residual,
        });
    }
    let mut f = VertexField::from_fn(grid, |_| Mat2::IDENTITY);
    f[root] = f_root;
    for e in grid.spanning_tree(root) {
        f[e.to] = f[e.from] * w.get(e);
    }
    let closure_residual = grid
        .non_tree_edges(root)
        .into_iter()
        .map(|e| relative_gap(f[e.to], f[e.from] * w.get(e)))
        .fold(0.0, f64::max);

    let target = if root == grid.far_corner() {
        Vertex::new(0, 0)
    } else {
        grid.far_corner()
    };
    let walk = |m_first: bool| {
        grid.monotone_path(root, target, m_first)
            .into_iter()
            .fold(f_root, |acc, e| acc * w.get(e))
    };
    let path_residual = relative_gap(walk(true), walk(false));
    let path_steps = grid.monotone_path(root, target, true).len();

    let frame = Sl2Frame::new(f);
    let det_drift = frame.det_drift();
    Ok((
        frame,
        FrameDiagnostics {
            closure_residual,
            path_residual,
            path_steps,
            det_drift,
        },
    ))
}

fn relative_gap(x: Mat2, y: Mat2) -> f64 {
    (x - y).max_abs() / x.max_abs().max(y.max_abs()).max(1.0)
}
