//! Discrete holomorphic maps: complex vertex functions whose face cross
//! ratios factorize over a real edge-labelling,
//! `cr(g_i, g_j, g_k, g_l) = a_ij / a_jk`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{
    derivative, integrate_edge_form_with, EdgeForm, EdgeLabelling, Face, QuadGrid, Vertex,
    VertexField,
};
use crate::grid::{Edge, EdgeValue};

/// Relative threshold below which a difference counts as zero.
pub const DEGENERACY_REL_TOL: f64 = 1e-12;

/// Default per-face tolerance for the factorized cross-ratio condition.
pub const CROSS_RATIO_TOL: f64 = 1e-9;

/// `(dg_ij / dg_jk) * (dg_kl / dg_li)` with `dg_ij = z_j - z_i`.
pub fn cross_ratio(zi: Complex64, zj: Complex64, zk: Complex64, zl: Complex64) -> Result<Complex64> {
    let (d_ij, d_jk, d_kl, d_li) = (zj - zi, zk - zj, zl - zk, zi - zl);
    let scale = [d_ij, d_jk, d_kl, d_li]
        .iter()
        .map(|d| d.norm())
        .fold(0.0, f64::max);
    let tiny = DEGENERACY_REL_TOL * scale;
    if d_jk.norm() <= tiny || d_li.norm() <= tiny {
        return Err(Error::DegenerateQuad);
    }
    Ok((d_ij / d_jk) * (d_kl / d_li))
}

/// A complex vertex function together with its cross-ratio labelling.
///
/// Construction only checks shapes; use [`HolomorphicMap::validate`] to
/// check the cross-ratio condition itself.
#[derive(Clone, Debug, PartialEq)]
pub struct HolomorphicMap {
    g: VertexField<Complex64>,
    labelling: EdgeLabelling,
}

impl HolomorphicMap {
    pub fn new(g: VertexField<Complex64>, labelling: EdgeLabelling) -> Result<Self> {
        if !labelling.fits(g.grid()) {
            return Err(Error::LengthMismatch {
                what: "labelling",
                expected: g.grid().edge_count(),
                actual: labelling.alpha().len() + labelling.beta().len(),
            });
        }
        Ok(Self { g, labelling })
    }

    pub fn grid(&self) -> QuadGrid {
        self.g.grid()
    }

    pub fn g(&self) -> &VertexField<Complex64> {
        &self.g
    }

    pub fn labelling(&self) -> &EdgeLabelling {
        &self.labelling
    }

    pub fn label(&self, e: Edge) -> f64 {
        self.labelling.label(e)
    }

    pub fn dg(&self, e: Edge) -> Complex64 {
        derivative(&self.g, e)
    }

    pub fn face_cross_ratio(&self, face: Face) -> Result<Complex64> {
        let [i, j, k, l] = face.vertices();
        cross_ratio(self.g[i], self.g[j], self.g[k], self.g[l])
    }

    pub fn validate(&self, tolerance: f64) -> HolomorphicReport {
        validate_holomorphic(&self.g, &self.labelling, tolerance)
    }
}

/// Grid `g(m, n) = m*alpha + i*n*beta` with labels `alpha^2` and `-beta^2`.
pub fn make_linear(grid: QuadGrid, alpha: f64, beta: f64) -> Result<HolomorphicMap> {
    if alpha == 0.0 || beta == 0.0 || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::Config(format!(
            "linear map needs nonzero finite spacings, got ({alpha}, {beta})"
        )));
    }
    let g = VertexField::from_fn(grid, |v| Complex64::new(v.m as f64 * alpha, v.n as f64 * beta));
    let labelling = EdgeLabelling::uniform(grid, alpha * alpha, -beta * beta)?;
    HolomorphicMap::new(g, labelling)
}

/// Fractional linear map `z -> (a z + b) / (c z + d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moebius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Moebius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self::new(one, zero, zero, one)
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// `None` when `z` is (numerically) the pole.
    pub fn apply(&self, z: Complex64) -> Option<Complex64> {
        let num = self.a * z + self.b;
        let den = self.c * z + self.d;
        let scale = (self.c * z).norm() + self.d.norm();
        if den.norm() <= DEGENERACY_REL_TOL * scale {
            None
        } else {
            Some(num / den)
        }
    }
}

/// Applies a Moebius transformation to every vertex; the labelling is kept.
pub fn make_moebius(h: &HolomorphicMap, mobius: &Moebius) -> Result<HolomorphicMap> {
    let coeff_scale = mobius.a.norm() * mobius.d.norm() + mobius.b.norm() * mobius.c.norm();
    if mobius.det().norm() <= DEGENERACY_REL_TOL * coeff_scale {
        return Err(Error::SingularMoebius);
    }
    let mut values = Vec::with_capacity(h.grid().vertex_count());
    for (v, &z) in h.g.iter() {
        values.push(mobius.apply(z).ok_or(Error::PoleOnVertex(v))?);
    }
    let mapped = HolomorphicMap::new(VertexField::from_vec(h.grid(), values)?, h.labelling.clone())?;
    let report = mapped.validate(CROSS_RATIO_TOL);
    if !report.degenerate_edges.is_empty() {
        return Err(Error::RegularityViolation(format!(
            "{} edges collapse under the transformation",
            report.degenerate_edges.len()
        )));
    }
    if !report.irregular_faces.is_empty() {
        return Err(Error::RegularityViolation(format!(
            "{} faces have cross ratio 0, 1 or infinity",
            report.irregular_faces.len()
        )));
    }
    Ok(mapped)
}

/// Per-face outcome of [`validate_holomorphic`].
#[derive(Clone, Debug)]
pub struct HolomorphicReport {
    /// `|cr * a_jk - a_ij| / max(|a_ij|, |a_jk|)` per face, in grid face
    /// order; infinite where the cross ratio is undefined.
    pub residuals: Vec<(Face, f64)>,
    pub max_residual: f64,
    pub worst_face: Option<Face>,
    pub tolerance: f64,
    /// Faces exceeding the tolerance or failing regularity.
    pub offending_faces: Vec<Face>,
    /// Faces whose cross ratio is within the degeneracy threshold of 0 or 1.
    pub irregular_faces: Vec<Face>,
    /// Edges with `dg = 0`.
    pub degenerate_edges: Vec<Edge>,
}

impl HolomorphicReport {
    pub fn passed(&self) -> bool {
        self.offending_faces.is_empty() && self.degenerate_edges.is_empty()
    }
}

pub fn validate_holomorphic(
    g: &VertexField<Complex64>,
    a: &EdgeLabelling,
    tolerance: f64,
) -> HolomorphicReport {
    let grid = g.grid();
    let scale = g
        .values()
        .iter()
        .map(|z| z.norm())
        .chain(grid.edges().map(|e| derivative(g, e).norm()))
        .fold(0.0, f64::max);
    let degenerate_edges: Vec<Edge> = grid
        .edges()
        .filter(|&e| derivative(g, e).norm() <= DEGENERACY_REL_TOL * scale)
        .collect();

    let mut residuals = Vec::with_capacity(grid.face_count());
    let mut offending_faces = Vec::new();
    let mut irregular_faces = Vec::new();
    for face in grid.faces() {
        let [i, j, k, l] = face.vertices();
        let [e_ij, e_jk, ..] = face.edges();
        let (a_ij, a_jk) = (a.label(e_ij), a.label(e_jk));
        let residual = match cross_ratio(g[i], g[j], g[k], g[l]) {
            Ok(cr) => {
                if cr.norm() <= DEGENERACY_REL_TOL || (cr - 1.0).norm() <= DEGENERACY_REL_TOL {
                    irregular_faces.push(face);
                }
                (cr * a_jk - a_ij).norm() / a_ij.abs().max(a_jk.abs())
            }
            Err(_) => {
                irregular_faces.push(face);
                f64::INFINITY
            }
        };
        if !(residual <= tolerance) || irregular_faces.last() == Some(&face) {
            offending_faces.push(face);
        }
        residuals.push((face, residual));
    }
    let (worst_face, max_residual) = residuals
        .iter()
        .fold((None, 0.0), |(wf, wr), &(f, r)| if r > wr { (Some(f), r) } else { (wf, wr) });
    HolomorphicReport {
        residuals,
        max_residual,
        worst_face,
        tolerance,
        offending_faces,
        irregular_faces,
        degenerate_edges,
    }
}

/// The Christoffel 1-form `a_ij / conj(dg_ij)`.
pub fn christoffel_form(h: &HolomorphicMap) -> EdgeForm<Complex64> {
    EdgeForm::from_fn(h.grid(), |e| h.label(e) / h.dg(e).conj())
}

/// Christoffel dual `g*` with `dg*_ij = a_ij / conj(dg_ij)`.
///
/// Returns the dual together with the worst relative face sum of its
/// defining form.
pub fn christoffel_dual(
    h: &HolomorphicMap,
    root: Vertex,
    root_value: Complex64,
) -> Result<(VertexField<Complex64>, f64)> {
    let form = christoffel_form(h);
    let scale = form.max_magnitude().max(f64::MIN_POSITIVE);
    let (_, closure) = form.closedness();
    let gstar = integrate_edge_form_with(&form, root, root_value, form.default_tolerance())?;
    Ok((gstar, closure / scale))
}

/// Real vertex function with `r_i r_j = |dg_ij|^2 / a_ij` on every edge,
/// propagated from `r(root) = r_root` along the grid's spanning tree.
pub fn factorize_r(h: &HolomorphicMap, root: Vertex, r_root: f64) -> Result<VertexField<f64>> {
    let grid = h.grid();
    grid.check_vertex(root)?;
    if r_root == 0.0 || !r_root.is_finite() {
        return Err(Error::Config(format!("r_root must be nonzero, got {r_root}")));
    }
    let mut r = VertexField::from_fn(grid, |_| 0.0);
    r[root] = r_root;
    for e in grid.spanning_tree(root) {
        r[e.to] = h.dg(e).norm_sqr() / h.label(e) / r[e.from];
    }
    for face in grid.faces() {
        let residual = face
            .edges()
            .iter()
            .map(|&e| product_residual(h, &r, e))
            .fold(0.0, f64::max);
        if residual > CROSS_RATIO_TOL {
            return Err(Error::Inconsistent { face, residual });
        }
    }
    Ok(r)
}

fn product_residual(h: &HolomorphicMap, r: &VertexField<f64>, e: Edge) -> f64 {
    let target = h.dg(e).norm_sqr();
    (r[e.from] * r[e.to] * h.label(e) - target).abs() / target
}

/// Christoffel dual together with the factorizing function `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualData {
    pub gstar: VertexField<Complex64>,
    pub r: VertexField<f64>,
}

impl DualData {
    pub fn compute(h: &HolomorphicMap, root: Vertex) -> Result<Self> {
        let (gstar, _) = christoffel_dual(h, root, Complex64::new(0.0, 0.0))?;
        let r = factorize_r(h, root, 1.0)?;
        Ok(Self { gstar, r })
    }

    /// Worst relative edge residual of `r_i r_j a_ij = |dg_ij|^2` and of
    /// `dg*_ij = dg_ij / (r_i r_j)`.
    pub fn check(&self, h: &HolomorphicMap) -> (f64, f64) {
        let mut product = 0.0f64;
        let mut quotient = 0.0f64;
        for e in h.grid().edges() {
            product = product.max(product_residual(h, &self.r, e));
            let dgs = derivative(&self.gstar, e);
            let expected = h.dg(e) / (self.r[e.from] * self.r[e.to]);
            quotient = quotient.max((dgs - expected).norm() / expected.norm());
        }
        (product, quotient)
    }
}

/// Per-face residual of `dg*_ik dr_jl + dg_jl d(1/r)_ik` along the diagonals.
pub fn koenigs_diagonal_check(
    h: &HolomorphicMap,
    gstar: &VertexField<Complex64>,
    r: &VertexField<f64>,
) -> Vec<(Face, f64)> {
    h.grid()
        .faces()
        .map(|face| {
            let [i, j, k, l] = face.vertices();
            let dgs_ik = gstar[k] - gstar[i];
            let dr_jl = r[l] - r[j];
            let dg_jl = h.g[l] - h.g[j];
            let dinv_ik = 1.0 / r[k] - 1.0 / r[i];
            (face, (dgs_ik * dr_jl + dg_jl * dinv_ik).magnitude())
        })
        .collect()
}
