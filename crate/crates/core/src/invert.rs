//! From a Darboux pair back to Weierstrass data.
//!
//! The pair is turned into a unimodular frame `F' = (h+, h-)`, its connection
//! `W' = F'_i^{-1} F'_j` is gauged by `G = diag(w, 1/w)` into the shape of a
//! flat-front connection, and the potential `g` is read off the gauged
//! off-diagonal entry.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{BranchMode, Mat2};
use crate::front::FlatFrontFamily;
use crate::gauss::{projective_distance, weierstrass_edge_labelling, DarbouxPair};
use crate::grid::{
    integrate_edge_form_with, Edge, EdgeForm, EdgeLabelling, Face, QuadGrid, Vertex, VertexField,
};
use crate::holo::{validate_holomorphic, HolomorphicMap, CROSS_RATIO_TOL, DEGENERACY_REL_TOL};

/// Tolerance for entry, compatibility and closure residuals.
pub const CR_TOL: f64 = 1e-10;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn rel(gap: Complex64, size: f64) -> f64 {
    gap.norm() / size.max(1.0)
}

/// `F' = (h+, h-) / sqrt(det)` with the principal root.
pub fn normalize_lifts(pair: &DarbouxPair) -> Result<VertexField<Mat2>> {
    let grid = pair.grid();
    let mut out = Vec::with_capacity(grid.vertex_count());
    for v in grid.vertices() {
        let f = Mat2::from_cols(pair.hplus[v], pair.hminus[v]);
        if projective_distance(&pair.hplus[v], &pair.hminus[v]) <= DEGENERACY_REL_TOL {
            return Err(Error::CoincidentPoints(v));
        }
        out.push(f * (c(1.0) / f.det().sqrt()));
    }
    VertexField::from_vec(grid, out)
}

/// `W'_ij = [[u, v], [x, y]]` on both orientations of every edge.
#[derive(Clone, Debug)]
pub struct RawConnection {
    grid: QuadGrid,
    forward: Vec<Mat2>,
    backward: Vec<Mat2>,
}

impl RawConnection {
    /// `W'_ij = F'_i^{-1} F'_j` read off a unimodular frame.
    pub fn from_frames(f: &VertexField<Mat2>) -> Self {
        let grid = f.grid();
        let step = |e: Edge| f[e.from].adjugate() * f[e.to];
        Self {
            grid,
            forward: grid.edges().map(step).collect(),
            backward: grid.edges().map(|e| step(e.reversed())).collect(),
        }
    }

    pub fn grid(&self) -> QuadGrid {
        self.grid
    }

    pub fn get(&self, e: Edge) -> Mat2 {
        let i = self.grid.edge_index(e);
        if e.is_forward() {
            self.forward[i]
        } else {
            self.backward[i]
        }
    }

    pub fn u(&self, e: Edge) -> Complex64 {
        self.get(e).a
    }

    pub fn v(&self, e: Edge) -> Complex64 {
        self.get(e).b
    }

    pub fn x(&self, e: Edge) -> Complex64 {
        self.get(e).c
    }

    pub fn y(&self, e: Edge) -> Complex64 {
        self.get(e).d
    }

    /// Per-edge entry identities, worst over both orientations.
    pub fn entry_report(&self, b: &EdgeLabelling, t: f64) -> EntryReport {
        let mut out = EntryReport::default();
        for e in self.grid.edges() {
            let tb = t * b.label(e);
            let mut entries = 0.0f64;
            let mut unimodular = 0.0f64;
            for d in [e, e.reversed()] {
                let (u, v, x, y) = (self.u(d), self.v(d), self.x(d), self.y(d));
                entries = entries
                    .max(rel(x + tb / v, x.norm()))
                    .max(rel(y - (1.0 - tb) / u, y.norm()));
                unimodular = unimodular
                    .max(rel(u * y - v * x - 1.0, (u * y).norm()))
                    .max(rel(v * x + tb, tb.abs()));
            }
            let (v, v_back) = (self.v(e), self.v(e.reversed()));
            let product = self.u(e) * self.u(e.reversed());
            out.entries.push((e, entries));
            out.unimodular.push((e, unimodular));
            out.v_antisymmetry.push((e, rel(v + v_back, v.norm())));
            out.u_product.push((e, rel(product - (1.0 - tb), (1.0 - tb).abs())));
        }
        out
    }
}

fn worst<K: Copy>(xs: &[(K, f64)]) -> Option<(K, f64)> {
    xs.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1))
}

fn max_of<K: Copy>(xs: &[(K, f64)]) -> f64 {
    worst(xs).map_or(0.0, |w| w.1)
}

/// Residuals of `x = -tb/v`, `y = (1-tb)/u`, `uy - vx = 1`, `-vx = tb`,
/// `v_ji = -v_ij` and `u_ij u_ji = 1 - tb`, each relative to its terms.
#[derive(Clone, Debug, Default, Serialize)]
pub struct EntryReport {
    pub entries: Vec<(Edge, f64)>,
    pub unimodular: Vec<(Edge, f64)>,
    pub v_antisymmetry: Vec<(Edge, f64)>,
    pub u_product: Vec<(Edge, f64)>,
}

impl EntryReport {
    pub fn max_residual(&self) -> f64 {
        [&self.entries, &self.unimodular, &self.v_antisymmetry, &self.u_product]
            .into_iter()
            .map(|xs| max_of(xs))
            .fold(0.0, f64::max)
    }

    pub fn worst_edge(&self) -> Option<(Edge, f64)> {
        [&self.entries, &self.unimodular, &self.v_antisymmetry, &self.u_product]
            .into_iter()
            .filter_map(|xs| worst(xs))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Reads `W'` off a unimodular frame and checks its entries against the
/// edge cross-ratio condition.
pub fn connection_entries(
    f: &VertexField<Mat2>,
    b: &EdgeLabelling,
    t: f64,
    tolerance: f64,
) -> Result<RawConnection> {
    let raw = RawConnection::from_frames(f);
    let report = raw.entry_report(b, t);
    if let Some((edge, residual)) = report.worst_edge() {
        if !(residual < tolerance) {
            return Err(Error::EntryMismatch { edge, residual });
        }
    }
    Ok(raw)
}

/// Per-face residuals of the cross-ratio and Maurer-Cartan conditions on `W'`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CompatibilityReport {
    /// `b_jk v_ij / v_jk - b_ij v_il / v_lk`.
    pub crv: Vec<(Face, f64)>,
    /// `u_ij u_jk - u_il u_lk`.
    pub mc11: Vec<(Face, f64)>,
    /// `v_ij (1-tb_jk)/u_jk + v_jk u_ij - v_il (1-tb_lk)/u_lk - v_lk u_il`.
    pub mc12: Vec<(Face, f64)>,
}

impl CompatibilityReport {
    pub fn max_residual(&self) -> f64 {
        max_of(&self.crv).max(max_of(&self.mc11)).max(max_of(&self.mc12))
    }

    /// Faces above `tolerance` in any of the three checks.
    pub fn offending(&self, tolerance: f64) -> Vec<Face> {
        let mut faces: Vec<Face> = [&self.crv, &self.mc11, &self.mc12]
            .into_iter()
            .flatten()
            .filter(|x| !(x.1 < tolerance))
            .map(|x| x.0)
            .collect();
        faces.sort_by_key(|f| (f.n, f.m));
        faces.dedup();
        faces
    }
}

pub fn check_compatibility(raw: &RawConnection, b: &EdgeLabelling, t: f64) -> CompatibilityReport {
    let mut out = CompatibilityReport::default();
    for face in raw.grid().faces() {
        let [i, _, k, l] = face.vertices();
        let [ij, jk, _, _] = face.edges();
        let (il, lk) = (Edge::new(i, l), Edge::new(l, k));
        let (v_ij, v_jk, v_il, v_lk) = (raw.v(ij), raw.v(jk), raw.v(il), raw.v(lk));
        let (u_ij, u_jk, u_il, u_lk) = (raw.u(ij), raw.u(jk), raw.u(il), raw.u(lk));

        let left = v_ij / v_jk * b.label(jk);
        let right = v_il / v_lk * b.label(ij);
        out.crv.push((face, rel(left - right, left.norm().max(right.norm()))));

        let (p, q) = (u_ij * u_jk, u_il * u_lk);
        out.mc11.push((face, rel(p - q, p.norm().max(q.norm()))));

        let terms = [
            v_ij * (1.0 - t * b.label(jk)) / u_jk,
            v_jk * u_ij,
            v_il * (1.0 - t * b.label(lk)) / u_lk,
            v_lk * u_il,
        ];
        let size = terms.iter().map(|z| z.norm()).fold(0.0, f64::max);
        out.mc12.push((face, rel(terms[0] + terms[1] - terms[2] - terms[3], size)));
    }
    out
}

/// Solution of `w_j = sqrt(1 - t b_ij) / u_ij * w_i`.
#[derive(Clone, Debug)]
pub struct Gauge {
    pub w: VertexField<Complex64>,
    /// Relative mismatch of the recursion on edges outside the spanning tree.
    pub closure: Vec<(Edge, f64)>,
    /// Edges with `1 - t b < 0`, handled on the principal branch.
    pub negative_branch: Vec<Edge>,
}

impl Gauge {
    pub fn max_closure(&self) -> f64 {
        max_of(&self.closure)
    }
}

fn gauge_factor(raw: &RawConnection, b: &EdgeLabelling, t: f64, e: Edge) -> Complex64 {
    c(1.0 - t * b.label(e)).sqrt() / raw.u(e)
}

pub fn solve_gauge(
    raw: &RawConnection,
    b: &EdgeLabelling,
    t: f64,
    root: Vertex,
    w_root: Complex64,
    tolerance: f64,
) -> Result<Gauge> {
    let grid = raw.grid();
    grid.check_vertex(root)?;
    if w_root.norm() == 0.0 || !w_root.is_finite() {
        return Err(Error::Config("w_root must be finite and nonzero".into()));
    }
    let mut w = VertexField::from_fn(grid, |_| c(0.0));
    w[root] = w_root;
    for e in grid.spanning_tree(root) {
        w[e.to] = gauge_factor(raw, b, t, e) * w[e.from];
    }
    let mut closure = Vec::new();
    for e in grid.non_tree_edges(root) {
        let predicted = gauge_factor(raw, b, t, e) * w[e.from];
        let residual = (w[e.to] - predicted).norm() / w[e.to].norm().max(predicted.norm());
        if !(residual < tolerance) {
            return Err(Error::NotIntegrable { edge: e, residual });
        }
        closure.push((e, residual));
    }
    let negative_branch = grid.edges().filter(|&e| 1.0 - t * b.label(e) < 0.0).collect();
    Ok(Gauge {
        w,
        closure,
        negative_branch,
    })
}

/// Weierstrass data recovered from a Darboux pair.
#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassData {
    pub g: HolomorphicMap,
    pub t: f64,
    pub w: VertexField<Complex64>,
}

impl WeierstrassData {
    /// Edges where `1 - t a < 0`, which need the complex branch to rebuild.
    pub fn branch_mode(&self) -> BranchMode {
        if self.g.labelling().labels().any(|a| 1.0 - self.t * a < 0.0) {
            BranchMode::Complex
        } else {
            BranchMode::Real
        }
    }
}

/// `dg_ij = v_ij / (w_i w_j sqrt(1 - t b_ij))`.
pub fn potential_form(
    raw: &RawConnection,
    w: &VertexField<Complex64>,
    b: &EdgeLabelling,
    t: f64,
) -> EdgeForm<Complex64> {
    EdgeForm::from_fn(raw.grid(), |e| {
        raw.v(e) / (w[e.from] * w[e.to] * c(1.0 - t * b.label(e)).sqrt())
    })
}

/// Integrates the potential form from `g(root) = g_root` and validates the
/// result against `a = -b / (1 - t b)`.
pub fn recover_potential(
    raw: &RawConnection,
    w: &VertexField<Complex64>,
    b: &EdgeLabelling,
    t: f64,
    root: Vertex,
    g_root: Complex64,
) -> Result<WeierstrassData> {
    let form = potential_form(raw, w, b, t);
    let tolerance = CR_TOL * form.max_magnitude();
    let g = integrate_edge_form_with(&form, root, g_root, tolerance)?;
    let a = weierstrass_edge_labelling(b, t)?;
    let report = validate_holomorphic(&g, &a, CROSS_RATIO_TOL);
    if !report.passed() {
        return Err(Error::RegularityViolation(format!(
            "recovered potential fails the cross-ratio check: worst {:e} at {:?}",
            report.max_residual, report.worst_face
        )));
    }
    Ok(WeierstrassData {
        g: HolomorphicMap::new(g, a)?,
        t,
        w: w.clone(),
    })
}

/// Root choices and tolerance of an inversion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvertOptions {
    pub root: Vertex,
    pub w_root: Complex64,
    pub g_root: Complex64,
    pub tolerance: f64,
}

impl Default for InvertOptions {
    fn default() -> Self {
        Self {
            root: Vertex::new(0, 0),
            w_root: c(1.0),
            g_root: c(0.0),
            tolerance: CR_TOL,
        }
    }
}

/// Every intermediate of an inversion.
#[derive(Clone, Debug)]
pub struct Inversion {
    pub frames: VertexField<Mat2>,
    pub raw: RawConnection,
    pub compatibility: CompatibilityReport,
    pub gauge: Gauge,
    pub data: WeierstrassData,
}

pub fn invert_pair(pair: &DarbouxPair, w_root: Complex64, g_root: Complex64) -> Result<WeierstrassData> {
    let options = InvertOptions {
        w_root,
        g_root,
        ..Default::default()
    };
    Ok(invert_pair_with(pair, &options)?.data)
}

pub fn invert_pair_with(pair: &DarbouxPair, options: &InvertOptions) -> Result<Inversion> {
    let (b, t) = (&pair.b, pair.t);
    let frames = normalize_lifts(pair)?;
    let raw = connection_entries(&frames, b, t, options.tolerance)?;
    let compatibility = check_compatibility(&raw, b, t);
    let gauge = solve_gauge(&raw, b, t, options.root, options.w_root, options.tolerance)?;
    let data = recover_potential(&raw, &gauge.w, b, t, options.root, options.g_root)?;
    Ok(Inversion {
        frames,
        raw,
        compatibility,
        gauge,
        data,
    })
}

impl Inversion {
    /// The front of the recovered data with `F(root) = F'(root) G(root)`,
    /// whose Gauss maps are the original pair.
    pub fn rebuild(&self, root: Vertex) -> Result<FlatFrontFamily> {
        let w = self.data.w[root];
        let f_root = self.frames[root] * Mat2::diag(w, c(1.0) / w);
        FlatFrontFamily::build_with(&self.data.g, self.data.t, root, f_root, self.data.branch_mode())
    }
}

/// Worst `|W_ij - G_i^{-1} W'_ij G_j|` relative to the entries, over both
/// orientations of every edge.
pub fn gauge_relation_residual(family: &FlatFrontFamily, raw: &RawConnection, w: &VertexField<Complex64>) -> f64 {
    let g = |v: Vertex| Mat2::diag(w[v], c(1.0) / w[v]);
    family
        .grid()
        .edges()
        .flat_map(|e| [e, e.reversed()])
        .map(|e| {
            let lhs = family.connection().get(e);
            let rhs = g(e.from).inverse() * raw.get(e) * g(e.to);
            (lhs - rhs).max_abs() / lhs.max_abs().max(rhs.max_abs()).max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Comparison of recovered data with the forward data it came from.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RoundTripReport {
    /// Worst face cross-ratio difference, relative to `max(1, |cr|)`.
    pub cross_ratio: f64,
    /// Worst relative spread of `dg / dg0` over all edges.
    pub dg_ratio_spread: f64,
    /// The common value of `dg / dg0` on the first edge.
    pub dg_ratio: [f64; 2],
}

impl RoundTripReport {
    pub fn max_residual(&self) -> f64 {
        self.cross_ratio.max(self.dg_ratio_spread)
    }
}

pub fn round_trip_report(original: &HolomorphicMap, recovered: &HolomorphicMap) -> Result<RoundTripReport> {
    let grid = original.grid();
    let mut cross_ratio = 0.0f64;
    for face in grid.faces() {
        let (p, q) = (original.face_cross_ratio(face)?, recovered.face_cross_ratio(face)?);
        cross_ratio = cross_ratio.max(rel(p - q, p.norm()));
    }
    let ratio = |e: Edge| recovered.dg(e) / original.dg(e);
    let first = ratio(Edge::horizontal(0, 0));
    let dg_ratio_spread = grid
        .edges()
        .map(|e| (ratio(e) - first).norm() / first.norm())
        .fold(0.0, f64::max);
    Ok(RoundTripReport {
        cross_ratio,
        dg_ratio_spread,
        dg_ratio: [first.re, first.im],
    })
}

/// Worst projective distance between the Gauss maps `F e+`, `F e-` of a
/// front and the legs of a pair.
pub fn pair_distance(family: &FlatFrontFamily, pair: &DarbouxPair) -> f64 {
    let f = family.frame().field();
    family
        .grid()
        .vertices()
        .map(|v| {
            projective_distance(&f[v].col(0), &pair.hplus[v])
                .max(projective_distance(&f[v].col(1), &pair.hminus[v]))
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{affine_lifts, darboux_propagate, pair_edge_labelling, Lift};
    use crate::holo::make_linear;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn standard(size: usize) -> FlatFrontFamily {
        let h = make_linear(QuadGrid::new(size, size).unwrap(), 1.0, 1.0).unwrap();
        FlatFrontFamily::build(&h, 0.5).unwrap()
    }

    #[test]
    fn normalization() {
        let grid = QuadGrid::new(2, 2).unwrap();
        let b = EdgeLabelling::uniform(grid, 1.0, 1.0).unwrap();
        let hp = VertexField::from_fn(grid, |_| [z(1.0, 0.0), z(0.0, 0.0)]);
        let hm = VertexField::from_fn(grid, |_| [z(0.0, 0.0), z(2.0, 0.0)]);
        let pair = DarbouxPair::new(hp, hm, b.clone(), 0.5).unwrap();
        let f = normalize_lifts(&pair).unwrap();
        let s = 2f64.sqrt();
        let expected = Mat2::diag(z(1.0 / s, 0.0), z(2.0 / s, 0.0));
        assert!((f[Vertex::new(1, 1)] - expected).max_abs() < 1e-15);
        assert!((f[Vertex::new(0, 0)].det() - 1.0).norm() < 1e-15);

        let family = standard(3);
        let unimodular = DarbouxPair::from_front(&family).unwrap();
        let f = normalize_lifts(&unimodular).unwrap();
        for (v, m) in f.iter() {
            assert!((*m - family.frame().get(v)).max_abs() < 1e-14);
        }

        let mut coincident = pair.clone();
        coincident.hminus[Vertex::new(0, 1)] = [z(3.0, 1.0), z(0.0, 0.0)];
        assert!(matches!(
            normalize_lifts(&coincident),
            Err(Error::CoincidentPoints(v)) if v == Vertex::new(0, 1)
        ));
    }

    #[test]
    fn front_pair_entries() {
        let family = standard(5);
        let pair = DarbouxPair::from_front(&family).unwrap();
        let f = normalize_lifts(&pair).unwrap();
        let raw = connection_entries(&f, &pair.b, 0.5, CR_TOL).unwrap();
        let report = raw.entry_report(&pair.b, 0.5);
        assert!(max_of(&report.entries) < 1e-10);
        assert!(max_of(&report.unimodular) < 1e-10);
        assert!(max_of(&report.v_antisymmetry) < 1e-12);
        assert!(max_of(&report.u_product) < 1e-12);
        assert!(check_compatibility(&raw, &pair.b, 0.5).max_residual() < 1e-10);
    }

    /// Frames of the 2x2 front of `g = (0, 1, 2i, 1 + 2i)` with labels
    /// `a = (3/2, -6)` at `t = 1/2`, written out by hand. Every entry is a
    /// dyadic rational, so floating point arithmetic on them is exact.
    fn dyadic_pair() -> DarbouxPair {
        let grid = QuadGrid::new(2, 2).unwrap();
        let horizontal = Mat2::new(z(2.0, 0.0), z(2.0, 0.0), z(1.5, 0.0), z(2.0, 0.0));
        let vertical = Mat2::new(z(0.5, 0.0), z(0.0, 1.0), z(0.0, 0.75), z(0.5, 0.0));
        let f = VertexField::from_fn(grid, |v| match (v.m, v.n) {
            (0, 0) => Mat2::IDENTITY,
            (1, 0) => horizontal,
            (0, 1) => vertical,
            _ => horizontal * vertical,
        });
        assert_eq!(horizontal * vertical, vertical * horizontal);
        let b = EdgeLabelling::uniform(grid, -6.0, 1.5).unwrap();
        DarbouxPair::new(f.map(|m| m.col(0)), f.map(|m| m.col(1)), b, 0.5).unwrap()
    }

    #[test]
    fn exact_pair_has_zero_residuals() {
        let pair = dyadic_pair();
        let f = normalize_lifts(&pair).unwrap();
        let raw = connection_entries(&f, &pair.b, 0.5, CR_TOL).unwrap();
        let report = check_compatibility(&raw, &pair.b, 0.5);
        assert_eq!(report.max_residual(), 0.0, "{report:?}");
        assert_eq!(raw.entry_report(&pair.b, 0.5).max_residual(), 0.0);
        let data = invert_pair(&pair, z(1.0, 0.0), z(0.0, 0.0)).unwrap();
        let g = data.g.g();
        assert_eq!(g[Vertex::new(1, 1)], z(1.0, 2.0));
        assert_eq!(data.g.labelling().alpha(), &[1.5]);
        assert_eq!(data.g.labelling().beta(), &[-6.0]);
    }

    #[test]
    fn perturbed_vertex_is_flagged_on_incident_faces() {
        let family = standard(6);
        let mut pair = DarbouxPair::from_front(&family).unwrap();
        let v = Vertex::new(3, 2);
        let h = pair.hminus[v];
        pair.hminus[v] = [h[0] * z(1.0, 1e-3), h[1]];
        let f = normalize_lifts(&pair).unwrap();
        let raw = RawConnection::from_frames(&f);
        assert!(raw.entry_report(&pair.b, 0.5).max_residual() > 1e-6);
        let report = check_compatibility(&raw, &pair.b, 0.5);
        let around = pair.grid().faces_around(v);
        for checks in [&report.crv, &report.mc11, &report.mc12] {
            let flagged: Vec<Face> = checks.iter().filter(|x| x.1 > 1e-6).map(|x| x.0).collect();
            assert!(!flagged.is_empty());
            assert!(flagged.iter().all(|f| around.contains(f)), "{flagged:?}");
        }
        assert!(matches!(
            connection_entries(&f, &pair.b, 0.5, CR_TOL),
            Err(Error::EntryMismatch { .. })
        ));
    }

    #[test]
    fn front_gauge_is_constant() {
        let family = standard(8);
        let pair = DarbouxPair::from_front(&family).unwrap();
        let inv = invert_pair_with(&pair, &InvertOptions::default()).unwrap();
        assert!(inv.gauge.max_closure() < 1e-10);
        for (_, w) in inv.gauge.w.iter() {
            assert!((w - 1.0).norm() < 1e-10);
        }
        let scaled = solve_gauge(&inv.raw, &pair.b, 0.5, Vertex::new(0, 0), z(0.0, 3.0), CR_TOL).unwrap();
        for (v, w) in scaled.w.iter() {
            assert!((w - inv.gauge.w[v] * z(0.0, 3.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn forward_round_trip() {
        let family = standard(6);
        let pair = DarbouxPair::from_front(&family).unwrap();
        let options = InvertOptions {
            w_root: z(0.7, -0.2),
            g_root: z(0.0, 0.0),
            ..Default::default()
        };
        let inv = invert_pair_with(&pair, &options).unwrap();
        assert_eq!(inv.data.g.g()[Vertex::new(0, 0)], z(0.0, 0.0));
        let recovered = inv.data.g.labelling().labels();
        for (a, a0) in recovered.zip(family.holo().labelling().labels()) {
            assert!((a - a0).abs() < 1e-15);
        }
        for face in pair.grid().faces() {
            let cr = inv.data.g.face_cross_ratio(face).unwrap();
            assert!((cr + 1.0).norm() < 1e-8);
        }
        let rebuilt = inv.rebuild(Vertex::new(0, 0)).unwrap();
        let report = round_trip_report(family.holo(), &inv.data.g).unwrap();
        assert!(report.max_residual() < 1e-8, "{report:?}");
        assert!(pair_distance(&rebuilt, &pair) < 1e-8);
        assert!(gauge_relation_residual(&rebuilt, &inv.raw, &inv.gauge.w) < 1e-10);
    }

    #[test]
    fn gauge_choice_only_scales_dg() {
        let family = standard(6);
        let pair = DarbouxPair::from_front(&family).unwrap();
        let one = invert_pair(&pair, z(1.0, 0.0), z(0.0, 0.0)).unwrap();
        let other = invert_pair(&pair, z(2.0, 1.0), z(5.0, 0.0)).unwrap();
        let first = Edge::horizontal(0, 0);
        let k = other.g.dg(first) / one.g.dg(first);
        for e in pair.grid().edges() {
            assert!((other.g.dg(e) / one.g.dg(e) - k).norm() < 1e-12);
        }
        for face in pair.grid().faces() {
            let (p, q) = (one.g.face_cross_ratio(face).unwrap(), other.g.face_cross_ratio(face).unwrap());
            assert!((p - q).norm() < 1e-12);
        }
    }

    #[test]
    fn propagated_pair_inverts_to_a_flat_front() {
        let grid = QuadGrid::new(10, 10).unwrap();
        let g = make_linear(grid, 2f64.sqrt(), (2.0f64 / 3.0).sqrt()).unwrap();
        let b = pair_edge_labelling(&EdgeLabelling::uniform(grid, 1.0, -1.0).unwrap(), 0.5).unwrap();
        let seed: Lift = [z(0.4, -1.3), z(1.0, 0.0)];
        let (pair, report) = darboux_propagate(&affine_lifts(&g), &b, 0.5, seed, Vertex::new(0, 0)).unwrap();
        assert!(report.max_residual() < 1e-10);
        let inv = invert_pair_with(&pair, &InvertOptions::default()).unwrap();
        assert!(inv.compatibility.max_residual() < 1e-10);
        assert!(inv.gauge.max_closure() < 1e-10);
        let rebuilt = inv.rebuild(Vertex::new(0, 0)).unwrap();
        assert!(gauge_relation_residual(&rebuilt, &inv.raw, &inv.gauge.w) < 1e-10);
        assert!(pair_distance(&rebuilt, &pair) < 1e-9);
    }
}
