//! Hyperbolic Gauss maps, their cross-ratio laws and Darboux pairs.
//!
//! Points of the projective line are carried as homogeneous lifts in `C^2`
//! throughout; no affine chart is used.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{det2, dyadic_square, HermitianMat};
use crate::front::FlatFrontFamily;
use crate::grid::{Edge, EdgeLabelling, Face, QuadGrid, Vertex, VertexField};
use crate::holo::{HolomorphicMap, DEGENERACY_REL_TOL};

/// Homogeneous coordinates of a point of the projective line.
pub type Lift = [Complex64; 2];

/// Default tolerance for cross-ratio laws.
pub const PAIR_TOL: f64 = 1e-10;

fn lift_norm(p: &Lift) -> f64 {
    p[0].norm().hypot(p[1].norm())
}

/// Rescales a lift so that its larger component has modulus one.
pub fn normalize_lift(p: Lift) -> Lift {
    let m = p[0].norm().max(p[1].norm());
    if m == 0.0 {
        p
    } else {
        [p[0] / m, p[1] / m]
    }
}

/// `|det[p, q]| / (|p| |q|)`, zero exactly when the points coincide.
pub fn projective_distance(p: &Lift, q: &Lift) -> f64 {
    let scale = lift_norm(p) * lift_norm(q);
    if scale == 0.0 {
        return 0.0;
    }
    det2(*p, *q).norm() / scale
}

/// `det[B,A] det[D,C] / (det[C,B] det[A,D])`.
pub fn projective_cross_ratio(a: &Lift, b: &Lift, c: &Lift, d: &Lift) -> Result<Complex64> {
    let cb = det2(*c, *b);
    let ad = det2(*a, *d);
    if cb.norm() <= DEGENERACY_REL_TOL * lift_norm(c) * lift_norm(b)
        || ad.norm() <= DEGENERACY_REL_TOL * lift_norm(a) * lift_norm(d)
    {
        return Err(Error::DegenerateQuad);
    }
    Ok(det2(*b, *a) * det2(*d, *c) / (cb * ad))
}

/// The lift `(z, 1)` of every value of a holomorphic map.
pub fn affine_lifts(h: &HolomorphicMap) -> VertexField<Lift> {
    h.g().map(|z| [*z, Complex64::new(1.0, 0.0)])
}

/// Gauss maps of a front: `h+ = F e+`, `h- = F e-` and `H± = X(0) ± N(0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussMaps {
    pub hplus: VertexField<Lift>,
    pub hminus: VertexField<Lift>,
    pub big_plus: VertexField<HermitianMat>,
    pub big_minus: VertexField<HermitianMat>,
}

pub fn gauss_maps(family: &FlatFrontFamily) -> GaussMaps {
    let f = family.frame().field();
    let sample = family.eval(0.0);
    let grid = family.grid();
    GaussMaps {
        hplus: f.map(|m| m.col(0)),
        hminus: f.map(|m| m.col(1)),
        big_plus: VertexField::from_fn(grid, |v| sample.gauss_points(v).0),
        big_minus: VertexField::from_fn(grid, |v| sample.gauss_points(v).1),
    }
}

/// Worst residuals of the pointwise Gauss-map identities.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct GaussMapReport {
    /// `|det H±| / |H±|^2`.
    pub lightlike: f64,
    /// `|h h* - H/2| / |H|`.
    pub dyadic: f64,
}

impl GaussMaps {
    pub fn check(&self) -> GaussMapReport {
        let mut out = GaussMapReport::default();
        for (v, hp) in self.hplus.iter() {
            for (lift, big) in [(*hp, self.big_plus[v]), (self.hminus[v], self.big_minus[v])] {
                // Rescale by the lift's size first so huge frames cannot overflow.
                let mu = lift[0].norm().max(lift[1].norm()).max(f64::MIN_POSITIVE);
                let (lift, big) = (normalize_lift(lift), big * (1.0 / mu) * (1.0 / mu));
                let size = big.euclidean_norm().max(f64::MIN_POSITIVE);
                out.lightlike = out.lightlike.max(big.det().abs() / (size * size));
                let gap = dyadic_square(lift) - big * 0.5;
                out.dyadic = out.dyadic.max(gap.euclidean_norm() / size);
            }
        }
        out
    }
}

/// `b = -a / (1 - t a)`.
pub fn pair_labelling(a: f64, t: f64) -> Result<f64> {
    let den = 1.0 - t * a;
    if den.abs() <= DEGENERACY_REL_TOL * (1.0 + (t * a).abs()) || !den.is_finite() {
        return Err(Error::InvalidParameter {
            t,
            reason: format!("1 - t a vanishes for a = {a}"),
        });
    }
    Ok(-a / den)
}

/// Inverse of [`pair_labelling`]: `a = -b / (1 - t b)`.
pub fn a_of(b: f64, t: f64) -> Result<f64> {
    pair_labelling(b, t)
}

/// [`pair_labelling`] applied to every label.
pub fn pair_edge_labelling(a: &EdgeLabelling, t: f64) -> Result<EdgeLabelling> {
    for x in a.labels() {
        pair_labelling(x, t)?;
    }
    Ok(a.map(|x| -x / (1.0 - t * x)))
}

/// [`a_of`] applied to every label.
pub fn weierstrass_edge_labelling(b: &EdgeLabelling, t: f64) -> Result<EdgeLabelling> {
    pair_edge_labelling(b, t)
}

/// Two holomorphic maps to the projective line forming a Darboux pair.
#[derive(Clone, Debug, PartialEq)]
pub struct DarbouxPair {
    pub hplus: VertexField<Lift>,
    pub hminus: VertexField<Lift>,
    pub b: EdgeLabelling,
    pub t: f64,
}

/// Measured against expected cross ratios, relative to `max(1, |expected|)`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PairReport {
    pub face_plus: Vec<(Face, f64)>,
    pub face_minus: Vec<(Face, f64)>,
    pub edges: Vec<(Edge, f64)>,
    /// Smallest projective distance between `h+` and `h-` over all vertices.
    pub min_separation: f64,
}

fn worst<K: Copy>(xs: &[(K, f64)]) -> f64 {
    xs.iter().map(|x| x.1).fold(0.0, f64::max)
}

impl PairReport {
    pub fn max_face_residual(&self) -> f64 {
        worst(&self.face_plus).max(worst(&self.face_minus))
    }

    pub fn max_edge_residual(&self) -> f64 {
        worst(&self.edges)
    }

    pub fn max_residual(&self) -> f64 {
        self.max_face_residual().max(self.max_edge_residual())
    }

    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_residual() < tolerance && self.min_separation > 0.0
    }
}

fn rel_gap(z: Complex64, expected: Complex64) -> f64 {
    (z - expected).norm() / expected.norm().max(1.0)
}

fn pair_report(
    hplus: &VertexField<Lift>,
    hminus: &VertexField<Lift>,
    face_expected: impl Fn(Face) -> Complex64,
    edge_expected: impl Fn(Edge) -> Complex64,
) -> PairReport {
    let grid = hplus.grid();
    let face_cr = |h: &VertexField<Lift>, face: Face| {
        let [i, j, k, l] = face.vertices();
        match projective_cross_ratio(&h[i], &h[j], &h[k], &h[l]) {
            Ok(cr) => rel_gap(cr, face_expected(face)),
            Err(_) => f64::INFINITY,
        }
    };
    let face_plus = grid.faces().map(|f| (f, face_cr(hplus, f))).collect();
    let face_minus = grid.faces().map(|f| (f, face_cr(hminus, f))).collect();
    let edges = grid
        .edges()
        .map(|e| {
            let (i, j) = (e.from, e.to);
            let r = match projective_cross_ratio(&hplus[i], &hplus[j], &hminus[j], &hminus[i]) {
                Ok(cr) => rel_gap(cr, edge_expected(e)),
                Err(_) => f64::INFINITY,
            };
            (e, r)
        })
        .collect();
    let min_separation = grid
        .vertices()
        .map(|v| projective_distance(&hplus[v], &hminus[v]))
        .fold(f64::INFINITY, f64::min);
    PairReport {
        face_plus,
        face_minus,
        edges,
        min_separation,
    }
}

/// Checks the cross ratios of a front's Gauss maps against the closed forms
/// in the Weierstrass labelling `a`:
///
/// ```text
/// face:  (a_ij / (1 - t a_ij)) ((1 - t a_jk) / a_jk)
/// edge:  cr(h+_i, h+_j, h-_j, h-_i) = -t a_ij / (1 - t a_ij)
/// ```
pub fn verify_pair_cross_ratios(
    hplus: &VertexField<Lift>,
    hminus: &VertexField<Lift>,
    a: &EdgeLabelling,
    t: f64,
) -> PairReport {
    let c = |x: f64| Complex64::new(x, 0.0);
    pair_report(
        hplus,
        hminus,
        |face| {
            let [ij, jk, _, _] = face.edges();
            let (p, q) = (a.label(ij), a.label(jk));
            c((p / (1.0 - t * p)) * ((1.0 - t * q) / q))
        },
        |e| {
            let p = a.label(e);
            c(-t * p / (1.0 - t * p))
        },
    )
}

/// The same cross ratios computed on frame-local lifts `F_i^{-1} F_v`, which
/// stay well conditioned when the frame grows.
pub fn verify_local_pair_cross_ratios(family: &FlatFrontFamily) -> PairReport {
    let a = family.holo().labelling();
    let t = family.t();
    let c = |x: f64| Complex64::new(x, 0.0);
    let mut report = PairReport {
        min_separation: f64::INFINITY,
        ..Default::default()
    };
    for face in family.grid().faces() {
        let g = family.relative_frames(face);
        let hp = g.map(|m| m.col(0));
        let hm = g.map(|m| m.col(1));
        let [ij, jk, _, _] = face.edges();
        let (p, q) = (a.label(ij), a.label(jk));
        let expected = c((p / (1.0 - t * p)) * ((1.0 - t * q) / q));
        for (h, out) in [(hp, &mut report.face_plus), (hm, &mut report.face_minus)] {
            let r = projective_cross_ratio(&h[0], &h[1], &h[2], &h[3])
                .map_or(f64::INFINITY, |cr| rel_gap(cr, expected));
            out.push((face, r));
        }
    }
    for e in family.grid().edges() {
        let w = family.connection().get(e);
        let (hpi, hmi) = ([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        let (hpj, hmj) = (w.col(0), w.col(1));
        let p = a.label(e);
        let r = projective_cross_ratio(&hpi, &hpj, &hmj, &hmi)
            .map_or(f64::INFINITY, |cr| rel_gap(cr, c(-t * p / (1.0 - t * p))));
        report.edges.push((e, r));
        report.min_separation = report.min_separation.min(projective_distance(&hpj, &hmj));
    }
    report
}

impl DarbouxPair {
    pub fn new(
        hplus: VertexField<Lift>,
        hminus: VertexField<Lift>,
        b: EdgeLabelling,
        t: f64,
    ) -> Result<Self> {
        let grid = hplus.grid();
        if hminus.grid() != grid {
            return Err(Error::LengthMismatch {
                what: "hminus",
                expected: grid.vertex_count(),
                actual: hminus.values().len(),
            });
        }
        if !b.fits(grid) {
            return Err(Error::LengthMismatch {
                what: "pair labelling",
                expected: grid.rows() - 1 + grid.cols() - 1,
                actual: b.alpha().len() + b.beta().len(),
            });
        }
        if !t.is_finite() {
            return Err(Error::InvalidParameter {
                t,
                reason: "must be finite".into(),
            });
        }
        Ok(Self { hplus, hminus, b, t })
    }

    /// The pair `(F e+, F e-)` of a front with `b = -a / (1 - t a)`.
    pub fn from_front(family: &FlatFrontFamily) -> Result<Self> {
        let f = family.frame().field();
        let b = pair_edge_labelling(family.holo().labelling(), family.t())?;
        Self::new(f.map(|m| m.col(0)), f.map(|m| m.col(1)), b, family.t())
    }

    pub fn grid(&self) -> QuadGrid {
        self.hplus.grid()
    }

    /// Face laws `cr = b_ij / b_jk` on both legs and the edge law
    /// `cr(h+_i, h+_j, h-_j, h-_i) = t b_ij`.
    pub fn check(&self) -> PairReport {
        let b = &self.b;
        let t = self.t;
        pair_report(
            &self.hplus,
            &self.hminus,
            |face| {
                let [ij, jk, _, _] = face.edges();
                Complex64::new(b.label(ij) / b.label(jk), 0.0)
            },
            |e| Complex64::new(t * b.label(e), 0.0),
        )
    }
}

/// Threshold below which a step result counts as colliding with `h+_j`.
pub const STEP_TOL: f64 = 1e-12;

/// Solves `cr(A, B, C, D) = c` for `C`: `C = det[B,A] D + c det[A,D] B`.
///
/// With `A = h+_i, B = h+_j, D = h-_i` this is `h-_j`; the same formula
/// serves both orientations of an edge.
pub fn darboux_step(a: &Lift, b: &Lift, d: &Lift, c: f64) -> Lift {
    let ba = det2(*b, *a);
    let ad = det2(*a, *d) * c;
    [ba * d[0] + ad * b[0], ba * d[1] + ad * b[1]]
}

fn checked_step(e: Edge, a: &Lift, b: &Lift, d: &Lift, c: f64) -> Result<Lift> {
    let out = darboux_step(a, b, d, c);
    if lift_norm(&out) == 0.0 || projective_distance(&out, b) <= STEP_TOL {
        return Err(Error::DegenerateStep { edge: e });
    }
    Ok(normalize_lift(out))
}

/// Two-path consistency of a propagation, per face.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PropagationReport {
    /// Projective distance between `h-_k` reached via `j` and via `l`.
    pub faces: Vec<(Face, f64)>,
}

impl PropagationReport {
    pub fn max_residual(&self) -> f64 {
        worst(&self.faces)
    }

    pub fn worst_face(&self) -> Option<(Face, f64)> {
        self.faces.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Fails with [`Error::Inconsistent`] on the worst face above `tolerance`.
    pub fn ensure(&self, tolerance: f64) -> Result<()> {
        match self.worst_face() {
            Some((face, residual)) if !(residual < tolerance) => {
                Err(Error::Inconsistent { face, residual })
            }
            _ => Ok(()),
        }
    }
}

/// Builds `h-` from `h+`, the pair labelling `b`, `t` and `h-` at `root` by
/// solving the edge cross-ratio equation along the spanning tree.
///
/// Face consistency is measured, not assumed: every face is re-propagated
/// along both of its boundary paths from the computed `h-_i`.
pub fn darboux_propagate(
    hplus: &VertexField<Lift>,
    b: &EdgeLabelling,
    t: f64,
    seed: Lift,
    root: Vertex,
) -> Result<(DarbouxPair, PropagationReport)> {
    let grid = hplus.grid();
    grid.check_vertex(root)?;
    for e in grid.edges() {
        let tb = t * b.label(e);
        if tb.abs() <= DEGENERACY_REL_TOL || (tb - 1.0).abs() <= DEGENERACY_REL_TOL {
            return Err(Error::DegenerateStep { edge: e });
        }
    }
    if projective_distance(&seed, &hplus[root]) <= STEP_TOL {
        return Err(Error::CoincidentPoints(root));
    }
    let mut hminus = VertexField::from_fn(grid, |_| [Complex64::new(0.0, 0.0); 2]);
    hminus[root] = normalize_lift(seed);
    for e in grid.spanning_tree(root) {
        let c = t * b.label(e);
        hminus[e.to] = checked_step(e, &hplus[e.from], &hplus[e.to], &hminus[e.from], c)?;
    }
    let mut report = PropagationReport::default();
    for face in grid.faces() {
        let [i, j, k, l] = face.vertices();
        let [ij, jk, kl, li] = face.edges();
        let walk = |first: Edge, mid: Vertex, second: Edge| -> Result<Lift> {
            let m = checked_step(first, &hplus[i], &hplus[mid], &hminus[i], t * b.label(first))?;
            checked_step(second, &hplus[mid], &hplus[k], &m, t * b.label(second))
        };
        let via_j = walk(ij, j, jk)?;
        let via_l = walk(li.reversed(), l, kl.reversed())?;
        report.faces.push((face, projective_distance(&via_j, &via_l)));
    }
    let pair = DarbouxPair::new(hplus.clone(), hminus, b.clone(), t)?;
    Ok((pair, report))
}
