//! Edge reflections, propagation of points and normals, Rodrigues' equation.

use serde::Serialize;

use super::{FlatFrontFamily, FrontSample, GEO_TOL, SINGULAR_TOL};
use crate::error::{Error, Result};
use crate::frame::{sl2_act, HermitianMat};
use crate::grid::Edge;

/// One residual per edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EdgeResidual {
    pub edge: Edge,
    pub residual: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ReflectionReport {
    pub residuals: Vec<EdgeResidual>,
    /// Edges skipped because the tested difference vanishes.
    pub skipped: Vec<Edge>,
}

impl ReflectionReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    pub fn worst(&self) -> Option<EdgeResidual> {
        self.residuals
            .iter()
            .copied()
            .max_by(|a, b| a.residual.total_cmp(&b.residual))
    }

    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_residual() < tolerance
    }
}

/// `R_ij = F_i Y_ij F_i*`, the unit spacelike normal of the plane bisecting an edge.
pub fn reflection_vector(family: &FlatFrontFamily, e: Edge) -> Result<HermitianMat> {
    let y = local_reflection_vector(family, e)?;
    Ok(sl2_act(&family.frame().get(e.from), &y))
}

/// `Y_ij = [[|dg|^2, dg], [conj dg, t a]] / (|dg| sqrt(1 - t a))`, the reflection
/// vector in the frame of `e.from`.
pub fn local_reflection_vector(family: &FlatFrontFamily, e: Edge) -> Result<HermitianMat> {
    let dg = family.holo().dg(e);
    let ta = family.t() * family.holo().label(e);
    let modulus = dg.norm();
    if modulus == 0.0 || !modulus.is_finite() {
        return Err(Error::SingularEdge(e));
    }
    if 1.0 - ta <= 0.0 {
        return Err(Error::NegativeBranch { edge: e });
    }
    let den = modulus * (1.0 - ta).sqrt();
    let upper = modulus * modulus / den;
    let lower = ta / den;
    Ok(HermitianMat([
        0.5 * (upper + lower),
        dg.re / den,
        -dg.im / den,
        0.5 * (upper - lower),
    ]))
}

/// Reflection in the hyperplane orthogonal to a unit spacelike `r`.
pub fn reflect(r: &HermitianMat, x: &HermitianMat) -> Result<HermitianMat> {
    let norm = r.dot(r);
    let scale = r.euclidean_norm().max(1.0);
    if !((norm - 1.0).abs() <= GEO_TOL * scale * scale) {
        return Err(Error::NotUnitSpacelike { norm });
    }
    Ok(mirror(r, x))
}

fn mirror(r: &HermitianMat, x: &HermitianMat) -> HermitianMat {
    *x - *r * (2.0 * r.dot(x))
}

/// The same reflection written through determinants only.
pub fn reflect_by_determinants(r: &HermitianMat, x: &HermitianMat) -> HermitianMat {
    *x + *r * (0.5 * ((*x + *r).det() - (*x - *r).det()))
}

fn rel(a: &HermitianMat, b: &HermitianMat) -> f64 {
    (*a - *b).euclidean_norm() / a.euclidean_norm().max(b.euclidean_norm()).max(1.0)
}

/// Unit length and antisymmetry `R_ij + R_ji = 0` on every edge.
pub fn reflection_check(family: &FlatFrontFamily) -> Result<ReflectionReport> {
    let mut report = ReflectionReport::default();
    for e in family.grid().edges() {
        let r = reflection_vector(family, e)?;
        let back = reflection_vector(family, e.reversed())?;
        let scale = r.euclidean_norm().max(1.0);
        let unit = (r.dot(&r) - 1.0).abs() / (scale * scale);
        let anti = (r + back).euclidean_norm() / scale;
        report.residuals.push(EdgeResidual {
            edge: e,
            residual: unit.max(anti),
        });
    }
    Ok(report)
}

/// `X_j = rho(X_i)` and `N_j = rho(N_i)` in both orientations of every edge.
///
/// The claim splits into the frame-local identity `rho_Y(E) = W E W*` and
/// the frame relation `F_j = F_i W_ij`, which are checked separately: the
/// ambient reflection loses about `|F|^4` in relative accuracy through the
/// rounding of `R` itself. Each edge reports the larger of the two.
pub fn propagation_check(family: &FlatFrontFamily, s: f64) -> Result<ReflectionReport> {
    let mut report = ReflectionReport::default();
    for e in family.grid().edges() {
        let mut worst: f64 = 0.0;
        for dir in [e, e.reversed()] {
            let y = local_reflection_vector(family, dir)?;
            let (x, n) = family.local_edge(dir, s);
            worst = worst
                .max(rel(&x[1], &mirror(&y, &x[0])))
                .max(rel(&n[1], &mirror(&y, &n[0])));
            let fi = family.frame().get(dir.from);
            let w = family.connection().get(dir);
            let gap = (family.frame().get(dir.to) - fi * w).max_abs();
            worst = worst.max(gap / (fi.max_abs() * w.max_abs()));
        }
        report.residuals.push(EdgeResidual {
            edge: e,
            residual: worst,
        });
    }
    Ok(report)
}

/// `X_j = rho(X_i)` evaluated directly on the ambient points, relative to
/// their size. Meaningful while the frame stays moderate.
pub fn ambient_propagation_check(
    family: &FlatFrontFamily,
    sample: &FrontSample,
) -> Result<ReflectionReport> {
    let mut report = ReflectionReport::default();
    for e in family.grid().edges() {
        let mut worst: f64 = 0.0;
        for dir in [e, e.reversed()] {
            let r = reflection_vector(family, dir)?;
            let (i, j) = (dir.from, dir.to);
            worst = worst
                .max(rel(&sample.x[j], &mirror(&r, &sample.x[i])))
                .max(rel(&sample.n[j], &mirror(&r, &sample.n[i])));
        }
        report.residuals.push(EdgeResidual {
            edge: e,
            residual: worst,
        });
    }
    Ok(report)
}

/// Both Gauss-map differences `d(X ± N)` along an edge are parallel to `R`.
pub fn collinearity_check(family: &FlatFrontFamily, sample: &FrontSample) -> Result<ReflectionReport> {
    let mut report = ReflectionReport::default();
    for e in family.grid().edges() {
        let r = reflection_vector(family, e)?;
        let x = [sample.x[e.from], sample.x[e.to]];
        let n = [sample.n[e.from], sample.n[e.to]];
        collinearity_edge(e, &r, x, n, &mut report);
    }
    Ok(report)
}

/// The same check on the frame-local copy of every edge, against `Y`.
pub fn local_collinearity_check(family: &FlatFrontFamily, s: f64) -> Result<ReflectionReport> {
    let mut report = ReflectionReport::default();
    for e in family.grid().edges() {
        let y = local_reflection_vector(family, e)?;
        let (x, n) = family.local_edge(e, s);
        collinearity_edge(e, &y, x, n, &mut report);
    }
    Ok(report)
}

fn collinearity_edge(
    e: Edge,
    r: &HermitianMat,
    x: [HermitianMat; 2],
    n: [HermitianMat; 2],
    report: &mut ReflectionReport,
) {
    let scale = [x[0], x[1], n[0], n[1]]
        .iter()
        .map(HermitianMat::euclidean_norm)
        .fold(1.0, f64::max);
    let mut worst: f64 = 0.0;
    let mut tested = false;
    for d in [(x[1] + n[1]) - (x[0] + n[0]), (x[1] - n[1]) - (x[0] - n[0])] {
        let len = d.euclidean_norm();
        if len < SINGULAR_TOL * scale {
            continue;
        }
        tested = true;
        let along = *r * (d.euclidean_dot(r) / r.euclidean_dot(r));
        worst = worst.max((d - along).euclidean_norm() / len);
    }
    if tested {
        report.residuals.push(EdgeResidual {
            edge: e,
            residual: worst,
        });
    } else {
        report.skipped.push(e);
    }
}

/// Curvature-line data of one edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RodriguesEdge {
    pub edge: Edge,
    /// Least-squares solution of `dN = -k dX`.
    pub k_least_squares: f64,
    /// `-(dN, R) / (dX, R)` on the edge as oriented, evaluated in the frame
    /// of its initial vertex.
    pub k_forward: f64,
    /// The same quotient for the reversed edge, in the frame of the other end.
    pub k_backward: f64,
    /// `|dN + k dX| / max(|dN|, |dX|)`.
    pub parallel_residual: f64,
}

impl RodriguesEdge {
    pub fn residual(&self) -> f64 {
        let scale = self.k_forward.abs().max(1.0);
        ((self.k_least_squares - self.k_forward).abs() / scale)
            .max((self.k_forward - self.k_backward).abs() / scale)
            .max(self.parallel_residual)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RodriguesReport {
    pub edges: Vec<RodriguesEdge>,
    pub singular: Vec<Edge>,
}

impl RodriguesReport {
    pub fn max_residual(&self) -> f64 {
        self.edges.iter().map(RodriguesEdge::residual).fold(0.0, f64::max)
    }

    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_residual() < tolerance
    }
}

/// `-(dN, Y) / (dX, Y)` on the frame-local copy of an edge.
///
/// Minkowski products are invariant under the frame, so this is the ambient
/// quotient `-(dN, R) / (dX, R)` without its cancellation.
pub fn closed_form_k(family: &FlatFrontFamily, e: Edge, s: f64) -> Result<f64> {
    let y = local_reflection_vector(family, e)?;
    let (x, n) = family.local_edge(e, s);
    let dx = x[1] - x[0];
    let dn = n[1] - n[0];
    let den = dx.dot(&y);
    if den == 0.0 {
        return Err(Error::SingularEdge(e));
    }
    Ok(-dn.dot(&y) / den)
}

/// Solves `dN_ij = -k_ij dX_ij` on every edge of the ambient sample and
/// compares the least-squares `k` with the closed forms.
pub fn rodrigues_check(family: &FlatFrontFamily, sample: &FrontSample) -> Result<RodriguesReport> {
    let mut report = RodriguesReport::default();
    for e in family.grid().edges() {
        let x = [sample.x[e.from], sample.x[e.to]];
        let n = [sample.n[e.from], sample.n[e.to]];
        rodrigues_edge(family, e, sample.s, x, n, &mut report)?;
    }
    Ok(report)
}

/// The same check on the frame-local copy of every edge.
pub fn local_rodrigues_check(family: &FlatFrontFamily, s: f64) -> Result<RodriguesReport> {
    let mut report = RodriguesReport::default();
    for e in family.grid().edges() {
        let (x, n) = family.local_edge(e, s);
        rodrigues_edge(family, e, s, x, n, &mut report)?;
    }
    Ok(report)
}

fn rodrigues_edge(
    family: &FlatFrontFamily,
    e: Edge,
    s: f64,
    x: [HermitianMat; 2],
    n: [HermitianMat; 2],
    report: &mut RodriguesReport,
) -> Result<()> {
    let dx = x[1] - x[0];
    let dn = n[1] - n[0];
    let scale = x[0].euclidean_norm().max(x[1].euclidean_norm());
    if dx.euclidean_norm() < SINGULAR_TOL * scale {
        report.singular.push(e);
        return Ok(());
    }
    let k_ls = -dn.euclidean_dot(&dx) / dx.euclidean_dot(&dx);
    let parallel =
        (dn + dx * k_ls).euclidean_norm() / dn.euclidean_norm().max(dx.euclidean_norm());
    report.edges.push(RodriguesEdge {
        edge: e,
        k_least_squares: k_ls,
        k_forward: closed_form_k(family, e, s)?,
        k_backward: closed_form_k(family, e.reversed(), s)?,
        parallel_residual: parallel,
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{Mat2, Sl2Frame};
    use crate::grid::{QuadGrid, Vertex};
    use crate::holo::make_linear;
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn family(size: usize) -> FlatFrontFamily {
        let h = make_linear(QuadGrid::new(size, size).unwrap(), 1.0, 1.0).unwrap();
        FlatFrontFamily::build(&h, 0.5).unwrap()
    }

    #[test]
    fn reflection_formulas_agree() {
        let r = HermitianMat([0.3, 1.1, -0.2, 0.4]);
        let r = r * (1.0 / r.dot(&r).sqrt());
        let x = HermitianMat([2.0, 0.5, 1.0, -1.0]);
        let a = reflect(&r, &x).unwrap();
        let b = reflect_by_determinants(&r, &x);
        assert!((a - b).euclidean_norm() < 1e-12);
        assert!((reflect(&r, &a).unwrap() - x).euclidean_norm() < 1e-13);
        assert!((a.dot(&a) - x.dot(&x)).abs() < 1e-12);
        assert!((reflect(&r, &r).unwrap() + r).euclidean_norm() < 1e-15);
    }

    #[test]
    fn reflection_fixes_orthogonal_points() {
        let r = HermitianMat::E1;
        let x = HermitianMat([2.0, 0.0, 1.0, 1.0]);
        assert_eq!(reflect(&r, &x).unwrap(), x);
        assert!(matches!(
            reflect(&HermitianMat::E0, &x),
            Err(Error::NotUnitSpacelike { .. })
        ));
    }

    #[test]
    fn single_edge_reflection_vector() {
        let f = family(2);
        let e = Edge::horizontal(0, 0);
        let y = local_reflection_vector(&f, e).unwrap();
        assert_eq!(y, reflection_vector(&f, e).unwrap());
        let expected = HermitianMat::project(&Mat2::new(c(1.0), c(1.0), c(1.0), c(0.5)))
            * std::f64::consts::SQRT_2;
        assert!((y - expected).euclidean_norm() < 1e-15);
        assert!((y.det() + 1.0).abs() < 1e-14);
        let w = f.connection().get(e);
        for basis in [HermitianMat::E0, HermitianMat::E3] {
            let lhs = reflect(&y, &basis).unwrap();
            assert!((lhs - sl2_act(&w, &basis)).euclidean_norm() < 1e-14);
        }
    }

    #[test]
    fn corrupted_frame_is_flagged_on_incident_edges() {
        let f = family(5);
        let bad = Vertex::new(2, 2);
        let mut field = f.frame().field().clone();
        field[bad] = field[bad] * Mat2::new(c(1.0), c(0.1), c(0.0), c(1.0));
        let corrupted = f.clone().with_frame(Sl2Frame::new(field));
        let sample = corrupted.eval(0.0);
        let ambient = ambient_propagation_check(&corrupted, &sample).unwrap();
        let split = propagation_check(&corrupted, 0.0).unwrap();
        for report in [ambient, split] {
            for r in &report.residuals {
                let incident = r.edge.from == bad || r.edge.to == bad;
                assert_eq!(r.residual > 1e-6, incident, "{:?}", r);
            }
        }
    }

    #[test]
    fn constant_edge_is_singular() {
        let f = family(3);
        let mut sample = f.eval(0.0);
        sample.x[Vertex::new(1, 0)] = sample.x[Vertex::new(0, 0)];
        let report = rodrigues_check(&f, &sample).unwrap();
        assert_eq!(report.singular, vec![Edge::horizontal(0, 0)]);
    }

    #[test]
    fn reflection_vectors_are_unit_and_antisymmetric() {
        let f = family(6);
        assert!(reflection_check(&f).unwrap().passed(1e-12));
    }

    #[test]
    fn points_and_normals_propagate_by_reflection() {
        let f = family(4);
        for s in [0.0, 0.4, -0.7] {
            let report = ambient_propagation_check(&f, &f.eval(s)).unwrap();
            assert!(report.passed(1e-10), "s = {s}: {:?}", report.worst());
        }
        let f = family(20);
        for s in [0.0, 0.4, -0.7] {
            let report = propagation_check(&f, s).unwrap();
            assert!(report.passed(1e-11), "s = {s}: {:?}", report.worst());
        }
    }

    #[test]
    fn rodrigues_formulas_agree() {
        let f = family(6);
        let report = rodrigues_check(&f, &f.eval(0.3)).unwrap();
        assert!(report.singular.is_empty());
        assert!(report.passed(1e-10), "{}", report.max_residual());
        let f = family(20);
        let report = local_rodrigues_check(&f, 0.3).unwrap();
        assert!(report.singular.is_empty());
        assert!(report.passed(1e-12), "{}", report.max_residual());
    }

    #[test]
    fn gauss_map_differences_follow_reflection_vector() {
        let f = family(8);
        let report = collinearity_check(&f, &f.eval(0.0)).unwrap();
        assert!(report.passed(1e-10), "{:?}", report.worst());
        let f = family(20);
        let report = local_collinearity_check(&f, -0.5).unwrap();
        assert!(report.skipped.is_empty());
        assert!(report.passed(1e-13), "{:?}", report.worst());
    }
}
