//! Light-cone lifts into `R^{4,2}`, contact elements and curvature spheres.

use std::ops::{Add, Mul, Sub};

use nalgebra::{Matrix6x4, SVD};
use serde::Serialize;

use super::{FlatFrontFamily, FrontSample};
use crate::error::{Error, Result};
use crate::frame::HermitianMat;
use crate::grid::Edge;

/// Relative singular-value threshold for the rank of four lifts.
pub const RANK_TOL: f64 = 1e-9;

/// Vector `(x0, x1, x2, x3, p, q)` of `R^{4,2}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct LieVec(pub [f64; 6]);

impl LieVec {
    pub const P: LieVec = LieVec([0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    pub const Q: LieVec = LieVec([0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);

    pub fn from_parts(x: &HermitianMat, p: f64, q: f64) -> Self {
        let [x0, x1, x2, x3] = x.0;
        Self([x0, x1, x2, x3, p, q])
    }

    /// `(y, y') = -y0 y0' + y1 y1' + y2 y2' + y3 y3' - p p' + q q'`.
    pub fn dot(&self, o: &Self) -> f64 {
        let (a, b) = (self.0, o.0);
        -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3] - a[4] * b[4] + a[5] * b[5]
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl Add for LieVec {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for LieVec {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Mul<f64> for LieVec {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self(self.0.map(|x| x * s))
    }
}

/// Point lift `x = X - q` and plane lift `n = N + p`.
pub fn lie_lift(x: &HermitianMat, n: &HermitianMat) -> (LieVec, LieVec) {
    (LieVec::from_parts(x, 0.0, -1.0), LieVec::from_parts(n, 1.0, 0.0))
}

/// Worst light-cone and contact residuals, each relative to `|x| |n|`.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct LieLiftReport {
    pub xx: f64,
    pub nn: f64,
    pub xn: f64,
}

impl LieLiftReport {
    pub fn max_residual(&self) -> f64 {
        self.xx.max(self.nn).max(self.xn)
    }
}

pub fn lie_lift_check(sample: &FrontSample) -> LieLiftReport {
    let mut out = LieLiftReport::default();
    for (v, x) in sample.x.iter() {
        let (lx, ln) = lie_lift(x, &sample.n[v]);
        let (sx, sn) = (lx.euclidean_norm(), ln.euclidean_norm());
        out.xx = out.xx.max(lx.dot(&lx).abs() / (sx * sx));
        out.nn = out.nn.max(ln.dot(&ln).abs() / (sn * sn));
        out.xn = out.xn.max(lx.dot(&ln).abs() / (sx * sn));
    }
    out
}

/// The common null line of two adjacent contact elements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureSphere {
    /// `kappa = a x_i + b n_i = c x_j + d n_j`, scaled so that `a = 1` when possible.
    pub kappa: LieVec,
    pub coefficients: [f64; 4],
    /// Smallest over largest singular value of the column-normalized system.
    pub rank_residual: f64,
    /// Third over largest singular value; bounded away from zero for rank three.
    pub rank_gap: f64,
    /// `|(kappa, kappa)| / |kappa|^2`.
    pub null_residual: f64,
    /// Mismatch of the two span representations, relative to `|kappa|`.
    pub span_residual: f64,
}

/// Intersects `span{x_i, n_i}` with `span{x_j, n_j}`.
///
/// Coincident contact elements and generic pairs of 2-planes both fail with
/// [`Error::NoIntersection`].
pub fn curvature_sphere(xi: &LieVec, ni: &LieVec, xj: &LieVec, nj: &LieVec) -> Result<CurvatureSphere> {
    let cols = [*xi, *ni, *xj * -1.0, *nj * -1.0];
    let norms = cols.map(|c| c.euclidean_norm());
    if norms.iter().any(|&s| s == 0.0 || !s.is_finite()) {
        return Err(Error::NoIntersection { rank: 0 });
    }
    let m = Matrix6x4::from_fn(|r, c| cols[c].0[r] / norms[c]);
    let svd = SVD::new(m, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma = |k: usize| svd.singular_values[order[k]];
    let rank_residual = sigma(3) / sigma(0);
    let rank_gap = sigma(2) / sigma(0);
    if rank_gap <= RANK_TOL {
        let rank = (0..4).filter(|&k| sigma(k) / sigma(0) > RANK_TOL).count();
        return Err(Error::NoIntersection { rank });
    }
    if rank_residual > RANK_TOL {
        return Err(Error::NoIntersection { rank: 4 });
    }
    let null = v_t.row(order[3]);
    let mut coefficients: [f64; 4] = std::array::from_fn(|c| null[c] / norms[c]);
    let biggest = coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let pivot = if coefficients[0].abs() > 1e-12 * biggest {
        coefficients[0]
    } else {
        coefficients[1]
    };
    coefficients = coefficients.map(|c| c / pivot);
    let [a, b, c, d] = coefficients;
    let kappa = *xi * a + *ni * b;
    let other = *xj * c + *nj * d;
    let size = kappa.euclidean_norm();
    Ok(CurvatureSphere {
        kappa,
        coefficients,
        rank_residual,
        rank_gap,
        null_residual: kappa.dot(&kappa).abs() / (size * size),
        span_residual: (kappa - other).euclidean_norm() / size,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SphereEdge {
    pub edge: Edge,
    pub sphere: CurvatureSphere,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SphereReport {
    pub edges: Vec<SphereEdge>,
}

impl SphereReport {
    pub fn max_rank_residual(&self) -> f64 {
        self.edges.iter().map(|e| e.sphere.rank_residual).fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| {
                e.sphere
                    .rank_residual
                    .max(e.sphere.null_residual)
                    .max(e.sphere.span_residual)
            })
            .fold(0.0, f64::max)
    }
}

/// Curvature sphere of every edge; fails on the first edge without one.
pub fn curvature_sphere_check(family: &FlatFrontFamily, sample: &FrontSample) -> Result<SphereReport> {
    let mut report = SphereReport::default();
    for edge in family.grid().edges() {
        let (xi, ni) = lie_lift(&sample.x[edge.from], &sample.n[edge.from]);
        let (xj, nj) = lie_lift(&sample.x[edge.to], &sample.n[edge.to]);
        let sphere = curvature_sphere(&xi, &ni, &xj, &nj)?;
        report.edges.push(SphereEdge { edge, sphere });
    }
    Ok(report)
}

/// Curvature spheres computed on the frame-local copy of every edge.
pub fn local_curvature_sphere_check(family: &FlatFrontFamily, s: f64) -> Result<SphereReport> {
    let mut report = SphereReport::default();
    for edge in family.grid().edges() {
        let (x, n) = family.local_edge(edge, s);
        let (xi, ni) = lie_lift(&x[0], &n[0]);
        let (xj, nj) = lie_lift(&x[1], &n[1]);
        let sphere = curvature_sphere(&xi, &ni, &xj, &nj)?;
        report.edges.push(SphereEdge { edge, sphere });
    }
    Ok(report)
}

/// Compares the lifts of `shifted` with the boost of the lifts of `base`
/// through `s = shifted.s - base.s`:
///
/// ```text
/// a = X - (p sinh s + q cosh s),  b = N + (p cosh s + q sinh s)
/// x(s) = a cosh s + b sinh s,     n(s) = a sinh s + b cosh s
/// ```
pub fn parallel_transform_check(base: &FrontSample, shifted: &FrontSample) -> f64 {
    let s = shifted.s - base.s;
    let (ch, sh) = (s.cosh(), s.sinh());
    let mut worst: f64 = 0.0;
    for (v, x) in base.x.iter() {
        let a = LieVec::from_parts(x, -sh, -ch);
        let b = LieVec::from_parts(&base.n[v], ch, sh);
        let (xs, ns) = lie_lift(&shifted.x[v], &shifted.n[v]);
        let rel = |p: LieVec, q: LieVec| {
            (p - q).euclidean_norm() / p.euclidean_norm().max(q.euclidean_norm()).max(1.0)
        };
        worst = worst
            .max(rel(a * ch + b * sh, xs))
            .max(rel(a * sh + b * ch, ns));
    }
    worst
}
