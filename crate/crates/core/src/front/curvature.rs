//! Mixed areas of face quadruples and the resulting Gauss curvature.

use std::ops::{Add, Mul, Sub};

use serde::Serialize;

use super::{FlatFrontFamily, SINGULAR_TOL};
use crate::frame::HermitianMat;
use crate::grid::{Face, VertexField};

/// Element of the second exterior power of `R^{3,1}`, components `01,02,03,12,13,23`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Bivector(pub [f64; 6]);

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl Bivector {
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Euclidean pairing of the components.
    pub fn dot(&self, o: &Self) -> f64 {
        self.0.iter().zip(o.0.iter()).map(|(a, b)| a * b).sum()
    }
}

impl Add for Bivector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for Bivector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Mul<f64> for Bivector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self(self.0.map(|x| x * s))
    }
}

pub fn wedge(u: &HermitianMat, v: &HermitianMat) -> Bivector {
    let (u, v) = (u.0, v.0);
    Bivector(PAIRS.map(|(a, b)| u[a] * v[b] - u[b] * v[a]))
}

/// Diagonals `(P_k - P_i, P_l - P_j)` of a face quadruple.
fn diagonals(p: &[HermitianMat; 4]) -> (HermitianMat, HermitianMat) {
    (p[2] - p[0], p[3] - p[1])
}

/// Mixed area `A(P, Q) = (dP_ik ^ dQ_jl + dQ_ik ^ dP_jl) / 4`.
pub fn mixed_area(p: &[HermitianMat; 4], q: &[HermitianMat; 4]) -> Bivector {
    let (p_ik, p_jl) = diagonals(p);
    let (q_ik, q_jl) = diagonals(q);
    (wedge(&p_ik, &q_jl) + wedge(&q_ik, &p_jl)) * 0.25
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaceCurvature {
    pub face: Face,
    pub area_x: Bivector,
    pub area_n: Bivector,
    pub area_h: Bivector,
    /// `None` on singular faces.
    pub k: Option<f64>,
    pub singular: bool,
    /// Largest diagonal length of `X` and `N` on the face.
    pub scale: f64,
    /// `|A(H+, H-)| / scale^2`.
    pub area_h_relative: f64,
    /// Largest of the two diagonal wedges of `H+` against `H-`, over `scale^2`.
    pub diagonal_wedge: f64,
    /// `|A(H+, H-) - A(X, X) (1 - K)| / scale^2`, zero on singular faces.
    pub proportionality: f64,
    /// `|A(H+, H-) - A(X, X) + A(N, N)| / scale^2`.
    pub polarization: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CurvatureReport {
    pub faces: Vec<FaceCurvature>,
}

impl CurvatureReport {
    pub fn max_area_h(&self) -> f64 {
        self.faces.iter().map(|f| f.area_h_relative).fold(0.0, f64::max)
    }

    pub fn max_diagonal_wedge(&self) -> f64 {
        self.faces.iter().map(|f| f.diagonal_wedge).fold(0.0, f64::max)
    }

    /// Worst `|K - 1|` over non-singular faces.
    pub fn max_k_deviation(&self) -> f64 {
        self.faces
            .iter()
            .filter_map(|f| f.k)
            .map(|k| (k - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_proportionality(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| f.proportionality.max(f.polarization))
            .fold(0.0, f64::max)
    }

    pub fn singular_faces(&self) -> Vec<Face> {
        self.faces.iter().filter(|f| f.singular).map(|f| f.face).collect()
    }
}

fn quad(field: &VertexField<HermitianMat>, face: Face) -> [HermitianMat; 4] {
    face.vertices().map(|v| field[v])
}

/// Mixed-area curvature of the front `X` with unit normal field `N`.
pub fn gauss_curvature(
    x: &VertexField<HermitianMat>,
    n: &VertexField<HermitianMat>,
) -> CurvatureReport {
    let faces = x
        .grid()
        .faces()
        .map(|face| face_curvature(face, &quad(x, face), &quad(n, face)))
        .collect();
    CurvatureReport { faces }
}

/// The same report computed on the frame-local copy of every face.
pub fn local_gauss_curvature(family: &FlatFrontFamily, s: f64) -> CurvatureReport {
    let faces = family
        .grid()
        .faces()
        .map(|face| {
            let local = family.local_face(face, s);
            face_curvature(face, &local.x, &local.n)
        })
        .collect();
    CurvatureReport { faces }
}

/// Curvature data of one face quadruple.
///
/// The face is singular when `|A(X, X)| < SINGULAR_TOL * scale^2`; its `K`
/// is left undefined.
pub fn face_curvature(face: Face, px: &[HermitianMat; 4], pn: &[HermitianMat; 4]) -> FaceCurvature {
    let hp: [HermitianMat; 4] = std::array::from_fn(|i| px[i] + pn[i]);
    let hm: [HermitianMat; 4] = std::array::from_fn(|i| px[i] - pn[i]);
    let area_x = mixed_area(px, px);
    let area_n = mixed_area(pn, pn);
    let area_h = mixed_area(&hp, &hm);

    let (x_ik, x_jl) = diagonals(px);
    let (n_ik, n_jl) = diagonals(pn);
    let scale = [x_ik, x_jl, n_ik, n_jl]
        .iter()
        .map(HermitianMat::euclidean_norm)
        .fold(f64::MIN_POSITIVE, f64::max);
    let sq = scale * scale;

    let (hp_ik, hp_jl) = diagonals(&hp);
    let (hm_ik, hm_jl) = diagonals(&hm);
    let diagonal_wedge = wedge(&hp_ik, &hm_jl)
        .norm()
        .max(wedge(&hm_ik, &hp_jl).norm())
        / sq;

    let singular = area_x.norm() < SINGULAR_TOL * sq;
    let (k, proportionality) = if singular {
        (None, 0.0)
    } else {
        let k = 1.0 - area_h.dot(&area_x) / area_x.dot(&area_x);
        (Some(k), (area_h - area_x * (1.0 - k)).norm() / sq)
    };
    FaceCurvature {
        face,
        area_x,
        area_n,
        area_h,
        k,
        singular,
        scale,
        area_h_relative: area_h.norm() / sq,
        diagonal_wedge,
        proportionality,
        polarization: (area_h - (area_x - area_n)).norm() / sq,
    }
}
