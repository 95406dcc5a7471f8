//! 2x2 complex matrices and the Hermitian model of Minkowski space.
//!
//! `Herm(2)` with the quadratic form `-det` is identified with `R^{3,1}`
//! through the basis `E0 = I` and the Pauli matrices `E1, E2, E3`, so that
//! `X = x0 E0 + x1 E1 + x2 E2 + x3 E3` and `-det X = -x0^2 + x1^2 + x2^2 + x3^2`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for hermiticity, relative to the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(ONE, ZERO, ZERO, ONE);

    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_cols(first: [Complex64; 2], second: [Complex64; 2]) -> Self {
        Self::new(first[0], second[0], first[1], second[1])
    }

    pub fn diag(x: Complex64, y: Complex64) -> Self {
        Self::new(x, ZERO, ZERO, y)
    }

    pub fn col(&self, index: usize) -> [Complex64; 2] {
        match index {
            0 => [self.a, self.c],
            1 => [self.b, self.d],
            _ => panic!("column index {index} out of range"),
        }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    pub fn adjugate(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn inverse(&self) -> Self {
        self.adjugate() * (ONE / self.det())
    }

    pub fn max_abs(&self) -> f64 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Scale against which cancellation in `det` is measured.
    pub fn det_scale(&self) -> f64 {
        self.a.norm() * self.d.norm() + self.b.norm() * self.c.norm()
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Mul<Complex64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: Complex64) -> Mat2 {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

/// `det[p, q]` for the matrix with columns `p` and `q`.
pub fn det2(p: [Complex64; 2], q: [Complex64; 2]) -> Complex64 {
    p[0] * q[1] - p[1] * q[0]
}

/// A Hermitian 2x2 matrix, stored as its Pauli coordinates `(x0, x1, x2, x3)`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct HermitianMat(pub [f64; 4]);

impl HermitianMat {
    pub const E0: HermitianMat = HermitianMat([1.0, 0.0, 0.0, 0.0]);
    pub const E1: HermitianMat = HermitianMat([0.0, 1.0, 0.0, 0.0]);
    pub const E2: HermitianMat = HermitianMat([0.0, 0.0, 1.0, 0.0]);
    pub const E3: HermitianMat = HermitianMat([0.0, 0.0, 0.0, 1.0]);

    pub fn coords(&self) -> [f64; 4] {
        self.0
    }

    pub fn to_matrix(&self) -> Mat2 {
        let [x0, x1, x2, x3] = self.0;
        Mat2::new(
            Complex64::new(x0 + x3, 0.0),
            Complex64::new(x1, -x2),
            Complex64::new(x1, x2),
            Complex64::new(x0 - x3, 0.0),
        )
    }

    /// Hermitian part of `m`, without checking how far `m` is from Hermitian.
    pub fn project(m: &Mat2) -> Self {
        let x0 = 0.5 * (m.a.re + m.d.re);
        let x3 = 0.5 * (m.a.re - m.d.re);
        let x1 = 0.5 * (m.b.re + m.c.re);
        let x2 = 0.5 * (m.c.im - m.b.im);
        Self([x0, x1, x2, x3])
    }

    /// Deviation of `m` from its Hermitian part, relative to its largest entry.
    pub fn hermitian_residual(m: &Mat2) -> f64 {
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        let off = (m.b - m.c.conj()).norm();
        let diag = m.a.im.abs().max(m.d.im.abs());
        off.max(diag) / scale
    }

    /// Minkowski product, the polarization of `-det`.
    pub fn dot(&self, o: &Self) -> f64 {
        let (x, y) = (self.0, o.0);
        -x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3]
    }

    pub fn det(&self) -> f64 {
        -self.dot(self)
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.0[0]
    }

    /// Euclidean norm of the Pauli coordinates.
    pub fn euclidean_norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn euclidean_dot(&self, o: &Self) -> f64 {
        self.0.iter().zip(o.0.iter()).map(|(a, b)| a * b).sum()
    }
}

impl Add for HermitianMat {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for HermitianMat {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for HermitianMat {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|x| -x))
    }
}

impl Mul<f64> for HermitianMat {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self(self.0.map(|x| x * s))
    }
}

pub fn pauli_pack(x0: f64, x1: f64, x2: f64, x3: f64) -> Mat2 {
    HermitianMat([x0, x1, x2, x3]).to_matrix()
}

pub fn pauli_unpack(m: &Mat2) -> Result<[f64; 4]> {
    let residual = HermitianMat::hermitian_residual(m);
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    Ok(HermitianMat::project(m).0)
}

/// `G X G*`.
pub fn sl2_act(g: &Mat2, x: &HermitianMat) -> HermitianMat {
    HermitianMat::project(&(*g * x.to_matrix() * g.adjoint()))
}

/// The Hermitian dyadic square `v v*`.
pub fn dyadic_square(v: [Complex64; 2]) -> HermitianMat {
    let m = Mat2::new(
        v[0] * v[0].conj(),
        v[0] * v[1].conj(),
        v[1] * v[0].conj(),
        v[1] * v[1].conj(),
    );
    HermitianMat::project(&m)
}
