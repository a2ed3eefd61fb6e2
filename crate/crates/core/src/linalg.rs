//! Fixed-size complex 2x2 algebra used by the per-mode computations.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Complex 2x2 matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub const fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn zero() -> Self {
        Mat2::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Mat2::new(
            C64::from(m[0][0]),
            C64::from(m[0][1]),
            C64::from(m[1][0]),
            C64::from(m[1][1]),
        )
    }

    /// Outer product `v w^†`.
    pub fn outer(v: [C64; 2], w: [C64; 2]) -> Self {
        Mat2([
            [v[0] * w[0].conj(), v[0] * w[1].conj()],
            [v[1] * w[0].conj(), v[1] * w[1].conj()],
        ])
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> C64 {
        self.0[r][c]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2::new(
            m[0][0].conj(),
            m[1][0].conj(),
            m[0][1].conj(),
            m[1][1].conj(),
        )
    }

    pub fn conj(&self) -> Self {
        let m = &self.0;
        Mat2::new(
            m[0][0].conj(),
            m[0][1].conj(),
            m[1][0].conj(),
            m[1][1].conj(),
        )
    }

    pub fn scale(&self, k: C64) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0] * k, m[0][1] * k, m[1][0] * k, m[1][1] * k)
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Mat2) -> C64 {
        let a = &self.0;
        let b = &other.0;
        a[0][0] * b[0][0] + a[0][1] * b[1][0] + a[1][0] * b[0][1] + a[1][1] * b[1][1]
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + rhs.scale(-ONE)
    }
}

/// `exp(M)` for traceless `M`: `cosh(mu) I + sinh(mu)/mu M` with `mu^2 = -det M`.
pub fn expm_traceless(m: &Mat2) -> Mat2 {
    let mu = (-m.det()).sqrt();
    let (c, sh) = if mu.norm() < 1e-4 {
        // series keeps sinh(mu)/mu accurate near the removable singularity
        let mu2 = mu * mu;
        (
            ONE + mu2 / 2.0 + mu2 * mu2 / 24.0 + mu2 * mu2 * mu2 / 720.0,
            ONE + mu2 / 6.0 + mu2 * mu2 / 120.0 + mu2 * mu2 * mu2 / 5040.0,
        )
    } else {
        (mu.cosh(), mu.sinh() / mu)
    };
    Mat2::identity().scale(c) + m.scale(sh)
}

/// `exp(a H)` for a real symmetric traceless `H` with eigenvalues `±omega`.
pub fn expm_scaled_hamiltonian(h: &[[f64; 2]; 2], omega: f64, a: C64) -> Mat2 {
    let x = a * omega;
    let c = x.cosh();
    let sh = if omega == 0.0 {
        a
    } else if x.norm() < 1e-4 {
        let x2 = x * x;
        a * (ONE + x2 / 6.0 + x2 * x2 / 120.0)
    } else {
        x.sinh() / omega
    };
    Mat2::identity().scale(c) + Mat2::from_real(*h).scale(sh)
}
