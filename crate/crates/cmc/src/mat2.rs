//! 2x2 complex matrices, the scalar type of all loop arithmetic.

use num_complex::Complex64;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

pub const ZERO_C: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE_C: Complex64 = Complex64::new(1.0, 0.0);
pub const I_C: Complex64 = Complex64::new(0.0, 1.0);

/// Dense 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[Complex64; 2]; 2],
}

impl Mat2 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn zero() -> Self {
        Mat2::new(ZERO_C, ZERO_C, ZERO_C, ZERO_C)
    }

    pub fn identity() -> Self {
        Mat2::new(ONE_C, ZERO_C, ZERO_C, ONE_C)
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Mat2::new(a, ZERO_C, ZERO_C, d)
    }

    /// The off-diagonal symmetric matrix E = [[0,1],[1,0]].
    pub fn offdiag_e() -> Self {
        Mat2::new(ZERO_C, ONE_C, ONE_C, ZERO_C)
    }

    pub fn from_real(r: [[f64; 2]; 2]) -> Self {
        Mat2 {
            m: [
                [Complex64::new(r[0][0], 0.0), Complex64::new(r[0][1], 0.0)],
                [Complex64::new(r[1][0], 0.0), Complex64::new(r[1][1], 0.0)],
            ],
        }
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat2 {
        Mat2::new(
            self.m[0][0].conj(),
            self.m[1][0].conj(),
            self.m[0][1].conj(),
            self.m[1][1].conj(),
        )
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn conj(&self) -> Mat2 {
        Mat2::new(
            self.m[0][0].conj(),
            self.m[0][1].conj(),
            self.m[1][0].conj(),
            self.m[1][1].conj(),
        )
    }

    /// Exact inverse via the adjugate; `None` when the determinant underflows.
    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.norm() < 1e-300 {
            return None;
        }
        Some(Mat2::new(
            self.m[1][1] / d,
            -self.m[0][1] / d,
            -self.m[1][0] / d,
            self.m[0][0] / d,
        ))
    }

    pub fn scale(&self, s: Complex64) -> Mat2 {
        Mat2::new(
            self.m[0][0] * s,
            self.m[0][1] * s,
            self.m[1][0] * s,
            self.m[1][1] * s,
        )
    }

    pub fn frobenius(&self) -> f64 {
        (self.m[0][0].norm_sqr()
            + self.m[0][1].norm_sqr()
            + self.m[1][0].norm_sqr()
            + self.m[1][1].norm_sqr())
        .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.m[0][0]
            .norm()
            .max(self.m[0][1].norm())
            .max(self.m[1][0].norm())
            .max(self.m[1][1].norm())
    }

    /// Frobenius distance to the identity of A^H A, zero iff unitary.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Mat2::identity()).frobenius()
    }

    pub fn anti_hermitian_part(&self) -> Mat2 {
        (*self - self.adjoint()).scale(Complex64::new(0.5, 0.0))
    }

    /// Exponential of a (numerically) trace-free matrix.
    ///
    /// For trace-free A one has A^2 = -det(A) I, so
    /// exp(A) = cosh(s) I + (sinh(s)/s) A with s^2 = -det(A).
    pub fn exp_tracefree(&self) -> Mat2 {
        let s2 = -self.det();
        let s = s2.sqrt();
        let (ch, shs) = if s.norm() < 1e-8 {
            // sinh(s)/s = 1 + s^2/6 + s^4/120
            (
                ONE_C + s2 / 2.0 + s2 * s2 / 24.0,
                ONE_C + s2 / 6.0 + s2 * s2 / 120.0,
            )
        } else {
            (s.cosh(), s.sinh() / s)
        };
        Mat2::identity().scale(ch) + self.scale(shs)
    }

    pub fn is_finite(&self) -> bool {
        self.m
            .iter()
            .flatten()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        for r in 0..2 {
            for c in 0..2 {
                self.m[r][c] += o.m[r][c];
            }
        }
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m[0][0] - o.m[0][0],
            self.m[0][1] - o.m[0][1],
            self.m[1][0] - o.m[1][0],
            self.m[1][1] - o.m[1][1],
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.m;
        let b = &o.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}
