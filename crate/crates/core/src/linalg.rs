//! Fixed-size dense complex algebra for the 8-dimensional three-qubit space.

use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

pub type C64 = Complex64;

pub const DIM: usize = 8;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Single-qubit operator, row-major.
pub type Mat2 = [[C64; 2]; 2];

pub const PAULI_I: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
pub const PAULI_X: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
pub const PAULI_Y: Mat2 = [[ZERO, C64::new(0.0, -1.0)], [I, ZERO]];
pub const PAULI_Z: Mat2 = [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]];

/// Dense 8x8 complex matrix in the basis `|q1 q2 q3>`, index `4*q1 + 2*q2 + q3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat8(pub [[C64; DIM]; DIM]);

/// An 8x8 evolution operator.
pub type Unitary8 = Mat8;

impl Mat8 {
    pub fn zeros() -> Self {
        Mat8([[ZERO; DIM]; DIM])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..DIM {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for (i, row) in m.0.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = f(i, j);
            }
        }
        m
    }

    /// `a (x) b (x) c`, qubit 1 being the most significant bit.
    pub fn kron3(a: &Mat2, b: &Mat2, c: &Mat2) -> Self {
        Self::from_fn(|i, j| {
            a[(i >> 2) & 1][(j >> 2) & 1] * b[(i >> 1) & 1][(j >> 1) & 1] * c[i & 1][j & 1]
        })
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn trace(&self) -> C64 {
        (0..DIM).map(|i| self.0[i][i]).sum()
    }

    pub fn apply(&self, v: &[C64; DIM]) -> [C64; DIM] {
        let mut out = [ZERO; DIM];
        for (o, row) in out.iter_mut().zip(self.0.iter()) {
            *o = row.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0, |m, x| m.max(x.norm()))
    }

    pub fn max_abs_diff(&self, other: &Mat8) -> f64 {
        (*self - *other).max_abs()
    }

    /// Induced infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        self.0
            .iter()
            .map(|r| r.iter().map(|x| x.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Mat8::identity())
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }
}

impl Index<(usize, usize)> for Mat8 {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat8 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl Add for Mat8 {
    type Output = Mat8;
    fn add(self, rhs: Mat8) -> Mat8 {
        Mat8::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl Sub for Mat8 {
    type Output = Mat8;
    fn sub(self, rhs: Mat8) -> Mat8 {
        Mat8::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl Mul for Mat8 {
    type Output = Mat8;
    fn mul(self, rhs: Mat8) -> Mat8 {
        let mut out = Mat8::zeros();
        for i in 0..DIM {
            for k in 0..DIM {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..DIM {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

/// `exp(-i * h * dt)` for Hermitian `h`, by scaling and squaring of a
/// truncated Taylor series. Truncation is at relative term size 1e-17,
/// well inside the 1e-13 accuracy the integrator needs.
pub fn expm_neg_i(h: &Mat8, dt: f64) -> Mat8 {
    let a = h.scale(C64::new(0.0, -dt));
    let norm = a.norm_inf();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let a = a.scale_re(1.0 / f64::powi(2.0, squarings as i32));

    let mut sum = Mat8::identity();
    let mut term = Mat8::identity();
    for k in 1..40 {
        term = (term * a).scale_re(1.0 / k as f64);
        sum = sum + term;
        if term.max_abs() < 1e-17 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}
