use std::ops::Deref;

use num_complex::Complex;

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{cr, Real};

/// Hermitian matrix, stored canonically symmetrized.
#[derive(Clone, PartialEq, Debug)]
pub struct Hermitian<T: Real>(Matrix<T>);

impl<T: Real> Hermitian<T> {
    /// Accepts `m` when `max |m - m*| <= 1e-12 (1 + max |m_ij|)` and stores `(m + m*)/2`.
    pub fn new(m: Matrix<T>) -> Result<Self> {
        m.check_finite()?;
        let defect = m.hermitian_defect();
        let gate = T::tol(1e-12, 64.0) * (T::one() + m.max_abs());
        if defect > gate {
            return Err(Error::InvalidMatrix(format!(
                "not Hermitian: asymmetry {:e} exceeds {:e}",
                defect.as_f64(),
                gate.as_f64()
            )));
        }
        Ok(Self::symmetrize(&m))
    }

    /// `(m + m*)/2` without the asymmetry gate.
    pub fn symmetrize(m: &Matrix<T>) -> Self {
        let half = T::lit(0.5);
        Self(Matrix::from_fn(m.dim(), |i, j| {
            (m[(i, j)] + m[(j, i)].conj()) * half
        }))
    }

    pub(crate) fn from_parts_unchecked(m: Matrix<T>) -> Self {
        Self(m)
    }

    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn from_real_diag(d: &[T]) -> Self {
        Self(Matrix::from_real_diag(d))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(Matrix::from_real_rows(rows)?)
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.scale_re(s))
    }

    pub fn neg(&self) -> Self {
        Self(-&self.0)
    }

    pub fn add_identity(&self, s: T) -> Self {
        Self(self.0.add_diag(cr(s)))
    }

    /// `self + s * other`.
    pub fn axpy(&mut self, s: T, other: &Self) {
        self.0.axpy(cr(s), &other.0);
    }

    /// `M S M*`-style congruence `x * self * x`, with Hermitian `x`.
    pub fn congruence(&self, x: &Self) -> Self {
        Self::symmetrize(&x.0.matmul(&self.0).matmul(&x.0))
    }

    /// Hermitian square `self^2`.
    pub fn square(&self) -> Self {
        Self::symmetrize(&self.0.matmul(&self.0))
    }

    /// `X = self + i other`.
    pub fn complexify(&self, other: &Self) -> Matrix<T> {
        let mut m = self.0.clone();
        m.axpy(Complex::new(T::zero(), T::one()), &other.0);
        m
    }

    pub fn cast<U: Real>(&self) -> Hermitian<U> {
        Hermitian(self.0.cast())
    }
}

impl<T: Real> Deref for Hermitian<T> {
    type Target = Matrix<T>;
    fn deref(&self) -> &Matrix<T> {
        &self.0
    }
}
