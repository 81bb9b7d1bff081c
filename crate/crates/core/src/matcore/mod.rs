//! Dense complex matrices, eigendecompositions and PSD margins.

mod eigen;
mod hermitian;
mod json;
mod matrix;

pub use eigen::{
    general_eigen, general_eigenvalues, hermitian_eigen, hermitian_eigenvalues, schur, Spectrum,
};
pub use hermitian::Hermitian;
pub use json::MatrixJson;
pub use matrix::{Lu, Matrix};

use crate::error::{Error, Result};
use crate::scalar::{cr, Real};

/// Default relative PSD tolerance.
pub const DEFAULT_TAU_REL: f64 = 1e-8;

/// Minimum eigenvalue of `h`; `>= -tau` reads as "PSD at tolerance tau".
pub fn psd_margin<T: Real>(h: &Hermitian<T>) -> Result<T> {
    let values = hermitian_eigenvalues(h)?;
    Ok(values.first().copied().unwrap_or_else(T::zero))
}

/// Largest eigenvalue of `h`.
pub fn max_eigenvalue<T: Real>(h: &Hermitian<T>) -> Result<T> {
    let values = hermitian_eigenvalues(h)?;
    Ok(values.last().copied().unwrap_or_else(T::zero))
}

/// PSD tolerance `tau_rel * (1 + scale)` for a matrix of Frobenius norm `scale`.
pub fn psd_tolerance<T: Real>(tau_rel: T, scale: T) -> T {
    tau_rel * (T::one() + scale)
}

/// `M = Re M + i Im M`, both Hermitian.
pub fn re_im_parts<T: Real>(m: &Matrix<T>) -> (Hermitian<T>, Hermitian<T>) {
    m.re_im_parts()
}

/// `H^s` through the spectral decomposition.
///
/// Non-integer or negative exponents need `H > 0`.
pub fn hermitian_power<T: Real>(h: &Hermitian<T>, s: T) -> Result<Hermitian<T>> {
    let spec = hermitian_eigen(h)?;
    let is_natural = s >= T::zero() && s.fract() == T::zero();
    let lam = spec.real_values();
    if !is_natural {
        if let Some(&min) = lam.first() {
            if !(min > T::zero()) {
                return Err(Error::Domain(format!(
                    "power {} of a matrix with eigenvalue {:e} <= 0",
                    s,
                    min.as_f64()
                )));
            }
        }
    }
    let mapped: Vec<T> = lam
        .iter()
        .map(|&l| if is_natural { l.powi(s.to_i32().unwrap_or(0)) } else { l.powf(s) })
        .collect();
    Ok(spectral_map(&spec.right_vectors, &mapped))
}

/// `U diag(values) U*` for unitary `U`.
pub fn spectral_map<T: Real>(u: &Matrix<T>, values: &[T]) -> Hermitian<T> {
    let n = u.dim();
    let m = Matrix::from_fn(n, |i, j| {
        let mut acc = cr(T::zero());
        for k in 0..n {
            acc = acc + u[(i, k)] * u[(j, k)].conj() * values[k];
        }
        acc
    });
    Hermitian::symmetrize(&m)
}
