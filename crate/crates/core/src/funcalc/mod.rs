//! Analytic functional calculus `f(X)` with a diagonalization path and a
//! contour-quadrature path that serve as mutual oracles.

mod contour;

use serde::{Deserialize, Serialize};

pub use contour::{Case, ConformalMap, Contour, ContourKind, Shape};
pub(crate) use contour::integrate;

use crate::error::{Error, Result};
use crate::matcore::{general_eigen, hermitian_eigen, psd_margin, spectral_map, Hermitian, Matrix};
use crate::repfun::FunctionSpec;
use crate::scalar::{cr, Real};

/// Smallest distance from a real eigenvalue to a finite domain endpoint.
pub const ENDPOINT_CLEARANCE: f64 = 1e-9;

pub const CONTOUR_START_NODES: usize = 64;
pub const CONTOUR_MAX_NODES: usize = 8192;
pub const CONTOUR_TOL: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalcPath {
    #[default]
    Auto,
    Eigen,
    Contour,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalcResult<T: Real> {
    pub value: Matrix<T>,
    /// Path actually used (`Auto` never appears here).
    pub path: CalcPath,
    pub est_error: T,
    pub nodes_used: usize,
}

/// `f(A) = U diag(f(lambda_i)) U*`.
pub fn calc_hermitian<T: Real>(f: &FunctionSpec, a: &Hermitian<T>) -> Result<Hermitian<T>> {
    let spec = hermitian_eigen(a)?;
    let mut mapped = Vec::with_capacity(a.dim());
    for lam in spec.real_values() {
        let x = lam.as_f64();
        if !f.domain.contains(x) || f.domain.gap(x) < ENDPOINT_CLEARANCE {
            return Err(Error::Domain(format!(
                "eigenvalue {x:e} is outside or within {ENDPOINT_CLEARANCE:e} of the boundary of {}",
                f.domain
            )));
        }
        mapped.push(f.eval_complex(cr(lam)).re);
    }
    Ok(spectral_map(&spec.right_vectors, &mapped))
}

/// Which hypothesis makes `f(X)` well defined, checked in the order strip,
/// upper half, lower half.
pub fn classify<T: Real>(f: &FunctionSpec, x: &Matrix<T>) -> Result<Case> {
    let (re, im) = x.re_im_parts();
    let re_vals = crate::matcore::hermitian_eigenvalues(&re)?;
    let inside = re_vals.iter().all(|&v| {
        let v = v.as_f64();
        f.domain.contains(v) && f.domain.gap(v) >= ENDPOINT_CLEARANCE
    });
    if inside {
        return Ok(Case::Strip);
    }
    let m = psd_margin(&im)?;
    if m > T::zero() {
        return Ok(Case::UpperHalf);
    }
    let m_low = psd_margin(&im.neg())?;
    if m_low > T::zero() {
        return Ok(Case::LowerHalf);
    }
    Err(Error::Precondition {
        message: format!("sigma(Re X) leaves {} and Im X is not definite", f.domain),
        margin: m.as_f64().max(m_low.as_f64()),
    })
}

/// Quadrature contour enclosing `sigma(X)` inside the analyticity region.
pub fn build_contour<T: Real>(x: &Matrix<T>, f: &FunctionSpec, case: Case) -> Result<Contour> {
    let (re, im) = x.re_im_parts();
    match case {
        Case::Strip => {
            let vals = crate::matcore::hermitian_eigenvalues(&re)?;
            if let Some(bad) = vals.iter().find(|v| !f.domain.contains(v.as_f64())) {
                return Err(Error::Precondition {
                    message: format!("sigma(Re X) contains {bad} outside {}", f.domain),
                    margin: f.domain.gap(bad.as_f64()),
                });
            }
        }
        Case::UpperHalf | Case::LowerHalf => {
            let h = if case == Case::UpperHalf { im } else { im.neg() };
            let m = psd_margin(&h)?;
            if !(m > T::zero()) {
                return Err(Error::Precondition {
                    message: "Im X is not definite".into(),
                    margin: m.as_f64(),
                });
            }
        }
    }
    let values: Vec<num_complex::Complex64> = crate::matcore::general_eigenvalues(x)?
        .iter()
        .map(|v| num_complex::Complex64::new(v.re.as_f64(), v.im.as_f64()))
        .collect();
    contour::contour_for(&values, f, case)
}

/// `f(X)` for non-Hermitian `X` under either hypothesis.
pub fn analytic_calc<T: Real>(f: &FunctionSpec, x: &Matrix<T>, path: CalcPath) -> Result<CalcResult<T>> {
    x.check_finite()?;
    let case = classify(f, x)?;
    match path {
        CalcPath::Eigen => eigen_path(f, x),
        CalcPath::Contour => contour_path(f, x, case).map(|(r, _)| r),
        CalcPath::Auto => match eigen_path(f, x) {
            Ok(r) => Ok(r),
            Err(Error::Precondition { .. }) | Err(Error::Domain(_)) | Err(Error::Singular) => {
                contour_path(f, x, case).map(|(r, _)| r)
            }
            Err(e) => Err(e),
        },
    }
}

fn eigen_path<T: Real>(f: &FunctionSpec, x: &Matrix<T>) -> Result<CalcResult<T>> {
    let spec = general_eigen(x)?;
    let cond = spec.vector_condition;
    if !(cond.as_f64() <= crate::matcore::Spectrum::<T>::ILL_CONDITIONED) {
        return Err(Error::Precondition {
            message: format!("eigenvector condition {:e} exceeds 1e6", cond.as_f64()),
            margin: cond.as_f64(),
        });
    }
    let n = x.dim();
    let mut fv = Vec::with_capacity(n);
    for &lam in &spec.values {
        fv.push(f.eval_scalar(lam)?);
    }
    let v = &spec.right_vectors;
    let v_inv = v.inverse()?;
    let scaled = Matrix::from_fn(n, |i, j| v[(i, j)] * fv[j]);
    let value = scaled.matmul(&v_inv);
    let est_error = cond * T::epsilon() * value.norm_fro() * T::from_count(n);
    Ok(CalcResult { value, path: CalcPath::Eigen, est_error, nodes_used: 0 })
}

/// Contour path, also returning the contour with its final node count.
pub fn contour_path<T: Real>(f: &FunctionSpec, x: &Matrix<T>, case: Case) -> Result<(CalcResult<T>, Contour)> {
    let mut contour = build_contour(x, f, case)?;
    let (value, diff, nodes) = integrate(
        &contour,
        x,
        CONTOUR_TOL,
        CONTOUR_START_NODES,
        CONTOUR_MAX_NODES,
        |z, r| Ok(r.scale(f.eval_complex(z))),
    )?;
    contour.node_count = nodes;
    Ok((CalcResult { value, path: CalcPath::Contour, est_error: diff, nodes_used: nodes }, contour))
}

#[cfg(test)]
mod tests;
