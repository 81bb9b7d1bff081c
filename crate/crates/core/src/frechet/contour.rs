use super::{DerivativeTensor, Engine};
use crate::error::{Error, Result};
use crate::funcalc::{build_contour, classify, integrate, CONTOUR_MAX_NODES, CONTOUR_START_NODES};
use crate::matcore::{Hermitian, Matrix};
use crate::repfun::FunctionSpec;
use crate::scalar::{factorial, Real};

pub const MAX_CONTOUR_ORDER: usize = 12;
const CAUCHY_TOL: f64 = 1e-10;

/// `m!/(2 pi i) \oint f(zeta) ((zeta - X)^{-1} Z)^m (zeta - X)^{-1} dzeta` for general `X`, `Z`.
///
/// Returns `(value, last Cauchy difference, nodes)`.
pub fn frechet_contour_matrix<T: Real>(
    f: &FunctionSpec,
    x: &Matrix<T>,
    z: &Matrix<T>,
    m: usize,
) -> Result<(Matrix<T>, T, usize)> {
    if m > MAX_CONTOUR_ORDER {
        return Err(Error::Unsupported(format!("contour derivatives limited to order {MAX_CONTOUR_ORDER}")));
    }
    if x.dim() != z.dim() {
        return Err(Error::Dimension { expected: x.dim(), found: z.dim() });
    }
    let case = classify(f, x)?;
    let contour = build_contour(x, f, case)?;
    let mfac = factorial::<T>(m);
    integrate(&contour, x, CAUCHY_TOL, CONTOUR_START_NODES, CONTOUR_MAX_NODES, |zeta, r| {
        let rz = r.matmul(z);
        let mut acc = r.clone();
        for _ in 0..m {
            acc = rz.matmul(&acc);
        }
        Ok(acc.scale(f.eval_complex(zeta) * mfac))
    })
}

/// Contour engine for Hermitian `(A, B)`; output symmetrized.
pub fn frechet_contour<T: Real>(
    f: &FunctionSpec,
    a: &Hermitian<T>,
    b: &Hermitian<T>,
    m: usize,
) -> Result<DerivativeTensor<T>> {
    let (value, diff, _) = frechet_contour_matrix(f, a.matrix(), b.matrix(), m)?;
    Ok(DerivativeTensor { order: m, value: Hermitian::symmetrize(&value), engine: Engine::Contour, est_error: diff })
}

