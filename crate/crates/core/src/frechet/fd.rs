//! Central finite differences of `t -> f(A + tB)` with Richardson extrapolation.

use super::{DerivativeTensor, Engine};
use crate::error::{Error, Result};
use crate::funcalc::calc_hermitian;
use crate::matcore::{hermitian_eigenvalues, Hermitian};
use crate::repfun::FunctionSpec;
use crate::scalar::{binomial, Real};

pub const MAX_FD_ORDER: usize = 6;
/// Richardson levels beyond the coarsest step.
const LEVELS: usize = 3;

pub fn frechet_fd_oracle<T: Real>(
    f: &FunctionSpec,
    a: &Hermitian<T>,
    b: &Hermitian<T>,
    m: usize,
) -> Result<DerivativeTensor<T>> {
    if m > MAX_FD_ORDER {
        return Err(Error::Unsupported(format!("finite differences limited to order {MAX_FD_ORDER}")));
    }
    if a.dim() != b.dim() {
        return Err(Error::Dimension { expected: a.dim(), found: b.dim() });
    }
    let eps = T::epsilon();
    if m == 0 {
        let value = calc_hermitian(f, a)?;
        // eigendecomposition rounding, pushed through the local Lipschitz constant of f
        let slope = hermitian_eigenvalues(a)?
            .iter()
            .filter_map(|&l| f.taylor_coefficients(l, 2).map(|c| c[1].abs()))
            .fold(T::zero(), T::max);
        let est_error =
            T::from_count(4 * a.dim()) * eps * (value.norm_fro() + slope * a.norm_fro());
        return Ok(DerivativeTensor { order: 0, value, engine: Engine::FiniteDiff, est_error });
    }
    let gap = hermitian_eigenvalues(a)?
        .iter()
        .map(|&l| f.domain.gap(l.as_f64()))
        .fold(f64::INFINITY, f64::min);
    let b_norm = hermitian_eigenvalues(b)?.iter().map(|v| v.abs()).fold(T::zero(), T::max);
    if b_norm == T::zero() {
        return Ok(DerivativeTensor { order: m, value: Hermitian::zeros(a.dim()), engine: Engine::FiniteDiff, est_error: T::zero() });
    }
    let one = T::one();
    let base = eps.powf(one / T::from_count(m + 2)) * (one + a.norm_fro()) / (one + b.norm_fro());
    let scale = T::lit(2f64.powi(LEVELS as i32));
    let mut h_max = base * scale;
    // half-width of the stencil is (m/2) h; keep 10% of the boundary gap
    let reach = T::from_count(m) * T::lit(0.5) * b_norm;
    let limit = T::lit(0.9 * gap.min(f64::MAX)) / reach;
    if h_max > limit {
        h_max = limit;
    }
    if !(h_max.as_f64() > 1e-12) {
        return Err(Error::Domain(format!("no room for a finite-difference stencil (boundary gap {gap:e})")));
    }

    let mut table: Vec<Vec<Hermitian<T>>> = Vec::with_capacity(LEVELS + 1);
    let mut g_max = T::zero();
    let mut h = h_max;
    for k in 0..=LEVELS {
        let mut acc = Hermitian::zeros(a.dim());
        for j in 0..=m {
            let t = (T::from_count(m) * T::lit(0.5) - T::from_count(j)) * h;
            let mut x = a.clone();
            x.axpy(t, b);
            let g = calc_hermitian(f, &x)?;
            g_max = g_max.max(g.norm_fro());
            let c = binomial::<T>(m, j) * if j % 2 == 0 { one } else { -one };
            acc.axpy(c, &g);
        }
        let mut row = vec![acc.scale(one / h.powi(m as i32))];
        for j in 1..=k {
            let factor = T::lit(4f64.powi(j as i32) - 1.0);
            let prev_row = &table[k - 1];
            let cur = &row[j - 1];
            let mut next = cur.clone();
            next.axpy(one / factor, &cur.sub(&prev_row[j - 1]));
            row.push(next);
        }
        table.push(row);
        h = h * T::lit(0.5);
    }
    // pick the diagonal entry whose change from the previous level, plus
    // its rounding level, is smallest
    let mut pick = (1, T::infinity());
    let mut hk = h_max;
    for k in 1..=LEVELS {
        hk = hk * T::lit(0.5);
        let diff = table[k][k].sub(&table[k - 1][k - 1]).norm_fro();
        let roundoff = T::lit(4.0) * eps * T::lit(2f64.powi(m as i32)) * g_max / hk.powi(m as i32);
        if diff + roundoff < pick.1 {
            pick = (k, diff + roundoff);
        }
    }
    let best = table[pick.0][pick.0].clone();
    let est_error = (T::lit(2.0) * pick.1).max(T::from_count(4 * a.dim()) * eps * best.norm_fro());
    Ok(DerivativeTensor { order: m, value: best, engine: Engine::FiniteDiff, est_error })
}
