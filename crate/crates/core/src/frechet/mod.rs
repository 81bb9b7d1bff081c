//! Directional derivatives `D^m f(A; B)` by independent engines, and the
//! alternating Taylor sums built from them.

mod closed;
mod contour;
mod divided;
mod fd;

use serde::{Deserialize, Serialize};

pub use closed::frechet_closed_form;
pub use contour::{frechet_contour, frechet_contour_matrix};
pub use divided::frechet_divided_diff;
pub use fd::frechet_fd_oracle;

use crate::error::{Error, Result};
use crate::matcore::{Hermitian, Matrix};
use crate::repfun::FunctionSpec;
use crate::scalar::{factorial, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Contour,
    DividedDiff,
    FiniteDiff,
    ClosedForm,
}

impl Engine {
    /// Second engine used for spot checks.
    pub fn alternate(self) -> Engine {
        match self {
            Engine::DividedDiff => Engine::Contour,
            _ => Engine::DividedDiff,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeTensor<T: Real> {
    pub order: usize,
    pub value: Hermitian<T>,
    pub engine: Engine,
    pub est_error: T,
}

/// `D^m f(A; B)` by the requested engine.
pub fn derivative<T: Real>(
    f: &FunctionSpec,
    a: &Hermitian<T>,
    b: &Hermitian<T>,
    m: usize,
    engine: Engine,
) -> Result<DerivativeTensor<T>> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension { expected: a.dim(), found: b.dim() });
    }
    match engine {
        Engine::Contour => frechet_contour(f, a, b, m),
        Engine::DividedDiff => frechet_divided_diff(f, a, b, m),
        Engine::FiniteDiff => frechet_fd_oracle(f, a, b, m),
        Engine::ClosedForm => frechet_closed_form(f, a, b, m),
    }
}

/// `F_{l-m,m}(A, B)`: sum of the `C(l, m)` words with `l - m` factors `A` and `m` factors `B`.
pub fn poly_word_sum<T: Real>(l: usize, m: usize, a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let n = a.dim();
    if m > l {
        return Matrix::zeros(n);
    }
    if l == 0 {
        return Matrix::identity(n);
    }
    let mut acc = Matrix::zeros(n);
    // bit `pos` of `mask` set means the factor at that position is B
    for mask in 0u32..(1 << l) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let mut word = if mask & 1 == 1 { b.clone() } else { a.clone() };
        for pos in 1..l {
            word = word.matmul(if mask >> pos & 1 == 1 { b } else { a });
        }
        acc = &acc + &word;
    }
    acc
}

/// Alternating partial sums.
///
/// `even[j] = sum_{m=0}^{j} (-1)^m/(2m)! D^{2m} f(A;B)` and
/// `odd[j] = sum_{m=1}^{j} (-1)^{m-1}/(2m-1)! D^{2m-1} f(A;B)` (`odd[0] = 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorSums<T: Real> {
    pub even: Vec<Hermitian<T>>,
    pub odd: Vec<Hermitian<T>>,
    pub engine: Engine,
    /// Accumulated engine error estimate over all terms.
    pub est_error: T,
}

/// Both sums up to list index `k` (derivatives through order `2k`), one engine.
pub fn taylor_sums<T: Real>(
    f: &FunctionSpec,
    a: &Hermitian<T>,
    b: &Hermitian<T>,
    k: usize,
    engine: Engine,
) -> Result<TaylorSums<T>> {
    taylor_sums_to(f, a, b, k, k, engine)
}

/// Even sums through index `k_even`, odd sums through index `k_odd`.
pub fn taylor_sums_to<T: Real>(
    f: &FunctionSpec,
    a: &Hermitian<T>,
    b: &Hermitian<T>,
    k_even: usize,
    k_odd: usize,
    engine: Engine,
) -> Result<TaylorSums<T>> {
    let max_order = (2 * k_even).max((2 * k_odd).saturating_sub(1));
    let mut ds = Vec::with_capacity(max_order + 1);
    let mut est = T::zero();
    for m in 0..=max_order {
        let d = derivative(f, a, b, m, engine)?;
        est = est + d.est_error / factorial::<T>(m);
        ds.push(d.value);
    }
    let n = a.dim();
    let mut even = Vec::with_capacity(k_even + 1);
    let mut acc = Hermitian::zeros(n);
    for j in 0..=k_even {
        let sign = if j % 2 == 0 { T::one() } else { -T::one() };
        acc.axpy(sign / factorial::<T>(2 * j), &ds[2 * j]);
        even.push(acc.clone());
    }
    let mut odd = Vec::with_capacity(k_odd + 1);
    let mut acc = Hermitian::zeros(n);
    odd.push(acc.clone());
    for j in 1..=k_odd {
        let sign = if j % 2 == 1 { T::one() } else { -T::one() };
        acc.axpy(sign / factorial::<T>(2 * j - 1), &ds[2 * j - 1]);
        odd.push(acc.clone());
    }
    Ok(TaylorSums { even, odd, engine, est_error: est })
}
