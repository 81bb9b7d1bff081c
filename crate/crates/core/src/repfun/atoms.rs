//! Closed-form directional derivatives of the representation atoms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frechet::{poly_word_sum, DerivativeTensor, Engine};
use crate::matcore::{hermitian_power, psd_margin, Hermitian, Matrix};
use crate::scalar::{binomial, factorial, Real};

/// Atoms with an exact derivative formula.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AtomKind {
    /// `1 / (1 - lambda x)`.
    Resolvent { lambda: f64 },
    /// `x^l / (1 - lambda x)`.
    KtoneAtom { lambda: f64, l: usize },
    /// `1 / (x + shift)`.
    Pole { shift: f64 },
}

/// `S = M^{-1/2}` and the congruence `C = S N S` behind the resolvent identities.
///
/// `resolvent`: `M = I - lambda A`, `N = lambda B`.
/// `shifted`: `M = A + lambda I`, `N = B`.
/// `pick`: `M = B`, `N = I - lambda A` (for the imaginary-part identity).
#[derive(Clone, Debug)]
pub struct ResolventFactorization<T: Real> {
    pub inv_sqrt: Hermitian<T>,
    pub c: Hermitian<T>,
}

impl<T: Real> ResolventFactorization<T> {
    pub fn resolvent(lambda: T, a: &Hermitian<T>, b: &Hermitian<T>) -> Result<Self> {
        let m = a.scale(-lambda).add_identity(T::one());
        Self::build(&m, &b.scale(lambda), "I - lambda A")
    }

    pub fn shifted(lambda: T, a: &Hermitian<T>, b: &Hermitian<T>) -> Result<Self> {
        Self::build(&a.add_identity(lambda), b, "A + lambda I")
    }

    pub fn pick(lambda: T, a: &Hermitian<T>, b: &Hermitian<T>) -> Result<Self> {
        let n = a.scale(-lambda).add_identity(T::one());
        Self::build(b, &n, "B")
    }

    fn build(m: &Hermitian<T>, n: &Hermitian<T>, what: &str) -> Result<Self> {
        let margin = psd_margin(m)?;
        if !(margin > T::zero()) {
            return Err(Error::Precondition {
                message: format!("{what} must be positive definite"),
                margin: margin.as_f64(),
            });
        }
        let inv_sqrt = hermitian_power(m, T::lit(-0.5))?;
        let c = n.congruence(&inv_sqrt);
        Ok(Self { inv_sqrt, c })
    }

    /// `S C^m S`.
    pub fn sandwich(&self, m: usize) -> Hermitian<T> {
        let s = self.inv_sqrt.matrix();
        let inner = self.c.matrix().powi(m);
        Hermitian::symmetrize(&s.matmul(&inner).matmul(s))
    }
}

/// `D^m (x + shift)^{-1} (A; B) = (-1)^m m! S C^m S` with `S = (A + shift)^{-1/2}`.
pub fn pole_derivative<T: Real>(
    shift: T,
    a: &Hermitian<T>,
    b: &Hermitian<T>,
    m: usize,
) -> Result<Hermitian<T>> {
    let fac = ResolventFactorization::shifted(shift, a, b)?;
    let sign = if m % 2 == 0 { T::one() } else { -T::one() };
    Ok(fac.sandwich(m).scale(sign * factorial::<T>(m)))
}

/// Exact `D^m f(A; B)` for a single atom.
pub fn exact_frechet_atom<T: Real>(
    kind: AtomKind,
    a: &Hermitian<T>,
    b: &Hermitian<T>,
    m: usize,
) -> Result<DerivativeTensor<T>> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension { expected: a.dim(), found: b.dim() });
    }
    let value = match kind {
        AtomKind::Resolvent { lambda } => resolvent_derivative(T::lit(lambda), a, b, m)?,
        AtomKind::Pole { shift } => pole_derivative(T::lit(shift), a, b, m)?,
        AtomKind::KtoneAtom { lambda, l } => ktone_atom_derivative(T::lit(lambda), l, a, b, m)?,
    };
    Ok(DerivativeTensor { order: m, value, engine: Engine::ClosedForm, est_error: T::zero() })
}

fn resolvent_derivative<T: Real>(
    lambda: T,
    a: &Hermitian<T>,
    b: &Hermitian<T>,
    m: usize,
) -> Result<Hermitian<T>> {
    let fac = ResolventFactorization::resolvent(lambda, a, b)?;
    Ok(fac.sandwich(m).scale(factorial::<T>(m)))
}

/// Below this `|lambda|` the split into `lambda^{-l}/(1 - lambda x)` plus a
/// polynomial cancels badly, so the Leibniz rule on `x^l * (1 - lambda x)^{-1}`
/// is used instead.
const SPLIT_THRESHOLD: f64 = 0.5;

fn ktone_atom_derivative<T: Real>(
    lambda: T,
    l: usize,
    a: &Hermitian<T>,
    b: &Hermitian<T>,
    m: usize,
) -> Result<Hermitian<T>> {
    if lambda == T::zero() {
        return Ok(monomial_derivative(l, a, b, m));
    }
    if lambda.abs() >= T::lit(SPLIT_THRESHOLD) {
        // x^l/(1 - lam x) = lam^{-l}/(1 - lam x) - sum_{i<l} lam^{i-l} x^i
        let mut out = resolvent_derivative(lambda, a, b, m)?.scale(lambda.powi(-(l as i32)));
        for i in m..l {
            let d = monomial_derivative(i, a, b, m);
            out.axpy(-lambda.powi(i as i32 - l as i32), &d);
        }
        return Ok(out);
    }
    let fac = ResolventFactorization::resolvent(lambda, a, b)?;
    let n = a.dim();
    let mut acc = Matrix::<T>::zeros(n);
    for j in 0..=m.min(l) {
        let dg = monomial_derivative(l, a, b, j);
        let dh = fac.sandwich(m - j).scale(factorial::<T>(m - j));
        acc.axpy(crate::scalar::cr(binomial::<T>(m, j)), &dg.matrix().matmul(dh.matrix()));
    }
    Ok(Hermitian::symmetrize(&acc))
}

/// `D^m x^l (A; B) = m! F_{l-m,m}(A, B)`.
pub(crate) fn monomial_derivative<T: Real>(
    l: usize,
    a: &Hermitian<T>,
    b: &Hermitian<T>,
    m: usize,
) -> Hermitian<T> {
    if m > l {
        return Hermitian::zeros(a.dim());
    }
    let f = poly_word_sum(l, m, a.matrix(), b.matrix());
    Hermitian::symmetrize(&f).scale(factorial::<T>(m))
}
