//! Exact derivatives assembled from the representation atoms.

use super::{poly_word_sum, DerivativeTensor, Engine};
use crate::error::{Error, Result};
use crate::matcore::Hermitian;
use crate::repfun::{exact_frechet_atom, pole_derivative, AtomKind, Builtin, Form, FunctionSpec};
use crate::scalar::{factorial, Real};

/// Closed-form engine; unsupported for `log`, `exp` and non-integer powers.
pub fn frechet_closed_form<T: Real>(
    f: &FunctionSpec,
    a: &Hermitian<T>,
    b: &Hermitian<T>,
    m: usize,
) -> Result<DerivativeTensor<T>> {
    let mut mag = T::zero();
    let value = closed_value(f, a, b, m, &mut mag)?;
    // exact up to rounding in the term sum
    let est_error = T::lit(8.0) * T::from_count((m + 1) * a.dim()) * T::epsilon() * mag.max(value.norm_fro());
    Ok(DerivativeTensor { order: m, value, engine: Engine::ClosedForm, est_error })
}

fn monomial<T: Real>(l: usize, a: &Hermitian<T>, b: &Hermitian<T>, m: usize) -> Hermitian<T> {
    if m > l {
        return Hermitian::zeros(a.dim());
    }
    Hermitian::symmetrize(&poly_word_sum(l, m, a.matrix(), b.matrix())).scale(factorial::<T>(m))
}

/// `acc += c * term`, tracking the size of the summands.
fn add_term<T: Real>(acc: &mut Hermitian<T>, mag: &mut T, c: T, term: &Hermitian<T>) {
    *mag = *mag + c.abs() * term.norm_fro();
    acc.axpy(c, term);
}

fn polynomial<T: Real>(coeffs: &[T], a: &Hermitian<T>, b: &Hermitian<T>, m: usize, mag: &mut T) -> Hermitian<T> {
    let mut acc = Hermitian::zeros(a.dim());
    for (l, &c) in coeffs.iter().enumerate() {
        if c != T::zero() && l >= m {
            add_term(&mut acc, mag, c, &monomial(l, a, b, m));
        }
    }
    acc
}

fn closed_value<T: Real>(
    f: &FunctionSpec,
    a: &Hermitian<T>,
    b: &Hermitian<T>,
    m: usize,
    mag: &mut T,
) -> Result<Hermitian<T>> {
    let lit = |x: f64| T::lit(x);
    match &f.form {
        Form::Builtin(bi) => match *bi {
            Builtin::Id => Ok(polynomial(&[T::zero(), T::one()], a, b, m, mag)),
            Builtin::Const { value } => Ok(polynomial(&[lit(value)], a, b, m, mag)),
            Builtin::Inv => pole_derivative(T::zero(), a, b, m),
            Builtin::Pow { p } if p >= 0.0 && p.fract() == 0.0 && p <= 24.0 => {
                let mut c = vec![T::zero(); p as usize + 1];
                c[p as usize] = T::one();
                Ok(polynomial(&c, a, b, m, mag))
            }
            other => Err(Error::Unsupported(format!("no closed-form derivative for {other:?}"))),
        },
        Form::KtoneRep { order, poly, atoms } => {
            let coeffs: Vec<T> = poly.iter().map(|&c| lit(c)).collect();
            let mut acc = polynomial(&coeffs, a, b, m, mag);
            for at in atoms {
                let d = exact_frechet_atom(AtomKind::KtoneAtom { lambda: at.node, l: *order }, a, b, m)?;
                add_term(&mut acc, mag, lit(at.weight), &d.value);
            }
            Ok(acc)
        }
        Form::MonotoneRep { alpha, beta, atoms } => {
            let mut acc = polynomial(&[lit(*alpha), lit(*beta)], a, b, m, mag);
            for at in atoms {
                // x/(x+l) = 1 - l/(x+l)
                if m == 0 {
                    acc = acc.add_identity(lit(at.weight));
                }
                let d = pole_derivative(lit(at.node), a, b, m)?;
                add_term(&mut acc, mag, -lit(at.weight * at.node), &d);
            }
            Ok(acc)
        }
        Form::DecreasingRep { alpha, beta, atoms } => {
            let mut acc = polynomial(&[lit(*alpha), lit(*beta)], a, b, m, mag);
            for at in atoms {
                add_term(&mut acc, mag, lit(at.weight), &pole_derivative(lit(at.node), a, b, m)?);
            }
            Ok(acc)
        }
        Form::ConvexRep { c0, c1, gamma, atoms } => {
            // c0 + c1 (x-1) + g (x-1)^2 in monomials
            let (c0, c1, g) = (lit(*c0), lit(*c1), lit(*gamma));
            let two = lit(2.0);
            let mut coeffs = [c0 - c1 + g, c1 - two * g, g];
            for at in atoms {
                // (x-1)^2/(x+l) = x - (2+l) + (1+l)^2/(x+l)
                let w = lit(at.weight);
                let l = lit(at.node);
                coeffs[0] = coeffs[0] - w * (two + l);
                coeffs[1] = coeffs[1] + w;
            }
            let mut acc = polynomial(&coeffs, a, b, m, mag);
            for at in atoms {
                let l = lit(at.node);
                let s = (T::one() + l) * (T::one() + l);
                add_term(&mut acc, mag, lit(at.weight) * s, &pole_derivative(l, a, b, m)?);
            }
            Ok(acc)
        }
        Form::Rescaled { inner, scale, shift } => {
            // f~(x) = f((x - shift)/scale): D^m f~(A;B) = D^m f((A - shift)/scale; B/scale)
            let inv = T::one() / lit(*scale);
            let a2 = a.add_identity(-lit(*shift)).scale(inv);
            let b2 = b.scale(inv);
            closed_value(inner, &a2, &b2, m, mag)
        }
    }
}
