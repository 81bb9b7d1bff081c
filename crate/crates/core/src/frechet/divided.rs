//! Daleckii-Krein formula: in the eigenbasis of `A`,
//! `D^m f(A;B)_{i0 im} = m! sum f[l_i0, ..., l_im] B_{i0 i1} ... B_{i(m-1) im}`.

use std::collections::HashMap;

use num_complex::Complex;

use super::{frechet_contour, DerivativeTensor, Engine};
use crate::error::{Error, Result};
use crate::matcore::{hermitian_eigen, Hermitian, Matrix};
use crate::repfun::FunctionSpec;
use crate::scalar::{cr, factorial, Real};

pub const MAX_DD_ORDER: usize = 8;
pub const MAX_DD_DIM: usize = 8;

/// Largest absolute spread treated by a single Taylor expansion.
const TAYLOR_SPREAD: f64 = 2.0;
const TAYLOR_TERMS: usize = 200;

pub fn frechet_divided_diff<T: Real>(
    f: &FunctionSpec,
    a: &Hermitian<T>,
    b: &Hermitian<T>,
    m: usize,
) -> Result<DerivativeTensor<T>> {
    let n = a.dim();
    if m > MAX_DD_ORDER || n > MAX_DD_DIM {
        return Err(Error::Unsupported(format!(
            "divided differences limited to m <= {MAX_DD_ORDER}, n <= {MAX_DD_DIM}"
        )));
    }
    if b.dim() != n {
        return Err(Error::Dimension { expected: n, found: b.dim() });
    }
    let spec = hermitian_eigen(a)?;
    let lam = spec.real_values();
    for &l in &lam {
        let x = l.as_f64();
        if !f.domain.contains(x) {
            return Err(Error::Domain(format!("eigenvalue {x:e} outside {}", f.domain)));
        }
    }
    if f.taylor_coefficients(lam[0], 1).is_none() {
        let mut d = frechet_contour(f, a, b, m)?;
        d.engine = Engine::Contour;
        return Ok(d);
    }
    let u = &spec.right_vectors;
    let bt = u.adjoint().matmul(b.matrix()).matmul(u);
    let mut table = DdTable::new(f, &lam, m);
    let mut out = Matrix::<T>::zeros(n);
    let mut mag = T::zero();
    if m == 0 {
        for i in 0..n {
            out[(i, i)] = cr(table.value(&[i])?);
        }
    } else {
        let mut walk = Walk {
            n,
            m,
            bt: &bt,
            table: &mut table,
            path: vec![0; m + 1],
            out: &mut out,
            mag: &mut mag,
        };
        for i0 in 0..n {
            walk.path[0] = i0;
            let key = walk.table.pow[i0];
            walk.descend(1, cr(T::one()), key)?;
        }
    }
    let mfac = factorial::<T>(m);
    let value = u.matmul(&out.scale_re(mfac)).matmul(&u.adjoint());
    let est_error = T::lit(16.0) * T::epsilon() * mfac * mag * T::from_count(m + 1);
    Ok(DerivativeTensor {
        order: m,
        value: Hermitian::symmetrize(&value),
        engine: Engine::DividedDiff,
        est_error,
    })
}

struct Walk<'a, 'f, T: Real> {
    n: usize,
    m: usize,
    bt: &'a Matrix<T>,
    table: &'a mut DdTable<'f, T>,
    path: Vec<usize>,
    out: &'a mut Matrix<T>,
    mag: &'a mut T,
}

impl<T: Real> Walk<'_, '_, T> {
    fn descend(&mut self, depth: usize, prod: Complex<T>, key: u64) -> Result<()> {
        let prev = self.path[depth - 1];
        for i in 0..self.n {
            let p = prod * self.bt[(prev, i)];
            if p == cr(T::zero()) {
                continue;
            }
            self.path[depth] = i;
            let key = key + self.table.pow[i];
            if depth == self.m {
                let dd = self.table.lookup(key, &self.path)?;
                let term = p * dd;
                *self.mag = *self.mag + term.norm();
                let i0 = self.path[0];
                self.out[(i0, i)] = self.out[(i0, i)] + term;
            } else {
                self.descend(depth + 1, p, key)?;
            }
        }
        Ok(())
    }
}

/// Divided differences memoized by the multiset of eigenvalue indices.
struct DdTable<'f, T: Real> {
    f: &'f FunctionSpec,
    lam: Vec<T>,
    pow: Vec<u64>,
    dense: Option<Vec<T>>,
    sparse: HashMap<u64, T>,
}

impl<'f, T: Real> DdTable<'f, T> {
    fn new(f: &'f FunctionSpec, lam: &[T], m: usize) -> Self {
        let base = (m + 2) as u64;
        let size = (base as f64).powi(lam.len() as i32);
        let dense = (size <= (1u64 << 22) as f64).then(|| vec![T::nan(); size as usize]);
        let pow = (0..lam.len()).map(|i| base.pow(i as u32)).collect();
        Self { f, lam: lam.to_vec(), pow, dense, sparse: HashMap::new() }
    }

    fn value(&mut self, idx: &[usize]) -> Result<T> {
        let key: u64 = idx.iter().map(|&i| self.pow[i]).sum();
        self.lookup(key, idx)
    }

    /// `key` must be the multiset key of `idx`.
    fn lookup(&mut self, key: u64, idx: &[usize]) -> Result<T> {
        if let Some(d) = &self.dense {
            let v = d[key as usize];
            if !v.is_nan() {
                return Ok(v);
            }
        } else if let Some(&v) = self.sparse.get(&key) {
            return Ok(v);
        }
        let mut nodes: Vec<T> = idx.iter().map(|&i| self.lam[i]).collect();
        nodes.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        let v = divided_difference(self.f, &nodes)?;
        match &mut self.dense {
            Some(d) => d[key as usize] = v,
            None => {
                self.sparse.insert(key, v);
            }
        }
        Ok(v)
    }
}

/// `f[x_0, ..., x_m]` for sorted real nodes (repeats allowed).
///
/// Blocks whose spread is small compared with the distance to the nearest
/// singularity are summed from the Taylor series about their midpoint:
/// `f[y + c] = sum_q c_q h_{q-m}(y_0, ..., y_m)` with `h_j` the complete
/// homogeneous symmetric polynomials. Wider blocks use the recurrence.
pub(crate) fn divided_difference<T: Real>(f: &FunctionSpec, x: &[T]) -> Result<T> {
    if let Some(v) = taylor_block(f, x)? {
        return Ok(v);
    }
    let len = x.len();
    // table[i][j - i] = f[x_i..x_j]
    let mut table: Vec<Vec<T>> = vec![Vec::new(); len];
    for j in 0..len {
        for i in (0..=j).rev() {
            let v = if let Some(v) = taylor_block(f, &x[i..=j])? {
                v
            } else {
                (table[i + 1][j - i - 1] - table[i][j - i - 1]) / (x[j] - x[i])
            };
            table[i].push(v);
        }
    }
    Ok(table[0][len - 1])
}

fn taylor_block<T: Real>(f: &FunctionSpec, x: &[T]) -> Result<Option<T>> {
    let m = x.len() - 1;
    let lo = x[0];
    let hi = x[m];
    let spread = hi - lo;
    let c = (lo + hi) * T::lit(0.5);
    let radius = T::lit(f.analytic_radius(c.as_f64()).min(f64::MAX));
    if m > 0 && !(spread <= (radius * T::lit(0.5)).min(T::lit(TAYLOR_SPREAD))) {
        return Ok(None);
    }
    if m == 0 {
        return Ok(Some(f.eval_complex(cr(lo)).re));
    }
    // terms until (spread / 2R)^j times the binomial growth is below roundoff
    let ratio = (spread * T::lit(0.5) / radius.min(T::lit(4.0))).as_f64();
    let terms = if ratio <= 0.0 {
        1
    } else {
        let need = (39.0 + 2.0 * m as f64) / -ratio.ln();
        (need.ceil() as usize + 4).min(TAYLOR_TERMS)
    };
    let Some(coef) = f.taylor_coefficients(c, m + terms) else {
        return Ok(None);
    };
    let y: Vec<T> = x.iter().map(|&v| v - c).collect();
    // h[j] over the variables processed so far
    let mut h = vec![T::zero(); terms];
    h[0] = T::one();
    for &yi in &y {
        for r in 1..terms {
            h[r] = h[r] + yi * h[r - 1];
        }
    }
    let mut sum = T::zero();
    let mut quiet = 0;
    for j in 0..terms {
        let term = coef[m + j] * h[j];
        sum = sum + term;
        if term.abs() <= T::epsilon() * T::lit(1e-2) * sum.abs() {
            quiet += 1;
            if quiet >= 3 {
                return Ok(Some(sum));
            }
        } else {
            quiet = 0;
        }
        if !sum.is_finite() {
            return Err(Error::NonConvergence { algorithm: "taylor divided difference", iterations: j, residual: f64::NAN });
        }
    }
    Ok(Some(sum))
}
