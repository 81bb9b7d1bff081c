//! Eigendecompositions.
//!
//! Hermitian matrices go through cyclic complex Jacobi rotations, which are
//! slow for large `n` but deliver small relative residuals for the `n <= 64`
//! matrices this crate targets. General matrices are reduced to Hessenberg
//! form and driven to complex Schur form by single-shift QR sweeps; the
//! eigenvectors are recovered from the triangular factor by back substitution.

use num_complex::Complex;

use super::{Hermitian, Matrix};
use crate::error::{Error, Result};
use crate::scalar::{cone, cr, czero, Real};

/// Eigenvalues with right eigenvectors (columns of `right_vectors`).
#[derive(Clone, Debug)]
pub struct Spectrum<T: Real> {
    pub values: Vec<Complex<T>>,
    pub right_vectors: Matrix<T>,
    /// `||V||_F ||V^{-1}||_F`, an upper bound on the 2-norm condition number.
    pub vector_condition: T,
}

impl<T: Real> Spectrum<T> {
    pub const ILL_CONDITIONED: f64 = 1e6;

    pub fn is_ill_conditioned(&self) -> bool {
        !(self.vector_condition.as_f64() <= Self::ILL_CONDITIONED)
    }

    pub fn real_values(&self) -> Vec<T> {
        self.values.iter().map(|z| z.re).collect()
    }
}

const JACOBI_SWEEPS: usize = 60;
const JACOBI_SWEEPS_FALLBACK: usize = 400;

/// `H = U diag(values) U*` with ascending real eigenvalues and unitary `U`.
pub fn hermitian_eigen<T: Real>(h: &Hermitian<T>) -> Result<Spectrum<T>> {
    match jacobi(h, JACOBI_SWEEPS) {
        Ok(s) => Ok(s),
        Err(Error::NonConvergence { .. }) => jacobi(h, JACOBI_SWEEPS_FALLBACK),
        Err(e) => Err(e),
    }
}

fn jacobi<T: Real>(h: &Hermitian<T>, max_sweeps: usize) -> Result<Spectrum<T>> {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = Matrix::<T>::identity(n);
    let total = a.norm_fro();
    let eps = T::epsilon();
    let off = |a: &Matrix<T>| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s = s + a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut converged = n <= 1 || total == T::zero();
    let mut sweeps = 0;
    while !converged && sweeps < max_sweeps {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[(p, q)];
                let gabs = g.norm();
                let scale = a[(p, p)].re.abs() + a[(q, q)].re.abs();
                if gabs <= eps * eps * total || (scale > T::zero() && gabs <= eps * T::lit(1e-3) * scale) {
                    a[(p, q)] = czero();
                    a[(q, p)] = czero();
                    continue;
                }
                let phase = g / gabs;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (T::lit(2.0) * gabs);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                // W = diag(1, conj(phase)) * [[c, s], [-s, c]] restricted to (p, q)
                let w_pp = cr(c);
                let w_pq = cr(s);
                let w_qp = phase.conj() * (-s);
                let w_qq = phase.conj() * c;
                // a <- a W
                for i in 0..n {
                    let x = a[(i, p)];
                    let y = a[(i, q)];
                    a[(i, p)] = x * w_pp + y * w_qp;
                    a[(i, q)] = x * w_pq + y * w_qq;
                }
                // a <- W* a
                for j in 0..n {
                    let x = a[(p, j)];
                    let y = a[(q, j)];
                    a[(p, j)] = w_pp.conj() * x + w_qp.conj() * y;
                    a[(q, j)] = w_pq.conj() * x + w_qq.conj() * y;
                }
                a[(p, q)] = czero();
                a[(q, p)] = czero();
                a[(p, p)] = cr(a[(p, p)].re);
                a[(q, q)] = cr(a[(q, q)].re);
                for i in 0..n {
                    let x = v[(i, p)];
                    let y = v[(i, q)];
                    v[(i, p)] = x * w_pp + y * w_qp;
                    v[(i, q)] = x * w_pq + y * w_qq;
                }
            }
        }
        let o = off(&a);
        converged = o <= eps * total;
    }
    if !converged {
        return Err(Error::NonConvergence {
            algorithm: "Hermitian Jacobi",
            iterations: sweeps,
            residual: (off(&a) / total).as_f64(),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let values = order.iter().map(|&i| cr(a[(i, i)].re)).collect();
    let right_vectors = Matrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(Spectrum {
        values,
        right_vectors,
        vector_condition: T::from_count(n),
    })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues<T: Real>(h: &Hermitian<T>) -> Result<Vec<T>> {
    Ok(hermitian_eigen(h)?.real_values())
}

const QR_ITER_PER_EIGENVALUE: usize = 40;
const QR_ITER_FALLBACK: usize = 400;

/// Eigenvalues and right eigenvectors of a general complex matrix.
pub fn general_eigen<T: Real>(x: &Matrix<T>) -> Result<Spectrum<T>> {
    x.check_finite()?;
    let (t, q) = match schur(x, QR_ITER_PER_EIGENVALUE) {
        Ok(tq) => tq,
        Err(Error::NonConvergence { .. }) => schur(x, QR_ITER_FALLBACK)?,
        Err(e) => return Err(e),
    };
    let n = x.dim();
    let values: Vec<Complex<T>> = t.diag();
    let y = triangular_eigenvectors(&t);
    let mut v = q.matmul(&y);
    for j in 0..n {
        let norm = (0..n).fold(T::zero(), |acc, i| acc + v[(i, j)].norm_sqr()).sqrt();
        if norm > T::zero() {
            for i in 0..n {
                v[(i, j)] = v[(i, j)] / norm;
            }
        }
    }
    let vector_condition = match v.inverse() {
        Ok(vi) => v.norm_fro() * vi.norm_fro(),
        Err(_) => T::infinity(),
    };
    Ok(Spectrum {
        values,
        right_vectors: v,
        vector_condition,
    })
}

/// Eigenvalues of a general matrix (Schur diagonal).
pub fn general_eigenvalues<T: Real>(x: &Matrix<T>) -> Result<Vec<Complex<T>>> {
    x.check_finite()?;
    let (t, _) = match schur(x, QR_ITER_PER_EIGENVALUE) {
        Ok(tq) => tq,
        Err(Error::NonConvergence { .. }) => schur(x, QR_ITER_FALLBACK)?,
        Err(e) => return Err(e),
    };
    Ok(t.diag())
}

/// Complex Schur form `X = Q T Q*`.
pub fn schur<T: Real>(x: &Matrix<T>, iter_per_eigenvalue: usize) -> Result<(Matrix<T>, Matrix<T>)> {
    let n = x.dim();
    let (mut h, mut q) = hessenberg(x);
    if n <= 1 {
        return Ok((h, q));
    }
    let eps = T::epsilon();
    let norm = h.norm_fro().max(T::min_positive_value());
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total_iter = 0usize;
    let cap = iter_per_eigenvalue * n;
    let mut rot: Vec<(T, Complex<T>)> = Vec::with_capacity(n);
    while hi > 0 {
        // deflation search
        let mut l = hi;
        while l > 0 {
            let s = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
            let s = if s == T::zero() { norm } else { s };
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = czero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total_iter += 1;
        if total_iter > cap {
            return Err(Error::NonConvergence {
                algorithm: "complex Schur QR",
                iterations: total_iter,
                residual: (h[(hi, hi - 1)].norm() / norm).as_f64(),
            });
        }
        let mu = if iter % 11 == 10 {
            // exceptional shift
            h[(hi, hi)] + cr(h[(hi, hi - 1)].norm() * T::lit(0.75))
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        for k in l..=hi {
            h[(k, k)] = h[(k, k)] - mu;
        }
        rot.clear();
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rot.push((c, s));
            for j in k..n {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -s.conj() * a + b * c;
            }
            h[(k + 1, k)] = czero();
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = l + idx;
            let top = (k + 2).min(hi);
            for i in 0..=top {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = -a * s + b * c;
            }
            for i in 0..n {
                let a = q[(i, k)];
                let b = q[(i, k + 1)];
                q[(i, k)] = a * c + b * s.conj();
                q[(i, k + 1)] = -a * s + b * c;
            }
        }
        for k in l..=hi {
            h[(k, k)] = h[(k, k)] + mu;
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = czero();
        }
    }
    Ok((h, q))
}

fn wilkinson_shift<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    let m = (a - d) * half;
    let disc = (m * m + b * c).sqrt();
    let center = (a + d) * half;
    let e1 = center + disc;
    let e2 = center - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Unitary `G = [[c, s], [-conj(s), c]]` with `G [x; y] = [r; 0]`.
fn givens<T: Real>(x: Complex<T>, y: Complex<T>) -> (T, Complex<T>) {
    let ay = y.norm();
    if ay == T::zero() {
        return (T::one(), czero());
    }
    let ax = x.norm();
    if ax == T::zero() {
        return (T::zero(), y.conj() / ay);
    }
    let nrm = ax.hypot(ay);
    let c = ax / nrm;
    let s = (x / ax) * y.conj() / nrm;
    (c, s)
}

/// Householder reduction `X = Q H Q*` with `H` upper Hessenberg.
fn hessenberg<T: Real>(x: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let n = x.dim();
    let mut h = x.clone();
    let mut q = Matrix::identity(n);
    if n < 3 {
        return (h, q);
    }
    let mut v = vec![czero::<T>(); n];
    for k in 0..(n - 2) {
        let alpha_norm = ((k + 1)..n).fold(T::zero(), |acc, i| acc + h[(i, k)].norm_sqr()).sqrt();
        if alpha_norm == T::zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() > T::zero() { x0 / x0.norm() } else { cone() };
        let alpha = -phase * alpha_norm;
        for i in 0..n {
            v[i] = czero();
        }
        for i in (k + 1)..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] = v[k + 1] - alpha;
        let vnorm = ((k + 1)..n).fold(T::zero(), |acc, i| acc + v[i].norm_sqr()).sqrt();
        if vnorm == T::zero() {
            continue;
        }
        for i in (k + 1)..n {
            v[i] = v[i] / vnorm;
        }
        let two = T::lit(2.0);
        // H <- (I - 2 v v*) H
        for j in 0..n {
            let mut dot = czero();
            for i in (k + 1)..n {
                dot = dot + v[i].conj() * h[(i, j)];
            }
            for i in (k + 1)..n {
                h[(i, j)] = h[(i, j)] - v[i] * dot * two;
            }
        }
        // H <- H (I - 2 v v*), Q <- Q (I - 2 v v*)
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let mut dot: Complex<T> = czero();
                for j in (k + 1)..n {
                    dot = dot + m[(i, j)] * v[j];
                }
                for j in (k + 1)..n {
                    m[(i, j)] = m[(i, j)] - dot * v[j].conj() * two;
                }
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = czero();
        }
    }
    (h, q)
}

/// Right eigenvectors of an upper-triangular matrix (unit last component).
fn triangular_eigenvectors<T: Real>(t: &Matrix<T>) -> Matrix<T> {
    let n = t.dim();
    let mut y = Matrix::zeros(n);
    let smin = (T::epsilon() * t.norm_fro()).max(T::min_positive_value());
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = cone();
        for j in (0..k).rev() {
            let mut s: Complex<T> = czero();
            for i in (j + 1)..=k {
                s = s + t[(j, i)] * y[(i, k)];
            }
            let mut d = t[(j, j)] - lambda;
            if d.norm() < smin {
                d = cr(smin);
            }
            y[(j, k)] = -s / d;
        }
    }
    y
}
