//! Seeded random searches for the scalar power thresholds and the
//! anticommutator counterexample. Witnesses are re-checked by a second,
//! independent formula before they are returned.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{hermitian_eigenvalues, Hermitian, Matrix, MatrixJson};
use crate::sampler::{SampleConfig, Sampler};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CounterKind {
    /// `a, b > 0` with `Im (a+ib)^p < 0`.
    PowerIm { p: f64 },
    /// `a, b > 0` with `Re (a+ib)^p > a^p`.
    PowerRe { p: f64 },
    /// `A, B > 0` (2x2) with `AB + BA` indefinite.
    Anticommutator,
}

impl CounterKind {
    /// Whether a witness exists.
    pub fn expected_found(&self) -> bool {
        match *self {
            CounterKind::PowerIm { p } => p > 2.0,
            CounterKind::PowerRe { p } => p < 1.0 || p > 3.0,
            CounterKind::Anticommutator => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(flatten)]
    pub kind: CounterKind,
    /// Draw index at which the witness appeared.
    pub draw: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_a: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_b: Option<MatrixJson>,
    /// Size of the violation, positive; for the anticommutator search this is `-det(AB+BA)`.
    pub violation: f64,
    pub reverified: bool,
}

/// Violations smaller than this (relative) are treated as roundoff.
const THRESHOLD: f64 = 1e-12;

/// Up to `budget` seeded draws; `Ok(None)` is a legitimate "not found".
pub fn counterexample_search(kind: CounterKind, budget: u64, seed: u64) -> Result<Option<Witness>> {
    if budget == 0 {
        return Err(Error::Constraint { field: "budget".into(), message: "must be >= 1".into() });
    }
    let n = if kind == CounterKind::Anticommutator { 2 } else { 1 };
    let mut s = Sampler::new(&SampleConfig::new(n, seed))?;
    for draw in 0..budget {
        let found = match kind {
            CounterKind::PowerIm { p } | CounterKind::PowerRe { p } => scalar_draw(&mut s, kind, p, draw),
            CounterKind::Anticommutator => anticommutator_draw(&mut s, draw)?,
        };
        if let Some(w) = found {
            if w.reverified {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

fn scalar_draw(s: &mut Sampler, kind: CounterKind, p: f64, draw: u64) -> Option<Witness> {
    let theta = s.uniform_in(0.0, FRAC_PI_2);
    let r = s.log_uniform(0.1, 10.0);
    let z = Complex64::from_polar(r, theta);
    let (a, b) = (z.re, z.im);
    if !(a > 0.0 && b > 0.0) {
        return None;
    }
    let zp = z.powf(p);
    let size = r.powf(p);
    let violation = match kind {
        CounterKind::PowerIm { .. } => -zp.im,
        _ => zp.re - a.powf(p),
    };
    if !(violation > THRESHOLD * size) {
        return None;
    }
    // second opinion through the real polar form
    let (rr, arg) = (a.hypot(b), b.atan2(a));
    let check = match kind {
        CounterKind::PowerIm { .. } => -(rr.powf(p) * (p * arg).sin()),
        _ => rr.powf(p) * (p * arg).cos() - (a.ln() * p).exp(),
    };
    Some(Witness {
        kind,
        draw,
        a: Some(a),
        b: Some(b),
        matrix_a: None,
        matrix_b: None,
        violation,
        reverified: check > THRESHOLD * size,
    })
}

fn anticommutator_draw(s: &mut Sampler, draw: u64) -> Result<Option<Witness>> {
    let pd = |s: &mut Sampler| {
        let u = s.haar_unitary(2);
        let d = [1.0, s.log_uniform(1e-3, 1.0)];
        crate::matcore::spectral_map(&u, &d)
    };
    let a = pd(s);
    let b = pd(s);
    let ab = a.matmul(&b);
    let anti = Hermitian::symmetrize(&(&ab + &ab.adjoint()));
    let ev = hermitian_eigenvalues(&anti)?;
    let scale = anti.norm_fro();
    if !(ev[0] < -THRESHOLD * scale && ev[1] > THRESHOLD * scale) {
        return Ok(None);
    }
    let det2 = |m: &Matrix<f64>| (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
    let tr2 = |m: &Matrix<f64>| (m[(0, 0)] + m[(1, 1)]).re;
    let det_anti = det2(&anti);
    let reverified = det2(&a) > 0.0
        && tr2(&a) > 0.0
        && det2(&b) > 0.0
        && tr2(&b) > 0.0
        && det_anti < -THRESHOLD * scale * scale;
    Ok(Some(Witness {
        kind: CounterKind::Anticommutator,
        draw,
        a: None,
        b: None,
        matrix_a: Some(MatrixJson::from_matrix(&a)),
        matrix_b: Some(MatrixJson::from_matrix(&b)),
        violation: -det_anti,
        reverified,
    }))
}
